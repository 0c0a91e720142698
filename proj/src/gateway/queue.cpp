#include "smcgw/gateway/queue.hpp"

namespace smcgw::gateway {

void BoundedQueue::start(int workers) {
  std::lock_guard lock(mutex_);
  if (!workers_.empty()) return;
  stopping_ = false;
  for (int i = 0; i < workers; ++i) workers_.emplace_back([this] { worker_loop(); });
}

void BoundedQueue::stop() {
  {
    std::lock_guard lock(mutex_);
    stopping_ = true;
  }
  cv_.notify_all();
  for (auto& w : workers_) {
    if (w.joinable()) w.join();
  }
  workers_.clear();
  jobs_.clear();
}

bool BoundedQueue::try_enqueue(std::function<void()> job) {
  {
    std::lock_guard lock(mutex_);
    if (stopping_) return false;
    if (outstanding_ >= capacity_) {
      ++drops_;
      return false;
    }
    ++outstanding_;
    peak_outstanding_ = std::max(peak_outstanding_, outstanding_);
    jobs_.push_back(std::move(job));
  }
  cv_.notify_one();
  return true;
}

void BoundedQueue::worker_loop() {
  for (;;) {
    std::function<void()> job;
    {
      std::unique_lock lock(mutex_);
      cv_.wait(lock, [this] { return stopping_ || !jobs_.empty(); });
      if (stopping_) return;
      job = std::move(jobs_.front());
      jobs_.pop_front();
      ++busy_;
    }
    job();
    {
      std::lock_guard lock(mutex_);
      --busy_;
      --outstanding_;
      ++completed_;
    }
  }
}

BoundedQueue::Stats BoundedQueue::stats() const {
  std::lock_guard lock(mutex_);
  return Stats{capacity_, jobs_.size(), outstanding_, peak_outstanding_, drops_, completed_, busy_};
}

void BoundedQueue::reset_stats() {
  std::lock_guard lock(mutex_);
  peak_outstanding_ = outstanding_;
  drops_ = 0;
  completed_ = 0;
}

}  // namespace smcgw::gateway
