#pragma once

// Bounded admission queue feeding a fixed worker pool. "Outstanding" counts
// every admitted-but-unanswered request (waiting or being processed); when
// it reaches capacity, further requests are rejected immediately. Mirrors
// the evaluation setup: a uwsgi-style listen queue with a hard entry limit.

#include <condition_variable>
#include <cstdint>
#include <deque>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace smcgw::gateway {

class BoundedQueue {
 public:
  explicit BoundedQueue(std::size_t capacity) : capacity_(capacity) {}
  ~BoundedQueue() { stop(); }

  void start(int workers);
  void stop();

  // False when the queue is saturated; the job is then never run.
  bool try_enqueue(std::function<void()> job);

  struct Stats {
    std::size_t capacity = 0;
    std::size_t depth = 0;        // admitted, not yet picked by a worker
    std::size_t outstanding = 0;  // admitted, not yet answered
    std::size_t peak_outstanding = 0;
    std::uint64_t drops = 0;
    std::uint64_t completed = 0;
    std::size_t workers_busy = 0;
  };
  Stats stats() const;
  void reset_stats();

 private:
  void worker_loop();

  std::size_t capacity_;
  mutable std::mutex mutex_;
  std::condition_variable cv_;
  std::deque<std::function<void()>> jobs_;
  std::vector<std::thread> workers_;
  bool stopping_ = false;
  std::size_t outstanding_ = 0;
  std::size_t peak_outstanding_ = 0;
  std::uint64_t drops_ = 0;
  std::uint64_t completed_ = 0;
  std::size_t busy_ = 0;
};

}  // namespace smcgw::gateway
