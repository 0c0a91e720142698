#include "smcgw/bench/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <thread>

#include "smcgw/bench/cluster.hpp"
#include "smcgw/bench/svg.hpp"
#include "smcgw/wire/http.hpp"

namespace smcgw::bench {

namespace {

using SteadyClock = std::chrono::steady_clock;

enum class Outcome : std::uint8_t { Pending, Success, Dropped, Failed };

struct Slot {
  std::atomic<Outcome> outcome{Outcome::Pending};
  double latency_ms = 0;
};

}  // namespace

void LoadScenario::validate() const {
  if (protocol != "grant" && protocol != "computation") {
    throw std::invalid_argument("protocol must be \"grant\" or \"computation\"");
  }
  if (request_rate <= 0) throw std::invalid_argument("request_rate must be positive");
  if (peer_count < 1) throw std::invalid_argument("peer_count must be >= 1");
  int min_duration = protocol == "grant" ? 30 : 60;
  if (duration_s < min_duration) {
    throw std::invalid_argument("duration for the " + protocol + " protocol must be >= " +
                                std::to_string(min_duration) + " s");
  }
}

double quantile_of(std::vector<double> values, double q) {
  if (values.empty()) return 0;
  std::sort(values.begin(), values.end());
  double idx = q * (values.size() - 1);
  std::size_t lo = static_cast<std::size_t>(idx);
  std::size_t hi = std::min(lo + 1, values.size() - 1);
  double frac = idx - lo;
  return values[lo] * (1 - frac) + values[hi] * frac;
}

double median_of(std::vector<double> values) { return quantile_of(std::move(values), 0.5); }

RunReport run_scenario(const LoadScenario& scenario) {
  scenario.validate();

  ClusterOptions opts;
  opts.peer_count = scenario.peer_count;
  opts.backend = scenario.backend;
  opts.queue_capacity = scenario.queue_capacity;
  opts.workers = scenario.gateway_workers;
  opts.peer_timeout_ms = scenario.peer_timeout_ms;
  // Load runs measure queueing, not the privacy policies: lift the per-client
  // rate budget so it never interferes.
  opts.peer_tweak = [](int, peer::PeerConfig& cfg) {
    cfg.policy.max_requests_per_client_per_hour = 10'000'000;
    cfg.policy.max_request_age_s = 24 * 3600;
  };
  Cluster cluster(opts);
  auto client = cluster.make_client();
  std::string gateway = cluster.gateway().address();

  // One identical request reused for the whole run, as in the scripted
  // client of the original measurements.
  std::string path;
  nlohmann::json request_body;
  if (scenario.protocol == "grant") {
    path = "/grants";
    request_body = client.build_grant_request({standard_query()});
  } else {
    path = "/computations";
    auto grant = client.request_grant({standard_query()});
    if (!grant.ok()) throw std::runtime_error("bench setup: grant request failed: " + grant.failure.detail);
    request_body = client.build_computation_request(standard_query(), *grant);
  }

  wire::http_post_json(gateway, "/stats/reset", nlohmann::json::object(), 2000);

  const std::size_t total =
      static_cast<std::size_t>(std::llround(scenario.request_rate * scenario.duration_s));
  std::vector<Slot> slots(total);
  std::atomic<std::size_t> completed{0};

  RunReport report;
  report.scenario = scenario;
  report.offered = total;
  report.queue_capacity = scenario.queue_capacity;

  auto t_start = SteadyClock::now();
  auto since_start_s = [&t_start] {
    return std::chrono::duration<double>(SteadyClock::now() - t_start).count();
  };

  // Queue sampler, 10 Hz.
  std::atomic<bool> sampling{true};
  std::mutex samples_mutex;
  std::thread sampler([&] {
    while (sampling) {
      auto resp = wire::http_get_json(gateway, "/stats", 2000);
      if (resp && resp->ok()) {
        QueueSample s;
        s.t_s = since_start_s();
        s.depth = resp->body.value("queue_depth", 0);
        s.outstanding = resp->body.value("outstanding", 0);
        std::lock_guard lock(samples_mutex);
        report.queue_samples.push_back(s);
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(100));
    }
  });

  // Open-loop dispatcher: request i goes out at t_start + i/rate regardless
  // of how previous requests are doing.
  auto dispatch_one = [&](std::size_t i) {
    auto t0 = SteadyClock::now();
    auto resp = wire::http_post_json(gateway, path, request_body, 60000);
    double ms = std::chrono::duration<double, std::milli>(SteadyClock::now() - t0).count();
    Slot& slot = slots[i];
    slot.latency_ms = ms;
    if (!resp) {
      slot.outcome = Outcome::Failed;
    } else if (resp->ok()) {
      slot.outcome = Outcome::Success;
    } else if (resp->status == 503) {
      slot.outcome = Outcome::Dropped;
    } else {
      slot.outcome = Outcome::Failed;
    }
    completed.fetch_add(1, std::memory_order_relaxed);
  };

  {
    std::vector<std::thread> in_flight;
    in_flight.reserve(total);
    double interval_s = 1.0 / scenario.request_rate;
    for (std::size_t i = 0; i < total; ++i) {
      auto due = t_start + std::chrono::duration_cast<SteadyClock::duration>(
                               std::chrono::duration<double>(i * interval_s));
      std::this_thread::sleep_until(due);
      in_flight.emplace_back(dispatch_one, i);
    }
    // Queue state right after the last request went out, before the backlog
    // drains: the saturation snapshot.
    if (auto resp = wire::http_get_json(gateway, "/stats", 2000); resp && resp->ok()) {
      report.end_of_load_depth = resp->body.value("outstanding", 0);
    }
    for (auto& t : in_flight) t.join();
  }

  sampling = false;
  sampler.join();

  if (auto resp = wire::http_get_json(gateway, "/stats", 2000); resp && resp->ok()) {
    report.queue_peak = resp->body.value("peak_outstanding", 0);
    report.gateway_drops = resp->body.value("drops", 0);
  }

  for (Slot& slot : slots) {
    switch (slot.outcome.load()) {
      case Outcome::Success:
        ++report.succeeded;
        report.latencies_ms.push_back(slot.latency_ms);
        break;
      case Outcome::Dropped: ++report.dropped; break;
      default: ++report.failed; break;
    }
  }
  report.median_ms = median_of(report.latencies_ms);
  report.p25_ms = quantile_of(report.latencies_ms, 0.25);
  report.p75_ms = quantile_of(report.latencies_ms, 0.75);
  report.throughput_rps = static_cast<double>(report.succeeded) / scenario.duration_s;
  return report;
}

std::vector<RunReport> sweep(const std::vector<double>& rates, const LoadScenario& base,
                             int cooldown_s, const std::string& out_dir) {
  std::vector<RunReport> reports;
  if (!out_dir.empty()) std::filesystem::create_directories(out_dir);
  for (std::size_t i = 0; i < rates.size(); ++i) {
    LoadScenario s = base;
    s.request_rate = rates[i];
    RunReport report = run_scenario(s);
    reports.push_back(report);
    if (!out_dir.empty()) {
      write_report_json(report, out_dir + "/run_" + std::to_string(i) + "_rate_" +
                                    std::to_string(rates[i]) + ".json");
      write_reports_csv(reports, out_dir + "/report.csv");  // partial results survive aborts
    }
    if (i + 1 < rates.size()) std::this_thread::sleep_for(std::chrono::seconds(cooldown_s));
  }
  if (!out_dir.empty()) {
    write_sweep_plots(reports, out_dir);
  }
  return reports;
}

nlohmann::json RunReport::to_json(bool include_raw) const {
  nlohmann::json samples = nlohmann::json::array();
  for (const QueueSample& s : queue_samples) {
    samples.push_back({{"t_s", s.t_s}, {"depth", s.depth}, {"outstanding", s.outstanding}});
  }
  nlohmann::json j{{"scenario",
                    {{"protocol", scenario.protocol},
                     {"peer_count", scenario.peer_count},
                     {"request_rate", scenario.request_rate},
                     {"duration_s", scenario.duration_s},
                     {"gateway_workers", scenario.gateway_workers},
                     {"queue_capacity", scenario.queue_capacity},
                     {"backend", scenario.backend}}},
                   {"offered", offered},
                   {"succeeded", succeeded},
                   {"dropped", dropped},
                   {"failed", failed},
                   {"median_ms", median_ms},
                   {"p25_ms", p25_ms},
                   {"p75_ms", p75_ms},
                   {"throughput_rps", throughput_rps},
                   {"queue_peak", queue_peak},
                   {"queue_capacity", queue_capacity},
                   {"end_of_load_depth", end_of_load_depth},
                   {"gateway_drops", gateway_drops},
                   {"queue_samples", samples},
                   {"conservation_ok", conservation_ok()}};
  if (include_raw) j["latencies_ms"] = latencies_ms;
  return j;
}

void write_report_json(const RunReport& report, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  out << report.to_json(true).dump(2) << "\n";
}

void write_reports_csv(const std::vector<RunReport>& reports, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  out << "protocol,peer_count,rate_rps,duration_s,offered,succeeded,dropped,failed,"
         "median_ms,p25_ms,p75_ms,throughput_rps,queue_peak,end_of_load_depth,queue_capacity\n";
  for (const RunReport& r : reports) {
    out << r.scenario.protocol << ',' << r.scenario.peer_count << ',' << r.scenario.request_rate
        << ',' << r.scenario.duration_s << ',' << r.offered << ',' << r.succeeded << ','
        << r.dropped << ',' << r.failed << ',' << r.median_ms << ',' << r.p25_ms << ',' << r.p75_ms
        << ',' << r.throughput_rps << ',' << r.queue_peak << ',' << r.end_of_load_depth << ','
        << r.queue_capacity << "\n";
  }
}

void write_sweep_plots(const std::vector<RunReport>& reports, const std::string& dir) {
  std::filesystem::create_directories(dir);
  Series median{"median", {}}, p25{"p25", {}}, p75{"p75", {}};
  Series throughput{"successful req/s", {}}, offered{"offered = handled", {}};
  Series peak{"peak queue depth", {}}, capacity{"capacity", {}};
  for (const RunReport& r : reports) {
    double rate = r.scenario.request_rate;
    median.points.push_back({rate, r.median_ms});
    p25.points.push_back({rate, r.p25_ms});
    p75.points.push_back({rate, r.p75_ms});
    throughput.points.push_back({rate, r.throughput_rps});
    offered.points.push_back({rate, rate});
    peak.points.push_back({rate, static_cast<double>(r.queue_peak)});
    capacity.points.push_back({rate, static_cast<double>(r.queue_capacity)});
  }
  write_svg_chart(dir + "/latency_vs_load.svg", "Request latency vs offered load",
                  "offered load [req/s]", "latency [ms]", {median, p25, p75});
  write_svg_chart(dir + "/throughput_vs_load.svg", "Successful throughput vs offered load",
                  "offered load [req/s]", "successful requests/s", {throughput, offered});
  write_svg_chart(dir + "/queue_vs_load.svg", "Queue saturation vs offered load",
                  "offered load [req/s]", "queue depth", {peak, capacity});
}

void write_peer_scaling_plot(const std::vector<RunReport>& reports, const std::string& path) {
  Series median{"median latency", {}};
  for (const RunReport& r : reports) {
    median.points.push_back({static_cast<double>(r.scenario.peer_count), r.median_ms});
  }
  write_svg_chart(path, "Computation latency vs peer count", "peers", "latency [ms]", {median});
}

}  // namespace smcgw::bench
