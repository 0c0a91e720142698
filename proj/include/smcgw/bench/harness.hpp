#pragma once

// Load-evaluation harness: offered-load runs against the grant and
// computation protocols with open-loop scheduling (fixed-rate dispatch,
// never request-after-response, so queue saturation stays visible). Each
// run reports latency quantiles, successful throughput, drop counts and
// queue-depth samples; sweeps add combined CSV and SVG plots.

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace smcgw::bench {

struct LoadScenario {
  std::string protocol = "grant";  // "grant" | "computation"
  int peer_count = 10;
  double request_rate = 1.0;  // requests per second
  int duration_s = 30;
  int gateway_workers = 8;
  std::size_t queue_capacity = 100;
  std::string backend = "mock";  // computation sessions; mock mirrors the evaluation setup
  int peer_timeout_ms = 10000;

  // Run lengths match the original measurement method; shorter runs are a
  // validation error.
  void validate() const;
};

struct QueueSample {
  double t_s = 0;  // seconds since run start
  std::size_t depth = 0;
  std::size_t outstanding = 0;
};

struct RunReport {
  LoadScenario scenario;
  std::size_t offered = 0;
  std::size_t succeeded = 0;
  std::size_t dropped = 0;
  std::size_t failed = 0;
  double median_ms = 0;
  double p25_ms = 0;
  double p75_ms = 0;
  double throughput_rps = 0;  // successful answers per offered second
  std::vector<double> latencies_ms;
  std::vector<QueueSample> queue_samples;
  std::size_t queue_peak = 0;  // gateway-reported peak outstanding
  std::size_t queue_capacity = 0;
  std::size_t end_of_load_depth = 0;  // sampled right after the last request went out
  std::uint64_t gateway_drops = 0;

  bool conservation_ok() const { return offered == succeeded + dropped + failed; }
  nlohmann::json to_json(bool include_raw = false) const;
};

RunReport run_scenario(const LoadScenario& scenario);

// One run per rate with a cooldown in between; partial results are written
// to out_dir as they complete (empty out_dir writes nothing).
std::vector<RunReport> sweep(const std::vector<double>& rates, const LoadScenario& base,
                             int cooldown_s = 5, const std::string& out_dir = "");

void write_report_json(const RunReport& report, const std::string& path);
void write_reports_csv(const std::vector<RunReport>& reports, const std::string& path);
// latency / throughput / queue-peak vs offered load.
void write_sweep_plots(const std::vector<RunReport>& reports, const std::string& dir);
// median latency vs peer count (reports from runs at fixed rate).
void write_peer_scaling_plot(const std::vector<RunReport>& reports, const std::string& path);

double median_of(std::vector<double> values);
double quantile_of(std::vector<double> values, double q);

}  // namespace smcgw::bench
