// Load-evaluation CLI. Launches an in-process gateway + peers on loopback
// and drives the grant or computation protocol at a fixed offered rate.
//
//   smcgw-bench run   --protocol computation --peers 30 --rate 10 --duration 60 --out out/
//   smcgw-bench sweep --protocol grant --rates 1,2,5,10,20,50,100,170,200 --out out/

#include <CLI11.hpp>

#include <iostream>

#include "smcgw/bench/harness.hpp"

using namespace smcgw::bench;

namespace {

void print_summary(const RunReport& r) {
  std::cout << r.scenario.protocol << " rate=" << r.scenario.request_rate
            << "/s peers=" << r.scenario.peer_count << "  offered=" << r.offered
            << " ok=" << r.succeeded << " dropped=" << r.dropped << " failed=" << r.failed
            << "  median=" << r.median_ms << "ms p25=" << r.p25_ms << "ms p75=" << r.p75_ms
            << "ms  throughput=" << r.throughput_rps << "/s  queue_peak=" << r.queue_peak << "/"
            << r.queue_capacity << (r.conservation_ok() ? "" : "  CONSERVATION VIOLATED") << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"smcgw-bench: offered-load evaluation harness"};
  app.require_subcommand(1);

  LoadScenario base;
  std::string out_dir = "bench-out";
  std::string rates_csv;
  double rate = 1.0;
  int cooldown_s = 5;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--protocol", base.protocol, "grant | computation")->default_val("grant");
    cmd->add_option("--peers", base.peer_count)->default_val(10);
    cmd->add_option("--duration", base.duration_s, "seconds per run (>=30 grant / >=60 computation)")
        ->default_val(30);
    cmd->add_option("--workers", base.gateway_workers)->default_val(8);
    cmd->add_option("--capacity", base.queue_capacity)->default_val(100);
    cmd->add_option("--backend", base.backend, "mock | additive")->default_val("mock");
    cmd->add_option("--peer-timeout-ms", base.peer_timeout_ms)->default_val(10000);
    cmd->add_option("--out", out_dir, "report/plot output directory");
  };

  auto* run = app.add_subcommand("run", "single run at a fixed rate");
  add_common(run);
  run->add_option("--rate", rate, "offered requests per second")->required();

  auto* sweep_cmd = app.add_subcommand("sweep", "one run per rate plus combined plots");
  add_common(sweep_cmd);
  sweep_cmd->add_option("--rates", rates_csv, "comma-separated offered rates")->required();
  sweep_cmd->add_option("--cooldown", cooldown_s, "seconds between runs")->default_val(5);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      base.request_rate = rate;
      RunReport report = run_scenario(base);
      print_summary(report);
      if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        write_report_json(report, out_dir + "/report.json");
        write_reports_csv({report}, out_dir + "/report.csv");
      }
      return report.conservation_ok() ? 0 : 1;
    }

    std::vector<double> rates;
    std::stringstream ss(rates_csv);
    for (std::string item; std::getline(ss, item, ',');) rates.push_back(std::stod(item));
    auto reports = sweep(rates, base, cooldown_s, out_dir);
    for (const auto& r : reports) print_summary(r);
    bool ok = std::all_of(reports.begin(), reports.end(),
                          [](const RunReport& r) { return r.conservation_ok(); });
    return ok ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
