// qwb: batch driver for quantized weight-balancing and consensus experiments.
//
//   qwb balance   [--config FILE] [flags] [-o OUT]
//   qwb consensus [--config FILE] [flags] [-o OUT]
//
// Exit status: 0 success, 1 configuration or I/O error, 2 a trial failed
// (invariant violation or arithmetic overflow).

#include <algorithm>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "qwb/harness.hpp"

namespace {

struct FlagSpec {
  const char* names;
  const char* key;
  const char* help;
};

constexpr FlagSpec kFlags[] = {
    {"-N,--nodes", "N", "number of nodes (default 6)"},
    {"-p,--prob", "p", "extra-edge probability per ordered pair (default 0.5)"},
    {"--trials", "trials", "trials per graph realization (default 100)"},
    {"--graph-realizations", "graph_realizations", "independent graphs (default 100)"},
    {"--max-iters", "max_iters", "rounds per run (default 100000)"},
    {"--tol", "tol", "stop tolerance on ||eps||_1 or MSE (default 0)"},
    {"--q-min", "q_min", "quantizer lower bound (default 0)"},
    {"--q-max", "q_max", "quantizer upper bound (default 1)"},
    {"--alpha-a0", "alpha_a0", "consensus step scale (default 1)"},
    {"--alpha-tau", "alpha_tau", "consensus step exponent in (1/2, 1] (default 1)"},
    {"--seed,--master-seed", "master_seed", "master seed (default 1)"},
    {"--record-every", "record_every", "recording stride (default 100)"},
    {"--emit", "emit", "csv or json (default csv)"},
    {"--graph-file", "graph_file", "edge-list graph used instead of the generator"},
    {"--threads", "threads", "worker threads, 0 = all cores (default 1)"},
};

void add_run_flags(CLI::App* cmd, std::map<std::string, std::string>& values,
                   std::optional<std::string>& config_path, std::string& output) {
  cmd->add_option("--config", config_path, "flat key=value configuration file");
  cmd->add_option("-o,--output", output, "output path, '-' for stdout")->capture_default_str();
  for (const FlagSpec& f : kFlags) {
    cmd->add_option_function<std::string>(
        f.names, [&values, key = std::string(f.key)](const std::string& v) { values[key] = v; },
        f.help);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantized weight-balancing and two-bit average consensus simulator"};
  app.require_subcommand(1);

  std::map<std::string, std::string> values;
  std::optional<std::string> config_path;
  std::string output = "-";

  auto* balance = app.add_subcommand("balance", "one-bit weight balancing, tracks ||eps(k)||_1");
  auto* consensus = app.add_subcommand("consensus", "two-bit quantized consensus, tracks MSE");
  add_run_flags(balance, values, config_path, output);
  add_run_flags(consensus, values, config_path, output);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  qwb::ExperimentConfig cfg;
  try {
    if (config_path) cfg = qwb::parse_config_file(*config_path, cfg);
    cfg.mode = balance->parsed() ? qwb::Mode::balance : qwb::Mode::consensus;
    for (const auto& [key, value] : values) qwb::apply_setting(cfg, key, value);
    cfg.validate();
  } catch (const qwb::ConfigError& e) {
    std::cerr << "qwb: config error: " << e.what() << '\n';
    return 1;
  }

  qwb::ExperimentResult result;
  try {
    result = qwb::run_experiment(cfg);
  } catch (const qwb::ConfigError& e) {
    std::cerr << "qwb: config error: " << e.what() << '\n';
    return 1;
  } catch (const qwb::TrialFailure& e) {
    std::cerr << "qwb: " << (e.invariant_violation() ? "invariant violation" : "trial failed")
              << " in " << e.what() << '\n';
    return 2;
  }

  try {
    qwb::export_series(result, cfg, output);
  } catch (const std::exception& e) {
    std::cerr << "qwb: " << e.what() << '\n';
    return 1;
  }

  qwb::Round latest_stop = 0;
  std::uint64_t events = 0;
  for (const auto& t : result.trials) {
    latest_stop = std::max(latest_stop, t.stop_round);
    events += t.decreasing_events;
  }
  std::cerr << "qwb: " << qwb::to_string(cfg.mode) << ", " << result.trials.size()
            << " runs, latest stop round " << latest_stop << ", " << events
            << " decreasing events, final mean "
            << (cfg.mode == qwb::Mode::balance ? "||eps||_1 " : "MSE ")
            << result.series.mean.back() << '\n';
  return 0;
}
