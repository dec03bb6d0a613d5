#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "qwb/schedule.hpp"

namespace qwb {

enum class Mode { balance, consensus };
enum class Emit { csv, json };

/// Rejected configuration value, tagged with the offending field.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string field, const std::string& what)
      : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct ExperimentConfig {
  Mode mode = Mode::balance;
  std::size_t n = 6;
  double p = 0.5;
  std::size_t trials = 100;
  std::size_t graph_realizations = 100;
  Round max_iters = 100000;
  double tol = 0.0;
  double q_min = 0.0;
  double q_max = 1.0;
  double alpha_a0 = 1.0;
  double alpha_tau = 1.0;
  std::uint64_t master_seed = 1;
  Round record_every = 100;
  Emit emit = Emit::csv;
  /// Fixed edge-list graph used for every realization instead of the generator.
  std::string graph_file;
  /// Worker threads for trials; 0 picks the hardware concurrency.
  std::size_t threads = 1;

  /// Throws ConfigError on the first constraint violation.
  void validate() const;
};

/// Recognized keys, in canonical order.
const std::vector<std::string>& config_keys();

/// Sets one field from its textual value. Throws ConfigError for unknown keys
/// and unparsable or out-of-range values.
void apply_setting(ExperimentConfig& cfg, std::string_view key, std::string_view value);

/// Flat "key = value" lines; blank lines and '#' comments ignored. Values are
/// applied on top of `base` and the result is validated.
ExperimentConfig parse_config(std::istream& in, ExperimentConfig base = {});
ExperimentConfig parse_config_file(const std::filesystem::path& path, ExperimentConfig base = {});

/// Every field as "key=value" lines, readable by parse_config.
std::string format_config(const ExperimentConfig& cfg);

std::string_view to_string(Mode m);
std::string_view to_string(Emit e);

/// Metric statistics across all runs on the recording grid.
struct AggregateSeries {
  Mode mode = Mode::balance;
  std::vector<Round> k;
  std::vector<double> mean;
  std::vector<double> median;
  std::vector<double> min;
  std::vector<double> max;

  std::size_t size() const { return k.size(); }
};

struct TrialSummary {
  std::size_t graph_index = 0;
  std::size_t trial_index = 0;
  std::size_t edge_count = 0;
  Round stop_round = 0;
  /// ||eps||_1 (balance) or MSE (consensus) at the stopping round.
  double final_metric = 0.0;
  std::uint64_t decreasing_events = 0;
  Round worst_event_gap = 0;
  /// Largest potential seen, in decimal.
  std::string max_potential;
};

struct ExperimentResult {
  AggregateSeries series;
  std::vector<TrialSummary> trials;
};

/// A trial threw; carries which one and whether it was an invariant failure.
class TrialFailure : public std::runtime_error {
 public:
  TrialFailure(std::size_t graph, std::size_t trial, bool invariant, const std::string& what)
      : std::runtime_error("graph " + std::to_string(graph) + ", trial " + std::to_string(trial) +
                           ": " + what),
        graph_(graph),
        trial_(trial),
        invariant_(invariant) {}
  std::size_t graph_index() const { return graph_; }
  std::size_t trial_index() const { return trial_; }
  bool invariant_violation() const { return invariant_; }

 private:
  std::size_t graph_;
  std::size_t trial_;
  bool invariant_;
};

/// Recording grid: 0, r, 2r, ... and always max_iters.
std::vector<Round> recording_grid(Round max_iters, Round record_every);

/// Runs graph_realizations x trials independent runs and aggregates the
/// tracked metric on the recording grid. A run that stopped early holds its
/// final value for later grid points. Output is independent of `threads`.
/// Throws TrialFailure for the lowest-indexed failing run.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Columns: k, metric_mean, metric_median, metric_min, metric_max, gamma, alpha.
void write_csv(std::ostream& out, const AggregateSeries& series, const ExperimentConfig& cfg);
/// Same rows plus the config and seed.
void write_json(std::ostream& out, const ExperimentResult& result, const ExperimentConfig& cfg);

/// Writes in cfg.emit format to `path`; "-" means stdout.
void export_series(const ExperimentResult& result, const ExperimentConfig& cfg,
                   const std::filesystem::path& path);

}  // namespace qwb
