#include "qwb/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <exception>
#include <fstream>
#include <iostream>
#include <memory>
#include <thread>

#include <json.hpp>

#include "qwb/balancing.hpp"
#include "qwb/consensus.hpp"
#include "qwb/rng.hpp"

namespace qwb {
namespace {

constexpr std::uint64_t kGraphStream = 0;
constexpr std::uint64_t kInitStream = 1;
constexpr std::uint64_t kDitherStream = 2;

struct TrialOutput {
  TrialSummary summary;
  std::vector<double> metric;  // one value per grid point
};

struct TrialError {
  bool invariant = false;
  std::string message;
};

/// Samples the metric onto the grid as rounds stream past, then pads with the
/// final value once the run stops.
class GridSampler {
 public:
  explicit GridSampler(const std::vector<Round>& grid) : grid_(&grid) { values_.reserve(grid.size()); }

  void offer(Round k, double value) {
    last_ = value;
    if (values_.size() < grid_->size() && (*grid_)[values_.size()] == k) values_.push_back(value);
  }

  std::vector<double> finish() {
    values_.resize(grid_->size(), last_);
    return std::move(values_);
  }

 private:
  const std::vector<Round>* grid_;
  std::vector<double> values_;
  double last_ = 0.0;
};

std::vector<double> initial_values(const ExperimentConfig& cfg, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<double> y(n);
  for (double& v : y) {
    double u = 0.0;
    do {
      u = unit_uniform(rng);
    } while (u == 0.0);
    v = cfg.q_min + (cfg.q_max - cfg.q_min) * u;
  }
  return y;
}

TrialOutput run_trial(const ExperimentConfig& cfg, const std::shared_ptr<const Digraph>& g,
                      std::size_t graph_index, std::size_t trial_index,
                      const std::vector<Round>& grid) {
  TrialOutput out;
  GridSampler sampler(grid);
  ProofDiagnostics diag;
  Round stop = 0;
  double final_metric = 0.0;

  if (cfg.mode == Mode::balance) {
    BalanceRunOptions opts{cfg.tol, cfg.max_iters, true};
    auto result = run_balancer(init_balancer(g), opts, [&](const RoundRecord& r) {
      final_metric = r.eps_l1.to_double();
      sampler.offer(r.k, final_metric);
    });
    stop = result.rounds;
    diag = result.diagnostics;
  } else {
    const auto y0 =
        initial_values(cfg, g->node_count(),
                       derive_seed(cfg.master_seed, {kInitStream, graph_index, trial_index}));
    auto state = init_consensus(g, y0, QuantizerConfig{cfg.q_min, cfg.q_max},
                                AlphaSchedule(cfg.alpha_a0, cfg.alpha_tau),
                                derive_seed(cfg.master_seed, {kDitherStream, graph_index, trial_index}));
    ConsensusRunOptions opts{cfg.max_iters, cfg.tol > 0.0 ? std::optional<double>(cfg.tol) : std::nullopt,
                             true};
    auto result = run_consensus(std::move(state), opts, [&](const ConsensusRound& r) {
      final_metric = *r.record.mse;
      sampler.offer(r.record.k, final_metric);
    });
    stop = result.rounds;
    diag = result.diagnostics;
  }

  out.metric = sampler.finish();
  out.summary.graph_index = graph_index;
  out.summary.trial_index = trial_index;
  out.summary.edge_count = g->edge_count();
  out.summary.stop_round = stop;
  out.summary.final_metric = final_metric;
  out.summary.decreasing_events = diag.decreasing_events;
  out.summary.worst_event_gap = diag.worst_event_gap;
  out.summary.max_potential = diag.max_potential.str();
  return out;
}

std::shared_ptr<const Digraph> load_fixture(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("graph_file", "cannot open " + path);
  try {
    return std::make_shared<const Digraph>(read_edge_list(in));
  } catch (const std::invalid_argument& e) {
    throw ConfigError("graph_file", path + ": " + e.what());
  }
}

double median_of(std::vector<double>& v) {
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + mid);
  return 0.5 * (lower + upper);
}

std::string format_real(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace

std::vector<Round> recording_grid(Round max_iters, Round record_every) {
  std::vector<Round> grid;
  if (record_every == 0) record_every = 1;
  for (Round k = 0; k <= max_iters; k += record_every) {
    grid.push_back(k);
    if (max_iters - k < record_every) break;
  }
  if (grid.back() != max_iters) grid.push_back(max_iters);
  return grid;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();

  std::shared_ptr<const Digraph> fixture;
  if (!cfg.graph_file.empty()) {
    fixture = load_fixture(cfg.graph_file);
    if (!is_strongly_connected(*fixture)) {
      throw ConfigError("graph_file", cfg.graph_file + " is not strongly connected");
    }
  }

  std::vector<std::shared_ptr<const Digraph>> graphs(cfg.graph_realizations);
  for (std::size_t gi = 0; gi < graphs.size(); ++gi) {
    if (fixture) {
      graphs[gi] = fixture;
    } else {
      std::mt19937_64 rng(derive_seed(cfg.master_seed, {kGraphStream, gi}));
      graphs[gi] = std::make_shared<const Digraph>(generate_ring_plus_random(cfg.n, cfg.p, rng));
    }
  }

  const std::vector<Round> grid = recording_grid(cfg.max_iters, cfg.record_every);
  const std::size_t units = cfg.graph_realizations * cfg.trials;
  std::vector<TrialOutput> outputs(units);
  std::vector<std::optional<TrialError>> errors(units);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t u = next++; u < units; u = next++) {
      const std::size_t gi = u / cfg.trials;
      const std::size_t ti = u % cfg.trials;
      try {
        outputs[u] = run_trial(cfg, graphs[gi], gi, ti, grid);
      } catch (const InvariantViolation& e) {
        errors[u] = TrialError{true, e.what()};
      } catch (const std::exception& e) {
        errors[u] = TrialError{false, e.what()};
      }
    }
  };
  std::size_t threads = cfg.threads == 0 ? std::thread::hardware_concurrency() : cfg.threads;
  threads = std::clamp<std::size_t>(threads, 1, units);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  for (std::size_t u = 0; u < units; ++u) {
    if (errors[u]) {
      throw TrialFailure(u / cfg.trials, u % cfg.trials, errors[u]->invariant, errors[u]->message);
    }
  }

  ExperimentResult result;
  AggregateSeries& s = result.series;
  s.mode = cfg.mode;
  s.k = grid;
  s.mean.resize(grid.size());
  s.median.resize(grid.size());
  s.min.resize(grid.size());
  s.max.resize(grid.size());
  std::vector<double> column(units);
  for (std::size_t row = 0; row < grid.size(); ++row) {
    double sum = 0.0;
    for (std::size_t u = 0; u < units; ++u) {
      column[u] = outputs[u].metric[row];
      sum += column[u];
    }
    s.mean[row] = sum / static_cast<double>(units);
    s.min[row] = *std::min_element(column.begin(), column.end());
    s.max[row] = *std::max_element(column.begin(), column.end());
    s.median[row] = median_of(column);
  }
  result.trials.reserve(units);
  for (auto& o : outputs) result.trials.push_back(std::move(o.summary));
  return result;
}

void write_csv(std::ostream& out, const AggregateSeries& series, const ExperimentConfig& cfg) {
  const AlphaSchedule alpha_sched(cfg.alpha_a0, cfg.alpha_tau);
  out << "k,metric_mean,metric_median,metric_min,metric_max,gamma,alpha\n";
  for (std::size_t row = 0; row < series.size(); ++row) {
    const Round k = series.k[row];
    out << k << ',' << format_real(series.mean[row]) << ',' << format_real(series.median[row])
        << ',' << format_real(series.min[row]) << ',' << format_real(series.max[row]) << ','
        << format_real(gamma(k).value()) << ',';
    if (series.mode == Mode::consensus) out << format_real(alpha_sched(k));
    out << '\n';
  }
}

void write_json(std::ostream& out, const ExperimentResult& result, const ExperimentConfig& cfg) {
  using nlohmann::json;
  const AlphaSchedule alpha_sched(cfg.alpha_a0, cfg.alpha_tau);
  json config = {{"mode", to_string(cfg.mode)},
                 {"N", cfg.n},
                 {"p", cfg.p},
                 {"trials", cfg.trials},
                 {"graph_realizations", cfg.graph_realizations},
                 {"max_iters", cfg.max_iters},
                 {"tol", cfg.tol},
                 {"q_min", cfg.q_min},
                 {"q_max", cfg.q_max},
                 {"alpha_a0", cfg.alpha_a0},
                 {"alpha_tau", cfg.alpha_tau},
                 {"master_seed", cfg.master_seed},
                 {"record_every", cfg.record_every},
                 {"emit", to_string(cfg.emit)},
                 {"graph_file", cfg.graph_file}};
  json rows = json::array();
  const AggregateSeries& s = result.series;
  for (std::size_t row = 0; row < s.size(); ++row) {
    const Round k = s.k[row];
    rows.push_back({{"k", k},
                    {"metric_mean", s.mean[row]},
                    {"metric_median", s.median[row]},
                    {"metric_min", s.min[row]},
                    {"metric_max", s.max[row]},
                    {"gamma", gamma(k).value()},
                    {"alpha", s.mode == Mode::consensus ? json(alpha_sched(k)) : json(nullptr)}});
  }
  json trials = json::array();
  for (const TrialSummary& t : result.trials) {
    trials.push_back({{"graph_index", t.graph_index},
                      {"trial_index", t.trial_index},
                      {"edge_count", t.edge_count},
                      {"stop_round", t.stop_round},
                      {"final_metric", t.final_metric},
                      {"decreasing_events", t.decreasing_events},
                      {"worst_event_gap", t.worst_event_gap},
                      {"max_potential", t.max_potential}});
  }
  json doc = {{"config", config},
              {"seed", cfg.master_seed},
              {"metric", cfg.mode == Mode::balance ? "eps_l1" : "mse"},
              {"series", rows},
              {"trials", trials}};
  out << doc.dump(2) << '\n';
}

void export_series(const ExperimentResult& result, const ExperimentConfig& cfg,
                   const std::filesystem::path& path) {
  auto emit = [&](std::ostream& out) {
    if (cfg.emit == Emit::csv) write_csv(out, result.series, cfg);
    else write_json(out, result, cfg);
  };
  if (path == "-") {
    emit(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  emit(out);
  out.flush();
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace qwb
