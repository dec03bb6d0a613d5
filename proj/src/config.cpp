#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "qwb/harness.hpp"

namespace qwb {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
  T value{};
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (text.empty() || ec != std::errc{} || ptr != end) {
    throw ConfigError(std::string(key), "cannot parse '" + std::string(text) + "'");
  }
  return value;
}

double parse_real(std::string_view key, std::string_view text) {
  const double v = parse_number<double>(key, text);
  if (!std::isfinite(v)) throw ConfigError(std::string(key), "must be finite");
  return v;
}

template <typename T>
T parse_positive(std::string_view key, std::string_view text) {
  if (!text.empty() && text.front() == '-') {
    throw ConfigError(std::string(key), "must be positive, got " + std::string(text));
  }
  const T v = parse_number<T>(key, text);
  if (v == 0) throw ConfigError(std::string(key), "must be positive");
  return v;
}

std::string format_real(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace

std::string_view to_string(Mode m) { return m == Mode::balance ? "balance" : "consensus"; }
std::string_view to_string(Emit e) { return e == Emit::csv ? "csv" : "json"; }

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "mode",      "N",         "p",           "trials",     "graph_realizations",
      "max_iters", "tol",       "q_min",       "q_max",      "alpha_a0",
      "alpha_tau", "master_seed", "record_every", "emit",     "graph_file",
      "threads"};
  return keys;
}

void apply_setting(ExperimentConfig& cfg, std::string_view key, std::string_view raw) {
  const std::string_view value = trim(raw);
  if (key == "mode") {
    if (value == "balance") cfg.mode = Mode::balance;
    else if (value == "consensus") cfg.mode = Mode::consensus;
    else throw ConfigError("mode", "expected balance or consensus, got '" + std::string(value) + "'");
  } else if (key == "N" || key == "n") {
    cfg.n = parse_positive<std::size_t>("N", value);
  } else if (key == "p") {
    cfg.p = parse_real(key, value);
  } else if (key == "trials") {
    cfg.trials = parse_positive<std::size_t>(key, value);
  } else if (key == "graph_realizations") {
    cfg.graph_realizations = parse_positive<std::size_t>(key, value);
  } else if (key == "max_iters") {
    cfg.max_iters = parse_positive<Round>(key, value);
  } else if (key == "tol") {
    cfg.tol = parse_real(key, value);
  } else if (key == "q_min") {
    cfg.q_min = parse_real(key, value);
  } else if (key == "q_max") {
    cfg.q_max = parse_real(key, value);
  } else if (key == "alpha_a0") {
    cfg.alpha_a0 = parse_real(key, value);
  } else if (key == "alpha_tau") {
    cfg.alpha_tau = parse_real(key, value);
  } else if (key == "master_seed") {
    cfg.master_seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "record_every") {
    cfg.record_every = parse_positive<Round>(key, value);
  } else if (key == "emit") {
    if (value == "csv") cfg.emit = Emit::csv;
    else if (value == "json") cfg.emit = Emit::json;
    else throw ConfigError("emit", "expected csv or json, got '" + std::string(value) + "'");
  } else if (key == "graph_file") {
    cfg.graph_file = std::string(value);
  } else if (key == "threads") {
    cfg.threads = parse_number<std::size_t>(key, value);
  } else {
    throw ConfigError(std::string(key), "unknown configuration key");
  }
}

void ExperimentConfig::validate() const {
  if (graph_file.empty() && n < 2) throw ConfigError("N", "must be at least 2");
  if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("p", "probability must lie in [0, 1]");
  if (!(tol >= 0.0)) throw ConfigError("tol", "must be non-negative");
  if (max_iters > kMaxRound) {
    throw ConfigError("max_iters", "exceeds the largest round with an in-range gamma exponent");
  }
  if (!(alpha_a0 > 0.0)) throw ConfigError("alpha_a0", "must be positive");
  if (!(alpha_tau > 0.5 && alpha_tau <= 1.0)) throw ConfigError("alpha_tau", "must lie in (1/2, 1]");
  if (mode == Mode::consensus && !(q_min < q_max)) {
    throw ConfigError("q_min", "must be strictly below q_max");
  }
}

ExperimentConfig parse_config(std::istream& in, ExperimentConfig base) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view(line);
    if (auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no), "expected key=value");
    }
    apply_setting(base, trim(view.substr(0, eq)), view.substr(eq + 1));
  }
  base.validate();
  return base;
}

ExperimentConfig parse_config_file(const std::filesystem::path& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open " + path.string());
  return parse_config(in, std::move(base));
}

std::string format_config(const ExperimentConfig& cfg) {
  std::ostringstream out;
  out << "mode=" << to_string(cfg.mode) << '\n'
      << "N=" << cfg.n << '\n'
      << "p=" << format_real(cfg.p) << '\n'
      << "trials=" << cfg.trials << '\n'
      << "graph_realizations=" << cfg.graph_realizations << '\n'
      << "max_iters=" << cfg.max_iters << '\n'
      << "tol=" << format_real(cfg.tol) << '\n'
      << "q_min=" << format_real(cfg.q_min) << '\n'
      << "q_max=" << format_real(cfg.q_max) << '\n'
      << "alpha_a0=" << format_real(cfg.alpha_a0) << '\n'
      << "alpha_tau=" << format_real(cfg.alpha_tau) << '\n'
      << "master_seed=" << cfg.master_seed << '\n'
      << "record_every=" << cfg.record_every << '\n'
      << "emit=" << to_string(cfg.emit) << '\n'
      << "graph_file=" << cfg.graph_file << '\n'
      << "threads=" << cfg.threads << '\n';
  return out.str();
}

}  // namespace qwb
