#include "qwb/consensus.hpp"

#include <cmath>
#include <string>

#include "qwb/rng.hpp"

namespace qwb {

void QuantizerConfig::validate() const {
  if (!std::isfinite(q_min) || !std::isfinite(q_max) || !(q_min < q_max)) {
    throw std::invalid_argument("quantizer range needs finite q_min < q_max, got [" +
                                std::to_string(q_min) + ", " + std::to_string(q_max) + "]");
  }
}

ConsensusState init_consensus(std::shared_ptr<const Digraph> g, std::vector<double> y0,
                              QuantizerConfig quant, AlphaSchedule alpha,
                              std::uint64_t dither_key) {
  quant.validate();
  if (!g || y0.size() != g->node_count()) {
    throw std::invalid_argument("need one initial value per node");
  }
  double sum = 0.0;
  for (double v : y0) {
    if (!std::isfinite(v)) throw std::invalid_argument("initial values must be finite");
    sum += v;
  }
  const double y_bar0 = sum / static_cast<double>(y0.size());
  if (y_bar0 < quant.q_min || y_bar0 > quant.q_max) {
    throw NonInformativeAverage("initial average " + std::to_string(y_bar0) +
                                " lies outside the quantization range [" +
                                std::to_string(quant.q_min) + ", " + std::to_string(quant.q_max) +
                                "]");
  }
  return ConsensusState(init_balancer(std::move(g)), std::move(y0), quant, alpha, dither_key,
                        y_bar0);
}

double clip_estimate(double y, const QuantizerConfig& quant) {
  return std::min(std::max(y, quant.q_min), quant.q_max);
}

double dither_probability(double y_tilde, const QuantizerConfig& quant) {
  return (y_tilde - quant.q_min) / (quant.q_max - quant.q_min);
}

double dithered_quantize(double y_tilde, const QuantizerConfig& quant, double uniform_draw) {
  return uniform_draw < dither_probability(y_tilde, quant) ? quant.q_max : quant.q_min;
}

std::vector<TwoBitMessage> draw_messages(const ConsensusState& s) {
  const SignalVector signals = compute_signals(s.balancer());
  const auto y = s.y();
  std::vector<TwoBitMessage> out(y.size());
  for (NodeId i = 0; i < y.size(); ++i) {
    const double u = counter_uniform(s.dither_key(), i, s.round());
    out[i].n = signals.fired(i);
    out[i].x = dithered_quantize(clip_estimate(y[i], s.quantizer()), s.quantizer(), u);
  }
  return out;
}

void advance_consensus(ConsensusState& s, std::span<const TwoBitMessage> messages) {
  const DyadicWeightState& bal = s.balancer_;
  const Digraph& g = bal.graph();
  const std::size_t n = g.node_count();
  if (messages.size() != n) throw std::invalid_argument("message vector size mismatch");

  const double step = s.alpha_(bal.round());
  const int exp = -static_cast<int>(bal.scale_exponent());
  std::vector<double> next(s.y_);
  for (NodeId i = 0; i < n; ++i) {
    const auto in = g.in_neighbors(i);
    const auto w = bal.in_weights(i);
    const double xi = messages[i].x;
    double drive = 0.0;
    for (std::size_t slot = 0; slot < in.size(); ++slot) {
      drive += std::ldexp(static_cast<double>(w[slot]), exp) * (messages[in[slot]].x - xi);
    }
    drive += std::ldexp(static_cast<double>(bal.balance_numerators()[i]), exp) * xi;
    next[i] += step * drive;
  }
  s.y_ = std::move(next);

  SignalVector signals(n);
  for (NodeId i = 0; i < n; ++i) signals.set(i, messages[i].n);
  advance_balancer(s.balancer_, signals);
}

ConsensusState step_consensus(const ConsensusState& s) {
  ConsensusState next = s;
  const auto messages = draw_messages(s);
  advance_consensus(next, messages);
  return next;
}

std::vector<double> vector_form_update(const ConsensusState& s, std::span<const double> x) {
  const DenseMatrix l = out_laplacian(s.balancer());
  const double step = s.alpha_schedule()(s.round());
  std::vector<double> out(s.y().begin(), s.y().end());
  for (std::size_t i = 0; i < l.n; ++i) {
    double lx = 0.0;
    for (std::size_t j = 0; j < l.n; ++j) lx += l(i, j) * x[j];
    out[i] -= step * lx;
  }
  return out;
}

ConsensusRunResult run_consensus(ConsensusState s, const ConsensusRunOptions& options,
                                 const ConsensusObserver& observer) {
  RoundAnalyzer analyzer(s.graph(), options.check_invariants);
  const std::size_t n = s.graph().node_count();
  std::vector<double> x(n);
  for (;;) {
    const auto messages = draw_messages(s);
    SignalVector signals(n);
    for (NodeId i = 0; i < n; ++i) {
      signals.set(i, messages[i].n);
      x[i] = messages[i].x;
    }
    RoundRecord rec = analyzer.analyze(s.balancer(), signals);
    rec.v_y = squared_deviation(s.y(), s.y_bar0());
    rec.mse = *rec.v_y / static_cast<double>(n);
    if (observer) observer(ConsensusRound{rec, s.y(), x});

    const bool converged = options.mse_tol && *rec.mse <= *options.mse_tol;
    if (converged || s.round() >= options.max_iters) break;

    double before = 0.0;
    for (double v : s.y()) before += v;
    advance_consensus(s, messages);
    if (options.check_invariants) {
      double after = 0.0;
      for (double v : s.y()) {
        if (!std::isfinite(v)) throw InvariantViolation(s.round(), "estimate diverged");
        after += v;
      }
      if (std::abs(after - before) > 1e-10 * (1.0 + std::abs(before))) {
        throw InvariantViolation(s.round(), "consensus update changed the sum of estimates");
      }
    }
  }
  const Round stopped = s.round();
  return ConsensusRunResult{std::move(s), stopped, analyzer.diagnostics()};
}

}  // namespace qwb
