#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "qwb/analysis.hpp"
#include "qwb/schedule.hpp"
#include "qwb/weight_state.hpp"

namespace qwb {

/// Quantization range [q_min, q_max].
struct QuantizerConfig {
  double q_min = 0.0;
  double q_max = 1.0;

  /// Throws std::invalid_argument unless q_min < q_max (both finite).
  void validate() const;
};

/// The initial average lies outside the quantization range.
class NonInformativeAverage : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// What node i broadcasts in one round: the balancing bit and the dithered
/// estimate, one bit each on the wire.
struct TwoBitMessage {
  bool n = false;
  double x = 0.0;
};

/// Weight-balancing layer plus the local estimates y_i(k).
class ConsensusState {
 public:
  ConsensusState(DyadicWeightState balancer, std::vector<double> y, QuantizerConfig quant,
                 AlphaSchedule alpha, std::uint64_t dither_key, double y_bar0)
      : balancer_(std::move(balancer)),
        y_(std::move(y)),
        quant_(quant),
        alpha_(alpha),
        dither_key_(dither_key),
        y_bar0_(y_bar0) {}

  const DyadicWeightState& balancer() const { return balancer_; }
  const Digraph& graph() const { return balancer_.graph(); }
  Round round() const { return balancer_.round(); }
  std::span<const double> y() const { return y_; }
  const QuantizerConfig& quantizer() const { return quant_; }
  const AlphaSchedule& alpha_schedule() const { return alpha_; }
  std::uint64_t dither_key() const { return dither_key_; }
  /// True initial average; metrics only, never read by the protocol.
  double y_bar0() const { return y_bar0_; }

 private:
  friend void advance_consensus(ConsensusState& s, std::span<const TwoBitMessage> messages);

  DyadicWeightState balancer_;
  std::vector<double> y_;
  QuantizerConfig quant_;
  AlphaSchedule alpha_;
  std::uint64_t dither_key_;
  double y_bar0_;
};

/// Validates the quantizer and the informative-average condition
/// (throws NonInformativeAverage), then starts the balancer at A(0).
ConsensusState init_consensus(std::shared_ptr<const Digraph> g, std::vector<double> y0,
                              QuantizerConfig quant, AlphaSchedule alpha,
                              std::uint64_t dither_key);

/// min(max(y, q_min), q_max).
double clip_estimate(double y, const QuantizerConfig& quant);

/// Probability p = (y_tilde - q_min) / (q_max - q_min) of emitting q_max.
double dither_probability(double y_tilde, const QuantizerConfig& quant);

/// q_max if uniform_draw < p, else q_min; uniform_draw must lie in [0, 1).
double dithered_quantize(double y_tilde, const QuantizerConfig& quant, double uniform_draw);

/// Round-k messages of every node, with the dither drawn from the
/// (dither_key, node, round) counter stream.
std::vector<TwoBitMessage> draw_messages(const ConsensusState& s);

/// Applies one round given its messages:
///   y_i += alpha(k) [sum_{j in N_i^-} a_ij (x_j - x_i) + b_i x_i]
/// using the exact round-k weights, then advances the balancer.
void advance_consensus(ConsensusState& s, std::span<const TwoBitMessage> messages);

/// Pure form of one round (messages drawn from the state's own stream).
ConsensusState step_consensus(const ConsensusState& s);

/// y(k) - alpha(k) L+(k) x, the vector form of the update.
std::vector<double> vector_form_update(const ConsensusState& s, std::span<const double> x);

/// Per-round payload: the balancing record plus the estimates and the
/// quantized values broadcast at that round.
struct ConsensusRound {
  const RoundRecord& record;
  std::span<const double> y;
  std::span<const double> x;
};

using ConsensusObserver = std::function<void(const ConsensusRound&)>;

struct ConsensusRunOptions {
  Round max_iters = 100000;
  /// Stop once MSE <= mse_tol; empty runs all rounds.
  std::optional<double> mse_tol;
  bool check_invariants = true;
};

struct ConsensusRunResult {
  ConsensusState state;
  Round rounds = 0;
  ProofDiagnostics diagnostics;
};

/// Iterates the two-layer protocol. With checking on, each round also asserts
/// average preservation (|sum y(k+1) - sum y(k)| <= 1e-10 (1 + |sum y(k)|))
/// and finiteness of y, throwing InvariantViolation.
ConsensusRunResult run_consensus(ConsensusState s, const ConsensusRunOptions& options,
                                 const ConsensusObserver& observer = {});

}  // namespace qwb
