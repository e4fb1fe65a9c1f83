#pragma once

#include <cstdint>
#include <vector>

#include "aoisim/types.hpp"

namespace aoisim {

/// Closed-form Whittle index for Bernoulli arrivals on a reliable channel,
/// state (a, d), arrival rate lambda in (0, 1], weight omega > 0.
/// Returns 0 iff d == 0. Throws std::invalid_argument outside the domain.
double index_bernoulli(std::int64_t a, std::int64_t d, double lambda,
                       double omega = 1.0);

/// Closed-form Whittle index for periodic arrivals with interval period,
/// packet age a in [1, period], and n_p whole periods since the last
/// delivered update. Weight applied multiplicatively as for the Bernoulli
/// index.
double index_periodic(std::int64_t a, std::int64_t n_p, int period,
                      double omega = 1.0);

/// Unreliable-channel index: the reliable index scaled by the per-attempt
/// success probability 1 - p_e. Exact only as p_e -> 0 but used as the
/// operational index at all p_e; noticeable policy degradation appears only
/// for p_e beyond roughly 0.7.
double index_unreliable(double reliable_index, double p_e);

/// Per-terminal index of a live state: dispatches on the arrival pattern
/// and applies the unreliable-channel scaling. Zero when there is nothing
/// undelivered (d == 0 or empty buffer).
double marginal_index(const TerminalState& state, const TerminalSpec& spec);

enum class ThresholdAction { idle, schedule };

/// Solution of the single-terminal average-cost model with service charge m:
/// optimal average cost j_star, first threshold d1, and the full
/// schedule-when-d-reaches-threshold map (constant for a >= d1).
class DecoupledSolution {
 public:
  DecoupledSolution(double lambda, double m, double j_star, int d1,
                    std::vector<std::int64_t> raw_thresholds,
                    std::int64_t raw_tail);

  double lambda_rate() const { return lambda_; }
  double charge() const { return m_; }
  double j_star() const { return j_star_; }
  int d1() const { return d1_; }
  /// Smallest a beyond which the threshold map is constant.
  int a_max_distinct() const { return d1_; }

  /// Operational threshold D_a, clamped to >= 1 (scheduling at d = 0 is
  /// pointless). Schedule iff d >= threshold(a).
  std::int64_t threshold(std::int64_t a) const;

  /// Unclamped threshold; can be <= 0 for small charges. This is the object
  /// whose monotone growth in m constitutes indexability, with an empty
  /// idle region at m = 0.
  std::int64_t raw_threshold(std::int64_t a) const;

 private:
  double lambda_;
  double m_;
  double j_star_;
  int d1_;
  std::vector<std::int64_t> raw_;  // raw_[a-1] for a in [1, d1)
  std::int64_t raw_tail_;          // for a >= d1
};

/// Solves the charge equation of the decoupled model for given lambda and
/// m >= 0: enumerates the integer first-threshold candidate upward and
/// accepts the first self-consistent (d1, j_star) pair, which resolves the
/// ceiling without numeric root-finding. Throws std::runtime_error if no
/// consistent pair exists in the search range (indicates a numeric bug).
DecoupledSolution solve_decoupled(double lambda, double m);

/// Threshold policy of the decoupled model: schedule iff d >= D_a.
ThresholdAction whittle_threshold_policy(const DecoupledSolution& sol,
                                         const TerminalState& state);

}  // namespace aoisim
