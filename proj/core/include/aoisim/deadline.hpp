#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "aoisim/metrics.hpp"
#include "aoisim/types.hpp"

namespace aoisim {

/// Reliable-deadline requirement of one terminal: Bernoulli rate lambda,
/// AoI deadline H (slots), violation-probability budget epsilon.
struct DeadlineSpec {
  double lambda = 1.0;
  int deadline = 1;
  double epsilon = 1e-3;

  void validate() const;
};

/// Stationary AoI CDF F(x) = Pr{h <= x} of a terminal with Bernoulli(lambda)
/// arrivals served at a constant interval of gamma slots. Two branches with
/// the seam at x = gamma; the lambda = 1 limits (x / gamma and 1) fall out
/// of the formulas exactly. Throws std::invalid_argument for x < 1.
double stationary_cdf(double lambda, int gamma, std::int64_t x);

/// Exact violation tail Pr{h > H} = 1 - F(H) for service interval gamma
/// (gamma <= H), in the closed form used for admission.
double deadline_tail(double lambda, int deadline, int gamma);

/// Negative branch of the Lambert W function on [-1/e, 0): the w <= -1 with
/// w * e^w = x, to absolute residual |w e^w - x| <= 1e-12. Halley iteration
/// seeded by the asymptotic ln(-x) - ln(-ln(-x)), with a branch-point
/// series near x = -1/e and a bisection safeguard.
double lambert_w_neg1(double x);

/// Largest integer service interval gamma <= H whose exact tail stays
/// within epsilon, by monotone bisection on deadline_tail. nullopt when the
/// spec is infeasible even at gamma = 1.
std::optional<int> max_interval(const DeadlineSpec& spec);

/// Closed-form interval bound floor(W_{-1}(ln(1-lambda) / (eps*c)) /
/// ln(1-lambda)) with c = lambda / (1-lambda)^(H+1). Carries the
/// high-reliability approximation; reported alongside the exact interval
/// for cross-validation. nullopt when lambda = 1 or the W argument leaves
/// the branch domain.
std::optional<int> lambert_interval(const DeadlineSpec& spec);

struct AdmissionReport {
  bool feasible = false;
  std::vector<std::optional<int>> intervals;          // exact gamma_max per spec
  std::vector<std::optional<int>> lambert_intervals;  // closed-form comparison
  double utilization = 0.0;                           // sum 1/gamma
  /// Closed-form symmetric-capacity estimates, present when all specs are
  /// identical: N_mean = 2H and N_deadline = H - ln(eps)/ln(1-lambda) +
  /// c0(lambda).
  std::optional<double> n_mean_bound;
  std::optional<double> n_deadline_bound;
};

/// Admission over a terminal set: gamma_n = max_interval(spec_n); feasible
/// iff every spec is individually feasible and sum 1/gamma_n <= 1.
/// Infeasibility is a result, not an error.
AdmissionReport admit(const std::vector<DeadlineSpec>& specs);

/// Collision-resolved periodic schedule over a hyperperiod.
struct PeriodicSchedule {
  std::uint64_t hyperperiod = 0;
  std::vector<int> intervals;      // gamma_n
  std::vector<int> assignment;     // slot -> terminal id, -1 = idle
  std::vector<std::int64_t> max_gap;  // realized service gap incl. wrap-around
};

/// Greedy earliest-due-slot construction: terminals sorted by interval
/// ascending, each occurrence placed at the first free slot at or after its
/// nominal time (services shift later, never earlier). Throws
/// std::runtime_error if an occurrence cannot be placed inside the
/// hyperperiod. Requires sum 1/gamma <= 1.
PeriodicSchedule build_schedule(const std::vector<int>& intervals,
                                std::uint64_t hyperperiod);

/// Simulates the schedule cyclically with Bernoulli arrivals and reports
/// per-terminal violation frequencies against the specs' deadlines.
RunMetrics simulate_schedule(const std::vector<TerminalSpec>& specs,
                             const PeriodicSchedule& schedule,
                             std::uint64_t horizon, std::uint64_t seed);

}  // namespace aoisim
