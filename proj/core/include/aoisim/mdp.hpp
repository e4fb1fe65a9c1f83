#pragma once

#include <cstdint>
#include <vector>

#include "aoisim/types.hpp"

namespace aoisim {

/// Relative value iteration controls for the truncated chains. Truncation
/// is absorbing: the a+1 branch self-loops at a_max and d saturates at
/// d_max, so the bias vanishes as the bounds grow (checked by doubling in
/// the tests). damping = 0 selects automatically: plain iteration for
/// lambda < 1 and a half-step aperiodicity transformation at lambda = 1,
/// where the optimal chain is periodic.
struct RviOptions {
  int a_max = 200;
  int d_max = 400;
  double tol = 1e-8;
  std::uint64_t max_iters = 1'000'000;
  double damping = 0.0;
};

/// Average-cost solution on a truncated chain: gain j, differential costs f
/// with f(reference) = 0, the greedy policy, and the final Bellman-residual
/// span.
struct RviResult {
  double j = 0.0;
  double residual = 0.0;
  std::uint64_t iterations = 0;
  bool converged = false;
  int a_max = 0;
  int d_max = 0;
  std::vector<double> f;              // (a-1)*(d_max+1)+d
  std::vector<std::uint8_t> policy;   // 1 = schedule

  std::size_t idx(int a, int d) const {
    return static_cast<std::size_t>(a - 1) * (d_max + 1) +
           static_cast<std::size_t>(d);
  }
  double f_at(int a, int d) const { return f[idx(a, d)]; }
  bool schedules(int a, int d) const { return policy[idx(a, d)] != 0; }

  /// Smallest d with a schedule action in row a, or -1 if the row never
  /// schedules.
  int threshold_of(int a) const;
  /// True if row a is idle below some d and schedule from there on.
  bool row_is_threshold(int a) const;
};

/// Decoupled single-terminal model with service charge m: cost per slot is
/// a + d(1-u) + m*u. Reference state (1,0). Non-convergence is reported via
/// converged/residual rather than thrown.
RviResult rvi_decoupled(double lambda, double m, const RviOptions& opts = {});

/// As rvi_decoupled but seeded with a previous differential-cost table of
/// matching dimensions (warm start); f_init is updated in place with the
/// final table. Used by the indifference-charge bisection where consecutive
/// charges differ slightly.
RviResult rvi_decoupled_warm(double lambda, double m, const RviOptions& opts,
                             std::vector<double>& f_init);

/// Bisection over the charge m of the decoupled model's optimal action at
/// (a, d): returns the flip charge, the numeric Whittle index. d = 0
/// returns 0. Throws std::runtime_error if the action does not flip in the
/// (widened) bracket.
double indifference_charge(double lambda, int a, int d, double tol_m = 1e-6,
                           const RviOptions& opts = {64, 192, 1e-9, 1'000'000,
                                                     0.0});

/// Truncation bounds for the joint two-terminal chain.
struct FullRviOptions {
  int a_max1 = 24;
  int d_max1 = 36;
  int a_max2 = 24;
  int d_max2 = 36;
  double tol = 1e-7;
  std::uint64_t max_iters = 200'000;
  double damping = 0.0;
};

/// Optimal average weighted AoI per terminal of the exact two-terminal
/// model (the N = 2 benchmark): cost (1/2) * sum_n omega_n (a_n + p_e,n
/// u_n d_n + (1 - u_n) d_n). Bernoulli arrivals only; unreliable channels
/// split the scheduled transition with probability p_e. Throws
/// std::invalid_argument unless given exactly two Bernoulli specs, or if
/// the state space exceeds the memory budget.
struct FullRviResult {
  double j = 0.0;
  double residual = 0.0;
  std::uint64_t iterations = 0;
  bool converged = false;
};

FullRviResult rvi_full(const std::vector<TerminalSpec>& specs,
                       const FullRviOptions& opts = {});

}  // namespace aoisim
