#include "aoisim/deadline.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "aoisim/engine.hpp"
#include "aoisim/policies.hpp"

namespace aoisim {

namespace {

constexpr double kInvE = 0.36787944117144233;

// Deterministic integer power by squaring; keeps tail probabilities exact
// where the base is a dyadic rational.
double ipow(double base, std::int64_t exp) {
  double r = 1.0;
  double b = base;
  while (exp > 0) {
    if (exp & 1) r *= b;
    b *= b;
    exp >>= 1;
  }
  return r;
}

void check_rate(double lambda) {
  if (!(lambda > 0 && lambda <= 1))
    throw std::invalid_argument("lambda must be in (0, 1]");
}

}  // namespace

void DeadlineSpec::validate() const {
  check_rate(lambda);
  if (deadline < 1) throw std::invalid_argument("DeadlineSpec: deadline must be >= 1");
  if (!(epsilon > 0 && epsilon < 1))
    throw std::invalid_argument("DeadlineSpec: epsilon must be in (0, 1)");
}

double stationary_cdf(double lambda, int gamma, std::int64_t x) {
  check_rate(lambda);
  if (gamma < 1) throw std::invalid_argument("stationary_cdf: gamma must be >= 1");
  if (x < 1) throw std::invalid_argument("stationary_cdf: x must be >= 1");
  const double q = 1.0 - lambda;
  if (x <= gamma) {
    // At lambda = 1 the (1-lambda)/lambda factor vanishes, leaving x/gamma.
    return (static_cast<double>(x) - q / lambda * (1.0 - ipow(q, x))) / gamma;
  }
  return 1.0 - ipow(q, x - gamma + 1) * (1.0 - ipow(q, gamma)) / (lambda * gamma);
}

double deadline_tail(double lambda, int deadline, int gamma) {
  check_rate(lambda);
  if (gamma < 1 || deadline < gamma)
    throw std::invalid_argument("deadline_tail: need 1 <= gamma <= deadline");
  const double q = 1.0 - lambda;
  return ipow(q, deadline - gamma + 1) * (1.0 - ipow(q, gamma)) /
         (lambda * gamma);
}

double lambert_w_neg1(double x) {
  if (!(x < 0) || x < -kInvE - 1e-15)
    throw std::invalid_argument("lambert_w_neg1: x must be in [-1/e, 0)");
  if (x <= -kInvE) return -1.0;

  const double rho = 1.0 + x / kInvE;  // distance from the branch point
  const double p = std::sqrt(2.0 * rho);
  if (rho < 1e-9) {
    // Branch-point series; cubic term already below the residual target.
    return -1.0 - p - p * p / 3.0 - 11.0 / 72.0 * p * p * p;
  }

  double w;
  if (x <= -0.25) {
    w = -1.0 - p - p * p / 3.0 - 11.0 / 72.0 * p * p * p;
  } else {
    const double l1 = std::log(-x);
    w = l1 - std::log(-l1);
  }

  // Bisection bracket on the monotone decreasing w e^w over (-inf, -1].
  const double l1 = std::log(-x);
  double wl = l1 - std::log(-l1) - 5.0;
  double wh = -1.0;

  for (int i = 0; i < 100; ++i) {
    const double ew = std::exp(w);
    const double fw = w * ew - x;
    if (std::abs(fw) <= 1e-14) break;
    // w e^w is decreasing on (-inf, -1]: overshoot means w is below the root.
    if (fw > 0)
      wl = std::max(wl, w);
    else
      wh = std::min(wh, w);
    const double d1 = ew * (w + 1.0);
    const double d2 = ew * (w + 2.0);
    double step_denom = d1 - fw * d2 / (2.0 * d1);
    double w_next = (d1 != 0.0 && std::isfinite(step_denom) && step_denom != 0.0)
                        ? w - fw / step_denom
                        : 0.5 * (wl + wh);
    if (!(w_next > wl && w_next < wh)) w_next = 0.5 * (wl + wh);
    if (w_next == w) break;
    w = w_next;
  }
  return w;
}

std::optional<int> max_interval(const DeadlineSpec& spec) {
  spec.validate();
  const int H = spec.deadline;
  if (deadline_tail(spec.lambda, H, 1) > spec.epsilon) return std::nullopt;
  // deadline_tail is nondecreasing in gamma; find the last gamma within
  // budget on [1, H].
  int lo = 1, hi = H;
  while (lo < hi) {
    const int mid = lo + (hi - lo + 1) / 2;
    if (deadline_tail(spec.lambda, H, mid) <= spec.epsilon)
      lo = mid;
    else
      hi = mid - 1;
  }
  return lo;
}

std::optional<int> lambert_interval(const DeadlineSpec& spec) {
  spec.validate();
  if (spec.lambda >= 1.0) return std::nullopt;
  const double log_q = std::log(1.0 - spec.lambda);
  const double c = spec.lambda / ipow(1.0 - spec.lambda, spec.deadline + 1);
  const double arg = log_q / (spec.epsilon * c);
  if (!(arg >= -kInvE && arg < 0)) return std::nullopt;
  const double w = lambert_w_neg1(arg);
  return static_cast<int>(std::floor(w / log_q));
}

AdmissionReport admit(const std::vector<DeadlineSpec>& specs) {
  if (specs.empty()) throw std::invalid_argument("admit: no specs");
  AdmissionReport rep;
  rep.feasible = true;
  double util = 0.0;
  for (const auto& s : specs) {
    const auto g = max_interval(s);
    rep.intervals.push_back(g);
    rep.lambert_intervals.push_back(lambert_interval(s));
    if (!g) {
      rep.feasible = false;
    } else {
      util += 1.0 / static_cast<double>(*g);
    }
  }
  rep.utilization = util;
  if (rep.feasible && util > 1.0 + 1e-9) rep.feasible = false;

  const bool symmetric = std::all_of(specs.begin(), specs.end(), [&](const auto& s) {
    return s.lambda == specs[0].lambda && s.deadline == specs[0].deadline &&
           s.epsilon == specs[0].epsilon;
  });
  if (symmetric) {
    const auto& s = specs[0];
    rep.n_mean_bound = 2.0 * s.deadline;
    if (s.lambda < 1.0) {
      const double log_q = std::log(1.0 - s.lambda);
      const double c0 =
          1.0 + (std::log(-log_q) - std::log(s.lambda)) / log_q;
      rep.n_deadline_bound = s.deadline - std::log(s.epsilon) / log_q + c0;
    }
  }
  return rep;
}

PeriodicSchedule build_schedule(const std::vector<int>& intervals,
                                std::uint64_t hyperperiod) {
  if (intervals.empty()) throw std::invalid_argument("build_schedule: no intervals");
  if (hyperperiod == 0)
    throw std::invalid_argument("build_schedule: hyperperiod must be >= 1");
  double util = 0.0;
  for (int g : intervals) {
    if (g < 1) throw std::invalid_argument("build_schedule: intervals must be >= 1");
    util += 1.0 / g;
  }
  if (util > 1.0 + 1e-12)
    throw std::invalid_argument("build_schedule: utilization exceeds 1");

  PeriodicSchedule sched;
  sched.hyperperiod = hyperperiod;
  sched.intervals = intervals;
  sched.assignment.assign(hyperperiod, -1);
  sched.max_gap.assign(intervals.size(), 0);

  std::vector<int> order(intervals.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return intervals[static_cast<std::size_t>(a)] <
           intervals[static_cast<std::size_t>(b)];
  });

  for (int n : order) {
    const auto gamma = static_cast<std::uint64_t>(intervals[static_cast<std::size_t>(n)]);
    std::int64_t first = -1, prev = -1;
    for (std::uint64_t nominal = 0; nominal < hyperperiod; nominal += gamma) {
      std::uint64_t slot = nominal;
      while (slot < hyperperiod && sched.assignment[slot] != -1) ++slot;
      if (slot >= hyperperiod)
        throw std::runtime_error(
            "build_schedule: overflow placing terminal " + std::to_string(n));
      sched.assignment[slot] = n;
      if (prev >= 0)
        sched.max_gap[static_cast<std::size_t>(n)] =
            std::max<std::int64_t>(sched.max_gap[static_cast<std::size_t>(n)],
                                   static_cast<std::int64_t>(slot) - prev);
      else
        first = static_cast<std::int64_t>(slot);
      prev = static_cast<std::int64_t>(slot);
    }
    // Wrap-around gap: last occurrence to the first one of the next cycle.
    if (first >= 0)
      sched.max_gap[static_cast<std::size_t>(n)] = std::max<std::int64_t>(
          sched.max_gap[static_cast<std::size_t>(n)],
          static_cast<std::int64_t>(hyperperiod) + first - prev);
  }
  return sched;
}

RunMetrics simulate_schedule(const std::vector<TerminalSpec>& specs,
                             const PeriodicSchedule& schedule,
                             std::uint64_t horizon, std::uint64_t seed) {
  FixedSchedulePolicy policy(schedule.assignment);
  return run_slots(specs, policy, horizon, seed);
}

}  // namespace aoisim
