#include "aoisim/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "aoisim/indices.hpp"

namespace aoisim {

namespace {

double pick_damping(double requested, double lambda) {
  if (requested > 0) return requested;
  return lambda >= 0.999 ? 0.5 : 1.0;
}

}  // namespace

int RviResult::threshold_of(int a) const {
  for (int d = 0; d <= d_max; ++d)
    if (schedules(a, d)) return d;
  return -1;
}

bool RviResult::row_is_threshold(int a) const {
  const int th = threshold_of(a);
  if (th < 0) return true;  // never schedules: trivially monotone
  for (int d = th; d <= d_max; ++d)
    if (!schedules(a, d)) return false;
  return true;
}

RviResult rvi_decoupled_warm(double lambda, double m, const RviOptions& opts,
                             std::vector<double>& f_init) {
  if (!(lambda > 0 && lambda <= 1))
    throw std::invalid_argument("rvi_decoupled: lambda must be in (0, 1]");
  if (m < 0) throw std::invalid_argument("rvi_decoupled: m must be >= 0");
  const int A = opts.a_max;
  const int D = opts.d_max;
  if (A < 2 || D < 2) throw std::invalid_argument("rvi_decoupled: bounds too small");

  const std::size_t n_states =
      static_cast<std::size_t>(A) * static_cast<std::size_t>(D + 1);
  if (f_init.size() != n_states) {
    f_init.assign(n_states, 0.0);
  }
  std::vector<double>& f = f_init;
  std::vector<double> q(n_states, 0.0);

  const double tau = pick_damping(opts.damping, lambda);
  const double one_m_l = 1.0 - lambda;
  const auto idx = [D](int a, int d) {
    return static_cast<std::size_t>(a - 1) * (D + 1) + static_cast<std::size_t>(d);
  };

  RviResult res;
  res.a_max = A;
  res.d_max = D;

  double span = std::numeric_limits<double>::infinity();
  std::uint64_t it = 0;
  for (; it < opts.max_iters; ++it) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (int a = 1; a <= A; ++a) {
      const int a_up = std::min(a + 1, A);
      const double f_sched_tail =
          one_m_l * f[idx(a_up, 0)] + lambda * f[idx(1, std::min(a, D))];
      const double sched = a + m + f_sched_tail;
      const std::size_t row = idx(a, 0);
      const std::size_t row_up = idx(a_up, 0);
      for (int d = 0; d <= D; ++d) {
        const double idle = a + d + one_m_l * f[row_up + d] +
                            lambda * f[idx(1, std::min(d + a, D))];
        const double v = std::min(idle, sched);
        q[row + d] = v;
        const double delta = v - f[row + d];
        lo = std::min(lo, delta);
        hi = std::max(hi, delta);
      }
    }
    span = hi - lo;
    const double q_ref = q[idx(1, 0)];
    if (tau == 1.0) {
      for (std::size_t s = 0; s < n_states; ++s) f[s] = q[s] - q_ref;
    } else {
      for (std::size_t s = 0; s < n_states; ++s)
        f[s] = (1.0 - tau) * f[s] + tau * (q[s] - q_ref);
    }
    if (span <= opts.tol) {
      ++it;
      break;
    }
  }

  // Gain estimate and greedy policy from the converged table. At states
  // where both actions tie exactly (d = lambda*m on the constant-threshold
  // rows) the threshold solution takes schedule, so ties resolve toward
  // schedule for d >= 1; at d = 0 scheduling is vacuous and ties resolve
  // toward idle.
  res.j = 0.0;
  res.policy.assign(n_states, 0);
  {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (int a = 1; a <= A; ++a) {
      const int a_up = std::min(a + 1, A);
      const double sched = a + m + one_m_l * f[idx(a_up, 0)] +
                           lambda * f[idx(1, std::min(a, D))];
      const std::size_t row = idx(a, 0);
      const std::size_t row_up = idx(a_up, 0);
      for (int d = 0; d <= D; ++d) {
        const double idle = a + d + one_m_l * f[row_up + d] +
                            lambda * f[idx(1, std::min(d + a, D))];
        const double tie_eps = 1e-6 * (1.0 + std::abs(idle));
        if (d >= 1 && sched <= idle + tie_eps) res.policy[row + d] = 1;
        const double delta = std::min(idle, sched) - f[row + d];
        lo = std::min(lo, delta);
        hi = std::max(hi, delta);
        if (a == 1 && d == 0) res.j = std::min(idle, sched);
      }
    }
    res.residual = hi - lo;
  }
  res.iterations = it;
  res.converged = res.residual <= opts.tol * 4;
  res.f = f;  // copy out; f_init keeps the table for warm restarts
  return res;
}

RviResult rvi_decoupled(double lambda, double m, const RviOptions& opts) {
  std::vector<double> f;
  return rvi_decoupled_warm(lambda, m, opts, f);
}

double indifference_charge(double lambda, int a, int d, double tol_m,
                           const RviOptions& opts) {
  if (a < 1) throw std::invalid_argument("indifference_charge: a must be >= 1");
  if (d < 0) throw std::invalid_argument("indifference_charge: d must be >= 0");
  if (d == 0) return 0.0;  // idle is optimal at d = 0 for any m > 0
  if (a > opts.a_max || d > opts.d_max)
    throw std::invalid_argument("indifference_charge: state outside truncation");

  std::vector<double> f;
  const auto schedules_at = [&](double m) {
    RviResult r = rvi_decoupled_warm(lambda, m, opts, f);
    if (!r.converged)
      throw std::runtime_error("indifference_charge: oracle did not converge, residual=" +
                               std::to_string(r.residual));
    return r.schedules(a, d);
  };

  double lo = 0.0;
  double hi = 4.0 * index_bernoulli(a, d, lambda, 1.0) + 10.0;
  int widen = 0;
  while (schedules_at(hi)) {
    hi *= 2.0;
    if (++widen > 4)
      throw std::runtime_error("indifference_charge: action does not flip below m=" +
                               std::to_string(hi));
  }
  while (hi - lo > tol_m) {
    const double mid = 0.5 * (lo + hi);
    if (schedules_at(mid))
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

FullRviResult rvi_full(const std::vector<TerminalSpec>& specs,
                       const FullRviOptions& opts) {
  if (specs.size() != 2)
    throw std::invalid_argument("rvi_full: exactly 2 terminals required");
  for (const auto& s : specs) {
    s.validate();
    if (!s.is_bernoulli())
      throw std::invalid_argument("rvi_full: Bernoulli arrivals only");
  }

  const int A1 = opts.a_max1, D1 = opts.d_max1;
  const int A2 = opts.a_max2, D2 = opts.d_max2;
  const std::size_t S1 = static_cast<std::size_t>(A1) * (D1 + 1);
  const std::size_t S2 = static_cast<std::size_t>(A2) * (D2 + 1);
  const std::size_t n_states = S1 * S2;
  if (n_states > 80'000'000)
    throw std::invalid_argument("rvi_full: state space exceeds memory budget");

  // Per-terminal flattened successor tables for the idle and the
  // delivered transition, with and without an arrival.
  struct Marginal {
    std::vector<std::uint32_t> idle_noarr, idle_arr, deliv_noarr, deliv_arr;
    std::vector<double> h;   // a + d
    std::vector<double> a;   // queuing delay
    std::vector<double> d;
  };
  const auto build = [](int A, int D) {
    Marginal t;
    const std::size_t n = static_cast<std::size_t>(A) * (D + 1);
    t.idle_noarr.resize(n);
    t.idle_arr.resize(n);
    t.deliv_noarr.resize(n);
    t.deliv_arr.resize(n);
    t.h.resize(n);
    t.a.resize(n);
    t.d.resize(n);
    const auto id = [D](int a, int d) {
      return static_cast<std::uint32_t>((a - 1) * (D + 1) + d);
    };
    for (int a = 1; a <= A; ++a) {
      const int a_up = std::min(a + 1, A);
      for (int d = 0; d <= D; ++d) {
        const std::size_t u = id(a, d);
        t.idle_noarr[u] = id(a_up, d);
        t.idle_arr[u] = id(1, std::min(d + a, D));
        t.deliv_noarr[u] = id(a_up, 0);
        t.deliv_arr[u] = id(1, std::min(a, D));
        t.h[u] = a + d;
        t.a[u] = a;
        t.d[u] = d;
      }
    }
    return t;
  };
  const Marginal t1 = build(A1, D1);
  const Marginal t2 = build(A2, D2);

  const double l1 = specs[0].lambda(), l2 = specs[1].lambda();
  const double w1 = specs[0].omega, w2 = specs[1].omega;
  const double pe1 = specs[0].p_e, pe2 = specs[1].p_e;

  std::vector<double> f(n_states, 0.0), q(n_states, 0.0);
  const double tau = pick_damping(opts.damping, std::max(l1, l2));
  const std::size_t s_ref = 0;  // both terminals at (1, 0)

  // Bellman sweep; the hot loop.
  const auto sweep = [&]() {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t u1 = 0; u1 < S1; ++u1) {
      const std::size_t i1_n = t1.idle_noarr[u1] * S2;
      const std::size_t i1_a = t1.idle_arr[u1] * S2;
      const std::size_t d1_n = t1.deliv_noarr[u1] * S2;
      const std::size_t d1_a = t1.deliv_arr[u1] * S2;
      const double h1 = t1.h[u1];
      const double cost_sched1 = t1.a[u1] + pe1 * t1.d[u1];
      for (std::size_t u2 = 0; u2 < S2; ++u2) {
        const std::size_t i2_n = t2.idle_noarr[u2];
        const std::size_t i2_a = t2.idle_arr[u2];
        const std::size_t d2_n = t2.deliv_noarr[u2];
        const std::size_t d2_a = t2.deliv_arr[u2];
        const double h2 = t2.h[u2];
        const double cost_sched2 = t2.a[u2] + pe2 * t2.d[u2];

        // E f over arrivals for each (branch1, branch2) combination.
        const double f_ii = (1 - l1) * ((1 - l2) * f[i1_n + i2_n] + l2 * f[i1_n + i2_a]) +
                            l1 * ((1 - l2) * f[i1_a + i2_n] + l2 * f[i1_a + i2_a]);
        const double f_di = (1 - l1) * ((1 - l2) * f[d1_n + i2_n] + l2 * f[d1_n + i2_a]) +
                            l1 * ((1 - l2) * f[d1_a + i2_n] + l2 * f[d1_a + i2_a]);
        const double f_id = (1 - l1) * ((1 - l2) * f[i1_n + d2_n] + l2 * f[i1_n + d2_a]) +
                            l1 * ((1 - l2) * f[i1_a + d2_n] + l2 * f[i1_a + d2_a]);

        const double val_sched1 =
            0.5 * (w1 * cost_sched1 + w2 * h2) + (1 - pe1) * f_di + pe1 * f_ii;
        const double val_sched2 =
            0.5 * (w1 * h1 + w2 * cost_sched2) + (1 - pe2) * f_id + pe2 * f_ii;

        const double v = std::min(val_sched1, val_sched2);
        const std::size_t s = u1 * S2 + u2;
        q[s] = v;
        const double delta = v - f[s];
        lo = std::min(lo, delta);
        hi = std::max(hi, delta);
      }
    }
    return std::pair<double, double>(lo, hi);
  };

  FullRviResult res;
  double span = std::numeric_limits<double>::infinity();
  std::uint64_t it = 0;
  for (; it < opts.max_iters; ++it) {
    const auto [lo, hi] = sweep();
    span = hi - lo;
    const double q_ref = q[s_ref];
    if (tau == 1.0) {
      for (std::size_t s = 0; s < n_states; ++s) f[s] = q[s] - q_ref;
    } else {
      for (std::size_t s = 0; s < n_states; ++s)
        f[s] = (1.0 - tau) * f[s] + tau * (q[s] - q_ref);
    }
    if (span <= opts.tol) {
      ++it;
      break;
    }
  }
  const auto [lo, hi] = sweep();
  res.j = q[s_ref];
  res.residual = hi - lo;
  res.iterations = it;
  res.converged = res.residual <= opts.tol * 4;
  return res;
}

}  // namespace aoisim
