#include "aoisim/indices.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace aoisim {

namespace {

// Ceiling that snaps values a hair below an integer back onto it. The
// threshold formulas are exact reals hitting integers for many (lambda, m),
// and a 1-ulp overshoot must not bump the threshold by a full slot.
std::int64_t ceil_snapped(double x) {
  return static_cast<std::int64_t>(std::ceil(x - 1e-9));
}

void check_lambda(double lambda) {
  if (!(lambda > 0.0 && lambda <= 1.0))
    throw std::invalid_argument("lambda must be in (0, 1], got " +
                                std::to_string(lambda));
}

}  // namespace

double index_bernoulli(std::int64_t a, std::int64_t d, double lambda,
                       double omega) {
  if (a < 1) throw std::invalid_argument("index_bernoulli: a must be >= 1");
  if (d < 0) throw std::invalid_argument("index_bernoulli: d must be >= 0");
  check_lambda(lambda);
  if (!(omega > 0)) throw std::invalid_argument("index_bernoulli: omega must be > 0");

  const double da = static_cast<double>(a);
  const double dd = static_cast<double>(d);
  const double boundary = 0.5 * lambda * da * da + (1.0 - 0.5 * lambda) * da;
  if (dd > boundary) {
    const double x =
        (dd + 0.5 * lambda * da * (da - 1.0)) / (1.0 - lambda + da * lambda);
    return omega * (0.5 * x * x + (1.0 / lambda - 0.5) * x);
  }
  return omega * dd / lambda;
}

double index_periodic(std::int64_t a, std::int64_t n_p, int period,
                      double omega) {
  if (period < 1) throw std::invalid_argument("index_periodic: period must be >= 1");
  if (a < 1 || a > period)
    throw std::invalid_argument("index_periodic: a must be in [1, period]");
  if (n_p < 0) throw std::invalid_argument("index_periodic: n_p must be >= 0");
  if (!(omega > 0)) throw std::invalid_argument("index_periodic: omega must be > 0");

  // K1 = n_p * (period - a + 1) / period; floors taken in exact integer
  // arithmetic.
  const std::int64_t num = n_p * (period - a + 1);
  const std::int64_t k1_floor = num / period;
  const std::int64_t k1_half_floor = num / (2 * static_cast<std::int64_t>(period));
  const double k1 = static_cast<double>(num) / period;
  const double tp2 = static_cast<double>(period) * period;
  return omega * tp2 * static_cast<double>(k1_floor + 1) *
         (k1 - static_cast<double>(k1_half_floor));
}

double index_unreliable(double reliable_index, double p_e) {
  if (!(p_e >= 0.0 && p_e < 1.0))
    throw std::invalid_argument("index_unreliable: p_e must be in [0, 1)");
  if (reliable_index < 0)
    throw std::invalid_argument("index_unreliable: index must be >= 0");
  return (1.0 - p_e) * reliable_index;
}

double marginal_index(const TerminalState& state, const TerminalSpec& spec) {
  if (!state.has_packet || state.d == 0) return 0.0;
  double idx;
  if (spec.is_bernoulli()) {
    idx = index_bernoulli(state.a, state.d, spec.lambda(), spec.omega);
  } else {
    const int tp = spec.period();
    idx = index_periodic(state.a, state.periods_since_update(tp), tp, spec.omega);
  }
  return index_unreliable(idx, spec.p_e);
}

DecoupledSolution::DecoupledSolution(double lambda, double m, double j_star,
                                     int d1,
                                     std::vector<std::int64_t> raw_thresholds,
                                     std::int64_t raw_tail)
    : lambda_(lambda),
      m_(m),
      j_star_(j_star),
      d1_(d1),
      raw_(std::move(raw_thresholds)),
      raw_tail_(raw_tail) {}

std::int64_t DecoupledSolution::raw_threshold(std::int64_t a) const {
  if (a < 1) throw std::invalid_argument("threshold: a must be >= 1");
  if (a < d1_) return raw_[static_cast<std::size_t>(a - 1)];
  return raw_tail_;
}

std::int64_t DecoupledSolution::threshold(std::int64_t a) const {
  return std::max<std::int64_t>(1, raw_threshold(a));
}

DecoupledSolution solve_decoupled(double lambda, double m) {
  check_lambda(lambda);
  if (m < 0) throw std::invalid_argument("solve_decoupled: m must be >= 0");

  const double inv_l = 1.0 / lambda;
  // The first threshold cannot exceed the always-schedule cost bound:
  // j_star <= 1/lambda + m, so d1 = ceil(j_star - 1/lambda) <= ceil(m) + 1.
  const int d1_cap = static_cast<int>(std::ceil(m)) + 8;

  for (int d1 = 1; d1 <= d1_cap; ++d1) {
    const double dd1 = d1;
    const double denom = dd1 - 1.0 + inv_l;
    const double j_star = (m + 0.5 * dd1 * dd1 - 0.5 * dd1 + dd1 * inv_l +
                           (1.0 - lambda) * inv_l * inv_l) /
                          denom;
    if (!(j_star > 0)) continue;
    const std::int64_t implied = ceil_snapped(j_star - inv_l);
    if (std::max<std::int64_t>(1, implied) != d1) continue;

    std::vector<std::int64_t> raw(static_cast<std::size_t>(d1 > 1 ? d1 - 1 : 0));
    for (int a = 1; a < d1; ++a) {
      const double da = a;
      raw[static_cast<std::size_t>(a - 1)] =
          ceil_snapped((1.0 - lambda + da * lambda) * j_star - da + 1.0 -
                       lambda * da * (da - 1.0) * 0.5 - inv_l);
    }
    const std::int64_t tail = ceil_snapped(lambda * m);
    return DecoupledSolution(lambda, m, j_star, d1, std::move(raw), tail);
  }
  throw std::runtime_error(
      "solve_decoupled: no consistent (D1, J*) pair for lambda=" +
      std::to_string(lambda) + " m=" + std::to_string(m));
}

ThresholdAction whittle_threshold_policy(const DecoupledSolution& sol,
                                         const TerminalState& state) {
  return state.d >= sol.threshold(state.a) ? ThresholdAction::schedule
                                           : ThresholdAction::idle;
}

}  // namespace aoisim
