#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <variant>

namespace aoisim {

/// Bernoulli packet arrivals with per-slot rate lambda in (0, 1].
struct BernoulliArrivals {
  double lambda = 1.0;
};

/// Deterministic arrivals every `period` slots. A packet arrives at the end
/// of slot t iff t % period == phase % period. The phase alignment of
/// multiple periodic sources is configurable; by default the engine uses
/// terminal id modulo period.
struct PeriodicArrivals {
  int period = 1;
  std::optional<int> phase;  // default: terminal id % period
};

using ArrivalProcess = std::variant<BernoulliArrivals, PeriodicArrivals>;

/// Static per-terminal parameters.
struct TerminalSpec {
  int id = 0;
  ArrivalProcess arrivals = BernoulliArrivals{1.0};
  double omega = 1.0;            // weight, > 0
  double p_e = 0.0;              // transmission failure probability, [0, 1)
  std::optional<int> deadline;   // AoI deadline H, slots
  std::optional<double> epsilon; // violation-probability budget, (0, 1)

  bool is_bernoulli() const {
    return std::holds_alternative<BernoulliArrivals>(arrivals);
  }
  bool is_periodic() const {
    return std::holds_alternative<PeriodicArrivals>(arrivals);
  }
  double lambda() const { return std::get<BernoulliArrivals>(arrivals).lambda; }
  int period() const { return std::get<PeriodicArrivals>(arrivals).period; }
  int phase() const {
    const auto& p = std::get<PeriodicArrivals>(arrivals);
    return (p.phase ? *p.phase : id) % p.period;
  }
  /// Mean arrival rate regardless of pattern.
  double arrival_rate() const {
    return is_bernoulli() ? lambda() : 1.0 / period();
  }

  void validate() const {
    if (omega <= 0) throw std::invalid_argument("TerminalSpec: omega must be > 0");
    if (p_e < 0 || p_e >= 1)
      throw std::invalid_argument("TerminalSpec: p_e must be in [0, 1)");
    if (is_bernoulli()) {
      const double l = lambda();
      if (!(l > 0 && l <= 1))
        throw std::invalid_argument("TerminalSpec: lambda must be in (0, 1]");
    } else {
      if (period() < 1)
        throw std::invalid_argument("TerminalSpec: period must be >= 1");
    }
    if (deadline && *deadline < 1)
      throw std::invalid_argument("TerminalSpec: deadline must be >= 1");
    if (epsilon && !(*epsilon > 0 && *epsilon < 1))
      throw std::invalid_argument("TerminalSpec: epsilon must be in (0, 1)");
  }
};

/// Per-terminal AoI bookkeeping. The receiver-side AoI is h = a + d, where
/// a is the queuing delay of the buffered packet and d the generation-time
/// gap between the buffered packet and the last delivered update. While the
/// buffer is empty, d = 0 and a tracks h exactly.
struct TerminalState {
  std::int64_t a = 0;
  std::int64_t d = 0;
  bool has_packet = false;

  std::int64_t h() const { return a + d; }

  /// Whole arrival periods spanned by the undelivered gap; feeds the
  /// periodic-arrival index. Ceil keeps any d > 0 visible during the
  /// start-up transient where d is not yet an exact multiple of the period.
  std::int64_t periods_since_update(int period) const {
    return (d + period - 1) / period;
  }

  bool operator==(const TerminalState&) const = default;
};

/// Slot-start increment: everything ages one slot. d is a difference of
/// generation times and does not age.
inline TerminalState slot_begin(TerminalState s) {
  s.a += 1;
  return s;
}

/// Successful delivery of the buffered packet: AoI collapses to the packet
/// age (d resets) and the buffer empties. Scheduling an empty buffer is a
/// policy bug and is surfaced here rather than ignored.
inline TerminalState apply_delivery(TerminalState s) {
  if (!s.has_packet)
    throw std::logic_error("apply_delivery: terminal has no buffered packet");
  s.d = 0;
  s.has_packet = false;
  return s;
}

/// End-of-slot arrival. The new packet replaces whatever is buffered: the
/// old queuing delay is absorbed into d, and a restarts so that the next
/// slot_begin leaves the fresh packet with a = 1.
inline TerminalState apply_arrival(TerminalState s, bool arrived) {
  if (!arrived) return s;
  s.d = s.a + s.d;
  s.a = 0;
  s.has_packet = true;
  return s;
}

/// One scheduling decision: at most one terminal owns the channel per slot.
struct Decision {
  std::optional<int> scheduled;

  static Decision idle() { return Decision{}; }
  static Decision schedule(int terminal) { return Decision{terminal}; }
};

}  // namespace aoisim
