#include "aoisim/engine.hpp"

#include <stdexcept>
#include <string>

namespace aoisim {

namespace {

bool draws_arrival(const TerminalSpec& spec, std::uint64_t slot,
                   RngStream& arrivals) {
  if (spec.is_bernoulli()) return arrivals.bernoulli(spec.lambda());
  return static_cast<std::int64_t>(slot % spec.period()) == spec.phase();
}

void record_sample(const std::vector<TerminalSpec>& specs,
                   const std::vector<TerminalState>& states, double& acc,
                   std::vector<std::vector<std::uint64_t>>& hist) {
  for (std::size_t n = 0; n < specs.size(); ++n) {
    const auto h = states[n].h();
    acc += specs[n].omega * static_cast<double>(h);
    auto& hn = hist[n];
    if (static_cast<std::size_t>(h) >= hn.size())
      hn.resize(static_cast<std::size_t>(h) + 1, 0);
    hn[static_cast<std::size_t>(h)] += 1;
  }
}

struct ActiveFrame {
  int owner = -1;
  int remaining = 0;
  std::int64_t inflight_d = 0;
  bool buffer_swapped = false;
};

}  // namespace

RunMetrics run_framed(const std::vector<TerminalSpec>& specs,
                      SchedulingPolicy& policy, int frame_slots,
                      std::uint64_t horizon, std::uint64_t seed) {
  if (horizon == 0) throw std::invalid_argument("run_framed: horizon must be >= 1");
  if (frame_slots < 1)
    throw std::invalid_argument("run_framed: frame_slots must be >= 1");
  const int n_terms = static_cast<int>(specs.size());
  if (n_terms == 0) throw std::invalid_argument("run_framed: no terminals");
  for (const auto& s : specs) s.validate();

  RngStream arrivals(seed, StreamId::arrivals);
  RngStream channel(seed, StreamId::channel);
  RngStream policy_rng(seed, StreamId::policy);

  std::vector<TerminalState> states(specs.size());
  std::vector<std::vector<std::uint64_t>> hist(specs.size());
  std::vector<std::uint64_t> deliveries(specs.size(), 0);
  double acc = 0.0;

  const bool drop_stale = policy.buffer_mode() == BufferMode::no_buffer;
  ActiveFrame frame;
  bool frame_active = false;

  for (std::uint64_t t = 1; t <= horizon; ++t) {
    for (auto& s : states) s = slot_begin(s);

    if (!frame_active) {
      const Decision dec = policy.decide(states, specs, t, policy_rng);
      if (dec.scheduled) {
        const int n = *dec.scheduled;
        if (n < 0 || n >= n_terms)
          throw std::invalid_argument("run_framed: scheduled terminal " +
                                      std::to_string(n) + " out of range");
        if (!states[static_cast<std::size_t>(n)].has_packet)
          throw std::logic_error(
              "run_framed: policy scheduled terminal " + std::to_string(n) +
              " with an empty buffer");
        frame = ActiveFrame{n, frame_slots,
                            states[static_cast<std::size_t>(n)].d, false};
        frame_active = true;
      }
    }

    if (frame_active) {
      frame.remaining -= 1;
      if (frame.remaining == 0) {
        auto& owner = states[static_cast<std::size_t>(frame.owner)];
        const bool success =
            !channel.bernoulli(specs[static_cast<std::size_t>(frame.owner)].p_e);
        if (success) {
          owner.d -= frame.inflight_d;
          if (!frame.buffer_swapped) owner.has_packet = false;
          deliveries[static_cast<std::size_t>(frame.owner)] += 1;
        }
        frame_active = false;
      }
    }

    record_sample(specs, states, acc, hist);

    if (drop_stale) {
      for (std::size_t n = 0; n < states.size(); ++n) {
        if (frame_active && static_cast<int>(n) == frame.owner) continue;
        auto& s = states[n];
        if (s.has_packet) {
          s.a += s.d;
          s.d = 0;
          s.has_packet = false;
        }
      }
    }

    for (std::size_t n = 0; n < specs.size(); ++n) {
      const bool arrived = draws_arrival(specs[n], t, arrivals);
      if (arrived && frame_active && static_cast<int>(n) == frame.owner)
        frame.buffer_swapped = true;
      states[n] = apply_arrival(states[n], arrived);
    }
  }

  RunMetrics m;
  m.horizon = horizon;
  m.n_terminals = n_terms;
  m.avg_weighted_aoi = acc / (static_cast<double>(horizon) * n_terms);
  m.histograms = std::move(hist);
  m.deliveries = std::move(deliveries);
  m.per_terminal_mean_aoi.resize(specs.size(), 0.0);
  m.per_terminal_violation_freq.resize(specs.size(), 0.0);
  for (std::size_t n = 0; n < specs.size(); ++n) {
    double sum = 0.0;
    std::uint64_t viol = 0;
    const auto& hn = m.histograms[n];
    const std::int64_t deadline = specs[n].deadline ? *specs[n].deadline : -1;
    for (std::size_t h = 0; h < hn.size(); ++h) {
      sum += static_cast<double>(h) * static_cast<double>(hn[h]);
      if (deadline >= 0 && static_cast<std::int64_t>(h) > deadline)
        viol += hn[h];
    }
    m.per_terminal_mean_aoi[n] = sum / static_cast<double>(horizon);
    m.per_terminal_violation_freq[n] =
        deadline >= 0 ? static_cast<double>(viol) / static_cast<double>(horizon)
                      : 0.0;
  }
  return m;
}

RunMetrics run_slots(const std::vector<TerminalSpec>& specs,
                     SchedulingPolicy& policy, std::uint64_t horizon,
                     std::uint64_t seed) {
  return run_framed(specs, policy, 1, horizon, seed);
}

}  // namespace aoisim
