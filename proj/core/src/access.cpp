#include "aoisim/access.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "aoisim/indices.hpp"

namespace aoisim {

void AccessConfig::validate() const {
  if (!(p > 0 && p <= 1))
    throw std::invalid_argument("AccessConfig: p must be in (0, 1]");
  if (index_threshold < 0)
    throw std::invalid_argument("AccessConfig: index_threshold must be >= 0");
  if (t_s < 1) throw std::invalid_argument("AccessConfig: t_s must be >= 1");
  if (t_c == 0 || t_c < -1)
    throw std::invalid_argument("AccessConfig: t_c must be >= 1 or -1");
}

namespace {

AccessSlotResult step_impl(const std::vector<TerminalState>& states,
                           const std::vector<TerminalSpec>& specs,
                           const AccessConfig& cfg, ChannelPhase phase,
                           RngStream& contention, RngStream& channel,
                           bool use_index) {
  AccessSlotResult res;
  switch (phase.kind) {
    case ChannelPhase::Kind::contention: {
      int transmitters = 0;
      int owner = -1;
      for (std::size_t n = 0; n < states.size(); ++n) {
        if (!states[n].has_packet) continue;
        if (use_index &&
            marginal_index(states[n], specs[n]) < cfg.index_threshold)
          continue;
        if (contention.bernoulli(cfg.p)) {
          ++transmitters;
          if (owner < 0) owner = static_cast<int>(n);
        }
      }
      res.transmitters = transmitters;
      if (transmitters == 0) {
        res.phase = ChannelPhase::contention();
      } else if (transmitters == 1) {
        res.phase = ChannelPhase{ChannelPhase::Kind::transmission, owner,
                                 cfg.t_s, -1, false};
      } else {
        res.phase = ChannelPhase{ChannelPhase::Kind::collision, -1,
                                 cfg.collision_slots(), -1, false};
      }
      return res;
    }
    case ChannelPhase::Kind::transmission: {
      if (phase.inflight_d < 0) {
        // First frame slot: the terminal sends the newest packet it holds.
        phase.inflight_d = states[static_cast<std::size_t>(phase.owner)].d;
        phase.buffer_swapped = false;
      }
      phase.remaining -= 1;
      if (phase.remaining == 0) {
        const bool success =
            !channel.bernoulli(specs[static_cast<std::size_t>(phase.owner)].p_e);
        if (success)
          res.delivered = DeliveryEvent{phase.owner, phase.inflight_d,
                                        !phase.buffer_swapped};
        res.phase = ChannelPhase::contention();
      } else {
        res.phase = phase;
      }
      return res;
    }
    case ChannelPhase::Kind::collision: {
      phase.remaining -= 1;
      res.phase =
          phase.remaining == 0 ? ChannelPhase::contention() : phase;
      return res;
    }
  }
  throw std::logic_error("step_impl: bad phase");
}

bool draws_arrival(const TerminalSpec& spec, std::uint64_t slot,
                   RngStream& arrivals) {
  if (spec.is_bernoulli()) return arrivals.bernoulli(spec.lambda());
  return static_cast<std::int64_t>(slot % spec.period()) == spec.phase();
}

}  // namespace

AccessSlotResult ipra_step(const std::vector<TerminalState>& states,
                           const std::vector<TerminalSpec>& specs,
                           const AccessConfig& cfg, ChannelPhase phase,
                           RngStream& contention, RngStream& channel) {
  return step_impl(states, specs, cfg, phase, contention, channel, true);
}

AccessSlotResult aloha_step(const std::vector<TerminalState>& states,
                            const std::vector<TerminalSpec>& specs,
                            const AccessConfig& cfg, ChannelPhase phase,
                            RngStream& contention, RngStream& channel) {
  return step_impl(states, specs, cfg, phase, contention, channel, false);
}

RunMetrics run_access(const std::vector<TerminalSpec>& specs,
                      AccessProtocol protocol, const AccessConfig& cfg,
                      std::uint64_t horizon, std::uint64_t seed) {
  if (horizon == 0) throw std::invalid_argument("run_access: horizon must be >= 1");
  if (specs.empty()) throw std::invalid_argument("run_access: no terminals");
  cfg.validate();
  for (const auto& s : specs) s.validate();

  RngStream arrivals(seed, StreamId::arrivals);
  RngStream channel(seed, StreamId::channel);
  RngStream contention(seed, StreamId::contention);

  std::vector<TerminalState> states(specs.size());
  std::vector<std::vector<std::uint64_t>> hist(specs.size());
  std::vector<std::uint64_t> deliveries(specs.size(), 0);
  double acc = 0.0;
  ContentionStats stats;

  ChannelPhase phase = ChannelPhase::contention();
  for (std::uint64_t t = 1; t <= horizon; ++t) {
    for (auto& s : states) s = slot_begin(s);

    switch (phase.kind) {
      case ChannelPhase::Kind::contention: stats.contention_slots += 1; break;
      case ChannelPhase::Kind::transmission: stats.transmission_slots += 1; break;
      case ChannelPhase::Kind::collision: stats.collision_slots += 1; break;
    }
    const bool was_contention = phase.kind == ChannelPhase::Kind::contention;

    AccessSlotResult step =
        protocol == AccessProtocol::ipra
            ? ipra_step(states, specs, cfg, phase, contention, channel)
            : aloha_step(states, specs, cfg, phase, contention, channel);

    if (was_contention) {
      if (step.transmitters == 0) stats.idle_contention_slots += 1;
      else if (step.transmitters >= 2) stats.collision_frames += 1;
    } else if (phase.kind == ChannelPhase::Kind::transmission &&
               step.phase.kind == ChannelPhase::Kind::contention) {
      if (step.delivered) stats.success_frames += 1;
      else stats.failed_frames += 1;
    }

    if (step.delivered) {
      auto& s = states[static_cast<std::size_t>(step.delivered->terminal)];
      s.d -= step.delivered->d_reduction;
      if (step.delivered->clear_buffer) s.has_packet = false;
      deliveries[static_cast<std::size_t>(step.delivered->terminal)] += 1;
    }
    phase = step.phase;

    for (std::size_t n = 0; n < specs.size(); ++n) {
      const auto h = states[n].h();
      acc += specs[n].omega * static_cast<double>(h);
      auto& hn = hist[n];
      if (static_cast<std::size_t>(h) >= hn.size())
        hn.resize(static_cast<std::size_t>(h) + 1, 0);
      hn[static_cast<std::size_t>(h)] += 1;
    }

    for (std::size_t n = 0; n < specs.size(); ++n) {
      const bool arrived = draws_arrival(specs[n], t, arrivals);
      if (arrived && phase.kind == ChannelPhase::Kind::transmission &&
          static_cast<int>(n) == phase.owner && phase.inflight_d >= 0)
        phase.buffer_swapped = true;
      states[n] = apply_arrival(states[n], arrived);
    }
  }

  // A frame cut off by the horizon shows up as the deficit between slot
  // tallies and completed-frame accounting.
  if (phase.kind == ChannelPhase::Kind::transmission)
    stats.partial_frame_slots = static_cast<std::uint64_t>(cfg.t_s - phase.remaining);
  else if (phase.kind == ChannelPhase::Kind::collision)
    stats.partial_frame_slots =
        static_cast<std::uint64_t>(cfg.collision_slots() - phase.remaining);

  RunMetrics m;
  m.horizon = horizon;
  m.n_terminals = static_cast<int>(specs.size());
  m.avg_weighted_aoi =
      acc / (static_cast<double>(horizon) * static_cast<double>(specs.size()));
  m.histograms = std::move(hist);
  m.deliveries = std::move(deliveries);
  m.contention = stats;
  m.per_terminal_mean_aoi.resize(specs.size(), 0.0);
  m.per_terminal_violation_freq.resize(specs.size(), 0.0);
  for (std::size_t n = 0; n < specs.size(); ++n) {
    double sum = 0.0;
    std::uint64_t viol = 0;
    const auto& hn = m.histograms[n];
    const std::int64_t deadline = specs[n].deadline ? *specs[n].deadline : -1;
    for (std::size_t h = 0; h < hn.size(); ++h) {
      sum += static_cast<double>(h) * static_cast<double>(hn[h]);
      if (deadline >= 0 && static_cast<std::int64_t>(h) > deadline) viol += hn[h];
    }
    m.per_terminal_mean_aoi[n] = sum / static_cast<double>(horizon);
    m.per_terminal_violation_freq[n] =
        deadline >= 0 ? static_cast<double>(viol) / static_cast<double>(horizon)
                      : 0.0;
  }
  return m;
}

std::vector<double> make_log_grid(double lo, double hi, int points) {
  if (!(lo > 0) || !(hi > lo) || points < 2)
    throw std::invalid_argument("make_log_grid: need 0 < lo < hi, points >= 2");
  std::vector<double> g(static_cast<std::size_t>(points));
  const double step = (std::log(hi) - std::log(lo)) / (points - 1);
  for (int i = 0; i < points; ++i)
    g[static_cast<std::size_t>(i)] = std::exp(std::log(lo) + step * i);
  return g;
}

TuneResult tune_ipra(const std::vector<TerminalSpec>& specs,
                     const AccessConfig& cfg_template,
                     const std::vector<double>& threshold_grid,
                     std::uint64_t horizon, std::uint64_t seed) {
  if (threshold_grid.size() < 2)
    throw std::invalid_argument("tune_ipra: degenerate threshold grid");
  TuneResult res;
  res.config = cfg_template;

  const auto evaluate = [&](double threshold) {
    AccessConfig cfg = cfg_template;
    cfg.index_threshold = threshold;
    // Common random numbers across evaluations: same seed every time.
    const double aoi =
        run_access(specs, AccessProtocol::ipra, cfg, horizon, seed)
            .avg_weighted_aoi;
    res.evaluations.emplace_back(threshold, aoi);
    return aoi;
  };

  std::size_t best = 0;
  double best_aoi = evaluate(threshold_grid[0]);
  for (std::size_t i = 1; i < threshold_grid.size(); ++i) {
    const double aoi = evaluate(threshold_grid[i]);
    if (aoi < best_aoi) {
      best_aoi = aoi;
      best = i;
    }
  }

  // Golden-section refinement in the bracketing interval.
  double lo = threshold_grid[best > 0 ? best - 1 : 0];
  double hi = threshold_grid[std::min(best + 1, threshold_grid.size() - 1)];
  double best_thr = threshold_grid[best];
  if (hi > lo) {
    constexpr double inv_phi = 0.6180339887498949;
    double x1 = hi - inv_phi * (hi - lo);
    double x2 = lo + inv_phi * (hi - lo);
    double f1 = evaluate(x1);
    double f2 = evaluate(x2);
    for (int iter = 0; iter < 12; ++iter) {
      if (f1 <= f2) {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - inv_phi * (hi - lo);
        f1 = evaluate(x1);
      } else {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + inv_phi * (hi - lo);
        f2 = evaluate(x2);
      }
    }
    const double x_mid = f1 <= f2 ? x1 : x2;
    const double f_mid = std::min(f1, f2);
    if (f_mid < best_aoi) {
      best_aoi = f_mid;
      best_thr = x_mid;
    }
  }

  res.config.index_threshold = best_thr;
  res.achieved_aoi = best_aoi;
  return res;
}

}  // namespace aoisim
