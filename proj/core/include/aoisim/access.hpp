#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "aoisim/metrics.hpp"
#include "aoisim/rng.hpp"
#include "aoisim/types.hpp"

namespace aoisim {

/// Contention protocol parameters. transmission and collision frames have
/// equal length by default (a terminal only learns of a collision after a
/// full frame; no collision detection). One contention mini-slot = 1 slot.
struct AccessConfig {
  double p = 0.2;               // transmission probability in (0, 1]
  double index_threshold = 0.0; // contend iff local index >= threshold
  int t_s = 1;                  // transmission frame length, slots
  int t_c = -1;                 // collision frame length; -1 means = t_s

  int collision_slots() const { return t_c < 0 ? t_s : t_c; }

  void validate() const;
};

/// Exclusive channel phase. A frame carries the in-flight packet snapshot:
/// the AoI reduction it will deliver (a generation-time difference, so it
/// does not age) and whether a newer arrival has taken the buffer since the
/// frame began.
struct ChannelPhase {
  enum class Kind { contention, transmission, collision };
  Kind kind = Kind::contention;
  int owner = -1;
  int remaining = 0;
  std::int64_t inflight_d = -1;  // -1 until snapshotted at the first frame slot
  bool buffer_swapped = false;

  static ChannelPhase contention() { return {}; }
};

/// Delivery emitted at the end of a successful transmission frame. The
/// engine subtracts d_reduction from the owner's d and clears the buffer
/// only when the in-flight packet is still the buffered one.
struct DeliveryEvent {
  int terminal = -1;
  std::int64_t d_reduction = 0;
  bool clear_buffer = true;
};

struct AccessSlotResult {
  ChannelPhase phase;
  std::optional<DeliveryEvent> delivered;
  int transmitters = 0;  // contention slots only
};

/// One slot of IPRA. In a contention slot every terminal holding a packet
/// computes its index from its own state and spec alone (the
/// decentralization contract) and, if the index reaches the threshold,
/// transmits with probability p; coins are drawn in terminal-id order.
/// 0 transmitters: the channel idles one contention slot. Exactly 1: a
/// transmission frame of t_s slots begins next slot, delivery (ACK) at
/// frame end subject to the channel (success 1 - p_e). 2 or more: a
/// collision frame of t_c slots (NACK). Collided terminals re-draw their
/// coin at every later contention slot.
AccessSlotResult ipra_step(const std::vector<TerminalState>& states,
                           const std::vector<TerminalSpec>& specs,
                           const AccessConfig& cfg, ChannelPhase phase,
                           RngStream& contention, RngStream& channel);

/// Equal-probability slotted baseline: as ipra_step but every terminal with
/// a buffered packet contends with probability p regardless of index.
AccessSlotResult aloha_step(const std::vector<TerminalState>& states,
                            const std::vector<TerminalSpec>& specs,
                            const AccessConfig& cfg, ChannelPhase phase,
                            RngStream& contention, RngStream& channel);

enum class AccessProtocol { ipra, aloha };

/// Full contention-based simulation: increments, protocol step, delivery
/// application, AoI sampling after the transmission stage, then arrivals.
/// AoI keeps incrementing for everyone throughout frames.
RunMetrics run_access(const std::vector<TerminalSpec>& specs,
                      AccessProtocol protocol, const AccessConfig& cfg,
                      std::uint64_t horizon, std::uint64_t seed);

/// Log-spaced grid helper for threshold searches.
std::vector<double> make_log_grid(double lo, double hi, int points);

struct TuneResult {
  AccessConfig config;
  double achieved_aoi = 0.0;
  std::vector<std::pair<double, double>> evaluations;  // (threshold, aoi)
};

/// One-dimensional search on index_threshold at fixed p: evaluates the
/// grid with common random numbers, then golden-section refinement around
/// the best grid point. The objective is unimodal up to Monte-Carlo noise.
/// Throws std::invalid_argument on a degenerate grid.
TuneResult tune_ipra(const std::vector<TerminalSpec>& specs,
                     const AccessConfig& cfg_template,
                     const std::vector<double>& threshold_grid,
                     std::uint64_t horizon, std::uint64_t seed);

}  // namespace aoisim
