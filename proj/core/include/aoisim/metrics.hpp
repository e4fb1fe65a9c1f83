#pragma once

#include <cstdint>
#include <vector>

namespace aoisim {

/// Channel bookkeeping for contention-based runs. Zeros for centralized
/// runs. Slot counters partition the horizon exactly:
///   contention_slots + transmission_slots + collision_slots == horizon.
struct ContentionStats {
  std::uint64_t contention_slots = 0;
  std::uint64_t idle_contention_slots = 0;  // contention slots with no transmitter
  std::uint64_t transmission_slots = 0;
  std::uint64_t collision_slots = 0;
  std::uint64_t success_frames = 0;   // delivered at frame end
  std::uint64_t failed_frames = 0;    // single transmitter, channel error
  std::uint64_t collision_frames = 0; // >= 2 transmitters
  std::uint64_t partial_frame_slots = 0;  // slots of a frame cut off by the horizon

  bool operator==(const ContentionStats&) const = default;
};

/// Results of one simulation run. AoI is sampled once per slot after the
/// transmission stage, so a delivery is reflected in the slot it completes.
struct RunMetrics {
  std::uint64_t horizon = 0;
  int n_terminals = 0;

  /// (1 / (T*N)) * sum_t sum_n omega_n * h_n(t)
  double avg_weighted_aoi = 0.0;
  std::vector<double> per_terminal_mean_aoi;
  /// sum_t 1(h_n(t) > H_n) / T; 0 when the spec carries no deadline.
  std::vector<double> per_terminal_violation_freq;
  /// histograms[n][h] = number of slots terminal n spent at AoI h.
  std::vector<std::vector<std::uint64_t>> histograms;
  std::vector<std::uint64_t> deliveries;

  ContentionStats contention;

  bool operator==(const RunMetrics&) const = default;
};

}  // namespace aoisim
