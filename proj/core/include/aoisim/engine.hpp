#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "aoisim/metrics.hpp"
#include "aoisim/rng.hpp"
#include "aoisim/types.hpp"

namespace aoisim {

/// Packet management applied by the engine after each transmission stage.
enum class BufferMode {
  keep_latest,  // one-packet buffer, newest packet replaces older
  no_buffer,    // a packet not transmitted in the slot after arrival is dropped
};

/// Centralized slot scheduler. decide() sees the post-increment states
/// (a >= 1) of every terminal and must return at most one terminal, which
/// must hold a packet.
class SchedulingPolicy {
 public:
  virtual ~SchedulingPolicy() = default;
  virtual Decision decide(const std::vector<TerminalState>& states,
                          const std::vector<TerminalSpec>& specs,
                          std::uint64_t slot, RngStream& rng) = 0;
  virtual BufferMode buffer_mode() const { return BufferMode::keep_latest; }
};

/// Runs the slot-level simulation with single-slot transmissions.
/// Sequence per slot: increment -> decide -> transmit (success w.p. 1-p_e)
/// -> sample AoI -> arrivals (drawn in terminal-id order from a dedicated
/// stream, so policies cannot perturb the arrival sample path).
///
/// Throws std::invalid_argument on horizon == 0 or an out-of-range decision,
/// std::logic_error if a policy schedules an empty buffer.
RunMetrics run_slots(const std::vector<TerminalSpec>& specs,
                     SchedulingPolicy& policy, std::uint64_t horizon,
                     std::uint64_t seed);

/// Frame-based generalization: a scheduled transmission occupies
/// frame_slots consecutive slots starting at the decision slot, with
/// delivery at frame end. The in-flight packet is snapshotted at frame
/// start; it keeps aging during its own frame and the delivery reduction
/// uses the aged value. Arrivals during the frame go to the buffer normally
/// but never swap the in-flight packet. frame_slots == 1 is exactly
/// run_slots.
RunMetrics run_framed(const std::vector<TerminalSpec>& specs,
                      SchedulingPolicy& policy, int frame_slots,
                      std::uint64_t horizon, std::uint64_t seed);

}  // namespace aoisim
