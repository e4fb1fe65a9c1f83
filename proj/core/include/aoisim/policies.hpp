#pragma once

#include <memory>
#include <string>
#include <vector>

#include "aoisim/engine.hpp"

namespace aoisim {

enum class PolicyKind {
  whittle,
  whittle_no_buffer,
  rr_one,
  max_age,
  stationary_random,
};

PolicyKind policy_kind_from_string(const std::string& name);
std::string to_string(PolicyKind kind);

/// Schedules the terminal with the largest unreliable-scaled Whittle index
/// (Bernoulli or periodic per terminal); idles when every index is zero.
/// Ties break toward the lowest terminal id.
class WhittlePolicy final : public SchedulingPolicy {
 public:
  Decision decide(const std::vector<TerminalState>& states,
                  const std::vector<TerminalSpec>& specs, std::uint64_t slot,
                  RngStream& rng) override;
};

/// No-buffer packet management baseline: packets not sent in the slot after
/// arrival are dropped by the engine, so only fresh (a = 1) packets compete,
/// ranked by the Bernoulli index at a = 1.
class NoBufferIndexPolicy final : public SchedulingPolicy {
 public:
  Decision decide(const std::vector<TerminalState>& states,
                  const std::vector<TerminalSpec>& specs, std::uint64_t slot,
                  RngStream& rng) override;
  BufferMode buffer_mode() const override { return BufferMode::no_buffer; }
};

/// RR-ONE: cyclic pointer advancing to the next terminal holding a packet.
/// The pointer stays put on idle slots.
class RoundRobinOnePolicy final : public SchedulingPolicy {
 public:
  Decision decide(const std::vector<TerminalState>& states,
                  const std::vector<TerminalSpec>& specs, std::uint64_t slot,
                  RngStream& rng) override;

 private:
  int cursor_ = -1;
};

/// Sanity baseline (not from the index family): schedule the largest AoI
/// among nonempty buffers.
class MaxAgePolicy final : public SchedulingPolicy {
 public:
  Decision decide(const std::vector<TerminalState>& states,
                  const std::vector<TerminalSpec>& specs, std::uint64_t slot,
                  RngStream& rng) override;
};

/// Uniformly random choice among terminals holding packets; stand-in for an
/// equal-probability random access baseline in centralized form.
class StationaryRandomPolicy final : public SchedulingPolicy {
 public:
  Decision decide(const std::vector<TerminalState>& states,
                  const std::vector<TerminalSpec>& specs, std::uint64_t slot,
                  RngStream& rng) override;
};

/// Serves a fixed cyclic slot-to-terminal assignment (entry < 0 = idle
/// slot); skips silently when the designated terminal has nothing to send.
/// Used for constant-interval service and deadline schedules.
class FixedSchedulePolicy final : public SchedulingPolicy {
 public:
  explicit FixedSchedulePolicy(std::vector<int> slot_assignment);
  Decision decide(const std::vector<TerminalState>& states,
                  const std::vector<TerminalSpec>& specs, std::uint64_t slot,
                  RngStream& rng) override;

 private:
  std::vector<int> assignment_;
};

std::unique_ptr<SchedulingPolicy> make_policy(PolicyKind kind);

}  // namespace aoisim
