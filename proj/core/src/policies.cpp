#include "aoisim/policies.hpp"

#include <stdexcept>

#include "aoisim/indices.hpp"

namespace aoisim {

PolicyKind policy_kind_from_string(const std::string& name) {
  if (name == "whittle") return PolicyKind::whittle;
  if (name == "whittle_no_buffer" || name == "no_buffer")
    return PolicyKind::whittle_no_buffer;
  if (name == "rr_one") return PolicyKind::rr_one;
  if (name == "max_age") return PolicyKind::max_age;
  if (name == "stationary_random") return PolicyKind::stationary_random;
  throw std::invalid_argument("unknown policy: " + name);
}

std::string to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::whittle: return "whittle";
    case PolicyKind::whittle_no_buffer: return "whittle_no_buffer";
    case PolicyKind::rr_one: return "rr_one";
    case PolicyKind::max_age: return "max_age";
    case PolicyKind::stationary_random: return "stationary_random";
  }
  return "?";
}

Decision WhittlePolicy::decide(const std::vector<TerminalState>& states,
                               const std::vector<TerminalSpec>& specs,
                               std::uint64_t, RngStream&) {
  int best = -1;
  double best_index = 0.0;
  for (std::size_t n = 0; n < states.size(); ++n) {
    const double idx = marginal_index(states[n], specs[n]);
    if (idx > best_index) {
      best_index = idx;
      best = static_cast<int>(n);
    }
  }
  return best >= 0 ? Decision::schedule(best) : Decision::idle();
}

Decision NoBufferIndexPolicy::decide(const std::vector<TerminalState>& states,
                                     const std::vector<TerminalSpec>& specs,
                                     std::uint64_t, RngStream&) {
  int best = -1;
  double best_index = 0.0;
  for (std::size_t n = 0; n < states.size(); ++n) {
    const auto& s = states[n];
    if (!s.has_packet || s.a != 1 || s.d == 0) continue;
    const double idx = index_unreliable(
        index_bernoulli(1, s.d, specs[n].arrival_rate(), specs[n].omega),
        specs[n].p_e);
    if (idx > best_index) {
      best_index = idx;
      best = static_cast<int>(n);
    }
  }
  return best >= 0 ? Decision::schedule(best) : Decision::idle();
}

Decision RoundRobinOnePolicy::decide(const std::vector<TerminalState>& states,
                                     const std::vector<TerminalSpec>&,
                                     std::uint64_t, RngStream&) {
  const int n_terms = static_cast<int>(states.size());
  for (int step = 1; step <= n_terms; ++step) {
    const int n = (cursor_ + step) % n_terms;
    if (states[static_cast<std::size_t>(n)].has_packet) {
      cursor_ = n;
      return Decision::schedule(n);
    }
  }
  return Decision::idle();
}

Decision MaxAgePolicy::decide(const std::vector<TerminalState>& states,
                              const std::vector<TerminalSpec>&, std::uint64_t,
                              RngStream&) {
  int best = -1;
  std::int64_t best_h = 0;
  for (std::size_t n = 0; n < states.size(); ++n) {
    if (!states[n].has_packet) continue;
    if (states[n].h() > best_h) {
      best_h = states[n].h();
      best = static_cast<int>(n);
    }
  }
  return best >= 0 ? Decision::schedule(best) : Decision::idle();
}

Decision StationaryRandomPolicy::decide(
    const std::vector<TerminalState>& states, const std::vector<TerminalSpec>&,
    std::uint64_t, RngStream& rng) {
  std::vector<int> nonempty;
  nonempty.reserve(states.size());
  for (std::size_t n = 0; n < states.size(); ++n)
    if (states[n].has_packet) nonempty.push_back(static_cast<int>(n));
  if (nonempty.empty()) return Decision::idle();
  const auto pick = rng.uniform_below(nonempty.size());
  return Decision::schedule(nonempty[static_cast<std::size_t>(pick)]);
}

FixedSchedulePolicy::FixedSchedulePolicy(std::vector<int> slot_assignment)
    : assignment_(std::move(slot_assignment)) {
  if (assignment_.empty())
    throw std::invalid_argument("FixedSchedulePolicy: empty assignment");
}

Decision FixedSchedulePolicy::decide(const std::vector<TerminalState>& states,
                                     const std::vector<TerminalSpec>&,
                                     std::uint64_t slot, RngStream&) {
  const int n = assignment_[static_cast<std::size_t>(slot % assignment_.size())];
  if (n < 0) return Decision::idle();
  if (!states[static_cast<std::size_t>(n)].has_packet) return Decision::idle();
  return Decision::schedule(n);
}

std::unique_ptr<SchedulingPolicy> make_policy(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::whittle: return std::make_unique<WhittlePolicy>();
    case PolicyKind::whittle_no_buffer:
      return std::make_unique<NoBufferIndexPolicy>();
    case PolicyKind::rr_one: return std::make_unique<RoundRobinOnePolicy>();
    case PolicyKind::max_age: return std::make_unique<MaxAgePolicy>();
    case PolicyKind::stationary_random:
      return std::make_unique<StationaryRandomPolicy>();
  }
  throw std::invalid_argument("make_policy: bad kind");
}

}  // namespace aoisim
