#include "bercow/adversary.hpp"

#include <algorithm>

namespace bercow {

namespace {

void check_interval(Micros ats, Micros t, Micros dnet) {
  require(ats >= t && ats <= t + dnet, "adversarial timestamp outside [T, T + dnet]");
}

}  // namespace

std::pair<Micros, Micros> assign_worst_case_pair(Micros t, Micros dnet, Favored favored) {
  require(dnet >= 0, "dnet must be non-negative");
  return favored == Favored::first ? std::pair{t, t + dnet} : std::pair{t + dnet, t};
}

AdaptiveAssignment assign_worst_case_permutation(Micros t, Micros dnet, Micros dnoise, std::size_t n,
                                                 const NoiseDraw& draw, bool adaptive) {
  require(n >= 1, "need at least one command");
  if (dnoise <= dnet) fail(ErrorCategory::contract, "worst-case permutation needs dnoise > dnet");
  const Micros top = t + dnet;
  AdaptiveAssignment out;
  Micros floor = t;
  bool saturated = false;
  for (std::size_t i = 0; i < n; ++i) {
    Micros ats = saturated ? top : floor;
    if (!adaptive && i > 0) ats = top;
    check_interval(ats, t, dnet);
    Micros modified = ats + draw(i, ats);
    out.assigned.push_back(ats);
    out.modified.push_back(modified);
    if (adaptive && !saturated) {
      if (modified <= top) {
        floor = modified;
      } else {
        saturated = true;
      }
    }
  }
  return out;
}

std::vector<Micros> assign_lower_bound_strategy(Micros t, Micros dnet, std::size_t n) {
  require(n >= 1, "need at least one command");
  std::vector<Micros> ats(n, t + dnet);
  ats.back() = t;
  return ats;
}

RelayPlacement private_relay_placement(const Observation& victim, std::span<const NodeId> colluders,
                                       std::size_t f, Micros t, Micros dnet) {
  if (colluders.size() > f) {
    fail(ErrorCategory::config, std::to_string(colluders.size()) + " colluders exceed f = " +
                                    std::to_string(f));
  }
  RelayPlacement placement;
  if (colluders.empty()) return placement;
  for (auto node : colluders) {
    require(node < victim.timestamps.size(), "unknown colluder " + std::to_string(node));
    Micros v = victim.timestamps[node].timestamp;
    placement.front_overrides[node] = std::clamp(v - 1, t, t + dnet);
    placement.back_overrides[node] = std::clamp(v + 1, t, t + dnet);
  }
  placement.front_quorum = QuorumChoice::lowest;
  placement.back_quorum = QuorumChoice::highest;
  return placement;
}

}  // namespace bercow
