// Adversarial assignment of timestamps. The interval model lets the
// adversary pick any assigned timestamp in [T, T + dnet] for a command sent at
// T; private relay works at the node level through colluding replicas.
#pragma once

#include <functional>
#include <map>
#include <span>
#include <vector>

#include "bercow/consensus_sim.hpp"
#include "bercow/domain.hpp"

namespace bercow {

enum class Favored { first, second };

enum class StrategyKind { honest, worst_case_pair, worst_case_permutation, lower_bound, private_relay };

struct AdversaryStrategy {
  StrategyKind kind = StrategyKind::honest;
  Favored favored = Favored::first;  // worst_case_pair
  bool adaptive = true;              // worst_case_permutation
  double colluding_fraction = 0.0;   // private_relay, at most f/n

  static AdversaryStrategy honest() { return {}; }
  static AdversaryStrategy pair(Favored favored) { return {StrategyKind::worst_case_pair, favored}; }
  static AdversaryStrategy upper(bool adaptive = true) {
    return {StrategyKind::worst_case_permutation, Favored::first, adaptive};
  }
  static AdversaryStrategy lower() { return {StrategyKind::lower_bound}; }
};

/// Favored command gets T, the other T + dnet. Returns (ats1, ats2).
std::pair<Micros, Micros> assign_worst_case_pair(Micros t, Micros dnet, Favored favored);

/// Noise for the command at `position` of the target order, drawn after its
/// assigned timestamp `assigned` is fixed.
using NoiseDraw = std::function<Micros(std::size_t position, Micros assigned)>;

struct AdaptiveAssignment {
  std::vector<Micros> assigned;  // in target order
  std::vector<Micros> modified;
};

/// Strategy maximising Pr[target order]. The first remaining command gets the
/// current floor; while its modified timestamp stays within T + dnet the
/// floor rises to it, otherwise every later command gets T + dnet. The
/// non-adaptive variant fixes the first command at T and the rest at T + dnet.
/// Requires dnoise > dnet.
AdaptiveAssignment assign_worst_case_permutation(Micros t, Micros dnet, Micros dnoise, std::size_t n,
                                                 const NoiseDraw& draw, bool adaptive = true);

/// Strategy minimising Pr[target order]: last command at T, all others at
/// T + dnet.
std::vector<Micros> assign_lower_bound_strategy(Micros t, Micros dnet, std::size_t n);

struct RelayPlacement {
  std::map<NodeId, Micros> front_overrides;  // i2: just below the victim
  std::map<NodeId, Micros> back_overrides;   // i3: just above the victim
  QuorumChoice front_quorum = QuorumChoice::lowest;
  QuorumChoice back_quorum = QuorumChoice::lowest;
};

/// Colluding nodes report the attacker's front-run just below, and its
/// back-run just above, their own timestamp for the victim (kept inside
/// [T, T + dnet]). The attacker, acting as the client, hands in the lowest
/// quorum for i2 and the highest for i3.
RelayPlacement private_relay_placement(const Observation& victim, std::span<const NodeId> colluders,
                                       std::size_t f, Micros t, Micros dnet);

}  // namespace bercow
