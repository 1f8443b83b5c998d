// Idealized slotted agreement and the ordering policies built on it:
// median timestamps (Pompe), median plus oracle noise (Bercow), and two
// baselines (rotating leader, receive order over all correct nodes).
#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bercow/domain.hpp"
#include "bercow/netmodel.hpp"
#include "bercow/sro.hpp"

namespace bercow {

enum class PolicyKind { pompe_median, bercow_noise, leader_rotation, receive_order_all_correct };

struct OrderingPolicy {
  PolicyKind kind = PolicyKind::pompe_median;
  Micros dnoise = 0;           // bercow_noise only
  Micros rotation_period = 0;  // leader_rotation only

  static OrderingPolicy pompe() { return {PolicyKind::pompe_median, 0, 0}; }
  static OrderingPolicy bercow(Micros dnoise);
  static OrderingPolicy leader(Micros rotation_period);
  static OrderingPolicy receive() { return {PolicyKind::receive_order_all_correct, 0, 0}; }

  std::string name() const;
};

/// Which 2f+1 node timestamps the client hands in. Honest clients use the
/// first responses, i.e. the lowest timestamps.
enum class QuorumChoice { lowest, highest };

struct Submission {
  Invocation invocation;
  std::string origin_city;
  std::map<NodeId, Micros> overrides;  // timestamps reported by colluding nodes
  QuorumChoice quorum = QuorumChoice::lowest;
};

constexpr Micros kDefaultSlotInterval = 1'500'000;

struct SlotSchedule {
  Micros slot_interval = kDefaultSlotInterval;
  Micros epoch_start = 0;

  std::uint64_t slot_of(Micros ts) const;
  Micros start(std::uint64_t k) const { return epoch_start + static_cast<Micros>(k) * slot_interval; }
  Micros end(std::uint64_t k) const { return start(k) + slot_interval; }
};

struct SimulationRun {
  const LatencyModel* network = nullptr;
  OrderingPolicy policy;
  SlotSchedule schedule;
  std::size_t f = 0;
  std::vector<Submission> submissions;
  const sro::SroHandle* sro = nullptr;
  std::uint64_t rng_seed = 0;
  std::vector<NodeId> faulty_share_nodes;  // passed through to reveal
};

struct SlottedResult {
  Ledger ledger;
  std::vector<Slot> slots;
  std::size_t clamped = 0;  // raw network timestamps outside [T, T + dnet]
};

/// Fault bound for n nodes: the largest f with 3f+1 <= n.
inline std::size_t max_faults(std::size_t n) { return n == 0 ? 0 : (n - 1) / 3; }

/// Noise in [0, dnoise) for a command: 64 bits of HMAC(slot seed, id),
/// scaled by multiply-and-shift.
Micros slot_noise(const sro::RandomValue& slot_seed, const CommandId& id, Micros dnoise);

/// Tie-break seed derived from a revealed slot value.
TieSeed tie_seed(const sro::RandomValue& slot_seed);

/// Per-node timestamps for a submission, with overrides applied.
Observation collect_timestamps(const LatencyModel& network, const Submission& sub, Rng& rng);

/// The 2f+1 timestamps chosen per `choice` (ties by node id).
std::vector<NodeTimestamp> choose_quorum(std::vector<NodeTimestamp> all, std::size_t f,
                                         QuorumChoice choice);

using SlotObserver = std::function<void(const Slot&, const Ledger&)>;

/// Decides slots in order for commands whose assigned timestamps are known.
/// Each slot is certified by n-f signatures before its seed is revealed;
/// bercow noise uses the seed of the slot holding the assigned timestamp;
/// after slot k decides, every pending command with modified_ts < end(k)
/// becomes stable and is appended in (modified_ts, tie_break) order.
SlottedResult decide_slots(std::vector<TimestampedCommand> commands, const OrderingPolicy& policy,
                           const SlotSchedule& schedule, const sro::SroHandle& sro,
                           std::span<const NodeId> faulty_share_nodes = {},
                           const SlotObserver& observer = {});

/// Full pipeline for pompe_median and bercow_noise.
SlottedResult run_slotted(const SimulationRun& sim);

/// Lets a (colluding) leader rearrange the batch it proposes.
using BatchHook = std::function<void(NodeId leader, std::vector<LedgerEntry>& batch)>;

/// Rotating leader: node ((t + phase) / period) mod n leads at time t, with
/// phase drawn from `rng`. Each leader appends, in its own receive order,
/// every pending command it has received before its term ends.
Ledger order_leader_rotation(std::span<const Submission> submissions, const LatencyModel& network,
                             Micros rotation_period, Rng& rng, const BatchHook& hook = {});

/// Precedence i -> j when every correct node receives i before j; emits a
/// topological order, ties by median correct receive time then tie_break.
Ledger order_receive_all_correct(std::span<const Submission> submissions, const LatencyModel& network,
                                 Rng& rng, std::span<const NodeId> faulty = {});

/// Pairs (earlier, later) with invoke-time gap > delta that the ledger inverts.
std::size_t linearizability_violations(const Ledger& ledger, Micros delta);

}  // namespace bercow
