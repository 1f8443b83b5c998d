#include "bercow/consensus_sim.hpp"

#include <algorithm>
#include <numeric>

#include "bercow/crypto.hpp"

namespace bercow {

OrderingPolicy OrderingPolicy::bercow(Micros dnoise) {
  if (dnoise <= 0) fail(ErrorCategory::config, "bercow noise bound must be positive");
  return {PolicyKind::bercow_noise, dnoise, 0};
}

OrderingPolicy OrderingPolicy::leader(Micros rotation_period) {
  if (rotation_period <= 0) fail(ErrorCategory::config, "rotation period must be positive");
  return {PolicyKind::leader_rotation, 0, rotation_period};
}

std::string OrderingPolicy::name() const {
  switch (kind) {
    case PolicyKind::pompe_median: return "pompe";
    case PolicyKind::bercow_noise: return "bercow";
    case PolicyKind::leader_rotation: return "leader";
    case PolicyKind::receive_order_all_correct: return "receive";
  }
  return "unknown";
}

std::uint64_t SlotSchedule::slot_of(Micros ts) const {
  require(slot_interval > 0, "slot interval must be positive");
  if (ts < epoch_start) {
    fail(ErrorCategory::config, "assigned timestamp " + std::to_string(ts) +
                                    " precedes the first slot at " + std::to_string(epoch_start));
  }
  return static_cast<std::uint64_t>((ts - epoch_start) / slot_interval);
}

Micros slot_noise(const sro::RandomValue& slot_seed, const CommandId& id, Micros dnoise) {
  if (dnoise <= 0) return 0;
  auto prf = hmac_sha512(slot_seed, id.bytes);
  unsigned __int128 scaled = static_cast<unsigned __int128>(load_u64_be(prf)) *
                             static_cast<std::uint64_t>(dnoise);
  return static_cast<Micros>(scaled >> 64);
}

TieSeed tie_seed(const sro::RandomValue& slot_seed) {
  auto d = HashInput("bercow.tie-seed").add(slot_seed).digest();
  TieSeed seed{};
  std::copy_n(d.begin(), seed.size(), seed.begin());
  return seed;
}

Observation collect_timestamps(const LatencyModel& network, const Submission& sub, Rng& rng) {
  auto obs = network.observe(sub.invocation, sub.origin_city, rng);
  for (const auto& [node, ts] : sub.overrides) {
    require(node < obs.timestamps.size(), "override for unknown node " + std::to_string(node));
    obs.timestamps[node].timestamp = ts;
  }
  return obs;
}

std::vector<NodeTimestamp> choose_quorum(std::vector<NodeTimestamp> all, std::size_t f,
                                         QuorumChoice choice) {
  const std::size_t size = 2 * f + 1;
  require(all.size() >= size, "fewer timestamps than a 2f+1 quorum");
  std::stable_sort(all.begin(), all.end(), [&](const NodeTimestamp& a, const NodeTimestamp& b) {
    return choice == QuorumChoice::lowest ? a.timestamp < b.timestamp : a.timestamp > b.timestamp;
  });
  all.resize(size);
  return all;
}

SlottedResult decide_slots(std::vector<TimestampedCommand> commands, const OrderingPolicy& policy,
                           const SlotSchedule& schedule, const sro::SroHandle& sro,
                           std::span<const NodeId> faulty_share_nodes, const SlotObserver& observer) {
  require(policy.kind == PolicyKind::pompe_median || policy.kind == PolicyKind::bercow_noise,
          "decide_slots handles the median-based policies only");
  SlottedResult result;
  if (commands.empty()) return result;

  std::stable_sort(commands.begin(), commands.end(),
                   [](const auto& a, const auto& b) { return a.assigned_ts < b.assigned_ts; });
  std::uint64_t k = schedule.slot_of(commands.front().assigned_ts);
  const Micros dnoise = policy.kind == PolicyKind::bercow_noise ? policy.dnoise : 0;

  std::size_t next = 0;  // first command not yet assigned to a slot
  std::vector<LedgerEntry> pending;
  std::size_t emitted = 0;
  while (emitted < commands.size()) {
    Slot slot;
    slot.index = k;
    slot.interval_start = schedule.start(k);
    slot.interval_end = schedule.end(k);
    while (next < commands.size() && commands[next].assigned_ts < slot.interval_end) {
      slot.decided_commands.push_back(commands[next++]);
    }
    // The seed is revealed only once the slot's certificate exists.
    slot.decision_certificate = sro.quorum_certificate(k);
    auto seed = sro.reveal({k, slot.decision_certificate}, faulty_share_nodes);

    for (auto& cmd : slot.decided_commands) {
      cmd.apply_noise(slot_noise(seed, cmd.invocation.id, dnoise), dnoise);
      pending.push_back({cmd, k, 0});
    }
    auto stable = std::stable_partition(pending.begin(), pending.end(), [&](const LedgerEntry& e) {
      return e.command.modified_ts < slot.interval_end;
    });
    std::vector<LedgerEntry> batch(pending.begin(), stable);
    pending.erase(pending.begin(), stable);
    auto ts = tie_seed(seed);
    std::sort(batch.begin(), batch.end(), [&](const LedgerEntry& a, const LedgerEntry& b) {
      return ledger_before(a.command, b.command, ts);
    });
    for (auto& e : batch) {
      e.emitted_at = k;
      result.ledger.entries.push_back(std::move(e));
    }
    emitted += batch.size();
    result.ledger.stable_watermark = slot.interval_end;
    result.slots.push_back(std::move(slot));
    if (observer) observer(result.slots.back(), result.ledger);
    ++k;
  }
  return result;
}

SlottedResult run_slotted(const SimulationRun& sim) {
  require(sim.network != nullptr && sim.sro != nullptr, "simulation needs a network and an SRO");
  require(!sim.submissions.empty(), "simulation needs at least one invocation");
  const std::size_t n = sim.network->node_count();
  require(n >= 3 * sim.f + 1, "simulation needs n >= 3f+1");
  require(sim.sro->config().n == n && sim.sro->config().f == sim.f,
          "SRO configured for a different (n, f)");

  std::vector<TimestampedCommand> commands;
  std::size_t clamped = 0;
  for (std::size_t i = 0; i < sim.submissions.size(); ++i) {
    const auto& sub = sim.submissions[i];
    auto rng = Rng::derive(sim.rng_seed, "observe", i);
    auto obs = collect_timestamps(*sim.network, sub, rng);
    clamped += obs.clamped;
    commands.push_back(TimestampedCommand::assign(
        sub.invocation, choose_quorum(std::move(obs.timestamps), sim.f, sub.quorum)));
  }
  auto result = decide_slots(std::move(commands), sim.policy, sim.schedule, *sim.sro,
                             sim.faulty_share_nodes);
  result.clamped = clamped;
  return result;
}

namespace {

std::vector<Observation> receive_matrix(std::span<const Submission> subs, const LatencyModel& net,
                                        Rng& rng) {
  std::vector<Observation> out;
  out.reserve(subs.size());
  for (const auto& sub : subs) out.push_back(net.observe(sub.invocation, sub.origin_city, rng));
  return out;
}

}  // namespace

Ledger order_leader_rotation(std::span<const Submission> submissions, const LatencyModel& network,
                             Micros rotation_period, Rng& rng, const BatchHook& hook) {
  require(rotation_period > 0, "rotation period must be positive");
  Ledger ledger;
  if (submissions.empty()) return ledger;
  const auto n = static_cast<Micros>(network.node_count());
  const Micros phase = static_cast<Micros>(rng.below(static_cast<std::uint64_t>(n * rotation_period)));
  const TieSeed seed = rng.bytes32();
  auto recv = receive_matrix(submissions, network, rng);

  Micros first = submissions.front().invocation.invoke_time;
  for (const auto& s : submissions) first = std::min(first, s.invocation.invoke_time);
  Micros term = (first + phase) / rotation_period;

  std::vector<bool> done(submissions.size(), false);
  std::size_t emitted = 0;
  while (emitted < submissions.size()) {
    auto leader = static_cast<NodeId>(term % n);
    Micros term_end = (term + 1) * rotation_period - phase;
    std::vector<LedgerEntry> batch;
    for (std::size_t i = 0; i < submissions.size(); ++i) {
      Micros t = recv[i].timestamps[leader].timestamp;
      if (!done[i] && t < term_end) {
        done[i] = true;
        batch.push_back({TimestampedCommand::with_assigned(submissions[i].invocation, t),
                         static_cast<std::uint64_t>(term), static_cast<std::uint64_t>(term)});
      }
    }
    std::sort(batch.begin(), batch.end(), [&](const LedgerEntry& a, const LedgerEntry& b) {
      return ledger_before(a.command, b.command, seed);
    });
    if (hook && !batch.empty()) hook(leader, batch);
    emitted += batch.size();
    for (auto& e : batch) ledger.entries.push_back(std::move(e));
    ledger.stable_watermark = term_end;
    ++term;
  }
  return ledger;
}

Ledger order_receive_all_correct(std::span<const Submission> submissions, const LatencyModel& network,
                                 Rng& rng, std::span<const NodeId> faulty) {
  Ledger ledger;
  const TieSeed seed = rng.bytes32();
  auto recv = receive_matrix(submissions, network, rng);
  std::vector<NodeId> correct;
  for (NodeId node = 0; node < network.node_count(); ++node) {
    if (std::find(faulty.begin(), faulty.end(), node) == faulty.end()) correct.push_back(node);
  }
  require(!correct.empty(), "no correct nodes");

  const std::size_t m = submissions.size();
  std::vector<Micros> median(m);
  for (std::size_t i = 0; i < m; ++i) {
    std::vector<Micros> times;
    for (auto node : correct) times.push_back(recv[i].timestamps[node].timestamp);
    std::sort(times.begin(), times.end());
    median[i] = times[(times.size() - 1) / 2];
  }
  auto precedes = [&](std::size_t i, std::size_t j) {
    return std::all_of(correct.begin(), correct.end(), [&](NodeId node) {
      return recv[i].timestamps[node].timestamp < recv[j].timestamps[node].timestamp;
    });
  };
  std::vector<std::size_t> indegree(m, 0);
  std::vector<std::vector<std::size_t>> successors(m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (i != j && precedes(i, j)) {
        successors[i].push_back(j);
        ++indegree[j];
      }
    }
  }
  std::vector<TimestampedCommand> cmds;
  for (std::size_t i = 0; i < m; ++i) {
    cmds.push_back(TimestampedCommand::with_assigned(submissions[i].invocation, median[i]));
  }
  std::vector<bool> done(m, false);
  for (std::size_t step = 0; step < m; ++step) {
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < m; ++i) {
      if (done[i] || indegree[i] != 0) continue;
      if (!best || ledger_before(cmds[i], cmds[*best], seed)) best = i;
    }
    require(best.has_value(), "receive-order precedence relation has a cycle");
    done[*best] = true;
    for (auto j : successors[*best]) --indegree[j];
    ledger.entries.push_back({cmds[*best], 0, 0});
  }
  return ledger;
}

std::size_t linearizability_violations(const Ledger& ledger, Micros delta) {
  std::size_t violations = 0;
  const auto& e = ledger.entries;
  for (std::size_t i = 0; i < e.size(); ++i) {
    for (std::size_t j = i + 1; j < e.size(); ++j) {
      // e[i] is ordered first; a violation is e[j] sent more than delta earlier.
      if (e[i].command.invocation.invoke_time - e[j].command.invocation.invoke_time > delta) {
        ++violations;
      }
    }
  }
  return violations;
}

}  // namespace bercow
