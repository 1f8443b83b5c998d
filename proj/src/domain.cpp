#include "bercow/domain.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "bercow/crypto.hpp"

namespace bercow {

CommandId CommandId::from_label(std::string_view label) {
  auto d = HashInput("bercow.command-id").add(label).digest();
  CommandId id;
  std::copy_n(d.begin(), id.bytes.size(), id.bytes.begin());
  return id;
}

Invocation Invocation::at(std::string_view label, Micros invoke_time) {
  require(invoke_time >= 0, "invoke_time must be non-negative");
  Invocation inv;
  inv.id = CommandId::from_label(label);
  inv.payload.assign(label.begin(), label.end());
  inv.invoke_time = invoke_time;
  inv.features.invocation_time = invoke_time;
  return inv;
}

namespace {

void check_feature_names(const ScoreInput& input) {
  std::set<std::string_view> names;
  for (const auto& [name, value] : input.extra_features) {
    require(names.insert(name).second, "duplicate score feature: " + name);
  }
}

}  // namespace

std::int64_t score(const ScoreInput& input, const ScoreFormula& formula) {
  check_feature_names(input);
  if (std::holds_alternative<TimeOnly>(formula)) return input.invocation_time;

  const auto& lin = std::get<LinearCombination>(formula);
  require(lin.feature_weights.size() == input.extra_features.size(),
          "weight count does not match feature count");
  double total = lin.time_weight * static_cast<double>(input.invocation_time);
  for (std::size_t i = 0; i < lin.feature_weights.size(); ++i) {
    total += lin.feature_weights[i] * input.extra_features[i].second;
  }
  return std::llround(total);
}

Micros median_timestamp(std::span<const Micros> timestamps) {
  require(!timestamps.empty() && timestamps.size() % 2 == 1,
          "median needs an odd number (2f+1) of timestamps");
  std::vector<Micros> sorted(timestamps.begin(), timestamps.end());
  auto mid = sorted.begin() + static_cast<std::ptrdiff_t>(sorted.size() / 2);
  std::nth_element(sorted.begin(), mid, sorted.end());
  return *mid;
}

TimestampedCommand TimestampedCommand::assign(Invocation inv, std::vector<NodeTimestamp> quorum) {
  std::vector<Micros> values;
  values.reserve(quorum.size());
  std::set<NodeId> seen;
  for (const auto& nt : quorum) {
    require(seen.insert(nt.node).second, "duplicate node in timestamp quorum");
    values.push_back(nt.timestamp);
  }
  TimestampedCommand cmd;
  cmd.assigned_ts = median_timestamp(values);
  cmd.modified_ts = cmd.assigned_ts;
  cmd.invocation = std::move(inv);
  cmd.node_timestamps = std::move(quorum);
  return cmd;
}

TimestampedCommand TimestampedCommand::with_assigned(Invocation inv, Micros assigned_ts) {
  TimestampedCommand cmd;
  cmd.invocation = std::move(inv);
  cmd.assigned_ts = assigned_ts;
  cmd.modified_ts = assigned_ts;
  return cmd;
}

void TimestampedCommand::apply_noise(Micros noise_value, Micros noise_bound) {
  require(noise_value >= 0 && (noise_value < noise_bound || (noise_bound == 0 && noise_value == 0)),
          "noise outside [0, noise_bound)");
  constexpr Micros kMax = (Micros{1} << 62);
  require(assigned_ts < kMax && noise_value < kMax, "timestamp exceeds 63-bit range");
  noise = noise_value;
  modified_ts = assigned_ts + noise_value;
}

std::strong_ordering tie_break(const CommandId& a, const CommandId& b, const TieSeed& seed) {
  if (a == b) return std::strong_ordering::equal;
  auto ha = HashInput("bercow.tie").add(seed).add(a.bytes).digest();
  auto hb = HashInput("bercow.tie").add(seed).add(b.bytes).digest();
  auto c = ha <=> hb;
  if (c != 0) return c;
  return a <=> b;
}

bool ledger_before(const TimestampedCommand& a, const TimestampedCommand& b, const TieSeed& seed) {
  if (a.modified_ts != b.modified_ts) return a.modified_ts < b.modified_ts;
  return tie_break(a.invocation.id, b.invocation.id, seed) < 0;
}

std::vector<CommandId> Ledger::order() const {
  std::vector<CommandId> ids;
  ids.reserve(entries.size());
  for (const auto& e : entries) ids.push_back(e.command.invocation.id);
  return ids;
}

std::ptrdiff_t Ledger::position(const CommandId& id) const {
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (entries[i].command.invocation.id == id) return static_cast<std::ptrdiff_t>(i);
  }
  return -1;
}

bool Ledger::precedes(const CommandId& a, const CommandId& b) const {
  auto pa = position(a);
  auto pb = position(b);
  require(pa >= 0 && pb >= 0, "command not in ledger");
  return pa < pb;
}

}  // namespace bercow
