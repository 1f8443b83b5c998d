// Core vocabulary: invocations, timestamped commands, slots, ledgers and the
// point-system score.
#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "bercow/common.hpp"

namespace bercow {

/// Opaque hash-sized command identifier.
struct CommandId {
  std::array<std::uint8_t, 32> bytes{};

  /// Deterministic id for a human-readable label (e.g. "victim").
  static CommandId from_label(std::string_view label);

  std::string hex() const { return to_hex(bytes); }

  auto operator<=>(const CommandId&) const = default;
};

/// Relevant features of an invocation: its time plus any extra numeric
/// features (a transaction fee, say). Names are unique.
struct ScoreInput {
  Micros invocation_time = 0;
  std::vector<std::pair<std::string, double>> extra_features;

  bool operator==(const ScoreInput&) const = default;
};

struct Invocation {
  CommandId id;
  Bytes payload;
  Micros invoke_time = 0;
  ScoreInput features;

  /// Invocation whose only relevant feature is the send time.
  static Invocation at(std::string_view label, Micros invoke_time);
};

struct TimeOnly {};

struct LinearCombination {
  double time_weight = 1.0;
  std::vector<double> feature_weights;  // parallel to ScoreInput::extra_features
};

using ScoreFormula = std::variant<TimeOnly, LinearCombination>;

/// Score in microsecond-equivalent units. A pure function of `input`, which
/// is the precondition for impartial ordering.
std::int64_t score(const ScoreInput& input, const ScoreFormula& formula);

/// (f+1)-th smallest of a 2f+1 element list.
Micros median_timestamp(std::span<const Micros> timestamps);

struct NodeTimestamp {
  NodeId node = 0;
  Micros timestamp = 0;
};

struct TimestampedCommand {
  Invocation invocation;
  std::vector<NodeTimestamp> node_timestamps;  // exactly 2f+1 entries
  Micros assigned_ts = 0;
  Micros noise = 0;
  Micros modified_ts = 0;

  /// Validates the quorum size and computes the median.
  static TimestampedCommand assign(Invocation inv, std::vector<NodeTimestamp> quorum);

  /// Command whose assigned timestamp was fixed directly (interval model).
  static TimestampedCommand with_assigned(Invocation inv, Micros assigned_ts);

  /// Sets noise in [0, noise_bound) and the modified timestamp.
  void apply_noise(Micros noise_value, Micros noise_bound);
};

using TieSeed = std::array<std::uint8_t, 32>;

/// Order for commands whose modified timestamps coincide: compares
/// HASH(seed || command_id). Returns less when `a` goes first.
std::strong_ordering tie_break(const CommandId& a, const CommandId& b, const TieSeed& seed);

/// Full ledger order: modified timestamp, then tie_break.
bool ledger_before(const TimestampedCommand& a, const TimestampedCommand& b, const TieSeed& seed);

struct NodeSignature {
  NodeId node = 0;
  Digest tag{};
};

struct Slot {
  std::uint64_t index = 0;
  Micros interval_start = 0;
  Micros interval_end = 0;
  std::vector<TimestampedCommand> decided_commands;
  std::vector<NodeSignature> decision_certificate;
};

struct LedgerEntry {
  TimestampedCommand command;
  std::uint64_t slot = 0;        // slot containing assigned_ts
  std::uint64_t emitted_at = 0;  // slot whose decision made it stable
};

struct Ledger {
  std::vector<LedgerEntry> entries;
  Micros stable_watermark = 0;

  std::vector<CommandId> order() const;
  /// Index of `id` in the ledger, or -1.
  std::ptrdiff_t position(const CommandId& id) const;
  bool precedes(const CommandId& a, const CommandId& b) const;
};

}  // namespace bercow
