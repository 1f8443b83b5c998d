#include <doctest.h>

#include <algorithm>

#include "bercow/domain.hpp"
#include "bercow/rng.hpp"

using namespace bercow;

TEST_CASE("median of small lists") {
  std::vector<Micros> a{5, 1, 9};
  CHECK(median_timestamp(a) == 5);
  std::vector<Micros> b(5, 42);
  CHECK(median_timestamp(b) == 42);
  std::vector<Micros> even{1, 2};
  CHECK_THROWS_AS(median_timestamp(even), Error);
  CHECK_THROWS_AS(median_timestamp(std::vector<Micros>{}), Error);
}

TEST_CASE("median with two adversarial entries stays between correct values") {
  const std::vector<Micros> correct{100, 110, 120};
  const std::vector<Micros> extremes{-1'000'000'000, 1'000'000'000, 95, 105, 115, 125};
  for (auto x : extremes) {
    for (auto y : extremes) {
      std::vector<Micros> ts = correct;
      ts.push_back(x);
      ts.push_back(y);
      auto m = median_timestamp(ts);
      CHECK(m >= 100);
      CHECK(m <= 120);
    }
  }
}

// Every placement of up to f adversarial entries, drawn from a value set that
// brackets and interleaves the correct ones, for 2f+1 <= 7.
TEST_CASE("median is bounded by correct entries, exhaustive for n <= 7") {
  const std::vector<Micros> values{-1000, 0, 5, 10, 15, 20, 25, 1000};
  for (std::size_t f = 0; f <= 3; ++f) {
    const std::size_t len = 2 * f + 1;
    for (std::size_t bad = 0; bad <= f; ++bad) {
      const std::size_t good = len - bad;
      std::size_t combos = 1;
      for (std::size_t i = 0; i < len; ++i) combos *= values.size();
      for (std::size_t code = 0; code < combos; ++code) {
        std::vector<Micros> ts;
        std::size_t c = code;
        for (std::size_t i = 0; i < len; ++i, c /= values.size()) ts.push_back(values[c % values.size()]);
        auto lo = *std::min_element(ts.begin(), ts.begin() + good);
        auto hi = *std::max_element(ts.begin(), ts.begin() + good);
        auto m = median_timestamp(ts);
        REQUIRE(m >= lo);
        REQUIRE(m <= hi);
        std::reverse(ts.begin(), ts.end());
        REQUIRE(median_timestamp(ts) == m);
      }
    }
  }
}

TEST_CASE("score formulas") {
  ScoreInput in{1000, {}};
  CHECK(score(in, TimeOnly{}) == 1000);
  ScoreInput fee{1000, {{"fee", 5}}};
  CHECK(score(fee, LinearCombination{1, {-10}}) == 950);
  CHECK_THROWS_AS(score(fee, LinearCombination{1, {}}), Error);
  ScoreInput dup{1000, {{"fee", 5}, {"fee", 6}}};
  CHECK_THROWS_AS(score(dup, LinearCombination{1, {1, 1}}), Error);

  auto a = Invocation::at("alpha", 777);
  auto b = Invocation::at("beta", 777);
  CHECK(a.id != b.id);
  CHECK(score(a.features, TimeOnly{}) == score(b.features, TimeOnly{}));
}

TEST_CASE("tie break is deterministic, antisymmetric and fair") {
  TieSeed seed{};
  auto a = CommandId::from_label("a");
  auto b = CommandId::from_label("b");
  CHECK(tie_break(a, a, seed) == std::strong_ordering::equal);
  auto first = tie_break(a, b, seed);
  for (int i = 0; i < 5; ++i) CHECK(tie_break(a, b, seed) == first);
  CHECK(tie_break(b, a, seed) == (first == std::strong_ordering::less ? std::strong_ordering::greater
                                                                      : std::strong_ordering::less));

  Rng rng(99);
  int wins = 0;
  const int trials = 10'000;
  for (int i = 0; i < trials; ++i) {
    CommandId x{rng.bytes32()}, y{rng.bytes32()};
    if (tie_break(x, y, rng.bytes32()) == std::strong_ordering::less) ++wins;
  }
  CHECK(std::abs(wins / double(trials) - 0.5) <= 0.02);
}

TEST_CASE("timestamped command invariants") {
  std::vector<NodeTimestamp> q{{0, 30}, {1, 10}, {2, 20}};
  auto cmd = TimestampedCommand::assign(Invocation::at("c", 0), q);
  CHECK(cmd.assigned_ts == 20);
  cmd.apply_noise(7, 10);
  CHECK(cmd.modified_ts == 27);
  CHECK_THROWS_AS(cmd.apply_noise(10, 10), Error);
  CHECK_THROWS_AS(cmd.apply_noise(-1, 10), Error);
  std::vector<NodeTimestamp> dup{{0, 30}, {0, 10}, {2, 20}};
  CHECK_THROWS_AS(TimestampedCommand::assign(Invocation::at("c", 0), dup), Error);
}

TEST_CASE("ledger order is a strict total order on sampled triples") {
  Rng rng(5);
  TieSeed seed = rng.bytes32();
  std::vector<TimestampedCommand> cmds;
  for (int i = 0; i < 60; ++i) {
    auto c = TimestampedCommand::with_assigned(Invocation::at("x" + std::to_string(i), 0),
                                               static_cast<Micros>(rng.below(5)));
    c.apply_noise(static_cast<Micros>(rng.below(3)), 3);
    cmds.push_back(c);
  }
  for (int s = 0; s < 5000; ++s) {
    const auto& a = cmds[rng.below(cmds.size())];
    const auto& b = cmds[rng.below(cmds.size())];
    const auto& c = cmds[rng.below(cmds.size())];
    CHECK_FALSE(ledger_before(a, a, seed));
    if (a.invocation.id != b.invocation.id) CHECK(ledger_before(a, b, seed) != ledger_before(b, a, seed));
    if (ledger_before(a, b, seed) && ledger_before(b, c, seed)) CHECK(ledger_before(a, c, seed));
  }
}

TEST_CASE("ledger lookups") {
  Ledger l;
  for (auto label : {"p", "q", "r"}) {
    LedgerEntry e;
    e.command = TimestampedCommand::with_assigned(Invocation::at(label, 0), 0);
    l.entries.push_back(e);
  }
  auto p = CommandId::from_label("p"), r = CommandId::from_label("r");
  CHECK(l.position(r) == 2);
  CHECK(l.position(CommandId::from_label("zz")) == -1);
  CHECK(l.precedes(p, r));
  CHECK_FALSE(l.precedes(r, p));
  CHECK(l.order().size() == 3);
}
