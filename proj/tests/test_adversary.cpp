#include <doctest.h>

#include <cmath>

#include "bercow/adversary.hpp"
#include "bercow/analysis.hpp"

using namespace bercow;

namespace {

bool within(const Estimate& e, double expected, double sigmas) {
  double se = std::sqrt(expected * (1 - expected) / static_cast<double>(e.trials));
  return std::abs(e.value - expected) <= sigmas * se + 1e-12;
}

}  // namespace

TEST_CASE("worst-case pair placement") {
  CHECK(assign_worst_case_pair(0, 300'000, Favored::second) == std::pair<Micros, Micros>{300'000, 0});
  CHECK(assign_worst_case_pair(0, 300'000, Favored::first) == std::pair<Micros, Micros>{0, 300'000});
  CHECK(assign_worst_case_pair(42, 0, Favored::second) == std::pair<Micros, Micros>{42, 42});
}

TEST_CASE("worst-case pair matches half (1 - alpha)^2") {
  auto est = order_prob_monte_carlo(AdversaryStrategy::pair(Favored::second), 2, Rational(1, 2), 200'000, 3);
  CHECK(within(est, 0.125, 4));
  CHECK(std::abs(est.value - 0.125) < 0.003);
  auto vacuous = order_prob_monte_carlo(AdversaryStrategy::pair(Favored::second), 2, Rational(1), 10'000, 3);
  CHECK(vacuous.value == 0.0);
}

TEST_CASE("adaptive permutation strategy") {
  auto zero = [](std::size_t, Micros) { return Micros{0}; };
  auto one = assign_worst_case_permutation(100, 50, 200, 1, zero);
  CHECK(one.assigned == std::vector<Micros>{100});
  CHECK_THROWS_AS(assign_worst_case_permutation(0, 300, 300, 2, zero), Error);

  // Small noise keeps the floor inside the window; assignments follow it.
  std::vector<Micros> draws{10, 20, 500, 7};
  auto res = assign_worst_case_permutation(0, 100, 1000, 4, [&](std::size_t i, Micros) { return draws[i]; });
  CHECK(res.assigned == std::vector<Micros>{0, 10, 30, 100});
  CHECK(res.modified == std::vector<Micros>{10, 30, 530, 107});

  // Once a modified timestamp leaves the window, the rest go to T + dnet.
  std::vector<Micros> big{150, 1, 1};
  auto sat = assign_worst_case_permutation(0, 100, 1000, 3, [&](std::size_t i, Micros) { return big[i]; });
  CHECK(sat.assigned == std::vector<Micros>{0, 100, 100});

  auto fixed = assign_worst_case_permutation(0, 100, 1000, 3, [&](std::size_t i, Micros) { return draws[i]; }, false);
  CHECK(fixed.assigned == std::vector<Micros>{0, 100, 100});
}

TEST_CASE("adaptive upper bound is reached") {
  for (unsigned n : {2u, 3u}) {
    auto est = order_prob_monte_carlo(AdversaryStrategy::upper(), n, Rational(1, 5), 200'000, 10 + n);
    CHECK(within(est, to_double(order_prob_bounds(n, Rational(1, 5)).upper), 4));
  }
  CHECK(to_double(order_prob_bounds(2, Rational(1, 5)).upper) == doctest::Approx(0.68));
  CHECK(to_double(order_prob_bounds(3, Rational(1, 5)).upper) == doctest::Approx(0.284));
}

TEST_CASE("lower-bound strategy") {
  CHECK(assign_lower_bound_strategy(0, 300, 3) == std::vector<Micros>{300, 300, 0});
  CHECK(assign_lower_bound_strategy(5, 0, 4) == std::vector<Micros>(4, 5));
  auto two = order_prob_monte_carlo(AdversaryStrategy::lower(), 2, Rational(1, 5), 200'000, 21);
  CHECK(within(two, 0.32, 4));
  auto three = order_prob_monte_carlo(AdversaryStrategy::lower(), 3, Rational(1, 5), 200'000, 22);
  CHECK(within(three, 0.512 / 6, 4));
  // With dnet = 0 every order is equally likely.
  auto flat = order_prob_monte_carlo(AdversaryStrategy::lower(), 3, Rational(0), 200'000, 23);
  CHECK(within(flat, 1.0 / 6, 4));
}

TEST_CASE("private relay placement") {
  Observation victim;
  for (NodeId i = 0; i < 7; ++i) victim.timestamps.push_back({i, 1000 + 10 * i});
  std::vector<NodeId> none;
  auto empty = private_relay_placement(victim, none, 2, 1000, 100);
  CHECK(empty.front_overrides.empty());
  CHECK(empty.back_overrides.empty());
  CHECK(empty.front_quorum == QuorumChoice::lowest);
  CHECK(empty.back_quorum == QuorumChoice::lowest);

  std::vector<NodeId> two{0, 6};
  auto p = private_relay_placement(victim, two, 2, 1000, 100);
  CHECK(p.front_overrides.at(0) == 1000);  // clamped to T
  CHECK(p.back_overrides.at(0) == 1001);
  CHECK(p.front_overrides.at(6) == 1059);
  CHECK(p.back_overrides.at(6) == 1061);
  for (const auto& [node, ts] : p.back_overrides) {
    CHECK(ts >= 1000);
    CHECK(ts <= 1100);
  }
  std::vector<NodeId> three{0, 1, 2};
  CHECK_THROWS_AS(private_relay_placement(victim, three, 2, 1000, 100), Error);
}
