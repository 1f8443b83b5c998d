#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "bercow/analysis.hpp"
#include "bercow/rng.hpp"

using namespace bercow;

namespace {

Rational integrate(std::vector<Rational> ats, const Rational& dnoise) {
  std::vector<std::size_t> order(ats.size());
  std::iota(order.begin(), order.end(), 0);
  return order_prob_integrate(ats, dnoise, order);
}

}  // namespace

TEST_CASE("rational parsing") {
  CHECK(parse_rational("0.2") == Rational(1, 5));
  CHECK(parse_rational("3/4") == Rational(3, 4));
  CHECK(parse_rational("1e-4") == Rational(1, 10000));
  CHECK(parse_rational("2.5E1") == Rational(25));
  CHECK_THROWS_AS(parse_rational("abc"), Error);
  CHECK_THROWS_AS(parse_rational("1/0"), Error);
}

TEST_CASE("pair epsilon") {
  CHECK(epsilon_pair(Rational(1)) == 1);
  CHECK(epsilon_pair(Rational(1, 5)) == Rational(9, 25));
  CHECK(to_double(epsilon_pair(Rational(1, 1'000'000))) < 3e-6);
  CHECK_THROWS_AS(epsilon_pair(Rational(0)), Error);
  CHECK_THROWS_AS(epsilon_pair(Rational(3, 2)), Error);
}

TEST_CASE("general epsilon and bounds") {
  CHECK(epsilon_general(3, Rational(1, 5)) == Rational(1192, 6000));
  CHECK(epsilon_general(2, Rational(1)) == 1);
  auto b = order_prob_bounds(3, Rational(1, 5));
  CHECK(b.lower == Rational(512, 6000));
  CHECK(b.upper == Rational(1704, 6000));
  CHECK(b.upper - b.lower == epsilon_general(3, Rational(1, 5)));
  auto one = order_prob_bounds(1, Rational(1, 5));
  CHECK(one.lower == 1);
  CHECK(one.upper == 1);
  auto tiny = order_prob_bounds(4, Rational(1, 1'000'000'000));
  CHECK(std::abs(to_double(tiny.lower) - 1.0 / 24) < 1e-9);
  CHECK(std::abs(to_double(tiny.upper) - 1.0 / 24) < 1e-9);
}

TEST_CASE("pair identity for random alpha") {
  Rng rng(8);
  for (int i = 0; i < 100; ++i) {
    Rational a(static_cast<long long>(1 + rng.below(999)), 1000);
    CHECK(epsilon_general(2, a) == epsilon_pair(a));
  }
}

TEST_CASE("monotonicity") {
  const std::vector<Rational> grid{Rational(1, 100), Rational(1, 10), Rational(1, 5), Rational(1, 2), Rational(9, 10)};
  for (unsigned n = 2; n <= 6; ++n) {
    for (std::size_t i = 1; i < grid.size(); ++i) CHECK(epsilon_general(n, grid[i]) > epsilon_general(n, grid[i - 1]));
  }
  // Unnormalized eps(n) = n! * epsilon_general grows with n.
  for (const auto& a : grid) {
    Rational fact = 1, prev = 0;
    for (unsigned n = 2; n <= 6; ++n) {
      fact *= n;
      Rational raw = epsilon_general(n, a) * fact;
      CHECK(raw > prev);
      prev = raw;
    }
  }
}

TEST_CASE("asymptotic ratio at small alpha") {
  Rational alpha(1, 10'000);
  for (unsigned n : {2u, 3u, 5u}) {
    Rational fact = 1;
    for (unsigned i = 2; i <= n; ++i) fact *= i;
    double ratio = to_double(epsilon_general(n, alpha) * fact / (2 * n * alpha));
    CHECK(ratio >= 0.99);
    CHECK(ratio <= 1.01);
  }
}

TEST_CASE("delta") {
  CHECK(delta_linearizability(300'000, 0) == 300'000);
  CHECK(delta_linearizability(300'000, 1'500'000) == 1'800'000);
}

TEST_CASE("integrator exact values") {
  for (auto alpha : {Rational(1, 10), Rational(1, 5), Rational(1, 2)}) {
    Rational dnoise = 1000;
    auto p = integrate({alpha * dnoise, 0}, dnoise);
    CHECK(p == Rational(1, 2) * (1 - alpha) * (1 - alpha));
  }
  CHECK(integrate({0, 0}, 7) == Rational(1, 2));
  CHECK(integrate({0, 0, 0}, 7) == Rational(1, 6));
  CHECK(integrate({0, 0, 0, 0}, 7) == Rational(1, 24));
  CHECK(integrate({0, 10}, 5) == 1);
  CHECK(integrate({10, 0}, 5) == 0);

  std::vector<Rational> five(5, Rational(0));
  std::vector<std::size_t> ord{0, 1, 2, 3, 4};
  CHECK_THROWS_AS(order_prob_integrate(five, 1, ord), Error);

  // All orders of three commands sum to one.
  std::vector<Rational> ats{Rational(3), Rational(1, 2), Rational(0)};
  std::vector<std::size_t> perm{0, 1, 2};
  Rational total = 0;
  do {
    total += order_prob_integrate(ats, 10, perm);
  } while (std::next_permutation(perm.begin(), perm.end()));
  CHECK(total == 1);
}

TEST_CASE("bound sandwich on random non-adaptive placements") {
  Rng rng(77);
  const Rational dnoise = 1000;
  for (auto alpha : {Rational(1, 10), Rational(1, 5), Rational(1, 2), Rational(9, 10)}) {
    const long long dnet = static_cast<long long>(alpha * dnoise);
    for (unsigned n = 2; n <= 4; ++n) {
      auto b = order_prob_bounds(n, alpha);
      for (int trial = 0; trial < (n == 4 ? 6 : 25); ++trial) {
        std::vector<Rational> ats;
        for (unsigned i = 0; i < n; ++i) ats.emplace_back(static_cast<long long>(rng.below(dnet + 1)));
        auto p = integrate(ats, dnoise);
        CHECK(p >= b.lower);
        CHECK(p <= b.upper);
      }
      // The lower-bound placement attains the lower bound exactly.
      std::vector<Rational> hostile(n, Rational(dnet));
      hostile.back() = 0;
      CHECK(integrate(hostile, dnoise) == b.lower);
    }
  }
}

TEST_CASE("Monte Carlo agrees with the integrator and with symmetry") {
  auto pair = order_prob_monte_carlo(AdversaryStrategy::pair(Favored::second), 2, Rational(1, 5), 100'000, 1);
  auto exact = to_double(integrate({Rational(200), 0}, 1000));
  CHECK(std::abs(pair.value - exact) <= 4 * pair.std_error);
  auto honest = order_prob_monte_carlo(AdversaryStrategy::honest(), 3, Rational(1, 5), 100'000, 2);
  CHECK(std::abs(honest.value - 1.0 / 6) <= 4 * honest.std_error);
  CHECK_THROWS_AS(order_prob_monte_carlo(AdversaryStrategy::honest(), 3, Rational(1, 5), 999, 2), Error);

  auto e = binomial_estimate(25, 100);
  CHECK(e.value == doctest::Approx(0.25));
  CHECK(e.std_error == doctest::Approx(std::sqrt(0.25 * 0.75 / 100)));
}

TEST_CASE("Monte Carlo is reproducible per seed") {
  auto a = order_prob_monte_carlo(AdversaryStrategy::upper(), 3, Rational(1, 2), 20'000, 9);
  auto b = order_prob_monte_carlo(AdversaryStrategy::upper(), 3, Rational(1, 2), 20'000, 9);
  CHECK(a.successes == b.successes);
}
