#include <doctest.h>

#include "bercow/attacks.hpp"
#include "bercow/rng.hpp"

using namespace bercow;

namespace {

SandwichOrder ord(SandwichCmd a, SandwichCmd b, SandwichCmd c) { return {a, b, c}; }

constexpr auto V = SandwichCmd::victim_buy;
constexpr auto B = SandwichCmd::attacker_buy;
constexpr auto S = SandwichCmd::attacker_sell;

}  // namespace

TEST_CASE("constant-product swaps") {
  AmmPool pool(75, 24);
  auto first = swap_buy_a(pool, 15);
  CHECK(first.pool.reserve_a == 60);
  CHECK(first.pool.reserve_b == 30);
  CHECK(first.amount_b == 6);
  auto second = swap_buy_a(first.pool, 15);
  CHECK(second.pool.reserve_a == 45);
  CHECK(second.pool.reserve_b == 40);
  CHECK(second.amount_b == 10);
  auto none = swap_buy_a(pool, 0);
  CHECK(none.amount_b == 0);
  CHECK(none.pool.reserve_a == 75);
  CHECK_THROWS_AS(swap_buy_a(pool, 75), Error);
  CHECK_THROWS_AS(swap_buy_a(pool, -1), Error);
  CHECK_THROWS_AS(AmmPool(0, 5), Error);
}

TEST_CASE("invariant and round trip under random swap sequences") {
  Rng rng(4);
  for (int t = 0; t < 200; ++t) {
    AmmPool pool(Rational(static_cast<long long>(50 + rng.below(100))), Rational(static_cast<long long>(10 + rng.below(50))));
    const auto k = pool.k_const();
    Rational x(static_cast<long long>(1 + rng.below(40)), static_cast<long long>(1 + rng.below(7)));
    auto bought = swap_buy_a(pool, x);
    CHECK(bought.pool.k_const() == k);
    auto sold = swap_sell_a(bought.pool, x);
    CHECK(sold.pool.k_const() == k);
    CHECK(sold.pool.reserve_a == pool.reserve_a);
    CHECK(sold.pool.reserve_b == pool.reserve_b);
    CHECK(sold.amount_b == bought.amount_b);
  }
}

TEST_CASE("payoff table for every order") {
  SandwichScenario sc;
  CHECK(all_sandwich_orders().size() == 6);
  for (const auto& o : all_sandwich_orders()) {
    auto p = sandwich_profits(sc, o);
    if (o == ord(B, V, S)) {
      CHECK(p.victim_usd == -500);
      CHECK(p.attacker_usd == 800);
    } else if (o == ord(S, V, B)) {
      CHECK(p.victim_usd == 700);
      CHECK(p.attacker_usd == -400);
    } else {
      CHECK(p.victim_usd == 300);
      CHECK(p.attacker_usd == 0);
    }
  }
  CHECK(order_label(ord(B, V, S)) == "i2,i1,i3");
  CHECK(order_label(ord(S, V, B)) == "i3,i1,i2");
}

TEST_CASE("expected attacker profit") {
  SandwichScenario sc;
  std::map<SandwichOrder, double> point{{ord(B, V, S), 1.0}};
  CHECK(expected_attacker_profit(sc, point) == doctest::Approx(800));
  std::map<SandwichOrder, double> uniform;
  for (const auto& o : all_sandwich_orders()) uniform[o] = 1.0 / 6;
  CHECK(expected_attacker_profit(sc, uniform) == doctest::Approx(400.0 / 6));
  std::map<SandwichOrder, double> extreme{{ord(B, V, S), 0.284}, {ord(S, V, B), 0.512 / 6},
                                          {ord(V, B, S), 1 - 0.284 - 0.512 / 6}};
  CHECK(expected_attacker_profit(sc, extreme) == doctest::Approx(0.284 * 800 - 0.512 / 6 * 400));
  std::map<SandwichOrder, double> broken{{ord(B, V, S), 0.5}};
  CHECK_THROWS_AS(expected_attacker_profit(sc, broken), Error);
}

TEST_CASE("liquidation values and formatting") {
  std::vector<double> p{0.75, 0.25};
  auto v = liquidation_expected_values(p, 200'000);
  CHECK(v[0] == doctest::Approx(150'000));
  CHECK(v[1] == doctest::Approx(50'000));
  std::vector<double> fair{0.5, 0.5};
  auto w = liquidation_expected_values(fair, 200'000);
  CHECK(w[0] == doctest::Approx(100'000));
  CHECK(format_usd(Rational(-1, 3)) == "-0.33");
  CHECK(format_usd(Rational(800)) == "800.00");
}
