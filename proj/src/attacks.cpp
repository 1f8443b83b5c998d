#include "bercow/attacks.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

namespace bercow {

AmmPool::AmmPool(Rational a, Rational b) : reserve_a(std::move(a)), reserve_b(std::move(b)) {
  require(reserve_a > 0 && reserve_b > 0, "pool reserves must be positive");
}

SwapResult swap_buy_a(const AmmPool& pool, const Rational& amount_a) {
  require(amount_a >= 0, "swap amount must be non-negative");
  if (amount_a >= pool.reserve_a) fail(ErrorCategory::contract, "swap would drain the pool");
  Rational new_a = pool.reserve_a - amount_a;
  Rational new_b = pool.k_const() / new_a;
  Rational cost = new_b - pool.reserve_b;
  return {AmmPool(new_a, new_b), cost};
}

SwapResult swap_sell_a(const AmmPool& pool, const Rational& amount_a) {
  require(amount_a >= 0, "swap amount must be non-negative");
  Rational new_a = pool.reserve_a + amount_a;
  Rational new_b = pool.k_const() / new_a;
  Rational proceeds = pool.reserve_b - new_b;
  return {AmmPool(new_a, new_b), proceeds};
}

std::vector<SandwichOrder> all_sandwich_orders() {
  SandwichOrder order{SandwichCmd::victim_buy, SandwichCmd::attacker_buy, SandwichCmd::attacker_sell};
  std::vector<SandwichOrder> out;
  do {
    out.push_back(order);
  } while (std::next_permutation(order.begin(), order.end()));
  return out;
}

std::string order_label(const SandwichOrder& order) {
  std::string s;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (i) s += ',';
    s += "i" + std::to_string(static_cast<int>(order[i]) + 1);
  }
  return s;
}

Profits sandwich_profits(const SandwichScenario& sc, const SandwichOrder& order) {
  SandwichOrder sorted = order;
  std::sort(sorted.begin(), sorted.end());
  require(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end(),
          "order must be a permutation of the three commands");
  if (sc.victim_buy_a >= sc.pool.reserve_a || sc.attacker_buy_a >= sc.pool.reserve_a) {
    fail(ErrorCategory::contract, "swap amounts must be below reserve_a");
  }
  AmmPool pool = sc.pool;
  Rational victim_b_paid = 0;
  Rational attacker_b_flow = 0;
  for (auto cmd : order) {
    switch (cmd) {
      case SandwichCmd::victim_buy: {
        auto r = swap_buy_a(pool, sc.victim_buy_a);
        pool = r.pool;
        victim_b_paid += r.amount_b;
        break;
      }
      case SandwichCmd::attacker_buy: {
        auto r = swap_buy_a(pool, sc.attacker_buy_a);
        pool = r.pool;
        attacker_b_flow -= r.amount_b;
        break;
      }
      case SandwichCmd::attacker_sell: {
        auto r = swap_sell_a(pool, sc.attacker_buy_a);
        pool = r.pool;
        attacker_b_flow += r.amount_b;
        break;
      }
    }
  }
  // The attacker's A position nets to zero: it buys and sells the same amount.
  return {sc.victim_buy_a * sc.price_a - victim_b_paid * sc.price_b, attacker_b_flow * sc.price_b};
}

double expected_attacker_profit(const SandwichScenario& scenario,
                                const std::map<SandwichOrder, double>& order_probs) {
  double total = 0;
  for (const auto& [order, p] : order_probs) {
    require(p >= 0, "negative probability");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    fail(ErrorCategory::contract, "order probabilities must sum to 1");
  }
  double expected = 0;
  for (const auto& [order, p] : order_probs) {
    expected += p * to_double(sandwich_profits(scenario, order).attacker_usd);
  }
  return expected;
}

std::vector<double> liquidation_expected_values(std::span<const double> prob_first, double prize_usd) {
  double total = std::accumulate(prob_first.begin(), prob_first.end(), 0.0);
  if (std::abs(total - 1.0) > 1e-9) fail(ErrorCategory::contract, "probabilities must sum to 1");
  std::vector<double> out;
  for (double p : prob_first) out.push_back(p * prize_usd);
  return out;
}

std::string format_usd(const Rational& usd) {
  // Round half away from zero to whole cents.
  Rational cents = usd * 100;
  bool negative = cents < 0;
  if (negative) cents = -cents;
  boost::multiprecision::cpp_int whole = boost::multiprecision::numerator(cents) /
                                         boost::multiprecision::denominator(cents);
  Rational frac = cents - Rational(whole);
  if (frac * 2 >= 1) ++whole;
  std::string digits = whole.str();
  while (digits.size() < 3) digits.insert(digits.begin(), '0');
  std::string out = (negative && whole != 0 ? "-" : "") + digits.substr(0, digits.size() - 2) + "." +
                    digits.substr(digits.size() - 2);
  return out;
}

}  // namespace bercow
