// Economic attack scenarios: a constant-product AMM pool, the three-command
// sandwich with per-permutation profit accounting, and the liquidation race.
#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "bercow/analysis.hpp"

namespace bercow {

struct AmmPool {
  Rational reserve_a;
  Rational reserve_b;

  AmmPool(Rational a, Rational b);
  Rational k_const() const { return reserve_a * reserve_b; }
};

struct SwapResult {
  AmmPool pool;
  Rational amount_b;  // paid in (buy) or received (sell)
};

/// Takes `amount_a` of token A out of the pool; cost is paid in token B.
SwapResult swap_buy_a(const AmmPool& pool, const Rational& amount_a);
/// Puts `amount_a` of token A into the pool; proceeds are paid in token B.
SwapResult swap_sell_a(const AmmPool& pool, const Rational& amount_a);

/// Command roles in the sandwich: the victim's buy and the attacker's
/// front-running buy and back-running sell.
enum class SandwichCmd { victim_buy = 0, attacker_buy = 1, attacker_sell = 2 };

using SandwichOrder = std::array<SandwichCmd, 3>;

/// All six orders, lexicographic in command index.
std::vector<SandwichOrder> all_sandwich_orders();
/// "i2,i1,i3" style label (i1 victim, i2 attacker buy, i3 attacker sell).
std::string order_label(const SandwichOrder& order);

struct SandwichScenario {
  AmmPool pool{75, 24};
  Rational victim_buy_a = 15;
  Rational attacker_buy_a = 15;
  Rational price_a = 100;  // dollars per token
  Rational price_b = 200;
};

struct Profits {
  Rational victim_usd;
  Rational attacker_usd;
};

/// Executes the swaps in `order`. The victim's profit is the market value of
/// the A it receives minus the B it pays. The attacker sells the same amount
/// it buys; when the sell runs first it comes out of pre-held inventory.
Profits sandwich_profits(const SandwichScenario& scenario, const SandwichOrder& order);

/// Sum over orders of probability times attacker profit. Probabilities must
/// sum to 1 within 1e-9.
double expected_attacker_profit(const SandwichScenario& scenario,
                                const std::map<SandwichOrder, double>& order_probs);

/// prize * p for each client. Probabilities must sum to 1 within 1e-9.
std::vector<double> liquidation_expected_values(std::span<const double> prob_first, double prize_usd);

/// Dollar amount rounded to cents, e.g. "-500.00".
std::string format_usd(const Rational& usd);

}  // namespace bercow
