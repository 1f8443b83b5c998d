#include "bercow/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "bercow/parallel.hpp"

namespace bercow {

namespace mp = boost::multiprecision;

Rational parse_rational(std::string_view text) {
  auto bad = [&] { fail(ErrorCategory::parse, "not a rational number: " + std::string(text)); };
  if (text.empty()) bad();
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    auto num = parse_rational(text.substr(0, slash));
    auto den = parse_rational(text.substr(slash + 1));
    if (den == 0) bad();
    return num / den;
  }
  bool negative = text.front() == '-';
  if (negative) text.remove_prefix(1);
  mp::cpp_int whole = 0;
  mp::cpp_int scale = 1;
  bool seen_dot = false;
  bool seen_digit = false;
  for (char c : text) {
    if (c == '.' && !seen_dot) {
      seen_dot = true;
    } else if (c >= '0' && c <= '9') {
      whole = whole * 10 + (c - '0');
      if (seen_dot) scale *= 10;
      seen_digit = true;
    } else if (c == 'e' || c == 'E') {
      // Scientific notation: mantissa e exponent.
      auto epos = text.find_first_of("eE");
      Rational mantissa = parse_rational(text.substr(0, epos));
      auto exp_text = text.substr(epos + 1);
      int exponent = 0;
      try {
        exponent = std::stoi(std::string(exp_text));
      } catch (...) {
        bad();
      }
      Rational factor = mp::pow(mp::cpp_int(10), std::abs(exponent));
      Rational r = exponent >= 0 ? Rational(mantissa * factor) : Rational(mantissa / factor);
      return negative ? Rational(-r) : r;
    } else {
      bad();
    }
  }
  if (!seen_digit) bad();
  Rational r(whole, scale);
  return negative ? Rational(-r) : r;
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

namespace {

void check_alpha(const Rational& alpha) {
  if (alpha <= 0 || alpha > 1) {
    fail(ErrorCategory::contract, "alpha must lie in (0, 1], got " + alpha.str());
  }
}

Rational rpow(const Rational& base, unsigned e) {
  Rational r = 1;
  for (unsigned i = 0; i < e; ++i) r *= base;
  return r;
}

Rational factorial(unsigned n) {
  Rational r = 1;
  for (unsigned i = 2; i <= n; ++i) r *= i;
  return r;
}

}  // namespace

Rational epsilon_pair(const Rational& alpha) {
  check_alpha(alpha);
  return 1 - rpow(1 - alpha, 2);
}

ProbBounds order_prob_bounds(unsigned n, const Rational& alpha) {
  require(n >= 1, "need at least one command");
  check_alpha(alpha);
  if (n == 1) return {1, 1};
  auto nf = factorial(n);
  return {rpow(1 - alpha, n) / nf, (rpow(1 + alpha, n) - n * rpow(alpha, n)) / nf};
}

Rational epsilon_general(unsigned n, const Rational& alpha) {
  auto b = order_prob_bounds(n, alpha);
  return b.upper - b.lower;
}

Micros delta_linearizability(Micros dnet, Micros dnoise) {
  require(dnet >= 0 && dnoise >= 0, "dnet and dnoise must be non-negative");
  return dnet + dnoise;
}

namespace {

using Poly = std::vector<Rational>;  // coefficients, lowest degree first

Rational eval(const Poly& p, const Rational& x) {
  Rational acc = 0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * x + *it;
  return acc;
}

Poly antiderivative(const Poly& p) {
  Poly out(p.size() + 1, Rational(0));
  for (std::size_t i = 0; i < p.size(); ++i) out[i + 1] = p[i] / static_cast<unsigned>(i + 1);
  return out;
}

}  // namespace

Rational order_prob_integrate(std::span<const Rational> ats, const Rational& dnoise,
                              std::span<const std::size_t> target_order) {
  const std::size_t n = ats.size();
  require(n >= 1, "need at least one command");
  if (n > kMaxIntegratorCommands) {
    fail(ErrorCategory::contract, "exact integrator supports at most 4 commands");
  }
  require(dnoise > 0, "dnoise must be positive");
  require(target_order.size() == n, "target order must list every command once");
  std::set<std::size_t> seen(target_order.begin(), target_order.end());
  require(seen.size() == n && *seen.rbegin() == n - 1, "target order must be a permutation");

  // Work in units of dnoise: command i's modified timestamp is uniform on
  // [a_i, a_i + 1].
  std::vector<Rational> a;
  for (const auto& t : ats) a.push_back(t / dnoise);
  std::set<Rational> points;
  for (const auto& x : a) {
    points.insert(x);
    points.insert(x + 1);
  }
  std::vector<Rational> bp(points.begin(), points.end());
  // Region 0 is (-inf, bp[0]); region r is [bp[r-1], bp[r]); last is [bp.back(), inf).
  const std::size_t regions = bp.size() + 1;
  auto left_edge = [&](std::size_t r) { return bp[r - 1]; };
  auto right_edge = [&](std::size_t r) { return bp[r]; };

  // G(x) = Pr[x < t_{s_j} < ... < t_{s_n}], built from the last position back.
  std::vector<Poly> g(regions, Poly{Rational(1)});
  for (std::size_t pos = n; pos-- > 0;) {
    const Rational& lo = a[target_order[pos]];
    const Rational hi = lo + 1;
    // Continuous antiderivative H of the current G, anchored at H(bp[0]) = 0.
    std::vector<Poly> h(regions);
    Rational carried = 0;
    for (std::size_t r = 1; r + 1 < regions; ++r) {
      h[r] = antiderivative(g[r]);
      h[r][0] += carried - eval(h[r], left_edge(r));
      carried = eval(h[r], right_edge(r));
    }
    auto h_at = [&](const Rational& x) {
      for (std::size_t r = 1; r + 1 < regions; ++r) {
        if (x >= left_edge(r) && x <= right_edge(r)) return eval(h[r], x);
      }
      fail(ErrorCategory::contract, "integration point outside the breakpoint range");
    };
    const Rational h_hi = h_at(hi);
    const Rational h_lo = h_at(lo);
    std::vector<Poly> next(regions);
    for (std::size_t r = 0; r < regions; ++r) {
      bool left_of_lo = r == 0 || (r + 1 < regions && right_edge(r) <= lo);
      bool right_of_hi = !left_of_lo && (r + 1 == regions || left_edge(r) >= hi);
      if (left_of_lo) {
        next[r] = Poly{h_hi - h_lo};
      } else if (right_of_hi) {
        next[r] = Poly{Rational(0)};
      } else {
        Poly p = h[r];
        for (auto& c : p) c = -c;
        p[0] += h_hi;
        next[r] = std::move(p);
      }
    }
    g = std::move(next);
  }
  return g[0][0];
}

Estimate binomial_estimate(std::uint64_t successes, std::uint64_t trials) {
  require(trials > 0, "no trials");
  Estimate e;
  e.successes = successes;
  e.trials = trials;
  e.value = static_cast<double>(successes) / static_cast<double>(trials);
  e.std_error = std::sqrt(e.value * (1 - e.value) / static_cast<double>(trials));
  return e;
}

Estimate order_prob_monte_carlo(const AdversaryStrategy& strategy, unsigned n, const Rational& alpha,
                                std::uint64_t trials, std::uint64_t seed) {
  require(trials >= 1000, "Monte Carlo needs at least 1000 trials");
  require(n >= 1, "need at least one command");
  if (alpha < 0 || alpha > 1) fail(ErrorCategory::contract, "alpha must lie in [0, 1]");
  // Integer grid: dnoise a multiple of alpha's denominator near 1e9 ticks.
  const auto den = mp::denominator(alpha);
  const mp::cpp_int scale = (mp::cpp_int(1'000'000'000) + den - 1) / den;
  const auto dnoise = static_cast<Micros>(den * scale);
  const auto dnet = static_cast<Micros>(mp::numerator(alpha) * scale);
  const Micros t = 0;
  if (strategy.kind == StrategyKind::worst_case_pair) require(n == 2, "pair strategy needs n = 2");

  auto in_order = [](const std::vector<Micros>& modified) {
    for (std::size_t i = 1; i < modified.size(); ++i) {
      if (!(modified[i - 1] < modified[i])) return false;
    }
    return true;
  };

  auto count = parallel_trials<std::uint64_t>(
      trials, seed, "order-prob-mc", 0,
      [&](std::uint64_t, Rng& rng, std::uint64_t& hits) {
        std::vector<Micros> modified(n);
        auto noise = [&] { return static_cast<Micros>(rng.below(static_cast<std::uint64_t>(dnoise))); };
        switch (strategy.kind) {
          case StrategyKind::honest:
          case StrategyKind::private_relay:
            for (auto& m : modified) m = t + noise();
            break;
          case StrategyKind::worst_case_pair: {
            auto [a1, a2] = assign_worst_case_pair(t, dnet, strategy.favored);
            modified[0] = a1 + noise();
            modified[1] = a2 + noise();
            break;
          }
          case StrategyKind::worst_case_permutation: {
            auto res = assign_worst_case_permutation(
                t, dnet, dnoise, n, [&](std::size_t, Micros) { return noise(); }, strategy.adaptive);
            modified = std::move(res.modified);
            break;
          }
          case StrategyKind::lower_bound: {
            auto ats = assign_lower_bound_strategy(t, dnet, n);
            for (std::size_t i = 0; i < n; ++i) modified[i] = ats[i] + noise();
            break;
          }
        }
        if (in_order(modified)) ++hits;
      },
      [](std::uint64_t a, std::uint64_t b) { return a + b; });
  return binomial_estimate(count, trials);
}

}  // namespace bercow
