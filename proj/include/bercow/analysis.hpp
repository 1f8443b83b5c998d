// Closed-form ordering bounds for uniform noise, an exact integrator for the
// probability of an output order under fixed assigned timestamps, and a Monte
// Carlo estimator that also handles adaptive adversaries.
//
// Bounds use the normalization in which |Pr[order1] - Pr[order2]| is at most
// epsilon(n) / n!; epsilon_general returns that per-order quantity directly.
#pragma once

#include <span>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "bercow/adversary.hpp"
#include "bercow/common.hpp"
#include "bercow/rng.hpp"

namespace bercow {

using Rational = boost::multiprecision::cpp_rational;

/// Exact rational from a decimal string such as "0.2" or "1/3".
Rational parse_rational(std::string_view text);
double to_double(const Rational& r);

/// 1 - (1 - alpha)^2, for 0 < alpha <= 1.
Rational epsilon_pair(const Rational& alpha);

/// ((1+alpha)^n - (1-alpha)^n - n alpha^n) / n!, for 0 < alpha <= 1; zero for n = 1.
Rational epsilon_general(unsigned n, const Rational& alpha);

struct ProbBounds {
  Rational lower;
  Rational upper;
};

/// ((1-alpha)^n / n!, ((1+alpha)^n - n alpha^n) / n!); (1, 1) for n = 1.
ProbBounds order_prob_bounds(unsigned n, const Rational& alpha);

/// dnet + dnoise.
Micros delta_linearizability(Micros dnet, Micros dnoise);

constexpr unsigned kMaxIntegratorCommands = 4;

/// Exact Pr[commands come out in `target_order`] when command i has assigned
/// timestamp ats[i] and noise uniform on [0, dnoise). Piecewise-polynomial
/// integration over the noise cube; n <= 4.
Rational order_prob_integrate(std::span<const Rational> ats, const Rational& dnoise,
                              std::span<const std::size_t> target_order);

struct Estimate {
  double value = 0;
  double std_error = 0;
  std::uint64_t successes = 0;
  std::uint64_t trials = 0;
};

Estimate binomial_estimate(std::uint64_t successes, std::uint64_t trials);

/// Pr[c_1 < c_2 < ... < c_n] under `strategy`, with noise on a fine integer
/// grid scaled so that dnet / dnoise = alpha exactly.
Estimate order_prob_monte_carlo(const AdversaryStrategy& strategy, unsigned n, const Rational& alpha,
                                std::uint64_t trials, std::uint64_t seed);

}  // namespace bercow
