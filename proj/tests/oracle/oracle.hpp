#pragma once

// Brute-force checkers used by the tests. Nothing here calls into the code it
// checks; evaluation and search are reimplemented naively.

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "tropical/model.hpp"

namespace tropical::oracle {

struct RandomSystemSpec {
  std::size_t n = 2;
  std::size_t max_terms = 3;
  int exponent_min = 0;
  int exponent_max = 2;
  int order_min = -2;
  int order_max = 2;
  bool force_both_signs = true;
  std::uint64_t seed = 1;
};

OdeSystem random_system(const RandomSystemSpec& spec);

/// Random term list of length 1..max_terms in n variables.
TermList random_terms(std::uint64_t seed, std::size_t n, std::size_t max_terms);

/// Integer a in [lo, hi]ⁿ where every equation's minimal order is attained by
/// two terms of opposite sign. Refuses n > 3 or non-integer orders.
std::vector<std::vector<long>> brute_force_equilibrations(const OdeSystem& sys, long lo = -10, long hi = 10);

/// Index of the largest |c|·ε^γ·x^α by a direct scan; first index on ties.
std::size_t brute_force_dom(const TermList& terms, std::span<const double> x, double eps);

using Field = std::function<std::vector<double>(std::span<const double>)>;

/// Max deviation, relative to the largest Jacobian entry, between central
/// differences at step h/2 and the Richardson extrapolation from (h, h/2).
double finite_diff_check(const Field& f, std::span<const double> x, double h = 1e-4);

}  // namespace tropical::oracle
