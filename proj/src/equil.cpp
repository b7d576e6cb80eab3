#include "tropical/equil.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>

#include "tropical/errors.hpp"

namespace tropical {

namespace {

RationalVector exponent_difference(const MonomialTerm& p, const MonomialTerm& q) {
  RationalVector d(p.exponents.size());
  for (std::size_t l = 0; l < d.size(); ++l) d[l] = p.exponents[l] - q.exponents[l];
  return d;
}

std::vector<bool> selected_equations(const OdeSystem& sys, const std::optional<std::vector<std::size_t>>& subset) {
  std::vector<bool> on(sys.dimension(), !subset.has_value());
  if (subset) {
    for (auto i : *subset) {
      if (i >= sys.dimension()) throw EquilibrationError("subset index " + std::to_string(i) + " out of range");
      on[i] = true;
    }
  }
  return on;
}

void require_polynomial(const OdeSystem& sys) {
  if (!sys.is_polynomial())
    throw EquilibrationError("equilibration needs polynomial equations; multiply rational rates through first");
}

// Choices of zero-order species for one law: pairs, or the singleton.
std::vector<std::vector<std::size_t>> law_pieces(const ConservationLaw& law) {
  std::vector<std::size_t> support;
  for (std::size_t i = 0; i < law.coeffs.size(); ++i)
    if (law.coeffs[i] != 0) support.push_back(i);
  std::vector<std::vector<std::size_t>> out;
  if (support.size() == 1) {
    out.push_back(support);
    return out;
  }
  for (std::size_t p = 0; p < support.size(); ++p)
    for (std::size_t q = p + 1; q < support.size(); ++q) out.push_back({support[p], support[q]});
  return out;
}

bool same_piece(const ExponentSolution& x, const ExponentSolution& y) {
  if (x.truncated_terms != y.truncated_terms) return false;
  if (x.pinned() != y.pinned()) return false;
  if (x.pinned()) return x.a == y.a;
  if (x.family.size() != y.family.size()) return false;
  return x.region.same_set_as(y.region);
}

// True if terms p and q keep equal orders over the whole piece.
bool tied_on_piece(const OdeSystem& sys, const ExponentSolution& sol, std::size_t i, std::size_t p, std::size_t q) {
  const auto& tp = sys.equation(i).num[p];
  const auto& tq = sys.equation(i).num[q];
  if (term_order(tp, sol.a) != term_order(tq, sol.a)) return false;
  auto d = exponent_difference(tp, tq);
  for (const auto& dir : sol.family) {
    Rational s = 0;
    for (std::size_t l = 0; l < d.size(); ++l) s += d[l] * dir[l];
    if (s != 0) return false;
  }
  return true;
}

bool equilibrated_on_piece(const OdeSystem& sys, const ExponentSolution& sol, std::size_t i) {
  const auto& kept = sol.truncated_terms[i];
  const auto& num = sys.equation(i).num;
  for (auto p : kept)
    for (auto q : kept)
      if (num[p].coeff > 0 && num[q].coeff < 0 && tied_on_piece(sys, sol, i, p, q)) return true;
  return false;
}

}  // namespace

// ---------------------------------------------------------------------------
// Branches

BranchEnumerator::BranchEnumerator(const OdeSystem& sys, const std::optional<std::vector<std::size_t>>& subset,
                                   std::size_t cap) {
  require_polynomial(sys);
  auto on = selected_equations(sys, subset);
  for (std::size_t i = 0; i < sys.dimension(); ++i) {
    std::vector<TermPair> pairs;
    if (on[i]) {
      const auto& num = sys.equation(i).num;
      bool pos = false, neg = false;
      for (const auto& t : num) (t.coeff > 0 ? pos : neg) = true;
      if (!pos || !neg)
        throw EquilibrationError("equation for " + sys.variables()[i] + " has only " +
                                 (pos ? "positive" : "negative") +
                                 " terms; an equilibration needs at least two terms of opposite sign");
      for (std::size_t j = 0; j < num.size(); ++j)
        for (std::size_t k = j + 1; k < num.size(); ++k)
          if (num[j].sign() != num[k].sign()) pairs.push_back({j, k});
      if (total_ > cap / pairs.size())
        throw EquilibrationError("branch count exceeds the cap of " + std::to_string(cap));
      total_ *= pairs.size();
    }
    options_.push_back(std::move(pairs));
  }
  cursor_.assign(options_.size(), 0);
}

std::optional<BranchChoice> BranchEnumerator::next() {
  if (done_) return std::nullopt;
  BranchChoice b;
  for (std::size_t i = 0; i < options_.size(); ++i) {
    if (options_[i].empty()) b.pairs.emplace_back(std::nullopt);
    else b.pairs.emplace_back(options_[i][cursor_[i]]);
  }
  done_ = true;
  for (std::size_t i = options_.size(); i-- > 0;) {
    if (options_[i].empty()) continue;
    if (++cursor_[i] < options_[i].size()) {
      done_ = false;
      break;
    }
    cursor_[i] = 0;
  }
  return b;
}

std::vector<BranchChoice> enumerate_branches(const OdeSystem& sys, const std::optional<std::vector<std::size_t>>& subset,
                                             std::size_t cap) {
  BranchEnumerator e(sys, subset, cap);
  std::vector<BranchChoice> out;
  out.reserve(e.total());
  while (auto b = e.next()) out.push_back(std::move(*b));
  return out;
}

// ---------------------------------------------------------------------------
// Solving

bool ExponentSolution::equilibrated(const OdeSystem& sys, std::size_t i) const {
  bool pos = false, neg = false;
  for (auto j : truncated_terms.at(i)) (sys.equation(i).num[j].coeff > 0 ? pos : neg) = true;
  return pos && neg;
}

std::vector<ExponentSolution> solve_branch(const OdeSystem& sys, const BranchChoice& branch,
                                           std::span<const ConservationLaw> laws) {
  require_polynomial(sys);
  const std::size_t n = sys.dimension();
  if (branch.pairs.size() != n) throw EquilibrationError("branch does not match the system");

  Polyhedron base(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!branch.pairs[i]) continue;
    const auto [j, k] = *branch.pairs[i];
    const auto& num = sys.equation(i).num;
    if (j >= num.size() || k >= num.size() || j == k || num[j].sign() == num[k].sign())
      throw EquilibrationError("invalid pair for equation " + std::to_string(i));
    base.add_equal(exponent_difference(num[j], num[k]), num[j].eps_order - num[k].eps_order);
    for (std::size_t l = 0; l < num.size(); ++l) {
      if (l == j || l == k) continue;
      base.add_greater_equal(exponent_difference(num[l], num[j]), num[l].eps_order - num[j].eps_order);
    }
  }

  // Cartesian product of per-law zero-order choices.
  std::vector<Polyhedron> pieces{base};
  for (const auto& law : laws) {
    if (law.coeffs.size() != n) throw EquilibrationError("conservation law does not match the system");
    RationalVector orders = law.eps_orders.empty() ? RationalVector(n) : law.eps_orders;
    for (auto& p : pieces) {
      for (std::size_t i = 0; i < n; ++i) {
        if (law.coeffs[i] == 0) continue;
        RationalVector e(n);
        e[i] = 1;
        p.add_greater_equal(std::move(e), orders[i]);
      }
    }
    std::vector<Polyhedron> next;
    for (const auto& p : pieces) {
      if (!p.feasible()) continue;
      for (const auto& zeros : law_pieces(law)) {
        Polyhedron q = p;
        for (auto i : zeros) {
          RationalVector e(n);
          e[i] = 1;
          q.add_equal(std::move(e), orders[i]);
        }
        next.push_back(std::move(q));
      }
    }
    pieces = std::move(next);
  }

  std::vector<ExponentSolution> out;
  for (auto& piece : pieces) {
    auto fam = piece.solve();
    if (!fam) continue;
    ExponentSolution s;
    s.a = ExponentVector(fam->base);
    s.branch = branch;
    s.family = fam->directions;
    s.region = std::move(piece);
    for (std::size_t i = 0; i < n; ++i) {
      const auto& num = sys.equation(i).num;
      RationalVector orders;
      for (const auto& t : num) orders.push_back(term_order(t, s.a));
      Rational mu = *std::min_element(orders.begin(), orders.end());
      std::vector<std::size_t> kept;
      for (std::size_t j = 0; j < num.size(); ++j) {
        orders[j] -= mu;
        if (orders[j] == 0) kept.push_back(j);
      }
      s.mu.push_back(mu);
      s.slack.push_back(std::move(orders));
      s.truncated_terms.push_back(std::move(kept));
    }
    bool duplicate = std::any_of(out.begin(), out.end(), [&](const ExponentSolution& o) { return same_piece(o, s); });
    if (!duplicate) out.push_back(std::move(s));
  }
  return out;
}

bool passes_permanency(const OdeSystem& sys, const ExponentSolution& sol,
                       const std::optional<std::vector<std::size_t>>& subset) {
  const std::size_t n = sys.dimension();
  for (std::size_t i = 0; i < n; ++i) {
    if (!sol.branch.pairs[i]) continue;
    const auto [j, k] = *sol.branch.pairs[i];
    const auto& num = sys.equation(i).num;
    const auto& prod = num[j].coeff > 0 ? num[j] : num[k];
    const auto& degr = num[j].coeff > 0 ? num[k] : num[j];
    const int b1 = prod.exponents[i], b2 = degr.exponents[i];
    if (b1 != b2 && !is_permanent(permanency_1d(b1, b2))) return false;
  }
  auto on = selected_equations(sys, subset);
  for (std::size_t v = 0; v < n; ++v) {
    if (on[v]) continue;
    bool pinned = equilibrated_on_piece(sys, sol, v);
    for (std::size_t i = 0; i < n && !pinned; ++i) {
      if (!sol.branch.pairs[i]) continue;
      const auto [j, k] = *sol.branch.pairs[i];
      const auto& num = sys.equation(i).num;
      pinned = num[j].exponents[v] != num[k].exponents[v];
    }
    if (!pinned) return false;
  }
  return true;
}

std::vector<ExponentSolution> equilibrate_branches(const OdeSystem& sys, const std::vector<BranchChoice>& branches,
                                                   const EquilibrationOptions& opts) {
  require_polynomial(sys);
  std::span<const ConservationLaw> laws;
  if (opts.use_conservation) laws = sys.conservation_laws();
  const auto on = selected_equations(sys, opts.subset);

  std::vector<std::vector<ExponentSolution>> per_branch(branches.size());
  std::exception_ptr failure;
  const auto count = static_cast<long>(branches.size());
#pragma omp parallel for schedule(dynamic) if (opts.parallel)
  for (long b = 0; b < count; ++b) {
    try {
      auto pieces = solve_branch(sys, branches[static_cast<std::size_t>(b)], laws);
      std::vector<ExponentSolution> kept;
      for (auto& s : pieces) {
        if (opts.permanency && !passes_permanency(sys, s, opts.subset)) continue;
        if (opts.exclusive) {
          bool extra = false;
          for (std::size_t i = 0; i < sys.dimension(); ++i) extra = extra || (!on[i] && equilibrated_on_piece(sys, s, i));
          if (extra) continue;
        }
        kept.push_back(std::move(s));
      }
      per_branch[static_cast<std::size_t>(b)] = std::move(kept);
    } catch (...) {
#pragma omp critical(tropical_equil_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<ExponentSolution> merged;
  for (auto& list : per_branch) {
    for (auto& s : list) {
      bool duplicate =
          std::any_of(merged.begin(), merged.end(), [&](const ExponentSolution& o) { return same_piece(o, s); });
      if (!duplicate) merged.push_back(std::move(s));
    }
  }
  return merged;
}

std::vector<ExponentSolution> all_equilibrations(const OdeSystem& sys, const EquilibrationOptions& opts) {
  return equilibrate_branches(sys, enumerate_branches(sys, opts.subset, opts.branch_cap), opts);
}

// ---------------------------------------------------------------------------
// Truncation and diagnostics

TruncatedSystem truncate(const OdeSystem& sys, const ExponentSolution& sol) {
  auto renorm = renormalize(sys, sol.a);
  std::vector<Equation> eqs;
  RationalVector prefactors;
  for (std::size_t i = 0; i < sys.dimension(); ++i) {
    Equation eq;
    for (auto j : sol.truncated_terms.at(i)) eq.num.push_back(renorm.equation(i).num[j]);
    prefactors.push_back(sol.mu[i] - sol.a[i]);
    eqs.push_back(std::move(eq));
  }
  return {OdeSystem(renorm.variables(), std::move(eqs), renorm.conservation_laws(), renorm.epsilon()),
          std::move(prefactors)};
}

OrderSequence order_sequence(const TruncatedSystem& truncated) {
  OrderSequence seq;
  const auto& orders = truncated.prefactor_orders;
  for (std::size_t i = 0; i < orders.size(); ++i) seq.equations.push_back(i);
  std::stable_sort(seq.equations.begin(), seq.equations.end(),
                   [&](std::size_t x, std::size_t y) { return orders[x] < orders[y]; });
  for (auto i : seq.equations) seq.sorted_orders.push_back(orders[i]);
  if (orders.size() <= 1) {
    seq.is_chain = true;
    return seq;
  }
  bool distinct = std::adjacent_find(seq.sorted_orders.begin(), seq.sorted_orders.end()) == seq.sorted_orders.end();
  bool two_term = true;
  for (const auto& eq : truncated.system.equations())
    two_term = two_term && eq.num.size() == 2 && eq.num[0].sign() != eq.num[1].sign();
  seq.is_chain = distinct && two_term;
  return seq;
}

Permanency permanency_1d(double beta1, double beta2) {
  if (beta1 == beta2) throw DomainError("permanency test needs distinct exponents");
  if (beta1 >= 0 && beta1 < beta2) return Permanency::case_i;
  if (beta2 <= 0 && beta1 < beta2) return Permanency::case_ii;
  if (beta1 < 0 && beta2 > 0) return Permanency::case_iii;
  return Permanency::not_permanent;
}

bool is_permanent(Permanency p) { return p != Permanency::not_permanent; }

const char* to_string(Permanency p) {
  switch (p) {
    case Permanency::case_i: return "case i";
    case Permanency::case_ii: return "case ii";
    case Permanency::case_iii: return "case iii";
    case Permanency::not_permanent: return "not permanent";
  }
  return "?";
}

double quasi_steady_root(double b1, double b2, double beta1, double beta2) {
  if (!(b1 > 0) || !(b2 > 0)) throw DomainError("quasi-steady root needs positive coefficients");
  if (beta1 == beta2) throw DomainError("quasi-steady root needs distinct exponents");
  return std::pow(b2 / b1, 1.0 / (beta1 - beta2));
}

}  // namespace tropical
