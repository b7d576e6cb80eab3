#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "tropical/model.hpp"
#include "tropical/polyhedron.hpp"

namespace tropical {

/// Indices of two opposite-sign terms of one equation, first < second.
struct TermPair {
  std::size_t first = 0;
  std::size_t second = 0;
  bool operator==(const TermPair&) const = default;
};

/// Per equation, the pair forced to share the minimal order; equations
/// outside the equilibrated subset hold std::nullopt.
struct BranchChoice {
  std::vector<std::optional<TermPair>> pairs;
  bool operator==(const BranchChoice&) const = default;
};

/// Lazy branch stream in lexicographic order (equation-major, pair-minor).
class BranchEnumerator {
 public:
  static constexpr std::size_t default_cap = 1'000'000;

  /// Throws EquilibrationError if a selected equation lacks terms of both
  /// signs or the branch count exceeds `cap`.
  BranchEnumerator(const OdeSystem& sys, const std::optional<std::vector<std::size_t>>& subset = std::nullopt,
                   std::size_t cap = default_cap);

  std::optional<BranchChoice> next();
  std::size_t total() const { return total_; }

 private:
  std::vector<std::vector<TermPair>> options_;  // empty list = unconstrained equation
  std::vector<std::size_t> cursor_;
  std::size_t total_ = 1;
  bool done_ = false;
};

std::vector<BranchChoice> enumerate_branches(const OdeSystem& sys,
                                             const std::optional<std::vector<std::size_t>>& subset = std::nullopt,
                                             std::size_t cap = BranchEnumerator::default_cap);

/// One feasible piece of a branch. Orders follow the convention that a
/// larger order is a smaller term as ε → 0.
struct ExponentSolution {
  ExponentVector a;                        // base point of the piece
  BranchChoice branch;
  RationalVector mu;                       // minimal term order per equation at `a`
  std::vector<RationalVector> slack;       // per equation, per term: order − μ (≥ 0)
  std::vector<std::vector<std::size_t>> truncated_terms;  // terms of order μ at `a`
  std::vector<RationalVector> family;      // free directions; empty when pinned
  Polyhedron region;                       // the whole piece in a-space

  bool pinned() const { return family.empty(); }
  /// True if equation i keeps terms of both signs at `a`.
  bool equilibrated(const OdeSystem& sys, std::size_t i) const;
};

/// Feasible pieces for one branch. Each law adds the genericity condition:
/// aᵢ + (law order)ᵢ ≥ 0 on the law's support with the minimum 0 attained by
/// two species (one for a singleton support). Empty when infeasible.
std::vector<ExponentSolution> solve_branch(const OdeSystem& sys, const BranchChoice& branch,
                                           std::span<const ConservationLaw> laws = {});

struct EquilibrationOptions {
  std::optional<std::vector<std::size_t>> subset;
  bool use_conservation = true;
  /// Reject pieces failing the 1-D permanency test on an equilibrated pair or
  /// leaving a variable outside the subset unpinned.
  bool permanency = true;
  /// Reject pieces on which an equation outside the subset stays equilibrated
  /// throughout (a family that leaves the equilibration is kept).
  bool exclusive = false;
  bool parallel = true;
  std::size_t branch_cap = BranchEnumerator::default_cap;
};

/// Solves, filters and merges the given branches, in their order.
std::vector<ExponentSolution> equilibrate_branches(const OdeSystem& sys, const std::vector<BranchChoice>& branches,
                                                   const EquilibrationOptions& opts = {});

/// Every branch over the selected equations; pieces with the same region and
/// truncation are merged, keeping the first branch.
std::vector<ExponentSolution> all_equilibrations(const OdeSystem& sys, const EquilibrationOptions& opts = {});

bool passes_permanency(const OdeSystem& sys, const ExponentSolution& sol,
                       const std::optional<std::vector<std::size_t>>& subset);

/// Renormalized system with only the minimal-order terms of each equation.
struct TruncatedSystem {
  OdeSystem system;
  RationalVector prefactor_orders;  // μᵢ − aᵢ
};
TruncatedSystem truncate(const OdeSystem& sys, const ExponentSolution& sol);

struct OrderSequence {
  RationalVector sorted_orders;
  std::vector<std::size_t> equations;  // equation index for each sorted entry
  bool is_chain = false;
};
OrderSequence order_sequence(const TruncatedSystem& truncated);

enum class Permanency { case_i, case_ii, case_iii, not_permanent };

/// Classifies y' = b₁y^β₁ − b₂y^β₂ (b₁, b₂ > 0).
Permanency permanency_1d(double beta1, double beta2);
bool is_permanent(Permanency p);
const char* to_string(Permanency p);

/// (b₂/b₁)^{1/(β₁−β₂)}.
double quasi_steady_root(double b1, double b2, double beta1, double beta2);

}  // namespace tropical
