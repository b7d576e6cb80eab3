#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "tropical/rational.hpp"

namespace tropical {

/// coeffs·a + constant (= | ≥ | >) 0 over exact rationals.
struct LinearConstraint {
  enum class Kind { equal, greater_equal, greater };

  RationalVector coeffs;
  Rational constant;
  Kind kind = Kind::greater_equal;

  Rational evaluate(const RationalVector& a) const;
  bool satisfied_by(const RationalVector& a) const;
  bool operator==(const LinearConstraint&) const = default;
};

/// Parametrization of a nonempty polyhedron: a = base + Σ tₖ·directions[k],
/// where t ranges over the set cut out by `parameter_constraints`.
/// `base` is itself a feasible point (chosen near the origin, integral when
/// the parameter bounds allow it).
struct AffineFamily {
  RationalVector base;
  std::vector<RationalVector> directions;
  std::vector<LinearConstraint> parameter_constraints;

  bool is_point() const { return directions.empty(); }
};

/// Conjunction of linear constraints in a fixed dimension. Feasibility is
/// decided by exact Gaussian elimination on the equalities followed by
/// Fourier–Motzkin elimination on the remaining free parameters.
class Polyhedron {
 public:
  explicit Polyhedron(std::size_t dimension = 0) : dimension_(dimension) {}

  std::size_t dimension() const { return dimension_; }
  const std::vector<LinearConstraint>& constraints() const { return constraints_; }

  void add(LinearConstraint c);
  void add_equal(RationalVector coeffs, Rational constant);
  void add_greater_equal(RationalVector coeffs, Rational constant);

  bool contains(const RationalVector& a) const;

  /// std::nullopt when empty.
  std::optional<AffineFamily> solve() const;
  bool feasible() const { return solve().has_value(); }

  /// Containment of feasible sets, decided exactly.
  bool is_subset_of(const Polyhedron& other) const;
  bool same_set_as(const Polyhedron& other) const {
    return is_subset_of(other) && other.is_subset_of(*this);
  }

 private:
  std::size_t dimension_;
  std::vector<LinearConstraint> constraints_;
};

/// Fourier–Motzkin feasibility for inequality-only systems in `dimension`
/// unknowns. On success returns one feasible point (values chosen near zero,
/// integral where the bounds allow).
std::optional<RationalVector> fourier_motzkin_point(std::size_t dimension,
                                                    const std::vector<LinearConstraint>& inequalities);

}  // namespace tropical
