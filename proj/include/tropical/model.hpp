#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tropical/rational.hpp"

namespace tropical {

/// One signed monomial c·ε^γ·x^α. Exponents are Laurent (negatives allowed).
struct MonomialTerm {
  double coeff = 0.0;
  Rational eps_order;
  std::vector<int> exponents;

  int sign() const { return coeff > 0 ? 1 : -1; }
  bool operator==(const MonomialTerm&) const = default;
};

using TermList = std::vector<MonomialTerm>;

/// Right-hand side of one equation. An empty denominator means the polynomial
/// (Laurent) form; otherwise the rate is num/den.
struct Equation {
  TermList num;
  TermList den;

  bool is_rational() const { return !den.empty(); }
  bool operator==(const Equation&) const = default;
};

/// Σ cᵢ·ε^{oᵢ}·xᵢ = total. The per-species orders oᵢ are zero for a model as
/// written and pick up the exponents aᵢ under renormalization.
struct ConservationLaw {
  RationalVector coeffs;
  double total = 1.0;
  RationalVector eps_orders;

  bool operator==(const ConservationLaw&) const = default;
};

/// Renormalization exponents: xᵢ = ε^{aᵢ}·x̄ᵢ.
struct ExponentVector {
  RationalVector values;

  ExponentVector() = default;
  explicit ExponentVector(RationalVector v) : values(std::move(v)) {}
  static ExponentVector zeros(std::size_t n) { return ExponentVector(RationalVector(n)); }
  static ExponentVector from_ints(std::initializer_list<long> ints);

  std::size_t size() const { return values.size(); }
  const Rational& operator[](std::size_t i) const { return values[i]; }
  Rational& operator[](std::size_t i) { return values[i]; }
  bool operator==(const ExponentVector&) const = default;
};

/// A validated ε-graded polynomial or rational ODE system. Immutable once built.
class OdeSystem {
 public:
  OdeSystem(std::vector<std::string> variables, std::vector<Equation> equations,
            std::vector<ConservationLaw> conservation_laws = {},
            std::optional<double> epsilon = std::nullopt);

  std::size_t dimension() const { return variables_.size(); }
  const std::vector<std::string>& variables() const { return variables_; }
  const std::vector<Equation>& equations() const { return equations_; }
  const Equation& equation(std::size_t i) const { return equations_.at(i); }
  const std::vector<ConservationLaw>& conservation_laws() const { return laws_; }
  std::optional<double> epsilon() const { return epsilon_; }

  bool is_polynomial() const;
  std::size_t term_count() const;
  std::optional<std::size_t> index_of(std::string_view name) const;

  bool operator==(const OdeSystem&) const = default;

 private:
  void validate() const;

  std::vector<std::string> variables_;
  std::vector<Equation> equations_;
  std::vector<ConservationLaw> laws_;
  std::optional<double> epsilon_;
};

OdeSystem parse_model(std::string_view text);
OdeSystem load_model(const std::filesystem::path& path);
std::string serialize_model(const OdeSystem& sys);

/// log|c| + γ·log ε + ⟨α, log x⟩.
double log_magnitude(const MonomialTerm& term, std::span<const double> log_x, double log_eps);

/// c·ε^γ·x^α.
double monomial_value(const MonomialTerm& term, std::span<const double> x, double eps);

/// (F₁, …, Fₙ) at a strictly positive state.
std::vector<double> evaluate_field(const OdeSystem& sys, std::span<const double> x, double eps);

/// γ + ⟨α, a⟩, the ε-order of the term after substituting xₗ = ε^{aₗ}x̄ₗ
/// (before dividing by ε^{aᵢ} on the left-hand side).
Rational term_order(const MonomialTerm& term, const ExponentVector& a);

/// The system in barred variables x̄ᵢ = ε^{−aᵢ}xᵢ. Polynomial systems only.
OdeSystem renormalize(const OdeSystem& sys, const ExponentVector& a);

/// Splits a fused numeric constant into ε^order·coeff with
/// order = round(log|c| / log ε). The grading is heuristic, so the result
/// always carries a warning text describing the split.
struct InferredGrading {
  Rational eps_order;
  double coeff = 0.0;
  std::string warning;
};
InferredGrading infer_eps_order(double value, double eps);

/// Sum of a term list at a positive state.
double evaluate_terms(const TermList& terms, std::span<const double> x, double eps);

}  // namespace tropical
