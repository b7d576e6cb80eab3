#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "tropical/model.hpp"

namespace tropical {

enum class TropKind { complete, two_terms };

struct DomResult {
  std::size_t index = 0;
  double value = 0.0;          // signed monomial value of the winner
  double log_magnitude = 0.0;  // its log-magnitude
  bool tie = false;            // another term attains the same maximum
};

/// Dominant monomial. Ties go to the lowest index and are flagged.
DomResult dom(const TermList& terms, std::span<const double> x, double eps);

/// Gap between the largest and second-largest log-magnitude. Zero on the
/// tropical manifold.
double manifold_margin(const TermList& terms, std::span<const double> x, double eps);

/// Kept terms of one equation in one mode. For the complete kind `num` holds
/// the dominant numerator term (two entries while held on a wall) and `den`
/// the dominant denominator term of a rational equation. For the two-terms
/// kind `num` is (dominant production, dominant degradation).
struct EquationMode {
  std::vector<std::size_t> num;
  std::vector<std::size_t> den;

  bool operator==(const EquationMode&) const = default;
};

struct DominanceSignature {
  std::vector<EquationMode> equations;

  /// Per equation "i", "i/j" or "i+j", joined with ';'. Safe inside a CSV cell.
  std::string id() const;
  bool operator==(const DominanceSignature&) const = default;
};

/// One argument of a Dom operator: a subset of one equation's numerator or
/// denominator terms.
struct DomGroup {
  std::size_t equation = 0;
  bool denominator = false;
  std::vector<std::size_t> terms;
};

struct SignatureSample {
  DominanceSignature signature;
  std::vector<DomResult> winners;  // one per group
  bool tie = false;
};

/// Tropicalized view of an OdeSystem. Copies share the mode cache.
class HybridSystem {
 public:
  HybridSystem(OdeSystem source, TropKind kind);

  const OdeSystem& source() const { return *source_; }
  TropKind kind() const { return kind_; }
  const std::vector<DomGroup>& groups() const { return groups_; }

  SignatureSample sample(std::span<const double> x, double eps) const;
  DominanceSignature signature_at(std::span<const double> x, double eps) const {
    return sample(x, eps).signature;
  }
  std::vector<double> field_at(std::span<const double> x, double eps) const;

  /// Log-margin of each group (+inf for single-term groups).
  std::vector<double> group_margins(std::span<const double> x, double eps) const;

  /// The source system with only the mode's terms kept. Built once per mode.
  std::shared_ptr<const OdeSystem> mode_system(const DominanceSignature& sig) const;

 private:
  struct Cache;

  std::shared_ptr<const OdeSystem> source_;
  TropKind kind_;
  std::vector<DomGroup> groups_;
  std::shared_ptr<Cache> cache_;
};

HybridSystem tropicalize(const OdeSystem& sys, TropKind kind);

TropKind parse_trop_kind(std::string_view name);
std::string to_string(TropKind kind);

}  // namespace tropical
