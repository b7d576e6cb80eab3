#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tropical/equil.hpp"
#include "tropical/model.hpp"
#include "tropical/sim.hpp"

namespace tropical::tyson {

/// Rate constants of the ε-graded cell-cycle model (k₂, k₅, k₇ do not enter).
struct Params {
  double k1 = 1.5;
  double k3 = 2.0;
  double k4 = 1.8;
  double k4p = 1.8;
  double k6 = 1.0;
  double k8 = 1.0;
  double k9 = 1.0;
  double epsilon = 0.1;

  void validate() const;
};

/// {"name", "epsilon", "constants": {"k1": …}}; missing constants keep defaults.
Params parse_profile(std::string_view json_text);
Params load_profile(const std::filesystem::path& path);
std::string serialize_profile(const Params& p, const std::string& name);

/// Five variables y1..y5 with the conservation law y1+y2+y3+y4 = 1.
OdeSystem build(const Params& p);

enum class Case { I, III };

/// Case I: a = (3,0,2,0,4), full equilibration (slow manifold M₁).
/// Case III: a = (3,0,0,4,4), y₃ left free (manifold M₂).
/// Recomputed with the solver and checked against the expected vector.
ExponentSolution known_exponents(Case c);

/// Branches of the four partial equilibrations with y₁, y₂, y₅ equilibrated
/// and exactly one of y₃, y₄ (variant 1, 2: y₃ by pair (0,2) / (1,2);
/// variant 3, 4: y₄ by pair (0,2) / (1,2)). Indices 1-based like the variants.
std::vector<BranchChoice> variant_branches(const OdeSystem& sys, int variant);
std::vector<std::size_t> variant_subset(int variant);

/// The planar slow system in (ȳ₃, ȳ₄) on M₁ and the maps back to five
/// species. Valid while ȳ₂ stays bounded away from zero.
struct Reduced {
  Params params;
  OdeSystem system;  // ȳ₃' = k₄'ȳ₄ + k₄ȳ₄ȳ₃² − k₆ȳ₃, ȳ₄' = ε²(k₁ − k₄'ȳ₄ − k₄ȳ₄ȳ₃²)
  bool assumes_y2_bounded = true;

  std::array<double, 2> rest_point() const;
  std::array<double, 2> field(double y3, double y4, double eps) const;
  /// Barred five-species state from (ȳ₃, ȳ₄) through the conservation law
  /// and the two quasi-steady relations.
  std::array<double, 5> reconstruct(double y3, double y4, double eps) const;
};

Reduced reduced_2d(const Params& p);

/// Newton refinement of the rest point on the planar field.
std::array<double, 2> refine_rest_point(const Reduced& r, std::array<double, 2> guess, double eps,
                                        int max_iter = 50);

/// Lower and upper roots of y·x² − k₀x + y = 0 on 0 < y ≤ k₀/2.
double manifold_X(double y, double k0);
double manifold_X_plus(double y, double k0);

/// x' = y + yx² − k₀x, y' = ε²(k₁ − y − yx²) from the planar system by
/// ȳ₃ = s·x, ȳ₄ = s·y, t = τ/k₄' with s = √(k₄'/k₄).
struct NormalForm {
  double s = 1.0;
  double time_scale = 1.0;  // k₄'
  double k0 = 0.0;
  double k1 = 0.0;

  std::array<double, 2> to_normal(double y3, double y4) const { return {y3 / s, y4 / s}; }
  std::array<double, 2> from_normal(double x, double y) const { return {s * x, s * y}; }
  OdeSystem system() const;
  /// Fold of the lower branch, x = 1, y = k₀/2.
  std::array<double, 2> fold() const { return {1.0, k0 / 2}; }
};

NormalForm normal_form(const Params& p);

/// Renormalized full system at the given exponents (e.g. the M₂ coordinates).
OdeSystem renormalized(const Params& p, Case c);

struct HybridCycle {
  bool closed = false;
  Trajectory orbit;  // (ȳ₃, ȳ₄) with mode labels "mode1", "mode3", "mode2"
  std::array<double, 2> O{}, O1{}, O2{};
  std::array<double, 3> durations{};  // mode 1, mode 2, mode 3
  std::optional<std::array<double, 2>> rest_point;
};

/// Three-mode assembly in barred coordinates: slow DAE on the lower branch
/// of M₁ up to the fold O, fast jump until the M₂ margin crossing O₂,
/// two-term descent until capture by M₁ at O₁, then back on M₁ to O.
HybridCycle hybrid_cycle(const Params& p, double eps, double tol = 1e-9);

/// Fold point O of M₁ in barred coordinates.
std::array<double, 2> fold_point(const Params& p);

/// Raw five-species state on M₁ with ȳ₃ at 70% of its rest value.
std::vector<double> initial_state(const Params& p, double eps);

/// Raw state to barred coordinates of Case I and back.
std::vector<double> to_bar(std::span<const double> y, double eps);
std::vector<double> from_bar(std::span<const double> ybar, double eps);

struct FullCycle {
  CycleInfo info;
  Trajectory run;     // whole integration from initial_state
  Trajectory period;  // last detected period of `run`
};

/// Stiff integration of the full model until a converged cycle is seen.
/// Throws DomainError when none appears within the horizon.
FullCycle limit_cycle(const Params& p, double eps, double tol = 1e-8);

}  // namespace tropical::tyson
