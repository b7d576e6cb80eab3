#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "tropical/field.hpp"
#include "tropical/integrator.hpp"
#include "tropical/model.hpp"
#include "tropical/trop.hpp"

namespace tropical {

struct Event {
  double time = 0.0;
  std::string kind;  // mode-switch, wall-enter, wall-exit, clamp, manifold-exit
  std::string detail;
};

struct Trajectory {
  std::vector<std::string> variables;
  std::vector<double> times;
  std::vector<std::vector<double>> states;
  std::vector<std::string> modes;
  std::vector<Event> events;

  std::size_t size() const { return times.size(); }
  bool empty() const { return times.empty(); }
  void append(double t, std::vector<double> x, std::string mode);
  std::vector<double> column(std::size_t i) const;
  /// Linear interpolation; clamps to the end points outside the range.
  std::vector<double> interpolate(double t) const;
  std::size_t count_events(std::string_view kind) const;
};

struct IntegrationOptions {
  double tol = 1e-8;
  Method method = Method::explicit_rk;
  double t0 = 0.0;
  double clamp = 1e-30;
  double max_dt = 0.0;  // 0: unbounded
  std::size_t max_steps = 5'000'000;
  /// Record every accepted step (true) or only the end point.
  bool record_steps = true;
};

/// Integrates a numeric field from t0 to t_end, labelling rows with `mode`.
Trajectory integrate_field(const VectorField& f, std::vector<std::string> names, std::span<const double> x0,
                           double t_end, const IntegrationOptions& opts = {}, const std::string& mode = "full");

Trajectory integrate_full(const OdeSystem& sys, std::span<const double> x0, double t_end, double eps,
                          const IntegrationOptions& opts = {});

/// Largest |Σ cᵢ ε^{oᵢ} xᵢ − total| over samples and declared laws.
double conservation_drift(const OdeSystem& sys, const Trajectory& traj, double eps);

/// What to do when switches accumulate on a tropical manifold.
enum class WallPolicy {
  abort,       // stop with a "wall" diagnostic once the chattering guard trips
  equilibrate  // hold an attracting opposite-sign pair together while it attracts
};

struct HybridOptions : IntegrationOptions {
  WallPolicy wall = WallPolicy::abort;
  std::size_t max_switches = 1000;
  double wall_window = 0.0;  // 0: a thousandth of the horizon
};

/// Integrates the dominant-monomial field, switching modes at margin zero
/// crossings located by bisection.
Trajectory integrate_hybrid(const HybridSystem& hsys, std::span<const double> x0, double t_end, double eps,
                            const HybridOptions& opts = {});

/// Semi-explicit index-1 system: equations listed in `algebraic` are
/// constraints Fᵢ(x) = 0 solved for xᵢ; the others are ODEs.
struct DaeSystem {
  OdeSystem system;
  std::vector<std::size_t> algebraic;
};

struct DaeOptions : IntegrationOptions {
  std::size_t newton_max_iter = 60;
};

/// Ends with a "manifold-exit" event when the constraint root is lost (fold).
Trajectory integrate_dae(const DaeSystem& dae, std::span<const double> x0, double t_end, double eps,
                         const DaeOptions& opts = {});

/// Newton solve of the constraints for the algebraic variables, the others
/// held fixed. Returns false on failure or loss of the starting root branch.
bool project_constraints(const DaeSystem& dae, std::vector<double>& x, double eps, double tol,
                         std::size_t max_iter = 60);

struct CycleInfo {
  enum class Status { cycle, rest_point, inconclusive };
  Status status = Status::inconclusive;
  double period = 0.0;
  std::vector<double> amplitude;
  bool converged = false;
  std::optional<std::vector<double>> rest_point;
  std::vector<double> peak_times;
};

/// Peak-to-peak timing on `coordinate` after discarding the transient.
CycleInfo detect_cycle(const Trajectory& traj, double transient_fraction = 0.5, std::size_t coordinate = 0);

struct Comparison {
  double sup_error = 0.0;
  std::vector<double> grid;
  std::vector<double> errors;
};

/// Max-norm differences on a uniform grid over the common time range.
/// `transform` maps states before differencing (identity when empty).
Comparison compare(const Trajectory& a, const Trajectory& b, std::size_t grid_points = 2001,
                   const std::function<std::vector<double>(const std::vector<double>&)>& transform = {});

/// Eigenvalues of a central-difference Jacobian. Throws DomainError when the
/// Richardson check flags a non-smooth point.
std::vector<std::complex<double>> linearize_eigen(const VectorField& f, std::span<const double> point,
                                                  double h = 1e-6);

/// Same for a tropicalized field; refuses points on a tropical manifold.
std::vector<std::complex<double>> linearize_eigen(const HybridSystem& hsys, std::span<const double> point, double eps,
                                                  double h = 1e-6);

/// Symmetric Hausdorff distance between two point samples (Euclidean).
double hausdorff_distance(const std::vector<std::vector<double>>& a, const std::vector<std::vector<double>>& b);

/// Inserts `per_segment − 1` evenly spaced points on each polyline segment.
std::vector<std::vector<double>> densify(const std::vector<std::vector<double>>& path, std::size_t per_segment);

struct ScalingFit {
  double slope = 0.0;
  double intercept = 0.0;
  std::vector<double> eps;
  std::vector<double> values;
};

/// Least-squares slope of log(value) against log(eps).
ScalingFit fit_loglog(std::span<const double> eps, std::span<const double> values);

/// Periods from `period_at` (run in parallel over eps), then the log-log fit.
/// Throws if any eps yields no cycle.
ScalingFit period_scaling(const std::function<CycleInfo(double eps)>& period_at, std::span<const double> eps_list,
                          bool parallel = true);

void write_trajectory_csv(const Trajectory& traj, std::ostream& out);
void write_events_csv(const Trajectory& traj, std::ostream& out);
/// 17 significant digits.
std::string format_double(double v);

}  // namespace tropical
