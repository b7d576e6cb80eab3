#pragma once

#include <memory>
#include <string_view>
#include <utility>
#include <vector>

#include "tropical/field.hpp"

namespace tropical {

/// dopri5 is the explicit default; rosenbrock4 handles the raw ε-graded
/// systems whose rates span ε⁻⁶ … ε².
enum class Method { explicit_rk, stiff };

Method parse_method(std::string_view name);
const char* to_string(Method m);

/// Adaptive stepper with dense output between the last two accepted points.
class DenseStepper {
 public:
  virtual ~DenseStepper() = default;

  virtual void initialize(const std::vector<double>& x, double t, double dt) = 0;
  /// One accepted step; returns (t_old, t_new).
  virtual std::pair<double, double> step() = 0;
  virtual void state_at(double t, std::vector<double>& x) = 0;
  virtual std::vector<double> current_state() const = 0;
  virtual double current_time() const = 0;
  virtual double current_dt() const = 0;
};

/// Absolute and relative error targets are both `tol`. The field must
/// outlive the stepper.
std::unique_ptr<DenseStepper> make_stepper(const VectorField& field, Method method, double tol,
                                           double max_dt = 0.0);

}  // namespace tropical
