#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "tropical/model.hpp"

namespace tropical {

/// Numeric right-hand side with an optional analytic Jacobian. Integrators,
/// the DAE solver and the linearization all work on this type.
struct VectorField {
  std::size_t dimension = 0;
  std::function<void(std::span<const double> x, std::span<double> dx)> eval;
  std::function<void(std::span<const double> x, Eigen::MatrixXd& jac)> jacobian;

  std::vector<double> operator()(std::span<const double> x) const {
    std::vector<double> dx(dimension);
    eval(x, dx);
    return dx;
  }
};

/// An OdeSystem with ε folded into the coefficients. Evaluation does not
/// check positivity; callers validate the state once.
class CompiledSystem {
 public:
  CompiledSystem(const OdeSystem& sys, double eps);

  std::size_t dimension() const { return equations_.size(); }
  void eval(std::span<const double> x, std::span<double> dx) const;
  void jacobian(std::span<const double> x, Eigen::MatrixXd& jac) const;

 private:
  struct Term {
    double coeff;
    std::vector<std::pair<std::size_t, int>> powers;
  };
  struct Eq {
    std::vector<Term> num, den;
  };

  static double value(const Term& t, std::span<const double> x);
  // Adds scale·∂t/∂x into row.
  static void add_gradient(const Term& t, std::span<const double> x, double scale,
                           Eigen::Ref<Eigen::RowVectorXd, 0, Eigen::InnerStride<>> row);

  std::vector<Eq> equations_;
};

VectorField make_field(const OdeSystem& sys, double eps);

/// Jacobian by central differences with relative step h·|xⱼ|, so positive
/// states stay positive.
Eigen::MatrixXd finite_difference_jacobian(const VectorField& f, std::span<const double> x, double h = 1e-6);

}  // namespace tropical
