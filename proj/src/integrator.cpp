#include "tropical/integrator.hpp"

#include <stdexcept>
#include <string>

#include <boost/numeric/odeint/integrate/integrate_adaptive.hpp>
#include <boost/numeric/odeint/stepper/generation.hpp>
#include <boost/numeric/odeint/stepper/runge_kutta_dopri5.hpp>

#include "rosenbrock_backend.hpp"

namespace tropical {

namespace odeint = boost::numeric::odeint;

namespace {

using StdState = std::vector<double>;

class ExplicitStepper final : public DenseStepper {
 public:
  ExplicitStepper(const VectorField& f, double tol, double max_dt)
      : f_(f),
        stepper_(max_dt > 0 ? odeint::make_dense_output(tol, tol, max_dt, odeint::runge_kutta_dopri5<StdState>())
                            : odeint::make_dense_output(tol, tol, odeint::runge_kutta_dopri5<StdState>())) {}

  void initialize(const std::vector<double>& x, double t, double dt) override { stepper_.initialize(x, t, dt); }

  std::pair<double, double> step() override {
    auto sys = [this](const StdState& x, StdState& dx, double) { f_.eval(x, dx); };
    return stepper_.do_step(sys);
  }

  void state_at(double t, std::vector<double>& x) override {
    x.resize(f_.dimension);
    stepper_.calc_state(t, x);
  }

  std::vector<double> current_state() const override { return stepper_.current_state(); }
  double current_time() const override { return stepper_.current_time(); }
  double current_dt() const override { return stepper_.current_time_step(); }

 private:
  const VectorField& f_;
  odeint::result_of::make_dense_output<odeint::runge_kutta_dopri5<StdState>>::type stepper_;
};

class StiffStepper final : public DenseStepper {
 public:
  StiffStepper(const VectorField& f, double tol, double max_dt)
      : backend_(
            f.dimension,
            [&f](const double* x, double* dx) {
              f.eval({x, f.dimension}, {dx, f.dimension});
            },
            [&f](const double* x, double* jac) {
              const std::span<const double> xs(x, f.dimension);
              Eigen::MatrixXd m;
              if (f.jacobian) {
                f.jacobian(xs, m);
              } else {
                m = finite_difference_jacobian(f, xs);
              }
              Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
                  jac, static_cast<Eigen::Index>(f.dimension), static_cast<Eigen::Index>(f.dimension)) = m;
            },
            tol, max_dt) {}

  void initialize(const std::vector<double>& x, double t, double dt) override { backend_.initialize(x, t, dt); }
  std::pair<double, double> step() override { return backend_.step(); }
  void state_at(double t, std::vector<double>& x) override { backend_.state_at(t, x); }
  std::vector<double> current_state() const override { return backend_.current_state(); }
  double current_time() const override { return backend_.current_time(); }
  double current_dt() const override { return backend_.current_dt(); }

 private:
  detail::RosenbrockBackend backend_;
};

}  // namespace

Method parse_method(std::string_view name) {
  if (name == "explicit" || name == "dopri5") return Method::explicit_rk;
  if (name == "stiff" || name == "rosenbrock4") return Method::stiff;
  throw std::invalid_argument("unknown integration method '" + std::string(name) + "'");
}

const char* to_string(Method m) { return m == Method::explicit_rk ? "explicit" : "stiff"; }

std::unique_ptr<DenseStepper> make_stepper(const VectorField& field, Method method, double tol, double max_dt) {
  if (!(tol > 0)) throw std::invalid_argument("tolerance must be positive");
  if (method == Method::stiff) return std::make_unique<StiffStepper>(field, tol, max_dt);
  return std::make_unique<ExplicitStepper>(field, tol, max_dt);
}

}  // namespace tropical
