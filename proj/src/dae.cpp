#include <cmath>
#include <limits>

#include "tropical/errors.hpp"
#include "tropical/sim.hpp"

namespace tropical {

namespace {

struct FoldReached {};

OdeSystem absolute_system(const OdeSystem& sys) {
  auto eqs = sys.equations();
  for (auto& eq : eqs) {
    for (auto& t : eq.num) t.coeff = std::abs(t.coeff);
    for (auto& t : eq.den) t.coeff = std::abs(t.coeff);
  }
  return OdeSystem(sys.variables(), std::move(eqs), {}, sys.epsilon());
}

class Projector {
 public:
  Projector(const DaeSystem& dae, double eps)
      : dae_(dae), field_(dae.system, eps), scale_(absolute_system(dae.system), eps) {
    const std::size_t n = dae.system.dimension();
    std::vector<bool> alg(n, false);
    for (auto i : dae.algebraic) {
      if (i >= n) throw DomainError("algebraic index out of range");
      if (alg[i]) throw DomainError("duplicate algebraic index");
      alg[i] = true;
    }
    for (std::size_t i = 0; i < n; ++i)
      if (!alg[i]) differential_.push_back(i);
  }

  const std::vector<std::size_t>& differential() const { return differential_; }

  // Newton on the algebraic variables. `branch` fixes the sign of det(∂G/∂x_A)
  // once known.
  bool project(std::vector<double>& x, double tol, std::size_t max_iter, int& branch) const {
    const std::size_t n = x.size();
    const auto& alg = dae_.algebraic;
    const auto m = static_cast<Eigen::Index>(alg.size());
    if (m == 0) return true;
    std::vector<double> f(n), s(n);
    Eigen::MatrixXd jac;
    for (std::size_t it = 0; it <= max_iter; ++it) {
      field_.eval(x, f);
      scale_.eval(x, s);
      bool done = true;
      Eigen::VectorXd g(m);
      for (Eigen::Index k = 0; k < m; ++k) {
        const auto i = alg[static_cast<std::size_t>(k)];
        g(k) = f[i];
        done = done && std::abs(f[i]) <= tol * std::max(s[i], std::numeric_limits<double>::min());
      }
      field_.jacobian(x, jac);
      Eigen::MatrixXd ja(m, m);
      for (Eigen::Index r = 0; r < m; ++r)
        for (Eigen::Index c = 0; c < m; ++c)
          ja(r, c) = jac(static_cast<Eigen::Index>(alg[static_cast<std::size_t>(r)]),
                         static_cast<Eigen::Index>(alg[static_cast<std::size_t>(c)]));
      const double det = ja.determinant();
      if (!std::isfinite(det) || det == 0.0) return false;
      const int sign = det > 0 ? 1 : -1;
      if (done) {
        if (branch == 0) branch = sign;
        return sign == branch;
      }
      if (it == max_iter) break;
      Eigen::VectorXd dx = ja.partialPivLu().solve(-g);
      double lambda = 1.0;
      for (int halve = 0; halve < 60; ++halve) {
        bool ok = true;
        for (Eigen::Index k = 0; k < m; ++k) ok = ok && x[alg[static_cast<std::size_t>(k)]] + lambda * dx(k) > 0;
        if (ok) break;
        lambda *= 0.5;
      }
      for (Eigen::Index k = 0; k < m; ++k) x[alg[static_cast<std::size_t>(k)]] += lambda * dx(k);
    }
    return false;
  }

  void differential_rhs(std::span<const double> x, std::span<double> dz) const {
    std::vector<double> f(x.size());
    field_.eval(x, f);
    for (std::size_t k = 0; k < differential_.size(); ++k) dz[k] = f[differential_[k]];
  }

 private:
  const DaeSystem& dae_;
  CompiledSystem field_;
  CompiledSystem scale_;
  std::vector<std::size_t> differential_;
};

}  // namespace

bool project_constraints(const DaeSystem& dae, std::vector<double>& x, double eps, double tol, std::size_t max_iter) {
  Projector p(dae, eps);
  int branch = 0;
  return p.project(x, tol, max_iter, branch);
}

Trajectory integrate_dae(const DaeSystem& dae, std::span<const double> x0, double t_end, double eps,
                         const DaeOptions& opts) {
  const std::size_t n = dae.system.dimension();
  if (x0.size() != n) throw DomainError("initial state dimension mismatch");
  for (double v : x0)
    if (!(v > 0)) throw DomainError("initial state must be positive");
  if (!(t_end > opts.t0)) throw DomainError("t_end must exceed the start time");
  if (!(eps > 0)) throw DomainError("epsilon must be positive");

  Projector proj(dae, eps);
  const auto& diff = proj.differential();
  std::vector<double> x(x0.begin(), x0.end());
  int branch = 0;
  if (!proj.project(x, opts.tol, opts.newton_max_iter, branch))
    throw DomainError("constraints have no regular root near the initial state");

  // The warm start follows the last successful projection.
  std::vector<double> guess = x;
  VectorField reduced;
  reduced.dimension = diff.size();
  reduced.eval = [&](std::span<const double> z, std::span<double> dz) {
    std::vector<double> y = guess;
    for (std::size_t k = 0; k < diff.size(); ++k) y[diff[k]] = z[k];
    int b = branch;
    if (!proj.project(y, opts.tol, opts.newton_max_iter, b)) throw FoldReached{};
    guess = y;
    proj.differential_rhs(y, dz);
  };

  Trajectory traj;
  traj.variables = dae.system.variables();
  double t = opts.t0;
  traj.append(t, x, "dae");
  if (diff.empty()) return traj;

  auto z_of = [&](const std::vector<double>& full) {
    std::vector<double> z;
    for (auto i : diff) z.push_back(full[i]);
    return z;
  };

  double cap = opts.max_dt;
  double dt = std::min(1e-6 * std::max(1.0, t_end - t), t_end - t);
  std::size_t steps = 0;
  while (t < t_end) {
    auto stepper = make_stepper(reduced, opts.method, opts.tol, cap);
    stepper->initialize(z_of(x), t, dt);
    try {
      while (t < t_end) {
        guess = x;
        auto [t_old, t_new] = stepper->step();
        (void)t_old;
        if (++steps > opts.max_steps) throw IntegrationError("step budget exhausted", t_new);
        dt = stepper->current_dt();
        std::vector<double> z;
        double tn = t_new;
        if (t_new >= t_end) {
          stepper->state_at(t_end, z);
          tn = t_end;
        } else {
          z = stepper->current_state();
        }
        std::vector<double> y = x;
        for (std::size_t k = 0; k < diff.size(); ++k) y[diff[k]] = z[k];
        int b = branch;
        if (!proj.project(y, opts.tol, opts.newton_max_iter, b)) throw FoldReached{};
        for (auto i : diff)
          if (!(y[i] > 0)) throw IntegrationError("differential variable left the positive orthant", tn);
        t = tn;
        x = std::move(y);
        if (opts.record_steps || t >= t_end) traj.append(t, x, "dae");
      }
    } catch (const FoldReached&) {
      const double step_floor = opts.tol * std::max(1.0, std::abs(t));
      const double last = cap > 0 ? cap : dt;
      if (last <= step_floor) {
        traj.events.push_back({t, "manifold-exit", "constraint root lost (fold)"});
        return traj;
      }
      cap = std::max(step_floor, 0.25 * std::min(last, dt));
      dt = cap;
    } catch (const IntegrationError&) {
      throw;
    } catch (const std::runtime_error& e) {
      throw IntegrationError(std::string("integration failed: ") + e.what(), t);
    }
  }
  return traj;
}

}  // namespace tropical
