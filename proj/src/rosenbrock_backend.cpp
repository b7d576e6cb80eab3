#include "rosenbrock_backend.hpp"

#include <boost/numeric/odeint.hpp>

namespace tropical::detail {

namespace odeint = boost::numeric::odeint;

using UblasState = boost::numeric::ublas::vector<double>;
using UblasMatrix = boost::numeric::ublas::matrix<double>;
using Dense = odeint::result_of::make_dense_output<odeint::rosenbrock4<double>>::type;

struct RosenbrockBackend::Impl {
  std::size_t n;
  Rhs rhs;
  Jac jac;
  Dense stepper;
  std::vector<double> xbuf, dbuf, jbuf;

  Impl(std::size_t n_, Rhs r, Jac j, double tol, double max_dt)
      : n(n_),
        rhs(std::move(r)),
        jac(std::move(j)),
        stepper(max_dt > 0 ? odeint::make_dense_output(tol, tol, max_dt, odeint::rosenbrock4<double>())
                           : odeint::make_dense_output(tol, tol, odeint::rosenbrock4<double>())),
        xbuf(n_),
        dbuf(n_),
        jbuf(n_ * n_) {}
};

RosenbrockBackend::RosenbrockBackend(std::size_t n, Rhs rhs, Jac jac, double tol, double max_dt)
    : impl_(std::make_unique<Impl>(n, std::move(rhs), std::move(jac), tol, max_dt)) {}

RosenbrockBackend::~RosenbrockBackend() = default;

void RosenbrockBackend::initialize(const std::vector<double>& x, double t, double dt) {
  UblasState u(x.size());
  std::copy(x.begin(), x.end(), u.begin());
  impl_->stepper.initialize(u, t, dt);
}

std::pair<double, double> RosenbrockBackend::step() {
  Impl& s = *impl_;
  auto deriv = [&s](const UblasState& x, UblasState& dx, double) {
    std::copy(x.begin(), x.end(), s.xbuf.begin());
    s.rhs(s.xbuf.data(), s.dbuf.data());
    std::copy(s.dbuf.begin(), s.dbuf.end(), dx.begin());
  };
  auto jac = [&s](const UblasState& x, UblasMatrix& j, double, UblasState& dfdt) {
    std::copy(x.begin(), x.end(), s.xbuf.begin());
    s.jac(s.xbuf.data(), s.jbuf.data());
    for (std::size_t r = 0; r < s.n; ++r) {
      dfdt[r] = 0.0;
      for (std::size_t c = 0; c < s.n; ++c) j(r, c) = s.jbuf[r * s.n + c];
    }
  };
  return s.stepper.do_step(std::make_pair(deriv, jac));
}

void RosenbrockBackend::state_at(double t, std::vector<double>& x) {
  UblasState u(impl_->n);
  impl_->stepper.calc_state(t, u);
  x.assign(u.begin(), u.end());
}

std::vector<double> RosenbrockBackend::current_state() const {
  const auto& u = impl_->stepper.current_state();
  return {u.begin(), u.end()};
}

double RosenbrockBackend::current_time() const { return impl_->stepper.current_time(); }
double RosenbrockBackend::current_dt() const { return impl_->stepper.current_time_step(); }

}  // namespace tropical::detail
