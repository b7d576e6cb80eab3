#include <cmath>
#include <functional>
#include <limits>
#include <optional>

#include "tropical/errors.hpp"
#include "tropical/tyson.hpp"

namespace tropical::tyson {

namespace {

using Predicate = std::function<bool(const std::vector<double>&)>;

struct Hit {
  double t;
  std::vector<double> x;
};

// Integrates until `fire` holds after `arm` has held at some accepted step.
// The firing time is bracketed on the dense output to tol·max(1, |t|).
std::optional<Hit> run_until(const VectorField& f, std::vector<double> x, double t, double t_max, const Predicate& arm,
                             const Predicate& fire, double tol, Trajectory& out, const std::string& label) {
  auto stepper = make_stepper(f, Method::stiff, tol);
  stepper->initialize(x, t, std::min(1e-6, t_max - t));
  bool armed = arm(x);
  std::size_t steps = 0;
  while (t < t_max) {
    auto [t_old, t_new] = stepper->step();
    if (++steps > 5'000'000) throw IntegrationError("step budget exhausted", t_new);
    auto x_new = stepper->current_state();
    for (double v : x_new)
      if (!std::isfinite(v) || !(v > 0)) throw IntegrationError("mode left the positive orthant", t_new);
    if (armed && fire(x_new)) {
      double lo = t_old, hi = t_new;
      std::vector<double> x_hi = x_new;
      while (hi - lo > tol * std::max(1.0, std::abs(hi)) &&
             hi - lo > 8 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(hi))) {
        const double mid = 0.5 * (lo + hi);
        std::vector<double> x_mid;
        stepper->state_at(mid, x_mid);
        if (fire(x_mid)) {
          hi = mid;
          x_hi = std::move(x_mid);
        } else {
          lo = mid;
        }
      }
      out.append(hi, x_hi, label);
      return Hit{hi, std::move(x_hi)};
    }
    armed = armed || arm(x_new);
    t = t_new;
    out.append(t, x_new, label);
  }
  return std::nullopt;
}

MonomialTerm term(double c, long order, std::vector<int> ex) { return {c, Rational(order), std::move(ex)}; }

// Fast jump: only k₄ȳ₄ȳ₃² is kept in both equations.
OdeSystem mode3_system(const Params& p) {
  std::vector<Equation> eqs(2);
  eqs[0].num = {term(p.k4, 0, {2, 1})};
  eqs[1].num = {term(-p.k4, 2, {2, 1})};
  return OdeSystem({"y3", "y4"}, std::move(eqs));
}

// Descent: ȳ₃ decays on its own while ȳ₄ recharges.
OdeSystem mode2_system(const Params& p) {
  std::vector<Equation> eqs(2);
  eqs[0].num = {term(-p.k6, 0, {1, 0})};
  eqs[1].num = {term(p.k1, 2, {0, 0}), term(-p.k4, 2, {2, 1})};
  return OdeSystem({"y3", "y4"}, std::move(eqs));
}

}  // namespace

HybridCycle hybrid_cycle(const Params& p, double eps, double tol) {
  p.validate();
  if (!(eps > 0)) throw DomainError("epsilon must be positive");
  HybridCycle hc;
  hc.orbit.variables = {"y3", "y4"};
  const auto nf = normal_form(p);
  const auto reduced = reduced_2d(p);

  // Below the fold the rest point sits on the attracting branch.
  if (p.k1 / p.k6 <= nf.s) {
    hc.rest_point = reduced.rest_point();
    return hc;
  }

  const auto O = fold_point(p);
  hc.O = O;
  const double y4_fold = O[1];
  const double fast_horizon = 1e4 * (1 / p.k6 + 1 / p.k4p + 1 / p.k1);
  const auto product = [&](const std::vector<double>& x) { return p.k4 * x[1] * x[0] * x[0]; };

  // Mode 3 from O until the jump product falls back through k₁.
  const auto f3 = make_field(mode3_system(p), eps);
  hc.orbit.append(0.0, {O[0], O[1]}, "mode3");
  const auto o2 = run_until(
      f3, {O[0], O[1]}, 0.0, fast_horizon, [&](const auto& x) { return product(x) > p.k1; },
      [&](const auto& x) { return product(x) <= p.k1; }, tol, hc.orbit, "mode3");
  if (!o2) return hc;
  hc.O2 = {o2->x[0], o2->x[1]};
  hc.durations[2] = o2->t;

  // Mode 2 until M₁ recaptures on its attracting lower branch.
  const auto margin = [&](const std::vector<double>& x) {
    return std::log(std::max(p.k4p * x[1], product(x))) - std::log(p.k6 * x[0]);
  };
  const auto f2 = make_field(mode2_system(p), eps);
  const auto o1 = run_until(
      f2, o2->x, o2->t, o2->t + fast_horizon, [&](const auto& x) { return margin(x) < 0; },
      [&](const auto& x) {
        return margin(x) >= 0 && 2 * p.k4 * x[1] * x[0] < p.k6 && x[1] < y4_fold;
      },
      tol, hc.orbit, "mode2");
  if (!o1) return hc;
  hc.O1 = {o1->x[0], o1->x[1]};
  hc.durations[1] = o1->t - o2->t;

  // Mode 1: slow drift along the lower branch of M₁ up to the fold.
  std::vector<double> x{nf.s * manifold_X(o1->x[1] / nf.s, nf.k0), o1->x[1]};
  hc.orbit.append(o1->t, x, "mode1");
  DaeSystem dae{reduced.system, {0}};
  DaeOptions opts;
  opts.tol = tol;
  opts.method = Method::explicit_rk;
  opts.t0 = o1->t;
  const double slow_horizon = o1->t + 1e4 / (eps * eps * p.k1);
  const auto slow = integrate_dae(dae, x, slow_horizon, eps, opts);
  for (std::size_t k = 1; k < slow.size(); ++k) hc.orbit.append(slow.times[k], slow.states[k], "mode1");
  if (slow.count_events("manifold-exit") == 0) return hc;
  const auto& last = slow.states.back();
  if (std::abs(last[1] - y4_fold) > 1e-3 * y4_fold) return hc;
  hc.durations[0] = slow.times.back() - o1->t;
  hc.orbit.append(slow.times.back(), {O[0], O[1]}, "mode1");
  hc.closed = true;
  return hc;
}

}  // namespace tropical::tyson
