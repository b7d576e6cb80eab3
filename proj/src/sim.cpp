#include "tropical/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "tropical/errors.hpp"

namespace tropical {

void Trajectory::append(double t, std::vector<double> x, std::string mode) {
  if (!times.empty() && !(t > times.back())) {
    // Coincident switch points overwrite the previous row.
    if (t == times.back()) {
      states.back() = std::move(x);
      modes.back() = std::move(mode);
      return;
    }
    throw std::logic_error("trajectory times must increase");
  }
  times.push_back(t);
  states.push_back(std::move(x));
  modes.push_back(std::move(mode));
}

std::vector<double> Trajectory::column(std::size_t i) const {
  std::vector<double> c;
  c.reserve(states.size());
  for (const auto& s : states) c.push_back(s.at(i));
  return c;
}

std::vector<double> Trajectory::interpolate(double t) const {
  if (times.empty()) throw std::logic_error("interpolating an empty trajectory");
  if (t <= times.front()) return states.front();
  if (t >= times.back()) return states.back();
  auto it = std::upper_bound(times.begin(), times.end(), t);
  const std::size_t k = static_cast<std::size_t>(it - times.begin());
  const double w = (t - times[k - 1]) / (times[k] - times[k - 1]);
  std::vector<double> x(states[k].size());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = (1 - w) * states[k - 1][i] + w * states[k][i];
  return x;
}

std::size_t Trajectory::count_events(std::string_view kind) const {
  return static_cast<std::size_t>(
      std::count_if(events.begin(), events.end(), [&](const Event& e) { return e.kind == kind; }));
}

Trajectory integrate_field(const VectorField& f, std::vector<std::string> names, std::span<const double> x0,
                           double t_end, const IntegrationOptions& opts, const std::string& mode) {
  const std::size_t n = f.dimension;
  if (x0.size() != n) throw DomainError("initial state dimension mismatch");
  for (double v : x0)
    if (!(v > 0)) throw DomainError("initial state must be positive");
  if (!(t_end > opts.t0)) throw DomainError("t_end must exceed the start time");

  Trajectory traj;
  traj.variables = std::move(names);
  std::vector<double> x(x0.begin(), x0.end());
  double t = opts.t0;
  traj.append(t, x, mode);

  auto stepper = make_stepper(f, opts.method, opts.tol, opts.max_dt);
  const double span = t_end - opts.t0;
  stepper->initialize(x, t, std::min(1e-6 * std::max(1.0, span), span));
  std::size_t steps = 0;
  try {
    while (t < t_end) {
      auto [t_old, t_new] = stepper->step();
      if (++steps > opts.max_steps) throw IntegrationError("step budget exhausted", t_new);
      if (t_new >= t_end) {
        stepper->state_at(t_end, x);
        t = t_end;
      } else {
        x = stepper->current_state();
        t = t_new;
      }
      for (double v : x)
        if (!std::isfinite(v)) throw IntegrationError("non-finite state", t);
      if (t < t_end && t_new - t_old < 1e-14 * std::max(1.0, std::abs(t)))
        throw IntegrationError("step size underflow", t);
      bool clamped = false;
      for (std::size_t i = 0; i < n; ++i) {
        if (x[i] < opts.clamp) {
          traj.events.push_back({t, "clamp", traj.variables[i] + " " + format_double(x[i])});
          x[i] = opts.clamp;
          clamped = true;
        }
      }
      if (clamped && t < t_end) stepper->initialize(x, t, stepper->current_dt());
      if (opts.record_steps || t >= t_end) traj.append(t, x, mode);
    }
  } catch (const IntegrationError&) {
    throw;
  } catch (const std::runtime_error& e) {
    throw IntegrationError(std::string("integration failed: ") + e.what(), stepper->current_time());
  }
  return traj;
}

Trajectory integrate_full(const OdeSystem& sys, std::span<const double> x0, double t_end, double eps,
                          const IntegrationOptions& opts) {
  if (!(eps > 0)) throw DomainError("epsilon must be positive");
  return integrate_field(make_field(sys, eps), sys.variables(), x0, t_end, opts, "full");
}

double conservation_drift(const OdeSystem& sys, const Trajectory& traj, double eps) {
  double worst = 0.0;
  for (const auto& law : sys.conservation_laws()) {
    std::vector<double> w(law.coeffs.size());
    for (std::size_t i = 0; i < w.size(); ++i)
      w[i] = to_double(law.coeffs[i]) * std::pow(eps, to_double(law.eps_orders[i]));
    for (const auto& x : traj.states) {
      double s = 0.0;
      for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * x[i];
      worst = std::max(worst, std::abs(s - law.total));
    }
  }
  return worst;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_trajectory_csv(const Trajectory& traj, std::ostream& out) {
  out << 't';
  for (const auto& v : traj.variables) out << ',' << v;
  out << ",mode\n";
  for (std::size_t k = 0; k < traj.size(); ++k) {
    out << format_double(traj.times[k]);
    for (double v : traj.states[k]) out << ',' << format_double(v);
    out << ',' << traj.modes[k] << '\n';
  }
}

void write_events_csv(const Trajectory& traj, std::ostream& out) {
  out << "t,kind,detail\n";
  for (const auto& e : traj.events) {
    std::string detail = e.detail;
    std::replace(detail.begin(), detail.end(), ',', ' ');
    out << format_double(e.time) << ',' << e.kind << ',' << detail << '\n';
  }
}

}  // namespace tropical
