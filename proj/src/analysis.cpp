#include <algorithm>
#include <cmath>
#include <exception>

#include <Eigen/Eigenvalues>

#include "tropical/errors.hpp"
#include "tropical/sim.hpp"

namespace tropical {

namespace {

// Vertex of the parabola through three (t, v) points.
double refine_peak(double t0, double v0, double t1, double v1, double t2, double v2) {
  const double d0 = (v1 - v0) / (t1 - t0);
  const double d1 = (v2 - v1) / (t2 - t1);
  const double a = (d1 - d0) / (t2 - t0);
  if (!(a < 0)) return t1;
  const double tv = 0.5 * (t0 + t1) - d0 / (2 * a);
  return std::clamp(tv, t0, t2);
}

}  // namespace

CycleInfo detect_cycle(const Trajectory& traj, double transient_fraction, std::size_t coordinate) {
  if (traj.size() < 3) throw DomainError("trajectory too short for cycle detection");
  if (!(transient_fraction >= 0 && transient_fraction < 1)) throw DomainError("transient fraction must be in [0, 1)");
  const std::size_t n = traj.states.front().size();
  if (coordinate >= n) throw DomainError("cycle coordinate out of range");

  const double t_cut = traj.times.front() + transient_fraction * (traj.times.back() - traj.times.front());
  std::size_t first = static_cast<std::size_t>(
      std::lower_bound(traj.times.begin(), traj.times.end(), t_cut) - traj.times.begin());
  if (traj.size() - first < 3) throw DomainError("too few samples after the transient");

  CycleInfo info;
  std::vector<double> lo(n, INFINITY), hi(n, -INFINITY), mean(n, 0.0);
  for (std::size_t k = first; k < traj.size(); ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      lo[i] = std::min(lo[i], traj.states[k][i]);
      hi[i] = std::max(hi[i], traj.states[k][i]);
      mean[i] += traj.states[k][i];
    }
  }
  bool flat = true;
  for (std::size_t i = 0; i < n; ++i) {
    mean[i] /= static_cast<double>(traj.size() - first);
    info.amplitude.push_back(hi[i] - lo[i]);
    flat = flat && hi[i] - lo[i] < 1e-6 * std::abs(mean[i]);
  }
  if (flat) {
    info.status = CycleInfo::Status::rest_point;
    info.rest_point = traj.states.back();
    info.converged = true;
    return info;
  }

  // One peak per excursion above the mid level; the first excursion counts
  // only if it starts after the transient cut.
  const double level = lo[coordinate] + 0.5 * (hi[coordinate] - lo[coordinate]);
  std::vector<double> peaks, peak_heights;
  bool above = traj.states[first][coordinate] > level;
  bool complete = !above;
  std::size_t best = first;
  for (std::size_t k = first + 1; k < traj.size(); ++k) {
    const double v = traj.states[k][coordinate];
    if (v > level) {
      if (!above) {
        above = true;
        complete = true;
        best = k;
      } else if (v > traj.states[best][coordinate]) {
        best = k;
      }
      continue;
    }
    if (above && complete && best > 0 && best + 1 < traj.size()) {
      const double tp = refine_peak(traj.times[best - 1], traj.states[best - 1][coordinate], traj.times[best],
                                    traj.states[best][coordinate], traj.times[best + 1],
                                    traj.states[best + 1][coordinate]);
      peaks.push_back(tp);
      peak_heights.push_back(traj.states[best][coordinate]);
    }
    above = false;
  }
  info.peak_times = peaks;
  if (peaks.size() < 3) return info;
  const std::size_t m = peaks.size();
  const double p1 = peaks[m - 1] - peaks[m - 2];
  const double p0 = peaks[m - 2] - peaks[m - 3];
  info.period = p1;
  const double range = hi[coordinate] - lo[coordinate];
  info.converged = std::abs(p1 - p0) <= 0.01 * p1 &&
                   std::abs(peak_heights[m - 1] - peak_heights[m - 2]) <= 0.01 * range;
  info.status = info.converged ? CycleInfo::Status::cycle : CycleInfo::Status::inconclusive;
  return info;
}

Comparison compare(const Trajectory& a, const Trajectory& b, std::size_t grid_points,
                   const std::function<std::vector<double>(const std::vector<double>&)>& transform) {
  if (a.empty() || b.empty()) throw DomainError("cannot compare empty trajectories");
  if (a.states.front().size() != b.states.front().size()) throw DomainError("trajectories differ in dimension");
  const double t0 = std::max(a.times.front(), b.times.front());
  const double t1 = std::min(a.times.back(), b.times.back());
  if (t1 < t0) throw DomainError("trajectories have disjoint time ranges");
  if (grid_points < 2) grid_points = 2;
  Comparison c;
  for (std::size_t k = 0; k < grid_points; ++k) {
    const double t = t0 + (t1 - t0) * static_cast<double>(k) / static_cast<double>(grid_points - 1);
    auto xa = a.interpolate(t);
    auto xb = b.interpolate(t);
    if (transform) {
      xa = transform(xa);
      xb = transform(xb);
    }
    double e = 0.0;
    for (std::size_t i = 0; i < xa.size(); ++i) e = std::max(e, std::abs(xa[i] - xb[i]));
    c.grid.push_back(t);
    c.errors.push_back(e);
    c.sup_error = std::max(c.sup_error, e);
  }
  return c;
}

std::vector<std::complex<double>> linearize_eigen(const VectorField& f, std::span<const double> point, double h) {
  const auto j1 = finite_difference_jacobian(f, point, h);
  const auto j2 = finite_difference_jacobian(f, point, h / 2);
  const Eigen::MatrixXd rich = (4 * j2 - j1) / 3;
  const double scale = std::max(rich.cwiseAbs().maxCoeff(), 1e-300);
  if (!rich.allFinite() || (j2 - rich).cwiseAbs().maxCoeff() > 1e-3 * scale)
    throw DomainError("field is not smooth at the linearization point");
  Eigen::EigenSolver<Eigen::MatrixXd> es(rich, false);
  std::vector<std::complex<double>> out;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) out.push_back(es.eigenvalues()(i));
  std::sort(out.begin(), out.end(), [](auto x, auto y) {
    return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag();
  });
  return out;
}

std::vector<std::complex<double>> linearize_eigen(const HybridSystem& hsys, std::span<const double> point, double eps,
                                                  double h) {
  const auto s = hsys.sample(point, eps);
  const auto margins = hsys.group_margins(point, eps);
  const double min_margin = margins.empty() ? INFINITY : *std::min_element(margins.begin(), margins.end());
  if (s.tie || min_margin < 1e3 * h) throw DomainError("point lies on a tropical manifold; the field is ambiguous");
  return linearize_eigen(make_field(*hsys.mode_system(s.signature), eps), point, h);
}

double hausdorff_distance(const std::vector<std::vector<double>>& a, const std::vector<std::vector<double>>& b) {
  if (a.empty() || b.empty()) throw DomainError("Hausdorff distance of an empty set");
  auto directed = [](const auto& from, const auto& to) {
    double worst = 0.0;
    for (const auto& p : from) {
      double best = INFINITY;
      for (const auto& q : to) {
        if (p.size() != q.size()) throw DomainError("point dimensions differ");
        double d = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i) d += (p[i] - q[i]) * (p[i] - q[i]);
        best = std::min(best, d);
      }
      worst = std::max(worst, best);
    }
    return std::sqrt(worst);
  };
  return std::max(directed(a, b), directed(b, a));
}

std::vector<std::vector<double>> densify(const std::vector<std::vector<double>>& path, std::size_t per_segment) {
  if (per_segment == 0) throw DomainError("per_segment must be positive");
  std::vector<std::vector<double>> out;
  for (std::size_t k = 0; k + 1 < path.size(); ++k) {
    for (std::size_t j = 0; j < per_segment; ++j) {
      const double s = static_cast<double>(j) / static_cast<double>(per_segment);
      std::vector<double> p(path[k].size());
      for (std::size_t i = 0; i < p.size(); ++i) p[i] = (1 - s) * path[k][i] + s * path[k + 1][i];
      out.push_back(std::move(p));
    }
  }
  if (!path.empty()) out.push_back(path.back());
  return out;
}

ScalingFit fit_loglog(std::span<const double> eps, std::span<const double> values) {
  if (eps.size() != values.size() || eps.size() < 2) throw DomainError("fit needs at least two matched points");
  ScalingFit fit;
  fit.eps.assign(eps.begin(), eps.end());
  fit.values.assign(values.begin(), values.end());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(eps.size());
  for (std::size_t i = 0; i < eps.size(); ++i) {
    if (!(eps[i] > 0) || !(values[i] > 0)) throw DomainError("log-log fit needs positive data");
    const double x = std::log(eps[i]), y = std::log(values[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double den = m * sxx - sx * sx;
  if (den == 0) throw DomainError("log-log fit needs distinct eps values");
  fit.slope = (m * sxy - sx * sy) / den;
  fit.intercept = (sy - fit.slope * sx) / m;
  return fit;
}

ScalingFit period_scaling(const std::function<CycleInfo(double eps)>& period_at, std::span<const double> eps_list,
                          bool parallel) {
  std::vector<CycleInfo> infos(eps_list.size());
  std::exception_ptr failure;
  const auto count = static_cast<long>(eps_list.size());
#pragma omp parallel for schedule(dynamic) if (parallel)
  for (long k = 0; k < count; ++k) {
    try {
      infos[static_cast<std::size_t>(k)] = period_at(eps_list[static_cast<std::size_t>(k)]);
    } catch (...) {
#pragma omp critical(tropical_period_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  std::vector<double> periods;
  for (std::size_t k = 0; k < infos.size(); ++k) {
    if (infos[k].status != CycleInfo::Status::cycle)
      throw DomainError("no limit cycle detected at eps=" + format_double(eps_list[k]));
    periods.push_back(infos[k].period);
  }
  return fit_loglog(eps_list, periods);
}

}  // namespace tropical
