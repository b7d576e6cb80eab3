#include <cmath>
#include <algorithm>
#include <deque>
#include <limits>
#include <map>
#include <unordered_map>

#include "tropical/errors.hpp"
#include "tropical/sim.hpp"

namespace tropical {

namespace {

using Walls = std::map<std::size_t, std::pair<std::size_t, std::size_t>>;

class HybridRunner {
 public:
  HybridRunner(const HybridSystem& hs, double eps, const HybridOptions& opts) : hs_(hs), eps_(eps), opts_(opts) {}

  Trajectory run(std::span<const double> x0, double t_end);

 private:
  const VectorField& field_for(const DominanceSignature& sig) {
    const auto key = sig.id();
    auto it = fields_.find(key);
    if (it == fields_.end()) it = fields_.emplace(key, make_field(*hs_.mode_system(sig), eps_)).first;
    return it->second;
  }

  DominanceSignature compose(const DominanceSignature& nat, const Walls& walls) const {
    DominanceSignature sig = nat;
    for (const auto& [e, pq] : walls) sig.equations[e].num = {pq.first, pq.second};
    return sig;
  }

  // d(L_q − L_p)/dt when equation e keeps only term `use`.
  double drift(const DominanceSignature& nat, const Walls& walls, std::size_t e, std::size_t use, std::size_t p,
               std::size_t q, std::span<const double> x) {
    auto sig = compose(nat, walls);
    sig.equations[e].num = {use};
    const auto dx = field_for(sig)(x);
    const auto& num = hs_.source().equation(e).num;
    double s = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) s += (num[q].exponents[k] - num[p].exponents[k]) * dx[k] / x[k];
    return s;
  }

  bool attracting(const DominanceSignature& nat, const Walls& walls, std::size_t e, std::span<const double> x) {
    const auto [p, q] = walls.at(e);
    return drift(nat, walls, e, p, p, q, x) > 0 && drift(nat, walls, e, q, p, q, x) < 0;
  }

  bool consistent(std::span<const double> x) {
    const auto s = hs_.sample(x, eps_).signature;
    for (std::size_t i = 0; i < s.equations.size(); ++i) {
      auto w = walls_.find(i);
      if (w == walls_.end()) {
        if (!(s.equations[i] == nat_.equations[i])) return false;
        continue;
      }
      const auto r = s.equations[i].num.front();
      if (r != w->second.first && r != w->second.second) return false;
      if (!attracting(nat_, walls_, i, x)) return false;
    }
    return true;
  }

  bool wall_candidate(std::size_t e) const {
    if (opts_.wall != WallPolicy::equilibrate || hs_.kind() != TropKind::complete) return false;
    return !hs_.source().equation(e).is_rational();
  }

  double changed_margin(const SignatureSample& before, std::span<const double> x) const {
    const auto after = hs_.sample(x, eps_);
    const auto margins = hs_.group_margins(x, eps_);
    double m = 0.0;
    for (std::size_t g = 0; g < margins.size(); ++g)
      if (after.winners[g].index != before.winners[g].index) m = std::max(m, margins[g]);
    return m;
  }

  // Picks the mode at a switch point and logs wall transitions.
  void reselect(std::span<const double> x, double t, Trajectory& traj);

  const HybridSystem& hs_;
  double eps_;
  HybridOptions opts_;
  std::unordered_map<std::string, VectorField> fields_;
  DominanceSignature nat_;
  Walls walls_;
};

void HybridRunner::reselect(std::span<const double> x, double t, Trajectory& traj) {
  const auto next = hs_.sample(x, eps_).signature;
  Walls kept;
  for (const auto& [e, pq] : walls_) {
    const auto r = next.equations[e].num.front();
    Walls probe = walls_;
    if ((r == pq.first || r == pq.second) && attracting(next, probe, e, x)) {
      kept.emplace(e, pq);
    } else {
      traj.events.push_back({t, "wall-exit", hs_.source().variables()[e]});
    }
  }
  for (std::size_t e = 0; e < next.equations.size(); ++e) {
    if (kept.count(e) || walls_.count(e) || !wall_candidate(e)) continue;
    const auto p = nat_.equations[e].num.front();
    const auto q = next.equations[e].num.front();
    const auto& num = hs_.source().equation(e).num;
    if (p == q || num[p].sign() == num[q].sign()) continue;
    Walls probe = kept;
    probe.emplace(e, std::minmax(p, q));
    if (attracting(next, probe, e, x)) {
      kept = std::move(probe);
      traj.events.push_back({t, "wall-enter", hs_.source().variables()[e] + " " + std::to_string(p) + "+" +
                                                  std::to_string(q)});
    }
  }
  nat_ = next;
  walls_ = std::move(kept);
}

Trajectory HybridRunner::run(std::span<const double> x0, double t_end) {
  const std::size_t n = hs_.source().dimension();
  if (x0.size() != n) throw DomainError("initial state dimension mismatch");
  for (double v : x0)
    if (!(v > 0)) throw DomainError("initial state must be positive");
  if (!(t_end > opts_.t0)) throw DomainError("t_end must exceed the start time");
  const double window = opts_.wall_window > 0 ? opts_.wall_window : 1e-3 * (t_end - opts_.t0);

  Trajectory traj;
  traj.variables = hs_.source().variables();
  std::vector<double> x(x0.begin(), x0.end());
  double t = opts_.t0;
  nat_ = hs_.sample(x, eps_).signature;
  walls_.clear();
  traj.append(t, x, compose(nat_, walls_).id());

  double dt = std::min(1e-6 * std::max(1.0, t_end - t), t_end - t);
  std::deque<double> switches;
  std::size_t steps = 0;

  while (t < t_end) {
    auto sig = compose(nat_, walls_);
    const VectorField& f = field_for(sig);
    auto stepper = make_stepper(f, opts_.method, opts_.tol, opts_.max_dt);
    stepper->initialize(x, t, dt);
    bool switched = false;
    try {
      while (t < t_end && !switched) {
        auto [t_old, t_new] = stepper->step();
        if (++steps > opts_.max_steps) throw IntegrationError("step budget exhausted", t_new);
        dt = stepper->current_dt();
        double t_hi = std::min(t_new, t_end);
        std::vector<double> x_hi;
        stepper->state_at(t_hi, x_hi);
        for (double v : x_hi)
          if (!std::isfinite(v)) throw IntegrationError("non-finite state", t_hi);
        bool positive = true;
        for (double v : x_hi) positive = positive && v > 0;

        if (positive && consistent(x_hi)) {
          t = t_hi;
          x = std::move(x_hi);
          bool clamped = false;
          for (std::size_t i = 0; i < n; ++i) {
            if (x[i] < opts_.clamp) {
              traj.events.push_back({t, "clamp", traj.variables[i]});
              x[i] = opts_.clamp;
              clamped = true;
            }
          }
          if (opts_.record_steps || t >= t_end) traj.append(t, x, sig.id());
          if (clamped) stepper->initialize(x, t, dt);
          continue;
        }

        // Locate the first inconsistency in (t_old, t_hi].
        const auto before = hs_.sample(x, eps_);
        double lo = t_old;
        for (;;) {
          const double width = t_hi - lo;
          const double scale = std::max(1.0, std::abs(t_hi));
          const bool time_ok = width <= opts_.tol * scale;
          const bool margin_ok = !positive || changed_margin(before, x_hi) <= opts_.tol;
          if ((time_ok && margin_ok) || width <= 8 * std::numeric_limits<double>::epsilon() * scale) break;
          const double mid = 0.5 * (lo + t_hi);
          std::vector<double> x_mid;
          stepper->state_at(mid, x_mid);
          bool mid_ok = true;
          for (double v : x_mid) mid_ok = mid_ok && v > 0;
          if (mid_ok && consistent(x_mid)) {
            lo = mid;
          } else {
            t_hi = mid;
            x_hi = std::move(x_mid);
            positive = mid_ok;
          }
        }
        if (!positive) {
          for (auto& v : x_hi) v = std::max(v, opts_.clamp);
          traj.events.push_back({t_hi, "clamp", "state left the positive orthant"});
        }
        const std::string old_id = sig.id();
        reselect(x_hi, t_hi, traj);
        const std::string new_id = compose(nat_, walls_).id();
        t = t_hi;
        x = std::move(x_hi);
        if (new_id != old_id) {
          traj.events.push_back({t, "mode-switch", old_id + " -> " + new_id});
          switches.push_back(t);
          while (!switches.empty() && switches.front() < t - window) switches.pop_front();
          if (switches.size() > opts_.max_switches)
            throw IntegrationError("wall: " + std::to_string(switches.size()) +
                                       " mode switches within a window of " + format_double(window) +
                                       " (chattering on a tropical manifold)",
                                   t);
        }
        traj.append(t, x, new_id);
        switched = true;
      }
    } catch (const IntegrationError&) {
      throw;
    } catch (const std::runtime_error& e) {
      throw IntegrationError(std::string("integration failed: ") + e.what(), t);
    }
  }
  return traj;
}

}  // namespace

Trajectory integrate_hybrid(const HybridSystem& hsys, std::span<const double> x0, double t_end, double eps,
                            const HybridOptions& opts) {
  if (!(eps > 0)) throw DomainError("epsilon must be positive");
  HybridRunner runner(hsys, eps, opts);
  return runner.run(x0, t_end);
}

}  // namespace tropical
