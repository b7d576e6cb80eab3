// One PASS/FAIL line per acceptance criterion. Tolerances are fixed here.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "properties.hpp"
#include "tropical/equil.hpp"
#include "tropical/errors.hpp"
#include "tropical/sim.hpp"
#include "tropical/trop.hpp"
#include "tropical/tyson.hpp"

using namespace tropical;

namespace {

constexpr double kRestResidual = 1e-10;
constexpr double kSlopeTarget = -2.0;
constexpr double kSlopeTolerance = 0.3;
constexpr double kErrorWindow = 1.0;
constexpr double kDriftLimit = 1e-6;
constexpr double kVietaTolerance = 1e-12;
constexpr double kFoldTolerance = 1e-3;

const std::string data_dir = TROPICAL_DATA_DIR;

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string vec_str(const ExponentVector& a) {
  std::string s = "(";
  for (std::size_t i = 0; i < a.size(); ++i) s += (i ? "," : "") + to_string(a[i]);
  return s + ")";
}

bool run(int id, const std::string& title, double budget_s, const std::function<Verdict()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Verdict v;
  try {
    v = body();
  } catch (const std::exception& e) {
    v = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_time = secs < budget_s;
  const bool pass = v.pass && in_time;
  std::printf("[%d] %s %s: %s (%.2f s, budget %.0f s)\n", id, pass ? "PASS" : "FAIL", title.c_str(), v.detail.c_str(),
              secs, budget_s);
  std::fflush(stdout);
  return pass;
}

Verdict criterion1() {
  const auto sys = tyson::build(tyson::load_profile(data_dir + "/tyson_profile.json"));
  const auto with_law = all_equilibrations(sys);
  EquilibrationOptions free_opts;
  free_opts.use_conservation = false;
  const auto without_law = all_equilibrations(sys, free_opts);

  const auto case_i = ExponentVector::from_ints({3, 0, 2, 0, 4});
  const auto case_ii = ExponentVector::from_ints({8, 5, 2, 0, -1});
  const bool unique = with_law.size() == 1 && with_law[0].pinned() && with_law[0].a == case_i;

  // Every branch whose law-free solution is the Case II point must die
  // once the conservation law is imposed.
  std::size_t case_ii_branches = 0, survivors = 0;
  for (const auto& b : enumerate_branches(sys)) {
    const auto free = solve_branch(sys, b);
    bool hits = false;
    for (const auto& s : free) hits = hits || (s.pinned() && s.a == case_ii);
    if (!hits) continue;
    ++case_ii_branches;
    if (!solve_branch(sys, b, sys.conservation_laws()).empty()) ++survivors;
  }
  std::string d = std::to_string(with_law.size()) + " solution(s)";
  if (!with_law.empty()) d += ", a=" + vec_str(with_law[0].a);
  d += "; law-free pieces " + std::to_string(without_law.size()) + "; Case II branches " +
       std::to_string(case_ii_branches) + ", feasible under the law " + std::to_string(survivors);
  return {unique && case_ii_branches > 0 && survivors == 0, d};
}

Verdict criterion2() {
  const auto sys = tyson::build(tyson::load_profile(data_dir + "/tyson_profile.json"));
  auto solve = [&](int variant, bool permanency) {
    EquilibrationOptions o;
    o.subset = tyson::variant_subset(variant);
    o.exclusive = true;
    o.permanency = permanency;
    return equilibrate_branches(sys, tyson::variant_branches(sys, variant), o);
  };
  const auto v4 = solve(4, true);
  const auto v3 = solve(3, true);
  const auto v3_raw = solve(3, false);  // feasible, so any rejection is the permanency filter's
  const bool v4_ok = v4.size() == 1 && v4[0].pinned() && v4[0].a == ExponentVector::from_ints({3, 0, 0, 4, 4});
  std::string d = "variant 4: " + std::to_string(v4.size()) + " solution(s)";
  if (!v4.empty()) d += " a=" + vec_str(v4[0].a);
  d += "; variant 3: " + std::to_string(v3_raw.size()) + " piece(s) before permanency, " + std::to_string(v3.size()) +
       " after";
  return {v4_ok && v3.empty() && !v3_raw.empty(), d};
}

Verdict criterion3() {
  std::vector<tyson::Params> profiles{tyson::load_profile(data_dir + "/tyson_profile.json"),
                                      tyson::load_profile(data_dir + "/tyson_wide.json")};
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> factor(std::log(0.2), std::log(5.0));
  for (int k = 0; k < 16; ++k) {
    tyson::Params p = profiles[0];
    for (double* c : {&p.k1, &p.k3, &p.k4, &p.k4p, &p.k6, &p.k8, &p.k9}) *c *= std::exp(factor(rng));
    profiles.push_back(p);
  }
  double worst_residual = 0.0;
  std::size_t checked = 0, agree = 0, skipped = 0;
  for (const auto& p : profiles) {
    const auto red = tyson::reduced_2d(p);
    const auto rp = tyson::refine_rest_point(red, red.rest_point(), p.epsilon);
    const auto f = red.field(rp[0], rp[1], p.epsilon);
    worst_residual = std::max({worst_residual, std::abs(f[0]), std::abs(f[1])});

    const auto field = make_field(red.system, p.epsilon);
    const std::vector<double> x0{rp[0], rp[1]};
    const auto eig = linearize_eigen(field, x0);
    double lead = -INFINITY;
    for (auto e : eig) lead = std::max(lead, e.real());
    // Near-hyperbolic points cannot be settled in a finite horizon.
    if (std::abs(lead) * 1e4 < 20) {
      ++skipped;
      continue;
    }
    const bool stable = lead < 0;
    std::vector<double> start{rp[0] * 1.01, rp[1]};
    IntegrationOptions opts;
    opts.method = Method::stiff;
    opts.tol = 1e-9;
    const auto traj = integrate_field(field, {"y3", "y4"}, start, 1e4, opts);
    double late = 0.0;
    for (std::size_t k = 0; k < traj.size(); ++k)
      if (traj.times[k] >= 9e3)
        late = std::max(late, std::hypot(traj.states[k][0] - rp[0], traj.states[k][1] - rp[1]));
    const bool settled = late < 1e-2 * 0.01 * rp[0];
    ++checked;
    if (settled == stable) ++agree;
  }
  const bool ok = worst_residual <= kRestResidual && checked > 0 && agree == checked;
  return {ok, "max residual " + fmt(worst_residual) + " over " + std::to_string(profiles.size()) +
                  " profiles; stability verdicts " + std::to_string(agree) + "/" + std::to_string(checked) +
                  " agree (" + std::to_string(skipped) + " near-degenerate skipped)"};
}

Verdict criterion4() {
  const auto p = tyson::load_profile(data_dir + "/tyson_wide.json");
  const std::vector<double> eps{0.3, 0.2, 0.15, 0.1};
  const auto fit = period_scaling([&](double e) { return tyson::limit_cycle(p, e).info; }, eps);
  std::string d = "slope " + fmt(fit.slope) + " (target " + fmt(kSlopeTarget) + " +/- " + fmt(kSlopeTolerance) +
                  "); periods";
  for (double v : fit.values) d += " " + fmt(v);
  std::vector<double> hyb;
  for (double e : eps) {
    const auto hc = tyson::hybrid_cycle(p, e);
    hyb.push_back(hc.durations[0] + hc.durations[1] + hc.durations[2]);
  }
  d += "; hybrid-orbit slope " + fmt(fit_loglog(eps, hyb).slope);
  return {std::abs(fit.slope - kSlopeTarget) <= kSlopeTolerance, d};
}

Verdict criterion5() {
  const auto p = tyson::load_profile(data_dir + "/tyson_profile.json");
  const std::vector<double> eps{0.3, 0.2, 0.1};
  std::vector<double> errors;
  for (double e : eps) {
    const auto sys = tyson::build(p);
    const auto x0 = tyson::initial_state(p, e);
    IntegrationOptions fo;
    fo.method = Method::stiff;
    fo.tol = 1e-10;
    const auto full = integrate_full(sys, x0, kErrorWindow, e, fo);
    HybridOptions ho;
    ho.method = Method::stiff;
    ho.tol = 1e-10;
    ho.wall = WallPolicy::equilibrate;
    const auto trop = integrate_hybrid(tropicalize(sys, TropKind::complete), x0, kErrorWindow, e, ho);
    errors.push_back(compare(full, trop).sup_error);
  }
  bool decreasing = true;
  for (std::size_t k = 1; k < errors.size(); ++k) decreasing = decreasing && errors[k] < errors[k - 1];
  const double gamma = fit_loglog(eps, errors).slope;
  std::string d = "sup errors";
  for (double v : errors) d += " " + fmt(v);
  d += "; gamma " + fmt(gamma);
  return {decreasing && gamma > 0, d};
}

std::vector<std::vector<double>> log_bar_cycle(const tyson::FullCycle& fc, double eps) {
  std::vector<std::vector<double>> pts;
  for (const auto& y : fc.period.states) {
    const auto b = tyson::to_bar(y, eps);
    pts.push_back({std::log(b[2]), std::log(b[3])});
  }
  return pts;
}

std::vector<std::vector<double>> log_hybrid(const tyson::HybridCycle& hc) {
  std::vector<std::vector<double>> pts;
  for (const auto& s : densify(hc.orbit.states, 20)) pts.push_back({std::log(s[0]), std::log(s[1])});
  return pts;
}

Verdict criterion6() {
  const auto p = tyson::load_profile(data_dir + "/tyson_profile.json");
  const auto hc = tyson::hybrid_cycle(p, p.epsilon);
  const auto& d = hc.durations;
  const bool ordered = hc.closed && d[0] > d[1] && d[1] > d[2];
  std::vector<double> dist;
  for (double e : {0.2, 0.1}) {
    const auto h = tyson::hybrid_cycle(p, e);
    if (!h.closed) return {false, "hybrid orbit not closed at eps=" + fmt(e)};
    dist.push_back(hausdorff_distance(log_hybrid(h), log_bar_cycle(tyson::limit_cycle(p, e), e)));
  }
  return {ordered && dist[1] < dist[0], "durations (mode1, mode2, mode3) = (" + fmt(d[0]) + ", " + fmt(d[1]) + ", " +
                                            fmt(d[2]) + ") at eps=" + fmt(p.epsilon) +
                                            "; log-Hausdorff eps=0.2: " + fmt(dist[0]) + ", eps=0.1: " + fmt(dist[1])};
}

Verdict criterion7() {
  const auto p = tyson::load_profile(data_dir + "/tyson_profile.json");
  const auto fc = tyson::limit_cycle(p, p.epsilon, 1e-8);
  const double drift = conservation_drift(tyson::build(p), fc.period, p.epsilon);
  return {drift <= kDriftLimit, "drift " + fmt(drift) + " over one period of " + fmt(fc.info.period)};
}

Verdict criterion8() {
  std::vector<properties::Result> results{properties::dom_agreement(81),
                                          properties::equilibration_completeness(82),
                                          properties::renormalization_identity(83),
                                          properties::permanency_grid(84),
                                          properties::finite_difference_thresholds(85)};
  bool ok = true;
  std::string d;
  for (const auto& r : results) {
    ok = ok && r.ok() && r.cases >= 1000;
    if (!d.empty()) d += "; ";
    d += r.name + " " + std::to_string(r.cases - r.failures) + "/" + std::to_string(r.cases);
    if (!r.first_failure.empty()) d += " [" + r.first_failure + "]";
  }
  return {ok, d};
}

Verdict criterion9() {
  const auto p = tyson::load_profile(data_dir + "/tyson_profile.json");
  const auto nf = tyson::normal_form(p);
  double worst = std::abs(tyson::manifold_X(nf.k0 / 2, nf.k0) - 1);
  for (int k = 1; k <= 1000; ++k) {
    const double y = nf.k0 / 2 * k / 1000.0;
    worst = std::max(worst, std::abs(tyson::manifold_X(y, nf.k0) * tyson::manifold_X_plus(y, nf.k0) - 1));
  }
  DaeSystem dae{nf.system(), {0}};
  const double y0 = 0.2 * nf.k0;
  std::vector<double> x0{tyson::manifold_X(y0, nf.k0), y0};
  DaeOptions opts;
  opts.tol = 1e-10;
  const auto traj = integrate_dae(dae, x0, 1e5, p.epsilon, opts);
  const bool fired = traj.count_events("manifold-exit") == 1;
  const double miss = std::abs(traj.states.back()[1] - nf.k0 / 2);
  return {worst <= kVietaTolerance && fired && miss <= kFoldTolerance,
          "max |X(k0/2)-1|, |X*X+ - 1| = " + fmt(worst) + "; fold exit " + (fired ? "fired" : "missing") +
              " at |y-k0/2| = " + fmt(miss)};
}

}  // namespace

int main() {
  int failed = 0;
  failed += !run(1, "full equilibration", 1, criterion1);
  failed += !run(2, "partial equilibrations", 1, criterion2);
  failed += !run(3, "rest point and stability", 10, criterion3);
  failed += !run(4, "period scaling", 120, criterion4);
  failed += !run(5, "tropicalization error scaling", 120, criterion5);
  failed += !run(6, "three-mode hybrid orbit", 120, criterion6);
  failed += !run(7, "conservation", 30, criterion7);
  failed += !run(8, "property suites", 300, criterion8);
  failed += !run(9, "normal-form consistency", 10, criterion9);
  std::printf("%d of 9 criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
