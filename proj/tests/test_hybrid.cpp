#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "tropical/errors.hpp"
#include "tropical/sim.hpp"
#include "tropical/tyson.hpp"

using namespace tropical;

namespace {

MonomialTerm term(double c, long order, std::vector<int> ex) { return {c, Rational(order), std::move(ex)}; }

OdeSystem onevar() {
  std::vector<Equation> eqs(1);
  eqs[0].num = {term(1, 0, {0}), term(-1, 0, {1})};
  return OdeSystem({"x"}, std::move(eqs));
}

OdeSystem toy2() {
  std::vector<Equation> eqs(2);
  eqs[0].num = {term(1, 0, {0, 1}), term(-1, 1, {1, 0})};
  eqs[1].num = {term(1, 1, {0, 0}), term(-1, 0, {0, 1})};
  return OdeSystem({"x", "y"}, std::move(eqs));
}

// Smallest group margin at every recorded mode switch.
double worst_switch_margin(const HybridSystem& h, const Trajectory& traj, double eps) {
  double worst = 0;
  for (const auto& e : traj.events) {
    if (e.kind != "mode-switch") continue;
    const auto it = std::find(traj.times.begin(), traj.times.end(), e.time);
    REQUIRE(it != traj.times.end());
    const auto m = h.group_margins(traj.states[static_cast<std::size_t>(it - traj.times.begin())], eps);
    worst = std::max(worst, *std::min_element(m.begin(), m.end()));
  }
  return worst;
}

}  // namespace

TEST_CASE("single crossover of x' = 1 - x") {
  const auto h = tropicalize(onevar(), TropKind::complete);
  HybridOptions o;
  o.wall = WallPolicy::equilibrate;
  const auto traj = integrate_hybrid(h, std::vector<double>{2.0}, 5.0, 0.1, o);
  REQUIRE(traj.count_events("mode-switch") == 1);
  // x = 2e⁻ᵗ meets the wall at t = ln 2.
  const auto& sw = *std::find_if(traj.events.begin(), traj.events.end(),
                                 [](const Event& e) { return e.kind == "mode-switch"; });
  CHECK(sw.time == doctest::Approx(std::log(2.0)).epsilon(1e-6));
  CHECK(traj.count_events("wall-enter") == 1);
  CHECK(traj.states.back()[0] == doctest::Approx(1.0).epsilon(1e-6));
  for (std::size_t k = 1; k < traj.size(); ++k) CHECK(traj.states[k][0] <= traj.states[k - 1][0] + o.tol);
  CHECK(worst_switch_margin(h, traj, 0.1) <= 10 * o.tol);
}

TEST_CASE("the abort policy reports chattering on the wall") {
  const auto h = tropicalize(onevar(), TropKind::complete);
  HybridOptions o;
  o.wall = WallPolicy::abort;
  o.max_switches = 50;
  try {
    integrate_hybrid(h, std::vector<double>{2.0}, 5.0, 0.1, o);
    FAIL("no exception");
  } catch (const IntegrationError& e) {
    CHECK(std::string(e.what()).find("wall") != std::string::npos);
    CHECK(e.time() == doctest::Approx(std::log(2.0)).epsilon(1e-3));
  }
}

TEST_CASE("two-terms tropicalization of a two-term system is the system") {
  for (const auto& sys : {onevar(), toy2()}) {
    const auto h = tropicalize(sys, TropKind::two_terms);
    const std::vector<double> x0(sys.dimension(), 0.5);
    const auto full = integrate_full(sys, x0, 10.0, 0.1);
    const auto hyb = integrate_hybrid(h, x0, 10.0, 0.1);
    CHECK(hyb.count_events("mode-switch") == 0);
    CHECK(compare(full, hyb).sup_error <= 1e-12);
  }
}

TEST_CASE("switch events sit on the manifold") {
  const auto h = tropicalize(toy2(), TropKind::complete);
  HybridOptions o;
  o.wall = WallPolicy::equilibrate;
  const auto traj = integrate_hybrid(h, std::vector<double>{5.0, 2.0}, 30.0, 0.1, o);
  CHECK(traj.count_events("mode-switch") >= 1);
  CHECK(worst_switch_margin(h, traj, 0.1) <= 10 * o.tol);
  for (const auto& s : traj.states) CHECK((s[0] > 0 && s[1] > 0));
}

TEST_CASE("hybrid-to-full gap shrinks with eps on the cell-cycle model") {
  const tyson::Params p;
  const auto sys = tyson::build(p);
  double prev = INFINITY;
  for (double eps : {0.3, 0.1}) {
    const auto x0 = tyson::initial_state(p, eps);
    IntegrationOptions fo;
    fo.method = Method::stiff;
    fo.tol = 1e-10;
    const auto full = integrate_full(sys, x0, 1.0, eps, fo);
    HybridOptions ho;
    ho.method = Method::stiff;
    ho.tol = 1e-10;
    ho.wall = WallPolicy::equilibrate;
    const auto hyb = integrate_hybrid(tropicalize(sys, TropKind::complete), x0, 1.0, eps, ho);
    const double gap = compare(full, hyb).sup_error;
    CHECK(gap < prev);
    prev = gap;
  }
}

TEST_CASE("hybrid input checks") {
  const auto h = tropicalize(onevar(), TropKind::complete);
  CHECK_THROWS_AS(integrate_hybrid(h, std::vector<double>{-1.0}, 1.0, 0.1), DomainError);
  CHECK_THROWS_AS(integrate_hybrid(h, std::vector<double>{1.0}, 1.0, 0.0), DomainError);
}
