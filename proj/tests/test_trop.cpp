#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <thread>

#include "oracle.hpp"
#include "tropical/errors.hpp"
#include "tropical/trop.hpp"
#include "tropical/tyson.hpp"

using namespace tropical;

namespace {

MonomialTerm term(double c, long order, std::vector<int> ex) { return {c, Rational(order), std::move(ex)}; }

OdeSystem onevar() {
  std::vector<Equation> eqs(1);
  eqs[0].num = {term(1, 0, {0}), term(-1, 0, {1})};
  return OdeSystem({"x"}, std::move(eqs));
}

}  // namespace

TEST_CASE("dom") {
  SUBCASE("singleton") {
    const TermList t{term(-2, 1, {3})};
    const auto r = dom(t, std::vector<double>{0.7}, 0.2);
    CHECK(r.index == 0);
    CHECK_FALSE(r.tie);
    CHECK(r.value == doctest::Approx(-2 * 0.2 * std::pow(0.7, 3)));
  }
  SUBCASE("magnitudes decide, not signs") {
    const TermList t{term(3, 0, {1, 0}), term(-5, 0, {0, 1})};
    auto r = dom(t, std::vector<double>{1, 1}, 1.0);
    CHECK(r.index == oracle::brute_force_dom(t, std::vector<double>{1, 1}, 1.0));
    CHECK(r.index == 1);
    CHECK(r.value == doctest::Approx(-5));
    r = dom(t, std::vector<double>{10, 1}, 1.0);
    CHECK(r.index == oracle::brute_force_dom(t, std::vector<double>{10, 1}, 1.0));
    CHECK(r.index == 0);
    CHECK(r.value == doctest::Approx(30));
  }
  SUBCASE("equal magnitudes tie to the lowest index") {
    const TermList t{term(2, 0, {0}), term(-2, 0, {0}), term(2, 0, {0})};
    const auto r = dom(t, std::vector<double>{4.0}, 0.5);
    CHECK(r.index == 0);
    CHECK(r.tie);
  }
  SUBCASE("orders down to eps^-6 stay finite in log space") {
    const TermList t{term(1, -6, {40}), term(1, 6, {-40})};
    const auto r = dom(t, std::vector<double>{1e-3}, 1e-3);
    CHECK(std::isfinite(r.log_magnitude));
    CHECK(r.index == 1);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(dom(TermList{}, std::vector<double>{1.0}, 0.1), DomainError);
    CHECK_THROWS_AS(dom(TermList{term(1, 0, {1})}, std::vector<double>{0.0}, 0.1), DomainError);
  }
}

TEST_CASE("manifold_margin") {
  const TermList t{term(1, 0, {0}), term(-1, 0, {1})};
  CHECK(manifold_margin(t, std::vector<double>{1.0}, 0.1) == doctest::Approx(0.0));
  CHECK(manifold_margin(t, std::vector<double>{std::exp(1.0)}, 0.1) == doctest::Approx(1.0));
  CHECK(manifold_margin(t, std::vector<double>{std::exp(-2.5)}, 0.1) == doctest::Approx(2.5));
  CHECK_THROWS_AS(manifold_margin(TermList{term(1, 0, {0})}, std::vector<double>{1.0}, 0.1), DomainError);

  // Continuity through the crossing: small steps give small margin changes.
  double prev = manifold_margin(t, std::vector<double>{0.5}, 0.1);
  for (double x = 0.5; x <= 2.0; x += 1e-3) {
    const double m = manifold_margin(t, std::vector<double>{x}, 0.1);
    CHECK(std::abs(m - prev) <= 3e-3);
    prev = m;
  }
}

TEST_CASE("tropicalizations of x' = 1 - x") {
  const auto complete = tropicalize(onevar(), TropKind::complete);
  const auto two = tropicalize(onevar(), TropKind::two_terms);
  for (double x : {0.1, 0.5, 0.9, 1.5, 2.0, 7.0}) {
    const std::vector<double> s{x};
    CHECK(complete.field_at(s, 0.1)[0] == doctest::Approx(x < 1 ? 1.0 : -x));
    CHECK(two.field_at(s, 0.1)[0] == doctest::Approx(1 - x));
  }
  CHECK(complete.field_at(std::vector<double>{2.0}, 0.1)[0] == doctest::Approx(-2.0));
  const auto at_wall = complete.sample(std::vector<double>{1.0}, 0.1);
  CHECK(at_wall.tie);
  CHECK(complete.field_at(std::vector<double>{1.0}, 0.1)[0] == doctest::Approx(1.0));
  CHECK(complete.signature_at(std::vector<double>{0.5}, 0.1).equations[0].num == std::vector<std::size_t>{0});
  CHECK(complete.signature_at(std::vector<double>{2.0}, 0.1).equations[0].num == std::vector<std::size_t>{1});
}

TEST_CASE("field_at equals the mode truncation") {
  const tyson::Params p;
  const auto sys = tyson::build(p);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (auto kind : {TropKind::complete, TropKind::two_terms}) {
    const auto h = tropicalize(sys, kind);
    for (int k = 0; k < 100; ++k) {
      auto y = tyson::initial_state(p, 0.1);
      for (auto& v : y) v *= std::exp(2 * u(rng));
      const auto sig = h.signature_at(y, 0.1);
      const auto exact = evaluate_field(*h.mode_system(sig), y, 0.1);
      const auto f = h.field_at(y, 0.1);
      for (std::size_t i = 0; i < f.size(); ++i) CHECK(f[i] == exact[i]);
    }
  }
}

TEST_CASE("rational equations tropicalize numerator and denominator separately") {
  // x' = (1 + x²) / (ε + x)
  std::vector<Equation> eqs(1);
  eqs[0].num = {term(1, 0, {0}), term(1, 0, {2})};
  eqs[0].den = {term(1, 1, {0}), term(1, 0, {1})};
  const OdeSystem sys({"x"}, std::move(eqs));
  const auto h = tropicalize(sys, TropKind::complete);
  CHECK(h.field_at(std::vector<double>{10.0}, 0.1)[0] == doctest::Approx(10.0));   // x²/x
  CHECK(h.field_at(std::vector<double>{0.5}, 0.1)[0] == doctest::Approx(2.0));     // 1/x
  CHECK(h.field_at(std::vector<double>{0.01}, 0.1)[0] == doctest::Approx(10.0));   // 1/ε
  CHECK_THROWS_AS(tropicalize(sys, TropKind::two_terms), ModelError);
}

TEST_CASE("two-terms needs production and degradation") {
  std::vector<Equation> eqs(1);
  eqs[0].num = {term(1, 0, {0}), term(2, 1, {1})};
  CHECK_THROWS_AS(tropicalize(OdeSystem({"x"}, std::move(eqs)), TropKind::two_terms), ModelError);
}

TEST_CASE("fast mode of the cell-cycle model") {
  const tyson::Params p;
  const double eps = 0.1;
  const auto sys = tyson::build(p);
  const auto h = tropicalize(sys, TropKind::complete);
  // Mid-jump: ȳ₃ well above the fold, ȳ₄ still O(1).
  auto y = tyson::from_bar(std::vector<double>{1.0, 0.6, 10.0, 0.25, 1.0}, eps);
  y[4] = std::pow(eps, 4) * p.k1 / (p.k3 * y[1]);
  const auto sig = h.signature_at(y, eps);
  CHECK(sig.equations[2].num == std::vector<std::size_t>{1});  // ε⁻²k₄y₃²y₄ drives y₃
  CHECK(sig.equations[3].num == std::vector<std::size_t>{1});  // and drains y₄
  const auto f = h.field_at(y, eps);
  CHECK(f[3] == doctest::Approx(-p.k4 * std::pow(eps, -2) * y[3] * y[2] * y[2]));
  const auto full = evaluate_field(sys, y, eps);
  for (std::size_t i : {2u, 3u}) {
    CHECK(std::signbit(f[i]) == std::signbit(full[i]));
    CHECK(std::abs(std::log(std::abs(f[i] / full[i]))) < std::log(2.0));
  }
}

TEST_CASE("signature properties") {
  SUBCASE("constant near the rest point") {
    const tyson::Params p;
    const double eps = 0.1;
    const auto h = tropicalize(tyson::build(p), TropKind::two_terms);
    const auto red = tyson::reduced_2d(p);
    const auto rest = red.rest_point();
    const auto bar = red.reconstruct(rest[0], rest[1], eps);
    const auto y0 = tyson::from_bar(bar, eps);
    const auto sig = h.signature_at(y0, eps);
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-0.01, 0.01);
    for (int k = 0; k < 200; ++k) {
      auto y = y0;
      for (auto& v : y) v *= std::exp(u(rng));
      CHECK(h.signature_at(y, eps) == sig);
    }
  }
  SUBCASE("invariant under scaling one equation") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(0.1, 10.0);
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
      oracle::RandomSystemSpec spec;
      spec.n = 2;
      spec.max_terms = 4;
      spec.seed = seed;
      const auto sys = oracle::random_system(spec);
      auto eqs = sys.equations();
      const double c = u(rng);
      for (auto& t : eqs[seed % 2].num) t.coeff *= c;
      const OdeSystem scaled(sys.variables(), eqs);
      for (auto kind : {TropKind::complete, TropKind::two_terms}) {
        const auto a = tropicalize(sys, kind), b = tropicalize(scaled, kind);
        for (int k = 0; k < 20; ++k) {
          const std::vector<double> x{u(rng), u(rng)};
          CHECK(a.signature_at(x, 0.3) == b.signature_at(x, 0.3));
        }
      }
    }
  }
  SUBCASE("complete dominant is one of the two-terms dominants") {
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> u(0.1, 10.0);
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
      oracle::RandomSystemSpec spec;
      spec.n = 2;
      spec.max_terms = 4;
      spec.seed = seed;
      const auto sys = oracle::random_system(spec);
      const auto c = tropicalize(sys, TropKind::complete), t = tropicalize(sys, TropKind::two_terms);
      for (int k = 0; k < 20; ++k) {
        const std::vector<double> x{u(rng), u(rng)};
        const auto sc = c.sample(x, 0.3);
        if (sc.tie) continue;
        const auto st = t.signature_at(x, 0.3);
        for (std::size_t i = 0; i < 2; ++i) {
          const auto& pair = st.equations[i].num;
          CHECK(std::find(pair.begin(), pair.end(), sc.signature.equations[i].num[0]) != pair.end());
        }
      }
    }
  }
  SUBCASE("complete field dominates every single monomial") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(0.1, 10.0);
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
      oracle::RandomSystemSpec spec;
      spec.n = 3;
      spec.max_terms = 4;
      spec.seed = seed;
      const auto sys = oracle::random_system(spec);
      const auto h = tropicalize(sys, TropKind::complete);
      const std::vector<double> x{u(rng), u(rng), u(rng)};
      const auto f = h.field_at(x, 0.2);
      for (std::size_t i = 0; i < 3; ++i)
        for (const auto& term : sys.equation(i).num)
          CHECK(std::abs(f[i]) >= std::abs(monomial_value(term, x, 0.2)) * (1 - 1e-12));
    }
  }
}

TEST_CASE("mode cache is shared and safe to fill concurrently") {
  const tyson::Params p;
  const auto h = tropicalize(tyson::build(p), TropKind::complete);
  const auto y = tyson::initial_state(p, 0.1);
  const auto sig = h.signature_at(y, 0.1);
  std::vector<std::shared_ptr<const OdeSystem>> got(8);
  std::vector<std::thread> threads;
  for (std::size_t k = 0; k < got.size(); ++k) threads.emplace_back([&, k] { got[k] = h.mode_system(sig); });
  for (auto& t : threads) t.join();
  const auto copy = h;
  for (const auto& g : got) CHECK(*g == *copy.mode_system(sig));
  CHECK(sig.id().find(',') == std::string::npos);
}
