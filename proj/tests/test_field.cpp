#include <doctest.h>

#include <cmath>
#include <random>

#include "oracle.hpp"
#include "tropical/field.hpp"
#include "tropical/tyson.hpp"

using namespace tropical;

TEST_CASE("compiled field matches direct evaluation") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.2, 3.0);
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    oracle::RandomSystemSpec spec;
    spec.n = 1 + seed % 3;
    spec.exponent_min = -2;
    spec.exponent_max = 3;
    spec.seed = seed;
    const auto sys = oracle::random_system(spec);
    for (double eps : {0.5, 0.1}) {
      const auto f = make_field(sys, eps);
      std::vector<double> x(spec.n);
      for (auto& v : x) v = u(rng);
      const auto direct = evaluate_field(sys, x, eps);
      const auto compiled = f(x);
      for (std::size_t i = 0; i < spec.n; ++i)
        CHECK(compiled[i] == doctest::Approx(direct[i]).epsilon(1e-13));
    }
  }
}

TEST_CASE("analytic Jacobian against central differences") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.5, 2.0);
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    oracle::RandomSystemSpec spec;
    spec.n = 2 + seed % 2;
    spec.exponent_min = -1;
    spec.exponent_max = 2;
    spec.seed = seed;
    const auto f = make_field(oracle::random_system(spec), 0.3);
    std::vector<double> x(spec.n);
    for (auto& v : x) v = u(rng);
    Eigen::MatrixXd exact;
    f.jacobian(x, exact);
    const Eigen::MatrixXd approx = finite_difference_jacobian(f, x);
    CHECK((exact - approx).cwiseAbs().maxCoeff() <= 1e-6 * std::max(1.0, exact.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("rational Jacobian") {
  // x' = x/(1 + x): derivative 1/(1 + x)².
  const auto sys = parse_model(R"({"variables": ["x"], "equations": [{
    "num": [{"coeff": 1.0, "eps_order": 0, "exponents": [1]}],
    "den": [{"coeff": 1.0, "eps_order": 0, "exponents": [0]},
            {"coeff": 1.0, "eps_order": 0, "exponents": [1]}]}]})");
  const auto f = make_field(sys, 0.1);
  Eigen::MatrixXd jac;
  f.jacobian(std::vector<double>{3.0}, jac);
  CHECK(jac(0, 0) == doctest::Approx(1.0 / 16));
}

TEST_CASE("raw cell-cycle Jacobian spans the graded rates") {
  const tyson::Params p;
  const double eps = 0.1;
  const auto f = make_field(tyson::build(p), eps);
  const auto y = tyson::initial_state(p, eps);
  Eigen::MatrixXd jac;
  f.jacobian(y, jac);
  // ∂(y₁')/∂y₁ = −ε⁻⁶k₈.
  CHECK(jac(0, 0) == doctest::Approx(-p.k8 / std::pow(eps, 6)));
  const Eigen::MatrixXd approx = finite_difference_jacobian(f, y);
  CHECK((jac - approx).cwiseAbs().maxCoeff() <= 1e-5 * jac.cwiseAbs().maxCoeff());
}
