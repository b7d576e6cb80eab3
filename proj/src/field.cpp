#include "tropical/field.hpp"

#include <cmath>

namespace tropical {

namespace {

double ipow(double x, int p) {
  switch (p) {
    case 1: return x;
    case 2: return x * x;
    case -1: return 1.0 / x;
    default: return std::pow(x, p);
  }
}

}  // namespace

CompiledSystem::CompiledSystem(const OdeSystem& sys, double eps) {
  auto compile = [eps](const TermList& terms) {
    std::vector<Term> out;
    for (const auto& t : terms) {
      Term c{t.coeff * std::pow(eps, to_double(t.eps_order)), {}};
      for (std::size_t l = 0; l < t.exponents.size(); ++l)
        if (t.exponents[l] != 0) c.powers.emplace_back(l, t.exponents[l]);
      out.push_back(std::move(c));
    }
    return out;
  };
  for (const auto& eq : sys.equations()) equations_.push_back({compile(eq.num), compile(eq.den)});
}

double CompiledSystem::value(const Term& t, std::span<const double> x) {
  double v = t.coeff;
  for (const auto& [l, p] : t.powers) v *= ipow(x[l], p);
  return v;
}

void CompiledSystem::add_gradient(const Term& t, std::span<const double> x, double scale,
                                  Eigen::Ref<Eigen::RowVectorXd, 0, Eigen::InnerStride<>> row) {
  for (std::size_t k = 0; k < t.powers.size(); ++k) {
    const auto [l, p] = t.powers[k];
    double d = t.coeff * p * ipow(x[l], p - 1);
    for (std::size_t m = 0; m < t.powers.size(); ++m)
      if (m != k) d *= ipow(x[t.powers[m].first], t.powers[m].second);
    row(static_cast<Eigen::Index>(l)) += scale * d;
  }
}

void CompiledSystem::eval(std::span<const double> x, std::span<double> dx) const {
  for (std::size_t i = 0; i < equations_.size(); ++i) {
    const auto& eq = equations_[i];
    double p = 0.0;
    for (const auto& t : eq.num) p += value(t, x);
    if (!eq.den.empty()) {
      double q = 0.0;
      for (const auto& t : eq.den) q += value(t, x);
      p /= q;
    }
    dx[i] = p;
  }
}

void CompiledSystem::jacobian(std::span<const double> x, Eigen::MatrixXd& jac) const {
  const auto n = static_cast<Eigen::Index>(equations_.size());
  jac.setZero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& eq = equations_[static_cast<std::size_t>(i)];
    if (eq.den.empty()) {
      for (const auto& t : eq.num) add_gradient(t, x, 1.0, jac.row(i));
      continue;
    }
    double p = 0.0, q = 0.0;
    for (const auto& t : eq.num) p += value(t, x);
    for (const auto& t : eq.den) q += value(t, x);
    // (P'Q − PQ')/Q²
    for (const auto& t : eq.num) add_gradient(t, x, 1.0 / q, jac.row(i));
    for (const auto& t : eq.den) add_gradient(t, x, -p / (q * q), jac.row(i));
  }
}

VectorField make_field(const OdeSystem& sys, double eps) {
  auto compiled = std::make_shared<const CompiledSystem>(sys, eps);
  VectorField f;
  f.dimension = compiled->dimension();
  f.eval = [compiled](std::span<const double> x, std::span<double> dx) { compiled->eval(x, dx); };
  f.jacobian = [compiled](std::span<const double> x, Eigen::MatrixXd& jac) { compiled->jacobian(x, jac); };
  return f;
}

Eigen::MatrixXd finite_difference_jacobian(const VectorField& f, std::span<const double> x, double h) {
  const std::size_t n = f.dimension;
  Eigen::MatrixXd jac(n, n);
  std::vector<double> xp(x.begin(), x.end()), xm(x.begin(), x.end()), fp(n), fm(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double step = h * (x[j] != 0.0 ? std::abs(x[j]) : 1.0);
    xp[j] = x[j] + step;
    xm[j] = x[j] - step;
    f.eval(xp, fp);
    f.eval(xm, fm);
    for (std::size_t i = 0; i < n; ++i)
      jac(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = (fp[i] - fm[i]) / (2.0 * step);
    xp[j] = xm[j] = x[j];
  }
  return jac;
}

}  // namespace tropical
