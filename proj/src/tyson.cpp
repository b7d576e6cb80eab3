#include "tropical/tyson.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "tropical/errors.hpp"

namespace tropical::tyson {

namespace {

MonomialTerm term(double c, long order, std::vector<int> ex) { return {c, Rational(order), std::move(ex)}; }

const std::vector<std::pair<const char*, double Params::*>>& constant_fields() {
  static const std::vector<std::pair<const char*, double Params::*>> fields = {
      {"k1", &Params::k1}, {"k3", &Params::k3}, {"k4", &Params::k4}, {"k4p", &Params::k4p},
      {"k6", &Params::k6}, {"k8", &Params::k8}, {"k9", &Params::k9}};
  return fields;
}

}  // namespace

void Params::validate() const {
  for (const auto& [name, field] : constant_fields())
    if (!(this->*field > 0) || !std::isfinite(this->*field))
      throw ModelError(std::string("rate constant ") + name + " must be positive");
  if (!(epsilon > 0)) throw ModelError("epsilon must be positive");
}

Params parse_profile(std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text.begin(), json_text.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("profile syntax error: ") + e.what(), e.byte);
  }
  Params p;
  if (auto it = doc.find("epsilon"); it != doc.end()) p.epsilon = it->get<double>();
  if (auto it = doc.find("constants"); it != doc.end()) {
    for (const auto& [name, field] : constant_fields())
      if (auto c = it->find(name); c != it->end()) p.*field = c->get<double>();
    for (const auto& [key, value] : it->items()) {
      bool known = false;
      for (const auto& [name, field] : constant_fields()) known = known || key == name;
      if (!known) throw ModelError("unknown rate constant '" + key + "' in profile");
    }
  }
  p.validate();
  return p;
}

Params load_profile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ModelError("cannot open profile '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_profile(buf.str());
}

std::string serialize_profile(const Params& p, const std::string& name) {
  nlohmann::json doc;
  doc["name"] = name;
  doc["epsilon"] = p.epsilon;
  for (const auto& [key, field] : constant_fields()) doc["constants"][key] = p.*field;
  return doc.dump(2) + "\n";
}

OdeSystem build(const Params& p) {
  p.validate();
  std::vector<Equation> eqs(5);
  eqs[0].num = {term(p.k9, -3, {0, 1, 0, 0, 0}), term(-p.k8, -6, {1, 0, 0, 0, 0}), term(p.k6, 0, {0, 0, 1, 0, 0})};
  eqs[1].num = {term(p.k8, -6, {1, 0, 0, 0, 0}), term(-p.k9, -3, {0, 1, 0, 0, 0}), term(-p.k3, -2, {0, 1, 0, 0, 1})};
  eqs[2].num = {term(p.k4p, 2, {0, 0, 0, 1, 0}), term(p.k4, -2, {0, 0, 2, 1, 0}), term(-p.k6, 0, {0, 0, 1, 0, 0})};
  eqs[3].num = {term(-p.k4p, 2, {0, 0, 0, 1, 0}), term(-p.k4, -2, {0, 0, 2, 1, 0}), term(p.k3, -2, {0, 1, 0, 0, 1})};
  eqs[4].num = {term(p.k1, 2, {0, 0, 0, 0, 0}), term(-p.k3, -2, {0, 1, 0, 0, 1})};
  ConservationLaw law{{1, 1, 1, 1, 0}, 1.0, {}};
  return OdeSystem({"y1", "y2", "y3", "y4", "y5"}, std::move(eqs), {law}, p.epsilon);
}

std::vector<std::size_t> variant_subset(int variant) {
  if (variant < 1 || variant > 4) throw std::invalid_argument("variant must be 1..4");
  return {0, 1, variant <= 2 ? std::size_t{2} : std::size_t{3}, 4};
}

std::vector<BranchChoice> variant_branches(const OdeSystem& sys, int variant) {
  const auto subset = variant_subset(variant);
  const std::size_t eq = subset[2];
  const TermPair wanted = (variant % 2 == 1) ? TermPair{0, 2} : TermPair{1, 2};
  std::vector<BranchChoice> out;
  for (auto& b : enumerate_branches(sys, subset))
    if (b.pairs[eq] && *b.pairs[eq] == wanted) out.push_back(std::move(b));
  return out;
}

ExponentSolution known_exponents(Case c) {
  const auto sys = build(Params{});
  std::vector<ExponentSolution> sols;
  ExponentVector expected;
  if (c == Case::I) {
    sols = all_equilibrations(sys);
    expected = ExponentVector::from_ints({3, 0, 2, 0, 4});
  } else {
    EquilibrationOptions opts;
    opts.subset = variant_subset(4);
    opts.exclusive = true;
    sols = equilibrate_branches(sys, variant_branches(sys, 4), opts);
    expected = ExponentVector::from_ints({3, 0, 0, 4, 4});
  }
  for (auto& s : sols)
    if (s.pinned() && s.a == expected) return s;
  throw std::logic_error("stored exponents no longer reproduced by the equilibration solver");
}

std::array<double, 2> Reduced::rest_point() const {
  const double y3 = params.k1 / params.k6;
  return {y3, params.k1 / (params.k4p + params.k4 * y3 * y3)};
}

std::array<double, 2> Reduced::field(double y3, double y4, double eps) const {
  const auto& p = params;
  const double prod = p.k4p * y4 + p.k4 * y4 * y3 * y3;
  return {prod - p.k6 * y3, eps * eps * (p.k1 - prod)};
}

std::array<double, 5> Reduced::reconstruct(double y3, double y4, double eps) const {
  const auto& p = params;
  const double e2 = eps * eps, e3 = e2 * eps, e5 = e3 * e2, e8 = e5 * e3;
  const double y2 = (1 - y4 - e2 * y3 - e8 * p.k6 * y3 / p.k8) / (1 + e3 * p.k9 / p.k8);
  const double y5 = p.k1 / (p.k3 * y2);
  const double y1 = (p.k9 * y2 + p.k6 * e5 * y3) / p.k8;
  return {y1, y2, y3, y4, y5};
}

Reduced reduced_2d(const Params& p) {
  p.validate();
  std::vector<Equation> eqs(2);
  eqs[0].num = {term(p.k4p, 0, {0, 1}), term(p.k4, 0, {2, 1}), term(-p.k6, 0, {1, 0})};
  eqs[1].num = {term(p.k1, 2, {0, 0}), term(-p.k4p, 2, {0, 1}), term(-p.k4, 2, {2, 1})};
  return {p, OdeSystem({"y3", "y4"}, std::move(eqs), {}, p.epsilon), true};
}

std::array<double, 2> refine_rest_point(const Reduced& r, std::array<double, 2> guess, double eps, int max_iter) {
  const auto& p = r.params;
  auto [y3, y4] = guess;
  for (int it = 0; it < max_iter; ++it) {
    const auto f = r.field(y3, y4, eps);
    // Rows: ∂/∂(y3, y4) of the two components.
    const double a = 2 * p.k4 * y4 * y3 - p.k6, b = p.k4p + p.k4 * y3 * y3;
    const double c = -eps * eps * 2 * p.k4 * y4 * y3, d = -eps * eps * b;
    const double det = a * d - b * c;
    if (det == 0 || !std::isfinite(det)) break;
    const double d3 = (f[0] * d - b * f[1]) / det;
    const double d4 = (a * f[1] - c * f[0]) / det;
    y3 -= d3;
    y4 -= d4;
    if (std::abs(d3) <= 1e-16 * std::abs(y3) && std::abs(d4) <= 1e-16 * std::abs(y4)) break;
  }
  return {y3, y4};
}

namespace {

double discriminant_root(double y, double k0) {
  if (!(k0 > 0)) throw DomainError("k0 must be positive");
  const double top = k0 / 2;
  if (!(y > 0) || y > top * (1 + 1e-12)) throw DomainError("y must lie in (0, k0/2]");
  return std::sqrt(std::max(0.0, k0 * k0 - 4 * y * y));
}

}  // namespace

double manifold_X(double y, double k0) {
  // Same root as (k0 − √D)/(2y), written without cancellation at small y.
  return 2 * y / (k0 + discriminant_root(y, k0));
}

double manifold_X_plus(double y, double k0) { return (k0 + discriminant_root(y, k0)) / (2 * y); }

OdeSystem NormalForm::system() const {
  std::vector<Equation> eqs(2);
  eqs[0].num = {term(1, 0, {0, 1}), term(1, 0, {2, 1}), term(-k0, 0, {1, 0})};
  eqs[1].num = {term(k1, 2, {0, 0}), term(-1, 2, {0, 1}), term(-1, 2, {2, 1})};
  return OdeSystem({"x", "y"}, std::move(eqs));
}

NormalForm normal_form(const Params& p) {
  p.validate();
  NormalForm nf;
  nf.s = std::sqrt(p.k4p / p.k4);
  nf.time_scale = p.k4p;
  nf.k0 = p.k6 / p.k4p;
  nf.k1 = p.k1 / (p.k4p * nf.s);
  return nf;
}

OdeSystem renormalized(const Params& p, Case c) {
  const auto a = c == Case::I ? ExponentVector::from_ints({3, 0, 2, 0, 4}) : ExponentVector::from_ints({3, 0, 0, 4, 4});
  return renormalize(build(p), a);
}

std::array<double, 2> fold_point(const Params& p) {
  const auto nf = normal_form(p);
  return nf.from_normal(1.0, nf.k0 / 2);
}

namespace {

constexpr std::array<int, 5> case_i_exponents{3, 0, 2, 0, 4};

}  // namespace

std::vector<double> to_bar(std::span<const double> y, double eps) {
  if (y.size() != 5) throw DomainError("expected five species");
  std::vector<double> out(5);
  for (std::size_t i = 0; i < 5; ++i) out[i] = y[i] / std::pow(eps, case_i_exponents[i]);
  return out;
}

std::vector<double> from_bar(std::span<const double> ybar, double eps) {
  if (ybar.size() != 5) throw DomainError("expected five species");
  std::vector<double> out(5);
  for (std::size_t i = 0; i < 5; ++i) out[i] = ybar[i] * std::pow(eps, case_i_exponents[i]);
  return out;
}

std::vector<double> initial_state(const Params& p, double eps) {
  const auto red = reduced_2d(p);
  const auto rest = red.rest_point();
  const auto bar = red.reconstruct(0.7 * rest[0], rest[1], eps);
  if (!(bar[1] > 0)) throw DomainError("reconstruction leaves y2 non-positive; profile outside the reduced regime");
  return from_bar(bar, eps);
}

FullCycle limit_cycle(const Params& p, double eps, double tol) {
  const auto hc = hybrid_cycle(p, eps);
  const double guess = hc.closed ? hc.durations[0] + hc.durations[1] + hc.durations[2] : 0.0;
  const double horizon = guess > 0 ? 15 * guess : 200 / (eps * eps);
  IntegrationOptions opts;
  opts.method = Method::stiff;
  opts.tol = tol;
  FullCycle fc;
  fc.run = integrate_full(build(p), initial_state(p, eps), horizon, eps, opts);
  fc.info = detect_cycle(fc.run, 0.5, 2);
  if (fc.info.status != CycleInfo::Status::cycle)
    throw DomainError("no converged limit cycle at eps=" + format_double(eps));
  const double t1 = fc.info.peak_times.back(), t0 = t1 - fc.info.period;
  fc.period.variables = fc.run.variables;
  fc.period.append(t0, fc.run.interpolate(t0), "full");
  for (std::size_t k = 0; k < fc.run.size(); ++k)
    if (fc.run.times[k] > t0 && fc.run.times[k] < t1) fc.period.append(fc.run.times[k], fc.run.states[k], "full");
  fc.period.append(t1, fc.run.interpolate(t1), "full");
  return fc;
}

}  // namespace tropical::tyson
