#include "tropical/model.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "tropical/errors.hpp"

namespace tropical {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Rational helpers

std::string to_string(const Rational& r) {
  if (is_integer(r)) return boost::multiprecision::numerator(r).str();
  return boost::multiprecision::numerator(r).str() + "/" +
         boost::multiprecision::denominator(r).str();
}

Rational parse_rational(std::string_view text) {
  auto parse_int = [](std::string_view s) {
    if (s.empty()) throw std::invalid_argument("empty integer");
    std::size_t start = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    if (start == s.size()) throw std::invalid_argument("sign without digits");
    for (std::size_t i = start; i < s.size(); ++i)
      if (s[i] < '0' || s[i] > '9')
        throw std::invalid_argument("not an integer: '" + std::string(s) + "'");
    return boost::multiprecision::cpp_int(std::string(s[0] == '+' ? s.substr(1) : s));
  };
  auto slash = text.find('/');
  if (slash == std::string_view::npos) return Rational(parse_int(text));
  auto den = parse_int(text.substr(slash + 1));
  if (den == 0) throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
  return Rational(parse_int(text.substr(0, slash)), den);
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

bool is_integer(const Rational& r) { return boost::multiprecision::denominator(r) == 1; }

ExponentVector ExponentVector::from_ints(std::initializer_list<long> ints) {
  RationalVector v;
  v.reserve(ints.size());
  for (long i : ints) v.emplace_back(i);
  return ExponentVector(std::move(v));
}

// ---------------------------------------------------------------------------
// OdeSystem

OdeSystem::OdeSystem(std::vector<std::string> variables, std::vector<Equation> equations,
                     std::vector<ConservationLaw> conservation_laws,
                     std::optional<double> epsilon)
    : variables_(std::move(variables)),
      equations_(std::move(equations)),
      laws_(std::move(conservation_laws)),
      epsilon_(epsilon) {
  for (auto& law : laws_)
    if (law.eps_orders.empty()) law.eps_orders.assign(law.coeffs.size(), Rational(0));
  validate();
}

void OdeSystem::validate() const {
  const std::size_t n = variables_.size();
  if (n == 0) throw ModelError("model declares no variables");
  std::set<std::string> seen;
  for (const auto& v : variables_) {
    if (v.empty()) throw ModelError("variable names must be nonempty");
    if (!seen.insert(v).second) throw ModelError("duplicate variable name '" + v + "'");
  }
  if (equations_.size() != n)
    throw ModelError("dimension mismatch: " + std::to_string(n) + " variables but " +
                     std::to_string(equations_.size()) + " equations");
  auto check_terms = [n](const TermList& terms, const std::string& where) {
    for (std::size_t j = 0; j < terms.size(); ++j) {
      const auto& t = terms[j];
      if (t.coeff == 0.0 || !std::isfinite(t.coeff))
        throw ModelError(where + "[" + std::to_string(j) + "]: coefficient must be finite and nonzero");
      if (t.exponents.size() != n)
        throw ModelError("dimension mismatch at " + where + "[" + std::to_string(j) + "]: exponent vector has " +
                         std::to_string(t.exponents.size()) + " entries, system has " +
                         std::to_string(n) + " variables");
    }
  };
  for (std::size_t i = 0; i < n; ++i) {
    const auto& eq = equations_[i];
    check_terms(eq.num, "equations[" + std::to_string(i) + "].num");
    check_terms(eq.den, "equations[" + std::to_string(i) + "].den");
  }
  for (std::size_t k = 0; k < laws_.size(); ++k) {
    const auto& law = laws_[k];
    const std::string where = "conservation_laws[" + std::to_string(k) + "]";
    if (law.coeffs.size() != n)
      throw ModelError(where + ": expected " + std::to_string(n) + " coefficients");
    if (law.eps_orders.size() != n)
      throw ModelError(where + ": expected " + std::to_string(n) + " eps orders");
    bool any = false;
    for (const auto& c : law.coeffs) any = any || c != 0;
    if (!any) throw ModelError(where + ": all coefficients are zero");
    if (!(law.total > 0.0) || !std::isfinite(law.total))
      throw ModelError(where + ": total must be positive");
  }
  if (epsilon_ && !(*epsilon_ > 0.0)) throw ModelError("epsilon must be positive");
}

bool OdeSystem::is_polynomial() const {
  for (const auto& eq : equations_)
    if (eq.is_rational()) return false;
  return true;
}

std::size_t OdeSystem::term_count() const {
  std::size_t count = 0;
  for (const auto& eq : equations_) count += eq.num.size() + eq.den.size();
  return count;
}

std::optional<std::size_t> OdeSystem::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < variables_.size(); ++i)
    if (variables_[i] == name) return i;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Parsing and serialization

namespace {

Rational rational_from_json(const json& j, const std::string& where) {
  if (j.is_number_integer()) return Rational(j.get<long long>());
  if (j.is_string()) {
    try {
      return parse_rational(j.get<std::string>());
    } catch (const std::invalid_argument& e) {
      throw ModelError(where + ": " + e.what());
    }
  }
  if (j.is_number_float()) {
    double d = j.get<double>();
    if (d == std::floor(d) && std::abs(d) < 9e15) return Rational(static_cast<long long>(d));
    throw ModelError(where + ": expected an integer or a \"p/q\" string");
  }
  throw ModelError(where + ": expected an integer or a \"p/q\" string");
}

json rational_to_json(const Rational& r) {
  if (is_integer(r)) {
    auto num = boost::multiprecision::numerator(r);
    if (num >= std::numeric_limits<long long>::min() && num <= std::numeric_limits<long long>::max())
      return json(num.convert_to<long long>());
  }
  return json(to_string(r));
}

const json& require(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) throw ModelError(where + ": expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw ModelError(where + ": missing key '" + key + "'");
  return *it;
}

TermList terms_from_json(const json& arr, const std::string& where) {
  if (!arr.is_array()) throw ModelError(where + ": expected an array of terms");
  TermList terms;
  for (std::size_t j = 0; j < arr.size(); ++j) {
    const std::string at = where + "[" + std::to_string(j) + "]";
    const auto& t = arr[j];
    MonomialTerm term;
    const auto& c = require(t, "coeff", at);
    if (!c.is_number()) throw ModelError(at + ".coeff: expected a number");
    term.coeff = c.get<double>();
    if (term.coeff == 0.0) throw ModelError(at + ".coeff: zero coefficient");
    term.eps_order = rational_from_json(require(t, "eps_order", at), at + ".eps_order");
    const auto& ex = require(t, "exponents", at);
    if (!ex.is_array()) throw ModelError(at + ".exponents: expected an integer array");
    for (const auto& e : ex) {
      if (!e.is_number_integer()) throw ModelError(at + ".exponents: expected integers");
      term.exponents.push_back(e.get<int>());
    }
    terms.push_back(std::move(term));
  }
  return terms;
}

json terms_to_json(const TermList& terms) {
  json arr = json::array();
  for (const auto& t : terms) {
    json jt;
    jt["coeff"] = t.coeff;
    jt["eps_order"] = rational_to_json(t.eps_order);
    jt["exponents"] = t.exponents;
    arr.push_back(std::move(jt));
  }
  return arr;
}

}  // namespace

OdeSystem parse_model(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("syntax error: ") + e.what(), e.byte);
  }
  if (!doc.is_object()) throw ModelError("model document must be a JSON object");

  std::vector<std::string> variables;
  const auto& vars = require(doc, "variables", "model");
  if (!vars.is_array()) throw ModelError("variables: expected an array of names");
  for (const auto& v : vars) {
    if (!v.is_string()) throw ModelError("variables: names must be strings");
    variables.push_back(v.get<std::string>());
  }

  std::vector<Equation> equations;
  const auto& eqs = require(doc, "equations", "model");
  if (!eqs.is_array()) throw ModelError("equations: expected an array");
  for (std::size_t i = 0; i < eqs.size(); ++i) {
    const std::string at = "equations[" + std::to_string(i) + "]";
    Equation eq;
    if (eqs[i].is_object()) {
      eq.num = terms_from_json(require(eqs[i], "num", at), at + ".num");
      eq.den = terms_from_json(require(eqs[i], "den", at), at + ".den");
      if (eq.den.empty()) throw ModelError(at + ".den: denominator must be nonempty");
    } else {
      eq.num = terms_from_json(eqs[i], at);
    }
    equations.push_back(std::move(eq));
  }

  std::vector<ConservationLaw> laws;
  if (auto it = doc.find("conservation_laws"); it != doc.end()) {
    if (!it->is_array()) throw ModelError("conservation_laws: expected an array");
    for (std::size_t k = 0; k < it->size(); ++k) {
      const std::string at = "conservation_laws[" + std::to_string(k) + "]";
      const auto& jl = (*it)[k];
      ConservationLaw law;
      const auto& cs = require(jl, "coeffs", at);
      if (!cs.is_array()) throw ModelError(at + ".coeffs: expected an array");
      for (const auto& c : cs) law.coeffs.push_back(rational_from_json(c, at + ".coeffs"));
      const auto& total = require(jl, "total", at);
      if (!total.is_number()) throw ModelError(at + ".total: expected a number");
      law.total = total.get<double>();
      if (auto eo = jl.find("eps_orders"); eo != jl.end()) {
        if (!eo->is_array()) throw ModelError(at + ".eps_orders: expected an array");
        for (const auto& o : *eo) law.eps_orders.push_back(rational_from_json(o, at + ".eps_orders"));
      }
      laws.push_back(std::move(law));
    }
  }

  std::optional<double> epsilon;
  if (auto it = doc.find("epsilon"); it != doc.end() && !it->is_null()) {
    if (!it->is_number()) throw ModelError("epsilon: expected a number");
    epsilon = it->get<double>();
  }
  return OdeSystem(std::move(variables), std::move(equations), std::move(laws), epsilon);
}

OdeSystem load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ModelError("cannot open model file '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_model(buf.str());
}

std::string serialize_model(const OdeSystem& sys) {
  json doc;
  doc["variables"] = sys.variables();
  json eqs = json::array();
  for (const auto& eq : sys.equations()) {
    if (eq.is_rational()) {
      eqs.push_back({{"num", terms_to_json(eq.num)}, {"den", terms_to_json(eq.den)}});
    } else {
      eqs.push_back(terms_to_json(eq.num));
    }
  }
  doc["equations"] = std::move(eqs);
  json laws = json::array();
  for (const auto& law : sys.conservation_laws()) {
    json jl;
    jl["coeffs"] = json::array();
    for (const auto& c : law.coeffs) jl["coeffs"].push_back(rational_to_json(c));
    jl["total"] = law.total;
    bool nonzero = false;
    for (const auto& o : law.eps_orders) nonzero = nonzero || o != 0;
    if (nonzero) {
      jl["eps_orders"] = json::array();
      for (const auto& o : law.eps_orders) jl["eps_orders"].push_back(rational_to_json(o));
    }
    laws.push_back(std::move(jl));
  }
  doc["conservation_laws"] = std::move(laws);
  if (sys.epsilon()) doc["epsilon"] = *sys.epsilon();
  return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Numerics

double log_magnitude(const MonomialTerm& term, std::span<const double> log_x, double log_eps) {
  double s = std::log(std::abs(term.coeff)) + to_double(term.eps_order) * log_eps;
  for (std::size_t l = 0; l < term.exponents.size(); ++l)
    if (term.exponents[l] != 0) s += term.exponents[l] * log_x[l];
  return s;
}

double monomial_value(const MonomialTerm& term, std::span<const double> x, double eps) {
  double v = term.coeff * std::pow(eps, to_double(term.eps_order));
  for (std::size_t l = 0; l < term.exponents.size(); ++l)
    if (term.exponents[l] != 0) v *= std::pow(x[l], term.exponents[l]);
  return v;
}

double evaluate_terms(const TermList& terms, std::span<const double> x, double eps) {
  double s = 0.0;
  for (const auto& t : terms) s += monomial_value(t, x, eps);
  return s;
}

std::vector<double> evaluate_field(const OdeSystem& sys, std::span<const double> x, double eps) {
  const std::size_t n = sys.dimension();
  if (x.size() != n)
    throw DomainError("state has " + std::to_string(x.size()) + " entries, system has " + std::to_string(n));
  if (!(eps > 0.0)) throw DomainError("epsilon must be positive");
  for (std::size_t i = 0; i < n; ++i)
    if (!(x[i] > 0.0))
      throw DomainError("nonpositive state: " + sys.variables()[i] + " = " + std::to_string(x[i]));
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& eq = sys.equation(i);
    double p = evaluate_terms(eq.num, x, eps);
    if (eq.is_rational()) {
      double q = evaluate_terms(eq.den, x, eps);
      if (q == 0.0) throw DomainError("denominator of equation for " + sys.variables()[i] + " vanishes");
      p /= q;
    }
    out[i] = p;
  }
  return out;
}

Rational term_order(const MonomialTerm& term, const ExponentVector& a) {
  Rational s = term.eps_order;
  for (std::size_t l = 0; l < term.exponents.size(); ++l)
    if (term.exponents[l] != 0) s += term.exponents[l] * a[l];
  return s;
}

OdeSystem renormalize(const OdeSystem& sys, const ExponentVector& a) {
  if (!sys.is_polynomial())
    throw ModelError("renormalize requires a polynomial system; multiply rational equations through by their denominators first");
  const std::size_t n = sys.dimension();
  if (a.size() != n) throw ModelError("exponent vector length does not match the system");
  std::vector<Equation> eqs = sys.equations();
  for (std::size_t i = 0; i < n; ++i)
    for (auto& t : eqs[i].num) t.eps_order = term_order(t, a) - a[i];
  std::vector<ConservationLaw> laws = sys.conservation_laws();
  for (auto& law : laws)
    for (std::size_t i = 0; i < n; ++i)
      if (law.coeffs[i] != 0) law.eps_orders[i] += a[i];
  return OdeSystem(sys.variables(), std::move(eqs), std::move(laws), sys.epsilon());
}

InferredGrading infer_eps_order(double value, double eps) {
  if (value == 0.0 || !std::isfinite(value)) throw DomainError("cannot grade a zero or non-finite constant");
  if (!(eps > 0.0) || eps == 1.0) throw DomainError("grading needs 0 < eps != 1");
  const double order = std::round(std::log(std::abs(value)) / std::log(eps));
  InferredGrading g;
  g.eps_order = Rational(static_cast<long long>(order));
  g.coeff = value / std::pow(eps, order);
  std::ostringstream msg;
  msg << "inferred eps_order " << order << " for constant " << value << " at eps=" << eps
      << " (coefficient " << g.coeff << "); declare the split explicitly if this grading is not intended";
  g.warning = msg.str();
  return g;
}

}  // namespace tropical
