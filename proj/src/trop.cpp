#include "tropical/trop.hpp"

#include <cmath>
#include <limits>
#include <mutex>
#include <unordered_map>

#include "tropical/errors.hpp"

namespace tropical {

namespace {

bool near_equal(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b)); }

std::vector<double> logs_of(std::span<const double> x) {
  std::vector<double> lx(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0)) throw DomainError("Dom needs a positive state");
    lx[i] = std::log(x[i]);
  }
  return lx;
}

DomResult dom_over(const TermList& terms, const std::vector<std::size_t>& subset, std::span<const double> x,
                   std::span<const double> log_x, double eps) {
  if (subset.empty()) throw DomainError("Dom of an empty term list");
  const double le = std::log(eps);
  DomResult best;
  best.log_magnitude = log_magnitude(terms[subset[0]], log_x, le);
  for (std::size_t k = 1; k < subset.size(); ++k) {
    const double l = log_magnitude(terms[subset[k]], log_x, le);
    if (l > best.log_magnitude && !near_equal(l, best.log_magnitude)) {
      best.index = k;
      best.log_magnitude = l;
      best.tie = false;
    } else if (near_equal(l, best.log_magnitude)) {
      best.tie = true;
    }
  }
  best.value = monomial_value(terms[subset[best.index]], x, eps);
  best.index = subset[best.index];
  return best;
}

double margin_over(const TermList& terms, const std::vector<std::size_t>& subset, std::span<const double> log_x,
                   double eps) {
  const double le = std::log(eps);
  double first = -std::numeric_limits<double>::infinity(), second = first;
  for (auto j : subset) {
    const double l = log_magnitude(terms[j], log_x, le);
    if (l > first) {
      second = first;
      first = l;
    } else if (l > second) {
      second = l;
    }
  }
  return first - second;
}

std::vector<std::size_t> iota(std::size_t n) {
  std::vector<std::size_t> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = i;
  return v;
}

const TermList& group_terms(const OdeSystem& sys, const DomGroup& g) {
  const auto& eq = sys.equation(g.equation);
  return g.denominator ? eq.den : eq.num;
}

}  // namespace

DomResult dom(const TermList& terms, std::span<const double> x, double eps) {
  if (terms.empty()) throw DomainError("Dom of an empty term list");
  if (!(eps > 0.0)) throw DomainError("epsilon must be positive");
  auto lx = logs_of(x);
  return dom_over(terms, iota(terms.size()), x, lx, eps);
}

double manifold_margin(const TermList& terms, std::span<const double> x, double eps) {
  if (terms.size() < 2) throw DomainError("a margin needs at least two terms");
  auto lx = logs_of(x);
  return margin_over(terms, iota(terms.size()), lx, eps);
}

std::string DominanceSignature::id() const {
  std::string s;
  for (std::size_t i = 0; i < equations.size(); ++i) {
    if (i) s += ';';
    const auto& m = equations[i];
    for (std::size_t k = 0; k < m.num.size(); ++k) {
      if (k) s += '+';
      s += std::to_string(m.num[k]);
    }
    for (std::size_t k = 0; k < m.den.size(); ++k) {
      s += k ? '+' : '/';
      s += std::to_string(m.den[k]);
    }
  }
  return s;
}

struct HybridSystem::Cache {
  std::mutex mutex;
  std::unordered_map<std::string, std::shared_ptr<const OdeSystem>> modes;
};

HybridSystem::HybridSystem(OdeSystem source, TropKind kind)
    : source_(std::make_shared<const OdeSystem>(std::move(source))), kind_(kind), cache_(std::make_shared<Cache>()) {
  const auto& sys = *source_;
  for (std::size_t i = 0; i < sys.dimension(); ++i) {
    const auto& eq = sys.equation(i);
    const auto& name = sys.variables()[i];
    if (eq.num.empty()) throw ModelError("equation for " + name + " has no terms to tropicalize");
    if (kind == TropKind::complete) {
      groups_.push_back({i, false, iota(eq.num.size())});
      if (eq.is_rational()) groups_.push_back({i, true, iota(eq.den.size())});
      continue;
    }
    if (eq.is_rational())
      throw ModelError("two-terms tropicalization needs polynomial equations; " + name + " has a denominator");
    DomGroup pos{i, false, {}}, neg{i, false, {}};
    for (std::size_t j = 0; j < eq.num.size(); ++j) (eq.num[j].coeff > 0 ? pos : neg).terms.push_back(j);
    if (pos.terms.empty() || neg.terms.empty())
      throw ModelError("equation for " + name + " needs at least one production and one degradation term");
    groups_.push_back(std::move(pos));
    groups_.push_back(std::move(neg));
  }
}

SignatureSample HybridSystem::sample(std::span<const double> x, double eps) const {
  if (x.size() != source_->dimension()) throw DomainError("state dimension mismatch");
  if (!(eps > 0.0)) throw DomainError("epsilon must be positive");
  auto lx = logs_of(x);
  SignatureSample s;
  s.signature.equations.resize(source_->dimension());
  for (const auto& g : groups_) {
    auto r = dom_over(group_terms(*source_, g), g.terms, x, lx, eps);
    auto& m = s.signature.equations[g.equation];
    (g.denominator ? m.den : m.num).push_back(r.index);
    s.tie = s.tie || r.tie;
    s.winners.push_back(r);
  }
  return s;
}

std::vector<double> HybridSystem::field_at(std::span<const double> x, double eps) const {
  return evaluate_field(*mode_system(signature_at(x, eps)), x, eps);
}

std::vector<double> HybridSystem::group_margins(std::span<const double> x, double eps) const {
  auto lx = logs_of(x);
  std::vector<double> out;
  out.reserve(groups_.size());
  for (const auto& g : groups_) {
    out.push_back(g.terms.size() < 2 ? std::numeric_limits<double>::infinity()
                                     : margin_over(group_terms(*source_, g), g.terms, lx, eps));
  }
  return out;
}

std::shared_ptr<const OdeSystem> HybridSystem::mode_system(const DominanceSignature& sig) const {
  const auto key = sig.id();
  {
    std::lock_guard lock(cache_->mutex);
    if (auto it = cache_->modes.find(key); it != cache_->modes.end()) return it->second;
  }
  const auto& sys = *source_;
  if (sig.equations.size() != sys.dimension()) throw DomainError("signature does not match the system");
  std::vector<Equation> eqs;
  for (std::size_t i = 0; i < sys.dimension(); ++i) {
    const auto& eq = sys.equation(i);
    const auto& m = sig.equations[i];
    auto keep = [](const TermList& all, const std::vector<std::size_t>& idx) {
      std::vector<bool> on(all.size(), false);
      for (auto j : idx) {
        if (j >= all.size()) throw DomainError("signature index out of range");
        on[j] = true;
      }
      TermList out;
      for (std::size_t j = 0; j < all.size(); ++j)
        if (on[j]) out.push_back(all[j]);
      return out;
    };
    eqs.push_back({keep(eq.num, m.num), keep(eq.den, m.den)});
  }
  auto built = std::make_shared<const OdeSystem>(sys.variables(), std::move(eqs), sys.conservation_laws(), sys.epsilon());
  std::lock_guard lock(cache_->mutex);
  return cache_->modes.emplace(key, std::move(built)).first->second;
}

HybridSystem tropicalize(const OdeSystem& sys, TropKind kind) { return HybridSystem(sys, kind); }

TropKind parse_trop_kind(std::string_view name) {
  if (name == "complete") return TropKind::complete;
  if (name == "two-terms" || name == "two_terms") return TropKind::two_terms;
  throw std::invalid_argument("unknown tropicalization kind '" + std::string(name) + "'");
}

std::string to_string(TropKind kind) { return kind == TropKind::complete ? "complete" : "two-terms"; }

}  // namespace tropical
