#include "tropical/polyhedron.hpp"

#include <algorithm>
#include <stdexcept>

namespace tropical {

namespace {

using Kind = LinearConstraint::Kind;

Rational floor_rational(const Rational& r) {
  using boost::multiprecision::cpp_int;
  cpp_int n = numerator(r);
  cpp_int d = denominator(r);
  cpp_int q = n / d;
  if (n % d != 0 && n < 0) q -= 1;
  return Rational(q);
}

Rational ceil_rational(const Rational& r) { return -floor_rational(-r); }

struct Ineq {
  RationalVector coeffs;
  Rational constant;
  bool strict = false;
};

bool constant_ok(const Ineq& c) { return c.strict ? c.constant > 0 : c.constant >= 0; }

bool all_zero(const RationalVector& v) {
  return std::all_of(v.begin(), v.end(), [](const Rational& r) { return r == 0; });
}

// Scales so the first nonzero coefficient has magnitude one.
void normalize(Ineq& c) {
  for (const auto& v : c.coeffs) {
    if (v != 0) {
      Rational s = v < 0 ? Rational(-v) : v;
      for (auto& x : c.coeffs) x /= s;
      c.constant /= s;
      return;
    }
  }
}

// Keeps the tightest constraint per coefficient direction. Returns false on a
// violated constant-only constraint.
bool simplify(std::vector<Ineq>& cs) {
  std::vector<Ineq> out;
  for (auto& c : cs) {
    if (all_zero(c.coeffs)) {
      if (!constant_ok(c)) return false;
      continue;
    }
    normalize(c);
    auto it = std::find_if(out.begin(), out.end(), [&](const Ineq& o) { return o.coeffs == c.coeffs; });
    if (it == out.end()) {
      out.push_back(std::move(c));
    } else if (c.constant < it->constant || (c.constant == it->constant && c.strict)) {
      *it = std::move(c);
    }
  }
  cs = std::move(out);
  return true;
}

struct Interval {
  std::optional<Rational> lo, hi;
  bool lo_strict = false, hi_strict = false;

  bool admits(const Rational& v) const {
    if (lo && (lo_strict ? v <= *lo : v < *lo)) return false;
    if (hi && (hi_strict ? v >= *hi : v > *hi)) return false;
    return true;
  }
};

Rational pick(const Interval& iv) {
  if (iv.admits(0)) return 0;
  if (iv.lo && *iv.lo >= 0) {
    Rational c = ceil_rational(*iv.lo);
    if (iv.lo_strict && c == *iv.lo) c += 1;
    if (iv.admits(c)) return c;
  } else if (iv.hi) {
    Rational c = floor_rational(*iv.hi);
    if (iv.hi_strict && c == *iv.hi) c -= 1;
    if (iv.admits(c)) return c;
  }
  if (iv.lo && iv.hi) return (*iv.lo + *iv.hi) / 2;
  throw std::logic_error("interval pick: no admissible value");
}

std::optional<RationalVector> fm_point(std::size_t dim, std::vector<Ineq> base) {
  if (!simplify(base)) return std::nullopt;
  // levels[k] involves only unknowns 0..k-1.
  std::vector<std::vector<Ineq>> levels(dim + 1);
  levels[dim] = std::move(base);
  for (std::size_t k = dim; k-- > 0;) {
    const auto& cur = levels[k + 1];
    std::vector<Ineq> next;
    std::vector<const Ineq*> pos, neg;
    for (const auto& c : cur) {
      if (c.coeffs[k] > 0) pos.push_back(&c);
      else if (c.coeffs[k] < 0) neg.push_back(&c);
      else next.push_back(c);
    }
    for (const Ineq* p : pos) {
      for (const Ineq* n : neg) {
        Rational cp = p->coeffs[k];
        Rational cn = -n->coeffs[k];
        Ineq comb;
        comb.coeffs.resize(dim);
        for (std::size_t j = 0; j < dim; ++j) comb.coeffs[j] = cn * p->coeffs[j] + cp * n->coeffs[j];
        comb.coeffs[k] = 0;
        comb.constant = cn * p->constant + cp * n->constant;
        comb.strict = p->strict || n->strict;
        next.push_back(std::move(comb));
      }
    }
    if (!simplify(next)) return std::nullopt;
    levels[k] = std::move(next);
  }

  RationalVector x(dim);
  for (std::size_t k = 0; k < dim; ++k) {
    Interval iv;
    for (const auto& c : levels[k + 1]) {
      const Rational& ck = c.coeffs[k];
      if (ck == 0) continue;
      Rational rest = c.constant;
      for (std::size_t j = 0; j < k; ++j) rest += c.coeffs[j] * x[j];
      Rational bound = -rest / ck;
      if (ck > 0) {
        if (!iv.lo || bound > *iv.lo || (bound == *iv.lo && c.strict)) {
          iv.lo = bound;
          iv.lo_strict = c.strict;
        }
      } else {
        if (!iv.hi || bound < *iv.hi || (bound == *iv.hi && c.strict)) {
          iv.hi = bound;
          iv.hi_strict = c.strict;
        }
      }
    }
    x[k] = pick(iv);
  }
  return x;
}

}  // namespace

Rational LinearConstraint::evaluate(const RationalVector& a) const {
  if (a.size() != coeffs.size()) throw std::invalid_argument("constraint dimension mismatch");
  Rational s = constant;
  for (std::size_t i = 0; i < a.size(); ++i) s += coeffs[i] * a[i];
  return s;
}

bool LinearConstraint::satisfied_by(const RationalVector& a) const {
  Rational v = evaluate(a);
  switch (kind) {
    case Kind::equal: return v == 0;
    case Kind::greater_equal: return v >= 0;
    case Kind::greater: return v > 0;
  }
  return false;
}

void Polyhedron::add(LinearConstraint c) {
  if (c.coeffs.size() != dimension_) throw std::invalid_argument("constraint dimension mismatch");
  constraints_.push_back(std::move(c));
}

void Polyhedron::add_equal(RationalVector coeffs, Rational constant) {
  add({std::move(coeffs), std::move(constant), Kind::equal});
}

void Polyhedron::add_greater_equal(RationalVector coeffs, Rational constant) {
  add({std::move(coeffs), std::move(constant), Kind::greater_equal});
}

bool Polyhedron::contains(const RationalVector& a) const {
  return std::all_of(constraints_.begin(), constraints_.end(),
                     [&](const LinearConstraint& c) { return c.satisfied_by(a); });
}

std::optional<AffineFamily> Polyhedron::solve() const {
  const std::size_t n = dimension_;

  // Row-reduce the equalities: rows of [coeffs | rhs] with coeffs·a = rhs.
  std::vector<RationalVector> rows;
  for (const auto& c : constraints_) {
    if (c.kind != Kind::equal) continue;
    RationalVector r(c.coeffs);
    r.push_back(-c.constant);
    rows.push_back(std::move(r));
  }
  std::vector<std::size_t> pivot_cols;
  std::size_t rank = 0;
  for (std::size_t col = 0; col < n && rank < rows.size(); ++col) {
    std::size_t sel = rank;
    while (sel < rows.size() && rows[sel][col] == 0) ++sel;
    if (sel == rows.size()) continue;
    std::swap(rows[rank], rows[sel]);
    Rational inv = 1 / rows[rank][col];
    for (auto& v : rows[rank]) v *= inv;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (r == rank || rows[r][col] == 0) continue;
      Rational f = rows[r][col];
      for (std::size_t j = col; j <= n; ++j) rows[r][j] -= f * rows[rank][j];
    }
    pivot_cols.push_back(col);
    ++rank;
  }
  for (std::size_t r = rank; r < rows.size(); ++r) {
    if (rows[r][n] != 0) return std::nullopt;
  }

  std::vector<bool> is_pivot(n, false);
  for (auto c : pivot_cols) is_pivot[c] = true;
  std::vector<std::size_t> free_cols;
  for (std::size_t c = 0; c < n; ++c) {
    if (!is_pivot[c]) free_cols.push_back(c);
  }
  const std::size_t m = free_cols.size();

  // a = origin + D·t.
  RationalVector origin(n);
  std::vector<RationalVector> dirs(m, RationalVector(n));
  for (std::size_t r = 0; r < rank; ++r) origin[pivot_cols[r]] = rows[r][n];
  for (std::size_t k = 0; k < m; ++k) {
    dirs[k][free_cols[k]] = 1;
    for (std::size_t r = 0; r < rank; ++r) dirs[k][pivot_cols[r]] = -rows[r][free_cols[k]];
  }

  std::vector<Ineq> param;
  for (const auto& c : constraints_) {
    if (c.kind == Kind::equal) continue;
    Ineq q;
    q.coeffs.resize(m);
    for (std::size_t k = 0; k < m; ++k) {
      Rational s = 0;
      for (std::size_t i = 0; i < n; ++i) s += c.coeffs[i] * dirs[k][i];
      q.coeffs[k] = s;
    }
    q.constant = c.evaluate(origin);
    q.strict = c.kind == Kind::greater;
    param.push_back(std::move(q));
  }

  auto t = fm_point(m, param);
  if (!t) return std::nullopt;

  AffineFamily fam;
  fam.base = origin;
  for (std::size_t k = 0; k < m; ++k) {
    for (std::size_t i = 0; i < n; ++i) fam.base[i] += (*t)[k] * dirs[k][i];
  }
  fam.directions = std::move(dirs);
  // Re-express the parameter constraints around the chosen base point.
  for (auto& q : param) {
    if (all_zero(q.coeffs)) continue;
    Rational shift = q.constant;
    for (std::size_t k = 0; k < m; ++k) shift += q.coeffs[k] * (*t)[k];
    fam.parameter_constraints.push_back(
        {q.coeffs, shift, q.strict ? Kind::greater : Kind::greater_equal});
  }
  return fam;
}

bool Polyhedron::is_subset_of(const Polyhedron& other) const {
  if (other.dimension_ != dimension_) throw std::invalid_argument("polyhedron dimension mismatch");
  auto negate = [](const LinearConstraint& c, Kind k) {
    LinearConstraint r{c.coeffs, -c.constant, k};
    for (auto& v : r.coeffs) v = -v;
    return r;
  };
  for (const auto& c : other.constraints_) {
    std::vector<LinearConstraint> escapes;
    switch (c.kind) {
      case Kind::greater_equal: escapes.push_back(negate(c, Kind::greater)); break;
      case Kind::greater: escapes.push_back(negate(c, Kind::greater_equal)); break;
      case Kind::equal:
        escapes.push_back({c.coeffs, c.constant, Kind::greater});
        escapes.push_back(negate(c, Kind::greater));
        break;
    }
    for (auto& e : escapes) {
      Polyhedron probe = *this;
      probe.add(std::move(e));
      if (probe.feasible()) return false;
    }
  }
  return true;
}

std::optional<RationalVector> fourier_motzkin_point(std::size_t dimension,
                                                    const std::vector<LinearConstraint>& inequalities) {
  std::vector<Ineq> cs;
  for (const auto& c : inequalities) {
    if (c.coeffs.size() != dimension) throw std::invalid_argument("constraint dimension mismatch");
    if (c.kind == Kind::equal) {
      cs.push_back({c.coeffs, c.constant, false});
      Ineq neg{c.coeffs, -c.constant, false};
      for (auto& v : neg.coeffs) v = -v;
      cs.push_back(std::move(neg));
    } else {
      cs.push_back({c.coeffs, c.constant, c.kind == Kind::greater});
    }
  }
  return fm_point(dimension, std::move(cs));
}

}  // namespace tropical
