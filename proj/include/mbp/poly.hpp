// Exact univariate and bivariate polynomial arithmetic over a field K.
//
// UniPoly carries a variable tag: X is the parameter acting from the left
// of a dotted arrow, Y the one acting from the right (the paper's x-bar).
// BiPoly is a sparse polynomial in both.
#pragma once

#include "mbp/errors.hpp"
#include "mbp/field.hpp"

#include <algorithm>
#include <map>
#include <utility>
#include <vector>

namespace mbp {

enum class Var : unsigned char { X = 0, Y = 1 };

inline const char* var_name(Var v) { return v == Var::X ? "x" : "y"; }

template <class K>
struct UniPoly {
  Var var = Var::X;
  std::vector<K> c;  // c[i] is the coefficient of var^i; trailing zeros trimmed

  UniPoly() = default;
  explicit UniPoly(Var v) : var(v) {}
  UniPoly(Var v, std::vector<K> coeffs) : var(v), c(std::move(coeffs)) { trim(); }

  static UniPoly zero(Var v = Var::X) { return UniPoly(v); }
  static UniPoly constant(const K& k, Var v = Var::X) {
    UniPoly p(v);
    if (!k.is_zero()) p.c = {k};
    return p;
  }
  static UniPoly variable(Var v = Var::X) { return UniPoly(v, {K::zero(), K::one()}); }

  void trim() {
    while (!c.empty() && c.back().is_zero()) c.pop_back();
  }
  bool is_zero() const { return c.empty(); }
  int degree() const { return static_cast<int>(c.size()) - 1; }  // -1 for zero
  K coeff(int i) const {
    return (i >= 0 && i < static_cast<int>(c.size())) ? c[i] : K::zero();
  }
  K leading() const { return c.empty() ? K::zero() : c.back(); }
  bool is_constant() const { return c.size() <= 1; }
  bool is_one() const { return c.size() == 1 && c[0] == K::one(); }

  UniPoly operator+(const UniPoly& o) const {
    UniPoly r(var);
    r.c.resize(std::max(c.size(), o.c.size()), K::zero());
    for (size_t i = 0; i < c.size(); ++i) r.c[i] += c[i];
    for (size_t i = 0; i < o.c.size(); ++i) r.c[i] += o.c[i];
    r.trim();
    return r;
  }
  UniPoly operator-(const UniPoly& o) const {
    UniPoly r(var);
    r.c.resize(std::max(c.size(), o.c.size()), K::zero());
    for (size_t i = 0; i < c.size(); ++i) r.c[i] += c[i];
    for (size_t i = 0; i < o.c.size(); ++i) r.c[i] -= o.c[i];
    r.trim();
    return r;
  }
  UniPoly operator-() const {
    UniPoly r(var);
    r.c.reserve(c.size());
    for (auto& k : c) r.c.push_back(-k);
    return r;
  }
  UniPoly operator*(const UniPoly& o) const {
    if (is_zero() || o.is_zero()) return UniPoly(var);
    UniPoly r(var);
    r.c.assign(c.size() + o.c.size() - 1, K::zero());
    for (size_t i = 0; i < c.size(); ++i)
      for (size_t j = 0; j < o.c.size(); ++j) r.c[i + j] += c[i] * o.c[j];
    r.trim();
    return r;
  }
  UniPoly scaled(const K& k) const {
    UniPoly r(var);
    if (k.is_zero()) return r;
    r.c.reserve(c.size());
    for (auto& x : c) r.c.push_back(x * k);
    return r;
  }
  UniPoly& operator+=(const UniPoly& o) { return *this = *this + o; }
  UniPoly& operator-=(const UniPoly& o) { return *this = *this - o; }

  // division with remainder; divisor must be nonzero
  std::pair<UniPoly, UniPoly> divmod(const UniPoly& d) const {
    if (d.is_zero()) throw std::domain_error("UniPoly: division by zero polynomial");
    UniPoly q(var), r = *this;
    if (r.degree() < d.degree()) return {q, r};
    q.c.assign(r.degree() - d.degree() + 1, K::zero());
    K dl = d.leading();
    while (!r.is_zero() && r.degree() >= d.degree()) {
      int k = r.degree() - d.degree();
      K f = r.leading() / dl;
      q.c[k] = f;
      for (int i = 0; i <= d.degree(); ++i) r.c[i + k] -= f * d.c[i];
      r.trim();
    }
    q.trim();
    return {q, r};
  }

  bool divides(const UniPoly& other) const {
    return other.divmod(*this).second.is_zero();
  }

  K eval(const K& x) const {
    K acc = K::zero();
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
    return acc;
  }

  UniPoly monic() const {
    if (is_zero()) return *this;
    return scaled(leading().inv());
  }

  bool operator==(const UniPoly& o) const { return var == o.var && c == o.c; }
  bool operator!=(const UniPoly& o) const { return !(*this == o); }

  std::string str() const {
    if (is_zero()) return "0";
    std::string s;
    for (int i = degree(); i >= 0; --i) {
      if (c[i].is_zero()) continue;
      if (!s.empty()) s += " + ";
      if (i == 0 || c[i] != K::one()) s += c[i].str();
      if (i > 0) {
        if (i == 0 || c[i] != K::one()) s += "*";
        s += var_name(var);
        if (i > 1) s += "^" + std::to_string(i);
      }
    }
    return s;
  }
};

// monic gcd; gcd(0,0) = 0. Both arguments must carry the same variable tag.
template <class K>
UniPoly<K> poly_gcd(UniPoly<K> a, UniPoly<K> b) {
  if (a.var != b.var) throw std::domain_error("poly_gcd: variable tags differ");
  while (!b.is_zero()) {
    auto r = a.divmod(b).second;
    a = std::move(b);
    b = std::move(r);
  }
  return a.monic();
}

template <class K>
struct BiPoly {
  // (deg in x, deg in y) -> coefficient; zero coefficients never stored
  std::map<std::pair<int, int>, K> t;

  BiPoly() = default;

  static BiPoly zero() { return BiPoly(); }
  static BiPoly constant(const K& k) {
    BiPoly p;
    if (!k.is_zero()) p.t[{0, 0}] = k;
    return p;
  }
  static BiPoly one() { return constant(K::one()); }
  static BiPoly variable(Var v) {
    BiPoly p;
    p.t[v == Var::X ? std::pair<int, int>{1, 0} : std::pair<int, int>{0, 1}] = K::one();
    return p;
  }
  static BiPoly monomial(int dx, int dy, const K& k) {
    BiPoly p;
    if (!k.is_zero()) p.t[{dx, dy}] = k;
    return p;
  }
  static BiPoly from_uni(const UniPoly<K>& u) {
    BiPoly p;
    for (int i = 0; i <= u.degree(); ++i)
      if (!u.coeff(i).is_zero())
        p.t[u.var == Var::X ? std::pair<int, int>{i, 0} : std::pair<int, int>{0, i}] = u.coeff(i);
    return p;
  }

  bool is_zero() const { return t.empty(); }
  bool is_constant() const { return t.empty() || (t.size() == 1 && t.begin()->first == std::pair<int, int>{0, 0}); }
  bool is_one() const { return t.size() == 1 && t.begin()->first == std::pair<int, int>{0, 0} && t.begin()->second == K::one(); }
  K constant_term() const {
    auto it = t.find({0, 0});
    return it == t.end() ? K::zero() : it->second;
  }
  int deg_x() const {
    int d = -1;
    for (auto& [m, k] : t) d = std::max(d, m.first);
    return d;
  }
  int deg_y() const {
    int d = -1;
    for (auto& [m, k] : t) d = std::max(d, m.second);
    return d;
  }

  void add_term(int dx, int dy, const K& k) {
    if (k.is_zero()) return;
    auto it = t.find({dx, dy});
    if (it == t.end()) {
      t[{dx, dy}] = k;
    } else {
      it->second += k;
      if (it->second.is_zero()) t.erase(it);
    }
  }

  BiPoly operator+(const BiPoly& o) const {
    BiPoly r = *this;
    for (auto& [m, k] : o.t) r.add_term(m.first, m.second, k);
    return r;
  }
  BiPoly operator-(const BiPoly& o) const {
    BiPoly r = *this;
    for (auto& [m, k] : o.t) r.add_term(m.first, m.second, -k);
    return r;
  }
  BiPoly operator-() const {
    BiPoly r;
    for (auto& [m, k] : t) r.t[m] = -k;
    return r;
  }
  BiPoly operator*(const BiPoly& o) const {
    BiPoly r;
    for (auto& [m1, k1] : t)
      for (auto& [m2, k2] : o.t)
        r.add_term(m1.first + m2.first, m1.second + m2.second, k1 * k2);
    return r;
  }
  BiPoly scaled(const K& k) const {
    BiPoly r;
    if (k.is_zero()) return r;
    for (auto& [m, c] : t) r.t[m] = c * k;
    return r;
  }
  BiPoly mul_xpow(int a, int b) const {
    BiPoly r;
    for (auto& [m, c] : t) r.t[{m.first + a, m.second + b}] = c;
    return r;
  }
  BiPoly& operator+=(const BiPoly& o) { return *this = *this + o; }
  BiPoly& operator-=(const BiPoly& o) { return *this = *this - o; }

  bool operator==(const BiPoly& o) const { return t == o.t; }
  bool operator!=(const BiPoly& o) const { return !(*this == o); }

  // coefficients of y^j as univariate polynomials in x
  std::map<int, UniPoly<K>> by_y() const {
    std::map<int, std::vector<K>> acc;
    for (auto& [m, k] : t) {
      auto& v = acc[m.second];
      if (static_cast<int>(v.size()) <= m.first) v.resize(m.first + 1, K::zero());
      v[m.first] = k;
    }
    std::map<int, UniPoly<K>> out;
    for (auto& [j, v] : acc) out.emplace(j, UniPoly<K>(Var::X, v));
    return out;
  }
  std::map<int, UniPoly<K>> by_x() const {
    std::map<int, std::vector<K>> acc;
    for (auto& [m, k] : t) {
      auto& v = acc[m.first];
      if (static_cast<int>(v.size()) <= m.second) v.resize(m.second + 1, K::zero());
      v[m.second] = k;
    }
    std::map<int, UniPoly<K>> out;
    for (auto& [i, v] : acc) out.emplace(i, UniPoly<K>(Var::Y, v));
    return out;
  }

  // exact division by a univariate polynomial in x (resp. y); throws if inexact
  BiPoly div_exact_x(const UniPoly<K>& a) const {
    BiPoly r;
    for (auto& [j, cj] : by_y()) {
      auto [q, rem] = cj.divmod(a);
      if (!rem.is_zero()) throw std::domain_error("BiPoly: inexact division by x-polynomial");
      for (int i = 0; i <= q.degree(); ++i)
        if (!q.coeff(i).is_zero()) r.t[{i, j}] = q.coeff(i);
    }
    return r;
  }
  BiPoly div_exact_y(const UniPoly<K>& b) const {
    BiPoly r;
    for (auto& [i, ci] : by_x()) {
      auto [q, rem] = ci.divmod(b);
      if (!rem.is_zero()) throw std::domain_error("BiPoly: inexact division by y-polynomial");
      for (int j = 0; j <= q.degree(); ++j)
        if (!q.coeff(j).is_zero()) r.t[{i, j}] = q.coeff(j);
    }
    return r;
  }

  K eval(const K& x, const K& y) const {
    K acc = K::zero();
    for (auto& [m, k] : t) {
      K term = k;
      for (int i = 0; i < m.first; ++i) term *= x;
      for (int j = 0; j < m.second; ++j) term *= y;
      acc += term;
    }
    return acc;
  }

  // substitute y := x, giving a univariate polynomial (the paper's f(x,x))
  UniPoly<K> eval_diag() const {
    UniPoly<K> r(Var::X);
    for (auto& [m, k] : t) {
      UniPoly<K> mono(Var::X);
      mono.c.assign(m.first + m.second + 1, K::zero());
      mono.c.back() = k;
      r = r + mono;
    }
    return r;
  }

  std::string str() const {
    if (t.empty()) return "0";
    std::string s;
    for (auto& [m, k] : t) {
      if (!s.empty()) s += " + ";
      bool unit = (k == K::one()) && (m.first + m.second > 0);
      if (!unit) s += k.str();
      if (m.first > 0) {
        if (!unit || m.second > 0) {}
        s += (s.empty() || unit ? "" : "*");
        s += "x";
        if (m.first > 1) s += "^" + std::to_string(m.first);
      }
      if (m.second > 0) {
        s += (m.first > 0 ? "*" : (unit ? "" : "*"));
        s += "y";
        if (m.second > 1) s += "^" + std::to_string(m.second);
      }
    }
    return s;
  }
};

// content of f viewed in (K[x])[y]: monic gcd of the y-coefficients
template <class K>
UniPoly<K> content_in_x(const BiPoly<K>& f) {
  UniPoly<K> g(Var::X);
  for (auto& [j, cj] : f.by_y()) g = poly_gcd(g, cj);
  return g;
}

template <class K>
UniPoly<K> content_in_y(const BiPoly<K>& f) {
  UniPoly<K> g(Var::Y);
  for (auto& [i, ci] : f.by_x()) g = poly_gcd(g, ci);
  return g;
}

// f = alpha(x) * h(x,y) * beta(y) with alpha, beta monic and every
// irreducible factor of h involving both variables (or h a nonzero constant).
template <class K>
struct SplitXY {
  UniPoly<K> alpha;  // in x
  BiPoly<K> h;
  UniPoly<K> beta;  // in y
};

template <class K>
SplitXY<K> split_xy(const BiPoly<K>& f) {
  if (f.is_zero()) throw ZeroPolynomial();
  UniPoly<K> alpha = content_in_x(f);
  BiPoly<K> f1 = f.div_exact_x(alpha);
  UniPoly<K> beta = content_in_y(f1);
  BiPoly<K> h = f1.div_exact_y(beta);
  return {alpha, h, beta};
}

// does every irreducible factor of a divide phi? (radical divisibility,
// decided by repeated gcd extraction; no factorization needed)
template <class K>
bool factors_divide(UniPoly<K> a, const UniPoly<K>& phi) {
  if (phi.is_zero()) throw std::domain_error("factors_divide: zero modulus");
  a = a.monic();
  while (a.degree() > 0) {
    UniPoly<K> g = poly_gcd(a, phi);
    if (g.degree() == 0) return false;
    // strip all copies of g from a
    while (true) {
      auto [q, r] = a.divmod(g);
      if (!r.is_zero()) break;
      a = q;
    }
  }
  return true;
}

// invertibility of f in k[x, y, phi_x(x)^-1, phi_y(y)^-1]
template <class K>
bool invertible_in_localization(const BiPoly<K>& f, const UniPoly<K>& phi_x,
                                const UniPoly<K>& phi_y) {
  if (f.is_zero()) throw ZeroPolynomial();
  if (phi_x.is_zero() || phi_y.is_zero())
    throw std::domain_error("invertible_in_localization: zero localization polynomial");
  SplitXY<K> s = split_xy(f);
  if (!s.h.is_constant()) return false;
  UniPoly<K> px = phi_x, py = phi_y;
  px.var = Var::X;
  py.var = Var::Y;
  return factors_divide(s.alpha, px) && factors_divide(s.beta, py);
}

namespace detail {

inline std::vector<bigint> divisors_of(bigint n) {
  if (n < 0) n = -n;
  std::vector<bigint> ds;
  if (n == 0) return ds;
  for (bigint d = 1; d * d <= n; ++d) {
    if (n % d == 0) {
      ds.push_back(d);
      if (d * d != n) ds.push_back(n / d);
    }
  }
  return ds;
}

// root candidates for a primitive integer polynomial (rational root bound)
inline std::vector<Rat> root_candidates(const std::vector<bigint>& ic) {
  std::vector<Rat> out;
  bigint a0 = ic.front(), ad = ic.back();
  for (auto& p : divisors_of(a0))
    for (auto& q : divisors_of(ad)) {
      out.push_back(Rat(bigrat(p, q)));
      out.push_back(Rat(bigrat(-p, q)));
    }
  std::sort(out.begin(), out.end(), [](const Rat& a, const Rat& b) { return a.v < b.v; });
  out.erase(std::unique(out.begin(), out.end(), [](const Rat& a, const Rat& b) { return a.v == b.v; }),
            out.end());
  return out;
}

inline std::vector<Rat> all_root_candidates(const UniPoly<Rat>& p) {
  // clear denominators, strip content
  bigint l = 1;
  for (auto& c : p.c) l = boost::multiprecision::lcm(l, boost::multiprecision::denominator(c.v));
  std::vector<bigint> ic;
  ic.reserve(p.c.size());
  for (auto& c : p.c) ic.push_back(boost::multiprecision::numerator(c.v * bigrat(l)));
  // drop leading zeros from the x^k factor for the candidate bound
  size_t first = 0;
  while (first < ic.size() && ic[first] == 0) ++first;
  std::vector<bigint> stripped(ic.begin() + first, ic.end());
  if (stripped.empty()) return {};
  return root_candidates(stripped);
}

template <unsigned P>
inline std::vector<Fp<P>> all_root_candidates(const UniPoly<Fp<P>>&) {
  std::vector<Fp<P>> out;
  for (unsigned i = 0; i < P; ++i) out.push_back(Fp<P>(static_cast<long>(i)));
  return out;
}

} // namespace detail

// all roots with multiplicity if p splits into linear factors over K,
// sorted by the field order; otherwise NonSplitSpectrum with the residual.
template <class K>
std::vector<std::pair<K, int>> rational_linear_roots(const UniPoly<K>& p) {
  if (p.is_zero()) throw std::domain_error("rational_linear_roots: zero polynomial");
  UniPoly<K> rem = p;
  std::vector<std::pair<K, int>> roots;
  // root 0 first (not covered by the divisor bound)
  {
    int mult = 0;
    while (!rem.is_zero() && rem.coeff(0).is_zero() && rem.degree() > 0) {
      rem.c.erase(rem.c.begin());
      ++mult;
    }
    if (mult > 0) roots.push_back({K::zero(), mult});
  }
  if (rem.degree() > 0) {
    auto candidates = detail::all_root_candidates(rem);
    for (auto& r : candidates) {
      if (rem.degree() == 0) break;
      int mult = 0;
      while (rem.degree() > 0 && rem.eval(r).is_zero()) {
        UniPoly<K> lin(p.var, {-r, K::one()});
        rem = rem.divmod(lin).first;
        ++mult;
      }
      if (mult > 0) roots.push_back({r, mult});
    }
  }
  if (rem.degree() > 0) throw NonSplitSpectrum(rem.monic().str());
  std::sort(roots.begin(), roots.end(),
            [](auto& a, auto& b) { return prec_less(a.first, b.first); });
  return roots;
}

// ---- bivariate gcd over K[x][y] (primitive PRS) ----

namespace detail {

template <class K>
BiPoly<K> from_y_coeffs(const std::map<int, UniPoly<K>>& cs) {
  BiPoly<K> r;
  for (auto& [j, cj] : cs)
    for (int i = 0; i <= cj.degree(); ++i)
      if (!cj.coeff(i).is_zero()) r.t[{i, j}] = cj.coeff(i);
  return r;
}

// pseudo-remainder of f by g in (K[x])[y], deg_y f >= deg_y g, g != 0
template <class K>
BiPoly<K> pseudo_rem_y(BiPoly<K> f, const BiPoly<K>& g) {
  int dg = g.deg_y();
  auto gy = g.by_y();
  UniPoly<K> lg = gy.rbegin()->second;  // leading y-coefficient of g
  while (!f.is_zero() && f.deg_y() >= dg) {
    auto fy = f.by_y();
    int df = f.deg_y();
    UniPoly<K> lf = fy.rbegin()->second;
    // f := lg*f - lf*y^(df-dg)*g
    BiPoly<K> lgf = BiPoly<K>::from_uni(lg) * f;
    UniPoly<K> lfx = lf;
    lfx.var = Var::X;
    BiPoly<K> sub = BiPoly<K>::from_uni(lfx).mul_xpow(0, df - dg) * g;
    f = lgf - sub;
    if (f.deg_y() == df) throw std::logic_error("pseudo_rem_y: no degree drop");
  }
  return f;
}

} // namespace detail

// gcd in K[x,y], normalized so its leading coefficient (lex order on (deg_y,
// deg_x) of the leading monomial) is 1
template <class K>
BiPoly<K> bipoly_gcd(BiPoly<K> f, BiPoly<K> g) {
  if (f.is_zero()) std::swap(f, g);
  if (g.is_zero()) {
    if (f.is_zero()) return f;
    // normalize
    auto it = f.t.rbegin();  // lex-largest monomial (x-major)
    return f.scaled(it->second.inv());
  }
  UniPoly<K> cf = content_in_x(f), cg = content_in_x(g);
  BiPoly<K> pf = f.div_exact_x(cf), pg = g.div_exact_x(cg);
  UniPoly<K> cont = poly_gcd(cf, cg);
  // primitive PRS in y
  while (!pg.is_zero()) {
    if (pf.deg_y() < pg.deg_y()) std::swap(pf, pg);
    if (pg.deg_y() == 0) {
      // gcd of primitive polys one of which is y-free: reduces to x-content
      UniPoly<K> c = poly_gcd(content_in_x(pf), content_in_x(pg));
      pf = BiPoly<K>::from_uni(c);
      pg = BiPoly<K>::zero();
      break;
    }
    BiPoly<K> r = detail::pseudo_rem_y(pf, pg);
    pf = pg;
    pg = r.is_zero() ? r : r.div_exact_x(content_in_x(r));
  }
  BiPoly<K> result = BiPoly<K>::from_uni(cont) * pf;
  if (result.is_zero()) return result;
  auto it = result.t.rbegin();  // lex-largest monomial (x-major)
  return result.scaled(it->second.inv());
}

} // namespace mbp
