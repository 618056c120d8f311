// The data model of matrix bimodule problems: minimal algebras over strip
// classes, normalized quasi-bases, star products, representations and
// morphisms.
//
// Strips are 0-based internally (1-based in file formats and display).
// The order on positions is (i,j) before (i',j') iff i > i', or i = i' and
// j < j'; bases are kept sorted ascending by leading position.
#pragma once

#include "mbp/matrix.hpp"
#include "mbp/poly.hpp"
#include "mbp/weyr.hpp"

#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

namespace mbp {

struct Pos {
  int r = 0, c = 0;
  bool operator==(const Pos& o) const { return r == o.r && c == o.c; }
  bool operator!=(const Pos& o) const { return !(*this == o); }
};

// strict "comes before" on matrix positions
inline bool pos_prec(const Pos& a, const Pos& b) {
  return a.r > b.r || (a.r == b.r && a.c < b.c);
}

struct PosPrecLess {
  bool operator()(const Pos& a, const Pos& b) const { return pos_prec(a, b); }
};

using SizeVector = std::vector<int>;

template <class K>
struct ClassInfo {
  std::vector<int> strips;    // ascending strip indices
  bool parametric = false;
  std::vector<UniPoly<K>> phi_factors;  // localization state; empty means phi = 1

  UniPoly<K> phi() const {
    UniPoly<K> p = UniPoly<K>::constant(K::one(), Var::X);
    for (auto& f : phi_factors) {
      UniPoly<K> g = f;
      g.var = Var::X;
      p = p * g;
    }
    return p;
  }
};

// A quasi-basis element: a sparse t x t matrix with coefficients in
// R_src (x) R_tgt, supported on (src-class rows) x (tgt-class columns).
template <class K>
struct BaseMatrix {
  int src = 0, tgt = 0;  // class indices
  std::map<Pos, BiPoly<K>, PosPrecLess> entries;  // sorted by position order

  bool is_zero() const { return entries.empty(); }
  Pos leading_pos() const {
    if (entries.empty()) throw std::logic_error("leading_pos of zero base");
    return entries.begin()->first;
  }
  BiPoly<K> leading_entry() const { return entries.begin()->second; }
  BiPoly<K> at(int r, int c) const {
    auto it = entries.find(Pos{r, c});
    return it == entries.end() ? BiPoly<K>::zero() : it->second;
  }
  void set(int r, int c, const BiPoly<K>& v) {
    if (v.is_zero())
      entries.erase(Pos{r, c});
    else
      entries[Pos{r, c}] = v;
  }
  bool scalar_entries() const {
    for (auto& [p, v] : entries)
      if (!v.is_constant()) return false;
    return true;
  }
};

// entries of products of base matrices: sparse trivariate polynomials
// (left variable, middle tensor slot, right variable)
template <class K>
using TriPoly = std::map<std::tuple<int, int, int>, K>;

template <class K>
void tri_add(TriPoly<K>& t, int a, int m, int b, const K& k) {
  if (k.is_zero()) return;
  auto key = std::make_tuple(a, m, b);
  auto it = t.find(key);
  if (it == t.end())
    t[key] = k;
  else {
    it->second += k;
    if (it->second.is_zero()) t.erase(it);
  }
}

template <class K>
bool tri_is_bivariate(const TriPoly<K>& t) {
  for (auto& [k, v] : t)
    if (std::get<1>(k) != 0) return false;
  return true;
}

template <class K>
BiPoly<K> tri_to_bi(const TriPoly<K>& t) {
  BiPoly<K> r;
  for (auto& [k, v] : t) {
    if (std::get<1>(k) != 0)
      throw std::domain_error("nonzero middle tensor degree has no bivariate shadow");
    r.add_term(std::get<0>(k), std::get<2>(k), v);
  }
  return r;
}

template <class K>
using TriMatrix = std::map<Pos, TriPoly<K>, PosPrecLess>;

template <class K>
struct ProblemSpec {
  int t = 0;
  std::vector<ClassInfo<K>> classes;
  std::vector<int> class_of;              // strip -> class index
  std::vector<BaseMatrix<K>> K1;          // strictly upper, sorted by leading position
  std::vector<BaseMatrix<K>> M1;          // sorted by leading position
  std::map<Pos, UniPoly<K>, PosPrecLess> H;  // within-class entries, degree <= 1
  // display names for the dual arrows; defaulted to a1.. / v1.. when empty
  std::vector<std::string> solid_names, dotted_names;

  std::string solid_name(size_t i) const {
    return i < solid_names.size() ? solid_names[i] : "a" + std::to_string(i + 1);
  }
  std::string dotted_name(size_t j) const {
    return j < dotted_names.size() ? dotted_names[j] : "v" + std::to_string(j + 1);
  }
  void default_names() {
    solid_names.clear();
    dotted_names.clear();
    for (size_t i = 0; i < M1.size(); ++i) solid_names.push_back("a" + std::to_string(i + 1));
    for (size_t j = 0; j < K1.size(); ++j) dotted_names.push_back("v" + std::to_string(j + 1));
  }

  int num_classes() const { return static_cast<int>(classes.size()); }
  bool trivial_classes() const {
    for (auto& c : classes)
      if (c.parametric) return false;
    return true;
  }

  UniPoly<K> h_at(int r, int c) const {
    auto it = H.find(Pos{r, c});
    return it == H.end() ? UniPoly<K>::zero(Var::X) : it->second;
  }

  // H evaluated at the all-ones size vector over trivial classes: h_ij(1)
  // (Formula 2.3-1 uses H_X(I); at strip level with unit sizes this is h(1)
  // for trivial classes — parametric classes need Weyr data instead)
  K h_scalar_at(int r, int c) const {
    auto h = h_at(r, c);
    if (h.is_zero()) return K::zero();
    return h.eval(K::one());
  }
};

// ---- position bookkeeping for size vectors ----

inline std::vector<int> strip_offsets(const SizeVector& m) {
  std::vector<int> off(m.size() + 1, 0);
  for (size_t i = 0; i < m.size(); ++i) off[i + 1] = off[i] + m[i];
  return off;
}

inline int total_size(const SizeVector& m) {
  int s = 0;
  for (int x : m) s += x;
  return s;
}

template <class K>
void check_size_vector(const ProblemSpec<K>& prob, const SizeVector& m) {
  if (static_cast<int>(m.size()) != prob.t) throw ShapeMismatch("size vector length");
  for (auto& cl : prob.classes)
    for (size_t i = 1; i < cl.strips.size(); ++i)
      if (m[cl.strips[i]] != m[cl.strips[0]])
        throw InvalidProblem("size vector not constant on a class");
  for (int x : m)
    if (x < 0) throw InvalidProblem("negative size");
}

// ---- normalize_basis ----

// Echelonize a spanning set of scalar sparse matrices (one class pair) into
// a normalized basis under the position order; ties in leading position are
// impossible after reduction, and the output is sorted by leading position.
template <class K>
std::vector<BaseMatrix<K>> normalize_basis(const std::vector<BaseMatrix<K>>& spanning) {
  if (spanning.empty()) return {};
  int src = spanning.front().src, tgt = spanning.front().tgt;
  // collect the support, ordered by position
  std::vector<Pos> support;
  {
    std::map<Pos, int, PosPrecLess> seen;
    for (auto& b : spanning) {
      if (b.src != src || b.tgt != tgt)
        throw InvalidProblem("normalize_basis: mixed class pairs");
      if (!b.scalar_entries())
        throw InvalidProblem("normalize_basis: non-scalar entries");
      for (auto& [p, v] : b.entries) seen.emplace(p, 0);
    }
    for (auto& [p, v] : seen) support.push_back(p);
  }
  Matrix<K> rows(spanning.size(), support.size());
  for (size_t i = 0; i < spanning.size(); ++i)
    for (size_t j = 0; j < support.size(); ++j)
      rows(i, j) = spanning[i].at(support[j].r, support[j].c).constant_term();
  auto pivots = rref(rows);
  std::vector<BaseMatrix<K>> out;
  for (size_t r = 0; r < pivots.size(); ++r) {
    BaseMatrix<K> b;
    b.src = src;
    b.tgt = tgt;
    for (size_t j = 0; j < support.size(); ++j)
      if (!rows(r, j).is_zero())
        b.entries[support[j]] = BiPoly<K>::constant(rows(r, j));
    out.push_back(std::move(b));
  }
  // rref pivots ascend in column (= position) order already
  return out;
}

// ---- star products (Definition 1.3.2) ----

// (ii): F * E_X, diagonal placement on every strip of class X
template <class K>
Matrix<K> star_diag(const Matrix<K>& F, int cls, const ProblemSpec<K>& prob,
                    const SizeVector& rows, const SizeVector& cols) {
  auto roff = strip_offsets(rows), coff = strip_offsets(cols);
  Matrix<K> out(roff.back(), coff.back());
  for (int i = 0; i < prob.t; ++i) {
    if (prob.class_of[i] != cls) continue;
    if (static_cast<int>(F.rows()) != rows[i] || static_cast<int>(F.cols()) != cols[i])
      throw ShapeMismatch("star_diag block shape");
    out.set_block(roff[i], coff[i], F);
  }
  return out;
}

// (iii): C * U. For polynomial entries the left/right Weyr matrices supply
// the action C (x) (x^a (x) y^b) = Wl^a C Wr^b.
template <class K>
Matrix<K> star(const Matrix<K>& C, const BaseMatrix<K>& U, const ProblemSpec<K>& prob,
               const SizeVector& rows, const SizeVector& cols,
               const std::optional<Matrix<K>>& Wl = std::nullopt,
               const std::optional<Matrix<K>>& Wr = std::nullopt) {
  auto roff = strip_offsets(rows), coff = strip_offsets(cols);
  Matrix<K> out(roff.back(), coff.back());
  for (auto& [p, u] : U.entries) {
    if (rows[p.r] == 0 || cols[p.c] == 0) continue;
    if (static_cast<int>(C.rows()) != rows[p.r] || static_cast<int>(C.cols()) != cols[p.c])
      throw ShapeMismatch("star block shape");
    Matrix<K> blk(rows[p.r], cols[p.c]);
    for (auto& [mono, k] : u.t) {
      Matrix<K> term = C.scaled(k);
      if (mono.first > 0) {
        if (!Wl) throw ShapeMismatch("star: left Weyr action required");
        term = Wl->pow(mono.first) * term;
      }
      if (mono.second > 0) {
        if (!Wr) throw ShapeMismatch("star: right Weyr action required");
        term = term * Wr->pow(mono.second);
      }
      blk = blk + term;
    }
    out.add_block(roff[p.r], coff[p.c], blk);
  }
  return out;
}

// ---- representations (Definition 1.3.4) ----

template <class K>
struct Representation {
  SizeVector sizes;
  std::vector<Matrix<K>> arrows;            // parallel to prob.M1
  std::map<int, WeyrForm<K>> weyr;          // per parametric class index

  int dim() const { return total_size(sizes); }
};

template <class K>
Matrix<K> weyr_matrix_for_class(const ProblemSpec<K>& prob, const Representation<K>& rep,
                                int cls) {
  const auto& ci = prob.classes[cls];
  int m = ci.strips.empty() ? 0 : rep.sizes[ci.strips[0]];
  if (!ci.parametric) return Matrix<K>::identity(m);
  auto it = rep.weyr.find(cls);
  if (it == rep.weyr.end()) throw InvalidProblem("missing Weyr data for parametric class");
  if (!is_regular(it->second, ci.phi()))
    throw IrregularWeyr("eigenvalue hits the forbidden polynomial");
  Matrix<K> w = it->second.assembled();
  if (static_cast<int>(w.rows()) != m) throw ShapeMismatch("Weyr size vs size vector");
  return w;
}

template <class K>
Matrix<K> assemble(const Representation<K>& rep, const ProblemSpec<K>& prob) {
  check_size_vector(prob, rep.sizes);
  if (rep.arrows.size() != prob.M1.size()) throw ShapeMismatch("arrow count");
  auto off = strip_offsets(rep.sizes);
  Matrix<K> out(off.back(), off.back());
  // H part: blocks h_ij(W_X) for i,j in X
  std::vector<Matrix<K>> wcls(prob.num_classes());
  for (int c = 0; c < prob.num_classes(); ++c) wcls[c] = weyr_matrix_for_class(prob, rep, c);
  for (auto& [p, h] : prob.H) {
    int cls = prob.class_of[p.r];
    if (rep.sizes[p.r] == 0) continue;
    Matrix<K> blk(rep.sizes[p.r], rep.sizes[p.c]);
    const Matrix<K>& W = wcls[cls];
    for (int d = 0; d <= h.degree(); ++d)
      if (!h.coeff(d).is_zero()) blk = blk + W.pow(d).scaled(h.coeff(d));
    out.add_block(off[p.r], off[p.c], blk);
  }
  for (size_t i = 0; i < prob.M1.size(); ++i) {
    const auto& A = prob.M1[i];
    out = out + star(rep.arrows[i], A, prob, rep.sizes, rep.sizes,
                     std::optional<Matrix<K>>(wcls[A.src]), std::optional<Matrix<K>>(wcls[A.tgt]));
  }
  return out;
}

// the H(k) part alone, at a given size vector (trivial classes)
template <class K>
Matrix<K> assemble_h(const ProblemSpec<K>& prob, const SizeVector& sizes) {
  auto off = strip_offsets(sizes);
  Matrix<K> out(off.back(), off.back());
  for (auto& [p, h] : prob.H) {
    if (sizes[p.r] == 0 || sizes[p.c] == 0) continue;
    int cls = prob.class_of[p.r];
    if (prob.classes[cls].parametric)
      throw InvalidProblem("assemble_h needs trivial classes");
    Matrix<K> blk = Matrix<K>::identity(sizes[p.r]).scaled(h.eval(K::one()));
    out.add_block(off[p.r], off[p.c], blk);
  }
  return out;
}

// ---- morphisms (Definition 1.3.5) ----

template <class K>
struct Morphism {
  std::vector<Matrix<K>> f_class;   // per class X: m_X x n_X
  std::vector<Matrix<K>> f_dotted;  // per K1 base V_j: m_{s(v_j)} x n_{t(v_j)}
};

template <class K>
Matrix<K> assemble_morphism(const Morphism<K>& f, const ProblemSpec<K>& prob,
                            const Representation<K>& P, const Representation<K>& Q) {
  if (f.f_class.size() != prob.classes.size() || f.f_dotted.size() != prob.K1.size())
    throw ShapeMismatch("morphism component count");
  std::vector<Matrix<K>> wP(prob.num_classes()), wQ(prob.num_classes());
  for (int c = 0; c < prob.num_classes(); ++c) {
    wP[c] = weyr_matrix_for_class(prob, P, c);
    wQ[c] = weyr_matrix_for_class(prob, Q, c);
  }
  auto roff = strip_offsets(P.sizes), coff = strip_offsets(Q.sizes);
  Matrix<K> out(roff.back(), coff.back());
  for (int c = 0; c < prob.num_classes(); ++c)
    out = out + star_diag(f.f_class[c], c, prob, P.sizes, Q.sizes);
  for (size_t j = 0; j < prob.K1.size(); ++j) {
    const auto& V = prob.K1[j];
    out = out + star(f.f_dotted[j], V, prob, P.sizes, Q.sizes,
                     std::optional<Matrix<K>>(wP[V.src]), std::optional<Matrix<K>>(wQ[V.tgt]));
  }
  return out;
}

template <class K>
Morphism<K> identity_morphism(const ProblemSpec<K>& prob, const Representation<K>& P) {
  Morphism<K> f;
  for (auto& cl : prob.classes) {
    int m = cl.strips.empty() ? 0 : P.sizes[cl.strips[0]];
    f.f_class.push_back(Matrix<K>::identity(m));
  }
  for (auto& V : prob.K1)
    f.f_dotted.push_back(Matrix<K>(
        prob.classes[V.src].strips.empty() ? 0 : P.sizes[prob.classes[V.src].strips[0]],
        prob.classes[V.tgt].strips.empty() ? 0 : P.sizes[prob.classes[V.tgt].strips[0]]));
  return f;
}

template <class K>
bool is_morphism(const Representation<K>& P, const Representation<K>& Q,
                 const Morphism<K>& f, const ProblemSpec<K>& prob) {
  Matrix<K> fbar = assemble_morphism(f, prob, P, Q);
  return assemble(P, prob) * fbar == fbar * assemble(Q, prob);
}

// ---- strip-level products of base matrices ----

template <class K>
TriMatrix<K> base_to_tri(const BaseMatrix<K>& U) {
  TriMatrix<K> out;
  for (auto& [p, u] : U.entries) {
    TriPoly<K> t;
    for (auto& [mono, k] : u.t) tri_add(t, mono.first, 0, mono.second, k);
    out[p] = std::move(t);
  }
  return out;
}

// product of two base matrices; the middle tensor slot collects the degree
// contributed by the shared class parameter
template <class K>
TriMatrix<K> base_product(const BaseMatrix<K>& U, const BaseMatrix<K>& V) {
  TriMatrix<K> out;
  for (auto& [p, u] : U.entries)
    for (auto& [q, v] : V.entries) {
      if (p.c != q.r) continue;
      auto& cell = out[Pos{p.r, q.c}];
      for (auto& [mu, ku] : u.t)
        for (auto& [mv, kv] : v.t)
          tri_add(cell, mu.first, mu.second + mv.first, mv.second, ku * kv);
      if (cell.empty()) out.erase(Pos{p.r, q.c});
    }
  return out;
}

// U * h and h * U for a within-class H entry at a fixed position
template <class K>
TriMatrix<K> base_h_product(const BaseMatrix<K>& U,
                            const std::map<Pos, UniPoly<K>, PosPrecLess>& H, bool h_on_right) {
  TriMatrix<K> out;
  for (auto& [p, u] : U.entries) {
    for (auto& [hp, h] : H) {
      Pos target;
      if (h_on_right) {
        if (p.c != hp.r) continue;
        target = Pos{p.r, hp.c};
      } else {
        if (hp.c != p.r) continue;
        target = Pos{hp.r, p.c};
      }
      auto& cell = out[target];
      for (auto& [mu, ku] : u.t)
        for (int d = 0; d <= h.degree(); ++d) {
          if (h.coeff(d).is_zero()) continue;
          if (h_on_right)
            tri_add(cell, mu.first, 0, mu.second + d, ku * h.coeff(d));
          else
            tri_add(cell, d + mu.first, 0, mu.second, ku * h.coeff(d));
        }
      if (cell.empty()) out.erase(target);
    }
  }
  return out;
}

// decompose a strip-level matrix on a quasi-basis: returns the coefficient
// of each base (read at its leading position) and the residual
template <class K>
std::pair<std::vector<TriPoly<K>>, TriMatrix<K>> decompose_on_basis(
    TriMatrix<K> m, const std::vector<BaseMatrix<K>>& basis) {
  std::vector<TriPoly<K>> coefs(basis.size());
  for (size_t l = 0; l < basis.size(); ++l) {
    auto it = m.find(basis[l].leading_pos());
    if (it == m.end()) continue;
    TriPoly<K> gamma = it->second;
    coefs[l] = gamma;
    // subtract gamma (x) base_l: left/right degrees add around each entry
    for (auto& [p, u] : basis[l].entries) {
      auto& cell = m[p];
      for (auto& [gk, gv] : gamma)
        for (auto& [mono, k] : u.t)
          tri_add(cell, std::get<0>(gk) + mono.first, std::get<1>(gk),
                  std::get<2>(gk) + mono.second, -(gv * k));
      if (cell.empty()) m.erase(p);
    }
  }
  return {std::move(coefs), std::move(m)};
}

// ---- ProblemSpec validation ----

template <class K>
void validate_base(const ProblemSpec<K>& prob, const BaseMatrix<K>& b, bool strictly_upper,
                   const char* what) {
  if (b.is_zero()) throw InvalidProblem(std::string(what) + ": zero base matrix");
  for (auto& [p, v] : b.entries) {
    if (p.r < 0 || p.r >= prob.t || p.c < 0 || p.c >= prob.t)
      throw InvalidProblem(std::string(what) + ": entry out of range");
    if (prob.class_of[p.r] != b.src || prob.class_of[p.c] != b.tgt)
      throw InvalidProblem(std::string(what) + ": entry outside the class pair");
    if (strictly_upper && p.r >= p.c)
      throw InvalidProblem(std::string(what) + ": K1 base not strictly upper triangular");
    if (!prob.classes[b.src].parametric && v.deg_x() > 0)
      throw InvalidProblem(std::string(what) + ": x-degree over a trivial source class");
    if (!prob.classes[b.tgt].parametric && v.deg_y() > 0)
      throw InvalidProblem(std::string(what) + ": y-degree over a trivial target class");
  }
  if (!b.leading_entry().is_one())
    throw InvalidProblem(std::string(what) + ": leading entry is not 1");
}

template <class K>
void validate(const ProblemSpec<K>& prob) {
  // classes partition the strips
  if (static_cast<int>(prob.class_of.size()) != prob.t)
    throw InvalidProblem("class_of size");
  std::vector<int> seen(prob.t, 0);
  for (int c = 0; c < prob.num_classes(); ++c)
    for (int s : prob.classes[c].strips) {
      if (s < 0 || s >= prob.t || prob.class_of[s] != c) throw InvalidProblem("class map");
      seen[s]++;
    }
  for (int s = 0; s < prob.t; ++s)
    if (seen[s] != 1) throw InvalidProblem("classes do not partition the strips");

  for (auto& b : prob.K1) validate_base(prob, b, true, "K1");
  for (auto& b : prob.M1) validate_base(prob, b, false, "M1");

  // normalized-basis conditions (ii) and (iii) within each family
  auto check_family = [&](const std::vector<BaseMatrix<K>>& fam, const char* what) {
    for (size_t i = 0; i < fam.size(); ++i) {
      for (size_t j = 0; j + 1 < fam.size(); ++j)
        if (pos_prec(fam[j + 1].leading_pos(), fam[j].leading_pos()))
          throw InvalidProblem(std::string(what) + ": bases not sorted by leading position");
      for (size_t j = 0; j < fam.size(); ++j)
        if (j != i && !fam[j].at(fam[i].leading_pos().r, fam[i].leading_pos().c).is_zero())
          throw InvalidProblem(std::string(what) + ": nonzero entry at another leading position");
    }
  };
  check_family(prob.K1, "K1");
  check_family(prob.M1, "M1");

  // H entries: within a class, degree <= 1, degree 0 over trivial classes
  for (auto& [p, h] : prob.H) {
    if (h.is_zero()) throw InvalidProblem("H: stored zero entry");
    if (prob.class_of[p.r] != prob.class_of[p.c]) throw InvalidProblem("H: off-class entry");
    if (h.degree() > 1) throw InvalidProblem("H: entry degree exceeds 1");
    if (!prob.classes[prob.class_of[p.r]].parametric && h.degree() > 0)
      throw InvalidProblem("H: positive degree over a trivial class");
  }

  // K1 closed under products (Def 1.1.2 (iii))
  for (size_t i = 0; i < prob.K1.size(); ++i)
    for (size_t j = 0; j < prob.K1.size(); ++j) {
      auto prod = base_product(prob.K1[i], prob.K1[j]);
      auto [coef, residual] = decompose_on_basis(prod, prob.K1);
      if (!residual.empty()) throw InvalidProblem("K1 not closed under products");
    }

  // d(V) = VH - HV lies in span M1 (Def 1.1.4)
  for (auto& V : prob.K1) {
    auto vh = base_h_product(V, prob.H, true);
    auto hv = base_h_product(V, prob.H, false);
    for (auto& [p, cell] : hv) {
      auto& dst = vh[p];
      for (auto& [k, v] : cell) tri_add(dst, std::get<0>(k), std::get<1>(k), std::get<2>(k), -v);
      if (dst.empty()) vh.erase(p);
    }
    auto [coef, residual] = decompose_on_basis(vh, prob.M1);
    if (!residual.empty()) throw InvalidProblem("d(V) = VH - HV not in span of M1");
  }

  // triangularity (Formula 1.2-2): V*A_j and A_i*V in spans of later bases
  for (auto& V : prob.K1) {
    for (size_t j = 0; j < prob.M1.size(); ++j) {
      auto prod = base_product(V, prob.M1[j]);
      auto [coef, residual] = decompose_on_basis(prod, prob.M1);
      if (!residual.empty()) throw InvalidProblem("V*A not in span of M1");
      for (size_t l = 0; l <= j && l < coef.size(); ++l)
        if (!coef[l].empty()) throw InvalidProblem("V*A violates triangularity");
    }
    for (size_t i = 0; i < prob.M1.size(); ++i) {
      auto prod = base_product(prob.M1[i], V);
      auto [coef, residual] = decompose_on_basis(prod, prob.M1);
      if (!residual.empty()) throw InvalidProblem("A*V not in span of M1");
      for (size_t l = 0; l <= i && l < coef.size(); ++l)
        if (!coef[l].empty()) throw InvalidProblem("A*V violates triangularity");
    }
  }
}

// ---- representation extraction (trivial classes) ----

// Split a full matrix back into per-arrow blocks: subtract the H(k) part and
// decompose the rest on M1. Requires exact membership.
template <class K>
Representation<K> extract_representation(const ProblemSpec<K>& prob, const Matrix<K>& full,
                                         const SizeVector& sizes) {
  if (!prob.trivial_classes()) throw InvalidProblem("extract needs trivial classes");
  auto off = strip_offsets(sizes);
  Matrix<K> rest = full - assemble_h(prob, sizes);
  Representation<K> rep;
  rep.sizes = sizes;
  for (auto& A : prob.M1) {
    Pos lead = A.leading_pos();
    Matrix<K> blk = rest.block(off[lead.r], off[lead.c], sizes[lead.r], sizes[lead.c]);
    rep.arrows.push_back(blk);
    rest = rest - star(blk, A, prob, sizes, sizes);
  }
  if (!rest.is_zero()) throw InvalidProblem("matrix is not a representation of the problem");
  return rep;
}

// transport along an invertible morphism-shaped transformation g: P -> (..)
template <class K>
Representation<K> conjugate_representation(const ProblemSpec<K>& prob,
                                           const Representation<K>& P, const Morphism<K>& g) {
  Matrix<K> gbar = assemble_morphism(g, prob, P, P);
  Matrix<K> gi = inverse(gbar);
  Matrix<K> moved = gi * assemble(P, prob) * gbar;
  return extract_representation(prob, moved, P.sizes);
}

// ---- quotient-sub pair view (Picture 4.1-1) ----

template <class K>
struct OneSidedView {
  int row_strip = -1;            // T̄_R = {p}
  std::vector<int> col_strips;   // T̄_C, column strips of d_1..d_m
  std::vector<BaseMatrix<K>> solids;  // d_1..d_m
};

template <class K>
OneSidedView<K> quotient_sub_pair(const ProblemSpec<K>& prob, int m) {
  OneSidedView<K> v;
  if (m == 0) return v;
  if (m < 0 || m > static_cast<int>(prob.M1.size()))
    throw InvalidInput("quotient_sub_pair: bad arrow count");
  v.row_strip = prob.M1[0].leading_pos().r;
  for (int i = 0; i < m; ++i) {
    Pos p = prob.M1[i].leading_pos();
    if (p.r != v.row_strip)
      throw NotOneSidedRow("first arrows do not share a row strip");
    v.col_strips.push_back(p.c);
    v.solids.push_back(prob.M1[i]);
  }
  return v;
}

} // namespace mbp
