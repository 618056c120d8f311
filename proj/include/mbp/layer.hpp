// Symbolic layer of the bocs associated to a matrix bimodule problem:
// formal products, the formal equation, differentials of solid and dotted
// arrows, and base change of dotted arrows.
//
// The differential of a solid arrow is read off the formal equation as the
// entry of PI*THETA - THETA*PI + PI*H - H*PI at the arrow's leading
// position; dotted differentials come from PI*PI the same way.
#pragma once

#include "mbp/problem.hpp"

#include <algorithm>
#include <string>
#include <vector>

namespace mbp {

enum class ArrowKind : unsigned char { Solid, Dotted };

struct ArrowId {
  ArrowKind kind = ArrowKind::Solid;
  int index = -1;  // position in M1 resp. K1
  int src = -1, tgt = -1;  // class indices
  std::string name;
};

template <class K>
struct Term {
  enum Kind : unsigned char { V, VA, AV } kind = V;
  BiPoly<K> coef;
  // V: i = dotted index; VA: i = dotted, j = solid; AV: i = solid, j = dotted
  int i = -1, j = -1;

  std::tuple<int, int, int> key() const { return {static_cast<int>(kind), i, j}; }
};

template <class K>
struct TermSum {
  std::vector<Term<K>> terms;  // sorted by key, no zero coefficients

  bool is_zero() const { return terms.empty(); }

  void add(typename Term<K>::Kind kind, const BiPoly<K>& c, int i, int j = -1) {
    if (c.is_zero()) return;
    Term<K> t;
    t.kind = kind;
    t.coef = c;
    t.i = i;
    t.j = j;
    auto it = std::lower_bound(terms.begin(), terms.end(), t,
                               [](const Term<K>& a, const Term<K>& b) { return a.key() < b.key(); });
    if (it != terms.end() && it->key() == t.key()) {
      it->coef = it->coef + c;
      if (it->coef.is_zero()) terms.erase(it);
    } else {
      terms.insert(it, std::move(t));
    }
  }

  // the pure dotted part as a coefficient vector over K1
  std::vector<BiPoly<K>> v_coeffs(size_t num_dotted) const {
    std::vector<BiPoly<K>> out(num_dotted);
    for (auto& t : terms)
      if (t.kind == Term<K>::V) out[t.i] = t.coef;
    return out;
  }
  bool pure_dotted() const {
    for (auto& t : terms)
      if (t.kind != Term<K>::V) return false;
    return true;
  }

  bool operator==(const TermSum& o) const {
    if (terms.size() != o.terms.size()) return false;
    for (size_t i = 0; i < terms.size(); ++i)
      if (terms[i].key() != o.terms[i].key() || terms[i].coef != o.terms[i].coef) return false;
    return true;
  }

  std::string str(const ProblemSpec<K>& prob) const;
};

template <class K>
struct DottedPair {
  BiPoly<K> coef;
  int i = -1, j = -1;  // v_i (x) v_j
};

template <class K>
struct BocsLayer {
  std::vector<ArrowId> solids;   // ordered as M1
  std::vector<ArrowId> dotteds;  // ordered as K1
  std::vector<TermSum<K>> delta_solid;
  std::vector<std::vector<DottedPair<K>>> delta_dotted;
};

// ---- symbolic entries of the formal products ----

// A formal-product entry: linear combination of arrow symbols over BiPoly.
template <class K>
struct SymEntry {
  // (arrow kind, index, coefficient)
  std::vector<std::tuple<ArrowKind, int, BiPoly<K>>> parts;
};

template <class K>
struct FormalProducts {
  // Upsilon is determined by the class structure (e_X on every diagonal)
  std::map<Pos, SymEntry<K>, PosPrecLess> Pi, Theta;
};

template <class K>
FormalProducts<K> formal_products(const ProblemSpec<K>& prob) {
  FormalProducts<K> fp;
  for (size_t j = 0; j < prob.K1.size(); ++j)
    for (auto& [p, c] : prob.K1[j].entries)
      fp.Pi[p].parts.emplace_back(ArrowKind::Dotted, static_cast<int>(j), c);
  for (size_t i = 0; i < prob.M1.size(); ++i)
    for (auto& [p, c] : prob.M1[i].entries)
      fp.Theta[p].parts.emplace_back(ArrowKind::Solid, static_cast<int>(i), c);
  return fp;
}

namespace detail {

// multiply coefficients across a shared strip k: left lives in
// (x_src, y_k), right in (x_k, y_tgt); the shared class must act in degree
// zero for the product to stay bivariate
template <class K>
BiPoly<K> join_coef(const BiPoly<K>& left, const BiPoly<K>& right, bool /*middle_trivial*/) {
  BiPoly<K> out;
  for (auto& [ml, kl] : left.t)
    for (auto& [mr, kr] : right.t) {
      int middle = ml.second + mr.first;
      if (middle != 0)
        throw std::domain_error(
            "differential coefficient needs a middle tensor slot (unsupported)");
      out.add_term(ml.first, mr.second, kl * kr);
    }
  return out;
}

} // namespace detail

// differential of the l-th solid arrow, read off the formal equation
template <class K>
TermSum<K> solid_differential(const ProblemSpec<K>& prob, size_t l) {
  if (l >= prob.M1.size()) throw InvalidInput("solid_differential: index");
  Pos at = prob.M1[l].leading_pos();
  TermSum<K> out;
  // PI*THETA: v (x) a terms, positive
  for (size_t j = 0; j < prob.K1.size(); ++j)
    for (auto& [p, cv] : prob.K1[j].entries) {
      if (p.r != at.r) continue;
      for (size_t i = 0; i < prob.M1.size(); ++i) {
        auto ca = prob.M1[i].at(p.c, at.c);
        if (ca.is_zero()) continue;
        bool mid_trivial = !prob.classes[prob.class_of[p.c]].parametric;
        out.add(Term<K>::VA, detail::join_coef(cv, ca, mid_trivial), static_cast<int>(j),
                static_cast<int>(i));
      }
    }
  // THETA*PI: a (x) v terms, negative
  for (size_t i = 0; i < prob.M1.size(); ++i)
    for (auto& [p, ca] : prob.M1[i].entries) {
      if (p.r != at.r) continue;
      for (size_t j = 0; j < prob.K1.size(); ++j) {
        auto cv = prob.K1[j].at(p.c, at.c);
        if (cv.is_zero()) continue;
        bool mid_trivial = !prob.classes[prob.class_of[p.c]].parametric;
        out.add(Term<K>::AV, -detail::join_coef(ca, cv, mid_trivial), static_cast<int>(i),
                static_cast<int>(j));
      }
    }
  // PI*H - H*PI: pure dotted terms
  for (size_t j = 0; j < prob.K1.size(); ++j) {
    for (auto& [p, cv] : prob.K1[j].entries) {
      if (p.r == at.r) {
        auto h = prob.h_at(p.c, at.c);
        if (!h.is_zero()) {
          // cv * h(y), y the parameter of the target class
          BiPoly<K> c;
          for (auto& [m, k] : cv.t)
            for (int d = 0; d <= h.degree(); ++d)
              if (!h.coeff(d).is_zero()) c.add_term(m.first, m.second + d, k * h.coeff(d));
          out.add(Term<K>::V, c, static_cast<int>(j));
        }
      }
      if (p.c == at.c) {
        auto h = prob.h_at(at.r, p.r);
        if (!h.is_zero()) {
          // -h(x) * cv
          BiPoly<K> c;
          for (auto& [m, k] : cv.t)
            for (int d = 0; d <= h.degree(); ++d)
              if (!h.coeff(d).is_zero()) c.add_term(m.first + d, m.second, k * h.coeff(d));
          out.add(Term<K>::V, -c, static_cast<int>(j));
        }
      }
    }
  }
  return out;
}

// mu_11 of the j-th dotted arrow: PI*PI collected at the leading position
template <class K>
std::vector<DottedPair<K>> dotted_differential(const ProblemSpec<K>& prob, size_t l) {
  if (l >= prob.K1.size()) throw InvalidInput("dotted_differential: index");
  Pos at = prob.K1[l].leading_pos();
  std::map<std::pair<int, int>, BiPoly<K>> acc;
  for (size_t i = 0; i < prob.K1.size(); ++i)
    for (auto& [p, ci] : prob.K1[i].entries) {
      if (p.r != at.r) continue;
      for (size_t j = 0; j < prob.K1.size(); ++j) {
        auto cj = prob.K1[j].at(p.c, at.c);
        if (cj.is_zero()) continue;
        bool mid_trivial = !prob.classes[prob.class_of[p.c]].parametric;
        auto& slot = acc[{static_cast<int>(i), static_cast<int>(j)}];
        slot = slot + detail::join_coef(ci, cj, mid_trivial);
      }
    }
  std::vector<DottedPair<K>> out;
  for (auto& [key, c] : acc)
    if (!c.is_zero()) out.push_back({c, key.first, key.second});
  return out;
}

template <class K>
BocsLayer<K> build_layer(const ProblemSpec<K>& prob) {
  BocsLayer<K> L;
  for (size_t i = 0; i < prob.M1.size(); ++i)
    L.solids.push_back({ArrowKind::Solid, static_cast<int>(i), prob.M1[i].src, prob.M1[i].tgt,
                        prob.solid_name(i)});
  for (size_t j = 0; j < prob.K1.size(); ++j)
    L.dotteds.push_back({ArrowKind::Dotted, static_cast<int>(j), prob.K1[j].src, prob.K1[j].tgt,
                         prob.dotted_name(j)});
  for (size_t i = 0; i < prob.M1.size(); ++i) L.delta_solid.push_back(solid_differential(prob, i));
  for (size_t j = 0; j < prob.K1.size(); ++j)
    L.delta_dotted.push_back(dotted_differential(prob, j));
  return L;
}

// ---- the structure-constant route to the differential (Lemma 1.4.1) ----

// iota_11 - tau_11 + partial_1 assembled from base-matrix decompositions;
// an independent route used to validate Theorem 1.4.2
template <class K>
TermSum<K> delta_via_structure_constants(const ProblemSpec<K>& prob, size_t l) {
  TermSum<K> out;
  // eta: V_i A_j = sum_l eta_{ijl} A_l
  for (size_t i = 0; i < prob.K1.size(); ++i)
    for (size_t j = 0; j < prob.M1.size(); ++j) {
      auto prod = base_product(prob.K1[i], prob.M1[j]);
      auto [coef, residual] = decompose_on_basis(prod, prob.M1);
      if (!residual.empty()) throw InvalidProblem("V*A not in span of M1");
      if (!coef[l].empty())
        out.add(Term<K>::VA, tri_to_bi(coef[l]), static_cast<int>(i), static_cast<int>(j));
    }
  // sigma: A_i V_j
  for (size_t i = 0; i < prob.M1.size(); ++i)
    for (size_t j = 0; j < prob.K1.size(); ++j) {
      auto prod = base_product(prob.M1[i], prob.K1[j]);
      auto [coef, residual] = decompose_on_basis(prod, prob.M1);
      if (!residual.empty()) throw InvalidProblem("A*V not in span of M1");
      if (!coef[l].empty())
        out.add(Term<K>::AV, -tri_to_bi(coef[l]), static_cast<int>(i), static_cast<int>(j));
    }
  // zeta: d(V_i) = V_i H - H V_i
  for (size_t i = 0; i < prob.K1.size(); ++i) {
    auto vh = base_h_product(prob.K1[i], prob.H, true);
    auto hv = base_h_product(prob.K1[i], prob.H, false);
    for (auto& [p, cell] : hv) {
      auto& dst = vh[p];
      for (auto& [k, v] : cell) tri_add(dst, std::get<0>(k), std::get<1>(k), std::get<2>(k), -v);
      if (dst.empty()) vh.erase(p);
    }
    auto [coef, residual] = decompose_on_basis(vh, prob.M1);
    if (!residual.empty()) throw InvalidProblem("d(V) not in span of M1");
    if (!coef[l].empty()) out.add(Term<K>::V, tri_to_bi(coef[l]), static_cast<int>(i));
  }
  return out;
}

// ---- evaluating the morphism formula (1.2-7) ----

// P(a_l) f_{Y_l} - f_{X_l} Q(a_l) == sum of evaluated differential terms
template <class K>
bool check_morphism_formula(const Representation<K>& P, const Representation<K>& Q,
                            const Morphism<K>& f, const ProblemSpec<K>& prob) {
  if (f.f_class.size() != prob.classes.size() || f.f_dotted.size() != prob.K1.size())
    throw ShapeMismatch("morphism component count");
  std::vector<Matrix<K>> wP(prob.num_classes()), wQ(prob.num_classes());
  for (int c = 0; c < prob.num_classes(); ++c) {
    wP[c] = weyr_matrix_for_class(prob, P, c);
    wQ[c] = weyr_matrix_for_class(prob, Q, c);
  }
  auto eval_coef = [&](const BiPoly<K>& c, int src_cls, int tgt_cls,
                       const Matrix<K>& core) {
    Matrix<K> acc(core.rows(), core.cols());
    for (auto& [m, k] : c.t) {
      Matrix<K> term = core.scaled(k);
      if (m.first > 0) term = wP[src_cls].pow(m.first) * term;
      if (m.second > 0) term = term * wQ[tgt_cls].pow(m.second);
      acc = acc + term;
    }
    return acc;
  };
  for (size_t l = 0; l < prob.M1.size(); ++l) {
    int X = prob.M1[l].src, Y = prob.M1[l].tgt;
    Matrix<K> lhs = P.arrows[l] * f.f_class[Y] - f.f_class[X] * Q.arrows[l];
    TermSum<K> d = solid_differential(prob, l);
    int mX = prob.classes[X].strips.empty() ? 0 : P.sizes[prob.classes[X].strips[0]];
    int nY = prob.classes[Y].strips.empty() ? 0 : Q.sizes[prob.classes[Y].strips[0]];
    Matrix<K> rhs(mX, nY);
    for (auto& t : d.terms) {
      switch (t.kind) {
        case Term<K>::V:
          rhs = rhs + eval_coef(t.coef, X, Y, f.f_dotted[t.i]);
          break;
        case Term<K>::VA:
          rhs = rhs + eval_coef(t.coef, X, Y, f.f_dotted[t.i] * Q.arrows[t.j]);
          break;
        case Term<K>::AV:
          rhs = rhs + eval_coef(t.coef, X, Y, P.arrows[t.i] * f.f_dotted[t.j]);
          break;
      }
    }
    if (!(lhs == rhs)) return false;
  }
  return true;
}

// ---- base change of dotted arrows (Formulae 2.2-7 / 2.2-8) ----

namespace detail {

// invertibility of a BiPoly as a localization unit: a nonzero constant, or a
// monomial times one (the pivots our base-change matrices need)
template <class K>
bool unit_coeff(const BiPoly<K>& c, K& scalar) {
  if (c.t.size() != 1) return false;
  auto& [m, k] = *c.t.begin();
  if (m.first != 0 || m.second != 0) return false;
  scalar = k;
  return true;
}

// Gauss-Jordan inverse over BiPoly where every pivot must be a nonzero
// scalar; adequate for permutation, unipotent and column-replacement F's
template <class K>
Matrix<BiPoly<K>> bipoly_inverse(const Matrix<BiPoly<K>>& F) {
  size_t n = F.rows();
  if (F.cols() != n) throw ShapeMismatch("bipoly_inverse: non-square");
  Matrix<BiPoly<K>> a = F, inv(n, n);
  for (size_t i = 0; i < n; ++i) inv(i, i) = BiPoly<K>::one();
  for (size_t col = 0; col < n; ++col) {
    // find a scalar-unit pivot in this column
    size_t piv = n;
    K sc;
    for (size_t r = col; r < n; ++r)
      if (unit_coeff(a(r, col), sc) && !sc.is_zero()) {
        piv = r;
        break;
      }
    if (piv == n) throw NotInvertible("no unit pivot for dotted base change");
    if (piv != col)
      for (size_t j = 0; j < n; ++j) {
        std::swap(a(piv, j), a(col, j));
        std::swap(inv(piv, j), inv(col, j));
      }
    K s;
    unit_coeff(a(col, col), s);
    BiPoly<K> sinv = BiPoly<K>::constant(s.inv());
    for (size_t j = 0; j < n; ++j) {
      a(col, j) = a(col, j) * sinv;
      inv(col, j) = inv(col, j) * sinv;
    }
    for (size_t r = 0; r < n; ++r) {
      if (r == col || a(r, col).is_zero()) continue;
      BiPoly<K> f = a(r, col);
      for (size_t j = 0; j < n; ++j) {
        a(r, j) = a(r, j) - f * a(col, j);
        inv(r, j) = inv(r, j) - f * inv(col, j);
      }
    }
  }
  return inv;
}

} // namespace detail

// Rewrites the dotted arrows by (v'_1..v'_m) = (v_1..v_m) F and the K1 bases
// by F^{-T}; `denominator`, when nontrivial, is recorded in the localization
// state of every parametric class touched by a changed arrow. Bases are
// re-sorted by leading position afterwards and names follow their bases.
template <class K>
void base_change_dotted(ProblemSpec<K>& prob, const Matrix<BiPoly<K>>& F,
                        const UniPoly<K>& denominator,
                        const std::vector<std::string>& fresh_names = {}) {
  size_t m = prob.K1.size();
  if (F.rows() != m || F.cols() != m) throw ShapeMismatch("base change size");
  Matrix<BiPoly<K>> Finv = detail::bipoly_inverse(F);
  // V'_l = sum_j (F^{-T})_{jl} V_j = sum_j Finv_{lj} V_j
  std::vector<BaseMatrix<K>> nk(m);
  std::vector<std::string> names(m);
  size_t fresh = 0;
  for (size_t l = 0; l < m; ++l) {
    BaseMatrix<K> acc;
    acc.src = prob.K1[l].src;
    acc.tgt = prob.K1[l].tgt;
    // a column equal to a standard basis vector is a pure relabeling
    int relabel_of = -1;
    bool simple = true;
    for (size_t j = 0; j < m; ++j) {
      const BiPoly<K>& c = F(j, l);
      if (c.is_zero()) continue;
      if (c.is_one() && relabel_of == -1)
        relabel_of = static_cast<int>(j);
      else
        simple = false;
    }
    for (size_t j = 0; j < m; ++j) {
      const BiPoly<K>& ci = Finv(l, j);
      if (ci.is_zero()) continue;
      if (prob.K1[j].src != acc.src || prob.K1[j].tgt != acc.tgt)
        throw InvalidProblem("base change mixes class pairs");
      for (auto& [p, v] : prob.K1[j].entries) {
        auto cur = acc.at(p.r, p.c);
        acc.set(p.r, p.c, cur + ci * v);
      }
    }
    if (acc.is_zero()) throw NotInvertible("base change produced a zero base");
    nk[l] = std::move(acc);
    if (simple && relabel_of >= 0) {
      names[l] = prob.dotted_name(relabel_of);
    } else if (fresh < fresh_names.size()) {
      names[l] = fresh_names[fresh++];
    } else {
      names[l] = "w" + std::to_string(l + 1);
    }
  }
  // stable sort by leading position
  std::vector<size_t> order(m);
  for (size_t i = 0; i < m; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return pos_prec(nk[a].leading_pos(), nk[b].leading_pos());
  });
  std::vector<BaseMatrix<K>> sorted;
  std::vector<std::string> sorted_names;
  for (size_t i : order) {
    sorted.push_back(std::move(nk[i]));
    sorted_names.push_back(std::move(names[i]));
  }
  prob.K1 = std::move(sorted);
  prob.dotted_names = std::move(sorted_names);
  if (!denominator.is_constant()) {
    std::vector<bool> touched(prob.classes.size(), false);
    for (size_t j = 0; j < m; ++j)
      for (size_t l = 0; l < m; ++l)
        if ((j == l && !F(j, l).is_one()) || (j != l && !F(j, l).is_zero())) {
          touched[prob.K1[l].src] = true;
          touched[prob.K1[l].tgt] = true;
        }
    for (size_t c = 0; c < prob.classes.size(); ++c)
      if (touched[c] && prob.classes[c].parametric)
        prob.classes[c].phi_factors.push_back(denominator);
  }
}

template <class K>
std::string TermSum<K>::str(const ProblemSpec<K>& prob) const {
  if (terms.empty()) return "0";
  std::string s;
  for (auto& t : terms) {
    if (!s.empty()) s += " + ";
    std::string coef = t.coef.is_one() ? "" : "(" + t.coef.str() + ")";
    switch (t.kind) {
      case Term<K>::V:
        s += coef + prob.dotted_name(t.i);
        break;
      case Term<K>::VA:
        s += coef + prob.dotted_name(t.i) + "*" + prob.solid_name(t.j);
        break;
      case Term<K>::AV:
        s += coef + prob.solid_name(t.i) + "*" + prob.dotted_name(t.j);
        break;
    }
  }
  return s;
}

} // namespace mbp
