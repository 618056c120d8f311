// Defining systems, the eight reductions, the canonical-form reduction
// sequence, and isomorphism / indecomposability decisions.
//
// Induced problems are produced by one shared inflation routine: every
// strip of a class splits into substrips carrying new classes (deleted
// substrips are tagged -1), parametric classes substitute their x-action
// matrix, quasi-bases and H are inflated entry by entry, and the reduced
// first arrow contributes its block G to the new H.
#pragma once

#include "mbp/layer.hpp"
#include "mbp/problem.hpp"
#include "mbp/weyr.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace mbp {

// ---- inflation machinery (Construction 2.1.3 specialized) ----

template <class K>
struct ClassInflation {
  // per substrip: target class in the new problem, or -1 for deletion
  std::vector<int> substrip_class{0};
  // x-action of the old parameter on the substrips (parametric old classes
  // only); entries are univariate in the new class parameters
  std::optional<Matrix<UniPoly<K>>> x_action;

  int n() const { return static_cast<int>(substrip_class.size()); }
};

template <class K>
struct InflationDatum {
  std::vector<ClassInflation<K>> per_class;  // indexed by old class
  int new_num_classes = 0;
  std::vector<bool> new_parametric;                 // per new class
  std::vector<std::vector<UniPoly<K>>> new_phi;     // per new class
  // number of leading arrows reduced into H (0 or 1) and the block of the
  // reduced arrow over the new problem
  int reduced_arrows = 0;
  std::optional<Matrix<UniPoly<K>>> G;  // n_X x n_Y over new parameters
  // new dotted arrows (the F' generators): entries within one old class
  struct NewDotted {
    int old_class = 0;
    std::vector<std::tuple<int, int, K>> entries;  // (substrip p, substrip q, coef)
  };
  std::vector<NewDotted> new_dotteds;
};

namespace detail {

// maps strips of the old problem to runs of new strips
struct StripMap {
  // new_strip[s][p] = new strip index of substrip p of old strip s, or -1
  std::vector<std::vector<int>> new_strip;
  int new_t = 0;
};

template <class K>
StripMap build_strip_map(const ProblemSpec<K>& prob, const InflationDatum<K>& d) {
  StripMap sm;
  sm.new_strip.resize(prob.t);
  for (int s = 0; s < prob.t; ++s) {
    const auto& ci = d.per_class[prob.class_of[s]];
    sm.new_strip[s].assign(ci.n(), -1);
    for (int p = 0; p < ci.n(); ++p)
      if (ci.substrip_class[p] >= 0) sm.new_strip[s][p] = sm.new_t++;
  }
  return sm;
}

// powers of the x-action; identity when absent (trivial old class)
template <class K>
Matrix<UniPoly<K>> action_power(const std::optional<Matrix<UniPoly<K>>>& w, int n, int e) {
  Matrix<UniPoly<K>> m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = UniPoly<K>::constant(K::one());
  if (e == 0) return m;
  if (!w) throw InvalidProblem("polynomial entry over a class without an x-action");
  Matrix<UniPoly<K>> r = m;
  for (int k = 0; k < e; ++k) r = r * (*w);
  return r;
}

// inflate one base matrix into its (p, q) copy
template <class K>
BaseMatrix<K> inflate_base(const ProblemSpec<K>& prob, const InflationDatum<K>& d,
                           const StripMap& sm, const BaseMatrix<K>& U, int p, int q) {
  const auto& cx = d.per_class[U.src];
  const auto& cy = d.per_class[U.tgt];
  BaseMatrix<K> out;
  out.src = cx.substrip_class[p];
  out.tgt = cy.substrip_class[q];
  for (auto& [pos, u] : U.entries) {
    for (auto& [mono, k] : u.t) {
      // W_X^a E_pq W_Y^b, entry (p', q') = (W_X^a)_{p'p} (W_Y^b)_{qq'}
      auto wa = action_power<K>(cx.x_action, cx.n(), mono.first);
      auto wb = action_power<K>(cy.x_action, cy.n(), mono.second);
      for (int pp = 0; pp < cx.n(); ++pp) {
        if (sm.new_strip[pos.r][pp] < 0) continue;
        const UniPoly<K>& left = wa(pp, p);
        if (left.is_zero()) continue;
        for (int qq = 0; qq < cy.n(); ++qq) {
          if (sm.new_strip[pos.c][qq] < 0) continue;
          const UniPoly<K>& right = wb(q, qq);
          if (right.is_zero()) continue;
          // left lives in the new parameter of substrip pp's class, right in
          // that of qq's class
          BiPoly<K> add;
          for (int i = 0; i <= left.degree(); ++i)
            for (int j = 0; j <= right.degree(); ++j) {
              K c = left.coeff(i) * right.coeff(j) * k;
              if (!c.is_zero()) add.add_term(i, j, c);
            }
          if (add.is_zero()) continue;
          Pos np{sm.new_strip[pos.r][pp], sm.new_strip[pos.c][qq]};
          auto cur = out.at(np.r, np.c);
          out.set(np.r, np.c, cur + add);
        }
      }
    }
  }
  return out;
}

} // namespace detail

// apply an inflation datum; reduced_arrows leading M1 bases move into H via G
template <class K>
ProblemSpec<K> inflate_problem(const ProblemSpec<K>& prob, const InflationDatum<K>& d) {
  auto sm = detail::build_strip_map(prob, d);
  ProblemSpec<K> out;
  out.t = sm.new_t;
  out.classes.resize(d.new_num_classes);
  for (int c = 0; c < d.new_num_classes; ++c) {
    out.classes[c].parametric = d.new_parametric[c];
    out.classes[c].phi_factors = d.new_phi[c];
  }
  out.class_of.assign(out.t, -1);
  for (int s = 0; s < prob.t; ++s) {
    const auto& ci = d.per_class[prob.class_of[s]];
    for (int p = 0; p < ci.n(); ++p) {
      int ns = sm.new_strip[s][p];
      if (ns < 0) continue;
      out.class_of[ns] = ci.substrip_class[p];
      out.classes[ci.substrip_class[p]].strips.push_back(ns);
    }
  }
  for (auto& cl : out.classes) std::sort(cl.strips.begin(), cl.strips.end());

  struct Named {
    BaseMatrix<K> base;
    std::string name;
  };
  std::vector<Named> k1, m1;
  // new dotted generators first (block-diagonal across every strip of the
  // old class)
  int fresh = 0;
  for (auto& nd : d.new_dotteds) {
    BaseMatrix<K> b;
    b.src = d.per_class[nd.old_class].substrip_class[std::get<0>(nd.entries.at(0))];
    b.tgt = d.per_class[nd.old_class].substrip_class[std::get<1>(nd.entries.at(0))];
    for (int s = 0; s < prob.t; ++s) {
      if (prob.class_of[s] != nd.old_class) continue;
      for (auto& [p, q, c] : nd.entries) {
        int nr = sm.new_strip[s][p], nc = sm.new_strip[s][q];
        if (nr < 0 || nc < 0) continue;
        b.set(nr, nc, BiPoly<K>::constant(c));
      }
    }
    if (b.is_zero()) continue;  // all its substrips were deleted
    k1.push_back({std::move(b), "w" + std::to_string(++fresh)});
  }
  // kept-substrip numbering per old class (for display names)
  std::vector<std::vector<int>> kept_idx(prob.num_classes());
  std::vector<int> kept_count(prob.num_classes(), 0);
  for (int c = 0; c < prob.num_classes(); ++c) {
    kept_idx[c].assign(d.per_class[c].n(), -1);
    for (int p = 0; p < d.per_class[c].n(); ++p)
      if (d.per_class[c].substrip_class[p] >= 0) kept_idx[c][p] = kept_count[c]++;
  }
  // inflations of the old dotted arrows
  for (size_t j = 0; j < prob.K1.size(); ++j) {
    int cs = prob.K1[j].src, ct = prob.K1[j].tgt;
    const auto& cx = d.per_class[cs];
    const auto& cy = d.per_class[ct];
    for (int p = 0; p < cx.n(); ++p) {
      if (cx.substrip_class[p] < 0) continue;
      for (int q = 0; q < cy.n(); ++q) {
        if (cy.substrip_class[q] < 0) continue;
        auto b = detail::inflate_base(prob, d, sm, prob.K1[j], p, q);
        if (b.is_zero()) continue;
        std::string nm = prob.dotted_name(j);
        if (kept_count[cs] > 1 || kept_count[ct] > 1)
          nm += "_" + std::to_string(kept_idx[cs][p] + 1) + "_" +
                std::to_string(kept_idx[ct][q] + 1);
        k1.push_back({std::move(b), nm});
      }
    }
  }
  // inflations of the surviving solid arrows
  for (size_t i = d.reduced_arrows; i < prob.M1.size(); ++i) {
    int cs = prob.M1[i].src, ct = prob.M1[i].tgt;
    const auto& cx = d.per_class[cs];
    const auto& cy = d.per_class[ct];
    for (int p = 0; p < cx.n(); ++p) {
      if (cx.substrip_class[p] < 0) continue;
      for (int q = 0; q < cy.n(); ++q) {
        if (cy.substrip_class[q] < 0) continue;
        auto b = detail::inflate_base(prob, d, sm, prob.M1[i], p, q);
        if (b.is_zero()) continue;
        std::string nm = prob.solid_name(i);
        if (kept_count[cs] > 1 || kept_count[ct] > 1)
          nm += "_" + std::to_string(kept_idx[cs][p] + 1) + "_" +
                std::to_string(kept_idx[ct][q] + 1);
        m1.push_back({std::move(b), nm});
      }
    }
  }
  auto by_leading = [](const Named& a, const Named& b) {
    return pos_prec(a.base.leading_pos(), b.base.leading_pos());
  };
  std::stable_sort(k1.begin(), k1.end(), by_leading);
  std::stable_sort(m1.begin(), m1.end(), by_leading);
  for (auto& x : k1) {
    out.K1.push_back(std::move(x.base));
    out.dotted_names.push_back(std::move(x.name));
  }
  for (auto& x : m1) {
    out.M1.push_back(std::move(x.base));
    out.solid_names.push_back(std::move(x.name));
  }

  // H: inflate the old entries through the x-actions
  for (auto& [pos, h] : prob.H) {
    int cls = prob.class_of[pos.r];
    const auto& ci = d.per_class[cls];
    for (int e = 0; e <= h.degree(); ++e) {
      if (h.coeff(e).is_zero()) continue;
      auto we = detail::action_power<K>(ci.x_action, ci.n(), e);
      for (int p = 0; p < ci.n(); ++p)
        for (int q = 0; q < ci.n(); ++q) {
          int nr = sm.new_strip[pos.r][p], nc = sm.new_strip[pos.c][q];
          if (nr < 0 || nc < 0) continue;
          UniPoly<K> add = we(p, q).scaled(h.coeff(e));
          if (add.is_zero()) continue;
          auto cur = out.h_at(nr, nc) + add;
          if (cur.is_zero())
            out.H.erase(Pos{nr, nc});
          else
            out.H[Pos{nr, nc}] = cur;
        }
    }
  }
  // the reduced arrow contributes G * A_1
  if (d.reduced_arrows > 0) {
    if (d.reduced_arrows != 1) throw InvalidProblem("only one arrow can be reduced at a time");
    if (!d.G) throw InvalidProblem("reduced arrow without a block G");
    const auto& A = prob.M1[0];
    const auto& cx = d.per_class[A.src];
    const auto& cy = d.per_class[A.tgt];
    for (auto& [pos, u] : A.entries) {
      if (!u.is_constant())
        throw InvalidProblem("reduced arrow has polynomial coefficients");
      K c = u.constant_term();
      for (int p = 0; p < cx.n(); ++p)
        for (int q = 0; q < cy.n(); ++q) {
          int nr = sm.new_strip[pos.r][p], nc = sm.new_strip[pos.c][q];
          if (nr < 0 || nc < 0) continue;
          UniPoly<K> add = (*d.G)(p, q).scaled(c);
          if (add.is_zero()) continue;
          auto cur = out.h_at(nr, nc) + add;
          if (cur.is_zero())
            out.H.erase(Pos{nr, nc});
          else
            out.H[Pos{nr, nc}] = cur;
        }
    }
  }
  validate(out);
  return out;
}

// ---- the eight reductions ----

enum class StepKind {
  Deletion,
  Regularization,
  LoopMutation,
  Edge,
  UnravelingLoop,
  Localization,
  ToZero226,
  ToIdentity227,
};

inline const char* step_kind_name(StepKind k) {
  switch (k) {
    case StepKind::Deletion: return "deletion";
    case StepKind::Regularization: return "regularization";
    case StepKind::LoopMutation: return "loop_mutation";
    case StepKind::Edge: return "edge";
    case StepKind::UnravelingLoop: return "unraveling_loop";
    case StepKind::Localization: return "localization";
    case StepKind::ToZero226: return "to_zero_226";
    case StepKind::ToIdentity227: return "to_identity_227";
  }
  return "?";
}

template <class K>
struct ReductionStep {
  StepKind kind = StepKind::Deletion;
  std::vector<int> delete_classes;  // Deletion
  int edge_case = 0;                // Edge: 1..5 per Formula 2.3-5
  WeyrForm<K> weyr;                 // UnravelingLoop: structure of G = W-bar
  bool keep_z0 = false;             // UnravelingLoop: keep the leftover parametric class
  int cls = -1;                     // Localization target class
  UniPoly<K> localize;              // Localization polynomial c(x)
};

namespace detail {

template <class K>
ProblemSpec<K> delete_classes(const ProblemSpec<K>& prob, const std::vector<int>& del) {
  InflationDatum<K> d;
  d.per_class.resize(prob.num_classes());
  std::vector<int> newcls(prob.num_classes(), -1);
  int nc = 0;
  for (int c = 0; c < prob.num_classes(); ++c) {
    bool keep = std::find(del.begin(), del.end(), c) == del.end();
    if (keep) newcls[c] = nc++;
  }
  d.new_num_classes = nc;
  d.new_parametric.assign(nc, false);
  d.new_phi.resize(nc);
  for (int c = 0; c < prob.num_classes(); ++c) {
    d.per_class[c].substrip_class = {newcls[c]};
    if (newcls[c] >= 0) {
      d.new_parametric[newcls[c]] = prob.classes[c].parametric;
      d.new_phi[newcls[c]] = prob.classes[c].phi_factors;
      if (prob.classes[c].parametric) {
        Matrix<UniPoly<K>> w(1, 1);
        w(0, 0) = UniPoly<K>::variable(Var::X);
        d.per_class[c].x_action = w;
      }
    }
  }
  // drop bases touching deleted classes entirely: inflate handles entries,
  // but bases whose class pair is deleted must vanish; inflate_base yields
  // zero matrices for them, which are skipped
  return inflate_problem(prob, d);
}

// identity datum with one class split according to `split`
template <class K>
InflationDatum<K> identity_datum(const ProblemSpec<K>& prob) {
  InflationDatum<K> d;
  d.per_class.resize(prob.num_classes());
  d.new_num_classes = prob.num_classes();
  d.new_parametric.assign(prob.num_classes(), false);
  d.new_phi.resize(prob.num_classes());
  for (int c = 0; c < prob.num_classes(); ++c) {
    d.per_class[c].substrip_class = {c};
    d.new_parametric[c] = prob.classes[c].parametric;
    d.new_phi[c] = prob.classes[c].phi_factors;
    if (prob.classes[c].parametric) {
      Matrix<UniPoly<K>> w(1, 1);
      w(0, 0) = UniPoly<K>::variable(Var::X);
      d.per_class[c].x_action = w;
    }
  }
  return d;
}

} // namespace detail

// Proposition 2.2.2: first arrow a loop with zero differential becomes the
// parameter of its class
template <class K>
ProblemSpec<K> loop_mutation(const ProblemSpec<K>& prob) {
  if (prob.M1.empty()) throw IllegalStep("loop mutation: no first arrow");
  const auto& A = prob.M1[0];
  if (A.src != A.tgt) throw IllegalStep("loop mutation: first arrow is not a loop");
  if (prob.classes[A.src].parametric)
    throw IllegalStep("loop mutation: class already parametric");
  if (!solid_differential(prob, 0).is_zero())
    throw IllegalStep("loop mutation: differential of the first arrow is nonzero");
  ProblemSpec<K> out = prob;
  out.classes[A.src].parametric = true;
  out.classes[A.src].phi_factors.clear();
  for (auto& [pos, u] : A.entries) {
    if (!u.is_constant()) throw IllegalStep("loop mutation: polynomial coefficients");
    UniPoly<K> add(Var::X, {K::zero(), u.constant_term()});
    auto cur = out.h_at(pos.r, pos.c) + add;
    if (cur.is_zero())
      out.H.erase(pos);
    else
      out.H[pos] = cur;
  }
  out.M1.erase(out.M1.begin());
  if (!out.solid_names.empty()) out.solid_names.erase(out.solid_names.begin());
  validate(out);
  return out;
}

// Proposition 2.2.1: finitely generated localization of a parametric class
template <class K>
ProblemSpec<K> localize(const ProblemSpec<K>& prob, int cls, const UniPoly<K>& c) {
  if (cls < 0 || cls >= prob.num_classes() || !prob.classes[cls].parametric)
    throw IllegalStep("localization: class is not parametric");
  if (c.is_zero()) throw IllegalStep("localization by zero");
  ProblemSpec<K> out = prob;
  if (!c.is_constant()) out.classes[cls].phi_factors.push_back(c);
  return out;
}

// Proposition 2.2.6: drop the first arrow (its block is forced to zero)
template <class K>
ProblemSpec<K> to_zero_226(const ProblemSpec<K>& prob) {
  if (prob.M1.empty()) throw IllegalStep("2.2.6: no first arrow");
  if (!solid_differential(prob, 0).is_zero())
    throw IllegalStep("2.2.6: differential of the first arrow is nonzero");
  ProblemSpec<K> out = prob;
  out.M1.erase(out.M1.begin());
  if (!out.solid_names.empty()) out.solid_names.erase(out.solid_names.begin());
  validate(out);
  return out;
}

// Proposition 2.2.7: first arrow becomes an identity, gluing its endpoints
template <class K>
ProblemSpec<K> to_identity_227(const ProblemSpec<K>& prob) {
  if (prob.M1.empty()) throw IllegalStep("2.2.7: no first arrow");
  const auto& A = prob.M1[0];
  if (A.src == A.tgt) throw IllegalStep("2.2.7: first arrow is a loop");
  if (!solid_differential(prob, 0).is_zero())
    throw IllegalStep("2.2.7: differential of the first arrow is nonzero");
  if (prob.classes[A.src].parametric && prob.classes[A.tgt].parametric)
    throw IllegalStep("2.2.7: both endpoint classes parametric");
  auto d = detail::identity_datum(prob);
  // merge the classes: relabel tgt to src's new class, compact ids
  int keep = std::min(A.src, A.tgt), drop = std::max(A.src, A.tgt);
  std::vector<int> remap(prob.num_classes());
  int nc = 0;
  for (int c = 0; c < prob.num_classes(); ++c) remap[c] = (c == drop) ? -2 : nc++;
  remap[drop] = remap[keep];
  d.new_num_classes = nc;
  d.new_parametric.assign(nc, false);
  d.new_phi.assign(nc, {});
  for (int c = 0; c < prob.num_classes(); ++c) {
    d.per_class[c].substrip_class = {remap[c]};
    bool param = prob.classes[c].parametric;
    if (c == keep || c == drop)
      param = prob.classes[A.src].parametric || prob.classes[A.tgt].parametric;
    d.new_parametric[remap[c]] = param;
    if (param) {
      Matrix<UniPoly<K>> w(1, 1);
      w(0, 0) = UniPoly<K>::variable(Var::X);
      d.per_class[c].x_action = w;
      auto phi = prob.classes[c].phi_factors;
      if (c == keep || c == drop)
        phi = prob.classes[prob.classes[A.src].parametric ? A.src : A.tgt].phi_factors;
      d.new_phi[remap[c]] = phi;
    } else {
      d.new_phi[remap[c]] = {};
    }
  }
  d.reduced_arrows = 1;
  Matrix<UniPoly<K>> g(1, 1);
  g(0, 0) = UniPoly<K>::constant(K::one());
  d.G = g;
  return inflate_problem(prob, d);
}

// Proposition 2.2.5 with the deletions of Formula 2.3-5 folded in:
// edge_case 1..5 picks the reduction block G
template <class K>
InflationDatum<K> edge_datum(const ProblemSpec<K>& prob, int edge_case) {
  const auto& A = prob.M1.at(0);
  int X = A.src, Y = A.tgt;
  if (X == Y) throw IllegalStep("edge reduction: first arrow is a loop");
  if (prob.classes[X].parametric || prob.classes[Y].parametric)
    throw IllegalStep("edge reduction: endpoints must be trivial");
  auto d = detail::identity_datum(prob);
  // substrip layout: X = (Z2, Z1), Y = (Z3, Z2); cases delete subsets
  bool keep_z1 = edge_case == 1 || edge_case == 4 || edge_case == 5;
  bool keep_z2 = edge_case != 1;
  bool keep_z3 = edge_case == 1 || edge_case == 3 || edge_case == 5;
  // new class ids: keep every old class except X, Y (compact), then add
  std::vector<int> remap(prob.num_classes(), -1);
  int nc = 0;
  for (int c = 0; c < prob.num_classes(); ++c)
    if (c != X && c != Y) remap[c] = nc++;
  int z1 = keep_z1 ? nc++ : -1;
  int z2 = keep_z2 ? nc++ : -1;
  int z3 = keep_z3 ? nc++ : -1;
  d.new_num_classes = nc;
  d.new_parametric.assign(nc, false);
  d.new_phi.assign(nc, {});
  for (int c = 0; c < prob.num_classes(); ++c) {
    if (c == X || c == Y) continue;
    d.per_class[c].substrip_class = {remap[c]};
    d.new_parametric[remap[c]] = prob.classes[c].parametric;
    d.new_phi[remap[c]] = prob.classes[c].phi_factors;
  }
  d.per_class[X].substrip_class = {z2, z1};
  d.per_class[Y].substrip_class = {z3, z2};
  d.reduced_arrows = 1;
  Matrix<UniPoly<K>> g(2, 2);
  g(0, 1) = UniPoly<K>::constant(K::one());  // X substrip Z2 -> Y substrip Z2
  d.G = g;
  // the new dotted generators F_{Z2 Z1} (inside X) and F_{Z3 Z2} (inside Y)
  if (keep_z2 && keep_z1) d.new_dotteds.push_back({X, {{0, 1, K::one()}}});
  if (keep_z3 && keep_z2) d.new_dotteds.push_back({Y, {{0, 1, K::one()}}});
  return d;
}

// Proposition 2.2.4 after a loop mutation: unravel the parametric class of
// the (former) first arrow according to a Weyr structure; Z0 is kept only
// when requested
template <class K>
InflationDatum<K> unraveling_datum(const ProblemSpec<K>& prob, int X, const WeyrForm<K>& w,
                                   bool keep_z0, const UniPoly<K>& phi_z0) {
  if (!prob.classes[X].parametric) throw IllegalStep("unraveling: class not parametric");
  if (!is_regular(w, prob.classes[X].phi()))
    throw IllegalStep("unraveling: eigenvalue violates the localization");
  auto d = detail::identity_datum(prob);
  std::vector<int> remap(prob.num_classes(), -1);
  int nc = 0;
  for (int c = 0; c < prob.num_classes(); ++c)
    if (c != X) remap[c] = nc++;
  d.new_parametric.assign(nc, false);
  d.new_phi.assign(nc, {});
  for (int c = 0; c < prob.num_classes(); ++c) {
    if (c == X) continue;
    d.per_class[c].substrip_class = {remap[c]};
    d.new_parametric[remap[c]] = prob.classes[c].parametric;
    d.new_phi[remap[c]] = prob.classes[c].phi_factors;
  }
  // substrips of X: Z0 first, then (i, j, l) with i by eigenvalue order,
  // l ascending, j descending; class Z_{ij} per (i, j)
  struct Sub {
    int i, j, l;  // eigenvalue index, chain length, layer
  };
  std::vector<Sub> subs;
  int z0_class = -1;
  auto& cx = d.per_class[X];
  cx.substrip_class.clear();
  std::vector<std::vector<int>> e_of;  // e_of[i][j-1]
  for (size_t i = 0; i < w.blocks.size(); ++i) {
    const auto& m = w.blocks[i].m;
    std::vector<int> e(m.size(), 0);
    for (size_t j = 0; j < m.size(); ++j) {
      int mj1 = (j + 1 < m.size()) ? m[j + 1] : 0;
      e[j] = m[j] - mj1;
    }
    e_of.push_back(e);
  }
  // allocate classes
  std::map<std::pair<int, int>, int> zclass;  // (i, j) -> new class
  if (keep_z0) {
    z0_class = nc++;
    d.new_parametric.push_back(true);
    d.new_phi.push_back({phi_z0});
  }
  for (size_t i = 0; i < e_of.size(); ++i)
    for (size_t j = 0; j < e_of[i].size(); ++j)
      if (e_of[i][j] > 0) {
        zclass[{static_cast<int>(i), static_cast<int>(j)}] = nc++;
        d.new_parametric.push_back(false);
        d.new_phi.push_back({});
      }
  d.new_num_classes = nc;
  // substrip order
  cx.substrip_class.push_back(keep_z0 ? z0_class : -1);
  subs.push_back({-1, -1, -1});  // Z0 marker
  for (size_t i = 0; i < e_of.size(); ++i) {
    int r = static_cast<int>(e_of[i].size());
    for (int l = 1; l <= r; ++l)
      for (int j = r; j >= l; --j) {
        if (e_of[i][j - 1] <= 0) continue;
        cx.substrip_class.push_back(zclass.at({static_cast<int>(i), j - 1}));
        subs.push_back({static_cast<int>(i), j, l});
      }
  }
  // x-action: z on Z0; lambda_i on (i,j,l); 1 from (i,j,l) to (i,j,l+1)
  int n = cx.n();
  Matrix<UniPoly<K>> act(n, n);
  for (int p = 0; p < n; ++p) {
    if (subs[p].i < 0) {
      act(p, p) = UniPoly<K>::variable(Var::X);
      continue;
    }
    act(p, p) = UniPoly<K>::constant(w.blocks[subs[p].i].lambda);
    for (int q = 0; q < n; ++q)
      if (subs[q].i == subs[p].i && subs[q].j == subs[p].j && subs[q].l == subs[p].l + 1)
        act(p, q) = UniPoly<K>::constant(K::one());
  }
  cx.x_action = act;
  // new dotted generators: F_{i j j' l} between chains of one eigenvalue
  for (size_t i = 0; i < e_of.size(); ++i) {
    int r = static_cast<int>(e_of[i].size());
    for (int j = 1; j <= r; ++j) {
      if (e_of[i][j - 1] <= 0) continue;
      for (int jp = 1; jp <= r; ++jp) {
        if (e_of[i][jp - 1] <= 0) continue;
        int lmin = (j > jp) ? 1 : (j == jp ? 2 : jp - j + 1);
        for (int l = lmin; l <= jp; ++l) {
          typename InflationDatum<K>::NewDotted nd;
          nd.old_class = X;
          for (int h = 1; h <= jp - l + 1 && h <= j; ++h) {
            // substrip (i, j, h) -> substrip (i, jp, l + h - 1)
            int ps = -1, qs = -1;
            for (size_t s = 1; s < subs.size(); ++s) {
              if (subs[s].i == static_cast<int>(i) && subs[s].j == j && subs[s].l == h)
                ps = static_cast<int>(s);
              if (subs[s].i == static_cast<int>(i) && subs[s].j == jp && subs[s].l == l + h - 1)
                qs = static_cast<int>(s);
            }
            if (ps >= 0 && qs >= 0) nd.entries.push_back({ps, qs, K::one()});
          }
          if (!nd.entries.empty()) d.new_dotteds.push_back(std::move(nd));
        }
      }
    }
  }
  return d;
}

// ---- regularization ----

template <class K>
struct RegularizationInfo {
  int pivot = -1;                 // index of the eliminated dotted arrow
  std::string eliminated_name;
  std::string relation;           // "name = combination of surviving arrows"
  std::vector<BiPoly<K>> zeta;    // V-coefficients of delta(a_1)
};

// Proposition 2.2.8: requires delta(a_1) to be a combination of dotted
// arrows with an invertible pivot; performs the base change and removes the
// pivot and the first solid arrow.
template <class K>
ProblemSpec<K> regularize(const ProblemSpec<K>& prob, RegularizationInfo<K>* info = nullptr) {
  if (prob.M1.empty()) throw IllegalStep("regularization: no first arrow");
  TermSum<K> d = solid_differential(prob, 0);
  if (d.is_zero()) throw IllegalStep("regularization: differential of the first arrow is zero");
  if (!d.pure_dotted())
    throw IllegalStep("regularization: differential has solid terms");
  auto zeta = d.v_coeffs(prob.K1.size());
  // pivot: first dotted arrow (in order) with a nonzero scalar coefficient
  int pivot = -1;
  for (size_t j = 0; j < zeta.size(); ++j)
    if (!zeta[j].is_zero() && zeta[j].is_constant()) {
      pivot = static_cast<int>(j);
      break;
    }
  if (pivot < 0)
    throw IllegalStep("regularization: no invertible pivot in delta(a_1)");
  K zp = zeta[pivot].constant_term();
  // relation: pivot = -(sum of the others) / zp
  if (info) {
    info->pivot = pivot;
    info->eliminated_name = prob.dotted_name(pivot);
    info->zeta = zeta;
    std::string rel;
    for (size_t j = 0; j < zeta.size(); ++j) {
      if (static_cast<int>(j) == pivot || zeta[j].is_zero()) continue;
      BiPoly<K> c = zeta[j].scaled(-(zp.inv()));
      if (!rel.empty()) rel += " + ";
      rel += (c.is_one() ? "" : "(" + c.str() + ")") + prob.dotted_name(j);
    }
    if (rel.empty()) rel = "0";
    info->relation = info->eliminated_name + " = " + rel;
  }
  // base change F: identity with column pivot replaced by zeta
  ProblemSpec<K> out = prob;
  size_t m = prob.K1.size();
  Matrix<BiPoly<K>> F(m, m);
  for (size_t i = 0; i < m; ++i) F(i, i) = BiPoly<K>::one();
  for (size_t j = 0; j < m; ++j) F(j, pivot) = zeta[j];
  std::string pname = prob.dotted_name(pivot);
  Pos pivot_lead = prob.K1[pivot].leading_pos();
  base_change_dotted(out, F, UniPoly<K>::constant(K::one()), {pname + "'"});
  // remove the transformed pivot base (leading positions are preserved by
  // the column-replacement change) and the first solid arrow
  bool removed = false;
  for (size_t j = 0; j < out.K1.size(); ++j)
    if (out.K1[j].leading_pos() == pivot_lead) {
      out.K1.erase(out.K1.begin() + j);
      out.dotted_names.erase(out.dotted_names.begin() + j);
      removed = true;
      break;
    }
  if (!removed) throw std::logic_error("regularization lost the pivot base");
  out.M1.erase(out.M1.begin());
  if (!out.solid_names.empty()) out.solid_names.erase(out.solid_names.begin());
  validate(out);
  return out;
}

// ---- public apply_reduction ----

template <class K>
ProblemSpec<K> apply_reduction(const ProblemSpec<K>& prob, const ReductionStep<K>& step) {
  switch (step.kind) {
    case StepKind::Deletion:
      return detail::delete_classes(prob, step.delete_classes);
    case StepKind::Regularization:
      return regularize(prob);
    case StepKind::LoopMutation:
      return loop_mutation(prob);
    case StepKind::Localization:
      return localize(prob, step.cls, step.localize);
    case StepKind::ToZero226:
      return to_zero_226(prob);
    case StepKind::ToIdentity227:
      return to_identity_227(prob);
    case StepKind::Edge: {
      if (prob.M1.empty()) throw IllegalStep("edge: no first arrow");
      if (!solid_differential(prob, 0).is_zero())
        throw IllegalStep("edge: differential of the first arrow is nonzero");
      return inflate_problem(prob, edge_datum(prob, step.edge_case));
    }
    case StepKind::UnravelingLoop: {
      // expects the parametric class of the most recent loop mutation
      int X = -1;
      for (int c = 0; c < prob.num_classes(); ++c)
        if (prob.classes[c].parametric) X = c;
      if (X < 0) throw IllegalStep("unraveling: no parametric class");
      UniPoly<K> g(Var::X, {K::one()});
      for (auto& b : step.weyr.blocks)
        g = g * UniPoly<K>(Var::X, {-b.lambda, K::one()});
      UniPoly<K> phi_z0 = prob.classes[X].phi() * g;
      return inflate_problem(prob,
                             unraveling_datum(prob, X, step.weyr, step.keep_z0, phi_z0));
    }
  }
  throw IllegalStep("unknown step kind");
}

} // namespace mbp
