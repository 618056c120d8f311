// The canonical-form reduction sequence (Theorem 2.3.3), defining systems
// (Theorem 2.4.1 / Corollary 2.4.2), and the isomorphism and
// indecomposability decisions built on them.
#pragma once

#include "mbp/reduce.hpp"

#include <functional>
#include <string>
#include <vector>

namespace mbp {

// rectangle in original coordinates
struct Rect {
  int r0 = 0, c0 = 0, rows = 0, cols = 0;
  bool empty() const { return rows == 0 || cols == 0; }
};

// The defining system E^i of Formula 2.4-2: variables are one block Z_X per
// original class and one block Z_j per original K1 base; equations are the
// entries of Phi H(k) - H(k) Phi at the original leading blocks, restricted
// to the region already reduced. Equations are absorbed incrementally as
// the reduction proceeds.
template <class K>
struct DefiningSystem {
  const ProblemSpec<K>* orig = nullptr;
  SizeVector m;
  std::vector<int> strip_of;    // original coordinate -> strip
  std::vector<int> local_of;    // original coordinate -> index inside strip
  std::vector<int> class_var_off, dotted_var_off;
  int num_vars = 0;
  Matrix<K> Hk;                 // partial canonical matrix, original coords
  std::vector<Rect> reduced;    // absorbed rectangles, in order
  // echelon of the absorbed equations; equations are linear in Hk, so the
  // echelon is rebuilt whenever Hk changes and extended incrementally while
  // it does not
  std::vector<std::vector<K>> rows;
  std::vector<int> pivots;
  bool dirty = false;

  DefiningSystem() = default;
  DefiningSystem(const ProblemSpec<K>& prob, const SizeVector& sizes) {
    orig = &prob;
    m = sizes;
    auto off = strip_offsets(m);
    strip_of.assign(off.back(), 0);
    local_of.assign(off.back(), 0);
    for (int s = 0; s < prob.t; ++s)
      for (int k = 0; k < m[s]; ++k) {
        strip_of[off[s] + k] = s;
        local_of[off[s] + k] = k;
      }
    int v = 0;
    for (auto& cl : prob.classes) {
      class_var_off.push_back(v);
      int mx = cl.strips.empty() ? 0 : m[cl.strips[0]];
      v += mx * mx;
    }
    for (auto& V : prob.K1) {
      dotted_var_off.push_back(v);
      int mr = prob.classes[V.src].strips.empty() ? 0 : m[prob.classes[V.src].strips[0]];
      int mc = prob.classes[V.tgt].strips.empty() ? 0 : m[prob.classes[V.tgt].strips[0]];
      v += mr * mc;
    }
    num_vars = v;
    Hk = Matrix<K>(off.back(), off.back());
  }

  int class_size(int cls) const {
    return orig->classes[cls].strips.empty() ? 0 : m[orig->classes[cls].strips[0]];
  }

  // accumulate the variables of Phi at global entry (u, k) scaled by c
  void add_phi_entry(std::vector<K>& row, int u, int k, const K& c) const {
    int su = strip_of[u], sk = strip_of[k];
    int lu = local_of[u], lk = local_of[k];
    if (su == sk) {
      int cls = orig->class_of[su];
      row[class_var_off[cls] + lu * class_size(cls) + lk] += c;
    }
    for (size_t j = 0; j < orig->K1.size(); ++j) {
      auto e = orig->K1[j].at(su, sk);
      if (e.is_zero()) continue;
      int mc = class_size(orig->K1[j].tgt);
      row[dotted_var_off[j] + lu * mc + lk] += c * e.constant_term();
    }
  }

  // equation at global entry (u, v): [Phi Hk - Hk Phi]_{uv} = 0
  std::vector<K> equation_row(int u, int v) const {
    std::vector<K> row(num_vars, K::zero());
    int n = static_cast<int>(Hk.rows());
    for (int k = 0; k < n; ++k) {
      if (!Hk(k, v).is_zero()) add_phi_entry(row, u, k, Hk(k, v));
      if (!Hk(u, k).is_zero()) add_phi_entry(row, k, v, -Hk(u, k));
    }
    return row;
  }

  // reduce a row against the echelon; returns false when it lies in the span
  bool insert_or_check(std::vector<K> row, bool insert) {
    for (size_t i = 0; i < rows.size(); ++i) {
      K c = row[pivots[i]];
      if (c.is_zero()) continue;
      for (int j = 0; j < num_vars; ++j) row[j] -= c * rows[i][j];
    }
    int p = -1;
    for (int j = 0; j < num_vars; ++j)
      if (!row[j].is_zero()) {
        p = j;
        break;
      }
    if (p < 0) return false;
    if (insert) {
      K inv = row[p].inv();
      for (int j = 0; j < num_vars; ++j) row[j] = row[j] * inv;
      rows.push_back(std::move(row));
      pivots.push_back(p);
    }
    return true;
  }

  void set_hk(const Matrix<K>& h) {
    if (!(Hk == h)) {
      Hk = h;
      dirty = true;
    }
  }

  void rebuild() {
    rows.clear();
    pivots.clear();
    for (auto& r : reduced)
      for (int i = 0; i < r.rows; ++i)
        for (int j = 0; j < r.cols; ++j) insert_or_check(equation_row(r.r0 + i, r.c0 + j), true);
    dirty = false;
  }

  bool dependent_entry(int u, int v) {
    if (dirty) rebuild();
    return !insert_or_check(equation_row(u, v), false);
  }

  // every equation of the rectangle dependent / independent; mixed raises
  bool group_dependent(const Rect& r) {
    if (dirty) rebuild();
    bool any_dep = false, any_indep = false;
    for (int i = 0; i < r.rows; ++i)
      for (int j = 0; j < r.cols; ++j) {
        bool dep = dependent_entry(r.r0 + i, r.c0 + j);
        (dep ? any_dep : any_indep) = true;
      }
    if (any_dep && any_indep)
      throw MixedGroup("frontier group has mixed dependency");
    return !any_indep;
  }

  void absorb(const Rect& r) {
    if (dirty) rebuild();
    for (int i = 0; i < r.rows; ++i)
      for (int j = 0; j < r.cols; ++j) insert_or_check(equation_row(r.r0 + i, r.c0 + j), true);
    reduced.push_back(r);
  }

  int rank() {
    if (dirty) rebuild();
    return static_cast<int>(rows.size());
  }

  // dense restart: all equations of the absorbed region from scratch
  Matrix<K> dense_equations() const {
    std::vector<std::vector<K>> all;
    for (auto& r : reduced)
      for (int i = 0; i < r.rows; ++i)
        for (int j = 0; j < r.cols; ++j) all.push_back(equation_row(r.r0 + i, r.c0 + j));
    Matrix<K> m2(all.size(), num_vars);
    for (size_t i = 0; i < all.size(); ++i)
      for (int j = 0; j < num_vars; ++j) m2(i, j) = all[i][j];
    return m2;
  }

  // the variable vector of an admissible transformation given per-class and
  // per-dotted blocks (used to verify Theorem 2.4.1 span equality)
  std::vector<K> pack(const std::vector<Matrix<K>>& f_class,
                      const std::vector<Matrix<K>>& f_dotted) const {
    std::vector<K> v(num_vars, K::zero());
    for (size_t c = 0; c < f_class.size(); ++c) {
      int mx = class_size(static_cast<int>(c));
      for (int i = 0; i < mx; ++i)
        for (int j = 0; j < mx; ++j) v[class_var_off[c] + i * mx + j] = f_class[c](i, j);
    }
    for (size_t j = 0; j < f_dotted.size(); ++j) {
      int mc = class_size(orig->K1[j].tgt);
      for (size_t i = 0; i < f_dotted[j].rows(); ++i)
        for (size_t k = 0; k < f_dotted[j].cols(); ++k)
          v[dotted_var_off[j] + static_cast<int>(i) * mc + static_cast<int>(k)] =
              f_dotted[j](i, k);
    }
    return v;
  }
};

// spec-facing wrappers
template <class K>
DefiningSystem<K> build_defining_system(const ProblemSpec<K>& prob, const Matrix<K>& Hk,
                                        const SizeVector& sizes,
                                        const std::vector<Rect>& reduced_region) {
  DefiningSystem<K> ds(prob, sizes);
  ds.Hk = Hk;
  for (auto& r : reduced_region) ds.absorb(r);
  return ds;
}

template <class K>
bool delta_is_zero(DefiningSystem<K>& ds, const Rect& frontier) {
  return ds.group_dependent(frontier);
}

// ---- trace and canonical form ----

template <class K>
struct TraceStep {
  StepKind kind = StepKind::Deletion;
  std::string arrow;       // display name of the arrow acted on
  Matrix<K> G;             // representation-level block (empty for regularization)
  bool empty_block = false;  // the distinguished zero of a regularization
  int edge_case = 0;
  WeyrForm<K> weyr;        // loop steps
  SizeVector sizes_before, sizes_after;
  std::vector<int> deleted_classes;
  std::string relation;    // eliminated dotted arrow of a regularization
};

template <class K>
struct ReductionTrace {
  std::vector<TraceStep<K>> steps;
};

template <class K>
struct CanonicalFormResult {
  Matrix<K> matrix;   // theta^{0s}(H^s(k)) in original coordinates
  SizeVector sizes;   // original size vector
  size_t links = 0;
};

// observer invoked before each arrow reduction (used by verification suites)
template <class K>
struct DriverObserver {
  std::function<void(const ProblemSpec<K>& cur, const Representation<K>& rep,
                     DefiningSystem<K>& ds, const Rect& frontier, bool delta_zero)>
      on_arrow;
};

namespace detail {

// S B T = [[I_r, 0], [0, 0]] by full Gauss-Jordan; returns (S, T, r)
template <class K>
std::tuple<Matrix<K>, Matrix<K>, int> smith_like(const Matrix<K>& B) {
  size_t mr = B.rows(), mc = B.cols();
  Matrix<K> M = B, S = Matrix<K>::identity(mr), T = Matrix<K>::identity(mc);
  size_t k = 0;
  while (k < mr && k < mc) {
    size_t pi = mr, pj = mc;
    for (size_t i = k; i < mr && pi == mr; ++i)
      for (size_t j = k; j < mc; ++j)
        if (!M(i, j).is_zero()) {
          pi = i;
          pj = j;
          break;
        }
    if (pi == mr) break;
    // swap row k <-> pi, col k <-> pj
    for (size_t j = 0; j < mc; ++j) std::swap(M(k, j), M(pi, j));
    for (size_t j = 0; j < mr; ++j) std::swap(S(k, j), S(pi, j));
    for (size_t i = 0; i < mr; ++i) std::swap(M(i, k), M(i, pj));
    for (size_t i = 0; i < mc; ++i) std::swap(T(i, k), T(i, pj));
    K inv = M(k, k).inv();
    for (size_t j = 0; j < mc; ++j) M(k, j) = M(k, j) * inv;
    for (size_t j = 0; j < mr; ++j) S(k, j) = S(k, j) * inv;
    for (size_t i = 0; i < mr; ++i) {
      if (i == k || M(i, k).is_zero()) continue;
      K f = M(i, k);
      for (size_t j = 0; j < mc; ++j) M(i, j) -= f * M(k, j);
      for (size_t j = 0; j < mr; ++j) S(i, j) -= f * S(k, j);
    }
    for (size_t j = 0; j < mc; ++j) {
      if (j == k || M(k, j).is_zero()) continue;
      K f = M(k, j);
      for (size_t i = 0; i < mr; ++i) M(i, j) -= f * M(i, k);
      for (size_t i = 0; i < mc; ++i) T(i, j) -= f * T(i, k);
    }
    ++k;
  }
  return {S, T, static_cast<int>(k)};
}

} // namespace detail

// canonical form of a representation over a problem with trivial classes
template <class K>
std::pair<CanonicalFormResult<K>, ReductionTrace<K>> canonical_form(
    const ProblemSpec<K>& prob, const Representation<K>& P,
    const DriverObserver<K>* observer = nullptr) {
  if (!prob.trivial_classes()) throw InvalidProblem("canonical_form needs trivial classes");
  check_size_vector(prob, P.sizes);
  validate(prob);

  CanonicalFormResult<K> result;
  result.sizes = P.sizes;
  auto orig_off = strip_offsets(P.sizes);
  int n = orig_off.back();
  result.matrix = assemble_h(prob, P.sizes);

  ReductionTrace<K> trace;
  DefiningSystem<K> ds(prob, P.sizes);
  ds.Hk = result.matrix;

  ProblemSpec<K> cur = prob;
  Representation<K> rep = P;
  // per current strip: [start, start+len) interval in original coordinates
  std::vector<std::pair<int, int>> iv;
  for (int s = 0; s < prob.t; ++s) iv.push_back({orig_off[s], P.sizes[s]});

  Matrix<K> full = assemble(rep, cur);

  auto sizes_of = [&](const ProblemSpec<K>& q, const Representation<K>& r) { return r.sizes; };
  (void)sizes_of;

  int guard = 0;
  while (true) {
    if (++guard > 10000) throw std::logic_error("canonical_form: no termination");
    // delete zero-size classes
    std::vector<int> dead;
    for (int c = 0; c < cur.num_classes(); ++c) {
      int sz = cur.classes[c].strips.empty() ? 0 : rep.sizes[cur.classes[c].strips[0]];
      if (sz == 0) dead.push_back(c);
    }
    if (!dead.empty()) {
      TraceStep<K> st;
      st.kind = StepKind::Deletion;
      st.deleted_classes = dead;
      st.sizes_before = rep.sizes;
      // restrict everything to surviving strips
      std::vector<int> keep;
      for (int s = 0; s < cur.t; ++s)
        if (std::find(dead.begin(), dead.end(), cur.class_of[s]) == dead.end())
          keep.push_back(s);
      ProblemSpec<K> next = detail::delete_classes(cur, dead);
      SizeVector nsz;
      std::vector<std::pair<int, int>> niv;
      for (int s : keep) {
        nsz.push_back(rep.sizes[s]);
        niv.push_back(iv[s]);
      }
      // full matrix: dead strips have zero width, so coordinates are stable
      Representation<K> nrep = extract_representation(next, full, nsz);
      cur = std::move(next);
      rep = std::move(nrep);
      iv = std::move(niv);
      st.sizes_after = rep.sizes;
      trace.steps.push_back(std::move(st));
    }
    if (cur.M1.empty()) break;

    TermSum<K> d = solid_differential(cur, 0);
    Pos lead = cur.M1[0].leading_pos();
    Rect frontier{iv[lead.r].first, iv[lead.c].first, iv[lead.r].second, iv[lead.c].second};
    if (observer && observer->on_arrow)
      observer->on_arrow(cur, rep, ds, frontier, d.is_zero());

    int X = cur.M1[0].src, Y = cur.M1[0].tgt;
    int mX = rep.sizes[cur.classes[X].strips[0]];
    int mY = rep.sizes[cur.classes[Y].strips[0]];

    if (!d.is_zero()) {
      // regularization: zero the block via the unipotent dotted action
      RegularizationInfo<K> info;
      ProblemSpec<K> next = regularize(cur, &info);
      Morphism<K> f = identity_morphism(cur, rep);
      K zp = info.zeta[info.pivot].constant_term();
      f.f_dotted[info.pivot] = rep.arrows[0].scaled(zp.inv());
      Matrix<K> fbar = assemble_morphism(f, cur, rep, rep);
      full = inverse(fbar) * full * fbar;
      Representation<K> nrep = extract_representation(next, full, rep.sizes);

      TraceStep<K> st;
      st.kind = StepKind::Regularization;
      st.arrow = cur.solid_name(0);
      st.empty_block = true;
      st.sizes_before = rep.sizes;
      st.sizes_after = rep.sizes;
      st.relation = info.relation;
      trace.steps.push_back(std::move(st));

      ds.absorb(frontier);
      cur = std::move(next);
      rep = std::move(nrep);
      continue;
    }

    if (X == Y) {
      // loop reduction: mutation, unraveling at the spectrum, delete Z0
      auto [w, fx] = weyr_of(rep.arrows[0]);  // may throw NonSplitSpectrum
      ProblemSpec<K> mutated = loop_mutation(cur);
      int paramX = X;  // class ids unchanged by mutation
      UniPoly<K> gz(Var::X, {K::one()});
      auto datum = unraveling_datum(mutated, paramX, w, false, gz);
      ProblemSpec<K> next = inflate_problem(mutated, datum);

      Morphism<K> f = identity_morphism(cur, rep);
      f.f_class[X] = fx;
      Matrix<K> fbar = assemble_morphism(f, cur, rep, rep);
      full = inverse(fbar) * full * fbar;

      // new sizes: per substrip of X-strips (e_ij each), others unchanged
      SizeVector nsz;
      std::vector<std::pair<int, int>> niv;
      std::vector<int> sub_sizes;  // per substrip of class X (Z0 first)
      {
        sub_sizes.push_back(0);  // Z0, deleted
        for (auto& blk : w.blocks) {
          int r = static_cast<int>(blk.m.size());
          std::vector<int> e(r);
          for (int j = 0; j < r; ++j) e[j] = blk.m[j] - (j + 1 < r ? blk.m[j + 1] : 0);
          for (int l = 1; l <= r; ++l)
            for (int j = r; j >= l; --j)
              if (e[j - 1] > 0) sub_sizes.push_back(e[j - 1]);
        }
      }
      for (int s = 0; s < cur.t; ++s) {
        if (cur.class_of[s] != X) {
          nsz.push_back(rep.sizes[s]);
          niv.push_back(iv[s]);
          continue;
        }
        int start = iv[s].first;
        // Z0 is dropped (width 0); the kept substrips partition the interval
        for (size_t p = 1; p < sub_sizes.size(); ++p) {
          nsz.push_back(sub_sizes[p]);
          niv.push_back({start, sub_sizes[p]});
          start += sub_sizes[p];
        }
      }
      Representation<K> nrep = extract_representation(next, full, nsz);

      // place the Weyr block at every entry of the reduced arrow
      Matrix<K> W = w.assembled();
      for (auto& [pos, u] : cur.M1[0].entries) {
        K c = u.constant_term();
        for (int i = 0; i < mX; ++i)
          for (int j = 0; j < mX; ++j)
            result.matrix(iv[pos.r].first + i, iv[pos.c].first + j) += c * W(i, j);
      }
      result.links += w.link_count();

      TraceStep<K> st;
      st.kind = StepKind::UnravelingLoop;
      st.arrow = cur.solid_name(0);
      st.G = W;
      st.weyr = w;
      st.sizes_before = rep.sizes;
      st.sizes_after = nsz;
      trace.steps.push_back(std::move(st));

      ds.set_hk(result.matrix);
      ds.absorb(frontier);
      cur = std::move(next);
      rep = std::move(nrep);
      iv = std::move(niv);
      continue;
    }

    // edge reduction
    auto [S, T, r] = detail::smith_like(rep.arrows[0]);
    int ecase;
    if (r == 0)
      ecase = 1;
    else if (mX == r && mY == r)
      ecase = 2;
    else if (mX == r)
      ecase = 3;
    else if (mY == r)
      ecase = 4;
    else
      ecase = 5;
    ProblemSpec<K> next = inflate_problem(cur, edge_datum(cur, ecase));
    // f_X = S^-1, f_Y = T * Perm with [[I,0],[0,0]] Perm = [[0,I],[0,0]]
    Matrix<K> perm(mY, mY);
    for (int c2 = 0; c2 < mY - r; ++c2) perm(r + c2, c2) = K::one();
    for (int k2 = 0; k2 < r; ++k2) perm(k2, mY - r + k2) = K::one();
    Morphism<K> f = identity_morphism(cur, rep);
    f.f_class[X] = inverse(S);
    f.f_class[Y] = T * perm;
    Matrix<K> fbar = assemble_morphism(f, cur, rep, rep);
    full = inverse(fbar) * full * fbar;

    SizeVector nsz;
    std::vector<std::pair<int, int>> niv;
    for (int s = 0; s < cur.t; ++s) {
      if (cur.class_of[s] == X) {
        // substrips (Z2 of width r, Z1 of width mX - r); dropped when empty
        if (r > 0) {
          nsz.push_back(r);
          niv.push_back({iv[s].first, r});
        }
        if (mX - r > 0) {
          nsz.push_back(mX - r);
          niv.push_back({iv[s].first + r, mX - r});
        }
      } else if (cur.class_of[s] == Y) {
        if (mY - r > 0) {
          nsz.push_back(mY - r);
          niv.push_back({iv[s].first, mY - r});
        }
        if (r > 0) {
          nsz.push_back(r);
          niv.push_back({iv[s].first + (mY - r), r});
        }
      } else {
        nsz.push_back(rep.sizes[s]);
        niv.push_back(iv[s]);
      }
    }
    Representation<K> nrep = extract_representation(next, full, nsz);

    // place the standard block at every entry of the reduced arrow
    Matrix<K> B(mX, mY);
    for (int k2 = 0; k2 < r; ++k2) B(k2, mY - r + k2) = K::one();
    for (auto& [pos, u] : cur.M1[0].entries) {
      K c = u.constant_term();
      for (int i = 0; i < mX; ++i)
        for (int j = 0; j < mY; ++j)
          result.matrix(iv[pos.r].first + i, iv[pos.c].first + j) += c * B(i, j);
    }
    result.links += static_cast<size_t>(r);

    TraceStep<K> st;
    st.kind = StepKind::Edge;
    st.arrow = cur.solid_name(0);
    st.G = B;
    st.edge_case = ecase;
    st.sizes_before = rep.sizes;
    st.sizes_after = nsz;
    trace.steps.push_back(std::move(st));

    ds.set_hk(result.matrix);
    ds.absorb(frontier);
    cur = std::move(next);
    rep = std::move(nrep);
    iv = std::move(niv);
  }
  return {result, trace};
}

// Corollary 2.3.4 (i): equal canonical forms decide isomorphism
template <class K>
bool iso(const ProblemSpec<K>& prob, const Representation<K>& P, const Representation<K>& Q) {
  if (P.sizes != Q.sizes) return false;
  auto [cp, tp] = canonical_form(prob, P);
  auto [cq, tq] = canonical_form(prob, Q);
  return cp.matrix == cq.matrix;
}

// Corollary 2.3.4 (ii): links count against dimension
template <class K>
bool indecomposable(const ProblemSpec<K>& prob, const Representation<K>& P) {
  auto [c, t] = canonical_form(prob, P);
  int dim = total_size(P.sizes);
  if (dim == 0) return false;
  return c.links == static_cast<size_t>(dim - 1);
}

} // namespace mbp
