// Building bipartite matrix bimodule problems from finite-dimensional basic
// algebras, and the RDCC condition.
//
// An AlgebraTable is an exact multiplication table over an ordered basis
// (radical elements first, in a length-compatible order, then the
// idempotents). The left regular representation of such a table yields a
// bipartite problem with K = regular matrices on both sides and M = the
// radical part between them.
#pragma once

#include "mbp/problem.hpp"

#include <map>
#include <set>
#include <string>
#include <vector>

namespace mbp {

template <class K>
struct AlgebraTable {
  std::vector<std::string> basis;  // radical elements then idempotents
  int num_idempotents = 0;
  // per basis element: (left idempotent, right idempotent), b = e_l b e_r
  std::vector<std::pair<int, int>> st;  // indices into the idempotent list 0..h-1
  // mul[i][j] = coefficients of basis elements in basis_i * basis_j
  std::map<std::pair<int, int>, std::map<int, K>> mul;

  int size() const { return static_cast<int>(basis.size()); }
  int num_radical() const { return size() - num_idempotents; }
  int idem_index(int i) const { return num_radical() + i; }  // basis index of e_i

  std::map<int, K> product(int i, int j) const {
    auto it = mul.find({i, j});
    return it == mul.end() ? std::map<int, K>{} : it->second;
  }
};

namespace detail {

template <class K>
std::map<int, K> table_mul_lin(const AlgebraTable<K>& tab, const std::map<int, K>& x, int j) {
  std::map<int, K> out;
  for (auto& [i, c] : x)
    for (auto& [r, d] : tab.product(i, j)) {
      auto& slot = out[r];
      slot += c * d;
      if (slot.is_zero()) out.erase(r);
    }
  return out;
}

} // namespace detail

template <class K>
void validate_table(const AlgebraTable<K>& tab) {
  int N = tab.size(), h = tab.num_idempotents, n = tab.num_radical();
  if (h <= 0 || n < 0) throw InvalidTable("bad basis split");
  if (static_cast<int>(tab.st.size()) != N) throw InvalidTable("st size");
  // idempotents are orthogonal, sum to the identity, and match st
  for (int i = 0; i < h; ++i) {
    if (tab.st[tab.idem_index(i)] != std::pair<int, int>{i, i})
      throw InvalidTable("idempotent st mismatch");
    for (int j = 0; j < h; ++j) {
      auto p = tab.product(tab.idem_index(i), tab.idem_index(j));
      std::map<int, K> expect;
      if (i == j) expect[tab.idem_index(i)] = K::one();
      if (p != expect) throw InvalidTable("idempotents not orthogonal");
    }
  }
  // e_l b = b = b e_r and all other idempotent actions vanish
  for (int b = 0; b < N; ++b) {
    for (int i = 0; i < h; ++i) {
      std::map<int, K> left = tab.product(tab.idem_index(i), b);
      std::map<int, K> expect;
      if (tab.st[b].first == i) expect[b] = K::one();
      if (left != expect) throw InvalidTable("left idempotent action");
      std::map<int, K> right = tab.product(b, tab.idem_index(i));
      std::map<int, K> expect2;
      if (tab.st[b].second == i) expect2[b] = K::one();
      if (right != expect2) throw InvalidTable("right idempotent action");
    }
  }
  // radical products stay in the radical span and strictly shorten the index
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (auto& [r, c] : tab.product(i, j)) {
        if (r >= n) throw InvalidTable("radical product leaves the radical");
        if (r >= i || r >= j)
          throw InvalidTable("radical product does not respect the length order");
      }
  // associativity on all triples
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j)
      for (int l = 0; l < N; ++l) {
        auto ij = tab.product(i, j);
        auto lhs = detail::table_mul_lin(tab, ij, l);
        std::map<int, K> rhs;
        for (auto& [r, c] : tab.product(j, l))
          for (auto& [s, d] : tab.product(i, r)) {
            auto& slot = rhs[s];
            slot += c * d;
            if (slot.is_zero()) rhs.erase(s);
          }
        if (lhs != rhs) throw InvalidTable("associativity fails");
      }
}

// left regular representation matrix of basis element j (entry (r,c) is the
// coefficient of basis_r in basis_j * basis_c)
template <class K>
Matrix<K> regular_matrix(const AlgebraTable<K>& tab, int j) {
  int N = tab.size();
  Matrix<K> m(N, N);
  for (int c = 0; c < N; ++c)
    for (auto& [r, coef] : tab.product(j, c)) m(r, c) = coef;
  return m;
}

// Remark 1.4.4: the bipartite matrix bimodule problem of the left regular
// representation. Row strips 0..N-1 carry one copy of the algebra's basis and
// column strips N..2N-1 the second copy.
template <class K>
ProblemSpec<K> bipartite_problem(const AlgebraTable<K>& tab) {
  validate_table(tab);
  int N = tab.size(), h = tab.num_idempotents, n = tab.num_radical();
  ProblemSpec<K> prob;
  prob.t = 2 * N;
  prob.classes.resize(2 * h);
  prob.class_of.assign(2 * N, -1);
  for (int s = 0; s < N; ++s) {
    int cls = tab.st[s].first;  // row class by left idempotent
    prob.classes[cls].strips.push_back(s);
    prob.class_of[s] = cls;
    prob.classes[h + cls].strips.push_back(N + s);
    prob.class_of[N + s] = h + cls;
  }

  auto to_base = [&](const Matrix<K>& m, int row_off, int col_off, int src, int tgt) {
    BaseMatrix<K> b;
    b.src = src;
    b.tgt = tgt;
    for (int r = 0; r < N; ++r)
      for (int c = 0; c < N; ++c)
        if (!m(r, c).is_zero())
          b.entries[Pos{row_off + r, col_off + c}] = BiPoly<K>::constant(m(r, c));
    return b;
  };

  struct Named {
    BaseMatrix<K> base;
    std::string name;
  };
  std::vector<Named> m1, k1;
  for (int j = 0; j < n; ++j) {
    Matrix<K> rho = regular_matrix(tab, j);
    int src_row = tab.st[j].first, tgt_row = tab.st[j].second;
    m1.push_back({to_base(rho, 0, N, src_row, h + tgt_row), tab.basis[j]});
    k1.push_back({to_base(rho, 0, 0, src_row, tgt_row), "u_" + tab.basis[j]});
    k1.push_back({to_base(rho, N, N, h + src_row, h + tgt_row), "v_" + tab.basis[j]});
  }
  auto by_leading = [](const Named& a, const Named& b) {
    return pos_prec(a.base.leading_pos(), b.base.leading_pos());
  };
  std::stable_sort(m1.begin(), m1.end(), by_leading);
  std::stable_sort(k1.begin(), k1.end(), by_leading);
  for (auto& x : m1) {
    prob.M1.push_back(std::move(x.base));
    prob.solid_names.push_back(std::move(x.name));
  }
  for (auto& x : k1) {
    prob.K1.push_back(std::move(x.base));
    prob.dotted_names.push_back(std::move(x.name));
  }
  try {
    validate(prob);
  } catch (const InvalidProblem& e) {
    throw InvalidTable(std::string("regular representation is not normalized: ") + e.what());
  }
  return prob;
}

// ---- bipartite structure and RDCC ----

// classes reachable from M1 sources stay on the row side; K1 must not cross
template <class K>
std::pair<std::vector<int>, std::vector<int>> bipartite_split(const ProblemSpec<K>& prob) {
  if (!prob.H.empty()) throw NotBipartite("H is nonzero");
  int nc = prob.num_classes();
  std::vector<int> side(nc, -1);  // 0 = row, 1 = column
  for (auto& A : prob.M1) {
    if (side[A.src] == 1 || side[A.tgt] == 0)
      throw NotBipartite("M1 bases conflict on sides");
    side[A.src] = 0;
    side[A.tgt] = 1;
  }
  bool changed = true;
  while (changed) {
    changed = false;
    for (auto& V : prob.K1) {
      int a = side[V.src], b = side[V.tgt];
      if (a == -1 && b == -1) continue;
      int s = (a != -1) ? a : b;
      if ((a != -1 && a != s) || (b != -1 && b != s)) throw NotBipartite("K1 crosses sides");
      if (side[V.src] == -1) {
        side[V.src] = s;
        changed = true;
      }
      if (side[V.tgt] == -1) {
        side[V.tgt] = s;
        changed = true;
      }
      if (side[V.src] != side[V.tgt]) throw NotBipartite("K1 base crosses the bipartition");
    }
  }
  std::vector<int> rows, cols;
  for (int c = 0; c < nc; ++c) {
    if (side[c] == 0)
      rows.push_back(c);
    else
      cols.push_back(c);  // unconstrained classes default to the column side
  }
  return {rows, cols};
}

template <class K>
bool rdcc_check(const ProblemSpec<K>& prob) {
  auto [rows, cols] = bipartite_split(prob);  // throws NotBipartite
  std::set<int> lead_rows;
  for (auto& A : prob.M1) {
    Pos p = A.leading_pos();
    if (!lead_rows.insert(p.r).second) return false;  // shared leading row
    int j_z = prob.classes[A.tgt].strips.back();      // main column of the target class
    if (p.c != j_z) return false;
  }
  return true;
}

} // namespace mbp

// ---- monomial quivers ----

namespace mbp {

struct QuiverSpec {
  std::vector<std::string> vertices;
  struct Arrow {
    std::string name;
    int src = 0, tgt = 0;
  };
  std::vector<Arrow> arrows;
  std::vector<std::vector<int>> relations;  // forbidden paths as arrow-index words
};

namespace detail {

inline bool path_composable(const QuiverSpec& q, const std::vector<int>& w) {
  for (size_t i = 0; i + 1 < w.size(); ++i)
    if (q.arrows[w[i]].tgt != q.arrows[w[i + 1]].src) return false;
  return true;
}

inline bool allowed_word(const QuiverSpec& q, const std::vector<int>& w) {
  if (!path_composable(q, w)) return false;
  for (auto& rel : q.relations) {
    if (rel.size() > w.size()) continue;
    for (size_t i = 0; i + rel.size() <= w.size(); ++i) {
      bool hit = true;
      for (size_t j = 0; j < rel.size(); ++j)
        if (w[i + j] != rel[j]) {
          hit = false;
          break;
        }
      if (hit) return false;
    }
  }
  return true;
}

} // namespace detail

// path algebra modulo a monomial ideal; throws InfiniteDimensional when the
// quotient has unbounded allowed paths
template <class K>
AlgebraTable<K> table_from_monomial_quiver(const QuiverSpec& q) {
  for (auto& rel : q.relations) {
    if (rel.size() < 2) throw InvalidInput("relations must be paths of length >= 2");
    if (!detail::path_composable(q, rel)) throw InvalidInput("relation is not a path");
  }
  size_t L = 2;
  for (auto& rel : q.relations) L = std::max(L, rel.size());
  // cycle detection on the (L-1)-suffix graph of allowed words
  {
    std::vector<std::vector<int>> nodes;
    std::map<std::vector<int>, int> index;
    std::vector<std::vector<int>> next;
    // nodes: allowed words of length exactly L-1 (or shorter maximal ones are
    // harmless to include; only length-(L-1) words can lie on a cycle)
    std::vector<std::vector<int>> frontier;
    for (size_t a = 0; a < q.arrows.size(); ++a) frontier.push_back({static_cast<int>(a)});
    for (size_t len = 1; len + 1 < L; ++len) {
      std::vector<std::vector<int>> nf;
      for (auto& w : frontier)
        for (size_t a = 0; a < q.arrows.size(); ++a) {
          auto w2 = w;
          w2.push_back(static_cast<int>(a));
          if (detail::allowed_word(q, w2)) nf.push_back(std::move(w2));
        }
      frontier = std::move(nf);
    }
    for (auto& w : frontier)
      if (detail::allowed_word(q, w) && !index.count(w)) {
        index[w] = static_cast<int>(nodes.size());
        nodes.push_back(w);
      }
    next.resize(nodes.size());
    for (size_t i = 0; i < nodes.size(); ++i)
      for (size_t a = 0; a < q.arrows.size(); ++a) {
        auto w2 = nodes[i];
        w2.push_back(static_cast<int>(a));
        if (!detail::allowed_word(q, w2)) continue;
        std::vector<int> suf(w2.begin() + 1, w2.end());
        auto it = index.find(suf);
        if (it != index.end()) next[i].push_back(it->second);
      }
    // DFS cycle detection
    std::vector<int> state(nodes.size(), 0);
    auto dfs = [&](auto&& self, int u) -> bool {
      state[u] = 1;
      for (int v : next[u]) {
        if (state[v] == 1) return true;
        if (state[v] == 0 && self(self, v)) return true;
      }
      state[u] = 2;
      return false;
    };
    for (size_t i = 0; i < nodes.size(); ++i)
      if (state[i] == 0 && dfs(dfs, static_cast<int>(i)))
        throw InfiniteDimensional("allowed paths grow without bound");
  }
  // enumerate all allowed paths
  std::vector<std::vector<int>> paths;  // radical part, nonempty words
  std::vector<std::vector<int>> frontier;
  for (size_t a = 0; a < q.arrows.size(); ++a) {
    std::vector<int> w{static_cast<int>(a)};
    if (detail::allowed_word(q, w)) {
      paths.push_back(w);
      frontier.push_back(w);
    }
  }
  while (!frontier.empty()) {
    std::vector<std::vector<int>> nf;
    for (auto& w : frontier)
      for (size_t a = 0; a < q.arrows.size(); ++a) {
        auto w2 = w;
        w2.push_back(static_cast<int>(a));
        if (detail::allowed_word(q, w2)) {
          paths.push_back(w2);
          nf.push_back(std::move(w2));
        }
      }
    frontier = std::move(nf);
  }
  // order: decreasing length, then lexicographically by arrow names
  std::sort(paths.begin(), paths.end(), [&](const std::vector<int>& a, const std::vector<int>& b) {
    if (a.size() != b.size()) return a.size() > b.size();
    std::vector<std::string> an, bn;
    for (int x : a) an.push_back(q.arrows[x].name);
    for (int x : b) bn.push_back(q.arrows[x].name);
    return an < bn;
  });

  AlgebraTable<K> tab;
  tab.num_idempotents = static_cast<int>(q.vertices.size());
  std::map<std::vector<int>, int> path_index;
  auto path_name = [&](const std::vector<int>& w) {
    std::string s;
    for (int a : w) s += q.arrows[a].name;
    return s;
  };
  for (auto& w : paths) {
    path_index[w] = static_cast<int>(tab.basis.size());
    tab.basis.push_back(path_name(w));
    tab.st.push_back({q.arrows[w.front()].src, q.arrows[w.back()].tgt});
  }
  int n = static_cast<int>(paths.size());
  for (size_t v = 0; v < q.vertices.size(); ++v) {
    tab.basis.push_back("e_" + q.vertices[v]);
    tab.st.push_back({static_cast<int>(v), static_cast<int>(v)});
  }
  // products: concatenation, zero when a forbidden factor appears
  int N = tab.size();
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      bool i_idem = i >= n, j_idem = j >= n;
      std::map<int, K> out;
      if (i_idem && j_idem) {
        if (i == j) out[i] = K::one();
      } else if (i_idem) {
        if (tab.st[j].first == i - n) out[j] = K::one();
      } else if (j_idem) {
        if (tab.st[i].second == j - n) out[i] = K::one();
      } else {
        auto w = paths[i];
        w.insert(w.end(), paths[j].begin(), paths[j].end());
        if (detail::allowed_word(q, w)) out[path_index.at(w)] = K::one();
      }
      if (!out.empty()) tab.mul[{i, j}] = std::move(out);
    }
  validate_table(tab);
  return tab;
}

} // namespace mbp
