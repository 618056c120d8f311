// Weyr canonical forms of square matrices over an exact field, together
// with the similarity transforms that achieve them.
#pragma once

#include "mbp/matrix.hpp"
#include "mbp/poly.hpp"

#include <utility>
#include <vector>

namespace mbp {

// Jordan structure per eigenvalue: e[j-1] = number of Jordan blocks J_j
template <class K>
struct JordanData {
  struct Eigen {
    K lambda;
    std::vector<int> e;  // indexed by block size - 1
    int max_block() const { return static_cast<int>(e.size()); }
    int algebraic_multiplicity() const {
      int s = 0;
      for (size_t j = 0; j < e.size(); ++j) s += static_cast<int>(j + 1) * e[j];
      return s;
    }
    // m_j = e_d + ... + e_j, weakly decreasing
    std::vector<int> weyr_m() const {
      std::vector<int> m(e.size());
      int acc = 0;
      for (int j = static_cast<int>(e.size()) - 1; j >= 0; --j) {
        acc += e[j];
        m[j] = acc;
      }
      return m;
    }
  };
  std::vector<Eigen> eigens;  // sorted by prec on lambda

  size_t size() const {
    size_t n = 0;
    for (auto& eg : eigens) n += eg.algebraic_multiplicity();
    return n;
  }
};

template <class K>
struct WeyrForm {
  struct Block {
    K lambda;
    std::vector<int> m;  // m_1 >= m_2 >= ... >= m_d > 0
    size_t size() const {
      size_t n = 0;
      for (int x : m) n += x;
      return n;
    }
  };
  std::vector<Block> blocks;  // eigenvalues sorted by prec

  size_t size() const {
    size_t n = 0;
    for (auto& b : blocks) n += b.size();
    return n;
  }

  std::vector<K> eigenvalues() const {
    std::vector<K> out;
    for (auto& b : blocks) out.push_back(b.lambda);
    return out;
  }

  Matrix<K> assembled() const {
    size_t n = size();
    Matrix<K> w(n, n);
    size_t base = 0;
    for (auto& b : blocks) {
      size_t d = b.m.size();
      std::vector<size_t> off(d + 1, 0);
      for (size_t j = 0; j < d; ++j) off[j + 1] = off[j] + b.m[j];
      for (size_t j = 0; j < d; ++j)
        for (int i = 0; i < b.m[j]; ++i) w(base + off[j] + i, base + off[j] + i) = b.lambda;
      // W_{j,j+1} = (I_{m_{j+1}}; 0)
      for (size_t j = 0; j + 1 < d; ++j)
        for (int i = 0; i < b.m[j + 1]; ++i)
          w(base + off[j] + i, base + off[j + 1] + i) = K::one();
      base += off[d];
    }
    return w;
  }

  // links: the superdiagonal ones, which are never eigenvalue entries
  size_t link_count() const {
    size_t l = 0;
    for (auto& b : blocks)
      for (size_t j = 1; j < b.m.size(); ++j) l += b.m[j];
    return l;
  }

  bool operator==(const WeyrForm& o) const {
    if (blocks.size() != o.blocks.size()) return false;
    for (size_t i = 0; i < blocks.size(); ++i)
      if (!(blocks[i].lambda == o.blocks[i].lambda) || blocks[i].m != o.blocks[i].m)
        return false;
    return true;
  }
};

namespace detail {

// extend `have` (columns, possibly empty) to cover `target` column space,
// picking extension vectors from target's columns; returns the added ones
template <class K>
std::vector<std::vector<K>> extend_basis(const std::vector<std::vector<K>>& have,
                                         const std::vector<std::vector<K>>& target) {
  size_t n = target.empty() ? (have.empty() ? 0 : have[0].size()) : target[0].size();
  std::vector<std::vector<K>> added;
  std::vector<std::vector<K>> cur = have;
  auto rank_of = [&](const std::vector<std::vector<K>>& vs) {
    if (vs.empty()) return size_t{0};
    Matrix<K> m(vs.size(), n);
    for (size_t i = 0; i < vs.size(); ++i)
      for (size_t j = 0; j < n; ++j) m(i, j) = vs[i][j];
    return rank(std::move(m));
  };
  size_t r = rank_of(cur);
  for (auto& v : target) {
    cur.push_back(v);
    size_t r2 = rank_of(cur);
    if (r2 > r) {
      added.push_back(v);
      r = r2;
    } else {
      cur.pop_back();
    }
  }
  return added;
}

template <class K>
std::vector<K> apply(const Matrix<K>& A, const std::vector<K>& v) {
  std::vector<K> r(A.rows(), K::zero());
  for (size_t i = 0; i < A.rows(); ++i)
    for (size_t j = 0; j < A.cols(); ++j)
      if (!A(i, j).is_zero() && !v[j].is_zero()) r[i] += A(i, j) * v[j];
  return r;
}

} // namespace detail

template <class K>
JordanData<K> jordan_data(const Matrix<K>& A) {
  if (A.rows() != A.cols()) throw ShapeMismatch("jordan_data of non-square");
  JordanData<K> jd;
  if (A.rows() == 0) return jd;
  UniPoly<K> chi(Var::X, char_poly_coeffs(A));
  auto roots = rational_linear_roots(chi);  // sorted by prec; throws NonSplitSpectrum
  for (auto& [lambda, alg_mult] : roots) {
    Matrix<K> N = A - Matrix<K>::identity(A.rows()).scaled(lambda);
    std::vector<int> kdim;
    kdim.push_back(0);
    Matrix<K> P = Matrix<K>::identity(A.rows());
    while (kdim.back() < alg_mult) {
      P = P * N;
      kdim.push_back(static_cast<int>(A.rows() - rank(P)));
      if (kdim.size() > A.rows() + 1) throw std::logic_error("jordan_data: no stabilization");
    }
    int d = static_cast<int>(kdim.size()) - 1;
    std::vector<int> m(d);
    for (int j = 1; j <= d; ++j) m[j - 1] = kdim[j] - kdim[j - 1];
    typename JordanData<K>::Eigen eg;
    eg.lambda = lambda;
    eg.e.assign(d, 0);
    for (int j = 1; j <= d; ++j) {
      int mj = m[j - 1];
      int mj1 = (j < d) ? m[j] : 0;
      eg.e[j - 1] = mj - mj1;
    }
    jd.eigens.push_back(std::move(eg));
  }
  return jd;
}

// Weyr form W and invertible f with f^-1 A f = W, unique given the order prec.
template <class K>
std::pair<WeyrForm<K>, Matrix<K>> weyr_of(const Matrix<K>& A) {
  if (A.rows() != A.cols()) throw ShapeMismatch("weyr_of non-square");
  size_t n = A.rows();
  JordanData<K> jd = jordan_data(A);
  WeyrForm<K> w;
  Matrix<K> f(n, n);
  size_t col = 0;
  for (auto& eg : jd.eigens) {
    Matrix<K> N = A - Matrix<K>::identity(n).scaled(eg.lambda);
    int d = eg.max_block();
    // kernel bases of N^j
    std::vector<std::vector<std::vector<K>>> ker(d + 1);
    Matrix<K> P = Matrix<K>::identity(n);
    for (int j = 1; j <= d; ++j) {
      P = P * N;
      ker[j] = nullspace(P);
    }
    // chain heads, longest first
    std::vector<std::vector<std::vector<K>>> chains;  // chain = [head, N head, ...]
    for (int j = d; j >= 1; --j) {
      std::vector<std::vector<K>> have = (j >= 2) ? ker[j - 1] : std::vector<std::vector<K>>{};
      for (auto& ch : chains) {
        // height-j vector of a longer chain, N^{len-j} head
        int len = static_cast<int>(ch.size());
        if (len > j) have.push_back(ch[len - j]);
      }
      auto heads = detail::extend_basis(have, ker[j]);
      for (auto& h : heads) {
        std::vector<std::vector<K>> ch;
        ch.push_back(h);
        auto v = h;
        for (int s = 1; s < j; ++s) {
          v = detail::apply(N, v);
          ch.push_back(v);
        }
        chains.push_back(std::move(ch));
      }
    }
    // chains were created longest-first; the Weyr basis takes, per layer l,
    // the height-l vector of every chain of length >= l
    auto m = eg.weyr_m();
    typename WeyrForm<K>::Block blk{eg.lambda, m};
    for (int l = 1; l <= d; ++l) {
      for (auto& ch : chains) {
        int len = static_cast<int>(ch.size());
        if (len < l) continue;
        // height-l vector: killed by N^l, i.e. position len - l in the chain
        auto& v = ch[len - l];
        for (size_t i = 0; i < n; ++i) f(i, col) = v[i];
        ++col;
      }
    }
    w.blocks.push_back(std::move(blk));
  }
  return {w, f};
}

// does W match the assembled Weyr pattern exactly (eigenvalues sorted, m
// weakly decreasing, identity-topped superdiagonal blocks, zeros elsewhere)?
template <class K>
bool is_weyr(const Matrix<K>& W) {
  if (W.rows() != W.cols()) return false;
  size_t n = W.rows();
  if (n == 0) return true;
  // split the diagonal into runs of equal values
  WeyrForm<K> cand;
  size_t i = 0;
  while (i < n) {
    K lambda = W(i, i);
    size_t j = i;
    while (j < n && W(j, j) == lambda) ++j;
    // within the run, recover the m-sequence from the nilpotent part
    size_t sz = j - i;
    Matrix<K> Nb = W.block(i, i, sz, sz);
    for (size_t r = 0; r < sz; ++r) Nb(r, r) = K::zero();
    std::vector<int> m;
    {
      Matrix<K> P = Matrix<K>::identity(sz);
      size_t prev = 0;
      while (prev < sz) {
        P = P * Nb;
        size_t k = sz - rank(P);
        if (k == prev) return false;  // nilpotent part must eventually exhaust
        m.push_back(static_cast<int>(k - prev));
        prev = k;
      }
    }
    for (size_t l = 1; l < m.size(); ++l)
      if (m[l] > m[l - 1]) return false;
    cand.blocks.push_back({lambda, m});
    i = j;
  }
  for (size_t b = 1; b < cand.blocks.size(); ++b) {
    if (!prec_less(cand.blocks[b - 1].lambda, cand.blocks[b].lambda)) return false;
  }
  return W == cand.assembled();
}

// recover the WeyrForm from an assembled Weyr matrix; is_weyr must hold
template <class K>
WeyrForm<K> weyr_form_of_matrix(const Matrix<K>& W) {
  auto [wf, f] = weyr_of(W);
  return wf;
}

// R_X-regularity: the forbidden polynomial vanishes at no eigenvalue
template <class K>
bool is_regular(const WeyrForm<K>& w, const UniPoly<K>& forbidden) {
  for (auto& b : w.blocks)
    if (forbidden.eval(b.lambda).is_zero()) return false;
  return true;
}

} // namespace mbp
