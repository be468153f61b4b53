#pragma once

// Integral lattices presented by symmetric Gram matrices, together with their
// exact rational invariants: determinant, signature, parity, Hasse symbols,
// Smith invariant factors. The bilinear form (x,y) is integral on the lattice;
// diagonal Gram entries are the norms (x,x).

#include <latvol/arith.hpp>

#include <cstdlib>
#include <map>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

namespace latvol {

using Mat = std::vector<std::vector<Int>>;

namespace detail {

// Fraction-free Gaussian elimination; every division is exact.
inline Int bareiss_det(Mat m) {
  const int n = static_cast<int>(m.size());
  if (n == 0) return 1;
  Int prev = 1;
  int sign = 1;
  for (int k = 0; k + 1 < n; ++k) {
    if (m[k][k] == 0) {
      int piv = -1;
      for (int i = k + 1; i < n; ++i)
        if (m[i][k] != 0) {
          piv = i;
          break;
        }
      if (piv < 0) return 0;
      std::swap(m[k], m[piv]);
      sign = -sign;
    }
    for (int i = k + 1; i < n; ++i) {
      for (int j = k + 1; j < n; ++j) {
        Int t = m[i][j] * m[k][k] - m[i][k] * m[k][j];
        mpz_divexact(m[i][j].get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
      }
      m[i][k] = 0;
    }
    prev = m[k][k];
  }
  return sign * m[n - 1][n - 1];
}

}  // namespace detail

class GramMatrix {
 public:
  explicit GramMatrix(Mat entries) : entries_(std::move(entries)) {
    n_ = static_cast<int>(entries_.size());
    if (n_ == 0) throw std::invalid_argument("empty Gram matrix");
    for (const auto& row : entries_)
      if (static_cast<int>(row.size()) != n_)
        throw std::invalid_argument("Gram matrix is not square");
    for (int i = 0; i < n_; ++i)
      for (int j = i + 1; j < n_; ++j)
        if (entries_[i][j] != entries_[j][i])
          throw std::invalid_argument("Gram matrix is not symmetric");
    det_ = detail::bareiss_det(entries_);
    if (det_ == 0) throw std::invalid_argument("degenerate Gram matrix");
  }

  static GramMatrix diagonal(const std::vector<Int>& d) {
    Mat m(d.size(), std::vector<Int>(d.size(), 0));
    for (size_t i = 0; i < d.size(); ++i) m[i][i] = d[i];
    return GramMatrix(std::move(m));
  }

  int rank() const { return n_; }
  const Int& at(int i, int j) const { return entries_[i][j]; }
  const Mat& entries() const { return entries_; }
  const Int& det() const { return det_; }

  bool operator==(const GramMatrix& o) const { return entries_ == o.entries_; }

 private:
  int n_;
  Mat entries_;
  Int det_;
};

inline GramMatrix direct_sum(const GramMatrix& a, const GramMatrix& b) {
  const int na = a.rank(), nb = b.rank();
  Mat m(na + nb, std::vector<Int>(na + nb, 0));
  for (int i = 0; i < na; ++i)
    for (int j = 0; j < na; ++j) m[i][j] = a.at(i, j);
  for (int i = 0; i < nb; ++i)
    for (int j = 0; j < nb; ++j) m[na + i][na + j] = b.at(i, j);
  return GramMatrix(std::move(m));
}

inline GramMatrix hyperbolic_plane() {
  return GramMatrix({{Int(0), Int(1)}, {Int(1), Int(0)}});
}

// P^T S P for an integer matrix P with det P != 0.
inline GramMatrix basis_change(const GramMatrix& s, const Mat& p) {
  const int n = s.rank();
  if (static_cast<int>(p.size()) != n)
    throw std::invalid_argument("basis-change matrix has wrong size");
  Mat sp(n, std::vector<Int>(n, 0));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) sp[i][j] += s.at(i, k) * p[k][j];
  Mat out(n, std::vector<Int>(n, 0));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) out[i][j] += p[k][i] * sp[k][j];
  return GramMatrix(std::move(out));
}

// Rational congruence-diagonalization: returns d_1..d_n with S ~ diag(d_i)
// over Q. pivot_order lists the indices in the order they are used as pivots;
// the result depends on it, but signature and Hasse symbols do not.
inline std::vector<Rat> congruent_diagonal(const GramMatrix& s,
                                           const std::vector<int>& pivot_order) {
  const int n = s.rank();
  if (static_cast<int>(pivot_order.size()) != n)
    throw std::invalid_argument("pivot order has wrong length");
  std::vector<std::vector<Rat>> a(n, std::vector<Rat>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a[i][j] = Rat(s.at(i, j));
  std::vector<bool> used(n, false);
  std::vector<Rat> diag;
  diag.reserve(n);
  for (int step = 0; step < n; ++step) {
    const int k = pivot_order[step];
    if (k < 0 || k >= n || used[k])
      throw std::invalid_argument("pivot order is not a permutation");
    if (a[k][k] == 0) {
      // The remaining block is nondegenerate, so some a[k][j] != 0; adding
      // +/- row and column j makes the diagonal entry nonzero for one sign.
      int j = -1;
      for (int c = 0; c < n; ++c)
        if (!used[c] && c != k && a[k][c] != 0) {
          j = c;
          break;
        }
      if (j < 0) throw std::logic_error("degenerate block during pivoting");
      const int t = (a[k][k] + 2 * a[k][j] + a[j][j] != 0) ? 1 : -1;
      for (int c = 0; c < n; ++c) a[k][c] += t * a[j][c];
      for (int r = 0; r < n; ++r) a[r][k] += t * a[r][j];
    }
    const Rat d = a[k][k];
    diag.push_back(d);
    used[k] = true;
    const std::vector<Rat> pivot_row = a[k];
    for (int i = 0; i < n; ++i) {
      if (used[i] || a[i][k] == 0) continue;
      const Rat f = a[i][k] / d;
      for (int c = 0; c < n; ++c)
        if (!used[c]) a[i][c] -= f * pivot_row[c];
      a[i][k] = 0;
      a[k][i] = 0;
    }
  }
  return diag;
}

inline std::vector<Rat> congruent_diagonal(const GramMatrix& s) {
  std::vector<int> order(s.rank());
  std::iota(order.begin(), order.end(), 0);
  return congruent_diagonal(s, order);
}

// Hasse symbol eps_p = prod_{i<j} (d_i, d_j)_p over any rational
// diagonalization; independent of the diagonalization chosen.
inline int hasse_at(const GramMatrix& s, const Int& p) {
  const auto d = congruent_diagonal(s);
  int eps = 1;
  for (size_t i = 0; i < d.size(); ++i)
    for (size_t j = i + 1; j < d.size(); ++j)
      eps *= hilbert_symbol(d[i], d[j], p);
  return eps;
}

inline int hasse_real(const GramMatrix& s) {
  const auto d = congruent_diagonal(s);
  int eps = 1;
  for (size_t i = 0; i < d.size(); ++i)
    for (size_t j = i + 1; j < d.size(); ++j)
      eps *= hilbert_symbol_real(d[i], d[j]);
  return eps;
}

struct GlobalInvariants {
  Int det;
  int r = 0;  // positive inertia index
  int s = 0;  // negative inertia index
  bool is_even = false;
  std::map<Int, int> hasse;  // p -> eps_p, for every prime p | 2 det
};

inline GlobalInvariants invariants(const GramMatrix& m) {
  GlobalInvariants g;
  g.det = m.det();
  for (const Rat& d : congruent_diagonal(m))
    (d > 0 ? g.r : g.s)++;
  g.is_even = true;
  for (int i = 0; i < m.rank(); ++i)
    if (m.at(i, i) % 2 != 0) g.is_even = false;
  g.hasse[2] = hasse_at(m, 2);
  for (const Int& p : primes_dividing(m.det()))
    if (p != 2) g.hasse[p] = hasse_at(m, p);
  return g;
}

inline bool is_indefinite(const GramMatrix& m) {
  const GlobalInvariants g = invariants(m);
  return g.r >= 1 && g.s >= 1;
}

// Invariant factors d_1 | d_2 | ... | d_n of S as an integer matrix, positive.
inline std::vector<Int> smith_invariant_factors(const GramMatrix& s) {
  const int n = s.rank();
  Mat m = s.entries();
  std::vector<Int> out;
  out.reserve(n);
  for (int t = 0; t < n; ++t) {
    for (;;) {
      int bi = -1, bj = -1;
      for (int i = t; i < n; ++i)
        for (int j = t; j < n; ++j)
          if (m[i][j] != 0 &&
              (bi < 0 || abs(m[i][j]) < abs(m[bi][bj]))) {
            bi = i;
            bj = j;
          }
      if (bi < 0) throw std::logic_error("rank deficiency in Smith reduction");
      std::swap(m[t], m[bi]);
      for (int i = t; i < n; ++i) std::swap(m[i][t], m[i][bj]);
      bool clean = true;
      for (int i = t + 1; i < n; ++i) {
        if (m[i][t] == 0) continue;
        Int q;
        mpz_fdiv_q(q.get_mpz_t(), m[i][t].get_mpz_t(), m[t][t].get_mpz_t());
        for (int j = t; j < n; ++j) m[i][j] -= q * m[t][j];
        if (m[i][t] != 0) clean = false;
      }
      for (int j = t + 1; j < n; ++j) {
        if (m[t][j] == 0) continue;
        Int q;
        mpz_fdiv_q(q.get_mpz_t(), m[t][j].get_mpz_t(), m[t][t].get_mpz_t());
        for (int i = t; i < n; ++i) m[i][j] -= q * m[i][t];
        if (m[t][j] != 0) clean = false;
      }
      if (!clean) continue;
      // Pivot must divide the rest of the block; if not, absorb the
      // offending row and keep reducing.
      bool divides = true;
      for (int i = t + 1; i < n && divides; ++i)
        for (int j = t + 1; j < n && divides; ++j)
          if (m[i][j] % m[t][t] != 0) {
            for (int c = t; c < n; ++c) m[t][c] += m[i][c];
            divides = false;
          }
      if (divides) break;
    }
    out.push_back(abs(m[t][t]));
  }
  return out;
}

}  // namespace latvol
