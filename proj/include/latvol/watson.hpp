#pragma once

// Discriminant-reduction moves: E enlarges a lattice by the vectors y/p with
// S y = 0 mod p^2, F is E applied to the p-rescaled lattice (swapping the
// scale-0 and scale-1 parts at p), and the reduction loop drives any
// indefinite ternary lattice to square-free determinant.

#include <latvol/gram.hpp>

#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace latvol {

enum class WatsonMove { E, F };

struct ReductionStep {
  WatsonMove move;
  Int prime;
  GramMatrix before;
  GramMatrix after;
};

inline std::string describe(const ReductionStep& step) {
  std::ostringstream os;
  os << (step.move == WatsonMove::E ? "E_" : "F_") << step.prime << ", det "
     << step.before.det() << " -> " << step.after.det();
  return os.str();
}

// Basis of the enlarged lattice in the input coordinates: columns of
// numerator / denominator, the denominator a power of p.
struct WatsonBasis {
  GramMatrix gram;
  Mat numerator;
  Int denominator;
};

namespace detail {

// Smith reduction that tracks column operations: produces |d_1| | ... | |d_n|
// and unimodular C with (row ops) * S * C diagonal, so S y = 0 mod m exactly
// when y = C z with d_i z_i = 0 mod m.
struct SmithColumns {
  std::vector<Int> factors;
  Mat c;
};

inline SmithColumns smith_columns(const GramMatrix& s) {
  const int n = s.rank();
  Mat m = s.entries();
  Mat cmat(n, std::vector<Int>(n, 0));
  for (int i = 0; i < n; ++i) cmat[i][i] = 1;
  std::vector<Int> out;
  out.reserve(n);
  for (int t = 0; t < n; ++t) {
    for (;;) {
      int bi = -1, bj = -1;
      for (int i = t; i < n; ++i)
        for (int j = t; j < n; ++j)
          if (m[i][j] != 0 && (bi < 0 || abs(m[i][j]) < abs(m[bi][bj]))) {
            bi = i;
            bj = j;
          }
      if (bi < 0) throw std::logic_error("rank deficiency in Smith reduction");
      std::swap(m[t], m[bi]);
      for (int i = t; i < n; ++i) std::swap(m[i][t], m[i][bj]);
      for (int i = 0; i < n; ++i) std::swap(cmat[i][t], cmat[i][bj]);
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
        for (int i = 0; i < n; ++i) cmat[i][j] -= q * cmat[i][t];
        if (m[t][j] != 0) clean = false;
      }
      if (!clean) continue;
      bool divides = true;
      for (int i = t + 1; i < n && divides; ++i)
        for (int j = t + 1; j < n && divides; ++j)
          if (m[i][j] % m[t][t] != 0) {
            for (int k = t; k < n; ++k) m[t][k] += m[i][k];
            divides = false;
          }
      if (divides) break;
    }
    out.push_back(abs(m[t][t]));
  }
  return {std::move(out), std::move(cmat)};
}

// Canonical column Hermite form of the lattice spanned by the columns of a
// full-row-rank matrix: lower triangular, positive diagonal, entries left of
// each pivot reduced into [0, pivot).
inline Mat hnf_columns(Mat a) {
  const int n = static_cast<int>(a.size());
  const int m = static_cast<int>(a[0].size());
  const auto sub_col = [&](int dst, int src, const Int& q) {
    if (q == 0) return;
    for (int i = 0; i < n; ++i) a[i][dst] -= q * a[i][src];
  };
  for (int i = 0; i < n; ++i) {
    for (;;) {
      int best = -1;
      for (int j = i; j < m; ++j)
        if (a[i][j] != 0 && (best < 0 || abs(a[i][j]) < abs(a[i][best])))
          best = j;
      if (best < 0) throw std::logic_error("column span is rank deficient");
      for (int k = 0; k < n; ++k) std::swap(a[k][i], a[k][best]);
      bool done = true;
      for (int j = i + 1; j < m; ++j) {
        if (a[i][j] == 0) continue;
        Int q;
        mpz_fdiv_q(q.get_mpz_t(), a[i][j].get_mpz_t(), a[i][i].get_mpz_t());
        sub_col(j, i, q);
        if (a[i][j] != 0) done = false;
      }
      if (done) break;
    }
    if (a[i][i] < 0)
      for (int k = 0; k < n; ++k) a[k][i] = -a[k][i];
    for (int j = 0; j < i; ++j) {
      Int q;
      mpz_fdiv_q(q.get_mpz_t(), a[i][j].get_mpz_t(), a[i][i].get_mpz_t());
      sub_col(j, i, q);
    }
  }
  Mat h(n, std::vector<Int>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) h[i][j] = a[i][j];
  return h;
}

}  // namespace detail

inline WatsonBasis watson_E_basis(const GramMatrix& s, const Int& p) {
  if (!is_prime(p)) throw std::invalid_argument("modulus must be prime");
  const int n = s.rank();
  const Int p2 = p * p;
  const detail::SmithColumns sc = detail::smith_columns(s);
  // Columns spanning {y : S y = 0 mod p^2} together with p^2 Z^n.
  Mat span(n, std::vector<Int>(n + n));
  for (int j = 0; j < n; ++j) {
    const long v = std::min(valuation(sc.factors[j], p), long(2));
    const Int mult = pow_int(p, static_cast<unsigned long>(2 - v));
    for (int i = 0; i < n; ++i) span[i][j] = mult * sc.c[i][j];
  }
  for (int i = 0; i < n; ++i) span[i][n + i] = p;  // p I covers p Z^n + L
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      Int acc = 0;
      for (int k = 0; k < n; ++k) acc += s.at(i, k) * span[k][j];
      if (acc % p2 != 0)
        throw std::logic_error("solution column fails its congruence");
    }
  }
  const Mat h = detail::hnf_columns(std::move(span));
  const GramMatrix scaled = basis_change(s, h);
  Mat out(n, std::vector<Int>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (scaled.at(i, j) % p2 != 0)
        throw std::logic_error("enlarged lattice is not integral");
      out[i][j] = scaled.at(i, j) / p2;
    }
  return {GramMatrix(out), h, p};
}

inline GramMatrix watson_E(const GramMatrix& s, const Int& p) {
  return watson_E_basis(s, p).gram;
}

inline GramMatrix watson_F(const GramMatrix& s, const Int& p) {
  Mat scaled = s.entries();
  for (auto& row : scaled)
    for (Int& v : row) v *= p;
  return watson_E(GramMatrix(scaled), p);
}

inline std::pair<GramMatrix, std::vector<ReductionStep>> reduce_to_square_free(
    const GramMatrix& s) {
  if (s.rank() != 3)
    throw std::invalid_argument("reduction requires a ternary lattice");
  if (!is_indefinite(s))
    throw std::invalid_argument("reduction requires an indefinite lattice");
  long bound = 0;
  for (const Int& p : primes_dividing(s.det()))
    bound += (valuation(s.det(), p) + 1) / 2 + 1;
  std::vector<ReductionStep> log;
  GramMatrix cur = s;
  for (;;) {
    if (static_cast<long>(log.size()) > bound)
      throw std::logic_error("reduction exceeded its step bound");
    const std::vector<Int> factors = smith_invariant_factors(cur);
    Int move_p = 0;
    bool is_f = false;
    for (const Int& p : primes_dividing(cur.det())) {
      for (const Int& f : factors)
        if (valuation(f, p) >= 2) {
          move_p = p;
          break;
        }
      if (move_p != 0) break;
    }
    if (move_p == 0) {
      for (const Int& p : primes_dividing(cur.det())) {
        int divisible = 0;
        for (const Int& f : factors)
          if (f % p == 0) ++divisible;
        if (divisible >= 2) {
          move_p = p;
          is_f = true;
          break;
        }
      }
    }
    if (move_p == 0) break;
    const GramMatrix next =
        is_f ? watson_F(cur, move_p) : watson_E(cur, move_p);
    log.push_back(
        {is_f ? WatsonMove::F : WatsonMove::E, move_p, cur, next});
    cur = next;
  }
  return {cur, log};
}

}  // namespace latvol
