#pragma once

// Local densities of an integral lattice at a prime: closed formulas driven
// by the Jordan decomposition, and the definitional count
//   alpha_p(S) = 1/2 p^{-r n(n-1)/2} |{X mod p^r : X^T S X = S mod p^r}|
// used as an independent cross-check at finite precision r.

#include <latvol/gram.hpp>
#include <latvol/jordan.hpp>

#include <algorithm>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace latvol {

struct LocalDensity {
  Int p;
  Rat value;
  std::string method;  // "closed_form" or "oracle(r)"
  long oracle_r = 0;
  int s = 0;       // number of nonzero Jordan components
  long omega = 0;  // sum_j j n_j ((n_j+1)/2 + sum_{k>j} n_k)
  long q = 0;      // p = 2 only
  Rat p_factor = Rat(1);
  Rat e_factor = Rat(1);
};

namespace detail {

inline Rat euler_factor(const Int& p, int n) {
  Rat out(1);
  for (int i = 1; i <= n; ++i) out *= Rat(1) - pow_rat(p, -2 * i);
  return out;
}

inline long scale_exponent(const JordanDecomposition& jd) {
  long omega = 0;
  for (size_t a = 0; a < jd.components.size(); ++a) {
    const long j = jd.components[a].scale;
    const long nj = jd.components[a].desc.rank;
    long later = 0;
    for (size_t b = a + 1; b < jd.components.size(); ++b)
      later += jd.components[b].desc.rank;
    omega += j * (nj * (nj + 1) / 2 + nj * later);
  }
  return omega;
}

}  // namespace detail

inline LocalDensity density_odd(const JordanDecomposition& jd) {
  if (jd.p == 2)
    throw std::invalid_argument("density_odd requires an odd prime");
  LocalDensity d;
  d.p = jd.p;
  d.method = "closed_form";
  d.s = static_cast<int>(jd.components.size());
  d.omega = detail::scale_exponent(jd);
  d.p_factor = Rat(1);
  d.e_factor = Rat(1);
  for (const auto& c : jd.components) {
    d.p_factor *= detail::euler_factor(jd.p, c.desc.rank / 2);
    if (c.desc.rank % 2 == 0) {
      const int x = chi(c.desc, jd.p);
      d.e_factor /= Rat(1) + Rat(x) * pow_rat(jd.p, -c.desc.rank / 2);
    }
  }
  d.value = pow_rat(2, d.s - 1) * pow_rat(jd.p, d.omega) * d.p_factor *
            d.e_factor;
  return d;
}

inline LocalDensity density_two(const JordanDecomposition& jd) {
  if (jd.p != 2)
    throw std::invalid_argument("density_two requires p = 2");
  LocalDensity d;
  d.p = 2;
  d.method = "closed_form";
  d.s = static_cast<int>(jd.components.size());
  d.omega = detail::scale_exponent(jd);

  int n = 0;
  for (const auto& c : jd.components) n += c.desc.rank;
  const auto odd_at = [&](long j) {
    const UnimodularDescriptor* u = jd.at_scale(j);
    return u != nullptr && u->is_odd_component();
  };

  d.q = 0;
  for (const auto& c : jd.components)
    if (c.desc.is_odd_component())
      d.q += c.desc.rank + (odd_at(c.scale + 1) ? 1 : 0);

  d.p_factor = Rat(1);
  for (const auto& c : jd.components)
    d.p_factor *= detail::euler_factor(2, c.desc.even_rank / 2);

  // E-factors over every scale adjacent to the decomposition; scales without
  // a component carry an empty even part with chi = +1.
  d.e_factor = Rat(1);
  const long lo = jd.components.front().scale - 1;
  const long hi = jd.components.back().scale + 1;
  for (long j = lo; j <= hi; ++j) {
    Rat ej(1, 2);
    if (!odd_at(j - 1) && !odd_at(j + 1)) {
      const UnimodularDescriptor* u = jd.at_scale(j);
      const int even_rank = u ? u->even_rank : 0;
      const int x = u && even_rank > 0 ? u->even_chi : 1;
      const bool exceptional =
          u && u->odd_units.size() == 2 &&
          u->odd_units[0] % 4 == u->odd_units[1] % 4;
      if (!exceptional)
        ej = make_rat(1, 2) * (Rat(1) + Rat(x) * pow_rat(2, -even_rank / 2));
    }
    d.e_factor /= ej;
  }
  d.value = pow_rat(2, n - 1 + d.omega - d.q) * d.p_factor * d.e_factor;
  return d;
}

inline LocalDensity density(const GramMatrix& s, const Int& p) {
  const JordanDecomposition jd = jordan_decompose(s, p);
  return p == 2 ? density_two(jd) : density_odd(jd);
}

// Smallest r at which the mod-p^r count of brute_force_density reaches its
// limit: 3 + val_2(det) at p = 2, one step past the valuation at odd p.
inline long stable_precision(const GramMatrix& s, const Int& p) {
  const long v = valuation(s.det(), p);
  if (p == 2) return 3 + v;
  return v > 0 ? v + 1 : 1;
}

namespace detail {

struct OracleProblem {
  int n = 0;
  std::uint64_t m = 0;  // p^r
  std::uint64_t ncols = 0;  // m^n
  std::vector<std::uint64_t> smod;      // S mod m, row-major
  std::vector<std::uint64_t> sc_table;  // S*col mod m per column index
  // column indices grouped by c^T S c mod m, each group ascending; populated
  // together with sc_table when the tables fit in memory
  std::vector<std::vector<std::uint64_t>> diag_buckets;

  void column(std::uint64_t idx, std::uint64_t* col) const {
    for (int i = 0; i < n; ++i) {
      col[i] = idx % m;
      idx /= m;
    }
  }
  void s_times(const std::uint64_t* col, std::uint64_t* out) const {
    for (int i = 0; i < n; ++i) {
      unsigned __int128 acc = 0;
      for (int j = 0; j < n; ++j)
        acc += static_cast<unsigned __int128>(smod[i * n + j]) * col[j];
      out[i] = static_cast<std::uint64_t>(acc % m);
    }
  }
  std::uint64_t dot(const std::uint64_t* a, const std::uint64_t* b) const {
    unsigned __int128 acc = 0;
    for (int i = 0; i < n; ++i)
      acc += static_cast<unsigned __int128>(a[i]) * b[i];
    return static_cast<std::uint64_t>(acc % m);
  }
};

// Counts congruence automorphisms column by column; candidate columns are
// drawn from the bucket with the required diagonal value and pruned against
// the inner-product constraints of already-fixed columns before recursing.
class OracleWorker {
 public:
  explicit OracleWorker(const OracleProblem& pr)
      : pr_(pr),
        cols_(pr.n, std::vector<std::uint64_t>(pr.n)),
        cand_(pr.n),
        scand_(pr.n) {}

  std::uint64_t run(int level, std::uint64_t lo, std::uint64_t hi) {
    std::uint64_t total = 0;
    const std::uint64_t want = pr_.smod[level * pr_.n + level];
    if (!pr_.diag_buckets.empty()) {
      const auto& bucket = pr_.diag_buckets[want];
      auto it = std::lower_bound(bucket.begin(), bucket.end(), lo);
      for (; it != bucket.end() && *it < hi; ++it) {
        const std::uint64_t* sc = pr_.sc_table.data() + *it * pr_.n;
        bool ok = true;
        for (int i = 0; i < level && ok; ++i)
          ok = pr_.dot(cols_[i].data(), sc) == pr_.smod[i * pr_.n + level];
        if (!ok) continue;
        if (level == pr_.n - 1) {
          ++total;
        } else {
          pr_.column(*it, cols_[level].data());
          total += run(level + 1, 0, pr_.ncols);
        }
      }
    } else {
      for (std::uint64_t idx = lo; idx < hi; ++idx) {
        pr_.column(idx, cand_.data());
        pr_.s_times(cand_.data(), scand_.data());
        if (pr_.dot(cand_.data(), scand_.data()) != want) continue;
        bool ok = true;
        for (int i = 0; i < level && ok; ++i)
          ok = pr_.dot(cols_[i].data(), scand_.data()) ==
               pr_.smod[i * pr_.n + level];
        if (!ok) continue;
        if (level == pr_.n - 1) {
          ++total;
        } else {
          cols_[level] = cand_;
          total += run(level + 1, 0, pr_.ncols);
        }
      }
    }
    return total;
  }

 private:
  const OracleProblem& pr_;
  std::vector<std::vector<std::uint64_t>> cols_;
  std::vector<std::uint64_t> cand_, scand_;
};

}  // namespace detail

inline LocalDensity brute_force_density(const GramMatrix& sm, const Int& p,
                                        long r,
                                        const Int& budget = Int(1) << 32,
                                        int jobs = 1) {
  if (!is_prime(p)) throw std::invalid_argument("modulus must be prime");
  if (r < 1) throw std::invalid_argument("precision must be >= 1");
  if (jobs < 1) throw std::invalid_argument("jobs must be >= 1");
  const int n = sm.rank();
  const Int needed = pow_int(p, static_cast<unsigned long>(r) * n * n);
  if (needed > budget) {
    std::ostringstream os;
    os << "enumeration would scan p^(r n^2) = " << needed
       << " matrices, over the budget of " << budget;
    throw resource_limit_error(os.str(), needed);
  }

  detail::OracleProblem pr;
  pr.n = n;
  const Int m_int = pow_int(p, static_cast<unsigned long>(r));
  pr.m = m_int.get_ui();
  pr.ncols = 1;
  for (int i = 0; i < n; ++i) pr.ncols *= pr.m;
  pr.smod.resize(n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Int v = sm.at(i, j) % m_int;
      if (v < 0) v += m_int;
      pr.smod[i * n + j] = v.get_ui();
    }
  if (n >= 2 && pr.ncols * n <= (1u << 23)) {
    pr.sc_table.resize(pr.ncols * n);
    pr.diag_buckets.resize(pr.m);
    std::vector<std::uint64_t> col(n);
    for (std::uint64_t idx = 0; idx < pr.ncols; ++idx) {
      pr.column(idx, col.data());
      std::uint64_t* sc = pr.sc_table.data() + idx * n;
      pr.s_times(col.data(), sc);
      pr.diag_buckets[pr.dot(col.data(), sc)].push_back(idx);
    }
  }

  std::uint64_t count = 0;
  if (jobs == 1) {
    detail::OracleWorker w(pr);
    count = w.run(0, 0, pr.ncols);
  } else {
    std::vector<std::uint64_t> partial(jobs, 0);
    std::vector<std::thread> threads;
    for (int t = 0; t < jobs; ++t) {
      const std::uint64_t lo = pr.ncols * t / jobs;
      const std::uint64_t hi = pr.ncols * (t + 1) / jobs;
      threads.emplace_back([&pr, &partial, t, lo, hi] {
        detail::OracleWorker w(pr);
        partial[t] = w.run(0, lo, hi);
      });
    }
    for (auto& th : threads) th.join();
    for (std::uint64_t c : partial) count += c;
  }

  LocalDensity d;
  d.p = p;
  d.oracle_r = r;
  std::ostringstream os;
  os << "oracle(" << r << ")";
  d.method = os.str();
  d.value = make_rat(Int(static_cast<unsigned long>(count)), 2) *
            pow_rat(p, -r * static_cast<long>(n) * (n - 1) / 2);
  return d;
}

}  // namespace latvol
