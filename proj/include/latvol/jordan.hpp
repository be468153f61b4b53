#pragma once

// Jordan decomposition of an integral lattice over Z_p: a direct sum of
// p^j-scaled unimodular components. For odd p the per-scale descriptors are
// unique up to isometry. For p = 2 they are not: different splitting orders
// can produce different but isometric symbols. A normal form is chosen by
// exploring a fixed set of symbol rewrites, each realized by an explicit
// basis change, and taking the lexicographically minimal reachable state.
//
// The 2-adic rewrites, acting on per-scale data (even-part class chi,
// odd-part determinant class "sign", compartment oddity t mod 8), where a
// compartment is a maximal run of consecutive scales with odd parts:
//   - same scale, even part and odd part both present: flip chi and sign;
//   - adjacent scales, both with odd parts: flip both signs, t += 4;
//   - scales j and j+2 with odd parts, none at j+1: flip both signs,
//     t += 4 in each of the two compartments;
//   - adjacent scales, even part at one and odd part at the other: flip
//     that chi and that sign, t += 4.
// A rewrite is discarded when the resulting state admits no allocation of
// units; with that pruning each rewrite is an isometry in both directions.

#include <latvol/gram.hpp>

#include <algorithm>
#include <climits>
#include <compare>
#include <deque>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace latvol {

struct UnimodularDescriptor {
  int rank = 0;
  int det_square_class = 0;  // odd p: Legendre symbol of the unit determinant
  int even_rank = 0;         // p = 2: rank of the even part
  int even_chi = 1;          // p = 2: hyperbolic-type even part +1, else -1
  std::vector<int> odd_units;  // p = 2: diagonal units mod 8, at most two

  bool is_odd_component() const { return !odd_units.empty(); }
  auto operator<=>(const UnimodularDescriptor&) const = default;
};

struct JordanComponent {
  long scale = 0;
  UnimodularDescriptor desc;
  auto operator<=>(const JordanComponent&) const = default;
};

struct JordanDecomposition {
  Int p;
  std::vector<JordanComponent> components;  // strictly increasing scales

  const UnimodularDescriptor* at_scale(long j) const {
    for (const auto& c : components)
      if (c.scale == j) return &c.desc;
    return nullptr;
  }
  bool operator==(const JordanDecomposition& o) const {
    return p == o.p && components == o.components;
  }
  bool operator!=(const JordanDecomposition& o) const { return !(*this == o); }
};

// chi of a unimodular space: 0 in odd rank; +1 iff hyperbolic. For odd p a
// rank-2m space is hyperbolic iff its determinant class equals (-1)^m; for
// p = 2 the stored even-part value applies.
inline int chi(const UnimodularDescriptor& d, const Int& p) {
  if (p == 2) return d.even_chi;
  if (d.rank % 2 != 0) return 0;
  const int lg = (p % 4 == 1) ? 1 : -1;
  return ((d.rank / 2) % 2 == 0) ? d.det_square_class : d.det_square_class * lg;
}

namespace detail {

using RatMat = std::vector<std::vector<Rat>>;

inline RatMat to_rat(const GramMatrix& s) {
  const int n = s.rank();
  RatMat a(n, std::vector<Rat>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a[i][j] = Rat(s.at(i, j));
  return a;
}

inline void eliminate_rank1(RatMat& a, std::vector<bool>& used, int k) {
  const int n = static_cast<int>(a.size());
  const Rat d = a[k][k];
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

// p odd: greedy diagonalization with minimal-valuation pivots. All values
// stay in Z localized at p, so unit parts reduce mod p exactly.
inline std::vector<Rat> split_odd_prime(const GramMatrix& s, const Int& p) {
  const int n = s.rank();
  RatMat a = to_rat(s);
  std::vector<bool> used(n, false);
  std::vector<Rat> diag;
  diag.reserve(n);
  for (int step = 0; step < n; ++step) {
    long vmin = LONG_MAX;
    for (int i = 0; i < n; ++i) {
      if (used[i]) continue;
      for (int j = i; j < n; ++j)
        if (!used[j] && a[i][j] != 0)
          vmin = std::min(vmin, valuation(a[i][j], p));
    }
    if (vmin == LONG_MAX) throw std::logic_error("degenerate block in split");
    int k = -1;
    for (int i = 0; i < n && k < 0; ++i)
      if (!used[i] && a[i][i] != 0 && valuation(a[i][i], p) == vmin) k = i;
    if (k < 0) {
      // Minimal valuation only off the diagonal: absorb row/column j into i;
      // 2 a[i][j] keeps valuation vmin because p is odd.
      int bi = -1, bj = -1;
      for (int i = 0; i < n && bi < 0; ++i) {
        if (used[i]) continue;
        for (int j = i + 1; j < n; ++j)
          if (!used[j] && a[i][j] != 0 && valuation(a[i][j], p) == vmin) {
            bi = i;
            bj = j;
            break;
          }
      }
      for (int c = 0; c < n; ++c)
        if (!used[c]) a[bi][c] += a[bj][c];
      for (int r = 0; r < n; ++r)
        if (!used[r]) a[r][bi] += a[r][bj];
      k = bi;
    }
    diag.push_back(a[k][k]);
    eliminate_rank1(a, used, k);
  }
  return diag;
}

struct TwoPiece {
  long scale;
  bool even_block;  // false: rank-1 odd unit; true: U- or V-type block
  int unit;         // odd case: unit mod 8
  bool is_v;        // even case
};

inline std::vector<TwoPiece> split_two_adic(const GramMatrix& s) {
  const Int two(2);
  const int n = s.rank();
  RatMat a = to_rat(s);
  std::vector<bool> used(n, false);
  std::vector<TwoPiece> out;
  int remaining = n;
  while (remaining > 0) {
    long vmin = LONG_MAX;
    for (int i = 0; i < n; ++i) {
      if (used[i]) continue;
      for (int j = i; j < n; ++j)
        if (!used[j] && a[i][j] != 0)
          vmin = std::min(vmin, valuation(a[i][j], two));
    }
    if (vmin == LONG_MAX) throw std::logic_error("degenerate block in split");
    int k = -1;
    for (int i = 0; i < n && k < 0; ++i)
      if (!used[i] && a[i][i] != 0 && valuation(a[i][i], two) == vmin) k = i;
    if (k >= 0) {
      const int u =
          static_cast<int>(mod_reduce(unit_part(a[k][k], two), 8).get_si());
      out.push_back({vmin, false, u, false});
      eliminate_rank1(a, used, k);
      --remaining;
      continue;
    }
    // Minimal valuation only off the diagonal: split an even 2x2 block. Its
    // determinant unit is 3 mod 8 (V type) or 7 mod 8 (U type).
    int bi = -1, bj = -1;
    for (int i = 0; i < n && bi < 0; ++i) {
      if (used[i]) continue;
      for (int j = i + 1; j < n; ++j)
        if (!used[j] && a[i][j] != 0 && valuation(a[i][j], two) == vmin) {
          bi = i;
          bj = j;
          break;
        }
    }
    const Rat det_b = a[bi][bi] * a[bj][bj] - a[bi][bj] * a[bi][bj];
    const Int cls = mod_reduce(det_b / pow_rat(two, 2 * vmin), 8);
    if (cls != 3 && cls != 7)
      throw std::logic_error("even block with unit diagonal");
    out.push_back({vmin, true, 0, cls == 3});
    used[bi] = used[bj] = true;
    std::vector<Rat> ci(n), cj(n), xs(n), ys(n);
    for (int c = 0; c < n; ++c) {
      if (used[c]) continue;
      ci[c] = a[c][bi];
      cj[c] = a[c][bj];
      xs[c] = (ci[c] * a[bj][bj] - cj[c] * a[bi][bj]) / det_b;
      ys[c] = (a[bi][bi] * cj[c] - a[bi][bj] * ci[c]) / det_b;
    }
    for (int r = 0; r < n; ++r) {
      if (used[r]) continue;
      for (int c = 0; c < n; ++c)
        if (!used[c]) a[r][c] -= ci[r] * xs[c] + cj[r] * ys[c];
      a[r][bi] = a[r][bj] = a[bi][r] = a[bj][r] = 0;
    }
    remaining -= 2;
  }
  return out;
}

// <a,b,c> with units a,b,c is an even 2x2 block plus one unit; the block type
// is fixed by matching determinant and Hasse data of the two candidates.
inline std::pair<bool, int> merge_three_units(int a, int b, int c) {
  const auto eps = [](int u) { return u % 4 == 3 ? 1 : 0; };
  const int hexp =
      eps(a) * eps(b) + eps(a) * eps(c) + eps(b) * eps(c);
  const int h = (hexp % 2 == 0) ? 1 : -1;
  const int m = (a * b * c) % 8;
  const int u_u = (7 * m) % 8;
  const int u_v = (3 * m) % 8;
  const bool choose_u =
      (u_u % 4 == 1 && h == 1) || (u_u % 4 == 3 && h == -1);
  return choose_u ? std::pair<bool, int>{false, u_u}
                  : std::pair<bool, int>{true, u_v};
}

inline int unit_sign_class(int u) { return (u == 1 || u == 7) ? 1 : -1; }

// Oddities a scale's odd part can carry, by rank and determinant class.
inline const std::vector<int>& odd_t_candidates(int odd_rank, int sign) {
  static const std::vector<int> r1p = {1, 7}, r1m = {3, 5};
  static const std::vector<int> r2p = {0, 2, 6}, r2m = {2, 4, 6};
  if (odd_rank == 1) return sign > 0 ? r1p : r1m;
  if (odd_rank == 2) return sign > 0 ? r2p : r2m;
  throw std::logic_error("odd part rank outside 1..2");
}

inline std::vector<int> decode_units(int odd_rank, int sign, int t) {
  if (odd_rank == 1) {
    if (unit_sign_class(t) != sign)
      throw std::logic_error("unrealizable rank-1 odd state");
    return {t};
  }
  if (sign > 0) {
    if (t == 0) return {1, 7};
    if (t == 2) return {1, 1};
    if (t == 6) return {3, 3};
  } else {
    if (t == 2) return {3, 7};
    if (t == 4) return {1, 3};
    if (t == 6) return {1, 5};
  }
  throw std::logic_error("unrealizable rank-2 odd state");
}

struct Sym2Core {
  std::vector<long> scales;  // scales with rank >= 1, ascending
  std::map<long, int> even_rank;
  std::map<long, int> odd_rank;
  std::vector<std::vector<long>> compartments;
  std::map<long, int> comp_of;  // odd scale -> compartment index

  int odd_rank_at(long j) const {
    const auto it = odd_rank.find(j);
    return it == odd_rank.end() ? 0 : it->second;
  }
  int even_rank_at(long j) const {
    const auto it = even_rank.find(j);
    return it == even_rank.end() ? 0 : it->second;
  }
};

struct Sym2State {
  std::map<long, int> chi;   // scales with even part
  std::map<long, int> sign;  // scales with odd part
  std::map<int, int> comp_t;

  std::vector<long> key() const {
    std::vector<long> k;
    for (const auto& [j, v] : chi) k.push_back(v == 1 ? 0 : 1);
    for (const auto& [j, v] : sign) k.push_back(v == 1 ? 0 : 1);
    for (const auto& [c, t] : comp_t) k.push_back(t);
    return k;
  }
};

inline bool realizable(const Sym2Core& core, const Sym2State& st) {
  for (size_t c = 0; c < core.compartments.size(); ++c) {
    std::set<int> sums = {0};
    for (long j : core.compartments[c]) {
      std::set<int> next;
      for (int base : sums)
        for (int t : odd_t_candidates(core.odd_rank.at(j), st.sign.at(j)))
          next.insert((base + t) % 8);
      sums = std::move(next);
    }
    if (!sums.count(st.comp_t.at(static_cast<int>(c)))) return false;
  }
  return true;
}

inline std::vector<Sym2State> rewrite_steps(const Sym2Core& core,
                                            const Sym2State& st) {
  std::vector<Sym2State> out;
  const auto push = [&](Sym2State next) {
    if (realizable(core, next)) out.push_back(std::move(next));
  };
  for (long j : core.scales) {
    const bool has_even = core.even_rank_at(j) >= 2;
    const bool has_odd = core.odd_rank_at(j) >= 1;
    if (has_even && has_odd) {
      Sym2State n = st;
      n.chi[j] = -n.chi[j];
      n.sign[j] = -n.sign[j];
      push(std::move(n));
    }
    if (has_odd && core.odd_rank_at(j + 1) >= 1) {
      Sym2State n = st;
      n.sign[j] = -n.sign[j];
      n.sign[j + 1] = -n.sign[j + 1];
      int& t = n.comp_t[core.comp_of.at(j)];
      t = (t + 4) % 8;
      push(std::move(n));
    }
    if (has_odd && core.odd_rank_at(j + 1) == 0 &&
        core.odd_rank_at(j + 2) >= 1) {
      Sym2State n = st;
      n.sign[j] = -n.sign[j];
      n.sign[j + 2] = -n.sign[j + 2];
      int& t1 = n.comp_t[core.comp_of.at(j)];
      t1 = (t1 + 4) % 8;
      int& t2 = n.comp_t[core.comp_of.at(j + 2)];
      t2 = (t2 + 4) % 8;
      push(std::move(n));
    }
    if (has_even)
      for (long dj : {-1L, 1L})
        if (core.odd_rank_at(j + dj) >= 1) {
          Sym2State n = st;
          n.chi[j] = -n.chi[j];
          n.sign[j + dj] = -n.sign[j + dj];
          int& t = n.comp_t[core.comp_of.at(j + dj)];
          t = (t + 4) % 8;
          push(std::move(n));
        }
  }
  return out;
}

inline Sym2State minimal_state(const Sym2Core& core, const Sym2State& start) {
  Sym2State best = start;
  std::set<std::vector<long>> seen = {start.key()};
  std::deque<Sym2State> queue = {start};
  while (!queue.empty()) {
    const Sym2State cur = queue.front();
    queue.pop_front();
    if (cur.key() < best.key()) best = cur;
    for (Sym2State& next : rewrite_steps(core, cur))
      if (seen.insert(next.key()).second) queue.push_back(std::move(next));
  }
  return best;
}

// Lexicographically minimal per-scale oddity allocation with the given total.
inline std::map<long, int> allocate_compartment(const Sym2Core& core,
                                                const Sym2State& st,
                                                const std::vector<long>& comp,
                                                int total) {
  std::map<long, int> alloc;
  // feasible[i] = set of sums achievable by scales comp[i..]
  const size_t k = comp.size();
  std::vector<std::set<int>> feasible(k + 1);
  feasible[k] = {0};
  for (size_t i = k; i-- > 0;) {
    for (int base : feasible[i + 1])
      for (int t : odd_t_candidates(core.odd_rank.at(comp[i]),
                                    st.sign.at(comp[i])))
        feasible[i].insert((base + t) % 8);
  }
  int need = total;
  for (size_t i = 0; i < k; ++i) {
    bool placed = false;
    for (int t : odd_t_candidates(core.odd_rank.at(comp[i]),
                                  st.sign.at(comp[i]))) {
      if (feasible[i + 1].count(((need - t) % 8 + 8) % 8)) {
        alloc[comp[i]] = t;
        need = ((need - t) % 8 + 8) % 8;
        placed = true;
        break;
      }
    }
    if (!placed) throw std::logic_error("infeasible oddity allocation");
  }
  return alloc;
}

inline JordanDecomposition decompose_two(const GramMatrix& s) {
  struct Raw {
    int even_rank = 0;
    int v_count = 0;
    std::vector<int> odd;
  };
  std::map<long, Raw> raw;
  for (const TwoPiece& piece : split_two_adic(s)) {
    Raw& r = raw[piece.scale];
    if (piece.even_block) {
      r.even_rank += 2;
      r.v_count += piece.is_v ? 1 : 0;
    } else {
      r.odd.push_back(piece.unit);
    }
  }
  for (auto& [j, r] : raw) {
    std::sort(r.odd.begin(), r.odd.end());
    while (r.odd.size() > 2) {
      const auto [is_v, u] = merge_three_units(r.odd[0], r.odd[1], r.odd[2]);
      r.odd.erase(r.odd.begin(), r.odd.begin() + 3);
      r.odd.push_back(u);
      std::sort(r.odd.begin(), r.odd.end());
      r.even_rank += 2;
      r.v_count += is_v ? 1 : 0;
    }
  }

  Sym2Core core;
  Sym2State state;
  for (const auto& [j, r] : raw) {
    core.scales.push_back(j);
    if (r.even_rank > 0) {
      core.even_rank[j] = r.even_rank;
      state.chi[j] = (r.v_count % 2 == 0) ? 1 : -1;
    }
    if (!r.odd.empty()) {
      core.odd_rank[j] = static_cast<int>(r.odd.size());
      int sg = 1;
      for (int u : r.odd) sg *= unit_sign_class(u);
      state.sign[j] = sg;
    }
  }
  for (long j : core.scales) {
    if (core.odd_rank_at(j) == 0) continue;
    if (core.comp_of.count(j)) continue;
    std::vector<long> comp;
    for (long k = j; core.odd_rank_at(k) >= 1; ++k) {
      comp.push_back(k);
      core.comp_of[k] = static_cast<int>(core.compartments.size());
    }
    int t = 0;
    for (long k : comp)
      for (int u : raw.at(k).odd) t = (t + u) % 8;
    state.comp_t[static_cast<int>(core.compartments.size())] = t;
    core.compartments.push_back(std::move(comp));
  }

  const Sym2State min_state = minimal_state(core, state);
  std::map<long, std::vector<int>> units;
  for (size_t c = 0; c < core.compartments.size(); ++c) {
    const auto alloc =
        allocate_compartment(core, min_state, core.compartments[c],
                             min_state.comp_t.at(static_cast<int>(c)));
    for (const auto& [j, t] : alloc)
      units[j] = decode_units(core.odd_rank.at(j), min_state.sign.at(j), t);
  }

  JordanDecomposition jd;
  jd.p = 2;
  for (long j : core.scales) {
    JordanComponent comp;
    comp.scale = j;
    comp.desc.even_rank = core.even_rank_at(j);
    comp.desc.even_chi =
        comp.desc.even_rank > 0 ? min_state.chi.at(j) : 1;
    if (units.count(j)) comp.desc.odd_units = units.at(j);
    comp.desc.rank =
        comp.desc.even_rank + static_cast<int>(comp.desc.odd_units.size());
    jd.components.push_back(std::move(comp));
  }
  return jd;
}

inline JordanDecomposition decompose_odd(const GramMatrix& s, const Int& p) {
  std::map<long, std::pair<int, Rat>> scales;  // scale -> (rank, unit product)
  for (const Rat& d : split_odd_prime(s, p)) {
    const long v = valuation(d, p);
    auto [it, fresh] = scales.try_emplace(v, 0, Rat(1));
    it->second.first += 1;
    it->second.second *= unit_part(d, p);
  }
  JordanDecomposition jd;
  jd.p = p;
  for (const auto& [j, ru] : scales) {
    JordanComponent comp;
    comp.scale = j;
    comp.desc.rank = ru.first;
    comp.desc.det_square_class =
        legendre_symbol(mod_reduce(ru.second, p), p);
    jd.components.push_back(std::move(comp));
  }
  return jd;
}

}  // namespace detail

inline JordanDecomposition jordan_decompose(const GramMatrix& s, const Int& p) {
  if (!is_prime(p)) throw std::invalid_argument("modulus must be prime");
  return p == 2 ? detail::decompose_two(s) : detail::decompose_odd(s, p);
}

inline std::string render_genus_symbol(const JordanDecomposition& jd) {
  std::ostringstream os;
  os << jd.p << ":";
  for (const auto& c : jd.components) {
    os << " [" << c.scale << ": ";
    if (jd.p == 2) {
      bool first = true;
      if (c.desc.even_rank > 0) {
        const int m = c.desc.even_rank / 2;
        if (c.desc.even_chi == 1) {
          os << "U";
          if (m > 1) os << "^" << m;
        } else {
          os << "V";
          if (m > 1) os << ".U^" << (m - 1);
        }
        first = false;
      }
      if (!c.desc.odd_units.empty()) {
        if (!first) os << ", ";
        os << "odd(";
        for (size_t i = 0; i < c.desc.odd_units.size(); ++i)
          os << (i ? "," : "") << c.desc.odd_units[i];
        os << ")";
      }
    } else {
      os << "rank " << c.desc.rank << ", det "
         << (c.desc.det_square_class == 1 ? "+" : "-");
    }
    os << "]";
  }
  return os.str();
}

}  // namespace latvol
