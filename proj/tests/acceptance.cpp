// Acceptance gate: six end-to-end checks across the library, one PASS/FAIL
// line each. The exit status is the number of failed criteria.
//
// 1. built-in examples reproduce hyperbolic polygon areas, in under a second
// 2. enumeration oracle equals the closed-form density over the corpus
// 3. ternary closed form equals the mass product on an exhaustive grid
// 4. square-free reduction and overlattice move properties on a grid
// 5. oracle counts are stable one precision step past the working precision
// 6. random basis changes leave every computed quantity unchanged

#include <latvol/catalog.hpp>
#include <latvol/density.hpp>
#include <latvol/volume.hpp>
#include <latvol/watson.hpp>

#include <chrono>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "test_util.hpp"

namespace {

using namespace latvol;
using latvol_test::diag;
using latvol_test::gram;
using latvol_test::random_unimodular;

struct Outcome {
  bool pass = true;
  std::string detail;
};

const Int kBudget = Int(1) << 44;

std::vector<GramMatrix> corpus() {
  return {
      diag({1}),
      diag({3}),
      diag({2}),
      hyperbolic_plane(),
      gram({{2, 1}, {1, 2}}),
      diag({1, 1}),
      diag({1, -1}),
      diag({2, 3}),
      diag({1, 1, 1}),
      direct_sum(diag({2}), hyperbolic_plane()),
      direct_sum(diag({6}), hyperbolic_plane()),
      diag({6, -1, -1}),
      diag({11, -1, -1}),
      diag({3, -5, -1}),
  };
}

bool same_genus_data(const GramMatrix& a, const GramMatrix& b) {
  const GlobalInvariants ga = invariants(a), gb = invariants(b);
  if (ga.det != gb.det || ga.r != gb.r || ga.s != gb.s ||
      ga.is_even != gb.is_even || ga.hasse != gb.hasse)
    return false;
  for (Int p : {2, 3, 5})
    if (jordan_decompose(a, p) != jordan_decompose(b, p)) return false;
  return true;
}

long elapsed_ms(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::steady_clock::now() - t0)
      .count();
}

Outcome examples_reproduce_polygon_areas() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto report = verify_examples();
  const long ms = elapsed_ms(t0);
  const std::vector<Rat> expected = {
      make_rat(1, 24), make_rat(1, 12), make_rat(1, 16), make_rat(1, 16),
      make_rat(5, 48), make_rat(1, 12), make_rat(1, 24)};
  Outcome out;
  bool values_ok = report.entries.size() == expected.size();
  for (size_t i = 0; values_ok && i < expected.size(); ++i)
    values_ok = report.entries[i].volume == expected[i] &&
                report.entries[i].polygon == expected[i];
  out.pass = report.all_pass() && values_ok && ms < 1000;
  std::ostringstream os;
  os << report.passed() << "/" << report.total() << " examples exact, " << ms
     << " ms";
  out.detail = os.str();
  return out;
}

Outcome oracle_matches_closed_form() {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome out;
  int pairs = 0;
  for (const GramMatrix& s : corpus()) {
    for (Int p : {2, 3, 5}) {
      const long r = stable_precision(s, p);
      const int jobs = s.rank() >= 3 ? 4 : 1;
      const LocalDensity closed = density(s, p);
      const LocalDensity oracle = brute_force_density(s, p, r, kBudget, jobs);
      ++pairs;
      if (closed.value != oracle.value) {
        out.pass = false;
        std::ostringstream os;
        os << "mismatch at det " << s.det() << " p " << p << " r " << r << ": "
           << format_rat(closed.value) << " vs " << format_rat(oracle.value);
        out.detail = os.str();
        return out;
      }
    }
  }
  std::ostringstream os;
  os << pairs << "/" << pairs << " density pairs agree, " << elapsed_ms(t0)
     << " ms";
  out.detail = os.str();
  return out;
}

Outcome closed_form_matches_mass_product() {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome out;
  long cases = 0, mismatches = 0;
  for (long a = -20; a <= 20; ++a) {
    if (a == 0) continue;
    for (long b = -20; b <= 20; ++b) {
      if (b == 0) continue;
      for (long c = -20; c <= 20; ++c) {
        if (c == 0) continue;
        const int pos = (a > 0) + (b > 0) + (c > 0);
        if (pos == 0 || pos == 3) continue;
        const Int det = Int(a) * b * c;
        if (!factorize(det).square_free()) continue;
        const GramMatrix s = diag({a, b, c});
        ++cases;
        if (closed_form_ternary(s).volume != siegel_volume(s).volume) {
          ++mismatches;
          if (out.detail.empty()) {
            std::ostringstream os;
            os << "first mismatch at diag(" << a << "," << b << "," << c << ")";
            out.detail = os.str();
          }
        }
      }
    }
  }
  out.pass = mismatches == 0 && cases > 0;
  if (out.pass) {
    std::ostringstream os;
    os << cases << " forms, 0 mismatches, " << elapsed_ms(t0) << " ms";
    out.detail = os.str();
  }
  return out;
}

// Reduction must terminate within its step bound with square-free result on
// every indefinite form; applying the rescaled overlattice move twice must
// preserve genus data whenever no invariant factor is divisible by p^2 (the
// only situation the reduction loop uses it in); every overlattice Gram must
// come out integral, which the move itself asserts.
Outcome reduction_and_overlattice_properties() {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome out;
  long reductions = 0, double_moves = 0, deep_skips = 0, enlargements = 0;
  for (long a = -12; a <= 12; ++a) {
    if (a == 0) continue;
    for (long b = -12; b <= 12; ++b) {
      if (b == 0) continue;
      for (long c = -12; c <= 12; ++c) {
        if (c == 0) continue;
        const GramMatrix s = diag({a, b, c});
        const std::vector<Int> factors = smith_invariant_factors(s);
        try {
          for (Int p : {2, 3}) {
            watson_E(s, p);
            ++enlargements;
            bool shallow = true;
            for (const Int& f : factors)
              if (valuation(f, p) > 1) shallow = false;
            if (!shallow) {
              ++deep_skips;
              continue;
            }
            const GramMatrix back = watson_F(watson_F(s, p), p);
            ++double_moves;
            if (!same_genus_data(back, s)) {
              out.pass = false;
              std::ostringstream os;
              os << "double move changed genus data at diag(" << a << "," << b
                 << "," << c << ") p " << p;
              out.detail = os.str();
              return out;
            }
          }
          const int pos = (a > 0) + (b > 0) + (c > 0);
          if (pos == 0 || pos == 3) continue;
          long bound = 0;
          for (const Int& p : primes_dividing(s.det()))
            bound += (valuation(s.det(), p) + 1) / 2 + 1;
          const auto [reduced, steps] = reduce_to_square_free(s);
          ++reductions;
          if (!factorize(reduced.det()).square_free() ||
              static_cast<long>(steps.size()) > bound) {
            out.pass = false;
            std::ostringstream os;
            os << "reduction defect at diag(" << a << "," << b << "," << c
               << ")";
            out.detail = os.str();
            return out;
          }
        } catch (const std::exception& e) {
          out.pass = false;
          std::ostringstream os;
          os << "throw at diag(" << a << "," << b << "," << c
             << "): " << e.what();
          out.detail = os.str();
          return out;
        }
      }
    }
  }
  std::ostringstream os;
  os << reductions << " reductions, " << double_moves << " double moves ("
     << deep_skips << " deep cases skipped), " << enlargements
     << " enlargements, " << elapsed_ms(t0) << " ms";
  out.detail = os.str();
  return out;
}

Outcome oracle_counts_are_stable() {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome out;
  int checked = 0, skipped = 0;
  for (const GramMatrix& s : corpus()) {
    if (!factorize(s.det()).square_free()) continue;
    const unsigned long n = static_cast<unsigned long>(s.rank());
    for (Int p : {2, 3, 5}) {
      const long r = stable_precision(s, p);
      if (pow_int(p, static_cast<unsigned long>(r + 1) * n * n) > kBudget) {
        ++skipped;
        continue;
      }
      const int jobs = s.rank() >= 3 ? 4 : 1;
      const Rat at_r = brute_force_density(s, p, r, kBudget, jobs).value;
      const Rat past = brute_force_density(s, p, r + 1, kBudget, jobs).value;
      ++checked;
      if (at_r != past) {
        out.pass = false;
        std::ostringstream os;
        os << "count moved at det " << s.det() << " p " << p << " r " << r
           << " -> " << r + 1;
        out.detail = os.str();
        return out;
      }
    }
  }
  std::ostringstream os;
  os << checked << " pairs stable, " << skipped << " over budget, "
     << elapsed_ms(t0) << " ms";
  out.detail = os.str();
  return out;
}

Outcome basis_change_invariance() {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome out;
  std::mt19937_64 rng(0x5eedac3eul);
  long transforms = 0;
  for (const GramMatrix& s : corpus()) {
    const GlobalInvariants base = invariants(s);
    std::vector<Int> plist = {2, 3, 5};
    for (const Int& p : primes_dividing(s.det()))
      if (p != 2 && p != 3 && p != 5) plist.push_back(p);
    std::vector<JordanDecomposition> base_jordan;
    std::vector<Rat> base_density;
    for (const Int& p : plist) {
      base_jordan.push_back(jordan_decompose(s, p));
      base_density.push_back(density(s, p).value);
    }
    const bool with_volume = s.rank() == 3 && is_indefinite(s) &&
                             factorize(s.det()).square_free();
    const Rat base_closed = with_volume ? closed_form_ternary(s).volume : Rat(0);
    const Rat base_mass = with_volume ? siegel_volume(s).volume : Rat(0);
    for (int t = 0; t < 200; ++t) {
      const GramMatrix moved = basis_change(s, random_unimodular(s.rank(), rng));
      ++transforms;
      const GlobalInvariants g = invariants(moved);
      bool ok = g.det == base.det && g.r == base.r && g.s == base.s &&
                g.is_even == base.is_even && g.hasse == base.hasse;
      for (size_t i = 0; ok && i < plist.size(); ++i)
        ok = jordan_decompose(moved, plist[i]) == base_jordan[i] &&
             density(moved, plist[i]).value == base_density[i];
      if (ok && with_volume)
        ok = closed_form_ternary(moved).volume == base_closed &&
             siegel_volume(moved).volume == base_mass;
      if (!ok) {
        out.pass = false;
        std::ostringstream os;
        os << "drift at det " << s.det() << " trial " << t;
        out.detail = os.str();
        return out;
      }
    }
  }
  std::ostringstream os;
  os << transforms << " transforms, all quantities preserved, "
     << elapsed_ms(t0) << " ms";
  out.detail = os.str();
  return out;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, Outcome (*)()>> criteria = {
      {"built-in examples reproduce polygon areas",
       examples_reproduce_polygon_areas},
      {"enumeration oracle agrees with closed-form densities",
       oracle_matches_closed_form},
      {"ternary closed form agrees with the mass product",
       closed_form_matches_mass_product},
      {"square-free reduction and overlattice moves",
       reduction_and_overlattice_properties},
      {"oracle counts stable past the working precision",
       oracle_counts_are_stable},
      {"basis-change invariance of all computed quantities",
       basis_change_invariance},
  };
  int failures = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("unexpected exception: ") + e.what();
    }
    if (!o.pass) ++failures;
    std::cout << "criterion " << i + 1 << ": " << (o.pass ? "PASS" : "FAIL")
              << " - " << criteria[i].first << " (" << o.detail << ")\n"
              << std::flush;
  }
  std::cout << "criteria passed: " << criteria.size() - failures << "/"
            << criteria.size() << "\n";
  return failures;
}
