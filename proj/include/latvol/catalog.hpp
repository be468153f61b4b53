#pragma once

// Built-in worked examples with their fundamental-domain polygons, the
// verification harness comparing volumes against Gauss-Bonnet areas, and the
// sweep table generator over small diagonal forms.

#include <latvol/io.hpp>
#include <latvol/volume.hpp>
#include <latvol/watson.hpp>

#include <functional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace latvol {

struct ExampleRecord {
  std::string name;
  GramMatrix gram;
  std::vector<Rat> polygon_angles;  // coefficients of pi, 0 for a cusp
  Rat expected_volume;
};

// Hyperbolic k-gon area divided by 4 pi: ((k-2) - sum of coefficients)/4.
inline Rat polygon_area_over_4pi(const std::vector<Rat>& angles) {
  if (angles.size() < 3)
    throw std::invalid_argument("a polygon needs at least three angles");
  Rat sum(0);
  for (const Rat& a : angles) {
    if (a < 0 || a >= 1)
      throw std::invalid_argument("angles must lie in [0, pi)");
    sum += a;
  }
  const Rat area = Rat(static_cast<long>(angles.size()) - 2) - sum;
  if (area <= 0) throw std::invalid_argument("polygon area is not positive");
  return area / 4;
}

inline std::vector<ExampleRecord> builtin_examples() {
  const auto r = [](long num, long den) { return make_rat(num, den); };
  std::vector<ExampleRecord> out;
  out.push_back({"<2>+U", direct_sum(GramMatrix::diagonal({2}),
                                     hyperbolic_plane()),
                 {Rat(0), r(1, 3), r(1, 2)}, r(1, 24)});
  out.push_back({"<6>+U", direct_sum(GramMatrix::diagonal({6}),
                                     hyperbolic_plane()),
                 {Rat(0), r(1, 6), r(1, 2)}, r(1, 12)});
  out.push_back({"<4>+U", direct_sum(GramMatrix::diagonal({4}),
                                     hyperbolic_plane()),
                 {Rat(0), r(1, 4), r(1, 2)}, r(1, 16)});
  out.push_back({"6x^2-y^2-z^2", GramMatrix::diagonal({6, -1, -1}),
                 {r(1, 2), r(1, 2), r(1, 2), r(1, 4)}, r(1, 16)});
  out.push_back({"11x^2-y^2-z^2", GramMatrix::diagonal({11, -1, -1}),
                 {r(1, 2), r(1, 2), r(1, 3), r(1, 4)}, r(5, 48)});
  out.push_back({"3x^2-5y^2-z^2", GramMatrix::diagonal({3, -5, -1}),
                 {r(1, 2), r(1, 2), r(1, 2), r(1, 6)}, r(1, 12)});
  out.push_back({"even det -2",
                 GramMatrix(Mat{{2, -2, 0}, {-2, 2, -1}, {0, -1, 2}}),
                 {r(1, 2), r(1, 3), Rat(0)}, r(1, 24)});
  return out;
}

using VolumeFunction = std::function<Rat(const GramMatrix&)>;

// Standard pipeline: reduce away square factors first, then the closed form.
inline Rat example_volume(const GramMatrix& s) {
  GramMatrix cur = s;
  if (!factorize(cur.det()).square_free())
    cur = reduce_to_square_free(cur).first;
  return closed_form_ternary(cur).volume;
}

struct ExampleOutcome {
  std::string name;
  Rat polygon;
  Rat volume;
  bool reduced = false;
  bool pass = false;
  std::string note;
};

struct VerifyReport {
  std::vector<ExampleOutcome> entries;

  int total() const { return static_cast<int>(entries.size()); }
  int passed() const {
    int n = 0;
    for (const auto& e : entries) n += e.pass ? 1 : 0;
    return n;
  }
  bool all_pass() const { return passed() == total(); }
};

inline VerifyReport verify_examples(
    const std::vector<ExampleRecord>& examples,
    const VolumeFunction& volume_fn = example_volume) {
  VerifyReport report;
  for (const ExampleRecord& ex : examples) {
    ExampleOutcome o;
    o.name = ex.name;
    o.polygon = polygon_area_over_4pi(ex.polygon_angles);
    o.volume = volume_fn(ex.gram);
    o.reduced = !factorize(ex.gram.det()).square_free();
    if (o.reduced) {
      const GramMatrix r = reduce_to_square_free(ex.gram).first;
      std::ostringstream os;
      os << "reduced to determinant " << r.det()
         << "; a square-free determinant leaves one class in the genus";
      o.note = os.str();
    }
    o.pass = o.volume == o.polygon && o.polygon == ex.expected_volume;
    report.entries.push_back(std::move(o));
  }
  return report;
}

inline VerifyReport verify_examples() {
  return verify_examples(builtin_examples());
}

// Emits one row per genus over diagonal indefinite ternary forms with
// square-free determinant and entries in [-bound, bound]; returns the row
// count. Enumeration order and formatting are fixed, so output is
// byte-stable.
inline long sweep(long bound, std::ostream& out) {
  if (bound < 0 || bound > 200)
    throw std::invalid_argument("sweep bound must be between 0 and 200");
  out << "gram;det;parity;omega;signs;volume_closed;volume_siegel;equal\n";
  std::set<std::string> seen;
  long rows = 0;
  const auto entries = [&](long bnd) {
    std::vector<long> v;
    for (long x = -bnd; x <= bnd; ++x)
      if (x != 0) v.push_back(x);
    return v;
  }(bound);
  for (long a : entries)
    for (long b : entries)
      for (long c : entries) {
        const bool pos = a > 0 || b > 0 || c > 0;
        const bool neg = a < 0 || b < 0 || c < 0;
        if (!pos || !neg) continue;
        if (!factorize(Int(a) * b * c).square_free()) continue;
        const GramMatrix s = GramMatrix::diagonal({a, b, c});
        const VolumeResult closed = closed_form_ternary(s);
        const VolumeResult siegel = siegel_volume(s);
        const GlobalInvariants g = invariants(s);
        std::ostringstream signs;
        bool first = true;
        for (const VolumePrime& pp : closed.per_prime) {
          if (!pp.has_sign) continue;
          signs << (first ? "" : "|") << pp.p << ":"
                << (pp.sign > 0 ? "+" : "-");
          first = false;
        }
        std::ostringstream key;
        key << g.det << ";" << (g.is_even ? "even" : "odd") << ";"
            << g.hasse.at(2) << ";" << signs.str();
        if (!seen.insert(key.str()).second) continue;
        out << a << "|" << b << "|" << c << ";" << g.det << ";"
            << (g.is_even ? "even" : "odd") << ";"
            << factorize(g.det).omega() << ";" << signs.str() << ";"
            << format_rat(closed.volume) << ";" << format_rat(siegel.volume)
            << ";" << (closed.volume == siegel.volume ? "true" : "false")
            << "\n";
        ++rows;
      }
  if (!out) throw std::runtime_error("failed to write the sweep table");
  return rows;
}

}  // namespace latvol
