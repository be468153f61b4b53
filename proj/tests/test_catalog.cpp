#include <catch2/catch_amalgamated.hpp>

#include <latvol/catalog.hpp>

#include <sstream>
#include <vector>

#include "test_util.hpp"

namespace {

using namespace latvol;

// Re-evaluates the closed form with every chosen sign inverted; feeding this
// into the verifier must break the examples whose signs matter.
Rat flipped_sign_volume(const GramMatrix& s) {
  GramMatrix cur = s;
  if (!factorize(cur.det()).square_free())
    cur = reduce_to_square_free(cur).first;
  const VolumeResult v = closed_form_ternary(cur);
  Rat out = v.volume;
  for (const VolumePrime& pp : v.per_prime)
    if (pp.has_sign)
      out *= Rat(pp.p - pp.sign) / Rat(pp.p + pp.sign);
  return out;
}

}  // namespace

TEST_CASE("polygon areas over 4 pi") {
  using V = std::vector<Rat>;
  CHECK(polygon_area_over_4pi(V{Rat(0), make_rat(1, 3), make_rat(1, 2)}) ==
        make_rat(1, 24));
  CHECK(polygon_area_over_4pi(V{make_rat(1, 2), make_rat(1, 2),
                                make_rat(1, 2), make_rat(1, 4)}) ==
        make_rat(1, 16));
  CHECK(polygon_area_over_4pi(V{make_rat(1, 2), make_rat(1, 2),
                                make_rat(1, 3), make_rat(1, 4)}) ==
        make_rat(5, 48));
  CHECK_THROWS_AS(polygon_area_over_4pi(V{Rat(0), make_rat(1, 2)}),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      polygon_area_over_4pi(V{make_rat(1, 2), make_rat(1, 2), make_rat(1, 2)}),
      std::invalid_argument);
  CHECK_THROWS_AS(polygon_area_over_4pi(V{Rat(1), Rat(0), Rat(0)}),
                  std::invalid_argument);
  CHECK_THROWS_AS(polygon_area_over_4pi(V{-make_rat(1, 4), Rat(0), Rat(0)}),
                  std::invalid_argument);
}

TEST_CASE("built-in examples are internally consistent") {
  const auto examples = builtin_examples();
  REQUIRE(examples.size() == 7);
  for (const ExampleRecord& ex : examples)
    CHECK(polygon_area_over_4pi(ex.polygon_angles) == ex.expected_volume);
}

TEST_CASE("the verifier reproduces every example") {
  const VerifyReport report = verify_examples();
  REQUIRE(report.total() == 7);
  CHECK(report.passed() == 7);
  CHECK(report.all_pass());
  const std::vector<Rat> expected = {
      make_rat(1, 24), make_rat(1, 12), make_rat(1, 16), make_rat(1, 16),
      make_rat(5, 48), make_rat(1, 12), make_rat(1, 24)};
  for (int i = 0; i < 7; ++i) {
    CHECK(report.entries[i].volume == expected[i]);
    CHECK(report.entries[i].pass);
  }
  // Only the <4>+U entry routes through the reduction.
  for (int i = 0; i < 7; ++i) {
    CHECK(report.entries[i].reduced == (i == 2));
    CHECK(report.entries[i].note.empty() == (i != 2));
  }
  CHECK(report.entries[2].note.find("determinant -1") != std::string::npos);
}

TEST_CASE("the verifier reports sign-rule mutations") {
  const VerifyReport report =
      verify_examples(builtin_examples(), flipped_sign_volume);
  CHECK_FALSE(report.all_pass());
  for (const ExampleOutcome& e : report.entries)
    if (e.name == "11x^2-y^2-z^2") CHECK_FALSE(e.pass);
}

TEST_CASE("the verifier accepts an empty example set") {
  const VerifyReport report = verify_examples({});
  CHECK(report.total() == 0);
  CHECK(report.passed() == 0);
  CHECK(report.all_pass());
}

TEST_CASE("sweep emits one stable row per genus") {
  std::ostringstream empty_out;
  CHECK(sweep(0, empty_out) == 0);
  CHECK(empty_out.str() ==
        "gram;det;parity;omega;signs;volume_closed;volume_siegel;equal\n");

  std::ostringstream one;
  const long rows1 = sweep(1, one);
  CHECK(rows1 > 0);
  const std::string table1 = one.str();
  CHECK(table1.find("-1|-1|1;1;odd;0;2:+;1/16;1/16;true\n") !=
        std::string::npos);
  CHECK(table1.find(";-1;odd;0;2:+;1/16;1/16;true\n") != std::string::npos);

  std::ostringstream six_a, six_b;
  const long rows6 = sweep(6, six_a);
  CHECK(sweep(6, six_b) == rows6);
  CHECK(six_a.str() == six_b.str());
  long lines = 0, equal_true = 0;
  std::istringstream in(six_a.str());
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    ++lines;
    if (line.size() >= 5 && line.substr(line.size() - 5) == ";true")
      ++equal_true;
  }
  CHECK(lines == rows6);
  CHECK(equal_true == rows6);

  CHECK_THROWS_AS(sweep(201, empty_out), std::invalid_argument);
  CHECK_THROWS_AS(sweep(-1, empty_out), std::invalid_argument);
}
