#pragma once

// Helpers shared by the test suites: terse matrix literals and random
// unimodular basis changes.

#include <latvol/gram.hpp>

#include <initializer_list>
#include <random>

namespace latvol_test {

using latvol::GramMatrix;
using latvol::Int;
using latvol::Mat;

inline Mat mat(std::initializer_list<std::initializer_list<long>> rows) {
  Mat m;
  for (const auto& r : rows) {
    std::vector<Int> row;
    for (long v : r) row.emplace_back(v);
    m.push_back(std::move(row));
  }
  return m;
}

inline GramMatrix gram(std::initializer_list<std::initializer_list<long>> rows) {
  return GramMatrix(mat(rows));
}

inline GramMatrix diag(std::initializer_list<long> d) {
  std::vector<Int> v;
  for (long x : d) v.emplace_back(x);
  return GramMatrix::diagonal(v);
}

// Product of random elementary operations applied to the identity: shears
// with coefficients in [-2, 2], row swaps, row negations. det = +/-1.
inline Mat random_unimodular(int n, std::mt19937_64& rng, int steps = 12) {
  Mat p(n, std::vector<Int>(n, 0));
  for (int i = 0; i < n; ++i) p[i][i] = 1;
  std::uniform_int_distribution<int> idx(0, n - 1);
  std::uniform_int_distribution<int> kind(0, 3);
  std::uniform_int_distribution<int> coef(-2, 2);
  for (int s = 0; s < steps; ++s) {
    int i = idx(rng), j = idx(rng);
    switch (kind(rng)) {
      case 0:
      case 1: {
        if (i == j) break;
        int t = coef(rng);
        if (t == 0) t = 1;
        for (int c = 0; c < n; ++c) p[i][c] += t * p[j][c];
        break;
      }
      case 2:
        std::swap(p[i], p[j]);
        break;
      case 3:
        for (int c = 0; c < n; ++c) p[i][c] = -p[i][c];
        break;
    }
  }
  return p;
}

}  // namespace latvol_test
