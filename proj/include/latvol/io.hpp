#pragma once

// Reading and writing Gram matrices and rational values.
//
// Matrix text format: first line is the rank n, followed by n lines of n
// integers. JSON form: {"gram": [[...], ...]}. Rationals render as "num/den"
// in lowest terms, including "x/1" for integers.

#include <latvol/gram.hpp>

#include <json.hpp>

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace latvol {

inline std::string format_rat(const Rat& q) {
  std::ostringstream os;
  os << q.get_num() << "/" << q.get_den();
  return os.str();
}

inline GramMatrix read_gram_text(std::istream& in) {
  long n = 0;
  if (!(in >> n) || n <= 0)
    throw std::invalid_argument("matrix text must start with a positive rank");
  Mat m(n, std::vector<Int>(n));
  for (long i = 0; i < n; ++i)
    for (long j = 0; j < n; ++j) {
      std::string tok;
      if (!(in >> tok))
        throw std::invalid_argument("matrix text ended early");
      try {
        m[i][j] = Int(tok);
      } catch (const std::invalid_argument&) {
        throw std::invalid_argument("bad integer in matrix text: " + tok);
      }
    }
  return GramMatrix(std::move(m));
}

inline GramMatrix read_gram_json(const std::string& text) {
  const auto doc = nlohmann::json::parse(text);
  if (!doc.is_object() || !doc.contains("gram") || !doc["gram"].is_array())
    throw std::invalid_argument("JSON input must be {\"gram\": [[...], ...]}");
  Mat m;
  for (const auto& row : doc["gram"]) {
    if (!row.is_array())
      throw std::invalid_argument("JSON gram rows must be arrays");
    std::vector<Int> r;
    for (const auto& v : row) {
      if (!v.is_number_integer())
        throw std::invalid_argument("JSON gram entries must be integers");
      r.emplace_back(static_cast<long>(v.get<long long>()));
    }
    m.push_back(std::move(r));
  }
  return GramMatrix(std::move(m));
}

// Sniffs the first non-space character: '{' selects JSON, anything else the
// text format.
inline GramMatrix read_gram_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  const auto pos = text.find_first_not_of(" \t\r\n");
  if (pos == std::string::npos)
    throw std::invalid_argument("empty matrix file " + path);
  if (text[pos] == '{') return read_gram_json(text);
  std::istringstream is(text);
  return read_gram_text(is);
}

// "a,b,c" -> diag(a,b,c).
inline GramMatrix parse_diag_list(const std::string& csv) {
  std::vector<Int> d;
  std::string tok;
  std::istringstream is(csv);
  while (std::getline(is, tok, ',')) {
    try {
      d.emplace_back(tok);
    } catch (const std::invalid_argument&) {
      throw std::invalid_argument("bad integer in diagonal list: " + tok);
    }
  }
  if (d.empty()) throw std::invalid_argument("empty diagonal list");
  return GramMatrix::diagonal(d);
}

inline void write_gram_text(std::ostream& out, const GramMatrix& s) {
  out << s.rank() << "\n";
  for (int i = 0; i < s.rank(); ++i) {
    for (int j = 0; j < s.rank(); ++j)
      out << (j ? " " : "") << s.at(i, j);
    out << "\n";
  }
}

}  // namespace latvol
