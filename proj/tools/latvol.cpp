// Command line driver for the latvol library.
//
// Subcommands:
//   invariants       rank, determinant, signature, parity, Hasse symbols
//   jordan           p-adic Jordan splitting as a genus symbol
//   density          local density, closed form and optional enumeration check
//   reduce           chain of index-p^k overlattice moves to square-free det
//   volume           Hirzebruch-Mumford volume, closed form and/or mass route
//   verify-examples  built-in table of lattices with known polygon areas
//   sweep            CSV over diagonal ternary forms with square-free det
//
// Lattices come from --gram FILE (text or JSON, sniffed) or --diag a,b,c.
// Exit codes: 0 success, 1 computation mismatch, 2 bad input, 3 resource
// limit exceeded. Rationals print as "num/den" in lowest terms.

#include <latvol/catalog.hpp>
#include <latvol/density.hpp>
#include <latvol/io.hpp>
#include <latvol/volume.hpp>
#include <latvol/watson.hpp>

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <stdexcept>
#include <string>

namespace {

using latvol::format_rat;
using latvol::GramMatrix;
using latvol::Int;
using latvol::Rat;

constexpr int kOk = 0;
constexpr int kMismatch = 1;
constexpr int kBadInput = 2;
constexpr int kResourceLimit = 3;

struct InputChoice {
  std::string gram_path;
  std::string diag_csv;
};

void add_input_options(CLI::App* cmd, InputChoice& in) {
  auto* gram = cmd->add_option("--gram", in.gram_path,
                               "Gram matrix file, text or JSON");
  auto* diag = cmd->add_option("--diag", in.diag_csv,
                               "diagonal entries, e.g. 2,-1,-1");
  gram->excludes(diag);
  diag->excludes(gram);
}

// Factorization works by trial division, so unrestricted determinants could
// stall; anything past 10^12 is rejected as bad input.
GramMatrix load_lattice(const InputChoice& in) {
  if (in.gram_path.empty() == in.diag_csv.empty())
    throw std::invalid_argument("provide exactly one of --gram and --diag");
  GramMatrix s = in.gram_path.empty() ? latvol::parse_diag_list(in.diag_csv)
                                      : latvol::read_gram_file(in.gram_path);
  const Int limit("1000000000000");
  if (abs(s.det()) > limit)
    throw std::invalid_argument("determinant magnitude exceeds 10^12");
  return s;
}

int run_invariants(const InputChoice& in) {
  const GramMatrix s = load_lattice(in);
  const auto g = latvol::invariants(s);
  std::cout << "rank: " << s.rank() << "\n";
  std::cout << "det: " << g.det << "\n";
  std::cout << "signature: (" << g.r << "," << g.s << ")\n";
  std::cout << "parity: " << (g.is_even ? "even" : "odd") << "\n";
  std::cout << "invariant_factors:";
  for (const Int& f : latvol::smith_invariant_factors(s)) std::cout << " " << f;
  std::cout << "\n";
  for (const auto& [p, eps] : g.hasse)
    std::cout << "hasse_" << p << ": " << (eps > 0 ? "+1" : "-1") << "\n";
  return kOk;
}

int run_jordan(const InputChoice& in, long prime) {
  const GramMatrix s = load_lattice(in);
  const auto jd = latvol::jordan_decompose(s, Int(prime));
  std::cout << latvol::render_genus_symbol(jd) << "\n";
  return kOk;
}

int run_density(const InputChoice& in, long prime, long oracle_r,
                unsigned long budget, int jobs) {
  const GramMatrix s = load_lattice(in);
  const Int p(prime);
  const auto closed = latvol::density(s, p);
  std::cout << "symbol: " << latvol::render_genus_symbol(latvol::jordan_decompose(s, p))
            << "\n";
  std::cout << "alpha_closed: " << format_rat(closed.value) << "\n";
  if (oracle_r == 0) return kOk;
  const auto oracle =
      latvol::brute_force_density(s, p, oracle_r, Int(budget), jobs);
  std::cout << "alpha_oracle: " << format_rat(oracle.value)
            << " (precision r = " << oracle_r << ")\n";
  const bool match = oracle.value == closed.value;
  std::cout << "match: " << (match ? "yes" : "no") << "\n";
  return match ? kOk : kMismatch;
}

int run_reduce(const InputChoice& in) {
  const GramMatrix s = load_lattice(in);
  const auto [reduced, steps] = latvol::reduce_to_square_free(s);
  for (const auto& step : steps) std::cout << latvol::describe(step) << "\n";
  std::cout << "steps: " << steps.size() << "\n";
  latvol::write_gram_text(std::cout, reduced);
  return kOk;
}

void print_volume(const latvol::VolumeResult& res, const std::string& label) {
  for (const auto& pp : res.per_prime) {
    std::cout << "alpha_" << pp.p << ": " << format_rat(pp.alpha);
    if (pp.has_sign) std::cout << " (sign " << (pp.sign > 0 ? "+" : "-") << ")";
    std::cout << "\n";
  }
  if (!res.warning.empty()) std::cerr << "warning: " << res.warning << "\n";
  std::cout << label << ": " << format_rat(res.volume) << "\n";
}

int run_volume(const InputChoice& in, const std::string& method, long gsp) {
  const GramMatrix s = load_lattice(in);
  if (method != "siegel" && gsp != 1)
    throw std::invalid_argument("--gsp requires --method siegel");
  if (method == "closed" || method == "both") {
    const auto res = latvol::closed_form_ternary(s);
    print_volume(res, "volume_closed");
    if (method == "closed") return kOk;
    const auto mass = latvol::siegel_volume(s);
    std::cout << "volume_siegel: " << format_rat(mass.volume) << "\n";
    const bool match = mass.volume == res.volume;
    std::cout << "match: " << (match ? "yes" : "no") << "\n";
    return match ? kOk : kMismatch;
  }
  const auto res = latvol::siegel_volume(s, gsp);
  print_volume(res, "volume_siegel");
  return kOk;
}

int run_verify_examples() {
  const auto report = latvol::verify_examples();
  for (const auto& e : report.entries) {
    std::cout << (e.pass ? "PASS" : "FAIL") << " " << e.name << ": volume "
              << format_rat(e.volume) << ", polygon area " << format_rat(e.polygon);
    if (e.reduced) std::cout << " [reduced]";
    std::cout << "\n";
    if (!e.note.empty()) std::cout << "  note: " << e.note << "\n";
  }
  std::cout << report.passed() << "/" << report.total() << " examples pass\n";
  return report.all_pass() ? kOk : kMismatch;
}

int run_sweep(long bound, const std::string& out_path) {
  std::ofstream out(out_path);
  if (!out) throw std::invalid_argument("cannot open output file " + out_path);
  const long rows = latvol::sweep(bound, out);
  out.flush();
  if (!out) throw std::invalid_argument("write failed on " + out_path);
  std::cout << "rows: " << rows << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"local densities and Hirzebruch-Mumford volumes of integral "
               "quadratic lattices"};
  app.require_subcommand(1);
  int rc = kOk;

  InputChoice inv_in;
  auto* inv = app.add_subcommand("invariants", "global invariants of a lattice");
  add_input_options(inv, inv_in);
  inv->callback([&] { rc = run_invariants(inv_in); });

  InputChoice jor_in;
  long jor_p = 0;
  auto* jor = app.add_subcommand("jordan", "p-adic Jordan splitting");
  add_input_options(jor, jor_in);
  jor->add_option("--prime", jor_p, "prime p")->required();
  jor->callback([&] { rc = run_jordan(jor_in, jor_p); });

  InputChoice den_in;
  long den_p = 0;
  long den_r = 0;
  unsigned long den_budget = 1ul << 32;
  int den_jobs = 1;
  auto* den = app.add_subcommand("density", "local density at a prime");
  add_input_options(den, den_in);
  den->add_option("--prime", den_p, "prime p")->required();
  den->add_option("--oracle", den_r,
                  "also count solutions mod p^r and compare")
      ->check(CLI::PositiveNumber);
  den->add_option("--budget", den_budget,
                  "enumeration work cap for --oracle (default 2^32)");
  den->add_option("--jobs", den_jobs, "worker threads for --oracle")
      ->check(CLI::PositiveNumber);
  den->callback([&] { rc = run_density(den_in, den_p, den_r, den_budget, den_jobs); });

  InputChoice red_in;
  auto* red = app.add_subcommand(
      "reduce", "pass to a lattice with square-free determinant");
  add_input_options(red, red_in);
  red->callback([&] { rc = run_reduce(red_in); });

  InputChoice vol_in;
  std::string vol_method = "both";
  long vol_gsp = 1;
  auto* vol = app.add_subcommand("volume", "Hirzebruch-Mumford volume");
  add_input_options(vol, vol_in);
  vol->add_option("--method", vol_method, "closed, siegel, or both")
      ->check(CLI::IsMember({"closed", "siegel", "both"}));
  vol->add_option("--gsp", vol_gsp, "number of spinor genera (siegel route)")
      ->check(CLI::PositiveNumber);
  vol->callback([&] { rc = run_volume(vol_in, vol_method, vol_gsp); });

  auto* ver = app.add_subcommand("verify-examples",
                                 "check built-in lattices against polygon areas");
  ver->callback([&] { rc = run_verify_examples(); });

  long sw_bound = 0;
  std::string sw_out;
  auto* sw = app.add_subcommand("sweep",
                                "CSV over diagonal forms with square-free det");
  sw->add_option("--bound", sw_bound, "max |entry|, at most 200")->required();
  sw->add_option("--out", sw_out, "output CSV path")->required();
  sw->callback([&] { rc = run_sweep(sw_bound, sw_out); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kBadInput;
  } catch (const latvol::resource_limit_error& e) {
    std::cerr << "resource limit: " << e.what() << "\n";
    return kResourceLimit;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kBadInput;
  }
  return rc;
}
