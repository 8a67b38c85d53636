// End-to-end acceptance suite. Each criterion prints exactly one PASS/FAIL
// line; the exit code is the number of failed criteria. Run a single
// criterion with --criterion <k>.

#include <chrono>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "hubofact/cli.hpp"
#include "hubofact/model.hpp"
#include "hubofact/model_io.hpp"
#include "hubofact/quadratize.hpp"
#include "hubofact/search.hpp"
#include "hubofact/solvers.hpp"

namespace {

using namespace hubofact;
using Clock = std::chrono::steady_clock;

struct CheckFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require(bool condition, const std::string& message) {
  if (!condition) throw CheckFailure(message);
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) return false;
  }
  return true;
}

std::vector<std::uint64_t> odd_primes_below(std::uint64_t cap) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t p = 3; p < cap; ++p) {
    if (is_prime(p)) out.push_back(p);
  }
  return out;
}

struct CliCapture {
  int exit_code;
  std::string out;
  std::string err;
};

CliCapture run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::cli_run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string cli_field(const std::string& text, const std::string& key) {
  const std::string needle = key + " = ";
  const auto pos = text.find(needle);
  if (pos == std::string::npos) return {};
  const auto end = text.find('\n', pos);
  return text.substr(pos + needle.size(), end - pos - needle.size());
}

// ---------------------------------------------------------------------------
// 1. Small-semiprime sweep: every N = p*q <= 10,000 with odd primes
//    3 <= p <= q. The 14-variable budget restricts factors to 7 bits, so
//    q <= 127; bits per factor is the bit length of q.
std::string criterion_1() {
  const auto start = Clock::now();
  const auto primes = odd_primes_below(128);
  std::uint64_t instances = 0;
  for (std::size_t a = 0; a < primes.size(); ++a) {
    for (std::size_t b = a; b < primes.size(); ++b) {
      const std::uint64_t p = primes[a], q = primes[b];
      const std::uint64_t n = p * q;
      if (n > 10000) continue;
      ++instances;
      const std::uint32_t bits = bit_length(BigInt(q));
      require(2 * bits <= 14, "variable budget exceeded");
      const CliCapture r = run_cli({"factor", "--n", std::to_string(n), "--bits",
                                    std::to_string(bits), "--method", "exact"});
      require(r.exit_code == 0, "exit code " + std::to_string(r.exit_code) + " for N=" +
                                    std::to_string(n));
      require(cli_field(r.out, "p") == std::to_string(p) &&
                  cli_field(r.out, "q") == std::to_string(q),
              "wrong factors for N=" + std::to_string(n) + ": got p=" +
                  cli_field(r.out, "p") + " q=" + cli_field(r.out, "q"));
      const BigInt expected_min = -BigInt(n) * n;
      require(cli_field(r.out, "energy_shifted") == to_decimal(expected_min),
              "shifted minimum != -N^2 for N=" + std::to_string(n));
    }
  }
  const double elapsed = seconds_since(start);
  require(instances >= 400, "sweep unexpectedly small");
  require(elapsed < 120.0, "sweep exceeded 2 minutes");
  std::ostringstream summary;
  summary << instances << " semiprimes, exhaustive minimum -N^2 each, "
          << static_cast<int>(elapsed) << "s";
  return summary.str();
}

// ---------------------------------------------------------------------------
// 2. Headline factorization A: 102,454,763 = 10,111 * 10,133.
//    (a) spiral range search, n=6, stride 64, deterministic and exact;
//    (b) simulated annealing on the 26-free-qubit fixed-LSB model, >= 1
//        success in 20 seeded runs with the default schedule.
std::string criterion_2() {
  const BigInt n(102454763);

  const auto start_a = Clock::now();
  const BlockPlan plan = spiral_block_plan(n, 6, 64);
  const SolveReport range = range_search(n, plan);
  const double elapsed_a = seconds_since(start_a);
  require(range.found, "spiral range search found nothing");
  require(range.p == 10111 && range.q == 10133, "wrong factors from range search");
  require(range.hit_block == BlockCoord{157, 158}, "unexpected hit block");
  require(elapsed_a < 30.0, "range search exceeded 30 seconds");

  const FactorModel model = build_plain_hubo(n, {.bits_per_factor = 14, .fix_lsb = true});
  require(model.total_vars == 26, "fixed-LSB layout should use 26 qubits");
  std::uint64_t successes = 0;
  const std::uint64_t runs = 20;
  for (std::uint64_t seed = 1; seed <= runs; ++seed) {
    AnnealSchedule schedule;  // the default schedule, restart-parallel only
    schedule.seed = seed;
    schedule.threads = 2;
    const auto samples = sample_sa(model.poly, schedule, model.energy_shift);
    if (samples.front().energy_full == 0) {
      const auto [p, q] = model.decode(samples.front().bits);
      if (p * q == n) ++successes;
    }
  }
  require(successes >= 1, "annealing never found the factors in 20 seeded runs");

  std::ostringstream summary;
  summary << "range hit (157,158) in " << range.blocks_examined << " blocks; annealing "
          << successes << "/" << runs << " seeded runs succeeded";
  return summary.str();
}

// ---------------------------------------------------------------------------
// 3. Headline factorization B: 1,000,070,001,221 = 1,000,033 * 1,000,037 with
//    n=6 and offsets 10^6; hit-block shifted minimum -4,900,170,941,490,841.
std::string criterion_3() {
  const BigInt n("1000070001221");
  const BigInt offset(1000000);

  // the single-block solve: 4096 assignments, under a second
  const auto start_block = Clock::now();
  const FactorModel block = build_range_hubo(
      n, {.bits_per_factor = 6, .p_offset = offset, .q_offset = offset});
  const ExactResult solved =
      enumerate_exact(block.poly, {.energy_shift = block.energy_shift});
  const double block_seconds = seconds_since(start_block);
  require(solved.visited == 4096, "block should have 4096 assignments");
  require(block_seconds < 1.0, "block solve exceeded 1 second");
  require(solved.min_energy_full == 0, "block minimum is not 0");
  const BigInt expected_target("-4900170941490841");
  require(solved.samples.front().energy_shifted == expected_target,
          "shifted minimum mismatch");
  const BigInt residual = n - offset * offset;
  require(expected_target == -residual * residual,
          "cross-check -(N - Si*Sj)^2 failed");
  auto [p, q] = block.decode(solved.samples.front().bits);
  if (p > q) std::swap(p, q);
  require(p == 1000033 && q == 1000037, "wrong factors in the hit block");

  // the pruned plan reaches that block
  const auto start_plan = Clock::now();
  const BlockPlan plan = default_block_plan(n, 6, offset);
  const SolveReport report = range_search(n, plan);
  const double plan_seconds = seconds_since(start_plan);
  require(report.found && report.p == 1000033 && report.q == 1000037,
          "range search failed");
  require(report.hit_block == BlockCoord{1, 1}, "expected hit at block (1,1)");
  require(report.energy_shifted == expected_target, "hit energy mismatch");
  require(plan_seconds < 300.0, "plan took longer than 5 minutes");

  std::ostringstream summary;
  summary << "block (1,1) energy " << to_decimal(report.energy_shifted) << ", plan of "
          << plan.blocks.size() << " blocks hit in " << report.blocks_examined
          << " solve(s)";
  return summary.str();
}

// ---------------------------------------------------------------------------
// 4. Gadget soundness: exhaustive tables for both cubic cases and the
//    quartic gadget, then min(QUBO) == min(HUBO) for every semiprime
//    N <= 100 at every width n <= 3, exhaustively over all variables
//    (flat enumeration where the ancilla count allows it, independent
//    per-gadget minimization over every original assignment always).
std::string criterion_4() {
  // cubic, 8 x 2 per sign
  for (const std::int64_t c : {-3, 5}) {
    const auto [terms, record] = reduce_cubic(std::vector<VarId>{0, 1, 2}, BigInt(c), 3);
    for (std::uint64_t v = 0; v < 8; ++v) {
      Assignment a{static_cast<std::uint8_t>(v & 1), static_cast<std::uint8_t>((v >> 1) & 1),
                   static_cast<std::uint8_t>((v >> 2) & 1), 0};
      BigInt best;
      for (int w = 0; w < 2; ++w) {
        a[3] = static_cast<std::uint8_t>(w);
        const BigInt e = terms.evaluate(a);
        if (w == 0 || e < best) best = e;
      }
      require(best == BigInt(c) * a[0] * a[1] * a[2] - record.constant_shift,
              "cubic gadget table failed");
    }
  }
  // quartic, 16 x 128
  {
    const auto [terms, record] =
        reduce_quartic(std::vector<VarId>{0, 1, 2, 3}, BigInt(4), 4);
    for (std::uint64_t v = 0; v < 16; ++v) {
      Assignment a(11, 0);
      for (int b = 0; b < 4; ++b) a[b] = (v >> b) & 1u;
      BigInt best;
      for (std::uint64_t w = 0; w < 128; ++w) {
        for (int b = 0; b < 7; ++b) a[4 + b] = (w >> b) & 1u;
        const BigInt e = terms.evaluate(a);
        if (w == 0 || e < best) best = e;
      }
      require(best == BigInt(4) * a[0] * a[1] * a[2] * a[3] - record.constant_shift,
              "quartic gadget table failed");
    }
  }

  // full-model equivalence over every semiprime and width
  const auto primes = odd_primes_below(50);
  std::uint64_t models = 0;
  for (std::size_t i = 0; i < primes.size(); ++i) {
    for (std::size_t j = i; j < primes.size(); ++j) {
      const std::uint64_t n = primes[i] * primes[j];
      if (n > 100) continue;
      for (std::uint32_t bits = 1; bits <= 3; ++bits) {
        ++models;
        const FactorModel hubo = build_plain_hubo(n, {.bits_per_factor = bits});
        const QuadratizedModel reduced = quadratize_model(hubo);
        const ExactResult hubo_min = enumerate_exact(hubo.poly, {.max_samples = 1});
        // exact minimum over all variables via independent per-gadget search
        const VerifyReport equivalence =
            verify_reduction(hubo, reduced.model, reduced.ledger);
        require(equivalence.passed && equivalence.exhaustive,
                "reduction equivalence failed for N=" + std::to_string(n));
        if (reduced.model.total_vars <= 16) {
          const ExactResult flat = enumerate_exact(reduced.model.poly, {.max_samples = 1});
          require(flat.min_energy_full ==
                      hubo_min.min_energy_full - reduced.ledger.total_shift,
                  "flat QUBO minimum mismatch for N=" + std::to_string(n));
        }
      }
    }
  }
  std::ostringstream summary;
  summary << "cubic 8x2 both signs, quartic 16x128, " << models
          << " reduced models exactly equivalent";
  return summary.str();
}

// ---------------------------------------------------------------------------
// 5. Ancilla counts: 7 n^2 (n-1)^2 / 4 quartic ancillas for n in {2,3,4,5},
//    and exactly 11 total ancillas for the N=15 fixed-LSB model.
std::string criterion_5() {
  for (std::uint32_t n = 2; n <= 5; ++n) {
    const QuadratizedModel reduced =
        quadratize_model(build_plain_hubo(77, {.bits_per_factor = n}));
    const std::uint64_t quartic_ancillas = 7 * reduced.ledger.quartic_count();
    require(quartic_ancillas == 7ull * n * n * (n - 1) * (n - 1) / 4,
            "quartic ancilla formula failed at n=" + std::to_string(n));
  }
  const QuadratizedModel fixed =
      quadratize_model(build_plain_hubo(15, {.bits_per_factor = 3, .fix_lsb = true}));
  require(fixed.model.ancilla_count() == 11, "N=15 fixed-LSB ancilla count != 11");
  return "7n^2(n-1)^2/4 for n=2..5; 11 ancillas for N=15 fixed-LSB";
}

// ---------------------------------------------------------------------------
// 6. Reduced-model target for N=15 fixed-LSB. Hard requirement: the reduced
//    minimum equals the HUBO minimum plus the recorded shift and decodes to
//    (3,5). The previously reported -2756 is not reproducible under exact
//    accounting (every gadget constant is even, so the reduced target keeps
//    -225's parity); the discrepancy is documented in README.md, which this
//    criterion checks.
std::string criterion_6() {
  const FactorModel hubo = build_plain_hubo(15, {.bits_per_factor = 3, .fix_lsb = true});
  const QuadratizedModel reduced = quadratize_model(hubo);
  const ExactResult full =
      enumerate_exact(reduced.model.poly, {.energy_shift = reduced.model.energy_shift});
  const ExactResult original = enumerate_exact(hubo.poly);
  require(full.min_energy_full == original.min_energy_full - reduced.ledger.total_shift,
          "reduced minimum != HUBO minimum - recorded shift");
  const auto [p, q] = reduced.model.decode(full.samples.front().bits);
  require((p == 3 && q == 5) || (p == 5 && q == 3), "minimizer does not decode to (3,5)");
  const BigInt shifted_min = full.samples.front().energy_shifted;
  require(shifted_min == reduced.ledger.reduced_target, "ledger target mismatch");

  const bool matches_reported = shifted_min == -2756;
  std::ostringstream summary;
  if (matches_reported) {
    summary << "reduced shifted minimum -2756 reproduced";
  } else {
    // The mismatch must be documented in the repository.
    std::ifstream readme(std::string(HUBOFACT_SOURCE_DIR) + "/README.md");
    require(static_cast<bool>(readme), "README.md not found for documentation check");
    std::stringstream buffer;
    buffer << readme.rdbuf();
    const std::string text = buffer.str();
    require(text.find("-2756") != std::string::npos &&
                text.find(to_decimal(shifted_min)) != std::string::npos,
            "discrepancy against -2756 is not documented in README.md");
    summary << "shifted minimum " << to_decimal(shifted_min)
            << " (ledger-exact); -2756 not reproducible (wrong parity), documented";
  }
  return summary.str();
}

// ---------------------------------------------------------------------------
// 7. Bit refinement. (a) the N=15 walkthrough: stages (4,4), (0,0), (-1,1)
//    and result (3,5). (b) as specified, 50 random semiprimes with factors
//    below 2^6 and unique stage minima must each refine to a correct pair.
//    Part (b) is run faithfully over the whole population (a superset of any
//    random draw) and fails: only a handful of such semiprimes have unique
//    stage minima at all, and greedy refinement parks next to N on some of
//    them (65 = 5*13 ends at 8*8). The failure is reported honestly.
std::string criterion_7() {
  const SolveReport walkthrough = decompose_solve(15, 3);
  require(walkthrough.found && walkthrough.p == 3 && walkthrough.q == 5,
          "N=15 refinement result wrong");
  require(walkthrough.stage_trace.size() == 3, "N=15 trace length wrong");
  require(walkthrough.stage_trace[0].p_step == 4 && walkthrough.stage_trace[0].q_step == 4,
          "stage 1 should fix (4,4)");
  require(walkthrough.stage_trace[1].p_step == 0 && walkthrough.stage_trace[1].q_step == 0,
          "stage 2 should fix (0,0)");
  require(walkthrough.stage_trace[2].p_step == -1 && walkthrough.stage_trace[2].q_step == 1,
          "stage 3 should fix (-1,1)");

  const auto primes = odd_primes_below(64);
  std::uint64_t unique_cases = 0, unique_correct = 0, total = 0, total_correct = 0;
  std::string first_counterexample;
  for (std::size_t i = 0; i < primes.size(); ++i) {
    for (std::size_t j = i; j < primes.size(); ++j) {
      const std::uint64_t n = primes[i] * primes[j];
      const std::uint32_t bits = bit_length(BigInt(primes[j]));
      ++total;
      DecompositionOptions options;
      options.branch_budget = 64;
      const SolveReport r = decompose_solve(n, bits, options);
      const bool correct = r.found && r.p * r.q == n;
      total_correct += correct;
      if (!r.stage_ties) {
        ++unique_cases;
        unique_correct += correct;
        if (!correct && first_counterexample.empty()) {
          first_counterexample = std::to_string(n) + " -> (" + to_decimal(r.p) + "," +
                                 to_decimal(r.q) + ")";
        }
      }
    }
  }
  std::ostringstream detail;
  detail << "walkthrough ok; population " << total << " semiprimes (" << total_correct
         << " refined correctly); unique-minima cases " << unique_correct << "/"
         << unique_cases;
  if (!first_counterexample.empty()) detail << ", counterexample " << first_counterexample;
  require(unique_cases >= 50,
          "cannot sample 50 unique-minima semiprimes, only " +
              std::to_string(unique_cases) + " exist below 2^6 [" + detail.str() + "]");
  require(unique_correct == unique_cases,
          "unique-minima refinement returned a wrong pair [" + detail.str() + "]");
  return detail.str();
}

// ---------------------------------------------------------------------------
// 8. Determinism and parallel equivalence.
std::string criterion_8() {
  // byte-identical reruns across methods, text and JSON
  const std::vector<std::vector<std::string>> invocations = {
      {"factor", "--n", "15", "--bits", "3", "--method", "exact"},
      {"factor", "--n", "143", "--bits", "4", "--method", "sa", "--seed", "3",
       "--sweeps", "300", "--restarts", "8"},
      {"factor", "--n", "899", "--bits", "3", "--method", "range", "--stride", "8",
       "--json"},
      {"factor", "--n", "35", "--bits", "3", "--method", "decomp"},
      {"histogram", "--n", "15", "--bits", "3", "--method", "exact"},
  };
  for (const auto& argv : invocations) {
    const CliCapture a = run_cli(argv);
    const CliCapture b = run_cli(argv);
    require(a.out == b.out && a.err == b.err && a.exit_code == b.exit_code,
            "rerun of '" + argv[0] + "' differed");
  }

  // worker-count equivalence on both headline searches
  {
    const BigInt n(102454763);
    const BlockPlan plan = spiral_block_plan(n, 6, 64);
    RangeSearchOptions options;
    const SolveReport one = range_search(n, plan, options);
    options.workers = 4;
    const SolveReport four = range_search(n, plan, options);
    require(one.found && four.found && one.p == four.p && one.q == four.q &&
                one.hit_block == four.hit_block &&
                one.blocks_examined == four.blocks_examined,
            "spiral search differed between 1 and 4 workers");
  }
  {
    const BigInt n("1000070001221");
    const BlockPlan plan = default_block_plan(n, 6, BigInt(1000000));
    RangeSearchOptions options;
    const SolveReport one = range_search(n, plan, options);
    options.workers = 4;
    const SolveReport four = range_search(n, plan, options);
    require(one.found && four.found && one.p == four.p && one.q == four.q &&
                one.hit_block == four.hit_block,
            "range search differed between 1 and 4 workers");
  }
  return "byte-identical reruns (5 invocations); 1 vs 4 workers agree on both headlines";
}

// ---------------------------------------------------------------------------
// 9. Precision guard near the reported failure region: N about 5% above
//    criterion 3's headline, planted factors, exact arithmetic end to end
//    through build, save, load and solve. N^2 here is ~1.1e24, far beyond
//    64-bit.
std::string criterion_9() {
  const BigInt p_planted("1024523");
  const BigInt q_planted("1024547");
  const BigInt n = p_planted * q_planted;
  require(to_decimal(n) == "1049671966081", "planted product changed");

  const BigInt offset = (p_planted / 64) * 64;  // 1,024,512; both residuals < 64
  const FactorModel model = build_range_hubo(
      n, {.bits_per_factor = 6, .p_offset = offset, .q_offset = offset});
  const BigInt residual = n - offset * offset;
  require(model.energy_shift == residual * residual, "energy shift mismatch");

  const std::string path = std::string(HUBOFACT_BINARY_DIR) + "/criterion9_model.json";
  save_model(model, path);
  const LoadedModel loaded = load_model(path);
  require(loaded.model.poly == model.poly, "save/load altered the polynomial");
  require(loaded.model.energy_shift == model.energy_shift, "save/load altered the shift");

  const ExactResult solved =
      enumerate_exact(loaded.model.poly, {.energy_shift = loaded.model.energy_shift});
  require(solved.min_energy_full == 0, "loaded model does not reach 0");
  auto [p, q] = loaded.model.decode(solved.samples.front().bits);
  if (p > q) std::swap(p, q);
  require(p == p_planted && q == q_planted, "planted factors not recovered");

  // and the search path finds the same block from scratch
  const SolveReport report = range_search(n, spiral_block_plan(n, 6, 64));
  require(report.found && report.p == p_planted && report.q == q_planted,
          "spiral search missed the planted factors");

  std::ostringstream summary;
  summary << "N = " << to_decimal(n) << " solved from a saved model, target "
          << to_decimal(loaded.model.target_energy()) << ", N^2 has "
          << to_decimal(n * n).size() << " digits";
  return summary.str();
}

}  // namespace

int main(int argc, char** argv) {
  int selected = 0;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--criterion" && i + 1 < argc) {
      selected = std::atoi(argv[++i]);
    } else {
      std::cerr << "usage: acceptance [--criterion <1..9>]\n";
      return 64;
    }
  }

  const std::vector<std::pair<std::string, std::function<std::string()>>> criteria = {
      {"small-semiprime sweep", criterion_1},
      {"headline factorization A (102,454,763)", criterion_2},
      {"headline factorization B (1,000,070,001,221)", criterion_3},
      {"gadget soundness", criterion_4},
      {"ancilla counts", criterion_5},
      {"reduced-model target for N=15", criterion_6},
      {"bit refinement", criterion_7},
      {"determinism and parallel equivalence", criterion_8},
      {"precision guard near 1.05e12", criterion_9},
  };

  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const int id = static_cast<int>(k) + 1;
    if (selected != 0 && selected != id) continue;
    try {
      const std::string detail = criteria[k].second();
      std::cout << "[PASS] criterion " << id << ": " << criteria[k].first << " — "
                << detail << "\n";
    } catch (const std::exception& e) {
      ++failures;
      std::cout << "[FAIL] criterion " << id << ": " << criteria[k].first << " — "
                << e.what() << "\n";
    }
  }
  return failures;
}
