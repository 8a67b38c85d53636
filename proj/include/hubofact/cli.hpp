#pragma once

#include <algorithm>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hubofact/bigint.hpp"
#include "hubofact/model.hpp"
#include "hubofact/model_io.hpp"
#include "hubofact/quadratize.hpp"
#include "hubofact/search.hpp"
#include "hubofact/solvers.hpp"

namespace hubofact::cli {

namespace detail {

struct FactorArgs {
  std::string n_text;
  std::uint32_t bits = 0;  // 0 = derive from N
  std::string method = "exact";
  bool fix_lsb = false;
  std::string stride_text;  // empty = 2^bits
  unsigned block_workers = 1;
  std::uint64_t sweeps = 10000;
  std::uint64_t restarts = 64;
  std::uint64_t seed = 1;
  std::uint32_t var_limit = 26;
  std::uint64_t branch_budget = 16;
  std::string plan = "distance";
  std::uint64_t rings = 64;
  std::string emit_model_path;
  bool json = false;
  bool qubo = false;  // histogram only
};

inline void add_model_flags(CLI::App* cmd, FactorArgs& args) {
  cmd->add_option("--n", args.n_text, "number to factor (decimal)")->required();
  cmd->add_option("--bits", args.bits,
                  "bits per factor (default: bit length of floor(sqrt(N)))");
  cmd->add_flag("--fix-lsb", args.fix_lsb,
                "pin each factor's least significant bit to 1 (odd factors)");
  cmd->add_option("--stride", args.stride_text, "block origin spacing (default: 2^bits)");
  cmd->add_option("--seed", args.seed, "random seed for annealing methods");
  cmd->add_option("--sweeps", args.sweeps, "annealing sweeps per restart");
  cmd->add_option("--restarts", args.restarts, "annealing restarts");
  cmd->add_option("--block-workers", args.block_workers, "parallel block solvers");
  cmd->add_option("--var-limit", args.var_limit, "cap for exhaustive enumeration");
  cmd->add_option("--branch-budget", args.branch_budget,
                  "tie-branch budget for the decomp method");
  cmd->add_option("--plan", args.plan, "block order for range search: distance|spiral")
      ->check(CLI::IsMember({"distance", "spiral"}));
  cmd->add_option("--rings", args.rings, "ring budget for the spiral plan");
  cmd->add_option("--emit-model", args.emit_model_path,
                  "write the constructed model to this path before solving");
  cmd->add_flag("--json", args.json, "emit a JSON report instead of text");
}

struct Row {
  std::string key;
  std::string value;
};

class Report {
 public:
  void add(const std::string& key, const std::string& value) { rows_.push_back({key, value}); }
  void add(const std::string& key, const BigInt& value) { add(key, to_decimal(value)); }
  void add(const std::string& key, std::uint64_t value) { add(key, std::to_string(value)); }
  void add(const std::string& key, bool value) { add(key, std::string(value ? "true" : "false")); }

  void print_text(std::ostream& out) const {
    for (const auto& row : rows_) out << row.key << " = " << row.value << "\n";
  }

  void print_json(std::ostream& out) const {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& row : rows_) j[row.key] = row.value;
    out << j.dump(2) << "\n";
  }

  void print(std::ostream& out, bool json) const {
    json ? print_json(out) : print_text(out);
  }

 private:
  std::vector<Row> rows_;
};

inline AnnealSchedule schedule_from(const FactorArgs& args) {
  AnnealSchedule schedule;
  schedule.sweeps = args.sweeps;
  schedule.restarts = args.restarts;
  schedule.seed = args.seed;
  return schedule;
}

inline FactorLayout layout_from(const FactorArgs& args, const BigInt& big_n) {
  FactorLayout layout;
  layout.bits_per_factor = args.bits != 0 ? args.bits : default_bits_for(big_n);
  layout.fix_lsb = args.fix_lsb;
  return layout;
}

inline BlockPlan plan_from(const FactorArgs& args, const BigInt& big_n,
                           std::uint32_t bits) {
  const BigInt stride =
      args.stride_text.empty() ? pow2(bits) : parse_decimal(args.stride_text);
  BlockPlan plan = args.plan == "spiral"
                       ? spiral_block_plan(big_n, bits, stride, args.rings)
                       : default_block_plan(big_n, bits, stride);
  plan.fix_lsb = args.fix_lsb;
  return plan;
}

/// Shared reporting for the plain-model methods (exact, sa and their
/// quadratized variants). Picks a nontrivial factor pair among tied minima.
inline int report_plain_solve(const FactorArgs& args, const FactorModel& model,
                              const std::vector<Sample>& samples, const BigInt& min_energy,
                              std::uint64_t min_count, std::uint64_t visited, Report& report,
                              std::ostream& out) {
  const Sample* best = hubofact::detail::pick_solution_sample(model, samples, min_energy);
  const bool solved = model.is_solution_energy(min_energy);
  auto [p, q] = hubofact::detail::decode_padded(model, best->bits);
  if (p > q) std::swap(p, q);
  const bool found = solved && p * q == model.big_n;  // independent product check
  report.add("found", found);
  if (found) {
    report.add("p", p);
    report.add("q", q);
  }
  report.add("energy_full", best->energy_full);
  report.add("energy_shifted", best->energy_shifted);
  report.add("target_energy", model.target_energy());
  if (min_count != 0) report.add("minimizers", min_count);
  if (visited != 0) report.add("visited", visited);
  report.print(out, args.json);
  return found ? 0 : 1;
}

inline int run_factor(const FactorArgs& args, std::ostream& out) {
  const BigInt big_n = parse_decimal(args.n_text);
  if (big_n < 4) throw Error("--n must be at least 4");
  FactorLayout layout = layout_from(args, big_n);
  const std::uint32_t bits = layout.bits_per_factor;

  Report report;
  report.add("N", big_n);
  report.add("method", args.method);

  if (args.method == "exact" || args.method == "sa" || args.method == "qubo-exact" ||
      args.method == "qubo-sa") {
    const FactorModel hubo = build_plain_hubo(big_n, layout);
    const bool reduced = args.method.rfind("qubo", 0) == 0;
    FactorModel model = hubo;
    ReductionLedger ledger;
    if (reduced) {
      QuadratizedModel q = quadratize_model(hubo);
      model = std::move(q.model);
      ledger = std::move(q.ledger);
    }
    report.add("qubits", std::uint64_t{model.total_vars});
    if (reduced) {
      report.add("ancilla_qubits", std::uint64_t{model.ancilla_count()});
      report.add("reduction_shift", ledger.total_shift);
    }
    if (!args.emit_model_path.empty()) {
      save_model(model, args.emit_model_path, reduced ? &ledger : nullptr);
    }
    if (args.method == "exact" || args.method == "qubo-exact") {
      const ExactResult r = enumerate_exact(
          model.poly, {.var_limit = args.var_limit, .max_samples = 1024,
                       .energy_shift = model.energy_shift, .min_vars = model.total_vars});
      return report_plain_solve(args, model, r.samples, r.min_energy_full, r.min_count,
                                r.visited, report, out);
    }
    report.add("seed", args.seed);
    report.add("restarts", args.restarts);
    report.add("sweeps", args.sweeps);
    const auto samples = sample_sa(model.poly, schedule_from(args), model.energy_shift);
    return report_plain_solve(args, model, samples, samples.front().energy_full, 0, 0,
                              report, out);
  }

  if (args.method == "range") {
    const BlockPlan plan = plan_from(args, big_n, bits);
    if (!args.emit_model_path.empty() && !plan.blocks.empty()) {
      const BlockCoord& first = plan.blocks.front();
      FactorLayout block_layout = layout;
      block_layout.p_offset = plan.stride * first.i;
      block_layout.q_offset = plan.stride * first.j;
      save_model(build_range_hubo(big_n, block_layout), args.emit_model_path);
    }
    RangeSearchOptions options;
    options.workers = args.block_workers;
    options.solver.var_limit = args.var_limit;
    const SolveReport result = range_search(big_n, plan, options);
    report.add("qubits", std::uint64_t{result.model_vars});
    report.add("plan", args.plan);
    report.add("stride", plan.stride);
    report.add("plan_blocks", std::uint64_t{plan.blocks.size()});
    report.add("blocks_examined", result.blocks_examined);
    const bool found = result.found && result.p * result.q == big_n;
    report.add("found", found);
    if (found) {
      report.add("p", result.p);
      report.add("q", result.q);
      report.add("block", "(" + std::to_string(result.hit_block->i) + "," +
                              std::to_string(result.hit_block->j) + ")");
      report.add("block_p_offset", result.hit_p_offset);
      report.add("block_q_offset", result.hit_q_offset);
      report.add("energy_full", result.energy_full);
      report.add("energy_shifted", result.energy_shifted);
      report.add("target_energy", result.target_energy);
    } else if (result.best_miss_block.has_value()) {
      report.add("best_block", "(" + std::to_string(result.best_miss_block->i) + "," +
                                   std::to_string(result.best_miss_block->j) + ")");
      report.add("best_excess", result.best_miss_excess);
    }
    report.print(out, args.json);
    return found ? 0 : 1;
  }

  if (args.method == "decomp") {
    DecompositionOptions options;
    options.branch_budget = args.branch_budget;
    const SolveReport result = decompose_solve(big_n, bits, options);
    report.add("qubits", std::uint64_t{result.model_vars});
    std::size_t stage_index = 0;
    for (const auto& step : result.stage_trace) {
      report.add("stage_" + std::to_string(++stage_index),
                 "level=" + std::to_string(step.level) + " step=(" +
                     to_decimal(step.p_step) + "," + to_decimal(step.q_step) + ") acc=(" +
                     to_decimal(step.p_acc) + "," + to_decimal(step.q_acc) + ")" +
                     (step.tied ? " tied" : ""));
    }
    report.add("stage_ties", result.stage_ties);
    const bool found = result.found && result.p * result.q == big_n;
    report.add("found", found);
    report.add("p", result.p);
    report.add("q", result.q);
    report.add("energy_full", result.energy_full);
    report.add("energy_shifted", result.energy_shifted);
    report.print(out, args.json);
    return found ? 0 : 1;
  }

  throw Error("unknown method '" + args.method + "'");
}

inline int run_verify(const std::string& original_path, const std::string& reduced_path,
                      std::uint32_t limit, std::uint64_t samples, std::uint64_t seed,
                      bool json, std::ostream& out) {
  const LoadedModel original = load_model(original_path);
  const LoadedModel reduced = load_model(reduced_path);
  if (!reduced.ledger.has_value()) {
    throw ParseFailure("'" + reduced_path + "' carries no reduction ledger");
  }
  const VerifyReport result =
      verify_reduction(original.model, reduced.model, *reduced.ledger,
                       {.exhaustive_limit = limit, .sample_count = samples, .seed = seed});
  Report report;
  report.add("original", original_path);
  report.add("reduced", reduced_path);
  report.add("mode", std::string(result.exhaustive ? "exhaustive" : "sampled"));
  report.add("checked", result.checked);
  report.add("verified", result.passed);
  if (!result.passed && result.counterexample.has_value()) {
    std::string bits;
    for (const auto b : *result.counterexample) bits += b ? '1' : '0';
    report.add("counterexample", bits);
    report.add("expected", result.expected);
    report.add("got", result.got);
  }
  report.print(out, json);
  return result.passed ? 0 : 1;
}

inline int run_histogram(const FactorArgs& args, std::ostream& out) {
  const BigInt big_n = parse_decimal(args.n_text);
  if (big_n < 4) throw Error("--n must be at least 4");
  const FactorLayout layout = layout_from(args, big_n);
  FactorModel model = build_plain_hubo(big_n, layout);
  if (args.qubo) model = quadratize_model(model).model;

  std::map<BigInt, std::uint64_t> table;
  if (args.method == "exact") {
    table = exact_histogram(model.poly,
                            {.var_limit = args.var_limit, .energy_shift = model.energy_shift,
                             .min_vars = model.total_vars});
  } else if (args.method == "sa") {
    table = histogram(sample_sa(model.poly, schedule_from(args), model.energy_shift));
  } else {
    throw Error("histogram supports --method exact or sa");
  }

  if (args.json) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& [energy, count] : table) {
      nlohmann::json row;
      row["energy"] = to_decimal(energy);
      row["count"] = count;
      rows.push_back(std::move(row));
    }
    nlohmann::json j;
    j["N"] = to_decimal(big_n);
    j["qubits"] = model.total_vars;
    j["histogram"] = std::move(rows);
    out << j.dump(2) << "\n";
  } else {
    out << "# energy count\n";
    for (const auto& [energy, count] : table) {
      out << to_decimal(energy) << " " << count << "\n";
    }
  }
  return 0;
}

}  // namespace detail

/// Entry point shared by the binary and the tests. argv excludes the program
/// name. Exit codes: 0 factors found (or query succeeded), 1 no factorization
/// found / verification failed, 2 usage or input error.
inline int cli_run(std::vector<std::string> argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"HUBO/QUBO models for factoring bi-primes with exact integer energies"};
  app.require_subcommand(1);

  detail::FactorArgs factor_args;
  CLI::App* factor = app.add_subcommand("factor", "build a model and search for factors");
  detail::add_model_flags(factor, factor_args);
  factor
      ->add_option("--method", factor_args.method,
                   "exact|sa|range|decomp|qubo-exact|qubo-sa")
      ->check(CLI::IsMember({"exact", "sa", "range", "decomp", "qubo-exact", "qubo-sa"}));

  std::string verify_original, verify_reduced;
  std::uint32_t verify_limit = 20;
  std::uint64_t verify_samples = 1024, verify_seed = 1;
  bool verify_json = false;
  CLI::App* verify =
      app.add_subcommand("verify", "check a reduced model against its original");
  verify->add_option("--original", verify_original, "original model file")->required();
  verify->add_option("--reduced", verify_reduced, "reduced model file with ledger")
      ->required();
  verify->add_option("--limit", verify_limit, "exhaustive mode cap (original variables)");
  verify->add_option("--samples", verify_samples, "assignments checked in sampled mode");
  verify->add_option("--seed", verify_seed, "seed for sampled mode");
  verify->add_flag("--json", verify_json, "emit a JSON report");

  detail::FactorArgs hist_args;
  CLI::App* hist = app.add_subcommand("histogram", "energy/frequency table of a solve");
  detail::add_model_flags(hist, hist_args);
  hist->add_option("--method", hist_args.method, "exact|sa")
      ->check(CLI::IsMember({"exact", "sa"}));
  hist->add_flag("--qubo", hist_args.qubo, "quadratize the model first");

  std::reverse(argv.begin(), argv.end());
  try {
    app.parse(argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (factor->parsed()) return detail::run_factor(factor_args, out);
    if (verify->parsed()) {
      return detail::run_verify(verify_original, verify_reduced, verify_limit,
                                verify_samples, verify_seed, verify_json, out);
    }
    return detail::run_histogram(hist_args, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace hubofact::cli
