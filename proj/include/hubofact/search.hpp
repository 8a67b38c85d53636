#pragma once

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <thread>
#include <utility>
#include <vector>

#include "hubofact/bigint.hpp"
#include "hubofact/model.hpp"
#include "hubofact/solvers.hpp"

namespace hubofact {

/// One block of the partitioned factor domain: candidate p lies in
/// [i * stride, i * stride + 2^bits - 1] and q likewise with j.
struct BlockCoord {
  std::uint64_t i = 0;
  std::uint64_t j = 0;
  friend bool operator==(const BlockCoord&, const BlockCoord&) = default;
};

/// An ordered sequence of blocks to solve. The stride is the spacing of
/// block origins; the default plan uses 2^bits so blocks tile the domain,
/// but any spacing is allowed (sparse sampling of the domain included).
struct BlockPlan {
  BigInt stride;
  std::uint32_t bits = 0;
  bool fix_lsb = false;
  std::vector<BlockCoord> blocks;
};

enum class SolverKind { Exact, Annealer };

struct SolverChoice {
  SolverKind kind = SolverKind::Exact;
  AnnealSchedule schedule;     // used when kind == Annealer
  std::uint32_t var_limit = 26;  // used when kind == Exact
};

struct StageStep {
  std::uint32_t level = 0;     // bit position fixed by this stage
  bool is_signed = false;      // stages after the first use +/- pairs
  BigInt p_step;               // correction applied to the accumulators
  BigInt q_step;
  BigInt p_acc;                // accumulated values after the stage
  BigInt q_acc;
  bool tied = false;           // this stage had multiple optimal values
};

/// Outcome of any solve entry point. Fields are filled as applicable to the
/// method that produced the report.
struct SolveReport {
  bool found = false;
  BigInt p = 0;                // normalized so p <= q when found
  BigInt q = 0;
  BigInt energy_full = 0;
  BigInt energy_shifted = 0;
  BigInt target_energy = 0;
  std::uint32_t model_vars = 0;
  std::uint32_t ancilla_vars = 0;
  std::uint64_t minimizer_count = 0;
  std::uint64_t assignments_visited = 0;

  // range search
  std::optional<BlockCoord> hit_block;
  BigInt hit_p_offset = 0;
  BigInt hit_q_offset = 0;
  std::uint64_t blocks_examined = 0;
  std::optional<BlockCoord> best_miss_block;
  BigInt best_miss_excess = 0;

  // bit refinement
  std::vector<StageStep> stage_trace;
  bool stage_ties = false;
};

namespace detail {

inline BigInt block_low(const BigInt& stride, std::uint64_t k) { return stride * k; }

/// Necessary condition for block (i, j) to contain a factorization of N:
/// the product range [max(S_i,1) * max(S_j,1), (S_i + w - 1) * (S_j + w - 1)]
/// must cover N, where w = 2^bits (a factor of 0 never multiplies to N, so
/// the lower end of block 0 is effectively 1).
inline bool block_may_contain(const BigInt& big_n, const BigInt& stride, std::uint32_t bits,
                              std::uint64_t i, std::uint64_t j) {
  const BigInt width = pow2(bits);
  const BigInt si = block_low(stride, i);
  const BigInt sj = block_low(stride, j);
  BigInt lo_p = si > 1 ? si : 1;
  BigInt lo_q = sj > 1 ? sj : 1;
  if (lo_p * lo_q > big_n) return false;
  return (si + width - 1) * (sj + width - 1) >= big_n;
}

}  // namespace detail

/// Enumerates candidate blocks (i, j) with i <= j that pass the
/// necessary-overlap bound, ordered by |S_i * S_j - N| ascending (ties by
/// (i, j) ascending). Balanced factorizations therefore surface first.
inline BlockPlan default_block_plan(const BigInt& big_n, std::uint32_t bits,
                                    const BigInt& stride,
                                    std::uint64_t max_blocks = 8'000'000) {
  if (big_n < 1) throw Error("the number to factor must be positive");
  if (stride < 1) throw Error("stride must be positive");
  BlockPlan plan;
  plan.stride = stride;
  plan.bits = bits;

  // i <= j plus the lower product bound force S_i <= sqrt(N).
  const BigInt root = isqrt(big_n);
  const std::uint64_t i_max = static_cast<std::uint64_t>(root / stride);
  const BigInt width = pow2(bits);

  struct Keyed {
    BigInt distance;
    BlockCoord coord;
  };
  std::vector<Keyed> keyed;
  for (std::uint64_t i = 0; i <= i_max; ++i) {
    const BigInt si = stride * i;
    const BigInt lo_p = si > 1 ? si : 1;
    // j range: (S_i + w - 1)(S_j + w - 1) >= N and lo_p * max(S_j, 1) <= N
    const BigInt hi_p = si + width - 1;
    // smallest S_j with hi_p * (S_j + w - 1) >= N
    BigInt sj_min = (big_n + hi_p - 1) / hi_p;  // ceil(N / hi_p)
    sj_min -= width - 1;
    if (sj_min < 0) sj_min = 0;
    std::uint64_t j_lo = static_cast<std::uint64_t>((sj_min + stride - 1) / stride);
    j_lo = std::max<std::uint64_t>(j_lo, i);
    // largest S_j with lo_p * max(S_j, 1) <= N
    const std::uint64_t j_hi = static_cast<std::uint64_t>((big_n / lo_p) / stride);
    for (std::uint64_t j = j_lo; j <= j_hi; ++j) {
      if (!detail::block_may_contain(big_n, stride, bits, i, j)) continue;
      BigInt distance = big_n - si * (stride * j);
      if (distance < 0) distance = -distance;
      keyed.push_back({std::move(distance), {i, j}});
      if (keyed.size() > max_blocks) {
        throw PlanTooLarge("block plan exceeds " + std::to_string(max_blocks) +
                           " blocks; raise the cap or use a spiral plan");
      }
    }
  }
  std::sort(keyed.begin(), keyed.end(), [](const Keyed& a, const Keyed& b) {
    if (a.distance != b.distance) return a.distance < b.distance;
    if (a.coord.i != b.coord.i) return a.coord.i < b.coord.i;
    return a.coord.j < b.coord.j;
  });
  plan.blocks.reserve(keyed.size());
  for (auto& k : keyed) plan.blocks.push_back(k.coord);
  return plan;
}

/// Rings of blocks around the block containing floor(sqrt(N)), nearest ring
/// first, (i, j) ascending within a ring, restricted to i <= j and the
/// necessary-overlap bound. Suited to near-balanced factor pairs.
inline BlockPlan spiral_block_plan(const BigInt& big_n, std::uint32_t bits,
                                   const BigInt& stride, std::uint64_t max_rings = 64) {
  if (big_n < 1) throw Error("the number to factor must be positive");
  if (stride < 1) throw Error("stride must be positive");
  BlockPlan plan;
  plan.stride = stride;
  plan.bits = bits;
  const std::uint64_t center = static_cast<std::uint64_t>(isqrt(big_n) / stride);
  const auto ring_distance = [center](std::uint64_t i, std::uint64_t j) {
    const std::uint64_t di = i > center ? i - center : center - i;
    const std::uint64_t dj = j > center ? j - center : center - j;
    return std::max(di, dj);
  };
  for (std::uint64_t ring = 0; ring <= max_rings; ++ring) {
    const std::uint64_t lo = center >= ring ? center - ring : 0;
    const std::uint64_t hi = center + ring;
    for (std::uint64_t i = lo; i <= hi; ++i) {
      for (std::uint64_t j = std::max(i, lo); j <= hi; ++j) {
        if (ring_distance(i, j) != ring) continue;
        if (detail::block_may_contain(big_n, stride, bits, i, j)) {
          plan.blocks.push_back({i, j});
        }
      }
    }
  }
  return plan;
}

/// Runs `work` over the plan's blocks on `workers` threads and feeds results
/// to `sink` strictly in plan order; sink returning true stops the run.
/// Workers stay at most a bounded window ahead of the sink so a stop cancels
/// outstanding blocks promptly. The sink sees an identical stream for any
/// worker count.
template <class Outcome>
void parallel_block_map(const std::vector<BlockCoord>& blocks, unsigned workers,
                        const std::function<Outcome(std::uint64_t, const BlockCoord&)>& work,
                        const std::function<bool(std::uint64_t, Outcome&&)>& sink) {
  const std::uint64_t count = blocks.size();
  if (count == 0) return;
  if (workers <= 1) {
    for (std::uint64_t idx = 0; idx < count; ++idx) {
      if (sink(idx, work(idx, blocks[idx]))) return;
    }
    return;
  }

  std::mutex mutex;
  std::condition_variable ready_cv;   // signals the merger
  std::condition_variable window_cv;  // throttles workers
  std::map<std::uint64_t, Outcome> done;
  std::uint64_t merged = 0;
  std::atomic<std::uint64_t> next{0};
  std::atomic<bool> stop{false};
  const std::uint64_t window = 4 * static_cast<std::uint64_t>(workers);

  auto worker = [&] {
    while (!stop.load(std::memory_order_relaxed)) {
      const std::uint64_t idx = next.fetch_add(1);
      if (idx >= count) return;
      {
        std::unique_lock<std::mutex> lock(mutex);
        window_cv.wait(lock, [&] { return stop.load() || idx < merged + window; });
        if (stop.load()) return;
      }
      Outcome outcome = work(idx, blocks[idx]);
      {
        std::lock_guard<std::mutex> lock(mutex);
        done.emplace(idx, std::move(outcome));
      }
      ready_cv.notify_one();
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);

  {
    std::unique_lock<std::mutex> lock(mutex);
    while (merged < count) {
      ready_cv.wait(lock, [&] { return done.count(merged) != 0; });
      auto node = done.extract(merged);
      Outcome outcome = std::move(node.mapped());
      lock.unlock();
      const bool halt = sink(merged, std::move(outcome));
      lock.lock();
      ++merged;
      if (halt) {
        stop.store(true);
        break;
      }
      window_cv.notify_all();
    }
    stop.store(true);
  }
  window_cv.notify_all();
  ready_cv.notify_all();
  for (auto& t : pool) t.join();
}

namespace detail {

struct BlockOutcome {
  BigInt min_energy_full;
  Assignment best_bits;
  std::uint64_t visited = 0;
};

inline std::pair<BigInt, BigInt> decode_padded(const FactorModel& model,
                                               Assignment bits) {
  if (bits.size() < model.layout.var_count()) bits.resize(model.layout.var_count(), 0);
  return model.decode(bits);
}

/// Among the minimum-energy samples (sorted by energy then assignment value),
/// prefers one decoding to factors that are both > 1. A layout wide enough to
/// hold N itself makes 1 * N a legitimate zero of the cost, which is useless
/// as a factorization; fall back to it only when nothing better ties.
inline const Sample* pick_solution_sample(const FactorModel& model,
                                          const std::vector<Sample>& samples,
                                          const BigInt& min_energy) {
  const Sample* first = nullptr;
  for (const auto& s : samples) {
    if (s.energy_full != min_energy) break;
    if (first == nullptr) first = &s;
    const auto [p, q] = decode_padded(model, s.bits);
    if (p > 1 && q > 1) return &s;
  }
  return first;
}

}  // namespace detail

struct RangeSearchOptions {
  SolverChoice solver;
  unsigned workers = 1;
  bool fix_lsb = false;
};

/// Solves blocks in plan order until one attains full-convention energy 0,
/// i.e. its shifted minimum equals the block's target energy. The result is
/// independent of the worker count.
inline SolveReport range_search(const BigInt& big_n, const BlockPlan& plan,
                                const RangeSearchOptions& options = {}) {
  if (plan.blocks.empty()) throw NoBlocksInPlan("the block plan is empty");

  auto solve_block = [&](std::uint64_t, const BlockCoord& block) {
    FactorLayout layout{.bits_per_factor = plan.bits,
                        .fix_lsb = plan.fix_lsb || options.fix_lsb,
                        .p_offset = plan.stride * block.i,
                        .q_offset = plan.stride * block.j};
    const FactorModel model = build_range_hubo(big_n, layout);
    detail::BlockOutcome outcome;
    if (options.solver.kind == SolverKind::Exact) {
      const ExactResult r = enumerate_exact(
          model.poly, {.var_limit = options.solver.var_limit, .max_samples = 1024,
                       .min_vars = model.layout.var_count()});
      outcome.min_energy_full = r.min_energy_full;
      outcome.best_bits =
          detail::pick_solution_sample(model, r.samples, r.min_energy_full)->bits;
      outcome.visited = r.visited;
    } else {
      const auto samples = sample_sa(model.poly, options.solver.schedule);
      outcome.min_energy_full = samples.front().energy_full;
      outcome.best_bits =
          detail::pick_solution_sample(model, samples, outcome.min_energy_full)->bits;
      outcome.visited = options.solver.schedule.restarts * options.solver.schedule.sweeps;
    }
    return outcome;
  };

  SolveReport report;
  report.model_vars = 2 * (plan.bits - ((plan.fix_lsb || options.fix_lsb) ? 1 : 0));
  bool have_miss = false;

  std::function<bool(std::uint64_t, detail::BlockOutcome&&)> sink =
      [&](std::uint64_t idx, detail::BlockOutcome&& outcome) {
        ++report.blocks_examined;
        report.assignments_visited += outcome.visited;
        const BlockCoord& block = plan.blocks[idx];
        if (outcome.min_energy_full == 0) {
          FactorLayout layout{.bits_per_factor = plan.bits,
                              .fix_lsb = plan.fix_lsb || options.fix_lsb,
                              .p_offset = plan.stride * block.i,
                              .q_offset = plan.stride * block.j};
          const FactorModel model = build_range_hubo(big_n, layout);
          auto [p, q] = detail::decode_padded(model, outcome.best_bits);
          if (p > q) std::swap(p, q);
          report.found = true;
          report.p = p;
          report.q = q;
          report.energy_full = 0;
          report.energy_shifted = model.energy_shifted(0);
          report.target_energy = model.target_energy();
          report.hit_block = block;
          report.hit_p_offset = layout.p_offset;
          report.hit_q_offset = layout.q_offset;
          return true;
        }
        if (!have_miss || outcome.min_energy_full < report.best_miss_excess) {
          have_miss = true;
          report.best_miss_excess = outcome.min_energy_full;
          report.best_miss_block = block;
        }
        return false;
      };

  parallel_block_map<detail::BlockOutcome>(plan.blocks, options.workers, solve_block, sink);
  return report;
}

struct DecompositionOptions {
  SolverChoice solver;
  /// Tied stage minima branch breadth-first; exceeding this many live
  /// branches raises StageMinimumAmbiguous.
  std::uint64_t branch_budget = 16;
};

namespace detail {

struct DecompBranch {
  BigInt p_acc;
  BigInt q_acc;
  std::vector<StageStep> trace;
};

/// Distinct (p, q) accumulator pairs attaining the stage minimum, ascending.
inline std::vector<std::pair<BigInt, BigInt>> stage_minima(
    const BinaryPolynomial& stage_poly, const DecompBranch& branch, const BigInt& step,
    bool is_signed, const SolverChoice& solver) {
  const std::uint32_t stage_vars = is_signed ? 4 : 2;
  std::vector<Assignment> minimizers;
  if (solver.kind == SolverKind::Exact) {
    // Walk all stage assignments directly; the polynomial may have lost a
    // variable to cancellation, which just makes that bit a free choice.
    BigInt min_energy;
    for (std::uint64_t value = 0; value < (std::uint64_t{1} << stage_vars); ++value) {
      Assignment bits(stage_vars, 0);
      for (std::uint32_t b = 0; b < stage_vars; ++b) bits[b] = (value >> b) & 1u;
      const BigInt e = stage_poly.evaluate(bits);
      if (value == 0 || e < min_energy) {
        min_energy = e;
        minimizers.clear();
      }
      if (e == min_energy) minimizers.push_back(std::move(bits));
    }
  } else {
    const auto samples = sample_sa(stage_poly, solver.schedule);
    const BigInt& min_energy = samples.front().energy_full;
    for (const auto& s : samples) {
      if (s.energy_full != min_energy) break;
      Assignment bits = s.bits;
      bits.resize(stage_vars, 0);
      minimizers.push_back(std::move(bits));
    }
  }
  std::vector<std::pair<BigInt, BigInt>> values;
  for (const Assignment& bits : minimizers) {
    BigInt dp, dq;
    if (is_signed) {
      dp = step * bits[0] - step * bits[1];
      dq = step * bits[2] - step * bits[3];
    } else {
      dp = step * bits[0];
      dq = step * bits[1];
    }
    values.emplace_back(branch.p_acc + dp, branch.q_acc + dq);
  }
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  return values;
}

}  // namespace detail

/// Fixes the factors one bit level at a time, highest first. The first stage
/// tries the top bit of each factor (2 variables); every later stage adds a
/// signed correction of +/- 2^level per factor via a qubit pair (4
/// variables), with earlier accumulations folded into the stage polynomial
/// as constants. Tied stage minima are explored breadth-first up to the
/// branch budget. Greedy per-stage minimization is a heuristic: it can
/// settle on a near-miss product (e.g. a square adjacent to N), in which
/// case the report comes back with found == false and the best final pair.
inline SolveReport decompose_solve(const BigInt& big_n, std::uint32_t bits,
                                   const DecompositionOptions& options = {}) {
  if (big_n < 4) throw Error("bit refinement needs N >= 4");
  if (bits < 1) throw Error("bits must be >= 1");

  std::vector<detail::DecompBranch> branches{{BigInt(0), BigInt(0), {}}};
  bool any_tie = false;

  for (std::uint32_t stage = 1; stage <= bits; ++stage) {
    const std::uint32_t level = bits - stage;
    const BigInt step = pow2(level);
    const bool is_signed = stage > 1;
    std::vector<detail::DecompBranch> next;
    for (const auto& branch : branches) {
      BinaryPolynomial p_expr(branch.p_acc);
      BinaryPolynomial q_expr(branch.q_acc);
      if (is_signed) {
        p_expr.add_term({0}, step);
        p_expr.add_term({1}, -step);
        q_expr.add_term({2}, step);
        q_expr.add_term({3}, -step);
      } else {
        p_expr.add_term({0}, step);
        q_expr.add_term({1}, step);
      }
      const BinaryPolynomial stage_poly = build_product_cost(p_expr, q_expr, big_n);
      const auto values =
          detail::stage_minima(stage_poly, branch, step, is_signed, options.solver);
      const bool tied = values.size() > 1;
      any_tie = any_tie || tied;
      for (const auto& [p_acc, q_acc] : values) {
        detail::DecompBranch child{p_acc, q_acc, branch.trace};
        child.trace.push_back({level, is_signed, p_acc - branch.p_acc,
                               q_acc - branch.q_acc, p_acc, q_acc, tied});
        next.push_back(std::move(child));
      }
    }
    // dedupe identical accumulator pairs, keeping the earliest branch
    std::vector<detail::DecompBranch> deduped;
    for (auto& b : next) {
      bool seen = false;
      for (const auto& kept : deduped) {
        if (kept.p_acc == b.p_acc && kept.q_acc == b.q_acc) {
          seen = true;
          break;
        }
      }
      if (!seen) deduped.push_back(std::move(b));
    }
    if (deduped.size() > options.branch_budget) {
      throw StageMinimumAmbiguous(
          "stage " + std::to_string(stage) + " leaves " +
          std::to_string(deduped.size()) + " tied branches, budget is " +
          std::to_string(options.branch_budget));
    }
    branches = std::move(deduped);
  }

  SolveReport report;
  report.stage_ties = any_tie;
  report.model_vars = 2 * bits;

  const detail::DecompBranch* winner = nullptr;
  for (const auto& branch : branches) {
    if (branch.p_acc > 0 && branch.q_acc > 0 && branch.p_acc * branch.q_acc == big_n) {
      winner = &branch;
      break;
    }
  }
  if (winner == nullptr) {
    // report the closest final product
    const detail::DecompBranch* best = nullptr;
    BigInt best_residual;
    for (const auto& branch : branches) {
      BigInt residual = branch.p_acc * branch.q_acc - big_n;
      residual *= residual;
      if (best == nullptr || residual < best_residual) {
        best = &branch;
        best_residual = residual;
      }
    }
    report.found = false;
    report.p = best->p_acc;
    report.q = best->q_acc;
    report.energy_full = best_residual;
    report.energy_shifted = best_residual - big_n * big_n;
    report.target_energy = -big_n * big_n;
    report.stage_trace = best->trace;
    return report;
  }

  report.found = true;
  report.stage_trace = winner->trace;
  report.p = winner->p_acc;
  report.q = winner->q_acc;
  if (report.p > report.q) std::swap(report.p, report.q);
  report.energy_full = 0;
  report.energy_shifted = -big_n * big_n;
  report.target_energy = -big_n * big_n;
  return report;
}

}  // namespace hubofact
