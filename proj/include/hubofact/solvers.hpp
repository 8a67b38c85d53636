#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <queue>
#include <random>
#include <thread>
#include <type_traits>
#include <vector>

#include "hubofact/bigint.hpp"
#include "hubofact/compiled.hpp"
#include "hubofact/polynomial.hpp"

namespace hubofact {

/// A visited assignment with its exact energy in both conventions.
struct Sample {
  Assignment bits;
  BigInt energy_full;
  BigInt energy_shifted;
  std::uint64_t occurrences = 1;
};

struct EnumerateOptions {
  /// Refuse exhaustive enumeration above this many variables.
  std::uint32_t var_limit = 26;
  /// Keep at most this many lowest-energy samples; 0 keeps every assignment
  /// (mind the memory: 2^v samples).
  std::uint64_t max_samples = 0;
  /// Subtracted from energy_full to produce energy_shifted.
  BigInt energy_shift = 0;
  /// Partition the assignment space by high-order bits across this many
  /// workers. The result is identical for any value.
  unsigned threads = 1;
  /// Enumerate at least this many variables even if the polynomial's span is
  /// smaller (a model variable can drop out of the cost entirely, e.g. by
  /// coefficient cancellation; it is still a model variable).
  std::uint32_t min_vars = 0;
};

struct ExactResult {
  /// Sorted by energy ascending, ties by assignment value ascending.
  std::vector<Sample> samples;
  BigInt min_energy_full = 0;
  /// Exact number of assignments attaining the minimum (counted even when
  /// max_samples trims the returned list).
  std::uint64_t min_count = 0;
  std::uint64_t visited = 0;
};

struct AnnealSchedule {
  std::uint64_t sweeps = 10000;
  std::uint64_t restarts = 64;
  /// 0 selects 1 / max|coefficient| so the first sweeps accept almost
  /// everything.
  double beta_min = 0.0;
  double beta_max = 5.0;
  std::uint64_t seed = 1;
  /// Restarts may run on this many threads; output is independent of it.
  unsigned threads = 1;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

template <class Energy>
long double to_long_double(const Energy& v) {
  if constexpr (std::is_same_v<Energy, BigInt>) {
    return v.template convert_to<long double>();
  } else {
    return static_cast<long double>(v);
  }
}

template <class Energy>
BigInt to_bigint(const Energy& v) {
  if constexpr (std::is_same_v<Energy, BigInt>) {
    return v;
  } else {
    return from_int128(v);
  }
}

inline Assignment unpack_bits(std::uint64_t value, std::uint32_t num_vars) {
  Assignment bits(num_vars, 0);
  for (std::uint32_t i = 0; i < num_vars; ++i) bits[i] = (value >> i) & 1u;
  return bits;
}

/// Exhaustive scan of one subspace (high bits fixed) in Gray-code order with
/// incremental energy updates.
template <class Energy, class Visit>
void gray_scan(const CompiledPoly<Energy>& poly, std::uint32_t low_bits,
               std::uint64_t high_value, Visit&& visit) {
  FlipState<Energy> state;
  state.reset(poly, unpack_bits(high_value, poly.num_vars));
  std::uint64_t value = high_value;
  visit(value, state.energy);
  const std::uint64_t steps = low_bits >= 64 ? 0 : (std::uint64_t{1} << low_bits);
  for (std::uint64_t k = 1; k < steps; ++k) {
    const auto b = static_cast<VarId>(std::countr_zero(k));
    state.flip(b);
    value ^= (std::uint64_t{1} << b);
    visit(value, state.energy);
  }
}

template <class Energy>
struct SubspaceScanResult {
  Energy min_energy{};
  std::uint64_t min_count = 0;
  std::uint64_t visited = 0;
  // (energy, value); kept sorted only at merge time
  std::vector<std::pair<Energy, std::uint64_t>> kept;
};

template <class Energy>
SubspaceScanResult<Energy> scan_subspace(const CompiledPoly<Energy>& poly,
                                         std::uint32_t low_bits, std::uint64_t high_value,
                                         std::uint64_t max_samples) {
  SubspaceScanResult<Energy> out;
  bool first = true;
  using HeapItem = std::pair<Energy, std::uint64_t>;
  std::priority_queue<HeapItem> worst_first;
  gray_scan(poly, low_bits, high_value, [&](std::uint64_t value, const Energy& energy) {
    ++out.visited;
    if (first || energy < out.min_energy) {
      out.min_energy = energy;
      out.min_count = 1;
      first = false;
    } else if (energy == out.min_energy) {
      ++out.min_count;
    }
    if (max_samples == 0) {
      out.kept.emplace_back(energy, value);
    } else {
      HeapItem item{energy, value};
      if (worst_first.size() < max_samples) {
        worst_first.push(std::move(item));
      } else if (item < worst_first.top()) {
        worst_first.pop();
        worst_first.push(std::move(item));
      }
    }
  });
  while (!worst_first.empty()) {
    out.kept.push_back(worst_first.top());
    worst_first.pop();
  }
  return out;
}

template <class Energy>
ExactResult enumerate_impl(const BinaryPolynomial& poly, const EnumerateOptions& options) {
  const auto compiled = CompiledPoly<Energy>::compile(poly, options.min_vars);
  const std::uint32_t v = compiled.num_vars;

  unsigned part_bits = 0;
  while (v > part_bits && (1u << part_bits) < options.threads) ++part_bits;
  const std::uint32_t low_bits = v - part_bits;
  const std::uint64_t subspaces = std::uint64_t{1} << part_bits;

  std::vector<SubspaceScanResult<Energy>> partial(subspaces);
  auto run = [&](std::uint64_t s) {
    partial[s] = scan_subspace(compiled, low_bits, s << low_bits, options.max_samples);
  };
  if (subspaces == 1) {
    run(0);
  } else {
    std::atomic<std::uint64_t> next{0};
    std::vector<std::thread> pool;
    const unsigned workers = std::min<std::uint64_t>(options.threads, subspaces);
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::uint64_t s; (s = next.fetch_add(1)) < subspaces;) run(s);
      });
    }
    for (auto& t : pool) t.join();
  }

  ExactResult result;
  Energy min_energy{};
  bool first = true;
  std::vector<std::pair<Energy, std::uint64_t>> kept;
  for (auto& p : partial) {
    result.visited += p.visited;
    if (first || p.min_energy < min_energy) {
      min_energy = p.min_energy;
      result.min_count = p.min_count;
      first = false;
    } else if (p.min_energy == min_energy) {
      result.min_count += p.min_count;
    }
    kept.insert(kept.end(), p.kept.begin(), p.kept.end());
  }
  std::sort(kept.begin(), kept.end());
  if (options.max_samples != 0 && kept.size() > options.max_samples) {
    kept.resize(options.max_samples);
  }
  result.min_energy_full = to_bigint(min_energy);
  result.samples.reserve(kept.size());
  for (const auto& [energy, value] : kept) {
    Sample s;
    s.bits = unpack_bits(value, v);
    s.energy_full = to_bigint(energy);
    s.energy_shifted = s.energy_full - options.energy_shift;
    result.samples.push_back(std::move(s));
  }
  return result;
}

template <class Energy>
std::map<BigInt, std::uint64_t> exact_histogram_impl(const BinaryPolynomial& poly,
                                                     const EnumerateOptions& options) {
  const auto compiled = CompiledPoly<Energy>::compile(poly, options.min_vars);
  std::map<Energy, std::uint64_t> counts;
  gray_scan(compiled, compiled.num_vars, 0,
            [&](std::uint64_t, const Energy& energy) { ++counts[energy]; });
  std::map<BigInt, std::uint64_t> out;
  for (const auto& [energy, count] : counts) {
    out.emplace(to_bigint(energy) - options.energy_shift, count);
  }
  return out;
}

}  // namespace detail

/// Visits every assignment of the polynomial's variables and returns the
/// lowest-energy samples in a deterministic order. Uses Gray-code iteration
/// with exact incremental deltas; native 128-bit arithmetic when the
/// coefficient bound allows, BigInt otherwise.
inline ExactResult enumerate_exact(const BinaryPolynomial& poly,
                                   const EnumerateOptions& options = {}) {
  const std::size_t v = std::max<std::size_t>(poly.var_span(), options.min_vars);
  if (v > options.var_limit) {
    throw TooManyVariables("exhaustive enumeration over " + std::to_string(v) +
                           " variables exceeds the limit of " +
                           std::to_string(options.var_limit));
  }
  if (v > 48) throw TooManyVariables("exhaustive enumeration is capped at 48 variables");
  if (fits_int128(poly.magnitude_bound())) {
    return detail::enumerate_impl<__int128>(poly, options);
  }
  return detail::enumerate_impl<BigInt>(poly, options);
}

/// Exact (shifted energy -> count) table over every assignment, without
/// storing samples.
inline std::map<BigInt, std::uint64_t> exact_histogram(const BinaryPolynomial& poly,
                                                       const EnumerateOptions& options = {}) {
  const std::size_t v = std::max<std::size_t>(poly.var_span(), options.min_vars);
  if (v > options.var_limit) {
    throw TooManyVariables("exhaustive histogram over " + std::to_string(v) +
                           " variables exceeds the limit of " +
                           std::to_string(options.var_limit));
  }
  if (fits_int128(poly.magnitude_bound())) {
    return detail::exact_histogram_impl<__int128>(poly, options);
  }
  return detail::exact_histogram_impl<BigInt>(poly, options);
}

namespace detail {

template <class Energy>
struct RestartOutcome {
  Energy best_energy{};
  std::vector<std::uint8_t> best_bits;
};

/// One annealing restart: random start, then `sweeps` Metropolis passes with
/// geometric inverse-temperature interpolation. Flip deltas are exact
/// integers throughout; only the acceptance test itself compares log(u)
/// against -beta * delta in extended precision.
template <class Energy>
RestartOutcome<Energy> anneal_once(const CompiledPoly<Energy>& poly,
                                   const AnnealSchedule& schedule, long double beta_min,
                                   std::uint64_t restart_seed) {
  std::mt19937_64 rng(restart_seed);
  std::vector<std::uint8_t> bits(poly.num_vars);
  for (auto& b : bits) b = static_cast<std::uint8_t>(rng() & 1u);

  FlipState<Energy> state;
  state.reset(poly, bits);
  RestartOutcome<Energy> out{state.energy, state.bits};

  const long double beta_max = schedule.beta_max;
  const long double ratio = beta_max / beta_min;
  for (std::uint64_t sweep = 0; sweep < schedule.sweeps; ++sweep) {
    const long double progress =
        schedule.sweeps > 1
            ? static_cast<long double>(sweep) / static_cast<long double>(schedule.sweeps - 1)
            : 1.0L;
    const long double beta = beta_min * std::pow(ratio, progress);
    for (VarId v = 0; v < poly.num_vars; ++v) {
      const Energy& delta = state.delta[v];
      bool accept;
      if (delta <= Energy{}) {
        accept = true;
      } else {
        const long double u =
            static_cast<long double>(rng() >> 11) * 0x1.0p-53L;  // [0, 1)
        accept = std::log(u) < -beta * to_long_double(delta);
      }
      if (accept) {
        state.flip(v);
        if (state.energy < out.best_energy) {
          out.best_energy = state.energy;
          out.best_bits = state.bits;
        }
      }
    }
  }
  return out;
}

template <class Energy>
std::vector<Sample> sample_sa_impl(const BinaryPolynomial& poly,
                                   const AnnealSchedule& schedule, const BigInt& shift) {
  const auto compiled = CompiledPoly<Energy>::compile(poly);

  long double beta_min = schedule.beta_min;
  if (beta_min <= 0.0L) {
    BigInt max_abs = 1;
    for (const auto& [vars, coeff] : poly.terms()) {
      max_abs = std::max(max_abs, BigInt(boost::multiprecision::abs(coeff)));
    }
    beta_min = 1.0L / max_abs.convert_to<long double>();
  }

  std::vector<RestartOutcome<Energy>> outcomes(schedule.restarts);
  auto run = [&](std::uint64_t r) {
    const std::uint64_t restart_seed = splitmix64(schedule.seed ^ (r * 0x9E3779B97F4A7C15ULL));
    outcomes[r] = anneal_once(compiled, schedule, beta_min, restart_seed);
  };
  if (schedule.threads <= 1 || schedule.restarts <= 1) {
    for (std::uint64_t r = 0; r < schedule.restarts; ++r) run(r);
  } else {
    std::atomic<std::uint64_t> next{0};
    std::vector<std::thread> pool;
    const unsigned workers =
        std::min<std::uint64_t>(schedule.threads, schedule.restarts);
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::uint64_t r; (r = next.fetch_add(1)) < schedule.restarts;) run(r);
      });
    }
    for (auto& t : pool) t.join();
  }

  // Merge identical assignments; order by (energy, assignment value).
  std::map<std::pair<BigInt, std::vector<std::uint8_t>>, std::uint64_t> merged;
  for (auto& o : outcomes) {
    std::vector<std::uint8_t> reversed(o.best_bits.rbegin(), o.best_bits.rend());
    ++merged[{to_bigint(o.best_energy), std::move(reversed)}];
  }
  std::vector<Sample> samples;
  samples.reserve(merged.size());
  for (const auto& [key, count] : merged) {
    Sample s;
    s.bits.assign(key.second.rbegin(), key.second.rend());
    s.energy_full = key.first;
    s.energy_shifted = s.energy_full - shift;
    s.occurrences = count;
    samples.push_back(std::move(s));
  }
  return samples;
}

}  // namespace detail

/// Seeded simulated annealing. Per restart: random initial assignment, then
/// one Metropolis single-bit-flip pass over all variables per sweep, with the
/// inverse temperature interpolated geometrically from beta_min to beta_max.
/// Returns the best assignment seen per restart (duplicates merged), sorted
/// by energy. Fully deterministic for a given seed, independent of
/// schedule.threads.
inline std::vector<Sample> sample_sa(const BinaryPolynomial& poly,
                                     const AnnealSchedule& schedule = {},
                                     const BigInt& energy_shift = 0) {
  if (poly.var_span() == 0) {
    throw EmptyPolynomial("simulated annealing needs at least one variable");
  }
  if (schedule.sweeps < 1) throw Error("schedule.sweeps must be >= 1");
  if (schedule.restarts < 1) throw Error("schedule.restarts must be >= 1");
  if (schedule.beta_min < 0 || schedule.beta_max <= 0 ||
      (schedule.beta_min > 0 && schedule.beta_min >= schedule.beta_max)) {
    throw Error("schedule requires 0 < beta_min < beta_max");
  }
  if (fits_int128(poly.magnitude_bound())) {
    return detail::sample_sa_impl<__int128>(poly, schedule, energy_shift);
  }
  return detail::sample_sa_impl<BigInt>(poly, schedule, energy_shift);
}

/// Exact counts grouped by shifted energy.
inline std::map<BigInt, std::uint64_t> histogram(const std::vector<Sample>& samples) {
  std::map<BigInt, std::uint64_t> out;
  for (const auto& s : samples) out[s.energy_shifted] += s.occurrences;
  return out;
}

}  // namespace hubofact
