#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "hubofact/bigint.hpp"
#include "hubofact/model.hpp"
#include "hubofact/polynomial.hpp"

namespace hubofact {

enum class GadgetKind { CubicNeg, CubicPos, QuarticPos };

/// One gadget application: which term it replaced, which ancillas it
/// introduced, and the constant it moved out of the polynomial.
struct GadgetRecord {
  GadgetKind kind;
  std::vector<VarId> source_vars;
  BigInt coeff;
  std::vector<VarId> ancillas;
  /// Constant dropped from the emitted terms; the solution energy of the
  /// reduced model sits this much lower.
  BigInt constant_shift;
};

struct ReductionLedger {
  std::vector<GadgetRecord> records;
  VarId first_ancilla = 0;
  BigInt total_shift = 0;
  /// Shifted-convention target of the reduced model: the original target
  /// minus total_shift.
  BigInt reduced_target = 0;

  std::size_t ancilla_count() const {
    std::size_t n = 0;
    for (const auto& r : records) n += r.ancillas.size();
    return n;
  }
  std::size_t cubic_count() const {
    std::size_t n = 0;
    for (const auto& r : records) n += r.kind != GadgetKind::QuarticPos;
    return n;
  }
  std::size_t quartic_count() const {
    std::size_t n = 0;
    for (const auto& r : records) n += r.kind == GadgetKind::QuarticPos;
    return n;
  }
};

/// Replaces c*x*y*z with quadratic terms over one fresh ancilla w:
///   c < 0:  c * w * (x + y + z - 2)
///   c > 0:  c * (w (x + y + z - 1) + xy + yz + zx - x - y - z) plus a
///           constant +c, which is routed to the record instead of the terms.
/// Minimizing over w recovers c*x*y*z minus the recorded constant for every
/// (x, y, z) in {0,1}^3.
inline std::pair<BinaryPolynomial, GadgetRecord> reduce_cubic(std::span<const VarId> vars,
                                                              const BigInt& coeff,
                                                              VarId next_ancilla) {
  if (vars.size() != 3) throw WrongArity("cubic gadget needs exactly 3 variables");
  if (coeff == 0) throw ZeroCoefficient("cubic gadget needs a nonzero coefficient");
  const VarId x = vars[0], y = vars[1], z = vars[2], w = next_ancilla;
  BinaryPolynomial out;
  GadgetRecord record;
  record.source_vars.assign(vars.begin(), vars.end());
  record.coeff = coeff;
  record.ancillas = {w};
  if (coeff < 0) {
    record.kind = GadgetKind::CubicNeg;
    record.constant_shift = 0;
    out.add_term({w, x}, coeff);
    out.add_term({w, y}, coeff);
    out.add_term({w, z}, coeff);
    out.add_term({w}, -2 * coeff);
  } else {
    record.kind = GadgetKind::CubicPos;
    record.constant_shift = coeff;
    out.add_term({w, x}, coeff);
    out.add_term({w, y}, coeff);
    out.add_term({w, z}, coeff);
    out.add_term({w}, -coeff);
    out.add_term({x, y}, coeff);
    out.add_term({y, z}, coeff);
    out.add_term({x, z}, coeff);
    out.add_term({x}, -coeff);
    out.add_term({y}, -coeff);
    out.add_term({z}, -coeff);
  }
  return {std::move(out), std::move(record)};
}

/// Replaces c*a1*a2*b1*b2 (c > 0) by applying the positive cubic gadget to
/// a2*b1*b2 (ancilla x1), multiplying the result by a1, and reducing each of
/// the six surviving cubic terms with its own ancilla (x2..x7). The six
/// dropped constants total 6c, recorded as the constant shift. Minimizing
/// over the 7 ancillas recovers c*a1*a2*b1*b2 - 6c for every assignment of
/// the original four variables.
inline std::pair<BinaryPolynomial, GadgetRecord> reduce_quartic(std::span<const VarId> vars,
                                                                const BigInt& coeff,
                                                                VarId next_ancilla) {
  if (vars.size() != 4) throw WrongArity("quartic gadget needs exactly 4 variables");
  if (coeff <= 0) {
    throw NonPositiveCoefficient("quartic gadget requires a positive coefficient");
  }
  const VarId a1 = vars[0], a2 = vars[1], b1 = vars[2], b2 = vars[3];
  const VarId x1 = next_ancilla;
  BinaryPolynomial out;
  GadgetRecord record;
  record.kind = GadgetKind::QuarticPos;
  record.source_vars.assign(vars.begin(), vars.end());
  record.coeff = coeff;
  record.constant_shift = 0;
  record.ancillas = {x1};

  // a1 times the quadratic remainder of the first substitution
  out.add_term({a1, a2}, -coeff);
  out.add_term({a1, b1}, -coeff);
  out.add_term({a1, b2}, -coeff);
  out.add_term({a1, x1}, -coeff);
  out.add_term({a1}, coeff);

  const VarId triples[6][3] = {{x1, a1, a2}, {x1, a1, b1}, {x1, a1, b2},
                               {a1, a2, b1}, {a1, a2, b2}, {a1, b1, b2}};
  VarId next = next_ancilla + 1;
  for (const auto& triple : triples) {
    auto [terms, sub] = reduce_cubic(std::span<const VarId>(triple, 3), coeff, next);
    out += terms;
    record.constant_shift += sub.constant_shift;
    record.ancillas.push_back(next);
    ++next;
  }
  return {std::move(out), std::move(record)};
}

/// Result of quadratizing a factor model: a degree <= 2 model over the same
/// decode map (ancilla bits are ignored by decode) plus the ledger that makes
/// the energy bookkeeping auditable.
struct QuadratizedModel {
  FactorModel model;
  ReductionLedger ledger;
};

/// Core reduction over a bare polynomial. Terms of degree 3 and 4 are
/// replaced in canonical term order with sequentially allocated ancillas
/// starting at first_ancilla; no ancilla is shared between terms.
inline std::pair<BinaryPolynomial, ReductionLedger> quadratize_polynomial(
    const BinaryPolynomial& poly, VarId first_ancilla) {
  if (poly.degree() > 4) {
    throw UnsupportedDegree("quadratization handles degree <= 4, got " +
                            std::to_string(poly.degree()));
  }
  BinaryPolynomial out(poly.offset());
  ReductionLedger ledger;
  ledger.first_ancilla = first_ancilla;
  VarId next = first_ancilla;
  for (const auto& [vars, coeff] : poly.terms()) {
    if (vars.size() <= 2) {
      out.add_term(vars, coeff);
      continue;
    }
    if (vars.size() == 3) {
      auto [terms, record] = reduce_cubic(vars, coeff, next);
      out += terms;
      next += static_cast<VarId>(record.ancillas.size());
      ledger.total_shift += record.constant_shift;
      ledger.records.push_back(std::move(record));
    } else {
      if (coeff < 0) {
        throw NegativeQuarticCoefficient(
            "quartic terms must have positive coefficients");
      }
      auto [terms, record] = reduce_quartic(vars, coeff, next);
      out += terms;
      next += static_cast<VarId>(record.ancillas.size());
      ledger.total_shift += record.constant_shift;
      ledger.records.push_back(std::move(record));
    }
  }
  return {std::move(out), std::move(ledger)};
}

/// Reduces a factor model to degree <= 2. Already-quadratic models come back
/// unchanged with an empty ledger.
inline QuadratizedModel quadratize_model(const FactorModel& model) {
  QuadratizedModel out;
  auto [poly, ledger] = quadratize_polynomial(model.poly, model.total_vars);
  out.model = model;
  out.model.poly = std::move(poly);
  out.model.reduction_shift = model.reduction_shift + ledger.total_shift;
  out.model.total_vars =
      model.total_vars + static_cast<std::uint32_t>(ledger.ancilla_count());
  ledger.reduced_target = model.target_energy() - ledger.total_shift;
  out.ledger = std::move(ledger);
  return out;
}

struct VerifyOptions {
  /// Enumerate every original-variable assignment up to this count of
  /// original variables; sample beyond it.
  std::uint32_t exhaustive_limit = 20;
  std::uint64_t sample_count = 1024;
  std::uint64_t seed = 1;
};

struct VerifyReport {
  bool passed = false;
  bool exhaustive = false;
  std::uint64_t checked = 0;
  std::optional<Assignment> counterexample;  // original variables only
  BigInt expected = 0;  // original energy minus total shift
  BigInt got = 0;       // min over ancillas of the reduced energy
};

namespace detail {

/// Exact minimum of the reduced polynomial over all ancilla assignments,
/// with the original variables fixed. Gadget ancilla groups do not interact,
/// so each group (at most 7 bits) is minimized independently; the grouping
/// comes from the ledger.
class AncillaMinimizer {
 public:
  AncillaMinimizer(const BinaryPolynomial& reduced, const ReductionLedger& ledger,
                   std::uint32_t original_vars)
      : original_vars_(original_vars) {
    std::vector<std::uint32_t> group_of;  // ancilla index -> gadget index
    for (std::uint32_t g = 0; g < ledger.records.size(); ++g) {
      for (VarId a : ledger.records[g].ancillas) {
        const std::uint32_t slot = a - ledger.first_ancilla;
        if (group_of.size() <= slot) group_of.resize(slot + 1, 0);
        group_of[slot] = g;
      }
    }
    groups_.resize(ledger.records.size());
    for (std::uint32_t g = 0; g < ledger.records.size(); ++g) {
      groups_[g].ancillas = ledger.records[g].ancillas;
    }
    base_ = BinaryPolynomial(reduced.offset());
    for (const auto& [vars, coeff] : reduced.terms()) {
      std::optional<std::uint32_t> group;
      for (VarId v : vars) {
        if (v >= original_vars_) {
          const std::uint32_t g = group_of.at(v - ledger.first_ancilla);
          if (group && *group != g) {
            throw Error("reduced term couples two gadget ancilla groups");
          }
          group = g;
        }
      }
      if (group) {
        groups_[*group].terms.add_term(vars, coeff);
      } else {
        base_.add_term(vars, coeff);
      }
    }
  }

  BigInt min_energy(const Assignment& original) const {
    Assignment padded = original;
    BigInt total = base_.evaluate(padded);
    for (const auto& group : groups_) {
      std::optional<BigInt> best;
      const std::size_t k = group.ancillas.size();
      for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << k); ++mask) {
        for (std::size_t i = 0; i < k; ++i) {
          const VarId a = group.ancillas[i];
          if (padded.size() <= a) padded.resize(a + 1, 0);
          padded[a] = (mask >> i) & 1u;
        }
        const BigInt e = group.terms.evaluate(padded);
        if (!best || e < *best) best = e;
      }
      total += best.value_or(0);
    }
    return total;
  }

 private:
  struct Group {
    std::vector<VarId> ancillas;
    BinaryPolynomial terms;
  };
  std::uint32_t original_vars_;
  BinaryPolynomial base_;
  std::vector<Group> groups_;
};

}  // namespace detail

/// Certifies that the reduction preserved the energy landscape: for each
/// original-variable assignment (all of them, or a seeded sample), the exact
/// minimum of the reduced model over its ancillas must equal the original
/// energy minus the ledger's total shift. Reports the first counterexample.
inline VerifyReport verify_reduction(const FactorModel& original, const FactorModel& reduced,
                                     const ReductionLedger& ledger,
                                     const VerifyOptions& options = {}) {
  const std::uint32_t m = original.layout.var_count();
  detail::AncillaMinimizer minimizer(reduced.poly, ledger, m);
  VerifyReport report;
  report.exhaustive = m <= options.exhaustive_limit;

  std::mt19937_64 rng(options.seed);
  const std::uint64_t count = report.exhaustive
                                  ? (m >= 64 ? 0 : (std::uint64_t{1} << m))
                                  : options.sample_count;
  for (std::uint64_t k = 0; k < count; ++k) {
    Assignment a(m, 0);
    if (report.exhaustive) {
      for (std::uint32_t i = 0; i < m; ++i) a[i] = (k >> i) & 1u;
    } else {
      for (std::uint32_t i = 0; i < m; ++i) a[i] = static_cast<std::uint8_t>(rng() & 1u);
    }
    ++report.checked;
    const BigInt expected = original.poly.evaluate(a) - ledger.total_shift;
    const BigInt got = minimizer.min_energy(a);
    if (expected != got) {
      report.passed = false;
      report.counterexample = a;
      report.expected = expected;
      report.got = got;
      return report;
    }
  }
  report.passed = true;
  return report;
}

}  // namespace hubofact
