#pragma once

#include <cstdint>
#include <utility>

#include "hubofact/bigint.hpp"
#include "hubofact/polynomial.hpp"

namespace hubofact {

/// Bit layout of the two candidate factors.
///
/// Without fix_lsb, each factor uses bits_per_factor variables with weights
/// 2^0 .. 2^(n-1). With fix_lsb, the least significant bit of each factor is
/// pinned to 1 (both factors of an odd product are odd) and only the n-1
/// higher bits are free. Block offsets p_offset / q_offset shift the encoded
/// ranges; zero offsets give the plain model.
struct FactorLayout {
  std::uint32_t bits_per_factor = 0;
  bool fix_lsb = false;
  BigInt p_offset = 0;
  BigInt q_offset = 0;

  std::uint32_t free_bits_per_factor() const {
    return bits_per_factor - (fix_lsb ? 1u : 0u);
  }
  /// Total factor variables; ancillas introduced later start here.
  std::uint32_t var_count() const { return 2 * free_bits_per_factor(); }

  void validate() const {
    if (bits_per_factor < 1) throw InvalidLayout("bits_per_factor must be >= 1");
    if (fix_lsb && bits_per_factor < 2) {
      throw InvalidLayout("fix_lsb requires at least 2 bits per factor");
    }
    if (p_offset < 0 || q_offset < 0) {
      throw InvalidLayout("block offsets must be non-negative");
    }
  }

  friend bool operator==(const FactorLayout&, const FactorLayout&) = default;
};

/// A cost polynomial for factoring big_n plus the metadata needed to decode
/// assignments back into candidate factors.
///
/// Two energy conventions are reported everywhere:
///   full:    E(x) = (p(x) * q(x) - N)^2, minimum 0 exactly at factorizations
///            reachable by the layout;
///   shifted: E(x) - (N - p_offset * q_offset)^2, the value annealer
///            toolchains report when the constant completing the square is
///            dropped from the model.
/// A quadratized model additionally sits reduction_shift below the original
/// polynomial (gadget constants are kept in the ledger, not the terms), so a
/// solution satisfies E_full(x) = -reduction_shift there.
struct FactorModel {
  BigInt big_n;
  FactorLayout layout;
  BinaryPolynomial poly;
  BigInt energy_shift = 0;      // (N - p_offset * q_offset)^2
  BigInt reduction_shift = 0;   // 0 until quadratized
  std::uint32_t total_vars = 0; // factor bits plus any ancillas

  std::uint32_t ancilla_count() const { return total_vars - layout.var_count(); }

  BigInt energy_shifted(const BigInt& energy_full) const {
    return energy_full - energy_shift;
  }

  /// Shifted-convention energy certifying that an assignment factors big_n.
  BigInt target_energy() const { return -energy_shift - reduction_shift; }

  /// Full-convention energy at a factorization.
  BigInt solution_energy_full() const { return -reduction_shift; }

  bool is_solution_energy(const BigInt& energy_full) const {
    return energy_full == solution_energy_full();
  }

  /// Reads the candidate factors off an assignment. Ancilla bits beyond the
  /// factor variables are ignored.
  std::pair<BigInt, BigInt> decode(const Assignment& a) const {
    const std::uint32_t m = layout.free_bits_per_factor();
    if (a.size() < layout.var_count()) {
      throw AssignmentTooShort("assignment covers " + std::to_string(a.size()) +
                               " variables, model uses " +
                               std::to_string(layout.var_count()));
    }
    const std::uint32_t first_weight = layout.fix_lsb ? 1u : 0u;
    BigInt p = layout.p_offset + (layout.fix_lsb ? 1 : 0);
    BigInt q = layout.q_offset + (layout.fix_lsb ? 1 : 0);
    for (std::uint32_t l = 0; l < m; ++l) {
      if (a[l]) p += pow2(first_weight + l);
      if (a[m + l]) q += pow2(first_weight + l);
    }
    return {p, q};
  }
};

namespace detail {

/// Degree-1 polynomial encoding one factor: offset (+1 if fix_lsb) plus the
/// weighted free bits starting at variable index first_var.
inline BinaryPolynomial factor_expression(const FactorLayout& layout, VarId first_var,
                                          const BigInt& block_offset) {
  BinaryPolynomial expr(block_offset + (layout.fix_lsb ? 1 : 0));
  const std::uint32_t first_weight = layout.fix_lsb ? 1u : 0u;
  for (std::uint32_t l = 0; l < layout.free_bits_per_factor(); ++l) {
    expr.add_term({static_cast<VarId>(first_var + l)}, pow2(first_weight + l));
  }
  return expr;
}

}  // namespace detail

/// Expands (p_expr * q_expr - big_n)^2 to canonical multilinear form. The
/// expressions may be anything of degree <= 1 over disjoint variables; the
/// bit-refinement solver reuses this with signed stage corrections.
inline BinaryPolynomial build_product_cost(const BinaryPolynomial& p_expr,
                                           const BinaryPolynomial& q_expr,
                                           const BigInt& big_n) {
  BinaryPolynomial residual = p_expr * q_expr;
  residual -= big_n;
  return residual * residual;
}

/// Builds (p * q - N)^2 over the layout's encoding, including block offsets.
/// With zero offsets this is the plain model; the quadratic cross
/// coefficients then equal 2^(2(l1+l2)) - 2^(l1+l2+1) N, cubic terms carry
/// 2^(l1+l2+2*l3+1) and quartic terms 2^(l1+l2+l3+l4+2).
inline FactorModel build_range_hubo(const BigInt& big_n, const FactorLayout& layout) {
  layout.validate();
  if (big_n <= 0) throw Error("the number to factor must be positive");
  if (layout.fix_lsb && (big_n & 1) == 0) {
    throw NotOddCapable("fix_lsb encodes odd factors; " + to_decimal(big_n) + " is even");
  }
  const std::uint32_t m = layout.free_bits_per_factor();
  BinaryPolynomial p_expr = detail::factor_expression(layout, 0, layout.p_offset);
  BinaryPolynomial q_expr = detail::factor_expression(layout, m, layout.q_offset);

  FactorModel model;
  model.big_n = big_n;
  model.layout = layout;
  model.poly = build_product_cost(p_expr, q_expr, big_n);
  const BigInt dropped = big_n - layout.p_offset * layout.q_offset;
  model.energy_shift = dropped * dropped;
  model.total_vars = layout.var_count();
  return model;
}

/// The zero-offset special case; rejects layouts that carry block offsets.
inline FactorModel build_plain_hubo(const BigInt& big_n, const FactorLayout& layout) {
  if (layout.p_offset != 0 || layout.q_offset != 0) {
    throw InvalidLayout("plain model requires zero block offsets");
  }
  return build_range_hubo(big_n, layout);
}

/// Shifted-convention energy at any factorization representable by the
/// layout: -(N - p_offset * q_offset)^2, which is -N^2 for the plain model.
inline BigInt expected_target_energy(const FactorModel& model) {
  return model.target_energy();
}

/// Smallest symmetric layout width that can represent a balanced factor
/// pair: the bit length of floor(sqrt(N)).
inline std::uint32_t default_bits_for(const BigInt& big_n) {
  if (big_n < 1) throw Error("the number to factor must be positive");
  return std::max(1u, bit_length(isqrt(big_n)));
}

}  // namespace hubofact
