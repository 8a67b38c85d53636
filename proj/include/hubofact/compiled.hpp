#pragma once

#include <cstdint>
#include <vector>

#include "hubofact/bigint.hpp"
#include "hubofact/polynomial.hpp"

namespace hubofact::detail {

/// Flat, cache-friendly image of a BinaryPolynomial plus a per-variable
/// incidence index. Energy is a template parameter so small models run on
/// native 128-bit arithmetic and everything else on BigInt; both are exact.
template <class Energy>
struct CompiledPoly {
  std::uint32_t num_vars = 0;
  Energy offset{};
  std::vector<std::uint32_t> term_begin;  // size term_count + 1, into term_vars
  std::vector<VarId> term_vars;
  std::vector<std::uint8_t> term_size;
  std::vector<Energy> term_coeff;
  std::vector<std::uint32_t> var_begin;   // size num_vars + 1, into var_terms
  std::vector<std::uint32_t> var_terms;

  std::size_t term_count() const { return term_coeff.size(); }

  static Energy convert(const BigInt& v) {
    if constexpr (std::is_same_v<Energy, BigInt>) {
      return v;
    } else {
      return to_int128(v);
    }
  }

  static CompiledPoly compile(const BinaryPolynomial& poly, std::uint32_t min_vars = 0) {
    CompiledPoly out;
    out.num_vars = static_cast<std::uint32_t>(std::max<std::size_t>(poly.var_span(), min_vars));
    out.offset = convert(poly.offset());
    out.term_begin.push_back(0);
    std::vector<std::uint32_t> incidence(out.num_vars, 0);
    for (const auto& [vars, coeff] : poly.terms()) {
      if (vars.size() > 255) throw Error("terms are limited to 255 variables");
      for (VarId v : vars) {
        out.term_vars.push_back(v);
        ++incidence[v];
      }
      out.term_begin.push_back(static_cast<std::uint32_t>(out.term_vars.size()));
      out.term_size.push_back(static_cast<std::uint8_t>(vars.size()));
      out.term_coeff.push_back(convert(coeff));
    }
    out.var_begin.resize(out.num_vars + 1, 0);
    for (std::uint32_t v = 0; v < out.num_vars; ++v) {
      out.var_begin[v + 1] = out.var_begin[v] + incidence[v];
    }
    std::vector<std::uint32_t> cursor(out.var_begin.begin(), out.var_begin.end() - 1);
    out.var_terms.resize(out.term_vars.size());
    for (std::uint32_t t = 0; t < out.term_count(); ++t) {
      for (std::uint32_t k = out.term_begin[t]; k < out.term_begin[t + 1]; ++k) {
        out.var_terms[cursor[out.term_vars[k]]++] = t;
      }
    }
    return out;
  }
};

/// Mutable solver state over a CompiledPoly: the current bits, a per-term
/// count of set variables, the exact current energy, and the exact energy
/// delta for flipping each variable. Deltas are maintained incrementally so
/// a proposal costs O(1) and an accepted flip costs O(incidence).
template <class Energy>
struct FlipState {
  const CompiledPoly<Energy>* poly = nullptr;
  std::vector<std::uint8_t> bits;
  std::vector<std::uint8_t> ones;
  std::vector<Energy> delta;
  Energy energy{};

  void reset(const CompiledPoly<Energy>& p, const std::vector<std::uint8_t>& assignment) {
    poly = &p;
    bits = assignment;
    bits.resize(p.num_vars, 0);
    ones.assign(p.term_count(), 0);
    delta.assign(p.num_vars, Energy{});
    energy = p.offset;
    for (std::uint32_t t = 0; t < p.term_count(); ++t) {
      std::uint8_t count = 0;
      for (std::uint32_t k = p.term_begin[t]; k < p.term_begin[t + 1]; ++k) {
        count = static_cast<std::uint8_t>(count + bits[p.term_vars[k]]);
      }
      ones[t] = count;
      const std::uint8_t size = p.term_size[t];
      if (count == size) {
        energy += p.term_coeff[t];
        // flipping any member clears the product
        for (std::uint32_t k = p.term_begin[t]; k < p.term_begin[t + 1]; ++k) {
          delta[p.term_vars[k]] -= p.term_coeff[t];
        }
      } else if (count + 1 == size) {
        // flipping the single unset member completes the product
        for (std::uint32_t k = p.term_begin[t]; k < p.term_begin[t + 1]; ++k) {
          if (!bits[p.term_vars[k]]) {
            delta[p.term_vars[k]] += p.term_coeff[t];
            break;
          }
        }
      }
    }
  }

  /// Applies the flip of variable v and keeps energy, ones and delta exact.
  void flip(VarId v) {
    const CompiledPoly<Energy>& p = *poly;
    const std::int8_t sign = bits[v] ? -1 : 1;
    energy += delta[v];
    for (std::uint32_t idx = p.var_begin[v]; idx < p.var_begin[v + 1]; ++idx) {
      const std::uint32_t t = p.var_terms[idx];
      const std::uint8_t size = p.term_size[t];
      const std::uint8_t others = static_cast<std::uint8_t>(ones[t] - bits[v]);
      if (others + 1 == size) {
        // every other member is set: their products all include v
        const Energy step = sign > 0 ? p.term_coeff[t] : -p.term_coeff[t];
        for (std::uint32_t k = p.term_begin[t]; k < p.term_begin[t + 1]; ++k) {
          const VarId j = p.term_vars[k];
          if (j != v) delta[j] -= step;
        }
      } else if (others + 2 == size) {
        // exactly one other member unset: only its completion changes
        const Energy step = sign > 0 ? p.term_coeff[t] : -p.term_coeff[t];
        for (std::uint32_t k = p.term_begin[t]; k < p.term_begin[t + 1]; ++k) {
          const VarId j = p.term_vars[k];
          if (j != v && !bits[j]) {
            delta[j] += step;
            break;
          }
        }
      }
      ones[t] = static_cast<std::uint8_t>(ones[t] + sign);
    }
    bits[v] ^= 1;
    delta[v] = -delta[v];
  }
};

}  // namespace hubofact::detail
