#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <string>

#include "hubofact/errors.hpp"

namespace hubofact {

/// Exact signed integer of arbitrary width. Every coefficient and every
/// energy in this library is a BigInt; nothing is ever rounded through a
/// floating-point type.
using BigInt = boost::multiprecision::cpp_int;

inline BigInt pow2(unsigned exponent) { return BigInt(1) << exponent; }

/// Number of bits needed to represent v (bit_length(0) == 0).
inline unsigned bit_length(const BigInt& v) {
  if (v <= 0) return 0;
  return static_cast<unsigned>(boost::multiprecision::msb(v)) + 1;
}

/// Floor of the integer square root.
inline BigInt isqrt(const BigInt& v) {
  if (v < 0) throw Error("isqrt of negative value");
  return boost::multiprecision::sqrt(v);
}

/// Parses a plain decimal integer (optional leading '-'); rejects anything
/// else, in particular exponent notation, so no value can be silently
/// truncated on the way in.
inline BigInt parse_decimal(const std::string& text) {
  if (text.empty()) throw ParseFailure("empty integer literal");
  std::size_t start = (text[0] == '-') ? 1 : 0;
  if (start == text.size()) throw ParseFailure("bare sign is not an integer");
  for (std::size_t i = start; i < text.size(); ++i) {
    if (text[i] < '0' || text[i] > '9') {
      throw ParseFailure("invalid integer literal: '" + text + "'");
    }
  }
  return BigInt(text);
}

inline std::string to_decimal(const BigInt& v) { return v.str(); }

/// True when |offset| + sum(|coeff|) stays far enough below 2^127 that every
/// partial energy and flip delta fits a native signed 128-bit integer.
inline bool fits_int128(const BigInt& magnitude_bound) {
  static const BigInt limit = BigInt(1) << 120;
  return magnitude_bound < limit;
}

inline __int128 to_int128(const BigInt& v) {
  const bool negative = v < 0;
  BigInt a = negative ? BigInt(-v) : v;
  const auto lo = static_cast<std::uint64_t>(a & 0xFFFFFFFFFFFFFFFFULL);
  const auto hi = static_cast<std::uint64_t>((a >> 64) & 0xFFFFFFFFFFFFFFFFULL);
  if (a >> 128 != 0) throw Error("value does not fit in 128 bits");
  unsigned __int128 u = (static_cast<unsigned __int128>(hi) << 64) | lo;
  return negative ? -static_cast<__int128>(u) : static_cast<__int128>(u);
}

inline BigInt from_int128(__int128 v) {
  const bool negative = v < 0;
  unsigned __int128 u =
      negative ? static_cast<unsigned __int128>(-v) : static_cast<unsigned __int128>(v);
  BigInt r = static_cast<std::uint64_t>(u >> 64);
  r <<= 64;
  r |= static_cast<std::uint64_t>(u & 0xFFFFFFFFFFFFFFFFULL);
  return negative ? BigInt(-r) : r;
}

}  // namespace hubofact
