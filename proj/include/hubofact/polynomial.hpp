#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <ostream>
#include <set>
#include <span>
#include <sstream>
#include <vector>

#include "hubofact/bigint.hpp"
#include "hubofact/errors.hpp"

namespace hubofact {

/// Dense, 0-based variable index. Model builders lay out factor bits first
/// and ancillas after them; the polynomial itself treats all indices alike.
using VarId = std::uint32_t;

/// One bit per VarId, index-addressed.
using Assignment = std::vector<std::uint8_t>;

/// Spin values, each -1 or +1.
using SpinAssignment = std::vector<std::int8_t>;

/// Multilinear polynomial over binary variables with exact integer
/// coefficients and a constant offset.
///
/// Canonical form is maintained on every mutation: each stored term has a
/// strictly increasing variable list (x^2 = x already applied), appears once,
/// and has a nonzero coefficient. Treat instances as values; concurrent
/// const access is safe.
class BinaryPolynomial {
 public:
  using TermMap = std::map<std::vector<VarId>, BigInt>;

  BinaryPolynomial() = default;
  explicit BinaryPolynomial(BigInt constant) : offset_(std::move(constant)) {}

  static BinaryPolynomial variable(VarId v) {
    BinaryPolynomial p;
    p.terms_.emplace(std::vector<VarId>{v}, BigInt(1));
    return p;
  }

  /// Accumulates coeff onto the term given by vars. The input may be
  /// unsorted and may repeat variables; repeats collapse by idempotence.
  /// An empty variable list adds to the constant offset.
  BinaryPolynomial& add_term(std::span<const VarId> vars, const BigInt& coeff) {
    if (coeff == 0) return *this;
    std::vector<VarId> key(vars.begin(), vars.end());
    std::sort(key.begin(), key.end());
    key.erase(std::unique(key.begin(), key.end()), key.end());
    if (key.empty()) {
      offset_ += coeff;
      return *this;
    }
    auto it = terms_.find(key);
    if (it == terms_.end()) {
      terms_.emplace(std::move(key), coeff);
    } else {
      it->second += coeff;
      if (it->second == 0) terms_.erase(it);
    }
    return *this;
  }

  BinaryPolynomial& add_term(std::initializer_list<VarId> vars, const BigInt& coeff) {
    return add_term(std::span<const VarId>(vars.begin(), vars.size()), coeff);
  }

  const TermMap& terms() const { return terms_; }
  const BigInt& offset() const { return offset_; }
  std::size_t term_count() const { return terms_.size(); }
  bool is_constant() const { return terms_.empty(); }

  int degree() const {
    std::size_t d = 0;
    for (const auto& [vars, coeff] : terms_) d = std::max(d, vars.size());
    return static_cast<int>(d);
  }

  std::set<VarId> variables() const {
    std::set<VarId> out;
    for (const auto& [vars, coeff] : terms_) out.insert(vars.begin(), vars.end());
    return out;
  }

  std::size_t num_vars() const { return variables().size(); }

  /// One past the largest referenced variable; the minimum assignment length
  /// accepted by evaluate().
  std::size_t var_span() const {
    if (terms_.empty()) return 0;
    std::size_t span = 0;
    for (const auto& [vars, coeff] : terms_) {
      span = std::max<std::size_t>(span, vars.back() + 1);
    }
    return span;
  }

  /// Exact energy: offset + sum over terms of coeff * product of bits.
  BigInt evaluate(const Assignment& a) const {
    if (a.size() < var_span()) {
      throw AssignmentTooShort("assignment covers " + std::to_string(a.size()) +
                               " variables, polynomial references " +
                               std::to_string(var_span()));
    }
    BigInt total = offset_;
    for (const auto& [vars, coeff] : terms_) {
      bool all_set = true;
      for (VarId v : vars) {
        if (!a[v]) {
          all_set = false;
          break;
        }
      }
      if (all_set) total += coeff;
    }
    return total;
  }

  BinaryPolynomial& operator+=(const BinaryPolynomial& rhs) {
    offset_ += rhs.offset_;
    for (const auto& [vars, coeff] : rhs.terms_) add_term(vars, coeff);
    return *this;
  }

  BinaryPolynomial& operator-=(const BinaryPolynomial& rhs) {
    offset_ -= rhs.offset_;
    for (const auto& [vars, coeff] : rhs.terms_) add_term(vars, -coeff);
    return *this;
  }

  BinaryPolynomial& operator+=(const BigInt& c) {
    offset_ += c;
    return *this;
  }

  BinaryPolynomial& operator-=(const BigInt& c) {
    offset_ -= c;
    return *this;
  }

  BinaryPolynomial& operator*=(const BigInt& c) {
    if (c == 0) {
      terms_.clear();
      offset_ = 0;
      return *this;
    }
    for (auto& [vars, coeff] : terms_) coeff *= c;
    offset_ *= c;
    return *this;
  }

  friend BinaryPolynomial operator+(BinaryPolynomial lhs, const BinaryPolynomial& rhs) {
    lhs += rhs;
    return lhs;
  }

  friend BinaryPolynomial operator-(BinaryPolynomial lhs, const BinaryPolynomial& rhs) {
    lhs -= rhs;
    return lhs;
  }

  friend BinaryPolynomial operator*(const BinaryPolynomial& a, const BinaryPolynomial& b) {
    BinaryPolynomial out;
    out.offset_ = a.offset_ * b.offset_;
    if (b.offset_ != 0) {
      for (const auto& [vars, coeff] : a.terms_) out.add_term(vars, coeff * b.offset_);
    }
    if (a.offset_ != 0) {
      for (const auto& [vars, coeff] : b.terms_) out.add_term(vars, coeff * a.offset_);
    }
    std::vector<VarId> merged;
    for (const auto& [va, ca] : a.terms_) {
      for (const auto& [vb, cb] : b.terms_) {
        merged.clear();
        std::set_union(va.begin(), va.end(), vb.begin(), vb.end(),
                       std::back_inserter(merged));
        out.add_term(merged, ca * cb);
      }
    }
    return out;
  }

  friend BinaryPolynomial operator*(BinaryPolynomial p, const BigInt& c) {
    p *= c;
    return p;
  }

  friend BinaryPolynomial operator*(const BigInt& c, BinaryPolynomial p) {
    p *= c;
    return p;
  }

  friend BinaryPolynomial operator-(BinaryPolynomial p) {
    p *= BigInt(-1);
    return p;
  }

  friend bool operator==(const BinaryPolynomial& a, const BinaryPolynomial& b) {
    return a.offset_ == b.offset_ && a.terms_ == b.terms_;
  }

  /// |offset| + sum of |coeff|; an upper bound on |evaluate| over all
  /// assignments, used to pick a solver arithmetic width.
  BigInt magnitude_bound() const {
    BigInt bound = boost::multiprecision::abs(offset_);
    for (const auto& [vars, coeff] : terms_) bound += boost::multiprecision::abs(coeff);
    return bound;
  }

  friend std::ostream& operator<<(std::ostream& os, const BinaryPolynomial& p) {
    bool first = true;
    for (const auto& [vars, coeff] : p.terms_) {
      if (!first) os << " + ";
      first = false;
      os << coeff;
      for (VarId v : vars) os << "*x" << v;
    }
    if (p.offset_ != 0 || first) {
      if (!first) os << " + ";
      os << p.offset_;
    }
    return os;
  }

 private:
  TermMap terms_;
  BigInt offset_ = 0;
};

/// Functional form: returns a copy with the term accumulated.
inline BinaryPolynomial add_term(const BinaryPolynomial& poly, std::span<const VarId> vars,
                                 const BigInt& coeff) {
  BinaryPolynomial out = poly;
  out.add_term(vars, coeff);
  return out;
}

/// sigma = 2q - 1 applied elementwise.
inline SpinAssignment binary_to_spin(const Assignment& bits) {
  SpinAssignment out;
  out.reserve(bits.size());
  for (auto b : bits) {
    if (b > 1) throw Error("binary assignment entries must be 0 or 1");
    out.push_back(static_cast<std::int8_t>(2 * b - 1));
  }
  return out;
}

/// q = (sigma + 1) / 2 applied elementwise.
inline Assignment spin_to_binary(const SpinAssignment& spins) {
  Assignment out;
  out.reserve(spins.size());
  for (auto s : spins) {
    if (s != -1 && s != 1) throw Error("spin assignment entries must be -1 or +1");
    out.push_back(static_cast<std::uint8_t>((s + 1) / 2));
  }
  return out;
}

}  // namespace hubofact
