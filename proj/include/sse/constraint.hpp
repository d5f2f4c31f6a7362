//===-- constraint.hpp - Linear forms and normalized constraints -*- C++ -*-===//
#pragma once

#include "sse/lang.hpp"

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace sse {

/// Thrown when an intermediate value leaves the int64 range.
class ArithmeticOverflow : public std::overflow_error {
public:
  using std::overflow_error::overflow_error;
};

std::int64_t checked_add(std::int64_t a, std::int64_t b);
std::int64_t checked_sub(std::int64_t a, std::int64_t b);
std::int64_t checked_mul(std::int64_t a, std::int64_t b);
std::int64_t floor_div(std::int64_t a, std::int64_t b);
std::int64_t ceil_div(std::int64_t a, std::int64_t b);

using Model = std::map<std::string, std::int64_t>;

/// c0 + sum(ci * Xi). The coefficient map never holds a zero.
struct LinearForm {
  std::int64_t constant = 0;
  std::map<std::string, std::int64_t> coeffs;

  static LinearForm of_constant(std::int64_t c);
  static LinearForm of_var(const std::string &name);

  bool is_constant() const { return coeffs.empty(); }
  std::int64_t eval(const Model &m) const;
  std::int64_t coeff(const std::string &name) const;
};

LinearForm operator+(const LinearForm &a, const LinearForm &b);
LinearForm operator-(const LinearForm &a, const LinearForm &b);
LinearForm operator-(const LinearForm &a);
LinearForm scale(const LinearForm &a, std::int64_t k);
bool operator==(const LinearForm &a, const LinearForm &b);
std::string to_string(const LinearForm &f);

/// sum(ci * Xi) rel rhs, in canonical form:
///   - rel is one of Le, Ge, Eq, Ne (strict relations are tightened),
///   - coefficients are divided by their gcd,
///   - the first coefficient (by variable name) is positive,
///   - a variable-free constraint is either `0 <= 0` (true) or `0 <= -1`
///     (false).
struct Constraint {
  std::map<std::string, std::int64_t> coeffs;
  Rel rel = Rel::Le;
  std::int64_t rhs = 0;

  bool is_constant() const { return coeffs.empty(); }
  bool is_true() const;
  bool is_false() const;
  bool holds(const Model &m) const;
};

bool operator==(const Constraint &a, const Constraint &b);
bool operator<(const Constraint &a, const Constraint &b);
std::string to_string(const Constraint &c);
std::string to_string(const std::vector<Constraint> &cs);

/// Canonicalizes `sum(coeffs) rel rhs`; any relation is accepted.
Constraint normalize(std::map<std::string, std::int64_t> coeffs, Rel rel,
                     std::int64_t rhs);

/// Builds the canonical constraint for `lhs rel rhs`.
Constraint make_constraint(const LinearForm &lhs, Rel rel, const LinearForm &rhs);

/// Canonical logical complement.
Constraint complement(const Constraint &c);

Constraint constant_true();
Constraint constant_false();

} // namespace sse
