#include "sse/constraint.hpp"

#include <numeric>
#include <sstream>
#include <tuple>

namespace sse {

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r))
    throw ArithmeticOverflow("integer overflow in addition");
  return r;
}

std::int64_t checked_sub(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_sub_overflow(a, b, &r))
    throw ArithmeticOverflow("integer overflow in subtraction");
  return r;
}

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r))
    throw ArithmeticOverflow("integer overflow in multiplication");
  return r;
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  if (b == -1)
    return checked_sub(0, a);
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0)))
    --q;
  return q;
}

std::int64_t ceil_div(std::int64_t a, std::int64_t b) {
  if (b == -1)
    return checked_sub(0, a);
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) == (b < 0)))
    ++q;
  return q;
}

LinearForm LinearForm::of_constant(std::int64_t c) {
  LinearForm f;
  f.constant = c;
  return f;
}

LinearForm LinearForm::of_var(const std::string &name) {
  LinearForm f;
  f.coeffs[name] = 1;
  return f;
}

std::int64_t LinearForm::eval(const Model &m) const {
  std::int64_t v = constant;
  for (const auto &[name, c] : coeffs) {
    auto it = m.find(name);
    if (it == m.end())
      throw std::out_of_range("model has no value for '" + name + "'");
    v = checked_add(v, checked_mul(c, it->second));
  }
  return v;
}

std::int64_t LinearForm::coeff(const std::string &name) const {
  auto it = coeffs.find(name);
  return it == coeffs.end() ? 0 : it->second;
}

static void add_scaled(std::map<std::string, std::int64_t> &into,
                       const std::map<std::string, std::int64_t> &from,
                       std::int64_t k) {
  for (const auto &[name, c] : from) {
    std::int64_t v = checked_add(into[name], checked_mul(c, k));
    if (v == 0)
      into.erase(name);
    else
      into[name] = v;
  }
}

LinearForm operator+(const LinearForm &a, const LinearForm &b) {
  LinearForm r = a;
  r.constant = checked_add(a.constant, b.constant);
  add_scaled(r.coeffs, b.coeffs, 1);
  return r;
}

LinearForm operator-(const LinearForm &a, const LinearForm &b) {
  LinearForm r = a;
  r.constant = checked_sub(a.constant, b.constant);
  add_scaled(r.coeffs, b.coeffs, -1);
  return r;
}

LinearForm operator-(const LinearForm &a) { return scale(a, -1); }

LinearForm scale(const LinearForm &a, std::int64_t k) {
  LinearForm r;
  if (k == 0)
    return r;
  r.constant = checked_mul(a.constant, k);
  for (const auto &[name, c] : a.coeffs)
    r.coeffs[name] = checked_mul(c, k);
  return r;
}

bool operator==(const LinearForm &a, const LinearForm &b) {
  return a.constant == b.constant && a.coeffs == b.coeffs;
}

static void print_terms(std::ostringstream &os,
                        const std::map<std::string, std::int64_t> &coeffs) {
  bool first = true;
  for (const auto &[name, c] : coeffs) {
    std::string mag = std::to_string(c);
    if (c < 0)
      mag = mag.substr(1);
    if (first)
      os << (c < 0 ? "-" : "");
    else
      os << (c < 0 ? " - " : " + ");
    if (mag != "1")
      os << mag << "*";
    os << name;
    first = false;
  }
}

std::string to_string(const LinearForm &f) {
  std::ostringstream os;
  if (f.coeffs.empty())
    return std::to_string(f.constant);
  print_terms(os, f.coeffs);
  if (f.constant > 0)
    os << " + " << f.constant;
  else if (f.constant < 0)
    os << " - " << std::to_string(f.constant).substr(1);
  return os.str();
}

Constraint constant_true() { return Constraint{{}, Rel::Le, 0}; }
Constraint constant_false() { return Constraint{{}, Rel::Le, -1}; }

bool Constraint::is_true() const { return coeffs.empty() && rhs >= 0; }
bool Constraint::is_false() const { return coeffs.empty() && rhs < 0; }

bool Constraint::holds(const Model &m) const {
  std::int64_t v = 0;
  for (const auto &[name, c] : coeffs) {
    auto it = m.find(name);
    if (it == m.end())
      throw std::out_of_range("model has no value for '" + name + "'");
    v = checked_add(v, checked_mul(c, it->second));
  }
  switch (rel) {
  case Rel::Lt: return v < rhs;
  case Rel::Le: return v <= rhs;
  case Rel::Gt: return v > rhs;
  case Rel::Ge: return v >= rhs;
  case Rel::Eq: return v == rhs;
  case Rel::Ne: return v != rhs;
  }
  return false;
}

bool operator==(const Constraint &a, const Constraint &b) {
  return a.rel == b.rel && a.rhs == b.rhs && a.coeffs == b.coeffs;
}

bool operator<(const Constraint &a, const Constraint &b) {
  return std::tie(a.coeffs, a.rel, a.rhs) < std::tie(b.coeffs, b.rel, b.rhs);
}

std::string to_string(const Constraint &c) {
  if (c.is_constant())
    return c.is_true() ? "true" : "false";
  std::ostringstream os;
  print_terms(os, c.coeffs);
  os << " " << to_string(c.rel) << " " << c.rhs;
  return os.str();
}

std::string to_string(const std::vector<Constraint> &cs) {
  if (cs.empty())
    return "true";
  std::string out;
  for (std::size_t i = 0; i < cs.size(); ++i) {
    if (i)
      out += " && ";
    out += to_string(cs[i]);
  }
  return out;
}

static bool eval_constant(Rel rel, std::int64_t rhs) {
  switch (rel) {
  case Rel::Lt: return 0 < rhs;
  case Rel::Le: return 0 <= rhs;
  case Rel::Gt: return 0 > rhs;
  case Rel::Ge: return 0 >= rhs;
  case Rel::Eq: return rhs == 0;
  case Rel::Ne: return rhs != 0;
  }
  return false;
}

Constraint normalize(std::map<std::string, std::int64_t> coeffs, Rel rel,
                     std::int64_t rhs) {
  for (auto it = coeffs.begin(); it != coeffs.end();)
    it = it->second == 0 ? coeffs.erase(it) : std::next(it);
  if (coeffs.empty())
    return eval_constant(rel, rhs) ? constant_true() : constant_false();
  if (rel == Rel::Lt) {
    rel = Rel::Le;
    rhs = checked_sub(rhs, 1);
  } else if (rel == Rel::Gt) {
    rel = Rel::Ge;
    rhs = checked_add(rhs, 1);
  }
  std::int64_t g = 0;
  for (const auto &[name, c] : coeffs)
    g = std::gcd(g, c);
  if (g > 1) {
    switch (rel) {
    case Rel::Le: rhs = floor_div(rhs, g); break;
    case Rel::Ge: rhs = ceil_div(rhs, g); break;
    case Rel::Eq:
      if (rhs % g != 0)
        return constant_false();
      rhs /= g;
      break;
    case Rel::Ne:
      if (rhs % g != 0)
        return constant_true();
      rhs /= g;
      break;
    default: break;
    }
    for (auto &[name, c] : coeffs)
      c /= g;
  }
  if (coeffs.begin()->second < 0) {
    for (auto &[name, c] : coeffs)
      c = checked_sub(0, c);
    rhs = checked_sub(0, rhs);
    if (rel == Rel::Le)
      rel = Rel::Ge;
    else if (rel == Rel::Ge)
      rel = Rel::Le;
  }
  return Constraint{std::move(coeffs), rel, rhs};
}

Constraint make_constraint(const LinearForm &lhs, Rel rel, const LinearForm &rhs) {
  LinearForm d = lhs - rhs;
  return normalize(d.coeffs, rel, checked_sub(0, d.constant));
}

Constraint complement(const Constraint &c) {
  if (c.is_constant())
    return c.is_true() ? constant_false() : constant_true();
  return normalize(c.coeffs, complement(c.rel), c.rhs);
}

} // namespace sse
