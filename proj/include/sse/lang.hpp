//===-- lang.hpp - Mini imperative language ---------------------*- C++ -*-===//
//
// Parser, program model and lowering for the `.sx` integer language.
//
// A program declares symbolic integer inputs and then runs a statement list:
//
//   sym int x;
//   sym int y;
//   if (x < 0) { x = 0 - x; } else { }
//   while (y > 0) { y = y - 1; }
//   assert(x >= 0);
//   print(x + y);
//
// Multiplication needs a variable-free operand so that every path condition
// stays linear. Integer division is unrestricted; its zero-divisor handling
// lives in the symbolic interpreter.
//
//===----------------------------------------------------------------------===//
#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace sse {

enum class Rel { Lt, Le, Gt, Ge, Eq, Ne };

Rel complement(Rel r);
std::string_view to_string(Rel r);
bool is_equation(Rel r);

struct IntExpr;
using ExprPtr = std::shared_ptr<const IntExpr>;

struct IntExpr {
  enum class Kind { Lit, Var, Neg, Add, Sub, Mul, Div };

  Kind kind = Kind::Lit;
  std::int64_t value = 0;
  std::string name;
  ExprPtr lhs;
  ExprPtr rhs;

  static ExprPtr lit(std::int64_t v);
  static ExprPtr var(std::string n);
  static ExprPtr unary(Kind k, ExprPtr e);
  static ExprPtr binary(Kind k, ExprPtr l, ExprPtr r);

  bool has_vars() const;
};

bool operator==(const IntExpr &a, const IntExpr &b);

struct Cond {
  ExprPtr lhs;
  Rel rel = Rel::Eq;
  ExprPtr rhs;
};

bool operator==(const Cond &a, const Cond &b);
Cond negate(const Cond &c);

struct Stmt {
  enum class Kind { Assign, If, While, Assert, Error, Print };

  Kind kind = Kind::Assign;
  int line = 0;
  std::string target;  // Assign
  ExprPtr expr;        // Assign, Print
  Cond cond;           // If, While, Assert
  std::vector<Stmt> then_body;
  std::vector<Stmt> else_body;
  std::string message; // Error
};

bool operator==(const Stmt &a, const Stmt &b);

struct Program {
  std::vector<std::string> inputs;
  std::vector<Stmt> body;
};

bool operator==(const Program &a, const Program &b);

class ParseError : public std::runtime_error {
public:
  ParseError(int line, int column, const std::string &msg);
  int line() const { return line_; }
  int column() const { return column_; }

private:
  int line_;
  int column_;
};

/// Parses and validates a program. Throws ParseError with a 1-based
/// line/column for both syntax and semantic problems.
Program parse_program(std::string_view source);

Program load_program(const std::string &path);

std::string print_program(const Program &p);
std::string print_expr(const IntExpr &e);
std::string print_cond(const Cond &c);

/// Upper bound on branch points along one path once every loop is unrolled
/// `loop_bound` times. Divisions by a non-literal divisor count as a branch.
int longest_path_branch_count(const Program &p, int loop_bound);

//===----------------------------------------------------------------------===//
// Lowered form
//===----------------------------------------------------------------------===//

enum class BranchOrigin { If, Loop, Assert };

struct Instr {
  enum class Op { Assign, Print, Branch, LoopEnter, LoopHead, Jump, Fail, End };

  Op op = Op::End;
  int line = 0;
  std::string target;
  ExprPtr expr;
  Cond cond;
  BranchOrigin origin = BranchOrigin::If;
  int on_true = -1;
  int on_false = -1;
  int loop = -1;
  int jump = -1;
  std::string message;
};

/// Flat instruction list. Instruction 0 is the entry point.
struct Code {
  std::vector<std::string> inputs;
  std::vector<Instr> instrs;
  int loop_count = 0;
};

Code lower(const Program &p);

} // namespace sse
