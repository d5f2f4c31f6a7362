//===-- lang.cpp - Mini imperative language ---------------------*- C++ -*-===//

#include "sse/lang.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

namespace sse {

Rel complement(Rel r) {
  switch (r) {
  case Rel::Lt: return Rel::Ge;
  case Rel::Le: return Rel::Gt;
  case Rel::Gt: return Rel::Le;
  case Rel::Ge: return Rel::Lt;
  case Rel::Eq: return Rel::Ne;
  case Rel::Ne: return Rel::Eq;
  }
  return r;
}

std::string_view to_string(Rel r) {
  switch (r) {
  case Rel::Lt: return "<";
  case Rel::Le: return "<=";
  case Rel::Gt: return ">";
  case Rel::Ge: return ">=";
  case Rel::Eq: return "==";
  case Rel::Ne: return "!=";
  }
  return "?";
}

bool is_equation(Rel r) { return r == Rel::Eq || r == Rel::Ne; }

ExprPtr IntExpr::lit(std::int64_t v) {
  auto e = std::make_shared<IntExpr>();
  e->kind = Kind::Lit;
  e->value = v;
  return e;
}

ExprPtr IntExpr::var(std::string n) {
  auto e = std::make_shared<IntExpr>();
  e->kind = Kind::Var;
  e->name = std::move(n);
  return e;
}

ExprPtr IntExpr::unary(Kind k, ExprPtr x) {
  auto e = std::make_shared<IntExpr>();
  e->kind = k;
  e->lhs = std::move(x);
  return e;
}

ExprPtr IntExpr::binary(Kind k, ExprPtr l, ExprPtr r) {
  auto e = std::make_shared<IntExpr>();
  e->kind = k;
  e->lhs = std::move(l);
  e->rhs = std::move(r);
  return e;
}

bool IntExpr::has_vars() const {
  switch (kind) {
  case Kind::Lit: return false;
  case Kind::Var: return true;
  case Kind::Neg: return lhs->has_vars();
  default: return lhs->has_vars() || rhs->has_vars();
  }
}

static bool same(const ExprPtr &a, const ExprPtr &b) {
  if (!a || !b)
    return !a && !b;
  return *a == *b;
}

bool operator==(const IntExpr &a, const IntExpr &b) {
  return a.kind == b.kind && a.value == b.value && a.name == b.name &&
         same(a.lhs, b.lhs) && same(a.rhs, b.rhs);
}

bool operator==(const Cond &a, const Cond &b) {
  return a.rel == b.rel && same(a.lhs, b.lhs) && same(a.rhs, b.rhs);
}

Cond negate(const Cond &c) { return Cond{c.lhs, complement(c.rel), c.rhs}; }

bool operator==(const Stmt &a, const Stmt &b) {
  // Line numbers are layout, not structure.
  return a.kind == b.kind && a.target == b.target && same(a.expr, b.expr) &&
         (a.kind == Stmt::Kind::Assign || a.kind == Stmt::Kind::Print ||
          a.kind == Stmt::Kind::Error || a.cond == b.cond) &&
         a.then_body == b.then_body && a.else_body == b.else_body &&
         a.message == b.message;
}

bool operator==(const Program &a, const Program &b) {
  return a.inputs == b.inputs && a.body == b.body;
}

ParseError::ParseError(int line, int column, const std::string &msg)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) +
                         ": " + msg),
      line_(line), column_(column) {}

namespace {

enum class Tok {
  Ident, Int, String, Sym, KwInt, If, Else, While, Assert, Error, Print,
  LParen, RParen, LBrace, RBrace, Semi, Assign, Plus, Minus, Star, Slash,
  Bang, Lt, Le, Gt, Ge, EqEq, Ne, Eof
};

struct Token {
  Tok kind;
  std::string text;
  std::int64_t value = 0;
  int line = 1;
  int col = 1;
};

std::string describe(Tok t) {
  switch (t) {
  case Tok::Ident: return "identifier";
  case Tok::Int: return "integer";
  case Tok::String: return "string";
  case Tok::Sym: return "'sym'";
  case Tok::KwInt: return "'int'";
  case Tok::If: return "'if'";
  case Tok::Else: return "'else'";
  case Tok::While: return "'while'";
  case Tok::Assert: return "'assert'";
  case Tok::Error: return "'error'";
  case Tok::Print: return "'print'";
  case Tok::LParen: return "'('";
  case Tok::RParen: return "')'";
  case Tok::LBrace: return "'{'";
  case Tok::RBrace: return "'}'";
  case Tok::Semi: return "';'";
  case Tok::Assign: return "'='";
  case Tok::Plus: return "'+'";
  case Tok::Minus: return "'-'";
  case Tok::Star: return "'*'";
  case Tok::Slash: return "'/'";
  case Tok::Bang: return "'!'";
  case Tok::Lt: return "'<'";
  case Tok::Le: return "'<='";
  case Tok::Gt: return "'>'";
  case Tok::Ge: return "'>='";
  case Tok::EqEq: return "'=='";
  case Tok::Ne: return "'!='";
  case Tok::Eof: return "end of input";
  }
  return "?";
}

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t j = 0; j < n; ++j, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
      while (i < src.size() && src[i] != '\n')
        advance(1);
      continue;
    }
    Token t{Tok::Eof, "", 0, line, col};
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_'))
        ++j;
      t.text = std::string(src.substr(i, j - i));
      static const std::pair<const char *, Tok> keywords[] = {
          {"sym", Tok::Sym},       {"int", Tok::KwInt},   {"if", Tok::If},
          {"else", Tok::Else},     {"while", Tok::While}, {"assert", Tok::Assert},
          {"error", Tok::Error},   {"print", Tok::Print}};
      t.kind = Tok::Ident;
      for (auto &[kw, k] : keywords)
        if (t.text == kw)
          t.kind = k;
      advance(j - i);
      out.push_back(std::move(t));
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      std::int64_t v = 0;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) {
        if (v > (INT64_MAX - 9) / 10)
          throw ParseError(line, col, "integer literal too large");
        v = v * 10 + (src[j] - '0');
        ++j;
      }
      t.kind = Tok::Int;
      t.value = v;
      t.text = std::string(src.substr(i, j - i));
      advance(j - i);
      out.push_back(std::move(t));
      continue;
    }
    if (c == '"') {
      std::size_t j = i + 1;
      std::string s;
      while (j < src.size() && src[j] != '"' && src[j] != '\n') {
        if (src[j] == '\\' && j + 1 < src.size()) {
          ++j;
          s += src[j] == 'n' ? '\n' : src[j];
        } else {
          s += src[j];
        }
        ++j;
      }
      if (j >= src.size() || src[j] != '"')
        throw ParseError(line, col, "unterminated string literal");
      t.kind = Tok::String;
      t.text = std::move(s);
      advance(j + 1 - i);
      out.push_back(std::move(t));
      continue;
    }
    auto two = [&](char a, char b) {
      return c == a && i + 1 < src.size() && src[i + 1] == b;
    };
    std::size_t len = 1;
    if (two('<', '=')) { t.kind = Tok::Le; len = 2; }
    else if (two('>', '=')) { t.kind = Tok::Ge; len = 2; }
    else if (two('=', '=')) { t.kind = Tok::EqEq; len = 2; }
    else if (two('!', '=')) { t.kind = Tok::Ne; len = 2; }
    else {
      switch (c) {
      case '(': t.kind = Tok::LParen; break;
      case ')': t.kind = Tok::RParen; break;
      case '{': t.kind = Tok::LBrace; break;
      case '}': t.kind = Tok::RBrace; break;
      case ';': t.kind = Tok::Semi; break;
      case '=': t.kind = Tok::Assign; break;
      case '+': t.kind = Tok::Plus; break;
      case '-': t.kind = Tok::Minus; break;
      case '*': t.kind = Tok::Star; break;
      case '/': t.kind = Tok::Slash; break;
      case '!': t.kind = Tok::Bang; break;
      case '<': t.kind = Tok::Lt; break;
      case '>': t.kind = Tok::Gt; break;
      default:
        throw ParseError(line, col, std::string("unexpected character '") + c + "'");
      }
    }
    t.text = std::string(src.substr(i, len));
    advance(len);
    out.push_back(std::move(t));
  }
  out.push_back(Token{Tok::Eof, "", 0, line, col});
  return out;
}

class Parser {
public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  Program program() {
    Program p;
    std::set<std::string> defined;
    while (peek().kind == Tok::Sym) {
      next();
      expect(Tok::KwInt);
      const Token &id = expect(Tok::Ident);
      if (defined.count(id.text))
        throw ParseError(id.line, id.col,
                         "duplicate declaration of '" + id.text + "'");
      defined.insert(id.text);
      p.inputs.push_back(id.text);
      expect(Tok::Semi);
    }
    p.body = block_items(defined, Tok::Eof);
    expect(Tok::Eof);
    return p;
  }

private:
  const Token &peek() const { return toks_[pos_]; }
  const Token &next() { return toks_[pos_++]; }

  [[noreturn]] void fail(std::initializer_list<Tok> expected) {
    const Token &t = peek();
    std::string msg = "expected ";
    bool first = true;
    for (Tok e : expected) {
      if (!first)
        msg += " or ";
      msg += describe(e);
      first = false;
    }
    msg += ", found " + (t.kind == Tok::Eof ? describe(Tok::Eof) : "'" + t.text + "'");
    throw ParseError(t.line, t.col, msg);
  }

  const Token &expect(Tok k) {
    if (peek().kind != k)
      fail({k});
    return next();
  }

  std::vector<Stmt> block_items(std::set<std::string> &defined, Tok end) {
    std::vector<Stmt> out;
    while (peek().kind != end && peek().kind != Tok::Eof)
      out.push_back(statement(defined));
    return out;
  }

  std::vector<Stmt> block(std::set<std::string> &defined) {
    expect(Tok::LBrace);
    auto body = block_items(defined, Tok::RBrace);
    expect(Tok::RBrace);
    return body;
  }

  Stmt statement(std::set<std::string> &defined) {
    const Token &t = peek();
    Stmt s;
    s.line = t.line;
    switch (t.kind) {
    case Tok::Ident: {
      next();
      s.kind = Stmt::Kind::Assign;
      s.target = t.text;
      expect(Tok::Assign);
      s.expr = expr(defined);
      expect(Tok::Semi);
      defined.insert(s.target);
      return s;
    }
    case Tok::If: {
      next();
      s.kind = Stmt::Kind::If;
      expect(Tok::LParen);
      s.cond = cond(defined);
      expect(Tok::RParen);
      std::set<std::string> then_defs = defined;
      s.then_body = block(then_defs);
      std::set<std::string> else_defs = defined;
      if (peek().kind == Tok::Else) {
        next();
        if (peek().kind == Tok::If)
          s.else_body.push_back(statement(else_defs));
        else
          s.else_body = block(else_defs);
      }
      for (const auto &v : then_defs)
        if (else_defs.count(v))
          defined.insert(v);
      return s;
    }
    case Tok::While: {
      next();
      s.kind = Stmt::Kind::While;
      expect(Tok::LParen);
      s.cond = cond(defined);
      expect(Tok::RParen);
      std::set<std::string> body_defs = defined;
      s.then_body = block(body_defs);
      return s;
    }
    case Tok::Assert: {
      next();
      s.kind = Stmt::Kind::Assert;
      expect(Tok::LParen);
      s.cond = cond(defined);
      expect(Tok::RParen);
      expect(Tok::Semi);
      return s;
    }
    case Tok::Error: {
      next();
      s.kind = Stmt::Kind::Error;
      expect(Tok::LParen);
      s.message = expect(Tok::String).text;
      expect(Tok::RParen);
      expect(Tok::Semi);
      return s;
    }
    case Tok::Print: {
      next();
      s.kind = Stmt::Kind::Print;
      expect(Tok::LParen);
      s.expr = expr(defined);
      expect(Tok::RParen);
      expect(Tok::Semi);
      return s;
    }
    case Tok::Sym: {
      throw ParseError(t.line, t.col, "declarations must precede statements");
    }
    default:
      fail({Tok::Ident, Tok::If, Tok::While, Tok::Assert, Tok::Error, Tok::Print});
    }
  }

  Cond cond(const std::set<std::string> &defined) {
    if (peek().kind == Tok::Bang) {
      next();
      expect(Tok::LParen);
      Cond inner = cond(defined);
      expect(Tok::RParen);
      return negate(inner);
    }
    Cond c;
    c.lhs = expr(defined);
    switch (peek().kind) {
    case Tok::Lt: c.rel = Rel::Lt; break;
    case Tok::Le: c.rel = Rel::Le; break;
    case Tok::Gt: c.rel = Rel::Gt; break;
    case Tok::Ge: c.rel = Rel::Ge; break;
    case Tok::EqEq: c.rel = Rel::Eq; break;
    case Tok::Ne: c.rel = Rel::Ne; break;
    default:
      fail({Tok::Lt, Tok::Le, Tok::Gt, Tok::Ge, Tok::EqEq, Tok::Ne});
    }
    next();
    c.rhs = expr(defined);
    return c;
  }

  ExprPtr expr(const std::set<std::string> &defined) {
    ExprPtr e = term(defined);
    while (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
      auto k = next().kind == Tok::Plus ? IntExpr::Kind::Add : IntExpr::Kind::Sub;
      e = IntExpr::binary(k, e, term(defined));
    }
    return e;
  }

  ExprPtr term(const std::set<std::string> &defined) {
    ExprPtr e = unary(defined);
    while (peek().kind == Tok::Star || peek().kind == Tok::Slash) {
      const Token &op = next();
      ExprPtr r = unary(defined);
      if (op.kind == Tok::Star) {
        if (e->has_vars() && r->has_vars())
          throw ParseError(op.line, op.col,
                           "multiplication needs a variable-free operand");
        e = IntExpr::binary(IntExpr::Kind::Mul, e, r);
      } else {
        e = IntExpr::binary(IntExpr::Kind::Div, e, r);
      }
    }
    return e;
  }

  ExprPtr unary(const std::set<std::string> &defined) {
    if (peek().kind == Tok::Minus) {
      next();
      return IntExpr::unary(IntExpr::Kind::Neg, unary(defined));
    }
    return primary(defined);
  }

  ExprPtr primary(const std::set<std::string> &defined) {
    const Token &t = peek();
    switch (t.kind) {
    case Tok::Int:
      next();
      return IntExpr::lit(t.value);
    case Tok::Ident:
      next();
      if (!defined.count(t.text))
        throw ParseError(t.line, t.col,
                         "use of undeclared or unassigned identifier '" + t.text + "'");
      return IntExpr::var(t.text);
    case Tok::LParen: {
      next();
      ExprPtr e = expr(defined);
      expect(Tok::RParen);
      return e;
    }
    default:
      fail({Tok::Int, Tok::Ident, Tok::LParen, Tok::Minus});
    }
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

} // namespace

Program parse_program(std::string_view source) {
  return Parser(lex(source)).program();
}

Program load_program(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("cannot open program file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_program(ss.str());
}

std::string print_expr(const IntExpr &e) {
  switch (e.kind) {
  case IntExpr::Kind::Lit: return std::to_string(e.value);
  case IntExpr::Kind::Var: return e.name;
  case IntExpr::Kind::Neg: return "-" + print_expr(*e.lhs);
  default: break;
  }
  const char *op = e.kind == IntExpr::Kind::Add   ? " + "
                   : e.kind == IntExpr::Kind::Sub ? " - "
                   : e.kind == IntExpr::Kind::Mul ? " * "
                                                  : " / ";
  return "(" + print_expr(*e.lhs) + op + print_expr(*e.rhs) + ")";
}

std::string print_cond(const Cond &c) {
  return print_expr(*c.lhs) + " " + std::string(to_string(c.rel)) + " " +
         print_expr(*c.rhs);
}

static std::string quote(const std::string &s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\')
      out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  return out + "\"";
}

static void print_block(std::ostringstream &os, const std::vector<Stmt> &body,
                        int indent) {
  std::string pad(indent, ' ');
  for (const Stmt &s : body) {
    switch (s.kind) {
    case Stmt::Kind::Assign:
      os << pad << s.target << " = " << print_expr(*s.expr) << ";\n";
      break;
    case Stmt::Kind::Print:
      os << pad << "print(" << print_expr(*s.expr) << ");\n";
      break;
    case Stmt::Kind::Assert:
      os << pad << "assert(" << print_cond(s.cond) << ");\n";
      break;
    case Stmt::Kind::Error:
      os << pad << "error(" << quote(s.message) << ");\n";
      break;
    case Stmt::Kind::If:
      os << pad << "if (" << print_cond(s.cond) << ") {\n";
      print_block(os, s.then_body, indent + 2);
      os << pad << "} else {\n";
      print_block(os, s.else_body, indent + 2);
      os << pad << "}\n";
      break;
    case Stmt::Kind::While:
      os << pad << "while (" << print_cond(s.cond) << ") {\n";
      print_block(os, s.then_body, indent + 2);
      os << pad << "}\n";
      break;
    }
  }
}

std::string print_program(const Program &p) {
  std::ostringstream os;
  for (const auto &in : p.inputs)
    os << "sym int " << in << ";\n";
  print_block(os, p.body, 0);
  return os.str();
}

static int division_forks(const ExprPtr &e) {
  if (!e)
    return 0;
  int n = division_forks(e->lhs) + division_forks(e->rhs);
  if (e->kind == IntExpr::Kind::Div && e->rhs->has_vars())
    ++n;
  return n;
}

static int cond_forks(const Cond &c) {
  return division_forks(c.lhs) + division_forks(c.rhs);
}

static int longest(const std::vector<Stmt> &body, int bound) {
  int total = 0;
  for (const Stmt &s : body) {
    switch (s.kind) {
    case Stmt::Kind::Assign:
    case Stmt::Kind::Print:
      total += division_forks(s.expr);
      break;
    case Stmt::Kind::Error:
      break;
    case Stmt::Kind::Assert:
      total += 1 + cond_forks(s.cond);
      break;
    case Stmt::Kind::If:
      total += 1 + cond_forks(s.cond) +
               std::max(longest(s.then_body, bound), longest(s.else_body, bound));
      break;
    case Stmt::Kind::While:
      total += bound * (1 + cond_forks(s.cond) + longest(s.then_body, bound));
      break;
    }
  }
  return total;
}

int longest_path_branch_count(const Program &p, int loop_bound) {
  if (loop_bound < 0)
    throw std::invalid_argument("loop bound must be non-negative");
  return longest(p.body, loop_bound);
}

namespace {

class Lowering {
public:
  Code run(const Program &p) {
    code_.inputs = p.inputs;
    emit_block(p.body);
    Instr end;
    end.op = Instr::Op::End;
    code_.instrs.push_back(end);
    // Assertion failure sites live after the end marker.
    for (auto &[branch, fail] : pending_fails_) {
      code_.instrs[branch].on_false = static_cast<int>(code_.instrs.size());
      code_.instrs.push_back(fail);
    }
    return std::move(code_);
  }

private:
  int here() const { return static_cast<int>(code_.instrs.size()); }

  int emit(Instr i) {
    code_.instrs.push_back(std::move(i));
    return here() - 1;
  }

  void emit_block(const std::vector<Stmt> &body) {
    for (const Stmt &s : body)
      emit_stmt(s);
  }

  void emit_stmt(const Stmt &s) {
    Instr i;
    i.line = s.line;
    switch (s.kind) {
    case Stmt::Kind::Assign:
      i.op = Instr::Op::Assign;
      i.target = s.target;
      i.expr = s.expr;
      emit(i);
      break;
    case Stmt::Kind::Print:
      i.op = Instr::Op::Print;
      i.expr = s.expr;
      emit(i);
      break;
    case Stmt::Kind::Error:
      i.op = Instr::Op::Fail;
      i.message = s.message;
      emit(i);
      break;
    case Stmt::Kind::Assert: {
      i.op = Instr::Op::Branch;
      i.origin = BranchOrigin::Assert;
      i.cond = s.cond;
      int b = emit(i);
      code_.instrs[b].on_true = here();
      Instr fail;
      fail.op = Instr::Op::Fail;
      fail.line = s.line;
      fail.message = "assertion failed: " + print_cond(s.cond);
      pending_fails_.emplace_back(b, fail);
      break;
    }
    case Stmt::Kind::If: {
      i.op = Instr::Op::Branch;
      i.origin = BranchOrigin::If;
      i.cond = s.cond;
      int b = emit(i);
      code_.instrs[b].on_true = here();
      emit_block(s.then_body);
      Instr j;
      j.op = Instr::Op::Jump;
      int jmp = emit(j);
      code_.instrs[b].on_false = here();
      emit_block(s.else_body);
      code_.instrs[jmp].jump = here();
      break;
    }
    case Stmt::Kind::While: {
      int loop = code_.loop_count++;
      Instr enter;
      enter.op = Instr::Op::LoopEnter;
      enter.loop = loop;
      enter.line = s.line;
      emit(enter);
      i.op = Instr::Op::LoopHead;
      i.origin = BranchOrigin::Loop;
      i.loop = loop;
      i.cond = s.cond;
      int head = emit(i);
      code_.instrs[head].on_true = here();
      emit_block(s.then_body);
      Instr back;
      back.op = Instr::Op::Jump;
      back.jump = head;
      emit(back);
      code_.instrs[head].on_false = here();
      break;
    }
    }
  }

  Code code_;
  std::vector<std::pair<int, Instr>> pending_fails_;
};

} // namespace

Code lower(const Program &p) { return Lowering().run(p); }

} // namespace sse
