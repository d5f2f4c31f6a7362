#include "sse/solver.hpp"

#include <cerrno>
#include <chrono>
#include <csignal>
#include <cstring>
#include <regex>
#include <set>
#include <sstream>

#include <fcntl.h>
#include <poll.h>
#include <sys/wait.h>
#include <unistd.h>

namespace sse {

namespace {

std::string smt_int(std::int64_t v) {
  if (v < 0)
    return "(- " + std::to_string(v).substr(1) + ")";
  return std::to_string(v);
}

std::string smt_term(const std::string &name, std::int64_t c) {
  if (c == 1)
    return name;
  if (c == -1)
    return "(- " + name + ")";
  return "(* " + smt_int(c) + " " + name + ")";
}

std::string smt_sum(const std::map<std::string, std::int64_t> &coeffs) {
  if (coeffs.empty())
    return "0";
  if (coeffs.size() == 1)
    return smt_term(coeffs.begin()->first, coeffs.begin()->second);
  std::string s = "(+";
  for (const auto &[name, c] : coeffs)
    s += " " + smt_term(name, c);
  return s + ")";
}

std::string smt_constraint(const Constraint &c) {
  std::string l = smt_sum(c.coeffs), r = smt_int(c.rhs);
  switch (c.rel) {
  case Rel::Lt: return "(< " + l + " " + r + ")";
  case Rel::Le: return "(<= " + l + " " + r + ")";
  case Rel::Gt: return "(> " + l + " " + r + ")";
  case Rel::Ge: return "(>= " + l + " " + r + ")";
  case Rel::Eq: return "(= " + l + " " + r + ")";
  case Rel::Ne: return "(not (= " + l + " " + r + "))";
  }
  return "true";
}

std::vector<std::string> split_words(const std::string &s) {
  std::istringstream is(s);
  std::vector<std::string> out;
  std::string w;
  while (is >> w)
    out.push_back(w);
  return out;
}

// Runs `argv` with `input` on stdin and returns its stdout.
std::string run_process(const std::vector<std::string> &argv,
                        const std::string &input, double timeout) {
  int in_pipe[2], out_pipe[2];
  if (pipe(in_pipe) != 0)
    throw SolverException(std::string("pipe: ") + std::strerror(errno));
  if (pipe(out_pipe) != 0) {
    close(in_pipe[0]);
    close(in_pipe[1]);
    throw SolverException(std::string("pipe: ") + std::strerror(errno));
  }
  pid_t pid = fork();
  if (pid < 0)
    throw SolverException(std::string("fork: ") + std::strerror(errno));
  if (pid == 0) {
    dup2(in_pipe[0], STDIN_FILENO);
    dup2(out_pipe[1], STDOUT_FILENO);
    int devnull = open("/dev/null", O_WRONLY);
    if (devnull >= 0)
      dup2(devnull, STDERR_FILENO);
    close(in_pipe[0]);
    close(in_pipe[1]);
    close(out_pipe[0]);
    close(out_pipe[1]);
    std::vector<char *> args;
    for (const auto &a : argv)
      args.push_back(const_cast<char *>(a.c_str()));
    args.push_back(nullptr);
    execvp(args[0], args.data());
    _exit(127);
  }
  close(in_pipe[0]);
  close(out_pipe[1]);

  // Queries are small; a blocking write cannot fill the pipe buffer.
  std::signal(SIGPIPE, SIG_IGN);
  const char *p = input.data();
  std::size_t left = input.size();
  while (left > 0) {
    ssize_t n = write(in_pipe[1], p, left);
    if (n <= 0)
      break;
    p += n;
    left -= static_cast<std::size_t>(n);
  }
  close(in_pipe[1]);

  std::string out;
  auto deadline = std::chrono::steady_clock::now() +
                  std::chrono::duration<double>(timeout);
  bool timed_out = false;
  char buf[4096];
  for (;;) {
    auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(
                         deadline - std::chrono::steady_clock::now())
                         .count();
    if (remaining <= 0) {
      timed_out = true;
      break;
    }
    pollfd pfd{out_pipe[0], POLLIN, 0};
    int r = poll(&pfd, 1, static_cast<int>(remaining));
    if (r < 0 && errno == EINTR)
      continue;
    if (r <= 0) {
      timed_out = r == 0;
      break;
    }
    ssize_t n = read(out_pipe[0], buf, sizeof buf);
    if (n <= 0)
      break;
    out.append(buf, static_cast<std::size_t>(n));
  }
  close(out_pipe[0]);
  if (timed_out)
    kill(pid, SIGKILL);
  int status = 0;
  waitpid(pid, &status, 0);
  if (timed_out)
    throw SolverException("external solver timed out");
  if (WIFEXITED(status) && WEXITSTATUS(status) == 127)
    throw SolverException("cannot execute external solver '" + argv[0] + "'");
  return out;
}

} // namespace

std::string emit_external_query(
    const std::vector<Constraint> &constraints,
    std::optional<std::pair<std::int64_t, std::int64_t>> domain) {
  std::set<std::string> names;
  for (const Constraint &c : constraints)
    for (const auto &[name, coef] : c.coeffs)
      names.insert(name);
  std::ostringstream os;
  os << "(set-logic QF_LIA)\n";
  for (const auto &n : names)
    os << "(declare-const " << n << " Int)\n";
  if (domain)
    for (const auto &n : names)
      os << "(assert (and (<= " << smt_int(domain->first) << " " << n
         << ") (<= " << n << " " << smt_int(domain->second) << ")))\n";
  if (constraints.empty())
    os << "(assert true)\n";
  for (const Constraint &c : constraints)
    os << "(assert " << smt_constraint(c) << ")\n";
  os << "(check-sat)\n(get-model)\n";
  return os.str();
}

SolverVerdict parse_external_reply(const std::string &reply) {
  std::istringstream is(reply);
  std::string first;
  is >> first;
  SolverVerdict v;
  if (first == "unsat")
    return v;
  if (first != "sat")
    throw SolverException("external solver answered '" + first + "'");
  v.status = SolverStatus::Sat;
  static const std::regex def(
      R"(\(define-fun\s+([^\s()]+)\s+\(\)\s+Int\s+(?:\(\s*-\s*(\d+)\s*\)|(\d+))\s*\))");
  for (auto it = std::sregex_iterator(reply.begin(), reply.end(), def);
       it != std::sregex_iterator(); ++it) {
    const auto &m = *it;
    std::int64_t val = m[2].matched ? -std::stoll(m[2].str()) : std::stoll(m[3].str());
    v.model[m[1].str()] = val;
  }
  return v;
}

ExternalSolver::ExternalSolver(std::string command, SolverOptions opts,
                               double timeout_seconds)
    : command_(std::move(command)), opts_(opts), timeout_(timeout_seconds) {
  if (split_words(command_).empty())
    throw std::invalid_argument("empty external solver command");
}

SolverVerdict ExternalSolver::solve(const std::vector<Constraint> &constraints) {
  auto t0 = std::chrono::steady_clock::now();
  std::string query = emit_external_query(
      constraints, std::make_pair(opts_.domain_lo, opts_.domain_hi));
  SolverVerdict v = parse_external_reply(run_process(split_words(command_), query, timeout_));
  if (v.sat()) {
    for (const Constraint &c : constraints)
      for (const auto &[name, coef] : c.coeffs)
        v.model.emplace(name, 0);
    for (const Constraint &c : constraints)
      if (!c.holds(v.model))
        throw SolverException("external model violates " + to_string(c));
  }
  v.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return v;
}

} // namespace sse
