#include "sse/treesim.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <sstream>

namespace sse {

LabeledTree LabeledTree::leaf() {
  LabeledTree t;
  t.nodes.emplace_back();
  return t;
}

static int height_of(const LabeledTree &t, int n) {
  const auto &node = t.nodes[n];
  if (!node.branch)
    return 0;
  int h = 0;
  for (int s = 0; s < 2; ++s)
    if (node.feasible[s])
      h = std::max(h, height_of(t, node.child[s]));
  return h + 1;
}

int LabeledTree::height() const { return nodes.empty() ? 0 : height_of(*this, root); }

int LabeledTree::branch_count() const {
  return static_cast<int>(
      std::count_if(nodes.begin(), nodes.end(), [](const Node &n) { return n.branch; }));
}

void LabeledTree::validate() const {
  if (root < 0 || root >= static_cast<int>(nodes.size()))
    throw std::invalid_argument("tree root out of range");
  std::vector<int> seen(nodes.size(), 0);
  std::vector<int> stack{root};
  while (!stack.empty()) {
    int n = stack.back();
    stack.pop_back();
    if (seen[n]++)
      throw std::invalid_argument("tree node shared or cyclic");
    const Node &node = nodes[n];
    if (!node.branch)
      continue;
    if (!node.feasible[0] && !node.feasible[1])
      throw std::invalid_argument("branch with both sides infeasible");
    for (int s = 0; s < 2; ++s) {
      if (!node.feasible[s]) {
        if (node.child[s] != -1)
          throw std::invalid_argument("infeasible side with a subtree");
        continue;
      }
      if (node.child[s] < 0 || node.child[s] >= static_cast<int>(nodes.size()))
        throw std::invalid_argument("feasible side without a child");
      stack.push_back(node.child[s]);
    }
  }
}

static bool same_shape(const LabeledTree &a, int x, const LabeledTree &b, int y) {
  const auto &p = a.nodes[x];
  const auto &q = b.nodes[y];
  if (p.branch != q.branch)
    return false;
  if (!p.branch)
    return true;
  for (int s = 0; s < 2; ++s) {
    if (p.feasible[s] != q.feasible[s])
      return false;
    if (p.feasible[s] && !same_shape(a, p.child[s], b, q.child[s]))
      return false;
  }
  return true;
}

bool operator==(const LabeledTree &a, const LabeledTree &b) {
  return same_shape(a, a.root, b, b.root);
}

static int build_full(LabeledTree &t, int height) {
  int id = static_cast<int>(t.nodes.size());
  t.nodes.emplace_back();
  if (height == 0)
    return id;
  int f = build_full(t, height - 1);
  int tr = build_full(t, height - 1);
  t.nodes[id].branch = true;
  t.nodes[id].child[0] = f;
  t.nodes[id].child[1] = tr;
  return id;
}

LabeledTree full_tree(int height) {
  if (height < 0)
    throw std::invalid_argument("height must be non-negative");
  LabeledTree t;
  t.root = build_full(t, height);
  return t;
}

namespace {

class Generator {
public:
  Generator(double p, std::uint64_t seed) : rng_(seed), coin_(p) {}

  int build(LabeledTree &t, int remaining) {
    int id = static_cast<int>(t.nodes.size());
    t.nodes.emplace_back();
    if (remaining == 0)
      return id;
    t.nodes[id].branch = true;
    bool false_dead = coin_(rng_);
    bool true_dead = false_dead ? false : coin_(rng_);
    bool dead[2] = {false_dead, true_dead};
    for (int s = 0; s < 2; ++s) {
      t.nodes[id].feasible[s] = !dead[s];
      if (!dead[s]) {
        int c = build(t, remaining - 1);
        t.nodes[id].child[s] = c;
      }
    }
    return id;
  }

private:
  std::mt19937_64 rng_;
  std::bernoulli_distribution coin_;
};

} // namespace

LabeledTree gen_random_tree(int height, double p, std::uint64_t seed) {
  if (!(p >= 0 && p < 1))
    throw std::invalid_argument("infeasibility probability must be in [0, 1)");
  if (height < 0)
    throw std::invalid_argument("height must be non-negative");
  LabeledTree t;
  Generator g(p, seed);
  t.root = g.build(t, height);
  return t;
}

double expected_infeasible_ratio(double p) { return p * (2 - p) / 2; }

bool operator==(const Probe &a, const Probe &b) {
  return a.path == b.path && a.ordinal == b.ordinal && a.verdict == b.verdict;
}

namespace {

char letter(int side) { return side ? 'T' : 'F'; }

class Recorder {
public:
  explicit Recorder(SimResult &r) : r_(r) {}

  bool solve(const std::string &path, bool feasible) {
    ++r_.total;
    (feasible ? r_.sat : r_.unsat)++;
    r_.trace.push_back(Probe{path, static_cast<int>(r_.total),
                             feasible ? ProbeVerdict::Sat : ProbeVerdict::Unsat});
    return feasible;
  }

  void avoid(const std::string &path) {
    ++r_.avoided;
    r_.trace.push_back(Probe{path, 0, ProbeVerdict::Avoided});
  }

private:
  SimResult &r_;
};

void pure_visit(const LabeledTree &t, int n, std::string &path, Order order,
                bool optimize, Recorder &rec) {
  const auto &node = t.nodes[n];
  if (!node.branch)
    return;
  bool first_infeasible = false;
  for (int i = 0; i < 2; ++i) {
    int side = (i == 0) == (order == Order::TrueFirst) ? 1 : 0;
    path.push_back(letter(side));
    if (i == 1 && optimize && first_infeasible) {
      rec.avoid(path);
      pure_visit(t, node.child[side], path, order, optimize, rec);
    } else if (rec.solve(path, node.feasible[side])) {
      pure_visit(t, node.child[side], path, order, optimize, rec);
    } else if (i == 0) {
      first_infeasible = true;
    }
    path.pop_back();
  }
}

} // namespace

SimResult simulate_pure(const LabeledTree &t, Order order, bool optimize) {
  t.validate();
  SimResult r;
  Recorder rec(r);
  std::string path;
  pure_visit(t, t.root, path, order, optimize, rec);
  return r;
}

namespace {

class SpeculativeSim {
public:
  SpeculativeSim(const LabeledTree &t, const SimOptions &o, SimResult &r)
      : t_(t), o_(o), rec_(r) {}

  void run() {
    if (!t_.nodes[t_.root].branch)
      return;
    push(t_.root);
    for (;;) {
      // The side under the cursor of the top frame is about to be taken.
      if (enter()) {
        const Frame &f = frames_.back();
        const auto &node = t_.nodes[f.node];
        int side = f.side();
        if (node.feasible[side] && t_.nodes[node.child[side]].branch) {
          push(node.child[side]);
          continue;
        }
        path_end();
      }
      if (!advance())
        return;
    }
  }

private:
  struct Frame {
    int node;
    int order[2];
    int cursor = 0;
    int side() const { return order[cursor]; }
  };

  void push(int node) {
    Frame f{node, {0, 1}, 0};
    if (o_.order == Order::TrueFirst)
      std::swap(f.order[0], f.order[1]);
    frames_.push_back(f);
  }

  std::size_t depth() const { return frames_.size() - confirmed_; }

  std::string path(std::size_t len) const {
    std::string p;
    for (std::size_t i = 0; i < len; ++i)
      p.push_back(letter(frames_[i].side()));
    return p;
  }

  bool feasible(std::size_t len) const {
    for (std::size_t i = 0; i < len; ++i)
      if (!t_.nodes[frames_[i].node].feasible[frames_[i].side()])
        return false;
    return true;
  }

  bool probe(std::size_t len) { return rec_.solve(path(len), feasible(len)); }

  bool enter() {
    const Frame &f = frames_.back();
    std::size_t len = frames_.size();
    auto rec = ledger_.find(f.node);
    if (o_.optimize && rec != ledger_.end() && rec->second != f.side()) {
      rec_.avoid(path(len));
      if (o_.absurdity_resets_depth || depth() >= static_cast<std::size_t>(o_.depth))
        confirmed_ = len;
      return true;
    }
    if (depth() >= static_cast<std::size_t>(o_.depth)) {
      if (probe(len)) {
        confirmed_ = len;
        return true;
      }
      fail(static_cast<int>(depth()));
      return false;
    }
    return true;
  }

  void path_end() {
    if (depth() == 0)
      return;
    std::size_t len = frames_.size();
    if (probe(len))
      confirmed_ = len;
    else
      fail(static_cast<int>(depth()));
  }

  void fail(int L) {
    std::size_t base = confirmed_;
    BisectResult br = backtrack_binary_search(
        L, [&](int i) { return probe(base + static_cast<std::size_t>(i)); });
    std::size_t bad = base + static_cast<std::size_t>(br.first_bad);
    const Frame &f = frames_[bad - 1];
    ledger_[f.node] = f.side();
    frames_.resize(bad);
    confirmed_ = bad - 1;
  }

  bool advance() {
    while (!frames_.empty()) {
      Frame &f = frames_.back();
      if (f.cursor == 0) {
        f.cursor = 1;
        confirmed_ = std::min(confirmed_, frames_.size() - 1);
        return true;
      }
      frames_.pop_back();
      confirmed_ = std::min(confirmed_, frames_.size());
    }
    return false;
  }

  const LabeledTree &t_;
  SimOptions o_;
  Recorder rec_;
  std::vector<Frame> frames_;
  std::size_t confirmed_ = 0;
  std::map<int, int> ledger_;
};

} // namespace

SimResult simulate_sse(const LabeledTree &t, const SimOptions &opts) {
  if (opts.depth < 1)
    throw std::invalid_argument("speculation depth must be at least 1");
  t.validate();
  SimResult r;
  SpeculativeSim(t, opts, r).run();
  return r;
}

static void check_nk(int n, int k) {
  if (n < 1 || n > 30)
    throw std::out_of_range("n must be in 1..30");
  if (k < 1)
    throw std::out_of_range("k must be at least 1");
}

std::uint64_t eq1_formula(int n, int k) {
  check_nk(n, k);
  std::uint64_t pn = std::uint64_t(1) << n;
  if (n <= k)
    return pn;
  std::uint64_t num = pn - (std::uint64_t(1) << (n % k));
  std::uint64_t den = (std::uint64_t(1) << k) - 1;
  if (num % den != 0)
    throw std::logic_error("closed form is not integral");
  return pn + num / den;
}

std::uint64_t full_tree_count(int n, int k) {
  check_nk(n, k);
  std::uint64_t pn = std::uint64_t(1) << n;
  if (n <= k)
    return pn;
  std::uint64_t num = pn - (std::uint64_t(1) << ((n - 1) % k + 1));
  std::uint64_t den = (std::uint64_t(1) << k) - 1;
  if (num % den != 0)
    throw std::logic_error("closed form is not integral");
  return pn + num / den;
}

namespace {

void emit_block(std::ostringstream &os, const LabeledTree &t, int n, int depth,
                bool root_side, int indent) {
  const auto &node = t.nodes[n];
  if (!node.branch)
    return;
  std::string pad(indent, ' ');
  std::string cond;
  if (node.feasible[0] && node.feasible[1]) {
    cond = "a" + std::to_string(depth) + " > 0";
  } else {
    // Restate the root decision so that exactly one side is reachable.
    bool holds = node.feasible[1];
    bool positive = holds == root_side;
    cond = positive ? "a0 > 0" : "a0 <= 0";
  }
  os << pad << "if (" << cond << ") {\n";
  if (node.feasible[1])
    emit_block(os, t, node.child[1], depth + 1, depth == 0 ? true : root_side,
               indent + 2);
  os << pad << "} else {\n";
  if (node.feasible[0])
    emit_block(os, t, node.child[0], depth + 1, depth == 0 ? false : root_side,
               indent + 2);
  os << pad << "}\n";
}

} // namespace

std::string program_for_tree(const LabeledTree &t) {
  t.validate();
  const auto &root = t.nodes[t.root];
  if (root.branch && !(root.feasible[0] && root.feasible[1]))
    throw std::invalid_argument("root must have two feasible sides");
  std::ostringstream os;
  int h = t.height();
  for (int d = 0; d < std::max(h, 1); ++d)
    os << "sym int a" << d << ";\n";
  emit_block(os, t, t.root, 0, true, 0);
  return os.str();
}

} // namespace sse
