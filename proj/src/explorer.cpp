#include "mdl/explorer.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <optional>
#include <random>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include "mdl/canonical.hpp"
#include "mdl/syntax.hpp"

namespace mdl {

std::string_view outcome_kind_name(Outcome::Kind k) {
  switch (k) {
    case Outcome::Kind::Terminated: return "Terminated";
    case Outcome::Kind::Stuck: return "Stuck";
    case Outcome::Kind::Truncated: return "Truncated";
  }
  return "?";
}

std::string_view verdict_name(VerdictKind k) {
  switch (k) {
    case VerdictKind::Holds: return "Holds";
    case VerdictKind::HoldsVacuously: return "HoldsVacuously";
    case VerdictKind::Fails: return "Fails";
    case VerdictKind::Inconclusive: return "Inconclusive";
  }
  return "?";
}

std::string print(const Store& s) {
  std::string out = "{";
  bool first = true;
  for (const auto& [l, a] : s.entries()) {
    if (!first) out += ", ";
    first = false;
    out += "#" + std::to_string(l.id) + " = [";
    for (std::size_t i = 0; i < a->size(); ++i) {
      if (i) out += ", ";
      out += print((*a)[i]);
    }
    out += "]";
  }
  return out + "}";
}

std::string print(const Config& c) { return print(c.expr) + " / " + print(c.store); }

bool is_stuck(const Config& c) {
  if (c.expr->is_value()) return false;
  bool stuck = false;
  enabled_steps(c, AllocPolicy::LowestFree, &stuck);
  return stuck;
}

// ---------------------------------------------------------------------------
// Single schedules

namespace {

Outcome classify(Config c, Trace t, bool stuck) {
  Outcome o;
  o.kind = c.expr->is_value() ? Outcome::Kind::Terminated
           : stuck            ? Outcome::Kind::Stuck
                              : Outcome::Kind::Truncated;
  o.config = std::move(c);
  o.trace = std::move(t);
  return o;
}

}  // namespace

Outcome replay(const ExprPtr& e, const Trace& labels, AllocPolicy alloc) {
  Config c{e, Store{}};
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const StepLabel& want = labels[i];
    auto st = step_task(c, want.task, alloc);
    if (!st) {
      throw ReplayError(i, "step " + std::to_string(i) + ": no step for task '" + want.task.str() + "'");
    }
    if (st->label.kind != want.kind) {
      throw ReplayError(i, "step " + std::to_string(i) + ": task '" + want.task.str() + "' fires " +
                               std::string(rule_name(st->label.kind)) + ", trace says " +
                               std::string(rule_name(want.kind)));
    }
    c = std::move(st->next);
  }
  return classify(std::move(c), labels, is_stuck(c));
}

Outcome run_schedule(const ExprPtr& e, const Schedule& schedule, const Limits& limits,
                     AllocPolicy alloc) {
  if (schedule.policy == Policy::Trace) return replay(e, schedule.labels, alloc);
  std::mt19937_64 rng(schedule.seed);
  Config c{e, Store{}};
  Trace trace;
  for (;;) {
    if (c.expr->is_value()) return classify(std::move(c), std::move(trace), false);
    bool stuck = false;
    auto steps = enabled_steps(c, alloc, &stuck);
    if (stuck) return classify(std::move(c), std::move(trace), true);
    if (trace.size() >= limits.max_steps) return classify(std::move(c), std::move(trace), false);
    std::size_t pick = 0;
    switch (schedule.policy) {
      case Policy::Leftmost: pick = 0; break;
      case Policy::Rightmost: pick = steps.size() - 1; break;
      case Policy::Random:
        pick = std::uniform_int_distribution<std::size_t>(0, steps.size() - 1)(rng);
        break;
      case Policy::Trace: break;
    }
    trace.push_back(steps[pick].label);
    c = std::move(steps[pick].next);
  }
}

// ---------------------------------------------------------------------------
// Exhaustive exploration

std::vector<std::string> ExplorationReport::limits_hit() const {
  std::vector<std::string> out;
  if (hit_steps) out.emplace_back("max_steps");
  if (hit_states) out.emplace_back("max_states");
  if (hit_outcomes) out.emplace_back("max_outcomes");
  return out;
}

std::size_t ExplorationReport::count(Outcome::Kind k) const {
  return static_cast<std::size_t>(
      std::count_if(outcomes.begin(), outcomes.end(), [&](const Outcome& o) { return o.kind == k; }));
}

const Outcome* ExplorationReport::first(Outcome::Kind k) const {
  for (const Outcome& o : outcomes) {
    if (o.kind == k) return &o;
  }
  return nullptr;
}

namespace {

constexpr std::uint32_t kNoParent = ~std::uint32_t{0};

struct Node {
  Config cfg;
  std::uint32_t parent;
  StepLabel label;
  std::uint32_t depth;
};

struct Expansion {
  std::vector<Step> steps;
  bool stuck = false;
};

Trace trace_to(const std::vector<Node>& nodes, std::uint32_t id) {
  Trace t;
  for (std::uint32_t cur = id; nodes[cur].parent != kNoParent; cur = nodes[cur].parent) {
    t.push_back(nodes[cur].label);
  }
  std::reverse(t.begin(), t.end());
  return t;
}

template <class F>
void parallel_for(std::size_t n, unsigned jobs, F&& body, std::size_t min_per_thread = 16) {
  std::size_t workers = std::min<std::size_t>(jobs, n / min_per_thread);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto run = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < n;) body(i);
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(run);
  run();
  for (auto& t : pool) t.join();
}

Expansion expand(const Config& c, const ExploreOptions& opts, bool canonical = true) {
  Expansion x;
  x.steps = enabled_steps(c, opts.alloc, &x.stuck);
  if (opts.on_visit) opts.on_visit(c, x.steps, x.stuck);
  if (canonical) {
    for (Step& s : x.steps) s.next = canonicalize(s.next);
  }
  return x;
}

void sort_outcomes(std::vector<Outcome>& outs) {
  std::vector<std::pair<std::string, std::size_t>> keys;
  for (std::size_t i = 0; i < outs.size(); ++i) {
    keys.emplace_back(std::string(1, static_cast<char>('0' + static_cast<int>(outs[i].kind))) +
                          print(outs[i].config),
                      i);
  }
  std::sort(keys.begin(), keys.end());
  std::vector<Outcome> sorted;
  sorted.reserve(outs.size());
  for (auto& [k, i] : keys) sorted.push_back(std::move(outs[i]));
  outs = std::move(sorted);
}

ExplorationReport explore_graph(const ExprPtr& e, const ExploreOptions& opts) {
  ExplorationReport r;
  std::vector<Node> nodes;
  std::unordered_map<Config, std::uint32_t, ConfigHash, ConfigEq> memo;
  Config root = canonicalize(Config{e, Store{}});
  nodes.push_back(Node{root, kNoParent, {}, 0});
  memo.emplace(root, 0);
  std::vector<std::uint32_t> frontier{0};
  bool stop = false;

  auto add_outcome = [&](std::uint32_t id, Outcome::Kind k) {
    r.outcomes.push_back(Outcome{k, nodes[id].cfg, trace_to(nodes, id)});
    if (r.outcomes.size() > opts.limits.max_outcomes) {
      r.hit_outcomes = true;
      stop = true;
    }
  };

  while (!frontier.empty() && !stop) {
    std::vector<Expansion> exp(frontier.size());
    parallel_for(frontier.size(), opts.jobs, [&](std::size_t i) {
      const Config& c = nodes[frontier[i]].cfg;
      if (!c.expr->is_value()) exp[i] = expand(c, opts);
    });
    std::vector<std::uint32_t> next;
    for (std::size_t i = 0; i < frontier.size() && !stop; ++i) {
      std::uint32_t id = frontier[i];
      if (nodes[id].cfg.expr->is_value()) {
        add_outcome(id, Outcome::Kind::Terminated);
        continue;
      }
      if (exp[i].stuck) add_outcome(id, Outcome::Kind::Stuck);
      if (stop) break;
      if (exp[i].steps.empty()) continue;
      if (nodes[id].depth >= opts.limits.max_steps) {
        r.hit_steps = true;
        continue;
      }
      for (Step& s : exp[i].steps) {
        ++r.transitions;
        auto it = memo.find(s.next);
        if (it != memo.end()) {
          ++r.dedup_hits;
          continue;
        }
        if (nodes.size() >= opts.limits.max_states) {
          r.hit_states = true;
          stop = true;
          break;
        }
        auto nid = static_cast<std::uint32_t>(nodes.size());
        memo.emplace(s.next, nid);
        nodes.push_back(Node{std::move(s.next), id, std::move(s.label), nodes[id].depth + 1});
        next.push_back(nid);
      }
    }
    frontier = std::move(next);
  }
  r.states_explored = nodes.size();
  return r;
}

// Memo-free reference walk over the schedule tree. Depth-first, holding only
// the current path and its pending siblings, so memory tracks depth rather
// than tree size. Raw states all the way down; only outcomes are put in
// canonical form.
struct TreeWalk {
  TreeWalk(const ExploreOptions& o, std::atomic<std::uint64_t>& n, std::atomic<bool>& halt)
      : opts(o), states(n), stop(halt) {}

  const ExploreOptions& opts;
  std::atomic<std::uint64_t>& states;
  std::atomic<bool>& stop;
  std::vector<Outcome> outcomes;  // first occurrence in depth-first order
  std::unordered_set<Config, ConfigHash, ConfigEq> seen;
  std::uint64_t transitions = 0;
  bool hit_steps = false, hit_states = false, hit_outcomes = false;

  // Records c if terminal and returns its successors, or nothing at a leaf.
  std::vector<Step> visit(const Config& c, const Trace& trace) {
    Expansion x;
    if (!c.expr->is_value()) x = expand(c, opts, false);
    if (c.expr->is_value() || x.stuck) {
      auto kind = c.expr->is_value() ? Outcome::Kind::Terminated : Outcome::Kind::Stuck;
      Config canon = canonicalize(c);
      if (seen.insert(canon).second) {
        outcomes.push_back(Outcome{kind, std::move(canon), trace});
        if (outcomes.size() > opts.limits.max_outcomes) {
          hit_outcomes = true;
          stop = true;
          return {};
        }
      }
    }
    if (!x.steps.empty() && trace.size() >= opts.limits.max_steps) {
      hit_steps = true;
      return {};
    }
    return std::move(x.steps);
  }

  // Takes a state slot for one more node; false once the budget is spent.
  bool admit() {
    ++transitions;
    if (states.fetch_add(1) >= opts.limits.max_states) {
      hit_states = true;
      stop = true;
      return false;
    }
    return true;
  }

  void dfs(const Config& root, Trace trace) {
    struct Frame {
      std::vector<Step> pending;
      std::size_t next = 0;
    };
    std::size_t base = trace.size();
    std::vector<Frame> path;
    path.push_back(Frame{visit(root, trace)});
    while (!path.empty() && !stop) {
      Frame& top = path.back();
      if (top.next == top.pending.size()) {
        path.pop_back();
        if (trace.size() > base) trace.pop_back();
        continue;
      }
      Step s = std::move(top.pending[top.next++]);
      if (!admit()) break;
      trace.push_back(std::move(s.label));
      path.push_back(Frame{visit(s.next, trace)});
    }
  }
};

ExplorationReport explore_tree(const ExprPtr& e, const ExploreOptions& opts) {
  std::atomic<std::uint64_t> states{1};
  std::atomic<bool> stop{false};

  // Unfold the top of the tree into an ordered list of pieces: outcomes met
  // on the way down, then subtrees, in depth-first order. Workers take the
  // subtrees and the pieces are stitched back in order.
  struct Piece {
    std::optional<std::pair<Config, Trace>> subtree;
    TreeWalk walk;
  };
  auto fresh = [&] { return TreeWalk(opts, states, stop); };
  std::vector<Piece> pieces;
  pieces.push_back(Piece{std::pair{Config{e, Store{}}, Trace{}}, fresh()});
  std::size_t target = opts.jobs > 1 ? 8 * std::size_t{opts.jobs} : 1;
  for (int round = 0; round < 64 && !stop; ++round) {
    std::size_t open = 0;
    for (const Piece& p : pieces) open += p.subtree.has_value();
    if (open == 0 || open >= target) break;
    std::vector<Piece> next;
    for (Piece& p : pieces) {
      if (!p.subtree) {
        next.push_back(std::move(p));
        continue;
      }
      auto [c, trace] = std::move(*p.subtree);
      Piece here{std::nullopt, fresh()};
      std::vector<Step> steps = here.walk.visit(c, trace);
      std::size_t at = next.size();
      next.push_back(std::move(here));
      for (Step& s : steps) {
        if (!next[at].walk.admit()) break;
        Trace t = trace;
        t.push_back(std::move(s.label));
        next.push_back(Piece{std::pair{std::move(s.next), std::move(t)}, fresh()});
      }
    }
    pieces = std::move(next);
  }

  parallel_for(pieces.size(), opts.jobs, [&](std::size_t i) {
    Piece& p = pieces[i];
    if (p.subtree && !stop) p.walk.dfs(p.subtree->first, std::move(p.subtree->second));
  }, 1);

  ExplorationReport r;
  std::unordered_set<Config, ConfigHash, ConfigEq> seen;
  for (Piece& p : pieces) {
    TreeWalk& w = p.walk;
    r.transitions += w.transitions;
    r.hit_steps |= w.hit_steps;
    r.hit_states |= w.hit_states;
    r.hit_outcomes |= w.hit_outcomes;
    for (Outcome& o : w.outcomes) {
      if (seen.insert(o.config).second) r.outcomes.push_back(std::move(o));
    }
  }
  if (r.outcomes.size() > opts.limits.max_outcomes) r.hit_outcomes = true;
  r.states_explored = std::min<std::uint64_t>(states, opts.limits.max_states);
  return r;
}

}  // namespace

ExplorationReport explore_all(const ExprPtr& e, const ExploreOptions& opts) {
  auto t0 = std::chrono::steady_clock::now();
  ExplorationReport r = opts.memo ? explore_graph(e, opts) : explore_tree(e, opts);
  sort_outcomes(r.outcomes);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

Verdict sisafety_verdict(ExplorationReport report) {
  Verdict v;
  const Outcome* term = report.first(Outcome::Kind::Terminated);
  const Outcome* stuck = report.first(Outcome::Kind::Stuck);
  if (term && stuck) {
    v.kind = VerdictKind::Fails;
    v.terminating = term->trace;
    v.stuck = stuck->trace;
  } else if (!report.complete()) {
    v.kind = VerdictKind::Inconclusive;
  } else if (term) {
    v.kind = VerdictKind::Holds;
    v.terminating = term->trace;
  } else {
    v.kind = VerdictKind::HoldsVacuously;
  }
  v.report = std::move(report);
  return v;
}

Verdict check_sisafety(const ExprPtr& e, const ExploreOptions& opts) {
  return sisafety_verdict(explore_all(e, opts));
}

DeterminismResult outcome_determinism(ExplorationReport report) {
  DeterminismResult d;
  d.complete = report.complete();
  for (const Outcome& o : report.outcomes) {
    if (o.kind != Outcome::Kind::Terminated) continue;
    // Terminated outcomes are canonical and garbage-free, so distinct entries
    // differ in value or reachable store.
    d.counterexample.push_back(o);
    if (d.counterexample.size() == 2) break;
  }
  d.deterministic = d.counterexample.size() < 2;
  if (d.deterministic) d.counterexample.clear();
  d.report = std::move(report);
  return d;
}

DeterminismResult check_outcome_determinism(const ExprPtr& e, const ExploreOptions& opts) {
  return outcome_determinism(explore_all(e, opts));
}

}  // namespace mdl
