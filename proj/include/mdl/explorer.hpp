#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mdl/semantics.hpp"

namespace mdl {

struct Limits {
  /// Longest schedule followed from the initial config.
  std::uint64_t max_steps = 100000;
  std::uint64_t max_states = 1000000;
  std::uint64_t max_outcomes = 10000;
};

using Trace = std::vector<StepLabel>;

struct Outcome {
  enum class Kind : std::uint8_t { Terminated, Stuck, Truncated };
  Kind kind = Kind::Truncated;
  /// Canonical for exploration outcomes; the raw final config for single runs.
  Config config;
  Trace trace;

  const Value& value() const { return config.expr->value(); }
};

std::string_view outcome_kind_name(Outcome::Kind k);

enum class Policy : std::uint8_t { Leftmost, Rightmost, Random, Trace };

struct Schedule {
  Policy policy = Policy::Leftmost;
  std::uint64_t seed = 0;
  /// Labels to follow under Policy::Trace.
  Trace labels;
};

/// Config is a non-value and some live task cannot step.
bool is_stuck(const Config& c);

/// Follows one schedule from the empty store until a value, a stuck config,
/// or the step limit. For Policy::Trace, stops when the labels run out and
/// throws ReplayError on a label that does not apply.
Outcome run_schedule(const ExprPtr& e, const Schedule& schedule, const Limits& limits = {},
                     AllocPolicy alloc = AllocPolicy::LowestFree);

class ReplayError : public std::runtime_error {
 public:
  ReplayError(std::size_t index, std::string message)
      : std::runtime_error(std::move(message)), index_(index) {}
  std::size_t index() const { return index_; }

 private:
  std::size_t index_;
};

Outcome replay(const ExprPtr& e, const Trace& labels, AllocPolicy alloc = AllocPolicy::LowestFree);

struct ExploreOptions {
  Limits limits;
  /// Worker threads for successor computation. The report does not depend on it.
  unsigned jobs = 1;
  bool memo = true;
  AllocPolicy alloc = AllocPolicy::LowestFree;
  /// Called once per expanded state with its successors and whether some
  /// task was stuck. May run concurrently when jobs > 1.
  std::function<void(const Config&, const std::vector<Step>&, bool)> on_visit;
};

struct ExplorationReport {
  /// Distinct outcomes, Terminated before Stuck, each group sorted by printed form.
  std::vector<Outcome> outcomes;
  std::uint64_t states_explored = 0;
  std::uint64_t transitions = 0;
  std::uint64_t dedup_hits = 0;
  bool hit_steps = false;
  bool hit_states = false;
  bool hit_outcomes = false;
  double seconds = 0;

  bool complete() const { return !hit_steps && !hit_states && !hit_outcomes; }
  std::vector<std::string> limits_hit() const;
  std::size_t count(Outcome::Kind k) const;
  const Outcome* first(Outcome::Kind k) const;
};

ExplorationReport explore_all(const ExprPtr& e, const ExploreOptions& opts = {});

enum class VerdictKind : std::uint8_t { Holds, HoldsVacuously, Fails, Inconclusive };

std::string_view verdict_name(VerdictKind k);

struct Verdict {
  VerdictKind kind = VerdictKind::Inconclusive;
  std::optional<Trace> terminating;
  std::optional<Trace> stuck;
  ExplorationReport report;
};

/// Fails whenever both a terminating and a stuck schedule were found, even if
/// a limit cut the search short, since both witnesses are concrete.
Verdict check_sisafety(const ExprPtr& e, const ExploreOptions& opts = {});
Verdict sisafety_verdict(ExplorationReport report);

struct DeterminismResult {
  bool deterministic = true;
  bool complete = true;
  /// Two Terminated outcomes with different (value, reachable store), if any.
  std::vector<Outcome> counterexample;
  ExplorationReport report;
};

DeterminismResult check_outcome_determinism(const ExprPtr& e, const ExploreOptions& opts = {});
DeterminismResult outcome_determinism(ExplorationReport report);

std::string print(const Store& s);
std::string print(const Config& c);

}  // namespace mdl
