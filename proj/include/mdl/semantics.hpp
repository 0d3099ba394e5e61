#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "mdl/context.hpp"
#include "mdl/lang.hpp"

namespace mdl {

/// Immutable array of values with a cached hash.
class Array {
 public:
  explicit Array(std::vector<Value> cells);

  std::size_t size() const { return cells_.size(); }
  const Value& operator[](std::size_t i) const { return cells_[i]; }
  const std::vector<Value>& cells() const { return cells_; }
  std::size_t hash() const { return hash_; }

  friend bool operator==(const Array& a, const Array& b) {
    return a.hash_ == b.hash_ && a.cells_ == b.cells_;
  }

 private:
  std::vector<Value> cells_;
  std::size_t hash_;
};

using ArrayPtr = std::shared_ptr<const Array>;

/// Which unused location HeadAlloc picks. Both are deterministic; the second
/// exists to check that nothing observable depends on the choice.
enum class AllocPolicy : std::uint8_t { LowestFree, HighestFree };

/// Finite map from locations to arrays. Copies share structure.
class Store {
 public:
  using Entry = std::pair<Loc, ArrayPtr>;

  const Array* find(Loc l) const;
  /// Copy with `l` bound to `a`.
  Store with(Loc l, ArrayPtr a) const;
  Loc fresh(AllocPolicy policy) const;

  std::size_t size() const { return entries().size(); }
  bool empty() const { return entries().empty(); }
  const std::vector<Entry>& entries() const;
  std::size_t hash() const;

  friend bool operator==(const Store& a, const Store& b);

  static Store from_entries(std::vector<Entry> sorted);

 private:
  std::shared_ptr<const std::vector<Entry>> entries_;
};

struct Config {
  ExprPtr expr;
  Store store;
};

enum class HeadRule : std::uint8_t {
  IfTrue, IfFalse, CallPrim, Abs, LetVal, Alloc, Load, Store, Assert,
  Product, Proj, Length, CasSucc, CasFail, Call, Fork, Join,
};

/// "HeadIfTrue", ..., "Fork", "Join".
std::string_view rule_name(HeadRule r);
std::optional<HeadRule> parse_rule(std::string_view name);

struct StepLabel {
  TaskPath task;
  HeadRule kind;
  friend bool operator==(const StepLabel&, const StepLabel&) = default;
};

/// Largest array HeadAlloc will create; bigger requests are stuck.
inline constexpr std::int64_t kMaxAllocCells = std::int64_t{1} << 24;

std::optional<Value> prim_eval(PrimOp op, const Value& a, const Value& b);

struct HeadResult {
  ExprPtr expr;
  Store store;
  HeadRule rule;
  /// The location the rule allocated or wrote, if any.
  std::optional<Loc> touched;
};

/// One head step; absent when no rule applies.
std::optional<HeadResult> head_step(const ExprPtr& e, const Store& s,
                                    AllocPolicy policy = AllocPolicy::LowestFree);

struct Step {
  StepLabel label;
  Config next;
  ExprPtr redex;
  std::optional<Loc> touched;
};

/// The unique step of the task at `path`; absent if the path names no task
/// or the task cannot step.
std::optional<Step> step_task(const Config& c, const TaskPath& path,
                              AllocPolicy policy = AllocPolicy::LowestFree);

/// Successors of c, one per task that can step, left to right. `stuck_task`
/// (if given) is set when some live task cannot step.
std::vector<Step> enabled_steps(const Config& c, AllocPolicy policy = AllocPolicy::LowestFree,
                                bool* stuck_task = nullptr);

/// Reducibility as the inductive RedHead / RedCtx / RedPar definition.
bool reducible(const ExprPtr& e, const Store& s);
bool notstuck(const ExprPtr& e, const Store& s);

}  // namespace mdl
