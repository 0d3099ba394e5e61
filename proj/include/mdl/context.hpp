#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mdl/lang.hpp"

namespace mdl {

/// One single-hole frame: `node` with child `hole` removed.
struct Frame {
  ExprPtr node;
  std::uint8_t hole = 0;
};

/// Evaluation context, outermost frame first.
struct EvalCtx {
  std::vector<Frame> frames;
  bool empty() const { return frames.empty(); }
};

enum class Side : std::uint8_t { ParLeft, ParRight };

/// Addresses a task: starting from the root, go to the redex position, which
/// must be an active parallel tuple, and continue into the given side.
class TaskPath {
 public:
  TaskPath() = default;
  explicit TaskPath(std::vector<Side> steps) : steps_(std::move(steps)) {}

  std::span<const Side> steps() const { return steps_; }
  bool empty() const { return steps_.empty(); }
  std::size_t size() const { return steps_.size(); }
  TaskPath child(Side s) const;

  /// "L"/"R" string, empty for the root task.
  std::string str() const;
  static std::optional<TaskPath> parse(std::string_view text);

  friend bool operator==(const TaskPath&, const TaskPath&) = default;
  friend auto operator<=>(const TaskPath&, const TaskPath&) = default;

 private:
  std::vector<Side> steps_;
};

inline bool is_value(const ExprPtr& e) { return e->is_value(); }

/// Index of the child evaluated next under the right-to-left context grammar,
/// or -1 when the node itself is in redex position.
int next_eval_child(const Expr& e);

/// Decomposes e = K[r] where r is a head-redex candidate or a Par/RunPar node.
/// Absent iff e is a value.
std::optional<std::pair<EvalCtx, ExprPtr>> split_redex(const ExprPtr& e);

ExprPtr fill(const EvalCtx& k, ExprPtr e);

struct Task {
  TaskPath path;
  ExprPtr term;
};

/// Every schedulable task, left to right. A join-ready RunPar is a task.
std::vector<Task> decompose_tasks(const ExprPtr& e);

}  // namespace mdl
