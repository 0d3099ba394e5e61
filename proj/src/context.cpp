#include "mdl/context.hpp"

namespace mdl {

TaskPath TaskPath::child(Side s) const {
  TaskPath out = *this;
  out.steps_.push_back(s);
  return out;
}

std::string TaskPath::str() const {
  std::string out;
  for (Side s : steps_) out.push_back(s == Side::ParLeft ? 'L' : 'R');
  return out;
}

std::optional<TaskPath> TaskPath::parse(std::string_view text) {
  std::vector<Side> steps;
  for (char c : text) {
    if (c == 'L') steps.push_back(Side::ParLeft);
    else if (c == 'R') steps.push_back(Side::ParRight);
    else return std::nullopt;
  }
  return TaskPath(std::move(steps));
}

int next_eval_child(const Expr& e) {
  switch (e.kind()) {
    case ExprKind::Val:
    case ExprKind::Var:
    case ExprKind::Fun:
    case ExprKind::Par:
    case ExprKind::RunPar:
      return -1;
    case ExprKind::Let:
    case ExprKind::If:
    case ExprKind::Proj:
    case ExprKind::Assert:
    case ExprKind::Alloc:
    case ExprKind::Length:
      return e.kid(0)->is_value() ? -1 : 0;
    case ExprKind::App:
    case ExprKind::Prim:
    case ExprKind::Pair:
    case ExprKind::Load:
    case ExprKind::Store:
    case ExprKind::Cas:
      for (int i = static_cast<int>(e.arity()) - 1; i >= 0; --i) {
        if (!e.kid(i)->is_value()) return i;
      }
      return -1;
  }
  return -1;
}

std::optional<std::pair<EvalCtx, ExprPtr>> split_redex(const ExprPtr& e) {
  if (e->is_value()) return std::nullopt;
  EvalCtx k;
  ExprPtr cur = e;
  for (;;) {
    int i = next_eval_child(*cur);
    if (i < 0) break;
    k.frames.push_back(Frame{cur, static_cast<std::uint8_t>(i)});
    cur = cur->kid(i);
  }
  return std::pair{std::move(k), std::move(cur)};
}

ExprPtr fill(const EvalCtx& k, ExprPtr e) {
  for (auto it = k.frames.rbegin(); it != k.frames.rend(); ++it) {
    const Expr& node = *it->node;
    std::array<ExprPtr, Expr::kMaxKids> kids;
    for (std::size_t i = 0; i < node.arity(); ++i) kids[i] = node.kid(i);
    kids[it->hole] = std::move(e);
    e = Expr::rebuild(node, {kids.data(), node.arity()});
  }
  return e;
}

namespace {

void collect_tasks(const ExprPtr& term, const TaskPath& path, std::vector<Task>& out) {
  if (term->is_value()) return;
  auto split = split_redex(term);
  const ExprPtr& r = split->second;
  if (r->is(ExprKind::RunPar) && !(r->kid(0)->is_value() && r->kid(1)->is_value())) {
    collect_tasks(r->kid(0), path.child(Side::ParLeft), out);
    collect_tasks(r->kid(1), path.child(Side::ParRight), out);
    return;
  }
  out.push_back(Task{path, term});
}

}  // namespace

std::vector<Task> decompose_tasks(const ExprPtr& e) {
  std::vector<Task> out;
  collect_tasks(e, TaskPath{}, out);
  return out;
}

}  // namespace mdl
