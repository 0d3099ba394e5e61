#include "mdl/semantics.hpp"

#include <algorithm>
#include <array>

#include "intern.hpp"

namespace mdl {

Array::Array(std::vector<Value> cells) : cells_(std::move(cells)) {
  std::size_t h = hash_mix(0xa77aULL, cells_.size());
  for (const Value& v : cells_) h = hash_mix(h, v.hash());
  hash_ = h;
}

// ---------------------------------------------------------------------------
// Store

namespace {
const std::vector<Store::Entry>& empty_entries() {
  static const std::vector<Store::Entry> none;
  return none;
}
}  // namespace

const std::vector<Store::Entry>& Store::entries() const {
  return entries_ ? *entries_ : empty_entries();
}

const Array* Store::find(Loc l) const {
  const auto& es = entries();
  auto it = std::lower_bound(es.begin(), es.end(), l,
                             [](const Entry& e, Loc k) { return e.first < k; });
  if (it == es.end() || it->first != l) return nullptr;
  return it->second.get();
}

Store Store::with(Loc l, ArrayPtr a) const {
  auto es = std::make_shared<std::vector<Entry>>(entries());
  auto it = std::lower_bound(es->begin(), es->end(), l,
                             [](const Entry& e, Loc k) { return e.first < k; });
  if (it != es->end() && it->first == l) it->second = std::move(a);
  else es->insert(it, Entry{l, std::move(a)});
  Store out;
  out.entries_ = std::move(es);
  return out;
}

Loc Store::fresh(AllocPolicy policy) const {
  const auto& es = entries();
  if (policy == AllocPolicy::LowestFree) {
    std::uint32_t next = 0;
    for (const auto& [l, a] : es) {
      if (l.id != next) break;
      ++next;
    }
    return Loc{next};
  }
  constexpr std::uint32_t kTop = (1u << 20) - 1;
  std::uint32_t next = kTop;
  for (auto it = es.rbegin(); it != es.rend(); ++it) {
    if (it->first.id > next) continue;
    if (it->first.id != next) break;
    --next;
  }
  return Loc{next};
}

std::size_t Store::hash() const {
  std::size_t h = 0x5707eULL;
  for (const auto& [l, a] : entries()) h = hash_mix(hash_mix(h, l.id), a->hash());
  return h;
}

bool operator==(const Store& a, const Store& b) {
  const auto& x = a.entries();
  const auto& y = b.entries();
  if (x.size() != y.size()) return false;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i].first != y[i].first) return false;
    if (x[i].second != y[i].second && !(*x[i].second == *y[i].second)) return false;
  }
  return true;
}

Store Store::from_entries(std::vector<Entry> sorted) {
  Store out;
  if (!sorted.empty()) out.entries_ = std::make_shared<const std::vector<Entry>>(std::move(sorted));
  return out;
}

// ---------------------------------------------------------------------------
// Rules

namespace {
constexpr std::array<std::string_view, 17> kRuleNames = {
    "HeadIfTrue", "HeadIfFalse", "HeadCallPrim", "HeadAbs",     "HeadLetVal", "HeadAlloc",
    "HeadLoad",   "HeadStore",   "HeadAssert",   "HeadProduct", "HeadProj",   "HeadLength",
    "HeadCASSucc", "HeadCASFail", "HeadCall",    "Fork",        "Join",
};
}  // namespace

std::string_view rule_name(HeadRule r) { return kRuleNames[static_cast<std::size_t>(r)]; }

std::optional<HeadRule> parse_rule(std::string_view name) {
  for (std::size_t i = 0; i < kRuleNames.size(); ++i) {
    if (kRuleNames[i] == name) return static_cast<HeadRule>(i);
  }
  return std::nullopt;
}

std::optional<Value> prim_eval(PrimOp op, const Value& a, const Value& b) {
  using K = Value::Kind;
  const bool ints = a.is(K::Int) && b.is(K::Int);
  const bool bools = a.is(K::Bool) && b.is(K::Bool);
  std::int64_t x = a.as_int();
  std::int64_t y = b.as_int();
  std::int64_t r = 0;
  switch (op) {
    case PrimOp::Add:
      if (!ints || __builtin_add_overflow(x, y, &r)) return std::nullopt;
      return Value::integer(r);
    case PrimOp::Sub:
      if (!ints || __builtin_sub_overflow(x, y, &r)) return std::nullopt;
      return Value::integer(r);
    case PrimOp::Mul:
      if (!ints || __builtin_mul_overflow(x, y, &r)) return std::nullopt;
      return Value::integer(r);
    case PrimOp::Div:
    case PrimOp::Mod: {
      if (!ints || y == 0) return std::nullopt;
      // Euclidean: 0 <= m < |y|.
      std::int64_t m = y == -1 ? 0 : x % y;
      if (m < 0) m += y < 0 ? -y : y;
      if (op == PrimOp::Mod) return Value::integer(m);
      std::int64_t diff = 0;
      if (__builtin_sub_overflow(x, m, &diff)) return std::nullopt;
      if (y == -1) {
        if (__builtin_mul_overflow(diff, std::int64_t{-1}, &r)) return std::nullopt;
        return Value::integer(r);
      }
      return Value::integer(diff / y);
    }
    case PrimOp::Lt: if (!ints) return std::nullopt; return Value::boolean(x < y);
    case PrimOp::Le: if (!ints) return std::nullopt; return Value::boolean(x <= y);
    case PrimOp::Gt: if (!ints) return std::nullopt; return Value::boolean(x > y);
    case PrimOp::Ge: if (!ints) return std::nullopt; return Value::boolean(x >= y);
    case PrimOp::Eq:
      if (ints || bools || (a.is(K::Loc) && b.is(K::Loc))) return Value::boolean(a == b);
      // The hash set compares integers against its dummy location.
      if ((a.is(K::Int) && b.is(K::Loc)) || (a.is(K::Loc) && b.is(K::Int))) {
        return Value::boolean(false);
      }
      return std::nullopt;
    case PrimOp::Or:
      if (!bools) return std::nullopt;
      return Value::boolean(a.as_bool() || b.as_bool());
    case PrimOp::And:
      if (!bools) return std::nullopt;
      return Value::boolean(a.as_bool() && b.as_bool());
  }
  return std::nullopt;
}

namespace {

bool comparable(const Value& v) { return v.is_scalar(); }

// Checked (location, index) pair for Load/Store/CAS.
const Array* cell_at(const Store& s, const Value& l, const Value& i, std::size_t* idx) {
  if (!l.is(Value::Kind::Loc) || !i.is(Value::Kind::Int)) return nullptr;
  const Array* a = s.find(l.as_loc());
  if (!a || i.as_int() < 0 || static_cast<std::uint64_t>(i.as_int()) >= a->size()) return nullptr;
  *idx = static_cast<std::size_t>(i.as_int());
  return a;
}

HeadResult pure(ExprPtr e, const Store& s, HeadRule r) { return HeadResult{std::move(e), s, r, {}}; }

}  // namespace

std::optional<HeadResult> head_step(const ExprPtr& e, const Store& s, AllocPolicy policy) {
  const Expr& n = *e;
  auto v = [&](std::size_t i) -> const Value& { return n.kid(i)->value(); };
  using K = Value::Kind;
  switch (n.kind()) {
    case ExprKind::Val:
    case ExprKind::Var:
      return std::nullopt;
    case ExprKind::Fun:
      return pure(Expr::val(Value::fun(n.name(), n.param(), n.kid(0))), s, HeadRule::Abs);
    case ExprKind::Par:
      return pure(Expr::run_par(n.kid(0), n.kid(1)), s, HeadRule::Fork);
    default:
      break;
  }
  // Operands evaluated by contexts must already be values.
  if (next_eval_child(n) >= 0) return std::nullopt;
  switch (n.kind()) {
    case ExprKind::If:
      if (!v(0).is(K::Bool)) return std::nullopt;
      return v(0).as_bool() ? pure(n.kid(1), s, HeadRule::IfTrue)
                            : pure(n.kid(2), s, HeadRule::IfFalse);
    case ExprKind::Prim: {
      auto r = prim_eval(n.op(), v(0), v(1));
      if (!r) return std::nullopt;
      return pure(Expr::val(*r), s, HeadRule::CallPrim);
    }
    case ExprKind::Let:
      if (n.name().is_wildcard()) return pure(n.kid(1), s, HeadRule::LetVal);
      return pure(subst(n.name(), v(0), n.kid(1)), s, HeadRule::LetVal);
    case ExprKind::Alloc: {
      if (!v(0).is(K::Int) || v(0).as_int() < 0 || v(0).as_int() > kMaxAllocCells) return std::nullopt;
      Loc l = s.fresh(policy);
      auto arr = std::make_shared<const Array>(
          std::vector<Value>(static_cast<std::size_t>(v(0).as_int()), Value::unit()));
      return HeadResult{Expr::val(Value::location(l)), s.with(l, std::move(arr)), HeadRule::Alloc, l};
    }
    case ExprKind::Load: {
      std::size_t i = 0;
      const Array* a = cell_at(s, v(0), v(1), &i);
      if (!a) return std::nullopt;
      return pure(Expr::val((*a)[i]), s, HeadRule::Load);
    }
    case ExprKind::Store: {
      std::size_t i = 0;
      const Array* a = cell_at(s, v(0), v(1), &i);
      if (!a) return std::nullopt;
      std::vector<Value> cells = a->cells();
      cells[i] = v(2);
      Loc l = v(0).as_loc();
      return HeadResult{Expr::unit(), s.with(l, std::make_shared<const Array>(std::move(cells))),
                        HeadRule::Store, l};
    }
    case ExprKind::Assert:
      if (!v(0).is(K::Bool) || !v(0).as_bool()) return std::nullopt;
      return pure(Expr::unit(), s, HeadRule::Assert);
    case ExprKind::Pair:
      return pure(Expr::val(Value::pair(v(0), v(1))), s, HeadRule::Product);
    case ExprKind::Proj:
      if (!v(0).is(K::Pair)) return std::nullopt;
      return pure(Expr::val(n.proj_index() == 1 ? v(0).first() : v(0).second()), s, HeadRule::Proj);
    case ExprKind::Length: {
      if (!v(0).is(K::Loc)) return std::nullopt;
      const Array* a = s.find(v(0).as_loc());
      if (!a) return std::nullopt;
      return pure(Expr::integer(static_cast<std::int64_t>(a->size())), s, HeadRule::Length);
    }
    case ExprKind::Cas: {
      std::size_t i = 0;
      const Array* a = cell_at(s, v(0), v(1), &i);
      if (!a) return std::nullopt;
      const Value& cur = (*a)[i];
      if (!comparable(cur) || !comparable(v(2))) return std::nullopt;
      if (!(cur == v(2))) return pure(Expr::boolean(false), s, HeadRule::CasFail);
      std::vector<Value> cells = a->cells();
      cells[i] = v(3);
      Loc l = v(0).as_loc();
      return HeadResult{Expr::boolean(true), s.with(l, std::make_shared<const Array>(std::move(cells))),
                        HeadRule::CasSucc, l};
    }
    case ExprKind::App: {
      const Value& f = v(0);
      if (!f.is(K::Fun)) return std::nullopt;
      ExprPtr body = subst(f.fun_param(), v(1), f.fun_body());
      if (!f.fun_self().is_wildcard()) body = subst(f.fun_self(), f, body);
      return pure(std::move(body), s, HeadRule::Call);
    }
    case ExprKind::RunPar:
      if (!n.kid(0)->is_value() || !n.kid(1)->is_value()) return std::nullopt;
      return pure(Expr::val(Value::pair(v(0), v(1))), s, HeadRule::Join);
    default:
      return std::nullopt;
  }
}

// ---------------------------------------------------------------------------
// Main reduction

namespace {

bool join_ready(const Expr& e) {
  return e.is(ExprKind::RunPar) && e.kid(0)->is_value() && e.kid(1)->is_value();
}

std::optional<HeadResult> step_at(const ExprPtr& term, std::span<const Side> path, const Store& s,
                                  AllocPolicy policy, ExprPtr& redex) {
  auto split = split_redex(term);
  if (!split) return std::nullopt;
  auto& [k, r] = *split;
  if (path.empty()) {
    if (r->is(ExprKind::RunPar) && !join_ready(*r)) return std::nullopt;
    auto h = head_step(r, s, policy);
    if (!h) return std::nullopt;
    redex = r;
    h->expr = fill(k, std::move(h->expr));
    return h;
  }
  if (!r->is(ExprKind::RunPar) || join_ready(*r)) return std::nullopt;
  std::size_t side = path.front() == Side::ParLeft ? 0 : 1;
  auto h = step_at(r->kid(side), path.subspan(1), s, policy, redex);
  if (!h) return std::nullopt;
  std::array<ExprPtr, 2> kids{r->kid(0), r->kid(1)};
  kids[side] = std::move(h->expr);
  h->expr = fill(k, Expr::run_par(kids[0], kids[1]));
  return h;
}

}  // namespace

std::optional<Step> step_task(const Config& c, const TaskPath& path, AllocPolicy policy) {
  ExprPtr redex;
  auto h = step_at(c.expr, path.steps(), c.store, policy, redex);
  if (!h) return std::nullopt;
  return Step{StepLabel{path, h->rule}, Config{std::move(h->expr), std::move(h->store)},
              std::move(redex), h->touched};
}

std::vector<Step> enabled_steps(const Config& c, AllocPolicy policy, bool* stuck_task) {
  std::vector<Step> out;
  bool stuck = false;
  for (const Task& t : decompose_tasks(c.expr)) {
    auto st = step_task(c, t.path, policy);
    if (st) out.push_back(std::move(*st));
    else stuck = true;
  }
  if (stuck_task) *stuck_task = stuck;
  return out;
}

namespace {

// Whether a single-hole frame may have its hole at child i.
bool legal_hole(const Expr& e, std::size_t i) {
  switch (e.kind()) {
    case ExprKind::Let:
    case ExprKind::If:
    case ExprKind::Proj:
    case ExprKind::Assert:
    case ExprKind::Alloc:
    case ExprKind::Length:
      return i == 0;
    case ExprKind::App:
    case ExprKind::Prim:
    case ExprKind::Pair:
    case ExprKind::Load:
    case ExprKind::Store:
    case ExprKind::Cas:
      for (std::size_t j = i + 1; j < e.arity(); ++j) {
        if (!e.kid(j)->is_value()) return false;
      }
      return true;
    default:
      return false;
  }
}

}  // namespace

bool reducible(const ExprPtr& e, const Store& s) {
  if (e->is_value()) return false;
  if (head_step(e, s)) return true;
  if (e->is(ExprKind::RunPar)) {
    const ExprPtr& l = e->kid(0);
    const ExprPtr& r = e->kid(1);
    return (l->is_value() || reducible(l, s)) && (r->is_value() || reducible(r, s));
  }
  for (std::size_t i = 0; i < e->arity(); ++i) {
    if (legal_hole(*e, i) && reducible(e->kid(i), s)) return true;
  }
  return false;
}

bool notstuck(const ExprPtr& e, const Store& s) { return e->is_value() || reducible(e, s); }

}  // namespace mdl
