#include "mdl/lang.hpp"

#include <algorithm>
#include <cassert>
#include <functional>
#include <unordered_map>

#include "intern.hpp"

namespace mdl {

struct PairCell : std::enable_shared_from_this<PairCell> {
  PairCell(Value a, Value b) : first(std::move(a)), second(std::move(b)) {
    hash_ = hash_mix(hash_mix(0x7061697200000000ULL, first.hash()), second.hash());
    first.append_locs(locs);
    second.append_locs(locs);
  }
  PairCell(PairCell&&) = default;
  ~PairCell() {
    if (registered_) InternTable<PairCell>::instance().erase(this);
  }
  bool same_shape(const PairCell& o) const { return first == o.first && second == o.second; }

  Value first;
  Value second;
  std::vector<Loc> locs;
  std::size_t hash_ = 0;
  bool registered_ = false;
};

struct FunCell : std::enable_shared_from_this<FunCell> {
  FunCell(Symbol f, Symbol x, ExprPtr b) : self(f), param(x), body(std::move(b)) {
    hash_ = hash_mix(hash_mix(hash_mix(0x66756e0000000000ULL, self.hash()), param.hash()),
                     body->hash());
    locs.assign(body->locs().begin(), body->locs().end());
  }
  FunCell(FunCell&&) = default;
  ~FunCell() {
    if (registered_) InternTable<FunCell>::instance().erase(this);
  }
  bool same_shape(const FunCell& o) const {
    return self == o.self && param == o.param && body == o.body;
  }

  Symbol self;
  Symbol param;
  ExprPtr body;
  std::vector<Loc> locs;
  std::size_t hash_ = 0;
  bool registered_ = false;
};

std::string_view prim_name(PrimOp op) {
  switch (op) {
    case PrimOp::Add: return "+";
    case PrimOp::Sub: return "-";
    case PrimOp::Mul: return "*";
    case PrimOp::Div: return "/";
    case PrimOp::Mod: return "mod";
    case PrimOp::Eq: return "==";
    case PrimOp::Lt: return "<";
    case PrimOp::Le: return "<=";
    case PrimOp::Gt: return ">";
    case PrimOp::Ge: return ">=";
    case PrimOp::Or: return "||";
    case PrimOp::And: return "&&";
  }
  return "?";
}

std::string_view kind_name(ExprKind k) {
  switch (k) {
    case ExprKind::Val: return "Val";
    case ExprKind::Var: return "Var";
    case ExprKind::Let: return "Let";
    case ExprKind::If: return "If";
    case ExprKind::Fun: return "Fun";
    case ExprKind::App: return "App";
    case ExprKind::Prim: return "Prim";
    case ExprKind::Pair: return "Pair";
    case ExprKind::Proj: return "Proj";
    case ExprKind::Assert: return "Assert";
    case ExprKind::Alloc: return "Alloc";
    case ExprKind::Load: return "Load";
    case ExprKind::Store: return "Store";
    case ExprKind::Length: return "Length";
    case ExprKind::Par: return "Par";
    case ExprKind::RunPar: return "RunPar";
    case ExprKind::Cas: return "Cas";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Value

Value Value::boolean(bool b) {
  Value v;
  v.kind_ = Kind::Bool;
  v.bits_ = b ? 1 : 0;
  return v;
}

Value Value::integer(std::int64_t i) {
  Value v;
  v.kind_ = Kind::Int;
  v.bits_ = i;
  return v;
}

Value Value::location(Loc l) {
  Value v;
  v.kind_ = Kind::Loc;
  v.bits_ = l.id;
  return v;
}

Value Value::pair(Value first, Value second) {
  Value v;
  v.kind_ = Kind::Pair;
  v.cell_ = InternTable<PairCell>::instance().intern(PairCell(std::move(first), std::move(second)));
  return v;
}

Value Value::fun(Symbol self, Symbol param, ExprPtr body) {
  Value v;
  v.kind_ = Kind::Fun;
  v.cell_ = InternTable<FunCell>::instance().intern(FunCell(self, param, std::move(body)));
  return v;
}

const Value& Value::first() const {
  assert(kind_ == Kind::Pair);
  return static_cast<const PairCell*>(cell_.get())->first;
}

const Value& Value::second() const {
  assert(kind_ == Kind::Pair);
  return static_cast<const PairCell*>(cell_.get())->second;
}

Symbol Value::fun_self() const { return static_cast<const FunCell*>(cell_.get())->self; }
Symbol Value::fun_param() const { return static_cast<const FunCell*>(cell_.get())->param; }
const ExprPtr& Value::fun_body() const { return static_cast<const FunCell*>(cell_.get())->body; }

std::size_t Value::hash() const {
  switch (kind_) {
    case Kind::Pair: return static_cast<const PairCell*>(cell_.get())->hash_;
    case Kind::Fun: return static_cast<const FunCell*>(cell_.get())->hash_;
    default: return hash_mix(static_cast<std::size_t>(kind_) + 1, static_cast<std::size_t>(bits_));
  }
}

namespace {

void push_unique(std::vector<Loc>& out, Loc l) {
  if (std::find(out.begin(), out.end(), l) == out.end()) out.push_back(l);
}

}  // namespace

void Value::append_locs(std::vector<Loc>& out) const {
  switch (kind_) {
    case Kind::Loc: push_unique(out, as_loc()); break;
    case Kind::Pair:
      for (Loc l : static_cast<const PairCell*>(cell_.get())->locs) push_unique(out, l);
      break;
    case Kind::Fun:
      for (Loc l : static_cast<const FunCell*>(cell_.get())->locs) push_unique(out, l);
      break;
    default: break;
  }
}

bool Value::has_locs() const {
  switch (kind_) {
    case Kind::Loc: return true;
    case Kind::Pair: return !static_cast<const PairCell*>(cell_.get())->locs.empty();
    case Kind::Fun: return !static_cast<const FunCell*>(cell_.get())->locs.empty();
    default: return false;
  }
}

// ---------------------------------------------------------------------------
// Expr

Expr::~Expr() {
  if (registered_) InternTable<Expr>::instance().erase(this);
}

bool Expr::same_shape(const Expr& o) const {
  if (kind_ != o.kind_ || arity_ != o.arity_) return false;
  switch (kind_) {
    case ExprKind::Val: return value_ == o.value_;
    case ExprKind::Var: return name_ == o.name_;
    case ExprKind::Let:
      if (name_ != o.name_) return false;
      break;
    case ExprKind::Fun:
      if (name_ != o.name_ || param_ != o.param_) return false;
      break;
    case ExprKind::Prim:
      if (op_ != o.op_) return false;
      break;
    case ExprKind::Proj:
      if (proj_ != o.proj_) return false;
      break;
    default: break;
  }
  for (std::size_t i = 0; i < arity_; ++i) {
    if (kids_[i] != o.kids_[i]) return false;
  }
  return true;
}

namespace {

bool sym_less(Symbol a, Symbol b) { return std::less<const void*>{}(a.id(), b.id()); }

void insert_sorted(std::vector<Symbol>& set, Symbol x) {
  auto it = std::lower_bound(set.begin(), set.end(), x, sym_less);
  if (it == set.end() || *it != x) set.insert(it, x);
}

}  // namespace

void Expr::finish() {
  std::size_t h = hash_mix(0xe0e0ULL, static_cast<std::size_t>(kind_));
  switch (kind_) {
    case ExprKind::Val:
      h = hash_mix(h, value_.hash());
      value_.append_locs(locs_);
      break;
    case ExprKind::Var:
      h = hash_mix(h, name_.hash());
      free_.push_back(name_);
      break;
    case ExprKind::Let: h = hash_mix(h, name_.hash()); break;
    case ExprKind::Fun: h = hash_mix(hash_mix(h, name_.hash()), param_.hash()); break;
    case ExprKind::Prim: h = hash_mix(h, static_cast<std::size_t>(op_)); break;
    case ExprKind::Proj: h = hash_mix(h, proj_); break;
    default: break;
  }
  for (std::size_t i = 0; i < arity_; ++i) {
    const Expr& k = *kids_[i];
    h = hash_mix(h, k.hash_);
    for (Loc l : k.locs_) push_unique(locs_, l);
    bool binds = false;
    if (kind_ == ExprKind::Let && i == 1) binds = true;
    if (kind_ == ExprKind::Fun) binds = true;
    for (Symbol s : k.free_) {
      if (binds && (s == name_ || (kind_ == ExprKind::Fun && s == param_))) continue;
      insert_sorted(free_, s);
    }
  }
  hash_ = h;
}

ExprPtr Expr::make(Expr&& proto) {
  proto.finish();
  return InternTable<Expr>::instance().intern(std::move(proto));
}

bool Expr::has_free(Symbol x) const {
  return std::binary_search(free_.begin(), free_.end(), x, sym_less);
}

std::size_t Expr::size() const {
  std::size_t n = 1;
  for (std::size_t i = 0; i < arity_; ++i) n += kids_[i]->size();
  return n;
}

ExprPtr Expr::val(Value v) {
  Expr e;
  e.kind_ = ExprKind::Val;
  e.value_ = std::move(v);
  return make(std::move(e));
}

ExprPtr Expr::var(Symbol x) {
  Expr e;
  e.kind_ = ExprKind::Var;
  e.name_ = x;
  return make(std::move(e));
}

namespace {

template <std::size_t N>
void set_kids(std::array<ExprPtr, Expr::kMaxKids>& dst, std::uint8_t& arity,
              std::array<ExprPtr, N>&& src) {
  static_assert(N <= Expr::kMaxKids);
  for (std::size_t i = 0; i < N; ++i) {
    assert(src[i]);
    dst[i] = std::move(src[i]);
  }
  arity = static_cast<std::uint8_t>(N);
}

}  // namespace

#define MDL_NODE(KIND, ...)                                  \
  Expr e;                                                     \
  e.kind_ = ExprKind::KIND;                                   \
  set_kids(e.kids_, e.arity_, std::array{__VA_ARGS__});

ExprPtr Expr::let(Symbol x, ExprPtr bound, ExprPtr body) {
  MDL_NODE(Let, std::move(bound), std::move(body));
  e.name_ = x;
  return make(std::move(e));
}

ExprPtr Expr::if_(ExprPtr c, ExprPtr t, ExprPtr f) {
  MDL_NODE(If, std::move(c), std::move(t), std::move(f));
  return make(std::move(e));
}

ExprPtr Expr::fun(Symbol self, Symbol param, ExprPtr body) {
  MDL_NODE(Fun, std::move(body));
  e.name_ = self;
  e.param_ = param;
  return make(std::move(e));
}

ExprPtr Expr::app(ExprPtr fn, ExprPtr arg) {
  MDL_NODE(App, std::move(fn), std::move(arg));
  return make(std::move(e));
}

ExprPtr Expr::prim(PrimOp op, ExprPtr lhs, ExprPtr rhs) {
  MDL_NODE(Prim, std::move(lhs), std::move(rhs));
  e.op_ = op;
  return make(std::move(e));
}

ExprPtr Expr::pair(ExprPtr a, ExprPtr b) {
  MDL_NODE(Pair, std::move(a), std::move(b));
  return make(std::move(e));
}

ExprPtr Expr::proj(int k, ExprPtr x) {
  assert(k == 1 || k == 2);
  MDL_NODE(Proj, std::move(x));
  e.proj_ = static_cast<std::uint8_t>(k);
  return make(std::move(e));
}

ExprPtr Expr::assert_(ExprPtr x) {
  MDL_NODE(Assert, std::move(x));
  return make(std::move(e));
}

ExprPtr Expr::alloc(ExprPtr n) {
  MDL_NODE(Alloc, std::move(n));
  return make(std::move(e));
}

ExprPtr Expr::load(ExprPtr arr, ExprPtr idx) {
  MDL_NODE(Load, std::move(arr), std::move(idx));
  return make(std::move(e));
}

ExprPtr Expr::store(ExprPtr arr, ExprPtr idx, ExprPtr v) {
  MDL_NODE(Store, std::move(arr), std::move(idx), std::move(v));
  return make(std::move(e));
}

ExprPtr Expr::length(ExprPtr arr) {
  MDL_NODE(Length, std::move(arr));
  return make(std::move(e));
}

ExprPtr Expr::par(ExprPtr l, ExprPtr r) {
  MDL_NODE(Par, std::move(l), std::move(r));
  return make(std::move(e));
}

ExprPtr Expr::run_par(ExprPtr l, ExprPtr r) {
  MDL_NODE(RunPar, std::move(l), std::move(r));
  return make(std::move(e));
}

ExprPtr Expr::cas(ExprPtr arr, ExprPtr idx, ExprPtr old_v, ExprPtr new_v) {
  MDL_NODE(Cas, std::move(arr), std::move(idx), std::move(old_v), std::move(new_v));
  return make(std::move(e));
}

#undef MDL_NODE

ExprPtr Expr::rebuild(const Expr& shape, std::span<const ExprPtr> kids) {
  assert(kids.size() == shape.arity_);
  Expr e;
  e.kind_ = shape.kind_;
  e.op_ = shape.op_;
  e.proj_ = shape.proj_;
  e.name_ = shape.name_;
  e.param_ = shape.param_;
  e.value_ = shape.value_;
  e.arity_ = shape.arity_;
  for (std::size_t i = 0; i < kids.size(); ++i) e.kids_[i] = kids[i];
  return make(std::move(e));
}

// ---------------------------------------------------------------------------
// Substitution

namespace {

ExprPtr subst_rec(Symbol x, const Value& v, const ExprPtr& e,
                  std::unordered_map<const Expr*, ExprPtr>& memo) {
  if (!e->has_free(x)) return e;
  if (e->is(ExprKind::Var)) return Expr::val(v);
  if (auto it = memo.find(e.get()); it != memo.end()) return it->second;
  std::array<ExprPtr, Expr::kMaxKids> kids;
  for (std::size_t i = 0; i < e->arity(); ++i) {
    bool shadowed = e->is(ExprKind::Let) && i == 1 && e->name() == x;
    kids[i] = shadowed ? e->kid(i) : subst_rec(x, v, e->kid(i), memo);
  }
  ExprPtr out = Expr::rebuild(*e, {kids.data(), e->arity()});
  memo.emplace(e.get(), out);
  return out;
}

}  // namespace

ExprPtr subst(Symbol x, const Value& v, const ExprPtr& e) {
  std::unordered_map<const Expr*, ExprPtr> memo;
  return subst_rec(x, v, e, memo);
}

// ---------------------------------------------------------------------------
// Location renaming

Value map_locs(const Value& v, const LocMap& rename) {
  if (!v.has_locs()) return v;
  switch (v.kind()) {
    case Value::Kind::Loc: return Value::location(rename(v.as_loc()));
    case Value::Kind::Pair: return Value::pair(map_locs(v.first(), rename), map_locs(v.second(), rename));
    case Value::Kind::Fun: return Value::fun(v.fun_self(), v.fun_param(), map_locs(v.fun_body(), rename));
    default: return v;
  }
}

ExprPtr map_locs(const ExprPtr& e, const LocMap& rename) {
  if (e->locs().empty()) return e;
  if (e->is_value()) return Expr::val(map_locs(e->value(), rename));
  std::array<ExprPtr, Expr::kMaxKids> kids;
  for (std::size_t i = 0; i < e->arity(); ++i) kids[i] = map_locs(e->kid(i), rename);
  return Expr::rebuild(*e, {kids.data(), e->arity()});
}

}  // namespace mdl
