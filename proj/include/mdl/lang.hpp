#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "mdl/symbol.hpp"

namespace mdl {

/// Heap location. Only allocation produces these; there is no literal syntax.
struct Loc {
  std::uint32_t id = 0;
  friend auto operator<=>(Loc, Loc) = default;
};

enum class PrimOp : std::uint8_t { Add, Sub, Mul, Div, Mod, Eq, Lt, Le, Gt, Ge, Or, And };

std::string_view prim_name(PrimOp op);

class Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct PairCell;
struct FunCell;

/// Runtime value. Pair and function payloads are hash-consed, so equality is
/// structural while costing a pointer comparison.
class Value {
 public:
  enum class Kind : std::uint8_t { Unit, Bool, Int, Loc, Pair, Fun };

  Value() = default;

  static Value unit() { return {}; }
  static Value boolean(bool b);
  static Value integer(std::int64_t i);
  static Value location(Loc l);
  static Value pair(Value first, Value second);
  static Value fun(Symbol self, Symbol param, ExprPtr body);

  Kind kind() const { return kind_; }
  bool is(Kind k) const { return kind_ == k; }
  /// Unit, booleans, integers and locations.
  bool is_scalar() const { return kind_ <= Kind::Loc; }

  bool as_bool() const { return bits_ != 0; }
  std::int64_t as_int() const { return bits_; }
  Loc as_loc() const { return Loc{static_cast<std::uint32_t>(bits_)}; }

  const Value& first() const;
  const Value& second() const;
  Symbol fun_self() const;
  Symbol fun_param() const;
  const ExprPtr& fun_body() const;

  std::size_t hash() const;
  /// Appends locations not yet in `out`, in first-occurrence order.
  void append_locs(std::vector<Loc>& out) const;
  bool has_locs() const;

  friend bool operator==(const Value& a, const Value& b) {
    return a.kind_ == b.kind_ && a.bits_ == b.bits_ && a.cell_ == b.cell_;
  }

 private:
  Kind kind_ = Kind::Unit;
  std::int64_t bits_ = 0;
  std::shared_ptr<const void> cell_;
};

enum class ExprKind : std::uint8_t {
  Val, Var, Let, If, Fun, App, Prim, Pair, Proj,
  Assert, Alloc, Load, Store, Length, Par, RunPar, Cas,
};

std::string_view kind_name(ExprKind k);

/// Immutable, hash-consed expression node.
///
/// Every node is interned on construction: two structurally equal nodes that
/// are alive at the same time are the same object. Nodes cache their hash,
/// free variables and the locations they mention.
///
/// Child layout per kind:
///   Let(x)      [bound, body]          If       [cond, then, else]
///   Fun(f, x)   [body]                 App      [fn, arg]
///   Prim(op)    [lhs, rhs]             Pair     [fst, snd]
///   Proj(k)     [e]                    Assert/Alloc/Length [e]
///   Load        [arr, idx]             Store    [arr, idx, val]
///   Par/RunPar  [left, right]          Cas      [arr, idx, old, new]
class Expr : public std::enable_shared_from_this<Expr> {
 public:
  static constexpr std::size_t kMaxKids = 4;

  ~Expr();
  Expr(const Expr&) = delete;
  Expr& operator=(const Expr&) = delete;

  static ExprPtr val(Value v);
  static ExprPtr var(Symbol x);
  static ExprPtr let(Symbol x, ExprPtr bound, ExprPtr body);
  static ExprPtr if_(ExprPtr cond, ExprPtr then_e, ExprPtr else_e);
  static ExprPtr fun(Symbol self, Symbol param, ExprPtr body);
  static ExprPtr app(ExprPtr fn, ExprPtr arg);
  static ExprPtr prim(PrimOp op, ExprPtr lhs, ExprPtr rhs);
  static ExprPtr pair(ExprPtr a, ExprPtr b);
  static ExprPtr proj(int k, ExprPtr e);
  static ExprPtr assert_(ExprPtr e);
  static ExprPtr alloc(ExprPtr n);
  static ExprPtr load(ExprPtr arr, ExprPtr idx);
  static ExprPtr store(ExprPtr arr, ExprPtr idx, ExprPtr v);
  static ExprPtr length(ExprPtr arr);
  static ExprPtr par(ExprPtr l, ExprPtr r);
  static ExprPtr run_par(ExprPtr l, ExprPtr r);
  static ExprPtr cas(ExprPtr arr, ExprPtr idx, ExprPtr old_v, ExprPtr new_v);

  static ExprPtr unit() { return val(Value::unit()); }
  static ExprPtr integer(std::int64_t i) { return val(Value::integer(i)); }
  static ExprPtr boolean(bool b) { return val(Value::boolean(b)); }

  /// Node of the same shape as `shape` with its children replaced.
  static ExprPtr rebuild(const Expr& shape, std::span<const ExprPtr> kids);

  ExprKind kind() const { return kind_; }
  bool is(ExprKind k) const { return kind_ == k; }
  bool is_value() const { return kind_ == ExprKind::Val; }

  const Value& value() const { return value_; }
  /// Var name, Let binder, or Fun's recursive name.
  Symbol name() const { return name_; }
  /// Fun's parameter.
  Symbol param() const { return param_; }
  PrimOp op() const { return op_; }
  int proj_index() const { return proj_; }

  std::span<const ExprPtr> kids() const { return {kids_.data(), arity_}; }
  const ExprPtr& kid(std::size_t i) const { return kids_[i]; }
  std::size_t arity() const { return arity_; }

  std::size_t hash() const { return hash_; }
  /// Free variables, sorted by symbol identity.
  std::span<const Symbol> free_vars() const { return free_; }
  bool closed() const { return free_.empty(); }
  bool has_free(Symbol x) const;
  std::span<const Loc> locs() const { return locs_; }

  /// Number of AST nodes, counting values as leaves.
  std::size_t size() const;

 private:
  template <class>
  friend class InternTable;

  Expr() = default;
  Expr(Expr&&) = default;
  static ExprPtr make(Expr&& proto);
  bool same_shape(const Expr& o) const;
  void finish();

  ExprKind kind_ = ExprKind::Val;
  PrimOp op_ = PrimOp::Add;
  std::uint8_t proj_ = 0;
  std::uint8_t arity_ = 0;
  bool registered_ = false;
  Symbol name_;
  Symbol param_;
  Value value_;
  std::array<ExprPtr, kMaxKids> kids_;
  std::size_t hash_ = 0;
  std::vector<Symbol> free_;
  std::vector<Loc> locs_;
};

/// Capture-free substitution of a closed value for x.
ExprPtr subst(Symbol x, const Value& v, const ExprPtr& e);

/// Location renaming. `rename` must be defined on every location mentioned.
using LocMap = std::function<Loc(Loc)>;
Value map_locs(const Value& v, const LocMap& rename);
ExprPtr map_locs(const ExprPtr& e, const LocMap& rename);

}  // namespace mdl
