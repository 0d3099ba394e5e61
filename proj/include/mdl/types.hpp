#pragma once

#include <boost/rational.hpp>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mdl/symbol.hpp"

namespace mdl {

using Fraction = boost::rational<std::int64_t>;
// Compare against this rather than a bare int: the mixed rational/int
// operators recurse forever under C++20 rewritten comparisons.
inline const Fraction kWhole{1};

/// Library functions the checker gives dedicated rules to.
enum class LibKind : std::uint8_t {
  Ref, Get, Set, PAlloc, PWrite, PRead, AllocFill, Init, Add, Elems, ParFor,
  // Known, but without a typing rule.
  AAdd, Fill, FilterCompact,
};

std::string_view lib_name(LibKind k);

enum class TypeKind : std::uint8_t {
  Bot, Empty, Unit, Bool, Int, Arrow, Prod, Ref, PWrite, PRead, IntArray, IntSet,
  // Checker-internal: a recognised hash function, a library function, and a
  // lambda whose arrow type is fixed at its first application.
  Hash, Lib, Closure,
};

class Type {
 public:
  Type() = default;

  static Type bot() { return Type(TypeKind::Bot); }
  static Type empty() { return Type(TypeKind::Empty); }
  static Type unit() { return Type(TypeKind::Unit); }
  static Type boolean() { return Type(TypeKind::Bool); }
  static Type integer() { return Type(TypeKind::Int); }
  static Type arrow(Type from, Type to);
  static Type prod(Type a, Type b);
  static Type ref(Type content);
  static Type pwrite(Fraction q) { return Type(TypeKind::PWrite, q); }
  static Type pread(Fraction q) { return Type(TypeKind::PRead, q); }
  static Type intarray(Fraction q) { return Type(TypeKind::IntArray, q); }
  static Type intset(Fraction q) { return Type(TypeKind::IntSet, q); }
  static Type hash() { return Type(TypeKind::Hash); }
  static Type lib(LibKind k);
  static Type closure(int id);

  TypeKind kind() const { return kind_; }
  bool is(TypeKind k) const { return kind_ == k; }
  Fraction fraction() const { return q_; }
  bool fractional() const;
  const Type& left() const { return *a_; }
  const Type& right() const { return *b_; }
  LibKind lib_kind() const { return static_cast<LibKind>(tag_); }
  int closure_id() const { return tag_; }
  Type with_fraction(Fraction q) const { return Type(kind_, q); }

  friend bool operator==(const Type& x, const Type& y);

 private:
  explicit Type(TypeKind k, Fraction q = 1) : kind_(k), q_(q) {}

  TypeKind kind_ = TypeKind::Bot;
  Fraction q_ = 1;
  int tag_ = 0;
  std::shared_ptr<const Type> a_;
  std::shared_ptr<const Type> b_;
};

std::string print(const Type& t);

/// The type monoid. Unboxed types are idempotent, arrows combine when equal,
/// products pointwise, fractions add up to at most 1, everything else is Bot.
/// A product with a Bot component is Bot.
Type type_combine(const Type& a, const Type& b);

/// τ · τ = τ.
bool idempotent(const Type& t);

/// Every type reachable from t by the phase update relation (reflexive).
std::vector<Type> phase_update(const Type& t);

/// Splits t into two equal shares with t = s · s; absent when impossible.
std::optional<Type> halve(const Type& t);

using TypeEnv = std::map<Symbol, Type>;

TypeEnv env_combine(const TypeEnv& a, const TypeEnv& b);
bool duplicable(const TypeEnv& g);
std::string print(const TypeEnv& g);

}  // namespace mdl
