#include "mdl/types.hpp"

#include <array>

namespace mdl {

std::string_view lib_name(LibKind k) {
  static constexpr std::array<std::string_view, 14> names = {
      "ref", "get", "set", "palloc", "pwrite", "pread", "alloc_fill",
      "init", "add", "elems", "parfor", "aadd", "fill", "filter_compact",
  };
  return names[static_cast<std::size_t>(k)];
}

Type Type::arrow(Type from, Type to) {
  Type t(TypeKind::Arrow);
  t.a_ = std::make_shared<const Type>(std::move(from));
  t.b_ = std::make_shared<const Type>(std::move(to));
  return t;
}

Type Type::prod(Type a, Type b) {
  Type t(TypeKind::Prod);
  t.a_ = std::make_shared<const Type>(std::move(a));
  t.b_ = std::make_shared<const Type>(std::move(b));
  return t;
}

Type Type::ref(Type content) {
  Type t(TypeKind::Ref);
  t.a_ = std::make_shared<const Type>(std::move(content));
  return t;
}

Type Type::lib(LibKind k) {
  Type t(TypeKind::Lib);
  t.tag_ = static_cast<int>(k);
  return t;
}

Type Type::closure(int id) {
  Type t(TypeKind::Closure);
  t.tag_ = id;
  return t;
}

bool Type::fractional() const {
  switch (kind_) {
    case TypeKind::PWrite:
    case TypeKind::PRead:
    case TypeKind::IntArray:
    case TypeKind::IntSet:
      return true;
    default:
      return false;
  }
}

bool operator==(const Type& x, const Type& y) {
  if (x.kind_ != y.kind_) return false;
  switch (x.kind_) {
    case TypeKind::Arrow:
    case TypeKind::Prod:
      return *x.a_ == *y.a_ && *x.b_ == *y.b_;
    case TypeKind::Ref:
      return *x.a_ == *y.a_;
    case TypeKind::Lib:
    case TypeKind::Closure:
      return x.tag_ == y.tag_;
    default:
      return !x.fractional() || x.q_ == y.q_;
  }
}

namespace {

std::string fraction_str(Fraction q) {
  if (q.denominator() == 1) return std::to_string(q.numerator());
  return std::to_string(q.numerator()) + "/" + std::to_string(q.denominator());
}

// Precedence: 0 arrow, 1 product, 2 applied constructors and atoms.
std::string print_at(const Type& t, int ctx) {
  std::string s;
  int own = 2;
  switch (t.kind()) {
    case TypeKind::Bot: s = "bot"; break;
    case TypeKind::Empty: s = "empty"; break;
    case TypeKind::Unit: s = "unit"; break;
    case TypeKind::Bool: s = "bool"; break;
    case TypeKind::Int: s = "int"; break;
    case TypeKind::Hash: s = "hash"; break;
    case TypeKind::Lib: s = "lib " + std::string(lib_name(t.lib_kind())); break;
    case TypeKind::Closure: s = "closure#" + std::to_string(t.closure_id()); break;
    case TypeKind::Arrow:
      own = 0;
      s = print_at(t.left(), 1) + " -> " + print_at(t.right(), 0);
      break;
    case TypeKind::Prod:
      own = 1;
      s = print_at(t.left(), 2) + " * " + print_at(t.right(), 2);
      break;
    case TypeKind::Ref: s = "ref " + print_at(t.left(), 2); break;
    case TypeKind::PWrite: s = "pwrite " + fraction_str(t.fraction()); break;
    case TypeKind::PRead: s = "pread " + fraction_str(t.fraction()); break;
    case TypeKind::IntArray: s = "intarray " + fraction_str(t.fraction()); break;
    case TypeKind::IntSet: s = "intset " + fraction_str(t.fraction()); break;
  }
  if (t.is(TypeKind::Ref)) own = 2;
  return own < ctx ? "(" + s + ")" : s;
}

}  // namespace

std::string print(const Type& t) { return print_at(t, 0); }

Type type_combine(const Type& a, const Type& b) {
  if (a.is(TypeKind::Bot) || b.is(TypeKind::Bot) || a.kind() != b.kind()) return Type::bot();
  switch (a.kind()) {
    case TypeKind::Empty:
    case TypeKind::Unit:
    case TypeKind::Bool:
    case TypeKind::Int:
    case TypeKind::Hash:
      return a;
    case TypeKind::Lib:
    case TypeKind::Closure:
    case TypeKind::Arrow:
      return a == b ? a : Type::bot();
    case TypeKind::Prod: {
      Type l = type_combine(a.left(), b.left());
      Type r = type_combine(a.right(), b.right());
      if (l.is(TypeKind::Bot) || r.is(TypeKind::Bot)) return Type::bot();
      return Type::prod(std::move(l), std::move(r));
    }
    case TypeKind::PWrite:
    case TypeKind::PRead:
    case TypeKind::IntArray:
    case TypeKind::IntSet: {
      Fraction q = a.fraction() + b.fraction();
      if (q > kWhole) return Type::bot();
      return a.with_fraction(q);
    }
    default:
      return Type::bot();
  }
}

bool idempotent(const Type& t) {
  Type c = type_combine(t, t);
  return !c.is(TypeKind::Bot) && c == t;
}

std::vector<Type> phase_update(const Type& t) {
  switch (t.kind()) {
    case TypeKind::PRead:
    case TypeKind::PWrite:
      if (t.fraction() == kWhole) return {t, t.is(TypeKind::PRead) ? Type::pwrite(1) : Type::pread(1)};
      return {t};
    case TypeKind::Prod: {
      std::vector<Type> out;
      for (const Type& l : phase_update(t.left())) {
        for (const Type& r : phase_update(t.right())) out.push_back(Type::prod(l, r));
      }
      return out;
    }
    default:
      return {t};
  }
}

std::optional<Type> halve(const Type& t) {
  if (t.fractional()) return t.with_fraction(t.fraction() / 2);
  if (t.is(TypeKind::Prod)) {
    auto l = halve(t.left());
    auto r = halve(t.right());
    if (!l || !r) return std::nullopt;
    return Type::prod(std::move(*l), std::move(*r));
  }
  if (idempotent(t)) return t;
  return std::nullopt;
}

TypeEnv env_combine(const TypeEnv& a, const TypeEnv& b) {
  TypeEnv out = a;
  for (const auto& [x, t] : b) {
    auto [it, fresh] = out.emplace(x, t);
    if (!fresh) it->second = type_combine(it->second, t);
  }
  return out;
}

bool duplicable(const TypeEnv& g) {
  for (const auto& [x, t] : g) {
    if (!idempotent(t)) return false;
  }
  return true;
}

std::string print(const TypeEnv& g) {
  std::string out = "{";
  bool first = true;
  for (const auto& [x, t] : g) {
    if (!first) out += ", ";
    first = false;
    out += x.str() + ": " + print(t);
  }
  return out + "}";
}

}  // namespace mdl
