#include "mdl/checker.hpp"

#include <algorithm>
#include <utility>
#include <vector>

#include "mdl/corpus.hpp"

namespace mdl {

std::string_view error_kind_name(TypeError::Kind k) {
  switch (k) {
    case TypeError::Kind::UnsplittableSharing: return "UnsplittableSharing";
    case TypeError::Kind::PhaseViolation: return "PhaseViolation";
    case TypeError::Kind::NotDuplicableClosure: return "NotDuplicableClosure";
    case TypeError::Kind::Mismatch: return "Mismatch";
    case TypeError::Kind::UnboundVariable: return "UnboundVariable";
    case TypeError::Kind::BotCombination: return "BotCombination";
    case TypeError::Kind::Unsupported: return "Unsupported";
  }
  return "?";
}

std::string TypeError::render(std::string_view source_name) const {
  std::string out(source_name);
  if (pos.known()) out += ":" + std::to_string(pos.line) + ":" + std::to_string(pos.column);
  out += ": ";
  out += error_kind_name(kind);
  if (!variable.empty()) out += "(" + variable + ")";
  return out + ": " + message;
}

namespace {

using K = TypeError::Kind;

struct Failure {
  TypeError error;
};

// A recursive call reached a lambda whose result type is still unknown.
struct NeedResult {
  int id;
};

struct Closure {
  Symbol self;
  Symbol param;
  ExprPtr body;
  TypeEnv env;
  std::optional<Type> arg;
  std::optional<Type> result;
};

// Alpha-equivalence of a program term against a library definition, where
// each free variable of the definition must correspond to a program variable
// that the environment binds to that library function.
class AlphaMatcher {
 public:
  explicit AlphaMatcher(const TypeEnv& g) : g_(g) {}

  bool match(const Expr& def, const Expr& prog) {
    if (def.kind() != prog.kind() || def.arity() != prog.arity()) return false;
    switch (def.kind()) {
      case ExprKind::Val:
        return def.value() == prog.value();
      case ExprKind::Var:
        return match_var(def.name(), prog.name());
      case ExprKind::Prim:
        if (def.op() != prog.op()) return false;
        break;
      case ExprKind::Proj:
        if (def.proj_index() != prog.proj_index()) return false;
        break;
      case ExprKind::Let: {
        if (!match(*def.kid(0), *prog.kid(0))) return false;
        bound_.emplace_back(def.name(), prog.name());
        bool ok = match(*def.kid(1), *prog.kid(1));
        bound_.pop_back();
        return ok;
      }
      case ExprKind::Fun: {
        bound_.emplace_back(def.name(), prog.name());
        bound_.emplace_back(def.param(), prog.param());
        bool ok = match(*def.kid(0), *prog.kid(0));
        bound_.pop_back();
        bound_.pop_back();
        return ok;
      }
      default:
        break;
    }
    for (std::size_t i = 0; i < def.arity(); ++i) {
      if (!match(*def.kid(i), *prog.kid(i))) return false;
    }
    return true;
  }

 private:
  bool match_var(Symbol d, Symbol p) {
    int di = -1;
    int pi = -1;
    for (int i = static_cast<int>(bound_.size()) - 1; i >= 0; --i) {
      if (di < 0 && bound_[i].first == d) di = i;
      if (pi < 0 && bound_[i].second == p) pi = i;
    }
    if (di != pi) return false;
    if (di >= 0) return true;
    for (const auto& [fd, fp] : free_) {
      if (fd == d || fp == p) return fd == d && fp == p;
    }
    const Definition* def = find_definition(d.str());
    auto it = g_.find(p);
    if (!def || it == g_.end() || !it->second.is(TypeKind::Lib)) return false;
    if (lib_name(it->second.lib_kind()) != def->name) return false;
    free_.emplace_back(d, p);
    return true;
  }

  const TypeEnv& g_;
  std::vector<std::pair<Symbol, Symbol>> bound_;
  std::vector<std::pair<Symbol, Symbol>> free_;
};

constexpr LibKind kRecognised[] = {
    LibKind::Ref,  LibKind::Get,  LibKind::Set,    LibKind::PAlloc, LibKind::PWrite,
    LibKind::PRead, LibKind::AllocFill, LibKind::Init, LibKind::Add, LibKind::Elems,
    LibKind::ParFor, LibKind::AAdd, LibKind::Fill, LibKind::FilterCompact,
};

const std::vector<ExprPtr>& hash_functions() {
  static const std::vector<ExprPtr> hs = {parse("fun x -> 0"), parse("fun x -> x")};
  return hs;
}

bool is_hash_function(const Expr& e) {
  static const TypeEnv none;
  for (const ExprPtr& h : hash_functions()) {
    AlphaMatcher m(none);
    if (m.match(*h, e)) return true;
  }
  return false;
}

class Checker {
 public:
  explicit Checker(const SourceMap* positions) : positions_(positions) {}

  Judgment check(const TypeEnv& g, const ExprPtr& e);
  Type reify(const Type& t, const Expr* at);

  [[noreturn]] void fail(K kind, const Expr* at, std::string var, std::string msg) {
    TypeError err;
    err.kind = kind;
    err.variable = std::move(var);
    err.message = std::move(msg);
    err.where = at;
    if (positions_ && at) {
      if (auto it = positions_->find(at); it != positions_->end()) err.pos = it->second;
    }
    throw Failure{std::move(err)};
  }

 private:
  const Type& lookup(const TypeEnv& g, Symbol x, const Expr* at) {
    auto it = g.find(x);
    if (it == g.end()) fail(K::UnboundVariable, at, x.str(), "unbound variable " + x.str());
    if (it->second.is(TypeKind::Bot)) {
      fail(K::BotCombination, at, x.str(), x.str() + " was combined into an invalid type");
    }
    return it->second;
  }

  Type expect(const Judgment& j, TypeKind k, const Expr* at, std::string_view what) {
    if (!j.type.is(k)) {
      fail(K::Mismatch, at, "", std::string(what) + ": expected " + print(expected_of(k)) +
                                    ", found " + print(j.type));
    }
    return j.type;
  }

  static Type expected_of(TypeKind k) {
    switch (k) {
      case TypeKind::Bool: return Type::boolean();
      case TypeKind::Unit: return Type::unit();
      default: return Type::integer();
    }
  }

  Judgment check_int(const TypeEnv& g, const ExprPtr& e, std::string_view what) {
    Judgment j = check(g, e);
    expect(j, TypeKind::Int, e.get(), what);
    return j;
  }

  // Phase-indexed binding, switching phase when the full fraction is held.
  void want_phase(TypeEnv& g, Symbol x, TypeKind phase, const Expr* at) {
    Type t = lookup(g, x, at);
    TypeKind other = phase == TypeKind::PWrite ? TypeKind::PRead : TypeKind::PWrite;
    if (t.is(phase)) return;
    if (t.is(other)) {
      if (t.fraction() == kWhole) {
        g[x] = phase == TypeKind::PWrite ? Type::pwrite(1) : Type::pread(1);
        return;
      }
      fail(K::PhaseViolation, at, x.str(),
           x.str() + " holds " + print(t) + "; changing phase needs the full fraction 1");
    }
    fail(K::Mismatch, at, x.str(), "expected a priority reference, found " + print(t));
  }

  Symbol var_arg(const ExprPtr& a, std::string_view fn) {
    if (!a->is(ExprKind::Var)) {
      fail(K::Unsupported, a.get(), "", std::string(fn) + " expects a variable argument");
    }
    return a->name();
  }

  std::optional<Type> recognise(const TypeEnv& g, const ExprPtr& e) {
    if (!e->is(ExprKind::Fun)) return std::nullopt;
    if (e->closed() && is_hash_function(*e)) return Type::hash();
    for (LibKind k : kRecognised) {
      const Definition* def = find_definition(lib_name(k));
      AlphaMatcher m(g);
      if (def && m.match(*def->expr, *e)) return Type::lib(k);
    }
    return std::nullopt;
  }

  Judgment var_rule(const TypeEnv& g, const Expr& e);
  Judgment let_rule(const TypeEnv& g, const ExprPtr& e);
  Judgment if_rule(const TypeEnv& g, const ExprPtr& e);
  Judgment prim_rule(const TypeEnv& g, const ExprPtr& e);
  Judgment par_rule(const TypeEnv& g, const ExprPtr& e);
  Judgment app_rule(const TypeEnv& g, const ExprPtr& e);
  Judgment lib_rule(LibKind k, const TypeEnv& g, const std::vector<ExprPtr>& args, const ExprPtr& e);
  Judgment parfor_rule(const TypeEnv& g, const std::vector<ExprPtr>& args, const ExprPtr& e);
  Judgment array_rule(const TypeEnv& g, const ExprPtr& e);
  Type lambda(const TypeEnv& g, Symbol self, Symbol param, const ExprPtr& body, const Expr* at);
  Type call(int id, const Type& arg, const Expr* at);
  Type resolve(int id, const Type& arg, const Expr* at);
  Type body_type(int id);
  Type value_type(const Value& v, const Expr* at);

  const SourceMap* positions_;
  std::vector<Closure> closures_;
};

Judgment Checker::var_rule(const TypeEnv& g, const Expr& e) {
  Type t = lookup(g, e.name(), &e);
  Judgment j{t, g};
  if (!idempotent(t)) j.out.erase(e.name());
  return j;
}

Type Checker::value_type(const Value& v, const Expr* at) {
  switch (v.kind()) {
    case Value::Kind::Unit: return Type::unit();
    case Value::Kind::Bool: return Type::boolean();
    case Value::Kind::Int: return Type::integer();
    case Value::Kind::Pair: return Type::prod(value_type(v.first(), at), value_type(v.second(), at));
    case Value::Kind::Loc: fail(K::Unsupported, at, "", "locations have no type");
    case Value::Kind::Fun: return lambda(TypeEnv{}, v.fun_self(), v.fun_param(), v.fun_body(), at);
  }
  fail(K::Unsupported, at, "", "unknown value");
}

Judgment Checker::check(const TypeEnv& g, const ExprPtr& e) {
  switch (e->kind()) {
    case ExprKind::Val:
      return Judgment{value_type(e->value(), e.get()), g};
    case ExprKind::Var:
      return var_rule(g, *e);
    case ExprKind::Let:
      return let_rule(g, e);
    case ExprKind::If:
      return if_rule(g, e);
    case ExprKind::Fun:
      if (e->closed() && is_hash_function(*e)) return Judgment{Type::hash(), g};
      return Judgment{lambda(g, e->name(), e->param(), e->kid(0), e.get()), g};
    case ExprKind::App:
      return app_rule(g, e);
    case ExprKind::Prim:
      return prim_rule(g, e);
    case ExprKind::Pair: {
      Judgment j2 = check(g, e->kid(1));
      Judgment j1 = check(j2.out, e->kid(0));
      return Judgment{Type::prod(j1.type, j2.type), std::move(j1.out)};
    }
    case ExprKind::Proj: {
      Judgment j = check(g, e->kid(0));
      if (!j.type.is(TypeKind::Prod)) {
        fail(K::Mismatch, e.get(), "", "projection of a non-product " + print(j.type));
      }
      Type t = e->proj_index() == 1 ? j.type.left() : j.type.right();
      return Judgment{t, std::move(j.out)};
    }
    case ExprKind::Assert: {
      Judgment j = check(g, e->kid(0));
      expect(j, TypeKind::Bool, e->kid(0).get(), "assert");
      return Judgment{Type::unit(), std::move(j.out)};
    }
    case ExprKind::Load:
    case ExprKind::Store:
    case ExprKind::Length:
      return array_rule(g, e);
    case ExprKind::Par:
      return par_rule(g, e);
    case ExprKind::Alloc:
      fail(K::Unsupported, e.get(), "", "raw alloc has no typing rule; use alloc_fill");
    case ExprKind::Cas:
      fail(K::Unsupported, e.get(), "", "raw cas has no typing rule");
    case ExprKind::RunPar:
      fail(K::Unsupported, e.get(), "", "active parallel tuple in source");
  }
  fail(K::Unsupported, e.get(), "", "unknown expression");
}

Judgment Checker::let_rule(const TypeEnv& g, const ExprPtr& e) {
  Judgment j1;
  if (auto lib = recognise(g, e->kid(0))) j1 = Judgment{*lib, g};
  else j1 = check(g, e->kid(0));
  Symbol x = e->name();
  if (x.is_wildcard()) return check(j1.out, e->kid(1));
  j1.out[x] = j1.type;
  Judgment j2 = check(j1.out, e->kid(1));
  j2.out.erase(x);
  return j2;
}

Judgment Checker::if_rule(const TypeEnv& g, const ExprPtr& e) {
  Judgment jc = check(g, e->kid(0));
  expect(jc, TypeKind::Bool, e->kid(0).get(), "if condition");
  Judgment j1 = check(jc.out, e->kid(1));
  Judgment j2 = check(jc.out, e->kid(2));
  if (!(j1.type == j2.type)) {
    fail(K::Mismatch, e.get(), "",
         "branches have types " + print(j1.type) + " and " + print(j2.type));
  }
  // Weaken both outputs to their agreement.
  TypeEnv out;
  for (const auto& [x, t] : j1.out) {
    auto it = j2.out.find(x);
    if (it != j2.out.end() && it->second == t) out.emplace(x, t);
  }
  return Judgment{j1.type, std::move(out)};
}

Judgment Checker::prim_rule(const TypeEnv& g, const ExprPtr& e) {
  Judgment j2 = check(g, e->kid(1));
  Judgment j1 = check(j2.out, e->kid(0));
  const Type& a = j1.type;
  const Type& b = j2.type;
  auto bad = [&]() {
    fail(K::Mismatch, e.get(), "",
         "operator " + std::string(prim_name(e->op())) + " applied to " + print(a) + " and " + print(b));
  };
  Type result;
  switch (e->op()) {
    case PrimOp::Add:
    case PrimOp::Sub:
    case PrimOp::Mul:
    case PrimOp::Div:
    case PrimOp::Mod:
      if (!a.is(TypeKind::Int) || !b.is(TypeKind::Int)) bad();
      result = Type::integer();
      break;
    case PrimOp::Lt:
    case PrimOp::Le:
    case PrimOp::Gt:
    case PrimOp::Ge:
      if (!a.is(TypeKind::Int) || !b.is(TypeKind::Int)) bad();
      result = Type::boolean();
      break;
    case PrimOp::Eq:
      if (!((a.is(TypeKind::Int) && b.is(TypeKind::Int)) || (a.is(TypeKind::Bool) && b.is(TypeKind::Bool)))) bad();
      result = Type::boolean();
      break;
    case PrimOp::Or:
    case PrimOp::And:
      if (!a.is(TypeKind::Bool) || !b.is(TypeKind::Bool)) bad();
      result = Type::boolean();
      break;
  }
  return Judgment{result, std::move(j1.out)};
}

Judgment Checker::par_rule(const TypeEnv& g, const ExprPtr& e) {
  const Expr& l = *e->kid(0);
  const Expr& r = *e->kid(1);
  TypeEnv g1;
  TypeEnv g2;
  TypeEnv frame;
  for (const auto& [x, t] : g) {
    bool in1 = l.has_free(x);
    bool in2 = r.has_free(x);
    if (!in1 && !in2) {
      frame.emplace(x, t);
    } else if (in1 != in2) {
      (in1 ? g1 : g2).emplace(x, t);
    } else {
      if (t.is(TypeKind::Bot)) {
        fail(K::BotCombination, e.get(), x.str(), x.str() + " was combined into an invalid type");
      }
      auto half = halve(t);
      if (!half) {
        fail(K::UnsplittableSharing, e.get(), x.str(),
             "both parallel branches use " + x.str() + " : " + print(t) + ", which cannot be split");
      }
      g1.emplace(x, *half);
      g2.emplace(x, *half);
    }
  }
  Judgment j1 = check(g1, e->kid(0));
  Judgment j2 = check(g2, e->kid(1));
  return Judgment{Type::prod(j1.type, j2.type), env_combine(env_combine(j1.out, j2.out), frame)};
}

Judgment Checker::array_rule(const TypeEnv& g, const ExprPtr& e) {
  auto array_var = [&](const TypeEnv& env, Fraction* q) {
    Symbol x = var_arg(e->kid(0), kind_name(e->kind()) == "Load" ? "load" : "store/length");
    Type t = lookup(env, x, e.get());
    if (!t.is(TypeKind::IntArray)) {
      fail(K::Mismatch, e.get(), x.str(), "expected an integer array, found " + print(t));
    }
    *q = t.fraction();
    return x;
  };
  Fraction q;
  switch (e->kind()) {
    case ExprKind::Load: {
      Judgment j = check_int(g, e->kid(1), "array index");
      array_var(j.out, &q);
      return Judgment{Type::integer(), std::move(j.out)};
    }
    case ExprKind::Store: {
      Judgment jv = check_int(g, e->kid(2), "stored value");
      Judgment ji = check_int(jv.out, e->kid(1), "array index");
      Symbol x = array_var(ji.out, &q);
      if (q != kWhole) {
        fail(K::Mismatch, e.get(), x.str(), "store needs intarray 1, found " + print(Type::intarray(q)));
      }
      return Judgment{Type::unit(), std::move(ji.out)};
    }
    default:
      array_var(g, &q);
      return Judgment{Type::integer(), g};
  }
}

Type Checker::lambda(const TypeEnv& g, Symbol self, Symbol param, const ExprPtr& body, const Expr* at) {
  TypeEnv env;
  for (Symbol v : body->free_vars()) {
    if (v == self || v == param) continue;
    env.emplace(v, lookup(g, v, at));
  }
  std::string owned;
  for (const auto& [v, t] : env) {
    if (!idempotent(t)) owned += (owned.empty() ? "" : ",") + v.str();
  }
  if (!owned.empty()) {
    fail(K::NotDuplicableClosure, at, owned, "function captures non-duplicable " + owned);
  }
  closures_.push_back(Closure{self, param, body, std::move(env), {}, {}});
  return Type::closure(static_cast<int>(closures_.size()) - 1);
}

Type Checker::body_type(int id) {
  Closure c = closures_[static_cast<std::size_t>(id)];
  TypeEnv env = c.env;
  if (!c.self.is_wildcard()) env[c.self] = Type::closure(id);
  if (!c.param.is_wildcard()) env[c.param] = *c.arg;
  return check(env, c.body).type;
}

Type Checker::resolve(int id, const Type& arg, const Expr* at) {
  auto snapshot = closures_;
  auto idx = static_cast<std::size_t>(id);
  closures_[idx].arg = arg;
  try {
    Type r = body_type(id);
    closures_[idx].result = r;
    return r;
  } catch (const NeedResult& n) {
    if (n.id != id) throw;
  }
  // Recursive: guess a first-order result and confirm it.
  std::optional<TypeError> first_error;
  for (const Type& guess : {Type::unit(), Type::boolean(), Type::integer()}) {
    closures_ = snapshot;
    closures_[idx].arg = arg;
    closures_[idx].result = guess;
    try {
      if (body_type(id) == guess) return guess;
    } catch (const Failure& f) {
      if (!first_error) first_error = f.error;
    } catch (const NeedResult& n) {
      if (n.id != id) throw;
    }
  }
  closures_ = snapshot;
  if (first_error) throw Failure{*first_error};
  fail(K::Mismatch, at, "", "cannot determine the result type of a recursive function");
}

Type Checker::call(int id, const Type& arg, const Expr* at) {
  const Closure& c = closures_[static_cast<std::size_t>(id)];
  if (!c.arg) return resolve(id, arg, at);
  if (!(*c.arg == arg)) {
    fail(K::Mismatch, at, "", "function expects " + print(*c.arg) + ", applied to " + print(arg));
  }
  if (!c.result) throw NeedResult{id};
  return *c.result;
}

Judgment Checker::app_rule(const TypeEnv& g, const ExprPtr& e) {
  std::vector<ExprPtr> args;
  const Expr* head = e.get();
  while (head->is(ExprKind::App)) {
    args.push_back(head->kid(1));
    head = head->kid(0).get();
  }
  std::reverse(args.begin(), args.end());
  if (head->is(ExprKind::Var)) {
    auto it = g.find(head->name());
    if (it != g.end() && it->second.is(TypeKind::Lib)) return lib_rule(it->second.lib_kind(), g, args, e);
  }
  // (fun x -> b) a is typed as let x = a in b.
  const ExprPtr& fn = e->kid(0);
  if (fn->is(ExprKind::Fun) && fn->name().is_wildcard() && !(fn->closed() && is_hash_function(*fn))) {
    Judgment ja = check(g, e->kid(1));
    Symbol x = fn->param();
    if (x.is_wildcard()) return check(ja.out, fn->kid(0));
    ja.out[x] = ja.type;
    Judgment jb = check(ja.out, fn->kid(0));
    jb.out.erase(x);
    return jb;
  }
  Judgment ja = check(g, e->kid(1));
  Judgment jf = check(ja.out, fn);
  const Type& ft = jf.type;
  switch (ft.kind()) {
    case TypeKind::Closure:
      return Judgment{call(ft.closure_id(), ja.type, e.get()), std::move(jf.out)};
    case TypeKind::Arrow:
      if (!(ft.left() == ja.type)) {
        fail(K::Mismatch, e.get(), "", "function expects " + print(ft.left()) + ", applied to " + print(ja.type));
      }
      return Judgment{ft.right(), std::move(jf.out)};
    case TypeKind::Hash:
      if (!ja.type.is(TypeKind::Int)) {
        fail(K::Mismatch, e.get(), "", "hash function applied to " + print(ja.type));
      }
      return Judgment{Type::integer(), std::move(jf.out)};
    case TypeKind::Lib:
      fail(K::Unsupported, e.get(), "",
           "library function " + std::string(lib_name(ft.lib_kind())) + " must be called by name");
    default:
      fail(K::Mismatch, e.get(), "", "application of a non-function " + print(ft));
  }
}

Judgment Checker::lib_rule(LibKind k, const TypeEnv& g, const std::vector<ExprPtr>& args, const ExprPtr& e) {
  std::string name(lib_name(k));
  auto arity = [&](std::size_t n) {
    if (args.size() != n) {
      fail(K::Unsupported, e.get(), "",
           name + " takes " + std::to_string(n) + " arguments, given " + std::to_string(args.size()));
    }
  };
  switch (k) {
    case LibKind::Ref: {
      arity(1);
      Judgment j = check(g, args[0]);
      return Judgment{Type::ref(j.type), std::move(j.out)};
    }
    case LibKind::Get: {
      arity(1);
      Symbol x = var_arg(args[0], name);
      Type t = lookup(g, x, e.get());
      if (!t.is(TypeKind::Ref)) fail(K::Mismatch, e.get(), x.str(), "get of non-reference " + print(t));
      Judgment j{t.left(), g};
      j.out[x] = Type::ref(Type::empty());
      return j;
    }
    case LibKind::Set: {
      arity(2);
      Symbol x = var_arg(args[0], name);
      Judgment j = check(g, args[1]);
      Type t = lookup(j.out, x, e.get());
      if (!(t == Type::ref(Type::empty()))) {
        fail(K::Mismatch, e.get(), x.str(), "set needs ref empty, found " + print(t));
      }
      j.out[x] = Type::ref(j.type);
      j.type = Type::unit();
      return j;
    }
    case LibKind::PAlloc: {
      arity(1);
      Judgment j = check_int(g, args[0], "palloc");
      return Judgment{Type::pwrite(1), std::move(j.out)};
    }
    case LibKind::PWrite: {
      arity(2);
      Symbol x = var_arg(args[0], name);
      Judgment j = check_int(g, args[1], "pwrite");
      want_phase(j.out, x, TypeKind::PWrite, e.get());
      j.type = Type::unit();
      return j;
    }
    case LibKind::PRead: {
      arity(1);
      Symbol x = var_arg(args[0], name);
      TypeEnv out = g;
      want_phase(out, x, TypeKind::PRead, e.get());
      return Judgment{Type::integer(), std::move(out)};
    }
    case LibKind::AllocFill: {
      arity(2);
      Judgment jv = check_int(g, args[1], "alloc_fill value");
      Judgment jn = check_int(jv.out, args[0], "alloc_fill size");
      return Judgment{Type::intarray(1), std::move(jn.out)};
    }
    case LibKind::Init: {
      arity(2);
      const ExprPtr& h = args[0];
      bool hash_ok = false;
      if (h->is(ExprKind::Var)) hash_ok = lookup(g, h->name(), e.get()).is(TypeKind::Hash);
      else hash_ok = h->closed() && is_hash_function(*h);
      if (!hash_ok) fail(K::Unsupported, h.get(), "", "init needs a recognised hash function");
      Judgment j = check_int(g, args[1], "init capacity");
      return Judgment{Type::intset(1), std::move(j.out)};
    }
    case LibKind::Add: {
      arity(2);
      Symbol x = var_arg(args[0], name);
      Judgment j = check_int(g, args[1], "add");
      Type t = lookup(j.out, x, e.get());
      if (!t.is(TypeKind::IntSet)) fail(K::Mismatch, e.get(), x.str(), "add to non-set " + print(t));
      j.type = Type::unit();
      return j;
    }
    case LibKind::Elems: {
      arity(1);
      Judgment j = check(g, args[0]);
      if (!(j.type == Type::intset(1))) {
        fail(K::Mismatch, e.get(), "", "elems needs intset 1, found " + print(j.type));
      }
      return Judgment{Type::intarray(1), std::move(j.out)};
    }
    case LibKind::ParFor:
      arity(3);
      return parfor_rule(g, args, e);
    case LibKind::AAdd:
    case LibKind::Fill:
    case LibKind::FilterCompact:
      break;
  }
  fail(K::Unsupported, e.get(), "", "no typing rule for " + name);
}

Judgment Checker::parfor_rule(const TypeEnv& g, const std::vector<ExprPtr>& args, const ExprPtr& e) {
  for (int i = 0; i < 2; ++i) {
    Symbol x = var_arg(args[static_cast<std::size_t>(i)], "parfor bound");
    if (!lookup(g, x, e.get()).is(TypeKind::Int)) {
      fail(K::Mismatch, e.get(), x.str(), "parfor bounds must be int variables");
    }
  }
  const ExprPtr& k = args[2];
  if (!k->is(ExprKind::Fun) || !k->name().is_wildcard()) {
    fail(K::Unsupported, k.get(), "", "parfor body must be a literal fun i -> e");
  }
  Symbol i = k->param();
  const ExprPtr& body = k->kid(0);
  // Every task borrows an equal share of what the body uses; checking one
  // share below the full fraction covers every task count.
  TypeEnv used;
  for (Symbol v : body->free_vars()) {
    if (v != i) used.emplace(v, lookup(g, v, e.get()));
  }
  TypeEnv share;
  for (const auto& [v, t] : used) {
    auto half = halve(t);
    if (!half) {
      fail(K::UnsplittableSharing, e.get(), v.str(),
           "parfor tasks share " + v.str() + " : " + print(t) + ", which is not fractional");
    }
    share.emplace(v, *half);
  }
  TypeEnv in = share;
  if (!i.is_wildcard()) in[i] = Type::integer();
  Judgment j = check(in, body);
  if (!j.type.is(TypeKind::Unit)) {
    fail(K::Mismatch, body.get(), "", "parfor body must have type unit, found " + print(j.type));
  }
  for (const auto& [v, t] : share) {
    auto it = j.out.find(v);
    if (it == j.out.end() || !(it->second == t)) {
      fail(K::Mismatch, body.get(), v.str(), "parfor body must give back its share of " + v.str());
    }
  }
  return Judgment{Type::unit(), g};
}

Type Checker::reify(const Type& t, const Expr* at) {
  switch (t.kind()) {
    case TypeKind::Prod: return Type::prod(reify(t.left(), at), reify(t.right(), at));
    case TypeKind::Ref: return Type::ref(reify(t.left(), at));
    case TypeKind::Hash: return Type::arrow(Type::integer(), Type::integer());
    case TypeKind::Bot: fail(K::BotCombination, at, "", "result has an invalid type");
    case TypeKind::Lib:
      fail(K::Unsupported, at, "", "library function " + std::string(lib_name(t.lib_kind())) + " as a value");
    case TypeKind::Closure: {
      auto idx = static_cast<std::size_t>(t.closure_id());
      if (!closures_[idx].arg) {
        // Never applied: pick the first argument type the body accepts.
        std::optional<TypeError> first_error;
        for (const Type& cand : {Type::unit(), Type::boolean(), Type::integer(), Type::intarray(1),
                                 Type::intset(1), Type::pwrite(1), Type::pread(1), Type::hash()}) {
          auto snapshot = closures_;
          try {
            call(t.closure_id(), cand, at);
            break;
          } catch (const Failure& f) {
            if (!first_error) first_error = f.error;
            closures_ = std::move(snapshot);
          }
        }
        if (!closures_[idx].arg) throw Failure{*first_error};
      }
      Type arg = *closures_[idx].arg;
      Type res = *closures_[idx].result;
      return Type::arrow(reify(arg, at), reify(res, at));
    }
    default:
      return t;
  }
}

}  // namespace

Judgment check(const TypeEnv& g, const ExprPtr& e, const SourceMap* positions) {
  Checker c(positions);
  try {
    Judgment j = c.check(g, e);
    j.type = c.reify(j.type, e.get());
    return j;
  } catch (const Failure& f) {
    throw TypeCheckError(f.error);
  } catch (const NeedResult&) {
    TypeError err;
    err.kind = K::Mismatch;
    err.message = "recursive call before its result type is known";
    throw TypeCheckError(err);
  }
}

ClosedVerdict check_program(const ExprPtr& e, const SourceMap* positions) {
  ClosedVerdict v;
  try {
    v.type = check(TypeEnv{}, e, positions).type;
    v.well_typed = true;
  } catch (const TypeCheckError& err) {
    v.error = err.error();
  }
  return v;
}

}  // namespace mdl
