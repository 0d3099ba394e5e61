#include "support.hpp"

#include <array>

#include "mdl/corpus.hpp"
#include "mdl/syntax.hpp"

namespace mdl::testing {

namespace {

int pick(std::mt19937_64& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

Symbol sym(const char* s) { return Symbol(s); }

ExprPtr random_value(std::mt19937_64& rng) {
  switch (pick(rng, 0, 5)) {
    case 0: return Expr::unit();
    case 1: return Expr::boolean(pick(rng, 0, 1) == 1);
    case 2: return Expr::integer(std::numeric_limits<std::int64_t>::min());
    case 3: return Expr::integer(std::numeric_limits<std::int64_t>::max());
    default: return Expr::integer(pick(rng, -20, 20));
  }
}

const std::array<const char*, 5> kVars = {"x", "y", "z", "f", "acc"};
const std::array<const char*, 4> kBinders = {"x", "y", "_", "f"};

Symbol any_var(std::mt19937_64& rng) { return sym(kVars[static_cast<std::size_t>(pick(rng, 0, 4))]); }
Symbol any_binder(std::mt19937_64& rng) { return sym(kBinders[static_cast<std::size_t>(pick(rng, 0, 3))]); }

}  // namespace

ExprPtr random_syntax(std::mt19937_64& rng, int budget) {
  if (budget <= 1) return pick(rng, 0, 1) ? random_value(rng) : Expr::var(any_var(rng));
  auto sub = [&](int parts) { return random_syntax(rng, (budget - 1) / parts); };
  switch (pick(rng, 0, 17)) {
    case 0: return Expr::let(any_binder(rng), sub(2), sub(2));
    case 1: return Expr::if_(sub(3), sub(3), sub(3));
    case 2: return Expr::fun(sym("_"), any_binder(rng), sub(1));
    case 3: return Expr::fun(sym("f"), any_binder(rng), sub(1));
    case 4: return Expr::app(sub(2), sub(2));
    case 5:
    case 6: {
      auto op = static_cast<PrimOp>(pick(rng, 0, static_cast<int>(PrimOp::And)));
      return Expr::prim(op, sub(2), sub(2));
    }
    case 7: return Expr::pair(sub(2), sub(2));
    case 8: return Expr::proj(pick(rng, 1, 2), sub(1));
    case 9: return Expr::assert_(sub(1));
    case 10: return Expr::alloc(sub(1));
    case 11: return Expr::load(sub(2), sub(2));
    case 12: return Expr::store(sub(3), sub(3), sub(3));
    case 13: return Expr::length(sub(1));
    case 14: return Expr::par(sub(2), sub(2));
    case 15: return Expr::par(Expr::app(sub(2), Expr::unit()), Expr::app(sub(2), Expr::unit()));
    case 16: return Expr::cas(sub(4), sub(4), sub(4), sub(4));
    default: return Expr::let(sym("_"), sub(2), sub(2));
  }
}

namespace {

// Typed-ish generator: variables are tracked by the shape of what they hold,
// and library calls are emitted with plausible arguments. The checker decides
// which results are well-typed.
class ProgramGen {
 public:
  explicit ProgramGen(std::mt19937_64& rng) : rng_(rng) {}

  ExprPtr body() {
    // Half the programs are built around a small par so that well-typed
    // parallel programs are not crowded out by larger sequential ones.
    want_par_ = coin(50);
    return block(want_par_ ? pick(1, 2) : 3);
  }

 private:
  struct Scope {
    std::vector<Symbol> ints, bools, refs, pws, arrs;
  };

  int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool coin(int pct) { return pick(0, 99) < pct; }

  template <class V>
  Symbol one_of(const V& v) { return v[static_cast<std::size_t>(pick(0, static_cast<int>(v.size()) - 1))]; }

  Symbol fresh(const char* base) { return Symbol(std::string(base) + std::to_string(counter_++)); }

  static ExprPtr call(const char* f, std::initializer_list<ExprPtr> args) {
    ExprPtr e = Expr::var(Symbol(f));
    for (const ExprPtr& a : args) e = Expr::app(e, a);
    return e;
  }

  ExprPtr lit() { return Expr::integer(pick(-3, 9)); }

  ExprPtr gen_int(int d) {
    int choice = d <= 0 ? pick(0, 1) : pick(0, 11);
    switch (choice) {
      case 0: return lit();
      case 1: return scope_.ints.empty() ? lit() : Expr::var(one_of(scope_.ints));
      case 2:
      case 3: {
        static constexpr PrimOp ops[] = {PrimOp::Add, PrimOp::Sub, PrimOp::Mul, PrimOp::Div, PrimOp::Mod};
        PrimOp op = ops[pick(0, 4)];
        ExprPtr a = gen_int(d - 1);
        return Expr::prim(op, a, gen_int(d - 1));
      }
      case 4: return scope_.refs.empty() ? lit() : call("get", {Expr::var(one_of(scope_.refs))});
      case 5: return scope_.pws.empty() ? lit() : call("pread", {Expr::var(one_of(scope_.pws))});
      case 6: {
        if (scope_.arrs.empty()) return lit();
        Symbol a = one_of(scope_.arrs);
        return Expr::load(Expr::var(a), gen_int(d - 1));
      }
      case 7: return scope_.arrs.empty() ? lit() : Expr::length(Expr::var(one_of(scope_.arrs)));
      case 8: {
        ExprPtr c = gen_bool(d - 1);
        ExprPtr t = gen_int(d - 1);
        return Expr::if_(c, t, gen_int(d - 1));
      }
      case 9: {
        Symbol x = fresh("x");
        Scope saved = scope_;
        scope_.ints.push_back(x);
        ExprPtr b = gen_int(d - 1);
        scope_ = saved;
        return Expr::app(Expr::fun(Symbol("_"), x, b), gen_int(d - 1));
      }
      case 10: {
        ExprPtr a = gen_int(d - 1);
        return Expr::proj(1, Expr::pair(a, gen_bool(d - 1)));
      }
      default: return lit();
    }
  }

  ExprPtr gen_bool(int d) {
    int choice = d <= 0 ? pick(0, 1) : pick(0, 5);
    switch (choice) {
      case 0: return Expr::boolean(coin(50));
      case 1: return scope_.bools.empty() ? Expr::boolean(coin(70)) : Expr::var(one_of(scope_.bools));
      case 2:
      case 3: {
        static constexpr PrimOp ops[] = {PrimOp::Eq, PrimOp::Lt, PrimOp::Le, PrimOp::Gt, PrimOp::Ge};
        PrimOp op = ops[pick(0, 4)];
        ExprPtr a = gen_int(d - 1);
        return Expr::prim(op, a, gen_int(d - 1));
      }
      case 4: {
        PrimOp op = coin(50) ? PrimOp::And : PrimOp::Or;
        ExprPtr a = gen_bool(d - 1);
        return Expr::prim(op, a, gen_bool(d - 1));
      }
      default: {
        ExprPtr a = gen_bool(d - 1);
        return Expr::prim(PrimOp::Eq, a, gen_bool(d - 1));
      }
    }
  }

  ExprPtr gen_unit(int d) {
    switch (d <= 0 ? pick(0, 1) : pick(0, 8)) {
      case 0: return Expr::assert_(gen_bool(d - 1));
      case 1:
        if (!scope_.pws.empty()) {
          Symbol p = one_of(scope_.pws);
          return call("pwrite", {Expr::var(p), gen_int(d - 1)});
        }
        return Expr::unit();
      case 2:
        if (!scope_.refs.empty()) {
          Symbol r = one_of(scope_.refs);
          return call("set", {Expr::var(r), gen_int(d - 1)});
        }
        return Expr::assert_(gen_bool(d - 1));
      case 3:
        if (!scope_.arrs.empty()) {
          Symbol a = one_of(scope_.arrs);
          ExprPtr i = gen_int(d - 1);
          return Expr::store(Expr::var(a), i, gen_int(d - 1));
        }
        return Expr::unit();
      case 4:
      case 5:
      case 6:
        if (pars_ < 2) return Expr::let(Symbol("_"), par(d - 1), Expr::unit());
        return Expr::assert_(gen_bool(d - 1));
      case 7: {
        ExprPtr c = gen_bool(d - 1);
        ExprPtr t = gen_unit(d - 1);
        return Expr::if_(c, t, gen_unit(d - 1));
      }
      default: {
        ExprPtr a = gen_unit(d - 1);
        return Expr::let(Symbol("_"), a, gen_unit(d - 1));
      }
    }
  }

  // The sugar's shape: each side is a closure called on ().
  ExprPtr par(int d) {
    ++pars_;
    ExprPtr l = Expr::fun(Symbol("_"), Symbol("_"), gen_unit(d));
    ExprPtr r = Expr::fun(Symbol("_"), Symbol("_"), gen_unit(d));
    return Expr::par(Expr::app(l, Expr::unit()), Expr::app(r, Expr::unit()));
  }

  ExprPtr tail(int d) {
    switch (pick(0, 4)) {
      case 0:
      case 1: return gen_int(d);
      case 2: return gen_bool(d);
      case 3: {
        ExprPtr a = gen_int(d - 1);
        return Expr::pair(a, gen_int(d - 1));
      }
      default: return gen_unit(d);
    }
  }

  ExprPtr block(int fuel) {
    if (fuel <= 0 && want_par_ && pars_ == 0) {
      ExprPtr p = par(pick(0, 1));
      return Expr::let(Symbol("_"), p, tail(1));
    }
    if (fuel <= 0) return tail(2);
    switch (pick(0, 6)) {
      case 0: {
        Symbol x = fresh("n");
        ExprPtr bound = gen_int(1);
        scope_.ints.push_back(x);
        return Expr::let(x, bound, block(fuel - 1));
      }
      case 1: {
        Symbol r = fresh("r");
        ExprPtr bound = call("ref", {gen_int(1)});
        scope_.refs.push_back(r);
        return Expr::let(r, bound, block(fuel - 1));
      }
      case 2: {
        Symbol p = fresh("p");
        ExprPtr bound = call("palloc", {gen_int(0)});
        scope_.pws.push_back(p);
        return Expr::let(p, bound, block(fuel - 1));
      }
      case 3: {
        Symbol a = fresh("a");
        ExprPtr bound = call("alloc_fill", {Expr::integer(pick(0, 3)), gen_int(0)});
        scope_.arrs.push_back(a);
        return Expr::let(a, bound, block(fuel - 1));
      }
      case 4: {
        Symbol b = fresh("b");
        ExprPtr bound = gen_bool(1);
        scope_.bools.push_back(b);
        return Expr::let(b, bound, block(fuel - 1));
      }
      default:
        ExprPtr s = gen_unit(2);
        return Expr::let(Symbol("_"), s, block(fuel - 1));
    }
  }

  std::mt19937_64& rng_;
  Scope scope_;
  int pars_ = 0;
  bool want_par_ = false;
  int counter_ = 0;
};

}  // namespace

ExprPtr random_program(std::mt19937_64& rng) { return ProgramGen(rng).body(); }

std::size_t count_kind(const ExprPtr& e, ExprKind k) {
  std::size_t n = e->is(k) ? 1 : 0;
  for (const ExprPtr& c : e->kids()) n += count_kind(c, k);
  if (e->is_value() && e->value().is(Value::Kind::Fun)) n += count_kind(e->value().fun_body(), k);
  return n;
}

namespace {

std::string num(std::int64_t v) { return v < 0 ? "(" + std::to_string(v) + ")" : std::to_string(v); }

// Two or three unit-returning bodies run in parallel (right-nested).
std::string parallel(const std::vector<std::string>& tasks) {
  if (tasks.size() == 1) return tasks[0];
  if (tasks.size() == 2) return "par (fun _ -> " + tasks[0] + ") (fun _ -> " + tasks[1] + ")";
  std::vector<std::string> rest(tasks.begin() + 1, tasks.end());
  return "par (fun _ -> " + tasks[0] + ") (fun _ -> (" + parallel(rest) + "; ()))";
}

}  // namespace

std::string pwrite_source(const std::vector<std::int64_t>& values, std::int64_t init) {
  std::vector<std::string> tasks;
  for (std::int64_t v : values) tasks.push_back("pwrite r " + num(v));
  return "let r = palloc " + num(init) + " in " + parallel(tasks) + "; pread r";
}

std::string hashset_source(int capacity, int hash, const std::vector<std::int64_t>& inserts) {
  std::string h = hash == 0 ? "fun x -> 0" : "fun x -> x";
  std::string out = "let h = " + h + " in let s = init h " + std::to_string(capacity) + " in ";
  std::vector<std::string> tasks;
  for (std::int64_t v : inserts) tasks.push_back("add s " + num(v));
  if (!tasks.empty()) out += parallel(tasks) + "; ";
  return out + "elems s";
}

std::string dedup_source(const std::vector<std::int64_t>& input) {
  std::string out = "let a = alloc_fill " + std::to_string(input.size()) + " 0 in ";
  for (std::size_t i = 0; i < input.size(); ++i) out += "store a " + std::to_string(i) + " " + num(input[i]) + "; ";
  return out + "snd (dedup (fun x -> x) a)";
}

ExprPtr linked(const std::string& body) { return link(parse(body)); }

std::optional<std::vector<std::int64_t>> result_array(const Outcome& o) {
  if (o.kind != Outcome::Kind::Terminated || !o.value().is(Value::Kind::Loc)) return std::nullopt;
  const Array* a = o.config.store.find(o.value().as_loc());
  if (!a) return std::nullopt;
  std::vector<std::int64_t> out;
  for (const Value& v : a->cells()) {
    if (!v.is(Value::Kind::Int)) return std::nullopt;
    out.push_back(v.as_int());
  }
  return out;
}

}  // namespace mdl::testing
