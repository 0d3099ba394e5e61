#include <doctest.h>

#include <random>

#include "mdl/context.hpp"
#include "mdl/lang.hpp"
#include "mdl/syntax.hpp"
#include "support.hpp"

using namespace mdl;

namespace {
ExprPtr P(const char* s) { return parse(s); }
Symbol S(const char* s) { return Symbol(s); }
ExprPtr runpar(ExprPtr a, ExprPtr b) { return Expr::run_par(std::move(a), std::move(b)); }
}  // namespace

TEST_SUITE("lang") {
  TEST_CASE("structurally equal nodes are the same object") {
    CHECK(P("let x = 1 + 2 in x") == P("let x = 1 + 2 in x"));
    CHECK(P("fun x -> x") != P("fun y -> y"));
    CHECK(Value::pair(Value::integer(1), Value::boolean(true)) ==
          Value::pair(Value::integer(1), Value::boolean(true)));
  }

  TEST_CASE("free variables and binders") {
    ExprPtr e = P("let x = y in fun z -> x + z + w");
    std::vector<Symbol> fv(e->free_vars().begin(), e->free_vars().end());
    CHECK(fv.size() == 2);
    CHECK(e->has_free(S("y")));
    CHECK(e->has_free(S("w")));
    CHECK_FALSE(e->has_free(S("x")));
    CHECK(P("mu f x -> f x")->closed());
  }

  TEST_CASE("subst replaces free occurrences") {
    CHECK(subst(S("x"), Value::integer(3), P("x + x")) == P("3 + 3"));
  }

  TEST_CASE("subst respects shadowing") {
    CHECK(subst(S("x"), Value::integer(3), P("let x = 1 in x")) == P("let x = 1 in x"));
    CHECK(subst(S("x"), Value::integer(3), P("let x = x in x")) == P("let x = 3 in x"));
    CHECK(subst(S("x"), Value::integer(3), P("fun x -> x")) == P("fun x -> x"));
    CHECK(subst(S("f"), Value::integer(3), P("mu f y -> f y")) == P("mu f y -> f y"));
  }

  TEST_CASE("subst of a recursive function value") {
    Value id = Value::fun(S("f"), S("x"), Expr::var(S("x")));
    ExprPtr got = subst(S("f"), id, P("f 0"));
    CHECK(got == Expr::app(Expr::val(id), Expr::integer(0)));
  }

  TEST_CASE("decompose_tasks") {
    auto t = decompose_tasks(P("1 + 2"));
    REQUIRE(t.size() == 1);
    CHECK(t[0].path.empty());

    t = decompose_tasks(runpar(P("1 + 1"), P("2 + 2")));
    REQUIRE(t.size() == 2);
    CHECK(t[0].path.str() == "L");
    CHECK(t[0].term == P("1 + 1"));
    CHECK(t[1].path.str() == "R");
    CHECK(t[1].term == P("2 + 2"));

    ExprPtr join = runpar(Expr::integer(3), Expr::integer(4));
    t = decompose_tasks(join);
    REQUIRE(t.size() == 1);
    CHECK(t[0].path.empty());
    CHECK(t[0].term == join);
  }

  TEST_CASE("decompose_tasks descends through redex positions") {
    // let x = (|| 1 + 1, 3 ||) in x: the active tuple sits in the hole.
    ExprPtr e = Expr::let(S("x"), runpar(P("1 + 1"), Expr::integer(3)), P("x"));
    auto t = decompose_tasks(e);
    REQUIRE(t.size() == 1);
    CHECK(t[0].path.str() == "L");
    CHECK(t[0].term == P("1 + 1"));
  }

  TEST_CASE("split_redex") {
    auto s = split_redex(P("let y = 1 + 2 in y"));
    REQUIRE(s);
    CHECK(s->second == P("1 + 2"));
    CHECK(fill(s->first, Expr::integer(3)) == P("let y = 3 in y"));

    // Argument before function.
    Value f = Value::fun(S("_"), S("x"), P("x"));
    s = split_redex(Expr::app(Expr::val(f), P("1 + 2")));
    REQUIRE(s);
    CHECK(s->second == P("1 + 2"));
    s = split_redex(Expr::app(P("fun x -> x"), P("1 + 2")));
    REQUIRE(s);
    CHECK(s->second == P("1 + 2"));

    CHECK_FALSE(split_redex(Expr::integer(5)));
  }

  TEST_CASE("right-to-left evaluation order") {
    auto s = split_redex(P("(1 + 2) + (3 + 4)"));
    REQUIRE(s);
    CHECK(s->second == P("3 + 4"));
    s = split_redex(P("store (alloc 1) (0 + 0) (1 + 1)"));
    REQUIRE(s);
    CHECK(s->second == P("1 + 1"));
  }

  TEST_CASE("is_value") {
    CHECK(is_value(Expr::val(Value::pair(Value::integer(1), Value::boolean(true)))));
    CHECK_FALSE(is_value(runpar(Expr::integer(1), Expr::integer(2))));
    CHECK_FALSE(is_value(P("(1, true)")));
  }

  TEST_CASE("map_locs renames only locations") {
    Value v = Value::pair(Value::location(Loc{3}), Value::integer(3));
    Value w = map_locs(v, [](Loc l) { return Loc{l.id + 1}; });
    CHECK(w == Value::pair(Value::location(Loc{4}), Value::integer(3)));
  }

  TEST_CASE("property: non-values have tasks and fill inverts split") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 500; ++i) {
      ExprPtr e = testing::random_syntax(rng, 3 + i % 30);
      if (is_value(e)) continue;
      CHECK_FALSE(decompose_tasks(e).empty());
      if (e->is(ExprKind::RunPar)) continue;
      auto s = split_redex(e);
      REQUIRE(s);
      CHECK(fill(s->first, s->second) == e);
      CHECK(next_eval_child(*s->second) < 0);
    }
  }

  TEST_CASE("property: substitution is idempotent") {
    std::mt19937_64 rng(12);
    const Value vs[] = {Value::integer(4), Value::boolean(false), Value::unit(),
                        Value::pair(Value::integer(1), Value::integer(2))};
    for (int i = 0; i < 500; ++i) {
      ExprPtr e = testing::random_syntax(rng, 3 + i % 30);
      const Value& v = vs[i % 4];
      ExprPtr once = subst(S("x"), v, e);
      CHECK(subst(S("x"), v, once) == once);
      CHECK_FALSE(once->has_free(S("x")));
    }
  }
}
