#include <doctest.h>

#include <algorithm>
#include <vector>

#include "mdl/types.hpp"

using namespace mdl;

namespace {
Fraction F(std::int64_t n, std::int64_t d) { return Fraction(n, d); }
Symbol S(const char* s) { return Symbol(s); }

bool contains(const std::vector<Type>& ts, const Type& t) { return std::find(ts.begin(), ts.end(), t) != ts.end(); }

// A bounded grammar of types, enough to exercise every monoid case.
std::vector<Type> small_types() {
  std::vector<Type> base = {Type::bot(), Type::empty(), Type::unit(), Type::boolean(), Type::integer(),
                            Type::ref(Type::integer()), Type::hash(), Type::lib(LibKind::Get)};
  for (Fraction q : {F(1, 4), F(1, 2), F(3, 4), F(1, 1)}) {
    base.push_back(Type::pwrite(q));
    base.push_back(Type::pread(q));
    base.push_back(Type::intarray(q));
    base.push_back(Type::intset(q));
  }
  base.push_back(Type::arrow(Type::integer(), Type::integer()));
  base.push_back(Type::arrow(Type::integer(), Type::boolean()));
  std::vector<Type> out = base;
  const Type some[] = {Type::integer(), Type::pwrite(F(1, 2)), Type::intarray(F(1, 4)), Type::ref(Type::unit())};
  for (const Type& a : some) {
    for (const Type& b : some) out.push_back(Type::prod(a, b));
  }
  return out;
}
}  // namespace

TEST_SUITE("types") {
  TEST_CASE("combine examples") {
    CHECK(type_combine(Type::integer(), Type::integer()) == Type::integer());
    CHECK(type_combine(Type::ref(Type::integer()), Type::ref(Type::integer())) == Type::bot());
    CHECK(type_combine(Type::pwrite(F(1, 2)), Type::pwrite(F(1, 2))) == Type::pwrite(1));
    CHECK(type_combine(Type::pwrite(F(3, 4)), Type::pwrite(F(1, 2))) == Type::bot());
    CHECK(type_combine(Type::pwrite(F(1, 2)), Type::pread(F(1, 2))) == Type::bot());
    CHECK(type_combine(Type::intset(F(1, 3)), Type::intset(F(2, 3))) == Type::intset(1));
    Type arr = Type::arrow(Type::integer(), Type::unit());
    CHECK(type_combine(arr, arr) == arr);
    CHECK(type_combine(arr, Type::arrow(Type::integer(), Type::integer())) == Type::bot());
    CHECK(type_combine(Type::integer(), Type::boolean()) == Type::bot());
    CHECK(type_combine(Type::prod(Type::integer(), Type::pwrite(F(1, 2))),
                       Type::prod(Type::integer(), Type::pwrite(F(1, 2)))) ==
          Type::prod(Type::integer(), Type::pwrite(1)));
    CHECK(type_combine(Type::prod(Type::integer(), Type::ref(Type::unit())),
                       Type::prod(Type::integer(), Type::ref(Type::unit()))) == Type::bot());
  }

  TEST_CASE("fractions are exact") {
    Type t = Type::intarray(F(1, 3));
    Type two = type_combine(t, t);
    CHECK(two.fraction() == F(2, 3));
    CHECK(type_combine(two, t) == Type::intarray(1));
    CHECK(type_combine(type_combine(two, t), t) == Type::bot());
  }

  TEST_CASE("property: combine is commutative and associative, bot absorbs") {
    auto ts = small_types();
    for (const Type& a : ts) {
      CHECK(type_combine(a, Type::bot()) == Type::bot());
      CHECK(type_combine(Type::bot(), a) == Type::bot());
      for (const Type& b : ts) {
        CHECK(type_combine(a, b) == type_combine(b, a));
      }
    }
    for (std::size_t i = 0; i < ts.size(); i += 2) {
      for (const Type& b : ts) {
        for (const Type& c : ts) {
          const Type& a = ts[i];
          CHECK(type_combine(type_combine(a, b), c) == type_combine(a, type_combine(b, c)));
        }
      }
    }
  }

  TEST_CASE("halving inverts combining") {
    for (const Type& t : small_types()) {
      auto h = halve(t);
      if (!h) continue;
      CAPTURE(print(t));
      CHECK(type_combine(*h, *h) == t);
    }
    CHECK_FALSE(halve(Type::ref(Type::integer())));
    CHECK(halve(Type::pwrite(1)) == Type::pwrite(F(1, 2)));
    CHECK(halve(Type::integer()) == Type::integer());
  }

  TEST_CASE("env_combine") {
    TypeEnv a{{S("x"), Type::integer()}};
    TypeEnv b{{S("y"), Type::boolean()}};
    TypeEnv ab = env_combine(a, b);
    CHECK(ab.size() == 2);
    CHECK(ab.at(S("x")) == Type::integer());
    CHECK(ab.at(S("y")) == Type::boolean());

    TypeEnv r{{S("r"), Type::ref(Type::integer())}};
    CHECK(env_combine(r, r).at(S("r")) == Type::bot());

    TypeEnv s{{S("s"), Type::intset(F(1, 2))}};
    CHECK(env_combine(s, s).at(S("s")) == Type::intset(1));
  }

  TEST_CASE("phase_update") {
    auto r1 = phase_update(Type::pread(1));
    CHECK(contains(r1, Type::pread(1)));
    CHECK(contains(r1, Type::pwrite(1)));
    auto half = phase_update(Type::pread(F(1, 2)));
    CHECK(half == std::vector<Type>{Type::pread(F(1, 2))});
    auto prod = phase_update(Type::prod(Type::pwrite(1), Type::integer()));
    CHECK(contains(prod, Type::prod(Type::pread(1), Type::integer())));
    CHECK(contains(prod, Type::prod(Type::pwrite(1), Type::integer())));
    CHECK(phase_update(Type::integer()) == std::vector<Type>{Type::integer()});
  }

  TEST_CASE("duplicable") {
    CHECK(duplicable({{S("x"), Type::integer()}, {S("f"), Type::arrow(Type::integer(), Type::integer())}}));
    CHECK_FALSE(duplicable({{S("r"), Type::ref(Type::integer())}}));
    CHECK(duplicable({}));
    CHECK_FALSE(duplicable({{S("a"), Type::intarray(F(1, 2))}}));
  }

  TEST_CASE("printing") {
    CHECK(print(Type::arrow(Type::intarray(1), Type::prod(Type::intarray(1), Type::intarray(1)))) ==
          "intarray 1 -> intarray 1 * intarray 1");
    CHECK(print(Type::pwrite(F(1, 2))) == "pwrite 1/2");
    CHECK(print(Type::ref(Type::integer())) == "ref int");
    CHECK(print(Type::arrow(Type::arrow(Type::integer(), Type::integer()), Type::unit())) == "(int -> int) -> unit");
  }
}
