#include "mdl/corpus.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include "mdl/syntax.hpp"

namespace mdl {

namespace {

struct Source {
  const char* name;
  const char* text;
};

constexpr Source kLibrary[] = {
    {"ref", "fun x -> let r = alloc 1 in store r 0 x; r"},
    {"get", "fun r -> load r 0"},
    {"set", "fun r v -> store r 0 v"},
    {"aadd", "fun r k -> (mu f _ -> let y = get r in if cas r 0 y (y + k) then () else f ()) ()"},
    {"palloc", "fun n -> ref n"},
    {"pread", "fun r -> get r"},
    {"pwrite", "mu f r x -> let y = get r in if x < y then () else if cas r 0 y x then () else f r x"},
    {"fill",
     "fun a v -> let go = mu go i -> if i < length a then (store a i v; go (i + 1)) else () in "
     "go 0; a"},
    {"alloc_fill", "fun n v -> fill (alloc n) v"},
    {"filter_compact",
     "fun a d -> let n = length a in "
     "let count = mu count i -> if i == n then 0 else (if load a i == d then 0 else 1) + count (i + 1) in "
     "let out = alloc (count 0) in "
     "let copy = mu copy i k -> if i == n then () else "
     "(let y = load a i in if y == d then copy (i + 1) k else (store out k y; copy (i + 1) (k + 1))) in "
     "copy 0 0; out"},
    {"init",
     "fun h n -> assert (n >= 0); let d = ref () in let a = alloc_fill n d in (a, (d, h))"},
    {"add",
     "fun s x -> let a = fst s in let d = fst (snd s) in let h = snd (snd s) in "
     "let put = mu put x i -> let y = load a i in "
     "if x == y then () else "
     "if y == d then (if cas a i d x then () else put x i) else "
     "let j = (i + 1) mod length a in "
     "if x < y then put x j else (if cas a i y x then put y j else put x i) in "
     "put x ((h x) mod length a)"},
    {"elems", "fun s -> filter_compact (fst s) (fst (snd s))"},
    {"parfor",
     "mu parfor i j k -> if j - i == 0 then () else if j - i == 1 then k i else "
     "let mid = i + (j - i) / 2 in (| parfor i mid k, parfor mid j k |); ()"},
    {"dedup",
     "fun h a -> let start = 0 in let len = length a in let s = init h (len + 1) in "
     "parfor start len (fun i -> add s (load a i)); (a, elems s)"},
    {"dumas",
     "fun n -> let r = ref 0 in par (fun _ -> aadd r 1802) (fun _ -> aadd r 42); "
     "assert (get r == n)"},
};

// Corpus entry -> program body over the library.
const std::map<std::string, std::string, std::less<>>& entry_bodies() {
  static const std::map<std::string, std::string, std::less<>> bodies = {
      {"ref_ops", "(ref, (get, set))"},
      {"aadd", "aadd"},
      {"dumas", "dumas"},
      {"unsafe", "let r = ref true in (| set r true, set r false |); assert (get r)"},
      {"palloc", "palloc"},
      {"pwrite", "pwrite"},
      {"pread", "pread"},
      {"fill", "fill"},
      {"alloc_fill", "alloc_fill"},
      {"hashset_init", "init"},
      {"hashset_add", "add"},
      {"hashset_elems", "elems"},
      {"filter_compact", "filter_compact"},
      {"parfor", "parfor"},
      {"dedup", "dedup"},
  };
  return bodies;
}

std::vector<Definition> build_definitions() {
  std::vector<Definition> out;
  for (const Source& s : kLibrary) out.push_back(Definition{s.name, s.text, parse(s.text)});
  return out;
}

// Indices of definitions needed by `body`, in dependency order.
std::vector<std::size_t> needed(const ExprPtr& body) {
  const auto& defs = definitions();
  std::vector<bool> use(defs.size(), false);
  auto mark = [&](const ExprPtr& e) {
    for (Symbol x : e->free_vars()) {
      for (std::size_t i = 0; i < defs.size(); ++i) {
        if (defs[i].name == x.str()) use[i] = true;
      }
    }
  };
  mark(body);
  for (std::size_t i = defs.size(); i-- > 0;) {
    if (use[i]) mark(defs[i].expr);
  }
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < defs.size(); ++i) {
    if (use[i]) out.push_back(i);
  }
  return out;
}

}  // namespace

const std::vector<Definition>& definitions() {
  static const std::vector<Definition> defs = build_definitions();
  return defs;
}

const Definition* find_definition(std::string_view name) {
  for (const Definition& d : definitions()) {
    if (d.name == name) return &d;
  }
  return nullptr;
}

ExprPtr link(const ExprPtr& body) {
  const auto& defs = definitions();
  ExprPtr out = body;
  auto idx = needed(body);
  for (auto it = idx.rbegin(); it != idx.rend(); ++it) {
    out = Expr::let(Symbol(defs[*it].name), defs[*it].expr, out);
  }
  return out;
}

std::string linked_source(std::string_view body_source) {
  const auto& defs = definitions();
  std::string out;
  for (std::size_t i : needed(parse(body_source))) {
    out += "let " + defs[i].name + " =\n  " + print(defs[i].expr) + " in\n";
  }
  out += body_source;
  out += "\n";
  return out;
}

const std::vector<std::string>& corpus_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [k, v] : entry_bodies()) out.push_back(k);
    return out;
  }();
  return names;
}

std::string corpus_source(std::string_view name) {
  auto it = entry_bodies().find(name);
  if (it == entry_bodies().end()) throw std::out_of_range("unknown corpus entry: " + std::string(name));
  return linked_source(it->second);
}

const std::vector<std::pair<std::string, std::string>>& example_programs() {
  static const std::vector<std::pair<std::string, std::string>> ex = {
      {"pwrite_pair", "let r = palloc 0 in par (fun _ -> pwrite r 3) (fun _ -> pwrite r 5); pread r"},
      {"pwrite_pread", "let r = palloc 0 in par (fun _ -> pwrite r 3) (fun _ -> pread r)"},
      {"hashset_demo",
       "let h = fun x -> 0 in let s = init h 3 in par (fun _ -> add s 2) (fun _ -> add s 1); elems s"},
      {"dedup_demo",
       "let a = alloc_fill 3 0 in store a 0 7; store a 1 1; store a 2 7; snd (dedup (fun x -> x) a)"},
      {"dedup_typed", "dedup (fun x -> x)"},
      {"assert_true", "assert true"},
  };
  return ex;
}

ExprPtr corpus(std::string_view name) {
  auto it = entry_bodies().find(name);
  if (it == entry_bodies().end()) throw std::out_of_range("unknown corpus entry: " + std::string(name));
  return link(parse(it->second));
}

// ---------------------------------------------------------------------------
// Oracles

IntSet oracle_dedup(std::span<const std::int64_t> input) { return IntSet(input.begin(), input.end()); }

std::vector<std::optional<std::int64_t>> oracle_sequential_hashset(
    std::size_t capacity, const std::function<std::int64_t(std::int64_t)>& hash,
    std::span<const std::int64_t> inserts) {
  if (oracle_dedup(inserts).size() >= capacity) {
    throw std::invalid_argument("hash set oracle needs fewer distinct elements than slots");
  }
  std::vector<std::optional<std::int64_t>> slots(capacity);
  const auto n = static_cast<std::int64_t>(capacity);
  for (std::int64_t x : inserts) {
    std::int64_t i = ((hash(x) % n) + n) % n;
    for (;;) {
      auto& y = slots[static_cast<std::size_t>(i)];
      if (y == x) break;
      if (!y) {
        y = x;
        break;
      }
      if (x > *y) std::swap(x, *y);
      i = (i + 1) % n;
    }
  }
  return slots;
}

std::int64_t oracle_max(std::span<const std::int64_t> inputs) {
  if (inputs.empty()) throw std::invalid_argument("oracle_max of nothing");
  return *std::max_element(inputs.begin(), inputs.end());
}

}  // namespace mdl
