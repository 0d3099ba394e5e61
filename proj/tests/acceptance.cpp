// One PASS/FAIL line per acceptance criterion. Exit status is the number of
// failing criteria (capped at 1 for ctest).
#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "mdl/checker.hpp"
#include "mdl/corpus.hpp"
#include "mdl/explorer.hpp"
#include "mdl/manifest.hpp"
#include "mdl/report.hpp"
#include "mdl/syntax.hpp"
#include "support.hpp"

using namespace mdl;
using namespace mdl::testing;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Result {
  bool pass = true;
  std::vector<std::string> notes;
  std::vector<std::string> failures;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (failures.size() < 8) failures.push_back(what);
    }
  }
};

int failed = 0;

void report(int n, const std::string& title, const Result& r) {
  std::string line = std::string(r.pass ? "PASS" : "FAIL") + " criterion " + std::to_string(n) + ": " + title;
  if (!r.notes.empty()) {
    line += " [";
    for (std::size_t i = 0; i < r.notes.size(); ++i) line += (i ? "; " : "") + r.notes[i];
    line += "]";
  }
  std::cout << line << std::endl;
  for (const std::string& f : r.failures) std::cout << "    " << f << std::endl;
  if (!r.pass) ++failed;
}

// Reducibility cross-check over every state expanded in criteria 1-4.
struct CrossCheck {
  std::atomic<std::uint64_t> configs{0};
  std::atomic<std::uint64_t> literal_mismatch{0};
  std::atomic<std::uint64_t> refined_mismatch{0};
} cross;

ExploreOptions reference_options() {
  ExploreOptions o;
  o.on_visit = [](const Config& c, const std::vector<Step>& steps, bool stuck) {
    bool red = reducible(c.expr, c.store);
    cross.configs++;
    if (red != !steps.empty()) cross.literal_mismatch++;
    if (red != (!steps.empty() && !stuck)) cross.refined_mismatch++;
  };
  return o;
}

json stable(const ExplorationReport& r) {
  json j = to_json(r);
  j.erase("timing");
  return j;
}

// Outcome set without traces: the two exploration modes find different
// (equally valid) witnesses.
json outcome_set(const ExplorationReport& r) {
  json out = to_json(r)["outcomes"];
  for (json& o : out) o.erase("trace_length");
  return out;
}

// Programs of criteria 1-3 with their jobs=1 reports, re-run with 4 workers later.
std::vector<std::pair<ExprPtr, json>> reference_reports;

ExplorationReport explore_ref(const ExprPtr& e, bool keep_for_jobs) {
  ExplorationReport r = explore_all(e, reference_options());
  if (keep_for_jobs) reference_reports.emplace_back(e, stable(r));
  return r;
}

ExprPtr corpus_file(const std::string& name, std::optional<std::int64_t> arg = std::nullopt) {
  ExprPtr e = parse(read_file(fs::path(MDL_CORPUS_DIR) / (name + ".mdl")));
  return arg ? Expr::app(e, Expr::integer(*arg)) : e;
}

void criterion1() {
  Result r;
  {
    auto t0 = Clock::now();
    ExprPtr e = corpus_file("dumas", 1844);
    Verdict v = sisafety_verdict(explore_ref(e, true));
    double s = since(t0);
    r.require(v.kind == VerdictKind::Holds, "dumas 1844: verdict " + std::string(verdict_name(v.kind)));
    r.require(v.report.complete(), "dumas 1844: limits hit");
    for (const Outcome& o : v.report.outcomes) {
      if (o.kind != Outcome::Kind::Terminated) continue;
      r.require(o.value() == Value::unit(), "dumas 1844: value " + print(o.value()));
      Outcome raw = replay(e, o.trace);
      bool counter = raw.config.store.size() == 1 && raw.config.store.entries()[0].second->cells() ==
                                                          std::vector<Value>{Value::integer(1844)};
      r.require(counter, "dumas 1844: counter cell " + print(raw.config.store));
    }
    r.require(s < 5.0, "dumas 1844 took " + std::to_string(s) + " s");
    r.notes.push_back("dumas 1844 Holds, " + std::to_string(v.report.states_explored) + " states");
  }
  {
    auto t0 = Clock::now();
    Verdict v = sisafety_verdict(explore_ref(corpus_file("dumas", 0), true));
    double s = since(t0);
    r.require(v.kind == VerdictKind::HoldsVacuously, "dumas 0: verdict " + std::string(verdict_name(v.kind)));
    r.require(v.report.complete(), "dumas 0: limits hit");
    for (const Outcome& o : v.report.outcomes) {
      r.require(o.kind == Outcome::Kind::Stuck && print(o.config.expr) == "assert false",
                "dumas 0: outcome " + print(o.config));
    }
    r.require(s < 5.0, "dumas 0 took " + std::to_string(s) + " s");
    r.notes.push_back("dumas 0 HoldsVacuously");
  }
  {
    auto t0 = Clock::now();
    ExprPtr e = corpus_file("unsafe");
    Verdict v = sisafety_verdict(explore_ref(e, true));
    double s = since(t0);
    r.require(v.kind == VerdictKind::Fails, "unsafe: verdict " + std::string(verdict_name(v.kind)));
    r.require(v.report.count(Outcome::Kind::Terminated) == 1 && v.report.count(Outcome::Kind::Stuck) == 1,
              "unsafe: expected one terminating and one stuck outcome");
    if (v.terminating && v.stuck) {
      r.require(replay(e, *v.terminating).kind == Outcome::Kind::Terminated, "unsafe: terminating witness");
      r.require(replay(e, *v.stuck).kind == Outcome::Kind::Stuck, "unsafe: stuck witness");
    }
    r.require(s < 1.0, "unsafe took " + std::to_string(s) + " s");
    r.notes.push_back("unsafe Fails with 2 replayed witnesses");
  }
  report(1, "dumas and unsafe verdicts", r);
}

void criterion2() {
  Result r;
  auto t0 = Clock::now();
  const std::vector<std::int64_t> pool = {-2, 0, 3, 5, 5};
  std::set<std::vector<std::int64_t>> multisets;
  for (std::size_t mask = 0; mask < (1u << pool.size()); ++mask) {
    std::vector<std::int64_t> m;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      if (mask & (1u << i)) m.push_back(pool[i]);
    }
    if (m.size() >= 2 && m.size() <= 3) multisets.insert(m);
  }
  for (const auto& m : multisets) {
    // Start below every candidate so the initial value never wins.
    ExprPtr e = linked(pwrite_source(m, -100));
    ExplorationReport rep = explore_ref(e, true);
    std::string tag = pwrite_source(m, -100);
    r.require(rep.complete(), tag + ": limits hit");
    r.require(rep.count(Outcome::Kind::Stuck) == 0, tag + ": stuck outcome");
    r.require(rep.count(Outcome::Kind::Terminated) == 1, tag + ": " + std::to_string(rep.outcomes.size()) + " outcomes");
    if (const Outcome* o = rep.first(Outcome::Kind::Terminated)) {
      r.require(o->value() == Value::integer(oracle_max(m)), tag + ": read " + print(o->value()));
    }
  }
  double s = since(t0);
  r.require(s < 30.0, "took " + std::to_string(s) + " s");
  r.notes.push_back(std::to_string(multisets.size()) + " multisets");
  r.notes.push_back(std::to_string(s).substr(0, 5) + " s");
  report(2, "parallel priority writes read the maximum", r);
}

void criterion3() {
  Result r;
  auto t0 = Clock::now();
  const std::vector<std::int64_t> pool = {1, 2, 3, 7};
  std::function<std::int64_t(std::int64_t)> hashes[] = {[](std::int64_t) { return std::int64_t{0}; },
                                                        [](std::int64_t x) { return x; }};
  int programs = 0;
  for (int cap : {3, 4}) {
    for (int h = 0; h < 2; ++h) {
      for (std::size_t mask = 0; mask < (1u << pool.size()); ++mask) {
        std::vector<std::int64_t> ins;
        for (std::size_t i = 0; i < pool.size(); ++i) {
          if (mask & (1u << i)) ins.push_back(pool[i]);
        }
        if (ins.size() > 3 || static_cast<int>(ins.size()) >= cap) continue;
        ++programs;
        std::string src = hashset_source(cap, h, ins);
        // Expected elems: the oracle's slots without the dummy, and the same
        // for every insertion order.
        auto slots = oracle_sequential_hashset(static_cast<std::size_t>(cap), hashes[h], ins);
        std::vector<std::int64_t> perm = ins;
        std::sort(perm.begin(), perm.end());
        do {
          r.require(oracle_sequential_hashset(static_cast<std::size_t>(cap), hashes[h], perm) == slots,
                    src + ": oracle depends on insertion order");
        } while (std::next_permutation(perm.begin(), perm.end()));
        std::vector<std::int64_t> expected;
        for (const auto& s : slots) {
          if (s) expected.push_back(*s);
        }
        ExplorationReport rep = explore_ref(linked(src), true);
        r.require(rep.complete(), src + ": limits hit");
        r.require(rep.count(Outcome::Kind::Stuck) == 0, src + ": stuck outcome");
        r.require(rep.count(Outcome::Kind::Terminated) == 1, src + ": " + std::to_string(rep.outcomes.size()) + " outcomes");
        if (const Outcome* o = rep.first(Outcome::Kind::Terminated)) {
          auto got = result_array(*o);
          r.require(got && *got == expected, src + ": elems " + print(o->config));
        }
      }
    }
  }
  double s = since(t0);
  r.require(s < 300.0, "took " + std::to_string(s) + " s");
  r.notes.push_back(std::to_string(programs) + " programs");
  r.notes.push_back(std::to_string(s).substr(0, 5) + " s");
  report(3, "hash set outcomes are unique and match the sequential oracle", r);
}

void criterion4() {
  Result r;
  auto t0 = Clock::now();
  const std::vector<std::int64_t> alphabet = {1, 2, 7};
  std::vector<std::vector<std::int64_t>> inputs = {{}};
  for (std::size_t len = 1; len <= 3; ++len) {
    std::size_t total = 1;
    for (std::size_t i = 0; i < len; ++i) total *= alphabet.size();
    for (std::size_t code = 0; code < total; ++code) {
      std::vector<std::int64_t> a;
      for (std::size_t i = 0, c = code; i < len; ++i, c /= alphabet.size()) a.push_back(alphabet[c % alphabet.size()]);
      inputs.push_back(a);
    }
  }
  for (const auto& in : inputs) {
    std::string src = dedup_source(in);
    ExplorationReport rep = explore_ref(linked(src), false);
    r.require(rep.complete(), src + ": limits hit");
    r.require(rep.outcomes.size() == 1 && rep.count(Outcome::Kind::Terminated) == 1,
              src + ": " + std::to_string(rep.outcomes.size()) + " outcomes");
    if (const Outcome* o = rep.first(Outcome::Kind::Terminated)) {
      auto got = result_array(*o);
      IntSet want = oracle_dedup(in);
      bool ok = got && IntSet(got->begin(), got->end()) == want && got->size() == want.size();
      r.require(ok, src + ": result " + print(o->config));
    }
  }
  double s = since(t0);
  r.require(s < 300.0, "took " + std::to_string(s) + " s");
  r.notes.push_back(std::to_string(inputs.size()) + " arrays");
  r.notes.push_back(std::to_string(s).substr(0, 5) + " s");
  report(4, "dedup returns the distinct elements", r);
}

void criterion5() {
  Result r;
  auto t0 = Clock::now();
  constexpr std::size_t kWanted = 400;
  constexpr std::size_t kMaxCandidates = 200000;
  std::mt19937_64 rng(20261019);
  std::set<const Expr*> seen;
  std::vector<ExprPtr> keep;
  std::size_t candidates = 0;
  std::size_t rejected = 0;
  std::size_t with_par = 0;
  std::map<std::string, std::size_t> verdicts;
  while (keep.size() < kWanted && candidates < kMaxCandidates) {
    ++candidates;
    ExprPtr body = random_program(rng);
    if (body->size() > 25 || count_kind(body, ExprKind::Par) > 2) continue;
    if (!seen.insert(body.get()).second) continue;
    ExprPtr e = link(body);
    if (!check_program(e).well_typed) {
      ++rejected;
      continue;
    }
    keep.push_back(body);
    if (count_kind(body, ExprKind::Par) > 0) ++with_par;
    Verdict v = check_sisafety(e);
    verdicts[std::string(verdict_name(v.kind))]++;
    r.require(v.report.complete(), "limits hit: " + print(body));
    r.require(v.kind == VerdictKind::Holds || v.kind == VerdictKind::HoldsVacuously,
              std::string(verdict_name(v.kind)) + ": " + print(body));
  }
  double s = since(t0);
  r.require(keep.size() >= 300, "only " + std::to_string(keep.size()) + " accepted programs");
  // A corpus without parallelism would make the check vacuous.
  r.require(with_par * 4 >= keep.size(), "only " + std::to_string(with_par) + " accepted programs use par");
  r.require(s < 600.0, "took " + std::to_string(s) + " s");
  r.notes.push_back(std::to_string(keep.size()) + " well-typed of " + std::to_string(keep.size() + rejected) +
                    " checked, " + std::to_string(with_par) + " with par");
  for (const auto& [k, n] : verdicts) r.notes.push_back(k + " " + std::to_string(n));
  r.notes.push_back(std::to_string(s).substr(0, 5) + " s");
  report(5, "well-typed generated programs are schedule-independently safe", r);
}

void criterion6() {
  Result r;
  auto verdict = [](const std::string& name) { return check_program(corpus_file(name)); };
  ClosedVerdict unsafe = verdict("unsafe");
  r.require(!unsafe.well_typed && unsafe.error->kind == TypeError::Kind::UnsplittableSharing &&
                unsafe.error->variable == "r",
            "unsafe not rejected with UnsplittableSharing(r)");
  ClosedVerdict dd = verdict("dedup_typed");
  bool shape = dd.well_typed && dd.type.is(TypeKind::Arrow) && dd.type.left().is(TypeKind::IntArray) &&
               dd.type.right().is(TypeKind::Prod) && dd.type.right().left() == dd.type.left() &&
               dd.type.right().right() == Type::intarray(1);
  r.require(shape, "dedup type " + (dd.well_typed ? print(dd.type) : dd.error->message));
  ClosedVerdict ww = verdict("pwrite_pair");
  r.require(ww.well_typed, "parallel pwrite/pwrite rejected");
  ClosedVerdict wr = verdict("pwrite_pread");
  r.require(!wr.well_typed && wr.error->kind == TypeError::Kind::PhaseViolation && wr.error->variable == "r",
            "parallel pwrite/pread not rejected with PhaseViolation(r)");
  if (dd.well_typed) r.notes.push_back("dedup : " + print(dd.type));
  report(6, "type checker verdicts", r);
}

void criterion7() {
  Result r;
  auto t0 = Clock::now();
  // Parser roundtrip.
  std::mt19937_64 rng(7);
  int roundtrips = 0;
  for (int i = 0; i < 1000; ++i) {
    ExprPtr e = random_syntax(rng, 4 + i % 40);
    std::string text = print(e);
    try {
      ExprPtr back = parse(text);
      r.require(back == e, "roundtrip changed " + text);
      if (back == e) ++roundtrips;
    } catch (const ParseError& err) {
      r.require(false, "roundtrip failed to parse " + text + ": " + err.what());
    }
  }
  r.notes.push_back(std::to_string(roundtrips) + "/1000 roundtrips");

  r.require(cross.configs > 0, "no configs visited");
  r.require(cross.literal_mismatch == 0, std::to_string(cross.literal_mismatch.load()) + " reducible/enabled mismatches");
  r.require(cross.refined_mismatch == 0, std::to_string(cross.refined_mismatch.load()) + " reducible/stuck-task mismatches");
  r.notes.push_back(std::to_string(cross.configs.load()) + " configs cross-checked");

  // Memoization transparency on the corpus programs. The extra example
  // programs are left out: their schedule trees run to 1e19 nodes and beyond.
  Manifest m = load_manifest(fs::path(MDL_CORPUS_DIR) / "manifest.json");
  const auto& names = corpus_names();
  int memo_checked = 0;
  for (const ManifestEntry& me : m.entries) {
    std::string stem = fs::path(me.file).stem().string();
    if (std::find(names.begin(), names.end(), stem) == names.end()) continue;
    ExprPtr e = parse(read_file(m.dir / me.file));
    if (me.arg) e = Expr::app(e, Expr::integer(*me.arg));
    ExploreOptions on;
    ExploreOptions off;
    off.memo = false;
    off.limits.max_states = 400000000;
    ExplorationReport a = explore_all(e, on);
    ExplorationReport b = explore_all(e, off);
    r.require(a.complete() && b.complete(), me.name + ": memo on/off exploration incomplete");
    r.require(outcome_set(a) == outcome_set(b), me.name + ": memo on/off outcomes differ");
    ++memo_checked;
  }
  r.notes.push_back(std::to_string(memo_checked) + " corpus entries memo on/off");

  // Worker count does not change reports.
  for (const auto& [e, ref] : reference_reports) {
    ExploreOptions o;
    o.jobs = 4;
    json got = stable(explore_all(e, o));
    r.require(got == ref, "jobs 4 report differs for " + print(e).substr(0, 80));
  }
  r.notes.push_back(std::to_string(reference_reports.size()) + " reports jobs 1 = jobs 4");
  r.notes.push_back(std::to_string(since(t0)).substr(0, 5) + " s");
  report(7, "infrastructure properties", r);
}

}  // namespace

int main() {
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  std::cout << (failed == 0 ? "all criteria pass" : std::to_string(failed) + " criteria fail") << std::endl;
  return failed == 0 ? 0 : 1;
}
