// mdl: run, explore and type-check programs of the fork-join language.
#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "mdl/checker.hpp"
#include "mdl/corpus.hpp"
#include "mdl/explorer.hpp"
#include "mdl/manifest.hpp"
#include "mdl/report.hpp"
#include "mdl/syntax.hpp"

#ifndef MDL_CORPUS_DIR
#define MDL_CORPUS_DIR "corpus"
#endif

namespace fs = std::filesystem;
using namespace mdl;

namespace {

// Exit code for usage errors, unreadable input and malformed traces.
constexpr int kInternal = 3;

bool use_color() {
  const char* v = std::getenv("MDL_COLOR");
  if (!v) return false;
  std::string s(v);
  return !(s.empty() || s == "0" || s == "never" || s == "false");
}

std::string paint(const std::string& text, const char* code) {
  if (!use_color()) return text;
  return std::string("\x1b[") + code + "m" + text + "\x1b[0m";
}

void diag(const std::string& msg) { std::cerr << paint("error", "1;31") << ": " << msg << "\n"; }

struct Options {
  std::string file;
  std::optional<std::int64_t> arg;
  std::uint64_t max_states = 1000000;
  std::uint64_t max_steps = 100000;
  std::uint64_t max_outcomes = 10000;
  std::string policy = "leftmost";
  std::optional<std::uint64_t> seed;
  unsigned jobs = 1;
  bool no_memo = false;
  std::string alloc = "lowest";
  std::string format = "human";
  std::string trace_out;
  std::string trace_in;
  std::string trace_file;
  std::string manifest;
  std::string emit;
};

struct Loaded {
  ParsedProgram parsed;
  ExprPtr expr;
};

// Throws on unreadable or unparsable input; main maps both to exit 3.
Loaded load(const Options& o) {
  Loaded l;
  std::string text = read_file(o.file);
  try {
    l.parsed = parse_program(text);
  } catch (const ParseError& e) {
    throw std::runtime_error(e.render(o.file));
  }
  l.expr = o.arg ? Expr::app(l.parsed.expr, Expr::integer(*o.arg)) : l.parsed.expr;
  return l;
}

ExploreOptions explore_options(const Options& o) {
  ExploreOptions x;
  x.limits = Limits{o.max_steps, o.max_states, o.max_outcomes};
  x.jobs = o.jobs;
  x.memo = !o.no_memo;
  x.alloc = o.alloc == "highest" ? AllocPolicy::HighestFree : AllocPolicy::LowestFree;
  return x;
}

Trace load_trace(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  try {
    return read_trace(in);
  } catch (const TraceFormatError& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

void print_labels(const Trace& t) {
  for (std::size_t i = 0; i < t.size(); ++i) {
    std::string path = t[i].task.empty() ? "." : t[i].task.str();
    std::cout << "    " << i << " " << path << " " << rule_name(t[i].kind) << "\n";
  }
}

void print_outcome(const Outcome& oc) {
  std::cout << "  " << outcome_kind_name(oc.kind) << ": " << print(oc.config) << "\n";
}

void print_report(const ExplorationReport& r) {
  std::cout << "states " << r.states_explored << ", transitions " << r.transitions << ", dedup hits "
            << r.dedup_hits << ", " << r.outcomes.size() << " outcome(s)";
  for (const std::string& l : r.limits_hit()) std::cout << ", hit " << l;
  std::cout << "\n";
  for (const Outcome& oc : r.outcomes) print_outcome(oc);
}

int cmd_run(const Options& o) {
  Loaded l = load(o);
  Schedule s;
  if (o.policy == "leftmost") s.policy = Policy::Leftmost;
  else if (o.policy == "rightmost") s.policy = Policy::Rightmost;
  else if (o.policy == "random") s.policy = Policy::Random;
  else s.policy = Policy::Trace;
  if (s.policy == Policy::Random) {
    if (!o.seed) throw CLI::ValidationError("--seed", "the random policy needs --seed");
    s.seed = *o.seed;
  }
  if (s.policy == Policy::Trace) {
    if (o.trace_in.empty()) throw CLI::ValidationError("--trace-in", "the trace policy needs --trace-in");
    s.labels = load_trace(o.trace_in);
  }
  Outcome oc;
  try {
    oc = run_schedule(l.expr, s, Limits{o.max_steps, o.max_states, o.max_outcomes}, explore_options(o).alloc);
  } catch (const ReplayError& e) {
    throw std::runtime_error(std::string("trace does not apply: ") + e.what());
  }
  if (!o.trace_out.empty()) write_file(o.trace_out, trace_lines(l.expr, oc.trace, explore_options(o).alloc));
  if (o.format == "json") {
    json j = to_json(oc);
    j["program"] = o.file;
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << outcome_kind_name(oc.kind) << " after " << oc.trace.size() << " steps\n";
    std::cout << print(oc.config) << "\n";
  }
  switch (oc.kind) {
    case Outcome::Kind::Terminated: return 0;
    case Outcome::Kind::Stuck: return 1;
    case Outcome::Kind::Truncated: return 2;
  }
  return kInternal;
}

int cmd_typecheck(const Options& o) {
  Loaded l = load(o);
  ClosedVerdict v = check_program(l.expr, &l.parsed.positions);
  if (o.format == "json") {
    json j = to_json(v);
    j["program"] = o.file;
    std::cout << j.dump(2) << "\n";
  } else if (v.well_typed) {
    std::cout << "WellTyped: " << print(v.type) << "\n";
  } else {
    std::cout << "Rejected: " << error_kind_name(v.error->kind);
    if (!v.error->variable.empty()) std::cout << "(" << v.error->variable << ")";
    std::cout << "\n";
    std::cerr << paint(v.error->render(o.file), "31") << "\n";
  }
  return v.well_typed ? 0 : 1;
}

int cmd_explore(const Options& o) {
  Loaded l = load(o);
  DeterminismResult d = check_outcome_determinism(l.expr, explore_options(o));
  if (o.format == "json") {
    std::cout << to_json(d, o.file).dump(2) << "\n";
  } else {
    print_report(d.report);
    std::cout << (d.deterministic ? "deterministic" : "nondeterministic")
              << (d.complete ? "" : " (incomplete)") << "\n";
    for (const Outcome& oc : d.counterexample) {
      print_outcome(oc);
      print_labels(oc.trace);
    }
  }
  if (!d.deterministic) return 1;
  return d.complete ? 0 : 2;
}

int cmd_sisafe(const Options& o) {
  Loaded l = load(o);
  Verdict v = check_sisafety(l.expr, explore_options(o));
  if (!o.trace_out.empty()) {
    AllocPolicy a = explore_options(o).alloc;
    if (v.terminating) write_file(o.trace_out, trace_lines(l.expr, *v.terminating, a));
    if (v.stuck) write_file(v.terminating ? o.trace_out + ".stuck" : o.trace_out, trace_lines(l.expr, *v.stuck, a));
  }
  if (o.format == "json") {
    std::cout << to_json(v, o.file).dump(2) << "\n";
  } else {
    std::cout << verdict_name(v.kind) << "\n";
    print_report(v.report);
    if (v.terminating && v.kind != VerdictKind::Holds) {
      std::cout << "terminating trace:\n";
      print_labels(*v.terminating);
    }
    if (v.stuck && v.kind == VerdictKind::Fails) {
      std::cout << "stuck trace:\n";
      print_labels(*v.stuck);
    }
  }
  switch (v.kind) {
    case VerdictKind::Holds:
    case VerdictKind::HoldsVacuously: return 0;
    case VerdictKind::Fails: return 1;
    case VerdictKind::Inconclusive: return 2;
  }
  return kInternal;
}

int cmd_corpus(const Options& o) {
  if (!o.emit.empty()) {
    fs::create_directories(o.emit);
    for (const std::string& n : corpus_names()) write_file((fs::path(o.emit) / (n + ".mdl")).string(), corpus_source(n));
    for (const auto& [n, body] : example_programs()) {
      write_file((fs::path(o.emit) / (n + ".mdl")).string(), linked_source(body));
    }
    std::cout << "wrote " << corpus_names().size() + example_programs().size() << " files to " << o.emit << "\n";
    return 0;
  }
  Manifest m = load_manifest(o.manifest.empty() ? fs::path(MDL_CORPUS_DIR) / "manifest.json" : fs::path(o.manifest));
  json rows = json::array();
  bool all = true;
  for (const ManifestEntry& e : m.entries) {
    EntryResult r = check_entry(m, e, explore_options(o));
    all = all && r.ok();
    if (o.format == "json") {
      rows.push_back({{"name", r.name}, {"ok", r.ok()}, {"mismatches", r.mismatches}});
    } else {
      std::cout << (r.ok() ? paint("ok  ", "32") : paint("FAIL", "31")) << " " << r.name << "\n";
      for (const std::string& mm : r.mismatches) std::cout << "     " << mm << "\n";
    }
  }
  if (o.format == "json") std::cout << json{{"ok", all}, {"entries", rows}}.dump(2) << "\n";
  return all ? 0 : 1;
}

int cmd_replay(const Options& o) {
  Loaded l = load(o);
  Trace t = load_trace(o.trace_file);
  AllocPolicy a = explore_options(o).alloc;
  Outcome oc;
  try {
    oc = replay(l.expr, t, a);
  } catch (const ReplayError& e) {
    throw std::runtime_error("replay failed at step " + std::to_string(e.index()) + ": " + e.what());
  }
  if (!o.trace_out.empty()) write_file(o.trace_out, trace_lines(l.expr, oc.trace, a));
  if (o.format == "json") {
    json j = to_json(oc);
    j["program"] = o.file;
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << outcome_kind_name(oc.kind) << " after " << oc.trace.size() << " steps\n";
    std::cout << print(oc.config) << "\n";
  }
  return oc.kind == Outcome::Kind::Terminated ? 0 : oc.kind == Outcome::Kind::Stuck ? 1 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mdl: interpreter, interleaving explorer and type checker"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* c, bool file) {
    if (file) c->add_option("file", o.file, "program (.mdl)")->required()->check(CLI::ExistingFile);
    c->add_option("--arg", o.arg, "apply the program to this integer");
    c->add_option("--format", o.format, "output format")->check(CLI::IsMember({"human", "json"}));
  };
  auto limits = [&](CLI::App* c) {
    c->add_option("--limits-states", o.max_states, "distinct states to explore")->check(CLI::PositiveNumber);
    c->add_option("--limits-steps", o.max_steps, "steps per schedule")->check(CLI::PositiveNumber);
    c->add_option("--limits-outcomes", o.max_outcomes, "distinct outcomes")->check(CLI::PositiveNumber);
    c->add_option("--alloc", o.alloc, "allocation policy")->check(CLI::IsMember({"lowest", "highest"}));
  };
  auto explorer = [&](CLI::App* c) {
    limits(c);
    c->add_option("--jobs", o.jobs, "worker threads")->check(CLI::PositiveNumber);
    c->add_flag("--no-memo", o.no_memo, "explore the schedule tree without memoization");
  };

  CLI::App* run = app.add_subcommand("run", "follow one schedule");
  common(run, true);
  limits(run);
  run->add_option("--policy", o.policy, "scheduling policy")
      ->check(CLI::IsMember({"leftmost", "rightmost", "random", "trace"}));
  run->add_option("--seed", o.seed, "seed for the random policy");
  run->add_option("--trace-in", o.trace_in, "labels for the trace policy (JSON lines)");
  run->add_option("--trace-out", o.trace_out, "write the schedule as JSON lines");

  CLI::App* tc = app.add_subcommand("typecheck", "type-check a closed program");
  common(tc, true);

  CLI::App* ex = app.add_subcommand("explore", "enumerate outcomes and check determinism");
  common(ex, true);
  explorer(ex);

  CLI::App* si = app.add_subcommand("sisafe", "decide safety of terminating programs");
  common(si, true);
  explorer(si);
  si->add_option("--trace-out", o.trace_out, "write witnesses as JSON lines (stuck one to FILE.stuck)");

  CLI::App* co = app.add_subcommand("corpus", "check the corpus against its manifest");
  co->add_option("--manifest", o.manifest, "manifest path");
  co->add_option("--emit", o.emit, "write the built-in corpus sources to this directory");
  co->add_option("--format", o.format, "output format")->check(CLI::IsMember({"human", "json"}));
  explorer(co);

  CLI::App* rp = app.add_subcommand("replay", "re-execute a recorded trace");
  common(rp, true);
  rp->add_option("trace", o.trace_file, "trace (JSON lines)")->required();
  rp->add_option("--alloc", o.alloc, "allocation policy")->check(CLI::IsMember({"lowest", "highest"}));
  rp->add_option("--trace-out", o.trace_out, "write the replayed trace as JSON lines");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInternal;
  }

  try {
    if (*run) return cmd_run(o);
    if (*tc) return cmd_typecheck(o);
    if (*ex) return cmd_explore(o);
    if (*si) return cmd_sisafe(o);
    if (*co) return cmd_corpus(o);
    if (*rp) return cmd_replay(o);
  } catch (const CLI::Error& e) {
    diag(e.what());
    return kInternal;
  } catch (const std::exception& e) {
    diag(e.what());
    return kInternal;
  }
  return kInternal;
}
