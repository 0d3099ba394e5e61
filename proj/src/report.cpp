#include "mdl/report.hpp"

#include <sstream>

#include "mdl/syntax.hpp"

namespace mdl {

namespace {

std::string loc_name(Loc l) { return "#" + std::to_string(l.id); }

json cells_json(const Array& a) {
  json cells = json::array();
  for (const Value& v : a.cells()) cells.push_back(print(v));
  return cells;
}

json traces_json(const Verdict& v) {
  json out = json::array();
  auto add = [&](const char* kind, const std::optional<Trace>& t) {
    if (!t) return;
    json labels = json::array();
    for (const StepLabel& l : *t) labels.push_back(to_json(l));
    out.push_back({{"kind", kind}, {"labels", std::move(labels)}});
  };
  add("terminating", v.terminating);
  add("stuck", v.stuck);
  return out;
}

}  // namespace

json to_json(const StepLabel& l) {
  return {{"task_path", l.task.str()}, {"kind", std::string(rule_name(l.kind))}};
}

json to_json(const Outcome& o) {
  json j;
  j["kind"] = std::string(outcome_kind_name(o.kind));
  if (o.kind == Outcome::Kind::Terminated) j["value"] = print(o.value());
  else j["expr"] = print(o.config.expr);
  json store = json::object();
  for (const auto& [l, a] : o.config.store.entries()) store[loc_name(l)] = cells_json(*a);
  j["store"] = std::move(store);
  j["trace_length"] = o.trace.size();
  return j;
}

json to_json(const TypeError& e) {
  json pos = nullptr;
  if (e.pos.known()) pos = {{"line", e.pos.line}, {"column", e.pos.column}};
  return {{"kind", std::string(error_kind_name(e.kind))},
          {"variable", e.variable},
          {"message", e.message},
          {"position", pos}};
}

json to_json(const ExplorationReport& r) {
  json outcomes = json::array();
  for (const Outcome& o : r.outcomes) outcomes.push_back(to_json(o));
  return {{"complete", r.complete()},
          {"states_explored", r.states_explored},
          {"transitions", r.transitions},
          {"dedup_hits", r.dedup_hits},
          {"limits_hit", r.limits_hit()},
          {"outcomes", std::move(outcomes)},
          {"timing", {{"seconds", r.seconds}}}};
}

json to_json(const Verdict& v, const std::string& program) {
  json j = {{"program", program}, {"verdict", std::string(verdict_name(v.kind))}};
  json r = to_json(v.report);
  j["states_explored"] = r["states_explored"];
  j["outcomes"] = r["outcomes"];
  j["witness_traces"] = traces_json(v);
  j["limits_hit"] = r["limits_hit"];
  j["dedup_hits"] = r["dedup_hits"];
  j["transitions"] = r["transitions"];
  j["timing"] = r["timing"];
  return j;
}

json to_json(const DeterminismResult& d, const std::string& program) {
  json j = {{"program", program}, {"deterministic", d.deterministic}, {"complete", d.complete}};
  json ce = json::array();
  for (const Outcome& o : d.counterexample) {
    json oj = to_json(o);
    json labels = json::array();
    for (const StepLabel& l : o.trace) labels.push_back(to_json(l));
    oj["labels"] = std::move(labels);
    ce.push_back(std::move(oj));
  }
  j["counterexample"] = std::move(ce);
  json r = to_json(d.report);
  for (auto it = r.begin(); it != r.end(); ++it) j[it.key()] = it.value();
  return j;
}

json to_json(const ClosedVerdict& v) {
  if (v.well_typed) return {{"verdict", "WellTyped"}, {"type", print(v.type)}, {"error", nullptr}};
  return {{"verdict", "Rejected"}, {"type", nullptr}, {"error", to_json(*v.error)}};
}

std::vector<json> trace_records(const ExprPtr& e, const Trace& trace, AllocPolicy alloc) {
  std::vector<json> out;
  Config c{e, Store{}};
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const StepLabel& l = trace[i];
    auto step = step_task(c, l.task, alloc);
    if (!step) throw ReplayError(i, "step " + std::to_string(i) + ": task '" + l.task.str() + "' cannot step");
    if (step->label.kind != l.kind) {
      throw ReplayError(i, "step " + std::to_string(i) + ": expected " + std::string(rule_name(l.kind)) +
                               ", found " + std::string(rule_name(step->label.kind)));
    }
    json delta = json::object();
    if (step->touched) {
      if (const Array* a = step->next.store.find(*step->touched)) delta[loc_name(*step->touched)] = cells_json(*a);
    }
    out.push_back({{"step_index", i},
                   {"label", to_json(l)},
                   {"redex_printed", print(step->redex)},
                   {"store_delta", std::move(delta)}});
    c = std::move(step->next);
  }
  return out;
}

std::string trace_lines(const ExprPtr& e, const Trace& trace, AllocPolicy alloc) {
  std::string out;
  for (const json& j : trace_records(e, trace, alloc)) out += j.dump() + "\n";
  return out;
}

Trace read_trace(std::istream& in) {
  Trace t;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) throw TraceFormatError(n, "not valid JSON");
    if (!j.is_object() || !j.contains("label") || !j["label"].is_object()) {
      throw TraceFormatError(n, "missing label object");
    }
    const json& l = j["label"];
    if (!l.contains("task_path") || !l["task_path"].is_string() || !l.contains("kind") || !l["kind"].is_string()) {
      throw TraceFormatError(n, "label needs string task_path and kind");
    }
    auto path = TaskPath::parse(l["task_path"].get<std::string>());
    if (!path) throw TraceFormatError(n, "bad task_path");
    auto kind = parse_rule(l["kind"].get<std::string>());
    if (!kind) throw TraceFormatError(n, "unknown step kind " + l["kind"].get<std::string>());
    t.push_back(StepLabel{*path, *kind});
  }
  return t;
}

}  // namespace mdl
