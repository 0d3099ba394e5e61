#include "mdl/manifest.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "mdl/checker.hpp"
#include "mdl/report.hpp"
#include "mdl/syntax.hpp"

namespace mdl {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace {

template <class T>
std::optional<T> opt(const json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  return j[key].get<T>();
}

}  // namespace

Manifest load_manifest(const std::filesystem::path& path) {
  json j = json::parse(read_file(path), nullptr, false);
  if (j.is_discarded() || !j.is_object() || !j.contains("entries") || !j["entries"].is_array()) {
    throw std::runtime_error(path.string() + ": expected an object with an entries array");
  }
  Manifest m;
  m.dir = path.parent_path();
  try {
    for (const json& e : j["entries"]) {
      ManifestEntry me;
      me.name = e.at("name").get<std::string>();
      me.file = e.at("file").get<std::string>();
      me.arg = opt<std::int64_t>(e, "arg");
      me.basis = e.value("basis", "");
      if (e.contains("expect")) {
        const json& x = e["expect"];
        me.typecheck = opt<std::string>(x, "typecheck");
        me.type = opt<std::string>(x, "type");
        me.error_kind = opt<std::string>(x, "error_kind");
        me.error_variable = opt<std::string>(x, "error_variable");
        me.sisafety = opt<std::string>(x, "sisafety");
        me.value = opt<std::string>(x, "value");
        me.deterministic = opt<bool>(x, "deterministic");
      }
      m.entries.push_back(std::move(me));
    }
  } catch (const json::exception& ex) {
    throw std::runtime_error(path.string() + ": " + ex.what());
  }
  return m;
}

EntryResult check_entry(const Manifest& m, const ManifestEntry& entry, const ExploreOptions& opts) {
  EntryResult r{entry.name, {}};
  auto expect = [&](const char* what, const std::optional<std::string>& want, const std::string& got) {
    if (want && *want != got) r.mismatches.push_back(std::string(what) + ": expected " + *want + ", got " + got);
  };
  ParsedProgram p;
  try {
    p = parse_program(read_file(m.dir / entry.file));
  } catch (const std::exception& ex) {
    r.mismatches.push_back(std::string("load: ") + ex.what());
    return r;
  }
  ExprPtr e = entry.arg ? Expr::app(p.expr, Expr::integer(*entry.arg)) : p.expr;
  if (entry.typecheck || entry.type || entry.error_kind || entry.error_variable) {
    ClosedVerdict v = check_program(e, &p.positions);
    expect("typecheck", entry.typecheck, v.well_typed ? "WellTyped" : "Rejected");
    if (v.well_typed) {
      expect("type", entry.type, print(v.type));
    } else {
      expect("error_kind", entry.error_kind, std::string(error_kind_name(v.error->kind)));
      expect("error_variable", entry.error_variable, v.error->variable);
    }
  }
  if (entry.sisafety || entry.value || entry.deterministic) {
    Verdict v = sisafety_verdict(explore_all(e, opts));
    expect("sisafety", entry.sisafety, std::string(verdict_name(v.kind)));
    if (entry.value) {
      const Outcome* t = v.report.first(Outcome::Kind::Terminated);
      expect("value", entry.value, t ? print(t->value()) : "<none>");
    }
    if (entry.deterministic) {
      DeterminismResult d = outcome_determinism(v.report);
      bool got = d.deterministic && d.complete;
      if (got != *entry.deterministic) {
        r.mismatches.push_back(std::string("deterministic: expected ") + (*entry.deterministic ? "true" : "false") +
                               ", got " + (got ? "true" : "false"));
      }
    }
  }
  return r;
}

}  // namespace mdl
