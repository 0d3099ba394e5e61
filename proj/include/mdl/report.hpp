#pragma once

#include <istream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "mdl/checker.hpp"
#include "mdl/explorer.hpp"

namespace mdl {

using json = nlohmann::ordered_json;

json to_json(const StepLabel& l);
json to_json(const Outcome& o);
json to_json(const TypeError& e);

/// Everything except wall-clock time, which lives under "timing" so that
/// reports from identical runs compare equal once it is removed.
json to_json(const ExplorationReport& r);
json to_json(const Verdict& v, const std::string& program);
json to_json(const DeterminismResult& d, const std::string& program);
json to_json(const ClosedVerdict& v);

/// One record per step of `trace` run from the empty store:
/// {step_index, label:{task_path, kind}, redex_printed, store_delta}.
/// Throws ReplayError if the trace does not apply.
std::vector<json> trace_records(const ExprPtr& e, const Trace& trace,
                                AllocPolicy alloc = AllocPolicy::LowestFree);
std::string trace_lines(const ExprPtr& e, const Trace& trace,
                        AllocPolicy alloc = AllocPolicy::LowestFree);

class TraceFormatError : public std::runtime_error {
 public:
  TraceFormatError(std::size_t line, const std::string& message)
      : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Reads labels from JSON lines as written by trace_lines. Only the label
/// field is required. Blank lines are skipped.
Trace read_trace(std::istream& in);

}  // namespace mdl
