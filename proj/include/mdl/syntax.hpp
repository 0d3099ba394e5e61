#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "mdl/lang.hpp"

namespace mdl {

struct SourcePos {
  int line = 0;
  int column = 0;
  bool known() const { return line > 0; }
};

/// First source position of each node produced by a parse. Interning means
/// repeated identical subterms share a node and thus the first position.
using SourceMap = std::unordered_map<const Expr*, SourcePos>;

class ParseError : public std::runtime_error {
 public:
  enum class Kind { Syntax, ReservedForm, IntegerOverflow };

  ParseError(Kind kind, SourcePos pos, std::string message, std::vector<std::string> expected = {});

  Kind kind() const { return kind_; }
  SourcePos pos() const { return pos_; }
  const std::vector<std::string>& expected() const { return expected_; }
  /// "name:line:col: message"
  std::string render(std::string_view source_name) const;

 private:
  Kind kind_;
  SourcePos pos_;
  std::vector<std::string> expected_;
};

struct ParseOptions {
  /// Accept the active parallel tuple `(|| e1, e2 ||)`; for debugging only.
  bool allow_run_par = false;
};

struct ParsedProgram {
  ExprPtr expr;
  SourceMap positions;
};

/// Throws ParseError.
ParsedProgram parse_program(std::string_view text, ParseOptions opts = {});
ExprPtr parse(std::string_view text, ParseOptions opts = {});

std::string print(const ExprPtr& e);
std::string print(const Value& v);

}  // namespace mdl
