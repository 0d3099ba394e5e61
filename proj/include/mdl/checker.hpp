#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "mdl/lang.hpp"
#include "mdl/syntax.hpp"
#include "mdl/types.hpp"

namespace mdl {

struct TypeError {
  enum class Kind {
    UnsplittableSharing,
    PhaseViolation,
    NotDuplicableClosure,
    Mismatch,
    UnboundVariable,
    BotCombination,
    /// The term has no typing rule (raw alloc/cas, locations, aadd, ...).
    Unsupported,
  };

  Kind kind = Kind::Mismatch;
  /// Offending variable(s), comma separated; may be empty for Mismatch.
  std::string variable;
  std::string message;
  const Expr* where = nullptr;
  SourcePos pos;

  /// "name:line:col: Kind(var): message"; position omitted when unknown.
  std::string render(std::string_view source_name) const;
};

std::string_view error_kind_name(TypeError::Kind k);

class TypeCheckError : public std::runtime_error {
 public:
  explicit TypeCheckError(TypeError e) : std::runtime_error(e.message), error_(std::move(e)) {}
  const TypeError& error() const { return error_; }

 private:
  TypeError error_;
};

struct Judgment {
  Type type;
  TypeEnv out;
};

/// Γ ⊢ e : τ ⊣ Γ'. Lambdas in the result are reported as arrows. Throws
/// TypeCheckError.
Judgment check(const TypeEnv& g, const ExprPtr& e, const SourceMap* positions = nullptr);

struct ClosedVerdict {
  bool well_typed = false;
  Type type;
  std::optional<TypeError> error;
};

ClosedVerdict check_program(const ExprPtr& e, const SourceMap* positions = nullptr);

}  // namespace mdl
