#pragma once

#include <cstddef>

#include "mdl/semantics.hpp"

namespace mdl {

/// Renames locations to 0, 1, ... in first-occurrence order (expression
/// first, then breadth-first through the store) and drops every location
/// that is unreachable from the expression. Configs that differ only by a
/// permutation of locations and by garbage get equal canonical forms.
Config canonicalize(const Config& c);

/// Same renaming restricted to what a value reaches.
Config canonicalize_value(const Value& v, const Store& s);

struct ConfigHash {
  std::size_t operator()(const Config& c) const;
};

/// Exact comparison; expressions are interned so this is pointer equality
/// plus array contents.
struct ConfigEq {
  bool operator()(const Config& a, const Config& b) const {
    return a.expr == b.expr && a.store == b.store;
  }
};

}  // namespace mdl
