#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mdl/lang.hpp"

namespace mdl {

struct Definition {
  std::string name;
  std::string source;
  ExprPtr expr;
};

/// Library functions in dependency order. Each one's free variables are
/// names of earlier definitions.
const std::vector<Definition>& definitions();
const Definition* find_definition(std::string_view name);

/// Let-binds, outermost first, every definition `body` uses (transitively).
ExprPtr link(const ExprPtr& body);

/// Same binding structure as source text, one definition per line.
std::string linked_source(std::string_view body_source);

/// Named entries: ref_ops, aadd, dumas, unsafe, palloc, pwrite, pread, fill,
/// alloc_fill, hashset_init, hashset_add, hashset_elems, filter_compact,
/// parfor, dedup. Each is a closed program; functions evaluate to themselves.
/// Throws std::out_of_range for unknown names.
ExprPtr corpus(std::string_view name);
const std::vector<std::string>& corpus_names();

/// Source of the corpus file for `name` (what corpus/<name>.mdl holds).
std::string corpus_source(std::string_view name);

/// Small whole programs over the library, as (name, body) pairs. Their
/// files hold linked_source(body).
const std::vector<std::pair<std::string, std::string>>& example_programs();

using IntSet = std::set<std::int64_t>;

IntSet oracle_dedup(std::span<const std::int64_t> input);

/// Slot contents after inserting `inserts` one by one with the hash set's
/// put loop; nullopt marks the dummy. Throws std::invalid_argument unless
/// there are fewer distinct inserts than slots.
std::vector<std::optional<std::int64_t>> oracle_sequential_hashset(
    std::size_t capacity, const std::function<std::int64_t(std::int64_t)>& hash,
    std::span<const std::int64_t> inserts);

/// Throws std::invalid_argument on empty input.
std::int64_t oracle_max(std::span<const std::int64_t> inputs);

}  // namespace mdl
