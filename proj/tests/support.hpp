#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "mdl/explorer.hpp"
#include "mdl/lang.hpp"

namespace mdl::testing {

/// Arbitrary RunPar-free AST in the image of the parser: not necessarily
/// closed or well-typed. `budget` bounds the node count.
ExprPtr random_syntax(std::mt19937_64& rng, int budget);

/// Random body over the library (ref, palloc, alloc_fill, ...) that often but
/// not always type-checks. Not linked; pass through link().
ExprPtr random_program(std::mt19937_64& rng);

std::size_t count_kind(const ExprPtr& e, ExprKind k);

/// `let r = palloc init in` parallel pwrites of `values` (nested par for
/// three), then `pread r`.
std::string pwrite_source(const std::vector<std::int64_t>& values, std::int64_t init);

/// h0 is `fun x -> 0`, h1 is `fun x -> x`. Inserts run in parallel when
/// there are two or three of them; the program ends with `elems s`.
std::string hashset_source(int capacity, int hash, const std::vector<std::int64_t>& inserts);

/// Builds the array cell by cell, then `snd (dedup (fun x -> x) a)`.
std::string dedup_source(const std::vector<std::int64_t>& input);

ExprPtr linked(const std::string& body);

/// Integer cells of the array a Terminated outcome's value points at.
std::optional<std::vector<std::int64_t>> result_array(const Outcome& o);

}  // namespace mdl::testing
