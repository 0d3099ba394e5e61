#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mdl/explorer.hpp"

namespace mdl {

/// One row of corpus/manifest.json. Absent expectations are not checked.
struct ManifestEntry {
  std::string name;
  std::string file;
  std::optional<std::int64_t> arg;
  /// How the expectation was obtained: "reference", "derived" or "trivial".
  std::string basis;
  std::optional<std::string> typecheck;
  std::optional<std::string> type;
  std::optional<std::string> error_kind;
  std::optional<std::string> error_variable;
  std::optional<std::string> sisafety;
  std::optional<std::string> value;
  std::optional<bool> deterministic;
};

struct Manifest {
  std::filesystem::path dir;
  std::vector<ManifestEntry> entries;
};

/// Throws std::runtime_error on unreadable or malformed manifests.
Manifest load_manifest(const std::filesystem::path& path);

struct EntryResult {
  std::string name;
  std::vector<std::string> mismatches;
  bool ok() const { return mismatches.empty(); }
};

/// Parses the entry's file (applying arg), then compares every expectation.
EntryResult check_entry(const Manifest& m, const ManifestEntry& entry, const ExploreOptions& opts = {});

std::string read_file(const std::filesystem::path& path);

}  // namespace mdl
