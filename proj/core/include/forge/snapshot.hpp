#pragma once

#include <filesystem>
#include <optional>

#include "forge/table.hpp"

namespace forge {

/// Sidecar path for a snapshot data file: `v1.csv` -> `v1.schema.json`.
std::filesystem::path schema_path_for(const std::filesystem::path& csv_path);

/// Writes `<name>.csv` (RFC 4180, header = formatted column names, first
/// column "Country Code") and the `<name>.schema.json` dtype sidecar.
/// Output is byte-stable for equal tables.
void write_snapshot(const Table& table, const std::filesystem::path& csv_path);

/// Reads a snapshot pair back. Version defaults to the file stem (`v3.csv`)
/// and falls back to v1. Throws SchemaMismatch or IoError.
Table read_snapshot(const std::filesystem::path& csv_path, std::optional<Version> version = std::nullopt);

}  // namespace forge
