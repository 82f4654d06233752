#ifndef BSSCOV_CSV_HPP
#define BSSCOV_CSV_HPP

#include <filesystem>
#include <string>

#include "bsscov/simulate.hpp"

namespace bsscov {

/// Writes levels as `time,C1,...,Cp`, one row per grid time, full double
/// precision; metadata goes to a JSON sidecar `<file>.meta.json`.
void export_paths(const PathBundle& bundle, const std::filesystem::path& file);

/// Parses and validates the delimiter-separated path schema: header row,
/// strictly increasing times, uniform spacing to 1e-9 relative, finite
/// cells. SchemaError messages carry the offending row/column.
PathBundle ingest_paths(const std::filesystem::path& file);

} // namespace bsscov

#endif
