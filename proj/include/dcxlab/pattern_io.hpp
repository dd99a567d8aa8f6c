#pragma once

// Point pattern files: CSV with header x1,...,xd (one point per row) and a
// sidecar JSON metadata record `<csv path>.json` holding the generator
// description, the window and the seed.

#include <filesystem>

#include "dcxlab/generators.hpp"

namespace dcx {

/// Writes `csv_path` and `csv_path + ".json"`.
void write_pattern(const PointPattern& pattern, const std::filesystem::path& csv_path);

/// Reads a pattern written by write_pattern(). Throws IoError on malformed
/// files and PreconditionError when a point lies outside the recorded window.
PointPattern read_pattern(const std::filesystem::path& csv_path);

std::filesystem::path sidecar_path(const std::filesystem::path& csv_path);

}  // namespace dcx
