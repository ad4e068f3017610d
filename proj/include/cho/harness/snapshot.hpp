#pragma once

#include <filesystem>

#include "cho/spacetime.hpp"

/// Snapshot files: magic "CHO1", little-endian u32 nx, ny, count, then
/// count frames of nx*ny little-endian float64 in row-major order (x fastest).
namespace cho::harness {

struct Snapshot {
    int nx = 0;
    int ny = 0;
    std::vector<std::vector<double>> frames;
};

/// Throws IoError.
void write_snapshot(const std::filesystem::path& path, const FieldSeries& frames);
void write_snapshot(const std::filesystem::path& path, const Snapshot& snap);
/// Throws IoError (unreadable, bad magic, truncated).
[[nodiscard]] Snapshot read_snapshot(const std::filesystem::path& path);

}  // namespace cho::harness
