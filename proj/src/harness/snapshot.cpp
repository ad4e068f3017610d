#include "cho/harness/snapshot.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

namespace cho::harness {

namespace {

template <class T>
void put_le(std::ofstream& out, T value) {
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
    out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <class T>
T get_le(std::ifstream& in, const std::filesystem::path& path) {
    unsigned char bytes[sizeof(T)];
    if (!in.read(reinterpret_cast<char*>(bytes), sizeof(T))) throw IoError(path.string() + ": truncated snapshot");
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
    T value;
    std::memcpy(&value, bytes, sizeof(T));
    return value;
}

}  // namespace

void write_snapshot(const std::filesystem::path& path, const Snapshot& snap) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out.write("CHO1", 4);
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(snap.nx));
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(snap.ny));
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(snap.frames.size()));
    for (const auto& frame : snap.frames) {
        if (frame.size() != static_cast<std::size_t>(snap.nx) * snap.ny) throw ShapeMismatch("snapshot frame size");
        for (double v : frame) put_le<double>(out, v);
    }
    if (!out) throw IoError("write failed: " + path.string());
}

void write_snapshot(const std::filesystem::path& path, const FieldSeries& frames) {
    if (frames.empty()) throw ShapeMismatch("no frames to write");
    Snapshot snap{frames.front().grid().nx(), frames.front().grid().ny(), {}};
    for (const Field& f : frames) snap.frames.emplace_back(f.values().begin(), f.values().end());
    write_snapshot(path, snap);
}

Snapshot read_snapshot(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, "CHO1", 4) != 0) throw IoError(path.string() + ": bad magic");
    Snapshot snap;
    snap.nx = static_cast<int>(get_le<std::uint32_t>(in, path));
    snap.ny = static_cast<int>(get_le<std::uint32_t>(in, path));
    const std::uint32_t count = get_le<std::uint32_t>(in, path);
    const std::size_t size = static_cast<std::size_t>(snap.nx) * snap.ny;
    snap.frames.assign(count, std::vector<double>(size));
    for (auto& frame : snap.frames) {
        for (double& v : frame) v = get_le<double>(in, path);
    }
    return snap;
}

}  // namespace cho::harness
