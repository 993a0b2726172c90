#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>

#include "nestcal/synth.hpp"

namespace nestcal {

/// Snapshot interchange file:
///   bytes 0..7   ASCII "NESTSNP1"
///   bytes 8..11  N, uint32 little-endian
///   bytes 12..15 T, uint32 little-endian
///   then N*T complex samples, column-major (sensor index fastest), each as
///   real then imaginary IEEE-754 binary64 little-endian.
inline constexpr std::array<char, 8> snapshot_magic = {'N', 'E', 'S', 'T', 'S', 'N', 'P', '1'};

void write_snapshots(std::ostream& out, const SnapshotMatrix& snapshots);
SnapshotMatrix read_snapshots(std::istream& in);

void write_snapshots(const std::filesystem::path& path, const SnapshotMatrix& snapshots);
SnapshotMatrix read_snapshots(const std::filesystem::path& path);

}  // namespace nestcal
