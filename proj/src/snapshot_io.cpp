#include "nestcal/snapshot_io.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <string>

#include "nestcal/error.hpp"

namespace nestcal {

namespace {

template <typename U>
void put_le(std::ostream& out, U value) {
  std::array<char, sizeof(U)> bytes{};
  for (std::size_t k = 0; k < sizeof(U); ++k) {
    bytes[k] = static_cast<char>((value >> (8 * k)) & 0xFF);
  }
  out.write(bytes.data(), bytes.size());
}

template <typename U>
U get_le(std::istream& in) {
  std::array<unsigned char, sizeof(U)> bytes{};
  in.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
  if (!in) throw Error(ErrorKind::Io, "truncated snapshot file");
  U value = 0;
  for (std::size_t k = 0; k < sizeof(U); ++k) value |= static_cast<U>(bytes[k]) << (8 * k);
  return value;
}

}  // namespace

void write_snapshots(std::ostream& out, const SnapshotMatrix& snapshots) {
  const auto n = snapshots.sensor_count();
  const auto t = snapshots.sample_count();
  if (n > std::numeric_limits<std::uint32_t>::max() || t > std::numeric_limits<std::uint32_t>::max()) {
    throw Error(ErrorKind::InvalidArgument, "snapshot matrix too large for the file format");
  }
  out.write(snapshot_magic.data(), snapshot_magic.size());
  put_le(out, static_cast<std::uint32_t>(n));
  put_le(out, static_cast<std::uint32_t>(t));
  for (Eigen::Index c = 0; c < t; ++c) {
    for (Eigen::Index r = 0; r < n; ++r) {
      put_le(out, std::bit_cast<std::uint64_t>(snapshots.data(r, c).real()));
      put_le(out, std::bit_cast<std::uint64_t>(snapshots.data(r, c).imag()));
    }
  }
  if (!out) throw Error(ErrorKind::Io, "failed writing snapshots");
}

SnapshotMatrix read_snapshots(std::istream& in) {
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != snapshot_magic) throw Error(ErrorKind::Io, "not a snapshot file (bad magic)");
  const auto n = get_le<std::uint32_t>(in);
  const auto t = get_le<std::uint32_t>(in);
  if (n == 0 || t == 0) throw Error(ErrorKind::EmptyInput, "snapshot file has no samples");
  SnapshotMatrix out{Eigen::MatrixXcd(n, t)};
  for (Eigen::Index c = 0; c < t; ++c) {
    for (Eigen::Index r = 0; r < n; ++r) {
      const double re = std::bit_cast<double>(get_le<std::uint64_t>(in));
      const double im = std::bit_cast<double>(get_le<std::uint64_t>(in));
      if (!std::isfinite(re) || !std::isfinite(im)) {
        throw Error(ErrorKind::InvalidArgument, "non-finite sample in snapshot file");
      }
      out.data(r, c) = {re, im};
    }
  }
  return out;
}

void write_snapshots(const std::filesystem::path& path, const SnapshotMatrix& snapshots) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot open " + path.string() + " for writing");
  write_snapshots(out, snapshots);
}

SnapshotMatrix read_snapshots(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  return read_snapshots(in);
}

}  // namespace nestcal
