#include "latdisp/snapshot.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "latdisp/error.hpp"

namespace latdisp {
namespace {

constexpr std::array<char, 4> kMagic{'L', 'D', 'S', 'P'};
constexpr std::uint32_t kVersion = 1;

template <class T>
void put_le(std::ostream& os, T value) {
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  os.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <class T>
T get_le(std::istream& is) {
  unsigned char bytes[sizeof(T)];
  is.read(reinterpret_cast<char*>(bytes), sizeof(T));
  if (!is) throw PreconditionError("snapshot: truncated stream");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

}  // namespace

void write_snapshot(std::ostream& os, const ComplexField& field, double time) {
  const auto& g = field.grid();
  os.write(kMagic.data(), kMagic.size());
  put_le<std::uint32_t>(os, kVersion);
  put_le<std::uint32_t>(os, static_cast<std::uint32_t>(g.dim()));
  put_le<std::uint32_t>(os, static_cast<std::uint32_t>(g.points_per_axis()));
  put_le<double>(os, g.mesh());
  put_le<double>(os, time);
  for (cplx z : field.values()) {
    put_le<double>(os, z.real());
    put_le<double>(os, z.imag());
  }
  if (!os) throw ComputationError("io_error", "snapshot: write failed");
}

void write_snapshot(const std::filesystem::path& path, const ComplexField& field, double time) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ComputationError("io_error", "snapshot: cannot open " + path.string());
  write_snapshot(os, field, time);
}

Snapshot read_snapshot(std::istream& is) {
  std::array<char, 4> magic{};
  is.read(magic.data(), magic.size());
  if (!is || magic != kMagic) throw PreconditionError("snapshot: bad magic, expected LDSP");
  const auto version = get_le<std::uint32_t>(is);
  if (version != kVersion)
    throw PreconditionError("snapshot: unsupported version " + std::to_string(version));
  const auto d = get_le<std::uint32_t>(is);
  const auto m = get_le<std::uint32_t>(is);
  const auto h = get_le<double>(is);
  const auto t = get_le<double>(is);
  LatticeGrid grid(static_cast<int>(d), static_cast<int>(m), h);
  CVector values(grid.size());
  for (auto& z : values) {
    const double re = get_le<double>(is);
    const double im = get_le<double>(is);
    z = {re, im};
  }
  return Snapshot{ComplexField(grid, std::move(values)), t};
}

Snapshot read_snapshot(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw PreconditionError("snapshot: cannot open " + path.string());
  return read_snapshot(is);
}

}  // namespace latdisp
