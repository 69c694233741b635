#pragma once

// Binary field snapshot, little-endian:
//   "LDSP" | u32 version = 1 | u32 d | u32 M | f64 h | f64 t |
//   M^d complex values as interleaved (re, im) f64, row-major.

#include <filesystem>
#include <iosfwd>

#include "latdisp/lattice.hpp"

namespace latdisp {

struct Snapshot {
  ComplexField field;
  double time = 0.0;
};

void write_snapshot(std::ostream& os, const ComplexField& field, double time);
void write_snapshot(const std::filesystem::path& path, const ComplexField& field, double time);

/// Throws PreconditionError on bad magic, unsupported version or truncation.
Snapshot read_snapshot(std::istream& is);
Snapshot read_snapshot(const std::filesystem::path& path);

}  // namespace latdisp
