#pragma once

#include <cstddef>

#include "latdisp/aligned.hpp"

namespace latdisp::fft {

/// Unnormalised d-dimensional complex transform of an M^d row-major array.
/// sign = -1 computes sum_n a_n exp(-2 pi i n.k / M), sign = +1 the inverse
/// kernel. `in` and `out` may alias. Buffers must be 64-byte aligned.
void transform(int dim, int points_per_axis, int sign, const cplx* in, cplx* out);

}  // namespace latdisp::fft
