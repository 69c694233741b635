#include "latdisp/random.hpp"

#include <cstdlib>

#include "latdisp/error.hpp"

namespace latdisp {

ComplexField random_mean_zero_field(const LatticeGrid& grid, SplitMix64& rng) {
  ComplexField f(grid);
  cplx mean = 0.0;
  for (auto& z : f.values()) {
    const double re = rng.uniform(-1.0, 1.0);
    const double im = rng.uniform(-1.0, 1.0);
    z = {re, im};
    mean += z;
  }
  mean /= static_cast<double>(grid.size());
  for (auto& z : f.values()) z -= mean;
  return f;
}

ComplexField random_band_limited_field(const LatticeGrid& grid, int max_mode, SplitMix64& rng) {
  detail::require(max_mode >= 1 && max_mode < grid.points_per_axis() / 2,
                  "random_band_limited_field: max_mode must be in [1, M/2)");
  SpectrumField spec(grid);
  std::vector<int> idx(static_cast<std::size_t>(grid.dim()));
  for (std::size_t flat = 0; flat < grid.size(); ++flat) {
    grid.unravel(flat, idx);
    bool inside = flat != 0;
    for (int j = 0; j < grid.dim(); ++j)
      inside = inside && std::abs(grid.signed_index(idx[j])) <= max_mode;
    // draw for every mode so the stream position does not depend on max_mode
    const double re = rng.uniform(-1.0, 1.0);
    const double im = rng.uniform(-1.0, 1.0);
    if (inside) spec[flat] = {re, im};
  }
  return idft(spec);
}

}  // namespace latdisp
