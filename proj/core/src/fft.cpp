#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>
#include <vector>

#include "latdisp/error.hpp"

namespace latdisp::fft {
namespace {

// FFTW's planner is not thread-safe; execution of an existing plan is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

using PlanKey = std::tuple<int, int, int, bool>;

struct PlanCache {
  std::map<PlanKey, fftw_plan> plans;
  ~PlanCache() {
    for (auto& [key, plan] : plans) fftw_destroy_plan(plan);
  }
};

fftw_plan get_plan(int dim, int m, int sign, bool in_place) {
  static PlanCache cache;
  std::lock_guard lock(planner_mutex());
  const PlanKey key{dim, m, sign, in_place};
  if (auto it = cache.plans.find(key); it != cache.plans.end()) return it->second;

  std::size_t total = 1;
  for (int j = 0; j < dim; ++j) total *= static_cast<std::size_t>(m);
  // FFTW_ESTIMATE never touches the arrays, so scratch buffers only fix alignment.
  auto* a = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * total));
  auto* b = in_place ? a : static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * total));
  std::vector<int> n(static_cast<std::size_t>(dim), m);
  fftw_plan plan = fftw_plan_dft(dim, n.data(), a, b, sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD,
                                 FFTW_ESTIMATE);
  if (b != a) fftw_free(b);
  fftw_free(a);
  if (plan == nullptr) throw ComputationError("fft_plan_failed", "FFTW could not create a plan");
  cache.plans.emplace(key, plan);
  return plan;
}

}  // namespace

void transform(int dim, int points_per_axis, int sign, const cplx* in, cplx* out) {
  const bool in_place = (in == out);
  fftw_plan plan = get_plan(dim, points_per_axis, sign, in_place);
  // fftw_complex is layout-compatible with std::complex<double>.
  fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in)),
                   reinterpret_cast<fftw_complex*>(out));
}

}  // namespace latdisp::fft
