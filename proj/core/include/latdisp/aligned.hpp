#pragma once

#include <complex>
#include <cstddef>
#include <new>
#include <vector>

namespace latdisp {

/// Allocator handing out 64-byte aligned blocks so FFT plans can be
/// reused across buffers (new-array execution requires equal alignment).
template <class T>
struct AlignedAllocator {
  using value_type = T;
  static constexpr std::align_val_t kAlign{64};

  AlignedAllocator() noexcept = default;
  template <class U>
  AlignedAllocator(const AlignedAllocator<U>&) noexcept {}

  T* allocate(std::size_t n) {
    return static_cast<T*>(::operator new(n * sizeof(T), kAlign));
  }
  void deallocate(T* p, std::size_t) noexcept { ::operator delete(p, kAlign); }

  template <class U>
  bool operator==(const AlignedAllocator<U>&) const noexcept { return true; }
};

using cplx = std::complex<double>;
using CVector = std::vector<cplx, AlignedAllocator<cplx>>;

}  // namespace latdisp
