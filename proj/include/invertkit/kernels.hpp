#pragma once

#include <cstddef>

namespace invertkit::kernels {

// Elementwise kernels over contiguous double arrays. Every variant is
// bit-identical to the scalar reference: lane arithmetic is a single IEEE
// op per element and the scans use the same comparisons. out may alias a.
struct KernelTable {
  const char* name;
  void (*add)(const double* a, const double* b, double* out, std::size_t n);
  void (*sub)(const double* a, const double* b, double* out, std::size_t n);
  void (*mul)(const double* a, const double* b, double* out, std::size_t n);
  void (*div)(const double* a, const double* b, double* out, std::size_t n);
  void (*neg)(const double* a, double* out, std::size_t n);
  void (*fill)(double value, double* out, std::size_t n);
  bool (*any_eq_zero)(const double* a, std::size_t n);
  bool (*any_nonpositive)(const double* a, std::size_t n);
  bool (*all_finite)(const double* a, std::size_t n);
};

const KernelTable& scalar_table();
#if defined(INVERTKIT_HAVE_AVX2)
const KernelTable& avx2_table();
#endif

// Fastest variant the host supports, or the one named by the
// INVERTKIT_KERNELS environment variable ("scalar" or "avx2").
const KernelTable& active_table();

}  // namespace invertkit::kernels
