#include "invertkit/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace invertkit::kernels {

namespace {

const KernelTable& pick_table() {
  const char* forced = std::getenv("INVERTKIT_KERNELS");
  if (forced != nullptr) {
    if (std::strcmp(forced, "scalar") == 0) return scalar_table();
#if defined(INVERTKIT_HAVE_AVX2)
    if (std::strcmp(forced, "avx2") == 0) return avx2_table();
#endif
  }
#if defined(INVERTKIT_HAVE_AVX2)
  if (__builtin_cpu_supports("avx2")) return avx2_table();
#endif
  return scalar_table();
}

}  // namespace

const KernelTable& active_table() {
  static const KernelTable& table = pick_table();
  return table;
}

}  // namespace invertkit::kernels
