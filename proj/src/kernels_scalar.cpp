#include "invertkit/kernels.hpp"

#include <cmath>

namespace invertkit::kernels {

namespace {

void add_s(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] + b[i];
}

void sub_s(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] - b[i];
}

void mul_s(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

void div_s(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] / b[i];
}

void neg_s(const double* a, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = -a[i];
}

void fill_s(double value, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = value;
}

bool any_eq_zero_s(const double* a, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    if (a[i] == 0.0) return true;
  }
  return false;
}

bool any_nonpositive_s(const double* a, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    if (a[i] <= 0.0) return true;
  }
  return false;
}

bool all_finite_s(const double* a, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(a[i])) return false;
  }
  return true;
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table = {
      "scalar", add_s,         sub_s,
      mul_s,    div_s,         neg_s,
      fill_s,   any_eq_zero_s, any_nonpositive_s,
      all_finite_s,
  };
  return table;
}

}  // namespace invertkit::kernels
