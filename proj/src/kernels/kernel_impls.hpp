#pragma once

#include <bit>
#include <cmath>
#include <random>

#include "flexfp/kernels.hpp"

namespace flexfp::kernels {

std::unique_ptr<Kernel> make_jacobi();
std::unique_ptr<Kernel> make_knn();
std::unique_ptr<Kernel> make_pca();
std::unique_ptr<Kernel> make_dwt();
std::unique_ptr<Kernel> make_svm();
std::unique_ptr<Kernel> make_conv();

/// Seeded source of input data. mt19937_64 output is fixed by the standard;
/// the real-valued mapping is done here so it is too.
class InputRng {
 public:
  explicit InputRng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [lo, hi), see full_precision.
  double uniform(double lo, double hi) {
    const double unit = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    return full_precision(lo + (hi - lo) * unit, lo, hi);
  }

  /// Nearest binary32 value in [lo, hi) whose last significand bit is set, so
  /// inputs are exact in the reference configuration yet use all 24 bits.
  static double full_precision(double x, double lo, double hi) {
    float f = static_cast<float>(x);
    if (f >= hi) f = std::nextafter(static_cast<float>(hi), static_cast<float>(lo));
    if (f < lo) f = std::nextafter(static_cast<float>(lo), static_cast<float>(hi));
    const auto bits = std::bit_cast<std::uint32_t>(f);
    if (bits & 1u) return f;
    const float up = std::bit_cast<float>(bits | 1u);
    if (up >= lo && up < hi) return up;
    return std::bit_cast<float>(bits - 1u);
  }

 private:
  std::mt19937_64 engine_;
};

void check_size(const KernelSpec& spec, std::size_t size);
/// Throws OutOfRange unless input.dims has `n` entries and payload has `payload` values.
void check_shape(const KernelInput& input, std::size_t n_dims, std::size_t payload);

}  // namespace flexfp::kernels
