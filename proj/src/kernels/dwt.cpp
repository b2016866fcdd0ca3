#include <cmath>
#include <numbers>

#include "kernel_impls.hpp"

namespace flexfp::kernels {
namespace {

// One level of the Haar transform.
enum : VarId { kSignal, kApprox, kDetail };

class Dwt final : public Kernel {
 public:
  const KernelSpec& spec() const override {
    static const KernelSpec s{
        "DWT",
        "one-level Haar discrete wavelet transform",
        {{"signal", VarShape::Array, "input signal"},
         {"approx", VarShape::Array, "approximation coefficients"},
         {"detail", VarShape::Array, "detail coefficients"}},
        {"transform"},
        "signal length (even)",
        256,
        2,
        1024};
    return s;
  }

  KernelInput generate_input(std::uint64_t seed, std::size_t n) const override {
    check_size(spec(), n);
    if (n % 2 != 0) throw Error(ErrorCode::OutOfRange, "DWT signal length must be even");
    InputRng rng(seed);
    const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
    KernelInput in{"DWT", seed, {n}, {}};
    for (std::size_t i = 0; i < n; ++i) {
      const double t = static_cast<double>(i) / static_cast<double>(n);
      const double x = std::sin(2.0 * std::numbers::pi * 3.0 * t + phase) +
                       0.5 * std::sin(2.0 * std::numbers::pi * 17.0 * t) + rng.uniform(-0.1, 0.1);
      in.payload.push_back(InputRng::full_precision(x, -4.0, 4.0));
    }
    return in;
  }

  std::size_t output_length(const KernelInput& in) const override {
    return in.dims.size() == 1 ? in.dims[0] : 0;
  }

  KernelOutput run(const KernelInput& in, Engine& e) const override {
    if (in.dims.size() != 1) throw Error(ErrorCode::OutOfRange, "DWT input needs [n]");
    const std::size_t n = in.dims[0];
    check_size(spec(), n);
    if (n % 2 != 0) throw Error(ErrorCode::OutOfRange, "DWT signal length must be even");
    check_shape(in, 1, n);

    const Array signal = e.place(kSignal, in.payload);
    Array approx = e.zeros(kApprox, n / 2);
    Array detail = e.zeros(kDetail, n / 2);
    const FlexNum ha = e.constant(kApprox, std::numbers::sqrt2 / 2);
    const FlexNum hd = e.constant(kDetail, std::numbers::sqrt2 / 2);

    {
      auto region = e.vector_region();
      for (std::size_t i = 0; i < n / 2; ++i) {
        const FlexNum a = e.load(signal, 2 * i);
        const FlexNum b = e.load(signal, 2 * i + 1);
        e.store(approx, i, e.mul(kApprox, e.add(kApprox, a, b), ha));
        e.store(detail, i, e.mul(kDetail, e.sub(kDetail, a, b), hd));
      }
    }

    KernelOutput out;
    for (const FlexNum& x : approx.data) out.values.push_back(decode(x));
    for (const FlexNum& x : detail.data) out.values.push_back(decode(x));
    return out;
  }
};

}  // namespace

std::unique_ptr<Kernel> make_dwt() { return std::make_unique<Dwt>(); }

}  // namespace flexfp::kernels
