#include "kernel_impls.hpp"

namespace flexfp::kernels {
namespace {

// 5×5 "same" convolution with zero padding. Taps that fall outside the
// image multiply a literal zero instead of loading.
enum : VarId { kImage, kWeights, kAcc, kOutput };

constexpr std::size_t kTaps = 5;

class Conv final : public Kernel {
 public:
  const KernelSpec& spec() const override {
    static const KernelSpec s{
        "CONV",
        "5x5 convolution of a single-channel image",
        {{"image", VarShape::Array, "input image"},
         {"weights", VarShape::Array, "5x5 filter"},
         {"acc", VarShape::Scalar, "tap accumulator"},
         {"output", VarShape::Array, "filtered image"}},
        {"convolution"},
        "image side N",
        16,
        5,
        64};
    return s;
  }

  // dims: [N]; payload: image (N×N) then weights (25).
  KernelInput generate_input(std::uint64_t seed, std::size_t n) const override {
    check_size(spec(), n);
    InputRng rng(seed);
    KernelInput in{"CONV", seed, {n}, {}};
    for (std::size_t i = 0; i < n * n; ++i) in.payload.push_back(rng.uniform(0.0, 1.0));
    for (std::size_t i = 0; i < kTaps * kTaps; ++i) in.payload.push_back(rng.uniform(-0.25, 0.25));
    return in;
  }

  std::size_t output_length(const KernelInput& in) const override {
    return in.dims.size() == 1 ? in.dims[0] * in.dims[0] : 0;
  }

  KernelOutput run(const KernelInput& in, Engine& e) const override {
    if (in.dims.size() != 1) throw Error(ErrorCode::OutOfRange, "CONV input needs [N]");
    const std::size_t n = in.dims[0];
    check_size(spec(), n);
    check_shape(in, 1, n * n + kTaps * kTaps);

    const std::span<const double> payload(in.payload);
    const Array image = e.place(kImage, payload.first(n * n));
    const Array weights = e.place(kWeights, payload.subspan(n * n));
    Array output = e.zeros(kOutput, n * n);
    const FlexNum pad = e.constant(kAcc, 0.0);
    const auto half = static_cast<std::ptrdiff_t>(kTaps / 2);
    const auto side = static_cast<std::ptrdiff_t>(n);

    {
      auto region = e.vector_region();
      for (std::ptrdiff_t y = 0; y < side; ++y) {
        for (std::ptrdiff_t x = 0; x < side; ++x) {
          FlexNum acc = e.constant(kAcc, 0.0);
          for (std::ptrdiff_t ky = 0; ky < static_cast<std::ptrdiff_t>(kTaps); ++ky) {
            for (std::ptrdiff_t kx = 0; kx < static_cast<std::ptrdiff_t>(kTaps); ++kx) {
              const std::ptrdiff_t yy = y + ky - half, xx = x + kx - half;
              const bool inside = yy >= 0 && yy < side && xx >= 0 && xx < side;
              const FlexNum pixel =
                  inside ? e.load(image, static_cast<std::size_t>(yy * side + xx)) : pad;
              const FlexNum w = e.load(weights, static_cast<std::size_t>(ky) * kTaps + static_cast<std::size_t>(kx));
              acc = e.add(kAcc, acc, e.mul(kAcc, pixel, w));
            }
          }
          e.store(output, static_cast<std::size_t>(y * side + x), acc);
        }
      }
    }

    KernelOutput out;
    for (const FlexNum& x : output.data) out.values.push_back(decode(x));
    return out;
  }
};

}  // namespace

std::unique_ptr<Kernel> make_conv() { return std::make_unique<Conv>(); }

}  // namespace flexfp::kernels
