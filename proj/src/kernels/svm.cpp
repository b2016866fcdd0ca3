#include "kernel_impls.hpp"

namespace flexfp::kernels {
namespace {

// Linear-kernel decision function: sum_s coef[s] * <sv[s], x> + bias.
enum : VarId { kSv, kCoef, kBias, kSamples, kDot, kAcc, kScore };

constexpr std::uint64_t kDim = 8;
constexpr std::uint64_t kSupportVectors = 16;

class Svm final : public Kernel {
 public:
  const KernelSpec& spec() const override {
    static const KernelSpec s{
        "SVM",
        "linear support vector machine decision function",
        {{"sv", VarShape::Array, "support vectors"},
         {"coef", VarShape::Array, "dual coefficients"},
         {"bias", VarShape::Array, "intercept"},
         {"samples", VarShape::Array, "samples to classify"},
         {"dot", VarShape::Scalar, "inner product"},
         {"acc", VarShape::Scalar, "decision accumulator"},
         {"score", VarShape::Array, "decision values"}},
        {"inner product"},
        "number of samples",
        32,
        1,
        256};
    return s;
  }

  // dims: [m, d, nsv]; payload: sv (nsv×d), coef (nsv), bias (1), samples (m×d).
  KernelInput generate_input(std::uint64_t seed, std::size_t m) const override {
    check_size(spec(), m);
    InputRng rng(seed);
    KernelInput in{"SVM", seed, {m, kDim, kSupportVectors}, {}};
    for (std::size_t i = 0; i < kSupportVectors * kDim; ++i) in.payload.push_back(rng.uniform(-1.0, 1.0));
    for (std::size_t i = 0; i < kSupportVectors; ++i) in.payload.push_back(rng.uniform(-1.0, 1.0));
    in.payload.push_back(rng.uniform(-0.5, 0.5));
    for (std::size_t i = 0; i < m * kDim; ++i) in.payload.push_back(rng.uniform(-1.0, 1.0));
    return in;
  }

  std::size_t output_length(const KernelInput& in) const override {
    return in.dims.size() == 3 ? in.dims[0] : 0;
  }

  KernelOutput run(const KernelInput& in, Engine& e) const override {
    if (in.dims.size() != 3) throw Error(ErrorCode::OutOfRange, "SVM input needs [m, d, nsv]");
    const std::size_t m = in.dims[0], d = in.dims[1], nsv = in.dims[2];
    check_size(spec(), m);
    if (d == 0 || nsv == 0) throw Error(ErrorCode::OutOfRange, "bad SVM dimensions");
    check_shape(in, 3, nsv * d + nsv + 1 + m * d);

    const std::span<const double> payload(in.payload);
    const Array sv = e.place(kSv, payload.first(nsv * d));
    const Array coef = e.place(kCoef, payload.subspan(nsv * d, nsv));
    const Array bias = e.place(kBias, payload.subspan(nsv * d + nsv, 1));
    const Array samples = e.place(kSamples, payload.subspan(nsv * d + nsv + 1));
    Array score = e.zeros(kScore, m);

    for (std::size_t i = 0; i < m; ++i) {
      FlexNum acc = e.to(kAcc, e.load(bias, 0));
      for (std::size_t s = 0; s < nsv; ++s) {
        FlexNum dot = e.constant(kDot, 0.0);
        {
          auto region = e.vector_region();
          for (std::size_t j = 0; j < d; ++j) {
            dot = e.add(kDot, dot, e.mul(kDot, e.load(sv, s * d + j), e.load(samples, i * d + j)));
          }
        }
        acc = e.add(kAcc, acc, e.mul(kAcc, e.load(coef, s), dot));
      }
      e.store(score, i, acc);
    }

    KernelOutput out;
    for (const FlexNum& x : score.data) out.values.push_back(decode(x));
    return out;
  }
};

}  // namespace

std::unique_ptr<Kernel> make_svm() { return std::make_unique<Svm>(); }

}  // namespace flexfp::kernels
