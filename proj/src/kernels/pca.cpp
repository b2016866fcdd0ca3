#include "kernel_impls.hpp"

namespace flexfp::kernels {
namespace {

// Principal components by power iteration with deflation. Each component is
// reported with the sign that makes its entries sum to a non-negative value.
enum : VarId { kData, kMean, kCentered, kCov, kVec, kTmp, kNorm, kEigval, kComps, kAcc };

constexpr std::uint64_t kDim = 4;
constexpr std::uint64_t kComponents = 2;
constexpr std::uint64_t kPowerIterations = 16;
constexpr std::size_t kLatent = 2;

class Pca final : public Kernel {
 public:
  const KernelSpec& spec() const override {
    static const KernelSpec s{
        "PCA",
        "principal component analysis of correlated samples",
        {{"data", VarShape::Array, "samples"},
         {"mean", VarShape::Array, "per-feature mean"},
         {"centered", VarShape::Array, "mean-centred samples"},
         {"cov", VarShape::Array, "covariance matrix"},
         {"vec", VarShape::Array, "power-iteration vector"},
         {"tmp", VarShape::Array, "matrix-vector product"},
         {"norm", VarShape::Scalar, "vector norm"},
         {"eigval", VarShape::Array, "eigenvalues"},
         {"comps", VarShape::Array, "principal components"},
         {"acc", VarShape::Scalar, "dot-product accumulator"}},
        {"centering", "covariance"},
        "number of samples",
        32,
        4,
        256};
    return s;
  }

  // dims: [n, d, components, iterations]; payload: n×d samples.
  KernelInput generate_input(std::uint64_t seed, std::size_t n) const override {
    check_size(spec(), n);
    InputRng rng(seed);
    KernelInput in{"PCA", seed, {n, kDim, kComponents, kPowerIterations}, {}};
    double loading[kDim][kLatent];
    for (auto& row : loading) {
      for (double& w : row) w = rng.uniform(-1.0, 1.0);
    }
    for (std::size_t i = 0; i < n; ++i) {
      const double z0 = rng.uniform(-2.0, 2.0);
      const double z1 = rng.uniform(-1.0, 1.0);
      for (std::size_t j = 0; j < kDim; ++j) {
        const double noise = rng.uniform(-0.1, 0.1);
        in.payload.push_back(
            InputRng::full_precision(loading[j][0] * z0 + loading[j][1] * z1 + noise, -8.0, 8.0));
      }
    }
    return in;
  }

  std::size_t output_length(const KernelInput& in) const override {
    return in.dims.size() == 4 ? in.dims[2] * (1 + in.dims[1]) : 0;
  }

  KernelOutput run(const KernelInput& in, Engine& e) const override {
    if (in.dims.size() != 4) throw Error(ErrorCode::OutOfRange, "PCA input needs [n, d, components, iterations]");
    const std::size_t n = in.dims[0], d = in.dims[1], c = in.dims[2], iters = in.dims[3];
    check_size(spec(), n);
    if (d == 0 || c == 0 || c > d) throw Error(ErrorCode::OutOfRange, "bad PCA dimensions");
    check_shape(in, 4, n * d);

    const Array data = e.place(kData, in.payload);
    Array mean = e.zeros(kMean, d);
    Array centered = e.zeros(kCentered, n * d);
    Array cov = e.zeros(kCov, d * d);
    Array vec = e.zeros(kVec, d);
    Array tmp = e.zeros(kTmp, d);
    Array eigval = e.zeros(kEigval, c);
    Array comps = e.zeros(kComps, c * d);

    const FlexNum count = e.constant(kMean, static_cast<double>(n));
    for (std::size_t j = 0; j < d; ++j) {
      FlexNum acc = e.constant(kAcc, 0.0);
      for (std::size_t i = 0; i < n; ++i) acc = e.add(kAcc, acc, e.load(data, i * d + j));
      e.store(mean, j, e.div(kMean, acc, count));
    }

    {
      auto region = e.vector_region();
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
          e.store(centered, i * d + j, e.sub(kCentered, e.load(data, i * d + j), e.load(mean, j)));
        }
      }
    }

    {
      auto region = e.vector_region();
      const FlexNum dof = e.constant(kCov, static_cast<double>(n - 1));
      for (std::size_t a = 0; a < d; ++a) {
        for (std::size_t b = a; b < d; ++b) {
          FlexNum acc = e.constant(kAcc, 0.0);
          for (std::size_t i = 0; i < n; ++i) {
            acc = e.add(kAcc, acc,
                        e.mul(kAcc, e.load(centered, i * d + a), e.load(centered, i * d + b)));
          }
          const FlexNum v = e.div(kCov, acc, dof);
          e.store(cov, a * d + b, v);
          if (a != b) e.store(cov, b * d + a, v);
        }
      }
    }

    // tmp = cov * vec
    auto multiply = [&] {
      for (std::size_t r = 0; r < d; ++r) {
        FlexNum acc = e.constant(kAcc, 0.0);
        for (std::size_t k = 0; k < d; ++k) {
          acc = e.add(kAcc, acc, e.mul(kAcc, e.load(cov, r * d + k), e.load(vec, k)));
        }
        e.store(tmp, r, acc);
      }
    };

    for (std::size_t comp = 0; comp < c; ++comp) {
      for (std::size_t j = 0; j < d; ++j) e.store(vec, j, e.constant(kVec, 1.0));
      for (std::size_t it = 0; it < iters; ++it) {
        multiply();
        FlexNum sq = e.constant(kNorm, 0.0);
        for (std::size_t j = 0; j < d; ++j) {
          const FlexNum t = e.load(tmp, j);
          sq = e.add(kNorm, sq, e.mul(kNorm, t, t));
        }
        const FlexNum norm = e.sqrt(kNorm, sq);
        for (std::size_t j = 0; j < d; ++j) e.store(vec, j, e.div(kVec, e.load(tmp, j), norm));
      }

      multiply();
      FlexNum rayleigh = e.constant(kAcc, 0.0);
      for (std::size_t j = 0; j < d; ++j) {
        rayleigh = e.add(kAcc, rayleigh, e.mul(kAcc, e.load(vec, j), e.load(tmp, j)));
      }
      e.store(eigval, comp, rayleigh);

      FlexNum total = e.constant(kAcc, 0.0);
      for (std::size_t j = 0; j < d; ++j) total = e.add(kAcc, total, e.load(vec, j));
      const bool flip = e.less(kAcc, total, e.constant(kAcc, 0.0));
      for (std::size_t j = 0; j < d; ++j) {
        const FlexNum v = e.load(vec, j);
        e.store(comps, comp * d + j, flip ? negate(v) : v);
      }

      if (comp + 1 < c) {
        const FlexNum lambda = e.load(eigval, comp);
        for (std::size_t a = 0; a < d; ++a) {
          const FlexNum scaled = e.mul(kCov, lambda, e.load(vec, a));
          for (std::size_t b = 0; b < d; ++b) {
            const FlexNum outer = e.mul(kCov, scaled, e.load(vec, b));
            e.store(cov, a * d + b, e.sub(kCov, e.load(cov, a * d + b), outer));
          }
        }
      }
    }

    KernelOutput out;
    for (const FlexNum& x : eigval.data) out.values.push_back(decode(x));
    for (const FlexNum& x : comps.data) out.values.push_back(decode(x));
    return out;
  }
};

}  // namespace

std::unique_ptr<Kernel> make_pca() { return std::make_unique<Pca>(); }

}  // namespace flexfp::kernels
