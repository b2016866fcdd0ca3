#include <vector>

#include "kernel_impls.hpp"

namespace flexfp::kernels {
namespace {

enum : VarId { kData, kQuery, kDiff, kAcc, kDist, kNearest };

constexpr std::uint64_t kDim = 4;
constexpr std::uint64_t kQueries = 4;
constexpr std::uint64_t kNeighbours = 3;

class Knn final : public Kernel {
 public:
  const KernelSpec& spec() const override {
    static const KernelSpec s{
        "KNN",
        "k nearest neighbours by euclidean distance",
        {{"data", VarShape::Array, "reference points"},
         {"query", VarShape::Array, "query points"},
         {"diff", VarShape::Scalar, "coordinate difference and its square"},
         {"acc", VarShape::Scalar, "squared distance accumulator"},
         {"dist", VarShape::Array, "distances to the current query"},
         {"nearest", VarShape::Array, "selected k smallest distances"}},
        {"distance"},
        "number of reference points",
        64,
        4,
        1024};
    return s;
  }

  // dims: [n, d, queries, k]; payload: data (n×d) then queries (queries×d).
  KernelInput generate_input(std::uint64_t seed, std::size_t n) const override {
    check_size(spec(), n);
    InputRng rng(seed);
    KernelInput in{"KNN", seed, {n, kDim, kQueries, kNeighbours}, {}};
    const std::size_t count = (n + kQueries) * kDim;
    for (std::size_t i = 0; i < count; ++i) in.payload.push_back(rng.uniform(-1.0, 1.0));
    return in;
  }

  std::size_t output_length(const KernelInput& in) const override {
    return in.dims.size() == 4 ? in.dims[2] * in.dims[3] : 0;
  }

  KernelOutput run(const KernelInput& in, Engine& e) const override {
    if (in.dims.size() != 4) throw Error(ErrorCode::OutOfRange, "KNN input needs [n, d, queries, k]");
    const std::size_t n = in.dims[0], d = in.dims[1], q = in.dims[2], k = in.dims[3];
    check_size(spec(), n);
    if (d == 0 || q == 0 || k == 0 || k > n) throw Error(ErrorCode::OutOfRange, "bad KNN dimensions");
    check_shape(in, 4, (n + q) * d);

    const std::span<const double> payload(in.payload);
    const Array data = e.place(kData, payload.first(n * d));
    const Array query = e.place(kQuery, payload.subspan(n * d));
    Array dist = e.zeros(kDist, n);
    Array nearest = e.zeros(kNearest, q * k);

    KernelOutput out;
    for (std::size_t qi = 0; qi < q; ++qi) {
      {
        auto region = e.vector_region();
        for (std::size_t i = 0; i < n; ++i) {
          FlexNum acc = e.constant(kAcc, 0.0);
          for (std::size_t j = 0; j < d; ++j) {
            const FlexNum diff = e.sub(kDiff, e.load(data, i * d + j), e.load(query, qi * d + j));
            acc = e.add(kAcc, acc, e.mul(kDiff, diff, diff));
          }
          e.store(dist, i, e.sqrt(kDist, acc));
        }
      }

      std::vector<bool> taken(n, false);
      for (std::size_t r = 0; r < k; ++r) {
        std::size_t best = n;
        FlexNum best_value = e.constant(kDist, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
          if (taken[i]) continue;
          const FlexNum v = e.load(dist, i);
          if (best == n || e.less(kDist, v, best_value)) {
            best = i;
            best_value = v;
          }
        }
        taken[best] = true;
        e.store(nearest, qi * k + r, best_value);
        out.labels.push_back(static_cast<std::int64_t>(best));
      }
    }

    for (const FlexNum& x : nearest.data) out.values.push_back(decode(x));
    return out;
  }
};

}  // namespace

std::unique_ptr<Kernel> make_knn() { return std::make_unique<Knn>(); }

}  // namespace flexfp::kernels
