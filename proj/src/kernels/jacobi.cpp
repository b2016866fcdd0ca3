#include "kernel_impls.hpp"

namespace flexfp::kernels {
namespace {

// 4-neighbour heat stencil on an N×N grid. The top edge is held at 1, the
// other edges at 0.
enum : VarId { kGrid, kNext, kSum };

constexpr std::uint64_t kDefaultIterations = 50;

class Jacobi final : public Kernel {
 public:
  const KernelSpec& spec() const override {
    static const KernelSpec s{
        "JACOBI",
        "Jacobi relaxation of a 2-D heat grid with fixed boundaries",
        {{"grid", VarShape::Array, "temperature grid"},
         {"next", VarShape::Array, "grid after one sweep"},
         {"sum", VarShape::Scalar, "neighbour sum"}},
        {},
        "grid side N",
        16,
        3,
        64};
    return s;
  }

  KernelInput generate_input(std::uint64_t seed, std::size_t n) const override {
    check_size(spec(), n);
    InputRng rng(seed);
    KernelInput in{"JACOBI", seed, {n, kDefaultIterations}, {}};
    in.payload.reserve(n * n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i == 0) {
          in.payload.push_back(1.0);
        } else if (i == n - 1 || j == 0 || j == n - 1) {
          in.payload.push_back(0.0);
        } else {
          in.payload.push_back(rng.uniform(0.0, 1.0));
        }
      }
    }
    return in;
  }

  std::size_t output_length(const KernelInput& in) const override {
    return in.dims.empty() ? 0 : in.dims[0] * in.dims[0];
  }

  KernelOutput run(const KernelInput& in, Engine& e) const override {
    if (in.dims.size() != 2) throw Error(ErrorCode::OutOfRange, "JACOBI input needs [N, iterations]");
    const std::size_t n = in.dims[0];
    check_size(spec(), n);
    check_shape(in, 2, n * n);
    const std::uint64_t iterations = in.dims[1];

    Array grid = e.place(kGrid, in.payload);
    Array next = e.place(kNext, in.payload);
    const FlexNum quarter = e.constant(kNext, 0.25);

    for (std::uint64_t it = 0; it < iterations; ++it) {
      for (std::size_t i = 1; i + 1 < n; ++i) {
        for (std::size_t j = 1; j + 1 < n; ++j) {
          FlexNum s = e.add(kSum, e.load(grid, (i - 1) * n + j), e.load(grid, (i + 1) * n + j));
          s = e.add(kSum, s, e.load(grid, i * n + j - 1));
          s = e.add(kSum, s, e.load(grid, i * n + j + 1));
          e.store(next, i * n + j, e.mul(kNext, s, quarter));
        }
      }
      for (std::size_t i = 1; i + 1 < n; ++i) {
        for (std::size_t j = 1; j + 1 < n; ++j) e.store(grid, i * n + j, e.load(next, i * n + j));
      }
    }

    KernelOutput out;
    out.values.reserve(grid.size());
    for (const FlexNum& x : grid.data) out.values.push_back(decode(x));
    return out;
  }
};

}  // namespace

std::unique_ptr<Kernel> make_jacobi() { return std::make_unique<Jacobi>(); }

}  // namespace flexfp::kernels
