#pragma once

// Benchmark kernels whose every variable (or array) carries its own format.
// All arithmetic goes through flexcore in the bound formats; each
// mixed-format edge is an explicit, counted cast.

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "flexfp/flexcore.hpp"
#include "flexfp/formatsys.hpp"
#include "flexfp/instrument.hpp"

namespace flexfp {

enum class VarShape { Scalar, Array };

struct VariableSpec {
  std::string name;
  VarShape shape;
  std::string role;
};

struct KernelSpec {
  std::string name;  // upper-case, e.g. "JACOBI"
  std::string summary;
  std::vector<VariableSpec> variables;
  std::vector<std::string> vector_regions;
  std::string size_meaning;
  std::size_t default_size;
  std::size_t min_size;
  std::size_t max_size;

  std::size_t group_count() const { return variables.size(); }
  /// Declaration index; UnboundVariable when absent.
  std::size_t index_of(const std::string& variable) const;
};

/// Kernel parameters (`dims`) and concatenated input arrays (`payload`).
struct KernelInput {
  std::string kernel;
  std::uint64_t seed = 0;
  std::vector<std::uint64_t> dims;
  std::vector<double> payload;

  friend bool operator==(const KernelInput&, const KernelInput&) = default;
};

struct KernelOutput {
  std::vector<double> values;
  std::vector<std::int64_t> labels;  // auxiliary integer results (KNN indices)
};

/// One format per variable group, in declaration order.
class KernelConfig {
 public:
  static KernelConfig uniform(const KernelSpec& spec, FloatFormat f);
  /// UnboundVariable names the first unbound variable; unknown names are rejected too.
  static KernelConfig from_map(const KernelSpec& spec, const std::map<std::string, FloatFormat>& bound);
  /// Tuning view: each group gets map_precision(ts, p).
  static KernelConfig from_precisions(const KernelSpec& spec, std::span<const int> precisions,
                                      const TypeSystem& ts);
  /// Storage view: each group gets its named type, classify_precision(ts, p).
  static KernelConfig storage_from_precisions(const KernelSpec& spec, std::span<const int> precisions,
                                              const TypeSystem& ts);

  FloatFormat operator[](std::size_t group) const { return formats_.at(group); }
  const std::vector<FloatFormat>& formats() const { return formats_; }
  const std::string& kernel() const { return kernel_; }

 private:
  KernelConfig(std::string kernel, std::vector<FloatFormat> formats)
      : kernel_(std::move(kernel)), formats_(std::move(formats)) {}

  std::string kernel_;
  std::vector<FloatFormat> formats_;
};

using VarId = std::size_t;

struct Array {
  VarId var;
  FloatFormat format;
  std::vector<FlexNum> data;
  std::size_t size() const { return data.size(); }
};

/// Routes kernel arithmetic through flexcore in the configured formats and
/// records every event in the context. Each operation executes in the format
/// of the variable receiving its result; operands in another format are cast
/// first.
class Engine {
 public:
  Engine(const KernelConfig& config, StatsContext& ctx) : config_(config), ctx_(ctx) {}

  FloatFormat format(VarId v) const { return config_[v]; }
  StatsContext& context() { return ctx_; }

  /// Input data placed in memory before the kernel starts; not counted.
  Array place(VarId v, std::span<const double> values) const;
  Array zeros(VarId v, std::size_t n) const;

  FlexNum load(const Array& a, std::size_t i);
  void store(Array& a, std::size_t i, const FlexNum& x);

  FlexNum to(VarId v, const FlexNum& x);
  /// Literal in the variable's format; no event.
  FlexNum constant(VarId v, double x) const { return encode(format(v), x); }

  FlexNum add(VarId dst, const FlexNum& a, const FlexNum& b);
  FlexNum sub(VarId dst, const FlexNum& a, const FlexNum& b);
  FlexNum mul(VarId dst, const FlexNum& a, const FlexNum& b);
  FlexNum div(VarId dst, const FlexNum& a, const FlexNum& b);
  FlexNum sqrt(VarId dst, const FlexNum& a);
  /// a < b, compared in the format of `v`.
  bool less(VarId v, const FlexNum& a, const FlexNum& b);

  ScopedRegion vector_region() { return ScopedRegion(ctx_, RegionTag::Vectorizable); }

 private:
  const KernelConfig& config_;
  StatsContext& ctx_;
};

class Kernel {
 public:
  virtual ~Kernel() = default;
  virtual const KernelSpec& spec() const = 0;
  /// OutOfRange when size is outside the kernel's size range.
  virtual KernelInput generate_input(std::uint64_t seed, std::size_t size) const = 0;
  virtual std::size_t output_length(const KernelInput& input) const = 0;
  virtual KernelOutput run(const KernelInput& input, Engine& engine) const = 0;
};

/// JACOBI, KNN, PCA, DWT, SVM, CONV.
const std::vector<std::unique_ptr<Kernel>>& kernel_registry();
std::vector<KernelSpec> list_kernels();
/// Case-insensitive; UnknownKernel otherwise.
const Kernel& find_kernel(const std::string& name);

KernelInput generate_input(const std::string& kernel, std::uint64_t seed, std::size_t size);
KernelInput generate_input(const std::string& kernel, std::uint64_t seed);

KernelOutput run_kernel(const Kernel& kernel, const KernelConfig& config, const KernelInput& input,
                        StatsContext& ctx);
/// All variables in binary32.
KernelOutput reference_output(const Kernel& kernel, const KernelInput& input);

/// JACOBI only: the same grid with a different sweep count.
KernelInput with_iterations(const KernelInput& jacobi_input, std::uint64_t iterations);

// Golden input files, little-endian:
//   "FLEXFPIN" | u32 version=1 | u32 name_len | name bytes | u64 seed |
//   u32 ndims | u64 dims[ndims] | u64 count | f64 payload[count]
void save_input(const KernelInput& input, const std::string& path);
KernelInput load_input(const std::string& path);

}  // namespace flexfp
