#include <algorithm>
#include <bit>
#include <cctype>
#include <cstring>
#include <fstream>

#include "kernel_impls.hpp"

namespace flexfp {

std::size_t KernelSpec::index_of(const std::string& variable) const {
  for (std::size_t i = 0; i < variables.size(); ++i) {
    if (variables[i].name == variable) return i;
  }
  throw Error(ErrorCode::UnboundVariable, name + " has no variable '" + variable + "'");
}

KernelConfig KernelConfig::uniform(const KernelSpec& spec, FloatFormat f) {
  return KernelConfig(spec.name, std::vector<FloatFormat>(spec.group_count(), f));
}

KernelConfig KernelConfig::from_map(const KernelSpec& spec,
                                    const std::map<std::string, FloatFormat>& bound) {
  for (const auto& [name, f] : bound) spec.index_of(name);
  std::vector<FloatFormat> formats;
  for (const VariableSpec& v : spec.variables) {
    const auto it = bound.find(v.name);
    if (it == bound.end()) {
      throw Error(ErrorCode::UnboundVariable,
                  "variable '" + v.name + "' of " + spec.name + " has no format");
    }
    formats.push_back(it->second);
  }
  return KernelConfig(spec.name, std::move(formats));
}

namespace {

void check_precision_count(const KernelSpec& spec, std::span<const int> precisions) {
  if (precisions.size() < spec.group_count()) {
    throw Error(ErrorCode::UnboundVariable,
                "variable '" + spec.variables[precisions.size()].name + "' of " + spec.name +
                    " has no precision (expected " + std::to_string(spec.group_count()) +
                    " values, got " + std::to_string(precisions.size()) + ")");
  }
  if (precisions.size() > spec.group_count()) {
    throw Error(ErrorCode::OutOfRange, spec.name + " has " + std::to_string(spec.group_count()) +
                                           " variables but " + std::to_string(precisions.size()) +
                                           " precisions were given");
  }
}

}  // namespace

KernelConfig KernelConfig::from_precisions(const KernelSpec& spec, std::span<const int> precisions,
                                           const TypeSystem& ts) {
  check_precision_count(spec, precisions);
  std::vector<FloatFormat> formats;
  for (int p : precisions) formats.push_back(map_precision(ts, p));
  return KernelConfig(spec.name, std::move(formats));
}

KernelConfig KernelConfig::storage_from_precisions(const KernelSpec& spec,
                                                   std::span<const int> precisions,
                                                   const TypeSystem& ts) {
  check_precision_count(spec, precisions);
  std::vector<FloatFormat> formats;
  for (int p : precisions) formats.push_back(format_of(classify_precision(ts, p)));
  return KernelConfig(spec.name, std::move(formats));
}

Array Engine::place(VarId v, std::span<const double> values) const {
  Array a{v, format(v), {}};
  a.data.reserve(values.size());
  for (double x : values) a.data.push_back(encode(a.format, x));
  return a;
}

Array Engine::zeros(VarId v, std::size_t n) const {
  return Array{v, format(v), std::vector<FlexNum>(n, flexfp::zero(format(v)))};
}

FlexNum Engine::load(const Array& a, std::size_t i) {
  ctx_.record(OpKind::Load, a.format);
  return a.data.at(i);
}

void Engine::store(Array& a, std::size_t i, const FlexNum& x) {
  FlexNum value = to(a.var, x);
  ctx_.record(OpKind::Store, a.format);
  a.data.at(i) = value;
}

FlexNum Engine::to(VarId v, const FlexNum& x) {
  const FloatFormat f = format(v);
  if (x.format() == f) return x;
  ctx_.record_cast(x.format(), f);
  return cast_fp(x, f);
}

FlexNum Engine::add(VarId dst, const FlexNum& a, const FlexNum& b) {
  const FlexNum x = to(dst, a);
  const FlexNum y = to(dst, b);
  ctx_.record(OpKind::Add, format(dst));
  return flexfp::add(x, y);
}

FlexNum Engine::sub(VarId dst, const FlexNum& a, const FlexNum& b) {
  const FlexNum x = to(dst, a);
  const FlexNum y = to(dst, b);
  ctx_.record(OpKind::Sub, format(dst));
  return flexfp::sub(x, y);
}

FlexNum Engine::mul(VarId dst, const FlexNum& a, const FlexNum& b) {
  const FlexNum x = to(dst, a);
  const FlexNum y = to(dst, b);
  ctx_.record(OpKind::Mul, format(dst));
  return flexfp::mul(x, y);
}

FlexNum Engine::div(VarId dst, const FlexNum& a, const FlexNum& b) {
  const FlexNum x = to(dst, a);
  const FlexNum y = to(dst, b);
  ctx_.record(OpKind::Div, format(dst));
  return flexfp::div(x, y);
}

FlexNum Engine::sqrt(VarId dst, const FlexNum& a) {
  const FlexNum x = to(dst, a);
  ctx_.record(OpKind::Sqrt, format(dst));
  return flexfp::sqrt(x);
}

bool Engine::less(VarId v, const FlexNum& a, const FlexNum& b) {
  const FlexNum x = to(v, a);
  const FlexNum y = to(v, b);
  ctx_.record(OpKind::Cmp, format(v));
  return flexfp::compare(x, y) == std::partial_ordering::less;
}

const std::vector<std::unique_ptr<Kernel>>& kernel_registry() {
  static const std::vector<std::unique_ptr<Kernel>> registry = [] {
    std::vector<std::unique_ptr<Kernel>> r;
    r.push_back(kernels::make_jacobi());
    r.push_back(kernels::make_knn());
    r.push_back(kernels::make_pca());
    r.push_back(kernels::make_dwt());
    r.push_back(kernels::make_svm());
    r.push_back(kernels::make_conv());
    return r;
  }();
  return registry;
}

std::vector<KernelSpec> list_kernels() {
  std::vector<KernelSpec> out;
  for (const auto& k : kernel_registry()) out.push_back(k->spec());
  return out;
}

const Kernel& find_kernel(const std::string& name) {
  std::string upper = name;
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  for (const auto& k : kernel_registry()) {
    if (k->spec().name == upper) return *k;
  }
  throw Error(ErrorCode::UnknownKernel, "no kernel named '" + name + "'");
}

KernelInput generate_input(const std::string& kernel, std::uint64_t seed, std::size_t size) {
  return find_kernel(kernel).generate_input(seed, size);
}

KernelInput generate_input(const std::string& kernel, std::uint64_t seed) {
  const Kernel& k = find_kernel(kernel);
  return k.generate_input(seed, k.spec().default_size);
}

KernelOutput run_kernel(const Kernel& kernel, const KernelConfig& config, const KernelInput& input,
                        StatsContext& ctx) {
  if (config.kernel() != kernel.spec().name || config.formats().size() != kernel.spec().group_count()) {
    throw Error(ErrorCode::UnboundVariable, "configuration does not bind " + kernel.spec().name);
  }
  if (input.kernel != kernel.spec().name) {
    throw Error(ErrorCode::UnknownKernel,
                "input for " + input.kernel + " given to " + kernel.spec().name);
  }
  Engine engine(config, ctx);
  KernelOutput out = kernel.run(input, engine);
  if (ctx.in_region()) throw Error(ErrorCode::RegionImbalance, kernel.spec().name + " left a region open");
  return out;
}

KernelOutput reference_output(const Kernel& kernel, const KernelInput& input) {
  StatsContext ctx;
  return run_kernel(kernel, KernelConfig::uniform(kernel.spec(), formats::binary32), input, ctx);
}

KernelInput with_iterations(const KernelInput& jacobi_input, std::uint64_t iterations) {
  if (jacobi_input.kernel != "JACOBI" || jacobi_input.dims.size() != 2) {
    throw Error(ErrorCode::OutOfRange, "iteration count applies to JACOBI inputs only");
  }
  KernelInput out = jacobi_input;
  out.dims[1] = iterations;
  return out;
}

namespace {

constexpr char kMagic[8] = {'F', 'L', 'E', 'X', 'F', 'P', 'I', 'N'};
constexpr std::uint32_t kVersion = 1;

static_assert(std::endian::native == std::endian::little, "golden files assume a little-endian host");

template <class T>
void put(std::ofstream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::ifstream& in, const std::string& path) {
  T v{};
  if (!in.read(reinterpret_cast<char*>(&v), sizeof v)) {
    throw Error(ErrorCode::ParseError, "truncated input file '" + path + "'");
  }
  return v;
}

}  // namespace

void save_input(const KernelInput& input, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write '" + path + "'");
  out.write(kMagic, sizeof kMagic);
  put<std::uint32_t>(out, kVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(input.kernel.size()));
  out.write(input.kernel.data(), static_cast<std::streamsize>(input.kernel.size()));
  put<std::uint64_t>(out, input.seed);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(input.dims.size()));
  for (std::uint64_t d : input.dims) put<std::uint64_t>(out, d);
  put<std::uint64_t>(out, input.payload.size());
  for (double x : input.payload) put<double>(out, x);
  if (!out) throw Error(ErrorCode::IoError, "write failed for '" + path + "'");
}

KernelInput load_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path + "'");
  char magic[sizeof kMagic];
  if (!in.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof kMagic) != 0) {
    throw Error(ErrorCode::ParseError, "'" + path + "' is not a flexfp input file");
  }
  if (get<std::uint32_t>(in, path) != kVersion) {
    throw Error(ErrorCode::ParseError, "unsupported input file version in '" + path + "'");
  }
  KernelInput input;
  const auto name_len = get<std::uint32_t>(in, path);
  if (name_len > 64) throw Error(ErrorCode::ParseError, "bad kernel name in '" + path + "'");
  input.kernel.resize(name_len);
  if (!in.read(input.kernel.data(), name_len)) throw Error(ErrorCode::ParseError, "truncated '" + path + "'");
  input.seed = get<std::uint64_t>(in, path);
  const auto ndims = get<std::uint32_t>(in, path);
  if (ndims > 16) throw Error(ErrorCode::ParseError, "bad dimension count in '" + path + "'");
  for (std::uint32_t i = 0; i < ndims; ++i) input.dims.push_back(get<std::uint64_t>(in, path));
  const auto count = get<std::uint64_t>(in, path);
  if (count > (std::uint64_t{1} << 24)) throw Error(ErrorCode::ParseError, "payload too large in '" + path + "'");
  input.payload.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) input.payload.push_back(get<double>(in, path));
  find_kernel(input.kernel);
  return input;
}

namespace kernels {

void check_size(const KernelSpec& spec, std::size_t size) {
  if (size < spec.min_size || size > spec.max_size) {
    throw Error(ErrorCode::OutOfRange, spec.name + " size " + std::to_string(size) + " outside [" +
                                           std::to_string(spec.min_size) + "," +
                                           std::to_string(spec.max_size) + "]");
  }
}

void check_shape(const KernelInput& input, std::size_t n_dims, std::size_t payload) {
  if (input.dims.size() != n_dims || input.payload.size() != payload) {
    throw Error(ErrorCode::OutOfRange, input.kernel + " input has inconsistent dimensions");
  }
}

}  // namespace kernels

}  // namespace flexfp
