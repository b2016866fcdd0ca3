#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

#include "flexfp/kernels.hpp"

using namespace flexfp;

namespace {

// Plain binary32 re-implementations of each kernel. Hardware float arithmetic
// rounds to nearest even after every operation, which is exactly what the
// all-binary32 configuration must reproduce.
std::vector<double> float_jacobi(const KernelInput& in) {
  const std::size_t n = in.dims[0];
  std::vector<float> g(in.payload.begin(), in.payload.end()), nx = g;
  for (std::uint64_t it = 0; it < in.dims[1]; ++it) {
    for (std::size_t i = 1; i + 1 < n; ++i)
      for (std::size_t j = 1; j + 1 < n; ++j) {
        float s = g[(i - 1) * n + j] + g[(i + 1) * n + j];
        s = s + g[i * n + j - 1];
        s = s + g[i * n + j + 1];
        nx[i * n + j] = s * 0.25f;
      }
    for (std::size_t i = 1; i + 1 < n; ++i)
      for (std::size_t j = 1; j + 1 < n; ++j) g[i * n + j] = nx[i * n + j];
  }
  return {g.begin(), g.end()};
}

std::pair<std::vector<double>, std::vector<std::int64_t>> float_knn(const KernelInput& in) {
  const std::size_t n = in.dims[0], d = in.dims[1], q = in.dims[2], k = in.dims[3];
  std::vector<double> vals;
  std::vector<std::int64_t> labels;
  for (std::size_t qi = 0; qi < q; ++qi) {
    std::vector<float> dist(n);
    for (std::size_t i = 0; i < n; ++i) {
      float acc = 0;
      for (std::size_t j = 0; j < d; ++j) {
        const float df = static_cast<float>(in.payload[i * d + j]) -
                         static_cast<float>(in.payload[n * d + qi * d + j]);
        acc = acc + df * df;
      }
      dist[i] = std::sqrt(acc);
    }
    std::vector<bool> taken(n);
    for (std::size_t r = 0; r < k; ++r) {
      std::size_t best = n;
      for (std::size_t i = 0; i < n; ++i) {
        if (!taken[i] && (best == n || dist[i] < dist[best])) best = i;
      }
      taken[best] = true;
      vals.push_back(dist[best]);
      labels.push_back(static_cast<std::int64_t>(best));
    }
  }
  return {vals, labels};
}

std::vector<double> float_pca(const KernelInput& in) {
  const std::size_t n = in.dims[0], d = in.dims[1], c = in.dims[2], iters = in.dims[3];
  std::vector<float> x(in.payload.begin(), in.payload.end());
  std::vector<float> mean(d), cen(n * d), cov(d * d);
  for (std::size_t j = 0; j < d; ++j) {
    float a = 0;
    for (std::size_t i = 0; i < n; ++i) a += x[i * d + j];
    mean[j] = a / static_cast<float>(n);
  }
  for (std::size_t i = 0; i < n * d; ++i) cen[i] = x[i] - mean[i % d];
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = a; b < d; ++b) {
      float s = 0;
      for (std::size_t i = 0; i < n; ++i) s += cen[i * d + a] * cen[i * d + b];
      cov[a * d + b] = cov[b * d + a] = s / static_cast<float>(n - 1);
    }
  std::vector<double> eig, comps;
  for (std::size_t comp = 0; comp < c; ++comp) {
    std::vector<float> v(d, 1.0f), t(d);
    auto mv = [&] {
      for (std::size_t r = 0; r < d; ++r) {
        float s = 0;
        for (std::size_t k = 0; k < d; ++k) s += cov[r * d + k] * v[k];
        t[r] = s;
      }
    };
    for (std::size_t it = 0; it < iters; ++it) {
      mv();
      float sq = 0;
      for (float ti : t) sq += ti * ti;
      const float nr = std::sqrt(sq);
      for (std::size_t j = 0; j < d; ++j) v[j] = t[j] / nr;
    }
    mv();
    float lam = 0;
    for (std::size_t j = 0; j < d; ++j) lam += v[j] * t[j];
    eig.push_back(lam);
    float tot = 0;
    for (float vj : v) tot += vj;
    for (float vj : v) comps.push_back(tot < 0 ? -vj : vj);
    if (comp + 1 < c) {
      for (std::size_t a = 0; a < d; ++a) {
        const float sc = lam * v[a];
        for (std::size_t b = 0; b < d; ++b) cov[a * d + b] = cov[a * d + b] - sc * v[b];
      }
    }
  }
  eig.insert(eig.end(), comps.begin(), comps.end());
  return eig;
}

std::vector<double> float_dwt(const KernelInput& in) {
  const std::size_t n = in.dims[0];
  const float h = static_cast<float>(std::numbers::sqrt2 / 2);
  std::vector<double> ap, de;
  for (std::size_t i = 0; i < n / 2; ++i) {
    const float a = static_cast<float>(in.payload[2 * i]), b = static_cast<float>(in.payload[2 * i + 1]);
    ap.push_back((a + b) * h);
    de.push_back((a - b) * h);
  }
  ap.insert(ap.end(), de.begin(), de.end());
  return ap;
}

std::vector<double> float_svm(const KernelInput& in) {
  const std::size_t m = in.dims[0], d = in.dims[1], nsv = in.dims[2];
  const auto& p = in.payload;
  const std::size_t coef = nsv * d, bias = coef + nsv, samples = bias + 1;
  std::vector<double> out;
  for (std::size_t i = 0; i < m; ++i) {
    float acc = static_cast<float>(p[bias]);
    for (std::size_t s = 0; s < nsv; ++s) {
      float dot = 0;
      for (std::size_t j = 0; j < d; ++j)
        dot += static_cast<float>(p[s * d + j]) * static_cast<float>(p[samples + i * d + j]);
      acc += static_cast<float>(p[coef + s]) * dot;
    }
    out.push_back(acc);
  }
  return out;
}

std::vector<double> float_conv(const KernelInput& in) {
  const long n = static_cast<long>(in.dims[0]);
  std::vector<double> out;
  for (long y = 0; y < n; ++y)
    for (long x = 0; x < n; ++x) {
      float acc = 0;
      for (long ky = 0; ky < 5; ++ky)
        for (long kx = 0; kx < 5; ++kx) {
          const long yy = y + ky - 2, xx = x + kx - 2;
          const float px = (yy < 0 || yy >= n || xx < 0 || xx >= n)
                               ? 0.0f
                               : static_cast<float>(in.payload[static_cast<std::size_t>(yy * n + xx)]);
          acc += px * static_cast<float>(in.payload[static_cast<std::size_t>(n * n + ky * 5 + kx)]);
        }
      out.push_back(acc);
    }
  return out;
}

std::vector<double> float_reference(const KernelInput& in) {
  if (in.kernel == "JACOBI") return float_jacobi(in);
  if (in.kernel == "KNN") return float_knn(in).first;
  if (in.kernel == "PCA") return float_pca(in);
  if (in.kernel == "DWT") return float_dwt(in);
  if (in.kernel == "SVM") return float_svm(in);
  return float_conv(in);
}

std::uint64_t arithmetic_ops(const StatsReport& r) {
  return r.total_if([](const EventKey& k) { return is_arithmetic(k.kind); });
}

const FloatFormat kPalette[] = {formats::binary8, formats::binary16, formats::binary16alt,
                                formats::binary32, make_format(6, 9)};

KernelConfig random_config(const KernelSpec& spec, std::mt19937_64& rng) {
  std::map<std::string, FloatFormat> m;
  for (const auto& v : spec.variables) m.emplace(v.name, kPalette[rng() % std::size(kPalette)]);
  return KernelConfig::from_map(spec, m);
}

std::filesystem::path golden(const std::string& name) {
  return std::filesystem::path(FLEXFP_GOLDEN_DIR) / name;
}

std::vector<double> read_values(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::vector<double> v;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) v.push_back(parse_number(line));
  }
  return v;
}

}  // namespace

TEST(KernelsTest, RegistryListsSixKernels) {
  const auto specs = list_kernels();
  ASSERT_EQ(specs.size(), 6u);
  const char* names[] = {"JACOBI", "KNN", "PCA", "DWT", "SVM", "CONV"};
  for (std::size_t i = 0; i < 6; ++i) EXPECT_EQ(specs[i].name, names[i]);

  const Kernel& conv = find_kernel("conv");
  const KernelInput in = conv.generate_input(1, 8);
  EXPECT_EQ(in.payload.size(), 8u * 8u + 25u);  // image then the 5×5 filter
  EXPECT_NO_THROW(conv.spec().index_of("weights"));
  EXPECT_EQ(find_kernel("KNN").spec().variables[find_kernel("KNN").spec().index_of("acc")].shape,
            VarShape::Scalar);

  try {
    find_kernel("FFT");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnknownKernel);
  }
}

TEST(KernelsTest, InputGenerationIsDeterministicAndBounded) {
  for (const auto& k : kernel_registry()) {
    const KernelSpec& s = k->spec();
    EXPECT_EQ(generate_input(s.name, 5), generate_input(s.name, 5)) << s.name;
    EXPECT_NE(generate_input(s.name, 5).payload, generate_input(s.name, 6).payload) << s.name;
    try {
      k->generate_input(1, s.max_size + 1);
      ADD_FAILURE() << s.name;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::OutOfRange);
    }
    EXPECT_THROW(k->generate_input(1, s.min_size - 1), Error) << s.name;
  }

  const KernelInput in = generate_input("JACOBI", 42, 16);
  ASSERT_EQ(in.payload.size(), 256u);
  for (std::size_t i = 0; i < 16; ++i) {
    for (std::size_t j = 0; j < 16; ++j) {
      const double v = in.payload[i * 16 + j];
      if (i == 0) {
        EXPECT_EQ(v, 1.0);
      } else if (i == 15 || j == 0 || j == 15) {
        EXPECT_EQ(v, 0.0);
      } else {
        EXPECT_GE(v, 0.0);
        EXPECT_LT(v, 1.0);
      }
    }
  }
}

TEST(KernelsTest, Binary32MatchesHardwareFloat) {
  for (const auto& k : kernel_registry()) {
    for (std::uint64_t seed : {1u, 42u, 977u}) {
      const KernelInput in = generate_input(k->spec().name, seed);
      const KernelOutput out = reference_output(*k, in);
      const std::vector<double> expect = float_reference(in);
      ASSERT_EQ(out.values.size(), expect.size()) << k->spec().name;
      for (std::size_t i = 0; i < expect.size(); ++i) {
        ASSERT_EQ(out.values[i], expect[i]) << k->spec().name << " seed " << seed << " at " << i;
      }
      for (double v : out.values) EXPECT_TRUE(std::isfinite(v)) << k->spec().name;
    }
  }
  const KernelInput in = generate_input("KNN", 3, 100);
  StatsContext ctx;
  EXPECT_EQ(reference_output(find_kernel("KNN"), in).labels, float_knn(in).second);
}

TEST(KernelsTest, OutputShapeIndependentOfConfig) {
  std::mt19937_64 rng(11);
  for (const auto& k : kernel_registry()) {
    const KernelInput in = generate_input(k->spec().name, 3);
    for (int trial = 0; trial < 4; ++trial) {
      StatsContext ctx;
      const KernelOutput out = run_kernel(*k, random_config(k->spec(), rng), in, ctx);
      EXPECT_EQ(out.values.size(), k->output_length(in)) << k->spec().name;
    }
  }
}

TEST(KernelsTest, ArithmeticCountConservedOnStraightLineKernels) {
  std::mt19937_64 rng(12);
  for (const char* name : {"CONV", "DWT", "SVM"}) {
    const Kernel& k = find_kernel(name);
    const KernelInput in = generate_input(name, 4);
    StatsContext base_ctx;
    run_kernel(k, KernelConfig::uniform(k.spec(), formats::binary32), in, base_ctx);
    const std::uint64_t base = arithmetic_ops(base_ctx.report());
    EXPECT_EQ(base_ctx.report().total_if([](const EventKey& e) { return e.kind == OpKind::CastFp; }), 0u);
    for (int trial = 0; trial < 20; ++trial) {
      StatsContext ctx;
      run_kernel(k, random_config(k.spec(), rng), in, ctx);
      EXPECT_EQ(arithmetic_ops(ctx.report()), base) << name;
    }
  }
}

TEST(KernelsTest, ConvMultiplyCount) {
  for (std::size_t n : {5u, 9u, 16u}) {
    const Kernel& k = find_kernel("CONV");
    const KernelInput in = k.generate_input(8, n);
    StatsContext ctx;
    run_kernel(k, KernelConfig::uniform(k.spec(), formats::binary32), in, ctx);
    const StatsReport r = ctx.report();
    std::uint64_t taps = 0, inside = 0;
    for (std::size_t y = 0; y < n; ++y)
      for (std::size_t x = 0; x < n; ++x)
        for (int ky = -2; ky <= 2; ++ky)
          for (int kx = -2; kx <= 2; ++kx) {
            ++taps;
            const long yy = static_cast<long>(y) + ky, xx = static_cast<long>(x) + kx;
            if (yy >= 0 && xx >= 0 && yy < static_cast<long>(n) && xx < static_cast<long>(n)) ++inside;
          }
    EXPECT_EQ(taps, 25 * n * n);
    EXPECT_EQ(r.count(EventKey::op(OpKind::Mul, formats::binary32, RegionTag::Vectorizable)), taps);
    EXPECT_EQ(r.count(EventKey::op(OpKind::Load, formats::binary32, RegionTag::Vectorizable)),
              inside + taps);
    EXPECT_EQ(r.count(EventKey::op(OpKind::Store, formats::binary32, RegionTag::Vectorizable)), n * n);
    EXPECT_EQ(r.total_if([](const EventKey& e) { return e.region == RegionTag::Scalar; }), 0u);
  }
}

TEST(KernelsTest, JacobiZeroIterationsEchoesGrid) {
  const KernelInput in = with_iterations(generate_input("JACOBI", 42, 16), 0);
  StatsContext ctx;
  const KernelOutput out = reference_output(find_kernel("JACOBI"), in);
  EXPECT_EQ(out.values, in.payload);
  EXPECT_THROW(with_iterations(generate_input("DWT", 1), 3), Error);
}

TEST(KernelsTest, KnnExactMatchIsNearest) {
  KernelInput in = generate_input("KNN", 9, 32);
  in.dims[3] = 1;
  const std::size_t d = in.dims[1], n = in.dims[0];
  for (std::size_t qi = 0; qi < in.dims[2]; ++qi) {
    const std::size_t target = 5 * qi + 3;
    for (std::size_t j = 0; j < d; ++j) in.payload[n * d + qi * d + j] = in.payload[target * d + j];
  }
  for (FloatFormat f : {formats::binary32, formats::binary8}) {
    StatsContext ctx;
    const Kernel& k = find_kernel("KNN");
    const KernelOutput out = run_kernel(k, KernelConfig::uniform(k.spec(), f), in, ctx);
    ASSERT_EQ(out.values.size(), in.dims[2]);
    for (std::size_t qi = 0; qi < in.dims[2]; ++qi) {
      EXPECT_EQ(out.values[qi], 0.0);
      EXPECT_EQ(out.labels[qi], static_cast<std::int64_t>(5 * qi + 3));
    }
  }
}

TEST(KernelsTest, MixedFormatsRecordCasts) {
  const Kernel& k = find_kernel("DWT");
  const KernelInput in = k.generate_input(2, 16);
  StatsContext ctx;
  const KernelConfig cfg = KernelConfig::from_map(
      k.spec(), {{"signal", formats::binary32}, {"approx", formats::binary16}, {"detail", formats::binary8}});
  const KernelOutput out = run_kernel(k, cfg, in, ctx);
  const StatsReport r = ctx.report();
  // Each of the 8 pairs casts both samples to each output format.
  EXPECT_EQ(r.count(EventKey::cast(formats::binary32, formats::binary16, RegionTag::Vectorizable)), 16u);
  EXPECT_EQ(r.count(EventKey::cast(formats::binary32, formats::binary8, RegionTag::Vectorizable)), 16u);
  EXPECT_EQ(r.count(EventKey::op(OpKind::Add, formats::binary16, RegionTag::Vectorizable)), 8u);
  EXPECT_EQ(r.count(EventKey::op(OpKind::Sub, formats::binary8, RegionTag::Vectorizable)), 8u);
  EXPECT_EQ(r.count(EventKey::op(OpKind::Load, formats::binary32, RegionTag::Vectorizable)), 16u);
  for (std::size_t i = 0; i < 8; ++i) {
    EXPECT_EQ(decode(encode(formats::binary8, out.values[8 + i])), out.values[8 + i]);
  }
}

TEST(KernelsTest, ConfigBindingErrors) {
  const KernelSpec& s = find_kernel("SVM").spec();
  try {
    KernelConfig::from_map(s, {{"sv", formats::binary8}, {"coef", formats::binary8}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnboundVariable);
    EXPECT_NE(std::string(e.what()).find("bias"), std::string::npos);
  }
  const int short_list[] = {8, 8, 8};
  try {
    KernelConfig::from_precisions(s, short_list, TypeSystem::v2());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnboundVariable);
    EXPECT_NE(std::string(e.what()).find("samples"), std::string::npos);
  }
  const int p[] = {3, 8, 11, 24, 1, 4, 12};
  const KernelConfig tuning = KernelConfig::from_precisions(s, p, TypeSystem::v2());
  const KernelConfig storage = KernelConfig::storage_from_precisions(s, p, TypeSystem::v2());
  EXPECT_EQ(tuning[4], make_format(5, 1));
  EXPECT_EQ(storage[4], formats::binary8);
  EXPECT_EQ(tuning[5], make_format(8, 3));
  EXPECT_EQ(storage[5], formats::binary16alt);
  EXPECT_EQ(storage[6], formats::binary32);

  StatsContext ctx;
  EXPECT_THROW(run_kernel(find_kernel("DWT"), KernelConfig::uniform(s, formats::binary32),
                          generate_input("DWT", 1), ctx),
               Error);
}

TEST(KernelsTest, InputFileRoundTrip) {
  const auto path = std::filesystem::temp_directory_path() / "flexfp_input_roundtrip.bin";
  for (const auto& k : kernel_registry()) {
    const KernelInput in = generate_input(k->spec().name, 77);
    save_input(in, path.string());
    EXPECT_EQ(load_input(path.string()), in);
  }
  {
    std::ofstream bad(path, std::ios::binary | std::ios::trunc);
    bad << "NOTMAGIC....";
  }
  try {
    load_input(path.string());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ParseError);
  }
  std::filesystem::remove(path);
  EXPECT_THROW(load_input(path.string()), Error);
}

TEST(KernelsTest, GoldenJacobi) {
  const KernelInput in = generate_input("JACOBI", 42, 16);
  EXPECT_EQ(load_input(golden("jacobi_16_seed42.bin").string()), in);
  const std::vector<double> expect = read_values(golden("jacobi_16_seed42_ref.txt"));
  ASSERT_EQ(expect.size(), 256u);
  EXPECT_EQ(reference_output(find_kernel("JACOBI"), in).values, expect);
}

TEST(KernelsTest, GoldenConv) {
  const KernelInput in = load_input(golden("conv_16_seed42.bin").string());
  EXPECT_EQ(in, generate_input("CONV", 42, 16));
  const std::vector<double> expect = read_values(golden("conv_16_seed42_ref.txt"));
  ASSERT_EQ(expect.size(), 256u);
  EXPECT_EQ(reference_output(find_kernel("CONV"), in).values, expect);
}

TEST(KernelsTest, RegionsDoNotNest) {
  StatsContext ctx;
  const KernelConfig cfg = KernelConfig::uniform(find_kernel("DWT").spec(), formats::binary32);
  Engine e(cfg, ctx);
  auto outer = e.vector_region();
  EXPECT_THROW(e.vector_region(), Error);
}
