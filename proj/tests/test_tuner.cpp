#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "flexfp/tuner.hpp"
#include "oracle/rational_oracle.hpp"

using namespace flexfp;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Straightforward long-double evaluation of the relative noise power.
double noise_ratio(const std::vector<double>& ref, const std::vector<double>& test) {
  long double noise = 0, signal = 0;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    if (!std::isfinite(test[i])) return kInf;
    noise += (static_cast<long double>(ref[i]) - test[i]) * (static_cast<long double>(ref[i]) - test[i]);
    signal += static_cast<long double>(ref[i]) * ref[i];
  }
  return noise == 0 ? 0.0 : static_cast<double>(noise / signal);
}

double fresh_metric(const Kernel& k, const KernelInput& in, const PrecisionAssignment& p,
                    const TypeSystem& ts) {
  StatsContext ctx;
  const KernelOutput out = run_kernel(k, KernelConfig::from_precisions(k.spec(), p, ts), in, ctx);
  return noise_ratio(reference_output(k, in).values, out.values);
}

void expect_sound_and_minimal(const Kernel& k, const KernelInput& in, const PrecisionAssignment& p,
                              double t, const TypeSystem& ts) {
  EXPECT_LE(fresh_metric(k, in, p, ts), t) << k.spec().name;
  for (std::size_t g = 0; g < p.size(); ++g) {
    if (p[g] == kMinPrecision) continue;
    PrecisionAssignment lower = p;
    --lower[g];
    EXPECT_GT(fresh_metric(k, in, lower, ts), t) << k.spec().name << " group " << g;
  }
}

}  // namespace

TEST(TunerTest, ErrorMetricExamples) {
  const std::vector<double> ref{1, 0, 0, 0};
  EXPECT_EQ(error_metric(ref, ref), 0.0);
  std::vector<double> test = ref;
  test[0] = 1.1;
  EXPECT_NEAR(error_metric(ref, test), 0.01, 1e-15);
  test[2] = std::numeric_limits<double>::quiet_NaN();
  EXPECT_EQ(error_metric(ref, test), kInf);
  test[2] = kInf;
  EXPECT_EQ(error_metric(ref, test), kInf);
  const std::vector<double> zeros{0, 0};
  EXPECT_EQ(error_metric(zeros, zeros), 0.0);
  EXPECT_EQ(error_metric(zeros, std::vector<double>{0, 1e-30}), kInf);
  try {
    error_metric(ref, zeros);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::LengthMismatch);
  }
}

TEST(TunerTest, ErrorMetricMatchesLongDouble) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> r(1 + rng() % 50), t;
    for (double& x : r) x = u(rng);
    for (double x : r) t.push_back(x * (1 + 1e-3 * u(rng)));
    const double m = error_metric(r, t);
    EXPECT_NEAR(m, noise_ratio(r, t), 1e-12 * noise_ratio(r, t));
    EXPECT_GE(m, 0.0);
  }
}

// All-binary16alt JACOBI redone with the rational oracle, one rounding per
// operation, then compared against the engine and the frozen metric.
TEST(TunerTest, JacobiBinary16altMetric) {
  const KernelInput in = generate_input("JACOBI", 42, 16);
  const oracle::RationalOracle o(formats::binary16alt);
  const std::size_t n = 16;
  std::vector<FlexNum> g;
  for (double x : in.payload) g.push_back(o.encode(x));
  std::vector<FlexNum> nx = g;
  const FlexNum quarter = o.encode(0.25);
  for (int it = 0; it < 50; ++it) {
    for (std::size_t i = 1; i + 1 < n; ++i)
      for (std::size_t j = 1; j + 1 < n; ++j) {
        FlexNum s = o.add(g[(i - 1) * n + j], g[(i + 1) * n + j]);
        s = o.add(s, g[i * n + j - 1]);
        s = o.add(s, g[i * n + j + 1]);
        nx[i * n + j] = o.mul(s, quarter);
      }
    for (std::size_t i = 1; i + 1 < n; ++i)
      for (std::size_t j = 1; j + 1 < n; ++j) g[i * n + j] = nx[i * n + j];
  }
  std::vector<double> expect;
  for (const FlexNum& x : g) expect.push_back(mpq_class(oracle::exact_value(x)).get_d());

  const Kernel& k = find_kernel("JACOBI");
  StatsContext ctx;
  const KernelOutput out = run_kernel(k, KernelConfig::uniform(k.spec(), formats::binary16alt), in, ctx);
  EXPECT_EQ(out.values, expect);

  const std::vector<double> ref = reference_output(k, in).values;
  const double m = error_metric(ref, out.values);
  EXPECT_NEAR(m, noise_ratio(ref, expect), 1e-12 * m);
  EXPECT_NEAR(m, 8.865819402696764e-06, 1e-18);
}

TEST(TunerTest, ExtremeThresholds) {
  const TypeSystem ts = TypeSystem::v2();
  for (const auto& k : kernel_registry()) {
    const KernelInput in = generate_input(k->spec().name, 42);
    const PrecisionAssignment loose = tune_single_input(*k, in, 1e300, ts);
    EXPECT_EQ(loose, PrecisionAssignment(k->spec().group_count(), 1)) << k->spec().name;
  }
  // Only the exact binary32 output passes; PCA is left out because its
  // covariance absorbs small perturbations of the mean exactly.
  for (const char* name : {"JACOBI", "KNN", "DWT", "SVM", "CONV"}) {
    const Kernel& k = find_kernel(name);
    const PrecisionAssignment tight = tune_single_input(k, generate_input(name, 42), 1e-300, ts);
    EXPECT_EQ(tight, PrecisionAssignment(k.spec().group_count(), 24)) << name;
  }
  EXPECT_THROW(tune_single_input(find_kernel("DWT"), generate_input("DWT", 1), 0.0, ts), Error);
}

TEST(TunerTest, ConvFrozenAssignment) {
  const TypeSystem ts = TypeSystem::v2();
  const Kernel& k = find_kernel("CONV");
  const KernelInput in = generate_input("CONV", 42);
  const PrecisionAssignment p = tune_single_input(k, in, 1e-2, ts);
  EXPECT_EQ(p, (PrecisionAssignment{1, 1, 6, 4}));

  // Exhaustive descent: lower each group one bit at a time from 24 while the
  // threshold holds, repeating until stable.
  PrecisionAssignment d(4, 24);
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t g = 0; g < d.size(); ++g) {
      while (d[g] > 1) {
        PrecisionAssignment c = d;
        --c[g];
        if (!(fresh_metric(k, in, c, ts) <= 1e-2)) break;
        d = c;
        changed = true;
      }
    }
  }
  EXPECT_EQ(d, p);
  expect_sound_and_minimal(k, in, p, 1e-2, ts);
}

TEST(TunerTest, SingleInputSoundAndMinimal) {
  const TypeSystem ts = TypeSystem::v1();
  for (const auto& k : kernel_registry()) {
    for (double t : {1e-1, 1e-3}) {
      const KernelInput in = generate_input(k->spec().name, 7);
      const PrecisionAssignment p = tune_single_input(*k, in, t, ts);
      ASSERT_EQ(p.size(), k->spec().group_count());
      expect_sound_and_minimal(*k, in, p, t, ts);
    }
  }
}

TEST(TunerTest, MaxJoinAndRefine) {
  EXPECT_EQ(max_join(std::vector<PrecisionAssignment>{{3, 8}, {5, 4}}), (PrecisionAssignment{5, 8}));
  EXPECT_THROW(max_join(std::vector<PrecisionAssignment>{}), Error);
  EXPECT_THROW(max_join(std::vector<PrecisionAssignment>{{3}, {5, 4}}), Error);

  const TypeSystem ts = TypeSystem::v2();
  const Kernel& k = find_kernel("DWT");
  std::vector<Evaluator> one;
  one.emplace_back(k, generate_input("DWT", 3), ts);
  const PrecisionAssignment p = tune_single_input(one[0], 1e-2);
  EXPECT_EQ(refine_across_inputs(one, std::vector<PrecisionAssignment>{p}, 1e-2), p);

  // A too-low start is repaired upward until it passes.
  const PrecisionAssignment repaired =
      refine_across_inputs(one, std::vector<PrecisionAssignment>{{1, 1, 1}}, 1e-3);
  EXPECT_LE(one[0].metric(repaired), 1e-3);
  for (int bits : repaired) EXPECT_GE(bits, 1);
}

TEST(TunerTest, KnnJointAssignment) {
  const TypeSystem ts = TypeSystem::v2();
  const Kernel& k = find_kernel("KNN");
  const std::vector<KernelInput> inputs{generate_input("KNN", 1), generate_input("KNN", 2),
                                        generate_input("KNN", 3)};
  const TuningResult r = tune(k, inputs, 1e-1, ts);
  EXPECT_EQ(r.assignment, (PrecisionAssignment{1, 1, 1, 1, 1, 1}));
  ASSERT_EQ(r.per_input.size(), 3u);
  const PrecisionAssignment joined = max_join(r.per_input);
  for (std::size_t g = 0; g < joined.size(); ++g) EXPECT_GE(r.assignment[g], joined[g]);
  const std::vector<double> again = verify(k, inputs, r.assignment, ts);
  EXPECT_EQ(again, r.metrics);
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    EXPECT_LE(again[i], 1e-1);
    EXPECT_EQ(fresh_metric(k, inputs[i], r.assignment, ts), again[i]);
  }
  EXPECT_GT(r.evaluations, 0u);

  const TuningResult tighter = tune(k, inputs, 1e-3, ts);
  for (double m : verify(k, inputs, tighter.assignment, ts)) EXPECT_LE(m, 1e-3);
  EXPECT_EQ(tune(k, inputs, 1e-3, ts).assignment, tighter.assignment);
}

TEST(TunerTest, Tabulate) {
  const TypeSystem v2 = TypeSystem::v2();
  auto t = tabulate({3, 3, 3}, v2);
  EXPECT_EQ(t[NamedFormat::binary8], 3u);
  EXPECT_EQ(t[NamedFormat::binary32], 0u);
  t = tabulate({3, 8, 11, 12}, v2);
  for (NamedFormat n : kNamedFormats) EXPECT_EQ(t[n], 1u) << to_string(n);
  t = tabulate({3, 8, 11, 12}, TypeSystem::v1());
  EXPECT_EQ(t[NamedFormat::binary16], 2u);
  EXPECT_EQ(t[NamedFormat::binary16alt], 0u);
}

TEST(TunerTest, PrecisionFile) {
  const PrecisionAssignment p{1, 24, 7};
  EXPECT_EQ(precision_file_text(p), "1\n24\n7\n");
  EXPECT_EQ(parse_precision_file(precision_file_text(p)), p);
  EXPECT_EQ(parse_precision_file("# tuned\n 5 \n\n6 # acc\n"), (PrecisionAssignment{5, 6}));
  try {
    parse_precision_file("5\nfive\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ParseError);
  }
  try {
    parse_precision_file("25\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::OutOfRange);
  }
  EXPECT_THROW(parse_precision_file("0\n"), Error);
}

TEST(TunerTest, ReportCarriesAssignment) {
  const TypeSystem ts = TypeSystem::v2();
  const Kernel& k = find_kernel("SVM");
  const std::vector<KernelInput> inputs{generate_input("SVM", 42)};
  const TuningResult r = tune(k, inputs, 1e-2, ts);
  const KvDocument doc = KvDocument::parse_report(tuning_report(r, k.spec(), ts).to_report_text());
  EXPECT_EQ(doc.require("kernel"), "SVM");
  EXPECT_EQ(doc.require_number("threshold"), 1e-2);
  for (std::size_t g = 0; g < r.assignment.size(); ++g) {
    const std::string& var = k.spec().variables[g].name;
    EXPECT_EQ(doc.require_number("precision." + var), r.assignment[g]);
    EXPECT_EQ(parse_format_token(doc.require("format." + var)), map_precision(ts, r.assignment[g]));
  }
  EXPECT_EQ(doc.require_number("input.42.metric"), r.metrics[0]);
  double total = 0;
  for (NamedFormat n : kNamedFormats) total += doc.require_number("variables." + std::string(to_string(n)));
  EXPECT_EQ(total, 7.0);
}

TEST(TunerTest, FullPrecisionBeatsMinimumEverywhere) {
  const TypeSystem ts = TypeSystem::v2();
  for (const auto& k : kernel_registry()) {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
      const KernelInput in = generate_input(k->spec().name, seed);
      Evaluator e(*k, in, ts);
      const std::size_t g = k->spec().group_count();
      EXPECT_EQ(e.metric(PrecisionAssignment(g, 24)), 0.0);
      EXPECT_LE(e.metric(PrecisionAssignment(g, 24)), e.metric(PrecisionAssignment(g, 1)));
    }
  }
}
