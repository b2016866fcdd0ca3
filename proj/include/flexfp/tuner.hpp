#pragma once

// Per-variable precision minimisation against an output-quality threshold.

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "flexfp/kernels.hpp"
#include "flexfp/kvtext.hpp"

namespace flexfp {

/// Precision bits per variable group, in declaration order.
using PrecisionAssignment = std::vector<int>;

/// Relative noise power sum((r - t)^2) / sum(r^2). +inf when the test output
/// is non-finite where the reference is finite. LengthMismatch on unequal sizes.
double error_metric(std::span<const double> ref, std::span<const double> test);
inline double error_metric(const KernelOutput& ref, const KernelOutput& test) {
  return error_metric(ref.values, test.values);
}

/// OutOfRange unless t > 0.
void check_threshold(double t);

/// Runs one kernel input under candidate assignments, against the binary32
/// reference. Results are memoised per assignment.
class Evaluator {
 public:
  Evaluator(const Kernel& kernel, KernelInput input, const TypeSystem& ts);

  double metric(const PrecisionAssignment& p);
  const KernelInput& input() const { return input_; }
  const KernelOutput& reference() const { return reference_; }
  /// Kernel runs actually performed (cache misses).
  std::uint64_t runs() const { return runs_; }

 private:
  const Kernel& kernel_;
  KernelInput input_;
  const TypeSystem& ts_;
  KernelOutput reference_;
  std::map<PrecisionAssignment, double> cache_;
  std::uint64_t runs_ = 0;
};

/// Binary search per group (declaration order) from 24 down, then repeated
/// single-step decrements until no group can drop without failing.
/// Infeasible if even all-24 fails.
PrecisionAssignment tune_single_input(Evaluator& eval, double t);
PrecisionAssignment tune_single_input(const Kernel& kernel, const KernelInput& input, double t,
                                      const TypeSystem& ts);

/// Pointwise maximum.
PrecisionAssignment max_join(std::span<const PrecisionAssignment> assignments);

/// Starts from max_join, then increments one group at a time until every
/// input passes. The group chosen is the one whose increment gives the lowest
/// worst-case metric; ties go to the earlier group.
PrecisionAssignment refine_across_inputs(std::span<Evaluator> evals,
                                         std::span<const PrecisionAssignment> assignments, double t);

struct TuningResult {
  std::string kernel;
  double threshold = 0;
  std::string type_system;
  std::vector<std::uint64_t> seeds;
  PrecisionAssignment assignment;
  std::vector<PrecisionAssignment> per_input;
  std::vector<double> metrics;  // achieved by `assignment`, per input
  std::uint64_t evaluations = 0;
};

TuningResult tune(const Kernel& kernel, std::span<const KernelInput> inputs, double t,
                  const TypeSystem& ts);

/// Fresh runs, no memoisation: the metric of `p` on each input.
std::vector<double> verify(const Kernel& kernel, std::span<const KernelInput> inputs,
                           const PrecisionAssignment& p, const TypeSystem& ts);

std::map<NamedFormat, std::size_t> tabulate(const PrecisionAssignment& p, const TypeSystem& ts);

/// One integer per line. Blank lines and '#' comments are skipped.
PrecisionAssignment parse_precision_file(std::string_view text);
std::string precision_file_text(const PrecisionAssignment& p);

KvDocument tuning_report(const TuningResult& r, const KernelSpec& spec, const TypeSystem& ts);

}  // namespace flexfp
