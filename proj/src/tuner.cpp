#include "flexfp/tuner.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>

namespace flexfp {

double error_metric(std::span<const double> ref, std::span<const double> test) {
  if (ref.size() != test.size()) {
    throw Error(ErrorCode::LengthMismatch, "reference has " + std::to_string(ref.size()) +
                                               " values, test has " + std::to_string(test.size()));
  }
  constexpr double inf = std::numeric_limits<double>::infinity();
  double noise = 0, signal = 0;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    if (!std::isfinite(test[i])) {
      if (std::isfinite(ref[i]) || !(test[i] == ref[i])) return inf;
      continue;
    }
    if (!std::isfinite(ref[i])) return inf;
    const double e = ref[i] - test[i];
    noise += e * e;
    signal += ref[i] * ref[i];
  }
  if (noise == 0) return 0;
  if (signal == 0) return inf;
  return noise / signal;
}

void check_threshold(double t) {
  if (!(t > 0)) throw Error(ErrorCode::OutOfRange, "threshold must be positive");
}

Evaluator::Evaluator(const Kernel& kernel, KernelInput input, const TypeSystem& ts)
    : kernel_(kernel), input_(std::move(input)), ts_(ts), reference_(reference_output(kernel, input_)) {}

double Evaluator::metric(const PrecisionAssignment& p) {
  if (const auto it = cache_.find(p); it != cache_.end()) return it->second;
  StatsContext ctx;
  const KernelOutput out =
      run_kernel(kernel_, KernelConfig::from_precisions(kernel_.spec(), p, ts_), input_, ctx);
  ++runs_;
  const double m = error_metric(reference_, out);
  cache_.emplace(p, m);
  return m;
}

PrecisionAssignment tune_single_input(Evaluator& eval, double t) {
  check_threshold(t);
  PrecisionAssignment p(find_kernel(eval.input().kernel).spec().group_count(), kMaxPrecision);
  if (!(eval.metric(p) <= t)) {
    throw Error(ErrorCode::Infeasible, eval.input().kernel + " fails the threshold at full precision");
  }

  for (std::size_t g = 0; g < p.size(); ++g) {
    int lo = kMinPrecision, hi = p[g];
    while (lo < hi) {
      const int mid = lo + (hi - lo) / 2;
      PrecisionAssignment c = p;
      c[g] = mid;
      if (eval.metric(c) <= t) {
        hi = mid;
      } else {
        lo = mid + 1;
      }
    }
    p[g] = hi;
  }

  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t g = 0; g < p.size(); ++g) {
      while (p[g] > kMinPrecision) {
        PrecisionAssignment c = p;
        --c[g];
        if (!(eval.metric(c) <= t)) break;
        p = std::move(c);
        changed = true;
      }
    }
  }
  return p;
}

PrecisionAssignment tune_single_input(const Kernel& kernel, const KernelInput& input, double t,
                                      const TypeSystem& ts) {
  Evaluator eval(kernel, input, ts);
  return tune_single_input(eval, t);
}

PrecisionAssignment max_join(std::span<const PrecisionAssignment> assignments) {
  if (assignments.empty()) throw Error(ErrorCode::OutOfRange, "nothing to join");
  PrecisionAssignment out = assignments.front();
  for (const auto& a : assignments) {
    if (a.size() != out.size()) throw Error(ErrorCode::LengthMismatch, "assignments differ in length");
    for (std::size_t g = 0; g < a.size(); ++g) out[g] = std::max(out[g], a[g]);
  }
  return out;
}

namespace {

double worst(std::span<Evaluator> evals, const PrecisionAssignment& p) {
  double w = 0;
  for (Evaluator& e : evals) {
    const double m = e.metric(p);
    if (std::isnan(m)) return std::numeric_limits<double>::infinity();
    w = std::max(w, m);
  }
  return w;
}

}  // namespace

PrecisionAssignment refine_across_inputs(std::span<Evaluator> evals,
                                         std::span<const PrecisionAssignment> assignments, double t) {
  check_threshold(t);
  if (evals.empty()) throw Error(ErrorCode::OutOfRange, "no input sets");
  PrecisionAssignment p = max_join(assignments);
  while (!(worst(evals, p) <= t)) {
    std::size_t best = p.size();
    double best_metric = std::numeric_limits<double>::infinity();
    for (std::size_t g = 0; g < p.size(); ++g) {
      if (p[g] >= kMaxPrecision) continue;
      PrecisionAssignment c = p;
      ++c[g];
      const double m = worst(evals, c);
      if (best == p.size() || m < best_metric) {
        best = g;
        best_metric = m;
      }
    }
    if (best == p.size()) {
      throw Error(ErrorCode::Infeasible, "no assignment satisfies every input set");
    }
    ++p[best];
  }
  return p;
}

TuningResult tune(const Kernel& kernel, std::span<const KernelInput> inputs, double t,
                  const TypeSystem& ts) {
  check_threshold(t);
  if (inputs.empty()) throw Error(ErrorCode::OutOfRange, "no input sets");
  TuningResult r;
  r.kernel = kernel.spec().name;
  r.threshold = t;
  r.type_system = ts.name;
  std::vector<Evaluator> evals;
  evals.reserve(inputs.size());
  for (const KernelInput& in : inputs) {
    r.seeds.push_back(in.seed);
    evals.emplace_back(kernel, in, ts);
    r.per_input.push_back(tune_single_input(evals.back(), t));
  }
  r.assignment = refine_across_inputs(evals, r.per_input, t);
  for (Evaluator& e : evals) {
    r.metrics.push_back(e.metric(r.assignment));
    r.evaluations += e.runs();
  }
  return r;
}

std::vector<double> verify(const Kernel& kernel, std::span<const KernelInput> inputs,
                           const PrecisionAssignment& p, const TypeSystem& ts) {
  const KernelConfig config = KernelConfig::from_precisions(kernel.spec(), p, ts);
  std::vector<double> out;
  for (const KernelInput& in : inputs) {
    StatsContext ctx;
    out.push_back(error_metric(reference_output(kernel, in), run_kernel(kernel, config, in, ctx)));
  }
  return out;
}

std::map<NamedFormat, std::size_t> tabulate(const PrecisionAssignment& p, const TypeSystem& ts) {
  std::map<NamedFormat, std::size_t> counts;
  for (NamedFormat n : kNamedFormats) counts[n] = 0;
  for (int bits : p) ++counts[classify_precision(ts, bits)];
  return counts;
}

PrecisionAssignment parse_precision_file(std::string_view text) {
  PrecisionAssignment p;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.front()))) line.remove_prefix(1);
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.remove_suffix(1);
    if (line.empty()) continue;
    int bits = 0;
    const auto [end, ec] = std::from_chars(line.data(), line.data() + line.size(), bits);
    if (ec != std::errc{} || end != line.data() + line.size()) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": expected an integer, got '" +
                                             std::string(line) + "'");
    }
    if (bits < kMinPrecision || bits > kMaxPrecision) {
      throw Error(ErrorCode::OutOfRange, "line " + std::to_string(line_no) + ": precision " +
                                             std::to_string(bits) + " outside [1,24]");
    }
    p.push_back(bits);
  }
  return p;
}

std::string precision_file_text(const PrecisionAssignment& p) {
  std::string out;
  for (int bits : p) out += std::to_string(bits) + "\n";
  return out;
}

KvDocument tuning_report(const TuningResult& r, const KernelSpec& spec, const TypeSystem& ts) {
  KvDocument doc;
  doc.set("kind", std::string("tuning"));
  doc.set("kernel", r.kernel);
  doc.set("threshold", r.threshold);
  doc.set("type_system", r.type_system);
  std::string seeds;
  for (std::uint64_t s : r.seeds) seeds += (seeds.empty() ? "" : ",") + std::to_string(s);
  doc.set("seeds", seeds);
  doc.set("evaluations", r.evaluations);
  for (std::size_t g = 0; g < r.assignment.size(); ++g) {
    const std::string& var = spec.variables.at(g).name;
    doc.set("precision." + var, r.assignment[g]);
    doc.set("format." + var, format_token(map_precision(ts, r.assignment[g])));
    doc.set("type." + var, std::string(to_string(classify_precision(ts, r.assignment[g]))));
  }
  for (std::size_t i = 0; i < r.per_input.size(); ++i) {
    std::string row;
    for (int bits : r.per_input[i]) row += (row.empty() ? "" : ",") + std::to_string(bits);
    doc.set("input." + std::to_string(r.seeds[i]) + ".precisions", row);
    doc.set("input." + std::to_string(r.seeds[i]) + ".metric", r.metrics[i]);
  }
  for (const auto& [n, count] : tabulate(r.assignment, ts)) {
    doc.set("variables." + std::string(to_string(n)), static_cast<std::uint64_t>(count));
  }
  return doc;
}

}  // namespace flexfp
