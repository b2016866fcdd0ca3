#include "flexfp/cli.hpp"

#include <CLI11.hpp>

#include <iomanip>
#include <ostream>

#include "flexfp/costmodel.hpp"
#include "flexfp/tuner.hpp"

namespace flexfp::cli {
namespace {

constexpr std::uint64_t kDefaultSeed = 42;

std::string_view to_string(Mapping m) { return m == Mapping::Exact ? "exact" : "storage"; }

KernelInput resolve_input(const RunManifest& m) {
  KernelInput in;
  if (m.input) {
    in = load_input(*m.input);
    if (!m.kernel.empty() && find_kernel(m.kernel).spec().name != in.kernel) {
      throw Error(ErrorCode::UnknownKernel, "input file holds a " + in.kernel + " input, not " + m.kernel);
    }
  } else {
    if (m.kernel.empty()) throw Error(ErrorCode::UnknownKernel, "--kernel or --input is required");
    if (m.seeds.size() > 1) throw Error(ErrorCode::OutOfRange, "this command takes a single --seed");
    const std::uint64_t seed = m.seeds.empty() ? kDefaultSeed : m.seeds.front();
    in = m.size ? generate_input(m.kernel, seed, *m.size) : generate_input(m.kernel, seed);
  }
  if (m.iterations) in = with_iterations(in, *m.iterations);
  return in;
}

std::vector<KernelInput> resolve_inputs(const RunManifest& m) {
  if (m.input || m.seeds.size() <= 1) return {resolve_input(m)};
  std::vector<KernelInput> out;
  for (std::uint64_t seed : m.seeds) {
    RunManifest one = m;
    one.seeds = {seed};
    out.push_back(resolve_input(one));
  }
  return out;
}

KernelConfig resolve_config(const RunManifest& m, const KernelSpec& spec, Mapping fallback) {
  if (m.precision_file && m.format) {
    throw Error(ErrorCode::OutOfRange, "--precision-file and --format are mutually exclusive");
  }
  if (m.precision_file) {
    const TypeSystem ts = TypeSystem::from_spec(m.type_system);
    const PrecisionAssignment p = parse_precision_file(read_text_file(*m.precision_file));
    return m.mapping.value_or(fallback) == Mapping::Exact
               ? KernelConfig::from_precisions(spec, p, ts)
               : KernelConfig::storage_from_precisions(spec, p, ts);
  }
  return KernelConfig::uniform(spec, m.format ? parse_format_token(*m.format) : formats::binary32);
}

void describe_input(KvDocument& doc, const KernelInput& in) {
  doc.set("kernel", in.kernel);
  doc.set("seed", in.seed);
  doc.set("size", in.dims.front());
  if (in.kernel == "JACOBI") doc.set("iterations", in.dims.at(1));
}

void describe_config(KvDocument& doc, const KernelSpec& spec, const KernelConfig& cfg) {
  for (std::size_t g = 0; g < spec.group_count(); ++g) {
    doc.set("format." + spec.variables[g].name, format_token(cfg[g]));
  }
}

void emit(const KvDocument& doc, const std::optional<std::string>& path, std::ostream& out) {
  if (path) {
    write_text_file(*path, doc.to_report_text());
  } else {
    out << doc.to_report_text();
  }
}

StatsReport collect_stats(const RunManifest& m, KvDocument& doc) {
  const KernelInput in = resolve_input(m);
  const Kernel& k = find_kernel(in.kernel);
  const KernelConfig cfg = resolve_config(m, k.spec(), Mapping::Storage);
  StatsContext ctx;
  run_kernel(k, cfg, in, ctx);
  describe_input(doc, in);
  doc.set("mapping", std::string(to_string(m.mapping.value_or(Mapping::Storage))));
  describe_config(doc, k.spec(), cfg);
  return ctx.report();
}

template <class F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const Error& e) {
    err << "flexfp: " << e.what() << "\n";
  } catch (const std::exception& e) {
    err << "flexfp: " << e.what() << "\n";
  }
  return kExitFailure;
}

}  // namespace

int cmd_run(const RunManifest& m, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const KernelInput in = resolve_input(m);
    const Kernel& k = find_kernel(in.kernel);
    const KernelConfig cfg = resolve_config(m, k.spec(), Mapping::Exact);
    StatsContext ctx;
    const KernelOutput result = run_kernel(k, cfg, in, ctx);
    for (double v : result.values) out << format_number(v) << "\n";

    if (m.stats) {
      KvDocument doc;
      doc.set("kind", std::string("stats"));
      describe_input(doc, in);
      doc.set("mapping", std::string(to_string(m.mapping.value_or(Mapping::Exact))));
      describe_config(doc, k.spec(), cfg);
      ctx.report().write_to(doc);
      write_text_file(*m.stats, doc.to_report_text());
    }
    if (m.report) {
      KvDocument doc;
      doc.set("kind", std::string("run"));
      describe_input(doc, in);
      describe_config(doc, k.spec(), cfg);
      doc.set("outputs", static_cast<std::uint64_t>(result.values.size()));
      doc.set("metric", error_metric(reference_output(k, in), result));
      if (!result.labels.empty()) {
        std::string labels;
        for (std::int64_t l : result.labels) labels += (labels.empty() ? "" : ",") + std::to_string(l);
        doc.set("labels", labels);
      }
      write_text_file(*m.report, doc.to_report_text());
    }
    return kExitOk;
  });
}

int cmd_tune(const RunManifest& m, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (!m.threshold) throw Error(ErrorCode::OutOfRange, "tune needs --threshold");
    if (m.mapping == Mapping::Storage) {
      throw Error(ErrorCode::OutOfRange, "tuning always searches the exact precision view");
    }
    const std::vector<KernelInput> inputs = resolve_inputs(m);
    const Kernel& k = find_kernel(inputs.front().kernel);
    const TypeSystem ts = TypeSystem::from_spec(m.type_system);
    const TuningResult r = tune(k, inputs, *m.threshold, ts);

    if (m.precision_file) write_text_file(*m.precision_file, precision_file_text(r.assignment));
    if (m.report) write_text_file(*m.report, tuning_report(r, k.spec(), ts).to_report_text());

    out << "kernel " << r.kernel << ", threshold " << format_number(r.threshold) << ", type system "
        << r.type_system << "\n\n";
    out << std::left << std::setw(12) << "variable" << std::setw(11) << "precision" << std::setw(9)
        << "format" << "type\n";
    for (std::size_t g = 0; g < r.assignment.size(); ++g) {
      out << std::setw(12) << k.spec().variables[g].name << std::setw(11) << r.assignment[g]
          << std::setw(9) << format_token(map_precision(ts, r.assignment[g]))
          << to_string(classify_precision(ts, r.assignment[g])) << "\n";
    }
    out << "\n";
    const auto counts = tabulate(r.assignment, ts);
    for (NamedFormat n : kNamedFormats) out << std::setw(13) << to_string(n);
    out << "\n";
    for (NamedFormat n : kNamedFormats) out << std::setw(13) << counts.at(n);
    out << "\n\n";
    for (std::size_t i = 0; i < r.seeds.size(); ++i) {
      out << "seed " << r.seeds[i] << ": metric " << format_number(r.metrics[i]) << "\n";
    }
    out << "evaluations: " << r.evaluations << "\n";
    return kExitOk;
  });
}

int cmd_stats(const RunManifest& m, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    KvDocument doc;
    doc.set("kind", std::string("stats"));
    const StatsReport r = collect_stats(m, doc);
    r.write_to(doc);
    emit(doc, m.report, out);
    return kExitOk;
  });
}

int cmd_cost(const RunManifest& m, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const CostTables tables = m.tables ? CostTables::load(*m.tables) : CostTables::defaults();
    KvDocument source;
    StatsReport stats;
    if (m.stats) {
      source = KvDocument::parse_report(read_text_file(*m.stats));
      stats = StatsReport::read_from(source);
    } else {
      stats = collect_stats(m, source);
    }

    StatsReport base;
    if (m.baseline) {
      base = StatsReport::read_from(KvDocument::parse_report(read_text_file(*m.baseline)));
    } else {
      // Same input, every variable in binary32.
      RunManifest b;
      b.kernel = source.require("kernel");
      b.seeds = {static_cast<std::uint64_t>(source.require_number("seed"))};
      b.size = static_cast<std::size_t>(source.require_number("size"));
      if (source.contains("iterations")) b.iterations = static_cast<std::uint64_t>(source.require_number("iterations"));
      KvDocument ignored;
      base = collect_stats(b, ignored);
    }

    const CostReport report = normalize(estimate(stats, tables), estimate(base, tables));
    KvDocument doc;
    doc.set("kind", std::string("cost"));
    for (const char* key : {"kernel", "seed", "size", "iterations", "mapping"}) {
      if (const auto v = source.get(key)) doc.set(key, *v);
    }
    report.write_to(doc);
    out << doc.to_report_text();
    if (m.report) write_text_file(*m.report, doc.to_report_text());
    return kExitOk;
  });
}

int cmd_generate(const RunManifest& m, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (!m.output) throw Error(ErrorCode::IoError, "generate needs --output");
    const KernelInput in = resolve_input(m);
    save_input(in, *m.output);
    out << in.kernel << " seed " << in.seed << ": " << in.payload.size() << " values -> " << *m.output << "\n";
    return kExitOk;
  });
}

int cmd_list(std::ostream& out) {
  for (const KernelSpec& s : list_kernels()) {
    out << s.name << " - " << s.summary << " (size: " << s.size_meaning << ", default " << s.default_size
        << ", range " << s.min_size << ".." << s.max_size << ")\n";
    for (const VariableSpec& v : s.variables) {
      out << "  " << std::left << std::setw(10) << v.name << std::setw(8)
          << (v.shape == VarShape::Scalar ? "scalar" : "array") << v.role << "\n";
    }
  }
  return kExitOk;
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Transprecision floating-point emulation, tuning and cost estimation", "flexfp"};
  app.require_subcommand(1);
  RunManifest m;
  std::string mapping;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--kernel,-k", m.kernel, "JACOBI, KNN, PCA, DWT, SVM or CONV");
    sub->add_option("--seed,-s", m.seeds, "input seed (repeatable for tune)");
    sub->add_option("--size", m.size, "kernel size parameter");
    sub->add_option("--iterations", m.iterations, "JACOBI sweep count");
    sub->add_option("--input", m.input, "golden input file instead of a generated input");
    sub->add_option("--type-system", m.type_system, "v1, v2 or custom:<map file>");
  };
  auto configured = [&](CLI::App* sub) {
    common(sub);
    sub->add_option("--precision-file", m.precision_file, "precision bits, one per variable group");
    sub->add_option("--format", m.format, "one format for every variable, e.g. binary16 or e6m9");
    sub->add_option("--mapping", mapping, "precision to format view: exact or storage")
        ->check(CLI::IsMember({"exact", "storage"}));
  };

  CLI::App* run = app.add_subcommand("run", "run a kernel and print its output");
  configured(run);
  run->add_option("--stats", m.stats, "write event counts here");
  run->add_option("--report", m.report, "write a run report here");

  CLI::App* tune_cmd = app.add_subcommand("tune", "find per-variable precisions meeting a threshold");
  common(tune_cmd);
  tune_cmd->add_option("--threshold,-t", m.threshold, "bound on noise power / signal power")->required();
  tune_cmd->add_option("--precision-file", m.precision_file, "write the tuned precisions here");
  tune_cmd->add_option("--report", m.report, "write the tuning report here");

  CLI::App* stats = app.add_subcommand("stats", "count operations, casts and memory accesses");
  configured(stats);
  stats->add_option("--report", m.report, "write the report here instead of standard output");

  CLI::App* cost = app.add_subcommand("cost", "estimate cycles, memory accesses and energy");
  configured(cost);
  cost->add_option("--stats", m.stats, "stats report to cost (default: run now)");
  cost->add_option("--baseline", m.baseline, "baseline stats report (default: all-binary32 run)");
  cost->add_option("--tables", m.tables, "latency/energy table file");
  cost->add_option("--report", m.report, "also write the report here");

  CLI::App* gen = app.add_subcommand("generate", "save a generated kernel input");
  common(gen);
  gen->add_option("--output,-o", m.output, "input file to write")->required();

  app.add_subcommand("list", "list kernels and their variables");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }
  if (mapping == "exact") m.mapping = Mapping::Exact;
  if (mapping == "storage") m.mapping = Mapping::Storage;

  if (run->parsed()) return cmd_run(m, out, err);
  if (tune_cmd->parsed()) return cmd_tune(m, out, err);
  if (stats->parsed()) return cmd_stats(m, out, err);
  if (cost->parsed()) return cmd_cost(m, out, err);
  if (gen->parsed()) return cmd_generate(m, out, err);
  return cmd_list(out);
}

}  // namespace flexfp::cli
