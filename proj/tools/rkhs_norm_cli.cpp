#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/core.h>
#include <fmt/ranges.h>

#include "rkhs/errors.hpp"
#include "rkhs/estimator.hpp"
#include "rkhs/io.hpp"
#include "rkhs/kernel.hpp"
#include "rkhs/serialization.hpp"
#include "rkhs/testbed.hpp"

namespace fs = std::filesystem;

namespace {

enum ExitCode : int { exit_ok = 0, exit_violation = 1, exit_input = 2, exit_divergence = 3 };

struct CommonConfig {
  int kernel_order = 0;
  double shape = 1.0;
  bool jitter = false;
  double beta_max = 6.0;
  std::string out;
  std::string format = "csv";
};

struct TablesConfig {
  std::vector<int> kernels{0, 1, 2};
  std::vector<std::string> functions;
  std::string placement = "interior";
  int base = 3;
  int levels = 8;
  int base_2d = 1;
  int levels_2d = 6;
  std::optional<int> max_level;
  std::size_t max_points = 4225;
  bool no_reference = false;
};

struct EstimateConfig {
  std::string input;
  std::string domain;
};

struct CertifyConfig {
  std::string samples;
  std::string holdout;
  std::string domain;
  std::size_t subset = 50;
  std::uint64_t seed = 0;
  std::optional<double> override_bound;
};

struct SampleConfig {
  std::string function;
  std::string placement = "closed";
  int base = 3;
  int levels = 9;
  std::size_t max_points = 4225;
  int holdout = 0;
};

std::string join(const std::vector<std::string>& parts, const char* sep) {
  std::string s;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) s += sep;
    s += parts[i];
  }
  return s;
}

template <typename T>
std::string join_numbers(const std::vector<T>& values) {
  std::vector<std::string> parts;
  for (const T& v : values) parts.push_back(fmt::format("{}", v));
  return join(parts, ",");
}

fs::path output_dir(const CommonConfig& common) {
  if (!common.out.empty()) return common.out;
  if (const char* env = std::getenv("RKHS_NORM_OUT"); env && *env) return env;
  return fs::current_path();
}

fs::path prepare_output_dir(const CommonConfig& common) {
  const fs::path dir = output_dir(common);
  fs::create_directories(dir);
  return dir;
}

rkhs::KernelSpec kernel_of(const CommonConfig& common) {
  return rkhs::KernelSpec(common.kernel_order, common.shape);
}

rkhs::EstimatorOptions estimator_of(const CommonConfig& common) {
  rkhs::EstimatorOptions options;
  options.beta_max = common.beta_max;
  return options;
}

rkhs::TraceOptions trace_of(const CommonConfig& common) {
  rkhs::TraceOptions options;
  options.solve.allow_jitter = common.jitter;
  return options;
}

// "lo,hi" applies to every axis; "lo1,hi1,lo2,hi2,..." gives each axis.
std::optional<rkhs::BoxDomain> parse_domain(const std::string& text, int dim) {
  if (text.empty()) return std::nullopt;
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw rkhs::invalid_argument("--domain: cannot parse '" + item + "'");
    }
  }
  if (values.size() == 2) return rkhs::BoxDomain::cube(dim, values[0], values[1]);
  if (values.size() != static_cast<std::size_t>(2 * dim)) {
    throw rkhs::invalid_argument(
        fmt::format("--domain: expected 2 or {} numbers, got {}", 2 * dim, values.size()));
  }
  rkhs::Vector lo(dim), hi(dim);
  for (int a = 0; a < dim; ++a) {
    lo[a] = values[2 * a];
    hi[a] = values[2 * a + 1];
  }
  return rkhs::BoxDomain(lo, hi);
}

std::string common_echo(const CommonConfig& c) {
  return fmt::format("kernel_order={} shape={} jitter={} beta_max={}", c.kernel_order, c.shape,
                     c.jitter ? "on" : "off", c.beta_max);
}

bool is_trace_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw rkhs::invalid_argument("cannot open " + path);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    return line.rfind("level,h", 0) == 0;
  }
  return false;
}

// Fill distances depend on the domain, so an inferred one is announced.
rkhs::BoxDomain domain_or_box(const rkhs::SampleSet& samples, const std::string& domain_text) {
  if (auto domain = parse_domain(domain_text, samples.dim)) return *domain;
  rkhs::BoxDomain box = rkhs::bounding_box(samples);
  std::vector<std::string> axes;
  for (int a = 0; a < box.dim(); ++a) axes.push_back(fmt::format("{},{}", box.lo()[a], box.hi()[a]));
  fmt::print(stderr, "note: no --domain given, using the bounding box of the samples ({})\n",
             fmt::join(axes, ","));
  return box;
}

rkhs::NormTrace trace_from_samples(const rkhs::SampleSet& samples, const CommonConfig& common,
                                   const std::string& domain_text) {
  const std::vector<rkhs::PointSet> levels =
      rkhs::sample_levels(samples, domain_or_box(samples, domain_text));
  std::vector<double> h;
  for (const auto& level : levels) h.push_back(rkhs::fill_distance(level));
  return rkhs::build_trace(kernel_of(common), levels, h, samples.values, trace_of(common));
}

void print_report(std::ostream& out, const char* label, const std::optional<rkhs::EstimateReport>& r,
                  const std::string& error) {
  if (!r) {
    out << fmt::format("{}: failed: {}\n", label, error);
    return;
  }
  out << fmt::format("{}: norm {:.10g} (burn-in {})", label, r->norm_estimate, r->burn_in_used);
  if (r->saturating) {
    out << fmt::format(" c1 {:.10g} c1' {:.10g} beta1 {:.6g}", r->saturating->c1,
                       r->saturating->c1_prime, r->saturating->beta1);
  }
  if (r->powerlaw) {
    out << fmt::format(" c2 {:.10g} beta2 {:.6g}", r->powerlaw->c2, r->powerlaw->beta2);
  }
  if (r->exact) out << " exact";
  out << '\n';
  for (const auto& d : r->diagnostics) out << "  " << d << '\n';
}

int cmd_tables(const CommonConfig& common, const TablesConfig& cfg) {
  rkhs::TableConfig config;
  config.kernels.clear();
  for (int k : cfg.kernels) config.kernels.emplace_back(k, common.shape);
  config.functions = cfg.functions;
  for (const auto& name : config.functions) rkhs::find_test_function(name);
  config.placement = rkhs::parse_grid_placement(cfg.placement);
  config.base_1d = cfg.base;
  config.levels_1d = cfg.levels;
  config.base_2d = cfg.base_2d;
  config.levels_2d = cfg.levels_2d;
  config.max_level = cfg.max_level;
  config.max_points = cfg.max_points;
  config.estimator = estimator_of(common);
  config.trace = trace_of(common);
  config.dense_reference = !cfg.no_reference;
  config.config_echo = fmt::format(
      "rkhs-norm tables kernels={} functions={} placement={} base={} levels={} base_2d={} "
      "levels_2d={} max_level={} max_points={} reference={} {}",
      join_numbers(cfg.kernels), cfg.functions.empty() ? "all" : join(cfg.functions, ","),
      cfg.placement, cfg.base, cfg.levels, cfg.base_2d, cfg.levels_2d,
      cfg.max_level ? std::to_string(*cfg.max_level) : "none", cfg.max_points,
      cfg.no_reference ? "off" : "on", common_echo(common));

  const fs::path dir = prepare_output_dir(common);
  const rkhs::ExperimentTable table = rkhs::run_table_experiments(config);
  rkhs::write_table_outputs(table, config, dir);
  std::cout << rkhs::format_summary(table);
  std::string failures = rkhs::config_header(config.config_echo);
  for (const auto& f : table.failures) failures += f + '\n';
  rkhs::write_file_atomic(dir / "failures.txt", failures);
  for (const auto& a : table.advisories) std::cerr << "ADVISORY " << a << '\n';
  for (const auto& f : table.failures) std::cerr << "FAIL " << f << '\n';
  std::cout << fmt::format("outputs written to {}\n", dir.string());
  return table.ok() ? exit_ok : exit_violation;
}

int cmd_estimate(const CommonConfig& common, const EstimateConfig& cfg) {
  const std::string echo = fmt::format("rkhs-norm estimate input={} domain={} {}", cfg.input,
                                       cfg.domain.empty() ? "auto" : cfg.domain,
                                       common_echo(common));
  rkhs::NormTrace trace = is_trace_csv(cfg.input)
                              ? rkhs::read_trace_csv(fs::path(cfg.input), kernel_of(common))
                              : trace_from_samples(rkhs::read_samples_csv(fs::path(cfg.input)),
                                                   common, cfg.domain);
  const rkhs::EstimateSummary summary = rkhs::estimate_norm(trace, estimator_of(common));

  rkhs::json j;
  j["config"] = echo;
  j["estimate"] = summary;
  j["trace"] = trace;
  const fs::path dir = prepare_output_dir(common);
  rkhs::write_file_atomic(dir / "estimate.json", j.dump(2) + '\n');

  if (common.format == "json") {
    std::cout << j.dump(2) << '\n';
  } else {
    std::cout << "# config: " << echo << '\n';
    std::cout << fmt::format("levels: {}  nested: {}\n", trace.size(), trace.nested ? "yes" : "no");
    for (const auto& w : trace.warnings) std::cout << "  " << w << '\n';
    std::cout << fmt::format("membership: {} ({})\n",
                             rkhs::to_string(summary.membership.classification),
                             summary.membership.reason);
    print_report(std::cout, "algorithm 1", summary.alg1, summary.alg1_error);
    print_report(std::cout, "algorithm 2", summary.alg2, summary.alg2_error);
  }
  if (summary.membership.classification == rkhs::Membership::diverging) {
    std::cerr << "WARNING: the samples look like a function outside the RKHS ("
              << summary.membership.reason << "); the estimates are not norm bounds\n";
    return exit_divergence;
  }
  if (!summary.alg1 && !summary.alg2) return exit_input;
  return exit_ok;
}

int cmd_trace(const CommonConfig& common, const EstimateConfig& cfg) {
  const std::string echo = fmt::format("rkhs-norm trace input={} domain={} {}", cfg.input,
                                       cfg.domain.empty() ? "auto" : cfg.domain,
                                       common_echo(common));
  const rkhs::NormTrace trace =
      trace_from_samples(rkhs::read_samples_csv(fs::path(cfg.input)), common, cfg.domain);
  std::ostringstream body;
  body << rkhs::config_header(echo);
  if (common.format == "json") {
    rkhs::json j = trace;
    j["config"] = echo;
    body.str("");
    body << j.dump(2) << '\n';
  } else {
    trace.write_csv(body);
  }
  const fs::path dir = prepare_output_dir(common);
  const fs::path file = dir / (common.format == "json" ? "trace.json" : "trace.csv");
  rkhs::write_file_atomic(file, body.str());
  for (const auto& w : trace.warnings) std::cerr << "warning: " << w << '\n';
  std::cout << fmt::format("{} levels written to {}\n", trace.size(), file.string());
  return exit_ok;
}

int cmd_certify(const CommonConfig& common, const CertifyConfig& cfg) {
  const std::string echo = fmt::format(
      "rkhs-norm certify samples={} holdout={} domain={} subset={} seed={} override_bound={} {}",
      cfg.samples, cfg.holdout, cfg.domain.empty() ? "auto" : cfg.domain, cfg.subset, cfg.seed,
      cfg.override_bound ? fmt::format("{}", *cfg.override_bound) : "none", common_echo(common));
  const rkhs::SampleSet samples = rkhs::read_samples_csv(fs::path(cfg.samples));
  const rkhs::Holdout holdout = rkhs::read_holdout_csv(fs::path(cfg.holdout));

  rkhs::CertifyOptions options;
  options.subset_size = cfg.subset;
  options.seed = cfg.seed;
  options.estimator = estimator_of(common);
  options.trace = trace_of(common);
  options.override_bound = cfg.override_bound;
  options.domain = domain_or_box(samples, cfg.domain);

  const rkhs::CertificationReport report =
      rkhs::certify_from_samples(samples, kernel_of(common), holdout, options);

  const fs::path dir = prepare_output_dir(common);
  rkhs::json j = report;
  j["config"] = echo;
  rkhs::write_file_atomic(dir / "certify.json", j.dump(2) + '\n');
  if (common.format != "json") {
    const bool gnuplot = common.format == "gnuplot";
    std::ostringstream surface;
    surface << rkhs::config_header(echo);
    rkhs::write_bound_surface(surface, report, gnuplot);
    rkhs::write_file_atomic(dir / (gnuplot ? "bound.dat" : "bound.csv"), surface.str());
  }

  if (common.format == "json") {
    std::cout << j.dump(2) << '\n';
  } else {
    std::cout << "# config: " << echo << '\n';
    std::cout << fmt::format("norm bound C: {:.10g}\n", report.norm_bound);
    std::cout << fmt::format("interpolant norm on {} subset points: {:.10g}\n", report.subset.size(),
                             report.interpolant_norm);
    std::cout << fmt::format("holdout points: {}  violations: {}\n", report.grid.cols(),
                             report.violations);
    std::cout << fmt::format("max |error|: {:.6e}  max |error|/bound: {:.6g}\n", report.max_error,
                             report.max_ratio);
    for (const auto& d : report.diagnostics) std::cout << "  " << d << '\n';
  }
  return report.ok() ? exit_ok : exit_violation;
}

int cmd_sample(const CommonConfig& common, const SampleConfig& cfg) {
  const rkhs::TestFunction& fn = rkhs::find_test_function(cfg.function);
  rkhs::ScheduleOptions schedule_options;
  schedule_options.placement = rkhs::parse_grid_placement(cfg.placement);
  schedule_options.max_points = cfg.max_points;
  const rkhs::NestedSchedule schedule =
      rkhs::make_dyadic_schedule(fn.domain, cfg.base, cfg.levels, schedule_options);
  const rkhs::SampleSet samples = rkhs::make_samples(fn, schedule);
  const std::string echo =
      fmt::format("rkhs-norm sample function={} placement={} base={} levels={} max_points={} holdout={}",
                  cfg.function, cfg.placement, cfg.base, cfg.levels, cfg.max_points, cfg.holdout);

  const fs::path dir = prepare_output_dir(common);
  std::vector<rkhs::PointSet> levels = schedule.levels;
  std::ostringstream body;
  body << rkhs::config_header(echo);
  rkhs::write_samples_csv(body, levels, samples.values);
  rkhs::write_file_atomic(dir / "samples.csv", body.str());
  std::cout << fmt::format("{} levels, finest {} points -> {}\n", levels.size(),
                           levels.back().size(), (dir / "samples.csv").string());
  if (cfg.holdout > 0) {
    const rkhs::Holdout holdout = rkhs::make_holdout(fn, cfg.holdout);
    std::ostringstream hb;
    hb << rkhs::config_header(echo);
    rkhs::write_holdout_csv(hb, holdout.points, holdout.values);
    rkhs::write_file_atomic(dir / "holdout.csv", hb.str());
    std::cout << fmt::format("{} holdout points -> {}\n", holdout.points.cols(),
                             (dir / "holdout.csv").string());
  }
  return exit_ok;
}

void add_common(CLI::App* cmd, CommonConfig& common, bool with_format) {
  cmd->add_option("--kernel-order", common.kernel_order, "Matérn order n (0, 1 or 2)")
      ->check(CLI::Range(0, 2));
  cmd->add_option("--shape", common.shape, "kernel shape parameter eps")
      ->check(CLI::PositiveNumber);
  cmd->add_flag("--jitter", common.jitter, "allow diagonal jitter on ill-conditioned levels");
  cmd->add_option("--beta-max", common.beta_max, "upper end of the exponent search")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--out", common.out, "output directory (default: $RKHS_NORM_OUT or cwd)");
  if (with_format) {
    cmd->add_option("--format", common.format, "output format")
        ->check(CLI::IsMember({"csv", "gnuplot", "json"}));
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RKHS norm estimation from nested interpolation samples"};
  app.require_subcommand(1);

  CommonConfig common;
  TablesConfig tables;
  EstimateConfig estimate;
  CertifyConfig certify;
  SampleConfig sample;

  auto* tables_cmd = app.add_subcommand("tables", "run the experiment grid over the test functions");
  add_common(tables_cmd, common, false);
  tables_cmd->add_option("--kernels", tables.kernels, "Matérn orders")->delimiter(',');
  tables_cmd->add_option("--functions", tables.functions, "registry names (default all)")
      ->delimiter(',');
  tables_cmd->add_option("--placement", tables.placement)
      ->check(CLI::IsMember({"closed", "interior"}));
  tables_cmd->add_option("--base", tables.base, "points per axis on level 0 (1D)");
  tables_cmd->add_option("--levels", tables.levels, "number of levels (1D)");
  tables_cmd->add_option("--base-2d", tables.base_2d, "points per axis on level 0 (2D)");
  tables_cmd->add_option("--levels-2d", tables.levels_2d, "number of levels (2D)");
  tables_cmd->add_option("--max-level", tables.max_level, "finest level index");
  tables_cmd->add_option("--max-points", tables.max_points, "cap on points per level");
  tables_cmd->add_flag("--no-reference", tables.no_reference, "skip dense reference norms");

  auto* estimate_cmd = app.add_subcommand("estimate", "estimate the norm from samples or a trace");
  add_common(estimate_cmd, common, true);
  estimate_cmd->add_option("input", estimate.input, "samples CSV or trace CSV")->required();
  estimate_cmd->add_option("--domain", estimate.domain, "lo,hi or lo1,hi1,lo2,hi2,...");

  auto* trace_cmd = app.add_subcommand("trace", "write the norm trace of nested samples");
  add_common(trace_cmd, common, true);
  trace_cmd->add_option("input", estimate.input, "samples CSV")->required();
  trace_cmd->add_option("--domain", estimate.domain, "lo,hi or lo1,hi1,lo2,hi2,...");

  auto* certify_cmd = app.add_subcommand("certify", "check the error bound on holdout points");
  add_common(certify_cmd, common, true);
  certify_cmd->add_option("samples", certify.samples, "samples CSV")->required();
  certify_cmd->add_option("holdout", certify.holdout, "holdout CSV")->required();
  certify_cmd->add_option("--domain", certify.domain, "lo,hi or lo1,hi1,lo2,hi2,...");
  certify_cmd->add_option("--subset", certify.subset, "interpolation subset size")
      ->check(CLI::PositiveNumber);
  certify_cmd->add_option("--seed", certify.seed, "seed for the subset draw");
  certify_cmd->add_option("--override-bound", certify.override_bound, "use this norm bound C");

  auto* sample_cmd = app.add_subcommand("sample", "write nested samples of a registry function");
  add_common(sample_cmd, common, false);
  sample_cmd->add_option("function", sample.function, "registry name")->required();
  sample_cmd->add_option("--placement", sample.placement)
      ->check(CLI::IsMember({"closed", "interior"}));
  sample_cmd->add_option("--base", sample.base, "points per axis on level 0");
  sample_cmd->add_option("--levels", sample.levels, "number of levels");
  sample_cmd->add_option("--max-points", sample.max_points, "cap on points per level");
  sample_cmd->add_option("--holdout", sample.holdout, "holdout points per axis (0: none)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_ok : exit_input;
  }

  try {
    if (*tables_cmd) return cmd_tables(common, tables);
    if (*estimate_cmd) return cmd_estimate(common, estimate);
    if (*trace_cmd) return cmd_trace(common, estimate);
    if (*certify_cmd) return cmd_certify(common, certify);
    if (*sample_cmd) return cmd_sample(common, sample);
  } catch (const rkhs::divergence_error& e) {
    std::cerr << "WARNING: diverging: " << e.what() << '\n';
    return exit_divergence;
  } catch (const rkhs::bound_error& e) {
    std::cerr << "bound violated: " << e.what() << '\n';
    return exit_violation;
  } catch (const rkhs::schema_error& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return exit_input;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_input;
  }
  return exit_input;
}
