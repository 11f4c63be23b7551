#include "safs/cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "safs/common.hpp"
#include "safs/config.hpp"
#include "safs/dataset.hpp"
#include "safs/pipeline.hpp"
#include "safs/report.hpp"
#include "safs/synth.hpp"

namespace safs::cli {

namespace {

struct CommonFlags {
  std::string config;
  std::string out_dir;
  bool dry_run = false;
  std::optional<int> threads;
  std::optional<std::uint64_t> seed;
};

int resolve_threads(const CommonFlags& flags, int from_config) {
  if (flags.threads) return *flags.threads;
  if (const char* env = std::getenv("SAFS_THREADS"); env != nullptr && *env != '\0') {
    try {
      return static_cast<int>(parse_size(env));
    } catch (const ConfigError&) {
      throw ConfigError(std::string("SAFS_THREADS must be a positive integer, got '") + env + "'");
    }
  }
  return from_config;
}

// Config errors and missing inputs are reported before anything is written.
RunConfig prepare_config(const CommonFlags& flags) {
  if (flags.config.empty()) throw ConfigError("--config is required");
  RunConfig cfg = load_run_config(flags.config);
  if (!flags.out_dir.empty()) cfg.output_dir = flags.out_dir;
  if (flags.seed) cfg.pipeline.seed = *flags.seed;
  cfg.pipeline.threads = resolve_threads(flags, cfg.pipeline.threads);
  if (cfg.pipeline.threads < 1) throw ConfigError("threads must be at least 1");
  if (!std::filesystem::is_regular_file(cfg.input_csv)) {
    throw ConfigError("input file '" + cfg.input_csv.string() + "' does not exist");
  }
  if (cfg.schema_path && !std::filesystem::is_regular_file(*cfg.schema_path)) {
    throw ConfigError("schema file '" + cfg.schema_path->string() + "' does not exist");
  }
  return cfg;
}

Dataset load_dataset(const RunConfig& cfg) {
  CsvOptions options;
  if (cfg.schema_path) options.schema = load_schema(*cfg.schema_path);
  options.target_name = cfg.target_name;
  options.max_levels = cfg.max_levels;
  options.missing = cfg.missing;
  return load_csv(cfg.input_csv, options);
}

void print_dry_run(const RunConfig& cfg, const Dataset& d, bool with_sweep, std::ostream& out) {
  const auto grid = resolve_n_grid(cfg.pipeline, d);
  const auto settings = resolve_settings(cfg.pipeline, d);
  out << "rows: " << d.rows() << " (continuous " << d.continuous_count() << ", categorical "
      << d.categorical_count() << ")\n";
  if (with_sweep) {
    out << "n_grid: " << grid.size() << " values\n";
  }
  out << "selector settings: " << settings.size() << " (" << to_string(cfg.pipeline.selector) << ")\n";
  if (with_sweep) {
    out << "architectures: " << grid.size() << " x " << settings.size() << " = " << grid.size() * settings.size()
        << '\n';
  }
  out << "cv: " << cfg.pipeline.cv_folds << " folds x " << cfg.pipeline.repeats << " repeats\n";
}

int cmd_synth(const CommonFlags& flags, const KeyValues& overrides, std::ostream& out) {
  KeyValues kv;
  if (!flags.config.empty()) {
    std::ifstream in(flags.config);
    if (!in) throw ConfigError("cannot read config '" + flags.config + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    kv = parse_key_values(ss.str());
  }
  for (const auto& [k, v] : overrides) kv[k] = v;
  if (flags.seed) kv["seed"] = std::to_string(*flags.seed);
  const SynthSpec spec = parse_synth_spec(kv);
  if (flags.out_dir.empty()) throw ConfigError("--out is required");
  if (flags.dry_run) {
    out << "synth: " << spec.m << " rows, " << spec.p_cont << " continuous, " << spec.p_cat << " categorical, "
        << spec.k_relevant << " relevant (" << to_string(spec.link) << ")\n";
    return kExitOk;
  }
  write_synth(spec, flags.out_dir);
  out << "wrote data.csv, schema.txt, truth.txt to " << flags.out_dir << '\n';
  return kExitOk;
}

int cmd_run(const CommonFlags& flags, bool baseline_only, std::ostream& out) {
  const RunConfig cfg = prepare_config(flags);
  const Dataset d = load_dataset(cfg);
  validate(cfg.pipeline, d.rows());
  if (flags.dry_run) {
    print_dry_run(cfg, d, !baseline_only, out);
    return kExitOk;
  }
  if (baseline_only) {
    const auto results = run_baseline(d, cfg.pipeline);
    write_baseline_files(results, cfg.output_dir);
    out << "baseline: " << results.size() << " settings evaluated; wrote " << (cfg.output_dir / kBaselineFile).string()
        << '\n';
    return kExitOk;
  }
  const auto report = run_safs(d, cfg.pipeline);
  write_report_files(report, cfg.output_dir);
  out << "best n = " << report.best.n << ", " << setting_label(report.best.setting)
      << ", mean MSE = " << format_double(report.best.mean_mse) << '\n';
  out << "wrote reports to " << cfg.output_dir.string() << '\n';
  return kExitOk;
}

int cmd_report(const std::string& dir, std::ostream& out) {
  const auto summary = read_report(dir);
  out << format_summary(summary);
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Stacked auto-encoder feature selection"};
  app.require_subcommand(1);

  CommonFlags flags;
  const auto add_common = [&flags](CLI::App* sub) {
    sub->add_option("--config", flags.config, "Configuration file (key = value lines)");
    sub->add_option("--out", flags.out_dir, "Output directory");
    sub->add_flag("--dry-run", flags.dry_run, "Resolve inputs and grids, then exit without training");
    sub->add_option("--seed", flags.seed, "Overrides the configured seed");
  };

  auto* synth = app.add_subcommand("synth", "Generate a synthetic dataset with known relevant features");
  add_common(synth);
  KeyValues synth_overrides;
  std::optional<std::size_t> m, p_cont, p_cat, k_relevant;
  std::string levels, link;
  std::optional<double> noise_std;
  synth->add_option("--m", m, "Rows");
  synth->add_option("--p-cont", p_cont, "Continuous feature count");
  synth->add_option("--p-cat", p_cat, "Categorical feature count");
  synth->add_option("--levels", levels, "Levels per categorical column (one count or a list)");
  synth->add_option("--k-relevant", k_relevant, "Number of predictive continuous features");
  synth->add_option("--link", link, "linear | quadratic | interaction");
  synth->add_option("--noise-std", noise_std, "Standard deviation of the additive Gaussian noise");

  auto* run_cmd = app.add_subcommand("run", "Run the architecture sweep and the baseline");
  add_common(run_cmd);
  run_cmd->add_option("--threads", flags.threads, "Worker threads (default: $SAFS_THREADS, then config)");

  auto* baseline = app.add_subcommand("baseline", "Evaluate the selector on un-represented features only");
  add_common(baseline);
  baseline->add_option("--threads", flags.threads, "Worker threads (default: $SAFS_THREADS, then config)");

  auto* report = app.add_subcommand("report", "Summarize a finished run");
  std::string report_dir;
  report->add_option("dir", report_dir, "Report directory");
  report->add_option("--out", report_dir, "Report directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "safs: " << e.what() << '\n';
    return kExitConfigError;
  }

  try {
    if (synth->parsed()) {
      if (m) synth_overrides["m"] = std::to_string(*m);
      if (p_cont) synth_overrides["p_cont"] = std::to_string(*p_cont);
      if (p_cat) synth_overrides["p_cat"] = std::to_string(*p_cat);
      if (k_relevant) synth_overrides["k_relevant"] = std::to_string(*k_relevant);
      if (!levels.empty()) synth_overrides["levels"] = levels;
      if (!link.empty()) synth_overrides["link"] = link;
      if (noise_std) synth_overrides["noise_std"] = format_double(*noise_std);
      return cmd_synth(flags, synth_overrides, out);
    }
    if (run_cmd->parsed()) return cmd_run(flags, false, out);
    if (baseline->parsed()) return cmd_run(flags, true, out);
    if (report_dir.empty()) {
      err << "safs report: a report directory is required\n";
      return kExitConfigError;
    }
    try {
      return cmd_report(report_dir, out);
    } catch (const std::exception& e) {
      err << "safs report: " << e.what() << '\n';
      return kExitRuntimeError;
    }
  } catch (const ConfigError& e) {
    err << "safs: configuration error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::exception& e) {
    err << "safs: " << e.what() << '\n';
    return kExitRuntimeError;
  }
}

}  // namespace safs::cli
