#include "minimax/cli.hpp"

#include <cstdlib>
#include <iostream>
#include <thread>

#include "CLI11.hpp"
#include "minimax/config.hpp"
#include "minimax/errors.hpp"
#include "minimax/record.hpp"
#include "minimax/sweep.hpp"

namespace minimax {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitDiverged = 2;

ExperimentConfig load_for(const CliOptions& opts, FieldConvention fallback) {
  ExperimentConfig cfg = load_config(opts.config);
  if (opts.convention) cfg.convention = opts.convention;
  if (opts.seed) set_seed(cfg, *opts.seed);
  return resolve(std::move(cfg), fallback);
}

void print_warnings(const std::vector<std::string>& warnings) {
  for (const std::string& w : warnings) std::cerr << "warning: " << w << "\n";
}

int finish_run(const RunRecord& record, const CliOptions& opts) {
  write_record(record, opts.out);
  print_warnings(record.warnings);
  const TrajectoryRow& last = record.rows.back();
  std::cout << to_string(record.verdict) << " after " << last.iter
            << " iterations, |v| = " << format_double(last.field_norm);
  if (last.metric) std::cout << ", metric = " << format_double(*last.metric);
  std::cout << "\n";
  return record.verdict == Verdict::Diverged ? kExitDiverged : kExitOk;
}

template <typename Fn>
int guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
}

}  // namespace

unsigned resolve_workers(std::optional<unsigned> flag) {
  if (flag && *flag > 0) return *flag;
  if (const char* env = std::getenv("MINIMAX_GN_WORKERS")) {
    char* end = nullptr;
    const unsigned long n = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && n > 0) return static_cast<unsigned>(n);
    std::cerr << "warning: ignoring MINIMAX_GN_WORKERS='" << env << "'\n";
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

int cmd_run(const CliOptions& opts) {
  return guarded([&] {
    const ExperimentConfig cfg = load_for(opts, FieldConvention::PaperOriented);
    return finish_run(execute_run(cfg), opts);
  });
}

int cmd_gan(const CliOptions& opts) {
  return guarded([&] {
    const ExperimentConfig cfg = load_for(opts, FieldConvention::PaperOriented);
    if (!cfg.gan) throw ConfigError("$.gan: the gan command needs a gan section");
    const RunRecord record = execute_run(cfg);
    std::filesystem::path params = opts.out;
    params.replace_extension(".params.bin");
    write_snapshot(params, gan_snapshot(record));
    return finish_run(record, opts);
  });
}

int cmd_analyze(const CliOptions& opts) {
  return guarded([&] {
    const ExperimentConfig cfg = load_for(opts, FieldConvention::DescentAscent);
    const AnalyzeResult result = execute_analyze(cfg);
    write_text(opts.out, to_json(result).dump(2) + "\n");
    const SpectralReport& r = result.report;
    std::cout << "radius " << format_double(r.spectral_radius) << ", sigma "
              << format_double(r.sigma) << ", bound "
              << (r.sigma_bound ? format_double(*r.sigma_bound) : std::string("n/a")) << ", "
              << to_string(r.classification.classification) << "\n";
    return kExitOk;
  });
}

int cmd_sweep(const CliOptions& opts) {
  return guarded([&] {
    const SweepSpec spec = load_sweep(opts.config);
    std::cerr << "sweep: " << sweep_size(spec) << " runs\n";
    const auto points = expand_sweep(spec, FieldConvention::PaperOriented, opts.seed);
    const SweepSummary summary =
        run_sweep(points, spec.axes, opts.out, resolve_workers(opts.workers));
    std::cout << summary.runs << " runs, " << summary.failures << " failed\n";
    return summary.failures == 0 ? kExitOk : kExitError;
  });
}

int cli_main(int argc, char** argv) {
  CLI::App app{"Gauss-Newton min-max solvers: runs, spectral analysis, sweeps, toy GANs"};
  app.require_subcommand(1);
  CliOptions opts;
  std::string convention;
  std::uint64_t seed = 0;
  unsigned workers = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opts.config, "config (sweep spec for `sweep`) JSON file")
        ->required();
    sub->add_option("--out", opts.out, "output file (directory for `sweep`)")->required();
    sub->add_option("--seed", seed, "override the config seed");
    sub->add_option("--convention", convention, "paper | descent-ascent")
        ->check(CLI::IsMember({"paper", "descent-ascent"}));
    sub->add_option("--workers", workers, "sweep worker threads (default MINIMAX_GN_WORKERS)");
  };
  CLI::App* run = app.add_subcommand("run", "run a solver on a game (or a toy GAN)");
  CLI::App* analyze = app.add_subcommand("analyze", "spectral report at an equilibrium");
  CLI::App* sweep = app.add_subcommand("sweep", "run a parameter grid");
  CLI::App* gan = app.add_subcommand("gan", "train a toy GAN and save its parameters");
  for (CLI::App* sub : {run, analyze, sweep, gan}) add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitError;
  }
  CLI::App* chosen = app.get_subcommands().front();
  if (chosen->count("--seed") > 0) opts.seed = seed;
  if (!convention.empty()) opts.convention = parse_convention(convention);
  if (chosen->count("--workers") > 0) opts.workers = workers;

  if (chosen == run) return cmd_run(opts);
  if (chosen == analyze) return cmd_analyze(opts);
  if (chosen == sweep) return cmd_sweep(opts);
  return cmd_gan(opts);
}

}  // namespace minimax
