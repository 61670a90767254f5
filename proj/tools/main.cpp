// Command-line driver: train, compare, field, sensitivity.
//
// Exit codes: 0 success, 2 configuration error, 3 training/sweep abort,
// 4 corrupt checkpoint.

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "mgamsgd/io.hpp"
#include "mgamsgd/reference.hpp"
#include "mgamsgd/sampling.hpp"
#include "mgamsgd/sensitivity.hpp"
#include "mgamsgd/trainer.hpp"

namespace fs = std::filesystem;
using namespace mgamsgd;

namespace {

int cmd_train(const std::string& config_path, std::optional<std::uint64_t> seed,
              const std::string& out_dir) {
  TrainConfig cfg = parse_config(config_path);
  if (seed) cfg.seed = *seed;
  fs::create_directories(out_dir);

  const TrainResult result = train_mga_msgd(cfg);
  const ProblemSetup setup = build_setup(cfg);

  RunReport report;
  report.config = cfg;
  report.effective_gamma = setup.problem.gamma;
  report.effective_seed = cfg.seed;
  report.trace = result.trace;
  report.final_breakdown = result.final_breakdown;
  for (const auto& g : result.trace.generations) report.mga_seconds += g.seconds;
  report.fsgd_seconds = result.trace.total_seconds - report.mga_seconds;
  if (cfg.bc_case == 'A') {
    const auto exact = analytic_uniaxial(setup.mat, cfg.traction_p);
    report.mse_u_value = mse_u(network_field(result.arch, result.theta), exact,
                               setup.samples.interior);
  }

  save_checkpoint(fs::path(out_dir) / "checkpoint.bin", result.arch, result.theta);
  write_loss_curve_csv(fs::path(out_dir) / "fsgd_curve.csv", result.trace.fsgd_curve);
  std::ofstream report_file(fs::path(out_dir) / "report.txt");
  render_report(report, report_file);
  render_report(report, std::cout);
  return 0;
}

int cmd_compare(const std::string& config_path, double budget_seconds, int n_seeds,
                const std::string& out_dir) {
  if (!(budget_seconds > 0)) throw ConfigError("compare: budget must be positive");
  if (n_seeds < 1) throw ConfigError("compare: seeds must be >= 1");
  const TrainConfig cfg = parse_config(config_path);
  fs::create_directories(out_dir);

  std::vector<std::uint64_t> seeds;
  for (int i = 0; i < n_seeds; ++i) seeds.push_back(cfg.seed + static_cast<std::uint64_t>(i));
  const auto results = compare_methods(cfg, budget_seconds, seeds);

  write_compare_csv(fs::path(out_dir) / "compare_curves.csv", results);
  write_compare_summary(fs::path(out_dir) / "compare_summary.csv", results);

  int completed = 0;
  for (const auto& r : results) completed += r.failed ? 0 : 1;
  std::ifstream summary(fs::path(out_dir) / "compare_summary.csv");
  std::cout << summary.rdbuf();
  if (completed == 0) {
    std::cerr << "compare: every method failed\n";
    return 3;
  }
  return 0;
}

int cmd_field(const std::string& checkpoint_path, int grid_n, const std::string& out_csv,
              bool with_error) {
  if (grid_n < 2) throw ConfigError("field: grid must be >= 2");
  const auto [arch, theta] = load_checkpoint(checkpoint_path);
  // The error columns compare against the analytic uniaxial solution at the
  // standard test setting.
  const Material mat = Material::isotropic(1.0, 0.3);
  write_field_csv(out_csv, arch, theta, grid_n, with_error, mat, -0.1);
  return 0;
}

int cmd_sensitivity(const std::string& config_path, int levels, int reps,
                    const std::string& out_csv, std::optional<double> mock_metric) {
  const TrainConfig cfg = parse_config(config_path);
  MetricRunner runner = training_runner();
  if (mock_metric)
    runner = [value = *mock_metric](const TrainConfig&, std::uint64_t) {
      return RunMetrics{value, 0.0};
    };
  const SensitivityResult result =
      morris_oat(table_ranges(), levels, reps, cfg.seed, runner, cfg);
  write_sensitivity_csv(out_csv, result);
  for (const auto& p : result.params) {
    if (p.level_metrics.size() < 2) {
      std::cerr << "sensitivity: sweep of " << p.name << " failed\n";
      return 3;
    }
  }
  if (result.warnings > 0)
    std::cerr << "sensitivity: " << result.warnings << " sweep point(s) dropped\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mesh-free neural solver for 3D linear elastostatics (MGA-MSGD training)"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed_override;

  auto* train = app.add_subcommand("train", "Train with the hybrid MGA-MSGD pipeline");
  train->add_option("--config", config_path, "Config file")->required();
  train->add_option("--seed", seed_override, "Override the config seed");
  train->add_option("--out", out_dir, "Output directory");

  double budget_seconds = 60.0;
  int n_seeds = 5;
  auto* compare = app.add_subcommand("compare", "Wall-budget comparison vs SGD and Adam");
  compare->add_option("--config", config_path, "Config file")->required();
  compare->add_option("--budget-seconds", budget_seconds, "Wall budget per method");
  compare->add_option("--seeds", n_seeds, "Number of shared seeds");
  compare->add_option("--out", out_dir, "Output directory");

  std::string checkpoint_path;
  std::string out_csv;
  int grid_n = 10;
  bool with_error = false;
  auto* field = app.add_subcommand("field", "Evaluate the displacement field on a lattice");
  field->add_option("--checkpoint", checkpoint_path, "Checkpoint file")->required();
  field->add_option("--grid", grid_n, "Lattice points per axis");
  field->add_option("--out", out_csv, "Output CSV")->required();
  field->add_flag("--error", with_error, "Append error columns vs the analytic solution");

  int levels = 4;
  int reps = 3;
  std::optional<double> mock_metric;
  auto* sens = app.add_subcommand("sensitivity", "One-at-a-time screening study");
  sens->add_option("--config", config_path, "Config file")->required();
  sens->add_option("--levels", levels, "Sweep points per parameter");
  sens->add_option("--reps", reps, "Training runs per sweep point");
  sens->add_option("--out", out_csv, "Output CSV")->required();
  sens->add_option("--mock-metric", mock_metric,
                   "Test hook: constant metric instead of training runs");

  CLI11_PARSE(app, argc, argv);

  try {
    if (train->parsed()) return cmd_train(config_path, seed_override, out_dir);
    if (compare->parsed()) return cmd_compare(config_path, budget_seconds, n_seeds, out_dir);
    if (field->parsed()) return cmd_field(checkpoint_path, grid_n, out_csv, with_error);
    if (sens->parsed()) return cmd_sensitivity(config_path, levels, reps, out_csv, mock_metric);
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const CheckpointError& e) {
    std::cerr << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 3;
  }
  return 0;
}
