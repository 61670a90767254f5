#pragma once

#include <Eigen/Dense>

#include <filesystem>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mgamsgd/network.hpp"
#include "mgamsgd/sensitivity.hpp"
#include "mgamsgd/trainer.hpp"

namespace mgamsgd {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct CheckpointError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Flat key-value config. Recognized keys: lr_c, N_GAi, N_h, N_nh, P_sf, N_x,
/// beta_i, M_g, M_m, M_l, lr_f, gamma, case, E, nu, seed. Unknown keys are
/// errors. N_x sets all three grid dimensions.
TrainConfig parse_config(const std::filesystem::path& path);
TrainConfig parse_config_text(const std::string& text);

/// Binary checkpoint: magic "MGAMSGD1", little-endian u32 N_h and N_nh, then
/// the flat parameters as little-endian f64 in canonical flatten order.
void save_checkpoint(const std::filesystem::path& path, const Architecture& arch,
                     const Eigen::VectorXd& theta);
std::pair<Architecture, Eigen::VectorXd> load_checkpoint(const std::filesystem::path& path);

/// Human-readable run summary; all numbers restate the trace.
struct RunReport {
  TrainConfig config;
  double effective_gamma = 0.0;
  std::uint64_t effective_seed = 0;
  TrainingTrace trace;
  LossBreakdown final_breakdown;
  std::optional<double> mse_u_value;  // Case A only
  double mga_seconds = 0.0;
  double fsgd_seconds = 0.0;
};

void render_report(const RunReport& report, std::ostream& os);

// Every CSV number is serialized with 17 significant digits.
std::string format_number(double v);

void write_loss_curve_csv(const std::filesystem::path& path,
                          const std::vector<double>& losses);
void write_field_csv(const std::filesystem::path& path, const Architecture& arch,
                     const Eigen::VectorXd& theta, int grid_n, bool with_error,
                     const Material& mat, double traction_p);
void write_compare_csv(const std::filesystem::path& path,
                       const std::vector<CompareMethodResult>& results,
                       std::size_t max_points_per_run = 1500);
void write_compare_summary(const std::filesystem::path& path,
                           const std::vector<CompareMethodResult>& results);
void write_sensitivity_csv(const std::filesystem::path& path,
                           const SensitivityResult& result);

}  // namespace mgamsgd
