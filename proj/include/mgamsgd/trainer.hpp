#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "mgamsgd/elasticity.hpp"
#include "mgamsgd/mga.hpp"
#include "mgamsgd/network.hpp"
#include "mgamsgd/optim.hpp"
#include "mgamsgd/sampling.hpp"

namespace mgamsgd {

/// Full training configuration; the defaults are the tuned setting for the
/// unit-cube uniaxial problem.
struct TrainConfig {
  double lr_c = 0.6;
  double lr_f = 1e-5;
  int n_gai = 30;
  int n_h = 2;
  int n_nh = 10;
  double p_sf = 0.97;
  int nx = 5;
  int ny = 5;
  int nz = 5;
  double beta_i = 0.0;
  double m_g = 0.3;
  double m_m = 0.3;
  double m_l = 0.3;
  std::optional<double> gamma;  // defaults to 0.05 * n when unset
  int fsgd_iters = 2000;
  int csgd_iters = 50;
  int tournament_size = 3;
  DivergenceGuard guard;
  char bc_case = 'A';
  double E = 1.0;
  double nu = 0.3;
  double traction_p = -0.1;
  bool normalize = true;
  std::uint64_t seed = 0;

  Architecture architecture() const { return Architecture{n_h, n_nh, 1.0}; }
  GridSpec grid() const { return GridSpec{nx, ny, nz, beta_i}; }
  MgaConfig mga() const {
    return MgaConfig{p_sf, n_gai, {m_g, m_m, m_l}, tournament_size, csgd_iters, lr_c, guard};
  }
  double effective_gamma(std::size_t n_interior) const {
    return gamma.value_or(0.05 * static_cast<double>(n_interior));
  }
  void validate() const;
};

struct GenerationRecord {
  int iteration = 0;
  double candidate_msec = 0.0;
  bool accepted = false;
  double seconds = 0.0;  // wall time of this iteration
};

struct TrainingTrace {
  double mse_i = 0.0;
  std::vector<GenerationRecord> generations;
  double mse_after_mga = 0.0;
  std::vector<double> fsgd_curve;
  double mse_min = std::numeric_limits<double>::infinity();
  double total_seconds = 0.0;

  int accepted_count() const;
};

struct TrainResult {
  Architecture arch;
  Eigen::VectorXd theta;  // lowest-loss parameters seen anywhere in the run
  TrainingTrace trace;
  LossBreakdown final_breakdown;
};

struct ProblemSetup {
  Architecture arch;
  Material mat;
  ProblemSpec problem;
  SampleSet samples;
};

ProblemSetup build_setup(const TrainConfig& cfg);

/// Hybrid pipeline: random init, n_gai MGA-CSGD iterations, then the
/// fine-level SGD. Deterministic for a fixed seed.
TrainResult train_mga_msgd(const TrainConfig& cfg);

enum class Baseline { Sgd, Adam };

/// Pure descent with the chosen optimizer from the same seeded init.
TrainResult train_baseline(Baseline kind, double lr, int iters, const TrainConfig& cfg);

/// One method's loss-vs-time record in a budgeted comparison.
struct CompareMethodResult {
  std::string method;
  std::uint64_t seed = 0;
  std::vector<std::pair<double, double>> curve;  // (seconds, best loss so far)
  double final_loss = std::numeric_limits<double>::infinity();
  bool failed = false;
};

/// Runs MGA-MSGD, plain SGD and Adam for the same wall budget per seed.
/// MGA-MSGD spends leftover budget on continued fine descent; the baselines
/// restart from their best iterate at a tenth of the rate when they diverge.
std::vector<CompareMethodResult> compare_methods(const TrainConfig& cfg,
                                                 double budget_seconds,
                                                 const std::vector<std::uint64_t>& seeds);

}  // namespace mgamsgd
