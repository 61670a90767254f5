#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "mgamsgd/trainer.hpp"

namespace mgamsgd {

/// Morris spread measures over a sample list. Note that this mu is the mean
/// absolute deviation about the sample mean (not the classical elementary
/// effect mean); it is implemented exactly in that form.
double morris_sigma(std::span<const double> values);
double morris_mu(std::span<const double> values);

/// One framework parameter of the screening study: its sweep range, base
/// value, and how it maps onto a training configuration.
struct ParamRange {
  std::string name;
  double lo = 0.0;
  double hi = 1.0;
  double base = 0.0;
  bool is_integer = false;
  std::function<void(TrainConfig&, double)> apply;
};

/// The eleven framework parameters with their screening distributions and
/// base values.
std::vector<ParamRange> table_ranges();

struct RunMetrics {
  double mse = 0.0;
  double seconds = 0.0;
};

/// Maps a configuration and seed to run metrics. The production runner wraps
/// train_mga_msgd; tests may inject mocks.
using MetricRunner = std::function<RunMetrics(const TrainConfig&, std::uint64_t seed)>;

MetricRunner training_runner();

inline constexpr std::array<const char*, 4> kMetricNames = {"avg_mse", "min_mse",
                                                            "avg_time", "min_time"};

struct ParamSensitivity {
  std::string name;
  std::array<double, 4> mu{};     // per metric, order of kMetricNames
  std::array<double, 4> sigma{};
  std::vector<std::array<double, 4>> level_metrics;  // raw sweep samples
  int failed_points = 0;
};

struct SensitivityResult {
  std::vector<ParamSensitivity> params;
  int levels = 0;
  int reps = 0;
  int warnings = 0;  // sweep points dropped after repeated training failure
};

/// One-at-a-time screening: every parameter is swept over `levels` equispaced
/// points (holding the others at base values); each point aggregates
/// `reps_per_point` seeded runs into the four metrics of the result table.
SensitivityResult morris_oat(const std::vector<ParamRange>& ranges, int levels,
                             int reps_per_point, std::uint64_t seed,
                             const MetricRunner& runner, const TrainConfig& base);

}  // namespace mgamsgd
