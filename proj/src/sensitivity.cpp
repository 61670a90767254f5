#include "mgamsgd/sensitivity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "mgamsgd/rng.hpp"

namespace mgamsgd {

double morris_sigma(std::span<const double> values) {
  if (values.size() < 2) throw std::domain_error("morris_sigma: need at least 2 values");
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

double morris_mu(std::span<const double> values) {
  if (values.size() < 2) throw std::domain_error("morris_mu: need at least 2 values");
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += std::abs(v - mean);
  return sum / static_cast<double>(values.size() - 1);
}

std::vector<ParamRange> table_ranges() {
  std::vector<ParamRange> ranges;
  ranges.push_back({"lr_c", 0.5, 1.0, 0.7, false,
                    [](TrainConfig& c, double v) { c.lr_c = v; }});
  ranges.push_back({"N_GAi", 10, 60, 30, true,
                    [](TrainConfig& c, double v) { c.n_gai = static_cast<int>(v); }});
  ranges.push_back({"N_h", 2, 6, 3, true,
                    [](TrainConfig& c, double v) { c.n_h = static_cast<int>(v); }});
  ranges.push_back({"N_nh", 3, 20, 10, true,
                    [](TrainConfig& c, double v) { c.n_nh = static_cast<int>(v); }});
  ranges.push_back({"P_sf", 0.9, 0.99, 0.98, false,
                    [](TrainConfig& c, double v) { c.p_sf = v; }});
  ranges.push_back({"N_x", 5, 14, 10, true, [](TrainConfig& c, double v) {
                      const int n = static_cast<int>(v);
                      const int delta = c.nx - c.ny;  // preserve the anisotropy setting
                      c.nx = n;
                      c.ny = std::max(2, n - delta);
                      c.nz = c.ny;
                    }});
  ranges.push_back({"N_x-N_y", 0, 8, 0, true, [](TrainConfig& c, double v) {
                      const int delta = static_cast<int>(v);
                      c.ny = std::max(2, c.nx - delta);
                      c.nz = c.ny;
                    }});
  ranges.push_back({"beta_i", 0.0, 2.0, 0.0, false,
                    [](TrainConfig& c, double v) { c.beta_i = v; }});
  ranges.push_back({"M_g", 0.1, 0.5, 0.1, false,
                    [](TrainConfig& c, double v) { c.m_g = v; }});
  ranges.push_back({"M_m", 0.1, 0.5, 0.1, false,
                    [](TrainConfig& c, double v) { c.m_m = v; }});
  ranges.push_back({"M_l", 0.1, 0.5, 0.1, false,
                    [](TrainConfig& c, double v) { c.m_l = v; }});
  return ranges;
}

MetricRunner training_runner() {
  return [](const TrainConfig& cfg, std::uint64_t seed) {
    TrainConfig run_cfg = cfg;
    run_cfg.seed = seed;
    const TrainResult r = train_mga_msgd(run_cfg);
    return RunMetrics{r.trace.mse_min, r.trace.total_seconds};
  };
}

namespace {

std::vector<double> sweep_levels(const ParamRange& range, int levels) {
  std::vector<double> values;
  for (int i = 0; i < levels; ++i) {
    double v = range.lo + (range.hi - range.lo) * i / (levels - 1);
    if (range.is_integer) v = std::round(v);
    values.push_back(v);
  }
  // Integer rounding can collapse neighbouring levels.
  values.erase(std::unique(values.begin(), values.end()), values.end());
  return values;
}

}  // namespace

SensitivityResult morris_oat(const std::vector<ParamRange>& ranges, int levels,
                             int reps_per_point, std::uint64_t seed,
                             const MetricRunner& runner, const TrainConfig& base) {
  if (levels < 2) throw std::invalid_argument("morris_oat: levels must be >= 2");
  if (reps_per_point < 1) throw std::invalid_argument("morris_oat: reps must be >= 1");

  // Hold every parameter at its base value, then vary one at a time.
  TrainConfig base_cfg = base;
  for (const auto& r : ranges) r.apply(base_cfg, r.base);

  SensitivityResult result;
  result.levels = levels;
  result.reps = reps_per_point;

  for (std::size_t pi = 0; pi < ranges.size(); ++pi) {
    const ParamRange& range = ranges[pi];
    ParamSensitivity ps;
    ps.name = range.name;

    const std::vector<double> values = sweep_levels(range, levels);
    std::array<std::vector<double>, 4> samples;
    for (std::size_t li = 0; li < values.size(); ++li) {
      TrainConfig cfg = base_cfg;
      range.apply(cfg, values[li]);

      std::vector<double> mses, times;
      for (int rep = 0; rep < reps_per_point; ++rep) {
        const std::uint64_t run_seed =
            derive_seed(seed, (pi << 24) ^ (li << 12) ^ static_cast<std::uint64_t>(rep));
        try {
          const RunMetrics m = runner(cfg, run_seed);
          mses.push_back(m.mse);
          times.push_back(m.seconds);
        } catch (const std::exception&) {
          // failed rep; skipped
        }
      }
      if (mses.empty()) {
        ++ps.failed_points;
        ++result.warnings;
        continue;
      }
      std::array<double, 4> metric{};
      metric[0] = 0.0;
      for (double v : mses) metric[0] += v;
      metric[0] /= static_cast<double>(mses.size());
      metric[1] = *std::min_element(mses.begin(), mses.end());
      metric[2] = 0.0;
      for (double v : times) metric[2] += v;
      metric[2] /= static_cast<double>(times.size());
      metric[3] = *std::min_element(times.begin(), times.end());
      ps.level_metrics.push_back(metric);
      for (int m = 0; m < 4; ++m) samples[static_cast<std::size_t>(m)].push_back(metric[m]);
    }

    for (int m = 0; m < 4; ++m) {
      const auto& s = samples[static_cast<std::size_t>(m)];
      if (s.size() >= 2) {
        ps.mu[static_cast<std::size_t>(m)] = morris_mu(s);
        ps.sigma[static_cast<std::size_t>(m)] = morris_sigma(s);
      } else {
        ps.mu[static_cast<std::size_t>(m)] = std::numeric_limits<double>::quiet_NaN();
        ps.sigma[static_cast<std::size_t>(m)] = std::numeric_limits<double>::quiet_NaN();
      }
    }
    result.params.push_back(std::move(ps));
  }
  return result;
}

}  // namespace mgamsgd
