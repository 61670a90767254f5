#include "mgamsgd/trainer.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace mgamsgd {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

LossGradFn make_loss_grad(const LossEvaluator& eval) {
  return [&eval](const Eigen::VectorXd& theta) {
    LossAndGrad lg = eval.loss_and_grad(theta);
    return std::make_pair(lg.breakdown.mse, std::move(lg.grad));
  };
}

}  // namespace

void TrainConfig::validate() const {
  architecture().validate();
  grid().validate();
  if (!(lr_c > 0) || !(lr_f > 0))
    throw std::invalid_argument("config: learning rates must be positive");
  if (n_gai < 0) throw std::invalid_argument("config: N_GAi must be >= 0");
  if (!(p_sf > 0 && p_sf < 1)) throw std::invalid_argument("config: P_sf must lie in (0, 1)");
  for (double m : {m_g, m_m, m_l})
    if (!(m >= 0 && m <= 1))
      throw std::invalid_argument("config: mutation probabilities must lie in [0, 1]");
  if (gamma && !(*gamma >= 0)) throw std::invalid_argument("config: gamma must be >= 0");
  if (fsgd_iters < 0 || csgd_iters < 1)
    throw std::invalid_argument("config: bad iteration counts");
  if (bc_case != 'A' && bc_case != 'B')
    throw std::invalid_argument("config: case must be A or B");
  Material::isotropic(E, nu);
}

int TrainingTrace::accepted_count() const {
  int n = 0;
  for (const auto& g : generations) n += g.accepted ? 1 : 0;
  return n;
}

ProblemSetup build_setup(const TrainConfig& cfg) {
  cfg.validate();
  ProblemSetup setup;
  setup.arch = cfg.architecture();
  setup.mat = Material::isotropic(cfg.E, cfg.nu);
  setup.samples = generate_grid(cfg.grid());
  const double gamma = cfg.effective_gamma(setup.samples.interior.size());
  setup.problem = cfg.bc_case == 'A' ? case_a(gamma, cfg.traction_p, cfg.normalize)
                                     : case_b(gamma, cfg.traction_p, cfg.normalize);
  apply_bcs(setup.problem, setup.samples);
  return setup;
}

TrainResult train_mga_msgd(const TrainConfig& cfg) {
  const auto t0 = Clock::now();
  ProblemSetup setup = build_setup(cfg);
  const LossEvaluator eval(setup.arch, std::move(setup.samples), setup.problem, setup.mat);
  const LossGradFn fn = make_loss_grad(eval);

  Rng rng(cfg.seed);
  Eigen::VectorXd generation = flatten(init_params(setup.arch, rng));

  TrainResult result;
  result.arch = setup.arch;
  TrainingTrace& trace = result.trace;
  trace.mse_i = eval.loss(generation);

  Eigen::VectorXd best = generation;
  double best_loss = trace.mse_i;
  const auto note_best = [&](double loss, const Eigen::VectorXd& params) {
    if (std::isfinite(loss) && loss < best_loss) {
      best_loss = loss;
      best = params;
    }
  };

  double msec = std::numeric_limits<double>::infinity();
  SelectionState selection(eval.param_count());
  const MgaConfig mga_cfg = cfg.mga();
  for (int j = 1; j <= cfg.n_gai; ++j) {
    const auto it0 = Clock::now();
    MgaIterationResult it = mga_iteration(generation, msec, selection, mga_cfg, rng, fn);
    trace.generations.push_back({j, it.candidate_msec, it.accepted, seconds_since(it0)});
    note_best(it.candidate_msec, it.candidate_params);
    if (it.accepted) {
      generation = std::move(it.generation);
      msec = it.msec;
    }
  }
  trace.mse_after_mga = std::isfinite(msec) ? msec : trace.mse_i;

  if (cfg.fsgd_iters > 0) {
    DescentOptions opts;
    opts.lr = cfg.lr_f;
    opts.max_iters = cfg.fsgd_iters;
    opts.guard = cfg.guard;
    DescentResult fsgd = run_descent(generation, fn, opts);
    trace.fsgd_curve = std::move(fsgd.trace);
    note_best(fsgd.best_loss, fsgd.best_params);
  }

  trace.mse_min = best_loss;
  trace.total_seconds = seconds_since(t0);
  result.theta = std::move(best);
  result.final_breakdown = eval.breakdown(result.theta);
  return result;
}

TrainResult train_baseline(Baseline kind, double lr, int iters, const TrainConfig& cfg) {
  const auto t0 = Clock::now();
  ProblemSetup setup = build_setup(cfg);
  const LossEvaluator eval(setup.arch, std::move(setup.samples), setup.problem, setup.mat);
  const LossGradFn fn = make_loss_grad(eval);

  Rng rng(cfg.seed);
  const Eigen::VectorXd theta0 = flatten(init_params(setup.arch, rng));

  DescentOptions opts;
  opts.lr = lr;
  opts.max_iters = iters;
  opts.guard = cfg.guard;
  DescentResult r = kind == Baseline::Sgd ? run_descent(theta0, fn, opts)
                                          : run_adam(theta0, fn, opts);

  TrainResult result;
  result.arch = setup.arch;
  result.trace.mse_i = r.trace.front();
  result.trace.fsgd_curve = std::move(r.trace);
  result.trace.mse_min = r.best_loss;
  result.trace.mse_after_mga = result.trace.mse_i;
  result.trace.total_seconds = seconds_since(t0);
  result.theta = std::move(r.best_params);
  result.final_breakdown = eval.breakdown(result.theta);
  return result;
}

namespace {

// Best-so-far loss curve over wall time.
struct CurveRecorder {
  Clock::time_point t0 = Clock::now();
  double best = std::numeric_limits<double>::infinity();
  std::vector<std::pair<double, double>> curve;

  void note(double loss) {
    if (std::isfinite(loss) && loss < best) best = loss;
    curve.emplace_back(seconds_since(t0), best);
  }
};

CompareMethodResult run_budgeted_mga(const TrainConfig& cfg, std::uint64_t seed,
                                     double budget) {
  TrainConfig run_cfg = cfg;
  run_cfg.seed = seed;
  ProblemSetup setup = build_setup(run_cfg);
  const LossEvaluator eval(setup.arch, std::move(setup.samples), setup.problem, setup.mat);
  const LossGradFn fn = make_loss_grad(eval);

  CompareMethodResult out;
  out.method = "mga_msgd";
  out.seed = seed;
  CurveRecorder rec;

  Rng rng(seed);
  Eigen::VectorXd generation = flatten(init_params(setup.arch, rng));
  rec.note(eval.loss(generation));

  double msec = std::numeric_limits<double>::infinity();
  SelectionState selection(eval.param_count());
  const MgaConfig mga_cfg = run_cfg.mga();
  for (int j = 1; j <= run_cfg.n_gai && seconds_since(rec.t0) < budget; ++j) {
    MgaIterationResult it = mga_iteration(generation, msec, selection, mga_cfg, rng, fn);
    rec.note(it.candidate_msec);
    if (it.accepted) {
      generation = std::move(it.generation);
      msec = it.msec;
    }
  }

  // Fine descent fills the remaining budget; a guard trip resumes from the
  // best iterate of the broken run.
  Eigen::VectorXd current = std::move(generation);
  while (seconds_since(rec.t0) < budget) {
    DescentOptions opts;
    opts.lr = run_cfg.lr_f;
    opts.max_iters = std::numeric_limits<int>::max();
    opts.guard = run_cfg.guard;
    opts.max_seconds = budget - seconds_since(rec.t0);
    opts.on_iteration = [&](int, double loss) { rec.note(loss); };
    DescentResult r = run_descent(std::move(current), fn, opts);
    if (r.status != DescentStatus::Diverged) break;
    current = std::move(r.best_params);
  }
  out.curve = std::move(rec.curve);
  out.final_loss = rec.best;
  return out;
}

CompareMethodResult run_budgeted_baseline(const TrainConfig& cfg, std::uint64_t seed,
                                          double budget, Baseline kind) {
  TrainConfig run_cfg = cfg;
  run_cfg.seed = seed;
  ProblemSetup setup = build_setup(run_cfg);
  const LossEvaluator eval(setup.arch, std::move(setup.samples), setup.problem, setup.mat);
  const LossGradFn fn = make_loss_grad(eval);

  CompareMethodResult out;
  out.method = kind == Baseline::Sgd ? "sgd" : "adam";
  out.seed = seed;
  CurveRecorder rec;

  Rng rng(seed);
  Eigen::VectorXd current = flatten(init_params(setup.arch, rng));
  double lr = kind == Baseline::Sgd ? run_cfg.lr_c : 1e-3;

  while (seconds_since(rec.t0) < budget) {
    DescentOptions opts;
    opts.lr = lr;
    opts.max_iters = std::numeric_limits<int>::max();
    opts.guard = run_cfg.guard;
    opts.max_seconds = budget - seconds_since(rec.t0);
    opts.on_iteration = [&](int, double loss) { rec.note(loss); };
    DescentResult r = kind == Baseline::Sgd ? run_descent(std::move(current), fn, opts)
                                            : run_adam(std::move(current), fn, opts);
    if (r.status != DescentStatus::Diverged) break;
    lr *= 0.1;  // retune and resume from the best iterate seen
    current = std::move(r.best_params);
  }
  out.curve = std::move(rec.curve);
  out.final_loss = rec.best;
  return out;
}

}  // namespace

std::vector<CompareMethodResult> compare_methods(const TrainConfig& cfg,
                                                 double budget_seconds,
                                                 const std::vector<std::uint64_t>& seeds) {
  if (!(budget_seconds > 0)) throw std::invalid_argument("compare: budget must be positive");
  if (seeds.empty()) throw std::invalid_argument("compare: need at least one seed");
  cfg.validate();

  std::vector<CompareMethodResult> results(seeds.size() * 3);
  const auto run_seed = [&](std::size_t si) {
    const std::uint64_t seed = seeds[si];
    const auto guarded = [&](std::size_t slot, const char* name, auto&& fnc) {
      try {
        results[slot] = fnc();
      } catch (const std::exception&) {
        results[slot].method = name;
        results[slot].seed = seed;
        results[slot].failed = true;
      }
    };
    guarded(si * 3 + 0, "mga_msgd",
            [&] { return run_budgeted_mga(cfg, seed, budget_seconds); });
    guarded(si * 3 + 1, "sgd",
            [&] { return run_budgeted_baseline(cfg, seed, budget_seconds, Baseline::Sgd); });
    guarded(si * 3 + 2, "adam",
            [&] { return run_budgeted_baseline(cfg, seed, budget_seconds, Baseline::Adam); });
  };

  const unsigned workers =
      std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(),
                                      static_cast<unsigned>(seeds.size())));
  if (workers <= 1) {
    for (std::size_t si = 0; si < seeds.size(); ++si) run_seed(si);
    return results;
  }
  std::vector<std::thread> pool;
  std::atomic<std::size_t> next{0};
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t si = next.fetch_add(1); si < seeds.size(); si = next.fetch_add(1))
        run_seed(si);
    });
  for (auto& t : pool) t.join();
  return results;
}

}  // namespace mgamsgd
