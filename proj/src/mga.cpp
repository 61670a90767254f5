#include "mgamsgd/mga.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mgamsgd {

bool Chromosome::gene(int k) const {
  if (k == 0) return negative;
  return (bits >> (kBits - k)) & 1u;
}

void Chromosome::flip_gene(int k) {
  if (k == 0)
    negative = !negative;
  else
    bits ^= (1u << (kBits - k));
}

Chromosome encode(double value) {
  Chromosome ch;
  ch.negative = value < 0.0;
  const double magnitude = std::min(std::abs(value), 16.0);
  auto scaled = static_cast<std::uint64_t>(std::llround(magnitude / Chromosome::kResolution));
  const std::uint64_t max_bits = (1u << Chromosome::kBits) - 1;
  ch.bits = static_cast<std::uint32_t>(std::min(scaled, max_bits));
  return ch;
}

double decode(const Chromosome& ch) {
  const double magnitude = static_cast<double>(ch.bits) * Chromosome::kResolution;
  return ch.negative ? -magnitude : magnitude;
}

Chromosome mutate(Chromosome ch, const MutationConfig& cfg, Rng& rng) {
  // Draw order: global trial, medium trial, local trial; a gene index is
  // drawn only when the trial fires.
  if (uniform01(rng) < cfg.m_g) {
    const int gene = static_cast<int>(uniform_index(rng, Chromosome::kGlobalBits + 1));
    ch.flip_gene(gene);  // 0 is the sign
  }
  if (uniform01(rng) < cfg.m_m) {
    const int gene = Chromosome::kGlobalBits + 1 +
                     static_cast<int>(uniform_index(rng, Chromosome::kMediumBits));
    ch.flip_gene(gene);
  }
  if (uniform01(rng) < cfg.m_l) {
    const int first_local = Chromosome::kGlobalBits + Chromosome::kMediumBits + 1;
    const int gene = first_local +
                     static_cast<int>(uniform_index(rng, Chromosome::kBits -
                                                             (first_local - 1)));
    ch.flip_gene(gene);
  }
  return ch;
}

SelectionState::SelectionState(int n_params) {
  if (n_params < 1) throw std::invalid_argument("selection: need at least one parameter");
  counts_.assign(static_cast<std::size_t>(n_params), 0);
}

bool SelectionState::exhausted() const {
  return std::all_of(counts_.begin(), counts_.end(),
                     [](int c) { return c >= kPickLimit; });
}

void SelectionState::clear_history() {
  std::fill(counts_.begin(), counts_.end(), 0);
  ++clears_;
}

Eigen::VectorXd importance(const Eigen::VectorXd& grad) { return grad.cwiseAbs(); }

std::vector<int> tournament_select(const Eigen::VectorXd& importance_values, int count,
                                   SelectionState& state, Rng& rng,
                                   int tournament_size) {
  if (count < 1) throw std::invalid_argument("tournament_select: count must be >= 1");
  if (tournament_size < 2)
    throw std::invalid_argument("tournament_select: tournament_size must be >= 2");
  const int n = state.size();
  if (importance_values.size() != n)
    throw std::invalid_argument("tournament_select: importance size mismatch");
  if (count > n) throw std::invalid_argument("tournament_select: count exceeds population");

  std::vector<char> picked_this_call(static_cast<std::size_t>(n), 0);
  std::vector<int> selected;
  selected.reserve(static_cast<std::size_t>(count));
  std::vector<int> eligible;
  eligible.reserve(static_cast<std::size_t>(n));

  for (int pick = 0; pick < count; ++pick) {
    eligible.clear();
    for (int i = 0; i < n; ++i)
      if (state.pick_count(i) < SelectionState::kPickLimit && !picked_this_call[i])
        eligible.push_back(i);
    if (eligible.empty()) {
      // Allow a within-call repeat rather than clearing early; the history is
      // cleared only once every parameter has reached the pick limit.
      for (int i = 0; i < n; ++i)
        if (state.pick_count(i) < SelectionState::kPickLimit) eligible.push_back(i);
    }
    if (eligible.empty()) {
      state.clear_history();
      for (int i = 0; i < n; ++i)
        if (!picked_this_call[i]) eligible.push_back(i);
    }

    // Uniform draw of min(tournament_size, |eligible|) distinct entrants.
    const auto entrants =
        std::min<std::size_t>(static_cast<std::size_t>(tournament_size), eligible.size());
    for (std::size_t t = 0; t < entrants; ++t) {
      const std::size_t j = t + uniform_index(rng, eligible.size() - t);
      std::swap(eligible[t], eligible[j]);
    }
    int winner = eligible[0];
    for (std::size_t t = 1; t < entrants; ++t) {
      const int c = eligible[t];
      const double vi = importance_values[c];
      const double vw = importance_values[winner];
      if (vi > vw || (vi == vw && c < winner)) winner = c;
    }

    state.record_pick(winner);
    picked_this_call[static_cast<std::size_t>(winner)] = 1;
    selected.push_back(winner);
  }
  return selected;
}

int selected_count(double p_sf, int n_params) {
  const auto count = std::lround((1.0 - p_sf) * n_params);
  return static_cast<int>(std::max<long>(1, count));
}

QualifyResult qualify(const Eigen::VectorXd& candidate, double prev_msec,
                      const LossGradFn& fn, const MgaConfig& cfg) {
  DescentOptions opts;
  opts.lr = cfg.lr_c;
  opts.max_iters = cfg.csgd_iters;
  opts.guard = cfg.guard;
  DescentResult r = run_descent(candidate, fn, opts);

  // The guard breaks a diverging run and hands back the lowest-loss iterate;
  // qualification judges that iterate, so a run that improved before blowing
  // up can still found the next generation.
  QualifyResult q;
  q.status = r.status;
  q.msec = r.status == DescentStatus::Completed ? r.trace.back() : r.best_loss;
  q.accepted = std::isfinite(q.msec) && q.msec < prev_msec;
  q.params = std::move(r.params);
  return q;
}

MgaIterationResult mga_iteration(const Eigen::VectorXd& generation, double msec,
                                 SelectionState& state, const MgaConfig& cfg, Rng& rng,
                                 const LossGradFn& fn) {
  MgaIterationResult out;
  const auto [loss, grad] = fn(generation);
  (void)loss;
  const Eigen::VectorXd imp = importance(grad);

  const int count = selected_count(cfg.p_sf, static_cast<int>(generation.size()));
  out.selected = tournament_select(imp, count, state, rng, cfg.tournament_size);

  out.candidate = generation;
  for (const int idx : out.selected) {
    const Chromosome offspring = mutate(encode(out.candidate[idx]), cfg.mutation, rng);
    out.candidate[idx] = decode(offspring);
  }

  QualifyResult q = qualify(out.candidate, msec, fn, cfg);
  out.candidate_msec = q.msec;
  out.candidate_params = std::move(q.params);
  out.accepted = q.accepted;
  if (q.accepted) {
    out.generation = out.candidate_params;
    out.msec = q.msec;
  } else {
    out.generation = generation;
    out.msec = msec;
  }
  return out;
}

}  // namespace mgamsgd
