#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

#include "mgamsgd/optim.hpp"
#include "mgamsgd/rng.hpp"

namespace mgamsgd {

/// Binary form of one learnable parameter: a sign gene plus 24 magnitude
/// genes. Gene k (1-based) carries weight 2^(4-k), so the magnitude covers
/// [0, 16 - 2^-20] at resolution 2^-20 and round-to-nearest encoding stays
/// within 2^-21 of any value in [-16, 16] away from the saturation edge.
struct Chromosome {
  static constexpr int kBits = 24;
  static constexpr int kGlobalBits = 4;   // genes 1..4 plus the sign: large steps
  static constexpr int kMediumBits = 8;   // genes 5..12
  static constexpr double kResolution = 0x1.0p-20;
  static constexpr double kMaxMagnitude = (double((1u << kBits) - 1)) * kResolution;

  bool negative = false;
  std::uint32_t bits = 0;  // bit (kBits - k) of this word stores gene k

  bool gene(int k) const;        // k = 0 is the sign gene, 1..24 the magnitude genes
  void flip_gene(int k);
  bool operator==(const Chromosome&) const = default;
};

/// Round-to-nearest fixed-point encoding, saturating outside [-16, 16].
Chromosome encode(double value);
double decode(const Chromosome& ch);

/// Probabilities of the three mutation scales: global (sign and genes 1..4),
/// medium (genes 5..12), local (genes 13..24).
struct MutationConfig {
  double m_g = 0.3;
  double m_m = 0.3;
  double m_l = 0.3;
};

/// Three independent trials, one per scale; each trial that fires flips one
/// uniformly drawn gene of its group, so at most three genes change.
Chromosome mutate(Chromosome ch, const MutationConfig& cfg, Rng& rng);

/// Per-parameter pick counts with the "at most twice between clears" rule.
class SelectionState {
 public:
  explicit SelectionState(int n_params);

  int pick_count(int index) const { return counts_[static_cast<std::size_t>(index)]; }
  int clears() const { return clears_; }
  int size() const { return static_cast<int>(counts_.size()); }
  bool exhausted() const;  // every parameter at the pick limit
  void record_pick(int index) { ++counts_[static_cast<std::size_t>(index)]; }
  void clear_history();

  static constexpr int kPickLimit = 2;

 private:
  std::vector<int> counts_;
  int clears_ = 0;
};

/// |dC/dtheta| per parameter; the MGA's replacement for GA fitness.
Eigen::VectorXd importance(const Eigen::VectorXd& grad);

/// Draws `count` tournament winners by importance among eligible parameters
/// (pick count below the limit, not yet picked in this call). Ties break
/// toward the lowest flat index. When every parameter is exhausted the
/// history is cleared and selection proceeds.
std::vector<int> tournament_select(const Eigen::VectorXd& importance_values, int count,
                                   SelectionState& state, Rng& rng, int tournament_size);

struct MgaConfig {
  double p_sf = 0.97;       // surviving population fraction
  int n_gai = 30;           // MGA iterations
  MutationConfig mutation;
  int tournament_size = 3;
  int csgd_iters = 50;      // qualification descent length
  double lr_c = 0.6;        // coarse learning rate
  DivergenceGuard guard;
};

/// Number of parameters replaced per iteration: max(1, round((1-P_sf) n)).
int selected_count(double p_sf, int n_params);

struct QualifyResult {
  bool accepted = false;
  Eigen::VectorXd params;  // post-CSGD arrangement when accepted
  double msec = 0.0;       // MSE_c of the candidate's CSGD run
  DescentStatus status = DescentStatus::Completed;
};

/// Runs the coarse-level SGD on a candidate and accepts it only if the
/// resulting MSE_c improves on the previous generation's. Divergence counts
/// as rejection. Pass +inf as prev_msec for the first generation.
QualifyResult qualify(const Eigen::VectorXd& candidate, double prev_msec,
                      const LossGradFn& fn, const MgaConfig& cfg);

struct MgaIterationResult {
  Eigen::VectorXd generation;       // accepted arrangement, or the input when rejected
  double msec = 0.0;
  bool accepted = false;
  double candidate_msec = 0.0;      // MSE_c recorded for the candidate
  Eigen::VectorXd candidate_params; // post-CSGD iterate owning candidate_msec
  std::vector<int> selected;        // flat indices replaced this iteration
  Eigen::VectorXd candidate;        // spliced candidate before CSGD
};

/// One MGA step: importance at the current generation, tournament selection,
/// encode-mutate-decode of the selected parameters, splice, CSGD-based
/// qualification. Unselected parameters survive unchanged.
MgaIterationResult mga_iteration(const Eigen::VectorXd& generation, double msec,
                                 SelectionState& state, const MgaConfig& cfg, Rng& rng,
                                 const LossGradFn& fn);

}  // namespace mgamsgd
