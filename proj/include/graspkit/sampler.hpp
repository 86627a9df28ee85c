#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "graspkit/energy.hpp"
#include "graspkit/metrics.hpp"
#include "graspkit/records.hpp"
#include "graspkit/rng.hpp"

namespace graspkit {

// Tempered MALA over (p, R, q) with per-block step sizes. Temperatures decay
// geometrically to a floor; contact indices are periodically re-drawn.
struct MalaParams {
  double eps_position = 1e-3;  // meters
  double eps_rotation = 1e-2;  // radians, tangent step
  double eps_joints = 1e-2;    // radians
  // Per-block caps on the proposal mean |eps * grad| (truncated-drift MALA).
  // Raw Langevin drift explodes on the stiff penetration cliffs and freezes
  // the chain; truncation keeps proposals local while the MH correction
  // still targets exp(-E/T) exactly.
  double drift_cap_position = 0.01;  // meters
  double drift_cap_rotation = 0.1;   // radians
  double drift_cap_joints = 0.1;     // radians
  double t_start = 1e-2;
  double t_decay = 0.998;
  double t_floor = 1e-5;
  int iterations = 2000;
  int resample_period = 10;    // iterations between contact re-draws, 0 = never
  double resample_prob = 0.1;  // per contact slot
  int contacts_per_object = 3;
  int chains = 64;
  std::uint64_t seed = 0;

  void validate() const;
};

// max(t_floor, t_start * t_decay^iteration); non-increasing in iteration.
double annealing_temperature(const MalaParams& params, int iteration);

// energy is always current for (cfg, contacts).
struct ChainState {
  HandConfiguration cfg;
  ContactAssignment contacts;
  EnergyBreakdown energy;
  std::uint64_t stream_id = 0;
};

// Generic MALA transition over a flat coordinate vector, shared by the hand
// sampler and the statistical tests. Proposal y = x - s.*g + sqrt(2 s T).*xi
// per coordinate; Metropolis-Hastings corrected with the asymmetric Gaussian
// proposal density. energy_grad returns E(y) and fills the gradient at y.
// Coordinates with s = 0 are frozen; all s = 0 degenerates to accepting the
// unchanged state. forced_noise, when given, replaces the xi draw (tests).
struct MalaKernelResult {
  VecXd x;
  double energy = 0.0;
  VecXd grad;  // gradient at the returned x
  bool accepted = false;
  bool nonfinite = false;  // proposal rejected for a non-finite energy/gradient
};
using EnergyGradFn = std::function<double(const VecXd&, VecXd*)>;
MalaKernelResult mala_kernel_step(const VecXd& x, double energy, const VecXd& grad,
                                  const EnergyGradFn& energy_grad, const VecXd& step_scales,
                                  double temperature, Rng& rng,
                                  const VecXd* forced_noise = nullptr);

struct MalaStepResult {
  ChainState state;
  bool accepted = false;
  bool nonfinite = false;
};

// One tempered MALA transition of the hand state in the tangent coordinates
// [position(3), rotation(3), joints(dof)]. The rotation block retracts via
// R' = exp(skew(z)) R; the reverse displacement in the proposal's own tangent
// frame is exactly -z, so the flat-space Metropolis-Hastings correction
// applies unchanged. grad_cache, when non-null, carries the current state's
// gradient in (empty = recompute) and the returned state's gradient out.
MalaStepResult mala_step(const ChainState& state, const MalaParams& params,
                         const EnergyEvaluator& energy, double temperature, Rng& rng,
                         VecXd* grad_cache = nullptr, const VecXd* forced_noise = nullptr);

// Re-draws each contact slot with probability resample_prob, then accepts or
// rejects the whole re-assignment by Metropolis on the total energy at the
// given temperature. Only the force-closure terms change, so the energy
// delta is computed from those alone. surface must be the hand surface at
// state.cfg.
ChainState resample_contacts(const ChainState& state, const MalaParams& params,
                             const EnergyWeights& weights, const HandSurfacePoints& surface,
                             const Scene& scene, double temperature, Rng& rng);

// Randomized pre-manipulation start: base 15-25 cm above the object centroid
// with a little lateral spread, palm axis aimed at the centroid with a random
// roll about it and a small tilt, joints mid-range with noise, contact slots
// drawn uniformly. Consumes a fixed number of rng draws.
ChainState initial_chain_state(const EnergyEvaluator& energy, const MalaParams& params, Rng& rng);

struct ChainResult {
  ChainState best;
  int best_iteration = 0;  // completed iterations when best was recorded, 0 = initial
  int accepted_steps = 0;
  int nonfinite_rejects = 0;
};

// Runs one annealed chain. The trajectory is a pure function of
// (params.seed, chain_id); no other chain influences it.
ChainResult run_chain(const EnergyEvaluator& energy, const MalaParams& params,
                      std::uint64_t chain_id);

// Runs params.chains independent chains (parallelized across up to `jobs`
// threads, 0 = all cores), filters each chain's best state by the
// thresholds, and returns surviving records sorted by (total energy, chain
// id). Output is identical for every jobs value.
std::vector<GraspRecord> synthesize(const Scene& scene, const HandModel& model,
                                    const EnergyWeights& weights, const MalaParams& params,
                                    const FilterThresholds& thresholds, int jobs = 0);

}  // namespace graspkit
