#include "graspkit/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "graspkit/errors.hpp"
#include "graspkit/parallel.hpp"
#include "graspkit/so3.hpp"
#include "graspkit/version.hpp"

namespace graspkit {

namespace {

constexpr double kTwoPi = 6.283185307179586;

// Log Metropolis-Hastings ratio for the Langevin proposal y = x + z with
// z ~ N(-d_cur, 2 s T) per coordinate, evaluated against the reverse move
// whose displacement is exactly -z and whose mean is -d_prop. Frozen
// coordinates (s = 0) contribute nothing. Returns NaN when any input is
// non-finite; callers treat that as a rejection.
double langevin_log_ratio(const VecXd& z, const VecXd& s, double temperature, double e_cur,
                          double e_prop, const VecXd& d_cur, const VecXd& d_prop) {
  double lr = (e_cur - e_prop) / temperature;
  for (int i = 0; i < z.size(); ++i) {
    if (!(s[i] > 0.0)) continue;
    const double fwd = z[i] + d_cur[i];   // deviation from the forward mean
    const double rev = z[i] - d_prop[i];  // reverse deviation, sign folded in
    lr += (fwd * fwd - rev * rev) / (4.0 * s[i] * temperature);
  }
  return lr;
}

}  // namespace

void MalaParams::validate() const {
  const bool eps_ok = eps_position > 0.0 && std::isfinite(eps_position) && eps_rotation > 0.0 &&
                      std::isfinite(eps_rotation) && eps_joints > 0.0 && std::isfinite(eps_joints);
  if (!eps_ok) throw ConfigError("MALA step sizes must be positive per block");
  const bool caps_ok = drift_cap_position > 0.0 && std::isfinite(drift_cap_position) &&
                       drift_cap_rotation > 0.0 && std::isfinite(drift_cap_rotation) &&
                       drift_cap_joints > 0.0 && std::isfinite(drift_cap_joints);
  if (!caps_ok) throw ConfigError("MALA drift caps must be positive per block");
  if (!(t_floor > 0.0) || !(t_start >= t_floor) || !std::isfinite(t_start))
    throw ConfigError("temperature schedule needs t_start >= t_floor > 0");
  if (!(t_decay > 0.0) || !(t_decay <= 1.0))
    throw ConfigError("temperature decay must lie in (0, 1]");
  if (iterations < 1) throw ConfigError("iteration count must be at least 1");
  if (chains < 1) throw ConfigError("chain count must be at least 1");
  if (resample_period < 0) throw ConfigError("resample period cannot be negative");
  if (!(resample_prob >= 0.0) || !(resample_prob <= 1.0))
    throw ConfigError("per-contact resample probability must lie in [0, 1]");
  if (contacts_per_object < 1) throw ConfigError("need at least one contact per object");
}

double annealing_temperature(const MalaParams& params, int iteration) {
  return std::max(params.t_floor, params.t_start * std::pow(params.t_decay, iteration));
}

MalaKernelResult mala_kernel_step(const VecXd& x, double energy, const VecXd& grad,
                                  const EnergyGradFn& energy_grad, const VecXd& step_scales,
                                  double temperature, Rng& rng, const VecXd* forced_noise) {
  const int n = static_cast<int>(x.size());
  MalaKernelResult out{x, energy, grad, false, false};

  VecXd z(n);
  for (int i = 0; i < n; ++i) {
    const double s = step_scales[i];
    if (!(s > 0.0)) {
      z[i] = 0.0;
      // Keep the draw pattern independent of the step scales.
      if (!forced_noise) rng.gaussian();
      continue;
    }
    const double xi = forced_noise ? (*forced_noise)[i] : rng.gaussian();
    z[i] = -s * grad[i] + std::sqrt(2.0 * s * temperature) * xi;
  }

  const VecXd y = x + z;
  VecXd g_prop(n);
  double e_prop = std::numeric_limits<double>::quiet_NaN();
  try {
    e_prop = energy_grad(y, &g_prop);
  } catch (const NumericalError&) {
    // Treated the same as a non-finite return: auto-reject below.
  }
  const double u = rng.uniform();

  if (!std::isfinite(e_prop) || g_prop.size() != n || !g_prop.allFinite()) {
    out.nonfinite = true;
    return out;
  }
  const double lr = langevin_log_ratio(z, step_scales, temperature, energy, e_prop,
                                       step_scales.cwiseProduct(grad),
                                       step_scales.cwiseProduct(g_prop));
  if (std::log(u) < lr) {
    out.x = y;
    out.energy = e_prop;
    out.grad = g_prop;
    out.accepted = true;
  }
  return out;
}

namespace {

// Per-block Langevin drift scale * eps * grad with the norm of each block
// truncated to scale * cap (position, rotation tangent, joints). The caps
// shrink with the annealing scale as well: where gradients are so steep that
// the cap binds, an unscaled cap would pin the step length no matter how cold
// the chain is, and every move would overshoot the basin and be rejected.
VecXd truncated_drift(const VecXd& grad, const MalaParams& params, int dof, double scale) {
  VecXd drift(grad.size());
  const double eps[3] = {scale * params.eps_position, scale * params.eps_rotation,
                         scale * params.eps_joints};
  const double cap[3] = {scale * params.drift_cap_position, scale * params.drift_cap_rotation,
                         scale * params.drift_cap_joints};
  const int start[4] = {0, 3, 6, 6 + dof};
  for (int b = 0; b < 3; ++b) {
    const int len = start[b + 1] - start[b];
    if (len == 0) continue;
    VecXd block = eps[b] * grad.segment(start[b], len);
    const double norm = block.norm();
    if (norm > cap[b]) block *= cap[b] / norm;
    drift.segment(start[b], len) = block;
  }
  return drift;
}

}  // namespace

MalaStepResult mala_step(const ChainState& state, const MalaParams& params,
                         const EnergyEvaluator& energy, double temperature, Rng& rng,
                         VecXd* grad_cache, const VecXd* forced_noise) {
  const int np = energy.parameter_count();
  const int dof = energy.model().dof;

  // Cool the step sizes with the temperature. Keeping eps fixed while T
  // decays leaves the proposal drift-dominated, and once the capped drift
  // exceeds the basin width every move is rejected and the chain freezes.
  // Scaling drift and noise variance by the same factor keeps the kernel an
  // exact Langevin proposal for e^(-E/T) at every iteration.
  const double anneal = std::min(1.0, temperature / params.t_start);

  VecXd s(np);
  s.segment<3>(0).setConstant(anneal * params.eps_position);
  s.segment<3>(3).setConstant(anneal * params.eps_rotation);
  s.tail(dof).setConstant(anneal * params.eps_joints);

  VecXd g_cur;
  if (grad_cache && grad_cache->size() == np) {
    g_cur = *grad_cache;
  } else {
    energy.evaluate_with_gradient(state.cfg, state.contacts, &g_cur);
  }

  const VecXd d_cur = truncated_drift(g_cur, params, dof, anneal);
  VecXd z(np);
  for (int i = 0; i < np; ++i) {
    const double xi = forced_noise ? (*forced_noise)[i] : rng.gaussian();
    z[i] = -d_cur[i] + std::sqrt(2.0 * s[i] * temperature) * xi;
  }

  HandConfiguration prop = state.cfg;
  prop.base.position += z.segment<3>(0);
  const Mat3d r_new = exp_so3<double>(z.segment<3>(3)) * state.cfg.base.rotation();
  prop.base.orientation = Eigen::Quaterniond(r_new).normalized();
  prop.q += z.tail(dof);

  VecXd g_prop(np);
  EnergyBreakdown e_prop;
  bool finite = true;
  try {
    e_prop = energy.evaluate_with_gradient(prop, state.contacts, &g_prop);
    finite = std::isfinite(e_prop.total) && g_prop.allFinite();
  } catch (const NumericalError&) {
    finite = false;  // the evaluator refuses non-finite states; reject the proposal
  }
  const double u = rng.uniform();

  MalaStepResult out{state, false, false};
  if (!finite) {
    out.nonfinite = true;
    if (grad_cache) *grad_cache = g_cur;
    return out;
  }

  const double lr = langevin_log_ratio(z, s, temperature, state.energy.total, e_prop.total, d_cur,
                                       truncated_drift(g_prop, params, dof, anneal));
  if (std::log(u) < lr) {
    out.state.cfg = prop;
    out.state.energy = e_prop;
    out.accepted = true;
    if (grad_cache) *grad_cache = g_prop;
  } else if (grad_cache) {
    *grad_cache = g_cur;
  }
  return out;
}

namespace {

// Sampling weights for contact proposals: a uniform floor mixed with a
// Gaussian falloff in distance to the object's surface. Pure uniform
// proposals almost never land on the few dozen samples that are actually
// near the object, so good swaps go unproposed; pure distance bias would
// starve escapes from a bad region. The mixture keeps every sample reachable
// and the Metropolis correction below keeps the kernel exact.
std::vector<double> contact_proposal_weights(const HandSurfacePoints& surface,
                                             const ObjectShape& object) {
  constexpr double kSigma = 0.01;  // meters
  const int n = surface.count();
  std::vector<double> w(n);
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double d = object_sdf(object, Vec3d(surface.points.row(i).transpose()));
    w[i] = std::exp(-0.5 * d * d / (kSigma * kSigma));
    sum += w[i];
  }
  // Equal mass to the uniform floor and the distance bias.
  const double floor = sum / n;
  for (double& v : w) v = v + floor;
  return w;
}

int draw_weighted(const std::vector<double>& w, Rng& rng) {
  double total = 0.0;
  for (double v : w) total += v;
  double u = rng.uniform() * total;
  for (size_t i = 0; i < w.size(); ++i) {
    u -= w[i];
    if (u <= 0.0) return static_cast<int>(i);
  }
  return static_cast<int>(w.size()) - 1;
}

}  // namespace

ChainState resample_contacts(const ChainState& state, const MalaParams& params,
                             const EnergyWeights& weights, const HandSurfacePoints& surface,
                             const Scene& scene, double temperature, Rng& rng) {
  const int n_obj = scene.object_count();

  ContactAssignment prop = state.contacts;
  std::vector<bool> changed(n_obj, false);
  double log_q_ratio = 0.0;  // reverse minus forward proposal log-density
  for (int j = 0; j < n_obj; ++j) {
    std::vector<double> w;  // built lazily, once per object that redraws
    for (size_t slot = 0; slot < prop.per_object[j].size(); ++slot) {
      if (!(rng.uniform() < params.resample_prob)) continue;
      if (w.empty()) w = contact_proposal_weights(surface, scene.objects[j]);
      const int old = prop.per_object[j][slot];
      const int fresh = draw_weighted(w, rng);
      prop.per_object[j][slot] = fresh;
      if (fresh != old) log_q_ratio += std::log(w[old]) - std::log(w[fresh]);
    }
    changed[j] = prop.per_object[j] != state.contacts.per_object[j];
  }
  if (std::none_of(changed.begin(), changed.end(), [](bool c) { return c; })) return state;

  ChainState out = state;
  double delta = 0.0;
  std::vector<double> fc_new = state.energy.fc_per_object;
  for (int j = 0; j < n_obj; ++j) {
    if (!changed[j]) continue;
    fc_new[j] =
        force_closure_error(prop.per_object[j], surface, scene.objects[j], weights.lambda_d);
    delta += fc_new[j] - state.energy.fc_per_object[j];
  }

  const double u = rng.uniform();
  if (!std::isfinite(delta)) return state;
  if (std::log(u) < -delta / temperature + log_q_ratio) {
    out.contacts = prop;
    out.energy.fc_per_object = fc_new;
    double total = weights.lambda_p * out.energy.e_p + weights.lambda_sp * out.energy.e_sp +
                   weights.lambda_q * out.energy.e_q;
    for (double fc : fc_new) total += fc;
    out.energy.total = total;
  }
  return out;
}

ChainState initial_chain_state(const EnergyEvaluator& energy, const MalaParams& params, Rng& rng) {
  const HandModel& model = energy.model();
  const Scene& scene = energy.scene();
  if (scene.objects.empty()) throw ConfigError("cannot start a chain on an empty scene");

  Vec3d centroid = Vec3d::Zero();
  for (const ObjectShape& obj : scene.objects) centroid += obj.pose.position;
  centroid /= scene.object_count();

  ChainState state;
  const double lx = rng.uniform(-0.05, 0.05);
  const double ly = rng.uniform(-0.05, 0.05);
  const double height = rng.uniform(0.15, 0.25);
  state.cfg.base.position = centroid + Vec3d(lx, ly, height);

  // Palm axis in the base frame under mid-range joints, so aiming works even
  // when the palm link sits deeper in the tree.
  HandConfiguration probe;
  probe.q = mid_range_joints(model);
  const std::vector<RigidTransform> fk = forward_kinematics(model, probe);
  const Vec3d palm_in_base = fk[model.palm_link].orientation * model.palm_axis;

  const Vec3d aim = (centroid - state.cfg.base.position).normalized();
  const double roll = rng.uniform(0.0, kTwoPi);
  const double tilt_az = rng.uniform(0.0, kTwoPi);
  const double tilt_z = rng.uniform(-1.0, 1.0);
  const double tilt_angle = rng.uniform(-0.5, 0.5);
  const double tilt_r = std::sqrt(std::max(0.0, 1.0 - tilt_z * tilt_z));
  const Vec3d tilt_axis(tilt_r * std::cos(tilt_az), tilt_r * std::sin(tilt_az), tilt_z);

  state.cfg.base.orientation =
      Eigen::Quaterniond(Eigen::AngleAxisd(tilt_angle, tilt_axis)) *
      Eigen::Quaterniond(Eigen::AngleAxisd(roll, aim)) *
      Eigen::Quaterniond::FromTwoVectors(palm_in_base, aim);
  state.cfg.base.orientation.normalize();

  VecXd q = mid_range_joints(model);
  for (int i = 0; i < q.size(); ++i) q[i] += rng.uniform(-0.7, 0.7);
  state.cfg.q = clamp_joints(model, q);

  // Initial contacts live on leaf links (digit tips): pulling tips of
  // distinct digits toward an object curls the hand around it, whereas
  // contacts on the palm or proximal segments drag the hand into one-sided
  // pokes that later resampling cannot escape. Digits are drawn without
  // replacement until exhausted, then the pool resets.
  std::vector<char> is_parent(model.links.size(), 0);
  for (const Link& l : model.links)
    if (l.parent >= 0) is_parent[l.parent] = 1;
  const HandSurfacePoints surf = energy.surface(state.cfg);
  std::vector<std::vector<int>> digits;  // candidate sample indices per leaf link
  for (size_t l = 0; l < model.links.size(); ++l) {
    if (is_parent[l]) continue;
    std::vector<int> samples;
    for (int i = 0; i < surf.count(); ++i)
      if (surf.link[i] == static_cast<int>(l)) samples.push_back(i);
    if (!samples.empty()) digits.push_back(std::move(samples));
  }

  // Each object draws unclaimed digits with a bias toward the nearby ones,
  // so a hand over two objects tends to pull adjacent digits toward each
  // rather than tearing itself across the scene, while a lone object still
  // sees varied digit combinations; the pool refills once every digit is
  // claimed. The sample within a digit stays uniform.
  std::vector<Vec3d> digit_tip(digits.size(), Vec3d::Zero());
  for (size_t d = 0; d < digits.size(); ++d) {
    for (int i : digits[d]) digit_tip[d] += surf.points.row(i).transpose();
    digit_tip[d] /= static_cast<double>(digits[d].size());
  }

  state.contacts.per_object.resize(scene.object_count());
  std::vector<int> pool;
  for (int j = 0; j < scene.object_count(); ++j) {
    auto& list = state.contacts.per_object[j];
    list.resize(params.contacts_per_object);
    for (int& slot : list) {
      if (pool.empty()) {
        pool.resize(digits.size());
        for (size_t d = 0; d < digits.size(); ++d) pool[d] = static_cast<int>(d);
      }
      std::vector<double> w(pool.size());
      for (size_t p = 0; p < pool.size(); ++p) {
        const double dist = (digit_tip[pool[p]] - scene.objects[j].pose.position).norm();
        w[p] = std::exp(-dist / 0.03);
      }
      const size_t pick = static_cast<size_t>(draw_weighted(w, rng));
      const std::vector<int>& samples = digits[pool[pick]];
      pool.erase(pool.begin() + pick);
      slot = samples[rng.uniform_int(static_cast<int>(samples.size()))];
    }
  }

  state.energy = energy.evaluate(state.cfg, state.contacts);
  return state;
}

ChainResult run_chain(const EnergyEvaluator& energy, const MalaParams& params,
                      std::uint64_t chain_id) {
  Rng rng(derive_stream(params.seed, chain_id));

  ChainState state = initial_chain_state(energy, params, rng);
  state.stream_id = chain_id;

  ChainResult out;
  out.best = state;
  out.best_iteration = 0;

  VecXd grad;  // gradient of the current state; emptied when contacts change
  for (int t = 0; t < params.iterations; ++t) {
    const double temperature = annealing_temperature(params, t);
    const MalaStepResult step = mala_step(state, params, energy, temperature, rng, &grad);
    state = step.state;
    out.accepted_steps += step.accepted ? 1 : 0;
    out.nonfinite_rejects += step.nonfinite ? 1 : 0;

    if (params.resample_period > 0 && (t + 1) % params.resample_period == 0) {
      const HandSurfacePoints surface = energy.surface(state.cfg);
      ChainState after = resample_contacts(state, params, energy.weights(), surface,
                                           energy.scene(), temperature, rng);
      if (after.contacts.per_object != state.contacts.per_object) grad.resize(0);
      state = std::move(after);
    }

    if (state.energy.total < out.best.energy.total) {
      out.best = state;
      out.best_iteration = t + 1;
    }
  }
  return out;
}

std::vector<GraspRecord> synthesize(const Scene& scene, const HandModel& model,
                                    const EnergyWeights& weights, const MalaParams& params,
                                    const FilterThresholds& thresholds, int jobs) {
  params.validate();
  weights.validate();
  thresholds.validate();
  scene.validate();
  if (scene.objects.empty()) throw ConfigError("scene has no objects to grasp");

  const EnergyEvaluator energy(model, scene, weights, params.seed);

  std::vector<ChainResult> results(params.chains);
  parallel_for(params.chains, jobs,
               [&](int i) { results[i] = run_chain(energy, params, i); });

  std::vector<GraspRecord> records;
  for (int i = 0; i < params.chains; ++i) {
    const ChainResult& r = results[i];
    const bool fc_ok =
        std::all_of(r.best.energy.fc_per_object.begin(), r.best.energy.fc_per_object.end(),
                    [&](double fc) { return fc <= thresholds.max_fc_per_object; });
    if (!fc_ok) continue;

    const double pen_mm = penetration_depth_mm(model, r.best.cfg, scene, params.seed);
    if (!(pen_mm <= thresholds.max_penetration * 1000.0)) continue;

    const double ratio =
        thresholds.contact_epsilon > 0.0
            ? contact_ratio(model, r.best.cfg, scene, thresholds.contact_epsilon,
                            thresholds.min_contacts, params.seed)
            : 0.0;
    if (!(ratio >= thresholds.min_contact_ratio)) continue;

    GraspRecord rec;
    rec.scene = scene;
    rec.cfg = r.best.cfg;
    rec.contacts = r.best.contacts;
    rec.energy = r.best.energy;
    rec.seed = params.seed;
    rec.chain_id = i;
    rec.iterations = params.iterations;
    rec.best_iteration = r.best_iteration;
    rec.tool_version = kVersion;
    try {
      rec.quality = static_feasibility(model, r.best.cfg, scene, FrictionModel{}, thresholds,
                                       params.seed);
    } catch (const NumericalError&) {
      // Hull failure only costs the optional Q1 report; the thresholds the
      // record was admitted on are already re-measured above.
      rec.quality.penetration_mm = pen_mm;
      rec.quality.contact_ratio = ratio;
      rec.quality.q1_per_object.assign(scene.objects.size(), 0.0);
    }
    records.push_back(std::move(rec));
  }

  std::sort(records.begin(), records.end(), [](const GraspRecord& a, const GraspRecord& b) {
    if (a.energy.total != b.energy.total) return a.energy.total < b.energy.total;
    return a.chain_id < b.chain_id;
  });
  return records;
}

}  // namespace graspkit
