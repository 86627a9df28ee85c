#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "graspkit/errors.hpp"
#include "graspkit/metrics.hpp"
#include "graspkit/records.hpp"
#include "graspkit/rng.hpp"
#include "graspkit/sampler.hpp"
#include "graspkit/version.hpp"

using namespace graspkit;

namespace {

ObjectShape sphere_object(double radius, const Vec3d& pos, std::uint64_t seed, int cloud = 256) {
  RigidTransform pose;
  pose.position = pos;
  return make_object("ball", PrimitiveKind::Sphere, Vec3d(radius, 0, 0), 1.0, pose, seed, cloud);
}

Scene sphere_scene(double radius = 0.03) {
  Scene scene;
  scene.objects.push_back(sphere_object(radius, Vec3d(0.0, 0.0, radius), 11));
  return scene;
}

HandModel box_hand(const Vec3d& half, int samples) {
  HandModel hand;
  Link root;
  root.name = "slab";
  Primitive box;
  box.kind = PrimitiveKind::Box;
  box.dims = half;
  root.collision.push_back(box);
  root.surface_samples = samples;
  hand.links.push_back(root);
  hand.finalize();
  return hand;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// Two-sided Kolmogorov-Smirnov statistic against the standard normal.
double ks_statistic(std::vector<double> samples) {
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (size_t i = 0; i < samples.size(); ++i) {
    const double f = normal_cdf(samples[i]);
    d = std::max(d, std::max((i + 1) / n - f, f - i / n));
  }
  return d;
}

bool same_config(const HandConfiguration& a, const HandConfiguration& b) {
  if ((a.base.position - b.base.position).cwiseAbs().maxCoeff() != 0.0) return false;
  if (a.base.orientation.coeffs() != b.base.orientation.coeffs()) return false;
  if (a.q.size() != b.q.size()) return false;
  for (int i = 0; i < a.q.size(); ++i)
    if (a.q[i] != b.q[i]) return false;
  return true;
}

std::string serialize_all(const std::vector<GraspRecord>& records) {
  std::string out;
  for (const GraspRecord& r : records) out += record_to_line(r) + "\n";
  return out;
}

}  // namespace

TEST_CASE("annealing temperature schedule") {
  MalaParams params;
  CHECK(annealing_temperature(params, 0) == doctest::Approx(1e-2).epsilon(1e-12));

  double prev = annealing_temperature(params, 0);
  for (int t = 1; t <= 5000; t += 7) {
    const double cur = annealing_temperature(params, t);
    CHECK(cur <= prev);
    CHECK(cur >= params.t_floor);
    CHECK(cur == doctest::Approx(std::max(1e-5, 1e-2 * std::pow(0.998, t))).epsilon(1e-12));
    prev = cur;
  }
  // Floor reached: 0.998^t < 1e-3 for t > ~3453.
  CHECK(annealing_temperature(params, 4000) == params.t_floor);
}

TEST_CASE("mala parameter validation") {
  MalaParams ok;
  CHECK_NOTHROW(ok.validate());

  MalaParams p = ok;
  p.eps_position = 0.0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = ok;
  p.eps_rotation = -1e-3;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = ok;
  p.eps_joints = 0.0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = ok;
  p.t_floor = 0.0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = ok;
  p.t_start = 1e-6;  // below the floor
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = ok;
  p.t_decay = 1.5;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = ok;
  p.iterations = 0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = ok;
  p.chains = 0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = ok;
  p.resample_prob = 1.2;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = ok;
  p.contacts_per_object = 0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
}

TEST_CASE("mala kernel") {
  const EnergyGradFn bowl = [](const VecXd& x, VecXd* grad) {
    const VecXd curv = (VecXd(3) << 1.0, 2.0, 5.0).finished();
    *grad = curv.cwiseProduct(x);
    return 0.5 * x.dot(*grad);
  };

  SUBCASE("frozen scales accept the unchanged state") {
    Rng rng(7);
    const VecXd x0 = (VecXd(3) << 0.7, -0.3, 1.2).finished();
    VecXd g0(3);
    const double e0 = bowl(x0, &g0);
    const VecXd zero_scales = VecXd::Zero(3);

    const MalaKernelResult r = mala_kernel_step(x0, e0, g0, bowl, zero_scales, 1.0, rng);
    CHECK(r.accepted);
    CHECK_FALSE(r.nonfinite);
    CHECK(r.x == x0);  // bitwise: the proposal is the current state
    CHECK(r.energy == e0);
  }

  SUBCASE("vanishing scales accept with a vanishing move") {
    Rng rng(7);
    const VecXd x0 = (VecXd(3) << 0.7, -0.3, 1.2).finished();
    VecXd g0(3);
    const double e0 = bowl(x0, &g0);
    const VecXd tiny = VecXd::Constant(3, 1e-30);

    const MalaKernelResult r = mala_kernel_step(x0, e0, g0, bowl, tiny, 1.0, rng);
    CHECK(r.accepted);
    CHECK((r.x - x0).cwiseAbs().maxCoeff() < 1e-12);
  }

  SUBCASE("forced-noiseless steps descend monotonically") {
    Rng rng(3);
    VecXd x = (VecXd(3) << 3.0, -2.0, 1.0).finished();
    VecXd g(3);
    double e = bowl(x, &g);
    const double e_start = e;
    const VecXd scales = VecXd::Constant(3, 0.05);
    const VecXd no_noise = VecXd::Zero(3);

    int accepted = 0;
    for (int t = 0; t < 100; ++t) {
      const MalaKernelResult r = mala_kernel_step(x, e, g, bowl, scales, 1.0, rng, &no_noise);
      CHECK(r.energy <= e);
      if (t == 0) CHECK(r.energy < e);  // strictly lower away from the minimum
      accepted += r.accepted ? 1 : 0;
      x = r.x;
      e = r.energy;
      g = r.grad;
    }
    CHECK(accepted == 100);  // noiseless quadratic proposals always pass the MH test
    // Slowest eigendirection contracts by (1 - 0.05)^100, so energy falls to
    // ~1.4e-5 of the start.
    CHECK(e < 1e-4 * e_start);
  }

  SUBCASE("non-finite proposal energy auto-rejects") {
    const EnergyGradFn walled = [](const VecXd& x, VecXd* grad) -> double {
      grad->setConstant(x.size(), x[0]);
      if (std::abs(x[0]) > 2.0) return std::numeric_limits<double>::quiet_NaN();
      return 0.5 * x[0] * x[0];
    };
    Rng rng(5);
    VecXd x0 = VecXd::Constant(1, 1.9);
    VecXd g0 = VecXd::Constant(1, 1.9);
    const VecXd scales = VecXd::Constant(1, 0.01);
    const VecXd big_noise = VecXd::Constant(1, 1e3);

    const MalaKernelResult r =
        mala_kernel_step(x0, 0.5 * 1.9 * 1.9, g0, walled, scales, 1.0, rng, &big_noise);
    CHECK_FALSE(r.accepted);
    CHECK(r.nonfinite);
    CHECK(r.x == x0);
  }

  SUBCASE("stationary distribution on the 1-D quadratic") {
    const EnergyGradFn line = [](const VecXd& x, VecXd* grad) {
      *grad = x;
      return 0.5 * x[0] * x[0];
    };
    Rng rng(2024);
    VecXd x = VecXd::Constant(1, 3.0);
    VecXd g = x;
    double e = 0.5 * 9.0;
    const VecXd scales = VecXd::Constant(1, 0.8);

    for (int t = 0; t < 2000; ++t) {  // burn-in
      const MalaKernelResult r = mala_kernel_step(x, e, g, line, scales, 1.0, rng);
      x = r.x;
      e = r.energy;
      g = r.grad;
    }

    const int kept = 100000;
    const int stride = 8;  // decorrelates; KS assumes near-independent samples
    std::vector<double> samples;
    samples.reserve(kept);
    long accepted = 0;
    for (int t = 0; t < kept * stride; ++t) {
      const MalaKernelResult r = mala_kernel_step(x, e, g, line, scales, 1.0, rng);
      accepted += r.accepted ? 1 : 0;
      x = r.x;
      e = r.energy;
      g = r.grad;
      if ((t + 1) % stride == 0) samples.push_back(x[0]);
    }

    const double rate = static_cast<double>(accepted) / (kept * stride);
    CHECK(rate > 0.3);
    CHECK(rate < 0.95);

    double mean = 0.0;
    for (double v : samples) mean += v;
    mean /= samples.size();
    double var = 0.0;
    for (double v : samples) var += (v - mean) * (v - mean);
    var /= samples.size();
    CHECK(var == doctest::Approx(1.0).epsilon(0.05));

    const double n = static_cast<double>(samples.size());
    const double critical = 1.62762 / (std::sqrt(n) + 0.12 + 0.11 / std::sqrt(n));
    CHECK(ks_statistic(samples) < critical);
  }
}

TEST_CASE("hand mala step") {
  const HandModel hand = make_reference_hand();
  const Scene scene = sphere_scene();
  const EnergyWeights weights;
  MalaParams params;
  params.seed = 42;
  const EnergyEvaluator energy(hand, scene, weights, params.seed);

  Rng init_rng(derive_stream(params.seed, 0));
  ChainState state = initial_chain_state(energy, params, init_rng);

  SUBCASE("epsilon to zero accepts in place") {
    MalaParams frozen = params;
    frozen.eps_position = frozen.eps_rotation = frozen.eps_joints = 1e-30;
    Rng rng(9);
    const MalaStepResult r = mala_step(state, frozen, energy, 1e-2, rng);
    CHECK(r.accepted);
    CHECK((r.state.cfg.base.position - state.cfg.base.position).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((r.state.cfg.q - state.cfg.q).cwiseAbs().maxCoeff() < 1e-12);
  }

  SUBCASE("forced-noiseless descent is monotone") {
    MalaParams gentle = params;
    gentle.eps_position = 1e-4;
    gentle.eps_rotation = 1e-3;
    gentle.eps_joints = 1e-3;
    Rng rng(17);
    const VecXd no_noise = VecXd::Zero(energy.parameter_count());
    VecXd grad;
    ChainState cur = state;
    double prev = cur.energy.total;
    for (int t = 0; t < 100; ++t) {
      const MalaStepResult r =
          mala_step(cur, gentle, energy, 1e-2, rng, &grad, &no_noise);
      CHECK(r.state.energy.total <= prev + 1e-12);
      cur = r.state;
      prev = cur.energy.total;
    }
    CHECK(prev < state.energy.total);  // made real progress downhill
  }

  SUBCASE("identical seeds give identical transitions") {
    VecXd grad_a, grad_b;
    Rng rng_a(1234), rng_b(1234);
    const MalaStepResult a = mala_step(state, params, energy, 5e-3, rng_a, &grad_a);
    const MalaStepResult b = mala_step(state, params, energy, 5e-3, rng_b, &grad_b);
    CHECK(a.accepted == b.accepted);
    CHECK(a.state.energy.total == b.state.energy.total);
    CHECK(same_config(a.state.cfg, b.state.cfg));
    CHECK(grad_a == grad_b);
  }

  SUBCASE("non-finite proposal auto-rejects and preserves the state") {
    Rng rng(3);
    VecXd bad_noise = VecXd::Zero(energy.parameter_count());
    bad_noise[0] = std::numeric_limits<double>::infinity();
    const MalaStepResult r = mala_step(state, params, energy, 1e-2, rng, nullptr, &bad_noise);
    CHECK_FALSE(r.accepted);
    CHECK(r.nonfinite);
    CHECK(same_config(r.state.cfg, state.cfg));
    CHECK(r.state.energy.total == state.energy.total);
  }
}

TEST_CASE("contact resampling") {
  // Single box link hovering over the sphere; 12 samples keep the exhaustive
  // assignment oracle tiny.
  const HandModel hand = box_hand(Vec3d(0.025, 0.025, 0.008), 12);
  const Scene scene = sphere_scene(0.03);
  const EnergyWeights weights;
  MalaParams params;
  params.contacts_per_object = 3;
  const std::uint64_t seed = 5;
  const EnergyEvaluator energy(hand, scene, weights, seed);

  HandConfiguration cfg;
  cfg.base.position = Vec3d(0.0, 0.0, 0.075);  // box bottom ~7 mm above the sphere top
  cfg.q = VecXd();

  ChainState state;
  state.cfg = cfg;
  state.contacts.per_object = {{0, 1, 2}};
  state.energy = energy.evaluate(cfg, state.contacts);
  const HandSurfacePoints surface = energy.surface(cfg);

  SUBCASE("zero replacement probability is a no-op") {
    MalaParams p0 = params;
    p0.resample_prob = 0.0;
    Rng rng(21);
    const ChainState out = resample_contacts(state, p0, weights, surface, scene, 1e-2, rng);
    CHECK(out.contacts.per_object == state.contacts.per_object);
    CHECK(out.energy.total == state.energy.total);
  }

  SUBCASE("cold chain only ever descends and does improve") {
    MalaParams cold = params;
    cold.resample_prob = 0.6;
    Rng rng(77);
    ChainState cur = state;
    double prev = cur.energy.total;
    bool improved = false;
    for (int round = 0; round < 400; ++round) {
      cur = resample_contacts(cur, cold, weights, surface, scene, 1e-300, rng);
      CHECK(cur.energy.total <= prev + 1e-12);
      improved = improved || cur.energy.total < prev - 1e-12;
      prev = cur.energy.total;
    }
    CHECK(improved);
  }

  SUBCASE("metropolis chain reaches the exhaustive assignment optimum") {
    const ObjectShape& ball = scene.objects[0];

    double oracle_distinct = std::numeric_limits<double>::infinity();
    double oracle_any = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 12; ++i)
      for (int j = i; j < 12; ++j)
        for (int k = j; k < 12; ++k) {
          const double fc = force_closure_error({i, j, k}, surface, ball, weights.lambda_d);
          oracle_any = std::min(oracle_any, fc);
          if (i != j && j != k) oracle_distinct = std::min(oracle_distinct, fc);
        }

    MalaParams warm = params;
    warm.resample_prob = 0.3;
    Rng rng(2718);
    ChainState cur = state;
    double best = cur.energy.fc_per_object[0];
    for (int round = 0; round < 1000; ++round) {
      cur = resample_contacts(cur, warm, weights, surface, scene, 1e-2, rng);
      best = std::min(best, cur.energy.fc_per_object[0]);
    }

    CHECK(best >= oracle_any - 1e-12);
    CHECK(best <= 1.05 * oracle_distinct);
  }
}

TEST_CASE("initial chain state geometry") {
  const HandModel hand = make_reference_hand();
  const Scene scene = sphere_scene();
  const EnergyWeights weights;
  MalaParams params;
  const EnergyEvaluator energy(hand, scene, weights, 3);

  const Vec3d centroid = scene.objects[0].pose.position;
  HandConfiguration probe;
  probe.q = mid_range_joints(hand);
  const Vec3d palm_in_base =
      forward_kinematics(hand, probe)[hand.palm_link].orientation * hand.palm_axis;

  Rng rng(404);
  for (int draw = 0; draw < 200; ++draw) {
    const ChainState state = initial_chain_state(energy, params, rng);
    const Vec3d offset = state.cfg.base.position - centroid;
    CHECK(offset.z() >= 0.15);
    CHECK(offset.z() <= 0.25);
    CHECK(std::abs(offset.x()) <= 0.05);
    CHECK(std::abs(offset.y()) <= 0.05);

    // Palm points at the centroid up to the sampled tilt (0.2 rad).
    const Vec3d aim = (centroid - state.cfg.base.position).normalized();
    const Vec3d palm_world = state.cfg.base.orientation * palm_in_base;
    CHECK(palm_world.dot(aim) > std::cos(0.25));

    const VecXd clamped = clamp_joints(hand, state.cfg.q);
    CHECK((clamped - state.cfg.q).cwiseAbs().maxCoeff() == 0.0);

    REQUIRE(state.contacts.per_object.size() == 1);
    CHECK(static_cast<int>(state.contacts.per_object[0].size()) == params.contacts_per_object);
    for (int idx : state.contacts.per_object[0]) {
      CHECK(idx >= 0);
      CHECK(idx < energy.surface_count());
    }

    const EnergyBreakdown recomputed = energy.evaluate(state.cfg, state.contacts);
    CHECK(state.energy.total == recomputed.total);
  }
}

TEST_CASE("run_chain is a pure function of seed and chain id") {
  const HandModel hand = make_reference_hand();
  const Scene scene = sphere_scene();
  const EnergyWeights weights;
  MalaParams params;
  params.iterations = 60;
  params.seed = 99;
  const EnergyEvaluator energy(hand, scene, weights, params.seed);

  const ChainResult a = run_chain(energy, params, 3);
  const ChainResult b = run_chain(energy, params, 3);
  CHECK(a.best.energy.total == b.best.energy.total);
  CHECK(same_config(a.best.cfg, b.best.cfg));
  CHECK(a.best.contacts.per_object == b.best.contacts.per_object);
  CHECK(a.best_iteration == b.best_iteration);
  CHECK(a.accepted_steps == b.accepted_steps);
  CHECK(a.nonfinite_rejects == b.nonfinite_rejects);

  const ChainResult c = run_chain(energy, params, 4);
  CHECK((c.best.energy.total != a.best.energy.total));  // different stream, different path

  // The chain improves on its random start (annealed descent).
  Rng rng(derive_stream(params.seed, 3));
  const ChainState start = initial_chain_state(energy, params, rng);
  CHECK(a.best.energy.total <= start.energy.total);
}

TEST_CASE("synthesize") {
  const HandModel hand = make_reference_hand();
  const Scene scene = sphere_scene();
  const EnergyWeights weights;

  MalaParams params;
  params.chains = 6;
  params.iterations = 150;
  params.seed = 7;

  FilterThresholds loose;
  loose.max_fc_per_object = 1e9;
  loose.max_penetration = 1.0;
  loose.min_contact_ratio = 0.0;
  loose.min_contacts = 1;

  SUBCASE("records carry provenance and arrive sorted") {
    const std::vector<GraspRecord> records = synthesize(scene, hand, weights, params, loose, 1);
    REQUIRE(records.size() == 6);  // loose thresholds keep every chain
    for (size_t i = 0; i < records.size(); ++i) {
      const GraspRecord& r = records[i];
      CHECK(r.seed == params.seed);
      CHECK(r.iterations == params.iterations);
      CHECK(r.best_iteration >= 0);
      CHECK(r.best_iteration <= params.iterations);
      CHECK(r.tool_version == std::string(kVersion));
      CHECK(r.scene.object_count() == 1);

      double total = weights.lambda_p * r.energy.e_p + weights.lambda_sp * r.energy.e_sp +
                     weights.lambda_q * r.energy.e_q;
      for (double fc : r.energy.fc_per_object) total += fc;
      CHECK(r.energy.total == doctest::Approx(total).epsilon(1e-12));

      if (i > 0) CHECK(records[i - 1].energy.total <= r.energy.total);
    }

    // Chain ids are a permutation of 0..5.
    std::vector<int> ids;
    for (const GraspRecord& r : records) ids.push_back(r.chain_id);
    std::sort(ids.begin(), ids.end());
    CHECK(ids == std::vector<int>({0, 1, 2, 3, 4, 5}));
  }

  SUBCASE("output is byte-identical across runs and jobs settings") {
    const std::string once = serialize_all(synthesize(scene, hand, weights, params, loose, 1));
    const std::string again = serialize_all(synthesize(scene, hand, weights, params, loose, 1));
    const std::string threaded = serialize_all(synthesize(scene, hand, weights, params, loose, 3));
    CHECK(once == again);
    CHECK(once == threaded);
    CHECK(once.find("\"tool_version\"") != std::string::npos);
  }

  SUBCASE("chain results do not depend on the number of chains") {
    MalaParams two = params;
    two.chains = 2;
    MalaParams six = params;
    six.chains = 6;
    const std::vector<GraspRecord> small = synthesize(scene, hand, weights, two, loose, 1);
    const std::vector<GraspRecord> large = synthesize(scene, hand, weights, six, loose, 2);

    for (const GraspRecord& s : small) {
      bool matched = false;
      for (const GraspRecord& l : large) {
        if (l.chain_id != s.chain_id) continue;
        matched = record_to_line(l) == record_to_line(s);
      }
      CHECK(matched);
    }
  }

  SUBCASE("vacuously strict thresholds reject everything") {
    FilterThresholds strict;
    strict.max_penetration = 0.0;
    strict.min_contact_ratio = 1.0;
    strict.contact_epsilon = 0.0;
    const std::vector<GraspRecord> records = synthesize(scene, hand, weights, params, strict, 1);
    CHECK(records.empty());
  }

  SUBCASE("filter soundness holds under re-measurement") {
    FilterThresholds mild;
    mild.max_fc_per_object = 1e9;
    mild.max_penetration = 0.05;  // 50 mm, still a real gate
    mild.min_contact_ratio = 0.0;
    mild.min_contacts = 1;
    const std::vector<GraspRecord> records = synthesize(scene, hand, weights, params, mild, 1);
    for (const GraspRecord& r : records) {
      const double pen = penetration_depth_mm(hand, r.cfg, scene, params.seed);
      CHECK(pen <= mild.max_penetration * 1000.0);
      const double ratio =
          contact_ratio(hand, r.cfg, scene, mild.contact_epsilon, mild.min_contacts, params.seed);
      CHECK(ratio >= mild.min_contact_ratio);
      for (double fc : r.energy.fc_per_object) CHECK(fc <= mild.max_fc_per_object);
    }
  }

  SUBCASE("an object under the table propagates a placement error") {
    Scene sunken;
    sunken.objects.push_back(sphere_object(0.03, Vec3d(0.0, 0.0, 0.01), 11));
    CHECK_THROWS_AS(synthesize(sunken, hand, weights, params, loose, 1), PlacementError);
  }
}
