#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "graspkit/energy.hpp"
#include "graspkit/rng.hpp"

using namespace graspkit;

namespace {

RigidTransform at(double x, double y, double z) {
  RigidTransform t;
  t.position = Vec3d(x, y, z);
  return t;
}

RigidTransform random_pose(Rng& rng, double span, double z_lo = 0.05) {
  RigidTransform t;
  t.position = Vec3d(rng.uniform(-span, span), rng.uniform(-span, span), rng.uniform(z_lo, span + z_lo));
  Eigen::Quaterniond q(rng.gaussian(), rng.gaussian(), rng.gaussian(), rng.gaussian());
  q.normalize();
  t.orientation = q;
  return t;
}

HandSurfacePoints synthetic_surface(const std::vector<Vec3d>& pts) {
  HandSurfacePoints s;
  s.points.resize(pts.size(), 3);
  s.normals.resize(pts.size(), 3);
  s.normals.setZero();
  for (size_t i = 0; i < pts.size(); ++i) {
    s.points.row(i) = pts[i].transpose();
    s.link.push_back(0);
  }
  return s;
}

// A small tabletop scene with a resting sphere and box, hand-sized.
Scene small_scene() {
  Scene scene;
  scene.objects.push_back(
      make_object("ball", PrimitiveKind::Sphere, Vec3d(0.03, 0, 0), 1.0, at(0.0, 0.0, 0.03), 5));
  scene.objects.push_back(make_object("brick", PrimitiveKind::Box, Vec3d(0.025, 0.02, 0.015), 1.0,
                                      at(0.09, 0.02, 0.015), 6));
  return scene;
}

ContactAssignment random_contacts(Rng& rng, int objects, int n_c, int surface_count) {
  ContactAssignment c;
  c.per_object.resize(objects);
  for (int j = 0; j < objects; ++j)
    for (int i = 0; i < n_c; ++i) c.per_object[j].push_back(rng.uniform_int(surface_count));
  return c;
}

// Hand hovering palm-down over the scene center, joints mid-range with noise.
HandConfiguration hover_cfg(const HandModel& hand, Rng& rng, double height) {
  HandConfiguration cfg;
  cfg.q = mid_range_joints(hand);
  for (int i = 0; i < cfg.q.size(); ++i) cfg.q[i] += 0.15 * rng.gaussian();
  cfg.q = clamp_joints(hand, cfg.q);
  cfg.base.position = Vec3d(rng.uniform(-0.03, 0.03), rng.uniform(-0.03, 0.03), height);
  cfg.base.orientation =
      Eigen::Quaterniond(Eigen::AngleAxisd(M_PI, Vec3d::UnitX())) *
      Eigen::Quaterniond(Eigen::AngleAxisd(rng.uniform(0, 2 * M_PI), Vec3d::UnitZ()));
  return cfg;
}

VecXd fd_gradient(const EnergyEvaluator& ev, const HandConfiguration& cfg,
                  const ContactAssignment& contacts, double h) {
  const int np = ev.parameter_count();
  std::vector<long double> params(np, 0.0L);
  params[0] = cfg.base.position.x();
  params[1] = cfg.base.position.y();
  params[2] = cfg.base.position.z();
  for (int i = 0; i < cfg.q.size(); ++i) params[6 + i] = cfg.q[i];
  const Mat3d R0 = cfg.base.orientation.toRotationMatrix();
  VecXd g(np);
  std::vector<long double> fc;
  long double ep, esp, eq, tp, tm;
  for (int k = 0; k < np; ++k) {
    const long double save = params[k];
    params[k] = save + h;
    ev.evaluate_t<long double>(R0, params.data(), contacts, &fc, &ep, &esp, &eq, &tp);
    params[k] = save - h;
    ev.evaluate_t<long double>(R0, params.data(), contacts, &fc, &ep, &esp, &eq, &tm);
    params[k] = save;
    g[k] = static_cast<double>((tp - tm) / (2.0L * h));
  }
  return g;
}

}  // namespace

TEST_CASE("force closure vanishes for antipodal sphere contacts") {
  const ObjectShape ball =
      make_object("ball", PrimitiveKind::Sphere, Vec3d(0.03, 0, 0), 1.0, at(0.1, 0.2, 0.3), 1);
  const Vec3d c = ball.pose.position;
  const HandSurfacePoints surf = synthetic_surface({c + Vec3d(0.03, 0, 0), c - Vec3d(0.03, 0, 0)});
  const double e = force_closure_error({0, 1}, surf, ball, 100.0);
  CHECK(e < 1e-24);
}

TEST_CASE("single-contact closure error equals one plus the squared torque") {
  // On a sphere the lever arm is parallel to the normal, so the torque term
  // vanishes and the error is exactly 1.
  const ObjectShape ball =
      make_object("ball", PrimitiveKind::Sphere, Vec3d(0.05, 0, 0), 1.0, at(0, 0, 0.2), 1);
  const HandSurfacePoints one =
      synthetic_surface({ball.pose.position + Vec3d(0, 0.05, 0)});
  CHECK(force_closure_error({0}, one, ball, 100.0) == doctest::Approx(1.0).epsilon(1e-12));

  // On a box face an off-center contact leaves a lever: r x n has magnitude
  // equal to the tangential offset.
  const ObjectShape brick =
      make_object("brick", PrimitiveKind::Box, Vec3d(0.04, 0.03, 0.02), 1.0, at(0, 0, 0.3), 2);
  const Vec3d x = brick.pose.position + Vec3d(0.01, 0.005, 0.02);  // on the +z face
  const HandSurfacePoints two = synthetic_surface({x});
  const Vec3d r = x - brick.pose.position;
  const Vec3d n(0, 0, -1);
  const double expect = 1.0 + r.cross(n).squaredNorm();
  CHECK(force_closure_error({0}, two, brick, 100.0) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("closure error matches an explicit wrench-matrix oracle") {
  Rng rng(55);
  for (int trial = 0; trial < 20; ++trial) {
    const ObjectShape obj =
        trial % 2 == 0
            ? make_object("b", PrimitiveKind::Box, Vec3d(0.03, 0.025, 0.02), 1.2,
                          random_pose(rng, 0.1), trial)
            : make_object("c", PrimitiveKind::Capsule, Vec3d(0.02, 0.03, 0), 0.9,
                          random_pose(rng, 0.1), trial);
    std::vector<Vec3d> pts;
    const int n_c = 3 + rng.uniform_int(3);
    for (int i = 0; i < n_c; ++i)
      pts.push_back(obj.pose.position + Vec3d(rng.uniform(-0.08, 0.08), rng.uniform(-0.08, 0.08),
                                              rng.uniform(-0.08, 0.08)));
    const HandSurfacePoints surf = synthetic_surface(pts);
    std::vector<int> idx(n_c);
    for (int i = 0; i < n_c; ++i) idx[i] = i;
    const double lambda_d = 100.0;
    const double got = force_closure_error(idx, surf, obj, lambda_d);

    // Oracle: assemble the 6 x 3n basis explicitly and multiply.
    Eigen::MatrixXd G(6, 3 * n_c);
    Eigen::VectorXd nvec(3 * n_c);
    double dsum = 0.0;
    for (int i = 0; i < n_c; ++i) {
      const Vec3d x = pts[i];
      const Vec3d n = -object_sdf_gradient(obj, x);
      const Vec3d r = x - obj.pose.position;
      G.block<3, 3>(0, 3 * i) = Mat3d::Identity();
      Mat3d rx;
      rx << 0, -r.z(), r.y(), r.z(), 0, -r.x(), -r.y(), r.x(), 0;
      G.block<3, 3>(3, 3 * i) = rx;
      nvec.segment<3>(3 * i) = n;
      const double d = object_sdf(obj, x);
      dsum += d * d;
    }
    const double oracle = (G * nvec).squaredNorm() + lambda_d * dsum;
    CHECK(std::abs(got - oracle) < 1e-10);
  }
}

TEST_CASE("contact on the medial axis is flagged and stays finite") {
  const ObjectShape ball =
      make_object("ball", PrimitiveKind::Sphere, Vec3d(0.03, 0, 0), 1.0, at(0, 0, 0.2), 1);
  const HandSurfacePoints surf = synthetic_surface({ball.pose.position});
  bool degenerate = false;
  const double e = force_closure_error({0}, surf, ball, 100.0, &degenerate);
  CHECK(degenerate);
  CHECK(std::isfinite(e));
  degenerate = true;
  const HandSurfacePoints ok = synthetic_surface({ball.pose.position + Vec3d(0.04, 0, 0)});
  force_closure_error({0}, ok, ball, 100.0, &degenerate);
  CHECK_FALSE(degenerate);
}

TEST_CASE("penetration energy examples") {
  const Scene scene = small_scene();

  // Entirely clear of objects and table.
  const HandSurfacePoints clear =
      synthetic_surface({Vec3d(0, 0, 0.3), Vec3d(0.2, 0.1, 0.25), Vec3d(-0.1, 0, 0.4)});
  CHECK(penetration_energy(clear, scene) == 0.0);

  // One sample 5 mm deep inside the sphere (radius 3 cm centered at z = 3 cm).
  const HandSurfacePoints one = synthetic_surface({Vec3d(0.025, 0, 0.03)});
  CHECK(penetration_energy(one, scene) == doctest::Approx(2.5e-5).epsilon(1e-12));

  // 5 mm below the table.
  const HandSurfacePoints below = synthetic_surface({Vec3d(0.3, 0.3, -0.005)});
  CHECK(penetration_energy(below, scene) == doctest::Approx(2.5e-5).epsilon(1e-12));

  // Definitional re-evaluation, bit exact.
  Rng rng(66);
  std::vector<Vec3d> pts;
  for (int i = 0; i < 200; ++i)
    pts.emplace_back(rng.uniform(-0.1, 0.15), rng.uniform(-0.1, 0.1), rng.uniform(-0.02, 0.08));
  const HandSurfacePoints surf = synthetic_surface(pts);
  const double got = penetration_energy(surf, scene);
  double expect = 0.0;
  for (const Vec3d& p : pts) {
    const double hz = std::max(0.0, -p.z());
    expect += hz * hz;
    for (const ObjectShape& o : scene.objects) {
      const double h = std::max(0.0, -object_sdf(o, p));
      expect += h * h;
    }
  }
  CHECK(got == expect);
  CHECK(got > 0.0);
}

TEST_CASE("self-penetration is zero for the open hand and analytic for forced overlap") {
  const HandModel hand = make_reference_hand();
  HandConfiguration rest;
  rest.q = VecXd::Zero(hand.dof);
  CHECK(self_penetration_energy(hand, rest) == 0.0);

  // Two parallel capsules, radii 1 cm, axes 1.6 cm apart: 4 mm overlap, so
  // the hinge is (0.002 + 0.004)^2 = 3.6e-5 for the single pair.
  HandModel toy;
  Link root;
  root.name = "root";
  toy.links.push_back(root);
  for (int k = 0; k < 2; ++k) {
    Link l;
    l.name = k == 0 ? "a" : "b";
    l.parent = 0;
    l.origin.position = Vec3d(k * 0.016, 0, 0);
    Primitive cap;
    cap.kind = PrimitiveKind::Capsule;
    cap.dims = Vec3d(0.01, 0.02, 0);
    l.collision.push_back(cap);
    l.surface_samples = 8;
    toy.links.push_back(l);
  }
  toy.keypoints.push_back({0, Vec3d::Zero()});
  toy.finalize();
  REQUIRE(toy.self_collision_pairs().size() == 1);
  HandConfiguration tcfg;
  tcfg.q = VecXd::Zero(0);
  CHECK(self_penetration_energy(toy, tcfg) == doctest::Approx(3.6e-5).epsilon(1e-12));
}

TEST_CASE("hand link pair distances match a fine sampling oracle at shallow depths") {
  const HandModel hand = make_reference_hand();
  Rng rng(77);
  for (int trial = 0; trial < 4; ++trial) {
    HandConfiguration cfg;
    cfg.q = VecXd(hand.dof);
    for (size_t i = 0; i < hand.links.size(); ++i) {
      if (hand.joint_index[i] < 0) continue;
      cfg.q[hand.joint_index[i]] = rng.uniform(hand.links[i].lo, hand.links[i].hi);
    }
    const auto poses = forward_kinematics(hand, cfg);
    std::vector<PoseT<double>> pt(poses.size());
    for (size_t i = 0; i < poses.size(); ++i) pt[i] = to_pose_t<double>(poses[i]);

    for (const auto& [i, j] : hand.self_collision_pairs()) {
      for (const Primitive& pa : hand.links[i].collision) {
        for (const Primitive& pb : hand.links[j].collision) {
          // Orient so the round shape is first (every hand pair has one).
          const bool a_round =
              pa.kind == PrimitiveKind::Sphere || pa.kind == PrimitiveKind::Capsule;
          const Primitive& ra = a_round ? pa : pb;
          const Primitive& rb = a_round ? pb : pa;
          const PoseT<double>& la = a_round ? pt[i] : pt[j];
          const PoseT<double>& lb = a_round ? pt[j] : pt[i];
          const double got = primitive_pair_distance(ra, la, rb, lb);
          if (got < -0.002) continue;  // deep overlap: conventions differ
          Vec3d s0, s1;
          detail::axis_segment(ra, la, &s0, &s1);
          const PoseT<double> fb = lb * to_pose_t<double>(rb.origin);
          double best = 1e30;
          const int n = 4000;
          for (int k = 0; k <= n; ++k) {
            const Vec3d x = s0 + (static_cast<double>(k) / n) * (s1 - s0);
            const Vec3d q = fb.untransform(x);
            best = std::min(best, primitive_sdf(rb.kind, rb.dims, q));
          }
          best -= ra.dims[0];
          CHECK(std::abs(got - best) < 1e-4);
        }
      }
    }
  }
}

TEST_CASE("joint limit energy examples") {
  const HandModel hand = make_reference_hand();
  HandConfiguration cfg;
  cfg.q = mid_range_joints(hand);
  CHECK(joint_limit_energy(hand, cfg) == 0.0);

  // Push one joint 0.1 rad above its upper limit.
  cfg.q = mid_range_joints(hand);
  cfg.q[0] = hand.links[1].hi + 0.1;  // link 1 is the first revolute link
  REQUIRE(hand.joint_index[1] == 0);
  CHECK(joint_limit_energy(hand, cfg) == doctest::Approx(0.01).epsilon(1e-12));

  // Two violations, 0.1 above and 0.2 below.
  cfg.q = mid_range_joints(hand);
  cfg.q[0] = hand.links[1].hi + 0.1;
  REQUIRE(hand.joint_index[2] == 1);
  cfg.q[1] = hand.links[2].lo - 0.2;
  CHECK(joint_limit_energy(hand, cfg) == doctest::Approx(0.05).epsilon(1e-12));
}

TEST_CASE("total energy is the weighted sum of independently computed terms") {
  const HandModel hand = make_reference_hand();
  const Scene scene = small_scene();
  Rng rng(88);
  EnergyWeights w;
  const std::uint64_t seed = 1234;
  const EnergyEvaluator ev(hand, scene, w, seed);

  for (int trial = 0; trial < 8; ++trial) {
    const HandConfiguration cfg = hover_cfg(hand, rng, rng.uniform(0.02, 0.12));
    const ContactAssignment contacts = random_contacts(rng, 2, 3, ev.surface_count());
    const EnergyBreakdown b = ev.evaluate(cfg, contacts);

    const HandSurfacePoints surf = sample_hand_surface(hand, cfg, seed);
    double fc_sum = 0.0;
    for (int j = 0; j < 2; ++j) {
      const double fc = force_closure_error(contacts.per_object[j], surf, scene.objects[j],
                                            w.lambda_d);
      CHECK(b.fc_per_object[j] == doctest::Approx(fc).epsilon(1e-9));
      fc_sum += fc;
    }
    const double ep = penetration_energy(surf, scene);
    const double esp = self_penetration_energy(hand, cfg);
    const double eq = joint_limit_energy(hand, cfg);
    CHECK(b.e_p == doctest::Approx(ep).epsilon(1e-9));
    CHECK(b.e_sp == doctest::Approx(esp).epsilon(1e-9));
    CHECK(b.e_q == doctest::Approx(eq).epsilon(1e-9));

    // The breakdown identity holds to 1e-12 for the evaluator's own terms.
    double total = 0.0;
    for (double f : b.fc_per_object) total += f;
    total += w.lambda_p * b.e_p + w.lambda_sp * b.e_sp + w.lambda_q * b.e_q;
    CHECK(std::abs(b.total - total) <= 1e-12 * std::max(1.0, std::abs(total)));
    CHECK(b.e_p >= 0.0);
    CHECK(b.e_sp >= 0.0);
    CHECK(b.e_q >= 0.0);
    for (double f : b.fc_per_object) CHECK(f >= 0.0);

    // Zeroed weights leave only the closure terms.
    EnergyWeights zero = w;
    zero.lambda_p = zero.lambda_sp = zero.lambda_q = 0.0;
    const EnergyBreakdown bz = EnergyEvaluator(hand, scene, zero, seed).evaluate(cfg, contacts);
    CHECK(bz.total == doctest::Approx(fc_sum).epsilon(1e-9));
  }

  // total_energy convenience matches the evaluator.
  const HandConfiguration cfg = hover_cfg(hand, rng, 0.08);
  const ContactAssignment contacts = random_contacts(rng, 2, 3, ev.surface_count());
  const EnergyBreakdown a = ev.evaluate(cfg, contacts);
  const EnergyBreakdown c = total_energy(hand, cfg, scene, contacts, w, seed);
  CHECK(a.total == c.total);
}

TEST_CASE("a constructed perfect two-contact grasp has zero energy and gradient") {
  // Two-finger test hand: a palm box plus two small sphere tips that carry
  // exactly one surface sample each. The object sphere through those two
  // samples, centered at their midpoint, touches both exactly and swallows
  // nothing else, so every energy term is zero up to rounding.
  HandModel hand;
  Link root;
  root.name = "palm";
  Primitive palm;
  palm.kind = PrimitiveKind::Box;
  palm.dims = Vec3d(0.03, 0.03, 0.01);
  root.collision.push_back(palm);
  root.surface_samples = 16;
  hand.links.push_back(root);
  for (int k = 0; k < 2; ++k) {
    Link tip;
    tip.name = k == 0 ? "tip_a" : "tip_b";
    tip.parent = 0;
    tip.origin.position = Vec3d(k == 0 ? -0.02 : 0.02, 0, -0.05);
    if (k == 1) {  // one revolute joint so the gradient covers a joint column
      tip.joint = JointKind::Revolute;
      tip.axis = Vec3d(0, 0, 1);
      tip.lo = -1.0;
      tip.hi = 1.0;
    }
    Primitive ball;
    ball.kind = PrimitiveKind::Sphere;
    ball.dims = Vec3d(0.004, 0, 0);
    tip.collision.push_back(ball);
    tip.surface_samples = 1;
    hand.links.push_back(tip);
  }
  hand.keypoints.push_back({1, Vec3d::Zero()});
  hand.keypoints.push_back({2, Vec3d::Zero()});
  hand.finalize();
  REQUIRE(hand.dof == 1);

  HandConfiguration cfg;
  cfg.q = VecXd::Zero(1);
  cfg.base.position = Vec3d(0, 0, 0.5);
  REQUIRE(self_penetration_energy(hand, cfg) == 0.0);

  const std::uint64_t seed = 42;
  const HandSurfacePoints surf = sample_hand_surface(hand, cfg, seed);
  int ia = -1, ib = -1;
  for (int i = 0; i < surf.count(); ++i) {
    if (surf.link[i] == 1) ia = i;
    if (surf.link[i] == 2) ib = i;
  }
  REQUIRE(ia >= 0);
  REQUIRE(ib >= 0);
  const Vec3d a = surf.points.row(ia);
  const Vec3d b = surf.points.row(ib);
  const double r = 0.5 * (a - b).norm();
  REQUIRE(r > 0.01);

  Scene scene;
  scene.objects.push_back(make_object("ball", PrimitiveKind::Sphere, Vec3d(r, 0, 0), 1.0,
                                      at(0.5 * (a.x() + b.x()), 0.5 * (a.y() + b.y()),
                                         0.5 * (a.z() + b.z())),
                                      9));
  // The defining samples sit on the sphere up to rounding; nothing else may
  // come anywhere near it.
  REQUIRE(penetration_energy(surf, scene) < 1e-30);

  ContactAssignment contacts;
  contacts.per_object.push_back({ia, ib});
  EnergyWeights w;
  const EnergyEvaluator ev(hand, scene, w, seed);
  const EnergyBreakdown b_out = ev.evaluate(cfg, contacts);
  CHECK(b_out.total < 1e-24);

  VecXd g;
  ev.evaluate_with_gradient(cfg, contacts, &g);
  CHECK(g.norm() < 1e-6);
}

TEST_CASE("gradient matches long-double central differences on random configurations") {
  const HandModel hand = make_reference_hand();
  const Scene scene = small_scene();
  EnergyWeights w;
  const EnergyEvaluator ev(hand, scene, w, 321);
  Rng rng(404);
  const double h = 1e-6;
  int checked = 0;
  for (int trial = 0; trial < 12; ++trial) {
    const HandConfiguration cfg = hover_cfg(hand, rng, rng.uniform(0.03, 0.10));
    const ContactAssignment contacts = random_contacts(rng, 2, 3, ev.surface_count());
    VecXd g;
    const EnergyBreakdown bg = ev.evaluate_with_gradient(cfg, contacts, &g);
    const EnergyBreakdown bv = ev.evaluate(cfg, contacts);
    CHECK(bg.total == doctest::Approx(bv.total).epsilon(1e-14));
    const VecXd fd = fd_gradient(ev, cfg, contacts, h);
    for (int k = 0; k < g.size(); ++k) {
      if (std::abs(g[k]) <= 1e-8) continue;
      ++checked;
      CHECK(std::abs(fd[k] - g[k]) / std::abs(g[k]) < 1e-4);
    }
  }
  CHECK(checked > 100);  // the comparison must actually bite
}

TEST_CASE("per-term gradient contributions scale linearly in the weights") {
  const HandModel hand = make_reference_hand();
  const Scene scene = small_scene();
  Rng rng(505);
  // A contact-rich, slightly penetrating pose so every term is active.
  HandConfiguration cfg = hover_cfg(hand, rng, 0.035);
  cfg.q[0] = hand.links[1].hi + 0.2;  // force a joint-limit violation
  const ContactAssignment contacts = random_contacts(rng, 2, 3, 324);

  const auto grad_with = [&](double lp, double lsp, double lq) {
    EnergyWeights w;
    w.lambda_p = lp;
    w.lambda_sp = lsp;
    w.lambda_q = lq;
    VecXd g;
    EnergyEvaluator(hand, scene, w, 11).evaluate_with_gradient(cfg, contacts, &g);
    return g;
  };
  const VecXd g0 = grad_with(0, 0, 0);
  const VecXd g1 = grad_with(100, 10, 1);
  const VecXd g2 = grad_with(200, 20, 2);
  const VecXd c1 = g1 - g0;
  const VecXd c2 = g2 - g0;
  REQUIRE(c1.norm() > 0.0);
  CHECK((c2 - 2.0 * c1).norm() <= 1e-12 * c1.norm());
}

TEST_CASE("total energy is invariant under a global rigid transform") {
  const HandModel hand = make_reference_hand();
  Rng rng(606);
  // Lift everything far above the table so the table term is zero on both
  // sides of the comparison.
  Scene scene = small_scene();
  for (ObjectShape& o : scene.objects) o.pose.position.z() += 2.0;
  EnergyWeights w;
  const std::uint64_t seed = 13;

  HandConfiguration cfg = hover_cfg(hand, rng, 0.05);
  cfg.base.position.z() += 2.0;
  const ContactAssignment contacts = random_contacts(rng, 2, 3, 324);
  const EnergyBreakdown before = EnergyEvaluator(hand, scene, w, seed).evaluate(cfg, contacts);

  // Rotate about the scene centroid so nothing drops toward the table.
  const Vec3d centroid = 0.5 * (scene.objects[0].pose.position + scene.objects[1].pose.position);
  Eigen::Quaterniond rq(rng.gaussian(), rng.gaussian(), rng.gaussian(), rng.gaussian());
  rq.normalize();
  RigidTransform omega;
  omega.orientation = rq;
  omega.position = centroid - rq * centroid + Vec3d(0.1, -0.05, 0.2);

  Scene moved = scene;
  for (ObjectShape& o : moved.objects) o.pose = omega * o.pose;
  HandConfiguration mcfg = cfg;
  mcfg.base = omega * cfg.base;
  const EnergyBreakdown after = EnergyEvaluator(hand, moved, w, seed).evaluate(mcfg, contacts);
  CHECK(std::abs(after.total - before.total) < 1e-9);
  CHECK(std::abs(after.e_p - before.e_p) < 1e-9);
  CHECK(std::abs(after.e_sp - before.e_sp) < 1e-9);
  for (int j = 0; j < 2; ++j)
    CHECK(std::abs(after.fc_per_object[j] - before.fc_per_object[j]) < 1e-9);
}

TEST_CASE("contact assignment validation") {
  ContactAssignment c;
  c.per_object = {{0, 1, 2}};
  CHECK_THROWS_AS(c.validate(324, 2), ConfigError);  // wrong object count
  c.per_object = {{0, 1, 2}, {}};
  CHECK_THROWS_AS(c.validate(324, 2), ConfigError);  // empty list
  c.per_object = {{0, 1, 2}, {3, 4, 999}};
  CHECK_THROWS_AS(c.validate(324, 2), ConfigError);  // out of range
  c.per_object = {{0, 1, 2}, {3, 4, 5}};
  CHECK_NOTHROW(c.validate(324, 2));

  EnergyWeights w;
  w.lambda_p = -1.0;
  CHECK_THROWS_AS(w.validate(), ConfigError);
}
