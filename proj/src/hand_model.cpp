#include "graspkit/hand_model.hpp"

#include <cmath>
#include <set>

#include "graspkit/errors.hpp"

namespace graspkit {

void HandModel::finalize() {
  if (links.empty()) throw ConfigError("hand model has no links");
  int roots = 0;
  for (size_t i = 0; i < links.size(); ++i) {
    const Link& l = links[i];
    if (l.parent < 0) {
      ++roots;
    } else if (l.parent >= static_cast<int>(i)) {
      // Parents must precede children; this also rules out cycles.
      throw ConfigError("link '" + l.name + "' has parent index " + std::to_string(l.parent) +
                        " which does not precede it");
    }
    if (l.joint == JointKind::Revolute) {
      if (std::abs(l.axis.norm() - 1.0) > 1e-9)
        throw ConfigError("joint axis of '" + l.name + "' is not unit-norm");
      if (l.lo > l.hi) throw ConfigError("joint limits of '" + l.name + "' have lo > hi");
    }
    if (std::abs(l.origin.orientation.norm() - 1.0) > 1e-9)
      throw ConfigError("origin quaternion of '" + l.name + "' is not unit-norm");
    for (const Primitive& prim : l.collision) prim.validate();
    if (l.surface_samples < 0) throw ConfigError("negative surface sample count");
    if (l.surface_samples > 0 && l.collision.empty())
      throw ConfigError("link '" + l.name + "' requests surface samples but has no geometry");
  }
  if (roots != 1) throw ConfigError("hand model must have exactly one root link");
  if (palm_link < 0 || palm_link >= static_cast<int>(links.size()))
    throw ConfigError("palm link index out of range");
  if (std::abs(palm_axis.norm() - 1.0) > 1e-9) throw ConfigError("palm axis is not unit-norm");

  std::set<std::string> names;
  for (const Link& l : links)
    if (!names.insert(l.name).second) throw ConfigError("duplicate link name '" + l.name + "'");

  joint_index.assign(links.size(), -1);
  dof = 0;
  for (size_t i = 0; i < links.size(); ++i)
    if (links[i].joint == JointKind::Revolute) joint_index[i] = dof++;

  for (const KeypointSpec& kp : keypoints)
    if (kp.link < 0 || kp.link >= static_cast<int>(links.size()))
      throw ConfigError("keypoint references link index out of range");
}

std::vector<std::pair<int, int>> HandModel::self_collision_pairs() const {
  std::vector<std::pair<int, int>> pairs;
  for (size_t a = 0; a < links.size(); ++a) {
    if (links[a].collision.empty()) continue;
    for (size_t b = a + 1; b < links.size(); ++b) {
      if (links[b].collision.empty()) continue;
      if (links[b].parent == static_cast<int>(a) || links[a].parent == static_cast<int>(b))
        continue;
      pairs.emplace_back(static_cast<int>(a), static_cast<int>(b));
    }
  }
  return pairs;
}

VecXd clamp_joints(const HandModel& model, const VecXd& q) {
  if (q.size() != model.dof) throw ConfigError("joint vector length mismatch");
  VecXd out = q;
  for (size_t i = 0; i < model.links.size(); ++i) {
    const int j = model.joint_index[i];
    if (j < 0) continue;
    out[j] = std::min(model.links[i].hi, std::max(model.links[i].lo, out[j]));
  }
  return out;
}

VecXd mid_range_joints(const HandModel& model) {
  VecXd q = VecXd::Zero(model.dof);
  for (size_t i = 0; i < model.links.size(); ++i) {
    const int j = model.joint_index[i];
    if (j >= 0) q[j] = 0.5 * (model.links[i].lo + model.links[i].hi);
  }
  return q;
}

namespace {

Primitive capsule_along_y(double radius, double length) {
  Primitive p;
  p.kind = PrimitiveKind::Capsule;
  p.dims = Vec3d(radius, 0.5 * length, 0.0);
  // Canonical capsule axis is z; rotate it onto +y and center the segment.
  p.origin =
      make_transform(Vec3d(0.0, 0.5 * length, 0.0),
                     Eigen::Quaterniond(Eigen::AngleAxisd(-M_PI / 2.0, Vec3d::UnitX())));
  return p;
}

Link make_link(std::string name, int parent, JointKind kind, const Vec3d& axis,
               const RigidTransform& origin, double lo, double hi) {
  Link l;
  l.name = std::move(name);
  l.parent = parent;
  l.joint = kind;
  l.axis = axis;
  l.origin = origin;
  l.lo = lo;
  l.hi = hi;
  return l;
}

}  // namespace

HandModel make_reference_hand() {
  HandModel m;
  m.name = "reference_hand";
  m.palm_link = 0;
  m.palm_axis = Vec3d::UnitZ();

  // Palm: box slab, grasp face at +z, fingers off the +y edge.
  Link palm = make_link("palm", -1, JointKind::Fixed, Vec3d::UnitZ(), RigidTransform::identity(),
                        0.0, 0.0);
  {
    Primitive box;
    box.kind = PrimitiveKind::Box;
    box.dims = Vec3d(0.040, 0.050, 0.012);
    palm.collision.push_back(box);
    palm.surface_samples = 64;
  }
  m.links.push_back(palm);

  const char* finger_names[4] = {"index", "middle", "ring", "pinky"};
  const double knuckle_x[4] = {-0.0285, -0.0095, 0.0095, 0.0285};
  struct Segment {
    double length, radius, lo, hi;
  };
  // MCP flexion, PIP, DIP per finger; positive flexion curls toward +z.
  const Segment segs[3] = {{0.042, 0.0065, -0.26, 1.65},
                           {0.026, 0.0060, 0.00, 1.75},
                           {0.021, 0.0055, 0.00, 1.57}};
  const int seg_samples[3] = {20, 20, 28};

  for (int f = 0; f < 4; ++f) {
    const std::string base = finger_names[f];
    const int palm_idx = 0;
    Link knuckle = make_link(base + "_knuckle", palm_idx, JointKind::Revolute, Vec3d::UnitZ(),
                             make_transform(Vec3d(knuckle_x[f], 0.0605, 0.0),
                                            Eigen::Quaterniond::Identity()),
                             -0.25, 0.25);
    m.links.push_back(knuckle);
    const int knuckle_idx = static_cast<int>(m.links.size()) - 1;

    const char* seg_names[3] = {"proximal", "middle", "distal"};
    int parent = knuckle_idx;
    double offset_y = 0.0;
    for (int s = 0; s < 3; ++s) {
      Link seg = make_link(base + "_" + seg_names[s], parent, JointKind::Revolute, Vec3d::UnitX(),
                           make_transform(Vec3d(0.0, offset_y, 0.0),
                                          Eigen::Quaterniond::Identity()),
                           segs[s].lo, segs[s].hi);
      seg.collision.push_back(capsule_along_y(segs[s].radius, segs[s].length));
      seg.surface_samples = seg_samples[s];
      m.links.push_back(seg);
      parent = static_cast<int>(m.links.size()) - 1;
      offset_y = segs[s].length;
    }
  }

  // Thumb: raised off the palm plane so the open hand is self-collision
  // free, swivels about the palm normal, then two flexion joints.
  const int palm_idx = 0;
  Link tmeta = make_link("thumb_meta", palm_idx, JointKind::Revolute, Vec3d::UnitZ(),
                         make_transform(Vec3d(-0.042, -0.010, 0.025),
                                        Eigen::Quaterniond(Eigen::AngleAxisd(-1.05, Vec3d::UnitZ()))),
                         -0.35, 1.40);
  tmeta.collision.push_back(capsule_along_y(0.008, 0.045));
  tmeta.surface_samples = 20;
  m.links.push_back(tmeta);
  const int tmeta_idx = static_cast<int>(m.links.size()) - 1;

  Link tprox = make_link("thumb_proximal", tmeta_idx, JointKind::Revolute, Vec3d::UnitX(),
                         make_transform(Vec3d(0.0, 0.045, 0.0), Eigen::Quaterniond::Identity()),
                         -0.26, 1.30);
  tprox.collision.push_back(capsule_along_y(0.0065, 0.032));
  tprox.surface_samples = 20;
  m.links.push_back(tprox);
  const int tprox_idx = static_cast<int>(m.links.size()) - 1;

  Link tdist = make_link("thumb_distal", tprox_idx, JointKind::Revolute, Vec3d::UnitX(),
                         make_transform(Vec3d(0.0, 0.032, 0.0), Eigen::Quaterniond::Identity()),
                         0.00, 1.40);
  tdist.collision.push_back(capsule_along_y(0.006, 0.026));
  tdist.surface_samples = 28;
  m.links.push_back(tdist);
  const int tdist_idx = static_cast<int>(m.links.size()) - 1;

  // 31 keypoints: 6 on the palm, 5 per finger, 5 on the thumb.
  auto add_kp = [&m](int link, double x, double y, double z) {
    m.keypoints.push_back({link, Vec3d(x, y, z)});
  };
  add_kp(0, 0.0, 0.0, 0.012);      // grasp-face center
  add_kp(0, 0.040, 0.050, 0.012);  // face corners
  add_kp(0, -0.040, 0.050, 0.012);
  add_kp(0, 0.040, -0.050, 0.012);
  add_kp(0, -0.040, -0.050, 0.012);
  add_kp(0, 0.0, 0.0, -0.012);  // back-face center

  for (int f = 0; f < 4; ++f) {
    const int knuckle_idx = 1 + f * 4;
    add_kp(knuckle_idx, 0.0, 0.0, 0.0);            // knuckle
    add_kp(knuckle_idx + 1, 0.0, 0.021, 0.0);      // proximal midpoint
    add_kp(knuckle_idx + 2, 0.0, 0.0, 0.0);        // PIP joint
    add_kp(knuckle_idx + 3, 0.0, 0.0, 0.0);        // DIP joint
    add_kp(knuckle_idx + 3, 0.0, 0.0265, 0.0);     // fingertip (cap apex)
  }
  add_kp(tmeta_idx, 0.0, 0.0, 0.0);      // thumb base
  add_kp(tmeta_idx, 0.0, 0.0225, 0.0);   // metacarpal midpoint
  add_kp(tprox_idx, 0.0, 0.0, 0.0);      // MP joint
  add_kp(tdist_idx, 0.0, 0.0, 0.0);      // IP joint
  add_kp(tdist_idx, 0.0, 0.032, 0.0);    // thumb tip (cap apex)

  m.finalize();
  return m;
}

}  // namespace graspkit
