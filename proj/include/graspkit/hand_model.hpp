#pragma once

#include <string>
#include <utility>
#include <vector>

#include "graspkit/primitives.hpp"
#include "graspkit/transform.hpp"
#include "graspkit/types.hpp"

namespace graspkit {

enum class JointKind { Fixed, Revolute };

struct Link {
  std::string name;
  int parent = -1;  // -1 marks the root
  JointKind joint = JointKind::Fixed;
  Vec3d axis = Vec3d::UnitZ();   // joint axis in the link frame
  RigidTransform origin;         // fixed transform from the parent frame
  double lo = 0.0, hi = 0.0;     // joint limits, radians (revolute only)
  std::vector<Primitive> collision;
  int surface_samples = 0;
};

struct KeypointSpec {
  int link = 0;
  Vec3d offset = Vec3d::Zero();  // link-frame position
};

// Articulated hand as a kinematic tree. Call finalize() after construction
// or deserialization; it validates the tree and builds the joint index.
struct HandModel {
  std::string name;
  std::vector<Link> links;
  std::vector<KeypointSpec> keypoints;
  int palm_link = 0;
  Vec3d palm_axis = Vec3d::UnitZ();  // outward grasp-face direction, palm frame

  // Derived by finalize():
  std::vector<int> joint_index;  // per link, -1 when fixed
  int dof = 0;

  void finalize();
  int joint_count() const { return dof; }
  // Link index pairs entering the self-penetration term: both links carry
  // collision geometry and are not in a direct parent-child relation.
  std::vector<std::pair<int, int>> self_collision_pairs() const;
};

// Pre-grasp pose H = (p, R, q).
struct HandConfiguration {
  RigidTransform base;
  VecXd q;
};

VecXd clamp_joints(const HandModel& model, const VecXd& q);
VecXd mid_range_joints(const HandModel& model);

// Bundled simplified hand: box palm, four 4-joint fingers, a 3-joint thumb,
// 19 revolute joints, 31 keypoints.
HandModel make_reference_hand();

HandModel load_hand_model(const std::string& path);
void save_hand_model(const HandModel& model, const std::string& path);

}  // namespace graspkit
