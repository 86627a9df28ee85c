#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "graspkit/primitives.hpp"
#include "graspkit/transform.hpp"
#include "graspkit/types.hpp"

namespace graspkit {

// Primitive-backed object with a uniform scale, a world pose, and a surface
// point cloud regenerated deterministically from (shape, cloud_seed). Cloud
// points and normals live in the object frame with scale already applied;
// world positions are pose.apply(point).
struct ObjectShape {
  std::string name;
  PrimitiveKind kind = PrimitiveKind::Sphere;
  Vec3d dims = Vec3d::Zero();  // unscaled canonical dimensions
  double scale = 1.0;
  RigidTransform pose;
  std::uint64_t cloud_seed = 0;
  int cloud_size = 512;
  PointMatrix cloud_points;   // object frame, scaled
  PointMatrix cloud_normals;  // object frame

  // Scaled canonical dimensions.
  Vec3d scaled_dims() const { return dims * scale; }
  double bounding_radius() const;
  void regenerate_cloud();
  void validate() const;
};

ObjectShape make_object(const std::string& name, PrimitiveKind kind, const Vec3d& dims,
                        double scale, const RigidTransform& pose, std::uint64_t cloud_seed = 0,
                        int cloud_size = 512);

// Signed distance from a world point to the object surface, negative inside.
// Uniform scaling s of a primitive SDF: sdf_world(x) = s * sdf_canonical(x/s).
template <class T>
T object_sdf(const ObjectShape& shape, const PoseT<T>& inv_pose, const Vec3<T>& world) {
  const Vec3<T> local = inv_pose.apply(world);
  const double inv_s = 1.0 / shape.scale;
  const Vec3<T> canonical(local.x() * inv_s, local.y() * inv_s, local.z() * inv_s);
  return shape.scale * primitive_sdf(shape.kind, shape.dims, canonical);
}

template <class T>
Vec3<T> object_sdf_gradient(const ObjectShape& shape, const PoseT<T>& inv_pose,
                            const Mat3<T>& rot, const Vec3<T>& world) {
  const Vec3<T> local = inv_pose.apply(world);
  const double inv_s = 1.0 / shape.scale;
  const Vec3<T> canonical(local.x() * inv_s, local.y() * inv_s, local.z() * inv_s);
  const Vec3<T> g = primitive_sdf_gradient(shape.kind, shape.dims, canonical);
  return rot * g;  // unit direction is scale-invariant
}

double object_sdf(const ObjectShape& shape, const Vec3d& world);
Vec3d object_sdf_gradient(const ObjectShape& shape, const Vec3d& world);

// Vectorized signed distances plus nearest-surface outward normals.
void distance_to_object(const PointMatrix& points, const ObjectShape& shape, VecXd* distances,
                        PointMatrix* normals);

// Tabletop scene: objects above the half-space table z >= 0.
struct Scene {
  std::vector<ObjectShape> objects;
  void validate() const;  // cloud invariants + table non-penetration
  int object_count() const { return static_cast<int>(objects.size()); }
};

struct PlacementRegion {
  double center_x = 0.0, center_y = 0.0;
  double half_x = 0.12, half_y = 0.12;
};

// Stable resting orientations for a primitive: (orientation, rest height of
// the center above the table). Spheres rest at any orientation; boxes on any
// face; cylinders and capsules on side or end.
std::vector<std::pair<Eigen::Quaterniond, double>> stable_orientations(PrimitiveKind kind,
                                                                       const Vec3d& scaled_dims);

Scene place_objects(const std::vector<ObjectShape>& templates, const PlacementRegion& region,
                    double min_spacing, double max_spacing, std::uint64_t seed,
                    int attempt_budget = 1000);

Scene load_scene(const std::string& path);
void save_scene(const Scene& scene, const std::string& path);

}  // namespace graspkit
