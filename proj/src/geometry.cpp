#include "graspkit/geometry.hpp"

#include <cmath>

#include "graspkit/errors.hpp"
#include "graspkit/rng.hpp"

namespace graspkit {

double ObjectShape::bounding_radius() const {
  const Vec3d d = scaled_dims();
  switch (kind) {
    case PrimitiveKind::Sphere:
      return d[0];
    case PrimitiveKind::Box:
      return d.norm();
    case PrimitiveKind::Cylinder:
    case PrimitiveKind::Capsule:
      return std::sqrt(d[0] * d[0] + d[1] * d[1]) + (kind == PrimitiveKind::Capsule ? d[0] : 0.0);
  }
  return d.maxCoeff();
}

void ObjectShape::regenerate_cloud() {
  Rng rng(derive_stream(cloud_seed, 0x0b9ec7));
  PointMatrix pts, nrm;
  sample_primitive_surface(kind, dims, cloud_size, rng, &pts, &nrm);
  cloud_points = pts * scale;
  cloud_normals = nrm;
}

void ObjectShape::validate() const {
  Primitive p;
  p.kind = kind;
  p.dims = dims;
  p.validate();
  if (scale <= 0.0) throw ConfigError("object scale must be positive");
  if (std::abs(pose.orientation.norm() - 1.0) > 1e-9)
    throw ConfigError("object pose quaternion must be unit-norm");
  if (cloud_points.rows() != cloud_size || cloud_normals.rows() != cloud_size)
    throw ConfigError("object cloud not generated");
  for (int i = 0; i < cloud_points.rows(); ++i) {
    const Vec3d local = cloud_points.row(i).transpose() / scale;
    const double d = scale * primitive_sdf<double>(kind, dims, local);
    if (std::abs(d) > 1e-6) throw NumericalError("object cloud point off surface");
    if (std::abs(cloud_normals.row(i).norm() - 1.0) > 1e-9)
      throw NumericalError("object cloud normal not unit-norm");
  }
}

ObjectShape make_object(const std::string& name, PrimitiveKind kind, const Vec3d& dims,
                        double scale, const RigidTransform& pose, std::uint64_t cloud_seed,
                        int cloud_size) {
  ObjectShape s;
  s.name = name;
  s.kind = kind;
  s.dims = dims;
  s.scale = scale;
  s.pose = pose;
  s.cloud_seed = cloud_seed;
  s.cloud_size = cloud_size;
  s.regenerate_cloud();
  s.validate();
  return s;
}

double object_sdf(const ObjectShape& shape, const Vec3d& world) {
  PoseT<double> inv = to_pose_t<double>(shape.pose.inverse());
  return object_sdf<double>(shape, inv, world);
}

Vec3d object_sdf_gradient(const ObjectShape& shape, const Vec3d& world) {
  PoseT<double> inv = to_pose_t<double>(shape.pose.inverse());
  Mat3d rot = shape.pose.rotation();
  return object_sdf_gradient<double>(shape, inv, rot, world);
}

void distance_to_object(const PointMatrix& points, const ObjectShape& shape, VecXd* distances,
                        PointMatrix* normals) {
  if (points.rows() == 0) throw ConfigError("distance_to_object needs at least one point");
  const PoseT<double> inv = to_pose_t<double>(shape.pose.inverse());
  const Mat3d rot = shape.pose.rotation();
  distances->resize(points.rows());
  if (normals) normals->resize(points.rows(), 3);
  for (int i = 0; i < points.rows(); ++i) {
    const Vec3d p = points.row(i).transpose();
    (*distances)[i] = object_sdf<double>(shape, inv, p);
    if (normals)
      normals->row(i) = object_sdf_gradient<double>(shape, inv, rot, p).transpose();
  }
}

void Scene::validate() const {
  for (const ObjectShape& obj : objects) {
    obj.validate();
    for (int i = 0; i < obj.cloud_points.rows(); ++i) {
      const Vec3d world = obj.pose.apply(obj.cloud_points.row(i).transpose());
      if (world.z() < -1e-6) throw PlacementError("object '" + obj.name + "' penetrates the table");
    }
  }
}

std::vector<std::pair<Eigen::Quaterniond, double>> stable_orientations(PrimitiveKind kind,
                                                                       const Vec3d& d) {
  using Q = Eigen::Quaterniond;
  std::vector<std::pair<Q, double>> out;
  switch (kind) {
    case PrimitiveKind::Sphere:
      out.emplace_back(Q::Identity(), d[0]);
      break;
    case PrimitiveKind::Box:
      // One orientation per face down: rotate the face normal onto -z.
      out.emplace_back(Q::Identity(), d[2]);                                   // -z face down
      out.emplace_back(Q(Eigen::AngleAxisd(M_PI, Vec3d::UnitX())), d[2]);      // +z down
      out.emplace_back(Q(Eigen::AngleAxisd(M_PI / 2, Vec3d::UnitX())), d[1]);  // y faces down
      out.emplace_back(Q(Eigen::AngleAxisd(-M_PI / 2, Vec3d::UnitX())), d[1]);
      out.emplace_back(Q(Eigen::AngleAxisd(M_PI / 2, Vec3d::UnitY())), d[0]);  // x faces down
      out.emplace_back(Q(Eigen::AngleAxisd(-M_PI / 2, Vec3d::UnitY())), d[0]);
      break;
    case PrimitiveKind::Cylinder:
      out.emplace_back(Q::Identity(), d[1]);                                   // on an end
      out.emplace_back(Q(Eigen::AngleAxisd(M_PI / 2, Vec3d::UnitX())), d[0]);  // on the side
      break;
    case PrimitiveKind::Capsule:
      out.emplace_back(Q(Eigen::AngleAxisd(M_PI / 2, Vec3d::UnitX())), d[0]);  // side
      out.emplace_back(Q::Identity(), d[1] + d[0]);                            // upright
      break;
  }
  return out;
}

Scene place_objects(const std::vector<ObjectShape>& templates, const PlacementRegion& region,
                    double min_spacing, double max_spacing, std::uint64_t seed,
                    int attempt_budget) {
  if (templates.empty()) throw ConfigError("no object templates to place");
  if (min_spacing < 0.0 || max_spacing < min_spacing)
    throw ConfigError("placement spacing bounds are inconsistent");
  Rng rng(derive_stream(seed, 0x9c37));
  for (int attempt = 0; attempt < attempt_budget; ++attempt) {
    Scene scene;
    bool ok = true;
    for (const ObjectShape& tpl : templates) {
      ObjectShape obj = tpl;
      bool placed = false;
      for (int inner = 0; inner < 50 && !placed; ++inner) {
        const auto options = stable_orientations(obj.kind, obj.scaled_dims());
        const auto& [orientation, rest_h] = options[rng.uniform_int(options.size())];
        Eigen::Quaterniond q =
            Eigen::Quaterniond(Eigen::AngleAxisd(rng.uniform(0.0, 2.0 * M_PI), Vec3d::UnitZ())) *
            orientation;
        if (obj.kind == PrimitiveKind::Sphere) {
          // Any orientation is stable; use a uniformly random one.
          Vec3d ax(rng.gaussian(), rng.gaussian(), rng.gaussian());
          ax.normalize();
          q = Eigen::Quaterniond(Eigen::AngleAxisd(rng.uniform(0.0, 2.0 * M_PI), ax));
        }
        const double x = region.center_x + rng.uniform(-region.half_x, region.half_x);
        const double y = region.center_y + rng.uniform(-region.half_y, region.half_y);
        obj.pose = make_transform(Vec3d(x, y, rest_h), q);

        bool valid = true;
        for (const ObjectShape& other : scene.objects) {
          const double spacing = (obj.pose.position - other.pose.position).head<2>().norm();
          if (spacing < min_spacing || spacing > max_spacing) {
            valid = false;
            break;
          }
          // Overlap rejection via mutual cloud checks, both directions so a
          // shape fully containing the other is still caught.
          for (int i = 0; valid && i < obj.cloud_points.rows(); i += 8) {
            const Vec3d w = obj.pose.apply(obj.cloud_points.row(i).transpose());
            if (object_sdf(other, w) < 1e-4) valid = false;
          }
          for (int i = 0; valid && i < other.cloud_points.rows(); i += 8) {
            const Vec3d w = other.pose.apply(other.cloud_points.row(i).transpose());
            if (object_sdf(obj, w) < 1e-4) valid = false;
          }
          if (!valid) break;
        }
        if (valid) {
          scene.objects.push_back(obj);
          placed = true;
        }
      }
      if (!placed) {
        ok = false;
        break;
      }
    }
    if (ok) {
      scene.validate();
      return scene;
    }
  }
  throw PlacementError("placement attempt budget exhausted");
}

}  // namespace graspkit
