#include "graspkit/primitives.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

namespace graspkit {

const char* primitive_kind_name(PrimitiveKind k) {
  switch (k) {
    case PrimitiveKind::Sphere:
      return "sphere";
    case PrimitiveKind::Box:
      return "box";
    case PrimitiveKind::Cylinder:
      return "cylinder";
    case PrimitiveKind::Capsule:
      return "capsule";
  }
  return "unknown";
}

PrimitiveKind primitive_kind_from_name(const std::string& name) {
  if (name == "sphere") return PrimitiveKind::Sphere;
  if (name == "box") return PrimitiveKind::Box;
  if (name == "cylinder") return PrimitiveKind::Cylinder;
  if (name == "capsule") return PrimitiveKind::Capsule;
  throw ConfigError("unknown primitive kind: " + name);
}

void Primitive::validate() const {
  if (!dims.allFinite()) throw ConfigError("primitive dims must be finite");
  switch (kind) {
    case PrimitiveKind::Sphere:
      if (dims[0] <= 0.0) throw ConfigError("sphere radius must be positive");
      break;
    case PrimitiveKind::Box:
      if (dims.minCoeff() <= 0.0) throw ConfigError("box half extents must be positive");
      break;
    case PrimitiveKind::Cylinder:
    case PrimitiveKind::Capsule:
      if (dims[0] <= 0.0 || dims[1] <= 0.0)
        throw ConfigError("cylinder/capsule radius and half length must be positive");
      break;
  }
  if (std::abs(origin.orientation.norm() - 1.0) > 1e-9)
    throw ConfigError("primitive origin quaternion must be unit-norm");
}

double primitive_surface_area(PrimitiveKind kind, const Vec3d& dims) {
  switch (kind) {
    case PrimitiveKind::Sphere:
      return 4.0 * M_PI * dims[0] * dims[0];
    case PrimitiveKind::Box:
      return 8.0 * (dims[0] * dims[1] + dims[1] * dims[2] + dims[2] * dims[0]);
    case PrimitiveKind::Cylinder:
      return 4.0 * M_PI * dims[0] * dims[1] + 2.0 * M_PI * dims[0] * dims[0];
    case PrimitiveKind::Capsule:
      return 4.0 * M_PI * dims[0] * dims[1] + 4.0 * M_PI * dims[0] * dims[0];
  }
  return 0.0;
}

namespace {

Vec3d uniform_direction(Rng& rng) {
  Vec3d v(rng.gaussian(), rng.gaussian(), rng.gaussian());
  double n = v.norm();
  while (n < 1e-9) {
    v = Vec3d(rng.gaussian(), rng.gaussian(), rng.gaussian());
    n = v.norm();
  }
  return v / n;
}

struct Patch {
  double area;
  // Emits a point and outward normal in the canonical frame.
  void (*emit)(const Vec3d& dims, int face, Rng& rng, Vec3d* p, Vec3d* n);
  int face;
};

void emit_sphere(const Vec3d& dims, int, Rng& rng, Vec3d* p, Vec3d* n) {
  *n = uniform_direction(rng);
  *p = dims[0] * *n;
}

void emit_box_face(const Vec3d& dims, int face, Rng& rng, Vec3d* p, Vec3d* n) {
  const int axis = face / 2;
  const double sign = face % 2 == 0 ? 1.0 : -1.0;
  const int u = (axis + 1) % 3, v = (axis + 2) % 3;
  Vec3d pt = Vec3d::Zero();
  pt[axis] = sign * dims[axis];
  pt[u] = rng.uniform(-dims[u], dims[u]);
  pt[v] = rng.uniform(-dims[v], dims[v]);
  *p = pt;
  *n = Vec3d::Unit(axis) * sign;
}

void emit_cylinder_wall(const Vec3d& dims, int, Rng& rng, Vec3d* p, Vec3d* n) {
  const double ang = rng.uniform(0.0, 2.0 * M_PI);
  const double z = rng.uniform(-dims[1], dims[1]);
  *n = Vec3d(std::cos(ang), std::sin(ang), 0.0);
  *p = Vec3d(dims[0] * n->x(), dims[0] * n->y(), z);
}

void emit_cylinder_cap(const Vec3d& dims, int face, Rng& rng, Vec3d* p, Vec3d* n) {
  const double sign = face == 0 ? 1.0 : -1.0;
  const double ang = rng.uniform(0.0, 2.0 * M_PI);
  const double rad = dims[0] * std::sqrt(rng.uniform());
  *p = Vec3d(rad * std::cos(ang), rad * std::sin(ang), sign * dims[1]);
  *n = Vec3d(0.0, 0.0, sign);
}

void emit_capsule_wall(const Vec3d& dims, int face, Rng& rng, Vec3d* p, Vec3d* n) {
  emit_cylinder_wall(dims, face, rng, p, n);
}

void emit_capsule_cap(const Vec3d& dims, int face, Rng& rng, Vec3d* p, Vec3d* n) {
  const double sign = face == 0 ? 1.0 : -1.0;
  Vec3d d = uniform_direction(rng);
  if (d.z() * sign < 0.0) d.z() = -d.z();
  *n = d;
  *p = Vec3d(0.0, 0.0, sign * dims[1]) + dims[0] * d;
}

std::vector<Patch> patches_for(PrimitiveKind kind, const Vec3d& dims) {
  std::vector<Patch> out;
  switch (kind) {
    case PrimitiveKind::Sphere:
      out.push_back({4.0 * M_PI * dims[0] * dims[0], emit_sphere, 0});
      break;
    case PrimitiveKind::Box:
      for (int f = 0; f < 6; ++f) {
        const int axis = f / 2;
        const int u = (axis + 1) % 3, v = (axis + 2) % 3;
        out.push_back({4.0 * dims[u] * dims[v], emit_box_face, f});
      }
      break;
    case PrimitiveKind::Cylinder:
      out.push_back({4.0 * M_PI * dims[0] * dims[1], emit_cylinder_wall, 0});
      out.push_back({M_PI * dims[0] * dims[0], emit_cylinder_cap, 0});
      out.push_back({M_PI * dims[0] * dims[0], emit_cylinder_cap, 1});
      break;
    case PrimitiveKind::Capsule:
      out.push_back({4.0 * M_PI * dims[0] * dims[1], emit_capsule_wall, 0});
      out.push_back({2.0 * M_PI * dims[0] * dims[0], emit_capsule_cap, 0});
      out.push_back({2.0 * M_PI * dims[0] * dims[0], emit_capsule_cap, 1});
      break;
  }
  return out;
}

}  // namespace

void sample_primitive_surface(PrimitiveKind kind, const Vec3d& dims, int count, Rng& rng,
                              PointMatrix* points, PointMatrix* normals) {
  if (count <= 0) throw ConfigError("surface sample count must be positive");
  const std::vector<Patch> patches = patches_for(kind, dims);
  double total = 0.0;
  for (const Patch& p : patches) total += p.area;

  // Largest-remainder allocation so per-patch counts sum exactly to count.
  std::vector<int> alloc(patches.size(), 0);
  std::vector<std::pair<double, size_t>> rema;
  int assigned = 0;
  for (size_t i = 0; i < patches.size(); ++i) {
    const double exact = count * patches[i].area / total;
    alloc[i] = static_cast<int>(exact);
    assigned += alloc[i];
    rema.emplace_back(exact - alloc[i], i);
  }
  std::sort(rema.begin(), rema.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  for (int k = 0; assigned < count; ++k, ++assigned) alloc[rema[k % rema.size()].second] += 1;

  points->resize(count, 3);
  normals->resize(count, 3);
  int row = 0;
  for (size_t i = 0; i < patches.size(); ++i) {
    for (int k = 0; k < alloc[i]; ++k, ++row) {
      Vec3d p, n;
      patches[i].emit(dims, patches[i].face, rng, &p, &n);
      points->row(row) = p.transpose();
      normals->row(row) = n.transpose();
    }
  }
}

const PointMatrix& fallback_surface_grid(const Primitive& prim) {
  using Key = std::tuple<int, double, double, double>;
  static std::mutex mu;
  static std::map<Key, PointMatrix> cache;
  const Key key{static_cast<int>(prim.kind), prim.dims[0], prim.dims[1], prim.dims[2]};
  std::scoped_lock lock(mu);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  Rng rng(0x5eedf00d);
  PointMatrix pts, nrm;
  sample_primitive_surface(prim.kind, prim.dims, 256, rng, &pts, &nrm);
  return cache.emplace(key, std::move(pts)).first->second;
}

}  // namespace graspkit
