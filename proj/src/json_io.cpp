#include "graspkit/json_io.hpp"

#include <fstream>

#include "graspkit/errors.hpp"

namespace graspkit {

namespace {

Json vec3_to_json(const Vec3d& v) { return Json::array({v.x(), v.y(), v.z()}); }

Vec3d vec3_from_json(const Json& j, const std::string& context) {
  if (!j.is_array() || j.size() != 3) throw ConfigError(context + ": expected a 3-element array");
  return Vec3d(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

}  // namespace

void require_keys(const Json& j, std::initializer_list<const char*> required,
                  std::initializer_list<const char*> optional, const std::string& context) {
  if (!j.is_object()) throw ConfigError(context + ": expected an object");
  for (const char* key : required)
    if (!j.contains(key)) throw ConfigError(context + ": missing key '" + key + "'");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& k = it.key();
    bool known = false;
    for (const char* key : required) known = known || k == key;
    for (const char* key : optional) known = known || k == key;
    if (!known) throw ConfigError(context + ": unknown key '" + k + "'");
  }
}

Json transform_to_json(const RigidTransform& t) {
  return Json{{"position", vec3_to_json(t.position)},
              {"quaternion", Json::array({t.orientation.w(), t.orientation.x(),
                                          t.orientation.y(), t.orientation.z()})}};
}

RigidTransform transform_from_json(const Json& j) {
  require_keys(j, {"position", "quaternion"}, {}, "transform");
  const Json& q = j["quaternion"];
  if (!q.is_array() || q.size() != 4)
    throw ConfigError("transform: quaternion must be [w, x, y, z]");
  RigidTransform t;
  t.position = vec3_from_json(j["position"], "transform.position");
  t.orientation = Eigen::Quaterniond(q[0].get<double>(), q[1].get<double>(), q[2].get<double>(),
                                     q[3].get<double>());
  if (std::abs(t.orientation.norm() - 1.0) > 1e-6)
    throw ConfigError("transform: quaternion is not unit-norm");
  // Keep the stored bits: renormalizing here would break bit-exact
  // round-trips of serialized records.
  return t;
}

Json primitive_to_json(const Primitive& p) {
  return Json{{"kind", primitive_kind_name(p.kind)},
              {"dims", vec3_to_json(p.dims)},
              {"origin", transform_to_json(p.origin)}};
}

Primitive primitive_from_json(const Json& j) {
  require_keys(j, {"kind", "dims"}, {"origin"}, "primitive");
  Primitive p;
  p.kind = primitive_kind_from_name(j["kind"].get<std::string>());
  p.dims = vec3_from_json(j["dims"], "primitive.dims");
  if (j.contains("origin")) p.origin = transform_from_json(j["origin"]);
  p.validate();
  return p;
}

Json hand_to_json(const HandModel& m) {
  Json links = Json::array();
  for (const Link& l : m.links) {
    Json jl{{"name", l.name},
            {"parent", l.parent},
            {"joint", l.joint == JointKind::Revolute ? "revolute" : "fixed"},
            {"origin", transform_to_json(l.origin)}};
    if (l.joint == JointKind::Revolute) {
      jl["axis"] = vec3_to_json(l.axis);
      jl["limits"] = Json::array({l.lo, l.hi});
    }
    if (!l.collision.empty()) {
      Json prims = Json::array();
      for (const Primitive& p : l.collision) prims.push_back(primitive_to_json(p));
      jl["collision"] = prims;
      jl["surface_samples"] = l.surface_samples;
    }
    links.push_back(jl);
  }
  Json kps = Json::array();
  for (const KeypointSpec& kp : m.keypoints)
    kps.push_back(Json{{"link", kp.link}, {"offset", vec3_to_json(kp.offset)}});
  return Json{{"name", m.name},
              {"palm_link", m.palm_link},
              {"palm_axis", vec3_to_json(m.palm_axis)},
              {"links", links},
              {"keypoints", kps}};
}

HandModel hand_from_json(const Json& j) {
  require_keys(j, {"name", "links", "keypoints"}, {"palm_link", "palm_axis"}, "hand model");
  HandModel m;
  m.name = j["name"].get<std::string>();
  if (j.contains("palm_link")) m.palm_link = j["palm_link"].get<int>();
  if (j.contains("palm_axis")) m.palm_axis = vec3_from_json(j["palm_axis"], "hand.palm_axis");
  for (const Json& jl : j["links"]) {
    require_keys(jl, {"name", "parent", "joint", "origin"},
                 {"axis", "limits", "collision", "surface_samples"}, "hand link");
    Link l;
    l.name = jl["name"].get<std::string>();
    l.parent = jl["parent"].get<int>();
    const std::string kind = jl["joint"].get<std::string>();
    if (kind == "revolute")
      l.joint = JointKind::Revolute;
    else if (kind == "fixed")
      l.joint = JointKind::Fixed;
    else
      throw ConfigError("hand link: unknown joint kind '" + kind + "'");
    l.origin = transform_from_json(jl["origin"]);
    if (l.joint == JointKind::Revolute) {
      if (!jl.contains("axis") || !jl.contains("limits"))
        throw ConfigError("revolute link '" + l.name + "' needs axis and limits");
      l.axis = vec3_from_json(jl["axis"], "hand link axis");
      const Json& lim = jl["limits"];
      if (!lim.is_array() || lim.size() != 2)
        throw ConfigError("hand link limits must be [lo, hi]");
      l.lo = lim[0].get<double>();
      l.hi = lim[1].get<double>();
    }
    if (jl.contains("collision"))
      for (const Json& jp : jl["collision"]) l.collision.push_back(primitive_from_json(jp));
    if (jl.contains("surface_samples")) l.surface_samples = jl["surface_samples"].get<int>();
    m.links.push_back(l);
  }
  for (const Json& jk : j["keypoints"]) {
    require_keys(jk, {"link", "offset"}, {}, "keypoint");
    m.keypoints.push_back({jk["link"].get<int>(), vec3_from_json(jk["offset"], "keypoint offset")});
  }
  m.finalize();
  return m;
}

Json object_to_json(const ObjectShape& o) {
  return Json{{"name", o.name},
              {"kind", primitive_kind_name(o.kind)},
              {"dims", vec3_to_json(o.dims)},
              {"scale", o.scale},
              {"pose", transform_to_json(o.pose)},
              {"cloud_seed", o.cloud_seed},
              {"cloud_size", o.cloud_size}};
}

ObjectShape object_from_json(const Json& j) {
  require_keys(j, {"kind", "dims"}, {"name", "scale", "pose", "cloud_seed", "cloud_size"},
               "object");
  const std::string name = j.contains("name") ? j["name"].get<std::string>() : "object";
  return make_object(name, primitive_kind_from_name(j["kind"].get<std::string>()),
                     vec3_from_json(j["dims"], "object.dims"),
                     j.contains("scale") ? j["scale"].get<double>() : 1.0,
                     j.contains("pose") ? transform_from_json(j["pose"])
                                        : RigidTransform::identity(),
                     j.contains("cloud_seed") ? j["cloud_seed"].get<std::uint64_t>() : 0,
                     j.contains("cloud_size") ? j["cloud_size"].get<int>() : 512);
}

Json scene_to_json(const Scene& s) {
  Json objs = Json::array();
  for (const ObjectShape& o : s.objects) objs.push_back(object_to_json(o));
  return Json{{"objects", objs}};
}

Scene scene_from_json(const Json& j) {
  require_keys(j, {"objects"}, {}, "scene");
  Scene s;
  for (const Json& jo : j["objects"]) s.objects.push_back(object_from_json(jo));
  return s;
}

Json config_to_json(const HandConfiguration& c) {
  Json q = Json::array();
  for (int i = 0; i < c.q.size(); ++i) q.push_back(c.q[i]);
  return Json{{"base", transform_to_json(c.base)}, {"q", q}};
}

HandConfiguration config_from_json(const Json& j) {
  require_keys(j, {"base", "q"}, {}, "hand configuration");
  HandConfiguration c;
  c.base = transform_from_json(j["base"]);
  const Json& q = j["q"];
  if (!q.is_array()) throw ConfigError("hand configuration: q must be an array");
  c.q.resize(q.size());
  for (size_t i = 0; i < q.size(); ++i) c.q[i] = q[i].get<double>();
  return c;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  Json j;
  try {
    in >> j;
  } catch (const Json::parse_error& e) {
    throw ConfigError("malformed JSON in '" + path + "': " + e.what());
  }
  return j;
}

void write_json_file(const Json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << j.dump(2) << "\n";
  if (!out) throw IoError("failed writing '" + path + "'");
}

}  // namespace graspkit

namespace graspkit {

HandModel load_hand_model(const std::string& path) { return hand_from_json(read_json_file(path)); }

void save_hand_model(const HandModel& model, const std::string& path) {
  write_json_file(hand_to_json(model), path);
}

Scene load_scene(const std::string& path) {
  Scene s = scene_from_json(read_json_file(path));
  s.validate();
  return s;
}

void save_scene(const Scene& scene, const std::string& path) {
  write_json_file(scene_to_json(scene), path);
}

}  // namespace graspkit
