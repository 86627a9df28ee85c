#pragma once

#include <string>

#include "json.hpp"

#include "graspkit/geometry.hpp"
#include "graspkit/hand_model.hpp"
#include "graspkit/transform.hpp"

namespace graspkit {

using Json = nlohmann::json;

// Quaternions serialize as [w, x, y, z]; vectors as [x, y, z].
Json transform_to_json(const RigidTransform& t);
RigidTransform transform_from_json(const Json& j);

Json primitive_to_json(const Primitive& p);
Primitive primitive_from_json(const Json& j);

Json hand_to_json(const HandModel& m);
HandModel hand_from_json(const Json& j);

Json object_to_json(const ObjectShape& o);
ObjectShape object_from_json(const Json& j);

Json scene_to_json(const Scene& s);
Scene scene_from_json(const Json& j);

Json config_to_json(const HandConfiguration& c);
HandConfiguration config_from_json(const Json& j);

// File helpers; throw IoError on filesystem problems, ConfigError on schema
// violations. Writers are atomic enough for our purposes (write then rename
// is not needed; single process owns outputs).
Json read_json_file(const std::string& path);
void write_json_file(const Json& j, const std::string& path);

// Every loader rejects unknown keys so typos fail loudly.
void require_keys(const Json& j, std::initializer_list<const char*> required,
                  std::initializer_list<const char*> optional, const std::string& context);

}  // namespace graspkit
