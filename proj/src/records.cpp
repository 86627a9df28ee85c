#include "graspkit/records.hpp"

#include <cmath>
#include <fstream>

#include "graspkit/errors.hpp"

namespace graspkit {

namespace {

void expect_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw ConfigError(std::string("record has non-finite ") + what);
}

void gate_record(const GraspRecord& r) {
  for (double v : r.energy.fc_per_object) expect_finite(v, "force-closure term");
  expect_finite(r.energy.e_p, "penetration energy");
  expect_finite(r.energy.e_sp, "self-penetration energy");
  expect_finite(r.energy.e_q, "joint-limit energy");
  expect_finite(r.energy.total, "total energy");
  for (double v : r.quality.q1_per_object) expect_finite(v, "Q1 value");
  expect_finite(r.quality.q1_min, "minimum Q1");
  expect_finite(r.quality.penetration_mm, "penetration depth");
  expect_finite(r.quality.contact_ratio, "contact ratio");
  for (int i = 0; i < 3; ++i) expect_finite(r.cfg.base.position[i], "base position");
  for (double v : {r.cfg.base.orientation.w(), r.cfg.base.orientation.x(),
                   r.cfg.base.orientation.y(), r.cfg.base.orientation.z()})
    expect_finite(v, "base orientation");
  for (int i = 0; i < r.cfg.q.size(); ++i) expect_finite(r.cfg.q[i], "joint value");
}

Json breakdown_to_json(const EnergyBreakdown& e) {
  return Json{{"fc_per_object", e.fc_per_object},
              {"e_p", e.e_p},
              {"e_sp", e.e_sp},
              {"e_q", e.e_q},
              {"total", e.total}};
}

EnergyBreakdown breakdown_from_json(const Json& j) {
  require_keys(j, {"fc_per_object", "e_p", "e_sp", "e_q", "total"}, {}, "energy breakdown");
  EnergyBreakdown e;
  e.fc_per_object = j["fc_per_object"].get<std::vector<double>>();
  e.e_p = j["e_p"].get<double>();
  e.e_sp = j["e_sp"].get<double>();
  e.e_q = j["e_q"].get<double>();
  e.total = j["total"].get<double>();
  return e;
}

Json quality_to_json(const QualityReport& q) {
  return Json{{"q1_per_object", q.q1_per_object},
              {"q1_min", q.q1_min},
              {"penetration_mm", q.penetration_mm},
              {"contact_ratio", q.contact_ratio},
              {"feasible", q.feasible}};
}

QualityReport quality_from_json(const Json& j) {
  require_keys(j, {"q1_per_object", "q1_min", "penetration_mm", "contact_ratio", "feasible"}, {},
               "quality report");
  QualityReport q;
  q.q1_per_object = j["q1_per_object"].get<std::vector<double>>();
  q.q1_min = j["q1_min"].get<double>();
  q.penetration_mm = j["penetration_mm"].get<double>();
  q.contact_ratio = j["contact_ratio"].get<double>();
  q.feasible = j["feasible"].get<bool>();
  return q;
}

}  // namespace

Json record_to_json(const GraspRecord& r) {
  Json contacts = Json::array();
  for (const auto& list : r.contacts.per_object) contacts.push_back(list);
  return Json{{"scene", scene_to_json(r.scene)},
              {"cfg", config_to_json(r.cfg)},
              {"contacts", contacts},
              {"energy", breakdown_to_json(r.energy)},
              {"quality", quality_to_json(r.quality)},
              {"provenance", Json{{"seed", r.seed},
                                  {"chain_id", r.chain_id},
                                  {"iterations", r.iterations},
                                  {"best_iteration", r.best_iteration},
                                  {"tool_version", r.tool_version}}}};
}

GraspRecord record_from_json(const Json& j) {
  require_keys(j, {"scene", "cfg", "contacts", "energy", "quality", "provenance"}, {}, "record");
  GraspRecord r;
  r.scene = scene_from_json(j["scene"]);
  r.cfg = config_from_json(j["cfg"]);
  if (!j["contacts"].is_array()) throw ConfigError("record: contacts must be a list of lists");
  for (const Json& list : j["contacts"])
    r.contacts.per_object.push_back(list.get<std::vector<int>>());
  r.energy = breakdown_from_json(j["energy"]);
  r.quality = quality_from_json(j["quality"]);
  const Json& p = j["provenance"];
  require_keys(p, {"seed", "chain_id", "iterations", "best_iteration", "tool_version"}, {},
               "record provenance");
  r.seed = p["seed"].get<std::uint64_t>();
  r.chain_id = p["chain_id"].get<int>();
  r.iterations = p["iterations"].get<int>();
  r.best_iteration = p["best_iteration"].get<int>();
  r.tool_version = p["tool_version"].get<std::string>();
  return r;
}

std::string record_to_line(const GraspRecord& r) {
  gate_record(r);
  return record_to_json(r).dump();
}

void write_records(const std::vector<GraspRecord>& records, const std::string& path) {
  // Validate everything before touching the file so a bad record cannot
  // leave a truncated dataset behind.
  std::vector<std::string> lines;
  lines.reserve(records.size());
  for (const GraspRecord& r : records) lines.push_back(record_to_line(r));

  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  for (const std::string& line : lines) out << line << "\n";
  if (!out) throw IoError("failed writing '" + path + "'");
}

std::vector<GraspRecord> read_records(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");

  std::vector<GraspRecord> records;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      records.push_back(record_from_json(Json::parse(line)));
    } catch (const Json::parse_error& e) {
      throw ConfigError("record file '" + path + "' line " + std::to_string(line_no) +
                        ": " + e.what());
    } catch (const ConfigError& e) {
      throw ConfigError("record file '" + path + "' line " + std::to_string(line_no) + ": " +
                        e.what());
    }
  }
  return records;
}

}  // namespace graspkit
