#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "graspkit/energy.hpp"
#include "graspkit/geometry.hpp"
#include "graspkit/hand_model.hpp"
#include "graspkit/json_io.hpp"
#include "graspkit/metrics.hpp"

namespace graspkit {

// One synthesized grasp with everything needed to reproduce and re-score it.
// The scene is stored inline so a record file is self-contained.
struct GraspRecord {
  Scene scene;
  HandConfiguration cfg;
  ContactAssignment contacts;
  EnergyBreakdown energy;
  QualityReport quality;

  // Provenance: rerunning the named chain of a synthesis with this seed and
  // iteration budget regenerates the record.
  std::uint64_t seed = 0;
  int chain_id = 0;
  int iterations = 0;      // chain budget
  int best_iteration = 0;  // completed iterations when the best state appeared
  std::string tool_version;
};

Json record_to_json(const GraspRecord& r);
GraspRecord record_from_json(const Json& j);

// JSONL, one record per line. Writing rejects non-finite energy or quality
// values (ConfigError); a malformed line fails the whole read with its line
// number (IoError) so partial datasets are never silently accepted.
void write_records(const std::vector<GraspRecord>& records, const std::string& path);
std::vector<GraspRecord> read_records(const std::string& path);

// Serialization used by both the JSONL layer and dataset digests.
std::string record_to_line(const GraspRecord& r);

}  // namespace graspkit
