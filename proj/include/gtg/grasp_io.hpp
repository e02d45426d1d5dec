#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gtg/gripper.hpp"

namespace gtg {

// Oracle annotation attached to a candidate record (see quality.hpp for the
// scoring scheme). mu_required is present only when contacts were found.
struct GraspAnnotation {
  double label = 0.0;
  bool collision = false;
  std::optional<double> mu_required;
};

// One JSON-lines record: pose + provenance, optional predicted score,
// optional oracle annotation, optional scene tag.
struct GraspRecord {
  GraspPose pose;
  std::optional<GraspAnnotation> annotation;
  std::optional<int> scene_id;
};

nlohmann::json pose_to_json(const GraspPose& pose);
GraspPose pose_from_json(const nlohmann::json& j);

nlohmann::json record_to_json(const GraspRecord& rec);
GraspRecord record_from_json(const nlohmann::json& j);

void save_records_jsonl(const std::vector<GraspRecord>& records,
                        const std::string& path);
std::vector<GraspRecord> load_records_jsonl(const std::string& path);

}  // namespace gtg
