#include "gtg/grasp_io.hpp"

#include <fstream>

#include "gtg/error.hpp"

namespace gtg {

nlohmann::json pose_to_json(const GraspPose& pose) {
  nlohmann::json j;
  j["position"] = {pose.position.x, pose.position.y, pose.position.z};
  j["rotation"] = pose.rotation.m;  // row-major 9
  j["width"] = pose.width;
  j["source"] = to_string(pose.source);
  if (pose.score) j["score"] = *pose.score;
  return j;
}

GraspPose pose_from_json(const nlohmann::json& j) {
  GraspPose pose;
  const auto& p = j.at("position");
  if (p.size() != 3) throw DataError("pose position must have 3 entries");
  pose.position = {p[0].get<double>(), p[1].get<double>(), p[2].get<double>()};
  const auto& r = j.at("rotation");
  if (r.size() != 9) throw DataError("pose rotation must have 9 entries (row-major)");
  for (size_t i = 0; i < 9; ++i) pose.rotation.m[i] = r[i].get<double>();
  pose.width = j.at("width").get<double>();
  pose.source = grasp_source_from_string(j.at("source").get<std::string>());
  if (j.contains("score")) pose.score = j.at("score").get<double>();
  return pose;
}

nlohmann::json record_to_json(const GraspRecord& rec) {
  nlohmann::json j = pose_to_json(rec.pose);
  if (rec.scene_id) j["scene_id"] = *rec.scene_id;
  if (rec.annotation) {
    j["label"] = rec.annotation->label;
    j["collision"] = rec.annotation->collision;
    if (rec.annotation->mu_required) j["mu_required"] = *rec.annotation->mu_required;
  }
  return j;
}

GraspRecord record_from_json(const nlohmann::json& j) {
  GraspRecord rec;
  rec.pose = pose_from_json(j);
  if (j.contains("scene_id")) rec.scene_id = j.at("scene_id").get<int>();
  if (j.contains("label")) {
    GraspAnnotation ann;
    ann.label = j.at("label").get<double>();
    ann.collision = j.value("collision", false);
    if (j.contains("mu_required"))
      ann.mu_required = j.at("mu_required").get<double>();
    rec.annotation = ann;
  }
  return rec;
}

void save_records_jsonl(const std::vector<GraspRecord>& records,
                        const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path + "'");
  for (const auto& rec : records) out << record_to_json(rec).dump() << "\n";
  if (!out) throw DataError("write failed for '" + path + "'");
}

std::vector<GraspRecord> load_records_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::vector<GraspRecord> records;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded())
      throw DataError(path + ":" + std::to_string(line_no) + ": invalid JSON");
    records.push_back(record_from_json(j));
  }
  return records;
}

}  // namespace gtg
