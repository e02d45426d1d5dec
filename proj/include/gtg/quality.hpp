#pragma once

#include <memory>
#include <optional>
#include <utility>

#include "gtg/gripper.hpp"
#include "gtg/scene.hpp"
#include "gtg/spatial_index.hpp"

namespace gtg {

struct Contact {
  Vec3 point;
  Vec3 normal;  // outward surface normal
};

struct GraspLabel {
  double score = -1.0;  // -1.0 collision, -0.5 infeasible, else [0, 1]
  bool collision = false;
  std::optional<double> mu_required;
  std::optional<std::pair<Contact, Contact>> contacts;
};

struct LabelConfig {
  double mu_threshold = 1.0;
  double mu_quantum = 0.1;          // scores quantize up to this grid
  double surface_spacing = 0.001;   // dense sampling for collision tests (m)
  double contact_grid = 0.0005;     // ray grid pitch on the finger faces (m)
};

// Smallest friction coefficient whose cones at both contacts contain the
// grasp line: max(tan angle(n1, c1->c2 reversed), tan angle(n2, c1->c2)).
// Returns +inf when either angle reaches 90 degrees.
double min_friction(const Vec3& c1, const Vec3& n1, const Vec3& c2, const Vec3& n2);

// True iff the grasp is collision-free and closes at friction mu.
bool evaluate_at_mu(const GraspLabel& label, double mu);

// Ground-truth labeler over one scene: dense surface sampling for the
// collision test (built once), analytic ray sweeps for the finger contacts.
class QualityOracle {
 public:
  QualityOracle(SceneModel scene, GripperGeometry gripper, LabelConfig cfg = {});

  // Jaw-sweep contacts, or nullopt when a jaw closes fully without touching.
  std::optional<std::pair<Contact, Contact>> find_contacts(const GraspPose& pose) const;

  // Gripper body vs dense scene sampling, or body dipping below the plane.
  bool collides(const GraspPose& pose) const;

  GraspLabel label(const GraspPose& pose) const;

  const SceneModel& scene() const { return scene_; }
  const PointCloud& surface_sampling() const { return sampling_; }
  const LabelConfig& config() const { return cfg_; }

  // Object owning the nearest surface to p (benchmark per-object caps).
  int nearest_object(const Vec3& p) const;

 private:
  SceneModel scene_;
  GripperGeometry gripper_;
  LabelConfig cfg_;
  PointCloud sampling_;
  std::unique_ptr<SpatialIndex> index_;
  double body_reach_ = 0.0;
};

}  // namespace gtg
