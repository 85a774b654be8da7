#include "tunnelscout/zigzag_planner.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace tunnelscout {

void ZigzagConfig::validate() const {
  if (!(standoff > 0.0 && standoff <= 3.0)) throw InvalidSpec("zigzag standoff must lie in (0, 3]");
  if (!(overlap_fraction >= 0.0 && overlap_fraction < 1.0)) {
    throw InvalidSpec("zigzag overlap_fraction must lie in [0, 1)");
  }
  if (!(margin >= 0.0)) throw InvalidSpec("zigzag margin must be non-negative");
}

FaceBasis face_basis(const FacePatch& face) {
  FaceBasis b;
  b.axis = -face.normal.normalized();
  const Vec3 lateral = Vec3::UnitZ().cross(b.axis);
  if (lateral.norm() < 1e-9) throw InvalidSpec("face normal must not be vertical");
  b.u = lateral.normalized();
  b.v = b.axis.cross(b.u);
  return b;
}

double lane_spacing(const DepthCamera& camera, const ZigzagConfig& cfg) {
  const double half_v = 0.5 * camera.v_fov_deg * std::numbers::pi / 180.0;
  return (1.0 - cfg.overlap_fraction) * 2.0 * cfg.standoff * std::tan(half_v);
}

int lane_count(const FacePatch& face, const DepthCamera& camera, const ZigzagConfig& cfg) {
  const double usable_h = face.height - 2.0 * cfg.margin;
  return std::max(1, static_cast<int>(std::ceil(usable_h / lane_spacing(camera, cfg) - 1e-12)));
}

Path plan_zigzag(const FacePatch& face, const DepthCamera& camera, const ZigzagConfig& cfg) {
  cfg.validate();
  camera.validate();
  if (cfg.standoff > camera.max_range) throw InvalidSpec("zigzag standoff exceeds camera range");
  const double usable_w = face.width - 2.0 * cfg.margin;
  const double usable_h = face.height - 2.0 * cfg.margin;
  if (!(usable_w > 0.0) || !(usable_h > 0.0)) {
    throw InfeasibleFace("face has no usable area inside the wall margin");
  }
  const FaceBasis b = face_basis(face);
  const double spacing = lane_spacing(camera, cfg);
  const int lanes = lane_count(face, camera, cfg);
  const double yaw = std::atan2(b.axis.y(), b.axis.x());
  const Vec3 plane_center = face.center + face.normal.normalized() * cfg.standoff;

  Path path;
  for (int k = 0; k < lanes; ++k) {
    const double h = (0.5 * (lanes - 1) - k) * spacing;
    const double dir = (k % 2 == 0) ? -1.0 : 1.0;
    for (double side : {dir, -dir}) {
      path.waypoints.push_back(plane_center + b.u * (0.5 * usable_w * side) + b.v * h);
      path.yaw.push_back(yaw);
    }
  }
  return path;
}

}  // namespace tunnelscout
