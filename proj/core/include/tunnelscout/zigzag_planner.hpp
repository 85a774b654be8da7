#pragma once

#include "tunnelscout/path.hpp"
#include "tunnelscout/sensor_sim.hpp"

namespace tunnelscout {

/// Rectangle to inspect. `normal` points from the face back toward the drone.
struct FacePatch {
  Vec3 center = Vec3::Zero();
  double width = 0.0;
  double height = 0.0;
  Vec3 normal = -Vec3::UnitX();
};

struct ZigzagConfig {
  double standoff = 1.5;
  double overlap_fraction = 0.2;
  double margin = 0.3;

  void validate() const;
};

/// Horizontal (lateral) and vertical unit vectors spanning the face plane.
struct FaceBasis {
  Vec3 axis;  ///< toward the face, = -normal
  Vec3 u;     ///< lateral, horizontal
  Vec3 v;     ///< up along the face
};

FaceBasis face_basis(const FacePatch& face);

double lane_spacing(const DepthCamera& camera, const ZigzagConfig& cfg);
int lane_count(const FacePatch& face, const DepthCamera& camera, const ZigzagConfig& cfg);

/// Boustrophedon sweep at `standoff` in front of the face, top lane first,
/// two waypoints per lane, every waypoint yawed toward the face.
/// Throws InfeasibleFace when the margin-shrunk face is empty.
Path plan_zigzag(const FacePatch& face, const DepthCamera& camera, const ZigzagConfig& cfg);

}  // namespace tunnelscout
