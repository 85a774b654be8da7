#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace tunnelscout {

/// World-frame position or direction in meters. Right-handed, z up.
using Vec3 = Eigen::Vector3d;

/// Wraps an angle into (-pi, pi].
inline double normalize_yaw(double yaw) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  double wrapped = std::fmod(yaw, kTwoPi);
  if (wrapped <= -std::numbers::pi) {
    wrapped += kTwoPi;
  } else if (wrapped > std::numbers::pi) {
    wrapped -= kTwoPi;
  }
  return wrapped;
}

inline bool is_finite(const Vec3& v) { return v.allFinite(); }

/// Position plus heading. Positive yaw is counter-clockwise seen from +z.
struct Pose {
  Vec3 position = Vec3::Zero();
  double yaw = 0.0;

  Pose() = default;
  Pose(const Vec3& p, double heading) : position(p), yaw(normalize_yaw(heading)) {}

  /// Unit vector along the heading, in the horizontal plane.
  Vec3 heading() const { return {std::cos(yaw), std::sin(yaw), 0.0}; }
};

// Errors. Every failure the library reports derives from Error so callers
// can catch the family or a single condition.

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define TUNNELSCOUT_DEFINE_ERROR(Name) \
  class Name : public Error {          \
   public:                             \
    using Error::Error;                \
  }

TUNNELSCOUT_DEFINE_ERROR(InvalidSpec);
TUNNELSCOUT_DEFINE_ERROR(InvalidWeight);
TUNNELSCOUT_DEFINE_ERROR(OutOfBounds);
TUNNELSCOUT_DEFINE_ERROR(NoPathFound);
TUNNELSCOUT_DEFINE_ERROR(StartInCollision);
TUNNELSCOUT_DEFINE_ERROR(InfeasibleFace);
TUNNELSCOUT_DEFINE_ERROR(NoFreeSpace);
TUNNELSCOUT_DEFINE_ERROR(IllegalTransition);
TUNNELSCOUT_DEFINE_ERROR(ScenarioInvalid);
TUNNELSCOUT_DEFINE_ERROR(CalibrationDiverged);

#undef TUNNELSCOUT_DEFINE_ERROR

/// Config parse failure. `field` is the dotted path of the offending key
/// when known; `line` is 1-based, 0 when not applicable.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::string field = {}, int line = 0)
      : Error(message), field_(std::move(field)), line_(line) {}

  const std::string& field() const { return field_; }
  int line() const { return line_; }

 private:
  std::string field_;
  int line_;
};

}  // namespace tunnelscout
