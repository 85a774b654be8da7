#pragma once

#include <string>
#include <vector>

#include "tunnelscout/types.hpp"

namespace tunnelscout {

struct Component {
  std::string name;
  double weight_g = 0.0;
};

/// Airframe bill of materials plus the measured total thrust of the
/// motor/propeller set. Masses in grams, thrust in grams-force.
struct DroneSpec {
  std::vector<Component> components;
  double available_thrust_g = 0.0;

  /// Reference build: ~1200 g all-up weight on a ~2500 g thrust set.
  static DroneSpec reference();
};

struct ThrustCheck {
  bool pass = false;
  double total_weight_g = 0.0;
  double required_thrust_g = 0.0;
};

/// Sum of component weights. Empty list is 0 g.
double total_weight(const DroneSpec& spec);

/// Thrust must be at least twice the all-up weight, inclusive.
/// Throws InvalidSpec for an empty or non-positive-weight spec.
ThrustCheck thrust_margin_check(const DroneSpec& spec);

/// Target velocity sent to the flight controller, m/s.
struct ControlCommand {
  double u1 = 0.0;
  double u2 = 0.0;
  double u3 = 0.0;

  Vec3 as_vector() const { return {u1, u2, u3}; }
  static ControlCommand from(const Vec3& v) { return {v.x(), v.y(), v.z()}; }
};

struct StateEstimate {
  Vec3 estimate = Vec3::Zero();
  Vec3 odometry_input = Vec3::Zero();
  Vec3 localization_input = Vec3::Zero();
};

/// Fixed-weight convex blend: weight * odometry + (1 - weight) * localization.
/// Throws InvalidWeight unless 0 <= weight <= 1.
StateEstimate fuse_state_estimate(const Vec3& odometry, const Vec3& localization,
                                  double weight = 0.5);

}  // namespace tunnelscout
