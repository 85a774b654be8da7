#include "tunnelscout/drone_model.hpp"

#include <numeric>

namespace tunnelscout {

DroneSpec DroneSpec::reference() {
  // Component split is illustrative; only the total is a measured figure.
  DroneSpec spec;
  spec.components = {
      {"frame_250mm", 150.0},      {"onboard_computer", 180.0},
      {"depth_camera", 100.0},     {"tracking_camera", 55.0},
      {"flight_controller", 15.0}, {"motors_x4", 140.0},
      {"escs_propellers", 70.0},   {"battery_6000mah_4s", 490.0},
  };
  spec.available_thrust_g = 2500.0;
  return spec;
}

double total_weight(const DroneSpec& spec) {
  return std::accumulate(spec.components.begin(), spec.components.end(), 0.0,
                         [](double acc, const Component& c) { return acc + c.weight_g; });
}

ThrustCheck thrust_margin_check(const DroneSpec& spec) {
  for (const auto& c : spec.components) {
    if (!(c.weight_g > 0.0)) {
      throw InvalidSpec("component '" + c.name + "' has non-positive weight");
    }
  }
  const double weight = total_weight(spec);
  if (!(weight > 0.0)) {
    throw InvalidSpec("drone spec has zero total weight");
  }
  ThrustCheck out;
  out.total_weight_g = weight;
  out.required_thrust_g = 2.0 * weight;
  out.pass = spec.available_thrust_g >= out.required_thrust_g;
  return out;
}

StateEstimate fuse_state_estimate(const Vec3& odometry, const Vec3& localization, double weight) {
  if (!(weight >= 0.0 && weight <= 1.0)) {
    throw InvalidWeight("fusion weight must lie in [0, 1]");
  }
  StateEstimate out;
  out.odometry_input = odometry;
  out.localization_input = localization;
  out.estimate = weight * odometry + (1.0 - weight) * localization;
  return out;
}

}  // namespace tunnelscout
