#include "tunnelscout/scenario_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace tunnelscout {

using nlohmann::json;

namespace {

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

/// Reads keys out of one JSON object and rejects whatever is left over.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(path_, "must be an object");
  }

  [[noreturn]] static void fail(const std::string& field, const std::string& what) {
    throw ParseError("field '" + field + "' " + what, field);
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key);
  }

  const json& raw(const std::string& key) { return j_.at(key); }
  std::string field(const std::string& key) const { return join(path_, key); }

  void number(const std::string& key, double& out) {
    if (!has(key)) return;
    const json& v = j_.at(key);
    if (!v.is_number()) fail(field(key), "must be a number");
    out = v.get<double>();
  }

  void positive(const std::string& key, double& out) {
    number(key, out);
    if (has(key) && !(out > 0.0)) fail(field(key), "must be positive");
  }

  void non_negative(const std::string& key, double& out) {
    number(key, out);
    if (has(key) && !(out >= 0.0)) fail(field(key), "must be non-negative");
  }

  void number(const std::string& key, float& out) {
    double d = out;
    number(key, d);
    out = static_cast<float>(d);
  }

  void integer(const std::string& key, int& out) {
    if (!has(key)) return;
    const json& v = j_.at(key);
    if (!v.is_number_integer()) fail(field(key), "must be an integer");
    out = v.get<int>();
  }

  void unsigned_integer(const std::string& key, std::uint64_t& out) {
    if (!has(key)) return;
    const json& v = j_.at(key);
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
      fail(field(key), "must be a non-negative integer");
    }
    out = v.get<std::uint64_t>();
  }

  void vec3(const std::string& key, Vec3& out) {
    if (!has(key)) return;
    const json& v = j_.at(key);
    if (!v.is_array() || v.size() != 3) fail(field(key), "must be an array of 3 numbers");
    for (int i = 0; i < 3; ++i) {
      if (!v[static_cast<std::size_t>(i)].is_number()) fail(field(key), "must be an array of 3 numbers");
      out[i] = v[static_cast<std::size_t>(i)].get<double>();
    }
  }

  void string(const std::string& key, std::string& out) {
    if (!has(key)) return;
    const json& v = j_.at(key);
    if (!v.is_string()) fail(field(key), "must be a string");
    out = v.get<std::string>();
  }

  void finish() const {
    for (const auto& item : j_.items()) {
      if (!seen_.count(item.key())) fail(field(item.key()), "is not a recognized key");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

json vec_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

int line_of(const std::string& text, std::size_t byte) {
  const std::size_t end = std::min(byte, text.size());
  int line = 1;
  for (std::size_t i = 0; i < end; ++i) {
    if (text[i] == '\n') ++line;
  }
  return line;
}

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    const int line = line_of(text, e.byte == 0 ? 0 : e.byte - 1);
    throw ParseError("syntax error at line " + std::to_string(line) + ": " + e.what(), "", line);
  }
}

void read_tunnel(Section s, TunnelSpec& t) {
  for (const char* key : {"length", "width", "height"}) {
    if (!s.has(key)) Section::fail(s.field(key), "is required");
  }
  s.positive("length", t.length);
  s.positive("width", t.width);
  s.positive("height", t.height);
  s.positive("wall_thickness", t.wall_thickness);
  s.vec3("axis", t.axis);
  if ((t.axis.normalized() - Vec3::UnitX()).norm() > 1e-9) {
    Section::fail(s.field("axis"), "must be [1, 0, 0]");
  }
  s.finish();
}

void read_obstacles(const json& arr, std::vector<ObstacleTrack>& out) {
  if (!arr.is_array()) Section::fail("obstacles", "must be an array");
  for (std::size_t i = 0; i < arr.size(); ++i) {
    Section s(arr[i], "obstacles[" + std::to_string(i) + "]");
    ObstacleTrack o;
    s.positive("radius", o.radius);
    s.positive("height", o.height);
    s.vec3("a", o.endpoint_a);
    s.vec3("b", o.endpoint_b);
    s.non_negative("speed", o.speed);
    s.number("phase", o.phase);
    s.finish();
    out.push_back(o);
  }
}

void read_wind(Section s, WindProfile& w) {
  std::string level = std::string(to_string(w.level));
  s.string("level", level);
  const auto parsed = parse_wind_level(level);
  if (!parsed) Section::fail(s.field("level"), "must be one of None, Low, Middle, High");
  w.level = *parsed;
  w.speed = hover_wind_speed(w.level);
  s.non_negative("speed", w.speed);
  s.vec3("direction", w.direction);
  if (!(w.direction.norm() > 0.0)) Section::fail(s.field("direction"), "must be non-zero");
  // Leave unit vectors alone so serialized scenarios read back bit-exact.
  if (std::abs(w.direction.norm() - 1.0) > 1e-12) w.direction.normalize();
  s.non_negative("gain", w.gain);
  s.finish();
}

void read_drone(Section s, Scenario& sc) {
  if (s.has("components")) {
    const json& arr = s.raw("components");
    if (!arr.is_array()) Section::fail(s.field("components"), "must be an array");
    sc.drone.components.clear();
    for (std::size_t i = 0; i < arr.size(); ++i) {
      Section c(arr[i], s.field("components[" + std::to_string(i) + "]"));
      Component comp;
      c.string("name", comp.name);
      if (!c.has("weight_g")) Section::fail(c.field("weight_g"), "is required");
      c.positive("weight_g", comp.weight_g);
      c.finish();
      sc.drone.components.push_back(comp);
    }
  }
  s.positive("available_thrust_g", sc.drone.available_thrust_g);
  s.positive("radius", sc.drone_radius);
  s.finish();
}

void read_dynamics(Section s, DynamicsParams& d) {
  s.positive("kp", d.kp);
  s.non_negative("kd", d.kd);
  s.positive("v_max", d.v_max);
  s.positive("mass_kg", d.mass_kg);
  s.positive("yaw_gain", d.yaw_gain);
  s.positive("yaw_rate_max", d.yaw_rate_max);
  s.finish();
}

void read_camera(Section s, DepthCamera& c) {
  s.positive("h_fov_deg", c.h_fov_deg);
  s.positive("v_fov_deg", c.v_fov_deg);
  s.positive("max_range", c.max_range);
  s.integer("rays_h", c.rays_h);
  s.integer("rays_v", c.rays_v);
  s.non_negative("noise_sigma", c.noise_sigma);
  if (c.h_fov_deg >= 180.0) Section::fail(s.field("h_fov_deg"), "must be below 180");
  if (c.v_fov_deg >= 180.0) Section::fail(s.field("v_fov_deg"), "must be below 180");
  if (c.rays_h < 2) Section::fail(s.field("rays_h"), "must be at least 2");
  if (c.rays_v < 2) Section::fail(s.field("rays_v"), "must be at least 2");
  s.finish();
}

void read_map(Section s, VoxelMapParams& m) {
  s.positive("resolution", m.resolution);
  s.number("hit", m.hit);
  s.number("miss", m.miss);
  s.number("l_min", m.l_min);
  s.number("l_max", m.l_max);
  s.number("occ_threshold", m.occ_threshold);
  s.number("free_threshold", m.free_threshold);
  if (!(m.l_min < m.l_max)) Section::fail(s.field("l_max"), "must exceed l_min");
  if (!(m.free_threshold < m.occ_threshold)) {
    Section::fail(s.field("free_threshold"), "must be below occ_threshold");
  }
  s.finish();
}

void read_rrt(Section s, RrtConfig& r) {
  s.positive("step_size", r.step_size);
  s.non_negative("goal_bias", r.goal_bias);
  if (r.goal_bias > 1.0) Section::fail(s.field("goal_bias"), "must not exceed 1");
  s.integer("max_samples", r.max_samples);
  if (r.max_samples < 1) Section::fail(s.field("max_samples"), "must be at least 1");
  s.non_negative("goal_tolerance", r.goal_tolerance);
  s.integer("shortcut_iters", r.shortcut_iters);
  if (r.shortcut_iters < 0) Section::fail(s.field("shortcut_iters"), "must be non-negative");
  s.integer("segment_shortcut_iters", r.segment_shortcut_iters);
  if (r.segment_shortcut_iters < 0) {
    Section::fail(s.field("segment_shortcut_iters"), "must be non-negative");
  }
  s.finish();
}

void read_zigzag(Section s, ZigzagConfig& z) {
  s.positive("standoff", z.standoff);
  if (z.standoff > 3.0) Section::fail(s.field("standoff"), "must not exceed 3.0");
  s.non_negative("overlap_fraction", z.overlap_fraction);
  if (z.overlap_fraction >= 1.0) Section::fail(s.field("overlap_fraction"), "must be below 1");
  s.non_negative("margin", z.margin);
  s.finish();
}

void read_explorer(Section s, Scenario& sc) {
  s.integer("max_lookaround_retries", sc.max_lookaround_retries);
  if (sc.max_lookaround_retries < 1) {
    Section::fail(s.field("max_lookaround_retries"), "must be at least 1");
  }
  s.non_negative("fusion_weight", sc.fusion_weight);
  if (sc.fusion_weight > 1.0) Section::fail(s.field("fusion_weight"), "must not exceed 1");
  s.non_negative("localization_noise", sc.localization_noise);
  s.finish();
}

void read_sim(Section s, Scenario& sc) {
  s.positive("dt", sc.sim_dt);
  s.positive("planner_period", sc.planner_period);
  s.positive("timeout", sc.timeout);
  s.finish();
}

}  // namespace

Scenario parse_scenario(const std::string& text) {
  const json root = parse_json(text);
  Section top(root, "");
  Scenario sc;
  if (!top.has("tunnel")) Section::fail("tunnel", "is required");
  read_tunnel(Section(top.raw("tunnel"), "tunnel"), sc.tunnel);
  top.unsigned_integer("seed", sc.rng_seed);
  if (top.has("obstacles")) read_obstacles(top.raw("obstacles"), sc.obstacles);
  if (top.has("wind")) read_wind(Section(top.raw("wind"), "wind"), sc.wind);
  if (top.has("drone")) read_drone(Section(top.raw("drone"), "drone"), sc);
  if (top.has("dynamics")) read_dynamics(Section(top.raw("dynamics"), "dynamics"), sc.dynamics);
  if (top.has("camera")) read_camera(Section(top.raw("camera"), "camera"), sc.camera);
  if (top.has("map")) read_map(Section(top.raw("map"), "map"), sc.map);
  if (top.has("rrt")) read_rrt(Section(top.raw("rrt"), "rrt"), sc.rrt);
  if (top.has("zigzag")) read_zigzag(Section(top.raw("zigzag"), "zigzag"), sc.zigzag);
  if (top.has("explorer")) read_explorer(Section(top.raw("explorer"), "explorer"), sc);
  if (top.has("sim")) read_sim(Section(top.raw("sim"), "sim"), sc);
  top.finish();
  try {
    sc.validate();
  } catch (const ScenarioInvalid& e) {
    throw ParseError(e.what());
  }
  return sc;
}

std::string serialize_scenario(const Scenario& sc) {
  json j;
  j["seed"] = sc.rng_seed;
  j["tunnel"] = {{"length", sc.tunnel.length},
                 {"width", sc.tunnel.width},
                 {"height", sc.tunnel.height},
                 {"axis", vec_json(sc.tunnel.axis)},
                 {"wall_thickness", sc.tunnel.wall_thickness}};
  j["obstacles"] = json::array();
  for (const ObstacleTrack& o : sc.obstacles) {
    j["obstacles"].push_back({{"radius", o.radius},
                              {"height", o.height},
                              {"a", vec_json(o.endpoint_a)},
                              {"b", vec_json(o.endpoint_b)},
                              {"speed", o.speed},
                              {"phase", o.phase}});
  }
  j["wind"] = {{"level", std::string(to_string(sc.wind.level))},
               {"speed", sc.wind.speed},
               {"direction", vec_json(sc.wind.direction)},
               {"gain", sc.wind.gain}};
  json comps = json::array();
  for (const Component& c : sc.drone.components) {
    comps.push_back({{"name", c.name}, {"weight_g", c.weight_g}});
  }
  j["drone"] = {{"components", comps},
                {"available_thrust_g", sc.drone.available_thrust_g},
                {"radius", sc.drone_radius}};
  j["dynamics"] = {{"kp", sc.dynamics.kp},         {"kd", sc.dynamics.kd},
                   {"v_max", sc.dynamics.v_max},   {"mass_kg", sc.dynamics.mass_kg},
                   {"yaw_gain", sc.dynamics.yaw_gain}, {"yaw_rate_max", sc.dynamics.yaw_rate_max}};
  j["camera"] = {{"h_fov_deg", sc.camera.h_fov_deg}, {"v_fov_deg", sc.camera.v_fov_deg},
                 {"max_range", sc.camera.max_range}, {"rays_h", sc.camera.rays_h},
                 {"rays_v", sc.camera.rays_v},       {"noise_sigma", sc.camera.noise_sigma}};
  j["map"] = {{"resolution", sc.map.resolution},
              {"hit", sc.map.hit},
              {"miss", sc.map.miss},
              {"l_min", sc.map.l_min},
              {"l_max", sc.map.l_max},
              {"occ_threshold", sc.map.occ_threshold},
              {"free_threshold", sc.map.free_threshold}};
  j["rrt"] = {{"step_size", sc.rrt.step_size},
              {"goal_bias", sc.rrt.goal_bias},
              {"max_samples", sc.rrt.max_samples},
              {"goal_tolerance", sc.rrt.goal_tolerance},
              {"shortcut_iters", sc.rrt.shortcut_iters},
              {"segment_shortcut_iters", sc.rrt.segment_shortcut_iters}};
  j["zigzag"] = {{"standoff", sc.zigzag.standoff},
                 {"overlap_fraction", sc.zigzag.overlap_fraction},
                 {"margin", sc.zigzag.margin}};
  j["explorer"] = {{"max_lookaround_retries", sc.max_lookaround_retries},
                   {"fusion_weight", sc.fusion_weight},
                   {"localization_noise", sc.localization_noise}};
  j["sim"] = {{"dt", sc.sim_dt}, {"planner_period", sc.planner_period}, {"timeout", sc.timeout}};
  return j.dump(2) + "\n";
}

std::string report_json(const RunReport& r, const Scenario& sc) {
  json states = json::array();
  for (ExplorerState s : r.states_visited) states.push_back(std::string(to_string(s)));
  json j;
  j["seed"] = r.seed;
  j["stopped"] = r.stopped;
  j["landed"] = r.landed;
  j["timed_out"] = r.timed_out;
  j["reached_end"] = r.reached_end;
  j["min_distance_to_end_m"] = r.min_distance_to_end;
  j["coverage_fraction"] = r.coverage_fraction;
  j["return_to_start_error_m"] = r.return_to_start_error;
  j["collision_count"] = r.collision_count;
  j["final_state"] = std::string(to_string(r.final_state));
  j["states_visited"] = states;
  j["rrt_plans"] = r.rrt_plans;
  j["rrt_failures"] = r.rrt_failures;
  j["sim_duration_s"] = r.sim_duration;
  j["planner_ticks"] = r.planner_ticks;
  j["tick_ms"] = {{"mean", r.tick_mean_ms}, {"p99", r.tick_p99_ms}, {"max", r.tick_max_ms}};
  j["wall_clock_s"] = r.wall_clock_s;
  j["scenario"] = json::parse(serialize_scenario(sc));
  return j.dump(2) + "\n";
}

std::string calibration_json(const WindCalibration& cal) {
  json j;
  j["gain"] = cal.gain;
  j["mass_kg"] = cal.mass_kg;
  j["hover_noise"] = {{"sigma_x", cal.hover_noise.sigma_x}, {"sigma_y", cal.hover_noise.sigma_y}};
  j["straight_noise"] = {{"sigma_x", cal.straight_noise.sigma_x},
                         {"sigma_y", cal.straight_noise.sigma_y}};
  j["seeds"] = cal.seeds;
  return j.dump(2) + "\n";
}

WindCalibration parse_calibration(const std::string& text) {
  const json root = parse_json(text);
  Section top(root, "");
  WindCalibration cal;
  for (const char* key : {"gain", "hover_noise", "straight_noise"}) {
    if (!top.has(key)) Section::fail(key, "is required");
  }
  top.non_negative("gain", cal.gain);
  top.positive("mass_kg", cal.mass_kg);
  auto noise = [&](const char* key, NoiseModel& n) {
    Section s(top.raw(key), key);
    s.non_negative("sigma_x", n.sigma_x);
    s.non_negative("sigma_y", n.sigma_y);
    s.finish();
  };
  noise("hover_noise", cal.hover_noise);
  noise("straight_noise", cal.straight_noise);
  if (top.has("seeds")) {
    const json& arr = top.raw("seeds");
    if (!arr.is_array()) Section::fail("seeds", "must be an array");
    for (const json& v : arr) {
      if (!v.is_number_unsigned()) Section::fail("seeds", "must hold non-negative integers");
      cal.seeds.push_back(v.get<std::uint64_t>());
    }
  }
  top.finish();
  return cal;
}

std::string drift_report_json(const DriftReport& r, const WindTestConfig& cfg, double gain) {
  json j;
  j["mode"] = cfg.mode == WindTestMode::Hover ? "hover" : "straight";
  j["level"] = std::string(to_string(cfg.level));
  j["wind_speed_mps"] =
      cfg.mode == WindTestMode::Hover ? hover_wind_speed(cfg.level) : straight_wind_speed(cfg.level);
  j["seed"] = cfg.seed;
  j["gain"] = gain;
  j["max_drift_x_m"] = r.max_drift_x;
  j["max_drift_y_m"] = r.max_drift_y;
  j["intrinsic_drift_y_m"] = r.intrinsic_drift_y;
  if (cfg.mode == WindTestMode::GoStraight) {
    j["peak_x_m"] = r.peak_x;
    j["leg_end_error_m"] = r.leg_end_error;
  }
  return j.dump(2) + "\n";
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw Error("failed writing " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace tunnelscout
