// Copyright 2026 The Corridor Planner Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "corridor/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <variant>

#include <json.hpp>

namespace corridor {

namespace {

using nlohmann::json;

// Field registry so the JSON "config" object, --set overrides and
// serialization all agree on one key space.
struct ConfigField {
  std::variant<double PlannerConfig::*, int PlannerConfig::*,
               bool PlannerConfig::*>
      member;
};

const std::map<std::string, ConfigField>& config_fields() {
  static const std::map<std::string, ConfigField> kFields = {
      {"path_horizon", {&PlannerConfig::path_horizon}},
      {"path_grid_count", {&PlannerConfig::path_grid_count}},
      {"speed_horizon", {&PlannerConfig::speed_horizon}},
      {"speed_grid_count", {&PlannerConfig::speed_grid_count}},
      {"replan_period", {&PlannerConfig::replan_period}},
      {"lateral_sample_count", {&PlannerConfig::lateral_sample_count}},
      {"lateral_sample_spacing", {&PlannerConfig::lateral_sample_spacing}},
      {"v_target", {&PlannerConfig::v_target}},
      {"comfort_decel", {&PlannerConfig::comfort_decel}},
      {"a_lat_max", {&PlannerConfig::a_lat_max}},
      {"theta_max", {&PlannerConfig::theta_max}},
      {"dp.w_obs", {&PlannerConfig::dp_w_obs}},
      {"dp.w_ref", {&PlannerConfig::dp_w_ref}},
      {"dp.w_smooth", {&PlannerConfig::dp_w_smooth}},
      {"dp.w_kappa", {&PlannerConfig::dp_w_kappa}},
      {"dp.sigma_geom", {&PlannerConfig::dp_sigma_geom}},
      {"prediction.sigma0", {&PlannerConfig::sigma0}},
      {"prediction.k_sigma", {&PlannerConfig::k_sigma}},
      {"prediction.lane_attach_threshold",
       {&PlannerConfig::lane_attach_threshold}},
      {"prediction.tau_l", {&PlannerConfig::tau_l}},
      {"margins.lateral", {&PlannerConfig::lateral_margin}},
      {"margins.longitudinal", {&PlannerConfig::margin_long}},
      {"path_weights.ref", {&PlannerConfig::path_w_ref}},
      {"path_weights.ddl", {&PlannerConfig::path_w_ddl}},
      {"path_weights.dddl", {&PlannerConfig::path_w_dddl}},
      {"speed_weights.cruise_pos", {&PlannerConfig::speed_w_cruise_pos}},
      {"speed_weights.cruise_vel", {&PlannerConfig::speed_w_cruise_vel}},
      {"speed_weights.accel", {&PlannerConfig::speed_w_accel}},
      {"speed_weights.jerk", {&PlannerConfig::speed_w_jerk}},
      {"speed_weights.stop_vel", {&PlannerConfig::speed_w_stop_vel}},
      {"solver.tol_prim", {&PlannerConfig::tol_prim}},
      {"solver.tol_dual", {&PlannerConfig::tol_dual}},
      {"solver.max_iter", {&PlannerConfig::max_iter}},
      {"solver.rho", {&PlannerConfig::rho}},
      {"solver.warm_start", {&PlannerConfig::warm_start}},
      {"guardian.d_emerg", {&PlannerConfig::d_emerg}},
      {"guardian.ttc_emerg", {&PlannerConfig::ttc_emerg}},
      {"guardian.ttc_slow", {&PlannerConfig::ttc_slow}},
      {"guardian.closing_eps", {&PlannerConfig::closing_eps}},
      {"guardian.deadline", {&PlannerConfig::deadline}},
  };
  return kFields;
}

void set_config_field(PlannerConfig& config, const std::string& key,
                      const json& value) {
  const auto it = config_fields().find(key);
  if (it == config_fields().end()) {
    throw ParseError("unknown config key '" + key + "'");
  }
  try {
    std::visit(
        [&](auto member) {
          using T = std::remove_reference_t<decltype(config.*member)>;
          config.*member = value.get<T>();
        },
        it->second.member);
  } catch (const json::exception& e) {
    throw ParseError("config key '" + key + "': " + e.what());
  }
}

void parse_config_object(PlannerConfig& config, const json& obj,
                         const std::string& prefix) {
  if (!obj.is_object()) {
    throw ParseError("config" + (prefix.empty() ? "" : " key '" + prefix + "'") +
                     " must be an object");
  }
  for (const auto& [key, value] : obj.items()) {
    const std::string full = prefix.empty() ? key : prefix + "." + key;
    if (value.is_object()) {
      parse_config_object(config, value, full);
    } else {
      set_config_field(config, full, value);
    }
  }
}

void check_keys(const json& obj, const std::set<std::string>& allowed,
                const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (allowed.count(key) == 0) {
      throw ParseError("unknown key '" + key + "' in " + where);
    }
  }
}

double get_number(const json& obj, const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number()) {
    throw ParseError(std::string("field '") + key + "' must be a number");
  }
  return obj[key].get<double>();
}

Vec2 parse_point(const json& node, const std::string& where) {
  if (!node.is_array() || node.size() != 2 || !node[0].is_number() ||
      !node[1].is_number()) {
    throw ParseError(where + " must be an [x, y] pair");
  }
  return {node[0].get<double>(), node[1].get<double>()};
}

MotionSpec parse_motion(const json& node, const std::string& obstacle_id) {
  const std::string where = "obstacle '" + obstacle_id + "' motion";
  if (!node.is_object() || !node.contains("type")) {
    throw ParseError(where + " needs a \"type\" tag");
  }
  MotionSpec motion;
  const std::string type = node["type"].get<std::string>();
  if (type == "static") {
    check_keys(node, {"type"}, where);
    motion.type = MotionType::kStatic;
  } else if (type == "constant_velocity") {
    check_keys(node, {"type", "speed", "heading"}, where);
    motion.type = MotionType::kConstantVelocity;
    motion.speed = get_number(node, "speed", 0.0);
    motion.velocity_heading = get_number(node, "heading", 0.0);
  } else if (type == "lane_follow") {
    check_keys(node, {"type", "speed"}, where);
    motion.type = MotionType::kLaneFollow;
    motion.lane_speed = get_number(node, "speed", 0.0);
  } else if (type == "scripted") {
    check_keys(node, {"type", "poses"}, where);
    motion.type = MotionType::kScripted;
    if (!node.contains("poses") || !node["poses"].is_array() ||
        node["poses"].empty()) {
      throw ParseError(where + " needs a non-empty \"poses\" array");
    }
    for (const auto& p : node["poses"]) {
      check_keys(p, {"t", "x", "y", "heading"}, where + " pose");
      ScriptedPose sp;
      sp.t = get_number(p, "t", 0.0);
      sp.position = {get_number(p, "x", 0.0), get_number(p, "y", 0.0)};
      sp.heading = get_number(p, "heading", 0.0);
      if (!motion.script.empty() && sp.t <= motion.script.back().t) {
        throw ParseError(where + ": script timestamps must strictly increase");
      }
      motion.script.push_back(sp);
    }
  } else {
    throw ParseError(where + ": unknown motion type '" + type + "'");
  }
  return motion;
}

json motion_to_json(const MotionSpec& motion) {
  json node;
  switch (motion.type) {
    case MotionType::kStatic:
      node["type"] = "static";
      break;
    case MotionType::kConstantVelocity:
      node["type"] = "constant_velocity";
      node["speed"] = motion.speed;
      node["heading"] = motion.velocity_heading;
      break;
    case MotionType::kLaneFollow:
      node["type"] = "lane_follow";
      node["speed"] = motion.lane_speed;
      break;
    case MotionType::kScripted: {
      node["type"] = "scripted";
      json poses = json::array();
      for (const auto& p : motion.script) {
        poses.push_back({{"t", p.t},
                         {"x", p.position.x},
                         {"y", p.position.y},
                         {"heading", p.heading}});
      }
      node["poses"] = std::move(poses);
      break;
    }
  }
  return node;
}

}  // namespace

std::vector<std::string> validate(const Scenario& sc) {
  std::vector<std::string> v;
  auto positive = [&](double value, const char* name) {
    if (!(value > 0.0)) {
      v.push_back(std::string("vehicle.") + name + " must be > 0");
    }
  };
  positive(sc.vehicle.length, "length");
  positive(sc.vehicle.width, "width");
  positive(sc.vehicle.wheelbase, "wheelbase");
  positive(sc.vehicle.max_speed, "max_speed");
  positive(sc.vehicle.max_accel, "max_accel");
  positive(sc.vehicle.max_decel, "max_decel");
  positive(sc.vehicle.max_jerk, "max_jerk");
  positive(sc.vehicle.max_curvature, "max_curvature");
  if (sc.vehicle.length <= sc.vehicle.wheelbase) {
    v.push_back("vehicle.length must exceed wheelbase");
  }

  if (sc.ego.speed < 0.0) v.push_back("ego speed must be >= 0");
  if (std::abs(sc.ego.curvature) > sc.vehicle.max_curvature + 1e-12) {
    v.push_back("ego curvature exceeds vehicle max_curvature");
  }

  std::set<std::string> ids;
  for (const Obstacle& obs : sc.obstacles) {
    if (!ids.insert(obs.id).second) {
      v.push_back("duplicate obstacle id '" + obs.id + "'");
    }
    if (obs.footprint.size() < 3) {
      v.push_back("obstacle '" + obs.id + "': footprint needs >= 3 vertices");
    } else if (!polygon_is_convex_ccw(obs.footprint)) {
      v.push_back("obstacle '" + obs.id +
                  "': footprint must be convex with positive area");
    }
  }

  if (sc.reference_polyline.size() < 2) {
    v.push_back("reference_line needs at least 2 points");
  } else {
    try {
      const ReferenceLine line = ReferenceLine::from_polyline(sc.reference_polyline);
      if (sc.goal_s > line.total_length() + 1e-9) {
        v.push_back("goal_s exceeds reference line length");
      }
    } catch (const DegeneratePolyline& e) {
      v.push_back(std::string("reference_line: ") + e.what());
    }
  }
  if (sc.goal_s < 0.0) v.push_back("goal_s must be >= 0");
  if (sc.road_half_width <= sc.vehicle.width / 2.0) {
    v.push_back("road narrower than vehicle");
  }

  const PlannerConfig& c = sc.config;
  if (c.path_grid_count < 4) v.push_back("path grid count below minimum 4");
  if (c.speed_grid_count < 4) v.push_back("speed grid count below minimum 4");
  if (!(c.path_horizon > 0.0)) v.push_back("path_horizon must be > 0");
  if (!(c.speed_horizon > 0.0)) v.push_back("speed_horizon must be > 0");
  if (!(c.replan_period > 0.0)) v.push_back("replan_period must be > 0");
  if (c.lateral_sample_count < 1 || c.lateral_sample_count % 2 == 0) {
    v.push_back("lateral_sample_count must be odd and >= 1");
  }
  if (!(c.lateral_sample_spacing > 0.0)) {
    v.push_back("lateral_sample_spacing must be > 0");
  }
  for (const auto& [name, w] :
       std::initializer_list<std::pair<const char*, double>>{
           {"dp.w_obs", c.dp_w_obs},
           {"dp.w_ref", c.dp_w_ref},
           {"dp.w_smooth", c.dp_w_smooth},
           {"dp.w_kappa", c.dp_w_kappa},
           {"path_weights.ref", c.path_w_ref},
           {"path_weights.ddl", c.path_w_ddl},
           {"path_weights.dddl", c.path_w_dddl},
           {"speed_weights.cruise_pos", c.speed_w_cruise_pos},
           {"speed_weights.cruise_vel", c.speed_w_cruise_vel},
           {"speed_weights.accel", c.speed_w_accel},
           {"speed_weights.jerk", c.speed_w_jerk},
           {"speed_weights.stop_vel", c.speed_w_stop_vel}}) {
    if (w < 0.0) v.push_back(std::string(name) + " must be >= 0");
  }
  if (!(c.tol_prim > 0.0) || !(c.tol_dual > 0.0)) {
    v.push_back("solver tolerances must be > 0");
  }
  if (c.max_iter < 1) v.push_back("solver.max_iter must be >= 1");
  if (!(c.v_target > 0.0)) v.push_back("v_target must be > 0");
  return v;
}

Scenario load_scenario(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(e.what());
  }
  if (!root.is_object()) throw ParseError("top level must be a JSON object");
  check_keys(root,
             {"reference_line", "ego", "vehicle", "obstacles", "goal_s",
              "road_half_width", "config"},
             "top level");

  Scenario sc;
  if (!root.contains("reference_line") || !root["reference_line"].is_array()) {
    throw ParseError("\"reference_line\" must be an array of [x, y] pairs");
  }
  for (size_t i = 0; i < root["reference_line"].size(); ++i) {
    sc.reference_polyline.push_back(parse_point(
        root["reference_line"][i], "reference_line[" + std::to_string(i) + "]"));
  }

  if (root.contains("ego")) {
    const json& ego = root["ego"];
    check_keys(ego, {"x", "y", "heading", "speed", "accel", "curvature"}, "ego");
    sc.ego.position = {get_number(ego, "x", 0.0), get_number(ego, "y", 0.0)};
    sc.ego.heading = get_number(ego, "heading", 0.0);
    sc.ego.speed = get_number(ego, "speed", 0.0);
    sc.ego.accel = get_number(ego, "accel", 0.0);
    sc.ego.curvature = get_number(ego, "curvature", 0.0);
  }

  if (root.contains("vehicle")) {
    const json& veh = root["vehicle"];
    check_keys(veh,
               {"length", "width", "wheelbase", "max_speed", "max_accel",
                "max_decel", "max_jerk", "max_curvature"},
               "vehicle");
    sc.vehicle.length = get_number(veh, "length", sc.vehicle.length);
    sc.vehicle.width = get_number(veh, "width", sc.vehicle.width);
    sc.vehicle.wheelbase = get_number(veh, "wheelbase", sc.vehicle.wheelbase);
    sc.vehicle.max_speed = get_number(veh, "max_speed", sc.vehicle.max_speed);
    sc.vehicle.max_accel = get_number(veh, "max_accel", sc.vehicle.max_accel);
    sc.vehicle.max_decel = get_number(veh, "max_decel", sc.vehicle.max_decel);
    sc.vehicle.max_jerk = get_number(veh, "max_jerk", sc.vehicle.max_jerk);
    sc.vehicle.max_curvature =
        get_number(veh, "max_curvature", sc.vehicle.max_curvature);
  }

  if (root.contains("obstacles")) {
    if (!root["obstacles"].is_array()) {
      throw ParseError("\"obstacles\" must be an array");
    }
    for (const json& node : root["obstacles"]) {
      check_keys(node, {"id", "footprint", "pose", "motion"}, "obstacle");
      Obstacle obs;
      if (!node.contains("id") || !node["id"].is_string()) {
        throw ParseError("obstacle needs a string \"id\"");
      }
      obs.id = node["id"].get<std::string>();
      if (!node.contains("footprint") || !node["footprint"].is_array()) {
        throw ParseError("obstacle '" + obs.id + "' needs a footprint array");
      }
      for (size_t i = 0; i < node["footprint"].size(); ++i) {
        obs.footprint.push_back(
            parse_point(node["footprint"][i],
                        "obstacle '" + obs.id + "' footprint vertex"));
      }
      // Normalize winding; validation still rejects non-convex shapes.
      if (obs.footprint.size() >= 3 && polygon_signed_area(obs.footprint) < 0.0) {
        std::reverse(obs.footprint.begin(), obs.footprint.end());
      }
      if (node.contains("pose")) {
        const json& pose = node["pose"];
        check_keys(pose, {"x", "y", "heading"}, "obstacle '" + obs.id + "' pose");
        obs.pose.position = {get_number(pose, "x", 0.0),
                             get_number(pose, "y", 0.0)};
        obs.pose.heading = get_number(pose, "heading", 0.0);
      }
      if (!node.contains("motion")) {
        throw ParseError("obstacle '" + obs.id + "' needs a motion spec");
      }
      obs.motion = parse_motion(node["motion"], obs.id);
      sc.obstacles.push_back(std::move(obs));
    }
  }

  if (root.contains("config")) {
    parse_config_object(sc.config, root["config"], "");
  }

  sc.road_half_width = get_number(root, "road_half_width", sc.road_half_width);

  // goal_s defaults to the full line length.
  double line_length = 0.0;
  for (size_t i = 1; i < sc.reference_polyline.size(); ++i) {
    line_length +=
        (sc.reference_polyline[i] - sc.reference_polyline[i - 1]).norm();
  }
  sc.goal_s = get_number(root, "goal_s", line_length);

  const std::vector<std::string> violations = validate(sc);
  if (!violations.empty()) {
    std::ostringstream oss;
    oss << violations.size() << " invariant violation(s): ";
    for (size_t i = 0; i < violations.size(); ++i) {
      if (i > 0) oss << "; ";
      oss << violations[i];
    }
    throw ValidationError(oss.str(), violations);
  }
  sc.reference_line = ReferenceLine::from_polyline(sc.reference_polyline);
  return sc;
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open scenario file '" + path + "'");
  std::ostringstream oss;
  oss << in.rdbuf();
  return load_scenario(oss.str());
}

std::string scenario_to_json(const Scenario& sc) {
  json root;
  json line = json::array();
  for (const Vec2& p : sc.reference_polyline) line.push_back({p.x, p.y});
  root["reference_line"] = std::move(line);
  root["ego"] = {{"x", sc.ego.position.x},       {"y", sc.ego.position.y},
                 {"heading", sc.ego.heading},    {"speed", sc.ego.speed},
                 {"accel", sc.ego.accel},        {"curvature", sc.ego.curvature}};
  root["vehicle"] = {{"length", sc.vehicle.length},
                     {"width", sc.vehicle.width},
                     {"wheelbase", sc.vehicle.wheelbase},
                     {"max_speed", sc.vehicle.max_speed},
                     {"max_accel", sc.vehicle.max_accel},
                     {"max_decel", sc.vehicle.max_decel},
                     {"max_jerk", sc.vehicle.max_jerk},
                     {"max_curvature", sc.vehicle.max_curvature}};
  json obstacles = json::array();
  for (const Obstacle& obs : sc.obstacles) {
    json node;
    node["id"] = obs.id;
    json fp = json::array();
    for (const Vec2& p : obs.footprint) fp.push_back({p.x, p.y});
    node["footprint"] = std::move(fp);
    node["pose"] = {{"x", obs.pose.position.x},
                    {"y", obs.pose.position.y},
                    {"heading", obs.pose.heading}};
    node["motion"] = motion_to_json(obs.motion);
    obstacles.push_back(std::move(node));
  }
  root["obstacles"] = std::move(obstacles);
  root["goal_s"] = sc.goal_s;
  root["road_half_width"] = sc.road_half_width;

  json config;
  for (const auto& [key, field] : config_fields()) {
    json* slot = &config;
    std::string rest = key;
    size_t dot;
    while ((dot = rest.find('.')) != std::string::npos) {
      slot = &(*slot)[rest.substr(0, dot)];
      rest = rest.substr(dot + 1);
    }
    std::visit(
        [&](auto member) { (*slot)[rest] = sc.config.*member; },
        field.member);
  }
  root["config"] = std::move(config);
  return root.dump(2) + "\n";
}

void apply_config_override(PlannerConfig& config, const std::string& key,
                           const std::string& value) {
  std::string k = key;
  // The CLI accepts a "planner." prefix as an alias for top-level knobs.
  if (k.rfind("planner.", 0) == 0) k = k.substr(8);
  json parsed;
  try {
    parsed = json::parse(value);
  } catch (const json::exception&) {
    parsed = value;  // fall back to string (rejected by type check below)
  }
  set_config_field(config, k, parsed);
}

}  // namespace corridor
