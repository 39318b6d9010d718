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

#include "corridor/trace_io.hpp"

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace corridor {

namespace {

using nlohmann::json;

std::string format_double(double v, const char* fmt = "%.9g") {
  char buf[64];
  std::snprintf(buf, sizeof(buf), fmt, v);
  return buf;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw IoError("failed writing '" + path + "'");
}

json timing_percentiles(const SimTrace& trace) {
  std::vector<double> cycle_ms, qp_ms;
  for (const CycleRecord& rec : trace.cycles) {
    cycle_ms.push_back(rec.plan_seconds * 1e3);
    qp_ms.push_back((rec.path_solve_seconds + rec.speed_solve_seconds) * 1e3);
  }
  json node;
  node["plan_cycle_ms"] = {{"p50", percentile(cycle_ms, 0.5)},
                           {"p95", percentile(cycle_ms, 0.95)},
                           {"p99", percentile(cycle_ms, 0.99)}};
  node["qp_solve_ms"] = {{"p50", percentile(qp_ms, 0.5)},
                         {"p95", percentile(qp_ms, 0.95)},
                         {"p99", percentile(qp_ms, 0.99)}};
  return node;
}

std::string svg_plot(const SimTrace& trace, const Scenario& sc) {
  // Bounding box over the reference line and trace.
  double min_x = 1e18, max_x = -1e18, min_y = 1e18, max_y = -1e18;
  auto grow = [&](const Vec2& p) {
    min_x = std::min(min_x, p.x);
    max_x = std::max(max_x, p.x);
    min_y = std::min(min_y, p.y);
    max_y = std::max(max_y, p.y);
  };
  for (const Vec2& p : sc.reference_polyline) grow(p);
  for (const CycleRecord& rec : trace.cycles) grow(rec.ego.position);
  for (const Obstacle& obs : sc.obstacles) grow(obs.pose.position);
  min_x -= 5;
  max_x += 5;
  min_y -= 5;
  max_y += 5;

  const double width = 800.0;
  const double scale = width / std::max(max_x - min_x, 1e-6);
  const double height = std::max((max_y - min_y) * scale, 60.0);
  const double st_height = 220.0;

  auto px = [&](double x) { return (x - min_x) * scale; };
  auto py = [&](double y) { return height - (y - min_y) * scale; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height + st_height + 40
      << "\" font-family=\"monospace\" font-size=\"11\">\n";

  // Top-down panel.
  auto polyline = [&](const std::vector<Vec2>& pts, const char* style) {
    svg << "<polyline fill=\"none\" " << style << " points=\"";
    for (const Vec2& p : pts) {
      svg << format_double(px(p.x), "%.2f") << "," << format_double(py(p.y), "%.2f")
          << " ";
    }
    svg << "\"/>\n";
  };
  polyline(sc.reference_polyline, "stroke=\"#bbbbbb\" stroke-dasharray=\"6,4\"");

  std::vector<Vec2> left_edge, right_edge;
  for (size_t i = 0; i < sc.reference_polyline.size(); ++i) {
    const double s = sc.reference_line.stations()[i];
    const Vec2 n = sc.reference_line.normal_at(s);
    left_edge.push_back(sc.reference_polyline[i] + n * sc.road_half_width);
    right_edge.push_back(sc.reference_polyline[i] - n * sc.road_half_width);
  }
  polyline(left_edge, "stroke=\"#888888\"");
  polyline(right_edge, "stroke=\"#888888\"");

  for (const Obstacle& obs : sc.obstacles) {
    const Polygon poly = obs.world_footprint();
    svg << "<polygon fill=\"#d9534f\" fill-opacity=\"0.5\" stroke=\"#b52b27\" "
           "points=\"";
    for (const Vec2& p : poly) {
      svg << format_double(px(p.x), "%.2f") << "," << format_double(py(p.y), "%.2f")
          << " ";
    }
    svg << "\"/>\n";
  }

  std::vector<Vec2> ego_path;
  for (const CycleRecord& rec : trace.cycles) ego_path.push_back(rec.ego.position);
  if (!ego_path.empty()) {
    polyline(ego_path, "stroke=\"#0275d8\" stroke-width=\"2\"");
  }
  try {
    const Vec2 goal = sc.reference_line.from_frenet({sc.goal_s, 0.0, 0.0, 0.0});
    svg << "<circle cx=\"" << format_double(px(goal.x), "%.2f") << "\" cy=\""
        << format_double(py(goal.y), "%.2f")
        << "\" r=\"5\" fill=\"none\" stroke=\"#5cb85c\" stroke-width=\"2\"/>\n";
  } catch (const Error&) {
  }

  // s-t panel.
  const double st_top = height + 30.0;
  svg << "<text x=\"5\" y=\"" << st_top - 10 << "\">s-t (station vs time)</text>\n";
  if (!trace.cycles.empty()) {
    const double t_max = std::max(trace.cycles.back().t, 1e-6);
    double s_max = 1e-6;
    std::vector<Vec2> st_pts;
    for (const CycleRecord& rec : trace.cycles) {
      const FrenetPose fp = sc.reference_line.to_frenet(rec.ego.position);
      st_pts.push_back({rec.t, fp.s});
      s_max = std::max(s_max, fp.s);
    }
    svg << "<rect x=\"0\" y=\"" << st_top << "\" width=\"" << width
        << "\" height=\"" << st_height << "\" fill=\"none\" stroke=\"#cccccc\"/>\n";
    svg << "<polyline fill=\"none\" stroke=\"#0275d8\" stroke-width=\"2\" points=\"";
    for (const Vec2& p : st_pts) {
      const double sx = p.x / t_max * width;
      const double sy = st_top + st_height - p.y / s_max * st_height;
      svg << format_double(sx, "%.2f") << "," << format_double(sy, "%.2f") << " ";
    }
    svg << "\"/>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace

std::vector<std::string> emit_trace(const SimTrace& trace,
                                    const Scenario& scenario,
                                    const std::string& out_dir,
                                    const std::set<TraceFormat>& formats) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory '" + out_dir + "'");

  std::vector<std::string> written;
  if (formats.count(TraceFormat::kCsv) > 0) {
    std::ostringstream csv;
    csv << "cycle,t,x,y,heading,speed,accel,provenance,guardian_level,"
           "cycle_ms,event\n";
    for (const CycleRecord& rec : trace.cycles) {
      csv << rec.cycle << "," << format_double(rec.t, "%.3f") << ","
          << format_double(rec.ego.position.x) << ","
          << format_double(rec.ego.position.y) << ","
          << format_double(rec.ego.heading) << ","
          << format_double(rec.ego.speed) << "," << format_double(rec.ego.accel)
          << ","
          << (rec.provenance == Provenance::kNominal ? "nominal"
                                                     : "fallback_stop")
          << "," << guardian_level_name(rec.guardian_level) << ","
          << format_double(trace.replan_period * 1e3, "%.3f") << ","
          << rec.event << "\n";
    }
    const std::string path = out_dir + "/trace.csv";
    write_file(path, csv.str());
    written.push_back(path);
  }

  if (formats.count(TraceFormat::kJson) > 0) {
    json summary;
    summary["scenario"] = trace.scenario_name;
    summary["outcome"] = sim_outcome_name(trace.outcome);
    summary["seed"] = trace.seed;
    summary["cycles"] = trace.cycles.size();
    summary["final_s"] = trace.final_s;
    summary["final_speed"] = trace.final_speed;
    summary["counts"] = {
        {"fallbacks", trace.count_events(SimEventKind::kFallback)},
        {"guardian_slowdowns", trace.count_events(SimEventKind::kGuardianSlowdown)},
        {"guardian_emergencies",
         trace.count_events(SimEventKind::kGuardianEmergency)},
        {"collisions", trace.count_events(SimEventKind::kCollision)},
        {"model_gaps", trace.count_events(SimEventKind::kModelGap)},
    };
    summary["timings"] = timing_percentiles(trace);
    const std::string path = out_dir + "/summary.json";
    write_file(path, summary.dump(2) + "\n");
    written.push_back(path);
  }

  if (formats.count(TraceFormat::kSvg) > 0) {
    const std::string path = out_dir + "/plot.svg";
    write_file(path, svg_plot(trace, scenario));
    written.push_back(path);
  }
  return written;
}

std::vector<std::string> emit_trajectory(const Trajectory& trajectory,
                                         const std::string& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory '" + out_dir + "'");

  std::ostringstream csv;
  csv << "t,x,y,heading,curvature,speed,accel\n";
  for (const TrajectorySample& s : trajectory.samples) {
    csv << format_double(s.t, "%.3f") << "," << format_double(s.position.x)
        << "," << format_double(s.position.y) << "," << format_double(s.heading)
        << "," << format_double(s.curvature) << "," << format_double(s.speed)
        << "," << format_double(s.accel) << "\n";
  }
  const std::string csv_path = out_dir + "/trajectory.csv";
  write_file(csv_path, csv.str());

  const PlanDiagnostics& d = trajectory.diagnostics;
  json summary;
  summary["provenance"] =
      trajectory.provenance == Provenance::kNominal ? "nominal" : "fallback_stop";
  summary["fallback_reason"] = d.fallback_reason;
  json decisions;
  for (const auto& [id, label] : d.decisions) {
    decisions[id] = decision_label_name(label);
  }
  summary["decisions"] = decisions;
  summary["timings_ms"] = {
      {"predict", d.t_predict * 1e3},   {"decision", d.t_decision * 1e3},
      {"tunnel", d.t_tunnel * 1e3},     {"path_build", d.t_path_build * 1e3},
      {"path_solve", d.t_path_solve * 1e3}, {"st", d.t_st * 1e3},
      {"speed_build", d.t_speed_build * 1e3},
      {"speed_solve", d.t_speed_solve * 1e3},
      {"combine", d.t_combine * 1e3},   {"total", d.t_total * 1e3}};
  summary["path_iterations"] = d.path_iterations;
  summary["speed_iterations"] = d.speed_iterations;
  summary["curvature_clamped"] = d.curvature_clamped;
  const std::string json_path = out_dir + "/plan_summary.json";
  write_file(json_path, summary.dump(2) + "\n");
  return {csv_path, json_path};
}

std::string bench_report_to_json(const BenchReport& report) {
  json root;
  auto stats_json = [](const BenchScenarioStats& s) {
    return json{{"name", s.name},
                {"samples", s.samples},
                {"cycle_ms", {{"p50", s.p50_cycle * 1e3},
                              {"p95", s.p95_cycle * 1e3},
                              {"p99", s.p99_cycle * 1e3}}},
                {"qp_ms", {{"p50", s.p50_qp * 1e3},
                           {"p95", s.p95_qp * 1e3},
                           {"p99", s.p99_qp * 1e3}}},
                {"path_ms", {{"p50", s.p50_path * 1e3}, {"p99", s.p99_path * 1e3}}},
                {"speed_ms", {{"p50", s.p50_speed * 1e3}, {"p99", s.p99_speed * 1e3}}},
                {"fallbacks", s.fallbacks},
                {"max_qp_iterations", s.max_qp_iterations}};
  };
  json rows = json::array();
  for (const BenchScenarioStats& s : report.per_scenario) rows.push_back(stats_json(s));
  root["per_scenario"] = std::move(rows);
  root["aggregate"] = stats_json(report.aggregate);
  root["qp_budget_ms"] = report.qp_budget * 1e3;
  root["cycle_budget_ms"] = report.cycle_budget * 1e3;
  root["qp_gate_passed"] = report.qp_gate_passed;
  root["cycle_gate_passed"] = report.cycle_gate_passed;
  root["deterministic"] = report.deterministic;
  return root.dump(2) + "\n";
}

std::string bench_report_table(const BenchReport& report) {
  std::ostringstream oss;
  char line[256];
  std::snprintf(line, sizeof(line), "%-28s %8s %10s %10s %10s %10s\n", "scenario",
                "samples", "qp_p50/ms", "qp_p99/ms", "cyc_p50", "cyc_p99");
  oss << line;
  auto row = [&](const BenchScenarioStats& s) {
    std::snprintf(line, sizeof(line), "%-28s %8d %10.3f %10.3f %10.3f %10.3f\n",
                  s.name.c_str(), s.samples, s.p50_qp * 1e3, s.p99_qp * 1e3,
                  s.p50_cycle * 1e3, s.p99_cycle * 1e3);
    oss << line;
  };
  for (const BenchScenarioStats& s : report.per_scenario) row(s);
  row(report.aggregate);
  std::snprintf(line, sizeof(line),
                "qp p99 gate (<= %.1f ms): %s | cycle p99 gate (<= %.1f ms): %s "
                "| deterministic: %s\n",
                report.qp_budget * 1e3, report.qp_gate_passed ? "PASS" : "FAIL",
                report.cycle_budget * 1e3,
                report.cycle_gate_passed ? "PASS" : "FAIL",
                report.deterministic ? "yes" : "NO");
  oss << line;
  return oss.str();
}

}  // namespace corridor
