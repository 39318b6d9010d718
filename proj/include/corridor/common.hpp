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

#pragma once

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace corridor {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2() = default;
  Vec2(double x_, double y_) : x(x_), y(y_) {}

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double k) const { return {x * k, y * k}; }
  Vec2 operator/(double k) const { return {x / k, y / k}; }
  Vec2& operator+=(const Vec2& o) {
    x += o.x;
    y += o.y;
    return *this;
  }

  double dot(const Vec2& o) const { return x * o.x + y * o.y; }
  double cross(const Vec2& o) const { return x * o.y - y * o.x; }
  double norm() const { return std::hypot(x, y); }
  double squared_norm() const { return x * x + y * y; }
  Vec2 normalized() const {
    const double n = norm();
    return n > 0.0 ? Vec2{x / n, y / n} : Vec2{0.0, 0.0};
  }
  // 90 degree counter-clockwise rotation (left normal of a unit tangent).
  Vec2 left_normal() const { return {-y, x}; }
};

inline Vec2 operator*(double k, const Vec2& v) { return {v.x * k, v.y * k}; }

inline Vec2 unit_from_angle(double theta) {
  return {std::cos(theta), std::sin(theta)};
}

// Normalizes an angle into [-pi, pi).
inline double normalize_angle(double a) {
  a = std::fmod(a + M_PI, 2.0 * M_PI);
  if (a < 0.0) a += 2.0 * M_PI;
  return a - M_PI;
}

// Shortest signed difference a - b in [-pi, pi).
inline double angle_diff(double a, double b) { return normalize_angle(a - b); }

inline double clamp(double v, double lo, double hi) {
  return v < lo ? lo : (v > hi ? hi : v);
}

inline double lerp(double a, double b, double t) { return a + (b - a) * t; }

// Base class for all structured planner errors. `kind()` is a stable
// machine-readable token matching the failure taxonomy (e.g. "TunnelCollapse");
// `what()` carries the human-readable detail.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(kind + ": " + message), kind_(std::move(kind)) {}

  const std::string& kind() const { return kind_; }

 private:
  std::string kind_;
};

enum class LogLevel { kError = 0, kWarn = 1, kInfo = 2, kDebug = 3 };

// Process-wide diagnostic verbosity, initialized from CORRIDOR_PLANNER_LOG.
LogLevel log_level();
void set_log_level(LogLevel level);

void log_message(LogLevel level, const char* fmt, ...);

#define CORRIDOR_LOG_WARN(...) \
  ::corridor::log_message(::corridor::LogLevel::kWarn, __VA_ARGS__)
#define CORRIDOR_LOG_INFO(...) \
  ::corridor::log_message(::corridor::LogLevel::kInfo, __VA_ARGS__)
#define CORRIDOR_LOG_DEBUG(...) \
  ::corridor::log_message(::corridor::LogLevel::kDebug, __VA_ARGS__)

}  // namespace corridor
