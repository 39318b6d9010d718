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

#include <optional>
#include <string>
#include <vector>

#include "corridor/planner.hpp"
#include "corridor/scenario.hpp"

namespace corridor {

enum class GuardianLevel { kOk = 0, kSlowdown = 1, kEmergencyStop = 2 };

const char* guardian_level_name(GuardianLevel level);

struct GuardianReason {
  std::string trigger;  // "clearance", "ttc", "deadline", "consecutive_fallbacks"
  std::string obstacle_id;
  double measured = 0.0;
  double threshold = 0.0;

  std::string describe() const;
};

struct GuardianVerdict {
  GuardianLevel level = GuardianLevel::kOk;
  GuardianReason reason;
  std::optional<Trajectory> override_trajectory;  // present iff level != ok
};

// The proximity rule on its own: emergency when the clearance or TTC drops
// below the emergency thresholds, slowdown on the TTC comfort threshold.
GuardianLevel guardian_level_for(double clearance, double ttc,
                                 const PlannerConfig& config);

/// Vehicle-end low-level monitor. `check` is stateless and usable without a
/// working planner; `monitor_health` owns the consecutive-failure counter and
/// must be driven by a single harness thread.
class Guardian {
 public:
  GuardianVerdict check(const EgoState& ego,
                        const std::vector<Obstacle>& obstacles,
                        const Trajectory* planned, const VehicleParams& vehicle,
                        const PlannerConfig& config,
                        const ReferenceLine& line) const;

  GuardianVerdict monitor_health(double cycle_seconds, Provenance provenance,
                                 const Trajectory* planned, const EgoState& ego,
                                 const VehicleParams& vehicle,
                                 const PlannerConfig& config);

  int consecutive_fallbacks() const { return consecutive_fallbacks_; }

 private:
  GuardianVerdict make_override(GuardianLevel level, GuardianReason reason,
                                const Trajectory* planned, const EgoState& ego,
                                const VehicleParams& vehicle,
                                const PlannerConfig& config) const;

  int consecutive_fallbacks_ = 0;
};

}  // namespace corridor
