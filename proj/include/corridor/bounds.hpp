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

#include <vector>

namespace corridor {

// Lateral feasible band per path-grid station, derived from road bounds and
// bypass decisions. Bounds are for the vehicle center line before circle
// radii are subtracted.
struct Tunnel {
  std::vector<double> l_lower;
  std::vector<double> l_upper;
};

// Station bounds per speed-grid time, derived from s-t regions and
// yield/overtake decisions. s_upper is monotone non-decreasing.
struct StConstraintSet {
  std::vector<double> s_lower;
  std::vector<double> s_upper;
};

}  // namespace corridor
