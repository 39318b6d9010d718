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

#include "corridor/prediction.hpp"

#include <gtest/gtest.h>

#include "test_util.hpp"

namespace corridor {
namespace {

using testing::box_obstacle;
using testing::straight_scenario;

TEST(Predict, StaticObstacleHoldsPoseWithConstantSigma) {
  const Scenario sc = straight_scenario();
  const Obstacle obs = box_obstacle("rock", 30.0, 0.5, 0.5, 0.5);
  const PredictedTrajectory pred =
      predict(obs, sc.reference_line, 8.0, 0.2, sc.config);
  ASSERT_EQ(pred.samples.size(), 41u);
  for (const PredictionSample& s : pred.samples) {
    EXPECT_DOUBLE_EQ(s.position.x, 30.0);
    EXPECT_DOUBLE_EQ(s.position.y, 0.5);
    EXPECT_DOUBLE_EQ(s.sigma, sc.config.sigma0);
  }
}

TEST(Predict, LaneFollowAdvancesAlongCenterline) {
  const Scenario sc = straight_scenario();
  MotionSpec motion;
  motion.type = MotionType::kLaneFollow;
  motion.lane_speed = 2.0;
  const Obstacle obs = box_obstacle("bike", 10.0, 0.0, 0.5, 0.3, motion);
  const PredictedTrajectory pred =
      predict(obs, sc.reference_line, 5.0, 0.2, sc.config);
  EXPECT_EQ(pred.source, PredictionSource::kLaneFollow);
  const PredictionSample& last = pred.samples.back();
  EXPECT_NEAR(last.t, 5.0, 1e-12);
  EXPECT_NEAR(last.position.x, 20.0, 1e-9);
  EXPECT_NEAR(last.position.y, 0.0, 1e-9);
  EXPECT_NEAR(last.heading, 0.0, 1e-9);
}

TEST(Predict, OffLaneObstacleFallsBackToConstantVelocity) {
  // 4 m off the lane with a 2.5 m attach threshold; moving at (1, 1) m/s.
  const Scenario sc = straight_scenario();
  MotionSpec motion;
  motion.type = MotionType::kConstantVelocity;
  motion.speed = std::sqrt(2.0);
  motion.velocity_heading = M_PI / 4.0;
  Obstacle obs = box_obstacle("cart", 20.0, 4.0, 0.4, 0.4, motion);
  const PredictedTrajectory pred =
      predict(obs, sc.reference_line, 6.0, 0.2, sc.config);
  EXPECT_EQ(pred.source, PredictionSource::kConstantVelocity);
  for (const PredictionSample& s : pred.samples) {
    // Closed-form straight-line extrapolation oracle.
    const Vec2 expected{20.0 + 1.0 * s.t, 4.0 + 1.0 * s.t};
    EXPECT_NEAR(s.position.x, expected.x, 1e-9);
    EXPECT_NEAR(s.position.y, expected.y, 1e-9);
  }
}

TEST(Predict, LaneFollowBeyondThresholdUsesItsOwnHeading) {
  const Scenario sc = straight_scenario();
  MotionSpec motion;
  motion.type = MotionType::kLaneFollow;
  motion.lane_speed = 1.5;
  Obstacle obs = box_obstacle("stray", 20.0, 4.0, 0.4, 0.4, motion);
  obs.pose.heading = M_PI / 2.0;
  const PredictedTrajectory pred =
      predict(obs, sc.reference_line, 4.0, 0.2, sc.config);
  EXPECT_EQ(pred.source, PredictionSource::kConstantVelocity);
  const PredictionSample& last = pred.samples.back();
  EXPECT_NEAR(last.position.x, 20.0, 1e-9);
  EXPECT_NEAR(last.position.y, 4.0 + 1.5 * 4.0, 1e-9);
}

TEST(Predict, FirstSampleEqualsCurrentPoseExactly) {
  const Scenario sc = straight_scenario();
  MotionSpec motion;
  motion.type = MotionType::kLaneFollow;
  motion.lane_speed = 2.0;
  Obstacle obs = box_obstacle("bike", 17.3, 1.234567, 0.5, 0.3, motion);
  obs.pose.heading = 0.1234;
  const PredictedTrajectory pred =
      predict(obs, sc.reference_line, 5.0, 0.2, sc.config);
  EXPECT_EQ(pred.samples[0].position.x, obs.pose.position.x);
  EXPECT_EQ(pred.samples[0].position.y, obs.pose.position.y);
  EXPECT_EQ(pred.samples[0].heading, obs.pose.heading);
}

TEST(Predict, DeterministicBitForBit) {
  const Scenario sc = straight_scenario();
  MotionSpec motion;
  motion.type = MotionType::kLaneFollow;
  motion.lane_speed = 2.0;
  const Obstacle obs = box_obstacle("bike", 10.0, 1.1, 0.5, 0.3, motion);
  const PredictedTrajectory a = predict(obs, sc.reference_line, 8.0, 0.2, sc.config);
  const PredictedTrajectory b = predict(obs, sc.reference_line, 8.0, 0.2, sc.config);
  ASSERT_EQ(a.samples.size(), b.samples.size());
  for (size_t i = 0; i < a.samples.size(); ++i) {
    EXPECT_EQ(a.samples[i].position.x, b.samples[i].position.x);
    EXPECT_EQ(a.samples[i].position.y, b.samples[i].position.y);
    EXPECT_EQ(a.samples[i].sigma, b.samples[i].sigma);
  }
}

TEST(Predict, LaneAttractionIsNonIncreasing) {
  const Scenario sc = straight_scenario();
  MotionSpec motion;
  motion.type = MotionType::kLaneFollow;
  motion.lane_speed = 2.0;
  const Obstacle obs = box_obstacle("bike", 10.0, 1.8, 0.5, 0.3, motion);
  const PredictedTrajectory pred =
      predict(obs, sc.reference_line, 8.0, 0.2, sc.config);
  double prev = std::numeric_limits<double>::infinity();
  for (const PredictionSample& s : pred.samples) {
    const double l = std::abs(sc.reference_line.to_frenet(s.position).l);
    EXPECT_LE(l, prev + 1e-12);
    prev = l;
  }
}

TEST(Predict, SigmaIsMonotoneNonDecreasing) {
  const Scenario sc = straight_scenario();
  MotionSpec cv;
  cv.type = MotionType::kConstantVelocity;
  cv.speed = 1.0;
  for (const Obstacle& obs :
       {box_obstacle("mover", 10, 0, 0.3, 0.3, cv),
        box_obstacle("rock", 20, 1, 0.3, 0.3, MotionSpec{})}) {
    const PredictedTrajectory pred =
        predict(obs, sc.reference_line, 8.0, 0.2, sc.config);
    for (size_t i = 1; i < pred.samples.size(); ++i) {
      EXPECT_GE(pred.samples[i].sigma, pred.samples[i - 1].sigma);
    }
    EXPECT_DOUBLE_EQ(pred.samples[0].sigma, sc.config.sigma0);
  }
}

TEST(Predict, ScriptedInterpolatesAndHoldsEnds) {
  const Scenario sc = straight_scenario();
  MotionSpec motion;
  motion.type = MotionType::kScripted;
  motion.script = {{0.0, {30.0, -3.0}, M_PI / 2},
                   {4.0, {30.0, 3.0}, M_PI / 2}};
  Obstacle obs = box_obstacle("ped", 30.0, -3.0, 0.2, 0.2, motion);
  obs.pose.heading = M_PI / 2;
  const PredictedTrajectory pred =
      predict(obs, sc.reference_line, 8.0, 0.2, sc.config);
  EXPECT_EQ(pred.source, PredictionSource::kScripted);
  EXPECT_NEAR(pred.at(2.0).position.y, 0.0, 1e-9);
  EXPECT_NEAR(pred.at(6.0).position.y, 3.0, 1e-9);  // held after script end
  for (const PredictionSample& s : pred.samples) {
    EXPECT_DOUBLE_EQ(s.sigma, sc.config.sigma0);
  }
}

TEST(MotionPose, ExactAdvancementMatchesPrediction) {
  const Scenario sc = straight_scenario();
  MotionSpec motion;
  motion.type = MotionType::kConstantVelocity;
  motion.speed = 2.0;
  motion.velocity_heading = 0.3;
  const Obstacle obs = box_obstacle("mover", 5.0, 1.0, 0.3, 0.3, motion);
  const Pose2d p = motion_pose(obs, sc.reference_line, 3.0, sc.config);
  EXPECT_NEAR(p.position.x, 5.0 + 2.0 * std::cos(0.3) * 3.0, 1e-12);
  EXPECT_NEAR(p.position.y, 1.0 + 2.0 * std::sin(0.3) * 3.0, 1e-12);
  const Vec2 v = motion_velocity(obs, sc.reference_line, 0.0, sc.config);
  EXPECT_NEAR(v.x, 2.0 * std::cos(0.3), 1e-12);
  EXPECT_NEAR(v.y, 2.0 * std::sin(0.3), 1e-12);
}

}  // namespace
}  // namespace corridor
