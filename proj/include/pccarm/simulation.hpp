// Copyright (c) 2026 The pccarm Authors.
// All rights reserved.
//
// This software is licensed under the Apache License, Version 2.0 (the "License").
// You may not use this file except in compliance with the License. You may
// obtain a copy of the License at http://www.apache.org/licenses/LICENSE-2.0.
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "pccarm/csv.hpp"
#include "pccarm/dynamics.hpp"

namespace pccarm {

inline constexpr double kMaxPressure = 2e5;  // Pa, valve range

/// Chamber pressures over time: either sampled rows (linearly interpolated,
/// held constant outside the sampled span) or one sinusoid per chamber.
class PressureProfile {
 public:
  struct Sinusoid {
    double offset = 0.0;     // Pa
    double amplitude = 0.0;  // Pa
    double frequency = 0.0;  // Hz
    double phase = 0.0;      // rad
  };

  static PressureProfile sampled(std::vector<double> times, std::vector<Eigen::VectorXd> rows);
  static PressureProfile sinusoids(std::vector<Sinusoid> channels);

  int n_channels() const;
  Eigen::VectorXd at(double t) const;

 private:
  std::vector<double> times_;
  std::vector<Eigen::VectorXd> rows_;
  std::vector<Sinusoid> sines_;
};

/// Built-in profiles: "sine-sweep", "step", "hold", "swing". Throws std::invalid_argument otherwise.
PressureProfile builtin_profile(const std::string& name, int n_segments);

/// CSV with columns t, p_0 .. p_{3N-1}.
PressureProfile load_profile_csv(const std::filesystem::path& path);

/// Piecewise-constant tip force; zero before the first entry.
struct ForceSchedule {
  std::vector<double> start_times;
  std::vector<Eigen::Vector3d> forces;

  static ForceSchedule constant(const Eigen::Vector3d& f) { return {{0.0}, {f}}; }
  Eigen::Vector3d at(double t) const;
};

struct ArmState {
  Eigen::VectorXd q;
  Eigen::VectorXd dq;
};

using AccelerationFn =
    std::function<Eigen::VectorXd(const Eigen::VectorXd& q, const Eigen::VectorXd& dq)>;

/// Euler-Richardson (midpoint) step for an arbitrary acceleration field.
ArmState euler_richardson_step(const ArmState& state, double dt, const AccelerationFn& accel);

/// One Euler-Richardson step of the arm with fixed pressures and tip force.
/// Throws NumericalError if the new state is not finite.
ArmState step(const ArmSystem& system, const ArmState& state, const Eigen::VectorXd& pressures,
              const Eigen::Vector3d& tip_force, double dt);

/// Largest step for which the midpoint scheme is linearly stable about the
/// unforced rest pose (eigenvalues of the linearized system inside
/// |1 + z + z^2/2| <= 1 + 1e-6). Damping dominates this limit for fine discretizations.
double stable_step_limit(const ArmSystem& system);

struct SimulationOptions {
  double duration = 3.0;         // s
  double dt = 2e-5;              // s
  double record_interval = 1e-2; // s
  std::optional<ForceSchedule> tip_force;
  std::optional<ArmState> initial;  // straight rest pose when empty
};

struct Trajectory {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> q;
  std::vector<Eigen::VectorXd> dq;
  std::vector<std::vector<Eigen::Vector3d>> segment_tips;  // [sample][segment]
  std::vector<Eigen::VectorXd> pressures;

  std::size_t size() const { return times.size(); }
};

/**
 * Integrates the equation of motion. Forcing is sampled at the midpoint of
 * each step. Records floor(T / record_interval) + 1 samples.
 * Throws NumericalError naming the step index on divergence.
 */
Trajectory simulate(const ArmSystem& system, const PressureProfile& profile,
                    const SimulationOptions& options);

/// World position of the distal end of each segment's connector.
std::vector<Eigen::Vector3d> segment_tip_positions(const ArmLayout& layout, const Eigen::VectorXd& q);

struct TipError {
  std::vector<std::vector<double>> per_sample;  // [sample][segment]
  std::vector<double> mean;                     // per segment
  double mean_all = 0.0;
};

/// |p_ref - p_model| per segment tip; `reference` is linearly resampled onto the model's time grid.
TipError tip_error(const Trajectory& model, const Trajectory& reference);

/// Columns t, q_*, dq_*, tip_seg*_{x,y,z}, p_*.
CsvTable trajectory_table(const Trajectory& traj);

}  // namespace pccarm
