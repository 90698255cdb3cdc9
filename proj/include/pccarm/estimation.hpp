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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "pccarm/csv.hpp"
#include "pccarm/dynamics.hpp"
#include "pccarm/simulation.hpp"

namespace pccarm {

/// Raised when the data cannot identify the requested parameters.
class IdentifiabilityError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// s = S q: one two-axis flex sensor per segment, summing the segment's element curvatures.
struct SensorModel {
  Eigen::MatrixXd matrix;  // 2 n_segments x n_free
  int n_segments = 0;
  int n_pcc = 0;
};

SensorModel sensor_matrix(const ArmConfig& config);

/// S q, plus zero-mean Gaussian noise of standard deviation `noise_std` when a seed is given.
Eigen::VectorXd simulate_reading(const SensorModel& sensors, const Eigen::VectorXd& q,
                                 double noise_std = 0.0, std::optional<std::uint64_t> seed = std::nullopt);

/// S^+ s: each segment reading split evenly over its elements.
Eigen::VectorXd seed_pose(const SensorModel& sensors, const Eigen::VectorXd& reading);

/**
 * Minimizes |M x + b|^2 + x^T diag(reg) x subject to C x = d through the KKT
 * system. Throws NumericalError when the KKT matrix is singular.
 */
Eigen::VectorXd solve_constrained_least_squares(const Eigen::MatrixXd& m, const Eigen::VectorXd& b,
                                                const Eigen::VectorXd& reg, const Eigen::MatrixXd& c,
                                                const Eigen::VectorXd& d);

struct EstimationOptions {
  /// Extra passes re-evaluating g and J at the latest pose. 0 keeps them frozen at the seed pose.
  int relinearize_iterations = 0;
};

/// argmin_q |A p - g(q0) - K q|^2 subject to S q = s, q0 = seed_pose(s).
Eigen::VectorXd correct_pose(const ArmSystem& system, const Eigen::VectorXd& pressures,
                             const Eigen::VectorXd& reading, const EstimationOptions& options = {});

/// Objective value of correct_pose at q, with g frozen at `linearization_pose`.
double pose_objective(const ArmSystem& system, const Eigen::VectorXd& pressures,
                      const Eigen::VectorXd& linearization_pose, const Eigen::VectorXd& q);

enum class TareMode {
  // f0 = -(A p - g(q0) - K q): the residual correct_pose leaves at the tare state,
  // so estimate_force returns zero force at that state. q0 = seed_pose(S q),
  // or q itself when relinearizing.
  kResidual,
  // f0 = -A p + g(q) as written; leaves -K q unexplained, which estimate_force
  // then attributes to a tip force in any bent pose.
  kLiteral,
};

/// Generalized-force offset measured in an unloaded static state.
Eigen::VectorXd tare(const ArmSystem& system, const Eigen::VectorXd& pressures, const Eigen::VectorXd& q,
                     TareMode mode = TareMode::kResidual, const EstimationOptions& options = {});

struct ForceEstimate {
  Eigen::VectorXd q;
  Eigen::Vector3d force = Eigen::Vector3d::Zero();
};

inline constexpr double kDefaultForceRegularization = 1e-3;

/**
 * argmin_{q, f} |A p - g(q0) + J(q0)^T f - K q + f0|^2 + r |f|^2
 * subject to S q = s, q0 = seed_pose(s).
 */
ForceEstimate estimate_force(const ArmSystem& system, const Eigen::VectorXd& pressures,
                             const Eigen::VectorXd& reading, const Eigen::VectorXd& tare_offset,
                             double regularization = kDefaultForceRegularization,
                             const EstimationOptions& options = {});

struct CharacterizationSample {
  double t = 0.0;
  Eigen::Vector2d q = Eigen::Vector2d::Zero();  // whole-segment curvature (theta_x, theta_y)
  Eigen::Vector3d p = Eigen::Vector3d::Zero();  // chamber pressures
  std::optional<Eigen::Vector3d> f;             // tip force, if any
};

/// Least-squares polynomial in normalized time.
class Polynomial {
 public:
  Polynomial() = default;
  Polynomial(Eigen::VectorXd coeffs, double center, double half_span);

  double value(double t) const;
  double derivative(double t) const;
  double second_derivative(double t) const;

 private:
  Eigen::VectorXd coeffs_;  // in powers of u = (t - center) / half_span
  double center_ = 0.0;
  double half_span_ = 1.0;
};

Polynomial fit_polynomial(std::span<const double> t, std::span<const double> y, int degree);

struct MaterialFit {
  MaterialParams params;
  double residual_norm = 0.0;
};

/**
 * Solves [4 M_I q_k, M_I dq_k] [mu; rho] = f_known_k stacked over samples by
 * pseudoinverse, where M_I = diag(I_i / l_i). Throws IdentifiabilityError on
 * a rank-deficient stack and NumericalError on a non-positive mu.
 */
MaterialFit fit_material(const Eigen::VectorXd& i_over_l, std::span<const Eigen::VectorXd> q,
                         std::span<const Eigen::VectorXd> dq, std::span<const Eigen::VectorXd> f_known);

struct CharacterizationOptions {
  // Polynomial window in s; <= 0 fits the whole dataset at once. The default
  // covers one swing (half of the 3 s back-and-forth "swing" profile).
  double window = 1.5;
  int degree = 5;
  double edge_trim = 0.05;  // fraction of each window's span left out of the stack at both ends
};

/// Single-segment arm (n_pcc = 1) made of `segment` and its connector.
ArmConfig isolate_segment(const ArmConfig& config, int segment);

/**
 * Fits (mu, rho) of one segment from swing data under the constant-curvature
 * assumption. Velocities and accelerations come from polynomial fits of q.
 */
MaterialFit characterize(const ArmConfig& config, int segment,
                         std::span<const CharacterizationSample> samples,
                         const CharacterizationOptions& options = {});

/// Per-sample whole-segment curvature and chamber pressures of `segment` from a trajectory.
std::vector<CharacterizationSample> characterization_samples(const ArmSystem& system,
                                                             const Trajectory& traj, int segment);

/// Multiplicative pressure noise and additive curvature noise (Gaussian, seeded).
std::vector<CharacterizationSample> perturb_samples(std::span<const CharacterizationSample> samples,
                                                    double pressure_rel_std, double angle_std,
                                                    std::uint64_t seed);

/// Columns t, qx, qy, p_0, p_1, p_2 (optionally fx, fy, fz).
CsvTable characterization_table(std::span<const CharacterizationSample> samples);
std::vector<CharacterizationSample> characterization_from_table(const CsvTable& table);

}  // namespace pccarm
