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

#include <optional>
#include <stdexcept>

#include <Eigen/Core>

#include "pccarm/rigid_model.hpp"

namespace pccarm {

/// Raised when a numerical solve breaks down (singular system, divergence).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct KineticTerms {
  Eigen::MatrixXd inertia;    // B(q)
  Eigen::VectorXd coriolis;   // c(q, dq)
  Eigen::VectorXd gravity;    // g(q)
};

/// How the rigid-chain velocity terms are pulled back to curvature coordinates.
enum class CoriolisProjection {
  kComplete,  // Jm^T (c_xi + B_xi dJm/dt dq): the Lagrangian of the chain restricted to m(q)
  kLiteral,   // Jm^T c_xi only; drops the dJm/dt dq term and does not conserve energy
};

/**
 * Inertial terms in curvature coordinates, projected from the rigid chain:
 * B = Jm^T B_xi Jm, c = Jm^T c_xi(m(q), Jm dq), g = Jm^T g_xi(m(q)).
 *
 * c comes from an inverse-dynamics pass with gravity off, joint velocity
 * Jm dq and joint acceleration dJm/dt dq (zero for kLiteral).
 */
KineticTerms kinetic_terms(const RigidModel& model, const Eigen::VectorXd& q,
                           const Eigen::VectorXd& dq,
                           CoriolisProjection projection = CoriolisProjection::kComplete);

struct StiffnessDamping {
  Eigen::VectorXd stiffness;  // diagonal of K, N*m/rad
  Eigen::VectorXd damping;    // diagonal of D, N*m*s/rad
};

/// K_ii = 4 mu I / l and D_ii = rho I / l on both curvature components of each element.
StiffnessDamping stiffness_damping(const ArmConfig& config);

/// Maps the 3 n_segments chamber pressures to generalized torques (n_free x 3 n_segments).
Eigen::MatrixXd actuation_matrix(const ArmConfig& config);

/// Everything needed to evaluate the arm's equation of motion.
struct ArmSystem {
  ArmConfig config;
  RigidModel model;
  Eigen::VectorXd stiffness;
  Eigen::VectorXd damping;
  Eigen::MatrixXd actuation;
  CoriolisProjection coriolis = CoriolisProjection::kComplete;

  const ArmLayout& layout() const { return model.layout(); }
  int n_free() const { return model.layout().n_free(); }
  int n_pressures() const { return static_cast<int>(actuation.cols()); }
};

ArmSystem make_system(const ArmConfig& config,
                      CoriolisProjection coriolis = CoriolisProjection::kComplete);

/// All terms of the equation of motion at one state.
struct DynamicsTerms {
  Eigen::MatrixXd inertia;
  Eigen::VectorXd coriolis;
  Eigen::VectorXd gravity;
  Eigen::MatrixXd stiffness;   // diagonal
  Eigen::MatrixXd damping;     // diagonal
  Eigen::MatrixXd actuation;
  Eigen::MatrixXd tip_jacobian;
};

DynamicsTerms dynamics_terms(const ArmSystem& system, const Eigen::VectorXd& q,
                             const Eigen::VectorXd& dq);

/**
 * ddq = B^-1 (A p + J^T f - c - g - K q - D dq), solved by Cholesky.
 * Throws NumericalError when B is not positive definite or its reciprocal
 * condition estimate falls below 1e-12.
 */
Eigen::VectorXd forward_dynamics(const ArmSystem& system, const Eigen::VectorXd& q,
                                 const Eigen::VectorXd& dq, const Eigen::VectorXd& pressures,
                                 const Eigen::Vector3d& tip_force = Eigen::Vector3d::Zero());

/// Static force balance A p + J^T f - g(q) - K q.
Eigen::VectorXd static_residual(const ArmSystem& system, const Eigen::VectorXd& q,
                                const Eigen::VectorXd& pressures,
                                const Eigen::Vector3d& tip_force = Eigen::Vector3d::Zero());

/// Damped Newton solve of static_residual(q) = 0 starting from `initial` (straight if empty).
Eigen::VectorXd static_equilibrium(const ArmSystem& system, const Eigen::VectorXd& pressures,
                                   const Eigen::Vector3d& tip_force = Eigen::Vector3d::Zero(),
                                   const std::optional<Eigen::VectorXd>& initial = std::nullopt);

/// 1/2 dq^T B dq + 1/2 q^T K q (gravity excluded).
double elastic_kinetic_energy(const ArmSystem& system, const Eigen::VectorXd& q,
                              const Eigen::VectorXd& dq);

/// Gravitational potential -sum m_b gravity . p_b over all rigid bodies.
double gravity_potential(const RigidModel& model, const Eigen::VectorXd& q);

}  // namespace pccarm
