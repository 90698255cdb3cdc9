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

#include <vector>

#include <Eigen/Core>

#include "pccarm/kinematics.hpp"

namespace pccarm {

/// Rigid body carried by the link after a joint, expressed in that joint's frame.
struct RigidBody {
  double mass = 0.0;
  Eigen::Vector3d com = Eigen::Vector3d::Zero();
  Eigen::Matrix3d inertia_com = Eigen::Matrix3d::Zero();
};

/**
 * Augmented rigid chain of an arm: five joints per element (Rx, Ry, Rz,
 * then two prismatic half-chords). Each PCC element carries two half-mass
 * solid cylinders, one after each prismatic joint. Connectors carry a point
 * mass at their midpoint.
 *
 * Immutable after construction.
 */
class RigidModel {
 public:
  RigidModel() = default;
  RigidModel(ArmLayout layout, std::vector<RigidBody> bodies, const Eigen::Vector3d& gravity);

  const ArmLayout& layout() const { return layout_; }
  const std::vector<RigidJoint>& joints() const { return joints_; }
  const std::vector<RigidBody>& bodies() const { return bodies_; }
  int n_joints() const { return static_cast<int>(joints_.size()); }
  const Eigen::Vector3d& gravity() const { return gravity_; }
  double total_mass() const;

  /// Joint-space inertia matrix by the composite-rigid-body algorithm.
  Eigen::MatrixXd mass_matrix(const Eigen::VectorXd& xi) const;

  /// Recursive Newton-Euler inverse dynamics; gravity is applied only when requested.
  Eigen::VectorXd inverse_dynamics(const Eigen::VectorXd& xi, const Eigen::VectorXd& dxi,
                                   const Eigen::VectorXd& ddxi, bool with_gravity) const;

  /// World positions of each body's center of mass.
  std::vector<Eigen::Vector3d> body_positions(const Eigen::VectorXd& xi) const;

  /// Copy with a different gravity vector (world frame).
  RigidModel with_gravity(const Eigen::Vector3d& gravity) const;

 private:
  ArmLayout layout_;
  std::vector<RigidJoint> joints_;
  std::vector<RigidBody> bodies_;
  Eigen::Vector3d gravity_ = Eigen::Vector3d::Zero();  // world frame
  Eigen::Vector3d gravity_root_ = Eigen::Vector3d::Zero();
};

/// Bodies for every joint of the layout's chain (massless except after prismatic joints).
std::vector<RigidBody> default_bodies(const ArmLayout& layout);

RigidModel build_rigid_model(const ArmConfig& config);

}  // namespace pccarm
