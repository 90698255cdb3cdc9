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

#include <stdexcept>
#include <vector>

#include <Eigen/Core>

#include "pccarm/arm_model.hpp"

namespace pccarm {

/// Raised for poses outside the model's validity range.
class KinematicsError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct Frame {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  Frame operator*(const Frame& child) const {
    return {rotation * child.rotation, translation + rotation * child.translation};
  }
  Eigen::Vector3d apply(const Eigen::Vector3d& p) const { return translation + rotation * p; }
};

struct PolarBend {
  double phi = 0.0;    // bending-plane angle
  double theta = 0.0;  // bend angle, >= 0
};

/// Curvature components (theta_x, theta_y) of one PCC element.
struct PccPose {
  double theta_x = 0.0;
  double theta_y = 0.0;
};

/// Joint values of the five-joint rigid counterpart of one element.
struct RigidJointPose {
  double xi_x = 0.0;
  double xi_y = 0.0;
  double xi_z = 0.0;
  double xi_l1 = 0.0;  // m
  double xi_l2 = 0.0;  // m
};

// Small-angle switch for the sin/cos ratios below.
inline constexpr double kSeriesThreshold = 1e-6;

namespace ratio {
// Exact and 4th-order series forms, exposed so the crossover can be tested.
double sinc_exact(double theta);        // sin(t)/t
double sinc_series(double theta);
double versine_exact(double theta);     // (1 - cos t)/t^2
double versine_series(double theta);
double half_chord_exact(double theta);  // sin(t/2)/t
double half_chord_series(double theta);
}  // namespace ratio

PolarBend to_polar(double theta_x, double theta_y);

/// Rotation by the bend angle about (-sin(phi), cos(phi), 0).
Eigen::Matrix3d bend_rotation(double theta_x, double theta_y);

/// Constant-curvature frame from element base to element tip. Throws for theta >= pi.
Frame element_transform(double theta_x, double theta_y, double length);

/// Euler XYZ angles and prismatic extensions of the rigid counterpart of `curr`.
RigidJointPose rigid_joint_map(const PccPose& prev, const PccPose& curr, double length);

Eigen::Matrix3d rot_x(double a);
Eigen::Matrix3d rot_y(double a);
Eigen::Matrix3d rot_z(double a);

enum class ElementKind { kPcc, kConnector };

struct ElementInfo {
  ElementKind kind = ElementKind::kPcc;
  int segment = 0;
  int index = 0;             // position within the segment (connectors: 0)
  double length = 0.0;
  double mass = 0.0;
  double inertia_radius = 0.0;  // area-equivalent radius; 0 for lumped connectors
  CrossSectionProps section;    // PCC elements only
  int free_offset = -1;         // first free coordinate, -1 when frozen
};

/**
 * Discretized arm: per segment, n_pcc free PCC elements followed by the
 * segment's straight connector. Free coordinates q are the curvature
 * components of the PCC elements only; connectors are pinned straight.
 *
 * The chain's local +z axis points along world -z (arm hanging from its base).
 */
class ArmLayout {
 public:
  ArmLayout() = default;
  explicit ArmLayout(const ArmConfig& config);

  int n_segments() const { return n_segments_; }
  int n_pcc() const { return n_pcc_; }
  int n_elements() const { return static_cast<int>(elements_.size()); }
  int n_free() const { return n_free_; }
  int n_joints() const { return 5 * n_elements(); }
  const std::vector<ElementInfo>& elements() const { return elements_; }
  const ElementInfo& element(int e) const { return elements_[static_cast<std::size_t>(e)]; }

  /// Index of the connector closing segment `s`; its distal end is the segment tip.
  int segment_end_element(int s) const { return (s + 1) * (n_pcc_ + 1) - 1; }

  /// Per-element (theta_x, theta_y) pairs, zeros at connectors.
  Eigen::VectorXd expand(const Eigen::VectorXd& q) const;

  const Eigen::Matrix3d& mount_rotation() const { return mount_; }
  double total_mass() const;

 private:
  int n_segments_ = 0;
  int n_pcc_ = 0;
  int n_free_ = 0;
  std::vector<ElementInfo> elements_;
  Eigen::Matrix3d mount_ = Eigen::Matrix3d::Identity();
};

/// Throws KinematicsError unless q has the right size, is finite, and every bend is below pi.
void check_pose(const ArmLayout& layout, const Eigen::VectorXd& q);

enum class JointType { kRevoluteX, kRevoluteY, kRevoluteZ, kPrismaticZ };

/// Prismatic joints translate by (offset - xi) along local z.
struct RigidJoint {
  JointType type = JointType::kRevoluteX;
  double offset = 0.0;
};

/// Per element: Rx, Ry, Rz at the element base, then two prismatic half-chords.
std::vector<RigidJoint> rigid_joint_sequence(const ArmLayout& layout);

/// Parent-to-child transform of a single joint.
Frame joint_transform(const RigidJoint& joint, double xi);

/// m(q): five joint values per element, element 0 seeing a straight predecessor.
Eigen::VectorXd arm_joint_map(const ArmLayout& layout, const Eigen::VectorXd& q);

/// dm/dq with respect to the free coordinates (n_joints x n_free).
Eigen::MatrixXd jacobian_m(const ArmLayout& layout, const Eigen::VectorXd& q);

/// dm/dq over all element coordinates (n_joints x 2 n_elements); connector columns are zero.
Eigen::MatrixXd jacobian_m_full(const ArmLayout& layout, const Eigen::VectorXd& q);

/// dJm/dt dq, the velocity-product part of the rigid-chain joint acceleration.
Eigen::VectorXd jacobian_m_dot_dq(const ArmLayout& layout, const Eigen::VectorXd& q,
                                  const Eigen::VectorXd& dq);

/// World frames after every joint of the rigid chain at joint values xi.
std::vector<Frame> rigid_chain_frames(const ArmLayout& layout, const Eigen::VectorXd& xi);

/// World frame of each element boundary from products of element transforms (n_elements + 1).
std::vector<Frame> element_frames(const ArmLayout& layout, const Eigen::VectorXd& q);

/// World positions of every element boundary, base to tip.
std::vector<Eigen::Vector3d> fk_points(const ArmLayout& layout, const Eigen::VectorXd& q);

/// Positional Jacobian of the arm tip (3 x n_free), world frame.
Eigen::MatrixXd tip_jacobian(const ArmLayout& layout, const Eigen::VectorXd& q);

/// Same as tip_jacobian, reusing an already computed dm/dq.
Eigen::MatrixXd tip_jacobian(const ArmLayout& layout, const Eigen::VectorXd& xi,
                             const Eigen::MatrixXd& jm);

}  // namespace pccarm
