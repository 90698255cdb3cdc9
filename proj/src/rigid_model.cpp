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

#include "pccarm/rigid_model.hpp"

#include <stdexcept>

#include <Eigen/Geometry>

namespace pccarm {

namespace {

using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;

Eigen::Matrix3d skew(const Eigen::Vector3d& v) {
  Eigen::Matrix3d s;
  s << 0, -v.z(), v.y(), v.z(), 0, -v.x(), -v.y(), v.x(), 0;
  return s;
}

// Plucker transform of motion vectors from parent to child coordinates, given
// the child frame (rotation, origin) expressed in the parent.
Mat6 motion_transform(const Frame& child) {
  const Eigen::Matrix3d e = child.rotation.transpose();
  Mat6 x = Mat6::Zero();
  x.topLeftCorner<3, 3>() = e;
  x.bottomRightCorner<3, 3>() = e;
  x.bottomLeftCorner<3, 3>() = -e * skew(child.translation);
  return x;
}

Vec6 motion_subspace(JointType type) {
  Vec6 s = Vec6::Zero();
  switch (type) {
    case JointType::kRevoluteX: s[0] = 1.0; break;
    case JointType::kRevoluteY: s[1] = 1.0; break;
    case JointType::kRevoluteZ: s[2] = 1.0; break;
    case JointType::kPrismaticZ: s[5] = -1.0; break;
  }
  return s;
}

Mat6 spatial_inertia(const RigidBody& b) {
  const Eigen::Matrix3d c = skew(b.com);
  Mat6 i;
  i.topLeftCorner<3, 3>() = b.inertia_com + b.mass * c * c.transpose();
  i.topRightCorner<3, 3>() = b.mass * c;
  i.bottomLeftCorner<3, 3>() = b.mass * c.transpose();
  i.bottomRightCorner<3, 3>() = b.mass * Eigen::Matrix3d::Identity();
  return i;
}

Vec6 cross_motion(const Vec6& v, const Vec6& m) {
  Vec6 out;
  const Eigen::Vector3d w = v.head<3>();
  out.head<3>() = w.cross(m.head<3>());
  out.tail<3>() = w.cross(m.tail<3>()) + v.tail<3>().cross(m.head<3>());
  return out;
}

Vec6 cross_force(const Vec6& v, const Vec6& f) {
  Vec6 out;
  const Eigen::Vector3d w = v.head<3>();
  out.head<3>() = w.cross(f.head<3>()) + v.tail<3>().cross(f.tail<3>());
  out.tail<3>() = w.cross(f.tail<3>());
  return out;
}

Eigen::Matrix3d cylinder_inertia(double mass, double radius, double length) {
  const double axial = 0.5 * mass * radius * radius;
  const double transverse = mass * (3.0 * radius * radius + length * length) / 12.0;
  return Eigen::Vector3d(transverse, transverse, axial).asDiagonal();
}

}  // namespace

RigidModel::RigidModel(ArmLayout layout, std::vector<RigidBody> bodies,
                       const Eigen::Vector3d& gravity)
    : layout_(std::move(layout)),
      joints_(rigid_joint_sequence(layout_)),
      bodies_(std::move(bodies)),
      gravity_(gravity),
      gravity_root_(layout_.mount_rotation().transpose() * gravity) {
  if (bodies_.size() != joints_.size())
    throw std::invalid_argument("rigid model needs one body per joint");
}

double RigidModel::total_mass() const {
  double m = 0.0;
  for (const auto& b : bodies_) m += b.mass;
  return m;
}

RigidModel RigidModel::with_gravity(const Eigen::Vector3d& gravity) const {
  return RigidModel(layout_, bodies_, gravity);
}

Eigen::MatrixXd RigidModel::mass_matrix(const Eigen::VectorXd& xi) const {
  const int n = n_joints();
  std::vector<Mat6> x(static_cast<std::size_t>(n));
  std::vector<Mat6> ic(static_cast<std::size_t>(n));
  std::vector<Vec6> s(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    x[k] = motion_transform(joint_transform(joints_[k], xi[i]));
    ic[k] = spatial_inertia(bodies_[k]);
    s[k] = motion_subspace(joints_[k].type);
  }
  for (int i = n - 1; i > 0; --i) {
    const auto k = static_cast<std::size_t>(i);
    ic[k - 1] += x[k].transpose() * ic[k] * x[k];
  }
  Eigen::MatrixXd h(n, n);
  for (int i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    Vec6 f = ic[k] * s[k];
    h(i, i) = s[k].dot(f);
    for (int j = i; j > 0; --j) {
      f = x[static_cast<std::size_t>(j)].transpose() * f;
      const double hij = s[static_cast<std::size_t>(j - 1)].dot(f);
      h(i, j - 1) = hij;
      h(j - 1, i) = hij;
    }
  }
  return h;
}

Eigen::VectorXd RigidModel::inverse_dynamics(const Eigen::VectorXd& xi,
                                             const Eigen::VectorXd& dxi,
                                             const Eigen::VectorXd& ddxi,
                                             bool with_gravity) const {
  const int n = n_joints();
  std::vector<Mat6> x(static_cast<std::size_t>(n));
  std::vector<Vec6> s(static_cast<std::size_t>(n));
  std::vector<Vec6> f(static_cast<std::size_t>(n));
  Vec6 v = Vec6::Zero();
  Vec6 a = Vec6::Zero();
  if (with_gravity) a.tail<3>() = -gravity_root_;
  for (int i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    x[k] = motion_transform(joint_transform(joints_[k], xi[i]));
    s[k] = motion_subspace(joints_[k].type);
    const Vec6 vj = s[k] * dxi[i];
    v = x[k] * v + vj;
    a = x[k] * a + s[k] * ddxi[i] + cross_motion(v, vj);
    const Mat6 inertia = spatial_inertia(bodies_[k]);
    f[k] = inertia * a + cross_force(v, inertia * v);
  }
  Eigen::VectorXd tau(n);
  for (int i = n - 1; i >= 0; --i) {
    const auto k = static_cast<std::size_t>(i);
    tau[i] = s[k].dot(f[k]);
    if (i > 0) f[k - 1] += x[k].transpose() * f[k];
  }
  return tau;
}

std::vector<Eigen::Vector3d> RigidModel::body_positions(const Eigen::VectorXd& xi) const {
  const auto frames = rigid_chain_frames(layout_, xi);
  std::vector<Eigen::Vector3d> out;
  out.reserve(frames.size());
  for (std::size_t k = 0; k < frames.size(); ++k) out.push_back(frames[k].apply(bodies_[k].com));
  return out;
}

std::vector<RigidBody> default_bodies(const ArmLayout& layout) {
  std::vector<RigidBody> bodies(static_cast<std::size_t>(layout.n_joints()));
  for (int e = 0; e < layout.n_elements(); ++e) {
    const ElementInfo& info = layout.element(e);
    auto& first = bodies[static_cast<std::size_t>(5 * e + 3)];
    auto& second = bodies[static_cast<std::size_t>(5 * e + 4)];
    if (info.kind == ElementKind::kConnector) {
      // point mass at the connector midpoint, which is the origin after the first prismatic
      first.mass = info.mass;
      continue;
    }
    const double half_mass = 0.5 * info.mass;
    const double half_length = 0.5 * info.length;
    for (RigidBody* b : {&first, &second}) {
      b->mass = half_mass;
      b->com = Eigen::Vector3d(0.0, 0.0, -0.5 * half_length);
      b->inertia_com = cylinder_inertia(half_mass, info.inertia_radius, half_length);
    }
  }
  return bodies;
}

RigidModel build_rigid_model(const ArmConfig& config) {
  ArmLayout layout(config);
  auto bodies = default_bodies(layout);
  return RigidModel(std::move(layout), std::move(bodies), config.gravity);
}

}  // namespace pccarm
