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

#include "pccarm/kinematics.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Geometry>
#include <unsupported/Eigen/AutoDiff>

namespace pccarm {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kThreshold2 = kSeriesThreshold * kSeriesThreshold;

// Derivatives with respect to (theta_x, theta_y) of the previous and current element.
using Ad = Eigen::AutoDiffScalar<Eigen::Matrix<double, 4, 1>>;

// Nested scalar along a single direction: value, first and second directional derivative.
using Ad1 = Eigen::AutoDiffScalar<Eigen::Matrix<double, 1, 1>>;
using Ad2 = Eigen::AutoDiffScalar<Eigen::Matrix<Ad1, 1, 1>>;

inline double val(double x) { return x; }
inline double val(const Ad& x) { return x.value(); }
inline double val(const Ad2& x) { return x.value().value(); }

// All ratios are written in terms of t2 = theta^2 so they stay smooth through zero.
template <class T>
T sinc2(const T& t2) {
  using std::sin;
  using std::sqrt;
  if (val(t2) < kThreshold2) return T(1.0 - t2 / 6.0 + t2 * t2 / 120.0);
  const T t = sqrt(t2);
  return T(sin(t) / t);
}

template <class T>
T versine2(const T& t2) {
  using std::sin;
  using std::sqrt;
  if (val(t2) < kThreshold2) return T(0.5 - t2 / 24.0 + t2 * t2 / 720.0);
  const T t = sqrt(t2);
  const T h = sin(T(t / 2.0));
  return T(2.0 * h * h / t2);
}

template <class T>
T half_chord2(const T& t2) {
  using std::sin;
  using std::sqrt;
  if (val(t2) < kThreshold2) return T(0.5 * (1.0 - t2 / 24.0 + t2 * t2 / 1920.0));
  const T t = sqrt(t2);
  return T(sin(T(t / 2.0)) / t);
}

template <class T>
using Mat3 = std::array<T, 9>;  // row-major

template <class T>
Mat3<T> bend_rotation_t(const T& ax, const T& ay) {
  const T t2 = ax * ax + ay * ay;
  const T s = sinc2(t2);
  const T c = versine2(t2);
  // Rotation vector (-ay, ax, 0); Rodrigues with K^2 = w w^T - t2 I.
  const T wx = -ay;
  const T wy = ax;
  return {T(1.0 + c * (wx * wx - t2)), T(c * wx * wy),          T(s * wy),
          T(c * wx * wy),              T(1.0 + c * (wy * wy - t2)), T(-s * wx),
          T(-s * wy),                  T(s * wx),                T(1.0 - c * t2)};
}

template <class T>
T mul_entry(const Mat3<T>& a, const Mat3<T>& b, int i, int j) {
  return T(a[3 * i] * b[j] + a[3 * i + 1] * b[3 + j] + a[3 * i + 2] * b[6 + j]);
}

// Euler XYZ angles of R'(prev/2) R'(curr/2).
template <class T>
std::array<T, 3> junction_angles(const T& px, const T& py, const T& cx, const T& cy) {
  using std::asin;
  using std::atan2;
  const Mat3<T> a = bend_rotation_t(T(px / 2.0), T(py / 2.0));
  const Mat3<T> b = bend_rotation_t(T(cx / 2.0), T(cy / 2.0));
  const T m00 = mul_entry(a, b, 0, 0);
  const T m01 = mul_entry(a, b, 0, 1);
  const T m02 = mul_entry(a, b, 0, 2);
  const T m12 = mul_entry(a, b, 1, 2);
  const T m22 = mul_entry(a, b, 2, 2);
  if (std::abs(val(m02)) > 1.0 - 1e-9)
    throw KinematicsError("rigid joint map: Euler extraction at gimbal lock");
  return {T(atan2(T(-m12), m22)), T(asin(m02)), T(atan2(T(-m01), m00))};
}

template <class T>
T prismatic_extension(const T& cx, const T& cy, double length) {
  const T t2 = cx * cx + cy * cy;
  if (val(t2) < kThreshold2) return T(0.5 * length * (t2 / 24.0 - t2 * t2 / 1920.0));
  return T(0.5 * length - length * half_chord2(t2));
}

double bend_angle(double tx, double ty) { return std::hypot(tx, ty); }

void check_bend(double tx, double ty) {
  const double t = bend_angle(tx, ty);
  if (!std::isfinite(t)) throw KinematicsError("non-finite curvature component");
  if (t >= kPi) throw KinematicsError("bend angle must stay below pi (got " + std::to_string(t) + ")");
}

}  // namespace

namespace ratio {
double sinc_exact(double t) { return std::sin(t) / t; }
double sinc_series(double t) { return 1.0 - t * t / 6.0 + t * t * t * t / 120.0; }
double versine_exact(double t) {
  const double h = std::sin(t / 2.0);
  return 2.0 * h * h / (t * t);
}
double versine_series(double t) { return 0.5 - t * t / 24.0 + t * t * t * t / 720.0; }
double half_chord_exact(double t) { return std::sin(t / 2.0) / t; }
double half_chord_series(double t) { return 0.5 * (1.0 - t * t / 24.0 + t * t * t * t / 1920.0); }
}  // namespace ratio

PolarBend to_polar(double theta_x, double theta_y) {
  return {std::atan2(theta_y, theta_x), std::hypot(theta_x, theta_y)};
}

Eigen::Matrix3d rot_x(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Eigen::Matrix3d r;
  r << 1, 0, 0, 0, c, -s, 0, s, c;
  return r;
}

Eigen::Matrix3d rot_y(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Eigen::Matrix3d r;
  r << c, 0, s, 0, 1, 0, -s, 0, c;
  return r;
}

Eigen::Matrix3d rot_z(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Eigen::Matrix3d r;
  r << c, -s, 0, s, c, 0, 0, 0, 1;
  return r;
}

Eigen::Matrix3d bend_rotation(double theta_x, double theta_y) {
  const Mat3<double> m = bend_rotation_t(theta_x, theta_y);
  Eigen::Matrix3d r;
  r << m[0], m[1], m[2], m[3], m[4], m[5], m[6], m[7], m[8];
  return r;
}

Frame element_transform(double theta_x, double theta_y, double length) {
  check_bend(theta_x, theta_y);
  const double t2 = theta_x * theta_x + theta_y * theta_y;
  Frame f;
  f.rotation = bend_rotation(theta_x, theta_y);
  const double c = versine2(t2);
  f.translation = length * Eigen::Vector3d(c * theta_x, c * theta_y, sinc2(t2));
  return f;
}

RigidJointPose rigid_joint_map(const PccPose& prev, const PccPose& curr, double length) {
  check_bend(prev.theta_x, prev.theta_y);
  check_bend(curr.theta_x, curr.theta_y);
  const auto ang = junction_angles(prev.theta_x, prev.theta_y, curr.theta_x, curr.theta_y);
  const double ext = prismatic_extension(curr.theta_x, curr.theta_y, length);
  return {ang[0], ang[1], ang[2], ext, ext};
}

ArmLayout::ArmLayout(const ArmConfig& config)
    : n_segments_(config.n_segments), n_pcc_(config.n_pcc) {
  mount_ = Eigen::Vector3d(1.0, -1.0, -1.0).asDiagonal();
  for (int s = 0; s < config.n_segments; ++s) {
    for (int k = 0; k < config.n_pcc; ++k) {
      const ElementProps p = element_props(config, s, k);
      ElementInfo e;
      e.kind = ElementKind::kPcc;
      e.segment = s;
      e.index = k;
      e.length = p.length;
      e.mass = p.mass;
      e.inertia_radius = std::sqrt(p.section.area / kPi);
      e.section = p.section;
      e.free_offset = n_free_;
      n_free_ += 2;
      elements_.push_back(e);
    }
    const auto& piece = config.connectors[static_cast<std::size_t>(s)];
    ElementInfo c;
    c.kind = ElementKind::kConnector;
    c.segment = s;
    c.length = piece.length;
    c.mass = piece.mass;
    elements_.push_back(c);
  }
}

Eigen::VectorXd ArmLayout::expand(const Eigen::VectorXd& q) const {
  if (q.size() != n_free_)
    throw KinematicsError("pose has " + std::to_string(q.size()) + " entries, expected " +
                          std::to_string(n_free_));
  Eigen::VectorXd full = Eigen::VectorXd::Zero(2 * n_elements());
  for (int e = 0; e < n_elements(); ++e) {
    const int off = elements_[static_cast<std::size_t>(e)].free_offset;
    if (off >= 0) full.segment<2>(2 * e) = q.segment<2>(off);
  }
  return full;
}

double ArmLayout::total_mass() const {
  double m = 0.0;
  for (const auto& e : elements_) m += e.mass;
  return m;
}

void check_pose(const ArmLayout& layout, const Eigen::VectorXd& q) {
  if (q.size() != layout.n_free())
    throw KinematicsError("pose has " + std::to_string(q.size()) + " entries, expected " +
                          std::to_string(layout.n_free()));
  for (int i = 0; i + 1 < q.size(); i += 2) check_bend(q[i], q[i + 1]);
}

std::vector<RigidJoint> rigid_joint_sequence(const ArmLayout& layout) {
  std::vector<RigidJoint> joints;
  joints.reserve(static_cast<std::size_t>(layout.n_joints()));
  for (const auto& e : layout.elements()) {
    joints.push_back({JointType::kRevoluteX, 0.0});
    joints.push_back({JointType::kRevoluteY, 0.0});
    joints.push_back({JointType::kRevoluteZ, 0.0});
    joints.push_back({JointType::kPrismaticZ, 0.5 * e.length});
    joints.push_back({JointType::kPrismaticZ, 0.5 * e.length});
  }
  return joints;
}

Frame joint_transform(const RigidJoint& joint, double xi) {
  Frame f;
  switch (joint.type) {
    case JointType::kRevoluteX: f.rotation = rot_x(xi); break;
    case JointType::kRevoluteY: f.rotation = rot_y(xi); break;
    case JointType::kRevoluteZ: f.rotation = rot_z(xi); break;
    case JointType::kPrismaticZ: f.translation.z() = joint.offset - xi; break;
  }
  return f;
}

Eigen::VectorXd arm_joint_map(const ArmLayout& layout, const Eigen::VectorXd& q) {
  check_pose(layout, q);
  const Eigen::VectorXd qe = layout.expand(q);
  Eigen::VectorXd xi(layout.n_joints());
  for (int e = 0; e < layout.n_elements(); ++e) {
    const PccPose prev = e == 0 ? PccPose{} : PccPose{qe[2 * e - 2], qe[2 * e - 1]};
    const PccPose curr{qe[2 * e], qe[2 * e + 1]};
    const RigidJointPose r = rigid_joint_map(prev, curr, layout.element(e).length);
    xi.segment<5>(5 * e) << r.xi_x, r.xi_y, r.xi_z, r.xi_l1, r.xi_l2;
  }
  return xi;
}

Eigen::MatrixXd jacobian_m_full(const ArmLayout& layout, const Eigen::VectorXd& q) {
  check_pose(layout, q);
  const Eigen::VectorXd qe = layout.expand(q);
  const int n = layout.n_elements();
  Eigen::MatrixXd jm = Eigen::MatrixXd::Zero(layout.n_joints(), 2 * n);

  auto seed = [](double v, int slot, bool active) {
    Ad a(v, Eigen::Matrix<double, 4, 1>::Zero());
    if (active) a.derivatives()[slot] = 1.0;
    return a;
  };

  for (int e = 0; e < n; ++e) {
    const bool prev_free = e > 0 && layout.element(e - 1).free_offset >= 0;
    const bool curr_free = layout.element(e).free_offset >= 0;
    if (!prev_free && !curr_free) continue;
    const double px = e > 0 ? qe[2 * e - 2] : 0.0;
    const double py = e > 0 ? qe[2 * e - 1] : 0.0;
    const Ad apx = seed(px, 0, prev_free);
    const Ad apy = seed(py, 1, prev_free);
    const Ad acx = seed(qe[2 * e], 2, curr_free);
    const Ad acy = seed(qe[2 * e + 1], 3, curr_free);

    const auto ang = junction_angles(apx, apy, acx, acy);
    const Ad ext = prismatic_extension(acx, acy, layout.element(e).length);
    for (int r = 0; r < 3; ++r) {
      if (prev_free) jm.block<1, 2>(5 * e + r, 2 * e - 2) = ang[static_cast<std::size_t>(r)].derivatives().segment<2>(0).transpose();
      if (curr_free) jm.block<1, 2>(5 * e + r, 2 * e) = ang[static_cast<std::size_t>(r)].derivatives().segment<2>(2).transpose();
    }
    if (curr_free) {
      jm.block<1, 2>(5 * e + 3, 2 * e) = ext.derivatives().segment<2>(2).transpose();
      jm.block<1, 2>(5 * e + 4, 2 * e) = ext.derivatives().segment<2>(2).transpose();
    }
  }
  return jm;
}

Eigen::VectorXd jacobian_m_dot_dq(const ArmLayout& layout, const Eigen::VectorXd& q,
                                  const Eigen::VectorXd& dq) {
  check_pose(layout, q);
  const Eigen::VectorXd qe = layout.expand(q);
  const Eigen::VectorXd ve = layout.expand(dq);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(layout.n_joints());
  if (ve.isZero(0.0)) return out;

  // x(s) = x + s v; the second s-derivative of m(x(s)) at s = 0 is dJm/dt dq.
  auto line = [](double x, double v) {
    Ad2 a;
    a.value() = Ad1(x, Eigen::Matrix<double, 1, 1>::Constant(v));
    a.derivatives()(0) = Ad1(v, Eigen::Matrix<double, 1, 1>::Zero());
    return a;
  };
  auto second = [](const Ad2& a) { return a.derivatives()(0).derivatives()(0); };

  for (int e = 0; e < layout.n_elements(); ++e) {
    const double px = e > 0 ? qe[2 * e - 2] : 0.0;
    const double py = e > 0 ? qe[2 * e - 1] : 0.0;
    const double vx = e > 0 ? ve[2 * e - 2] : 0.0;
    const double vy = e > 0 ? ve[2 * e - 1] : 0.0;
    if (vx == 0.0 && vy == 0.0 && ve[2 * e] == 0.0 && ve[2 * e + 1] == 0.0) continue;
    const Ad2 cx = line(qe[2 * e], ve[2 * e]);
    const Ad2 cy = line(qe[2 * e + 1], ve[2 * e + 1]);
    const auto ang = junction_angles(line(px, vx), line(py, vy), cx, cy);
    const Ad2 ext = prismatic_extension(cx, cy, layout.element(e).length);
    for (int r = 0; r < 3; ++r) out[5 * e + r] = second(ang[static_cast<std::size_t>(r)]);
    out[5 * e + 3] = second(ext);
    out[5 * e + 4] = second(ext);
  }
  return out;
}

Eigen::MatrixXd jacobian_m(const ArmLayout& layout, const Eigen::VectorXd& q) {
  const Eigen::MatrixXd full = jacobian_m_full(layout, q);
  Eigen::MatrixXd jm(layout.n_joints(), layout.n_free());
  for (int e = 0; e < layout.n_elements(); ++e) {
    const int off = layout.element(e).free_offset;
    if (off >= 0) jm.middleCols<2>(off) = full.middleCols<2>(2 * e);
  }
  return jm;
}

std::vector<Frame> rigid_chain_frames(const ArmLayout& layout, const Eigen::VectorXd& xi) {
  const auto joints = rigid_joint_sequence(layout);
  if (xi.size() != static_cast<Eigen::Index>(joints.size()))
    throw KinematicsError("joint vector has the wrong size");
  std::vector<Frame> frames;
  frames.reserve(joints.size());
  Frame world{layout.mount_rotation(), Eigen::Vector3d::Zero()};
  for (std::size_t k = 0; k < joints.size(); ++k) {
    world = world * joint_transform(joints[k], xi[static_cast<Eigen::Index>(k)]);
    frames.push_back(world);
  }
  return frames;
}

std::vector<Frame> element_frames(const ArmLayout& layout, const Eigen::VectorXd& q) {
  check_pose(layout, q);
  const Eigen::VectorXd qe = layout.expand(q);
  std::vector<Frame> frames;
  frames.reserve(static_cast<std::size_t>(layout.n_elements() + 1));
  Frame world{layout.mount_rotation(), Eigen::Vector3d::Zero()};
  frames.push_back(world);
  for (int e = 0; e < layout.n_elements(); ++e) {
    world = world * element_transform(qe[2 * e], qe[2 * e + 1], layout.element(e).length);
    frames.push_back(world);
  }
  return frames;
}

std::vector<Eigen::Vector3d> fk_points(const ArmLayout& layout, const Eigen::VectorXd& q) {
  std::vector<Eigen::Vector3d> pts;
  for (const auto& f : element_frames(layout, q)) pts.push_back(f.translation);
  return pts;
}

Eigen::MatrixXd tip_jacobian(const ArmLayout& layout, const Eigen::VectorXd& xi,
                             const Eigen::MatrixXd& jm) {
  const auto joints = rigid_joint_sequence(layout);
  const auto frames = rigid_chain_frames(layout, xi);
  const Eigen::Vector3d tip = frames.back().translation;
  Eigen::Matrix3Xd jg(3, static_cast<Eigen::Index>(joints.size()));
  for (std::size_t k = 0; k < joints.size(); ++k) {
    const Frame& f = frames[k];
    const auto col = static_cast<Eigen::Index>(k);
    switch (joints[k].type) {
      case JointType::kRevoluteX: jg.col(col) = f.rotation.col(0).cross(tip - f.translation); break;
      case JointType::kRevoluteY: jg.col(col) = f.rotation.col(1).cross(tip - f.translation); break;
      case JointType::kRevoluteZ: jg.col(col) = f.rotation.col(2).cross(tip - f.translation); break;
      case JointType::kPrismaticZ: jg.col(col) = -f.rotation.col(2); break;
    }
  }
  return jg * jm;
}

Eigen::MatrixXd tip_jacobian(const ArmLayout& layout, const Eigen::VectorXd& q) {
  return tip_jacobian(layout, arm_joint_map(layout, q), jacobian_m(layout, q));
}

}  // namespace pccarm
