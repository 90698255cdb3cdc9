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

#include <doctest.h>

#include <numbers>

#include "pccarm/kinematics.hpp"
#include "support.hpp"

using namespace pccarm;
using namespace pccarm::testing;

namespace {

constexpr double kPi = std::numbers::pi;

ArmConfig config_with(int n_pcc) {
  ArmConfig c = default_config();
  c.n_pcc = n_pcc;
  return c;
}

/// One PCC element with a zero-length, massless connector.
ArmConfig single_element() {
  ArmConfig c = default_config();
  c.n_segments = 1;
  c.n_pcc = 1;
  c.segments.resize(1);
  c.connectors = {{0.0, 0.0}};
  return c;
}

Eigen::Vector3d tip_of(const ArmLayout& layout, const Eigen::VectorXd& q) { return fk_points(layout, q).back(); }

}  // namespace

TEST_SUITE("kinematics") {

TEST_CASE("to_polar") {
  CHECK(to_polar(0, 0).phi == 0.0);
  CHECK(to_polar(0, 0).theta == 0.0);
  CHECK(to_polar(0.3, 0).phi == 0.0);
  CHECK(to_polar(0.3, 0).theta == doctest::Approx(0.3));
  Rng rng(11);
  for (int k = 0; k < 100; ++k) {
    const double phi = uniform(rng, -kPi, kPi);
    const double theta = uniform(rng, 1e-3, kPi - 1e-3);
    const PolarBend p = to_polar(theta * std::cos(phi), theta * std::sin(phi));
    CHECK(std::abs(p.theta - theta) < 1e-12);
    CHECK(std::abs(p.phi - phi) < 1e-12);
  }
}

TEST_CASE("element_transform closed forms") {
  const double l = 0.07;
  const Frame straight = element_transform(0, 0, l);
  CHECK(straight.rotation.isIdentity(0.0));
  CHECK((straight.translation - Eigen::Vector3d(0, 0, l)).norm() == 0.0);

  const Frame quarter = element_transform(kPi / 2, 0, l);
  CHECK((quarter.translation - (2 * l / kPi) * Eigen::Vector3d(1, 0, 1)).norm() < 1e-15);
  // Quarter turn about +y: the element's z axis ends up along +x.
  CHECK((quarter.rotation.col(2) - Eigen::Vector3d::UnitX()).norm() < 1e-15);
  CHECK((quarter.rotation.col(1) - Eigen::Vector3d::UnitY()).norm() < 1e-15);

  CHECK_THROWS_AS(element_transform(kPi, 0, l), KinematicsError);
  CHECK_THROWS_AS(element_transform(2.5, 2.5, l), KinematicsError);
}

TEST_CASE("element_transform matches the polar arc oracle") {
  Rng rng(12);
  for (int k = 0; k < 500; ++k) {
    const double phi = uniform(rng, -kPi, kPi);
    const double theta = uniform(rng, 0.0, kPi - 1e-6);
    const double l = uniform(rng, 0.01, 0.3);
    const double tx = theta * std::cos(phi), ty = theta * std::sin(phi);
    const Frame f = element_transform(tx, ty, l);
    const Frame g = polar_arc_frame(tx, ty, l);
    CHECK((f.rotation - g.rotation).norm() < 1e-12);
    CHECK((f.translation - g.translation).norm() < 1e-12 * l);
  }
}

TEST_CASE("element rotations are orthonormal") {
  Rng rng(13);
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const double phi = uniform(rng, -kPi, kPi);
    const double theta = uniform(rng, 0.0, kPi - 1e-9);
    const Eigen::Matrix3d r = element_transform(theta * std::cos(phi), theta * std::sin(phi), 0.1).rotation;
    worst = std::max(worst, (r.transpose() * r - Eigen::Matrix3d::Identity()).norm());
    CHECK(r.determinant() == doctest::Approx(1.0));
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("series and exact ratios agree at the crossover") {
  const double t = 1e-4;
  CHECK(rel_err(ratio::sinc_series(t), ratio::sinc_exact(t)) < 1e-10);
  CHECK(rel_err(ratio::versine_series(t), ratio::versine_exact(t)) < 1e-10);
  CHECK(rel_err(ratio::half_chord_series(t), ratio::half_chord_exact(t)) < 1e-10);
  // Both sides of the library's own threshold against the stable closed form.
  for (double th : {0.999 * kSeriesThreshold, 1.001 * kSeriesThreshold}) {
    const Frame f = element_transform(th, 0, 0.1);
    const double h = std::sin(th / 2);
    CHECK(rel_err(f.translation.x(), 0.1 * 2 * h * h / th) < 1e-14);
    CHECK(rel_err(f.translation.z(), 0.1 * std::sin(th) / th) < 1e-15);
  }
}

TEST_CASE("rigid_joint_map examples") {
  const RigidJointPose zero = rigid_joint_map({}, {}, 0.1);
  CHECK(zero.xi_x == 0.0);
  CHECK(zero.xi_y == 0.0);
  CHECK(zero.xi_z == 0.0);
  CHECK(zero.xi_l1 == 0.0);
  CHECK(zero.xi_l2 == 0.0);

  // phi = 0, theta = pi/3: the Euler rotation reproduces R'(0, pi/6).
  const RigidJointPose r = rigid_joint_map({}, {kPi / 3, 0}, 0.1);
  const Eigen::Matrix3d rebuilt = rot_x(r.xi_x) * rot_y(r.xi_y) * rot_z(r.xi_z);
  const Eigen::Matrix3d half = Eigen::AngleAxisd(kPi / 6, Eigen::Vector3d::UnitY()).toRotationMatrix();
  CHECK((rebuilt - half).norm() < 1e-10);

  const RigidJointPose q = rigid_joint_map({}, {kPi / 2, 0}, 0.1);
  const double expect = 0.05 - 0.1 * std::sin(kPi / 4) / (kPi / 2);
  CHECK(q.xi_l1 == doctest::Approx(expect).epsilon(1e-14));
  CHECK(q.xi_l1 == doctest::Approx(0.0049842).epsilon(1e-4));
  CHECK(q.xi_l2 == q.xi_l1);

  // Series branch of the extension at the crossover.
  const double t = 1e-4;
  const double exact = 0.05 - 0.1 * std::sin(t / 2) / t;
  CHECK(std::abs(rigid_joint_map({}, {t, 0}, 0.1).xi_l1 - exact) < 1e-10 * 0.05);
}

TEST_CASE("junction rotation reconstructs for random neighbours") {
  Rng rng(14);
  for (int k = 0; k < 200; ++k) {
    const PccPose a{uniform(rng, -1.2, 1.2), uniform(rng, -1.2, 1.2)};
    const PccPose b{uniform(rng, -1.2, 1.2), uniform(rng, -1.2, 1.2)};
    const RigidJointPose r = rigid_joint_map(a, b, 0.05);
    const Eigen::Matrix3d rebuilt = rot_x(r.xi_x) * rot_y(r.xi_y) * rot_z(r.xi_z);
    const Eigen::Matrix3d expect = polar_arc_frame(a.theta_x / 2, a.theta_y / 2, 1.0).rotation *
                                   polar_arc_frame(b.theta_x / 2, b.theta_y / 2, 1.0).rotation;
    CHECK((rebuilt - expect).norm() < 1e-12);
  }
}

TEST_CASE("layout bookkeeping") {
  const ArmLayout layout(config_with(3));
  CHECK(layout.n_elements() == 8);
  CHECK(layout.n_free() == 12);
  CHECK(layout.n_joints() == 40);
  int pcc = 0;
  for (const auto& e : layout.elements()) pcc += e.kind == ElementKind::kPcc;
  CHECK(pcc == 6);
  CHECK(layout.element(layout.segment_end_element(0)).kind == ElementKind::kConnector);
  CHECK_THROWS_AS(arm_joint_map(layout, Eigen::VectorXd::Zero(5)), KinematicsError);
}

TEST_CASE("arm_joint_map reductions") {
  const ArmLayout layout(config_with(3));
  CHECK(arm_joint_map(layout, Eigen::VectorXd::Zero(layout.n_free())).isZero(0.0));

  const ArmLayout one(single_element());
  const double th = 0.7;
  const Eigen::VectorXd xi = arm_joint_map(one, Eigen::Vector2d(th, 0));
  const RigidJointPose r = rigid_joint_map({}, {th, 0}, one.element(0).length);
  CHECK(xi[0] == r.xi_x);
  CHECK(xi[1] == r.xi_y);
  CHECK(xi[2] == r.xi_z);
  CHECK(xi[3] == r.xi_l1);
  CHECK(xi[4] == r.xi_l2);
}

TEST_CASE("rigid chain and element frames agree") {
  Rng rng(15);
  for (int n_pcc : {1, 2, 3}) {
    const ArmLayout layout(config_with(n_pcc));
    for (int k = 0; k < 100; ++k) {
      const Eigen::VectorXd q = random_pose(layout, rng);
      const Eigen::VectorXd qe = layout.expand(q);
      const auto chain = rigid_chain_frames(layout, arm_joint_map(layout, q));
      const auto elems = element_frames(layout, q);
      for (int e = 0; e < layout.n_elements(); ++e) {
        const Frame& c = chain[static_cast<std::size_t>(5 * e + 4)];
        const Frame& f = elems[static_cast<std::size_t>(e + 1)];
        CHECK((c.translation - f.translation).norm() < 1e-9);
        // The chain lags by the second half of the element's own bend.
        const Eigen::Matrix3d expect = f.rotation * bend_rotation(-qe[2 * e] / 2, -qe[2 * e + 1] / 2);
        CHECK((c.rotation - expect).norm() < 1e-9);
      }
      CHECK((chain.back().rotation - elems.back().rotation).norm() < 1e-9);
    }
  }
}

TEST_CASE("jacobian_m matches finite differences") {
  Rng rng(16);
  const ArmLayout layout(config_with(3));
  auto m = [&](const Eigen::VectorXd& x) { return arm_joint_map(layout, x); };
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(layout.n_free());
  CHECK((jacobian_m(layout, zero) - fd_jacobian(m, zero, 1e-6)).cwiseAbs().maxCoeff() < 1e-6);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const Eigen::VectorXd q = random_pose(layout, rng, 2.0);
    worst = std::max(worst, (jacobian_m(layout, q) - fd_jacobian(m, q, 1e-6)).cwiseAbs().maxCoeff());
  }
  CHECK(worst < 1e-5);

  // Frozen connector coordinates have identically zero columns.
  const Eigen::MatrixXd full = jacobian_m_full(layout, random_pose(layout, rng));
  for (int e = 0; e < layout.n_elements(); ++e) {
    if (layout.element(e).kind == ElementKind::kConnector) CHECK(full.middleCols<2>(2 * e).isZero(0.0));
  }
}

TEST_CASE("jacobian_m_dot_dq matches the derivative of Jm along the motion") {
  Rng rng(17);
  const ArmLayout layout(config_with(3));
  for (int k = 0; k < 20; ++k) {
    const Eigen::VectorXd q = random_pose(layout, rng, 1.5);
    const Eigen::VectorXd dq = random_vector(layout.n_free(), rng, 2.0);
    const double h = 1e-6;
    const Eigen::VectorXd fd =
        (jacobian_m(layout, q + h * dq) - jacobian_m(layout, q - h * dq)) * dq / (2 * h);
    CHECK((jacobian_m_dot_dq(layout, q, dq) - fd).cwiseAbs().maxCoeff() < 1e-6);
  }
  CHECK(jacobian_m_dot_dq(layout, random_pose(layout, rng), Eigen::VectorXd::Zero(12)).isZero(0.0));
}

TEST_CASE("tip Jacobian matches finite differences of the tip") {
  Rng rng(18);
  const ArmLayout layout(config_with(3));
  auto tip = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd { return tip_of(layout, x); };
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(layout.n_free());
  CHECK((tip_jacobian(layout, zero) - fd_jacobian(tip, zero, 1e-6)).cwiseAbs().maxCoeff() < 1e-6);
  for (int k = 0; k < 50; ++k) {
    const Eigen::VectorXd q = random_pose(layout, rng, 2.0);
    CHECK((tip_jacobian(layout, q) - fd_jacobian(tip, q, 1e-6)).cwiseAbs().maxCoeff() < 1e-5);
  }
  const Eigen::MatrixXd j = tip_jacobian(layout, random_pose(layout, rng));
  CHECK((j.transpose() * Eigen::Vector3d::Zero()).isZero(0.0));
}

TEST_CASE("tip Jacobian scales with length") {
  ArmConfig c = config_with(2);
  const ArmLayout a(c);
  for (auto& s : c.segments) s.length *= 2;
  for (auto& p : c.connectors) p.length *= 2;
  const ArmLayout b(c);
  Rng rng(19);
  const Eigen::VectorXd q = random_pose(a, rng);
  CHECK((tip_jacobian(b, q) - 2.0 * tip_jacobian(a, q)).norm() < 1e-12);
}

TEST_CASE("fk_points") {
  const ArmLayout layout(config_with(3));
  const auto pts = fk_points(layout, Eigen::VectorXd::Zero(layout.n_free()));
  REQUIRE(pts.size() == static_cast<std::size_t>(layout.n_elements() + 1));
  double s = 0.0;
  for (int e = 0; e < layout.n_elements(); ++e) {
    s += layout.element(e).length;
    CHECK((pts[static_cast<std::size_t>(e + 1)] - Eigen::Vector3d(0, 0, -s)).norm() < 1e-15);
  }

  Rng rng(20);
  for (int k = 0; k < 50; ++k) {
    Eigen::VectorXd q = random_pose(layout, rng);
    double chord = 0.0;
    const auto bent = fk_points(layout, q);
    for (std::size_t i = 1; i < bent.size(); ++i) chord += (bent[i] - bent[i - 1]).norm();
    CHECK(chord <= s + 1e-12);

    for (Eigen::Index i = 1; i < q.size(); i += 2) q[i] = 0.0;
    for (const auto& p : fk_points(layout, q)) CHECK(std::abs(p.y()) < 1e-12);
  }
}

}  // TEST_SUITE
