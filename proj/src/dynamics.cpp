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

#include "pccarm/dynamics.hpp"

#include <cmath>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/LU>

namespace pccarm {

namespace {

// Rigid-chain joint acceleration produced by dq alone.
Eigen::VectorXd velocity_acceleration(const ArmLayout& layout, const Eigen::VectorXd& q,
                                      const Eigen::VectorXd& dq, CoriolisProjection projection) {
  if (projection == CoriolisProjection::kLiteral) return Eigen::VectorXd::Zero(layout.n_joints());
  return jacobian_m_dot_dq(layout, q, dq);
}

}  // namespace

KineticTerms kinetic_terms(const RigidModel& model, const Eigen::VectorXd& q,
                           const Eigen::VectorXd& dq, CoriolisProjection projection) {
  const ArmLayout& layout = model.layout();
  if (dq.size() != layout.n_free()) throw KinematicsError("velocity vector has the wrong size");
  const Eigen::VectorXd xi = arm_joint_map(layout, q);
  const Eigen::MatrixXd jm = jacobian_m(layout, q);
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(xi.size());

  KineticTerms t;
  const Eigen::MatrixXd b_xi = model.mass_matrix(xi);
  t.inertia = jm.transpose() * b_xi * jm;
  t.inertia = 0.5 * (t.inertia + t.inertia.transpose());
  if (dq.isZero(0.0)) {
    t.coriolis = Eigen::VectorXd::Zero(q.size());
  } else {
    t.coriolis = jm.transpose() * model.inverse_dynamics(
                                      xi, jm * dq, velocity_acceleration(layout, q, dq, projection), false);
  }
  t.gravity = jm.transpose() * model.inverse_dynamics(xi, zero, zero, true);
  return t;
}

StiffnessDamping stiffness_damping(const ArmConfig& config) {
  const ArmLayout layout(config);
  StiffnessDamping sd;
  sd.stiffness = Eigen::VectorXd::Zero(layout.n_free());
  sd.damping = Eigen::VectorXd::Zero(layout.n_free());
  for (const auto& e : layout.elements()) {
    if (e.free_offset < 0) continue;
    const auto& mat = config.segments[static_cast<std::size_t>(e.segment)].material;
    const double i_over_l = e.section.second_moment / e.length;
    sd.stiffness.segment<2>(e.free_offset).setConstant(4.0 * mat.mu * i_over_l);
    sd.damping.segment<2>(e.free_offset).setConstant(mat.rho * i_over_l);
  }
  return sd;
}

Eigen::MatrixXd actuation_matrix(const ArmConfig& config) {
  const ArmLayout layout(config);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(layout.n_free(), 3 * config.n_segments);
  for (const auto& e : layout.elements()) {
    if (e.free_offset < 0) continue;
    const auto& seg = config.segments[static_cast<std::size_t>(e.segment)];
    // The bending moment is constant along a segment: every element gets all of it.
    const double arm = e.section.chamber_area * e.section.chamber_offset;
    for (int j = 0; j < 3; ++j) {
      const double ang = seg.chamber_angles[static_cast<std::size_t>(j)];
      a(e.free_offset, 3 * e.segment + j) = arm * std::cos(ang);
      a(e.free_offset + 1, 3 * e.segment + j) = arm * std::sin(ang);
    }
  }
  return a;
}

ArmSystem make_system(const ArmConfig& config, CoriolisProjection coriolis) {
  validate(config);
  ArmSystem sys;
  sys.coriolis = coriolis;
  sys.config = config;
  sys.model = build_rigid_model(config);
  const StiffnessDamping sd = stiffness_damping(config);
  sys.stiffness = sd.stiffness;
  sys.damping = sd.damping;
  sys.actuation = actuation_matrix(config);
  return sys;
}

DynamicsTerms dynamics_terms(const ArmSystem& system, const Eigen::VectorXd& q,
                             const Eigen::VectorXd& dq) {
  KineticTerms k = kinetic_terms(system.model, q, dq, system.coriolis);
  DynamicsTerms t;
  t.inertia = std::move(k.inertia);
  t.coriolis = std::move(k.coriolis);
  t.gravity = std::move(k.gravity);
  t.stiffness = system.stiffness.asDiagonal();
  t.damping = system.damping.asDiagonal();
  t.actuation = system.actuation;
  t.tip_jacobian = tip_jacobian(system.layout(), q);
  return t;
}

namespace {

void check_pressures(const ArmSystem& system, const Eigen::VectorXd& p) {
  if (p.size() != system.n_pressures())
    throw std::invalid_argument("pressure vector has " + std::to_string(p.size()) +
                                " entries, expected " + std::to_string(system.n_pressures()));
}

}  // namespace

Eigen::VectorXd forward_dynamics(const ArmSystem& system, const Eigen::VectorXd& q,
                                 const Eigen::VectorXd& dq, const Eigen::VectorXd& pressures,
                                 const Eigen::Vector3d& tip_force) {
  check_pressures(system, pressures);
  const ArmLayout& layout = system.layout();
  const Eigen::VectorXd xi = arm_joint_map(layout, q);
  const Eigen::MatrixXd jm = jacobian_m(layout, q);

  Eigen::MatrixXd b = jm.transpose() * system.model.mass_matrix(xi) * jm;
  Eigen::VectorXd rhs = system.actuation * pressures - system.stiffness.cwiseProduct(q) -
                        system.damping.cwiseProduct(dq);
  // c and g share one inverse-dynamics pass: with acceleration dJm/dt dq the
  // gravity-on pass at velocity Jm dq returns c_xi + B_xi dJm/dt dq + g_xi.
  rhs -= jm.transpose() * system.model.inverse_dynamics(
                              xi, jm * dq, velocity_acceleration(layout, q, dq, system.coriolis), true);
  if (!tip_force.isZero(0.0)) rhs += tip_jacobian(layout, xi, jm).transpose() * tip_force;

  const Eigen::LLT<Eigen::MatrixXd> llt(b.selfadjointView<Eigen::Lower>());
  if (llt.info() != Eigen::Success) throw NumericalError("inertia matrix is not positive definite");
  if (llt.rcond() < 1e-12) throw NumericalError("inertia matrix is numerically singular");
  return llt.solve(rhs);
}

Eigen::VectorXd static_residual(const ArmSystem& system, const Eigen::VectorXd& q,
                                const Eigen::VectorXd& pressures,
                                const Eigen::Vector3d& tip_force) {
  check_pressures(system, pressures);
  const ArmLayout& layout = system.layout();
  const Eigen::VectorXd xi = arm_joint_map(layout, q);
  const Eigen::MatrixXd jm = jacobian_m(layout, q);
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(xi.size());
  Eigen::VectorXd r = system.actuation * pressures - system.stiffness.cwiseProduct(q) -
                      jm.transpose() * system.model.inverse_dynamics(xi, zero, zero, true);
  if (!tip_force.isZero(0.0)) r += tip_jacobian(layout, xi, jm).transpose() * tip_force;
  return r;
}

Eigen::VectorXd static_equilibrium(const ArmSystem& system, const Eigen::VectorXd& pressures,
                                   const Eigen::Vector3d& tip_force,
                                   const std::optional<Eigen::VectorXd>& initial) {
  const int n = system.n_free();
  Eigen::VectorXd q = initial ? *initial : Eigen::VectorXd::Zero(n);
  const double scale = std::max(1e-12, system.stiffness.maxCoeff());
  constexpr double kTol = 1e-13;
  constexpr double kStep = 1e-7;
  constexpr double kMaxStep = 0.2;

  Eigen::VectorXd r = static_residual(system, q, pressures, tip_force);
  for (int iter = 0; iter < 200; ++iter) {
    if (r.norm() <= kTol * scale) return q;
    Eigen::MatrixXd jac(n, n);
    for (int i = 0; i < n; ++i) {
      Eigen::VectorXd qp = q, qm = q;
      qp[i] += kStep;
      qm[i] -= kStep;
      jac.col(i) = (static_residual(system, qp, pressures, tip_force) -
                    static_residual(system, qm, pressures, tip_force)) /
                   (2.0 * kStep);
    }
    Eigen::VectorXd step = jac.fullPivLu().solve(-r);
    if (!step.allFinite()) throw NumericalError("static equilibrium: singular Newton system");
    const double norm = step.lpNorm<Eigen::Infinity>();
    if (norm > kMaxStep) step *= kMaxStep / norm;

    double alpha = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 30; ++ls) {
      const Eigen::VectorXd trial = q + alpha * step;
      try {
        const Eigen::VectorXd rt = static_residual(system, trial, pressures, tip_force);
        if (rt.norm() < r.norm() || rt.norm() <= kTol * scale) {
          q = trial;
          r = rt;
          accepted = true;
          break;
        }
      } catch (const KinematicsError&) {
        // trial left the valid pose range; shrink
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      if (r.norm() <= 1e-9 * scale) return q;
      throw NumericalError("static equilibrium: line search stalled");
    }
  }
  if (r.norm() <= 1e-9 * scale) return q;
  throw NumericalError("static equilibrium: Newton iteration did not converge");
}

double elastic_kinetic_energy(const ArmSystem& system, const Eigen::VectorXd& q,
                              const Eigen::VectorXd& dq) {
  const ArmLayout& layout = system.layout();
  const Eigen::MatrixXd jm = jacobian_m(layout, q);
  const Eigen::VectorXd dxi = jm * dq;
  const double kinetic = 0.5 * dxi.dot(system.model.mass_matrix(arm_joint_map(layout, q)) * dxi);
  return kinetic + 0.5 * q.dot(system.stiffness.cwiseProduct(q));
}

double gravity_potential(const RigidModel& model, const Eigen::VectorXd& q) {
  const auto pos = model.body_positions(arm_joint_map(model.layout(), q));
  double u = 0.0;
  for (std::size_t k = 0; k < pos.size(); ++k) u -= model.bodies()[k].mass * model.gravity().dot(pos[k]);
  return u;
}

}  // namespace pccarm
