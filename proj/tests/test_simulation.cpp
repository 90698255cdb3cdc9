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

#include <cmath>
#include <numbers>

#include "pccarm/simulation.hpp"
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

PressureProfile zero_profile(int n_segments) {
  return PressureProfile::sampled({0.0}, {Eigen::VectorXd::Zero(3 * n_segments)});
}

}  // namespace

TEST_SUITE("simulation") {

TEST_CASE("equilibrium is a fixed point of the step") {
  const ArmSystem sys = make_system(config_with(3));
  const ArmState s{Eigen::VectorXd::Zero(12), Eigen::VectorXd::Zero(12)};
  const ArmState next = step(sys, s, Eigen::VectorXd::Zero(6), Eigen::Vector3d::Zero(), 2e-5);
  CHECK(next.q.cwiseAbs().maxCoeff() < 1e-15);
  CHECK(next.dq.cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("constant acceleration is integrated exactly") {
  const Eigen::Vector3d a(1.5, -2.0, 0.25);
  const auto accel = [&](const Eigen::VectorXd&, const Eigen::VectorXd&) -> Eigen::VectorXd { return a; };
  const ArmState s{Eigen::Vector3d(0.1, 0.2, -0.3), Eigen::Vector3d(1.0, -1.0, 0.5)};
  const double dt = 1e-3;
  const ArmState n = euler_richardson_step(s, dt, accel);
  const Eigen::VectorXd q_expect = s.q + s.dq * dt + 0.5 * a * dt * dt;
  const Eigen::VectorXd dq_expect = s.dq + a * dt;
  CHECK((n.q - q_expect).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((n.dq - dq_expect).cwiseAbs().maxCoeff() < 1e-15);
  CHECK_THROWS_AS(euler_richardson_step(s, 0.0, accel), std::invalid_argument);
}

TEST_CASE("harmonic oscillator over one period") {
  const double omega = 30.0;
  const auto accel = [&](const Eigen::VectorXd& q, const Eigen::VectorXd&) -> Eigen::VectorXd {
    return -omega * omega * q;
  };
  const int steps = 5000;
  const double dt = 2 * kPi / omega / steps;
  ArmState s{Eigen::VectorXd::Constant(1, 0.1), Eigen::VectorXd::Zero(1)};
  auto energy = [&](const ArmState& x) { return 0.5 * x.dq[0] * x.dq[0] + 0.5 * omega * omega * x.q[0] * x.q[0]; };
  const double e0 = energy(s);
  for (int k = 0; k < steps; ++k) s = euler_richardson_step(s, dt, accel);
  CHECK(rel_err(energy(s), e0) < 1e-3);
  CHECK(std::abs(s.q[0] - 0.1) < 1e-5);
}

TEST_CASE("straight hanging arm holds still") {
  const ArmSystem sys = make_system(config_with(3));
  SimulationOptions opt;
  opt.duration = 1.0;
  opt.record_interval = 0.1;
  const Trajectory traj = simulate(sys, zero_profile(2), opt);
  const auto start = traj.segment_tips.front();
  for (const auto& tips : traj.segment_tips)
    for (std::size_t s = 0; s < tips.size(); ++s) CHECK((tips[s] - start[s]).norm() < 1e-6);
}

TEST_CASE("sample count and table layout") {
  const ArmSystem sys = make_system(config_with(1));
  SimulationOptions opt;
  opt.duration = 0.05;
  opt.dt = 1e-4;
  const Trajectory a = simulate(sys, builtin_profile("step", 2), opt);
  CHECK(a.size() == 6);
  opt.duration = 0.055;
  CHECK(simulate(sys, builtin_profile("step", 2), opt).size() == 6);
  const CsvTable t = trajectory_table(a);
  CHECK(t.header.size() == 1 + 4 + 4 + 6 + 6);
  CHECK(t.header[9] == "tip_seg1_x");
  CHECK(t.header.back() == "p_5");
  CHECK(t.rows.size() == 6);

  opt.dt = 0.0;
  CHECK_THROWS_AS(simulate(sys, builtin_profile("step", 2), opt), std::invalid_argument);
  opt.dt = 0.02;
  CHECK_THROWS_AS(simulate(sys, builtin_profile("step", 2), opt), std::invalid_argument);
  opt.dt = 1e-4;
  CHECK_THROWS_AS(simulate(sys, builtin_profile("step", 1), opt), std::invalid_argument);
}

TEST_CASE("halving the step changes the final state by less than 1e-6") {
  const ArmSystem sys = make_system(config_with(2));
  SimulationOptions opt;
  opt.duration = 0.2;
  opt.record_interval = 0.1;
  const Trajectory a = simulate(sys, builtin_profile("hold", 2), opt);
  opt.dt = 1e-5;
  const Trajectory b = simulate(sys, builtin_profile("hold", 2), opt);
  CHECK((a.q.back() - b.q.back()).norm() < 1e-6 * b.q.back().norm());
}

TEST_CASE("conservative free response keeps its energy") {
  ArmConfig c = config_with(2);
  c.gravity.setZero();
  for (auto& s : c.segments) s.material.rho = 0.0;
  const ArmSystem sys = make_system(c);
  Rng rng(41);
  SimulationOptions opt;
  opt.duration = 0.2;
  opt.record_interval = 0.01;
  opt.initial = ArmState{random_pose(sys.layout(), rng, 0.5), Eigen::VectorXd::Zero(sys.n_free())};
  const Trajectory traj = simulate(sys, zero_profile(2), opt);
  const double e0 = elastic_kinetic_energy(sys, traj.q.front(), traj.dq.front());
  double worst = 0.0;
  for (std::size_t k = 0; k < traj.size(); ++k)
    worst = std::max(worst, rel_err(elastic_kinetic_energy(sys, traj.q[k], traj.dq[k]), e0));
  CHECK(worst < 1e-3);
}

TEST_CASE("damped free response never gains energy") {
  ArmConfig c = config_with(2);
  c.gravity.setZero();
  const ArmSystem sys = make_system(c);
  Rng rng(42);
  SimulationOptions opt;
  opt.duration = 0.5;
  opt.record_interval = 0.005;
  opt.initial = ArmState{random_pose(sys.layout(), rng, 0.5), random_vector(sys.n_free(), rng, 1.0)};
  const Trajectory traj = simulate(sys, zero_profile(2), opt);
  double prev = elastic_kinetic_energy(sys, traj.q.front(), traj.dq.front());
  for (std::size_t k = 1; k < traj.size(); ++k) {
    const double e = elastic_kinetic_energy(sys, traj.q[k], traj.dq[k]);
    CHECK(e <= prev);
    prev = e;
  }
}

TEST_CASE("perturbations decay below the stability limit and grow above it") {
  const ArmSystem sys = make_system(config_with(3));
  const double limit = stable_step_limit(sys);
  CHECK(limit > 1e-5);
  CHECK(limit < 1e-4);
  Rng rng(41);
  const Eigen::VectorXd p = Eigen::VectorXd::Zero(sys.n_pressures());
  const ArmState start{random_vector(sys.n_free(), rng, 1e-7), Eigen::VectorXd::Zero(sys.n_free())};
  auto amplitude_after = [&](double dt) {
    ArmState s = start;
    for (int k = 0; k < 400; ++k) s = step(sys, s, p, Eigen::Vector3d::Zero(), dt);
    return s.q.norm() + dt * s.dq.norm();
  };
  const double initial = start.q.norm();
  CHECK(amplitude_after(0.8 * limit) < initial);
  CHECK(amplitude_after(1.2 * limit) > 1e3 * initial);

  // Without damping and gravity the modes are undamped; the limit stays finite and positive.
  ArmConfig c = config_with(2);
  c.gravity.setZero();
  for (auto& seg : c.segments) seg.material.rho = 0.0;
  const double undamped = stable_step_limit(make_system(c));
  CHECK(undamped > 0.0);
  CHECK(std::isfinite(undamped));
}

TEST_CASE("simulation is deterministic") {
  const ArmSystem sys = make_system(config_with(2));
  SimulationOptions opt;
  opt.duration = 0.1;
  opt.tip_force = ForceSchedule{{0.0, 0.05}, {Eigen::Vector3d(0.1, 0, 0), Eigen::Vector3d(0, -0.2, 0)}};
  const Trajectory a = simulate(sys, builtin_profile("sine-sweep", 2), opt);
  const Trajectory b = simulate(sys, builtin_profile("sine-sweep", 2), opt);
  REQUIRE(a.size() == b.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(a.q[k] == b.q[k]);
    CHECK(a.dq[k] == b.dq[k]);
  }
}

TEST_CASE("force schedule is piecewise constant") {
  const ForceSchedule f{{0.0, 1.0}, {Eigen::Vector3d(1, 0, 0), Eigen::Vector3d(0, 2, 0)}};
  CHECK(f.at(0.5) == Eigen::Vector3d(1, 0, 0));
  CHECK(f.at(1.0) == Eigen::Vector3d(0, 2, 0));
  CHECK(ForceSchedule::constant(Eigen::Vector3d(0, 0, -1)).at(7.0) == Eigen::Vector3d(0, 0, -1));
}

TEST_CASE("tip error") {
  const ArmSystem sys = make_system(config_with(1));
  SimulationOptions opt;
  opt.duration = 0.05;
  opt.dt = 1e-4;
  const Trajectory a = simulate(sys, builtin_profile("hold", 2), opt);
  const TipError same = tip_error(a, a);
  CHECK(same.mean_all == 0.0);
  for (const auto& row : same.per_sample)
    for (double e : row) CHECK(e == 0.0);

  Trajectory shifted = a;
  for (auto& tips : shifted.segment_tips)
    for (auto& p : tips) p += Eigen::Vector3d(0.01, 0, 0);
  const TipError off = tip_error(a, shifted);
  for (const auto& row : off.per_sample)
    for (double e : row) CHECK(e == doctest::Approx(0.01).epsilon(1e-12));
  CHECK(off.mean_all == doctest::Approx(0.01));

  CHECK_THROWS_AS(tip_error(Trajectory{}, a), std::invalid_argument);
}

TEST_CASE("pressure profile validation") {
  const Eigen::VectorXd p = Eigen::VectorXd::Constant(3, 1e5);
  CHECK_THROWS_AS(PressureProfile::sampled({0.0, 0.0}, {p, p}), std::invalid_argument);
  CHECK_THROWS_AS(PressureProfile::sampled({0.0}, {Eigen::VectorXd::Constant(3, 2.5e5)}), std::invalid_argument);
  CHECK_THROWS_AS(PressureProfile::sampled({0.0}, {Eigen::VectorXd::Constant(3, -1.0)}), std::invalid_argument);
  CHECK_THROWS_AS(PressureProfile::sinusoids({{0.5e5, 1e5, 1.0, 0.0}}), std::invalid_argument);
  CHECK_THROWS_AS(builtin_profile("nope", 2), std::invalid_argument);

  const PressureProfile lin = PressureProfile::sampled({0.0, 1.0}, {Eigen::VectorXd::Zero(3), p});
  CHECK(lin.at(0.25)[1] == doctest::Approx(0.25e5));
  CHECK(lin.at(-1.0).isZero());
  CHECK(lin.at(5.0) == p);
  for (const char* name : {"sine-sweep", "step", "hold", "swing"}) {
    const PressureProfile b = builtin_profile(name, 2);
    CHECK(b.n_channels() == 6);
    for (double t = 0.0; t <= 3.0; t += 0.01) {
      const Eigen::VectorXd v = b.at(t);
      CHECK(v.minCoeff() >= 0.0);
      CHECK(v.maxCoeff() <= kMaxPressure);
    }
  }
}

TEST_CASE("three-second sine sweep moves the lower tip by tens of centimetres") {
  const ArmSystem sys = make_system(config_with(3));
  SimulationOptions opt;
  const Trajectory traj = simulate(sys, builtin_profile("sine-sweep", 2), opt);
  CHECK(traj.size() == 301);
  Eigen::Vector3d lo = traj.segment_tips.front()[1], hi = lo;
  for (const auto& tips : traj.segment_tips) {
    CHECK(tips[1].allFinite());
    lo = lo.cwiseMin(tips[1]);
    hi = hi.cwiseMax(tips[1]);
  }
  const double excursion = (hi - lo).head<2>().maxCoeff();
  CHECK(excursion > 0.1);
  CHECK(excursion < 1.0);
}

}  // TEST_SUITE
