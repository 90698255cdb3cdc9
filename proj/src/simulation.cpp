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

#include "pccarm/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

namespace pccarm {

namespace {

constexpr double kPi = std::numbers::pi;

// Back-and-forth bending moment shape on [0, 1]: zero value and slope at both ends.
double swing_shape(double s) {
  if (s <= 0.0 || s >= 1.0) return 0.0;
  return s * s * (1.0 - s) * (1.0 - s) * (1.0 - 2.0 * s);
}

double swing_shape_peak() {
  double peak = 0.0;
  for (int i = 0; i <= 100000; ++i) peak = std::max(peak, swing_shape(i / 100000.0));
  return peak;
}

}  // namespace

PressureProfile PressureProfile::sampled(std::vector<double> times, std::vector<Eigen::VectorXd> rows) {
  if (times.empty() || times.size() != rows.size())
    throw std::invalid_argument("pressure profile: need one row per time stamp");
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1]))
      throw std::invalid_argument("pressure profile: time stamps must be strictly increasing");
  }
  for (const auto& r : rows) {
    if (r.size() != rows.front().size() || r.size() == 0)
      throw std::invalid_argument("pressure profile: inconsistent channel count");
    if (!r.allFinite() || r.minCoeff() < 0.0 || r.maxCoeff() > kMaxPressure)
      throw std::invalid_argument("pressure profile: pressures must lie in [0, 2e5] Pa");
  }
  PressureProfile p;
  p.times_ = std::move(times);
  p.rows_ = std::move(rows);
  return p;
}

PressureProfile PressureProfile::sinusoids(std::vector<Sinusoid> channels) {
  if (channels.empty()) throw std::invalid_argument("pressure profile: no channels");
  for (const auto& c : channels) {
    if (!(c.offset - std::abs(c.amplitude) >= 0.0) || !(c.offset + std::abs(c.amplitude) <= kMaxPressure))
      throw std::invalid_argument("pressure profile: sinusoid leaves [0, 2e5] Pa");
    if (!std::isfinite(c.frequency) || !std::isfinite(c.phase))
      throw std::invalid_argument("pressure profile: non-finite sinusoid parameter");
  }
  PressureProfile p;
  p.sines_ = std::move(channels);
  return p;
}

int PressureProfile::n_channels() const {
  return sines_.empty() ? static_cast<int>(rows_.front().size()) : static_cast<int>(sines_.size());
}

Eigen::VectorXd PressureProfile::at(double t) const {
  if (!sines_.empty()) {
    Eigen::VectorXd p(static_cast<Eigen::Index>(sines_.size()));
    for (std::size_t i = 0; i < sines_.size(); ++i) {
      const auto& c = sines_[i];
      p[static_cast<Eigen::Index>(i)] = c.offset + c.amplitude * std::sin(2.0 * kPi * c.frequency * t + c.phase);
    }
    return p;
  }
  if (t <= times_.front()) return rows_.front();
  if (t >= times_.back()) return rows_.back();
  const auto it = std::upper_bound(times_.begin(), times_.end(), t);
  const auto hi = static_cast<std::size_t>(it - times_.begin());
  const std::size_t lo = hi - 1;
  const double w = (t - times_[lo]) / (times_[hi] - times_[lo]);
  return (1.0 - w) * rows_[lo] + w * rows_[hi];
}

PressureProfile builtin_profile(const std::string& name, int n_segments) {
  const int n = 3 * n_segments;
  if (name == "sine-sweep") {
    // Rotating bend: each segment's chambers run 120 degrees out of phase, 3 s cycle.
    std::vector<PressureProfile::Sinusoid> ch;
    for (int s = 0; s < n_segments; ++s)
      for (int j = 0; j < 3; ++j) ch.push_back({0.9e5, 0.9e5, 1.0 / 3.0, -2.0 * kPi * j / 3.0});
    return PressureProfile::sinusoids(std::move(ch));
  }
  if (name == "step") {
    // chamber 0 of every segment steps to 1 bar over 10 ms at t = 0.2 s
    Eigen::VectorXd off = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd on = off;
    for (int s = 0; s < n_segments; ++s) on[3 * s] = 1e5;
    return PressureProfile::sampled({0.0, 0.2, 0.21}, {off, off, on});
  }
  if (name == "hold") {
    // constant 1 bar in chamber 0 of every segment; the arm bends and sags under gravity
    Eigen::VectorXd on = Eigen::VectorXd::Zero(n);
    for (int s = 0; s < n_segments; ++s) on[3 * s] = 1e5;
    return PressureProfile::sampled({0.0}, {on});
  }
  if (name == "swing") {
    // One 3 s back-and-forth swing in the chamber-1/chamber-2 plane around a 0.75 bar base.
    constexpr double kBase = 0.75e5;
    constexpr double kCycle = 3.0;
    constexpr double kStep = 1e-3;
    const double peak = swing_shape_peak();
    std::vector<double> times;
    std::vector<Eigen::VectorXd> rows;
    const int count = static_cast<int>(std::lround(kCycle / kStep));
    for (int i = 0; i <= count; ++i) {
      const double t = i * kStep;
      const double m = kBase * swing_shape(t / kCycle) / peak;
      Eigen::VectorXd p(n);
      for (int s = 0; s < n_segments; ++s) {
        p[3 * s] = kBase;
        p[3 * s + 1] = kBase - m;
        p[3 * s + 2] = kBase + m;
      }
      times.push_back(t);
      rows.push_back(p);
    }
    return PressureProfile::sampled(std::move(times), std::move(rows));
  }
  throw std::invalid_argument("unknown builtin profile '" + name + "'");
}

PressureProfile load_profile_csv(const std::filesystem::path& path) {
  const CsvTable t = read_csv_file(path);
  const std::size_t tc = t.column("t");
  std::vector<double> times;
  std::vector<Eigen::VectorXd> rows;
  std::vector<std::size_t> cols;
  for (int j = 0;; ++j) {
    const auto it = std::find(t.header.begin(), t.header.end(), "p_" + std::to_string(j));
    if (it == t.header.end()) break;
    cols.push_back(static_cast<std::size_t>(it - t.header.begin()));
  }
  if (cols.empty()) throw std::invalid_argument("pressure CSV has no p_0 column");
  for (const auto& r : t.rows) {
    times.push_back(r[tc]);
    Eigen::VectorXd p(static_cast<Eigen::Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j) p[static_cast<Eigen::Index>(j)] = r[cols[j]];
    rows.push_back(p);
  }
  return PressureProfile::sampled(std::move(times), std::move(rows));
}

Eigen::Vector3d ForceSchedule::at(double t) const {
  Eigen::Vector3d f = Eigen::Vector3d::Zero();
  for (std::size_t i = 0; i < start_times.size(); ++i) {
    if (t >= start_times[i]) f = forces[i];
  }
  return f;
}

ArmState euler_richardson_step(const ArmState& s, double dt, const AccelerationFn& accel) {
  if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");
  const Eigen::VectorXd a0 = accel(s.q, s.dq);
  const Eigen::VectorXd q_mid = s.q + 0.5 * dt * s.dq;
  const Eigen::VectorXd dq_mid = s.dq + 0.5 * dt * a0;
  const Eigen::VectorXd a_mid = accel(q_mid, dq_mid);
  return {s.q + dt * dq_mid, s.dq + dt * a_mid};
}

ArmState step(const ArmSystem& system, const ArmState& state, const Eigen::VectorXd& pressures,
              const Eigen::Vector3d& tip_force, double dt) {
  const auto accel = [&](const Eigen::VectorXd& q, const Eigen::VectorXd& dq) {
    return forward_dynamics(system, q, dq, pressures, tip_force);
  };
  ArmState next;
  try {
    next = euler_richardson_step(state, dt, accel);
  } catch (const KinematicsError& e) {
    throw NumericalError(std::string("simulation diverged: ") + e.what());
  }
  if (!next.q.allFinite() || !next.dq.allFinite()) throw NumericalError("simulation diverged: non-finite state");
  return next;
}

std::vector<Eigen::Vector3d> segment_tip_positions(const ArmLayout& layout, const Eigen::VectorXd& q) {
  const auto pts = fk_points(layout, q);
  std::vector<Eigen::Vector3d> tips;
  for (int s = 0; s < layout.n_segments(); ++s)
    tips.push_back(pts[static_cast<std::size_t>(layout.segment_end_element(s) + 1)]);
  return tips;
}

double stable_step_limit(const ArmSystem& system) {
  const int n = system.n_free();
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(n);
  const KineticTerms rest = kinetic_terms(system.model, zero, zero);

  // Gravity stiffness by central differences; g is smooth near the rest pose.
  constexpr double h = 1e-7;
  Eigen::MatrixXd stiffness = system.stiffness.asDiagonal();
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd plus = zero, minus = zero;
    plus[i] += h;
    minus[i] -= h;
    stiffness.col(i) += (kinetic_terms(system.model, plus, zero).gravity -
                         kinetic_terms(system.model, minus, zero).gravity) / (2.0 * h);
  }
  const Eigen::LLT<Eigen::MatrixXd> inertia(rest.inertia);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  a.topRightCorner(n, n).setIdentity();
  a.bottomLeftCorner(n, n) = -inertia.solve(stiffness);
  a.bottomRightCorner(n, n) = -inertia.solve(Eigen::MatrixXd(system.damping.asDiagonal()));
  const Eigen::VectorXcd eig = Eigen::EigenSolver<Eigen::MatrixXd>(a, false).eigenvalues();

  // Undamped modes sit on the imaginary axis where the scheme amplifies by
  // 1 + (w dt)^4 / 8 per step, so a small per-step growth is tolerated.
  constexpr double growth = 1e-6;
  const auto stable = [&](double dt) {
    for (const std::complex<double>& lambda : eig) {
      const std::complex<double> z = lambda * dt;
      if (std::abs(1.0 + z + 0.5 * z * z) > 1.0 + growth) return false;
    }
    return true;
  };
  double spectral_radius = 0.0;
  for (const auto& lambda : eig) spectral_radius = std::max(spectral_radius, std::abs(lambda));
  if (spectral_radius == 0.0) return std::numeric_limits<double>::infinity();
  // No point of the region lies farther than |z| = 2 from the origin.
  double lo = 0.0, hi = 2.0 / spectral_radius;
  if (stable(hi)) return hi;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (stable(mid) ? lo : hi) = mid;
  }
  return lo;
}

Trajectory simulate(const ArmSystem& system, const PressureProfile& profile,
                    const SimulationOptions& opt) {
  if (!(opt.duration > 0.0)) throw std::invalid_argument("duration must be positive");
  if (!(opt.dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (!(opt.record_interval >= opt.dt)) throw std::invalid_argument("record interval must be at least dt");
  if (profile.n_channels() != system.n_pressures())
    throw std::invalid_argument("profile has " + std::to_string(profile.n_channels()) +
                                " channels, arm has " + std::to_string(system.n_pressures()) + " chambers");

  const int n = system.n_free();
  ArmState state = opt.initial ? *opt.initial
                               : ArmState{Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n)};
  if (state.q.size() != n || state.dq.size() != n) throw std::invalid_argument("initial state has the wrong size");

  const long long total_steps = std::llround(opt.duration / opt.dt);
  const long long record_every = std::max(1LL, std::llround(opt.record_interval / opt.dt));
  const long long samples = static_cast<long long>(std::floor(opt.duration / opt.record_interval + 1e-9)) + 1;

  Trajectory traj;
  auto record = [&](double t) {
    traj.times.push_back(t);
    traj.q.push_back(state.q);
    traj.dq.push_back(state.dq);
    traj.segment_tips.push_back(segment_tip_positions(system.layout(), state.q));
    traj.pressures.push_back(profile.at(t));
  };
  record(0.0);

  for (long long k = 1; k <= total_steps; ++k) {
    const double t_mid = (static_cast<double>(k) - 0.5) * opt.dt;
    const Eigen::Vector3d f = opt.tip_force ? opt.tip_force->at(t_mid) : Eigen::Vector3d::Zero();
    try {
      state = step(system, state, profile.at(t_mid), f, opt.dt);
    } catch (const NumericalError& e) {
      throw NumericalError(std::string(e.what()) + " at step " + std::to_string(k));
    }
    if (k % record_every == 0 && static_cast<long long>(traj.size()) < samples)
      record(static_cast<double>(k) * opt.dt);
  }
  return traj;
}

TipError tip_error(const Trajectory& model, const Trajectory& reference) {
  if (model.size() == 0 || reference.size() == 0) throw std::invalid_argument("tip error: empty trajectory");
  const std::size_t n_seg = model.segment_tips.front().size();
  if (reference.segment_tips.front().size() != n_seg)
    throw std::invalid_argument("tip error: trajectories track different segment counts");

  auto ref_at = [&](double t, std::size_t s) -> Eigen::Vector3d {
    const auto& ts = reference.times;
    if (t <= ts.front()) return reference.segment_tips.front()[s];
    if (t >= ts.back()) return reference.segment_tips.back()[s];
    const auto hi = static_cast<std::size_t>(std::upper_bound(ts.begin(), ts.end(), t) - ts.begin());
    const std::size_t lo = hi - 1;
    const double w = (t - ts[lo]) / (ts[hi] - ts[lo]);
    return (1.0 - w) * reference.segment_tips[lo][s] + w * reference.segment_tips[hi][s];
  };

  TipError err;
  err.mean.assign(n_seg, 0.0);
  for (std::size_t k = 0; k < model.size(); ++k) {
    std::vector<double> row(n_seg);
    for (std::size_t s = 0; s < n_seg; ++s) {
      row[s] = (ref_at(model.times[k], s) - model.segment_tips[k][s]).norm();
      err.mean[s] += row[s];
    }
    err.per_sample.push_back(std::move(row));
  }
  for (auto& m : err.mean) m /= static_cast<double>(model.size());
  for (double m : err.mean) err.mean_all += m;
  err.mean_all /= static_cast<double>(n_seg);
  return err;
}

CsvTable trajectory_table(const Trajectory& traj) {
  CsvTable t;
  if (traj.size() == 0) return t;
  const auto nq = traj.q.front().size();
  const auto np = traj.pressures.front().size();
  const std::size_t ns = traj.segment_tips.front().size();
  t.header.push_back("t");
  for (Eigen::Index i = 0; i < nq; ++i) t.header.push_back("q_" + std::to_string(i));
  for (Eigen::Index i = 0; i < nq; ++i) t.header.push_back("dq_" + std::to_string(i));
  for (std::size_t s = 0; s < ns; ++s)
    for (const char* ax : {"x", "y", "z"}) t.header.push_back("tip_seg" + std::to_string(s + 1) + "_" + ax);
  for (Eigen::Index i = 0; i < np; ++i) t.header.push_back("p_" + std::to_string(i));

  for (std::size_t k = 0; k < traj.size(); ++k) {
    std::vector<double> row;
    row.reserve(t.header.size());
    row.push_back(traj.times[k]);
    for (Eigen::Index i = 0; i < nq; ++i) row.push_back(traj.q[k][i]);
    for (Eigen::Index i = 0; i < nq; ++i) row.push_back(traj.dq[k][i]);
    for (std::size_t s = 0; s < ns; ++s)
      for (int a = 0; a < 3; ++a) row.push_back(traj.segment_tips[k][s][a]);
    for (Eigen::Index i = 0; i < np; ++i) row.push_back(traj.pressures[k][i]);
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace pccarm
