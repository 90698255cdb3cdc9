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

#include "pccarm/estimation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include <Eigen/LU>
#include <Eigen/QR>
#include <Eigen/SVD>

namespace pccarm {

SensorModel sensor_matrix(const ArmConfig& config) {
  validate(config);
  const ArmLayout layout(config);
  SensorModel out;
  out.n_segments = config.n_segments;
  out.n_pcc = config.n_pcc;
  out.matrix = Eigen::MatrixXd::Zero(2 * config.n_segments, layout.n_free());
  for (const auto& e : layout.elements()) {
    if (e.kind != ElementKind::kPcc) continue;
    out.matrix(2 * e.segment, e.free_offset) = 1.0;
    out.matrix(2 * e.segment + 1, e.free_offset + 1) = 1.0;
  }
  return out;
}

Eigen::VectorXd simulate_reading(const SensorModel& sensors, const Eigen::VectorXd& q,
                                 double noise_std, std::optional<std::uint64_t> seed) {
  if (q.size() != sensors.matrix.cols()) {
    throw std::invalid_argument("pose has " + std::to_string(q.size()) + " entries, expected " +
                                std::to_string(sensors.matrix.cols()));
  }
  Eigen::VectorXd s = sensors.matrix * q;
  if (noise_std > 0.0) {
    std::mt19937_64 rng(seed.value_or(0));
    std::normal_distribution<double> noise(0.0, noise_std);
    for (Eigen::Index i = 0; i < s.size(); ++i) s(i) += noise(rng);
  }
  return s;
}

Eigen::VectorXd seed_pose(const SensorModel& sensors, const Eigen::VectorXd& reading) {
  if (reading.size() != sensors.matrix.rows()) {
    throw std::invalid_argument("sensor reading has " + std::to_string(reading.size()) +
                                " entries, expected " + std::to_string(sensors.matrix.rows()));
  }
  if (!reading.allFinite()) throw std::invalid_argument("sensor reading is not finite");
  // Rows of S are orthogonal with N_pcc unit entries each, so S^+ = S^T / N_pcc.
  return sensors.matrix.transpose() * reading / static_cast<double>(sensors.n_pcc);
}

Eigen::VectorXd solve_constrained_least_squares(const Eigen::MatrixXd& m, const Eigen::VectorXd& b,
                                                const Eigen::VectorXd& reg, const Eigen::MatrixXd& c,
                                                const Eigen::VectorXd& d) {
  const Eigen::Index n = m.cols();
  const Eigen::Index k = c.rows();
  Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(n + k, n + k);
  kkt.topLeftCorner(n, n) = 2.0 * (m.transpose() * m);
  kkt.topLeftCorner(n, n).diagonal() += 2.0 * reg;
  kkt.topRightCorner(n, k) = c.transpose();
  kkt.bottomLeftCorner(k, n) = c;
  Eigen::VectorXd rhs(n + k);
  rhs << -2.0 * (m.transpose() * b), d;

  Eigen::FullPivLU<Eigen::MatrixXd> lu(kkt);
  if (!lu.isInvertible()) {
    throw NumericalError("KKT system is singular (rank " + std::to_string(lu.rank()) + " of " +
                         std::to_string(n + k) + ")");
  }
  const Eigen::VectorXd sol = lu.solve(rhs);
  if (!sol.allFinite()) throw NumericalError("KKT solve produced non-finite values");
  return sol.head(n);
}

namespace {

Eigen::VectorXd gravity_at(const ArmSystem& system, const Eigen::VectorXd& q) {
  return kinetic_terms(system.model, q, Eigen::VectorXd::Zero(q.size())).gravity;
}

void check_pressures(const ArmSystem& system, const Eigen::VectorXd& p) {
  if (p.size() != system.n_pressures()) {
    throw std::invalid_argument("pressure vector has " + std::to_string(p.size()) +
                                " entries, expected " + std::to_string(system.n_pressures()));
  }
  if (!p.allFinite()) throw std::invalid_argument("pressure vector is not finite");
}

constexpr double kRelinearizeTolerance = 1e-12;

}  // namespace

Eigen::VectorXd correct_pose(const ArmSystem& system, const Eigen::VectorXd& pressures,
                             const Eigen::VectorXd& reading, const EstimationOptions& options) {
  check_pressures(system, pressures);
  const SensorModel sensors = sensor_matrix(system.config);
  Eigen::VectorXd q_lin = seed_pose(sensors, reading);
  const Eigen::MatrixXd m = -Eigen::MatrixXd(system.stiffness.asDiagonal());
  const Eigen::VectorXd reg = Eigen::VectorXd::Zero(m.cols());
  const Eigen::VectorXd ap = system.actuation * pressures;

  Eigen::VectorXd q = q_lin;
  for (int pass = 0; pass <= options.relinearize_iterations; ++pass) {
    const Eigen::VectorXd b = ap - gravity_at(system, q_lin);
    q = solve_constrained_least_squares(m, b, reg, sensors.matrix, reading);
    if (pass > 0 && (q - q_lin).norm() < kRelinearizeTolerance) break;
    q_lin = q;
  }
  return q;
}

double pose_objective(const ArmSystem& system, const Eigen::VectorXd& pressures,
                      const Eigen::VectorXd& linearization_pose, const Eigen::VectorXd& q) {
  const Eigen::VectorXd r = system.actuation * pressures - gravity_at(system, linearization_pose) -
                            system.stiffness.cwiseProduct(q);
  return r.squaredNorm();
}

Eigen::VectorXd tare(const ArmSystem& system, const Eigen::VectorXd& pressures, const Eigen::VectorXd& q,
                     TareMode mode, const EstimationOptions& options) {
  check_pressures(system, pressures);
  check_pose(system.layout(), q);
  if (mode == TareMode::kLiteral) return -system.actuation * pressures + gravity_at(system, q);
  Eigen::VectorXd q_lin = q;
  if (options.relinearize_iterations == 0) {
    const SensorModel sensors = sensor_matrix(system.config);
    q_lin = seed_pose(sensors, sensors.matrix * q);
  }
  return -(system.actuation * pressures - gravity_at(system, q_lin) - system.stiffness.cwiseProduct(q));
}

ForceEstimate estimate_force(const ArmSystem& system, const Eigen::VectorXd& pressures,
                             const Eigen::VectorXd& reading, const Eigen::VectorXd& tare_offset,
                             double regularization, const EstimationOptions& options) {
  check_pressures(system, pressures);
  if (!(regularization >= 0.0) || !std::isfinite(regularization)) {
    throw std::invalid_argument("regularization weight must be finite and non-negative");
  }
  const int n = system.n_free();
  if (tare_offset.size() != n) {
    throw std::invalid_argument("tare offset has " + std::to_string(tare_offset.size()) +
                                " entries, expected " + std::to_string(n));
  }
  const SensorModel sensors = sensor_matrix(system.config);
  Eigen::VectorXd q_lin = seed_pose(sensors, reading);
  const Eigen::VectorXd ap = system.actuation * pressures;

  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(sensors.matrix.rows(), n + 3);
  c.leftCols(n) = sensors.matrix;
  Eigen::VectorXd reg = Eigen::VectorXd::Zero(n + 3);
  reg.tail<3>().setConstant(regularization);

  ForceEstimate out;
  out.q = q_lin;
  for (int pass = 0; pass <= options.relinearize_iterations; ++pass) {
    Eigen::MatrixXd m(n, n + 3);
    m.leftCols(n) = -Eigen::MatrixXd(system.stiffness.asDiagonal());
    m.rightCols(3) = tip_jacobian(system.layout(), q_lin).transpose();
    const Eigen::VectorXd b = ap - gravity_at(system, q_lin) + tare_offset;
    const Eigen::VectorXd x = solve_constrained_least_squares(m, b, reg, c, reading);
    const bool converged = pass > 0 && (x.head(n) - q_lin).norm() < kRelinearizeTolerance;
    out.q = x.head(n);
    out.force = x.tail<3>();
    if (converged) break;
    q_lin = out.q;
  }
  return out;
}

Polynomial::Polynomial(Eigen::VectorXd coeffs, double center, double half_span)
    : coeffs_(std::move(coeffs)), center_(center), half_span_(half_span) {}

double Polynomial::value(double t) const {
  const double u = (t - center_) / half_span_;
  double acc = 0.0;
  for (Eigen::Index k = coeffs_.size() - 1; k >= 0; --k) acc = acc * u + coeffs_(k);
  return acc;
}

double Polynomial::derivative(double t) const {
  const double u = (t - center_) / half_span_;
  double acc = 0.0;
  for (Eigen::Index k = coeffs_.size() - 1; k >= 1; --k) acc = acc * u + static_cast<double>(k) * coeffs_(k);
  return acc / half_span_;
}

double Polynomial::second_derivative(double t) const {
  const double u = (t - center_) / half_span_;
  double acc = 0.0;
  for (Eigen::Index k = coeffs_.size() - 1; k >= 2; --k) {
    acc = acc * u + static_cast<double>(k * (k - 1)) * coeffs_(k);
  }
  return acc / (half_span_ * half_span_);
}

Polynomial fit_polynomial(std::span<const double> t, std::span<const double> y, int degree) {
  if (degree < 0) throw std::invalid_argument("polynomial degree must be non-negative");
  if (t.size() != y.size()) throw std::invalid_argument("time and value series differ in length");
  if (t.size() < static_cast<std::size_t>(degree) + 1) {
    throw std::invalid_argument("need at least " + std::to_string(degree + 1) + " samples for a degree-" +
                                std::to_string(degree) + " fit");
  }
  const auto [lo, hi] = std::minmax_element(t.begin(), t.end());
  const double center = 0.5 * (*lo + *hi);
  const double half_span = *hi > *lo ? 0.5 * (*hi - *lo) : 1.0;

  const auto rows = static_cast<Eigen::Index>(t.size());
  Eigen::MatrixXd v(rows, degree + 1);
  Eigen::VectorXd rhs(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const double u = (t[static_cast<std::size_t>(i)] - center) / half_span;
    double pw = 1.0;
    for (int k = 0; k <= degree; ++k, pw *= u) v(i, k) = pw;
    rhs(i) = y[static_cast<std::size_t>(i)];
  }
  return {v.colPivHouseholderQr().solve(rhs), center, half_span};
}

MaterialFit fit_material(const Eigen::VectorXd& i_over_l, std::span<const Eigen::VectorXd> q,
                         std::span<const Eigen::VectorXd> dq, std::span<const Eigen::VectorXd> f_known) {
  if (q.size() != dq.size() || q.size() != f_known.size()) {
    throw std::invalid_argument("fit_material: sample series differ in length");
  }
  if (q.empty()) throw std::invalid_argument("fit_material: no samples");
  const Eigen::Index n = i_over_l.size();
  const auto count = static_cast<Eigen::Index>(q.size());
  Eigen::MatrixXd stack(n * count, 2);
  Eigen::VectorXd rhs(n * count);
  for (Eigen::Index k = 0; k < count; ++k) {
    const auto ks = static_cast<std::size_t>(k);
    stack.block(k * n, 0, n, 1) = 4.0 * i_over_l.cwiseProduct(q[ks]);
    stack.block(k * n, 1, n, 1) = i_over_l.cwiseProduct(dq[ks]);
    rhs.segment(k * n, n) = f_known[ks];
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(stack, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd sv = svd.singularValues();
  if (!(sv(0) > 0.0) || sv(1) <= 1e-8 * sv(0)) {
    const bool moving = stack.col(1).norm() > 1e-8 * stack.col(0).norm();
    throw IdentifiabilityError(moving ? "characterization data cannot identify mu and rho (rank-deficient stack)"
                                      : "characterization data has no motion, so rho is not identifiable");
  }
  const Eigen::Vector2d x = svd.solve(rhs);
  MaterialFit fit;
  fit.params = {x(0), x(1)};
  fit.residual_norm = (stack * x - rhs).norm();
  if (!(fit.params.mu > 0.0)) {
    throw NumericalError("fitted mu = " + std::to_string(fit.params.mu) +
                         " Pa is not positive; the data do not match the model");
  }
  return fit;
}

ArmConfig isolate_segment(const ArmConfig& config, int segment) {
  validate(config);
  if (segment < 0 || segment >= config.n_segments) {
    throw std::out_of_range("segment " + std::to_string(segment) + " out of range");
  }
  ArmConfig sub;
  sub.n_segments = 1;
  sub.n_pcc = 1;
  sub.segments = {config.segments[static_cast<std::size_t>(segment)]};
  sub.connectors = {config.connectors[static_cast<std::size_t>(segment)]};
  sub.gravity = config.gravity;
  return sub;
}

namespace {

// Index ranges [begin, end) of consecutive windows. Short trailing windows merge backwards.
std::vector<std::pair<std::size_t, std::size_t>> split_windows(std::span<const CharacterizationSample> samples,
                                                               double window, std::size_t min_size) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  if (window <= 0.0) {
    out.emplace_back(0, samples.size());
    return out;
  }
  const double t0 = samples.front().t;
  std::size_t begin = 0;
  for (std::size_t i = 1; i <= samples.size(); ++i) {
    const bool boundary = i == samples.size() ||
                          std::floor((samples[i].t - t0) / window) != std::floor((samples[begin].t - t0) / window);
    if (!boundary) continue;
    if (!out.empty() && i - begin < min_size) {
      out.back().second = i;
    } else {
      out.emplace_back(begin, i);
    }
    begin = i;
  }
  if (out.front().second - out.front().first < min_size && out.size() > 1) {
    out[1].first = out.front().first;
    out.erase(out.begin());
  }
  return out;
}

}  // namespace

MaterialFit characterize(const ArmConfig& config, int segment, std::span<const CharacterizationSample> samples,
                         const CharacterizationOptions& options) {
  if (samples.empty()) throw std::invalid_argument("characterization dataset is empty");
  const auto min_size = static_cast<std::size_t>(options.degree) + 1;
  if (samples.size() < std::max<std::size_t>(2, min_size)) {
    throw std::invalid_argument("characterization needs at least " + std::to_string(std::max<std::size_t>(2, min_size)) +
                                " samples, got " + std::to_string(samples.size()));
  }
  for (std::size_t i = 1; i < samples.size(); ++i) {
    if (!(samples[i].t > samples[i - 1].t)) {
      throw std::invalid_argument("characterization sample times must be strictly increasing (row " +
                                  std::to_string(i) + ")");
    }
  }

  const ArmSystem system = make_system(isolate_segment(config, segment));
  const ElementProps props = element_props(system.config, 0, 0);
  const Eigen::VectorXd i_over_l = Eigen::VectorXd::Constant(2, props.section.second_moment / props.length);

  std::vector<Eigen::VectorXd> qs, dqs, fs;
  qs.reserve(samples.size());
  for (const auto& [begin, end] : split_windows(samples, options.window, min_size)) {
    std::vector<double> t, qx, qy;
    for (std::size_t i = begin; i < end; ++i) {
      t.push_back(samples[i].t);
      qx.push_back(samples[i].q.x());
      qy.push_back(samples[i].q.y());
    }
    const Polynomial px = fit_polynomial(t, qx, options.degree);
    const Polynomial py = fit_polynomial(t, qy, options.degree);
    const double lo = t.front() + options.edge_trim * (t.back() - t.front());
    const double hi = t.back() - options.edge_trim * (t.back() - t.front());
    for (std::size_t i = begin; i < end; ++i) {
      const double ti = samples[i].t;
      if (ti < lo || ti > hi) continue;
      const Eigen::Vector2d q(px.value(ti), py.value(ti));
      const Eigen::Vector2d dq(px.derivative(ti), py.derivative(ti));
      const Eigen::Vector2d ddq(px.second_derivative(ti), py.second_derivative(ti));
      const KineticTerms kt = kinetic_terms(system.model, q, dq);
      Eigen::VectorXd f = system.actuation * samples[i].p - kt.inertia * ddq - kt.coriolis - kt.gravity;
      if (samples[i].f) f += tip_jacobian(system.layout(), q).transpose() * *samples[i].f;
      qs.push_back(q);
      dqs.push_back(dq);
      fs.push_back(std::move(f));
    }
  }
  return fit_material(i_over_l, qs, dqs, fs);
}

std::vector<CharacterizationSample> characterization_samples(const ArmSystem& system, const Trajectory& traj,
                                                             int segment) {
  if (segment < 0 || segment >= system.config.n_segments) {
    throw std::out_of_range("segment " + std::to_string(segment) + " out of range");
  }
  const SensorModel sensors = sensor_matrix(system.config);
  std::vector<CharacterizationSample> out;
  out.reserve(traj.size());
  for (std::size_t k = 0; k < traj.size(); ++k) {
    CharacterizationSample s;
    s.t = traj.times[k];
    s.q = (sensors.matrix * traj.q[k]).segment<2>(2 * segment);
    s.p = traj.pressures[k].segment<3>(3 * segment);
    out.push_back(s);
  }
  return out;
}

std::vector<CharacterizationSample> perturb_samples(std::span<const CharacterizationSample> samples,
                                                    double pressure_rel_std, double angle_std, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> unit(0.0, 1.0);
  std::vector<CharacterizationSample> out(samples.begin(), samples.end());
  for (auto& s : out) {
    for (int j = 0; j < 3; ++j) s.p(j) *= 1.0 + pressure_rel_std * unit(rng);
    for (int j = 0; j < 2; ++j) s.q(j) += angle_std * unit(rng);
  }
  return out;
}

CsvTable characterization_table(std::span<const CharacterizationSample> samples) {
  const bool with_force = std::any_of(samples.begin(), samples.end(), [](const auto& s) { return s.f.has_value(); });
  CsvTable table;
  table.header = {"t", "qx", "qy", "p_0", "p_1", "p_2"};
  if (with_force) table.header.insert(table.header.end(), {"fx", "fy", "fz"});
  for (const auto& s : samples) {
    std::vector<double> row{s.t, s.q.x(), s.q.y(), s.p(0), s.p(1), s.p(2)};
    if (with_force) {
      const Eigen::Vector3d f = s.f.value_or(Eigen::Vector3d::Zero());
      row.insert(row.end(), {f.x(), f.y(), f.z()});
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::vector<CharacterizationSample> characterization_from_table(const CsvTable& table) {
  std::size_t ct = 0, cqx = 0, cqy = 0;
  std::array<std::size_t, 3> cp{};
  try {
    ct = table.column("t");
    cqx = table.column("qx");
    cqy = table.column("qy");
    for (int j = 0; j < 3; ++j) cp[static_cast<std::size_t>(j)] = table.column("p_" + std::to_string(j));
  } catch (const std::out_of_range& e) {
    throw std::invalid_argument(std::string("characterization dataset: ") + e.what());
  }
  const auto has = [&](const char* name) {
    return std::find(table.header.begin(), table.header.end(), name) != table.header.end();
  };
  const bool with_force = has("fx") && has("fy") && has("fz");

  std::vector<CharacterizationSample> out;
  out.reserve(table.rows.size());
  for (const auto& row : table.rows) {
    CharacterizationSample s;
    s.t = row[ct];
    s.q = {row[cqx], row[cqy]};
    s.p = {row[cp[0]], row[cp[1]], row[cp[2]]};
    if (with_force) s.f = Eigen::Vector3d(row[table.column("fx")], row[table.column("fy")], row[table.column("fz")]);
    out.push_back(s);
  }
  return out;
}

}  // namespace pccarm
