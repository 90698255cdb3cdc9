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

// Shared generators and reference implementations for the test suites. The
// oracles here deliberately take a different route from the library code.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Geometry>

#include "pccarm/estimation.hpp"
#include "pccarm/kinematics.hpp"
#include "pccarm/polygon.hpp"

namespace pccarm::testing {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

/// Free coordinates with every element's bend magnitude below `max_bend`.
inline Eigen::VectorXd random_pose(const ArmLayout& layout, Rng& rng, double max_bend = 2.5) {
  Eigen::VectorXd q(layout.n_free());
  for (Eigen::Index i = 0; i < q.size(); i += 2) {
    const double phi = uniform(rng, -std::numbers::pi, std::numbers::pi);
    const double theta = uniform(rng, 0.0, max_bend);
    q[i] = theta * std::cos(phi);
    q[i + 1] = theta * std::sin(phi);
  }
  return q;
}

inline Eigen::VectorXd random_vector(Eigen::Index n, Rng& rng, double scale) {
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = uniform(rng, -scale, scale);
  return v;
}

/// Central-difference Jacobian of a vector function.
template <class F>
Eigen::MatrixXd fd_jacobian(F&& f, const Eigen::VectorXd& x, double h) {
  const Eigen::VectorXd f0 = f(x);
  Eigen::MatrixXd j(f0.size(), x.size());
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    Eigen::VectorXd xp = x, xm = x;
    xp[k] += h;
    xm[k] -= h;
    j.col(k) = (f(xp) - f(xm)) / (2.0 * h);
  }
  return j;
}

/// Constant-curvature arc in polar form: rotation by theta about (-sin phi, cos phi, 0)
/// and the planar arc tip (r (1 - cos theta), 0, r sin theta) rotated by phi about z.
inline Frame polar_arc_frame(double theta_x, double theta_y, double length) {
  const double theta = std::hypot(theta_x, theta_y);
  Frame f;
  if (theta == 0.0) {
    f.translation = {0.0, 0.0, length};
    return f;
  }
  const double phi = std::atan2(theta_y, theta_x);
  f.rotation = Eigen::AngleAxisd(theta, Eigen::Vector3d(-std::sin(phi), std::cos(phi), 0.0)).toRotationMatrix();
  const double r = length / theta;
  f.translation = {r * (1.0 - std::cos(theta)) * std::cos(phi), r * (1.0 - std::cos(theta)) * std::sin(phi),
                   r * std::sin(theta)};
  return f;
}

struct GridMoments {
  double area = 0.0;
  Eigen::Vector2d centroid = Eigen::Vector2d::Zero();
  double ixx = 0.0;  // integral of (y - cy)^2
  double iyy = 0.0;  // integral of (x - cx)^2
  double ixy = 0.0;
};

/**
 * Midpoint rasterization on an n x n pixel grid over the polygon's bounding
 * box: a pixel counts when its center is inside the outer polygon (even-odd
 * rule) and outside every circular cutout.
 */
inline GridMoments grid_moments(std::span<const Point2> outer, std::span<const CircularCutout> cutouts, int n) {
  double x0 = outer[0].x(), x1 = x0, y0 = outer[0].y(), y1 = y0;
  for (const auto& p : outer) {
    x0 = std::min(x0, p.x());
    x1 = std::max(x1, p.x());
    y0 = std::min(y0, p.y());
    y1 = std::max(y1, p.y());
  }
  const double hx = (x1 - x0) / n, hy = (y1 - y0) / n;
  std::vector<double> radii2;
  for (const auto& c : cutouts) radii2.push_back(c.area / std::numbers::pi);

  // Raw sums first, shifted to the box center to limit cancellation.
  const double ox = 0.5 * (x0 + x1), oy = 0.5 * (y0 + y1);
  double a = 0, sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  std::vector<double> crossings;
  for (int j = 0; j < n; ++j) {
    const double y = y0 + (j + 0.5) * hy;
    crossings.clear();
    for (std::size_t k = 0; k < outer.size(); ++k) {
      const Point2& p = outer[k];
      const Point2& q = outer[(k + 1) % outer.size()];
      if ((p.y() > y) != (q.y() > y)) crossings.push_back(p.x() + (y - p.y()) * (q.x() - p.x()) / (q.y() - p.y()));
    }
    std::sort(crossings.begin(), crossings.end());
    for (int i = 0; i < n; ++i) {
      const double x = x0 + (i + 0.5) * hx;
      const auto left = std::lower_bound(crossings.begin(), crossings.end(), x) - crossings.begin();
      if (left % 2 == 0) continue;
      bool in_hole = false;
      for (std::size_t c = 0; c < cutouts.size() && !in_hole; ++c) {
        in_hole = (Point2(x, y) - cutouts[c].center).squaredNorm() < radii2[c];
      }
      if (in_hole) continue;
      const double u = x - ox, v = y - oy;
      a += 1;
      sx += u;
      sy += v;
      sxx += u * u;
      syy += v * v;
      sxy += u * v;
    }
  }
  const double cell = hx * hy;
  GridMoments g;
  g.area = a * cell;
  const double mx = sx / a, my = sy / a;
  g.centroid = {ox + mx, oy + my};
  g.iyy = (sxx - a * mx * mx) * cell;
  g.ixx = (syy - a * my * my) * cell;
  g.ixy = (sxy - a * mx * my) * cell;
  return g;
}

/// Simulated 3 s "swing" of one segment in isolation with the given material, as a characterization dataset.
inline std::vector<CharacterizationSample> swing_dataset(const ArmConfig& base, int segment, MaterialParams material) {
  ArmConfig c = base;
  c.segments[static_cast<std::size_t>(segment)].material = material;
  const ArmSystem sys = make_system(isolate_segment(c, segment));
  SimulationOptions opt;
  opt.duration = 3.0;
  const Trajectory traj = simulate(sys, builtin_profile("swing", 1), opt);
  return characterization_samples(sys, traj, 0);
}

struct LoadCase {
  Eigen::VectorXd reading;  // loaded state
  Eigen::VectorXd tare;     // from the unloaded state at the same pressures
  Eigen::VectorXd q_true;
};

/// Static equilibria with and without `load`, then correct_pose + tare at the unloaded one.
inline LoadCase load_case(const ArmSystem& sys, const Eigen::VectorXd& p, const Eigen::Vector3d& load,
                          TareMode mode = TareMode::kResidual) {
  const SensorModel sensors = sensor_matrix(sys.config);
  const Eigen::VectorXd q0 = static_equilibrium(sys, p);
  const Eigen::VectorXd q_tare = correct_pose(sys, p, simulate_reading(sensors, q0));
  LoadCase lc;
  lc.tare = tare(sys, p, q_tare, mode);
  lc.q_true = static_equilibrium(sys, p, load, q0);
  lc.reading = simulate_reading(sensors, lc.q_true);
  return lc;
}

inline double angle_between(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
  return std::atan2(a.cross(b).norm(), a.dot(b));
}

inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const auto n = static_cast<Eigen::Index>(x.size());
  const Eigen::VectorXd a = Eigen::Map<const Eigen::VectorXd>(x.data(), n).array() -
                            Eigen::Map<const Eigen::VectorXd>(x.data(), n).mean();
  const Eigen::VectorXd b = Eigen::Map<const Eigen::VectorXd>(y.data(), n).array() -
                            Eigen::Map<const Eigen::VectorXd>(y.data(), n).mean();
  return a.dot(b) / (a.norm() * b.norm());
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace pccarm::testing
