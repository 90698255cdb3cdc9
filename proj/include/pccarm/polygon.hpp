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

#include <span>
#include <vector>

#include <Eigen/Core>

namespace pccarm {

using Point2 = Eigen::Vector2d;

/// Filled circle removed from a section, described by its area and center.
struct CircularCutout {
  double area = 0.0;
  Point2 center = Point2::Zero();
};

/**
 * Zeroth, first and second moments of a planar region.
 *
 * Second moments are taken about the region's own centroid:
 * ixx = integral of y^2, iyy = integral of x^2, ixy = integral of x*y.
 */
struct AreaMoments {
  double area = 0.0;
  Point2 centroid = Point2::Zero();
  double ixx = 0.0;
  double iyy = 0.0;
  double ixy = 0.0;

  /// Second moment about the centroidal axis with direction angle `angle`.
  double about_axis(double angle) const;
};

/// Signed area of a closed polygon; positive when counter-clockwise.
double signed_area(std::span<const Point2> vertices);

/// True when no two non-adjacent edges intersect and no edge is degenerate.
bool is_simple(std::span<const Point2> vertices);

/// Largest vertex distance from the origin.
double max_radius(std::span<const Point2> vertices);

/// Exact polygon moments from Green's theorem. Vertices must be counter-clockwise.
AreaMoments polygon_moments(std::span<const Point2> vertices);

/// Polygon moments with circular cutouts removed (parallel-axis theorem).
AreaMoments section_moments(std::span<const Point2> outer,
                            std::span<const CircularCutout> cutouts);

/// Regular polygon of `n` vertices on a circle, counter-clockwise, first vertex at `phase`.
std::vector<Point2> circle_polygon(double radius, int n, double phase = 0.0);

}  // namespace pccarm
