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

#include "pccarm/polygon.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace pccarm {

namespace {

// Raw moments about a caller-chosen reference point.
struct RawMoments {
  double a = 0.0;
  double sx = 0.0;
  double sy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  double sxy = 0.0;
};

Point2 vertex_mean(std::span<const Point2> v) {
  Point2 m = Point2::Zero();
  for (const auto& p : v) m += p;
  return m / static_cast<double>(v.size());
}

RawMoments raw_polygon_moments(std::span<const Point2> v, const Point2& ref) {
  RawMoments r;
  const std::size_t n = v.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point2 p0 = v[j] - ref;
    const Point2 p1 = v[i] - ref;
    const double cross = p0.x() * p1.y() - p1.x() * p0.y();
    r.a += cross;
    r.sx += (p0.x() + p1.x()) * cross;
    r.sy += (p0.y() + p1.y()) * cross;
    r.sxx += (p0.x() * p0.x() + p0.x() * p1.x() + p1.x() * p1.x()) * cross;
    r.syy += (p0.y() * p0.y() + p0.y() * p1.y() + p1.y() * p1.y()) * cross;
    r.sxy += (p0.x() * p1.y() + 2.0 * p0.x() * p0.y() + 2.0 * p1.x() * p1.y() +
              p1.x() * p0.y()) *
             cross;
  }
  r.a /= 2.0;
  r.sx /= 6.0;
  r.sy /= 6.0;
  r.sxx /= 12.0;
  r.syy /= 12.0;
  r.sxy /= 24.0;
  return r;
}

AreaMoments to_centroidal(const RawMoments& r, const Point2& ref) {
  AreaMoments m;
  m.area = r.a;
  const double cx = r.sx / r.a;
  const double cy = r.sy / r.a;
  m.centroid = Point2(cx, cy) + ref;
  m.iyy = r.sxx - r.a * cx * cx;
  m.ixx = r.syy - r.a * cy * cy;
  m.ixy = r.sxy - r.a * cx * cy;
  return m;
}

double orient(const Point2& a, const Point2& b, const Point2& c) {
  return (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
}

bool on_segment(const Point2& a, const Point2& b, const Point2& p) {
  return std::min(a.x(), b.x()) <= p.x() && p.x() <= std::max(a.x(), b.x()) &&
         std::min(a.y(), b.y()) <= p.y() && p.y() <= std::max(a.y(), b.y());
}

bool segments_intersect(const Point2& p1, const Point2& p2, const Point2& q1,
                        const Point2& q2) {
  const double d1 = orient(q1, q2, p1);
  const double d2 = orient(q1, q2, p2);
  const double d3 = orient(p1, p2, q1);
  const double d4 = orient(p1, p2, q2);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
      ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
    return true;
  if (d1 == 0 && on_segment(q1, q2, p1)) return true;
  if (d2 == 0 && on_segment(q1, q2, p2)) return true;
  if (d3 == 0 && on_segment(p1, p2, q1)) return true;
  if (d4 == 0 && on_segment(p1, p2, q2)) return true;
  return false;
}

}  // namespace

double AreaMoments::about_axis(double angle) const {
  const double s = std::sin(angle);
  const double c = std::cos(angle);
  return c * c * ixx + s * s * iyy - 2.0 * s * c * ixy;
}

double signed_area(std::span<const Point2> vertices) {
  if (vertices.size() < 3) return 0.0;
  return raw_polygon_moments(vertices, vertex_mean(vertices)).a;
}

bool is_simple(std::span<const Point2> v) {
  const std::size_t n = v.size();
  if (n < 3) return false;
  for (std::size_t i = 0; i < n; ++i) {
    if ((v[i] - v[(i + 1) % n]).norm() == 0.0) return false;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const Point2& a0 = v[i];
    const Point2& a1 = v[(i + 1) % n];
    for (std::size_t j = i + 1; j < n; ++j) {
      // adjacent edges share a vertex by construction
      if (j == i + 1 || (i == 0 && j == n - 1)) continue;
      if (segments_intersect(a0, a1, v[j], v[(j + 1) % n])) return false;
    }
  }
  return true;
}

double max_radius(std::span<const Point2> vertices) {
  double r = 0.0;
  for (const auto& p : vertices) r = std::max(r, p.norm());
  return r;
}

AreaMoments polygon_moments(std::span<const Point2> vertices) {
  if (vertices.size() < 3) throw std::invalid_argument("polygon needs at least 3 vertices");
  const Point2 ref = vertex_mean(vertices);
  return to_centroidal(raw_polygon_moments(vertices, ref), ref);
}

AreaMoments section_moments(std::span<const Point2> outer,
                            std::span<const CircularCutout> cutouts) {
  if (outer.size() < 3) throw std::invalid_argument("polygon needs at least 3 vertices");
  const Point2 ref = vertex_mean(outer);
  RawMoments r = raw_polygon_moments(outer, ref);
  for (const auto& hole : cutouts) {
    const Point2 c = hole.center - ref;
    const double own = hole.area * hole.area / (4.0 * std::numbers::pi);
    r.a -= hole.area;
    r.sx -= hole.area * c.x();
    r.sy -= hole.area * c.y();
    r.sxx -= hole.area * c.x() * c.x() + own;
    r.syy -= hole.area * c.y() * c.y() + own;
    r.sxy -= hole.area * c.x() * c.y();
  }
  return to_centroidal(r, ref);
}

std::vector<Point2> circle_polygon(double radius, int n, double phase) {
  std::vector<Point2> pts;
  pts.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    const double a = phase + 2.0 * std::numbers::pi * k / n;
    pts.emplace_back(radius * std::cos(a), radius * std::sin(a));
  }
  return pts;
}

}  // namespace pccarm
