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

#include "pccarm/arm_model.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace pccarm {

namespace {

constexpr double kPi = std::numbers::pi;

[[noreturn]] void fail(const std::string& field, const std::string& what) {
  throw ConfigError(field + ": " + what);
}

void validate_section(const SectionSpec& s, const std::string& field) {
  if (s.outer_boundary.size() < 3) fail(field + ".vertices", "needs at least 3 vertices");
  for (const auto& p : s.outer_boundary) {
    if (!std::isfinite(p.x()) || !std::isfinite(p.y())) fail(field + ".vertices", "non-finite vertex");
  }
  if (!is_simple(s.outer_boundary)) fail(field + ".vertices", "boundary polygon is self-intersecting");
  if (signed_area(s.outer_boundary) <= 0.0)
    fail(field + ".vertices", "boundary polygon must be counter-clockwise");
  if (!(s.chamber_area > 0.0)) fail(field + ".chamber_area", "must be > 0");
  if (!(s.chamber_offset > 0.0)) fail(field + ".chamber_offset", "must be > 0");
  if (s.chamber_offset >= max_radius(s.outer_boundary))
    fail(field + ".chamber_offset", "must be smaller than the boundary radius");
}

double wrap_angle(double a) { return std::remainder(a, 2.0 * kPi); }

}  // namespace

void validate(const ArmConfig& c) {
  if (c.n_segments < 1) fail("n_segments", "n_segments must be ≥ 1");
  if (c.n_pcc < 1) fail("n_pcc", "n_pcc must be ≥ 1");
  if (static_cast<int>(c.segments.size()) != c.n_segments)
    fail("segments", "expected " + std::to_string(c.n_segments) + " entries");
  if (static_cast<int>(c.connectors.size()) != c.n_segments)
    fail("connectors", "expected " + std::to_string(c.n_segments) + " entries");
  if (!c.gravity.allFinite()) fail("gravity", "non-finite component");

  for (int i = 0; i < c.n_segments; ++i) {
    const auto& s = c.segments[static_cast<std::size_t>(i)];
    const std::string f = "segments[" + std::to_string(i) + "]";
    if (!(s.length > 0.0)) fail(f + ".length", "must be > 0");
    if (!(s.density > 0.0)) fail(f + ".density", "must be > 0");
    if (!(s.material.mu > 0.0)) fail(f + ".material.mu", "must be > 0");
    if (!(s.material.rho >= 0.0)) fail(f + ".material.rho", "must be ≥ 0");
    validate_section(s.base_section, f + ".base_section");
    validate_section(s.tip_section, f + ".tip_section");
    if (s.base_section.outer_boundary.size() != s.tip_section.outer_boundary.size())
      fail(f + ".tip_section.vertices", "vertex count must match base_section");
    for (int j = 0; j < 3; ++j) {
      const double gap = wrap_angle(s.chamber_angles[static_cast<std::size_t>((j + 1) % 3)] -
                                    s.chamber_angles[static_cast<std::size_t>(j)]);
      if (std::abs(std::abs(gap) - 2.0 * kPi / 3.0) > 1e-9)
        fail(f + ".chamber_angles", "chambers must be 120 degrees apart");
    }
    // Net area must stay positive everywhere along the taper.
    for (double z : {0.0, 1.0}) {
      const auto props = cross_section_props(section_at(c, i, z), s.chamber_angles);
      if (!(props.area > 1e-12)) fail(f, "net cross-section area is not positive");
    }
  }
  for (int i = 0; i < c.n_segments; ++i) {
    const auto& p = c.connectors[static_cast<std::size_t>(i)];
    const std::string f = "connectors[" + std::to_string(i) + "]";
    if (!(p.length >= 0.0) || !std::isfinite(p.length)) fail(f + ".length", "must be ≥ 0");
    if (!(p.mass >= 0.0) || !std::isfinite(p.mass)) fail(f + ".mass", "must be ≥ 0");
  }
}

SectionSpec section_at(const ArmConfig& config, int segment, double z) {
  if (segment < 0 || segment >= static_cast<int>(config.segments.size()))
    throw std::out_of_range("segment index out of range");
  if (!(z >= 0.0 && z <= 1.0)) throw std::out_of_range("normalized height must lie in [0, 1]");
  const auto& seg = config.segments[static_cast<std::size_t>(segment)];
  if (z == 0.0) return seg.base_section;
  if (z == 1.0) return seg.tip_section;

  const auto& a = seg.base_section;
  const auto& b = seg.tip_section;
  if (a.outer_boundary.size() != b.outer_boundary.size())
    throw ConfigError("base and tip sections have different vertex counts");
  SectionSpec out;
  out.outer_boundary.reserve(a.outer_boundary.size());
  for (std::size_t k = 0; k < a.outer_boundary.size(); ++k)
    out.outer_boundary.push_back((1.0 - z) * a.outer_boundary[k] + z * b.outer_boundary[k]);
  out.chamber_area = (1.0 - z) * a.chamber_area + z * b.chamber_area;
  out.chamber_offset = (1.0 - z) * a.chamber_offset + z * b.chamber_offset;
  return out;
}

CrossSectionProps cross_section_props(const SectionSpec& section,
                                      const std::array<double, 3>& chamber_angles) {
  std::array<CircularCutout, 3> chambers;
  for (std::size_t j = 0; j < 3; ++j) {
    chambers[j].area = section.chamber_area;
    chambers[j].center = section.chamber_offset *
                         Point2(std::cos(chamber_angles[j]), std::sin(chamber_angles[j]));
  }
  const std::span<const CircularCutout> cutouts =
      section.chamber_area > 0.0 ? std::span<const CircularCutout>(chambers)
                                 : std::span<const CircularCutout>();
  const AreaMoments m = section_moments(section.outer_boundary, cutouts);
  if (!(m.area >= 1e-12)) throw ConfigError("degenerate cross section (area below 1e-12 m^2)");

  CrossSectionProps p;
  p.area = m.area;
  p.second_moment = 0.5 * (m.ixx + m.iyy);
  p.chamber_area = section.chamber_area;
  p.chamber_offset = section.chamber_offset;
  p.moments = m;
  return p;
}

ElementProps element_props(const ArmConfig& config, int segment, int element) {
  if (segment < 0 || segment >= config.n_segments) throw std::out_of_range("segment index out of range");
  if (element < 0 || element >= config.n_pcc) throw std::out_of_range("element index out of range");
  const auto& seg = config.segments[static_cast<std::size_t>(segment)];
  const double z = (element + 0.5) / config.n_pcc;
  ElementProps e;
  e.section = cross_section_props(section_at(config, segment, z), seg.chamber_angles);
  e.length = seg.length / config.n_pcc;
  e.mass = seg.density * e.section.area * e.length;
  return e;
}

std::vector<Point2> trilobe_polygon(double radius, double lobe_depth, int n_vertices) {
  // Lobes sit at 90, 210 and 330 degrees, matching the default chamber layout.
  std::vector<Point2> pts;
  pts.reserve(static_cast<std::size_t>(n_vertices));
  for (int k = 0; k < n_vertices; ++k) {
    const double a = 2.0 * kPi * k / n_vertices;
    const double r = radius * (1.0 + lobe_depth * std::cos(3.0 * (a - kPi / 2.0)));
    pts.emplace_back(r * std::cos(a), r * std::sin(a));
  }
  return pts;
}

ArmConfig default_config() {
  constexpr int kVertices = 60;
  constexpr double kLobe = 0.08;
  auto section = [&](double radius, double chamber_radius, double offset) {
    SectionSpec s;
    s.outer_boundary = trilobe_polygon(radius, kLobe, kVertices);
    s.chamber_area = kPi * chamber_radius * chamber_radius;
    s.chamber_offset = offset;
    return s;
  };
  const std::array<double, 3> angles{kPi / 2.0, kPi / 2.0 + 2.0 * kPi / 3.0,
                                     kPi / 2.0 + 4.0 * kPi / 3.0};

  ArmConfig c;
  c.n_segments = 2;
  c.n_pcc = 3;

  SegmentGeometry upper;
  upper.length = 0.22;
  upper.base_section = section(0.030, 0.0095, 0.015);
  upper.tip_section = section(0.026, 0.0080, 0.013);
  upper.chamber_angles = angles;
  upper.density = 1070.0;
  upper.material = {43000.0, 61000.0};

  SegmentGeometry lower;
  lower.length = 0.20;
  lower.base_section = section(0.025, 0.0078, 0.0125);
  lower.tip_section = section(0.021, 0.0065, 0.0105);
  lower.chamber_angles = angles;
  lower.density = 1070.0;
  lower.material = {57000.0, 8000.0};

  c.segments = {upper, lower};
  c.connectors = {{0.03, 0.035}, {0.06, 0.09}};
  return c;
}

}  // namespace pccarm
