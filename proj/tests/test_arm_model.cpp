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
#include <string>

#include "pccarm/arm_model.hpp"
#include "support.hpp"

using namespace pccarm;
using pccarm::testing::rel_err;

namespace {

constexpr double kPi = std::numbers::pi;

std::string config_error(const ArmConfig& c) {
  try {
    validate(c);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

std::array<CircularCutout, 3> chambers_of(const SectionSpec& s, const std::array<double, 3>& angles) {
  std::array<CircularCutout, 3> out;
  for (std::size_t j = 0; j < 3; ++j)
    out[j] = {s.chamber_area, s.chamber_offset * Point2(std::cos(angles[j]), std::sin(angles[j]))};
  return out;
}

}  // namespace

TEST_SUITE("arm_model") {

TEST_CASE("default config validates") {
  const ArmConfig c = default_config();
  CHECK_NOTHROW(validate(c));
  CHECK(c.n_segments == 2);
  CHECK(c.segments.size() == 2);
}

TEST_CASE("section_at endpoints and midpoint") {
  const ArmConfig c = default_config();
  const auto& seg = c.segments[0];
  const SectionSpec s0 = section_at(c, 0, 0.0);
  const SectionSpec s1 = section_at(c, 0, 1.0);
  CHECK(s0.chamber_area == seg.base_section.chamber_area);
  CHECK(s1.chamber_area == seg.tip_section.chamber_area);
  for (std::size_t k = 0; k < s0.outer_boundary.size(); ++k) {
    CHECK(s0.outer_boundary[k] == seg.base_section.outer_boundary[k]);
    CHECK(s1.outer_boundary[k] == seg.tip_section.outer_boundary[k]);
  }
  const SectionSpec mid = section_at(c, 0, 0.5);
  CHECK(mid.chamber_area == doctest::Approx(0.5 * (seg.base_section.chamber_area + seg.tip_section.chamber_area)));
  CHECK(mid.chamber_offset ==
        doctest::Approx(0.5 * (seg.base_section.chamber_offset + seg.tip_section.chamber_offset)));
  for (std::size_t k = 0; k < mid.outer_boundary.size(); ++k) {
    const Point2 expect = 0.5 * (seg.base_section.outer_boundary[k] + seg.tip_section.outer_boundary[k]);
    CHECK((mid.outer_boundary[k] - expect).norm() < 1e-15);
  }
  CHECK_THROWS_AS(section_at(c, 0, 1.5), std::out_of_range);
  CHECK_THROWS_AS(section_at(c, 0, -0.1), std::out_of_range);
  CHECK_THROWS_AS(section_at(c, 2, 0.5), std::out_of_range);
}

TEST_CASE("circle and annulus sections") {
  SectionSpec s;
  s.outer_boundary = circle_polygon(0.02, 1 << 20);
  s.chamber_area = 0.0;
  const std::array<double, 3> angles{0.0, 2 * kPi / 3, 4 * kPi / 3};
  const auto solid = cross_section_props(s, angles);
  CHECK(rel_err(solid.second_moment, kPi * std::pow(0.02, 4) / 4) < 1e-10);

  const std::array<CircularCutout, 1> hole{CircularCutout{kPi * 0.01 * 0.01, Point2::Zero()}};
  const auto m = section_moments(s.outer_boundary, hole);
  CHECK(rel_err(m.ixx, kPi * (std::pow(0.02, 4) - std::pow(0.01, 4)) / 4) < 1e-10);
}

TEST_CASE("tapered three-chamber section matches the grid oracle") {
  const ArmConfig c = default_config();
  for (int seg = 0; seg < 2; ++seg) {
    for (double z : {0.0, 0.5, 1.0}) {
      const SectionSpec s = section_at(c, seg, z);
      const auto angles = c.segments[static_cast<std::size_t>(seg)].chamber_angles;
      const auto props = cross_section_props(s, angles);
      const auto holes = chambers_of(s, angles);
      const auto g = pccarm::testing::grid_moments(s.outer_boundary, holes, 2000);
      CHECK(rel_err(props.area, g.area) < 1e-4);
      CHECK(rel_err(props.moments.ixx, g.ixx) < 1e-4);
      CHECK(rel_err(props.moments.iyy, g.iyy) < 1e-4);
      CHECK(rel_err(props.second_moment, 0.5 * (g.ixx + g.iyy)) < 1e-4);
    }
  }
}

TEST_CASE("uniform scaling: I ~ s^4, area ~ s^2") {
  const ArmConfig c = default_config();
  const SectionSpec base = section_at(c, 0, 0.5);
  const auto angles = c.segments[0].chamber_angles;
  const auto p0 = cross_section_props(base, angles);
  for (double s : {0.5, 2.0}) {
    SectionSpec scaled = base;
    for (auto& v : scaled.outer_boundary) v *= s;
    scaled.chamber_area *= s * s;
    scaled.chamber_offset *= s;
    const auto p = cross_section_props(scaled, angles);
    CHECK(rel_err(p.area, s * s * p0.area) < 1e-12);
    CHECK(rel_err(p.second_moment, s * s * s * s * p0.second_moment) < 1e-12);
  }
}

TEST_CASE("three-fold symmetric section is isotropic in bending") {
  const ArmConfig c = default_config();
  const auto props = cross_section_props(section_at(c, 1, 0.3), c.segments[1].chamber_angles);
  const double i0 = props.moments.about_axis(0.0);
  CHECK(rel_err(props.moments.about_axis(kPi / 6), i0) < 1e-6);
  CHECK(rel_err(props.moments.about_axis(kPi / 3), i0) < 1e-6);
  CHECK(props.second_moment > 0.0);
}

TEST_CASE("element_props uses the element mid-height") {
  ArmConfig c = default_config();
  c.n_pcc = 3;
  const auto e0 = element_props(c, 0, 0);
  const auto ref = cross_section_props(section_at(c, 0, 1.0 / 6.0), c.segments[0].chamber_angles);
  CHECK(e0.section.second_moment == doctest::Approx(ref.second_moment).epsilon(1e-14));
  CHECK(e0.length == doctest::Approx(c.segments[0].length / 3));
  CHECK(e0.mass == doctest::Approx(c.segments[0].density * ref.area * e0.length));

  c.n_pcc = 1;
  const auto single = element_props(c, 1, 0);
  const auto mid = cross_section_props(section_at(c, 1, 0.5), c.segments[1].chamber_angles);
  CHECK(single.section.area == doctest::Approx(mid.area).epsilon(1e-14));
  CHECK_THROWS_AS(element_props(c, 1, 1), std::out_of_range);
  CHECK_THROWS_AS(element_props(c, 2, 0), std::out_of_range);
}

TEST_CASE("element masses approximate the tapered-solid integral within 2%") {
  for (int n_pcc : {1, 3, 6}) {
    ArmConfig c = default_config();
    c.n_pcc = n_pcc;
    for (int seg = 0; seg < c.n_segments; ++seg) {
      const auto& g = c.segments[static_cast<std::size_t>(seg)];
      double lumped = 0.0;
      for (int e = 0; e < n_pcc; ++e) lumped += element_props(c, seg, e).mass;
      // Composite Simpson over the normalized height.
      constexpr int kPanels = 400;
      double integral = 0.0;
      for (int k = 0; k <= kPanels; ++k) {
        const double z = static_cast<double>(k) / kPanels;
        const double w = (k == 0 || k == kPanels) ? 1.0 : (k % 2 ? 4.0 : 2.0);
        integral += w * cross_section_props(section_at(c, seg, z), g.chamber_angles).area;
      }
      integral *= g.density * g.length / (3.0 * kPanels);
      CHECK(rel_err(lumped, integral) < 0.02);
    }
  }
}

TEST_CASE("validation names the offending field") {
  ArmConfig c = default_config();
  c.n_pcc = 0;
  CHECK(config_error(c).find("n_pcc must be ≥ 1") != std::string::npos);

  c = default_config();
  c.segments[1].material.mu = -1.0;
  CHECK(config_error(c).find("segments[1].material.mu") != std::string::npos);

  c = default_config();
  auto& v = c.segments[0].tip_section.outer_boundary;
  std::swap(v[3], v[20]);
  CHECK(config_error(c).find("self-intersecting") != std::string::npos);

  c = default_config();
  c.segments[0].chamber_angles[1] += 0.1;
  CHECK(config_error(c).find("chamber_angles") != std::string::npos);

  c = default_config();
  c.connectors.pop_back();
  CHECK(config_error(c).find("connectors") != std::string::npos);

  c = default_config();
  c.connectors[0].length = 0.0;
  CHECK(config_error(c).empty());
}

}  // TEST_SUITE
