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

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "pccarm/polygon.hpp"

namespace pccarm {

/// Raised when an arm configuration violates its schema or invariants.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SectionSpec {
  std::vector<Point2> outer_boundary;  // counter-clockwise, m
  double chamber_area = 0.0;           // single chamber, m^2
  double chamber_offset = 0.0;         // chamber centroid to center axis, m
};

struct MaterialParams {
  double mu = 0.0;   // initial shear modulus, Pa
  double rho = 0.0;  // dissipative coefficient, Pa*s
};

struct SegmentGeometry {
  double length = 0.0;
  SectionSpec base_section;
  SectionSpec tip_section;
  std::array<double, 3> chamber_angles{};  // rad, from the section x-axis
  double density = 0.0;                    // kg/m^3, effective (voided body)
  MaterialParams material;
};

/// Straight rigid piece following a segment. The last one is the end effector.
struct RigidPieceGeometry {
  double length = 0.0;
  double mass = 0.0;
};

struct ArmConfig {
  int n_segments = 0;
  int n_pcc = 0;
  std::vector<SegmentGeometry> segments;
  std::vector<RigidPieceGeometry> connectors;
  Eigen::Vector3d gravity{0.0, 0.0, -9.81};
};

struct CrossSectionProps {
  double area = 0.0;           // solid area, m^2
  double second_moment = 0.0;  // centroidal, m^4 (mean of ixx and iyy)
  double chamber_area = 0.0;
  double chamber_offset = 0.0;
  AreaMoments moments;         // full centroidal moments of the net section
};

struct ElementProps {
  CrossSectionProps section;
  double length = 0.0;
  double mass = 0.0;
};

/// Throws ConfigError naming the offending field.
void validate(const ArmConfig& config);

/// Linear taper between base (z = 0) and tip (z = 1) sections.
SectionSpec section_at(const ArmConfig& config, int segment, double z);

/// Net section: outer polygon minus three circle-equivalent chambers at the given angles.
CrossSectionProps cross_section_props(const SectionSpec& section,
                                      const std::array<double, 3>& chamber_angles);

/// Properties of one PCC element, evaluated at its mid-height.
ElementProps element_props(const ArmConfig& config, int segment, int element);

/**
 * Two-segment arm with plausible dimensions. Not a measured geometry: the
 * section contours are three-lobed polygons sized to hang a ~0.5 m arm.
 */
ArmConfig default_config();

/// Three-lobed section contour, three-fold symmetric about the origin.
std::vector<Point2> trilobe_polygon(double radius, double lobe_depth, int n_vertices);

}  // namespace pccarm
