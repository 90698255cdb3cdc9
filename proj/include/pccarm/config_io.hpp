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

#include <filesystem>
#include <string>
#include <string_view>

#include "pccarm/arm_model.hpp"

namespace pccarm {

/**
 * Parses and validates an arm configuration document (JSON).
 *
 * Top-level keys: n_segments, n_pcc, gravity, segments[], connectors[].
 * Each segment: length, base_section{vertices, chamber_area, chamber_offset},
 * tip_section{...}, chamber_angles, density, material{mu, rho}.
 * Each connector: length, mass. SI units throughout.
 */
ArmConfig load_config(std::string_view text);

ArmConfig load_config_file(const std::filesystem::path& path);

/// Serializes a configuration; `load_config(config_to_text(c))` reproduces `c`.
std::string config_to_text(const ArmConfig& config);

}  // namespace pccarm
