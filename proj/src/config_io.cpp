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

#include "pccarm/config_io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace pccarm {

namespace {

using nlohmann::json;

const json& require(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key))
    throw ConfigError(where + (where.empty() ? "" : ".") + key + ": missing field");
  return j.at(key);
}

double number(const json& j, const char* key, const std::string& where) {
  const json& v = require(j, key, where);
  if (!v.is_number())
    throw ConfigError(where + (where.empty() ? "" : ".") + key + ": expected a number");
  return v.get<double>();
}

int integer(const json& j, const char* key, const std::string& where) {
  const json& v = require(j, key, where);
  if (!v.is_number_integer())
    throw ConfigError(where + (where.empty() ? "" : ".") + key + ": expected an integer");
  return v.get<int>();
}

SectionSpec parse_section(const json& j, const std::string& where) {
  SectionSpec s;
  const json& verts = require(j, "vertices", where);
  if (!verts.is_array()) throw ConfigError(where + ".vertices: expected an array of [x, y]");
  for (const auto& v : verts) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
      throw ConfigError(where + ".vertices: expected an array of [x, y]");
    s.outer_boundary.emplace_back(v[0].get<double>(), v[1].get<double>());
  }
  s.chamber_area = number(j, "chamber_area", where);
  s.chamber_offset = number(j, "chamber_offset", where);
  return s;
}

json section_json(const SectionSpec& s) {
  json verts = json::array();
  for (const auto& p : s.outer_boundary) verts.push_back({p.x(), p.y()});
  return {{"vertices", verts}, {"chamber_area", s.chamber_area}, {"chamber_offset", s.chamber_offset}};
}

}  // namespace

ArmConfig load_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config: expected an object at top level");

  ArmConfig c;
  c.n_segments = integer(doc, "n_segments", "");
  c.n_pcc = integer(doc, "n_pcc", "");
  if (c.n_segments < 1) throw ConfigError("n_segments: n_segments must be ≥ 1");
  if (c.n_pcc < 1) throw ConfigError("n_pcc: n_pcc must be ≥ 1");
  if (doc.contains("gravity")) {
    const json& g = doc.at("gravity");
    if (!g.is_array() || g.size() != 3) throw ConfigError("gravity: expected [gx, gy, gz]");
    for (int k = 0; k < 3; ++k) {
      if (!g[static_cast<std::size_t>(k)].is_number()) throw ConfigError("gravity: expected numbers");
      c.gravity[k] = g[static_cast<std::size_t>(k)].get<double>();
    }
  }

  const json& segs = require(doc, "segments", "");
  if (!segs.is_array()) throw ConfigError("segments: expected an array");
  for (std::size_t i = 0; i < segs.size(); ++i) {
    const std::string w = "segments[" + std::to_string(i) + "]";
    const json& js = segs[i];
    SegmentGeometry s;
    s.length = number(js, "length", w);
    s.base_section = parse_section(require(js, "base_section", w), w + ".base_section");
    s.tip_section = parse_section(require(js, "tip_section", w), w + ".tip_section");
    const json& ang = require(js, "chamber_angles", w);
    if (!ang.is_array() || ang.size() != 3)
      throw ConfigError(w + ".chamber_angles: expected three angles");
    for (std::size_t k = 0; k < 3; ++k) {
      if (!ang[k].is_number()) throw ConfigError(w + ".chamber_angles: expected numbers");
      s.chamber_angles[k] = ang[k].get<double>();
    }
    s.density = number(js, "density", w);
    const json& mat = require(js, "material", w);
    s.material.mu = number(mat, "mu", w + ".material");
    s.material.rho = number(mat, "rho", w + ".material");
    c.segments.push_back(std::move(s));
  }

  const json& conns = require(doc, "connectors", "");
  if (!conns.is_array()) throw ConfigError("connectors: expected an array");
  for (std::size_t i = 0; i < conns.size(); ++i) {
    const std::string w = "connectors[" + std::to_string(i) + "]";
    c.connectors.push_back({number(conns[i], "length", w), number(conns[i], "mass", w)});
  }

  validate(c);
  return c;
}

ArmConfig load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return load_config(ss.str());
}

std::string config_to_text(const ArmConfig& c) {
  json doc;
  doc["n_segments"] = c.n_segments;
  doc["n_pcc"] = c.n_pcc;
  doc["gravity"] = {c.gravity.x(), c.gravity.y(), c.gravity.z()};
  doc["segments"] = json::array();
  for (const auto& s : c.segments) {
    doc["segments"].push_back({{"length", s.length},
                               {"base_section", section_json(s.base_section)},
                               {"tip_section", section_json(s.tip_section)},
                               {"chamber_angles", s.chamber_angles},
                               {"density", s.density},
                               {"material", {{"mu", s.material.mu}, {"rho", s.material.rho}}}});
  }
  doc["connectors"] = json::array();
  for (const auto& p : c.connectors) doc["connectors"].push_back({{"length", p.length}, {"mass", p.mass}});
  return doc.dump(2) + "\n";
}

}  // namespace pccarm
