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

#include "pccarm/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "pccarm/config_io.hpp"
#include "pccarm/estimation.hpp"

namespace pccarm {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 14695981039346656037ULL;
  for (const unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string hex64(std::uint64_t v) {
  std::ostringstream ss;
  ss << std::hex << std::setw(16) << std::setfill('0') << v;
  return ss.str();
}

// Run record written next to every output.
struct Manifest {
  std::string command;
  ordered_json flags = ordered_json::object();
  ordered_json inputs = ordered_json::array();
  ordered_json outputs = ordered_json::array();

  void input(const std::string& role, const std::string& path) {
    inputs.push_back({{"role", role}, {"path", path}, {"fnv1a64", hex64(fnv1a64(read_file(path)))}});
  }
  void builtin(const std::string& role, const std::string& name) {
    inputs.push_back({{"role", role}, {"builtin", name}});
  }
  void write(const fs::path& path) const {
    ordered_json doc;
    doc["engine"] = "pccarm";
    doc["engine_version"] = std::string(kEngineVersion);
    doc["command"] = command;
    doc["flags"] = flags;
    doc["inputs"] = inputs;
    doc["outputs"] = outputs;
    std::ofstream out(path);
    if (!out) throw UsageError("cannot write " + path.string());
    out << doc.dump(2) << '\n';
  }
};

fs::path manifest_path(const fs::path& output) { return fs::path(output.string() + ".manifest.json"); }

void ensure_parent(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
}

ArmConfig load_or_default(const std::string& path, Manifest& manifest) {
  if (path.empty()) {
    manifest.builtin("config", "default");
    return default_config();
  }
  manifest.input("config", path);
  return load_config_file(path);
}

PressureProfile resolve_profile(const std::string& spec, int n_segments, Manifest& manifest) {
  if (fs::exists(spec)) {
    manifest.input("profile", spec);
    return load_profile_csv(spec);
  }
  manifest.builtin("profile", spec);
  try {
    return builtin_profile(spec, n_segments);
  } catch (const std::invalid_argument&) {
    throw UsageError("--profile '" + spec + "' is neither a readable file nor one of sine-sweep, step, hold, swing");
  }
}

std::optional<ForceSchedule> tip_force_schedule(const std::vector<double>& f) {
  if (f.empty()) return std::nullopt;
  return ForceSchedule::constant(Eigen::Vector3d(f[0], f[1], f[2]));
}

// Rows of the named columns, in order.
std::vector<Eigen::VectorXd> select_columns(const CsvTable& table, const std::vector<std::string>& names,
                                            const std::string& what) {
  std::vector<std::size_t> idx;
  for (const auto& n : names) {
    const auto it = std::find(table.header.begin(), table.header.end(), n);
    if (it == table.header.end()) throw UsageError(what + ": missing column '" + n + "'");
    idx.push_back(static_cast<std::size_t>(it - table.header.begin()));
  }
  std::vector<Eigen::VectorXd> rows;
  for (const auto& r : table.rows) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t k = 0; k < idx.size(); ++k) v[static_cast<Eigen::Index>(k)] = r[idx[k]];
    rows.push_back(std::move(v));
  }
  if (rows.empty()) throw UsageError(what + ": no data rows");
  return rows;
}

std::vector<std::string> pressure_columns(int n_segments) {
  std::vector<std::string> names;
  for (int j = 0; j < 3 * n_segments; ++j) names.push_back("p_" + std::to_string(j));
  return names;
}

std::vector<std::string> reading_columns(int n_segments) {
  std::vector<std::string> names;
  for (int s = 1; s <= n_segments; ++s) {
    names.push_back("sx_" + std::to_string(s));
    names.push_back("sy_" + std::to_string(s));
  }
  return names;
}

// Exactly the expected number of sensor columns; extra sx_/sy_ columns mean a mismatched arm.
void check_reading_width(const CsvTable& table, int n_segments, const std::string& what) {
  const auto count = std::count_if(table.header.begin(), table.header.end(), [](const std::string& h) {
    return h.rfind("sx_", 0) == 0 || h.rfind("sy_", 0) == 0;
  });
  if (count != 2 * n_segments) {
    throw UsageError(what + ": has " + std::to_string(count) + " sensor columns, the arm has " +
                     std::to_string(2 * n_segments));
  }
}

CsvTable reading_table(const std::vector<double>& times, const std::vector<Eigen::VectorXd>& readings) {
  CsvTable t;
  t.header = {"t"};
  const auto names = reading_columns(static_cast<int>(readings.front().size() / 2));
  t.header.insert(t.header.end(), names.begin(), names.end());
  for (std::size_t k = 0; k < readings.size(); ++k) {
    std::vector<double> row{times[k]};
    row.insert(row.end(), readings[k].data(), readings[k].data() + readings[k].size());
    t.rows.push_back(std::move(row));
  }
  return t;
}

int thread_count() {
  if (const char* env = std::getenv("PCCARM_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

CoriolisProjection parse_projection(const std::string& s) {
  return s == "literal" ? CoriolisProjection::kLiteral : CoriolisProjection::kComplete;
}

// ---- simulate ---------------------------------------------------------------

struct SimulateArgs {
  std::string config, profile = "sine-sweep", out = "trajectory.csv";
  double duration = 3.0, dt = 2e-5, record_interval = 1e-2;
  std::vector<double> tip_force;
  int npcc = 0;
  int isolate = -1;
  int segment = 0;
  std::string characterization_out, sensor_out;
  double pressure_noise = 0.0, angle_noise_deg = 0.0, sensor_noise = 0.0;
  std::uint64_t seed = 0;
  std::string coriolis = "complete";
};

int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
  Manifest m;
  m.command = "simulate";
  ArmConfig cfg = load_or_default(a.config, m);
  if (a.npcc > 0) cfg.n_pcc = a.npcc;
  int segment = a.segment;
  if (a.isolate >= 0) {
    cfg = isolate_segment(cfg, a.isolate);
    segment = 0;
  }
  const ArmSystem sys = make_system(cfg, parse_projection(a.coriolis));
  const PressureProfile profile = resolve_profile(a.profile, cfg.n_segments, m);
  if (segment < 0 || segment >= cfg.n_segments) throw UsageError("--segment out of range");
  if (!a.characterization_out.empty() && cfg.n_pcc != 1) {
    throw UsageError("--characterization-out needs a single-element segment model (use --isolate-segment or --npcc 1)");
  }

  SimulationOptions opt;
  opt.duration = a.duration;
  opt.dt = a.dt;
  opt.record_interval = a.record_interval;
  opt.tip_force = tip_force_schedule(a.tip_force);
  Trajectory traj;
  try {
    traj = simulate(sys, profile, opt);
  } catch (const NumericalError& e) {
    const double limit = stable_step_limit(sys);
    if (a.dt <= limit) throw;
    throw NumericalError(std::string(e.what()) + "; --dt exceeds the linear stability limit " +
                         format_double(limit) + " s of this arm");
  }

  ensure_parent(a.out);
  write_csv_file(a.out, trajectory_table(traj));
  m.outputs.push_back(a.out);

  if (!a.characterization_out.empty()) {
    auto samples = characterization_samples(sys, traj, segment);
    if (a.pressure_noise > 0.0 || a.angle_noise_deg > 0.0) {
      samples = perturb_samples(samples, a.pressure_noise, a.angle_noise_deg * std::numbers::pi / 180.0, a.seed);
    }
    ensure_parent(a.characterization_out);
    write_csv_file(a.characterization_out, characterization_table(samples));
    m.outputs.push_back(a.characterization_out);
  }
  if (!a.sensor_out.empty()) {
    const SensorModel sensors = sensor_matrix(cfg);
    std::vector<Eigen::VectorXd> readings;
    for (std::size_t k = 0; k < traj.size(); ++k) {
      readings.push_back(simulate_reading(sensors, traj.q[k], a.sensor_noise, a.seed + k));
    }
    ensure_parent(a.sensor_out);
    write_csv_file(a.sensor_out, reading_table(traj.times, readings));
    m.outputs.push_back(a.sensor_out);
  }

  m.flags = {{"profile", a.profile},       {"duration", a.duration},
             {"dt", a.dt},                 {"record_interval", a.record_interval},
             {"tip_force", a.tip_force},   {"npcc", cfg.n_pcc},
             {"isolate_segment", a.isolate}, {"segment", a.segment},
             {"pressure_noise", a.pressure_noise}, {"angle_noise_deg", a.angle_noise_deg},
             {"sensor_noise", a.sensor_noise}, {"seed", a.seed},
             {"coriolis", a.coriolis}};
  m.write(manifest_path(a.out));
  out << "wrote " << traj.size() << " samples to " << a.out << '\n';
  return kExitOk;
}

// ---- sweep-npcc -------------------------------------------------------------

struct SweepArgs {
  std::string config, profile = "hold", out_dir = "sweep";
  std::vector<int> npcc_list{1, 2, 3, 4};
  double duration = 3.0, dt = 2e-5, record_interval = 1e-2;
  std::string coriolis = "complete";
};

int cmd_sweep(const SweepArgs& a, std::ostream& out) {
  const std::set<int> distinct(a.npcc_list.begin(), a.npcc_list.end());
  if (distinct.size() != a.npcc_list.size()) throw UsageError("--npcc-list contains duplicates");
  if (*distinct.begin() < 1) throw UsageError("--npcc-list entries must be positive");

  Manifest m;
  m.command = "sweep-npcc";
  const ArmConfig base = load_or_default(a.config, m);
  const PressureProfile profile = resolve_profile(a.profile, base.n_segments, m);
  if (!(a.record_interval >= a.dt)) throw UsageError("--record-interval must be at least --dt");

  // --dt is an upper bound: each run uses at most half its linear stability
  // limit, rounded down so that samples stay on the record grid.
  const std::vector<int> list(distinct.begin(), distinct.end());
  std::vector<SimulationOptions> opts(list.size());
  for (std::size_t i = 0; i < list.size(); ++i) {
    ArmConfig cfg = base;
    cfg.n_pcc = list[i];
    const double target = std::min(a.dt, 0.5 * stable_step_limit(make_system(cfg, parse_projection(a.coriolis))));
    opts[i].duration = a.duration;
    opts[i].record_interval = a.record_interval;
    opts[i].dt = a.record_interval / std::ceil(a.record_interval / target - 1e-9);
  }
  std::vector<Trajectory> runs(list.size());
  std::vector<std::exception_ptr> errors(list.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < list.size(); i = next++) {
      try {
        ArmConfig cfg = base;
        cfg.n_pcc = list[i];
        runs[i] = simulate(make_system(cfg, parse_projection(a.coriolis)), profile, opts[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int n_threads = std::min<int>(thread_count(), static_cast<int>(list.size()));
  std::vector<std::thread> pool;
  for (int t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  fs::create_directories(a.out_dir);
  for (std::size_t i = 0; i < list.size(); ++i) {
    const fs::path dir = fs::path(a.out_dir) / ("npcc_" + std::to_string(list[i]));
    fs::create_directories(dir);
    write_csv_file(dir / "trajectory.csv", trajectory_table(runs[i]));
    m.outputs.push_back((dir / "trajectory.csv").string());
  }

  // The finest discretization serves as reference.
  const Trajectory& reference = runs.back();
  CsvTable summary;
  summary.header = {"n_pcc", "dt", "mean_err"};
  for (int s = 0; s < base.n_segments; ++s) summary.header.push_back("mean_err_seg" + std::to_string(s + 1));
  for (std::size_t i = 0; i < list.size(); ++i) {
    const TipError err = tip_error(runs[i], reference);
    std::vector<double> row{static_cast<double>(list[i]), opts[i].dt, err.mean_all};
    row.insert(row.end(), err.mean.begin(), err.mean.end());
    summary.rows.push_back(std::move(row));
    out << "n_pcc " << list[i] << " (dt " << format_double(opts[i].dt) << " s): mean tip error "
        << format_double(err.mean_all) << " m\n";
  }
  const fs::path summary_path = fs::path(a.out_dir) / "summary.csv";
  write_csv_file(summary_path, summary);
  m.outputs.push_back(summary_path.string());
  std::vector<double> dt_used;
  for (const auto& o : opts) dt_used.push_back(o.dt);
  m.flags = {{"profile", a.profile}, {"npcc_list", list}, {"duration", a.duration},
             {"dt", a.dt}, {"dt_used", dt_used}, {"record_interval", a.record_interval}, {"coriolis", a.coriolis},
             {"reference_npcc", list.back()}};
  m.write(fs::path(a.out_dir) / "manifest.json");
  return kExitOk;
}

// ---- characterize -----------------------------------------------------------

struct CharacterizeArgs {
  std::string config, dataset, out = "material.csv";
  int segment = 0;
  double window = CharacterizationOptions{}.window;
  double edge_trim = CharacterizationOptions{}.edge_trim;
};

int cmd_characterize(const CharacterizeArgs& a, std::ostream& out) {
  Manifest m;
  m.command = "characterize";
  const ArmConfig cfg = load_or_default(a.config, m);
  if (a.segment < 0 || a.segment >= cfg.n_segments) throw UsageError("--segment out of range");
  m.input("dataset", a.dataset);
  const auto samples = characterization_from_table(read_csv_file(a.dataset));
  CharacterizationOptions opt;
  opt.window = a.window;
  opt.edge_trim = a.edge_trim;

  MaterialFit fit;
  try {
    fit = characterize(cfg, a.segment, samples, opt);
  } catch (const IdentifiabilityError& e) {
    throw IdentifiabilityError(std::string(e.what()) +
                               "; the damping coefficient is only observable when the segment moves");
  }

  CsvTable table;
  table.header = {"segment", "mu", "rho", "residual_norm", "samples"};
  table.rows.push_back({static_cast<double>(a.segment), fit.params.mu, fit.params.rho, fit.residual_norm,
                        static_cast<double>(samples.size())});
  ensure_parent(a.out);
  write_csv_file(a.out, table);
  m.outputs.push_back(a.out);
  m.flags = {{"segment", a.segment}, {"window", a.window}, {"edge_trim", a.edge_trim}};
  m.write(manifest_path(a.out));
  out << "segment " << a.segment << ": mu = " << format_double(fit.params.mu)
      << " Pa, rho = " << format_double(fit.params.rho) << " Pa*s, residual = "
      << format_double(fit.residual_norm) << '\n';
  return kExitOk;
}

// ---- static -----------------------------------------------------------------

struct StaticArgs {
  std::string config, pressures, out = "state.csv";
  std::vector<double> tip_force;
  int npcc = 0;
  double sensor_noise = 0.0;
  std::uint64_t seed = 0;
};

int cmd_static(const StaticArgs& a, std::ostream& out) {
  Manifest m;
  m.command = "static";
  ArmConfig cfg = load_or_default(a.config, m);
  if (a.npcc > 0) cfg.n_pcc = a.npcc;
  const ArmSystem sys = make_system(cfg);
  m.input("pressures", a.pressures);
  const auto rows = select_columns(read_csv_file(a.pressures), pressure_columns(cfg.n_segments), a.pressures);
  const Eigen::Vector3d f = a.tip_force.empty() ? Eigen::Vector3d::Zero()
                                                : Eigen::Vector3d(a.tip_force[0], a.tip_force[1], a.tip_force[2]);
  const SensorModel sensors = sensor_matrix(cfg);

  CsvTable table;
  table.header = pressure_columns(cfg.n_segments);
  for (const auto& n : reading_columns(cfg.n_segments)) table.header.push_back(n);
  for (int i = 0; i < sys.n_free(); ++i) table.header.push_back("q_" + std::to_string(i));
  table.header.insert(table.header.end(), {"tip_x", "tip_y", "tip_z"});
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const Eigen::VectorXd q = static_equilibrium(sys, rows[k], f);
    const Eigen::VectorXd s = simulate_reading(sensors, q, a.sensor_noise, a.seed + k);
    const Eigen::Vector3d tip = segment_tip_positions(sys.layout(), q).back();
    std::vector<double> row(rows[k].data(), rows[k].data() + rows[k].size());
    row.insert(row.end(), s.data(), s.data() + s.size());
    row.insert(row.end(), q.data(), q.data() + q.size());
    row.insert(row.end(), {tip.x(), tip.y(), tip.z()});
    table.rows.push_back(std::move(row));
  }
  ensure_parent(a.out);
  write_csv_file(a.out, table);
  m.outputs.push_back(a.out);
  m.flags = {{"tip_force", a.tip_force}, {"npcc", cfg.n_pcc}, {"sensor_noise", a.sensor_noise}, {"seed", a.seed}};
  m.write(manifest_path(a.out));
  out << "wrote " << rows.size() << " static states to " << a.out << '\n';
  return kExitOk;
}

// ---- estimate ---------------------------------------------------------------

struct EstimateArgs {
  std::string config, pressures, reading, tare_state, out = "estimate.csv";
  double reg = kDefaultForceRegularization;
  int npcc = 0;
  int relinearize = 0;
  std::string tare_mode = "residual";
};

int cmd_estimate(const EstimateArgs& a, std::ostream& out) {
  Manifest m;
  m.command = "estimate";
  ArmConfig cfg = load_or_default(a.config, m);
  if (a.npcc > 0) cfg.n_pcc = a.npcc;
  const ArmSystem sys = make_system(cfg);
  const int n_seg = cfg.n_segments;

  m.input("pressures", a.pressures);
  m.input("sensor_reading", a.reading);
  const auto p_rows = select_columns(read_csv_file(a.pressures), pressure_columns(n_seg), a.pressures);
  const CsvTable reading_csv = read_csv_file(a.reading);
  check_reading_width(reading_csv, n_seg, a.reading);
  const auto s_rows = select_columns(reading_csv, reading_columns(n_seg), a.reading);
  if (p_rows.size() != s_rows.size()) {
    throw UsageError("pressure and sensor-reading files differ in row count (" + std::to_string(p_rows.size()) +
                     " vs " + std::to_string(s_rows.size()) + ")");
  }

  EstimationOptions opt;
  opt.relinearize_iterations = a.relinearize;
  const TareMode mode = a.tare_mode == "literal" ? TareMode::kLiteral : TareMode::kResidual;

  std::optional<Eigen::VectorXd> f0;
  if (!a.tare_state.empty()) {
    m.input("tare_state", a.tare_state);
    const CsvTable tare_csv = read_csv_file(a.tare_state);
    check_reading_width(tare_csv, n_seg, a.tare_state);
    const auto tp = select_columns(tare_csv, pressure_columns(n_seg), a.tare_state);
    const auto ts = select_columns(tare_csv, reading_columns(n_seg), a.tare_state);
    const Eigen::VectorXd q_tare = correct_pose(sys, tp.front(), ts.front(), opt);
    f0 = tare(sys, tp.front(), q_tare, mode, opt);
  }

  CsvTable table;
  for (int i = 0; i < sys.n_free(); ++i) table.header.push_back("q_" + std::to_string(i));
  if (f0) {
    for (int i = 0; i < sys.n_free(); ++i) table.header.push_back("f0_" + std::to_string(i));
    table.header.insert(table.header.end(), {"fx", "fy", "fz"});
  }
  for (std::size_t k = 0; k < p_rows.size(); ++k) {
    std::vector<double> row;
    if (f0) {
      const ForceEstimate est = estimate_force(sys, p_rows[k], s_rows[k], *f0, a.reg, opt);
      row.assign(est.q.data(), est.q.data() + est.q.size());
      row.insert(row.end(), f0->data(), f0->data() + f0->size());
      row.insert(row.end(), {est.force.x(), est.force.y(), est.force.z()});
      out << "row " << k << ": f_ext = (" << format_double(est.force.x()) << ", " << format_double(est.force.y())
          << ", " << format_double(est.force.z()) << ") N, |f_ext| = " << format_double(est.force.norm()) << " N\n";
    } else {
      const Eigen::VectorXd q = correct_pose(sys, p_rows[k], s_rows[k], opt);
      row.assign(q.data(), q.data() + q.size());
      out << "row " << k << ": corrected pose with " << q.size() << " coordinates\n";
    }
    table.rows.push_back(std::move(row));
  }
  ensure_parent(a.out);
  write_csv_file(a.out, table);
  m.outputs.push_back(a.out);
  m.flags = {{"reg", a.reg}, {"npcc", cfg.n_pcc}, {"relinearize", a.relinearize}, {"tare_mode", a.tare_mode}};
  m.write(manifest_path(a.out));
  return kExitOk;
}

// ---- default-config ---------------------------------------------------------

int cmd_default_config(const std::string& path, std::ostream& out) {
  const std::string text = config_to_text(default_config());
  if (path.empty()) {
    out << text << '\n';
    return kExitOk;
  }
  ensure_parent(path);
  std::ofstream f(path);
  if (!f) throw UsageError("cannot write " + path);
  f << text << '\n';
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Soft continuum arm simulation and proprioceptive estimation", "pccarm"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kEngineVersion));

  SimulateArgs sim;
  auto* c_sim = app.add_subcommand("simulate", "Integrate the arm dynamics under a pressure profile");
  c_sim->add_option("--config", sim.config, "Arm configuration (JSON); built-in default when omitted");
  c_sim->add_option("--profile", sim.profile, "Builtin profile name or CSV path (t, p_0, ...)");
  c_sim->add_option("--duration", sim.duration, "Simulated time, s")->check(CLI::PositiveNumber);
  c_sim->add_option("--dt", sim.dt, "Integration step, s")->check(CLI::PositiveNumber);
  c_sim->add_option("--record-interval", sim.record_interval, "Output sampling interval, s")->check(CLI::PositiveNumber);
  c_sim->add_option("--tip-force", sim.tip_force, "Constant tip force fx,fy,fz in N")->delimiter(',')->expected(3);
  c_sim->add_option("--npcc", sim.npcc, "Override elements per segment")->check(CLI::PositiveNumber);
  c_sim->add_option("--isolate-segment", sim.isolate, "Simulate one segment alone as a single element");
  c_sim->add_option("--segment", sim.segment, "Segment for --characterization-out");
  c_sim->add_option("--characterization-out", sim.characterization_out, "Write a characterization dataset CSV");
  c_sim->add_option("--sensor-out", sim.sensor_out, "Write simulated flex-sensor readings CSV");
  c_sim->add_option("--pressure-noise", sim.pressure_noise, "Relative pressure noise in the dataset")->check(CLI::NonNegativeNumber);
  c_sim->add_option("--angle-noise-deg", sim.angle_noise_deg, "Curvature noise in the dataset, deg")->check(CLI::NonNegativeNumber);
  c_sim->add_option("--sensor-noise", sim.sensor_noise, "Sensor noise standard deviation, rad")->check(CLI::NonNegativeNumber);
  c_sim->add_option("--seed", sim.seed, "Seed for synthetic noise");
  c_sim->add_option("--coriolis", sim.coriolis, "Velocity-term projection")->check(CLI::IsMember({"complete", "literal"}));
  c_sim->add_option("--out", sim.out, "Trajectory CSV");

  SweepArgs sweep;
  auto* c_sweep = app.add_subcommand("sweep-npcc", "Simulate at several element counts and compare tip paths");
  c_sweep->add_option("--config", sweep.config, "Arm configuration (JSON)");
  c_sweep->add_option("--profile", sweep.profile, "Builtin profile name or CSV path");
  c_sweep->add_option("--npcc-list", sweep.npcc_list, "Comma-separated element counts")->delimiter(',');
  c_sweep->add_option("--out-dir", sweep.out_dir, "Output directory");
  c_sweep->add_option("--duration", sweep.duration, "Simulated time, s")->check(CLI::PositiveNumber);
  c_sweep->add_option("--dt", sweep.dt, "Largest integration step, s (reduced per run for stability)")->check(CLI::PositiveNumber);
  c_sweep->add_option("--record-interval", sweep.record_interval, "Output sampling interval, s")->check(CLI::PositiveNumber);
  c_sweep->add_option("--coriolis", sweep.coriolis, "Velocity-term projection")->check(CLI::IsMember({"complete", "literal"}));

  CharacterizeArgs ch;
  auto* c_char = app.add_subcommand("characterize", "Fit mu and rho of one segment from swing data");
  c_char->add_option("--config", ch.config, "Arm configuration (JSON)");
  c_char->add_option("dataset", ch.dataset, "Characterization CSV (t, qx, qy, p_0, p_1, p_2)")->required();
  c_char->add_option("--segment", ch.segment, "Segment index");
  c_char->add_option("--window", ch.window, "Polynomial window, s (<= 0: whole dataset)");
  c_char->add_option("--edge-trim", ch.edge_trim, "Fraction of each window dropped at both ends")
      ->check(CLI::Range(0.0, 0.49));
  c_char->add_option("--out", ch.out, "Result CSV");

  StaticArgs st;
  auto* c_static = app.add_subcommand("static", "Static equilibria and sensor readings for given pressures");
  c_static->add_option("--config", st.config, "Arm configuration (JSON)");
  c_static->add_option("--pressures", st.pressures, "CSV with p_0 ... columns")->required();
  c_static->add_option("--tip-force", st.tip_force, "Tip force fx,fy,fz in N")->delimiter(',')->expected(3);
  c_static->add_option("--npcc", st.npcc, "Override elements per segment")->check(CLI::PositiveNumber);
  c_static->add_option("--sensor-noise", st.sensor_noise, "Sensor noise standard deviation, rad")->check(CLI::NonNegativeNumber);
  c_static->add_option("--seed", st.seed, "Seed for synthetic sensor noise");
  c_static->add_option("--out", st.out, "State CSV");

  EstimateArgs est;
  auto* c_est = app.add_subcommand("estimate", "Correct the pose and estimate the tip force from sensor readings");
  c_est->add_option("--config", est.config, "Arm configuration (JSON)");
  c_est->add_option("--pressures", est.pressures, "CSV with p_0 ... columns")->required();
  c_est->add_option("--sensor-reading", est.reading, "CSV with sx_1, sy_1, ... columns")->required();
  c_est->add_option("--tare-state", est.tare_state, "Unloaded state CSV (p_* and sx_*/sy_* columns)");
  c_est->add_option("--reg", est.reg, "Force regularization weight r")->check(CLI::NonNegativeNumber);
  c_est->add_option("--npcc", est.npcc, "Override elements per segment")->check(CLI::PositiveNumber);
  c_est->add_option("--relinearize", est.relinearize, "Extra relinearization passes")->check(CLI::NonNegativeNumber);
  c_est->add_option("--tare-mode", est.tare_mode, "Tare definition")->check(CLI::IsMember({"residual", "literal"}));
  c_est->add_option("--out", est.out, "Result CSV");

  std::string config_out;
  auto* c_def = app.add_subcommand("default-config", "Print or write the built-in arm configuration");
  c_def->add_option("--out", config_out, "Output path (stdout when omitted)");

  std::vector<const char*> argv{"pccarm"};
  for (const auto& s : args) argv.push_back(s.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (c_sim->parsed()) return cmd_simulate(sim, out);
    if (c_sweep->parsed()) return cmd_sweep(sweep, out);
    if (c_char->parsed()) return cmd_characterize(ch, out);
    if (c_static->parsed()) return cmd_static(st, out);
    if (c_est->parsed()) return cmd_estimate(est, out);
    if (c_def->parsed()) return cmd_default_config(config_out, out);
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace pccarm
