#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include <json.hpp>

#include "nestcal/error.hpp"
#include "nestcal/harness.hpp"

namespace nestcal {

ArrayGeometry ExperimentConfig::geometry() const {
  return ArrayGeometry(n1, n2, spacing_factor, unit_spacing, wavelength);
}

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorKind::ConfigInvalid, what);
}

void check_grid(const std::vector<double>& grid, const char* name) {
  require(!grid.empty(), std::string(name) + " is empty");
  for (std::size_t k = 1; k < grid.size(); ++k) {
    require(grid[k] > grid[k - 1], std::string(name) + " must be strictly increasing");
  }
}

}  // namespace

void ExperimentConfig::validate() const {
  require(trials >= 1, "trials must be >= 1");
  require(threads >= 0, "threads must be >= 0");
  std::optional<ArrayGeometry> geom;
  try {
    geom.emplace(geometry());
  } catch (const Error& e) {
    throw Error(ErrorKind::ConfigInvalid, e.what());
  }
  try {
    truth.validate(geom->size());
  } catch (const Error& e) {
    throw Error(ErrorKind::ConfigInvalid, std::string("truth: ") + e.what());
  }
  require(truth.satisfies_references(),
          "truth must satisfy the references gain[0] = 1, phase[0] = phase[1] = 0");
  if (mode.kind == SystemMode::ConventionalThirdRef && mode.third_ref_sensor >= 0 &&
      mode.third_ref_sensor < geom->size()) {
    require(truth.phases(mode.third_ref_sensor) == 0.0,
            "truth phase of the third reference sensor must be 0");
  }
  try {
    build_design_matrix(*geom, mode);
  } catch (const Error& e) {
    throw Error(ErrorKind::ConfigInvalid, e.what());
  }
  require(source_power > 0.0, "source power must be positive");
  require(!source_angles_deg.empty(), "at least one source is required");
  try {
    SourceScene{source_angles_deg, std::vector<double>(source_angles_deg.size(), source_power), 1.0}
        .validate();
  } catch (const Error& e) {
    throw Error(ErrorKind::ConfigInvalid, e.what());
  }
  if (axis == SweepAxis::SampleCount) {
    check_grid(t_grid, "t_grid");
    for (double t : t_grid) {
      require(t >= 1.0 && t == std::floor(t), "t_grid entries must be positive integers");
    }
  } else {
    check_grid(snr_grid_db, "snr_grid_db");
    require(fixed_t >= 1, "fixed_t must be >= 1");
  }
  require(weights.regularization_floor >= 0.0, "regularization_floor must be >= 0");
}

ExperimentConfig default_config() {
  ExperimentConfig c;
  const double deg = std::numbers::pi / 180.0;
  c.truth.gains = Eigen::VectorXd(8);
  c.truth.gains << 1.0, 1.3, 1.1, 0.7, 2.2, 0.9, 1.2, 0.8;
  c.truth.phases = Eigen::VectorXd(8);
  c.truth.phases << 0.0, 0.0, 5.0, 11.0, -8.0, 3.0, -7.0, 9.0;
  c.truth.phases *= deg;
  c.source_angles_deg = uniform_angles(15, 20.0, 70.0);
  c.t_grid = {500, 1000, 2000, 4000, 8000};
  c.snr_grid_db = {0, 5, 10, 15, 20};
  return c;
}

ExperimentConfig default_doa_config() {
  ExperimentConfig c = default_config();
  c.source_angles_deg = {33.0, 45.0, 57.0};
  c.axis = SweepAxis::Snr;
  return c;
}

DesignMode parse_design_mode(const std::string& name, int n1, int third_ref_sensor) {
  if (name == "proposed") return DesignMode::proposed();
  if (name == "conventional") return DesignMode::conventional();
  if (name == "third-ref") {
    return DesignMode::third_reference(third_ref_sensor >= 0 ? third_ref_sensor : n1 + 1);
  }
  throw Error(ErrorKind::ConfigInvalid, "unknown mode '" + name + "'");
}

ExperimentConfig parse_config(const std::string& json_text) {
  using nlohmann::json;
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ConfigInvalid, std::string("malformed JSON: ") + e.what());
  }
  require(j.is_object(), "config must be a JSON object");

  static const std::set<std::string> known = {
      "n1", "n2", "spacing_factor", "unit_spacing", "wavelength", "gains", "phases_deg",
      "source_angles_deg", "uniform_sources", "source_power", "t_grid", "snr_grid_db",
      "fixed_t", "fixed_snr_db", "trials", "seed", "mode", "third_ref_sensor", "threads",
      "regularization_floor", "out_dir"};
  for (const auto& item : j.items()) {
    require(known.count(item.key()) > 0, "unknown config key '" + item.key() + "'");
  }

  ExperimentConfig c = default_config();
  try {
    c.n1 = j.value("n1", c.n1);
    c.n2 = j.value("n2", c.n2);
    c.spacing_factor = j.value("spacing_factor", c.spacing_factor);
    c.unit_spacing = j.value("unit_spacing", c.unit_spacing);
    c.wavelength = j.value("wavelength", c.wavelength);
    if (j.contains("gains")) {
      const auto g = j.at("gains").get<std::vector<double>>();
      c.truth.gains = Eigen::Map<const Eigen::VectorXd>(g.data(), static_cast<Eigen::Index>(g.size()));
    }
    if (j.contains("phases_deg")) {
      const auto p = j.at("phases_deg").get<std::vector<double>>();
      c.truth.phases = Eigen::Map<const Eigen::VectorXd>(p.data(), static_cast<Eigen::Index>(p.size())) *
                       (std::numbers::pi / 180.0);
    }
    if (j.contains("source_angles_deg")) {
      c.source_angles_deg = j.at("source_angles_deg").get<std::vector<double>>();
    } else if (j.contains("uniform_sources")) {
      const auto& u = j.at("uniform_sources");
      c.source_angles_deg = uniform_angles(u.at("count").get<int>(), u.at("lo_deg").get<double>(),
                                           u.at("hi_deg").get<double>());
    }
    c.source_power = j.value("source_power", c.source_power);
    if (j.contains("t_grid")) c.t_grid = j.at("t_grid").get<std::vector<double>>();
    if (j.contains("snr_grid_db")) c.snr_grid_db = j.at("snr_grid_db").get<std::vector<double>>();
    c.fixed_t = j.value("fixed_t", c.fixed_t);
    c.fixed_snr_db = j.value("fixed_snr_db", c.fixed_snr_db);
    c.trials = j.value("trials", c.trials);
    c.seed = j.value("seed", c.seed);
    c.threads = j.value("threads", c.threads);
    c.weights.regularization_floor = j.value("regularization_floor", c.weights.regularization_floor);
    if (j.contains("out_dir")) c.out_dir = j.at("out_dir").get<std::string>();
    c.mode = parse_design_mode(j.value("mode", std::string("proposed")), c.n1,
                               j.value("third_ref_sensor", -1));
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ConfigInvalid, std::string("bad config value: ") + e.what());
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ConfigInvalid, "cannot open config " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

}  // namespace nestcal
