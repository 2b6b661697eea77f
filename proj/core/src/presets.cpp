#include "disac/presets.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "disac/config.hpp"
#include "json.hpp"

namespace disac {

namespace {

// Verbatim radar node coordinates of the three array configurations.
const std::vector<Position2D> kCircularTx = {
    {-10, 10}, {0, 17.32}, {20, 17.32}, {30, 10}};
const std::vector<Position2D> kCircularRx = {
    {-10, -10}, {0, -17.32}, {20, -17.32}, {30, -10}};
const std::vector<Position2D> kLshapeTx = {{0, 0}, {0, 5}, {0, 10}, {0, 15}};
const std::vector<Position2D> kLshapeRx = {
    {5, -5}, {10, -5}, {15, -5}, {20, -5}};
const std::vector<Position2D> kRandomTx = {
    {0, 0}, {-10, -5}, {-15, -5}, {-20, -20}};
const std::vector<Position2D> kRandomRx = {
    {-5, 0}, {-10, -10}, {-15, -5}, {-20, -10}};

// Stated initial states of the three tracked targets.
const std::vector<TargetState> kTargets = {
    {25, 6, -0.4, -0.2}, {15, 16, 0.4, -0.2}, {10, 10, -0.1, 0.2}};

// RRH/UE placements are not specified by the experiment lists; these fixed
// positions sit between the arrays at low-kilometer ranges.
const std::vector<Position2D> kRrh = {{2, 1}, {7, 1}, {12, 1}, {17, 1}};
const std::vector<Position2D> kUlUe = {{4, 3}, {15, 3}};
const std::vector<Position2D> kDlUe = {{6, -2}, {13, -2}};

void fill_common(Scenario& sc) {
  sc.rrh = kRrh;
  sc.ul_ue = kUlUe;
  sc.dl_ue = kDlUe;
  sc.targets = kTargets;
  sc.radar_tx_power.assign(sc.radar_tx.size(), 1.0);
  sc.par_limit.assign(sc.radar_tx.size(), 2.0);
}

bool same_positions(const std::vector<Position2D>& a,
                    const std::vector<Position2D>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].x != b[i].x || a[i].y != b[i].y) return false;
  }
  return true;
}

}  // namespace

Scenario preset_scenario(const std::string& name) {
  Scenario sc = default_parameters();
  if (name == "circular") {
    sc.radar_tx = kCircularTx;
    sc.radar_rx = kCircularRx;
  } else if (name == "lshape") {
    sc.radar_tx = kLshapeTx;
    sc.radar_rx = kLshapeRx;
  } else if (name == "random") {
    sc.radar_tx = kRandomTx;
    sc.radar_rx = kRandomRx;
  } else {
    throw std::invalid_argument("unknown preset: " + name);
  }
  fill_common(sc);
  sc.validate();
  return sc;
}

std::vector<std::string> preset_names() {
  return {"circular", "lshape", "random"};
}

std::vector<PresetCheck> verify_presets(const std::string& dir) {
  std::vector<PresetCheck> out;
  for (const std::string& name : preset_names()) {
    PresetCheck check;
    check.name = name;
    const std::string path = dir + "/" + name + ".json";
    try {
      const ExperimentConfig cfg = load_config(path);
      const Scenario expected = preset_scenario(name);
      if (!same_positions(cfg.scenario.radar_tx, expected.radar_tx)) {
        check.mismatches.push_back("radar_tx coordinates differ");
      }
      if (!same_positions(cfg.scenario.radar_rx, expected.radar_rx)) {
        check.mismatches.push_back("radar_rx coordinates differ");
      }
      if (cfg.scenario.targets.size() != expected.targets.size()) {
        check.mismatches.push_back("target count differs");
      } else {
        for (std::size_t t = 0; t < expected.targets.size(); ++t) {
          const auto& a = cfg.scenario.targets[t];
          const auto& b = expected.targets[t];
          if (a.x != b.x || a.y != b.y || a.vx != b.vx || a.vy != b.vy) {
            check.mismatches.push_back("target state differs");
            break;
          }
        }
      }
    } catch (const std::exception& e) {
      check.mismatches.push_back(e.what());
    }
    check.ok = check.mismatches.empty();
    out.push_back(std::move(check));
  }
  return out;
}

void write_preset_files(const std::string& dir) {
  std::filesystem::create_directories(dir);
  for (const std::string& name : preset_names()) {
    ExperimentConfig cfg;
    cfg.experiment = ExperimentKind::kTracking;
    cfg.scenario = preset_scenario(name);
    cfg.trials = 1;
    cfg.seed = 1;
    cfg.output_dir = "out/" + name;
    save_config(cfg, dir + "/" + name + ".json");
  }
}

}  // namespace disac
