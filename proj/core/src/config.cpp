#include "disac/config.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "disac/presets.hpp"
#include "json.hpp"

namespace disac {

using nlohmann::json;

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kCodesignConvergence:
      return "codesign-convergence";
    case ExperimentKind::kSystemSweep:
      return "system-sweep";
    case ExperimentKind::kAssociationPc:
      return "association-pc";
    case ExperimentKind::kTracking:
      return "tracking";
  }
  return "unknown";
}

ExperimentKind experiment_kind_from_string(const std::string& s) {
  if (s == "codesign-convergence") return ExperimentKind::kCodesignConvergence;
  if (s == "system-sweep") return ExperimentKind::kSystemSweep;
  if (s == "association-pc") return ExperimentKind::kAssociationPc;
  if (s == "tracking") return ExperimentKind::kTracking;
  throw std::invalid_argument("unknown experiment kind: " + s);
}

namespace {

void require_keys(const json& obj, const std::set<std::string>& allowed,
                  const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) {
      throw std::invalid_argument("unknown key \"" + key + "\" in " + where);
    }
  }
}

std::vector<Position2D> parse_positions(const json& arr,
                                        const std::string& where) {
  std::vector<Position2D> out;
  for (const auto& p : arr) {
    if (!p.is_array() || p.size() != 2) {
      throw std::invalid_argument(where + ": positions must be [x, y] pairs");
    }
    out.push_back({p[0].get<double>(), p[1].get<double>()});
  }
  return out;
}

json positions_to_json(const std::vector<Position2D>& v) {
  json arr = json::array();
  for (const auto& p : v) arr.push_back({p.x, p.y});
  return arr;
}

Scenario parse_scenario(const json& j) {
  require_keys(j,
               {"radar_tx", "radar_rx", "rrh", "ul_ue", "dl_ue", "targets",
                "carrier_freq_hz", "pri_s", "pulses_per_cpi",
                "range_cells_per_pri", "symbols_per_frame", "rrh_antennas",
                "ul_power_max", "dl_power_max", "radar_tx_power", "par_limit",
                "noise_var_radar", "noise_var_ul", "noise_var_dl",
                "rcs_variance", "si_attenuation", "si_residual_gain", "clutter_var",
                "speed_of_light"},
               "scenario");
  Scenario sc = default_parameters();
  sc.radar_tx = parse_positions(j.at("radar_tx"), "radar_tx");
  sc.radar_rx = parse_positions(j.at("radar_rx"), "radar_rx");
  if (j.contains("rrh")) sc.rrh = parse_positions(j["rrh"], "rrh");
  if (j.contains("ul_ue")) sc.ul_ue = parse_positions(j["ul_ue"], "ul_ue");
  if (j.contains("dl_ue")) sc.dl_ue = parse_positions(j["dl_ue"], "dl_ue");
  sc.targets.clear();
  if (j.contains("targets")) {
    for (const auto& t : j["targets"]) {
      if (!t.is_array() || t.size() != 4) {
        throw std::invalid_argument("targets must be [x, y, vx, vy] rows");
      }
      sc.targets.push_back({t[0].get<double>(), t[1].get<double>(),
                            t[2].get<double>(), t[3].get<double>()});
    }
  }
  auto scalar = [&](const char* key, double& field) {
    if (j.contains(key)) field = j.at(key).get<double>();
  };
  scalar("carrier_freq_hz", sc.carrier_freq_hz);
  scalar("pri_s", sc.pri_s);
  if (j.contains("pulses_per_cpi")) sc.pulses_per_cpi = j["pulses_per_cpi"];
  if (j.contains("range_cells_per_pri"))
    sc.range_cells_per_pri = j["range_cells_per_pri"];
  if (j.contains("symbols_per_frame"))
    sc.symbols_per_frame = j["symbols_per_frame"];
  if (j.contains("rrh_antennas")) sc.rrh_antennas = j["rrh_antennas"];
  scalar("ul_power_max", sc.ul_power_max);
  scalar("dl_power_max", sc.dl_power_max);
  if (j.contains("radar_tx_power")) {
    sc.radar_tx_power = j["radar_tx_power"].get<std::vector<double>>();
  } else {
    sc.radar_tx_power.assign(sc.radar_tx.size(), 1.0);
  }
  if (j.contains("par_limit")) {
    sc.par_limit = j["par_limit"].get<std::vector<double>>();
  } else {
    sc.par_limit.assign(sc.radar_tx.size(), 2.0);
  }
  scalar("noise_var_radar", sc.noise_var_radar);
  scalar("noise_var_ul", sc.noise_var_ul);
  scalar("noise_var_dl", sc.noise_var_dl);
  scalar("rcs_variance", sc.rcs_variance);
  scalar("si_attenuation", sc.si_attenuation);
  scalar("si_residual_gain", sc.si_residual_gain);
  scalar("clutter_var", sc.clutter_var);
  scalar("speed_of_light", sc.speed_of_light);
  return sc;
}

json scenario_to_json(const Scenario& sc) {
  json j;
  j["radar_tx"] = positions_to_json(sc.radar_tx);
  j["radar_rx"] = positions_to_json(sc.radar_rx);
  j["rrh"] = positions_to_json(sc.rrh);
  j["ul_ue"] = positions_to_json(sc.ul_ue);
  j["dl_ue"] = positions_to_json(sc.dl_ue);
  json targets = json::array();
  for (const auto& t : sc.targets) targets.push_back({t.x, t.y, t.vx, t.vy});
  j["targets"] = targets;
  j["carrier_freq_hz"] = sc.carrier_freq_hz;
  j["pri_s"] = sc.pri_s;
  j["pulses_per_cpi"] = sc.pulses_per_cpi;
  j["range_cells_per_pri"] = sc.range_cells_per_pri;
  j["symbols_per_frame"] = sc.symbols_per_frame;
  j["rrh_antennas"] = sc.rrh_antennas;
  j["ul_power_max"] = sc.ul_power_max;
  j["dl_power_max"] = sc.dl_power_max;
  j["radar_tx_power"] = sc.radar_tx_power;
  j["par_limit"] = sc.par_limit;
  j["noise_var_radar"] = sc.noise_var_radar;
  j["noise_var_ul"] = sc.noise_var_ul;
  j["noise_var_dl"] = sc.noise_var_dl;
  j["rcs_variance"] = sc.rcs_variance;
  j["si_attenuation"] = sc.si_attenuation;
  j["si_residual_gain"] = sc.si_residual_gain;
  j["clutter_var"] = sc.clutter_var;
  j["speed_of_light"] = sc.speed_of_light;
  return j;
}

}  // namespace

void ExperimentConfig::validate() const {
  std::ostringstream err;
  if (trials < 1) err << "trials must be >= 1; ";
  if (output_dir.empty()) err << "output_dir must not be empty; ";
  if (experiment == ExperimentKind::kAssociationPc) {
    if (association.target_counts.empty()) {
      err << "association.target_counts must not be empty; ";
    }
    for (int n : association.target_counts) {
      if (n < 1 || n > 8) err << "association target counts must be in [1,8]; ";
    }
    if (!(association.disc_radius_km > 0)) err << "disc radius must be > 0; ";
    if (association.speed_min < 0 ||
        association.speed_max < association.speed_min) {
      err << "invalid association speed range; ";
    }
  }
  if (experiment == ExperimentKind::kTracking) {
    if (tracking.cpis < 1) err << "tracking.cpis must be >= 1; ";
    if (!(tracking.detection_prob > 0 && tracking.detection_prob <= 1)) {
      err << "tracking.detection_prob must be in (0,1]; ";
    }
  }
  if (experiment == ExperimentKind::kSystemSweep && sweep.values.empty()) {
    err << "sweep.values must not be empty; ";
  }
  const std::string msg = err.str();
  if (!msg.empty()) throw std::invalid_argument("invalid config: " + msg);
  scenario.validate();
}

ExperimentConfig parse_config_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config parse error: ") + e.what());
  }
  require_keys(j,
               {"experiment", "preset", "scenario", "trials", "seed",
                "output_dir", "association", "tracking", "codesign", "sweep"},
               "config");
  ExperimentConfig cfg;
  cfg.experiment = experiment_kind_from_string(j.at("experiment"));
  if (j.contains("preset")) {
    cfg.preset = j["preset"];
    cfg.scenario = preset_scenario(cfg.preset);
    if (j.contains("scenario")) {
      throw std::invalid_argument(
          "config may give either a preset or an inline scenario, not both");
    }
  } else if (j.contains("scenario")) {
    cfg.scenario = parse_scenario(j["scenario"]);
  } else {
    throw std::invalid_argument("config needs a preset or an inline scenario");
  }
  if (j.contains("trials")) cfg.trials = j["trials"];
  if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("output_dir")) cfg.output_dir = j["output_dir"];

  if (j.contains("association")) {
    const json& a = j["association"];
    require_keys(a,
                 {"target_counts", "disc_radius_km", "speed_min", "speed_max",
                  "sigma_delay_s", "sigma_doppler_hz"},
                 "association");
    if (a.contains("target_counts"))
      cfg.association.target_counts = a["target_counts"].get<std::vector<int>>();
    if (a.contains("disc_radius_km"))
      cfg.association.disc_radius_km = a["disc_radius_km"];
    if (a.contains("speed_min")) cfg.association.speed_min = a["speed_min"];
    if (a.contains("speed_max")) cfg.association.speed_max = a["speed_max"];
    if (a.contains("sigma_delay_s"))
      cfg.association.sigma_delay_s = a["sigma_delay_s"];
    if (a.contains("sigma_doppler_hz"))
      cfg.association.sigma_doppler_hz = a["sigma_doppler_hz"];
  }
  if (j.contains("tracking")) {
    const json& t = j["tracking"];
    require_keys(t,
                 {"cpis", "sigma_delay_s", "sigma_doppler_hz",
                  "detection_prob", "false_alarm_prob", "process_noise",
                  "gate_probability", "init_pos_sigma_km", "init_vel_sigma",
                  "max_consecutive_misses"},
                 "tracking");
    if (t.contains("cpis")) cfg.tracking.cpis = t["cpis"];
    if (t.contains("sigma_delay_s")) cfg.tracking.sigma_delay_s = t["sigma_delay_s"];
    if (t.contains("sigma_doppler_hz"))
      cfg.tracking.sigma_doppler_hz = t["sigma_doppler_hz"];
    if (t.contains("detection_prob"))
      cfg.tracking.detection_prob = t["detection_prob"];
    if (t.contains("false_alarm_prob"))
      cfg.tracking.false_alarm_prob = t["false_alarm_prob"];
    if (t.contains("process_noise")) cfg.tracking.process_noise = t["process_noise"];
    if (t.contains("gate_probability"))
      cfg.tracking.gate_probability = t["gate_probability"];
    if (t.contains("init_pos_sigma_km"))
      cfg.tracking.init_pos_sigma_km = t["init_pos_sigma_km"];
    if (t.contains("init_vel_sigma"))
      cfg.tracking.init_vel_sigma = t["init_vel_sigma"];
    if (t.contains("max_consecutive_misses"))
      cfg.tracking.max_consecutive_misses = t["max_consecutive_misses"];
  }
  if (j.contains("codesign")) {
    const json& c = j["codesign"];
    require_keys(c, {"bcd_iters", "dual_iters", "step_rule", "csi_error"},
                 "codesign");
    if (c.contains("bcd_iters")) cfg.codesign.bcd_iters = c["bcd_iters"];
    if (c.contains("dual_iters")) cfg.codesign.dual_iters = c["dual_iters"];
    if (c.contains("step_rule")) cfg.codesign.step_rule = c["step_rule"];
    if (c.contains("csi_error")) cfg.codesign.csi_error = c["csi_error"];
  }
  if (j.contains("sweep")) {
    const json& s = j["sweep"];
    require_keys(s, {"axis", "values"}, "sweep");
    if (s.contains("axis")) cfg.sweep.axis = s["axis"];
    if (s.contains("values")) cfg.sweep.values = s["values"].get<std::vector<double>>();
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

std::string config_to_json_text(const ExperimentConfig& cfg) {
  json j;
  j["experiment"] = to_string(cfg.experiment);
  j["scenario"] = scenario_to_json(cfg.scenario);
  j["trials"] = cfg.trials;
  j["seed"] = cfg.seed;
  j["output_dir"] = cfg.output_dir;
  j["association"] = {
      {"target_counts", cfg.association.target_counts},
      {"disc_radius_km", cfg.association.disc_radius_km},
      {"speed_min", cfg.association.speed_min},
      {"speed_max", cfg.association.speed_max},
      {"sigma_delay_s", cfg.association.sigma_delay_s},
      {"sigma_doppler_hz", cfg.association.sigma_doppler_hz},
  };
  j["tracking"] = {
      {"cpis", cfg.tracking.cpis},
      {"sigma_delay_s", cfg.tracking.sigma_delay_s},
      {"sigma_doppler_hz", cfg.tracking.sigma_doppler_hz},
      {"detection_prob", cfg.tracking.detection_prob},
      {"false_alarm_prob", cfg.tracking.false_alarm_prob},
      {"process_noise", cfg.tracking.process_noise},
      {"gate_probability", cfg.tracking.gate_probability},
      {"init_pos_sigma_km", cfg.tracking.init_pos_sigma_km},
      {"init_vel_sigma", cfg.tracking.init_vel_sigma},
      {"max_consecutive_misses", cfg.tracking.max_consecutive_misses},
  };
  j["codesign"] = {
      {"bcd_iters", cfg.codesign.bcd_iters},
      {"dual_iters", cfg.codesign.dual_iters},
      {"step_rule", cfg.codesign.step_rule},
      {"csi_error", cfg.codesign.csi_error},
  };
  j["sweep"] = {{"axis", cfg.sweep.axis}, {"values", cfg.sweep.values}};
  return j.dump(2) + "\n";
}

void save_config(const ExperimentConfig& cfg, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write config file: " + path);
  out << config_to_json_text(cfg);
}

}  // namespace disac
