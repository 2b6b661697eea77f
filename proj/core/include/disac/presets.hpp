#pragma once

#include <string>
#include <vector>

#include "disac/scenario.hpp"

namespace disac {

// Named deployments from the experiment section: "circular", "lshape",
// "random". Radar Tx/Rx coordinates and the three-target truth are verbatim;
// RRH and UE placements are fixed project choices shared by all presets.
Scenario preset_scenario(const std::string& name);

std::vector<std::string> preset_names();

struct PresetCheck {
  std::string name;
  bool ok = false;
  std::vector<std::string> mismatches;
};

// Compares the preset files in `dir` against the compiled-in coordinates.
std::vector<PresetCheck> verify_presets(const std::string& dir);

// Writes (or rewrites) the preset experiment configs into `dir`.
void write_preset_files(const std::string& dir);

}  // namespace disac
