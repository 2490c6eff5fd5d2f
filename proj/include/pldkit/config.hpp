#pragma once

#include <nlohmann/json_fwd.hpp>

#include <string>

#include "pldkit/adaptive_phase.hpp"
#include "pldkit/cavity_lock.hpp"
#include "pldkit/discretize.hpp"
#include "pldkit/lti.hpp"
#include "pldkit/lut.hpp"
#include "pldkit/pipeline.hpp"

namespace pldkit {

using Json = nlohmann::json;

Json load_json_file(const std::string& path);

/// Accepts either {"num": [...], "den": [...]} with ascending coefficients
/// or a keyword: "unity", "zero", "integrator", "gain:<k>",
/// "lowpass:<corner_hz>", "ho:<omega0_rad>,<q>", "aho:<omega0_rad>,<q>[,<omega_p_rad>]".
ContinuousTf tf_from_json(const Json& j);
ContinuousTf tf_from_keyword(const std::string& keyword);

/// {"a": [...], "b": [...], "fs": <Hz>}
DiscreteTf discrete_tf_from_json(const Json& j);
Json discrete_tf_to_json(const DiscreteTf& g);

/// {"clock_hz": ..., "stages": [{"name": ..., "cycles": ...}], "extra_delay_s": ...}
/// or the preset string "gva290".
Board board_from_json(const Json& j);

/// {"block_bits", "input_bits", "output_bits", "domain": [lo, hi], "range": [lo, hi]}
/// geometry; tabulation function supplied separately.
struct LutGeometry {
  long long block_bits = 4096;
  int input_bits = 8;
  int output_bits = 16;
  std::pair<double, double> domain{0.0, 1.0};
  std::pair<double, double> range{0.0, 1.0};
};
LutGeometry lut_geometry_from_json(const Json& j);

PulseConfig pulse_config_from_json(const Json& j);

LockPlant lock_plant_from_json(const Json& j);
LockDesignParams lock_design_params_from_json(const Json& j);
LockSimOptions lock_sim_options_from_json(const Json& j);
ReacquireScenario reacquire_scenario_from_json(const Json& j);

/// Named tabulation functions for the CLI: identity, sin, sqrt, invsqrt,
/// inverse, exp, log.
std::function<double(double)> named_function(const std::string& name);

}  // namespace pldkit
