#include "pldkit/config.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>

namespace pldkit {

namespace {

Eigen::VectorXd vector_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) {
    throw std::invalid_argument("config: expected a non-empty coefficient array");
  }
  Eigen::VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  return v;
}

std::vector<double> split_args(const std::string& text) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t next = text.find(',', pos);
    if (next == std::string::npos) next = text.size();
    out.push_back(std::stod(text.substr(pos, next - pos)));
    pos = next + 1;
  }
  return out;
}

}  // namespace

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  Json j;
  in >> j;
  return j;
}

ContinuousTf tf_from_keyword(const std::string& keyword) {
  const auto colon = keyword.find(':');
  const std::string head = keyword.substr(0, colon);
  const std::string args = colon == std::string::npos ? "" : keyword.substr(colon + 1);

  if (head == "unity") return tf_unity();
  if (head == "zero") return tf_zero();
  if (head == "integrator") return tf_integrator();
  if (head == "gain") {
    const auto a = split_args(args);
    if (a.size() != 1) throw std::invalid_argument("gain:<k> takes one argument");
    return tf_gain(a[0]);
  }
  if (head == "lowpass") {
    const auto a = split_args(args);
    if (a.size() != 1) throw std::invalid_argument("lowpass:<corner_hz> takes one argument");
    return low_pass(2.0 * std::numbers::pi * a[0]);
  }
  if (head == "ho") {
    const auto a = split_args(args);
    if (a.size() != 2) throw std::invalid_argument("ho:<omega0>,<q> takes two arguments");
    return harmonic_oscillator(a[0], a[1]);
  }
  if (head == "aho") {
    const auto a = split_args(args);
    if (a.size() < 2 || a.size() > 3) {
      throw std::invalid_argument("aho:<omega0>,<q>[,<omega_p>] takes two or three arguments");
    }
    return aho_compensator(a[0], a[1], a.size() == 3 ? a[2] : 0.0);
  }
  throw std::invalid_argument("unknown transfer-function keyword: " + keyword);
}

ContinuousTf tf_from_json(const Json& j) {
  if (j.is_string()) return tf_from_keyword(j.get<std::string>());
  if (j.is_object() && j.contains("num") && j.contains("den")) {
    return make_tf(vector_from_json(j["num"]), vector_from_json(j["den"]));
  }
  if (j.is_object() && j.contains("resonances")) {
    std::vector<std::tuple<double, double, double>> modes;
    for (const auto& m : j["resonances"]) {
      modes.emplace_back(m.at("f0_hz").get<double>(), m.at("q").get<double>(),
                         m.value("weight", 1.0));
    }
    return pzt_multiresonance(modes);
  }
  throw std::invalid_argument("config: transfer function must be a keyword string, "
                              "{num, den}, or {resonances}");
}

DiscreteTf discrete_tf_from_json(const Json& j) {
  return make_discrete_tf(vector_from_json(j.at("a")), vector_from_json(j.at("b")),
                          j.at("fs").get<double>());
}

Json discrete_tf_to_json(const DiscreteTf& g) {
  Json j;
  j["a"] = std::vector<double>(g.a.data(), g.a.data() + g.a.size());
  j["b"] = std::vector<double>(g.b.data(), g.b.data() + g.b.size());
  j["fs"] = g.sample_rate();
  return j;
}

Board board_from_json(const Json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "gva290") return gva290_board();
    throw std::invalid_argument("unknown board preset: " + j.get<std::string>());
  }
  Board b;
  b.clock_hz = j.at("clock_hz").get<double>();
  b.extra_delay_s = j.value("extra_delay_s", 0.0);
  if (j.contains("stages")) {
    for (const auto& s : j["stages"]) {
      b.stages.push_back(Stage{s.at("name").get<std::string>(), s.at("cycles").get<int>(),
                               nullptr});
    }
  }
  return b;
}

LutGeometry lut_geometry_from_json(const Json& j) {
  LutGeometry g;
  g.block_bits = j.value("block_bits", 4096LL);
  g.input_bits = j.at("input_bits").get<int>();
  g.output_bits = j.at("output_bits").get<int>();
  if (j.contains("domain")) {
    g.domain = {j["domain"][0].get<double>(), j["domain"][1].get<double>()};
  }
  if (j.contains("range")) {
    g.range = {j["range"][0].get<double>(), j["range"][1].get<double>()};
  }
  return g;
}

PulseConfig pulse_config_from_json(const Json& j) {
  PulseConfig cfg;
  cfg.duration_samples = j.value("duration_samples", 1000);
  cfg.amplitude = j.value("amplitude", 5.0);
  cfg.true_phase = j.value("true_phase", 0.0);
  cfg.loop_delay_samples = j.value("loop_delay_samples", 0);
  cfg.seed = j.value("seed", static_cast<std::uint64_t>(1));
  cfg.noise_scale = j.value("noise_scale", 1.0);

  const std::string alg = j.value("algorithm", std::string("integrator"));
  if (alg == "mark1") {
    cfg.algorithm = PhaseAlgorithm::mark1_arg_a;
  } else if (alg == "integrator") {
    cfg.algorithm = PhaseAlgorithm::gain_scheduled_integrator;
  } else if (alg == "mark2") {
    cfg.algorithm = PhaseAlgorithm::mark2_epsilon;
    if (j.contains("epsilon")) {
      const double eps = j["epsilon"].get<double>();
      cfg.epsilon = [eps](double, std::complex<double>, std::complex<double>) { return eps; };
    }
  } else {
    throw std::invalid_argument("adphi: unknown algorithm \"" + alg + "\"");
  }

  const std::string gain = j.value("gain_source", std::string("direct"));
  if (gain == "lut") {
    cfg.gain_source = GainSource::lut;
    LutGeometry geo;
    geo.input_bits = 12;
    geo.output_bits = 16;
    geo.domain = {cfg.dt(), 1.0};
    geo.range = {1.0, 1.0 / std::sqrt(cfg.dt())};
    if (j.contains("gain_table")) geo = lut_geometry_from_json(j["gain_table"]);
    cfg.gain_table = RamBlock::tabulate([](double v) { return 1.0 / std::sqrt(v); },
                                        geo.input_bits, geo.output_bits, geo.domain, geo.range,
                                        geo.block_bits);
  } else if (gain != "direct") {
    throw std::invalid_argument("adphi: unknown gain_source \"" + gain + "\"");
  }
  return cfg;
}

LockPlant lock_plant_from_json(const Json& j) {
  LockPlant p = default_lock_plant();
  if (j.contains("t_c")) p.t_c = tf_from_json(j["t_c"]);
  if (j.contains("t_v")) p.t_v = tf_from_json(j["t_v"]);
  if (j.contains("pzt")) p.pzt = tf_from_json(j["pzt"]);
  p.pdh_slope = j.value("pdh_slope", 1.0);
  if (j.contains("noise_lines")) {
    p.noise_lines.clear();
    for (const auto& line : j["noise_lines"]) {
      p.noise_lines.push_back(NoiseLine{line.at("freq_hz").get<double>(),
                                        line.at("amplitude").get<double>(),
                                        line.value("phase_rad", 0.0)});
    }
  }
  return p;
}

LockDesignParams lock_design_params_from_json(const Json& j) {
  LockDesignParams p;
  p.f_lp1_hz = j.value("f_lp1_hz", p.f_lp1_hz);
  p.f_lp2_hz = j.value("f_lp2_hz", p.f_lp2_hz);
  p.loop_gain = j.value("loop_gain", p.loop_gain);
  p.t_l_corner_hz = j.value("t_l_corner_hz", p.t_l_corner_hz);
  p.t_l_dc_gain = j.value("t_l_dc_gain", p.t_l_dc_gain);
  p.internal_bits = j.value("internal_bits", p.internal_bits);
  p.coeff_bits = j.value("coeff_bits", p.coeff_bits);
  if (j.contains("io_format")) p.io_format = QFormat::parse(j["io_format"].get<std::string>());
  return p;
}

LockSimOptions lock_sim_options_from_json(const Json& j) {
  LockSimOptions o;
  o.duration_s = j.value("duration_s", o.duration_s);
  o.sim_rate_hz = j.value("sim_rate_hz", o.sim_rate_hz);
  o.seed = j.value("seed", o.seed);
  o.settle_fraction = j.value("settle_fraction", o.settle_fraction);
  o.open_loop = j.value("open_loop", false);
  o.noise_floor = j.value("noise_floor", 0.0);
  o.record_decimation = j.value("record_decimation", 0);
  o.rail_limit = j.value("rail_limit", o.rail_limit);
  return o;
}

ReacquireScenario reacquire_scenario_from_json(const Json& j) {
  ReacquireScenario sc;
  sc.slope = j.value("slope", sc.slope);
  sc.rail = j.value("rail", sc.rail);
  sc.step_detuning = j.value("step_detuning", sc.step_detuning);
  sc.step_at = j.value("step_at", sc.step_at);
  sc.n_samples = j.value("n_samples", sc.n_samples);
  sc.relock_gain = j.value("relock_gain", sc.relock_gain);
  if (j.contains("thresholds")) {
    const Json& t = j["thresholds"];
    sc.thresholds.loss_level = t.value("loss_level", sc.thresholds.loss_level);
    sc.thresholds.capture_level = t.value("capture_level", sc.thresholds.capture_level);
    sc.thresholds.sweep_rate = t.value("sweep_rate", sc.thresholds.sweep_rate);
    sc.thresholds.sweep_span = t.value("sweep_span", sc.thresholds.sweep_span);
    sc.thresholds.dwell_samples = t.value("dwell_samples", sc.thresholds.dwell_samples);
  }
  return sc;
}

std::function<double(double)> named_function(const std::string& name) {
  if (name == "identity") return [](double x) { return x; };
  if (name == "sin") return [](double x) { return std::sin(x); };
  if (name == "sqrt") return [](double x) { return std::sqrt(x); };
  if (name == "invsqrt") return [](double x) { return 1.0 / std::sqrt(x); };
  if (name == "inverse") return [](double x) { return 1.0 / x; };
  if (name == "exp") return [](double x) { return std::exp(x); };
  if (name == "log") return [](double x) { return std::log(x); };
  throw std::invalid_argument("unknown function name: " + name);
}

}  // namespace pldkit
