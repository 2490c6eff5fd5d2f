// pldkit command-line front end: design, analysis, and simulation batch
// runs emitting CSV plus a reproduction manifest per output file.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>

#include "pldkit/config.hpp"
#include "pldkit/csv.hpp"
#include "pldkit/version.hpp"

namespace {

using namespace pldkit;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

template <typename F>
auto from_config(F&& f) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
}

Json load_config(const std::string& path) {
  return from_config([&] { return load_json_file(path); });
}

// Relative outputs land in PLDKIT_OUT_DIR when it is set.
std::string resolve_output(const std::string& path) {
  const char* dir = std::getenv("PLDKIT_OUT_DIR");
  if (dir == nullptr || path.empty()) return path;
  std::filesystem::path p(path);
  if (p.is_absolute()) return path;
  return (std::filesystem::path(dir) / p).string();
}

struct RunContext {
  std::string command_line;
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> outputs;
};

void write_manifest(const RunContext& ctx) {
  for (const auto& out : ctx.outputs) {
    nlohmann::json m;
    m["command"] = ctx.command_line;
    m["config"] = ctx.config_path.empty() ? nlohmann::json() : nlohmann::json(ctx.config_path);
    if (ctx.seed) {
      m["seed"] = *ctx.seed;
    } else {
      m["seed"] = nullptr;
    }
    m["outputs"] = ctx.outputs;
    m["version"] = kVersion;
    const auto now = std::chrono::system_clock::now();
    m["timestamp_unix"] =
        std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch()).count();
    std::ofstream f(out + ".manifest.json");
    f << m.dump(2) << "\n";
  }
}

// Writes through a stringstream so a file is either complete or absent.
void emit_csv(const std::string& output, RunContext& ctx,
              const std::function<void(CsvWriter&)>& body) {
  std::ostringstream buf;
  CsvWriter writer(buf);
  body(writer);
  if (output.empty()) {
    std::cout << buf.str();
    return;
  }
  const std::string path = resolve_output(output);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open output file: " + path);
  f << buf.str();
  ctx.outputs.push_back(path);
}

ContinuousTf tf_from_spec(const std::string& spec) {
  if (!spec.empty() && spec[0] == '@') {
    return from_config([&] { return tf_from_json(load_json_file(spec.substr(1))); });
  }
  return tf_from_keyword(spec);
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
  return out;
}

int run(int argc, char** argv) {
  CLI::App app{"pldkit: digital control loop design and simulation toolkit"};
  app.require_subcommand(1);

  RunContext ctx;
  for (int i = 0; i < argc; ++i) {
    if (i) ctx.command_line += ' ';
    ctx.command_line += argv[i];
  }

  // --- lti ---------------------------------------------------------------
  auto* lti = app.add_subcommand("lti", "continuous transfer function tools");
  lti->require_subcommand(1);
  {
    auto* bode = lti->add_subcommand("bode", "log-spaced frequency response sweep");
    auto tf_spec = std::make_shared<std::string>("integrator");
    auto f_lo = std::make_shared<double>(1.0);
    auto f_hi = std::make_shared<double>(1e6);
    auto points = std::make_shared<int>(200);
    auto output = std::make_shared<std::string>();
    bode->add_option("--tf", *tf_spec, "keyword or @file.json");
    bode->add_option("--flo", *f_lo, "start frequency, Hz");
    bode->add_option("--fhi", *f_hi, "stop frequency, Hz");
    bode->add_option("--points", *points, "number of points");
    bode->add_option("-o,--output", *output, "output CSV path");
    bode->callback([=, &ctx] {
      const ContinuousTf tf = tf_from_spec(*tf_spec);
      const auto rows = report_bode(tf, *f_lo, *f_hi, *points);
      emit_csv(*output, ctx, [&](CsvWriter& w) {
        w.header({"freq_hz", "mag_db", "phase_deg"});
        for (const auto& r : rows) w.row(std::vector<double>{r.freq_hz, r.mag_db, r.phase_deg});
      });
    });
  }

  // --- discretize ----------------------------------------------------------
  {
    auto* disc = app.add_subcommand("discretize", "continuous -> discrete conversion");
    auto tf_spec = std::make_shared<std::string>("integrator");
    auto fs = std::make_shared<double>(1e6);
    auto method = std::make_shared<std::string>("bilinear");
    auto prewarp = std::make_shared<double>(0.0);
    auto output = std::make_shared<std::string>();
    disc->add_option("--tf", *tf_spec, "keyword or @file.json");
    disc->add_option("--fs", *fs, "sample rate, Hz");
    disc->add_option("--method", *method, "bilinear | zoh");
    disc->add_option("--prewarp-hz", *prewarp, "bilinear prewarp frequency, Hz");
    disc->add_option("-o,--output", *output, "output CSV path (a,b coefficients)");
    disc->callback([=, &ctx] {
      const ContinuousTf tf = tf_from_spec(*tf_spec);
      C2dMethod m = C2dMethod::bilinear;
      if (*method == "zoh") {
        m = C2dMethod::zoh;
      } else if (*method != "bilinear") {
        throw CLI::ValidationError("--method", "must be bilinear or zoh");
      }
      const DiscreteTf g = c2d(tf, *fs, m, *prewarp);
      std::cout << discrete_tf_to_json(g).dump(2) << "\n";
      if (!output->empty()) {
        emit_csv(*output, ctx, [&](CsvWriter& w) {
          w.header({"kind", "index", "value"});
          for (Eigen::Index i = 0; i < g.a.size(); ++i) {
            w.row(std::vector<std::string>{"a", std::to_string(i), format_double(g.a[i])});
          }
          for (Eigen::Index i = 0; i < g.b.size(); ++i) {
            w.row(std::vector<std::string>{"b", std::to_string(i), format_double(g.b[i])});
          }
        });
      }
    });
  }

  // --- filters -------------------------------------------------------------
  auto* filters = app.add_subcommand("filters", "FIR/IIR synthesis");
  filters->require_subcommand(1);
  {
    auto* fir = filters->add_subcommand("design-fir", "least-squares linear-phase FIR");
    auto edges = std::make_shared<std::string>("0,0.2,0.3,1");
    auto gains = std::make_shared<std::string>("1,1,0,0");
    auto taps = std::make_shared<int>(63);
    auto output = std::make_shared<std::string>();
    fir->add_option("--edges", *edges, "band edges, normalized to Nyquist");
    fir->add_option("--gains", *gains, "desired amplitude at each edge");
    fir->add_option("--taps", *taps, "number of taps");
    fir->add_option("-o,--output", *output, "output CSV path");
    fir->callback([=, &ctx] {
      const Eigen::VectorXd h = fir_design_least_squares(parse_list(*edges), parse_list(*gains),
                                                         *taps);
      emit_csv(*output, ctx, [&](CsvWriter& w) {
        w.header({"index", "tap"});
        for (Eigen::Index i = 0; i < h.size(); ++i) {
          w.row(std::vector<std::string>{std::to_string(i), format_double(h[i])});
        }
      });
    });
  }
  {
    auto* iir = filters->add_subcommand("build-iir", "two-FIR-plus-adder IIR structure");
    auto tf_spec = std::make_shared<std::string>();
    auto fs = std::make_shared<double>(1.5625e6);
    auto internal_bits = std::make_shared<int>(32);
    auto coeff_bits = std::make_shared<int>(32);
    auto io_format = std::make_shared<std::string>("Q12.11");
    auto clock = std::make_shared<double>(100e6);
    auto output = std::make_shared<std::string>();
    iir->add_option("--tf", *tf_spec, "continuous prototype, keyword or @file.json")
        ->required();
    iir->add_option("--fs", *fs, "discretization rate, Hz");
    iir->add_option("--internal-bits", *internal_bits, "B_Y internal width");
    iir->add_option("--coeff-bits", *coeff_bits, "coefficient width");
    iir->add_option("--io-format", *io_format, "I/O format, e.g. Q12.11");
    iir->add_option("--clock-hz", *clock, "board clock for the rate report");
    iir->add_option("-o,--output", *output, "output CSV path");
    iir->callback([=, &ctx] {
      const ContinuousTf tf = tf_from_spec(*tf_spec);
      IirFixedConfig cfg;
      cfg.coeff_bits = *coeff_bits;
      cfg.io_format = QFormat::parse(*io_format);
      const DiscreteTf g = c2d(tf, *fs);
      const IirFilter f = iir_build(g, *internal_bits, cfg);
      std::cout << "effective_rate_hz = " << format_double(f.effective_rate(*clock)) << "\n"
                << "latency_cycles = " << f.latency_cycles() << "\n"
                << "coefficients_saturated = " << (f.coefficients_saturated() ? 1 : 0) << "\n";
      emit_csv(*output, ctx, [&](CsvWriter& w) {
        w.header({"kind", "index", "design", "quantized"});
        const DiscreteTf& q = f.quantized_tf();
        for (Eigen::Index i = 0; i < g.a.size(); ++i) {
          w.row(std::vector<std::string>{"a", std::to_string(i), format_double(g.a[i]),
                                         format_double(q.a[i])});
        }
        for (Eigen::Index i = 0; i < g.b.size(); ++i) {
          w.row(std::vector<std::string>{"b", std::to_string(i), format_double(g.b[i]),
                                         format_double(q.b[i])});
        }
      });
    });
  }

  // --- lut -----------------------------------------------------------------
  auto* lut = app.add_subcommand("lut", "RAM-block look-up tables");
  lut->require_subcommand(1);
  {
    auto* parts = lut->add_subcommand("partitions", "list (B_i, B_o) block partitions");
    auto bits = std::make_shared<long long>(4096);
    auto output = std::make_shared<std::string>();
    parts->add_option("--bits", *bits, "block size in bits");
    parts->add_option("-o,--output", *output, "output CSV path");
    parts->callback([=, &ctx] {
      const auto options = partition_options(*bits);
      emit_csv(*output, ctx, [&](CsvWriter& w) {
        w.header({"input_bits", "output_bits"});
        for (const auto& p : options) {
          w.row(std::vector<std::string>{std::to_string(p.input_bits),
                                         std::to_string(p.output_bits)});
        }
      });
    });
  }
  {
    auto* tab = lut->add_subcommand("tabulate", "tabulate a named function into a block");
    auto fname = std::make_shared<std::string>("invsqrt");
    auto bi = std::make_shared<int>(12);
    auto bo = std::make_shared<int>(16);
    auto block_bits = std::make_shared<long long>(4096);
    auto domain = std::make_shared<std::string>("0.001,1");
    auto range = std::make_shared<std::string>("1,32");
    auto output = std::make_shared<std::string>();
    tab->add_option("--function", *fname, "identity|sin|sqrt|invsqrt|inverse|exp|log");
    tab->add_option("--input-bits", *bi, "B_i address bits");
    tab->add_option("--output-bits", *bo, "B_o entry bits");
    tab->add_option("--block-bits", *block_bits, "physical block size");
    tab->add_option("--domain", *domain, "lo,hi");
    tab->add_option("--range", *range, "lo,hi");
    tab->add_option("-o,--output", *output, "output CSV path");
    tab->callback([=, &ctx] {
      const auto d = parse_list(*domain);
      const auto r = parse_list(*range);
      if (d.size() != 2 || r.size() != 2) {
        throw CLI::ValidationError("--domain/--range", "expected lo,hi");
      }
      RamBlock block = RamBlock::tabulate(named_function(*fname), *bi, *bo, {d[0], d[1]},
                                          {r[0], r[1]}, *block_bits);
      std::cout << "blocks_used = " << block.block_count() << "\n";
      emit_csv(*output, ctx, [&](CsvWriter& w) {
        w.header({"address", "raw_value", "mapped_value"});
        for (std::int64_t a = 0; a < block.n_entries(); ++a) {
          w.row(std::vector<std::string>{std::to_string(a), std::to_string(block.entry(a)),
                                         format_double(block.mapped_entry(a))});
        }
      });
    });
  }

  // --- pipeline --------------------------------------------------------------
  auto* pipe = app.add_subcommand("pipeline", "latency/throughput model");
  pipe->require_subcommand(1);
  auto pipe_config = std::make_shared<std::string>("gva290");
  {
    auto* rep = pipe->add_subcommand("report", "latency, bandwidth, Nyquist");
    auto output = std::make_shared<std::string>();
    rep->add_option("--config", *pipe_config, "board config file or preset gva290");
    rep->add_option("-o,--output", *output, "output CSV path");
    rep->callback([=, &ctx] {
      Board b;
      if (*pipe_config == "gva290") {
        b = gva290_board();
      } else {
        ctx.config_path = *pipe_config;
        b = from_config([&] { return board_from_json(load_json_file(*pipe_config)); });
      }
      const double lat = latency(b);
      const double bw = control_bandwidth(b);
      std::cout << "latency_s = " << format_double(lat) << "\n"
                << "control_bandwidth_hz = " << format_double(bw) << "\n"
                << "nyquist_hz = " << format_double(b.clock_hz / 2.0) << "\n";
      if (!output->empty()) {
        emit_csv(*output, ctx, [&](CsvWriter& w) {
          w.header({"metric", "value"});
          w.row(std::vector<std::string>{"latency_s", format_double(lat)});
          w.row(std::vector<std::string>{"control_bandwidth_hz", format_double(bw)});
          w.row(std::vector<std::string>{"nyquist_hz", format_double(b.clock_hz / 2.0)});
        });
      }
    });
  }
  {
    auto* sim = pipe->add_subcommand("simulate", "run a sinusoid or impulse through the chain");
    auto freq = std::make_shared<double>(1e6);
    auto amplitude = std::make_shared<double>(1.0);
    auto samples = std::make_shared<int>(4096);
    auto impulse = std::make_shared<bool>(false);
    auto output = std::make_shared<std::string>();
    sim->add_option("--config", *pipe_config, "board config file or preset gva290");
    sim->add_option("--freq", *freq, "input frequency, Hz");
    sim->add_option("--amplitude", *amplitude, "input amplitude");
    sim->add_option("--samples", *samples, "number of samples");
    sim->add_flag("--impulse", *impulse, "unit impulse instead of a sinusoid");
    sim->add_option("-o,--output", *output, "output CSV path");
    sim->callback([=, &ctx] {
      Board b;
      if (*pipe_config == "gva290") {
        b = gva290_board();
      } else {
        ctx.config_path = *pipe_config;
        b = from_config([&] { return board_from_json(load_json_file(*pipe_config)); });
      }
      std::vector<double> input(static_cast<std::size_t>(*samples), 0.0);
      if (*impulse) {
        input[0] = *amplitude;
      } else {
        for (int n = 0; n < *samples; ++n) {
          input[static_cast<std::size_t>(n)] =
              *amplitude * std::sin(2.0 * std::numbers::pi * *freq * n / b.clock_hz);
        }
      }
      const auto out = simulate_through(b, input);
      emit_csv(*output, ctx, [&](CsvWriter& w) {
        w.header({"n", "t_s", "input", "output"});
        for (int n = 0; n < *samples; ++n) {
          w.row(std::vector<std::string>{std::to_string(n), format_double(n / b.clock_hz),
                                         format_double(input[static_cast<std::size_t>(n)]),
                                         format_double(out[static_cast<std::size_t>(n)])});
        }
      });
    });
  }

  // --- adphi ---------------------------------------------------------------
  auto* adphi = app.add_subcommand("adphi", "adaptive homodyne phase measurement");
  adphi->require_subcommand(1);
  auto adphi_config = std::make_shared<std::string>();
  auto adphi_seed = std::make_shared<std::int64_t>(-1);
  {
    auto* runp = adphi->add_subcommand("run", "simulate one pulse");
    auto output = std::make_shared<std::string>();
    runp->add_option("--config", *adphi_config, "pulse config JSON");
    runp->add_option("--seed", *adphi_seed, "override config seed");
    runp->add_option("-o,--output", *output, "trajectory CSV path");
    runp->callback([=, &ctx] {
      PulseConfig cfg;
      if (!adphi_config->empty()) {
        ctx.config_path = *adphi_config;
        cfg = from_config([&] { return pulse_config_from_json(load_json_file(*adphi_config)); });
      }
      if (*adphi_seed >= 0) cfg.seed = static_cast<std::uint64_t>(*adphi_seed);
      ctx.seed = cfg.seed;
      const PulseTrajectory traj = simulate_pulse(cfg);
      std::cout << "final_estimate_rad = " << format_double(traj.final_estimate) << "\n";
      emit_csv(*output, ctx, [&](CsvWriter& w) {
        w.header({"v", "I", "Phi", "phi_hat_mid"});
        for (std::size_t i = 0; i < traj.times.size(); ++i) {
          w.row(std::vector<double>{traj.times[i], traj.current[i], traj.lo_phase[i],
                                    traj.mid_estimate[i]});
        }
      });
    });
  }
  {
    auto* mc = adphi->add_subcommand("montecarlo", "batch of seeded pulses");
    auto trials = std::make_shared<int>(1000);
    auto threads = std::make_shared<int>(0);
    auto output = std::make_shared<std::string>();
    mc->add_option("--config", *adphi_config, "pulse config JSON");
    mc->add_option("--seed", *adphi_seed, "base seed override");
    mc->add_option("--trials", *trials, "number of pulses");
    mc->add_option("--threads", *threads, "worker threads (0 = auto)");
    mc->add_option("-o,--output", *output, "summary CSV path");
    mc->callback([=, &ctx] {
      PulseConfig cfg;
      if (!adphi_config->empty()) {
        ctx.config_path = *adphi_config;
        cfg = from_config([&] { return pulse_config_from_json(load_json_file(*adphi_config)); });
      }
      if (*adphi_seed >= 0) cfg.seed = static_cast<std::uint64_t>(*adphi_seed);
      ctx.seed = cfg.seed;
      const auto results = monte_carlo(cfg, *trials, *threads);
      emit_csv(*output, ctx, [&](CsvWriter& w) {
        w.header({"seed", "final_estimate", "error"});
        for (const auto& r : results) {
          w.row(std::vector<std::string>{std::to_string(r.seed), format_double(r.estimate),
                                         format_double(r.error)});
        }
      });
    });
  }

  // --- lock ------------------------------------------------------------------
  auto* lock = app.add_subcommand("lock", "cavity lock design and simulation");
  lock->require_subcommand(1);
  auto lock_config = std::make_shared<std::string>();
  auto load_lock = [lock_config, &ctx](LockPlant& plant, LockDesign& design,
                                       LockSimOptions& opts) {
    Json j;
    if (!lock_config->empty()) {
      ctx.config_path = *lock_config;
      j = load_config(*lock_config);
    }
    plant = from_config([&] {
      return j.contains("plant") ? lock_plant_from_json(j["plant"]) : default_lock_plant();
    });
    const Board board = from_config(
        [&] { return j.contains("board") ? board_from_json(j["board"]) : gva290_board(); });
    const LockDesignParams params = from_config([&] {
      return j.contains("design") ? lock_design_params_from_json(j["design"])
                                  : LockDesignParams{};
    });
    design = make_lock_design(plant, board, params);
    opts = from_config([&] {
      return j.contains("sim") ? lock_sim_options_from_json(j["sim"]) : LockSimOptions{};
    });
  };
  {
    auto* des = lock->add_subcommand("design", "design both arms, print coefficients");
    auto output = std::make_shared<std::string>();
    des->add_option("--config", *lock_config, "scenario JSON");
    des->add_option("-o,--output", *output, "coefficient CSV path");
    des->callback([=, &ctx] {
      LockPlant plant;
      LockDesign design;
      LockSimOptions opts;
      load_lock(plant, design, opts);
      std::cout << "effective_rate_hz = " << format_double(design.effective_rate_hz) << "\n";
      std::cout << "t_u stable = " << (is_stable(design.t_u) ? 1 : 0)
                << ", closed loop stable = "
                << (is_stable(closed_loop(plant.t_c, plant.t_v, design.t_u)) ? 1 : 0) << "\n";
      emit_csv(*output, ctx, [&](CsvWriter& w) {
        w.header({"arm", "kind", "index", "value"});
        auto dump_tf = [&](const std::string& arm, const ContinuousTf& tf) {
          for (Eigen::Index i = 0; i < tf.num.size(); ++i) {
            w.row(std::vector<std::string>{arm, "num", std::to_string(i),
                                           format_double(tf.num[i])});
          }
          for (Eigen::Index i = 0; i < tf.den.size(); ++i) {
            w.row(std::vector<std::string>{arm, "den", std::to_string(i),
                                           format_double(tf.den[i])});
          }
        };
        auto dump_discrete = [&](const std::string& arm, const DiscreteTf& g) {
          for (Eigen::Index i = 0; i < g.a.size(); ++i) {
            w.row(std::vector<std::string>{arm, "a", std::to_string(i), format_double(g.a[i])});
          }
          for (Eigen::Index i = 0; i < g.b.size(); ++i) {
            w.row(std::vector<std::string>{arm, "b", std::to_string(i), format_double(g.b[i])});
          }
        };
        dump_tf("upper_continuous", design.t_u);
        dump_tf("lower_continuous", design.t_l);
        dump_discrete("upper_quantized", design.t_u_discrete.quantized_tf());
        dump_discrete("lower_quantized", design.t_l_discrete.quantized_tf());
      });
    });
  }
  {
    auto* bode = lock->add_subcommand("bode", "Bode sweep of one arm");
    auto arm = std::make_shared<std::string>("upper");
    auto form = std::make_shared<std::string>("continuous");
    auto f_lo = std::make_shared<double>(1.0);
    auto f_hi = std::make_shared<double>(0.0);
    auto points = std::make_shared<int>(200);
    auto output = std::make_shared<std::string>();
    bode->add_option("--config", *lock_config, "scenario JSON");
    bode->add_option("--arm", *arm, "upper | lower");
    bode->add_option("--form", *form, "continuous | discrete");
    bode->add_option("--flo", *f_lo, "start frequency, Hz");
    bode->add_option("--fhi", *f_hi, "stop frequency, Hz (default effective Nyquist)");
    bode->add_option("--points", *points, "number of points");
    bode->add_option("-o,--output", *output, "output CSV path");
    bode->callback([=, &ctx] {
      LockPlant plant;
      LockDesign design;
      LockSimOptions opts;
      load_lock(plant, design, opts);
      const bool upper = (*arm == "upper");
      if (!upper && *arm != "lower") throw CLI::ValidationError("--arm", "upper or lower");
      double fhi = *f_hi > 0.0 ? *f_hi : design.effective_rate_hz / 2.0;
      std::vector<BodePoint> rows;
      if (*form == "continuous") {
        rows = report_bode(upper ? design.t_u : design.t_l, *f_lo, fhi, *points);
      } else if (*form == "discrete") {
        rows = report_bode(upper ? design.t_u_discrete : design.t_l_discrete, *f_lo, fhi,
                           *points, design.board.clock_hz);
      } else {
        throw CLI::ValidationError("--form", "continuous or discrete");
      }
      emit_csv(*output, ctx, [&](CsvWriter& w) {
        w.header({"freq_hz", "mag_db", "phase_deg"});
        for (const auto& r : rows) w.row(std::vector<double>{r.freq_hz, r.mag_db, r.phase_deg});
      });
    });
  }
  {
    auto* sim = lock->add_subcommand("simulate", "closed-loop time-domain run");
    auto seed = std::make_shared<std::int64_t>(-1);
    auto duration = std::make_shared<double>(0.0);
    auto open_loop = std::make_shared<bool>(false);
    auto output = std::make_shared<std::string>();
    auto rejection_out = std::make_shared<std::string>();
    sim->add_option("--config", *lock_config, "scenario JSON");
    sim->add_option("--seed", *seed, "override config seed");
    sim->add_option("--duration", *duration, "override duration, s");
    sim->add_flag("--open-loop", *open_loop, "disconnect both arms");
    sim->add_option("-o,--output", *output, "time-series CSV path");
    sim->add_option("--rejection-out", *rejection_out, "per-line rejection CSV path");
    sim->callback([=, &ctx] {
      LockPlant plant;
      LockDesign design;
      LockSimOptions opts;
      load_lock(plant, design, opts);
      if (*seed >= 0) opts.seed = static_cast<std::uint64_t>(*seed);
      if (*duration > 0.0) opts.duration_s = *duration;
      if (*open_loop) opts.open_loop = true;
      ctx.seed = opts.seed;
      const LockSimResult res = simulate_lock(plant, design, opts);
      std::cout << "lock_lost = " << (res.lock_lost ? 1 : 0) << "\n";
      for (const auto& r : res.rejection) {
        std::cout << "line " << format_double(r.line_hz)
                  << " Hz: rejection_db = " << format_double(r.closed_db - r.open_db)
                  << ", predicted_db = " << format_double(r.predicted_db) << "\n";
      }
      emit_csv(*output, ctx, [&](CsvWriter& w) {
        w.header({"t_s", "error", "u_upper", "u_lower"});
        for (std::size_t i = 0; i < res.t.size(); ++i) {
          w.row(std::vector<double>{res.t[i], res.error[i], res.u_upper[i], res.u_lower[i]});
        }
      });
      if (!rejection_out->empty()) {
        emit_csv(*rejection_out, ctx, [&](CsvWriter& w) {
          w.header({"line_hz", "open_db", "closed_db", "predicted_db"});
          for (const auto& r : res.rejection) {
            w.row(std::vector<double>{r.line_hz, r.open_db, r.closed_db, r.predicted_db});
          }
        });
      }
    });
  }
  {
    auto* reac = lock->add_subcommand("reacquire", "lock-loss state machine scenario");
    auto output = std::make_shared<std::string>();
    reac->add_option("--config", *lock_config, "scenario JSON (reacquire section)");
    reac->add_option("-o,--output", *output, "trace CSV path");
    reac->callback([=, &ctx] {
      ReacquireScenario sc;
      if (!lock_config->empty()) {
        ctx.config_path = *lock_config;
        const Json j = load_config(*lock_config);
        if (j.contains("reacquire")) {
          sc = from_config([&] { return reacquire_scenario_from_json(j["reacquire"]); });
        }
      }
      const ReacquireRun run = run_reacquire_scenario(sc);
      std::cout << "relocked = " << (run.relocked ? 1 : 0) << "\n";
      emit_csv(*output, ctx, [&](CsvWriter& w) {
        w.header({"n", "error", "sweep", "state"});
        for (std::size_t i = 0; i < run.error.size(); ++i) {
          w.row(std::vector<std::string>{std::to_string(i), format_double(run.error[i]),
                                         format_double(run.sweep[i]),
                                         to_string(run.states[i])});
        }
      });
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    std::cerr << app.help();
    return 2;
  }

  write_manifest(ctx);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
