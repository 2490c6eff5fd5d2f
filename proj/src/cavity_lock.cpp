#include "pldkit/cavity_lock.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "pldkit/poly.hpp"

namespace pldkit {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double to_db(double mag) { return 20.0 * std::log10(mag); }

}  // namespace

LockPlant default_lock_plant() {
  LockPlant p;
  p.t_c = low_pass(kTwoPi * 10e3);
  p.t_v = low_pass(kTwoPi * 100e3);
  p.pzt = low_pass(kTwoPi * 1e3);
  p.noise_lines = {{100e3, 0.2, 0.0}};
  p.pdh_slope = 1.0;
  return p;
}

ContinuousTf pzt_multiresonance(
    const std::vector<std::tuple<double, double, double>>& modes) {
  if (modes.empty()) throw std::invalid_argument("pzt_multiresonance: no modes given");
  Eigen::VectorXd num = Eigen::VectorXd::Zero(1);
  Eigen::VectorXd den = Eigen::VectorXd::Ones(1);
  for (const auto& [f0, q, weight] : modes) {
    const ContinuousTf ho = harmonic_oscillator(kTwoPi * f0, q);
    num = polyadd(polymul(num, ho.den), weight * polymul(den, ho.num));
    den = polymul(den, ho.den);
  }
  return make_tf(num, den);
}

ContinuousTf design_upper(const LockPlant& plant, double f_lp1_hz, double f_lp2_hz,
                          double loop_gain) {
  if (!(f_lp1_hz > 0.0) || !(f_lp2_hz > f_lp1_hz)) {
    throw std::invalid_argument("design_upper: need 0 < f_lp1 < f_lp2");
  }
  if (!(loop_gain > 0.0)) throw std::invalid_argument("design_upper: loop_gain must be > 0");

  const double w1 = kTwoPi * f_lp1_hz;
  const double w2 = kTwoPi * f_lp2_hz;

  Eigen::VectorXd lp1_den(2), lp2_den(2);
  lp1_den << w1, 1.0;
  lp2_den << w2, 1.0;

  // T_LP1 * T_LP2^2 / (T_C * T_V), assembled from factors so the plant
  // cancellation is symbolic.
  const Eigen::VectorXd num =
      loop_gain * w1 * w2 * w2 * polymul(plant.t_c.den, plant.t_v.den);
  const Eigen::VectorXd den =
      polymul(polymul(lp1_den, polymul(lp2_den, lp2_den)), polymul(plant.t_c.num, plant.t_v.num));

  const ContinuousTf t_u = make_tf(num, den);
  if (!t_u.is_proper()) {
    throw std::invalid_argument(
        "design_upper: plant inversion leaves an improper compensator (" +
        std::to_string(t_u.num_degree()) + " zeros vs " + std::to_string(t_u.den_degree()) +
        " poles); add roll-off poles or reduce the plant order");
  }
  if (!is_stable(t_u)) {
    throw std::invalid_argument(
        "design_upper: inverted plant zeros put a compensator pole in the right half-plane");
  }
  return t_u;
}

ContinuousTf design_lower(double corner_hz, double dc_gain) {
  if (!(corner_hz > 0.0)) throw std::invalid_argument("design_lower: corner must be > 0");
  const double w = kTwoPi * corner_hz;
  Eigen::VectorXd num = Eigen::VectorXd::Constant(1, dc_gain * w);
  Eigen::VectorXd den(2);
  den << w, 1.0;
  return make_tf(num, den);
}

LockDesign make_lock_design(const LockPlant& plant, const Board& board,
                            const LockDesignParams& params) {
  LockDesign d;
  d.params = params;
  d.board = board;
  d.t_u = design_upper(plant, params.f_lp1_hz, params.f_lp2_hz, params.loop_gain);
  d.t_l = design_lower(params.t_l_corner_hz, params.t_l_dc_gain);
  d.effective_rate_hz = board.clock_hz / (2.0 * params.internal_bits);

  IirFixedConfig cfg;
  cfg.coeff_bits = params.coeff_bits;
  cfg.io_format = params.io_format;
  d.t_u_discrete = iir_build(c2d(d.t_u, d.effective_rate_hz), params.internal_bits, cfg);
  d.t_l_discrete = iir_build(c2d(d.t_l, d.effective_rate_hz), params.internal_bits, cfg);
  return d;
}

namespace {

std::vector<double> log_spaced(double f_lo, double f_hi, int points) {
  if (!(f_lo > 0.0) || !(f_hi > f_lo)) {
    throw std::invalid_argument("report_bode: need 0 < f_lo < f_hi");
  }
  if (points < 2) throw std::invalid_argument("report_bode: need at least 2 points");
  std::vector<double> f(static_cast<std::size_t>(points));
  const double ratio = std::log(f_hi / f_lo);
  for (int i = 0; i < points; ++i) {
    f[static_cast<std::size_t>(i)] =
        f_lo * std::exp(ratio * static_cast<double>(i) / (points - 1));
  }
  return f;
}

std::vector<BodePoint> sweep_to_bode(const std::vector<double>& freqs,
                                     const std::vector<std::complex<double>>& response) {
  std::vector<BodePoint> out(freqs.size());
  double prev_phase = 0.0;
  double offset = 0.0;
  for (std::size_t i = 0; i < freqs.size(); ++i) {
    double phase = std::arg(response[i]);
    if (i > 0) {
      while (phase + offset - prev_phase > std::numbers::pi) offset -= kTwoPi;
      while (phase + offset - prev_phase < -std::numbers::pi) offset += kTwoPi;
    }
    const double unwrapped = phase + offset;
    prev_phase = unwrapped;
    out[i] = BodePoint{freqs[i], to_db(std::abs(response[i])),
                       unwrapped * 180.0 / std::numbers::pi};
  }
  return out;
}

}  // namespace

std::vector<BodePoint> report_bode(const ContinuousTf& tf, double f_lo, double f_hi,
                                   int points) {
  const auto freqs = log_spaced(f_lo, f_hi, points);
  std::vector<std::complex<double>> resp(freqs.size());
  for (std::size_t i = 0; i < freqs.size(); ++i) {
    resp[i] = freq_response(tf, kTwoPi * freqs[i]);
  }
  return sweep_to_bode(freqs, resp);
}

std::vector<BodePoint> report_bode(const IirFilter& filter, double f_lo, double f_hi, int points,
                                   double clock_hz) {
  const double f_eff = filter.effective_rate(clock_hz);
  if (f_hi > f_eff / 2.0) {
    throw std::invalid_argument("report_bode: f_hi above the effective Nyquist rate " +
                                std::to_string(f_eff / 2.0) + " Hz");
  }
  const auto freqs = log_spaced(f_lo, f_hi, points);
  std::vector<std::complex<double>> resp(freqs.size());
  for (std::size_t i = 0; i < freqs.size(); ++i) {
    const std::complex<double> delay = std::polar(1.0, -kTwoPi * freqs[i] / f_eff);
    resp[i] = discrete_freq_response(filter.quantized_tf(), freqs[i]) * delay;
  }
  return sweep_to_bode(freqs, resp);
}

namespace {

struct Goertzel {
  double freq_hz = 0.0;
  long long start = 0;
  long long count = 0;
  std::complex<double> sum{0.0, 0.0};
};

}  // namespace

std::complex<double> loop_gain_at(const LockPlant& plant, const LockDesign& design, double f_hz,
                                  double sim_rate_hz) {
  const double fs = sim_rate_hz > 0.0 ? sim_rate_hz : design.board.clock_hz / 16.0;
  const DiscreteTf hc = c2d(plant.t_c, fs, C2dMethod::zoh);
  const DiscreteTf hv = c2d(plant.t_v, fs, C2dMethod::zoh);
  const DiscreteTf hp = c2d(plant.pzt, fs, C2dMethod::zoh);

  const double f_eff = design.effective_rate_hz;
  const auto delay_samples =
      std::max<long long>(1, std::llround(latency(design.board) * fs));
  const std::complex<double> board_delay =
      std::polar(1.0, -kTwoPi * f_hz * static_cast<double>(delay_samples) / fs);

  // Controllers tick at f_eff and hold their output in between.
  const double x = std::numbers::pi * f_hz / f_eff;
  const std::complex<double> hold =
      (x == 0.0) ? std::complex<double>{1.0, 0.0}
                 : std::polar(std::abs(std::sin(x) / x), -x);

  const std::complex<double> hu =
      discrete_freq_response(design.t_u_discrete.quantized_tf(), f_hz);
  const std::complex<double> hl =
      discrete_freq_response(design.t_l_discrete.quantized_tf(), f_hz);

  const std::complex<double> cavity = discrete_freq_response(hc, f_hz);
  const std::complex<double> upper = discrete_freq_response(hv, f_hz) * hu;
  const std::complex<double> lower = discrete_freq_response(hp, f_hz) * hl;
  return plant.pdh_slope * cavity * (upper + lower) * hold * board_delay;
}

double predicted_suppression_db(const LockPlant& plant, const LockDesign& design, double f_hz,
                                double sim_rate_hz) {
  const std::complex<double> l = loop_gain_at(plant, design, f_hz, sim_rate_hz);
  return -to_db(std::abs(1.0 + l));
}

namespace {

LockSimResult run_lock_sim(const LockPlant& plant, const LockDesign& design,
                           const LockSimOptions& opts, bool force_open) {
  const double fs = opts.sim_rate_hz > 0.0 ? opts.sim_rate_hz : design.board.clock_hz / 16.0;
  const auto n_samples = static_cast<long long>(std::llround(opts.duration_s * fs));
  if (n_samples < 1) throw std::invalid_argument("simulate_lock: duration too short");

  DiscreteStepper cavity(c2d(plant.t_c, fs, C2dMethod::zoh));
  DiscreteStepper vco(c2d(plant.t_v, fs, C2dMethod::zoh));
  DiscreteStepper pzt(c2d(plant.pzt, fs, C2dMethod::zoh));

  IirFilter upper = design.t_u_discrete;
  IirFilter lower = design.t_l_discrete;
  upper.reset();
  lower.reset();

  const double f_eff = design.effective_rate_hz;
  const auto tick = std::max<long long>(1, std::llround(fs / f_eff));
  const auto delay_samples =
      std::max<long long>(1, std::llround(latency(design.board) * fs));

  std::vector<double> ring_u(static_cast<std::size_t>(delay_samples), 0.0);
  std::vector<double> ring_l(static_cast<std::size_t>(delay_samples), 0.0);
  std::size_t ring_pos = 0;

  const bool open = force_open || opts.open_loop;
  const QFormat& fmt = design.params.io_format;

  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  int decim = opts.record_decimation;
  if (decim <= 0) {
    decim = static_cast<int>(std::max<long long>(1, n_samples / (1 << 20)));
  }

  // Per-line single-bin DFT over an integer number of periods at the tail.
  const auto settle = static_cast<long long>(opts.settle_fraction * static_cast<double>(n_samples));
  std::vector<Goertzel> bins;
  for (const auto& line : plant.noise_lines) {
    Goertzel g;
    g.freq_hz = line.freq_hz;
    const double tail_s = static_cast<double>(n_samples - settle) / fs;
    const double periods = std::floor(tail_s * line.freq_hz);
    if (periods >= 1.0) {
      g.count = static_cast<long long>(std::floor(periods / line.freq_hz * fs));
      g.start = n_samples - g.count;
    }
    bins.push_back(g);
  }

  LockSimResult res;
  res.decimation = decim;

  double y_v = 0.0;
  double y_p = 0.0;
  double u_u = 0.0;
  double u_l = 0.0;
  int rail_count = 0;

  for (long long n = 0; n < n_samples; ++n) {
    const double t = static_cast<double>(n) / fs;

    const double a_u = ring_u[ring_pos];
    const double a_l = ring_l[ring_pos];
    y_v = vco.step(a_u);
    y_p = pzt.step(a_l);

    double d = 0.0;
    for (const auto& line : plant.noise_lines) {
      d += line.amplitude * std::sin(kTwoPi * line.freq_hz * t + line.phase_rad);
    }
    if (opts.noise_floor > 0.0) d += opts.noise_floor * gauss(rng);

    const double detuning = d - y_v - y_p;
    const double e = plant.pdh_slope * cavity.step(detuning);
    const FixedSample adc = quantize(e, fmt);

    if (adc.saturated) {
      if (++rail_count > opts.rail_limit && !res.lock_lost) {
        res.lock_lost = true;
        res.lock_lost_t = t;
      }
    } else {
      rail_count = 0;
    }

    if (!open && n % tick == 0) {
      u_u = upper.step(adc).value();
      u_l = lower.step(adc).value();
    }
    ring_u[ring_pos] = u_u;
    ring_l[ring_pos] = u_l;
    ring_pos = (ring_pos + 1) % ring_u.size();

    const double e_adc = adc.value();
    for (auto& g : bins) {
      if (g.count > 0 && n >= g.start) {
        g.sum += e_adc * std::polar(1.0, -kTwoPi * g.freq_hz * t);
      }
    }

    if (n % decim == 0) {
      res.t.push_back(t);
      res.error.push_back(e_adc);
      res.u_upper.push_back(u_u);
      res.u_lower.push_back(u_l);
    }
  }

  for (std::size_t i = 0; i < bins.size(); ++i) {
    RejectionRow row;
    row.line_hz = bins[i].freq_hz;
    const double amp = bins[i].count > 0
                           ? 2.0 * std::abs(bins[i].sum) / static_cast<double>(bins[i].count)
                           : 0.0;
    row.closed_db = amp > 0.0 ? to_db(amp) : -400.0;
    row.open_db = 0.0;
    row.predicted_db = 0.0;
    res.rejection.push_back(row);
  }
  return res;
}

}  // namespace

LockSimResult simulate_lock(const LockPlant& plant, const LockDesign& design,
                            const LockSimOptions& opts) {
  LockSimResult res = run_lock_sim(plant, design, opts, /*force_open=*/false);
  if (!opts.open_loop && !plant.noise_lines.empty()) {
    const LockSimResult open = run_lock_sim(plant, design, opts, /*force_open=*/true);
    const double fs = opts.sim_rate_hz > 0.0 ? opts.sim_rate_hz : design.board.clock_hz / 16.0;
    for (std::size_t i = 0; i < res.rejection.size(); ++i) {
      res.rejection[i].open_db = open.rejection[i].closed_db;
      res.rejection[i].predicted_db =
          predicted_suppression_db(plant, design, res.rejection[i].line_hz, fs);
    }
  }
  return res;
}

ReacquireMachine::ReacquireMachine(const ReacquireThresholds& thresholds) : th_(thresholds) {
  if (!(th_.loss_level > th_.capture_level)) {
    throw std::invalid_argument("ReacquireThresholds: loss_level must exceed capture_level");
  }
  if (!(th_.sweep_rate > 0.0) || !(th_.sweep_span > 0.0) || th_.dwell_samples < 1) {
    throw std::invalid_argument("ReacquireThresholds: invalid sweep/dwell parameters");
  }
}

LockState ReacquireMachine::step(double error) {
  const double mag = std::abs(error);
  switch (state_) {
    case LockState::locked:
      if (mag > th_.loss_level) {
        if (++counter_ >= th_.dwell_samples) {
          state_ = LockState::sweeping;
          counter_ = 0;
        }
      } else {
        counter_ = 0;
      }
      break;
    case LockState::sweeping:
      sweep_out_ += sweep_dir_ * th_.sweep_rate;
      if (std::abs(sweep_out_) >= th_.sweep_span) sweep_dir_ = -sweep_dir_;
      if (mag < th_.capture_level) {
        state_ = LockState::honing;
        counter_ = 0;
      }
      break;
    case LockState::honing:
      if (mag < th_.capture_level) {
        if (++counter_ >= th_.dwell_samples) {
          state_ = LockState::locked;
          counter_ = 0;
        }
      } else {
        state_ = LockState::sweeping;
        counter_ = 0;
      }
      break;
  }
  return state_;
}

std::vector<LockState> reacquire_trace(std::span<const double> error,
                                       const ReacquireThresholds& thresholds) {
  ReacquireMachine machine(thresholds);
  std::vector<LockState> out;
  out.reserve(error.size());
  for (const double e : error) out.push_back(machine.step(e));
  return out;
}

ReacquireRun run_reacquire_scenario(const ReacquireScenario& sc) {
  ReacquireMachine machine(sc.thresholds);
  ReacquireRun run;
  run.error.resize(static_cast<std::size_t>(sc.n_samples));
  run.sweep.resize(static_cast<std::size_t>(sc.n_samples));
  run.states.resize(static_cast<std::size_t>(sc.n_samples));

  double correction = 0.0;
  for (int n = 0; n < sc.n_samples; ++n) {
    const double disturbance = (n >= sc.step_at) ? sc.step_detuning : 0.0;
    const double detuning = disturbance - machine.sweep_output() - correction;
    const double e = std::clamp(sc.slope * detuning, -sc.rail, sc.rail);
    const LockState st = machine.step(e);
    if (st == LockState::honing || st == LockState::locked) {
      correction += sc.relock_gain * e;
    }
    run.error[static_cast<std::size_t>(n)] = e;
    run.sweep[static_cast<std::size_t>(n)] = machine.sweep_output();
    run.states[static_cast<std::size_t>(n)] = st;
  }
  run.relocked = !run.states.empty() && run.states.back() == LockState::locked &&
                 std::find(run.states.begin(), run.states.end(), LockState::sweeping) !=
                     run.states.end();
  return run;
}

const char* to_string(LockState s) {
  switch (s) {
    case LockState::locked:
      return "locked";
    case LockState::sweeping:
      return "sweeping";
    case LockState::honing:
      return "honing";
  }
  return "?";
}

}  // namespace pldkit
