#include "pldkit/adaptive_phase.hpp"

#include <cmath>
#include <future>
#include <numbers>
#include <random>
#include <stdexcept>
#include <thread>

namespace pldkit {

void PulseConfig::validate() const {
  if (duration_samples < 1) {
    throw std::invalid_argument("PulseConfig: duration_samples must be >= 1");
  }
  if (loop_delay_samples < 0) {
    throw std::invalid_argument("PulseConfig: loop_delay_samples must be >= 0");
  }
  if (amplitude < 0.0) throw std::invalid_argument("PulseConfig: amplitude must be >= 0");
  if (noise_scale < 0.0) throw std::invalid_argument("PulseConfig: noise_scale must be >= 0");
  if (gain_source == GainSource::lut && !gain_table) {
    throw std::invalid_argument("PulseConfig: gain_source lut requires gain_table");
  }
}

double wrap_phase(double phi) {
  const double two_pi = 2.0 * std::numbers::pi;
  double w = std::fmod(phi, two_pi);
  if (w <= -std::numbers::pi) w += two_pi;
  if (w > std::numbers::pi) w -= two_pi;
  return w;
}

double homodyne_increment(double amplitude, double true_phase, double lo_phase, double dt,
                          double dw) {
  if (!(dt > 0.0)) throw std::invalid_argument("homodyne_increment: dt must be > 0");
  return 2.0 * amplitude * std::cos(true_phase - lo_phase) + dw / dt;
}

void update_state(PhaseState& state, double current, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("update_state: dt must be > 0");
  const std::complex<double> rot = std::polar(1.0, state.phi_lo);
  state.a += current * rot * dt;
  state.b -= rot * rot * dt;
  state.v += dt;
}

namespace {

std::complex<double> c_statistic(const PhaseState& s) {
  return s.a * s.v + s.b * std::conj(s.a);
}

}  // namespace

double lo_phase(const PhaseState& state, PhaseAlgorithm algorithm, double hold_phi,
                const std::function<double(double, std::complex<double>, std::complex<double>)>&
                    epsilon) {
  const double half_pi = std::numbers::pi / 2.0;
  switch (algorithm) {
    case PhaseAlgorithm::mark1_arg_a: {
      if (state.a == std::complex<double>{0.0, 0.0}) return hold_phi;
      return wrap_phase(std::arg(state.a) + half_pi);
    }
    case PhaseAlgorithm::gain_scheduled_integrator: {
      // The integrator carries its own phase; callers use integrator_step.
      return hold_phi;
    }
    case PhaseAlgorithm::mark2_epsilon: {
      const double eps = epsilon ? epsilon(state.v, state.a, state.b) : 1.0;
      const std::complex<double> c = c_statistic(state);
      // eps == 1 and eps == 0 are evaluated directly so they coincide
      // bit-for-bit with the pure arg(A) / arg(C) estimators.
      if (eps == 1.0) {
        if (state.a == std::complex<double>{0.0, 0.0}) return hold_phi;
        return wrap_phase(std::arg(state.a) + half_pi);
      }
      if (eps == 0.0) {
        if (c == std::complex<double>{0.0, 0.0}) return hold_phi;
        return wrap_phase(std::arg(c) + half_pi);
      }
      if (state.a == std::complex<double>{0.0, 0.0} || c == std::complex<double>{0.0, 0.0}) {
        return hold_phi;
      }
      const std::complex<double> mix = std::pow(c, 1.0 - eps) * std::pow(state.a, eps);
      if (mix == std::complex<double>{0.0, 0.0}) return hold_phi;
      return wrap_phase(std::arg(mix) + half_pi);
    }
  }
  throw std::invalid_argument("lo_phase: unknown algorithm");
}

double integrator_step(double phi, double current, double v, double dt, GainSource source,
                       RamBlock* table) {
  if (!(v > 0.0)) throw std::invalid_argument("integrator_step: v must be > 0");
  double gain;
  if (source == GainSource::lut) {
    if (table == nullptr) throw std::invalid_argument("integrator_step: lut gain needs a table");
    gain = table->lookup(v);
  } else {
    gain = 1.0 / std::sqrt(v);
  }
  return phi + current * dt * gain;
}

double final_estimate(const PhaseState& state) {
  if (state.a == std::complex<double>{0.0, 0.0}) {
    throw std::domain_error("final_estimate: A is zero, phase estimate undefined");
  }
  const std::complex<double> c = c_statistic(state);
  if (c == std::complex<double>{0.0, 0.0}) {
    throw std::domain_error("final_estimate: C is zero, phase estimate undefined");
  }
  return wrap_phase(std::arg(c));
}

PulseTrajectory simulate_pulse(const PulseConfig& cfg) {
  cfg.validate();
  const int n = cfg.duration_samples;
  const double dt = cfg.dt();
  const double sqrt_dt = std::sqrt(dt);

  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  // Commands wait loop_delay_samples before the light sees them; slot 0 of
  // the queue is the phase currently applied.
  std::vector<double> pending(static_cast<std::size_t>(cfg.loop_delay_samples) + 1, 0.0);

  // Local copy so simulate_pulse stays a pure function of its config.
  std::optional<RamBlock> table = cfg.gain_table;
  RamBlock* table_ptr = table ? &*table : nullptr;

  PhaseState state;
  double integrator_phi = 0.0;
  double last_command = 0.0;
  double last_mid = 0.0;

  PulseTrajectory traj;
  traj.times.resize(n);
  traj.current.resize(n);
  traj.lo_phase.resize(n);
  traj.mid_estimate.resize(n);

  for (int k = 0; k < n; ++k) {
    const double applied = pending.front();
    const double dw = cfg.noise_scale * sqrt_dt * gauss(rng);
    const double current = homodyne_increment(cfg.amplitude, cfg.true_phase, applied, dt, dw);

    state.phi_lo = applied;
    update_state(state, current, dt);

    traj.times[k] = state.v;
    traj.current[k] = current;
    traj.lo_phase[k] = applied;
    if (state.a != std::complex<double>{0.0, 0.0} &&
        c_statistic(state) != std::complex<double>{0.0, 0.0}) {
      last_mid = wrap_phase(std::arg(c_statistic(state)));
    }
    traj.mid_estimate[k] = last_mid;

    double command;
    if (cfg.algorithm == PhaseAlgorithm::gain_scheduled_integrator) {
      integrator_phi =
          integrator_step(integrator_phi, current, state.v, dt, cfg.gain_source, table_ptr);
      command = integrator_phi;
    } else {
      command = lo_phase(state, cfg.algorithm, last_command, cfg.epsilon);
    }
    last_command = command;

    pending.erase(pending.begin());
    pending.push_back(command);
  }

  traj.final_estimate = final_estimate(state);
  return traj;
}

std::vector<TrialResult> monte_carlo(const PulseConfig& base, int trials, int n_threads) {
  if (trials < 1) throw std::invalid_argument("monte_carlo: trials must be >= 1");
  if (n_threads <= 0) {
    n_threads = static_cast<int>(std::thread::hardware_concurrency());
    if (n_threads <= 0) n_threads = 1;
  }
  n_threads = std::min(n_threads, trials);

  std::vector<TrialResult> results(static_cast<std::size_t>(trials));
  auto worker = [&](int begin, int end) {
    for (int i = begin; i < end; ++i) {
      PulseConfig cfg = base;
      cfg.seed = base.seed + static_cast<std::uint64_t>(i);
      const PulseTrajectory traj = simulate_pulse(cfg);
      results[static_cast<std::size_t>(i)] =
          TrialResult{cfg.seed, traj.final_estimate,
                      wrap_phase(traj.final_estimate - cfg.true_phase)};
    }
  };

  std::vector<std::future<void>> futures;
  const int chunk = (trials + n_threads - 1) / n_threads;
  for (int t = 0; t < n_threads; ++t) {
    const int begin = t * chunk;
    const int end = std::min(trials, begin + chunk);
    if (begin >= end) break;
    futures.push_back(std::async(std::launch::async, worker, begin, end));
  }
  for (auto& f : futures) f.get();
  return results;
}

}  // namespace pldkit
