#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "pldkit/lut.hpp"

namespace pldkit {

enum class PhaseAlgorithm {
  mark1_arg_a,                // Phi = arg(A) + pi/2
  gain_scheduled_integrator,  // dPhi = I dt / sqrt(v)
  mark2_epsilon,              // Phi = arg(C^(1-eps) A^eps) + pi/2
};

enum class GainSource { direct, lut };

// Running sufficient statistics of one pulse. phi_lo is the LO phase the
// light is currently seeing; A and B follow
//   A_v = int_0^v I(u) e^{i Phi(u)} du,   B_v = -int_0^v e^{2 i Phi(u)} du
// accumulated with the Euler-Maruyama step of the simulation.
struct PhaseState {
  double v = 0.0;
  double phi_lo = 0.0;
  std::complex<double> a{0.0, 0.0};
  std::complex<double> b{0.0, 0.0};
};

struct PulseConfig {
  int duration_samples = 1000;   // dt = 1/duration_samples so v runs (0, 1]
  double amplitude = 5.0;        // |alpha| of the coherent pulse
  double true_phase = 0.0;       // phi to be estimated, radians
  int loop_delay_samples = 0;    // extra staleness of Phi seen by the light
  PhaseAlgorithm algorithm = PhaseAlgorithm::gain_scheduled_integrator;
  std::uint64_t seed = 1;
  double noise_scale = 1.0;      // scales dW; 0 gives a deterministic run
  GainSource gain_source = GainSource::direct;
  std::optional<RamBlock> gain_table;  // 1/sqrt(v) table when gain_source == lut
  // mark2 only; defaults to eps = 1 (reduces to mark1) when unset.
  std::function<double(double v, std::complex<double> a, std::complex<double> b)> epsilon;

  double dt() const { return 1.0 / duration_samples; }
  void validate() const;
};

struct PulseTrajectory {
  std::vector<double> times;         // v after each sample
  std::vector<double> current;       // I(v)
  std::vector<double> lo_phase;      // Phi(v) actually applied (unwrapped)
  std::vector<double> mid_estimate;  // arg(C_v) as it evolves, wrapped
  double final_estimate = 0.0;       // arg(C_1), wrapped to (-pi, pi]
};

/// Reduce an angle to (-pi, pi].
double wrap_phase(double phi);

/// Photocurrent sample for one step: I = 2|alpha| cos(phi - Phi) + dW/dt,
/// the Euler-Maruyama form of I dt = 2|alpha| cos(phi - Phi) dt + dW.
double homodyne_increment(double amplitude, double true_phase, double lo_phase, double dt,
                          double dw);

/// Accumulates A += I e^{i Phi} dt, B -= e^{2 i Phi} dt, v += dt, using the
/// phase currently stored in state.phi_lo.
void update_state(PhaseState& state, double current, double dt);

/// Estimator output Phi = phi_hat + pi/2, wrapped. Degenerate inputs (A = 0,
/// or C = 0 for the mark2 mixture) fall back to `hold_phi`.
double lo_phase(const PhaseState& state, PhaseAlgorithm algorithm, double hold_phi,
                const std::function<double(double, std::complex<double>, std::complex<double>)>&
                    epsilon = {});

/// One gain-scheduled integrator step: Phi' = Phi + I dt / sqrt(v). The gain
/// comes from direct evaluation or a RAM-block table of 1/sqrt(v).
double integrator_step(double phi, double current, double v, double dt,
                       GainSource source = GainSource::direct, RamBlock* table = nullptr);

/// arg(A*1 + B*conj(A)) at pulse end, wrapped. Throws when A == 0 (the
/// estimate is undefined).
double final_estimate(const PhaseState& state);

/// Full closed-loop run of one pulse. Deterministic for a fixed config
/// (including seed).
PulseTrajectory simulate_pulse(const PulseConfig& cfg);

struct TrialResult {
  std::uint64_t seed;
  double estimate;
  double error;  // wrapped estimate - true_phase
};

/// Monte-Carlo batch: trial i runs with seed base_seed + i. Results are
/// ordered by trial and independent of n_threads.
std::vector<TrialResult> monte_carlo(const PulseConfig& base, int trials, int n_threads = 0);

}  // namespace pldkit
