#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <tuple>
#include <vector>

#include "pldkit/discretize.hpp"
#include "pldkit/filters.hpp"
#include "pldkit/lti.hpp"
#include "pldkit/pipeline.hpp"

namespace pldkit {

struct NoiseLine {
  double freq_hz = 0.0;
  double amplitude = 0.0;  // relative to the ADC full scale
  double phase_rad = 0.0;
};

// Everything the loop acts on. The Pound-Drever-Hall detection chain is
// abstracted to error = pdh_slope * (detuning filtered by the cavity pole).
struct LockPlant {
  ContinuousTf t_c;   // cavity linewidth low-pass
  ContinuousTf t_v;   // VCO-AOM frequency actuator
  ContinuousTf pzt;   // slow length actuator
  std::vector<NoiseLine> noise_lines;
  double pdh_slope = 1.0;
};

/// 10 kHz cavity, 100 kHz VCO-AOM, 1 kHz PZT model, one disturbance line at
/// the laser's 100 kHz relaxation-oscillation peak.
LockPlant default_lock_plant();

/// Sum of weighted unity-gain resonances: a PZT that rings instead of
/// rolling off smoothly. modes = (f0_hz, q, weight).
ContinuousTf pzt_multiresonance(const std::vector<std::tuple<double, double, double>>& modes);

/// T_U = T_LP1 * T_LP2^2 / (T_C * T_V): flat below f_lp1 (where the PZT arm
/// takes over), plant inversion in between, double-pole roll-off at f_lp2
/// beyond the closing point. loop_gain scales T_LP1 and sets the open-loop
/// crossover at roughly loop_gain * f_lp1. Throws if the plant inversion
/// leaves an improper result.
ContinuousTf design_upper(const LockPlant& plant, double f_lp1_hz, double f_lp2_hz,
                          double loop_gain = 300.0);

/// Single-pole low-pass with the given corner and DC gain.
ContinuousTf design_lower(double corner_hz, double dc_gain = 1.0);

struct LockDesignParams {
  double f_lp1_hz = 100.0;
  double f_lp2_hz = 300e3;
  double loop_gain = 300.0;
  double t_l_corner_hz = 2.0;
  double t_l_dc_gain = 100.0;
  int internal_bits = 32;  // B_Y of both IIR structures
  int coeff_bits = 32;
  QFormat io_format{12, 11, true};
};

struct LockDesign {
  ContinuousTf t_u;
  ContinuousTf t_l;
  IirFilter t_u_discrete;
  IirFilter t_l_discrete;
  Board board;
  LockDesignParams params;
  double effective_rate_hz = 0.0;  // clock / (2 * internal_bits)
};

/// Designs both arms and discretizes them (bilinear) at the IIR effective
/// rate of the given board.
LockDesign make_lock_design(const LockPlant& plant, const Board& board,
                            const LockDesignParams& params = {});

struct BodePoint {
  double freq_hz;
  double mag_db;
  double phase_deg;  // unwrapped along the sweep
};

/// Log-spaced sweep of a continuous TF.
std::vector<BodePoint> report_bode(const ContinuousTf& tf, double f_lo, double f_hi, int points);

/// Log-spaced sweep of a built IIR structure: quantized coefficients plus
/// the structure's own one-effective-sample delay. f_hi must stay at or
/// below the effective Nyquist rate.
std::vector<BodePoint> report_bode(const IirFilter& filter, double f_lo, double f_hi, int points,
                                   double clock_hz);

struct LockSimOptions {
  double duration_s = 0.05;
  double sim_rate_hz = 0.0;      // 0 -> board clock / 16
  std::uint64_t seed = 1;
  double settle_fraction = 0.5;  // rejection measured on the remaining tail
  bool open_loop = false;
  double noise_floor = 0.0;      // white detuning noise, 0 disables the RNG
  int record_decimation = 0;     // 0 -> auto, capped near 2^20 rows
  int rail_limit = 1000;         // consecutive railed samples -> lock lost
};

struct RejectionRow {
  double line_hz;
  double open_db;       // measured error amplitude with the loop open
  double closed_db;     // measured error amplitude with the loop closed
  double predicted_db;  // linear-model prediction of closed - open
};

struct LockSimResult {
  std::vector<double> t;
  std::vector<double> error;    // ADC view of the error signal
  std::vector<double> u_upper;  // VCO-AOM arm drive
  std::vector<double> u_lower;  // PZT arm drive
  int decimation = 1;
  bool lock_lost = false;
  double lock_lost_t = -1.0;
  std::vector<RejectionRow> rejection;
};

/// Fixed-step closed-loop run: ZOH-discretized plant at the simulation
/// rate, board latency as a whole-sample delay in each digital arm,
/// fixed-point IIR controllers ticking at their effective rate. A railed
/// error signal for rail_limit consecutive samples flags lock_lost instead
/// of aborting. Deterministic for fixed options.
LockSimResult simulate_lock(const LockPlant& plant, const LockDesign& design,
                            const LockSimOptions& opts = {});

/// Open-loop gain of the linearized digital loop model at f (both arms,
/// quantized filters, board delay, effective-rate hold).
std::complex<double> loop_gain_at(const LockPlant& plant, const LockDesign& design, double f_hz,
                                  double sim_rate_hz);

/// 20 log10 |1 / (1 + L)| at f: predicted closed/open error ratio.
double predicted_suppression_db(const LockPlant& plant, const LockDesign& design, double f_hz,
                                double sim_rate_hz);

// --- lock-loss handling ------------------------------------------------

enum class LockState { locked, sweeping, honing };

struct ReacquireThresholds {
  double loss_level = 0.9;     // sustained |error| above this = lock lost
  double capture_level = 0.2;  // |error| back below this while sweeping
  double sweep_rate = 0.002;   // actuator units per sample
  double sweep_span = 8.0;     // triangle sweep turnaround
  int dwell_samples = 50;      // persistence required for both transitions
};

/// Three-state machine: locked -> sweeping on sustained loss, sweeping
/// emits a triangle ramp, -> honing when the error re-enters capture,
/// -> locked after a dwell. Pure function of the samples it is fed.
class ReacquireMachine {
 public:
  explicit ReacquireMachine(const ReacquireThresholds& thresholds);
  LockState step(double error);
  LockState state() const { return state_; }
  double sweep_output() const { return sweep_out_; }

 private:
  ReacquireThresholds th_;
  LockState state_ = LockState::locked;
  int counter_ = 0;
  double sweep_out_ = 0.0;
  double sweep_dir_ = 1.0;
};

/// Batch replay of the machine over a recorded error signal.
std::vector<LockState> reacquire_trace(std::span<const double> error,
                                       const ReacquireThresholds& thresholds);

struct ReacquireScenario {
  double slope = 1.0;
  double rail = 1.0;
  double step_detuning = 5.0;  // knock applied to the cavity
  int step_at = 2000;
  int n_samples = 20000;
  double relock_gain = 0.05;  // integral pull applied while honing/locked
  ReacquireThresholds thresholds{};
};

struct ReacquireRun {
  std::vector<double> error;
  std::vector<double> sweep;
  std::vector<LockState> states;
  bool relocked = false;
};

/// Toy co-simulation for the full lose -> sweep -> hone -> relock cycle:
/// the machine's ramp drives a saturating fringe model of the error signal.
ReacquireRun run_reacquire_scenario(const ReacquireScenario& sc = {});

const char* to_string(LockState s);

}  // namespace pldkit
