#pragma once

#include <Eigen/Core>

#include <optional>
#include <vector>

#include "pldkit/discretize.hpp"
#include "pldkit/fixedpoint.hpp"

namespace pldkit {

/// Linear-phase FIR design: least-squares fit of a symmetric-tap filter to a
/// piecewise-linear amplitude spec. `band_edges` come in pairs on [0, 1]
/// (1 = Nyquist), strictly increasing; `gains` gives the desired amplitude at
/// each edge. The normal equations use closed-form trigonometric integrals,
/// not a frequency grid.
Eigen::VectorXd fir_design_least_squares(const std::vector<double>& band_edges,
                                         const std::vector<double>& gains, int n_taps);

// Bit-serial FIR. One output needs input_bits clock cycles, so the element
// runs at f_C / B_U when fed from a clock f_C; that factor shows up in
// effective_rate / latency_cycles rather than being simulated bit by bit.
class FirFilter {
 public:
  explicit FirFilter(Eigen::VectorXd taps, int input_bits = 12);

  const Eigen::VectorXd& taps() const { return taps_; }
  int input_bits() const { return input_bits_; }
  Eigen::Index n_taps() const { return taps_.size(); }

  double effective_rate(double clock_hz) const { return clock_hz / input_bits_; }
  int latency_cycles() const { return input_bits_; }

  /// (n_taps - 1)/2 * tau_F for symmetric taps; throws for a filter that is
  /// not linear phase.
  double group_delay_s(double clock_hz) const;
  bool has_symmetric_taps(double rel_tol = 1e-12) const;

  /// Infinite-precision step (ideal taps, double arithmetic).
  double step(double u);

  /// Switches on the hardware path: taps quantized through `tap_format`
  /// behind one shared power-of-two scale, integer accumulation with
  /// tap+input+log2(n) guard bits, output trimmed into `out_format`.
  void configure_fixed(const QFormat& tap_format, const QFormat& out_format);
  FixedSample step(const FixedSample& u);

  /// Tap values actually realized after quantization (design taps if the
  /// fixed path is not configured).
  Eigen::VectorXd effective_taps() const;

  bool saturated() const { return saturated_; }
  void reset();

 private:
  Eigen::VectorXd taps_;
  int input_bits_;
  std::vector<double> hist_;

  // fixed-point configuration
  bool fixed_ = false;
  QFormat tap_format_{};
  QFormat out_format_{};
  std::optional<QFormat> in_format_;
  std::vector<std::int64_t> tap_raw_;
  int tap_scale_exp_ = 0;
  std::vector<std::int64_t> hist_raw_;
  bool saturated_ = false;
};

struct IirTrims {
  // LSBs dropped after the feedforward FIR, after the feedback FIR, and at
  // the output. Unset members fall back to the alignment defaults (drop
  // exactly the product guard bits so the binary points line up).
  std::optional<int> ff;
  std::optional<int> fb;
  std::optional<int> out;
};

struct IirFixedConfig {
  int coeff_bits = 32;
  QFormat io_format{12, 11, true};
  IirTrims trims{};
};

// Eq.-recursion filter realized as two FIR blocks and one adder. The
// feedback path makes the element take 2*B_Y cycles per sample, so the
// effective rate is f_C / (2*B_Y).
class IirFilter {
 public:
  /// An unbuilt shell; obtain working instances from iir_build().
  IirFilter() = default;

  double effective_rate(double clock_hz) const { return clock_hz / (2.0 * internal_bits_); }
  int latency_cycles() const { return 2 * internal_bits_; }
  int internal_bits() const { return internal_bits_; }

  const DiscreteTf& design_tf() const { return design_; }
  /// Coefficients as realized after quantization (b[0] pinned to 1).
  const DiscreteTf& quantized_tf() const { return quantized_; }
  bool coefficients_saturated() const { return coeff_saturated_; }
  const QFormat& io_format() const { return io_format_; }
  int trim_ff() const { return trim_ff_; }
  int trim_fb() const { return trim_fb_; }
  int trim_out() const { return trim_out_; }

  /// Infinite-precision recursion with the design coefficients.
  double step(double u);

  /// Hardware path: integer FIR accumulations, trims, saturating adder at
  /// internal_bits, output trimmed into io_format.
  FixedSample step(const FixedSample& u);

  bool saturated() const { return saturated_; }
  void reset();

  friend IirFilter iir_build(const DiscreteTf& g, int internal_bits, const IirFixedConfig& cfg);

 private:
  bool built_ = false;
  DiscreteTf design_;
  DiscreteTf quantized_;
  int internal_bits_ = 32;
  QFormat coeff_format_{};
  QFormat io_format_{};
  QFormat internal_format_{};
  int coeff_scale_exp_ = 0;
  bool coeff_saturated_ = false;

  std::vector<std::int64_t> ff_raw_;  // a(0..N)
  std::vector<std::int64_t> fb_raw_;  // b(1..N)
  int trim_ff_ = 0;
  int trim_fb_ = 0;
  int trim_out_ = 0;

  std::vector<std::int64_t> u_hist_raw_;
  std::vector<std::int64_t> y_hist_raw_;
  std::vector<double> u_hist_;
  std::vector<double> y_hist_;
  bool saturated_ = false;
};

/// Builds the two-FIR-plus-adder structure from a normalized DiscreteTf.
/// Designs with a pole strictly outside the unit circle are refused
/// (feedback around rounding noise would diverge); marginal poles on the
/// circle, e.g. a discrete integrator, are allowed.
IirFilter iir_build(const DiscreteTf& g, int internal_bits, const IirFixedConfig& cfg = {});

}  // namespace pldkit
