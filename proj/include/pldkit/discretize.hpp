#pragma once

#include <Eigen/Core>

#include <complex>
#include <span>
#include <vector>

#include "pldkit/fixedpoint.hpp"
#include "pldkit/lti.hpp"

namespace pldkit {

// Rational transfer function in z^-1:
//   G(z) = (a[0] + a[1] z^-1 + ... + a[N] z^-N) /
//          (b[0] + b[1] z^-1 + ... + b[N] z^-N)
// Kept normalized with b[0] == 1 and a, b of equal length.
struct DiscreteTf {
  Eigen::VectorXd a = Eigen::VectorXd::Ones(1);
  Eigen::VectorXd b = Eigen::VectorXd::Ones(1);
  double sample_period = 1.0;

  double sample_rate() const { return 1.0 / sample_period; }
  Eigen::Index order() const { return a.size() - 1; }
};

/// Normalizes b[0] to 1 (throws if it is ~0 relative to max|b|) and pads the
/// shorter list with zeros so both have equal length.
DiscreteTf make_discrete_tf(Eigen::VectorXd a, Eigen::VectorXd b, double fs);

/// Poles in the z plane (roots of b viewed as a polynomial in z).
std::vector<std::complex<double>> discrete_poles(const DiscreteTf& g);

enum class C2dMethod { bilinear, zoh };

/// Continuous-to-discrete conversion.
///  - bilinear: s -> 2*fs*(1-z^-1)/(1+z^-1). `prewarp_hz` > 0 adjusts the
///    mapping constant so the response is exact at that frequency.
///  - zoh: step-response match at the sample instants (state-space route).
/// Requires a proper TF. A continuous pole at the bilinear singular point
/// s = 2*fs makes the mapping degenerate and throws.
DiscreteTf c2d(const ContinuousTf& g, double fs, C2dMethod method = C2dMethod::bilinear,
               double prewarp_hz = 0.0);

// Time-domain recursion y(n) = sum a(i) u(n-i) - sum_{i>=1} b(i) y(n-i).
struct DifferenceEquation {
  Eigen::VectorXd a;     // feedforward, a(0..N)
  Eigen::VectorXd b_fb;  // feedback, b(1..N)

  Eigen::Index order() const { return a.size() - 1; }
};

/// Extracts the recursion from a normalized DiscreteTf (b[0] must be 1;
/// otherwise a normalization-required error is thrown).
DifferenceEquation to_difference_equation(const DiscreteTf& g);

/// Reference simulation from zero initial state.
std::vector<double> simulate(const DifferenceEquation& eq, std::span<const double> input);

/// Streaming form of the recursion, zero initial state.
class DiscreteStepper {
 public:
  DiscreteStepper() = default;
  explicit DiscreteStepper(const DiscreteTf& g);
  double step(double u);
  void reset();

 private:
  DifferenceEquation eq_;
  std::vector<double> u_hist_;
  std::vector<double> y_hist_;
};

struct CoefficientQuantization {
  DiscreteTf tf;         // quantized coefficients, b[0] re-pinned to 1
  bool saturated = false;
  int scale_exp = 0;     // shared power-of-two scale 2^scale_exp
  QFormat format{};
};

/// Quantizes every coefficient through `fmt` after pulling out one shared
/// power-of-two scale sized so the largest magnitude fits.
CoefficientQuantization quantize_coefficients(const DiscreteTf& g, const QFormat& fmt);

/// G at z = e^{j 2 pi f / fs}; f above Nyquist throws.
std::complex<double> discrete_freq_response(const DiscreteTf& g, double f_hz);

}  // namespace pldkit
