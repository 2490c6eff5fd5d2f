#pragma once

#include <Eigen/Core>

#include <complex>
#include <vector>

namespace pldkit {

// Rational transfer function in s. Coefficients are stored in ascending
// powers: num[k] multiplies s^k. The pair is kept reduced so that num and
// den never share a common s^k factor and exactly-zero high-order
// coefficients are stripped.
struct ContinuousTf {
  Eigen::VectorXd num = Eigen::VectorXd::Ones(1);
  Eigen::VectorXd den = Eigen::VectorXd::Ones(1);

  Eigen::Index num_degree() const;
  Eigen::Index den_degree() const;
  bool is_proper() const;  // deg(num) <= deg(den)
};

/// Validates and reduces a coefficient pair. Reduction is exact only:
/// common powers of s, and full proportionality (num == c*den within 1e-12
/// relative). No approximate pole/zero cancellation.
ContinuousTf make_tf(Eigen::VectorXd num, Eigen::VectorXd den);

ContinuousTf tf_unity();
ContinuousTf tf_zero();
ContinuousTf tf_gain(double k);
ContinuousTf tf_integrator();

/// omega_c / (s + omega_c): unity DC gain, corner in rad/s.
ContinuousTf low_pass(double omega_c);

/// omega0^2 / (s^2 + (omega0/q) s + omega0^2): unity DC gain.
ContinuousTf harmonic_oscillator(double omega0, double q);

/// Inverse of harmonic_oscillator(omega0, q) shaped into a proper TF:
///   (s^2 + (omega0/q) s + omega0^2) / (omega0^2 * s * (s/omega_p + 1)^2)
/// so that HO * AHO tracks the integrator 1/s below the roll-off poles.
/// omega_p <= 0 selects the default roll-off at 100*omega0.
ContinuousTf aho_compensator(double omega0, double q, double omega_p = 0.0);

/// G(j*omega) by direct polynomial evaluation. Throws std::domain_error
/// when the denominator evaluates to exactly zero (pole on the axis).
std::complex<double> freq_response(const ContinuousTf& tf, double omega);

/// Cascade a*b with exact reduction.
ContinuousTf series(const ContinuousTf& a, const ContinuousTf& b);

/// T_C*T_V / (1 + T_C*T_V*T_U), assembled so the shared plant denominator
/// cancels algebraically instead of numerically.
ContinuousTf closed_loop(const ContinuousTf& t_c, const ContinuousTf& t_v,
                         const ContinuousTf& t_u);

/// Denominator roots. The root set is certified: residual |den(p)| must be
/// below 1e-8 * max|den coeff| or a runtime_error is thrown.
std::vector<std::complex<double>> poles(const ContinuousTf& tf);
std::vector<std::complex<double>> zeros(const ContinuousTf& tf);

/// True iff every pole has strictly negative real part.
bool is_stable(const ContinuousTf& tf);

}  // namespace pldkit
