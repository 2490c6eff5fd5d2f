#include "pldkit/lti.hpp"

#include "pldkit/poly.hpp"

#include <cmath>
#include <stdexcept>

namespace pldkit {

namespace {

constexpr double kReduceRelTol = 1e-12;

// Cancel a common s^k factor and exact proportionality; keep everything else.
ContinuousTf reduce(Eigen::VectorXd num, Eigen::VectorXd den) {
  num = poly_strip(num);
  den = poly_strip(den);
  if (poly_degree(den) < 0) {
    throw std::invalid_argument("ContinuousTf: denominator is identically zero");
  }
  if (poly_degree(num) < 0) {
    ContinuousTf tf;
    tf.num = Eigen::VectorXd::Zero(1);
    tf.den = Eigen::VectorXd::Ones(1);
    return tf;
  }

  Eigen::Index shift = 0;
  while (shift < num.size() - 1 && shift < den.size() - 1 && num[shift] == 0.0 &&
         den[shift] == 0.0) {
    ++shift;
  }
  if (shift > 0) {
    num = num.tail(num.size() - shift).eval();
    den = den.tail(den.size() - shift).eval();
  }

  if (num.size() == den.size()) {
    Eigen::Index pivot;
    den.cwiseAbs().maxCoeff(&pivot);
    const double scale = num[pivot] / den[pivot];
    const double tol = kReduceRelTol * num.cwiseAbs().maxCoeff();
    if ((num - scale * den).cwiseAbs().maxCoeff() <= tol) {
      ContinuousTf tf;
      tf.num = Eigen::VectorXd::Constant(1, scale);
      tf.den = Eigen::VectorXd::Ones(1);
      return tf;
    }
  }

  ContinuousTf tf;
  tf.num = std::move(num);
  tf.den = std::move(den);
  return tf;
}

}  // namespace

Eigen::Index ContinuousTf::num_degree() const { return poly_degree(num); }
Eigen::Index ContinuousTf::den_degree() const { return poly_degree(den); }
bool ContinuousTf::is_proper() const { return num_degree() <= den_degree(); }

ContinuousTf make_tf(Eigen::VectorXd num, Eigen::VectorXd den) {
  if (num.size() == 0 || den.size() == 0) {
    throw std::invalid_argument("ContinuousTf: empty coefficient list");
  }
  return reduce(std::move(num), std::move(den));
}

ContinuousTf tf_unity() { return {}; }

ContinuousTf tf_zero() {
  ContinuousTf tf;
  tf.num = Eigen::VectorXd::Zero(1);
  return tf;
}

ContinuousTf tf_gain(double k) {
  ContinuousTf tf;
  tf.num = Eigen::VectorXd::Constant(1, k);
  return tf;
}

ContinuousTf tf_integrator() {
  ContinuousTf tf;
  tf.num = Eigen::VectorXd::Ones(1);
  tf.den = Eigen::VectorXd::Zero(2);
  tf.den[1] = 1.0;
  return tf;
}

ContinuousTf low_pass(double omega_c) {
  if (!(omega_c > 0.0)) throw std::invalid_argument("low_pass: corner must be > 0");
  ContinuousTf tf;
  tf.num = Eigen::VectorXd::Constant(1, omega_c);
  tf.den = Eigen::VectorXd(2);
  tf.den << omega_c, 1.0;
  return tf;
}

ContinuousTf harmonic_oscillator(double omega0, double q) {
  if (!(omega0 > 0.0) || !(q > 0.0)) {
    throw std::invalid_argument("harmonic_oscillator: omega0 and q must be > 0");
  }
  ContinuousTf tf;
  tf.num = Eigen::VectorXd::Constant(1, omega0 * omega0);
  tf.den = Eigen::VectorXd(3);
  tf.den << omega0 * omega0, omega0 / q, 1.0;
  return tf;
}

ContinuousTf aho_compensator(double omega0, double q, double omega_p) {
  if (!(omega0 > 0.0) || !(q > 0.0)) {
    throw std::invalid_argument("aho_compensator: omega0 and q must be > 0");
  }
  if (omega_p <= 0.0) omega_p = 100.0 * omega0;

  Eigen::VectorXd num(3);
  num << omega0 * omega0, omega0 / q, 1.0;

  // omega0^2 * s * (s/omega_p + 1)^2
  Eigen::VectorXd s_term(2);
  s_term << 0.0, 1.0;
  Eigen::VectorXd rolloff(2);
  rolloff << 1.0, 1.0 / omega_p;
  Eigen::VectorXd den = polymul(s_term, polymul(rolloff, rolloff)) * (omega0 * omega0);
  return make_tf(num, den);
}

std::complex<double> freq_response(const ContinuousTf& tf, double omega) {
  if (omega < 0.0) throw std::invalid_argument("freq_response: omega must be >= 0");
  const std::complex<double> s{0.0, omega};
  const std::complex<double> d = polyval(tf.den, s);
  if (d == std::complex<double>{0.0, 0.0}) {
    throw std::domain_error("freq_response: pole on the j*omega axis");
  }
  return polyval(tf.num, s) / d;
}

ContinuousTf series(const ContinuousTf& a, const ContinuousTf& b) {
  return reduce(polymul(a.num, b.num), polymul(a.den, b.den));
}

ContinuousTf closed_loop(const ContinuousTf& t_c, const ContinuousTf& t_v,
                         const ContinuousTf& t_u) {
  // T_CL = P*U_den / (Q*U_den + P*U_num) with P = Tc_num*Tv_num,
  // Q = Tc_den*Tv_den; the plant denominator cancels symbolically.
  const Eigen::VectorXd p = polymul(t_c.num, t_v.num);
  const Eigen::VectorXd q = polymul(t_c.den, t_v.den);
  const Eigen::VectorXd num = polymul(p, t_u.den);
  const Eigen::VectorXd den = polyadd(polymul(q, t_u.den), polymul(p, t_u.num));
  if (poly_degree(den) < 0) {
    throw std::invalid_argument("closed_loop: degenerate (zero) denominator");
  }
  return reduce(num, den);
}

namespace {

std::vector<std::complex<double>> certified_roots(const Eigen::VectorXd& p,
                                                  const char* what) {
  auto roots = poly_roots(p);
  const double scale = p.cwiseAbs().maxCoeff();
  if (poly_root_residual(p, roots) > 1e-8 * scale) {
    throw std::runtime_error(std::string(what) + ": root residual exceeds 1e-8 * |coeffs|");
  }
  return roots;
}

}  // namespace

std::vector<std::complex<double>> poles(const ContinuousTf& tf) {
  return certified_roots(tf.den, "poles");
}

std::vector<std::complex<double>> zeros(const ContinuousTf& tf) {
  return certified_roots(tf.num, "zeros");
}

bool is_stable(const ContinuousTf& tf) {
  for (const auto& p : poles(tf)) {
    if (p.real() >= 0.0) return false;
  }
  return true;
}

}  // namespace pldkit
