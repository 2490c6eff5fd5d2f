#include "pldkit/discretize.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "pldkit/poly.hpp"

namespace pldkit {

namespace {

// Characteristic polynomial of M by the Faddeev-LeVerrier recurrence,
// returned monic in descending powers: [1, c1, ..., cn].
Eigen::VectorXd char_poly(const Eigen::MatrixXd& m) {
  const Eigen::Index n = m.rows();
  Eigen::VectorXd c(n + 1);
  c[0] = 1.0;
  Eigen::MatrixXd mk = Eigen::MatrixXd::Identity(n, n);
  for (Eigen::Index k = 1; k <= n; ++k) {
    mk = m * mk;
    c[k] = -mk.trace() / static_cast<double>(k);
    mk += c[k] * Eigen::MatrixXd::Identity(n, n);
  }
  return c;
}

}  // namespace

DiscreteTf make_discrete_tf(Eigen::VectorXd a, Eigen::VectorXd b, double fs) {
  if (!(fs > 0.0)) throw std::invalid_argument("DiscreteTf: fs must be > 0");
  if (a.size() == 0 || b.size() == 0) {
    throw std::invalid_argument("DiscreteTf: empty coefficient list");
  }
  const double bmax = b.cwiseAbs().maxCoeff();
  if (bmax == 0.0 || std::abs(b[0]) < 1e-12 * bmax) {
    throw std::invalid_argument(
        "DiscreteTf: b[0] ~ 0, transfer function cannot be normalized (singular mapping?)");
  }
  const double b0 = b[0];
  a /= b0;
  b /= b0;
  b[0] = 1.0;

  const Eigen::Index n = std::max(a.size(), b.size());
  DiscreteTf g;
  g.a = Eigen::VectorXd::Zero(n);
  g.b = Eigen::VectorXd::Zero(n);
  g.a.head(a.size()) = a;
  g.b.head(b.size()) = b;
  g.sample_period = 1.0 / fs;
  return g;
}

std::vector<std::complex<double>> discrete_poles(const DiscreteTf& g) {
  // b is ascending in z^-1; as a polynomial in z the coefficients reverse.
  return poly_roots(g.b.reverse());
}

namespace {

DiscreteTf c2d_bilinear(const ContinuousTf& g, double fs, double prewarp_hz) {
  double k = 2.0 * fs;
  if (prewarp_hz > 0.0) {
    const double omega = 2.0 * std::numbers::pi * prewarp_hz;
    const double half_angle = omega / (2.0 * fs);
    if (half_angle >= std::numbers::pi / 2.0) {
      throw std::invalid_argument("c2d: prewarp frequency at or above Nyquist");
    }
    k = omega / std::tan(half_angle);
  }

  // Pole at the singular point s = k maps to z = infinity.
  const double den_at_k = polyval(g.den, k);
  if (std::abs(den_at_k) < 1e-12 * g.den.cwiseAbs().maxCoeff() * std::pow(std::max(1.0, k),
                                   static_cast<double>(g.den_degree()))) {
    throw std::invalid_argument("c2d: continuous pole at the bilinear singular point s = 2*fs");
  }

  const Eigen::Index n = g.den_degree();
  // s^j -> k^j (1-w)^j (1+w)^(n-j) with w = z^-1.
  Eigen::VectorXd one_minus(2), one_plus(2);
  one_minus << 1.0, -1.0;
  one_plus << 1.0, 1.0;

  std::vector<Eigen::VectorXd> minus_pow(n + 1), plus_pow(n + 1);
  minus_pow[0] = Eigen::VectorXd::Ones(1);
  plus_pow[0] = Eigen::VectorXd::Ones(1);
  for (Eigen::Index j = 1; j <= n; ++j) {
    minus_pow[j] = polymul(minus_pow[j - 1], one_minus);
    plus_pow[j] = polymul(plus_pow[j - 1], one_plus);
  }

  Eigen::VectorXd num_w = Eigen::VectorXd::Zero(n + 1);
  Eigen::VectorXd den_w = Eigen::VectorXd::Zero(n + 1);
  double kj = 1.0;
  for (Eigen::Index j = 0; j <= n; ++j) {
    const Eigen::VectorXd basis = polymul(minus_pow[j], plus_pow[n - j]);
    if (j < g.num.size()) num_w += g.num[j] * kj * basis;
    if (j < g.den.size()) den_w += g.den[j] * kj * basis;
    kj *= k;
  }
  return make_discrete_tf(num_w, den_w, fs);
}

DiscreteTf c2d_zoh(const ContinuousTf& g, double fs) {
  const Eigen::Index n = g.den_degree();
  if (n == 0) {
    // Static gain: nothing to hold.
    Eigen::VectorXd a = Eigen::VectorXd::Constant(1, g.num[0] / g.den[0]);
    return make_discrete_tf(a, Eigen::VectorXd::Ones(1), fs);
  }

  Eigen::VectorXd den = poly_strip(g.den);
  const double lead = den[n];
  den /= lead;
  Eigen::VectorXd num = Eigen::VectorXd::Zero(n + 1);
  num.head(g.num.size()) = g.num / lead;

  const double d_term = num[n];
  const Eigen::VectorXd strict = num.head(n) - d_term * den.head(n);

  Eigen::MatrixXd a_mat = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i + 1 < n; ++i) a_mat(i, i + 1) = 1.0;
  for (Eigen::Index j = 0; j < n; ++j) a_mat(n - 1, j) = -den[j];
  Eigen::VectorXd b_vec = Eigen::VectorXd::Zero(n);
  b_vec[n - 1] = 1.0;
  Eigen::RowVectorXd c_vec = strict.transpose();

  // exp([[A,B],[0,0]] T) = [[Ad, Bd],[0, 1]]
  Eigen::MatrixXd aug = Eigen::MatrixXd::Zero(n + 1, n + 1);
  aug.topLeftCorner(n, n) = a_mat;
  aug.topRightCorner(n, 1) = b_vec;
  const Eigen::MatrixXd e = (aug / fs).exp();
  const Eigen::MatrixXd ad = e.topLeftCorner(n, n);
  const Eigen::VectorXd bd = e.topRightCorner(n, 1);

  // den(z) = det(zI - Ad); num_sp(z) = det(zI - Ad + Bd*C) - det(zI - Ad).
  const Eigen::VectorXd den_z = char_poly(ad);
  const Eigen::VectorXd den_plus = char_poly(ad - bd * c_vec);
  Eigen::VectorXd num_z = den_plus - den_z + d_term * den_z;

  // Descending-in-z, monic denominator of degree n maps directly to
  // ascending-in-z^-1 after multiplying through by z^-n.
  return make_discrete_tf(num_z, den_z, fs);
}

}  // namespace

DiscreteTf c2d(const ContinuousTf& g, double fs, C2dMethod method, double prewarp_hz) {
  if (!(fs > 0.0)) throw std::invalid_argument("c2d: fs must be > 0");
  if (!g.is_proper()) {
    throw std::invalid_argument("c2d: transfer function must be proper (deg num <= deg den)");
  }
  switch (method) {
    case C2dMethod::bilinear:
      return c2d_bilinear(g, fs, prewarp_hz);
    case C2dMethod::zoh:
      return c2d_zoh(g, fs);
  }
  throw std::invalid_argument("c2d: unknown method");
}

DifferenceEquation to_difference_equation(const DiscreteTf& g) {
  if (g.b.size() == 0 || g.b[0] != 1.0) {
    throw std::invalid_argument("to_difference_equation: b[0] must be exactly 1 (normalize first)");
  }
  DifferenceEquation eq;
  eq.a = g.a;
  eq.b_fb = g.b.tail(g.b.size() - 1);
  return eq;
}

std::vector<double> simulate(const DifferenceEquation& eq, std::span<const double> input) {
  const Eigen::Index n_ff = eq.a.size();
  const Eigen::Index n_fb = eq.b_fb.size();
  std::vector<double> y(input.size(), 0.0);
  for (std::size_t n = 0; n < input.size(); ++n) {
    double acc_ff = 0.0;
    for (Eigen::Index i = 0; i < n_ff && i <= static_cast<Eigen::Index>(n); ++i) {
      acc_ff += eq.a[i] * input[n - i];
    }
    double acc_fb = 0.0;
    for (Eigen::Index i = 1; i <= n_fb && i <= static_cast<Eigen::Index>(n); ++i) {
      acc_fb += eq.b_fb[i - 1] * y[n - i];
    }
    y[n] = acc_ff - acc_fb;
  }
  return y;
}

DiscreteStepper::DiscreteStepper(const DiscreteTf& g)
    : eq_(to_difference_equation(g)),
      u_hist_(static_cast<std::size_t>(eq_.a.size()), 0.0),
      y_hist_(static_cast<std::size_t>(eq_.b_fb.size()), 0.0) {}

double DiscreteStepper::step(double u) {
  if (!u_hist_.empty()) {
    for (std::size_t i = u_hist_.size() - 1; i > 0; --i) u_hist_[i] = u_hist_[i - 1];
    u_hist_[0] = u;
  }
  double acc_ff = 0.0;
  for (Eigen::Index i = 0; i < eq_.a.size(); ++i) acc_ff += eq_.a[i] * u_hist_[i];
  double acc_fb = 0.0;
  for (Eigen::Index i = 0; i < eq_.b_fb.size(); ++i) acc_fb += eq_.b_fb[i] * y_hist_[i];
  const double y = acc_ff - acc_fb;
  if (!y_hist_.empty()) {
    for (std::size_t i = y_hist_.size() - 1; i > 0; --i) y_hist_[i] = y_hist_[i - 1];
    y_hist_[0] = y;
  }
  return y;
}

void DiscreteStepper::reset() {
  std::fill(u_hist_.begin(), u_hist_.end(), 0.0);
  std::fill(y_hist_.begin(), y_hist_.end(), 0.0);
}

CoefficientQuantization quantize_coefficients(const DiscreteTf& g, const QFormat& fmt) {
  fmt.validate();
  std::vector<double> all(g.a.data(), g.a.data() + g.a.size());
  all.insert(all.end(), g.b.data(), g.b.data() + g.b.size());
  const int scale_exp = shared_scale_exp(all, fmt);
  const double scale = std::ldexp(1.0, scale_exp);

  CoefficientQuantization out;
  out.scale_exp = scale_exp;
  out.format = fmt;
  out.tf = g;
  for (Eigen::Index i = 0; i < g.a.size(); ++i) {
    const FixedSample q = quantize(g.a[i] / scale, fmt);
    out.saturated |= q.saturated;
    out.tf.a[i] = q.value() * scale;
  }
  for (Eigen::Index i = 0; i < g.b.size(); ++i) {
    const FixedSample q = quantize(g.b[i] / scale, fmt);
    out.saturated |= q.saturated;
    out.tf.b[i] = q.value() * scale;
  }
  out.tf.b[0] = 1.0;
  return out;
}

std::complex<double> discrete_freq_response(const DiscreteTf& g, double f_hz) {
  const double fs = g.sample_rate();
  if (f_hz < 0.0 || f_hz > fs / 2.0) {
    throw std::invalid_argument("discrete_freq_response: f must be in [0, fs/2]");
  }
  const double theta = 2.0 * std::numbers::pi * f_hz / fs;
  const std::complex<double> w = std::polar(1.0, -theta);  // z^-1
  const std::complex<double> den = polyval(g.b, w);
  if (den == std::complex<double>{0.0, 0.0}) {
    throw std::domain_error("discrete_freq_response: pole on the unit circle at f");
  }
  return polyval(g.a, w) / den;
}

}  // namespace pldkit
