// Test-only reference computations, kept independent of the library paths
// they are used to check.
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <span>
#include <vector>

namespace oracles {

/// Exhaustive nearest-codeword search over every raw value of a fixed-point
/// format. O(2^bits): keep bits small.
inline std::int64_t nearest_code_bruteforce(double x, int total_bits, int frac_bits,
                                            bool is_signed) {
  const std::int64_t lo = is_signed ? -(std::int64_t{1} << (total_bits - 1)) : 0;
  const std::int64_t hi = is_signed ? (std::int64_t{1} << (total_bits - 1)) - 1
                                    : (std::int64_t{1} << total_bits) - 1;
  std::int64_t best = lo;
  double best_err = std::abs(static_cast<double>(lo) * std::ldexp(1.0, -frac_bits) - x);
  for (std::int64_t raw = lo + 1; raw <= hi; ++raw) {
    const double err = std::abs(static_cast<double>(raw) * std::ldexp(1.0, -frac_bits) - x);
    // Half-away-from-zero tie rule: prefer the larger magnitude on ties.
    if (err < best_err - 1e-18 ||
        (std::abs(err - best_err) <= 1e-18 && std::abs(raw) > std::abs(best))) {
      best = raw;
      best_err = err;
    }
  }
  return best;
}

/// Plain direct convolution restricted to the causal window.
inline std::vector<double> convolve_direct(std::span<const double> taps,
                                           std::span<const double> input) {
  std::vector<double> y(input.size(), 0.0);
  for (std::size_t n = 0; n < input.size(); ++n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < taps.size() && i <= n; ++i) acc += taps[i] * input[n - i];
    y[n] = acc;
  }
  return y;
}

/// First n_terms of the z^-1 power series of a(w)/b(w) by long division
/// (b[0] must be 1). This is the impulse response of the rational system.
inline std::vector<double> power_series(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                                        int n_terms) {
  std::vector<double> h(static_cast<std::size_t>(n_terms), 0.0);
  for (int n = 0; n < n_terms; ++n) {
    double acc = n < a.size() ? a[n] : 0.0;
    for (int k = 1; k <= n && k < b.size(); ++k) {
      acc -= b[k] * h[static_cast<std::size_t>(n - k)];
    }
    h[static_cast<std::size_t>(n)] = acc;
  }
  return h;
}

/// Least-squares amplitude/phase of a known-frequency sinusoid over a sample
/// window: fits y ~ c cos(w n) + s sin(w n) + offset.
struct SinusoidFit {
  double amplitude;
  double phase;  // y ~ amplitude * sin(w n + phase)
};

inline SinusoidFit fit_sinusoid(std::span<const double> y, double omega_per_sample,
                                std::size_t begin = 0) {
  const std::size_t n = y.size();
  Eigen::MatrixXd m(n - begin, 3);
  Eigen::VectorXd rhs(n - begin);
  for (std::size_t i = begin; i < n; ++i) {
    const double t = static_cast<double>(i);
    m(i - begin, 0) = std::sin(omega_per_sample * t);
    m(i - begin, 1) = std::cos(omega_per_sample * t);
    m(i - begin, 2) = 1.0;
    rhs(i - begin) = y[i];
  }
  const Eigen::Vector3d sol = (m.transpose() * m).ldlt().solve(m.transpose() * rhs);
  SinusoidFit fit;
  fit.amplitude = std::hypot(sol[0], sol[1]);
  fit.phase = std::atan2(sol[1], sol[0]);
  return fit;
}

/// Unwraps a phase sequence in place (radians).
inline void unwrap(std::vector<double>& phase) {
  for (std::size_t i = 1; i < phase.size(); ++i) {
    while (phase[i] - phase[i - 1] > std::numbers::pi) phase[i] -= 2.0 * std::numbers::pi;
    while (phase[i] - phase[i - 1] < -std::numbers::pi) phase[i] += 2.0 * std::numbers::pi;
  }
}

/// Ordinary least squares slope of y against x.
inline double fit_slope(std::span<const double> x, std::span<const double> y) {
  const auto n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

/// Dense-grid least-squares linear-phase FIR fit (normal equations on a
/// uniform grid): the independent counterpart of the closed-form design.
inline Eigen::VectorXd fir_ls_grid(const std::vector<double>& edges,
                                   const std::vector<double>& gains, int n_taps,
                                   int grid_points = 1024) {
  const bool odd = (n_taps % 2) != 0;
  const int m = odd ? (n_taps - 1) / 2 : n_taps / 2;
  const int n_basis = odd ? m + 1 : m;

  std::vector<double> ws, ds;
  for (std::size_t band = 0; band + 1 < edges.size(); band += 2) {
    const double w1 = edges[band] * std::numbers::pi;
    const double w2 = edges[band + 1] * std::numbers::pi;
    const int pts = std::max(2, static_cast<int>(grid_points * (w2 - w1) / std::numbers::pi));
    for (int i = 0; i < pts; ++i) {
      const double t = static_cast<double>(i) / (pts - 1);
      ws.push_back(w1 + t * (w2 - w1));
      ds.push_back(gains[band] + t * (gains[band + 1] - gains[band]));
    }
  }
  Eigen::MatrixXd a(ws.size(), n_basis);
  Eigen::VectorXd rhs(ws.size());
  for (std::size_t i = 0; i < ws.size(); ++i) {
    for (int k = 0; k < n_basis; ++k) {
      const double kappa = odd ? static_cast<double>(k) : k + 0.5;
      const double beta = (odd && k == 0) ? 1.0 : 2.0;
      a(static_cast<Eigen::Index>(i), k) = beta * std::cos(kappa * ws[i]);
    }
    rhs(static_cast<Eigen::Index>(i)) = ds[i];
  }
  const Eigen::VectorXd g = (a.transpose() * a).ldlt().solve(a.transpose() * rhs);

  Eigen::VectorXd taps = Eigen::VectorXd::Zero(n_taps);
  if (odd) {
    taps[m] = g[0];
    for (int k = 1; k <= m; ++k) {
      taps[m + k] = g[k];
      taps[m - k] = g[k];
    }
  } else {
    for (int k = 0; k < m; ++k) {
      taps[m + k] = g[k];
      taps[m - 1 - k] = g[k];
    }
  }
  return taps;
}

/// Complex amplitude response of symmetric taps at normalized frequency
/// w (rad/sample), direct summation.
inline std::complex<double> fir_response(const Eigen::VectorXd& taps, double w) {
  std::complex<double> acc{0.0, 0.0};
  for (Eigen::Index i = 0; i < taps.size(); ++i) {
    acc += taps[i] * std::polar(1.0, -w * static_cast<double>(i));
  }
  return acc;
}

/// Single-bin DFT amplitude of y at frequency f (Hz) sampled at fs.
inline double tone_amplitude(std::span<const double> y, double f_hz, double fs) {
  std::complex<double> acc{0.0, 0.0};
  for (std::size_t n = 0; n < y.size(); ++n) {
    acc += y[n] * std::polar(1.0, -2.0 * std::numbers::pi * f_hz * static_cast<double>(n) / fs);
  }
  return 2.0 * std::abs(acc) / static_cast<double>(y.size());
}

struct CircularStats {
  double mean;      // circular mean angle
  double variance;  // 1 - |mean resultant|
};

inline CircularStats circular_stats(std::span<const double> angles) {
  std::complex<double> acc{0.0, 0.0};
  for (const double a : angles) acc += std::polar(1.0, a);
  acc /= static_cast<double>(angles.size());
  return CircularStats{std::arg(acc), 1.0 - std::abs(acc)};
}

}  // namespace oracles
