#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <stdexcept>

#include "oracles.hpp"
#include "pldkit/discretize.hpp"
#include "pldkit/poly.hpp"

using namespace pldkit;
using std::numbers::pi;

TEST_CASE("bilinear image of the integrator is the trapezoid rule") {
  const double fs = 1e8;
  const DiscreteTf g = c2d(tf_integrator(), fs);
  const double t = 1.0 / fs;
  REQUIRE(g.a.size() == 2);
  REQUIRE(g.b.size() == 2);
  CHECK(g.a[0] == t / 2.0);
  CHECK(g.a[1] == t / 2.0);
  CHECK(g.b[0] == 1.0);
  CHECK(g.b[1] == -1.0);
}

TEST_CASE("static gain discretizes to itself under both methods") {
  for (const auto method : {C2dMethod::bilinear, C2dMethod::zoh}) {
    const DiscreteTf g = c2d(tf_gain(1.0), 48e3, method);
    REQUIRE(g.a.size() == 1);
    CHECK(g.a[0] == 1.0);
    CHECK(g.b[0] == 1.0);
  }
}

TEST_CASE("bilinear frequency-warping identity for a first-order low-pass") {
  const double fs = 1e6;
  const ContinuousTf lp = low_pass(2.0 * pi * 50e3);
  const DiscreteTf g = c2d(lp, fs);
  for (int i = 1; i <= 20; ++i) {
    const double f = fs / 2.0 * i / 21.0;
    const double warped = 2.0 * fs * std::tan(pi * f / fs);
    const auto discrete = discrete_freq_response(g, f);
    const auto cont = freq_response(lp, warped);
    CHECK(std::abs(discrete - cont) <= 1e-9 * std::abs(cont));
  }
}

TEST_CASE("bilinear prewarp makes the response exact at the chosen corner") {
  const double fs = 1.5625e6;
  const double f_match = 300e3;
  const ContinuousTf lp = low_pass(2.0 * pi * f_match);
  const DiscreteTf g = c2d(lp, fs, C2dMethod::bilinear, f_match);
  const auto h = discrete_freq_response(g, f_match);
  const auto target = freq_response(lp, 2.0 * pi * f_match);
  CHECK(std::abs(h - target) <= 1e-9 * std::abs(target));
}

TEST_CASE("c2d rejects improper input and the singular bilinear pole") {
  Eigen::VectorXd num(3), den(2);
  num << 0.0, 0.0, 1.0;
  den << 1.0, 1.0;
  CHECK_THROWS_AS(c2d(make_tf(num, den), 1e3), std::invalid_argument);

  const double fs = 1e4;
  Eigen::VectorXd n1(1), d1(2);
  n1 << 1.0;
  d1 << -2.0 * fs, 1.0;  // pole exactly at s = 2 fs
  CHECK_THROWS_AS(c2d(make_tf(n1, d1), fs), std::invalid_argument);
}

TEST_CASE("bilinear maps stable continuous poles strictly inside the unit circle") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> re(-3.0, -0.05), im(0.0, 3.0);
  std::uniform_int_distribution<int> ord(1, 4);
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::VectorXd den = Eigen::VectorXd::Ones(1);
    int n = ord(rng);
    while (n > 0) {
      if (n >= 2) {
        const double a = re(rng), b = im(rng);
        Eigen::VectorXd quad(3);
        quad << a * a + b * b, -2.0 * a, 1.0;
        den = polymul(den, quad);
        n -= 2;
      } else {
        Eigen::VectorXd lin(2);
        lin << -re(rng), 1.0;
        den = polymul(den, lin);
        n -= 1;
      }
    }
    const DiscreteTf g = c2d(make_tf(Eigen::VectorXd::Ones(1), den), 10.0);
    for (const auto& p : discrete_poles(g)) CHECK(std::abs(p) < 1.0);
  }
}

TEST_CASE("bilinear converges to the continuous response as fs grows") {
  const ContinuousTf lp = low_pass(2.0 * pi * 50.0);
  const double f_test = 100.0;
  const auto target = freq_response(lp, 2.0 * pi * f_test);
  double prev = 1e300;
  for (const double fs : {10.0 * f_test, 100.0 * f_test, 1000.0 * f_test}) {
    const DiscreteTf g = c2d(lp, fs);
    const double err = std::abs(discrete_freq_response(g, f_test) - target);
    CHECK(err < prev);
    prev = err;
  }
}

TEST_CASE("zoh of the integrator is the forward accumulator") {
  const double fs = 1e6;
  const DiscreteTf g = c2d(tf_integrator(), fs, C2dMethod::zoh);
  const double t = 1.0 / fs;
  REQUIRE(g.a.size() == 2);
  CHECK(g.a[0] == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(g.a[1] == doctest::Approx(t).epsilon(1e-12));
  CHECK(g.b[1] == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("zoh matches the analytic step response at sample instants") {
  const double fs = 50e3;
  const double t = 1.0 / fs;

  // First order.
  const double wc = 2.0 * pi * 1.3e3;
  const DiscreteTf lp = c2d(low_pass(wc), fs, C2dMethod::zoh);
  std::vector<double> step(200, 1.0);
  const auto y = simulate(to_difference_equation(lp), step);
  for (std::size_t n = 0; n < y.size(); ++n) {
    const double expected = 1.0 - std::exp(-wc * static_cast<double>(n) * t);
    CHECK(y[n] == doctest::Approx(expected).epsilon(1e-9).scale(1.0));
  }

  // Second order, underdamped.
  const double w0 = 2.0 * pi * 900.0;
  const double q = 4.0;
  const double zeta = 0.5 / q;
  const DiscreteTf ho = c2d(harmonic_oscillator(w0, q), fs, C2dMethod::zoh);
  const auto y2 = simulate(to_difference_equation(ho), step);
  const double wd = w0 * std::sqrt(1.0 - zeta * zeta);
  for (std::size_t n = 0; n < y2.size(); ++n) {
    const double tt = static_cast<double>(n) * t;
    const double expected =
        1.0 - std::exp(-zeta * w0 * tt) *
                  (std::cos(wd * tt) + zeta / std::sqrt(1.0 - zeta * zeta) * std::sin(wd * tt));
    CHECK(y2[n] == doctest::Approx(expected).epsilon(1e-8).scale(1.0));
  }
}

TEST_CASE("difference equation: identity and trapezoid forms") {
  const DiscreteTf ident = make_discrete_tf(Eigen::VectorXd::Ones(1), Eigen::VectorXd::Ones(1),
                                            1e3);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<double> u(64);
  for (auto& x : u) x = dist(rng);
  const auto y = simulate(to_difference_equation(ident), u);
  for (std::size_t n = 0; n < u.size(); ++n) CHECK(y[n] == u[n]);

  const double fs = 1e3;
  const DiscreteTf integ = c2d(tf_integrator(), fs);
  const auto yi = simulate(to_difference_equation(integ), u);
  const double t = 1.0 / fs;
  double acc = 0.0;
  for (std::size_t n = 0; n < u.size(); ++n) {
    acc += t / 2.0 * (u[n] + (n > 0 ? u[n - 1] : 0.0));
    CHECK(yi[n] == doctest::Approx(acc).epsilon(1e-12));
  }
}

TEST_CASE("to_difference_equation demands a normalized denominator") {
  DiscreteTf g;
  g.a = Eigen::VectorXd::Ones(1);
  g.b = Eigen::VectorXd::Constant(1, 2.0);
  g.sample_period = 1.0;
  CHECK_THROWS_AS(to_difference_equation(g), std::invalid_argument);
}

TEST_CASE("impulse response equals the z-domain power series") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> radius(0.1, 0.9), angle(0.1, pi - 0.1),
      coeff(-1.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    Eigen::VectorXd b = Eigen::VectorXd::Ones(1);
    for (int pair = 0; pair < 1 + trial % 2; ++pair) {
      const double r = radius(rng), th = angle(rng);
      Eigen::VectorXd quad(3);
      quad << 1.0, -2.0 * r * std::cos(th), r * r;  // ascending z^-1
      b = polymul(b, quad);
    }
    Eigen::VectorXd a(b.size());
    for (Eigen::Index i = 0; i < a.size(); ++i) a[i] = coeff(rng);
    const DiscreteTf g = make_discrete_tf(a, b, 1.0);

    std::vector<double> impulse(128, 0.0);
    impulse[0] = 1.0;
    const auto h = simulate(to_difference_equation(g), impulse);
    const auto series = oracles::power_series(g.a, g.b, 128);
    for (int n = 0; n < 128; ++n) {
      CHECK(h[static_cast<std::size_t>(n)] ==
            doctest::Approx(series[static_cast<std::size_t>(n)]).epsilon(1e-9).scale(1.0));
    }
  }
}

TEST_CASE("spectral estimate of a simulated recursion matches the rational response") {
  // Random stable 3rd-order system driven by periodic flat-spectrum noise;
  // after the transient dies the single-period DFT ratio estimates H.
  const double fs = 1.0;
  std::mt19937_64 rng(59);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  Eigen::VectorXd b;
  {
    Eigen::VectorXd quad(3), lin(2);
    const double r = 0.7, th = 1.1;
    quad << 1.0, -2.0 * r * std::cos(th), r * r;
    lin << 1.0, -0.5;
    b = polymul(quad, lin);
  }
  Eigen::VectorXd a(4);
  a << 0.7, -0.2, 0.4, 0.1;
  const DiscreteTf g = make_discrete_tf(a, b, fs);

  const int period = 4096;
  std::vector<double> one_period(period);
  {
    std::vector<std::complex<double>> spectrum(period / 2 + 1, {0.0, 0.0});
    for (int k = 1; k < period / 2; ++k) spectrum[k] = std::polar(1.0, 2.0 * pi * dist(rng));
    for (int n = 0; n < period; ++n) {
      double acc = 0.0;
      for (int k = 1; k < period / 2; ++k) {
        acc += 2.0 * std::real(spectrum[static_cast<std::size_t>(k)] *
                               std::polar(1.0, 2.0 * pi * k * n / static_cast<double>(period)));
      }
      one_period[static_cast<std::size_t>(n)] = acc / period;
    }
  }
  std::vector<double> u;
  for (int rep = 0; rep < 4; ++rep) u.insert(u.end(), one_period.begin(), one_period.end());
  const auto y = simulate(to_difference_equation(g), u);

  // DFT over the final period.
  const std::size_t start = u.size() - period;
  for (int k = 4; k < period / 4; k += 97) {
    std::complex<double> yk{0.0, 0.0}, uk{0.0, 0.0};
    for (int n = 0; n < period; ++n) {
      const auto w = std::polar(1.0, -2.0 * pi * k * n / static_cast<double>(period));
      yk += y[start + static_cast<std::size_t>(n)] * w;
      uk += u[start + static_cast<std::size_t>(n)] * w;
    }
    const auto h_est = yk / uk;
    const auto h_true = discrete_freq_response(g, static_cast<double>(k) / period * fs);
    CHECK(std::abs(h_est - h_true) <= 0.01 * std::abs(h_true));
  }
}

TEST_CASE("coefficient quantization: wide formats pass through") {
  const DiscreteTf g = c2d(low_pass(2.0 * pi * 2.0), 1.5625e6);
  const auto cq = quantize_coefficients(g, QFormat{64, 64, true});
  CHECK(!cq.saturated);
  for (Eigen::Index i = 0; i < g.a.size(); ++i) {
    CHECK(cq.tf.a[i] == doctest::Approx(g.a[i]).epsilon(1e-15));
    CHECK(cq.tf.b[i] == doctest::Approx(g.b[i]).epsilon(1e-15));
  }
  CHECK(cq.tf.b[0] == 1.0);
}

TEST_CASE("coefficient quantization shifts the integrator's low-frequency gain") {
  const double fs = 1e8;  // T/2 = 5e-9
  const DiscreteTf g = c2d(tf_integrator(), fs);
  const auto cq = quantize_coefficients(g, QFormat{34, 32, true});
  // a coefficients are tiny against the shared scale set by b0 = 1, so they
  // lose precision and the realized gain departs from the design.
  CHECK(cq.tf.a[0] != g.a[0]);
  const double f = 10.0;
  const double gain_ratio =
      std::abs(discrete_freq_response(cq.tf, f)) / std::abs(discrete_freq_response(g, f));
  CHECK(std::abs(gain_ratio - 1.0) > 1e-4);
}

TEST_CASE("quantized-response error grows monotonically as frac bits shrink") {
  const DiscreteTf g = c2d(low_pass(2.0 * pi * 2.0), 1.5625e6);
  double prev = -1.0;
  for (const int frac : {31, 23, 15}) {
    const auto cq = quantize_coefficients(g, QFormat{frac + 2, frac, true});
    double worst = 0.0;
    for (const double f : {0.5, 2.0, 20.0, 200.0}) {
      const auto h0 = discrete_freq_response(g, f);
      const auto h1 = discrete_freq_response(cq.tf, f);
      worst = std::max(worst, std::abs(h1 - h0) / std::abs(h0));
    }
    CHECK(worst > prev);
    prev = worst;
  }
}

TEST_CASE("discrete frequency response basics") {
  const DiscreteTf ident = make_discrete_tf(Eigen::VectorXd::Ones(1), Eigen::VectorXd::Ones(1),
                                            1e4);
  CHECK(discrete_freq_response(ident, 1234.0) == std::complex<double>{1.0, 0.0});

  const DiscreteTf integ = c2d(tf_integrator(), 1e4);
  double prev = 0.0;
  for (const double f : {100.0, 10.0, 1.0, 0.1}) {
    const double mag = std::abs(discrete_freq_response(integ, f));
    CHECK(mag > prev);
    prev = mag;
  }
  CHECK_THROWS_AS(discrete_freq_response(integ, 0.0), std::domain_error);
  CHECK_THROWS_AS(discrete_freq_response(integ, 5001.0), std::invalid_argument);
}

TEST_CASE("steady-state sinusoid amplitude matches the rational response") {
  const double fs = 1e4;
  const DiscreteTf g = c2d(low_pass(2.0 * pi * 800.0), fs);
  const double f = fs / 10.0;
  const int n = 4000;
  std::vector<double> u(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) u[static_cast<std::size_t>(i)] = std::sin(2.0 * pi * f * i / fs);
  const auto y = simulate(to_difference_equation(g), u);
  const auto fit = oracles::fit_sinusoid(std::span<const double>(y).subspan(2000),
                                         2.0 * pi * f / fs);
  const double expected = std::abs(discrete_freq_response(g, f));
  CHECK(fit.amplitude == doctest::Approx(expected).epsilon(1e-3));
}
