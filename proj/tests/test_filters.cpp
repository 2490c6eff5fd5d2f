#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "oracles.hpp"
#include "pldkit/filters.hpp"

using namespace pldkit;
using std::numbers::pi;

TEST_CASE("least-squares all-pass collapses to a unit impulse") {
  for (const int n_taps : {11, 41, 63}) {
    const Eigen::VectorXd h = fir_design_least_squares({0.0, 1.0}, {1.0, 1.0}, n_taps);
    const int mid = (n_taps - 1) / 2;
    CHECK(h[mid] == doctest::Approx(1.0).epsilon(1e-9));
    for (int w = 0; w < 50; ++w) {
      const double omega = pi * w / 49.0;
      CHECK(std::abs(oracles::fir_response(h, omega)) ==
            doctest::Approx(1.0).epsilon(1e-6));
    }
  }
}

TEST_CASE("designed taps are symmetric") {
  for (const int n_taps : {12, 63, 64}) {
    const Eigen::VectorXd h =
        fir_design_least_squares({0.0, 0.2, 0.3, 1.0}, {1.0, 1.0, 0.0, 0.0}, n_taps);
    const double scale = h.cwiseAbs().maxCoeff();
    for (int i = 0; i < n_taps / 2; ++i) {
      CHECK(std::abs(h[i] - h[n_taps - 1 - i]) <= 1e-12 * scale);
    }
  }
}

TEST_CASE("low-pass design agrees with a dense-grid normal-equations oracle") {
  const std::vector<double> edges{0.0, 0.2, 0.3, 1.0};
  const std::vector<double> gains{1.0, 1.0, 0.0, 0.0};
  const Eigen::VectorXd h = fir_design_least_squares(edges, gains, 63);
  const Eigen::VectorXd h_ref = oracles::fir_ls_grid(edges, gains, 63, 1024);

  auto stopband_db = [](const Eigen::VectorXd& taps) {
    double worst = 0.0;
    for (int i = 0; i < 400; ++i) {
      const double w = pi * (0.3 + 0.7 * i / 399.0);
      worst = std::max(worst, std::abs(oracles::fir_response(taps, w)));
    }
    return 20.0 * std::log10(worst);
  };
  CHECK(std::abs(stopband_db(h) - stopband_db(h_ref)) < 0.5);
}

TEST_CASE("design rejects malformed band specs") {
  CHECK_THROWS_AS(fir_design_least_squares({0.0, 0.3, 0.2, 1.0}, {1, 1, 0, 0}, 31),
                  std::invalid_argument);
  CHECK_THROWS_AS(fir_design_least_squares({0.0, 0.5, 0.5, 1.0}, {1, 1, 0, 0}, 31),
                  std::invalid_argument);
  CHECK_THROWS_AS(fir_design_least_squares({0.0, 1.0}, {1, 1}, 1), std::invalid_argument);
  CHECK_THROWS_AS(fir_design_least_squares({0.0, 1.0}, {1.0}, 31), std::invalid_argument);
}

TEST_CASE("fir step: passthrough and moving average") {
  FirFilter ident(Eigen::VectorXd::Ones(1));
  for (const double u : {0.3, -0.7, 1.0}) CHECK(ident.step(u) == u);

  Eigen::VectorXd avg(2);
  avg << 0.5, 0.5;
  FirFilter ma(avg);
  CHECK(ma.step(1.0) == 0.5);
  CHECK(ma.step(1.0) == 1.0);
  CHECK(ma.step(1.0) == 1.0);
}

TEST_CASE("fir step equals direct convolution exactly in infinite precision") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Eigen::VectorXd taps(16);
  for (Eigen::Index i = 0; i < taps.size(); ++i) taps[i] = dist(rng);
  std::vector<double> input(256);
  for (auto& u : input) u = dist(rng);

  FirFilter f(taps);
  const auto expected =
      oracles::convolve_direct(std::span<const double>(taps.data(), 16), input);
  for (std::size_t n = 0; n < input.size(); ++n) {
    CHECK(f.step(input[n]) == expected[n]);
  }
}

TEST_CASE("fir linearity in infinite precision") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Eigen::VectorXd taps(9);
  for (Eigen::Index i = 0; i < taps.size(); ++i) taps[i] = dist(rng);
  const double alpha = 0.7, beta = -1.3;
  FirFilter fa(taps), fb(taps), fc(taps);
  for (int n = 0; n < 200; ++n) {
    const double u1 = dist(rng), u2 = dist(rng);
    const double lhs = fc.step(alpha * u1 + beta * u2);
    const double rhs = alpha * fa.step(u1) + beta * fb.step(u2);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
}

TEST_CASE("group delay: formula and measured phase slope") {
  // 65 symmetric taps clocked so f_F = 1 MHz: delay = 32 us.
  const Eigen::VectorXd h65 =
      fir_design_least_squares({0.0, 0.3, 0.45, 1.0}, {1.0, 1.0, 0.0, 0.0}, 65);
  FirFilter f(h65, 12);
  CHECK(f.group_delay_s(12e6) == doctest::Approx(32e-6).epsilon(1e-12));

  FirFilter single(Eigen::VectorXd::Ones(1), 12);
  CHECK(single.group_delay_s(12e6) == 0.0);

  Eigen::VectorXd bad(3);
  bad << 1.0, 0.0, 2.0;
  CHECK_THROWS_AS(FirFilter(bad).group_delay_s(1e6), std::invalid_argument);

  // Phase slope across the passband, unwrapped.
  std::vector<double> ws, phases;
  for (int i = 1; i <= 40; ++i) {
    const double w = 0.3 * pi * i / 40.0;
    ws.push_back(w);
    phases.push_back(std::arg(oracles::fir_response(h65, w)));
  }
  oracles::unwrap(phases);
  const double slope = oracles::fit_slope(ws, phases);  // -samples of delay
  CHECK(std::abs(-slope - 32.0) <= 0.01 * 32.0);
}

TEST_CASE("fixed-point fir: quantized inner product with output trimming") {
  Eigen::VectorXd taps(4);
  taps << 0.25, 0.5, -0.125, 0.0625;
  FirFilter f(taps, 12);
  f.configure_fixed(QFormat{18, 17, true}, QFormat{12, 11, true});

  FirFilter ref(taps, 12);
  const QFormat in_fmt{12, 11, true};
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> dist(-0.5, 0.5);
  for (int n = 0; n < 500; ++n) {
    const FixedSample u = quantize(dist(rng), in_fmt);
    const FixedSample y = f.step(u);
    const double ideal = ref.step(u.value());
    // Tap quantization (2^-17) plus output truncation (2^-11) bound the error.
    CHECK(std::abs(y.value() - ideal) <= std::ldexp(1.0, -11) + 4.0 * std::ldexp(1.0, -17));
    CHECK(!y.saturated);
  }
}

TEST_CASE("fixed-point fir flags saturation instead of wrapping") {
  Eigen::VectorXd taps(2);
  taps << 1.0, 1.0;  // gain 2 at DC
  FirFilter f(taps, 12);
  f.configure_fixed(QFormat{18, 16, true}, QFormat{12, 11, true});
  const QFormat in_fmt{12, 11, true};
  FixedSample y;
  for (int i = 0; i < 4; ++i) y = f.step(quantize(0.9, in_fmt));
  CHECK(y.saturated);
  CHECK(y.value() == doctest::Approx(in_fmt.max_value()).epsilon(1e-3));
  CHECK(f.saturated());
}

TEST_CASE("fir rate bookkeeping") {
  FirFilter f(Eigen::VectorXd::Ones(5), 12);
  CHECK(f.effective_rate(100e6) == doctest::Approx(100e6 / 12.0));
  CHECK(f.latency_cycles() == 12);
}

TEST_CASE("iir effective rate: 100 MHz clock with 32-bit words gives 1.5625 MHz") {
  const DiscreteTf g =
      make_discrete_tf(Eigen::VectorXd::Ones(1), Eigen::VectorXd::Ones(1), 1e6);
  const IirFilter f = iir_build(g, 32);
  CHECK(f.effective_rate(100e6) == 1.5625e6);
  CHECK(f.latency_cycles() == 64);
}

TEST_CASE("iir_build refuses designs with poles outside the unit circle") {
  DiscreteTf g;
  g.a = Eigen::VectorXd::Ones(2);
  g.b = Eigen::VectorXd(2);
  g.b << 1.0, -1.01;  // pole at z = 1.01
  g.sample_period = 1.0;
  CHECK_THROWS_AS(iir_build(g, 32), std::invalid_argument);

  DiscreteTf not_normalized;
  not_normalized.a = Eigen::VectorXd::Ones(2);
  not_normalized.b = Eigen::VectorXd::Constant(2, 2.0);
  not_normalized.sample_period = 1.0;
  CHECK_THROWS_AS(iir_build(not_normalized, 32), std::invalid_argument);
}

TEST_CASE("iir with no feedback degenerates to a FIR") {
  Eigen::VectorXd a(3), b(1);
  a << 0.5, 0.25, -0.125;
  b << 1.0;
  const DiscreteTf g = make_discrete_tf(a, b, 1e6);
  IirFilter f = iir_build(g, 32);

  std::mt19937_64 rng(33);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<double> input(128);
  for (auto& u : input) u = dist(rng);
  const auto expected =
      oracles::convolve_direct(std::span<const double>(g.a.data(), 3), input);
  for (std::size_t n = 0; n < input.size(); ++n) {
    CHECK(f.step(input[n]) == doctest::Approx(expected[n]).epsilon(1e-12));
  }
}

TEST_CASE("iir passthrough and trapezoid integration") {
  const DiscreteTf ident =
      make_discrete_tf(Eigen::VectorXd::Ones(1), Eigen::VectorXd::Ones(1), 1e6);
  IirFilter f = iir_build(ident, 32);
  for (const double u : {0.5, -0.25, 0.9}) CHECK(f.step(u) == u);

  const double fs = 1e3;
  const DiscreteTf integ = c2d(tf_integrator(), fs);
  IirFilter fi = iir_build(integ, 32);
  const double c = 0.4;
  double prev = fi.step(c);  // first step ramps by c*T/2
  for (int n = 1; n < 50; ++n) {
    const double y = fi.step(c);
    CHECK(y - prev == doctest::Approx(c / fs).epsilon(1e-9));
    prev = y;
  }
}

TEST_CASE("infinite-precision iir matches the difference-equation recursion exactly") {
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Eigen::VectorXd b(3), a(3);
  const double r = 0.8, th = 0.9;
  b << 1.0, -2.0 * r * std::cos(th), r * r;
  a << dist(rng), dist(rng), dist(rng);
  const DiscreteTf g = make_discrete_tf(a, b, 1e6);
  IirFilter f = iir_build(g, 32);
  const DifferenceEquation eq = to_difference_equation(g);

  std::vector<double> input(10000);
  for (auto& u : input) u = dist(rng);
  const auto expected = simulate(eq, input);
  for (std::size_t n = 0; n < input.size(); ++n) {
    CHECK(f.step(input[n]) == expected[n]);  // bit-identical recursion
  }
}

TEST_CASE("infinite-precision iir impulse response equals the power series") {
  Eigen::VectorXd b(3), a(3);
  b << 1.0, -1.2, 0.52;
  a << 0.3, 0.1, -0.2;
  const DiscreteTf g = make_discrete_tf(a, b, 1.0);
  IirFilter f = iir_build(g, 32);
  const auto series = oracles::power_series(g.a, g.b, 128);
  for (int n = 0; n < 128; ++n) {
    const double h = f.step(n == 0 ? 1.0 : 0.0);
    CHECK(h == doctest::Approx(series[static_cast<std::size_t>(n)]).epsilon(1e-9).scale(1.0));
  }
}

TEST_CASE("fixed-point iir tracks the ideal recursion for a well-scaled design") {
  const double fs = 1.5625e6;
  const DiscreteTf g = c2d(low_pass(2.0 * pi * 100e3), fs);
  IirFixedConfig cfg;
  cfg.coeff_bits = 32;
  cfg.io_format = QFormat{12, 11, true};
  IirFilter fixed = iir_build(g, 32, cfg);
  IirFilter ideal = iir_build(g, 32, cfg);

  const QFormat in_fmt{12, 11, true};
  std::mt19937_64 rng(55);
  std::uniform_real_distribution<double> dist(-0.4, 0.4);
  for (int n = 0; n < 5000; ++n) {
    const FixedSample u = quantize(dist(rng), in_fmt);
    const FixedSample y = fixed.step(u);
    const double y_ref = ideal.step(u.value());
    CHECK(std::abs(y.value() - y_ref) <= 4.0 * std::ldexp(1.0, -11));
  }
  CHECK(!fixed.saturated());
}

TEST_CASE("unbuilt iir refuses to run") {
  IirFilter f;
  CHECK_THROWS_AS(f.step(1.0), std::logic_error);
}
