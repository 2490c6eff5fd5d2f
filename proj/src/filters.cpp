#include "pldkit/filters.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace pldkit {

namespace {

using int128 = __int128;

int128 shift_arith(int128 v, int k) {
  if (k >= 0) return v >> k;
  return v << (-k);
}

int128 saturate_to_bits(int128 v, int bits, bool& flag) {
  const int128 hi = (int128{1} << (bits - 1)) - 1;
  const int128 lo = -(int128{1} << (bits - 1));
  if (v > hi) {
    flag = true;
    return hi;
  }
  if (v < lo) {
    flag = true;
    return lo;
  }
  return v;
}

int guard_bits(Eigen::Index n_taps) {
  int g = 0;
  while ((Eigen::Index{1} << g) < std::max<Eigen::Index>(n_taps, 1)) ++g;
  return g;
}

// integral of cos(kappa*w) over [w1, w2]
double int_cos(double kappa, double w1, double w2) {
  if (kappa == 0.0) return w2 - w1;
  return (std::sin(kappa * w2) - std::sin(kappa * w1)) / kappa;
}

// integral of w*cos(kappa*w) over [w1, w2]
double int_wcos(double kappa, double w1, double w2) {
  if (kappa == 0.0) return 0.5 * (w2 * w2 - w1 * w1);
  const double k2 = kappa * kappa;
  const double upper = w2 * std::sin(kappa * w2) / kappa + std::cos(kappa * w2) / k2;
  const double lower = w1 * std::sin(kappa * w1) / kappa + std::cos(kappa * w1) / k2;
  return upper - lower;
}

}  // namespace

Eigen::VectorXd fir_design_least_squares(const std::vector<double>& band_edges,
                                         const std::vector<double>& gains, int n_taps) {
  if (n_taps < 2) throw std::invalid_argument("fir_design: n_taps must be >= 2");
  if (band_edges.size() < 2 || band_edges.size() % 2 != 0) {
    throw std::invalid_argument("fir_design: band_edges must come in pairs");
  }
  if (gains.size() != band_edges.size()) {
    throw std::invalid_argument("fir_design: gains must match band_edges in length");
  }
  if (band_edges.front() < 0.0 || band_edges.back() > 1.0) {
    throw std::invalid_argument("fir_design: band edges must lie in [0, 1]");
  }
  for (std::size_t i = 1; i < band_edges.size(); ++i) {
    if (band_edges[i] <= band_edges[i - 1]) {
      throw std::invalid_argument("fir_design: band edges must be strictly increasing "
                                  "(overlapping bands are infeasible)");
    }
  }

  const bool odd = (n_taps % 2) != 0;
  const int m = odd ? (n_taps - 1) / 2 : n_taps / 2;
  const int n_basis = odd ? m + 1 : m;

  // basis_k(w) = beta_k * cos(kappa_k * w)
  auto kappa = [&](int k) { return odd ? static_cast<double>(k) : k + 0.5; };
  auto beta = [&](int k) { return (odd && k == 0) ? 1.0 : 2.0; };

  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(n_basis, n_basis);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n_basis);

  for (std::size_t band = 0; band + 1 < band_edges.size(); band += 2) {
    const double w1 = band_edges[band] * std::numbers::pi;
    const double w2 = band_edges[band + 1] * std::numbers::pi;
    const double g1 = gains[band];
    const double g2 = gains[band + 1];
    // desired amplitude D(w) = p + q*w, linear across the band
    const double q = (g2 - g1) / (w2 - w1);
    const double p = g1 - q * w1;

    for (int k = 0; k < n_basis; ++k) {
      rhs[k] += beta(k) * (p * int_cos(kappa(k), w1, w2) + q * int_wcos(kappa(k), w1, w2));
      for (int j = k; j < n_basis; ++j) {
        const double v = beta(k) * beta(j) * 0.5 *
                         (int_cos(kappa(k) - kappa(j), w1, w2) +
                          int_cos(kappa(k) + kappa(j), w1, w2));
        gram(k, j) += v;
        if (j != k) gram(j, k) += v;
      }
    }
  }

  const Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
  if (ldlt.info() != Eigen::Success) {
    throw std::runtime_error("fir_design: normal equations are singular");
  }
  const Eigen::VectorXd g = ldlt.solve(rhs);

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

FirFilter::FirFilter(Eigen::VectorXd taps, int input_bits)
    : taps_(std::move(taps)), input_bits_(input_bits) {
  if (taps_.size() < 1) throw std::invalid_argument("FirFilter: at least one tap required");
  if (input_bits_ < 1 || input_bits_ > 63) {
    throw std::invalid_argument("FirFilter: input_bits must be in [1, 63]");
  }
  hist_.assign(static_cast<std::size_t>(taps_.size()), 0.0);
  hist_raw_.assign(static_cast<std::size_t>(taps_.size()), 0);
}

bool FirFilter::has_symmetric_taps(double rel_tol) const {
  const double scale = taps_.cwiseAbs().maxCoeff();
  const Eigen::Index n = taps_.size();
  for (Eigen::Index i = 0; i < n / 2; ++i) {
    if (std::abs(taps_[i] - taps_[n - 1 - i]) > rel_tol * scale) return false;
  }
  return true;
}

double FirFilter::group_delay_s(double clock_hz) const {
  if (!(clock_hz > 0.0)) throw std::invalid_argument("group_delay: clock must be > 0");
  if (!has_symmetric_taps()) {
    throw std::invalid_argument("group_delay: taps are not symmetric (not linear phase)");
  }
  const double tau_f = input_bits_ / clock_hz;
  return 0.5 * static_cast<double>(taps_.size() - 1) * tau_f;
}

double FirFilter::step(double u) {
  for (std::size_t i = hist_.size() - 1; i > 0; --i) hist_[i] = hist_[i - 1];
  hist_[0] = u;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < taps_.size(); ++i) acc += taps_[i] * hist_[i];
  return acc;
}

void FirFilter::configure_fixed(const QFormat& tap_format, const QFormat& out_format) {
  tap_format.validate();
  out_format.validate();
  tap_format_ = tap_format;
  out_format_ = out_format;
  tap_scale_exp_ = shared_scale_exp(std::span<const double>(taps_.data(),
                                     static_cast<std::size_t>(taps_.size())), tap_format);
  const double scale = std::ldexp(1.0, tap_scale_exp_);
  tap_raw_.resize(static_cast<std::size_t>(taps_.size()));
  for (Eigen::Index i = 0; i < taps_.size(); ++i) {
    const FixedSample q = quantize(taps_[i] / scale, tap_format);
    saturated_ |= q.saturated;
    tap_raw_[static_cast<std::size_t>(i)] = q.raw;
  }
  fixed_ = true;
}

FixedSample FirFilter::step(const FixedSample& u) {
  if (!fixed_) {
    throw std::logic_error("FirFilter: configure_fixed() before stepping FixedSamples");
  }
  if (!in_format_) {
    in_format_ = u.format;
  } else if (u.format != *in_format_) {
    throw std::invalid_argument("FirFilter: input format changed mid-stream");
  }

  for (std::size_t i = hist_raw_.size() - 1; i > 0; --i) hist_raw_[i] = hist_raw_[i - 1];
  hist_raw_[0] = u.raw;

  const int acc_bits = tap_format_.total_bits + in_format_->total_bits +
                       guard_bits(taps_.size());
  bool flag = u.saturated;
  int128 acc = 0;
  for (std::size_t i = 0; i < tap_raw_.size(); ++i) {
    acc += static_cast<int128>(tap_raw_[i]) * static_cast<int128>(hist_raw_[i]);
  }
  acc = saturate_to_bits(acc, acc_bits, flag);

  // Value of acc is acc * 2^(scale - tap_frac - in_frac); align it onto the
  // output format's binary point.
  const int acc_frac = tap_format_.frac_bits + in_format_->frac_bits - tap_scale_exp_;
  const int shift = acc_frac - out_format_.frac_bits;
  int128 aligned = shift_arith(acc, shift);
  aligned = saturate_to_bits(aligned, out_format_.total_bits, flag);

  saturated_ |= flag;
  FixedSample out;
  out.raw = static_cast<std::int64_t>(aligned);
  out.format = out_format_;
  out.saturated = flag;
  return out;
}

Eigen::VectorXd FirFilter::effective_taps() const {
  if (!fixed_) return taps_;
  Eigen::VectorXd out(taps_.size());
  for (Eigen::Index i = 0; i < taps_.size(); ++i) {
    out[i] = static_cast<double>(tap_raw_[static_cast<std::size_t>(i)]) *
             std::ldexp(1.0, tap_scale_exp_ - tap_format_.frac_bits);
  }
  return out;
}

void FirFilter::reset() {
  std::fill(hist_.begin(), hist_.end(), 0.0);
  std::fill(hist_raw_.begin(), hist_raw_.end(), 0);
  saturated_ = false;
  in_format_.reset();
}

IirFilter iir_build(const DiscreteTf& g, int internal_bits, const IirFixedConfig& cfg) {
  if (internal_bits < 2 || internal_bits > 63) {
    throw std::invalid_argument("iir_build: internal_bits must be in [2, 63]");
  }
  if (g.b.size() == 0 || g.b[0] != 1.0) {
    throw std::invalid_argument("iir_build: b[0] must be exactly 1 (normalize first)");
  }
  for (const auto& p : discrete_poles(g)) {
    if (std::abs(p) > 1.0 + 1e-9) {
      throw std::invalid_argument(
          "iir_build: design has a pole outside the unit circle; the feedback structure "
          "would be unstable to noise and rounding errors");
    }
  }
  cfg.io_format.validate();
  const QFormat coeff_fmt{cfg.coeff_bits, cfg.coeff_bits - 1, true};
  coeff_fmt.validate();

  IirFilter f;
  f.design_ = g;
  f.internal_bits_ = internal_bits;
  f.coeff_format_ = coeff_fmt;
  f.io_format_ = cfg.io_format;

  const CoefficientQuantization cq = quantize_coefficients(g, coeff_fmt);
  f.quantized_ = cq.tf;
  f.coeff_saturated_ = cq.saturated;
  f.coeff_scale_exp_ = cq.scale_exp;

  const double scale = std::ldexp(1.0, cq.scale_exp);
  const Eigen::Index order = g.order();
  f.ff_raw_.resize(static_cast<std::size_t>(order + 1));
  for (Eigen::Index i = 0; i <= order; ++i) {
    f.ff_raw_[static_cast<std::size_t>(i)] = quantize(g.a[i] / scale, coeff_fmt).raw;
  }
  f.fb_raw_.resize(static_cast<std::size_t>(order));
  for (Eigen::Index i = 1; i <= order; ++i) {
    f.fb_raw_[static_cast<std::size_t>(i - 1)] = quantize(g.b[i] / scale, coeff_fmt).raw;
  }

  // Internal accumulator format keeps the I/O integer bits and grows the
  // fraction to fill internal_bits.
  const int io_int_bits = cfg.io_format.total_bits - cfg.io_format.frac_bits;
  const int internal_frac = internal_bits - io_int_bits;
  if (internal_frac < 0) {
    throw std::invalid_argument("iir_build: internal_bits too small for the I/O format");
  }
  f.internal_format_ = QFormat{internal_bits, internal_frac, true};

  const int coeff_frac = coeff_fmt.frac_bits;
  f.trim_ff_ = cfg.trims.ff.value_or(coeff_frac + cfg.io_format.frac_bits - cq.scale_exp -
                                     internal_frac);
  f.trim_fb_ = cfg.trims.fb.value_or(coeff_frac - cq.scale_exp);
  f.trim_out_ = cfg.trims.out.value_or(internal_frac - cfg.io_format.frac_bits);

  f.u_hist_raw_.assign(static_cast<std::size_t>(order + 1), 0);
  f.y_hist_raw_.assign(static_cast<std::size_t>(order), 0);
  f.u_hist_.assign(static_cast<std::size_t>(order + 1), 0.0);
  f.y_hist_.assign(static_cast<std::size_t>(order), 0.0);
  f.built_ = true;
  return f;
}

double IirFilter::step(double u) {
  if (!built_) throw std::logic_error("IirFilter: not built; use iir_build()");
  for (std::size_t i = u_hist_.size() - 1; i > 0; --i) u_hist_[i] = u_hist_[i - 1];
  u_hist_[0] = u;
  double acc_ff = 0.0;
  for (Eigen::Index i = 0; i < design_.a.size(); ++i) acc_ff += design_.a[i] * u_hist_[i];
  double acc_fb = 0.0;
  for (std::size_t i = 0; i < y_hist_.size(); ++i) acc_fb += design_.b[i + 1] * y_hist_[i];
  const double y = acc_ff - acc_fb;
  if (!y_hist_.empty()) {
    for (std::size_t i = y_hist_.size() - 1; i > 0; --i) y_hist_[i] = y_hist_[i - 1];
    y_hist_[0] = y;
  }
  return y;
}

FixedSample IirFilter::step(const FixedSample& u) {
  if (!built_) throw std::logic_error("IirFilter: not built; use iir_build()");
  if (u.format != io_format_) {
    throw std::invalid_argument("IirFilter: input must use the configured io_format");
  }
  bool flag = false;

  for (std::size_t i = u_hist_raw_.size() - 1; i > 0; --i) u_hist_raw_[i] = u_hist_raw_[i - 1];
  u_hist_raw_[0] = u.raw;

  const int ff_acc_bits = coeff_format_.total_bits + io_format_.total_bits +
                          guard_bits(static_cast<Eigen::Index>(ff_raw_.size()));
  int128 acc_ff = 0;
  for (std::size_t i = 0; i < ff_raw_.size(); ++i) {
    acc_ff += static_cast<int128>(ff_raw_[i]) * static_cast<int128>(u_hist_raw_[i]);
  }
  acc_ff = saturate_to_bits(acc_ff, ff_acc_bits, flag);
  const int128 v_ff = shift_arith(acc_ff, trim_ff_);

  const int fb_acc_bits = coeff_format_.total_bits + internal_bits_ +
                          guard_bits(static_cast<Eigen::Index>(fb_raw_.size()) + 1);
  int128 acc_fb = 0;
  for (std::size_t i = 0; i < fb_raw_.size(); ++i) {
    acc_fb += static_cast<int128>(fb_raw_[i]) * static_cast<int128>(y_hist_raw_[i]);
  }
  acc_fb = saturate_to_bits(acc_fb, fb_acc_bits, flag);
  const int128 v_fb = shift_arith(acc_fb, trim_fb_);

  const int128 y = saturate_to_bits(v_ff - v_fb, internal_bits_, flag);
  if (!y_hist_raw_.empty()) {
    for (std::size_t i = y_hist_raw_.size() - 1; i > 0; --i) y_hist_raw_[i] = y_hist_raw_[i - 1];
    y_hist_raw_[0] = static_cast<std::int64_t>(y);
  }

  int128 out_raw = shift_arith(y, trim_out_);
  out_raw = saturate_to_bits(out_raw, io_format_.total_bits, flag);

  saturated_ |= flag;
  FixedSample out;
  out.raw = static_cast<std::int64_t>(out_raw);
  out.format = io_format_;
  out.saturated = flag;
  return out;
}

void IirFilter::reset() {
  std::fill(u_hist_raw_.begin(), u_hist_raw_.end(), 0);
  std::fill(y_hist_raw_.begin(), y_hist_raw_.end(), 0);
  std::fill(u_hist_.begin(), u_hist_.end(), 0.0);
  std::fill(y_hist_.begin(), y_hist_.end(), 0.0);
  saturated_ = false;
}

}  // namespace pldkit
