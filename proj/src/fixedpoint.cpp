#include "pldkit/fixedpoint.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace pldkit {

void QFormat::validate() const {
  if (total_bits < 1 || total_bits > 64) {
    throw std::invalid_argument("QFormat: total_bits must be in [1, 64]");
  }
  if (!is_signed && total_bits > 63) {
    throw std::invalid_argument("QFormat: unsigned formats are limited to 63 bits");
  }
  if (frac_bits < 0 || frac_bits > total_bits) {
    throw std::invalid_argument("QFormat: frac_bits must be in [0, total_bits]");
  }
}

std::int64_t QFormat::raw_min() const {
  if (!is_signed) return 0;
  if (total_bits == 64) return std::numeric_limits<std::int64_t>::min();
  return -(std::int64_t{1} << (total_bits - 1));
}

std::int64_t QFormat::raw_max() const {
  if (is_signed) {
    if (total_bits == 64) return std::numeric_limits<std::int64_t>::max();
    return (std::int64_t{1} << (total_bits - 1)) - 1;
  }
  return static_cast<std::int64_t>((std::uint64_t{1} << total_bits) - 1);
}

double QFormat::lsb() const { return std::ldexp(1.0, -frac_bits); }
double QFormat::min_value() const { return static_cast<double>(raw_min()) * lsb(); }
double QFormat::max_value() const { return static_cast<double>(raw_max()) * lsb(); }

std::string QFormat::str() const {
  std::string s = "Q" + std::to_string(total_bits) + "." + std::to_string(frac_bits);
  if (!is_signed) s += "u";
  return s;
}

QFormat QFormat::parse(std::string_view text) {
  if (text.empty() || (text[0] != 'Q' && text[0] != 'q')) {
    throw std::invalid_argument("QFormat: expected \"Q<total>.<frac>[u]\", got \"" +
                                std::string(text) + "\"");
  }
  QFormat fmt;
  fmt.is_signed = true;
  std::string_view body = text.substr(1);
  if (!body.empty() && (body.back() == 'u' || body.back() == 'U')) {
    fmt.is_signed = false;
    body.remove_suffix(1);
  }
  const auto dot = body.find('.');
  if (dot == std::string_view::npos) {
    throw std::invalid_argument("QFormat: missing '.' in \"" + std::string(text) + "\"");
  }
  try {
    fmt.total_bits = std::stoi(std::string(body.substr(0, dot)));
    fmt.frac_bits = std::stoi(std::string(body.substr(dot + 1)));
  } catch (const std::exception&) {
    throw std::invalid_argument("QFormat: malformed \"" + std::string(text) + "\"");
  }
  fmt.validate();
  return fmt;
}

double FixedSample::value() const {
  return static_cast<double>(raw) * format.lsb();
}

FixedSample quantize(double x, const QFormat& fmt) {
  fmt.validate();
  if (std::isnan(x)) throw std::invalid_argument("quantize: NaN input");

  FixedSample out;
  out.format = fmt;

  const double scaled = std::round(std::ldexp(x, fmt.frac_bits));
  // Compare in double first: near +/-2^63 the raw bounds are not exactly
  // representable and a direct cast would overflow. raw_max + 1 is a power
  // of two and therefore exact for every width.
  if (scaled >= static_cast<double>(fmt.raw_max()) + 1.0 || std::isinf(x)) {
    if (x > 0.0) {
      out.raw = fmt.raw_max();
    } else {
      out.raw = fmt.raw_min();
    }
    out.saturated = true;
    return out;
  }
  if (scaled < static_cast<double>(fmt.raw_min())) {
    out.raw = fmt.raw_min();
    out.saturated = true;
    return out;
  }
  std::int64_t raw = static_cast<std::int64_t>(scaled);
  if (raw > fmt.raw_max()) {
    raw = fmt.raw_max();
    out.saturated = true;
  } else if (raw < fmt.raw_min()) {
    raw = fmt.raw_min();
    out.saturated = true;
  }
  out.raw = raw;
  return out;
}

FixedSample trim(const FixedSample& s, int k) {
  s.format.validate();
  if (k < 0 || k >= s.format.total_bits) {
    throw std::invalid_argument("trim: k must be in [0, total_bits)");
  }
  if (k > s.format.frac_bits) {
    throw std::invalid_argument("trim: k exceeds frac_bits; result format would be invalid");
  }
  FixedSample out;
  out.format = QFormat{s.format.total_bits - k, s.format.frac_bits - k, s.format.is_signed};
  out.raw = s.raw >> k;  // arithmetic shift: truncation toward -inf
  out.saturated = s.saturated;
  return out;
}

double dynamic_range_db(int bits) {
  if (bits < 1) throw std::invalid_argument("dynamic_range_db: bits must be >= 1");
  return 20.0 * static_cast<double>(bits) * std::log10(2.0);
}

int shared_scale_exp(std::span<const double> values, const QFormat& fmt) {
  fmt.validate();
  double max_abs = 0.0;
  for (const double v : values) {
    if (!std::isfinite(v)) throw std::invalid_argument("shared_scale_exp: non-finite value");
    max_abs = std::max(max_abs, std::abs(v));
  }
  if (max_abs == 0.0) return 0;

  auto fits = [&](int m) {
    for (const double v : values) {
      if (quantize(std::ldexp(v, -m), fmt).saturated) return false;
    }
    return true;
  };
  // Start safely below the analytic estimate, then walk up to the smallest
  // scale that avoids saturation (the estimate can be off by an ulp at the
  // format edge, where max_value() itself rounds).
  int m = static_cast<int>(std::ceil(std::log2(max_abs / fmt.max_value()))) - 2;
  for (int iter = 0; iter < 200 && !fits(m); ++iter) ++m;
  return m;
}

FixedSample make_fixed(std::int64_t raw, const QFormat& fmt) {
  fmt.validate();
  FixedSample out;
  out.format = fmt;
  out.raw = raw;
  if (raw > fmt.raw_max()) {
    out.raw = fmt.raw_max();
    out.saturated = true;
  } else if (raw < fmt.raw_min()) {
    out.raw = fmt.raw_min();
    out.saturated = true;
  }
  return out;
}

}  // namespace pldkit
