#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace pldkit {

// Two's-complement fixed-point format. "Q12.11" means 12 total bits of
// which 11 sit below the binary point; a trailing 'u' marks unsigned.
struct QFormat {
  int total_bits = 12;
  int frac_bits = 11;
  bool is_signed = true;

  // Throws std::invalid_argument when outside 1..64 total bits (63 for
  // unsigned, which must fit in the int64 raw carrier) or frac_bits is
  // not in [0, total_bits].
  void validate() const;

  std::int64_t raw_min() const;
  std::int64_t raw_max() const;
  double lsb() const;        // 2^-frac_bits
  double min_value() const;  // raw_min * lsb
  double max_value() const;  // raw_max * lsb

  std::string str() const;
  static QFormat parse(std::string_view text);

  bool operator==(const QFormat&) const = default;
};

// A quantized sample: integer payload plus its format. `saturated` records
// that the value was clipped to the representable range at some point.
struct FixedSample {
  std::int64_t raw = 0;
  QFormat format{};
  bool saturated = false;

  double value() const;
};

/// Nearest representable value (round half away from zero), clipping to the
/// format's range. Clipping is flagged, not an error: it models the
/// converter railing on over-range inputs.
FixedSample quantize(double x, const QFormat& fmt);

/// Drops k least-significant bits by arithmetic right shift (truncation
/// toward negative infinity). The result has total_bits-k total and
/// frac_bits-k fractional bits. k outside [0, min(total_bits-1, frac_bits)]
/// throws std::invalid_argument.
FixedSample trim(const FixedSample& s, int k);

/// 20*log10(2^bits): attenuation range of a path that is `bits` wide.
double dynamic_range_db(int bits);

/// Wraps a raw integer in `fmt`, clipping to range (clip sets `saturated`).
FixedSample make_fixed(std::int64_t raw, const QFormat& fmt);

/// Smallest power-of-two exponent m such that every value/2^m quantizes into
/// `fmt` without saturating. Used to store coefficient sets behind one
/// shared scale.
int shared_scale_exp(std::span<const double> values, const QFormat& fmt);

}  // namespace pldkit
