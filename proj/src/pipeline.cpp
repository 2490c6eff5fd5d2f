#include "pldkit/pipeline.hpp"

#include <cmath>
#include <stdexcept>

namespace pldkit {

long long Board::total_cycles() const {
  long long total = 0;
  for (const auto& s : stages) {
    if (s.cycles < 0) throw std::invalid_argument("Stage: cycles must be >= 0");
    total += s.cycles;
  }
  return total;
}

double latency(const Board& b) {
  if (!(b.clock_hz > 0.0)) throw std::invalid_argument("latency: clock_hz must be > 0");
  return static_cast<double>(b.total_cycles()) / b.clock_hz + b.extra_delay_s;
}

double control_bandwidth(const Board& b) {
  const double lat = latency(b);
  if (!(lat > 0.0)) throw std::invalid_argument("control_bandwidth: latency must be > 0");
  return 1.0 / lat;
}

std::vector<double> simulate_through(const Board& b, std::span<const double> input) {
  const double delay_samples = latency(b) * b.clock_hz;
  const auto whole = static_cast<long long>(std::floor(delay_samples));
  const double frac = delay_samples - static_cast<double>(whole);

  auto transformed = [&](long long idx) -> double {
    if (idx < 0 || idx >= static_cast<long long>(input.size())) return 0.0;
    double v = input[static_cast<std::size_t>(idx)];
    for (const auto& s : b.stages) {
      if (s.transform) v = s.transform(v);
    }
    return v;
  };

  std::vector<double> out(input.size(), 0.0);
  for (long long n = 0; n < static_cast<long long>(input.size()); ++n) {
    if (frac == 0.0) {
      out[static_cast<std::size_t>(n)] = transformed(n - whole);
    } else {
      out[static_cast<std::size_t>(n)] =
          (1.0 - frac) * transformed(n - whole) + frac * transformed(n - whole - 1);
    }
  }
  return out;
}

Board gva290_board() {
  Board b;
  b.clock_hz = 100e6;
  b.stages = {{"adc", 10, nullptr}, {"fpga_buffers", 4, nullptr}, {"dac", 1, nullptr}};
  b.extra_delay_s = 10e-9;
  return b;
}

}  // namespace pldkit
