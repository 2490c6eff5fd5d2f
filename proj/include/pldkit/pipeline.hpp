#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace pldkit {

// One pipelined element: it holds its result for `cycles` clock ticks and
// optionally applies a per-sample transform (identity if absent).
struct Stage {
  std::string name;
  int cycles = 0;
  std::function<double(double)> transform;
};

// Serial chain of registered stages on one clock, plus a lumped analog
// delay for everything that is not clocked (cables, converters' apertures).
struct Board {
  double clock_hz = 100e6;
  std::vector<Stage> stages;
  double extra_delay_s = 0.0;

  long long total_cycles() const;
};

/// Sum of stage cycles over the clock plus the analog extra delay.
double latency(const Board& b);

/// 1 / latency: the loop-bandwidth ceiling the delay imposes.
double control_bandwidth(const Board& b);

/// Runs samples (taken at the board clock) through the chain: stage
/// transforms applied in order, output delayed by the total cycle count,
/// fractional extra delay realized by linear interpolation. One output per
/// input; the pipeline starts filled with zeros.
std::vector<double> simulate_through(const Board& b, std::span<const double> input);

/// 12-bit 100 MHz converter board: ADC 10 cycles, FPGA buffers 4, DAC 1,
/// plus 10 ns of unclocked component delay.
Board gva290_board();

}  // namespace pldkit
