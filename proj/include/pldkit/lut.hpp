#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

namespace pldkit {

struct Partition {
  int input_bits;
  long long output_bits;

  bool operator==(const Partition&) const = default;
};

/// All (B_i, B_o) with 2^B_i * B_o == block_bits and B_o a positive integer,
/// B_i >= 1 ascending. block_bits < 2 throws.
std::vector<Partition> partition_options(long long block_bits);

// One RAM block (or a logical table spanning several) configured as a
// function: 2^input_bits entries of output_bits each, with affine maps
// between the real domain/range and the integer address/entry spaces.
// Reads and writes each cost one model clock cycle.
class RamBlock {
 public:
  RamBlock(int input_bits, int output_bits, std::pair<double, double> domain,
           std::pair<double, double> range, long long block_bits = 4096);

  /// Samples f at the midpoint of each address cell and quantizes into the
  /// range. A non-finite sample throws a domain-singularity error: shift the
  /// domain (e.g. start 1/sqrt(v) at v = dt) or supply a guard value.
  static RamBlock tabulate(const std::function<double(double)>& f, int input_bits,
                           int output_bits, std::pair<double, double> domain,
                           std::pair<double, double> range, long long block_bits = 4096);

  /// Entry addressed by x, mapped back to the real range. Out-of-domain x
  /// clamps to the edge address (saturating addressing).
  double lookup(double x);

  /// Replaces one entry; addr or value out of range throws.
  void write(std::int64_t addr, std::uint64_t value);

  int address_of(double x) const;
  double midpoint(std::int64_t addr) const;
  std::uint64_t entry(std::int64_t addr) const;
  double mapped_entry(std::int64_t addr) const;
  std::uint64_t quantize_to_range(double y) const;

  int input_bits() const { return input_bits_; }
  int output_bits() const { return output_bits_; }
  std::int64_t n_entries() const { return std::int64_t{1} << input_bits_; }
  std::pair<double, double> domain() const { return domain_; }
  std::pair<double, double> range() const { return range_; }

  /// Physical blocks the table occupies: ceil(2^B_i * B_o / block_bits).
  long long block_count() const;
  long long block_bits() const { return block_bits_; }

  /// Model clock: total reads + writes so far.
  long long cycles() const { return cycles_; }

 private:
  int input_bits_;
  int output_bits_;
  std::pair<double, double> domain_;
  std::pair<double, double> range_;
  long long block_bits_;
  std::vector<std::uint64_t> data_;
  long long cycles_ = 0;
};

}  // namespace pldkit
