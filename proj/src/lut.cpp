#include "pldkit/lut.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace pldkit {

std::vector<Partition> partition_options(long long block_bits) {
  if (block_bits < 2) {
    throw std::invalid_argument("partition_options: block_bits must be >= 2");
  }
  std::vector<Partition> out;
  for (int bi = 1; (1LL << bi) <= block_bits; ++bi) {
    const long long addresses = 1LL << bi;
    if (block_bits % addresses == 0) {
      out.push_back(Partition{bi, block_bits / addresses});
    }
  }
  return out;
}

RamBlock::RamBlock(int input_bits, int output_bits, std::pair<double, double> domain,
                   std::pair<double, double> range, long long block_bits)
    : input_bits_(input_bits),
      output_bits_(output_bits),
      domain_(domain),
      range_(range),
      block_bits_(block_bits) {
  if (input_bits < 1 || input_bits > 30) {
    throw std::invalid_argument("RamBlock: input_bits must be in [1, 30]");
  }
  if (output_bits < 1 || output_bits > 63) {
    throw std::invalid_argument(
        "RamBlock: output_bits must be in [1, 63] (wider entries exceed the integer carrier)");
  }
  if (!(domain.first < domain.second)) {
    throw std::invalid_argument("RamBlock: domain lo must be < hi");
  }
  if (!(range.first < range.second)) {
    throw std::invalid_argument("RamBlock: range lo must be < hi");
  }
  if (block_bits < 1) throw std::invalid_argument("RamBlock: block_bits must be >= 1");
  data_.assign(static_cast<std::size_t>(n_entries()), 0);
}

RamBlock RamBlock::tabulate(const std::function<double(double)>& f, int input_bits,
                            int output_bits, std::pair<double, double> domain,
                            std::pair<double, double> range, long long block_bits) {
  RamBlock block(input_bits, output_bits, domain, range, block_bits);
  for (std::int64_t k = 0; k < block.n_entries(); ++k) {
    const double x = block.midpoint(k);
    const double y = f(x);
    if (!std::isfinite(y)) {
      throw std::domain_error("tabulate: f is not finite at sample " + std::to_string(x) +
                              " (domain singularity)");
    }
    block.data_[static_cast<std::size_t>(k)] = block.quantize_to_range(y);
  }
  return block;
}

int RamBlock::address_of(double x) const {
  const double width = domain_.second - domain_.first;
  const double cell = width / static_cast<double>(n_entries());
  auto addr = static_cast<std::int64_t>(std::floor((x - domain_.first) / cell));
  if (addr < 0) addr = 0;
  if (addr >= n_entries()) addr = n_entries() - 1;
  return static_cast<int>(addr);
}

double RamBlock::midpoint(std::int64_t addr) const {
  const double cell = (domain_.second - domain_.first) / static_cast<double>(n_entries());
  return domain_.first + (static_cast<double>(addr) + 0.5) * cell;
}

std::uint64_t RamBlock::quantize_to_range(double y) const {
  const std::uint64_t levels = (output_bits_ == 63)
                                   ? (std::uint64_t{1} << 63) - 1
                                   : (std::uint64_t{1} << output_bits_) - 1;
  const double t = (y - range_.first) / (range_.second - range_.first);
  double code = std::round(t * static_cast<double>(levels));
  if (code < 0.0) code = 0.0;
  const auto max_code = static_cast<double>(levels);
  if (code > max_code) code = max_code;
  return static_cast<std::uint64_t>(code);
}

double RamBlock::mapped_entry(std::int64_t addr) const {
  const std::uint64_t levels = (output_bits_ == 63)
                                   ? (std::uint64_t{1} << 63) - 1
                                   : (std::uint64_t{1} << output_bits_) - 1;
  const double step = (range_.second - range_.first) / static_cast<double>(levels);
  return range_.first + static_cast<double>(entry(addr)) * step;
}

std::uint64_t RamBlock::entry(std::int64_t addr) const {
  if (addr < 0 || addr >= n_entries()) {
    throw std::out_of_range("RamBlock: address out of range");
  }
  return data_[static_cast<std::size_t>(addr)];
}

double RamBlock::lookup(double x) {
  ++cycles_;
  return mapped_entry(address_of(x));
}

void RamBlock::write(std::int64_t addr, std::uint64_t value) {
  if (addr < 0 || addr >= n_entries()) {
    throw std::out_of_range("RamBlock::write: address out of range");
  }
  const std::uint64_t limit = (output_bits_ == 63) ? (std::uint64_t{1} << 63)
                                                   : (std::uint64_t{1} << output_bits_);
  if (value >= limit) {
    throw std::out_of_range("RamBlock::write: value does not fit in output_bits");
  }
  ++cycles_;
  data_[static_cast<std::size_t>(addr)] = value;
}

long long RamBlock::block_count() const {
  const long long total = n_entries() * static_cast<long long>(output_bits_);
  return (total + block_bits_ - 1) / block_bits_;
}

}  // namespace pldkit
