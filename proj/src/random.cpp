// SPDX-License-Identifier: Apache-2.0
#include "fairgauge/random.hpp"

#include <algorithm>
#include <stdexcept>

#include <boost/math/distributions/normal.hpp>

namespace fairgauge {

std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a64(std::string_view s) noexcept {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  return h;
}

std::uint64_t substream_seed(std::uint64_t seed, std::string_view group, std::uint64_t stream) noexcept {
  return mix64(mix64(seed) ^ fnv1a64(group) ^ mix64(stream + 1));
}

double open_uniform(std::mt19937_64& rng) noexcept {
  // (k + 0.5) / 2^53 for k in [0, 2^53)
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

TruncatedNormal::TruncatedNormal(double mean, double sd, double lo, double hi)
    : mean_(mean), sd_(sd), lo_(lo), hi_(hi) {
  if (!(sd > 0.0)) throw std::invalid_argument("TruncatedNormal: sd must be positive");
  if (!(lo < hi)) throw std::invalid_argument("TruncatedNormal: empty support");
  boost::math::normal_distribution<double> unit;
  cdf_lo_ = boost::math::cdf(unit, (lo - mean) / sd);
  cdf_hi_ = boost::math::cdf(unit, (hi - mean) / sd);
}

double TruncatedNormal::quantile(double u) const {
  boost::math::normal_distribution<double> unit;
  const double p = cdf_lo_ + u * (cdf_hi_ - cdf_lo_);
  // Mass entirely outside the support in double precision: pin to the bound.
  if (!(p > 0.0)) return lo_;
  if (!(p < 1.0)) return hi_;
  const double x = mean_ + sd_ * boost::math::quantile(unit, p);
  return std::clamp(x, lo_, hi_);
}

}  // namespace fairgauge
