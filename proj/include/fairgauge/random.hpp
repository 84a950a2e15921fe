// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace fairgauge {

/// SplitMix64 finaliser; used to derive well-mixed seeds.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// 64-bit FNV-1a over the bytes of `s`.
std::uint64_t fnv1a64(std::string_view s) noexcept;

/// Seed for the independent substream identified by (seed, group, stream).
/// Substreams never depend on how many values other streams draw.
std::uint64_t substream_seed(std::uint64_t seed, std::string_view group, std::uint64_t stream) noexcept;

/// Uniform double in the open interval (0,1) from the top 53 bits of one
/// mt19937_64 output.
double open_uniform(std::mt19937_64& rng) noexcept;

/// Normal(mean, sd) truncated to [lo, hi], sampled by inverse CDF from one
/// uniform draw. For a fixed draw the sample is non-decreasing in `mean`.
class TruncatedNormal {
 public:
  TruncatedNormal(double mean, double sd, double lo, double hi);

  double quantile(double u) const;
  double operator()(std::mt19937_64& rng) const { return quantile(open_uniform(rng)); }

 private:
  double mean_;
  double sd_;
  double lo_;
  double hi_;
  double cdf_lo_;
  double cdf_hi_;
};

}  // namespace fairgauge
