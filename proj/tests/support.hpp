#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>

#include "qnl/meter.hpp"

namespace qnl::test {

inline double rel(double a, double b) {
  const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
  return std::abs(a - b) / scale;
}

/// Deterministic draws for property tests.
class Draw {
 public:
  explicit Draw(std::uint64_t seed) : gen_(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen_); }
  double log_uniform(double lo, double hi) { return std::exp(uniform(std::log(lo), std::log(hi))); }
  Complex complex(double r) { return {uniform(-r, r), uniform(-r, r)}; }
  /// Lossy inverse susceptibility with Im < 0.
  Complex lossy_chi_inv() { return {uniform(-3.0, 3.0), -log_uniform(1e-2, 2.0)}; }
  std::mt19937_64& engine() { return gen_; }

 private:
  std::mt19937_64 gen_;
};

}  // namespace qnl::test
