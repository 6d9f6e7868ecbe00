#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <string>

namespace betasplit {

// A non-negative real stored as its natural logarithm. -inf encodes zero.
// Tree probabilities reach 1e-157057, so everything stays in log space until
// it is rendered.
struct LogReal {
  double log_value = 0.0;

  static LogReal zero() { return {-std::numeric_limits<double>::infinity()}; }
  static LogReal one() { return {0.0}; }
  static LogReal from_value(double x);

  bool is_zero() const { return log_value == -std::numeric_limits<double>::infinity(); }
  // Underflows to 0 for tiny values; use decimal() for display.
  double value() const;

  LogReal& operator*=(LogReal other) {
    log_value += other.log_value;
    return *this;
  }
  LogReal& operator/=(LogReal other) {
    log_value -= other.log_value;
    return *this;
  }
  friend LogReal operator*(LogReal a, LogReal b) { return a *= b; }
  friend LogReal operator/(LogReal a, LogReal b) { return a /= b; }
  // log-sum-exp
  friend LogReal operator+(LogReal a, LogReal b);
  LogReal& operator+=(LogReal other) { return *this = *this + other; }

  friend bool operator==(LogReal, LogReal) = default;
};

// Scientific decomposition value = mantissa * 10^exponent10, 1 <= mantissa < 10.
struct DecimalForm {
  double mantissa = 0.0;
  std::int64_t exponent10 = 0;
  bool is_zero = false;
};

DecimalForm decimal(LogReal x);
// Mantissa rounded to `digits` significant digits, renormalized if rounding
// carries into the next decade (9.996e-3 -> 1.00e-2).
DecimalForm decimal_rounded(LogReal x, int digits);
// "1.31e-25", "1" style rendering used by table1 and the CLI.
std::string format_decimal(LogReal x, int digits);

// ln Gamma(x), x > 0. Lanczos (g = 7, 9 terms) for x < 10, Stirling series
// with a seven-term Bernoulli correction above.
double log_gamma(double x);

// ln B(a, b) = ln Gamma(a) + ln Gamma(b) - ln Gamma(a + b). Large arguments
// go through a Stirling-difference form to avoid cancellation between
// nearly equal log-gammas.
LogReal log_beta(double a, double b);

// ln C(n, k).
double log_binomial(std::int64_t n, std::int64_t k);

// Random streams.
//
// stream(seed, replicate) seeds a 64-bit Mersenne Twister from the four
// 32-bit words of (seed, replicate). Streams for distinct replicate indices
// are independent for practical purposes and each is reproducible.
using Rng = std::mt19937_64;
Rng make_stream(std::uint64_t seed, std::uint64_t replicate);

// Uniform on [0, 1) with 53 random bits: (x >> 11) * 2^-53.
double uniform01(Rng& rng);

// ln of a Gamma(shape, 1) variate. Marsaglia-Tsang for shape >= 1; for
// shape < 1 the boosted variate Gamma(shape + 1) * U^(1/shape), computed
// in log space so shapes near 0 do not underflow.
double sample_log_gamma(double shape, Rng& rng);

// Beta(a, b) variate as X / (X + Y) with X ~ Gamma(a), Y ~ Gamma(b).
double sample_beta(double a, double b, Rng& rng);

// Exponential(rate) variate.
double sample_exponential(double rate, Rng& rng);

// Index j with breakpoints[j] <= u < breakpoints[j + 1]; the last cell is
// closed at 1. A point on a breakpoint belongs to the cell on its right.
// breakpoints = {0, x1, ..., 1}, non-decreasing.
std::size_t pick_interval(std::span<const double> breakpoints, double u);

}  // namespace betasplit
