#include "betasplit/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "betasplit/error.hpp"

namespace betasplit {

namespace {

constexpr double kLnSqrt2Pi = 0.91893853320467274178032973640562;

// Lanczos coefficients, g = 7, n = 9 (Godfrey). Relative error of Gamma
// below 2e-15 on [0.5, inf).
constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,   12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};

double lanczos_log_gamma(double x) {
  // x >= 0.5
  const double z = x - 1.0;
  double sum = kLanczos[0];
  for (std::size_t i = 1; i < kLanczos.size(); ++i) sum += kLanczos[i] / (z + static_cast<double>(i));
  const double t = z + kLanczosG + 0.5;
  return kLnSqrt2Pi + (z + 0.5) * std::log(t) - t + std::log(sum);
}

// ln Gamma(x) - [(x - 1/2) ln x - x + ln sqrt(2 pi)] for x >= 10.
// Truncation error below 1e-17 there.
double stirling_correction(double x) {
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  return inv *
         (1.0 / 12.0 +
          inv2 * (-1.0 / 360.0 +
                  inv2 * (1.0 / 1260.0 +
                          inv2 * (-1.0 / 1680.0 +
                                  inv2 * (1.0 / 1188.0 + inv2 * (-691.0 / 360360.0 + inv2 * (1.0 / 156.0)))))));
}

void require_positive(double a, const char* what) {
  if (!(a > 0.0) || !std::isfinite(a)) {
    throw DomainError(std::string(what) + ": argument must be finite and > 0, got " + std::to_string(a));
  }
}

}  // namespace

LogReal LogReal::from_value(double x) {
  if (x < 0.0 || std::isnan(x)) throw DomainError("LogReal: negative value");
  return {std::log(x)};
}

double LogReal::value() const { return std::exp(log_value); }

LogReal operator+(LogReal a, LogReal b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  const double hi = std::max(a.log_value, b.log_value);
  const double lo = std::min(a.log_value, b.log_value);
  return {hi + std::log1p(std::exp(lo - hi))};
}

DecimalForm decimal(LogReal x) {
  if (x.is_zero()) return {0.0, 0, true};
  const double log10v = x.log_value / std::numbers::ln10;
  const double e = std::floor(log10v);
  double mantissa = std::pow(10.0, log10v - e);
  auto exponent = static_cast<std::int64_t>(e);
  if (mantissa >= 10.0) {
    mantissa /= 10.0;
    ++exponent;
  }
  return {mantissa, exponent, false};
}

DecimalForm decimal_rounded(LogReal x, int digits) {
  DecimalForm d = decimal(x);
  if (d.is_zero) return d;
  const double scale = std::pow(10.0, digits - 1);
  d.mantissa = std::round(d.mantissa * scale) / scale;
  if (d.mantissa >= 10.0) {
    d.mantissa /= 10.0;
    ++d.exponent10;
  }
  return d;
}

std::string format_decimal(LogReal x, int digits) {
  const DecimalForm d = decimal_rounded(x, digits);
  if (d.is_zero) return "0";
  char buf[64];
  if (d.exponent10 == 0 && d.mantissa == 1.0) return "1";
  std::snprintf(buf, sizeof buf, "%.*fe%lld", digits - 1, d.mantissa, static_cast<long long>(d.exponent10));
  return buf;
}

double log_gamma(double x) {
  require_positive(x, "log_gamma");
  if (x < 0.5) return lanczos_log_gamma(x + 1.0) - std::log(x);
  if (x < 10.0) return lanczos_log_gamma(x);
  return (x - 0.5) * std::log(x) - x + kLnSqrt2Pi + stirling_correction(x);
}

LogReal log_beta(double a, double b) {
  require_positive(a, "log_beta");
  require_positive(b, "log_beta");
  const double p = std::min(a, b);
  const double q = std::max(a, b);
  const double ratio = p / (p + q);
  if (p >= 10.0) {
    const double corr = stirling_correction(p) + stirling_correction(q) - stirling_correction(p + q);
    return {-0.5 * std::log(q) + kLnSqrt2Pi + corr + (p - 0.5) * std::log(ratio) + q * std::log1p(-ratio)};
  }
  if (q >= 10.0) {
    const double corr = stirling_correction(q) - stirling_correction(p + q);
    return {log_gamma(p) + corr + p - p * std::log(p + q) + (q - 0.5) * std::log1p(-ratio)};
  }
  return {log_gamma(p) + log_gamma(q) - log_gamma(p + q)};
}

double log_binomial(std::int64_t n, std::int64_t k) {
  if (k < 0 || k > n) throw DomainError("log_binomial: k out of range");
  if (k == 0 || k == n) return 0.0;
  return -std::log(static_cast<double>(n) + 1.0) -
         log_beta(static_cast<double>(n - k) + 1.0, static_cast<double>(k) + 1.0).log_value;
}

Rng make_stream(std::uint64_t seed, std::uint64_t replicate) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(replicate), static_cast<std::uint32_t>(replicate >> 32)};
  return Rng(seq);
}

double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double sample_log_gamma(double shape, Rng& rng) {
  require_positive(shape, "sample_gamma");
  if (shape < 1.0) {
    // 1 - U lies in (0, 1], so the log is finite.
    const double log_u = std::log(1.0 - uniform01(rng));
    return sample_log_gamma(shape + 1.0, rng) + log_u / shape;
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  std::normal_distribution<double> normal;
  for (;;) {
    const double x = normal(rng);
    double v = 1.0 + c * x;
    if (v <= 0.0) continue;
    v = v * v * v;
    const double u = 1.0 - uniform01(rng);
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2 || std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) {
      return std::log(d) + std::log(v);
    }
  }
}

double sample_beta(double a, double b, Rng& rng) {
  require_positive(a, "sample_beta");
  require_positive(b, "sample_beta");
  const double lx = sample_log_gamma(a, rng);
  const double ly = sample_log_gamma(b, rng);
  // X / (X + Y) = 1 / (1 + exp(ly - lx)), evaluated on the side that does not overflow.
  double x;
  if (lx >= ly) {
    x = 1.0 / (1.0 + std::exp(ly - lx));
  } else {
    const double r = std::exp(lx - ly);
    x = r / (1.0 + r);
  }
  return std::clamp(x, std::nextafter(0.0, 1.0), std::nextafter(1.0, 0.0));
}

double sample_exponential(double rate, Rng& rng) {
  require_positive(rate, "sample_exponential");
  return -std::log(1.0 - uniform01(rng)) / rate;
}

std::size_t pick_interval(std::span<const double> breakpoints, double u) {
  if (breakpoints.size() < 2) throw ValidationError("pick_interval: need at least two breakpoints");
  if (!(u >= 0.0 && u <= 1.0)) throw DomainError("pick_interval: u outside [0, 1]");
  const auto cells = breakpoints.size() - 1;
  const auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), u);
  const auto j = static_cast<std::size_t>(it - breakpoints.begin());
  if (j == 0) return 0;
  return std::min(j - 1, cells - 1);
}

}  // namespace betasplit
