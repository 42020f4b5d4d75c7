#include "nsbm/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace nsbm {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Rising factorials up to this length are summed term by term, longer ones
// use an lgamma difference (for arguments below kLgammaMaxArg).
constexpr std::int64_t kDirectSumMax = 32;
constexpr double kLgammaMaxArg = 1e7;
// Longest ratio run summed in groups before switching to long double lgamma.
constexpr std::int64_t kRatioRunMax = 128;
// The three-term rising-factorial form is used when its rounding error bound
// (a few ulps of every cancelled term) stays below this relative tolerance.
constexpr double kFastPathUlps = 4.0;
constexpr double kFastPathRelTol = 1e-11;

void check_proportion(double v) {
  if (!(v >= 0.0 && v <= 1.0)) throw std::domain_error("stick proportion outside [0, 1]");
}

// log of a Gamma(shape, 1) variate; stays finite for small shapes.
double sample_log_gamma(double shape, Rng& rng) {
  if (shape < 1.0) {
    std::gamma_distribution<double> g(shape + 1.0, 1.0);
    double u = rng.uniform();
    while (u <= 0.0) u = rng.uniform();
    return std::log(g(rng)) + std::log(u) / shape;
  }
  std::gamma_distribution<double> g(shape, 1.0);
  return std::log(g(rng));
}

}  // namespace

std::vector<double> stick_break(std::span<const double> v) {
  std::vector<double> w(v.size());
  double remaining = 1.0;
  double sum = 0.0;
  for (std::size_t k = 0; k < v.size(); ++k) {
    check_proportion(v[k]);
    // A stick of 1 takes what the earlier weights left, and no weight may
    // push the running sum past 1, so a terminal stick of 1 gives weights
    // summing to exactly 1 in floating point.
    const double room = std::max(0.0, 1.0 - sum);
    w[k] = v[k] == 1.0 ? room : std::min(v[k] * remaining, room);
    sum += w[k];
    remaining *= 1.0 - v[k];
  }
  return w;
}

std::vector<double> log_stick_break(std::span<const double> v) {
  std::vector<double> lw(v.size());
  double log_remaining = 0.0;
  for (std::size_t k = 0; k < v.size(); ++k) {
    check_proportion(v[k]);
    lw[k] = (v[k] > 0.0 ? std::log(v[k]) : kNegInf) + log_remaining;
    log_remaining += v[k] < 1.0 ? std::log1p(-v[k]) : kNegInf;
  }
  return lw;
}

namespace {

// log_rising_factorial without argument checks. Adds to `scale` the
// magnitude of the quantities whose rounding errors reach the result.
double rising_factorial_scaled(double x, std::int64_t d, double& scale) {
  if (d == 0) return 0.0;
  if (d > kDirectSumMax && x < kLgammaMaxArg) {
    const double hi = std::lgamma(x + static_cast<double>(d));
    const double lo = std::lgamma(x);
    scale += std::fabs(hi) + std::fabs(lo);
    return hi - lo;
  }
  // Multiply in groups of four before taking logs; each group stays far from
  // overflow for any x below kLgammaMaxArg.
  double total = 0.0;
  std::int64_t i = 0;
  for (; i + 4 <= d; i += 4) {
    const double b = x + static_cast<double>(i);
    const double g = std::log(b * (b + 1.0) * (b + 2.0) * (b + 3.0));
    total += g;
    scale += std::fabs(g);
  }
  for (; i < d; ++i) {
    const double g = std::log(x + static_cast<double>(i));
    total += g;
    scale += std::fabs(g);
  }
  return total;
}

}  // namespace

double log_rising_factorial(double x, std::int64_t d) {
  if (!(x > 0.0)) throw std::domain_error("log_rising_factorial: x must be positive");
  if (d < 0) throw std::domain_error("log_rising_factorial: d must be nonnegative");
  double scale = 0.0;
  return rising_factorial_scaled(x, d, scale);
}

double log_gamma_ratio(double x, std::int64_t d) {
  if (d >= 0) return log_rising_factorial(x, d);
  // Gamma(x + d) / Gamma(x) = 1 / (x + d)^(-d)
  const double base = x + static_cast<double>(d);
  if (!(base > 0.0)) throw std::domain_error("log_gamma_ratio: x + d must be positive");
  return -log_rising_factorial(base, -d);
}

namespace {

// log prod_{i<k} y_i / (y_i + g) for k <= 4 consecutive y_i = x + i.
// prod(y + g) - prod(y) = sum_j g^j e_{k-j}(y) has only positive terms, so
// 1 - ratio is exact to rounding and log1p keeps ratios near 1 accurate.
double log_ratio_group(double x, double g, int k) {
  double e[5] = {1.0, 0.0, 0.0, 0.0, 0.0};
  for (int i = 0; i < k; ++i) {
    const double y = x + static_cast<double>(i);
    for (int m = i + 1; m >= 1; --m) e[m] += e[m - 1] * y;
  }
  double diff = 1.0;
  for (int m = 1; m < k; ++m) diff = diff * g + e[m];
  diff *= g;
  const double den = e[k] + diff;
  const double frac = diff / den;
  return frac < 0.5 ? std::log1p(-frac) : std::log(e[k] / den);
}

// sum_{i<d} log((x + i) / (x + gap + i)) for x, gap > 0. Every term is
// negative, so the sum keeps full relative precision.
double log_ratio_run(double x, double gap, std::int64_t d) {
  if (d == 0) return 0.0;
  if (d > kRatioRunMax && x < kLgammaMaxArg) {
    const long double lx = x;
    const long double lg = gap;
    const long double ld = static_cast<long double>(d);
    return static_cast<double>((std::lgammal(lx + ld) - std::lgammal(lx)) -
                               (std::lgammal(lx + lg + ld) - std::lgammal(lx + lg)));
  }
  double total = 0.0;
  std::int64_t i = 0;
  for (; i + 4 <= d; i += 4) total += log_ratio_group(x + static_cast<double>(i), gap, 4);
  if (i < d) total += log_ratio_group(x + static_cast<double>(i), gap, static_cast<int>(d - i));
  return total;
}

}  // namespace

double log_beta_ratio(double a, double b, std::int64_t d, std::int64_t dbar) {
  if (!(a > 0.0) || !(b > 0.0)) throw std::domain_error("log_beta_ratio: shapes must be positive");
  if (!(a + static_cast<double>(d) > 0.0) || !(b + static_cast<double>(dbar) > 0.0)) {
    throw std::domain_error("log_beta_ratio: shifted shapes must be positive");
  }
  if (d == 0 && dbar == 0) return 0.0;
  if (d >= 0 && dbar >= 0) {
    double scale = 0.0;
    const double fast = rising_factorial_scaled(a, d, scale) +
                        rising_factorial_scaled(b, dbar, scale) -
                        rising_factorial_scaled(a + b, d + dbar, scale);
    if (kFastPathUlps * std::numeric_limits<double>::epsilon() * scale <=
        kFastPathRelTol * std::fabs(fast)) {
      return fast;
    }
    // a^(d) / (a+b)^(d) times b^(dbar) / (a+b+d)^(dbar)
    return log_ratio_run(a, b, d) + log_ratio_run(b, a + static_cast<double>(d), dbar);
  }
  if (d <= 0 && dbar <= 0) {
    return -log_beta_ratio(a + static_cast<double>(d), b + static_cast<double>(dbar), -d, -dbar);
  }
  return log_gamma_ratio(a, d) + log_gamma_ratio(b, dbar) - log_gamma_ratio(a + b, d + dbar);
}

double log_beta(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

double log_beta_pdf(double p, double a, double b) {
  return (a - 1.0) * std::log(p) + (b - 1.0) * std::log1p(-p) - log_beta(a, b);
}

double sym_prod_logs(std::span<const double> log_f, int L, int r, int r2) {
  if (log_f.size() != static_cast<std::size_t>(L) * L) {
    throw std::invalid_argument("sym_prod_logs: matrix size mismatch");
  }
  if (r < 0 || r >= L || r2 < 0 || r2 >= L) throw std::out_of_range("sym_prod_logs: row index");
  return sym_prod_logs(L, r, r2, [&](int x, int y) {
    return log_f[static_cast<std::size_t>(x) * L + y];
  });
}

double log_sum_exp(std::span<const double> values) {
  double hi = kNegInf;
  for (double v : values) hi = std::max(hi, v);
  if (hi == kNegInf) return kNegInf;
  double acc = 0.0;
  for (double v : values) acc += std::exp(v - hi);
  return hi + std::log(acc);
}

int sample_categorical_logits(std::span<const double> logw, Rng& rng) {
  double hi = kNegInf;
  for (double v : logw) {
    if (std::isnan(v)) throw std::domain_error("sample_categorical_logits: NaN logit");
    hi = std::max(hi, v);
  }
  if (hi == kNegInf || !std::isfinite(hi)) {
    throw std::domain_error("sample_categorical_logits: no finite entry");
  }
  double total = 0.0;
  for (double v : logw) total += std::exp(v - hi);
  double target = rng.uniform() * total;
  int last_positive = -1;
  for (std::size_t k = 0; k < logw.size(); ++k) {
    const double p = std::exp(logw[k] - hi);
    if (p <= 0.0) continue;
    last_positive = static_cast<int>(k);
    if (target < p) return last_positive;
    target -= p;
  }
  return last_positive;  // rounding slack lands on the last live index
}

double sample_beta(double a, double b, Rng& rng) {
  if (!(a > 0.0) || !(b > 0.0)) throw std::domain_error("sample_beta: shapes must be positive");
  const double lx = sample_log_gamma(a, rng);
  const double ly = sample_log_gamma(b, rng);
  // x / (x + y) = 1 / (1 + exp(ly - lx))
  const double p = 1.0 / (1.0 + std::exp(ly - lx));
  constexpr double lo = std::numeric_limits<double>::min();
  constexpr double hi = 1.0 - 0x1.0p-53;
  return std::clamp(p, lo, hi);
}

}  // namespace nsbm
