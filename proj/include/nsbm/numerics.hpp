#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "nsbm/rng.hpp"

namespace nsbm {

/// Stick-breaking map: weights[k] = v[k] * prod_{l<k} (1 - v[l]). A
/// proportion of exactly 1 takes 1 minus the sum of the earlier weights, so a
/// terminal stick of 1 makes the weights sum to exactly 1.
/// Throws std::domain_error if any proportion lies outside [0, 1].
std::vector<double> stick_break(std::span<const double> v);

/// log of stick_break(v), computed without forming the products. Entries are
/// -inf where a weight is exactly zero.
std::vector<double> log_stick_break(std::span<const double> v);

/// log x^(d) = sum_{i<d} log(x + i). Zero for d == 0. Requires x > 0.
double log_rising_factorial(double x, std::int64_t d);

/// log Gamma(x + d) / Gamma(x) for integer d of either sign; x + d > 0.
double log_gamma_ratio(double x, std::int64_t d);

/// log [ B(a + d, b + dbar) / B(a, b) ] through rising factorials, which
/// stays accurate where both Beta values underflow.
double log_beta_ratio(double a, double b, std::int64_t d, std::int64_t dbar);

/// log B(a, b) from lgamma.
double log_beta(double a, double b);

/// Log-density of Beta(a, b) at p in (0, 1).
double log_beta_pdf(double p, double a, double b);

/// Sum of log f over the upper-triangle entries (x <= y) of a symmetric
/// L x L table that touch row r or row r2. Row r skips column r2 so the
/// shared entry is counted once; with r == r2 the single row is summed whole.
template <class LogF>
double sym_prod_logs(int L, int r, int r2, LogF&& log_f) {
  double total = 0.0;
  for (int y = 0; y < L; ++y) {
    if (y != r2 || r == r2) total += log_f(r, y);
  }
  if (r2 != r) {
    for (int y = 0; y < L; ++y) total += log_f(r2, y);
  }
  return total;
}

/// Dense row-major overload.
double sym_prod_logs(std::span<const double> log_f, int L, int r, int r2);

double log_sum_exp(std::span<const double> values);

/// Draws index k with probability exp(logw[k] - logsumexp(logw)).
/// Throws std::domain_error if no entry is finite.
int sample_categorical_logits(std::span<const double> logw, Rng& rng);

/// Beta(a, b) draw via two Gamma variates. Result lies in [0, 1].
double sample_beta(double a, double b, Rng& rng);

}  // namespace nsbm
