#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "nsbm/model.hpp"
#include "nsbm/rng.hpp"

namespace nsbm {

/// Knobs of the multi-network generator.
struct SimConfig {
  int J = 60;
  int n_min = 200;  // nodes per network drawn uniformly from [n_min, n_max]
  int n_max = 200;
  int K = 3;
  std::vector<int> L = {2, 3, 5};  // communities per class, one entry per class
  double gamma = 0.1;   // 0 = perfectly assortative, 1 = uniform random
  double lambda = 30.0;  // target expected average degree
  double tau = 0.0;     // per-node label resampling probability
  std::uint64_t seed = 0;
  bool even = true;  // balanced class sizes when J is divisible by K

  void validate() const;
};

struct SimOutput {
  NetworkCollection data;
  std::vector<std::vector<double>> etas;  // realized connectivity, L(k) x L(k) row-major
  std::vector<int> L;                     // communities per class
  std::int64_t clamped_pairs = 0;         // scaled probabilities that exceeded 1
};

/// (1 - gamma) I + gamma U with U symmetric, entries Uniform[0, 1].
std::vector<double> gen_eta(int L, double gamma, Rng& rng);

/// Expected average degree (1/n) sum_s sum_{t != s} eta[xi_s][xi_t] under the
/// given labels. Zero when n < 2.
double ead(int n, std::span<const double> eta, int L, std::span<const int> xi);

SimOutput gen_collection(const SimConfig& cfg, Rng& rng);

/// Three school types with fixed personality-mixing matrices and type
/// proportions; every network size drawn uniformly from [n_min, n_max].
SimOutput personality_benchmark(int per_school, int n_min, int n_max, Rng& rng);

/// Fixed connectivity of school type k (3 x 3).
std::vector<double> personality_eta(int k);
/// Type proportions (extrovert, ambivert, introvert) of school type k.
std::vector<double> personality_proportions(int k);

}  // namespace nsbm
