#include "nsbm/simgen.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

namespace nsbm {

namespace {

Adjacency sample_sbm(std::span<const int> xi, std::span<const double> eta, int L, double scale,
                     Rng& rng, std::int64_t& clamped) {
  const int n = static_cast<int>(xi.size());
  std::vector<std::pair<int, int>> edges;
  for (int s = 0; s < n; ++s) {
    for (int t = s + 1; t < n; ++t) {
      double p = scale * eta[static_cast<std::size_t>(xi[s]) * L + xi[t]];
      if (p > 1.0) {
        p = 1.0;
        ++clamped;
      }
      if (rng.uniform() < p) edges.emplace_back(s, t);
    }
  }
  return Adjacency::from_edges(n, edges);
}

std::string network_id(int j) { return "net" + std::to_string(j); }

}  // namespace

void SimConfig::validate() const {
  if (J < 1 || K < 1) throw std::invalid_argument("J and K must be >= 1");
  if (n_min < 1 || n_max < n_min) throw std::invalid_argument("invalid node-count range");
  if (L.size() != static_cast<std::size_t>(K)) {
    throw std::invalid_argument("L must list one community count per class");
  }
  for (int l : L) {
    if (l < 1) throw std::invalid_argument("community counts must be >= 1");
  }
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw std::invalid_argument("gamma must lie in [0, 1]");
  if (!(tau >= 0.0 && tau <= 1.0)) throw std::invalid_argument("tau must lie in [0, 1]");
  if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
}

std::vector<double> gen_eta(int L, double gamma, Rng& rng) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw std::invalid_argument("gamma must lie in [0, 1]");
  std::vector<double> eta(static_cast<std::size_t>(L) * L);
  for (int x = 0; x < L; ++x) {
    for (int y = x; y < L; ++y) {
      const double value = (x == y ? 1.0 - gamma : 0.0) + gamma * rng.uniform();
      eta[static_cast<std::size_t>(x) * L + y] = value;
      eta[static_cast<std::size_t>(y) * L + x] = value;
    }
  }
  return eta;
}

double ead(int n, std::span<const double> eta, int L, std::span<const int> xi) {
  if (n < 2) return 0.0;
  if (xi.size() != static_cast<std::size_t>(n)) throw std::invalid_argument("ead: label length");
  // sum_s sum_{t != s} eta[xi_s][xi_t] = sum_{x,y} c_x (c_y - [x == y]) eta[x][y]
  std::vector<double> sizes(L, 0.0);
  for (int x : xi) sizes.at(x) += 1.0;
  double total = 0.0;
  for (int x = 0; x < L; ++x) {
    for (int y = 0; y < L; ++y) {
      total += sizes[x] * (sizes[y] - (x == y ? 1.0 : 0.0)) *
               eta[static_cast<std::size_t>(x) * L + y];
    }
  }
  return total / static_cast<double>(n);
}

SimOutput gen_collection(const SimConfig& cfg, Rng& rng) {
  cfg.validate();
  SimOutput out;
  out.L = cfg.L;
  Rng eta_rng = rng.derive(0);
  for (int k = 0; k < cfg.K; ++k) out.etas.push_back(gen_eta(cfg.L[k], cfg.gamma, eta_rng));

  Rng class_rng = rng.derive(1);
  std::vector<int> z(cfg.J);
  if (cfg.even && cfg.J % cfg.K == 0) {
    for (int j = 0; j < cfg.J; ++j) z[j] = j % cfg.K;
    std::shuffle(z.begin(), z.end(), class_rng);
  } else {
    for (int& zj : z) zj = class_rng.uniform_int(cfg.K);
  }

  Rng template_rng = rng.derive(2);
  std::vector<std::vector<int>> templates(cfg.K);
  for (int k = 0; k < cfg.K; ++k) {
    templates[k].resize(cfg.n_max);
    for (int& x : templates[k]) x = template_rng.uniform_int(cfg.L[k]);
  }

  Rng size_rng = rng.derive(3);
  for (int j = 0; j < cfg.J; ++j) {
    const int k = z[j];
    const int n = cfg.n_min == cfg.n_max
                      ? cfg.n_min
                      : cfg.n_min + size_rng.uniform_int(cfg.n_max - cfg.n_min + 1);
    Rng net_rng = rng.derive(100 + static_cast<std::uint64_t>(j));
    std::vector<int> xi(templates[k].begin(), templates[k].begin() + n);
    for (int& x : xi) {
      if (net_rng.uniform() < cfg.tau) x = net_rng.uniform_int(cfg.L[k]);
    }
    const double degree = ead(n, out.etas[k], cfg.L[k], xi);
    if (!(degree > 0.0)) {
      throw std::runtime_error("network " + std::to_string(j) +
                               ": expected average degree is zero, cannot rescale");
    }
    const double scale = cfg.lambda / degree;
    Adjacency adj = sample_sbm(xi, out.etas[k], cfg.L[k], scale, net_rng, out.clamped_pairs);
    out.data.networks.push_back(Network{network_id(j), std::move(adj), k, std::move(xi)});
  }
  return out;
}

std::vector<double> personality_eta(int k) {
  switch (k) {
    case 0: return {.9, .75, .5, .75, .6, .25, .5, .25, .1};
    case 1: return {.8, .1, .3, .1, .9, .2, .3, .2, .7};
    case 2: return {.1, .4, .6, .4, .3, .1, .6, .1, .5};
  }
  throw std::out_of_range("school type must be 0, 1 or 2");
}

std::vector<double> personality_proportions(int k) {
  switch (k) {
    case 0: return {.40, .35, .25};
    case 1: return {.70, .15, .15};
    case 2: return {.20, .40, .40};
  }
  throw std::out_of_range("school type must be 0, 1 or 2");
}

SimOutput personality_benchmark(int per_school, int n_min, int n_max, Rng& rng) {
  if (per_school < 1) throw std::invalid_argument("need at least one network per school");
  if (n_min < 1 || n_max < n_min) throw std::invalid_argument("invalid node-count range");
  SimOutput out;
  out.L = {3, 3, 3};
  for (int k = 0; k < 3; ++k) out.etas.push_back(personality_eta(k));
  int j = 0;
  for (int k = 0; k < 3; ++k) {
    const auto props = personality_proportions(k);
    std::discrete_distribution<int> type(props.begin(), props.end());
    for (int i = 0; i < per_school; ++i, ++j) {
      Rng net_rng = rng.derive(static_cast<std::uint64_t>(j));
      const int n = n_min + net_rng.uniform_int(n_max - n_min + 1);
      std::vector<int> xi(n);
      for (int& x : xi) x = type(net_rng);
      Adjacency adj = sample_sbm(xi, out.etas[k], 3, 1.0, net_rng, out.clamped_pairs);
      out.data.networks.push_back(Network{network_id(j), std::move(adj), k, std::move(xi)});
    }
  }
  return out;
}

}  // namespace nsbm
