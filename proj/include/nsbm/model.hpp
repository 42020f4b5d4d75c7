#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nsbm/netcore.hpp"

namespace nsbm {

/// Prior hyperparameters and truncation levels.
struct Hyper {
  double alpha = 1.0;  // Beta prior on edge probabilities
  double beta = 1.0;
  double w0 = 1.0;   // community-level stick concentration
  double pi0 = 1.0;  // class-level stick concentration
  int K = 1;         // class truncation
  int L = 20;        // community truncation

  void validate() const;
};

/// Default class truncation for J networks.
int default_class_truncation(int J);

struct Network {
  std::string id;
  Adjacency adj;
  std::optional<int> z_true;
  std::optional<std::vector<int>> xi_true;
};

struct NetworkCollection {
  std::vector<Network> networks;

  int size() const { return static_cast<int>(networks.size()); }
  const Adjacency& adj(int j) const { return networks[j].adj; }

  bool has_z_truth() const;
  bool has_xi_truth() const;
  std::vector<int> z_truth() const;
  std::vector<std::vector<int>> xi_truth() const;

  /// Throws std::invalid_argument when truth labels disagree with node counts.
  void validate() const;

  bool operator==(const NetworkCollection& other) const;
};

/// Log-transforms of edge probabilities: logit = log(eta / (1 - eta)),
/// log1m = log(1 - eta). Indexed [k][x][y], row-major.
struct EtaLogs {
  int K = 0;
  int L = 0;
  std::vector<double> logit;
  std::vector<double> log1m;

  static EtaLogs from(std::span<const double> eta, int K, int L);

  std::size_t index(int k, int x, int y) const {
    return (static_cast<std::size_t>(k) * L + x) * L + y;
  }
  double logit_at(int k, int x, int y) const { return logit[index(k, x, y)]; }
  double log1m_at(int k, int x, int y) const { return log1m[index(k, x, y)]; }
};

/// All latent variables of the truncated nested SBM.
///
/// The terminal sticks u[k][L-1] and v[K-1] are pinned to 1 so the weights
/// w[k] and pi sum to one. log_w and log_pi are derived caches; call
/// refresh_weights() after touching u or v.
struct ModelState {
  int K = 1;
  int L = 1;
  std::vector<int> z;
  std::vector<LabelVector> xi;
  std::vector<double> eta;  // K * L * L, symmetric in (x, y)
  std::vector<double> u;    // K * L
  std::vector<double> v;    // K
  std::vector<double> log_w;   // K * L
  std::vector<double> log_pi;  // K

  /// Zero labels, eta = 0.5, sticks at 0.5 with terminal sticks at 1.
  static ModelState blank(const NetworkCollection& data, int K, int L);

  std::size_t eta_index(int k, int x, int y) const {
    return (static_cast<std::size_t>(k) * L + x) * L + y;
  }
  double eta_at(int k, int x, int y) const { return eta[eta_index(k, x, y)]; }
  /// Sets both (x, y) and (y, x), clamped away from 0 and 1.
  void set_eta(int k, int x, int y, double p);

  double u_at(int k, int x) const { return u[static_cast<std::size_t>(k) * L + x]; }
  double lw(int k, int x) const { return log_w[static_cast<std::size_t>(k) * L + x]; }

  std::vector<double> w(int k) const;
  std::vector<double> pi() const;

  void refresh_weights();

  /// Throws std::invalid_argument when sizes disagree with `data`.
  void check_against(const NetworkCollection& data) const;
};

double clamp_probability(double p);

/// Posterior draws plus per-iteration diagnostics.
struct Draw {
  int iter = 0;
  std::vector<int> z;
  std::vector<std::vector<int>> xi;
  bool operator==(const Draw&) const = default;
};

struct TraceRow {
  int iter = 0;
  double log_density = 0.0;
  int occupied_classes = 0;
  double mean_occupied_communities = 0.0;
  std::optional<double> z_nmi;
  std::optional<double> xi_nmi;
  double elapsed_ms = 0.0;
};

struct PosteriorSamples {
  std::vector<Draw> draws;
  std::vector<TraceRow> trace;
};

/// Aggregate block sums per class: out[k] = sum over {j : z_j = k} of the
/// per-network block sums.
std::vector<BlockStats> class_block_sums(const NetworkCollection& data,
                                         std::span<const int> z,
                                         const std::vector<LabelVector>& xi, int K, int L);

/// log p(A, eta, xi, z, u, v) up to a constant. Terminal sticks contribute
/// no prior term.
double log_joint(const ModelState& state, const NetworkCollection& data, const Hyper& h);

/// Same quantity from precomputed class aggregates and the label terms.
double log_joint_from_stats(const ModelState& state, const std::vector<BlockStats>& class_stats,
                            const Hyper& h);

/// log p(A, z, xi | u, v) with eta integrated out, up to a constant:
/// sum_k sum_{x<=y} log B(m + alpha, mbar + beta) + label terms.
double collapsed_log_joint(const ModelState& state, const NetworkCollection& data,
                           const Hyper& h);

double collapsed_log_joint_from_stats(const ModelState& state,
                                      const std::vector<BlockStats>& class_stats,
                                      const Hyper& h);

/// Only the Beta-function part of collapsed_log_joint.
double collapsed_beta_terms(const std::vector<BlockStats>& class_stats, const Hyper& h);

/// Label prior part: sum_j [log pi_{z_j} + sum_s log w_{xi_sj, z_j}].
double label_log_prior(const ModelState& state);

/// Log prior density of the non-terminal sticks u and v.
double stick_log_prior(const ModelState& state, const Hyper& h);

/// Posterior-mean edge probabilities (m + alpha) / (N + alpha + beta),
/// K symmetric L x L matrices flattened [k][x][y].
std::vector<double> estimate_eta(std::span<const int> z, const std::vector<LabelVector>& xi,
                                 const NetworkCollection& data, const Hyper& h);

}  // namespace nsbm
