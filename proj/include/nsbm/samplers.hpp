#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nsbm/model.hpp"
#include "nsbm/netcore.hpp"
#include "nsbm/rng.hpp"

namespace nsbm {

enum class SamplerKind { G, CG, BG, IBG };

SamplerKind parse_sampler(std::string_view name);  // g | cg | bg | ibg, case-insensitive
std::string_view sampler_name(SamplerKind kind);

enum class InitMode { DpsbmWarm, Random };

struct ChainOptions {
  int iterations = 1000;
  int burn_in = 500;
  int thin = 5;
  std::uint64_t seed = 0;
  InitMode init = InitMode::DpsbmWarm;
  int warm_iterations = 100;
  bool trace_nmi = true;
  /// Evaluate the log density each iteration (costs one pass over the stats).
  bool trace_density = true;

  void validate() const;
};

/// Latent state plus the sufficient statistics every kernel reads.
///
/// Per-network block sums and label counts, and their per-class aggregates,
/// are kept in sync by set_xi / set_z in O(degree + L) and O(L^2).
class ChainState {
 public:
  ChainState(const NetworkCollection& data, const Hyper& h, ModelState state);

  const NetworkCollection& data() const { return *data_; }
  const Hyper& hyper() const { return h_; }
  const ModelState& model() const { return state_; }
  ModelState& model() { return state_; }

  int J() const { return data_->size(); }
  int K() const { return state_.K; }
  int L() const { return state_.L; }

  const BlockStats& network_stats(int j) const { return net_stats_[j]; }
  const BlockStats& class_stats(int k) const { return class_stats_[k]; }
  const std::vector<BlockStats>& all_class_stats() const { return class_stats_; }
  const std::vector<Count>& network_label_counts(int j) const { return net_counts_[j]; }
  Count class_label_count(int k, int x) const {
    return class_counts_[static_cast<std::size_t>(k) * state_.L + x];
  }
  int class_size(int k) const { return class_sizes_[k]; }

  const EtaLogs& eta_logs() const { return logs_; }
  void refresh_eta_logs();

  /// tau / nu for node s of network j under the current labels.
  NeighborCounts neighbors(int j, int s) const;

  void set_xi(int j, int s, int x);
  void set_z(int j, int r);

  /// Recomputes all statistics from the labels.
  void rebuild();
  void rebuild_class_aggregates();
  /// True when incremental statistics equal a from-scratch recomputation.
  bool coherent() const;

 private:
  const NetworkCollection* data_;
  Hyper h_;
  ModelState state_;
  EtaLogs logs_;
  std::vector<BlockStats> net_stats_;
  std::vector<BlockStats> class_stats_;
  std::vector<std::vector<Count>> net_counts_;
  std::vector<Count> class_counts_;  // K * L
  std::vector<int> class_sizes_;
};

/// Shapes of a Beta full conditional.
struct BetaShape {
  double a = 1.0;
  double b = 1.0;
};

// Continuous updates shared by all samplers.
BetaShape eta_conditional(const ChainState& cs, int k, int x, int y);
BetaShape u_conditional(const ChainState& cs, int k, int x);
BetaShape v_conditional(const ChainState& cs, int k);

void update_eta(ChainState& cs, Rng& rng);
void update_u(ChainState& cs, Rng& rng);
void update_v(ChainState& cs, Rng& rng);

// Label kernels. Each *_logits function returns the unnormalized log full
// conditional over candidate values; the update_* sweeps draw from it.

/// Gibbs: xi_sj given eta, w and z_j.
std::vector<double> xi_gibbs_logits(const ChainState& cs, int j, int s);
void update_xi_gibbs(ChainState& cs, Rng& rng);

/// Gibbs: z_j given eta, w, pi and xi_j.
std::vector<double> z_gibbs_logits(const ChainState& cs, int j);
void update_z_gibbs(ChainState& cs, Rng& rng);

/// Collapsed: xi_sj with eta integrated out. Candidate x costs O(L) via the
/// one-node delta on the class aggregate and the symmetric row product.
std::vector<double> xi_collapsed_logits(const ChainState& cs, int j, int s);
void update_xi_collapsed(ChainState& cs, Rng& rng);

/// Collapsed: z_j with eta integrated out, using the shared kappa factor
/// for every class other than the current one.
std::vector<double> z_collapsed_logits(const ChainState& cs, int j);
void update_z_collapsed(ChainState& cs, Rng& rng);

/// Blocked: xi_sj given eta, w, pi with z_j summed out.
std::vector<double> xi_marginal_logits(const ChainState& cs, int j, int s);
void update_xi_marginal_z(ChainState& cs, Rng& rng);

/// log of the class-k weight of network j with node s removed:
/// sum_x n_x log w_xk + sum_{x<=y} (D logit + N log1m) over pairs not
/// touching s. O(L^2).
double remainder_log_weight(const ChainState& cs, int j, int s, int k);

/// log of the class-k weight of all of network j (the remainder plus s).
double network_log_weight(const ChainState& cs, int j, int k);

/// Per-network running cache of network_log_weight for the blocked sweep,
/// so each node costs O(K L) instead of O(K L^2).
class MarginalWeightCache {
 public:
  void begin_network(const ChainState& cs, int j);
  /// Remainder weight for class k given the contribution of s at its
  /// current label (falls back to recomputation when that is -inf).
  double remainder(const ChainState& cs, int s, int k, double contribution) const;
  void commit(int k, double remainder, double contribution) { full_[k] = remainder + contribution; }
  double full(int k) const { return full_[k]; }

 private:
  int j_ = -1;
  std::vector<double> full_;
};

/// One-node contribution c_k(x) = log w_xk + sum_y tau_y logit + nu_y log1m.
double node_log_contribution(const ChainState& cs, const NeighborCounts& nc, int k, int x);

/// Label-only sweeps at frozen continuous parameters.
void gibbs_label_sweep(ChainState& cs, Rng& rng);
void collapsed_label_sweep(ChainState& cs, Rng& rng);

/// Relabels communities 0, 1, ... by decreasing size (ties: first node seen).
/// The partition is unchanged.
std::vector<int> canonical_labels(std::span<const int> labels);

/// Single-network DP-SBM fit (collapsed sampler, one class) used as the
/// warm start. Returns the highest-density labeling visited, in canonical
/// order, so labels of separately fitted networks are comparable.
LabelVector dpsbm_init(const Adjacency& A, const Hyper& h, Rng& rng, int iterations = 100);

/// Initial state per options: warm start or random labels, continuous
/// parameters drawn from their conditionals.
ChainState initialize_chain(const NetworkCollection& data, const Hyper& h,
                            const ChainOptions& opts, Rng& rng);

/// One full iteration in the order defined for `kind`.
void step(SamplerKind kind, ChainState& cs, Rng& rng);

/// Log density tracked for `kind`: collapsed for CG, full joint otherwise.
double traced_log_density(SamplerKind kind, const ChainState& cs);

PosteriorSamples run_chain(SamplerKind kind, const NetworkCollection& data, const Hyper& h,
                           const ChainOptions& opts);

}  // namespace nsbm
