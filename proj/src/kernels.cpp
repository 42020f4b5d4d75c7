#include <cmath>
#include <limits>
#include <optional>

#include "nsbm/numerics.hpp"
#include "nsbm/samplers.hpp"

namespace nsbm {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// n * log w with the convention 0 * (-inf) = 0.
double count_times_log(Count n, double log_w) {
  return n == 0 ? 0.0 : static_cast<double>(n) * log_w;
}

double label_weight_term(const ChainState& cs, std::span<const Count> counts, int k) {
  const ModelState& st = cs.model();
  double total = 0.0;
  for (int x = 0; x < cs.L(); ++x) total += count_times_log(counts[x], st.lw(k, x));
  return total;
}

double bernoulli_term(const ChainState& cs, const BlockStats& stats, int k) {
  const EtaLogs& logs = cs.eta_logs();
  double total = 0.0;
  for (int x = 0; x < cs.L(); ++x) {
    for (int y = x; y < cs.L(); ++y) {
      const Count pairs = stats.pairs(x, y);
      if (pairs == 0) continue;
      total += static_cast<double>(stats.edges(x, y)) * logs.logit_at(k, x, y) +
               static_cast<double>(pairs) * logs.log1m_at(k, x, y);
    }
  }
  return total;
}

}  // namespace

// ---------------------------------------------------------------------------
// Continuous updates

BetaShape eta_conditional(const ChainState& cs, int k, int x, int y) {
  const BlockStats& st = cs.class_stats(k);
  const Hyper& h = cs.hyper();
  return {static_cast<double>(st.edges(x, y)) + h.alpha,
          static_cast<double>(st.non_edges(x, y)) + h.beta};
}

BetaShape u_conditional(const ChainState& cs, int k, int x) {
  Count above = 0;
  for (int y = x + 1; y < cs.L(); ++y) above += cs.class_label_count(k, y);
  return {static_cast<double>(cs.class_label_count(k, x)) + 1.0,
          static_cast<double>(above) + cs.hyper().w0};
}

BetaShape v_conditional(const ChainState& cs, int k) {
  Count above = 0;
  for (int r = k + 1; r < cs.K(); ++r) above += cs.class_size(r);
  return {static_cast<double>(cs.class_size(k)) + 1.0,
          static_cast<double>(above) + cs.hyper().pi0};
}

void update_eta(ChainState& cs, Rng& rng) {
  ModelState& st = cs.model();
  for (int k = 0; k < cs.K(); ++k) {
    for (int x = 0; x < cs.L(); ++x) {
      for (int y = x; y < cs.L(); ++y) {
        const BetaShape shape = eta_conditional(cs, k, x, y);
        st.set_eta(k, x, y, sample_beta(shape.a, shape.b, rng));
      }
    }
  }
  cs.refresh_eta_logs();
}

void update_u(ChainState& cs, Rng& rng) {
  ModelState& st = cs.model();
  for (int k = 0; k < cs.K(); ++k) {
    for (int x = 0; x + 1 < cs.L(); ++x) {
      const BetaShape shape = u_conditional(cs, k, x);
      st.u[static_cast<std::size_t>(k) * cs.L() + x] = sample_beta(shape.a, shape.b, rng);
    }
  }
  st.refresh_weights();
}

void update_v(ChainState& cs, Rng& rng) {
  ModelState& st = cs.model();
  for (int k = 0; k + 1 < cs.K(); ++k) {
    const BetaShape shape = v_conditional(cs, k);
    st.v[k] = sample_beta(shape.a, shape.b, rng);
  }
  st.refresh_weights();
}

// ---------------------------------------------------------------------------
// Gibbs label kernels

double node_log_contribution(const ChainState& cs, const NeighborCounts& nc, int k, int x) {
  const double lw = cs.model().lw(k, x);
  if (lw == kNegInf) return kNegInf;
  const EtaLogs& logs = cs.eta_logs();
  double total = lw;
  for (int y = 0; y < cs.L(); ++y) {
    if (nc.nu[y] == 0) continue;
    total += static_cast<double>(nc.tau[y]) * logs.logit_at(k, x, y) +
             static_cast<double>(nc.nu[y]) * logs.log1m_at(k, x, y);
  }
  return total;
}

std::vector<double> xi_gibbs_logits(const ChainState& cs, int j, int s) {
  const int k = cs.model().z[j];
  const NeighborCounts nc = cs.neighbors(j, s);
  std::vector<double> logits(cs.L());
  for (int x = 0; x < cs.L(); ++x) logits[x] = node_log_contribution(cs, nc, k, x);
  return logits;
}

void update_xi_gibbs(ChainState& cs, Rng& rng) {
  for (int j = 0; j < cs.J(); ++j) {
    const int n = cs.data().adj(j).n();
    for (int s = 0; s < n; ++s) {
      const auto logits = xi_gibbs_logits(cs, j, s);
      cs.set_xi(j, s, sample_categorical_logits(logits, rng));
    }
  }
}

std::vector<double> z_gibbs_logits(const ChainState& cs, int j) {
  const ModelState& st = cs.model();
  const auto& counts = cs.network_label_counts(j);
  std::vector<double> logits(cs.K());
  for (int r = 0; r < cs.K(); ++r) {
    const double labels = label_weight_term(cs, counts, r);
    logits[r] = labels == kNegInf
                    ? kNegInf
                    : st.log_pi[r] + labels + bernoulli_term(cs, cs.network_stats(j), r);
  }
  return logits;
}

void update_z_gibbs(ChainState& cs, Rng& rng) {
  // Every z_j is drawn from the same pre-update state; the conditional of
  // z_j does not involve the other class labels.
  std::vector<int> next(cs.J());
  for (int j = 0; j < cs.J(); ++j) {
    next[j] = sample_categorical_logits(z_gibbs_logits(cs, j), rng);
  }
  cs.model().z = std::move(next);
  cs.rebuild_class_aggregates();
}

// ---------------------------------------------------------------------------
// Collapsed label kernels

std::vector<double> xi_collapsed_logits(const ChainState& cs, int j, int s) {
  const ModelState& st = cs.model();
  const Hyper& h = cs.hyper();
  const int L = cs.L();
  const int k = st.z[j];
  const int from = st.xi[j][s];
  const BlockStats& agg = cs.class_stats(k);
  const NeighborCounts nc = cs.neighbors(j, s);

  // Change of m and N at (a, b) when s moves from `from` to `to`:
  // D = delta tau^T + tau delta^T with the diagonal halved (likewise for nu).
  auto log_ratio_for = [&](int to) {
    auto log_f = [&](int a, int b) {
      const int da = (a == to) - (a == from);
      const int db = (b == to) - (b == from);
      Count d_edges;
      Count d_pairs;
      if (a == b) {
        d_edges = da * nc.tau[a];
        d_pairs = da * nc.nu[a];
      } else {
        d_edges = da * nc.tau[b] + db * nc.tau[a];
        d_pairs = da * nc.nu[b] + db * nc.nu[a];
      }
      if (d_edges == 0 && d_pairs == 0) return 0.0;
      return log_beta_ratio(static_cast<double>(agg.edges(a, b)) + h.alpha,
                            static_cast<double>(agg.non_edges(a, b)) + h.beta, d_edges,
                            d_pairs - d_edges);
    };
    return sym_prod_logs(L, from, to, log_f);
  };

  std::vector<double> logits(L);
  // Communities with no members anywhere in class k all see zero counts,
  // so their Beta ratio is shared.
  std::optional<double> empty_ratio;
  for (int x = 0; x < L; ++x) {
    const double lw = st.lw(k, x);
    if (lw == kNegInf) {
      logits[x] = kNegInf;
      continue;
    }
    if (x == from) {
      logits[x] = lw;
      continue;
    }
    double ratio;
    if (cs.class_label_count(k, x) == 0) {
      if (!empty_ratio) empty_ratio = log_ratio_for(x);
      ratio = *empty_ratio;
    } else {
      ratio = log_ratio_for(x);
    }
    logits[x] = lw + ratio;
  }
  return logits;
}

void update_xi_collapsed(ChainState& cs, Rng& rng) {
  for (int j = 0; j < cs.J(); ++j) {
    const int n = cs.data().adj(j).n();
    for (int s = 0; s < n; ++s) {
      const auto logits = xi_collapsed_logits(cs, j, s);
      cs.set_xi(j, s, sample_categorical_logits(logits, rng));
    }
  }
}

std::vector<double> z_collapsed_logits(const ChainState& cs, int j) {
  const ModelState& st = cs.model();
  const Hyper& h = cs.hyper();
  const int L = cs.L();
  const int r0 = st.z[j];
  const BlockStats& net = cs.network_stats(j);

  struct Entry {
    int x, y;
    Count edges, non_edges;
  };
  std::vector<Entry> entries;
  for (int x = 0; x < L; ++x) {
    for (int y = x; y < L; ++y) {
      if (net.pairs(x, y) > 0) entries.push_back({x, y, net.edges(x, y), net.non_edges(x, y)});
    }
  }

  // Ratio of Beta products for class k when the network's counts are added
  // (sign = +1) or removed (sign = -1).
  auto shifted = [&](int k, Count sign) {
    const BlockStats& q = cs.class_stats(k);
    double total = 0.0;
    for (const Entry& e : entries) {
      total += log_beta_ratio(static_cast<double>(q.edges(e.x, e.y)) + h.alpha,
                              static_cast<double>(q.non_edges(e.x, e.y)) + h.beta,
                              sign * e.edges, sign * e.non_edges);
    }
    return total;
  };

  // kappa: leaving r0 changes class r0 identically for every r != r0.
  const double kappa = cs.K() > 1 ? shifted(r0, -1) : 0.0;
  std::optional<double> empty_gain;
  const auto& counts = cs.network_label_counts(j);

  std::vector<double> logits(cs.K());
  for (int r = 0; r < cs.K(); ++r) {
    const double labels = label_weight_term(cs, counts, r);
    if (labels == kNegInf || st.log_pi[r] == kNegInf) {
      logits[r] = kNegInf;
      continue;
    }
    double value = st.log_pi[r] + labels;
    if (r != r0) {
      double gain;
      if (cs.class_size(r) == 0) {
        if (!empty_gain) empty_gain = shifted(r, 1);
        gain = *empty_gain;
      } else {
        gain = shifted(r, 1);
      }
      value += kappa + gain;
    }
    logits[r] = value;
  }
  return logits;
}

void update_z_collapsed(ChainState& cs, Rng& rng) {
  for (int j = 0; j < cs.J(); ++j) {
    cs.set_z(j, sample_categorical_logits(z_collapsed_logits(cs, j), rng));
  }
}

// ---------------------------------------------------------------------------
// Blocked kernel: xi given (eta, w, pi) with z_j summed out

double network_log_weight(const ChainState& cs, int j, int k) {
  const double labels = label_weight_term(cs, cs.network_label_counts(j), k);
  if (labels == kNegInf) return kNegInf;
  return labels + bernoulli_term(cs, cs.network_stats(j), k);
}

double remainder_log_weight(const ChainState& cs, int j, int s, int k) {
  const int from = cs.model().xi[j][s];
  const NeighborCounts nc = cs.neighbors(j, s);
  // Statistics of network j with node s deleted.
  BlockStats rest = cs.network_stats(j);
  for (int y = 0; y < cs.L(); ++y) rest.add(from, y, -nc.tau[y], -nc.nu[y]);
  std::vector<Count> counts = cs.network_label_counts(j);
  --counts[from];
  const double labels = label_weight_term(cs, counts, k);
  if (labels == kNegInf) return kNegInf;
  return labels + bernoulli_term(cs, rest, k);
}

void MarginalWeightCache::begin_network(const ChainState& cs, int j) {
  j_ = j;
  full_.assign(cs.K(), 0.0);
  for (int k = 0; k < cs.K(); ++k) full_[k] = network_log_weight(cs, j, k);
}

double MarginalWeightCache::remainder(const ChainState& cs, int s, int k,
                                      double contribution) const {
  if (std::isfinite(contribution) && std::isfinite(full_[k])) return full_[k] - contribution;
  return remainder_log_weight(cs, j_, s, k);
}

namespace {

std::vector<double> marginal_logits(const ChainState& cs, const std::vector<double>& contrib,
                                    const std::vector<double>& remainders) {
  const int K = cs.K();
  const int L = cs.L();
  const ModelState& st = cs.model();
  std::vector<double> logits(L);
  std::vector<double> terms(K);
  for (int x = 0; x < L; ++x) {
    for (int k = 0; k < K; ++k) {
      const double c = contrib[static_cast<std::size_t>(k) * L + x];
      terms[k] = (c == kNegInf || remainders[k] == kNegInf || st.log_pi[k] == kNegInf)
                     ? kNegInf
                     : st.log_pi[k] + c + remainders[k];
    }
    logits[x] = log_sum_exp(terms);
  }
  return logits;
}

std::vector<double> all_contributions(const ChainState& cs, const NeighborCounts& nc) {
  std::vector<double> contrib(static_cast<std::size_t>(cs.K()) * cs.L());
  for (int k = 0; k < cs.K(); ++k) {
    for (int x = 0; x < cs.L(); ++x) {
      contrib[static_cast<std::size_t>(k) * cs.L() + x] = node_log_contribution(cs, nc, k, x);
    }
  }
  return contrib;
}

}  // namespace

std::vector<double> xi_marginal_logits(const ChainState& cs, int j, int s) {
  const NeighborCounts nc = cs.neighbors(j, s);
  const auto contrib = all_contributions(cs, nc);
  std::vector<double> remainders(cs.K());
  for (int k = 0; k < cs.K(); ++k) remainders[k] = remainder_log_weight(cs, j, s, k);
  return marginal_logits(cs, contrib, remainders);
}

void update_xi_marginal_z(ChainState& cs, Rng& rng) {
  MarginalWeightCache cache;
  const int L = cs.L();
  std::vector<double> remainders(cs.K());
  for (int j = 0; j < cs.J(); ++j) {
    cache.begin_network(cs, j);
    const int n = cs.data().adj(j).n();
    for (int s = 0; s < n; ++s) {
      const int from = cs.model().xi[j][s];
      const NeighborCounts nc = cs.neighbors(j, s);
      const auto contrib = all_contributions(cs, nc);
      for (int k = 0; k < cs.K(); ++k) {
        remainders[k] = cache.remainder(cs, s, k, contrib[static_cast<std::size_t>(k) * L + from]);
      }
      const int x = sample_categorical_logits(marginal_logits(cs, contrib, remainders), rng);
      cs.set_xi(j, s, x);
      for (int k = 0; k < cs.K(); ++k) {
        cache.commit(k, remainders[k], contrib[static_cast<std::size_t>(k) * L + x]);
      }
    }
  }
}

// ---------------------------------------------------------------------------

void gibbs_label_sweep(ChainState& cs, Rng& rng) {
  update_xi_gibbs(cs, rng);
  update_z_gibbs(cs, rng);
}

void collapsed_label_sweep(ChainState& cs, Rng& rng) {
  update_xi_collapsed(cs, rng);
  update_z_collapsed(cs, rng);
}

}  // namespace nsbm
