#include "nsbm/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "nsbm/numerics.hpp"

namespace nsbm {

namespace {

constexpr double kEtaFloor = 1e-12;

}  // namespace

void Hyper::validate() const {
  if (!(alpha > 0.0) || !(beta > 0.0) || !(w0 > 0.0) || !(pi0 > 0.0)) {
    throw std::invalid_argument("hyperparameters must be positive");
  }
  if (K < 1 || L < 1) throw std::invalid_argument("truncation levels must be >= 1");
}

int default_class_truncation(int J) { return std::clamp(J, 1, 20); }

bool NetworkCollection::has_z_truth() const {
  if (networks.empty()) return false;
  return std::all_of(networks.begin(), networks.end(),
                     [](const Network& n) { return n.z_true.has_value(); });
}

bool NetworkCollection::has_xi_truth() const {
  if (networks.empty()) return false;
  return std::all_of(networks.begin(), networks.end(),
                     [](const Network& n) { return n.xi_true.has_value(); });
}

std::vector<int> NetworkCollection::z_truth() const {
  std::vector<int> out;
  for (const auto& n : networks) out.push_back(n.z_true.value());
  return out;
}

std::vector<std::vector<int>> NetworkCollection::xi_truth() const {
  std::vector<std::vector<int>> out;
  for (const auto& n : networks) out.push_back(n.xi_true.value());
  return out;
}

void NetworkCollection::validate() const {
  for (const auto& net : networks) {
    if (net.xi_true && net.xi_true->size() != static_cast<std::size_t>(net.adj.n())) {
      throw std::invalid_argument("network '" + net.id + "': xi_true length " +
                                  std::to_string(net.xi_true->size()) + " != n " +
                                  std::to_string(net.adj.n()));
    }
  }
}

bool NetworkCollection::operator==(const NetworkCollection& other) const {
  if (networks.size() != other.networks.size()) return false;
  for (std::size_t j = 0; j < networks.size(); ++j) {
    const auto& a = networks[j];
    const auto& b = other.networks[j];
    if (a.id != b.id || !(a.adj == b.adj) || a.z_true != b.z_true || a.xi_true != b.xi_true) {
      return false;
    }
  }
  return true;
}

double clamp_probability(double p) { return std::clamp(p, kEtaFloor, 1.0 - kEtaFloor); }

EtaLogs EtaLogs::from(std::span<const double> eta, int K, int L) {
  EtaLogs out;
  out.K = K;
  out.L = L;
  out.logit.resize(eta.size());
  out.log1m.resize(eta.size());
  for (std::size_t i = 0; i < eta.size(); ++i) {
    const double p = clamp_probability(eta[i]);
    out.log1m[i] = std::log1p(-p);
    out.logit[i] = std::log(p) - out.log1m[i];
  }
  return out;
}

ModelState ModelState::blank(const NetworkCollection& data, int K, int L) {
  if (K < 1 || L < 1) throw std::invalid_argument("truncation levels must be >= 1");
  ModelState s;
  s.K = K;
  s.L = L;
  s.z.assign(data.size(), 0);
  for (const auto& net : data.networks) {
    s.xi.emplace_back(std::vector<int>(net.adj.n(), 0), L);
  }
  s.eta.assign(static_cast<std::size_t>(K) * L * L, 0.5);
  s.u.assign(static_cast<std::size_t>(K) * L, 0.5);
  s.v.assign(K, 0.5);
  s.refresh_weights();
  return s;
}

void ModelState::set_eta(int k, int x, int y, double p) {
  p = clamp_probability(p);
  eta[eta_index(k, x, y)] = p;
  eta[eta_index(k, y, x)] = p;
}

std::vector<double> ModelState::w(int k) const {
  return stick_break(std::span<const double>(u).subspan(static_cast<std::size_t>(k) * L, L));
}

std::vector<double> ModelState::pi() const { return stick_break(v); }

void ModelState::refresh_weights() {
  for (int k = 0; k < K; ++k) u[static_cast<std::size_t>(k) * L + (L - 1)] = 1.0;
  v[K - 1] = 1.0;
  log_w.resize(static_cast<std::size_t>(K) * L);
  for (int k = 0; k < K; ++k) {
    const auto lw_k =
        log_stick_break(std::span<const double>(u).subspan(static_cast<std::size_t>(k) * L, L));
    std::copy(lw_k.begin(), lw_k.end(), log_w.begin() + static_cast<std::ptrdiff_t>(k) * L);
  }
  log_pi = log_stick_break(v);
}

void ModelState::check_against(const NetworkCollection& data) const {
  if (z.size() != static_cast<std::size_t>(data.size()) ||
      xi.size() != static_cast<std::size_t>(data.size())) {
    throw std::invalid_argument("state network count does not match data");
  }
  for (int j = 0; j < data.size(); ++j) {
    if (z[j] < 0 || z[j] >= K) throw std::invalid_argument("class label outside [0, K)");
    if (xi[j].size() != static_cast<std::size_t>(data.adj(j).n()) || xi[j].bound() != L) {
      throw std::invalid_argument("label vector shape does not match network");
    }
  }
  if (eta.size() != static_cast<std::size_t>(K) * L * L ||
      u.size() != static_cast<std::size_t>(K) * L || v.size() != static_cast<std::size_t>(K)) {
    throw std::invalid_argument("parameter arrays do not match truncation levels");
  }
}

std::vector<BlockStats> class_block_sums(const NetworkCollection& data, std::span<const int> z,
                                         const std::vector<LabelVector>& xi, int K, int L) {
  std::vector<BlockStats> out(K, BlockStats(L));
  for (int j = 0; j < data.size(); ++j) {
    out.at(z[j]).accumulate(compute_block_sums(data.adj(j), xi[j].labels(), L), 1);
  }
  return out;
}

double label_log_prior(const ModelState& state) {
  double total = 0.0;
  for (std::size_t j = 0; j < state.z.size(); ++j) {
    const int k = state.z[j];
    total += state.log_pi[k];
    for (int x : state.xi[j].labels()) total += state.lw(k, x);
  }
  return total;
}

double stick_log_prior(const ModelState& state, const Hyper& h) {
  // Beta(1, c) density: c * (1 - p)^(c - 1)
  double total = 0.0;
  for (int k = 0; k < state.K; ++k) {
    for (int x = 0; x + 1 < state.L; ++x) {
      total += std::log(h.w0) + (h.w0 - 1.0) * std::log1p(-state.u_at(k, x));
    }
  }
  for (int k = 0; k + 1 < state.K; ++k) {
    total += std::log(h.pi0) + (h.pi0 - 1.0) * std::log1p(-state.v[k]);
  }
  return total;
}

double log_joint_from_stats(const ModelState& state, const std::vector<BlockStats>& class_stats,
                            const Hyper& h) {
  const EtaLogs logs = EtaLogs::from(state.eta, state.K, state.L);
  double total = label_log_prior(state) + stick_log_prior(state, h);
  for (int k = 0; k < state.K; ++k) {
    const BlockStats& st = class_stats[k];
    for (int x = 0; x < state.L; ++x) {
      for (int y = x; y < state.L; ++y) {
        const double p = clamp_probability(state.eta_at(k, x, y));
        total += static_cast<double>(st.edges(x, y)) * logs.logit_at(k, x, y) +
                 static_cast<double>(st.pairs(x, y)) * logs.log1m_at(k, x, y);
        total += log_beta_pdf(p, h.alpha, h.beta);
      }
    }
  }
  return total;
}

double log_joint(const ModelState& state, const NetworkCollection& data, const Hyper& h) {
  state.check_against(data);
  return log_joint_from_stats(state, class_block_sums(data, state.z, state.xi, state.K, state.L),
                              h);
}

double collapsed_beta_terms(const std::vector<BlockStats>& class_stats, const Hyper& h) {
  double total = 0.0;
  for (const BlockStats& st : class_stats) {
    for (int x = 0; x < st.L; ++x) {
      for (int y = x; y < st.L; ++y) {
        total += log_beta(static_cast<double>(st.edges(x, y)) + h.alpha,
                          static_cast<double>(st.non_edges(x, y)) + h.beta);
      }
    }
  }
  return total;
}

double collapsed_log_joint_from_stats(const ModelState& state,
                                      const std::vector<BlockStats>& class_stats,
                                      const Hyper& h) {
  return collapsed_beta_terms(class_stats, h) + label_log_prior(state);
}

double collapsed_log_joint(const ModelState& state, const NetworkCollection& data,
                           const Hyper& h) {
  state.check_against(data);
  return collapsed_log_joint_from_stats(
      state, class_block_sums(data, state.z, state.xi, state.K, state.L), h);
}

std::vector<double> estimate_eta(std::span<const int> z, const std::vector<LabelVector>& xi,
                                 const NetworkCollection& data, const Hyper& h) {
  const auto stats = class_block_sums(data, z, xi, h.K, h.L);
  std::vector<double> out(static_cast<std::size_t>(h.K) * h.L * h.L);
  for (int k = 0; k < h.K; ++k) {
    for (int x = 0; x < h.L; ++x) {
      for (int y = 0; y < h.L; ++y) {
        out[(static_cast<std::size_t>(k) * h.L + x) * h.L + y] =
            (static_cast<double>(stats[k].edges(x, y)) + h.alpha) /
            (static_cast<double>(stats[k].pairs(x, y)) + h.alpha + h.beta);
      }
    }
  }
  return out;
}

}  // namespace nsbm
