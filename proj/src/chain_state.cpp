#include <stdexcept>

#include "nsbm/samplers.hpp"

namespace nsbm {

ChainState::ChainState(const NetworkCollection& data, const Hyper& h, ModelState state)
    : data_(&data), h_(h), state_(std::move(state)) {
  h_.validate();
  if (h_.K != state_.K || h_.L != state_.L) {
    throw std::invalid_argument("ChainState: truncation mismatch between hyper and state");
  }
  state_.check_against(data);
  state_.refresh_weights();
  refresh_eta_logs();
  rebuild();
}

void ChainState::refresh_eta_logs() { logs_ = EtaLogs::from(state_.eta, state_.K, state_.L); }

NeighborCounts ChainState::neighbors(int j, int s) const {
  return neighbor_counts(data_->adj(j), state_.xi[j].labels(), s, net_counts_[j]);
}

void ChainState::set_xi(int j, int s, int x) {
  const int from = state_.xi[j][s];
  if (from == x) return;
  const DeltaStats d = delta_from_counts(neighbors(j, s), from, x);
  apply_delta(net_stats_[j], d);
  apply_delta(class_stats_[state_.z[j]], d);
  --net_counts_[j][from];
  ++net_counts_[j][x];
  const std::size_t base = static_cast<std::size_t>(state_.z[j]) * state_.L;
  --class_counts_[base + from];
  ++class_counts_[base + x];
  state_.xi[j].set(s, x);
}

void ChainState::set_z(int j, int r) {
  const int r0 = state_.z[j];
  if (r0 == r) return;
  if (r < 0 || r >= state_.K) throw std::out_of_range("class label outside [0, K)");
  class_stats_[r0].accumulate(net_stats_[j], -1);
  class_stats_[r].accumulate(net_stats_[j], 1);
  for (int x = 0; x < state_.L; ++x) {
    class_counts_[static_cast<std::size_t>(r0) * state_.L + x] -= net_counts_[j][x];
    class_counts_[static_cast<std::size_t>(r) * state_.L + x] += net_counts_[j][x];
  }
  --class_sizes_[r0];
  ++class_sizes_[r];
  state_.z[j] = r;
}

void ChainState::rebuild() {
  const int L = state_.L;
  net_stats_.clear();
  net_counts_.clear();
  for (int j = 0; j < J(); ++j) {
    net_stats_.push_back(compute_block_sums(data_->adj(j), state_.xi[j].labels(), L));
    net_counts_.push_back(label_counts(state_.xi[j].labels(), L).eq);
  }
  rebuild_class_aggregates();
}

void ChainState::rebuild_class_aggregates() {
  const int K = state_.K;
  const int L = state_.L;
  class_stats_.assign(K, BlockStats(L));
  class_counts_.assign(static_cast<std::size_t>(K) * L, 0);
  class_sizes_.assign(K, 0);
  for (int j = 0; j < J(); ++j) {
    const int k = state_.z[j];
    class_stats_[k].accumulate(net_stats_[j], 1);
    for (int x = 0; x < L; ++x) class_counts_[static_cast<std::size_t>(k) * L + x] += net_counts_[j][x];
    ++class_sizes_[k];
  }
}

bool ChainState::coherent() const {
  const int K = state_.K;
  const int L = state_.L;
  std::vector<BlockStats> cls(K, BlockStats(L));
  std::vector<Count> counts(static_cast<std::size_t>(K) * L, 0);
  for (int j = 0; j < J(); ++j) {
    const BlockStats fresh = compute_block_sums(data_->adj(j), state_.xi[j].labels(), L);
    if (!(fresh == net_stats_[j])) return false;
    const auto lc = label_counts(state_.xi[j].labels(), L).eq;
    if (lc != net_counts_[j]) return false;
    cls[state_.z[j]].accumulate(fresh, 1);
    for (int x = 0; x < L; ++x) counts[static_cast<std::size_t>(state_.z[j]) * L + x] += lc[x];
  }
  for (int k = 0; k < K; ++k) {
    if (!(cls[k] == class_stats_[k])) return false;
  }
  return counts == class_counts_;
}

}  // namespace nsbm
