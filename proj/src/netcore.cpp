#include "nsbm/netcore.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace nsbm {

namespace {

void check_labels(std::span<const int> xi, int L) {
  if (L < 1) throw std::invalid_argument("label bound must be >= 1");
  for (int x : xi) {
    if (x < 0 || x >= L) {
      throw std::out_of_range("label " + std::to_string(x) + " outside [0, " + std::to_string(L) +
                              ")");
    }
  }
}

void check_node(const Adjacency& A, int s) {
  if (s < 0 || s >= A.n()) throw std::out_of_range("node index out of range");
}

}  // namespace

Adjacency::Adjacency(int n) {
  if (n < 0) throw std::invalid_argument("negative node count");
  rows_.resize(n);
}

std::uint64_t Adjacency::key(int s, int t) {
  if (s > t) std::swap(s, t);
  return (static_cast<std::uint64_t>(s) << 32) | static_cast<std::uint32_t>(t);
}

Adjacency Adjacency::from_edges(int n, std::span<const std::pair<int, int>> edges) {
  Adjacency A(n);
  for (auto [s, t] : edges) {
    if (s < 0 || t < 0 || s >= n || t >= n) {
      throw std::invalid_argument("edge endpoint out of range");
    }
    if (s == t) throw std::invalid_argument("self-loops are not supported");
    if (!A.keys_.insert(key(s, t)).second) continue;
    A.rows_[s].push_back(t);
    A.rows_[t].push_back(s);
    ++A.edge_count_;
  }
  for (auto& row : A.rows_) std::sort(row.begin(), row.end());
  return A;
}

bool Adjacency::has_edge(int s, int t) const {
  if (s == t) return false;
  return keys_.count(key(s, t)) != 0;
}

std::vector<std::pair<int, int>> Adjacency::edge_list() const {
  std::vector<std::pair<int, int>> out;
  out.reserve(static_cast<std::size_t>(edge_count_));
  for (int s = 0; s < n(); ++s) {
    for (int t : rows_[s]) {
      if (s < t) out.emplace_back(s, t);
    }
  }
  return out;
}

LabelVector::LabelVector(std::vector<int> labels, int bound)
    : labels_(std::move(labels)), bound_(bound) {
  check_labels(labels_, bound_);
}

void LabelVector::set(std::size_t s, int x) {
  if (x < 0 || x >= bound_) throw std::out_of_range("label outside truncation bound");
  labels_.at(s) = x;
}

BlockStats::BlockStats(int L_) : L(L_) {
  if (L < 1) throw std::invalid_argument("BlockStats: L must be >= 1");
  m.assign(static_cast<std::size_t>(L) * L, 0);
  N.assign(static_cast<std::size_t>(L) * L, 0);
}

void BlockStats::set(int x, int y, Count e, Count p) {
  const auto xy = static_cast<std::size_t>(x) * L + y;
  const auto yx = static_cast<std::size_t>(y) * L + x;
  m[xy] = m[yx] = e;
  N[xy] = N[yx] = p;
}

void BlockStats::add(int x, int y, Count de, Count dp) {
  const auto xy = static_cast<std::size_t>(x) * L + y;
  m[xy] += de;
  N[xy] += dp;
  if (x != y) {
    const auto yx = static_cast<std::size_t>(y) * L + x;
    m[yx] += de;
    N[yx] += dp;
  }
}

void BlockStats::accumulate(const BlockStats& other, Count sign) {
  if (other.L != L) throw std::invalid_argument("BlockStats: dimension mismatch");
  for (std::size_t i = 0; i < m.size(); ++i) {
    m[i] += sign * other.m[i];
    N[i] += sign * other.N[i];
  }
}

Count BlockStats::total_edges() const {
  Count total = 0;
  for (int x = 0; x < L; ++x)
    for (int y = x; y < L; ++y) total += edges(x, y);
  return total;
}

Count BlockStats::total_pairs() const {
  Count total = 0;
  for (int x = 0; x < L; ++x)
    for (int y = x; y < L; ++y) total += pairs(x, y);
  return total;
}

Count DeltaStats::D(int x, int y) const {
  if (x == y) return delta(x) * U[x];
  return delta(x) * U[y] + delta(y) * U[x];
}

Count DeltaStats::Delta(int x, int y) const {
  if (x == y) return delta(x) * V[x];
  return delta(x) * V[y] + delta(y) * V[x];
}

std::vector<Count> DeltaStats::dense_D() const {
  std::vector<Count> out(static_cast<std::size_t>(L) * L);
  for (int x = 0; x < L; ++x)
    for (int y = 0; y < L; ++y) out[static_cast<std::size_t>(x) * L + y] = D(x, y);
  return out;
}

std::vector<Count> DeltaStats::dense_Delta() const {
  std::vector<Count> out(static_cast<std::size_t>(L) * L);
  for (int x = 0; x < L; ++x)
    for (int y = 0; y < L; ++y) out[static_cast<std::size_t>(x) * L + y] = Delta(x, y);
  return out;
}

BlockStats compute_block_sums(const Adjacency& A, std::span<const int> xi, int L) {
  if (xi.size() != static_cast<std::size_t>(A.n())) {
    throw std::invalid_argument("label vector length does not match node count");
  }
  check_labels(xi, L);
  BlockStats stats(L);
  std::vector<Count> sizes(L, 0);
  for (int x : xi) ++sizes[x];
  for (int x = 0; x < L; ++x) {
    stats.set(x, x, 0, sizes[x] * (sizes[x] - 1) / 2);
    for (int y = x + 1; y < L; ++y) stats.set(x, y, 0, sizes[x] * sizes[y]);
  }
  for (int s = 0; s < A.n(); ++s) {
    for (int t : A.neighbors(s)) {
      if (s < t) stats.add(xi[s], xi[t], 1, 0);
    }
  }
  return stats;
}

NeighborCounts neighbor_counts(const Adjacency& A, std::span<const int> xi, int s,
                               std::span<const Count> label_totals) {
  check_node(A, s);
  const int L = static_cast<int>(label_totals.size());
  NeighborCounts out{std::vector<Count>(L, 0),
                     std::vector<Count>(label_totals.begin(), label_totals.end())};
  --out.nu[xi[s]];
  for (int t : A.neighbors(s)) ++out.tau[xi[t]];
  return out;
}

NeighborCounts neighbor_counts(const Adjacency& A, std::span<const int> xi, int s, int L) {
  if (xi.size() != static_cast<std::size_t>(A.n())) {
    throw std::invalid_argument("label vector length does not match node count");
  }
  check_labels(xi, L);
  return neighbor_counts(A, xi, s, label_counts(xi, L).eq);
}

DeltaStats delta_from_counts(const NeighborCounts& counts, int from, int to) {
  DeltaStats d;
  d.L = static_cast<int>(counts.tau.size());
  if (from < 0 || from >= d.L || to < 0 || to >= d.L) {
    throw std::out_of_range("delta_from_counts: label out of range");
  }
  d.from = from;
  d.to = to;
  d.U = counts.tau;
  d.V = counts.nu;
  return d;
}

DeltaStats delta_block_sums(const Adjacency& A, std::span<const int> xi, int node, int to,
                            int L) {
  check_node(A, node);
  if (to < 0 || to >= L) throw std::out_of_range("target label out of range");
  return delta_from_counts(neighbor_counts(A, xi, node, L), xi[node], to);
}

void apply_delta(BlockStats& stats, const DeltaStats& d) {
  if (d.is_noop()) return;
  if (d.L != stats.L) throw std::invalid_argument("apply_delta: dimension mismatch");
  // Only rows/columns `from` and `to` change.
  for (int y = 0; y < stats.L; ++y) {
    stats.add(d.from, y, d.D(d.from, y), d.Delta(d.from, y));
    if (y != d.from) stats.add(d.to, y, d.D(d.to, y), d.Delta(d.to, y));
  }
}

LabelCounts label_counts(std::span<const int> xi, int L) {
  check_labels(xi, L);
  LabelCounts out{std::vector<Count>(L, 0), std::vector<Count>(L, 0)};
  for (int x : xi) ++out.eq[x];
  Count above = 0;
  for (int x = L - 1; x >= 0; --x) {
    out.gt[x] = above;
    above += out.eq[x];
  }
  return out;
}

NetworkDeltas network_move_deltas(const Adjacency& A, std::span<const int> xi, int L) {
  const BlockStats stats = compute_block_sums(A, xi, L);
  NetworkDeltas out{L, stats.m, stats.N};
  for (std::size_t i = 0; i < out.non_edges.size(); ++i) out.non_edges[i] -= stats.m[i];
  return out;
}

}  // namespace nsbm
