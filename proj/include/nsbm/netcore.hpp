#pragma once

#include <cstdint>
#include <span>
#include <unordered_set>
#include <utility>
#include <vector>

namespace nsbm {

using Count = std::int64_t;

/// Undirected simple graph: symmetric, no self-loops, no multi-edges.
///
/// Rows are sorted neighbor lists for O(degree) iteration; a hash set of
/// packed (s, t) keys answers edge queries in O(1).
class Adjacency {
 public:
  Adjacency() = default;
  explicit Adjacency(int n);

  /// Builds from an unordered edge list. Duplicates are merged; self-loops
  /// and out-of-range endpoints throw std::invalid_argument.
  static Adjacency from_edges(int n, std::span<const std::pair<int, int>> edges);

  int n() const { return static_cast<int>(rows_.size()); }
  Count edge_count() const { return edge_count_; }
  std::span<const int> neighbors(int s) const { return rows_.at(s); }
  int degree(int s) const { return static_cast<int>(rows_.at(s).size()); }
  bool has_edge(int s, int t) const;

  /// Edges as (s, t) with s < t, sorted lexicographically.
  std::vector<std::pair<int, int>> edge_list() const;

  bool operator==(const Adjacency& other) const { return rows_ == other.rows_; }

 private:
  static std::uint64_t key(int s, int t);

  std::vector<std::vector<int>> rows_;
  std::unordered_set<std::uint64_t> keys_;
  Count edge_count_ = 0;
};

/// Community labels of one network, each in [0, bound).
class LabelVector {
 public:
  LabelVector() = default;
  LabelVector(std::vector<int> labels, int bound);

  int bound() const { return bound_; }
  std::size_t size() const { return labels_.size(); }
  int operator[](std::size_t s) const { return labels_[s]; }
  std::span<const int> labels() const { return labels_; }
  const std::vector<int>& vec() const { return labels_; }

  void set(std::size_t s, int x);

  bool operator==(const LabelVector&) const = default;

 private:
  std::vector<int> labels_;
  int bound_ = 1;
};

/// Edge block sums m and pair counts N over an L x L community grid.
///
/// Both matrices are stored dense and symmetric. Within-block entries count
/// unordered pairs once; a cross-block entry (x, y) counts every pair with one
/// endpoint in x and the other in y once, mirrored at (y, x).
struct BlockStats {
  int L = 0;
  std::vector<Count> m;
  std::vector<Count> N;

  BlockStats() = default;
  explicit BlockStats(int L);

  Count edges(int x, int y) const { return m[static_cast<std::size_t>(x) * L + y]; }
  Count pairs(int x, int y) const { return N[static_cast<std::size_t>(x) * L + y]; }
  Count non_edges(int x, int y) const { return pairs(x, y) - edges(x, y); }

  void set(int x, int y, Count edges, Count pairs);
  void add(int x, int y, Count d_edges, Count d_pairs);

  /// this += sign * other, elementwise.
  void accumulate(const BlockStats& other, Count sign);

  Count total_edges() const;
  Count total_pairs() const;

  bool operator==(const BlockStats&) const = default;
};

/// Neighbor counts of a node s: tau[y] edges from s into community y,
/// nu[y] nodes other than s in community y.
struct NeighborCounts {
  std::vector<Count> tau;
  std::vector<Count> nu;
};

/// Change in block sums when one node moves between communities.
///
/// Held implicitly through U (edges from the node per community) and V
/// (other nodes per community), so the full D and Delta matrices are never
/// needed: only rows `from` and `to` are nonzero.
struct DeltaStats {
  int L = 0;
  int from = 0;
  int to = 0;
  std::vector<Count> U;
  std::vector<Count> V;

  int delta(int x) const { return (x == to ? 1 : 0) - (x == from ? 1 : 0); }
  /// D = delta U^T + U delta^T with the diagonal halved.
  Count D(int x, int y) const;
  /// Same rule applied to V.
  Count Delta(int x, int y) const;

  std::vector<Count> dense_D() const;
  std::vector<Count> dense_Delta() const;
  bool is_noop() const { return from == to; }
};

/// Per-label counts: eq[x] = #{s : xi_s = x}, gt[x] = #{s : xi_s > x}.
struct LabelCounts {
  std::vector<Count> eq;
  std::vector<Count> gt;
};

/// Per-network block sums split into edges and non-edges. These are the
/// amounts moved between class aggregates when the network changes class.
struct NetworkDeltas {
  int L = 0;
  std::vector<Count> edges;
  std::vector<Count> non_edges;
};

BlockStats compute_block_sums(const Adjacency& A, std::span<const int> xi, int L);

DeltaStats delta_block_sums(const Adjacency& A, std::span<const int> xi, int node, int to, int L);

/// Same as above with U and V already known (e.g. from neighbor_counts).
DeltaStats delta_from_counts(const NeighborCounts& counts, int from, int to);

/// Applies a node move to stats in O(L).
void apply_delta(BlockStats& stats, const DeltaStats& delta);

NeighborCounts neighbor_counts(const Adjacency& A, std::span<const int> xi, int s, int L);

/// Variant using precomputed per-label node counts of the whole network.
NeighborCounts neighbor_counts(const Adjacency& A, std::span<const int> xi, int s,
                               std::span<const Count> label_totals);

LabelCounts label_counts(std::span<const int> xi, int L);

NetworkDeltas network_move_deltas(const Adjacency& A, std::span<const int> xi, int L);

}  // namespace nsbm
