#pragma once

#include <span>
#include <string_view>
#include <vector>

namespace nsbm {

/// Denominator used to normalize mutual information.
enum class NmiVariant {
  Arithmetic,  // 2 I / (H(a) + H(b))
  Sqrt,        // I / sqrt(H(a) H(b))
  Max,         // I / max(H(a), H(b))
};

NmiVariant parse_nmi_variant(std::string_view name);

/// Entropies and mutual information (natural log) of two partitions.
struct PartitionInfo {
  double h_a = 0.0;
  double h_b = 0.0;
  double mutual = 0.0;
};

PartitionInfo partition_info(std::span<const int> a, std::span<const int> b);

/// Normalized mutual information in [0, 1]. Two constant partitions score 1;
/// exactly one constant partition scores 0.
double nmi(std::span<const int> a, std::span<const int> b,
           NmiVariant variant = NmiVariant::Arithmetic);

/// Variation of information H(a) + H(b) - 2 I(a, b).
double vi(std::span<const int> a, std::span<const int> b);

/// Index of the draw minimizing the mean VI to all draws (earliest on ties).
std::size_t min_vi_index(const std::vector<std::vector<int>>& draws);

/// The medoid partition under VI.
std::vector<int> summarize_min_vi(const std::vector<std::vector<int>>& draws);

double mean_xi_nmi(const std::vector<std::vector<int>>& est,
                   const std::vector<std::vector<int>>& truth,
                   NmiVariant variant = NmiVariant::Arithmetic);

}  // namespace nsbm
