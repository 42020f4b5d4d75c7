#include "nsbm/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <unordered_map>

namespace nsbm {

namespace {

// Dense relabeling in order of first appearance.
std::vector<int> compress(std::span<const int> labels, int& count) {
  std::unordered_map<int, int> ids;
  std::vector<int> out(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto [it, inserted] = ids.try_emplace(labels[i], static_cast<int>(ids.size()));
    out[i] = it->second;
  }
  count = static_cast<int>(ids.size());
  return out;
}

double entropy(const std::vector<double>& counts, double n) {
  double h = 0.0;
  for (double c : counts) {
    if (c > 0.0) h -= (c / n) * std::log(c / n);
  }
  return h;
}

}  // namespace

NmiVariant parse_nmi_variant(std::string_view name) {
  if (name == "arithmetic") return NmiVariant::Arithmetic;
  if (name == "sqrt") return NmiVariant::Sqrt;
  if (name == "max") return NmiVariant::Max;
  throw std::invalid_argument("unknown NMI variant '" + std::string(name) + "'");
}

PartitionInfo partition_info(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size()) throw std::invalid_argument("partitions differ in length");
  if (a.empty()) throw std::invalid_argument("empty partition");
  int ka = 0;
  int kb = 0;
  const auto ca = compress(a, ka);
  const auto cb = compress(b, kb);
  const double n = static_cast<double>(a.size());
  std::vector<double> na(ka, 0.0);
  std::vector<double> nb(kb, 0.0);
  std::vector<double> joint(static_cast<std::size_t>(ka) * kb, 0.0);
  for (std::size_t i = 0; i < ca.size(); ++i) {
    na[ca[i]] += 1.0;
    nb[cb[i]] += 1.0;
    joint[static_cast<std::size_t>(ca[i]) * kb + cb[i]] += 1.0;
  }
  PartitionInfo info;
  info.h_a = entropy(na, n);
  info.h_b = entropy(nb, n);
  for (int x = 0; x < ka; ++x) {
    for (int y = 0; y < kb; ++y) {
      const double c = joint[static_cast<std::size_t>(x) * kb + y];
      if (c > 0.0) info.mutual += (c / n) * std::log(c * n / (na[x] * nb[y]));
    }
  }
  info.mutual = std::max(0.0, info.mutual);
  return info;
}

double nmi(std::span<const int> a, std::span<const int> b, NmiVariant variant) {
  const PartitionInfo info = partition_info(a, b);
  constexpr double eps = 1e-15;
  const bool a_const = info.h_a < eps;
  const bool b_const = info.h_b < eps;
  if (a_const && b_const) return 1.0;
  if (a_const || b_const) return 0.0;
  double value = 0.0;
  switch (variant) {
    case NmiVariant::Arithmetic:
      value = 2.0 * info.mutual / (info.h_a + info.h_b);
      break;
    case NmiVariant::Sqrt:
      value = info.mutual / std::sqrt(info.h_a * info.h_b);
      break;
    case NmiVariant::Max:
      value = info.mutual / std::max(info.h_a, info.h_b);
      break;
  }
  return std::clamp(value, 0.0, 1.0);
}

double vi(std::span<const int> a, std::span<const int> b) {
  const PartitionInfo info = partition_info(a, b);
  return std::max(0.0, info.h_a + info.h_b - 2.0 * info.mutual);
}

std::size_t min_vi_index(const std::vector<std::vector<int>>& draws) {
  if (draws.empty()) throw std::invalid_argument("no draws to summarize");
  const std::size_t n = draws.size();
  std::vector<double> total(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = i + 1; k < n; ++k) {
      const double d = vi(draws[i], draws[k]);
      total[i] += d;
      total[k] += d;
    }
  }
  // Sums are compared with a small tolerance so ties resolve to the earliest
  // draw regardless of summation order.
  std::size_t best = 0;
  for (std::size_t i = 1; i < n; ++i) {
    if (total[i] < total[best] - 1e-9) best = i;
  }
  return best;
}

std::vector<int> summarize_min_vi(const std::vector<std::vector<int>>& draws) {
  return draws[min_vi_index(draws)];
}

double mean_xi_nmi(const std::vector<std::vector<int>>& est,
                   const std::vector<std::vector<int>>& truth, NmiVariant variant) {
  if (est.size() != truth.size() || est.empty()) {
    throw std::invalid_argument("mean_xi_nmi: network counts differ");
  }
  double total = 0.0;
  for (std::size_t j = 0; j < est.size(); ++j) total += nmi(est[j], truth[j], variant);
  return total / static_cast<double>(est.size());
}

}  // namespace nsbm
