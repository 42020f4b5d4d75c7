#include <algorithm>
#include <cctype>
#include <chrono>
#include <set>
#include <stdexcept>
#include <string>

#include "nsbm/metrics.hpp"
#include "nsbm/samplers.hpp"

namespace nsbm {

SamplerKind parse_sampler(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "g") return SamplerKind::G;
  if (lower == "cg") return SamplerKind::CG;
  if (lower == "bg") return SamplerKind::BG;
  if (lower == "ibg") return SamplerKind::IBG;
  throw std::invalid_argument("unknown sampler '" + std::string(name) + "' (expected g, cg, bg, ibg)");
}

std::string_view sampler_name(SamplerKind kind) {
  switch (kind) {
    case SamplerKind::G: return "g";
    case SamplerKind::CG: return "cg";
    case SamplerKind::BG: return "bg";
    case SamplerKind::IBG: return "ibg";
  }
  return "?";
}

void ChainOptions::validate() const {
  if (iterations < 0 || burn_in < 0) throw std::invalid_argument("iterations and burn-in must be >= 0");
  if (thin < 1) throw std::invalid_argument("thinning must be >= 1");
  if (iterations > 0 && burn_in >= iterations) {
    throw std::invalid_argument("burn-in must be smaller than the number of iterations");
  }
  if (warm_iterations < 0) throw std::invalid_argument("warm-start iterations must be >= 0");
}

std::vector<int> canonical_labels(std::span<const int> labels) {
  std::vector<int> size;
  std::vector<int> first;
  for (std::size_t s = 0; s < labels.size(); ++s) {
    const int x = labels[s];
    if (x >= static_cast<int>(size.size())) {
      size.resize(x + 1, 0);
      first.resize(x + 1, -1);
    }
    if (size[x]++ == 0) first[x] = static_cast<int>(s);
  }
  std::vector<int> order;
  for (int x = 0; x < static_cast<int>(size.size()); ++x) {
    if (size[x] > 0) order.push_back(x);
  }
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return size[a] != size[b] ? size[a] > size[b] : first[a] < first[b];
  });
  std::vector<int> rank(size.size(), -1);
  for (std::size_t i = 0; i < order.size(); ++i) rank[order[i]] = static_cast<int>(i);
  std::vector<int> out(labels.size());
  for (std::size_t s = 0; s < labels.size(); ++s) out[s] = rank[labels[s]];
  return out;
}

LabelVector dpsbm_init(const Adjacency& A, const Hyper& h, Rng& rng, int iterations) {
  NetworkCollection single;
  single.networks.push_back(Network{"", A, std::nullopt, std::nullopt});
  Hyper h1 = h;
  h1.K = 1;
  ModelState st = ModelState::blank(single, 1, h.L);
  const int spread = std::min(h.L, 10);
  std::vector<int> labels(A.n());
  for (int& x : labels) x = rng.uniform_int(spread);
  st.xi[0] = LabelVector(std::move(labels), h.L);
  ChainState cs(single, h1, std::move(st));
  update_u(cs, rng);
  std::vector<int> best = cs.model().xi[0].vec();
  double best_density = collapsed_log_joint_from_stats(cs.model(), cs.all_class_stats(), h1);
  for (int it = 0; it < iterations; ++it) {
    update_xi_collapsed(cs, rng);
    update_u(cs, rng);
    const double density = collapsed_log_joint_from_stats(cs.model(), cs.all_class_stats(), h1);
    if (density > best_density) {
      best_density = density;
      best = cs.model().xi[0].vec();
    }
  }
  return LabelVector(canonical_labels(best), h.L);
}

ChainState initialize_chain(const NetworkCollection& data, const Hyper& h,
                            const ChainOptions& opts, Rng& rng) {
  ModelState st = ModelState::blank(data, h.K, h.L);
  if (opts.init == InitMode::DpsbmWarm) {
    for (int j = 0; j < data.size(); ++j) {
      Rng net_rng = rng.derive(static_cast<std::uint64_t>(j));
      st.xi[j] = dpsbm_init(data.adj(j), h, net_rng, opts.warm_iterations);
      st.z[j] = j % h.K;
    }
  } else {
    const int spread = std::min(h.L, 10);
    for (int j = 0; j < data.size(); ++j) {
      std::vector<int> labels(data.adj(j).n());
      for (int& x : labels) x = rng.uniform_int(spread);
      st.xi[j] = LabelVector(std::move(labels), h.L);
      st.z[j] = rng.uniform_int(h.K);
    }
  }
  ChainState cs(data, h, std::move(st));
  update_u(cs, rng);
  update_v(cs, rng);
  update_eta(cs, rng);
  return cs;
}

void step(SamplerKind kind, ChainState& cs, Rng& rng) {
  switch (kind) {
    case SamplerKind::G:
      update_eta(cs, rng);
      update_xi_gibbs(cs, rng);
      update_z_gibbs(cs, rng);
      break;
    case SamplerKind::CG:
      update_xi_collapsed(cs, rng);
      update_z_collapsed(cs, rng);
      break;
    case SamplerKind::BG:
      update_eta(cs, rng);
      update_xi_marginal_z(cs, rng);
      update_z_gibbs(cs, rng);
      break;
    case SamplerKind::IBG:
      update_eta(cs, rng);
      update_z_gibbs(cs, rng);
      update_xi_marginal_z(cs, rng);
      break;
  }
  update_u(cs, rng);
  update_v(cs, rng);
}

double traced_log_density(SamplerKind kind, const ChainState& cs) {
  if (kind == SamplerKind::CG) {
    return collapsed_log_joint_from_stats(cs.model(), cs.all_class_stats(), cs.hyper());
  }
  return log_joint_from_stats(cs.model(), cs.all_class_stats(), cs.hyper());
}

namespace {

Draw snapshot(const ChainState& cs, int iter) {
  Draw d;
  d.iter = iter;
  d.z = cs.model().z;
  for (const auto& lv : cs.model().xi) d.xi.push_back(lv.vec());
  return d;
}

}  // namespace

PosteriorSamples run_chain(SamplerKind kind, const NetworkCollection& data, const Hyper& h,
                           const ChainOptions& opts) {
  opts.validate();
  h.validate();
  if (data.size() == 0) throw std::invalid_argument("no networks to fit");
  data.validate();

  const auto start = std::chrono::steady_clock::now();
  const Rng root(opts.seed);
  Rng init_rng = root.derive(1);
  Rng chain_rng = root.derive(2);
  ChainState cs = initialize_chain(data, h, opts, init_rng);

  const bool z_truth = opts.trace_nmi && data.has_z_truth();
  const bool xi_truth = opts.trace_nmi && data.has_xi_truth();
  const std::vector<int> z_true = z_truth ? data.z_truth() : std::vector<int>{};
  const auto xi_true = xi_truth ? data.xi_truth() : std::vector<std::vector<int>>{};

  PosteriorSamples out;
  auto record_trace = [&](int iter) {
    TraceRow row;
    row.iter = iter;
    const ModelState& st = cs.model();
    row.log_density = opts.trace_density ? traced_log_density(kind, cs) : 0.0;
    row.occupied_classes = static_cast<int>(std::set<int>(st.z.begin(), st.z.end()).size());
    double communities = 0.0;
    for (const auto& lv : st.xi) {
      communities += static_cast<double>(std::set<int>(lv.vec().begin(), lv.vec().end()).size());
    }
    row.mean_occupied_communities = communities / static_cast<double>(st.xi.size());
    if (z_truth) row.z_nmi = nmi(st.z, z_true);
    if (xi_truth) {
      std::vector<std::vector<int>> est;
      for (const auto& lv : st.xi) est.push_back(lv.vec());
      row.xi_nmi = mean_xi_nmi(est, xi_true);
    }
    row.elapsed_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    out.trace.push_back(std::move(row));
  };

  record_trace(0);
  if (opts.iterations == 0) {
    out.draws.push_back(snapshot(cs, 0));
    return out;
  }
  for (int iter = 1; iter <= opts.iterations; ++iter) {
    step(kind, cs, chain_rng);
    record_trace(iter);
    if (iter > opts.burn_in && (iter - opts.burn_in) % opts.thin == 0) {
      out.draws.push_back(snapshot(cs, iter));
    }
  }
  return out;
}

}  // namespace nsbm
