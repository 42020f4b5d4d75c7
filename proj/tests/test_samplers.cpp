#include "doctest.h"

#include <cmath>
#include <random>
#include <set>
#include <stdexcept>

#include "nsbm/metrics.hpp"
#include "nsbm/numerics.hpp"
#include "nsbm/samplers.hpp"
#include "oracles.hpp"

using namespace nsbm;
using Approx = doctest::Approx;

namespace {

constexpr double kTol = 1e-8;

void check_all_kernels(oracle::Instance& inst) {
  const ChainState cs(inst.data, inst.h, inst.st);
  for (int j = 0; j < inst.data.size(); ++j) {
    for (int s = 0; s < inst.data.adj(j).n(); ++s) {
      REQUIRE(oracle::max_abs_diff(oracle::normalize(xi_gibbs_logits(cs, j, s)),
                                   oracle::xi_conditional(inst.st, inst, j, s, false)) < kTol);
      REQUIRE(oracle::max_abs_diff(oracle::normalize(xi_collapsed_logits(cs, j, s)),
                                   oracle::xi_conditional(inst.st, inst, j, s, true)) < kTol);
      REQUIRE(oracle::max_abs_diff(oracle::normalize(xi_marginal_logits(cs, j, s)),
                                   oracle::xi_marginal_conditional(inst.st, inst, j, s)) < kTol);
    }
    REQUIRE(oracle::max_abs_diff(oracle::normalize(z_gibbs_logits(cs, j)),
                                 oracle::z_conditional(inst.st, inst, j, false)) < kTol);
    REQUIRE(oracle::max_abs_diff(oracle::normalize(z_collapsed_logits(cs, j)),
                                 oracle::z_conditional(inst.st, inst, j, true)) < kTol);
  }
}

NetworkCollection two_cliques(int half) {
  std::vector<std::pair<int, int>> e;
  for (int base : {0, half}) {
    for (int s = 0; s < half; ++s) {
      for (int t = s + 1; t < half; ++t) e.emplace_back(base + s, base + t);
    }
  }
  NetworkCollection data;
  std::vector<int> truth(2 * half, 0);
  for (int s = half; s < 2 * half; ++s) truth[s] = 1;
  data.networks.push_back(Network{"cliques", Adjacency::from_edges(2 * half, e), 0, truth});
  return data;
}

}  // namespace

TEST_CASE("sampler names and options") {
  CHECK(parse_sampler("CG") == SamplerKind::CG);
  CHECK(parse_sampler("ibg") == SamplerKind::IBG);
  CHECK(sampler_name(SamplerKind::BG) == "bg");
  CHECK_THROWS_AS(parse_sampler("gibbs"), std::invalid_argument);
  ChainOptions opts;
  CHECK_NOTHROW(opts.validate());
  opts.thin = 0;
  CHECK_THROWS_AS(opts.validate(), std::invalid_argument);
  opts = ChainOptions{};
  opts.burn_in = opts.iterations;
  CHECK_THROWS_AS(opts.validate(), std::invalid_argument);
}

TEST_CASE("kernels match exact conditionals on tiny instances") {
  std::mt19937_64 g(51);
  for (int trial = 0; trial < 60; ++trial) {
    oracle::Instance inst = oracle::random_instance(g, 1 + oracle::uniform_int(g, 2), 4, 2, 2);
    check_all_kernels(inst);
  }
}

TEST_CASE("kernels match exact conditionals on larger truncations") {
  std::mt19937_64 g(52);
  for (int trial = 0; trial < 20; ++trial) {
    oracle::Instance inst = oracle::random_instance(g, 3, 6, 3, 4);
    check_all_kernels(inst);
  }
}

TEST_CASE("collapsed kernels with empty classes and communities") {
  std::mt19937_64 g(53);
  for (int trial = 0; trial < 20; ++trial) {
    oracle::Instance inst = oracle::random_instance(g, 2, 5, 4, 5);
    // Put everything in class 0 and communities {0, 1}: classes 1..3 and
    // communities 2..4 are empty and share cached ratios.
    for (int j = 0; j < 2; ++j) {
      inst.st.z[j] = 0;
      for (std::size_t s = 0; s < inst.st.xi[j].size(); ++s) inst.st.xi[j].set(s, oracle::uniform_int(g, 2));
    }
    check_all_kernels(inst);
  }
}

TEST_CASE("continuous conditionals match the joint") {
  std::mt19937_64 g(54);
  for (int trial = 0; trial < 30; ++trial) {
    oracle::Instance inst = oracle::random_instance(g, 3, 5, 3, 3);
    const ChainState cs(inst.data, inst.h, inst.st);
    auto check_pair = [&](auto set, BetaShape shape, double p1, double p2) {
      ModelState a = inst.st;
      ModelState b = inst.st;
      set(a, p1);
      set(b, p2);
      a.refresh_weights();
      b.refresh_weights();
      const double joint_diff = oracle::joint(a, inst.data, inst.h) - oracle::joint(b, inst.data, inst.h);
      const double pdf_diff = log_beta_pdf(p1, shape.a, shape.b) - log_beta_pdf(p2, shape.a, shape.b);
      CHECK(joint_diff == Approx(pdf_diff).epsilon(1e-9).scale(1.0));
    };
    const double p1 = oracle::uniform(g, 0.05, 0.95);
    const double p2 = oracle::uniform(g, 0.05, 0.95);
    const int k = oracle::uniform_int(g, 3);
    const int x = oracle::uniform_int(g, 3);
    const int y = oracle::uniform_int(g, 3);
    check_pair([&](ModelState& st, double p) { st.set_eta(k, x, y, p); },
               eta_conditional(cs, k, x, y), p1, p2);
    const int xu = oracle::uniform_int(g, 2);
    check_pair([&](ModelState& st, double p) { st.u[k * 3 + xu] = p; }, u_conditional(cs, k, xu),
               p1, p2);
    const int kv = oracle::uniform_int(g, 2);
    check_pair([&](ModelState& st, double p) { st.v[kv] = p; }, v_conditional(cs, kv), p1, p2);
  }
}

TEST_CASE("stick conditionals by counting") {
  NetworkCollection data;
  for (int j = 0; j < 3; ++j) data.networks.push_back(Network{"", Adjacency(3), std::nullopt, std::nullopt});
  Hyper h;
  h.K = 3;
  h.L = 3;
  ModelState st = ModelState::blank(data, 3, 3);
  st.z = {0, 0, 1};
  st.xi[0] = LabelVector({0, 0, 1}, 3);
  st.xi[1] = LabelVector({0, 1, 2}, 3);
  st.xi[2] = LabelVector({0, 0, 1}, 3);
  const ChainState cs(data, h, st);
  // Class 1 holds only network 2, labels (0, 0, 1).
  CHECK(u_conditional(cs, 1, 0).a == 3.0);
  CHECK(u_conditional(cs, 1, 0).b == 2.0);
  // Class 2 is empty: the prior.
  CHECK(u_conditional(cs, 2, 0).a == 1.0);
  CHECK(u_conditional(cs, 2, 0).b == h.w0);
  // Pooled counts of class 0: labels (0,0,1) and (0,1,2).
  CHECK(u_conditional(cs, 0, 0).a == 4.0);
  CHECK(u_conditional(cs, 0, 0).b == 4.0);
  CHECK(u_conditional(cs, 0, 1).a == 3.0);
  CHECK(u_conditional(cs, 0, 1).b == 2.0);
  CHECK(v_conditional(cs, 0).a == 3.0);
  CHECK(v_conditional(cs, 0).b == 2.0);
  CHECK(v_conditional(cs, 1).a == 2.0);
  CHECK(v_conditional(cs, 1).b == 1.0);

  ModelState all0 = st;
  all0.z = {0, 0, 0};
  const ChainState cs0(data, h, all0);
  CHECK(v_conditional(cs0, 0).a == 4.0);
  CHECK(v_conditional(cs0, 0).b == h.pi0);
}

TEST_CASE("eta draws follow the conjugate posterior") {
  std::vector<std::pair<int, int>> e;
  for (int s = 0; s < 4; ++s) {
    for (int t = s + 1; t < 4; ++t) e.emplace_back(s, t);
  }
  NetworkCollection data;
  data.networks.push_back(Network{"k4", Adjacency::from_edges(4, e), std::nullopt, std::nullopt});
  Hyper h;
  h.K = 1;
  h.L = 2;
  ChainState cs(data, h, ModelState::blank(data, 1, 2));
  const BetaShape shape = eta_conditional(cs, 0, 0, 0);
  CHECK(shape.a == 7.0);
  CHECK(shape.b == 1.0);
  const BetaShape empty = eta_conditional(cs, 0, 1, 1);
  CHECK(empty.a == 1.0);
  CHECK(empty.b == 1.0);

  Rng rng(55);
  const int n = 10000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    update_eta(cs, rng);
    sum += cs.model().eta_at(0, 0, 0);
  }
  const double mean = 7.0 / 8.0;
  const double se = std::sqrt(7.0 * 1.0 / (64.0 * 9.0) / n);
  CHECK(std::fabs(sum / n - mean) < 3.0 * se);
}

TEST_CASE("gibbs kernel symmetries") {
  std::mt19937_64 g(56);
  oracle::Instance inst = oracle::random_instance(g, 2, 5, 2, 4);
  SUBCASE("identical eta rows and uniform weights give a uniform conditional") {
    for (int x = 0; x < 4; ++x) {
      for (int y = 0; y < 4; ++y) inst.st.eta[inst.st.eta_index(inst.st.z[0], x, y)] = 0.3;
    }
    for (int x = 0; x < 4; ++x) inst.st.u[inst.st.z[0] * 4 + x] = 1.0 / (4 - x);
    inst.st.refresh_weights();
    const ChainState cs(inst.data, inst.h, inst.st);
    for (double p : oracle::normalize(xi_gibbs_logits(cs, 0, 0))) CHECK(p == Approx(0.25));
  }
  SUBCASE("a zero community weight excludes the community") {
    inst.st.u[inst.st.z[0] * 4 + 0] = 1.0;
    inst.st.refresh_weights();
    const ChainState cs(inst.data, inst.h, inst.st);
    const auto p = oracle::normalize(xi_gibbs_logits(cs, 0, 0));
    CHECK(p[0] == 1.0);
    CHECK(p[3] == 0.0);
  }
  SUBCASE("identical classes: z conditional is pi") {
    for (int x = 0; x < 4; ++x) {
      inst.st.u[4 + x] = inst.st.u[x];
      for (int y = 0; y < 4; ++y) inst.st.eta[inst.st.eta_index(1, x, y)] = inst.st.eta_at(0, x, y);
    }
    inst.st.refresh_weights();
    const ChainState cs(inst.data, inst.h, inst.st);
    const auto p = oracle::normalize(z_gibbs_logits(cs, 1));
    const auto pi = inst.st.pi();
    CHECK(p[0] == Approx(pi[0]));
    CHECK(p[1] == Approx(pi[1]));
    // and the marginal kernel reduces to the Gibbs kernel
    CHECK(oracle::max_abs_diff(oracle::normalize(xi_marginal_logits(cs, 0, 0)),
                               oracle::normalize(xi_gibbs_logits(cs, 0, 0))) < kTol);
  }
}

TEST_CASE("single class reductions") {
  std::mt19937_64 g(57);
  oracle::Instance inst = oracle::random_instance(g, 2, 6, 1, 3);
  const ChainState cs(inst.data, inst.h, inst.st);
  CHECK(z_gibbs_logits(cs, 0).size() == 1);
  CHECK(z_collapsed_logits(cs, 1).size() == 1);
  for (int s = 0; s < inst.data.adj(0).n(); ++s) {
    CHECK(oracle::max_abs_diff(oracle::normalize(xi_marginal_logits(cs, 0, s)),
                               oracle::normalize(xi_gibbs_logits(cs, 0, s))) < kTol);
  }
}

TEST_CASE("collapsed kernels at the current label and class") {
  std::mt19937_64 g(58);
  oracle::Instance inst = oracle::random_instance(g, 2, 6, 3, 3);
  const ChainState cs(inst.data, inst.h, inst.st);
  const int from = inst.st.xi[1][0];
  CHECK(xi_collapsed_logits(cs, 1, 0)[from] == inst.st.lw(inst.st.z[1], from));
  const int r0 = inst.st.z[0];
  double labels = inst.st.log_pi[r0];
  for (int x : inst.st.xi[0].vec()) labels += inst.st.lw(r0, x);
  CHECK(z_collapsed_logits(cs, 0)[r0] == Approx(labels));
}

TEST_CASE("marginal weight cache equals recomputation") {
  std::mt19937_64 g(59);
  for (int trial = 0; trial < 20; ++trial) {
    oracle::Instance inst = oracle::random_instance(g, 2, 8, 3, 3);
    ChainState cs(inst.data, inst.h, inst.st);
    Rng rng(trial);
    for (int j = 0; j < 2; ++j) {
      MarginalWeightCache cache;
      cache.begin_network(cs, j);
      for (int s = 0; s < inst.data.adj(j).n(); ++s) {
        const int from = cs.model().xi[j][s];
        const NeighborCounts nc = cs.neighbors(j, s);
        std::vector<double> rem(3);
        for (int k = 0; k < 3; ++k) {
          rem[k] = cache.remainder(cs, s, k, node_log_contribution(cs, nc, k, from));
          CHECK(rem[k] == Approx(remainder_log_weight(cs, j, s, k)).epsilon(1e-10));
        }
        const int x = rng.uniform_int(3);
        cs.set_xi(j, s, x);
        for (int k = 0; k < 3; ++k) {
          cache.commit(k, rem[k], node_log_contribution(cs, nc, k, x));
          CHECK(cache.full(k) == Approx(network_log_weight(cs, j, k)).epsilon(1e-10));
        }
      }
    }
  }
}

TEST_CASE("incremental statistics stay coherent along every sampler") {
  std::mt19937_64 g(60);
  for (SamplerKind kind : {SamplerKind::G, SamplerKind::CG, SamplerKind::BG, SamplerKind::IBG}) {
    oracle::Instance inst = oracle::random_instance(g, 4, 12, 3, 4);
    ChainState cs(inst.data, inst.h, inst.st);
    Rng rng(61);
    for (int it = 0; it < 30; ++it) {
      step(kind, cs, rng);
      REQUIRE(cs.coherent());
      for (int k = 0; k < 3; ++k) {
        REQUIRE(oracle::same_counts(oracle::class_blocks(inst.data, cs.model(), k), cs.class_stats(k)));
      }
    }
  }
}

TEST_CASE("class moves update aggregates exactly") {
  std::mt19937_64 g(62);
  oracle::Instance inst = oracle::random_instance(g, 5, 10, 3, 3);
  ChainState cs(inst.data, inst.h, inst.st);
  for (int move = 0; move < 200; ++move) {
    const int j = oracle::uniform_int(g, 5);
    if (oracle::uniform_int(g, 2) == 0) {
      cs.set_z(j, oracle::uniform_int(g, 3));
    } else {
      cs.set_xi(j, oracle::uniform_int(g, inst.data.adj(j).n()), oracle::uniform_int(g, 3));
    }
    for (int k = 0; k < 3; ++k) {
      REQUIRE(oracle::same_counts(oracle::class_blocks(inst.data, cs.model(), k), cs.class_stats(k)));
      int size = 0;
      for (int z : cs.model().z) size += z == k;
      REQUIRE(cs.class_size(k) == size);
    }
  }
  CHECK_THROWS_AS(cs.set_z(0, 3), std::out_of_range);
}

TEST_CASE("run_chain contracts") {
  std::mt19937_64 g(63);
  oracle::Instance inst = oracle::random_instance(g, 4, 15, 2, 3, false);
  for (auto& net : inst.data.networks) {
    net.z_true = 0;
    net.xi_true = std::vector<int>(net.adj.n(), 0);
  }
  ChainOptions opts;
  opts.iterations = 20;
  opts.burn_in = 10;
  opts.thin = 3;
  opts.seed = 99;
  opts.warm_iterations = 5;

  for (SamplerKind kind : {SamplerKind::G, SamplerKind::CG, SamplerKind::BG, SamplerKind::IBG}) {
    const PosteriorSamples a = run_chain(kind, inst.data, inst.h, opts);
    const PosteriorSamples b = run_chain(kind, inst.data, inst.h, opts);
    CHECK(a.draws == b.draws);
    REQUIRE(a.trace.size() == 21);
    for (std::size_t i = 0; i < a.trace.size(); ++i) {
      CHECK(a.trace[i].log_density == b.trace[i].log_density);
      CHECK(a.trace[i].z_nmi.has_value());
      CHECK(*a.trace[i].z_nmi >= 0.0);
      CHECK(*a.trace[i].z_nmi <= 1.0);
    }
    std::vector<int> iters;
    for (const Draw& d : a.draws) iters.push_back(d.iter);
    CHECK(iters == std::vector<int>{13, 16, 19});
  }

  opts.iterations = 0;
  opts.burn_in = 0;
  const PosteriorSamples init = run_chain(SamplerKind::CG, inst.data, inst.h, opts);
  REQUIRE(init.draws.size() == 1);
  CHECK(init.draws[0].iter == 0);
  CHECK(init.trace.size() == 1);

  opts.init = InitMode::Random;
  opts.iterations = 3;
  opts.burn_in = 1;
  opts.thin = 1;
  CHECK(run_chain(SamplerKind::G, inst.data, inst.h, opts).draws.size() == 2);

  NetworkCollection empty;
  CHECK_THROWS_AS(run_chain(SamplerKind::G, empty, inst.h, opts), std::invalid_argument);
}

TEST_CASE("different seeds give different chains") {
  std::mt19937_64 g(64);
  oracle::Instance inst = oracle::random_instance(g, 4, 15, 2, 3, false);
  ChainOptions opts;
  opts.iterations = 10;
  opts.burn_in = 0;
  opts.thin = 1;
  opts.seed = 1;
  const auto a = run_chain(SamplerKind::CG, inst.data, inst.h, opts);
  opts.seed = 2;
  const auto b = run_chain(SamplerKind::CG, inst.data, inst.h, opts);
  CHECK_FALSE(a.draws == b.draws);
}

TEST_CASE("canonical labels") {
  const std::vector<int> a = {3, 3, 1, 5, 1, 3};
  CHECK(canonical_labels(a) == std::vector<int>{0, 0, 1, 2, 1, 0});
  const std::vector<int> tie = {2, 0, 0, 2};
  CHECK(canonical_labels(tie) == std::vector<int>{0, 1, 1, 0});
  CHECK(nmi(canonical_labels(a), a) == 1.0);
}

TEST_CASE("warm start on planted cliques and degenerate graphs") {
  const NetworkCollection data = two_cliques(10);
  const auto truth = data.xi_truth()[0];
  Hyper h;
  int recovered = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    recovered += nmi(dpsbm_init(data.adj(0), h, rng).vec(), truth) == 1.0;
  }
  CHECK(recovered >= 19);

  Rng rng(5);
  const LabelVector one = dpsbm_init(Adjacency(1), h, rng);
  CHECK(one.size() == 1);
  CHECK(one[0] == 0);

  const LabelVector empty = dpsbm_init(Adjacency(30), h, rng);
  const std::set<int> used(empty.vec().begin(), empty.vec().end());
  CHECK(used.size() <= 10);
}
