#include "doctest.h"

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <random>
#include <stdexcept>

#include "nsbm/model.hpp"
#include "nsbm/numerics.hpp"
#include "oracles.hpp"

using namespace nsbm;
using Approx = doctest::Approx;

namespace {

NetworkCollection single(int n, const std::vector<std::pair<int, int>>& edges) {
  NetworkCollection data;
  data.networks.push_back(Network{"a", Adjacency::from_edges(n, edges), std::nullopt, std::nullopt});
  return data;
}

// log of the integral over p of Bernoulli(m, mbar) times the Beta(a, b) density.
double log_block_integral(long long m, long long mbar, double a, double b) {
  boost::math::quadrature::tanh_sinh<double> integrator;
  const double lb = oracle::lbeta(a, b);
  auto f = [&](double p) {
    return std::exp(static_cast<double>(m) * std::log(p) + static_cast<double>(mbar) * std::log1p(-p) +
                    (a - 1.0) * std::log(p) + (b - 1.0) * std::log1p(-p) - lb);
  };
  return std::log(integrator.integrate(f, 0.0, 1.0));
}

}  // namespace

TEST_CASE("hyperparameters and defaults") {
  Hyper h;
  CHECK(h.alpha == 1.0);
  CHECK(h.w0 == 1.0);
  CHECK(h.pi0 == 1.0);
  CHECK(h.L == 20);
  CHECK_NOTHROW(h.validate());
  h.alpha = 0.0;
  CHECK_THROWS_AS(h.validate(), std::invalid_argument);
  h = Hyper{};
  h.K = 0;
  CHECK_THROWS_AS(h.validate(), std::invalid_argument);
  CHECK(default_class_truncation(5) == 5);
  CHECK(default_class_truncation(60) == 20);
  CHECK(default_class_truncation(0) == 1);
}

TEST_CASE("model state layout") {
  const NetworkCollection data = single(3, {{0, 1}});
  ModelState st = ModelState::blank(data, 2, 3);
  CHECK(st.z == std::vector<int>{0});
  CHECK(st.xi[0].size() == 3);
  CHECK(st.eta.size() == 18);
  CHECK(st.u_at(0, 2) == 1.0);
  CHECK(st.v[1] == 1.0);
  double total = 0.0;
  for (double w : st.w(1)) total += w;
  CHECK(total == 1.0);
  st.set_eta(1, 0, 2, 0.3);
  CHECK(st.eta_at(1, 2, 0) == 0.3);
  st.set_eta(0, 1, 1, 1.0);
  CHECK(st.eta_at(0, 1, 1) < 1.0);
  st.u[0] = 0.25;
  st.refresh_weights();
  CHECK(std::exp(st.lw(0, 0)) == Approx(0.25));
  CHECK(std::exp(st.lw(0, 1)) == Approx(0.375));

  ModelState wrong = ModelState::blank(single(4, {}), 2, 3);
  CHECK_THROWS_AS(wrong.check_against(data), std::invalid_argument);
}

TEST_CASE("network collection truth handling") {
  NetworkCollection data = single(3, {{0, 2}});
  CHECK_FALSE(data.has_z_truth());
  data.networks[0].z_true = 1;
  data.networks[0].xi_true = std::vector<int>{0, 1, 1};
  CHECK(data.has_z_truth());
  CHECK(data.z_truth() == std::vector<int>{1});
  CHECK_NOTHROW(data.validate());
  data.networks[0].xi_true = std::vector<int>{0, 1};
  CHECK_THROWS_AS(data.validate(), std::invalid_argument);
}

TEST_CASE("joint density in the degenerate single-block case") {
  const NetworkCollection data = single(2, {});
  Hyper h;
  h.K = 1;
  h.L = 1;
  ModelState st = ModelState::blank(data, 1, 1);
  st.set_eta(0, 0, 0, 0.5);
  CHECK(log_joint(st, data, h) == Approx(std::log(0.5)));
}

TEST_CASE("joint density equals pairwise evaluation") {
  std::mt19937_64 g(41);
  for (int trial = 0; trial < 200; ++trial) {
    const int K = 1 + oracle::uniform_int(g, 3);
    const int L = 1 + oracle::uniform_int(g, 4);
    oracle::Instance inst = oracle::random_instance(g, 1 + oracle::uniform_int(g, 3), 7, K, L);
    const double got = log_joint(inst.st, inst.data, inst.h);
    const double want = oracle::joint(inst.st, inst.data, inst.h);
    REQUIRE(got == Approx(want).epsilon(1e-10));
    const double cgot = collapsed_log_joint(inst.st, inst.data, inst.h);
    const double cwant = oracle::collapsed_joint(inst.st, inst.data, inst.h);
    REQUIRE(cgot == Approx(cwant).epsilon(1e-10));
  }
}

TEST_CASE("joint density under class relabeling") {
  std::mt19937_64 g(42);
  for (int trial = 0; trial < 50; ++trial) {
    oracle::Instance inst = oracle::random_instance(g, 3, 5, 3, 2);
    ModelState& a = inst.st;
    ModelState b = a;
    const std::vector<int> perm = {2, 0, 1};
    for (int j = 0; j < 3; ++j) b.z[j] = perm[a.z[j]];
    for (int k = 0; k < 3; ++k) {
      for (int x = 0; x < 2; ++x) {
        b.u[perm[k] * 2 + x] = a.u[k * 2 + x];
        for (int y = 0; y < 2; ++y) b.eta[b.eta_index(perm[k], x, y)] = a.eta_at(k, x, y);
      }
    }
    b.refresh_weights();
    // Everything except the class-weight terms (pi and the v prior) is unchanged.
    auto pi_part = [&](const ModelState& st) {
      double t = 0.0;
      for (int z : st.z) t += st.log_pi[z];
      for (int k = 0; k + 1 < st.K; ++k) {
        t += std::log(inst.h.pi0) + (inst.h.pi0 - 1.0) * std::log1p(-st.v[k]);
      }
      return t;
    };
    CHECK(log_joint(a, inst.data, inst.h) - pi_part(a) ==
          Approx(log_joint(b, inst.data, inst.h) - pi_part(b)).epsilon(1e-10));
  }
}

TEST_CASE("collapsed joint with no pair counts") {
  NetworkCollection data;
  for (int j = 0; j < 3; ++j) {
    data.networks.push_back(Network{"n" + std::to_string(j), Adjacency(1), std::nullopt, std::nullopt});
  }
  Hyper h;
  h.K = 2;
  h.L = 3;
  h.alpha = 1.7;
  h.beta = 0.6;
  ModelState st = ModelState::blank(data, 2, 3);
  const auto stats = class_block_sums(data, st.z, st.xi, 2, 3);
  CHECK(collapsed_beta_terms(stats, h) == Approx(2 * 6 * oracle::lbeta(1.7, 0.6)));
}

TEST_CASE("collapsed joint matches numerical integration over eta") {
  std::mt19937_64 g(43);
  NetworkCollection data;
  data.networks.push_back(Network{"a", oracle::random_graph(g, 3, 0.6), std::nullopt, std::nullopt});
  data.networks.push_back(Network{"b", oracle::random_graph(g, 3, 0.6), std::nullopt, std::nullopt});
  Hyper h;
  h.K = 2;
  h.L = 2;
  h.alpha = 1.5;
  h.beta = 2.5;
  ModelState st = ModelState::blank(data, 2, 2);
  st.u = {0.3, 1.0, 0.6, 1.0};
  st.v = {0.45, 1.0};
  st.refresh_weights();

  std::optional<double> offset;
  for (int code = 0; code < (1 << 8); ++code) {
    st.z = {code & 1, (code >> 1) & 1};
    for (int s = 0; s < 3; ++s) {
      st.xi[0].set(s, (code >> (2 + s)) & 1);
      st.xi[1].set(s, (code >> (5 + s)) & 1);
    }
    double quad = oracle::label_terms(st);
    for (int k = 0; k < 2; ++k) {
      const oracle::Blocks b = oracle::class_blocks(data, st, k);
      for (int x = 0; x < 2; ++x) {
        for (int y = x; y < 2; ++y) {
          quad += log_block_integral(b.edges(x, y), b.pairs(x, y) - b.edges(x, y), h.alpha, h.beta);
        }
      }
    }
    const double diff = collapsed_log_joint(st, data, h) - quad;
    if (!offset) offset = diff;
    REQUIRE(diff == Approx(*offset).epsilon(1e-8).scale(1.0));
  }
}

TEST_CASE("collapsed joint changes by Beta ratios on a node move") {
  std::mt19937_64 g(44);
  for (int trial = 0; trial < 200; ++trial) {
    oracle::Instance inst = oracle::random_instance(g, 2, 8, 2, 3);
    const int j = oracle::uniform_int(g, 2);
    const int n = inst.data.adj(j).n();
    const int s = oracle::uniform_int(g, n);
    const int k = inst.st.z[j];
    const auto before = class_block_sums(inst.data, inst.st.z, inst.st.xi, 2, 3);
    const DeltaStats d = delta_block_sums(inst.data.adj(j), inst.st.xi[j].labels(), s,
                                          oracle::uniform_int(g, 3), 3);
    double predicted = 0.0;
    for (int x = 0; x < 3; ++x) {
      for (int y = x; y < 3; ++y) {
        predicted += log_beta_ratio(static_cast<double>(before[k].edges(x, y)) + inst.h.alpha,
                                    static_cast<double>(before[k].non_edges(x, y)) + inst.h.beta,
                                    d.D(x, y), d.Delta(x, y) - d.D(x, y));
      }
    }
    auto after = before;
    apply_delta(after[k], d);
    CHECK(collapsed_beta_terms(after, inst.h) - collapsed_beta_terms(before, inst.h) ==
          Approx(predicted).epsilon(1e-8).scale(1.0));
  }
}

TEST_CASE("posterior-mean edge probabilities") {
  Hyper h;
  h.K = 1;
  h.L = 2;
  SUBCASE("no data in a block") {
    const NetworkCollection data = single(2, {});
    const std::vector<LabelVector> xi = {LabelVector({0, 0}, 2)};
    const std::vector<int> z = {0};
    const auto eta = estimate_eta(z, xi, data, h);
    CHECK(eta[1 * 2 + 1] == Approx(0.5));
  }
  SUBCASE("three of four cross pairs linked") {
    const NetworkCollection data = single(4, {{0, 2}, {0, 3}, {1, 2}});
    const std::vector<LabelVector> xi = {LabelVector({0, 0, 1, 1}, 2)};
    const std::vector<int> z = {0};
    const auto eta = estimate_eta(z, xi, data, h);
    CHECK(eta[0 * 2 + 1] == Approx(2.0 / 3.0));
    CHECK(eta[1 * 2 + 0] == Approx(2.0 / 3.0));
  }
  SUBCASE("complete graph approaches one") {
    double previous = 0.0;
    for (int n : {3, 6, 12, 24}) {
      std::vector<std::pair<int, int>> e;
      for (int s = 0; s < n; ++s) {
        for (int t = s + 1; t < n; ++t) e.emplace_back(s, t);
      }
      const NetworkCollection data = single(n, e);
      const std::vector<LabelVector> xi = {LabelVector(std::vector<int>(n, 0), 2)};
      const std::vector<int> z = {0};
      const double N = n * (n - 1) / 2.0;
      const double p = estimate_eta(z, xi, data, h)[0];
      CHECK(p == Approx((N + 1.0) / (N + 2.0)));
      CHECK(p > previous);
      previous = p;
    }
  }
}
