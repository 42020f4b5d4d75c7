#include "nsbm/cli.hpp"

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "nsbm/io.hpp"
#include "nsbm/metrics.hpp"
#include "nsbm/samplers.hpp"
#include "nsbm/simgen.hpp"

namespace nsbm {

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::ofstream open_output(const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw InputError("cannot write '" + path + "'");
  return os;
}

/// --seed wins, then NSBM_SEED, then `fallback`.
std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag, std::uint64_t fallback) {
  if (flag) return *flag;
  if (const char* env = std::getenv("NSBM_SEED"); env != nullptr && *env != '\0') {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw UsageError("NSBM_SEED is not an unsigned integer");
    }
  }
  return fallback;
}

// ---------------------------------------------------------------------------

struct SimulateArgs {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
};

int cmd_simulate(const SimulateArgs& a, std::ostream& out, std::ostream& err) {
  SimRequest req = read_sim_config(a.config);
  const std::uint64_t seed = resolve_seed(a.seed, req.sbm.seed);
  Rng rng(seed);
  SimOutput sim = req.generator == "personality"
                      ? personality_benchmark(req.per_school, req.sbm.n_min, req.sbm.n_max, rng)
                      : gen_collection(req.sbm, rng);
  auto os = open_output(a.out);
  write_networks(os, sim.data);
  out << "wrote " << sim.data.size() << " networks to " << a.out << "\n";
  if (sim.clamped_pairs > 0) {
    err << "warning: " << sim.clamped_pairs << " scaled edge probabilities exceeded 1 and were clamped\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct FitArgs {
  std::string data;
  std::string format = "ndjson";
  std::string sampler = "cg";
  int iters = 1000;
  int burnin = 500;
  int thin = 5;
  std::optional<int> K;
  int L = 20;
  double alpha = 1.0;
  double beta = 1.0;
  double w0 = 1.0;
  double pi0 = 1.0;
  std::optional<std::uint64_t> seed;
  std::string out = "samples.ndjson";
  std::string trace = "trace.csv";
  std::string init = "warm";
  int warm_iters = 100;
  int replicates = 1;
  int parallel = 1;
  bool no_timing = false;
  std::string run_record;
};

int cmd_fit(const FitArgs& a, std::ostream& out) {
  const SamplerKind kind = parse_sampler(a.sampler);
  NetworkCollection data;
  if (a.format == "ndjson") {
    data = read_networks_file(a.data);
  } else if (a.format == "edgelist") {
    data = read_edgelist_dir(a.data);
  } else {
    throw UsageError("unknown --format '" + a.format + "'");
  }
  if (data.size() == 0) throw InputError("no networks in '" + a.data + "'");

  Hyper h;
  h.alpha = a.alpha;
  h.beta = a.beta;
  h.w0 = a.w0;
  h.pi0 = a.pi0;
  h.K = a.K.value_or(default_class_truncation(data.size()));
  h.L = a.L;
  h.validate();

  ChainOptions base;
  base.iterations = a.iters;
  base.burn_in = a.burnin;
  base.thin = a.thin;
  base.warm_iterations = a.warm_iters;
  if (a.init == "warm") {
    base.init = InitMode::DpsbmWarm;
  } else if (a.init == "random") {
    base.init = InitMode::Random;
  } else {
    throw UsageError("unknown --init '" + a.init + "' (expected warm or random)");
  }
  base.validate();
  if (a.replicates < 1 || a.parallel < 1) throw UsageError("replicates and parallel must be >= 1");

  const std::uint64_t seed = resolve_seed(a.seed, 0);
  const int R = a.replicates;
  std::vector<std::uint64_t> seeds(R);
  for (int r = 0; r < R; ++r) seeds[r] = R == 1 ? seed : Rng(seed).derive(r).seed();

  const auto start = std::chrono::steady_clock::now();
  std::vector<PosteriorSamples> results(R);
  std::vector<std::string> errors(R);
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int r = next++; r < R; r = next++) {
      ChainOptions opts = base;
      opts.seed = seeds[r];
      try {
        results[r] = run_chain(kind, data, h, opts);
      } catch (const std::exception& e) {
        errors[r] = e.what();
      }
    }
  };
  const int workers = std::min(a.parallel, R);
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (!e.empty()) throw std::runtime_error(e);
  }

  // Replicate outputs are merged in replicate order.
  const bool with_truth = data.has_z_truth() || data.has_xi_truth();
  auto samples = open_output(a.out);
  auto trace = open_output(a.trace);
  trace << trace_header(with_truth, R > 1) << '\n';
  for (int r = 0; r < R; ++r) {
    for (const Draw& d : results[r].draws) samples << draw_to_json_line(d, R > 1 ? r : -1) << '\n';
    for (TraceRow row : results[r].trace) {
      if (a.no_timing) row.elapsed_ms = 0.0;
      trace << trace_row_csv(row, with_truth, R > 1 ? r : -1) << '\n';
    }
  }

  const double elapsed =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  const std::string run_id = std::string(sampler_name(kind)) + "-s" + std::to_string(seed);
  if (!a.run_record.empty()) {
    nlohmann::json rec;
    rec["run_id"] = run_id;
    rec["sampler"] = sampler_name(kind);
    rec["hyper"] = {{"alpha", h.alpha}, {"beta", h.beta}, {"w0", h.w0},
                    {"pi0", h.pi0},     {"K", h.K},       {"L", h.L}};
    rec["seed"] = seed;
    nlohmann::json reps = nlohmann::json::array();
    for (int r = 0; r < R; ++r) {
      reps.push_back({{"id", R > 1 ? run_id + "-r" + std::to_string(r) : run_id},
                      {"seed", seeds[r]}});
    }
    rec["replicates"] = std::move(reps);
    rec["elapsed_ms"] = elapsed;
    rec["outputs"] = {{"samples", a.out}, {"trace", a.trace}};
    auto os = open_output(a.run_record);
    os << rec.dump() << '\n';
  }
  out << run_id << ": " << R << " replicate(s), samples -> " << a.out << ", trace -> " << a.trace
      << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct SummarizeArgs {
  std::string samples;
  std::string out = "labels.json";
};

int cmd_summarize(const SummarizeArgs& a, std::ostream& out) {
  const auto draws = read_draws_file(a.samples);
  if (draws.empty()) throw InputError("no draws in '" + a.samples + "'");
  LabelEstimate est;
  est.run_id = std::filesystem::path(a.samples).stem().string();
  std::vector<std::vector<int>> z_draws;
  for (const auto& d : draws) z_draws.push_back(d.z);
  est.z = summarize_min_vi(z_draws);
  const std::size_t J = draws.front().xi.size();
  for (std::size_t j = 0; j < J; ++j) {
    std::vector<std::vector<int>> xi_draws;
    for (const auto& d : draws) xi_draws.push_back(d.xi[j]);
    est.xi.push_back(summarize_min_vi(xi_draws));
  }
  auto os = open_output(a.out);
  os << labels_to_json(est) << '\n';
  out << "summarized " << draws.size() << " draws -> " << a.out << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct EvalArgs {
  std::string labels;
  std::string truth;
  std::string out = "metrics.csv";
  std::string variant = "arithmetic";
};

int cmd_eval(const EvalArgs& a, std::ostream& out) {
  const NmiVariant variant = parse_nmi_variant(a.variant);
  const LabelEstimate est = read_labels_file(a.labels);
  const NetworkCollection truth = read_networks_file(a.truth);
  if (!truth.has_z_truth() || !truth.has_xi_truth()) {
    throw InputError("truth file lacks z_true / xi_true labels");
  }
  if (est.z.size() != static_cast<std::size_t>(truth.size()) || est.xi.size() != est.z.size()) {
    throw InputError("label estimate and truth differ in network count");
  }
  const auto xi_true = truth.xi_truth();
  for (std::size_t j = 0; j < xi_true.size(); ++j) {
    if (est.xi[j].size() != xi_true[j].size()) {
      throw InputError("network " + std::to_string(j) + ": node counts differ");
    }
  }
  const double z_score = nmi(est.z, truth.z_truth(), variant);
  const double xi_score = mean_xi_nmi(est.xi, xi_true, variant);
  auto os = open_output(a.out);
  os << "run_id,z_nmi,mean_xi_nmi\n"
     << est.run_id << ',' << format_double(z_score) << ',' << format_double(xi_score) << '\n';
  out << est.run_id << ": z_nmi=" << format_double(z_score)
      << " mean_xi_nmi=" << format_double(xi_score) << "\n";
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Nested stochastic block model: simulate, fit, summarize, evaluate", "nsbm"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Generate a synthetic network collection");
  simulate->add_option("--config", sim.config, "Generator config (JSON)")->required();
  simulate->add_option("--out", sim.out, "Output network file (NDJSON)")->required();
  simulate->add_option("--seed", sim.seed, "Random seed (falls back to NSBM_SEED, then config)");

  FitArgs fit;
  auto* fitc = app.add_subcommand("fit", "Run a sampler on a network collection");
  fitc->add_option("--data", fit.data, "Network file (NDJSON) or edge-list directory")->required();
  fitc->add_option("--format", fit.format, "ndjson | edgelist")->capture_default_str();
  fitc->add_option("--sampler", fit.sampler, "g | cg | bg | ibg")->capture_default_str();
  fitc->add_option("--iters", fit.iters, "Iterations")->capture_default_str();
  fitc->add_option("--burnin", fit.burnin, "Burn-in iterations")->capture_default_str();
  fitc->add_option("--thin", fit.thin, "Keep every thin-th draw after burn-in")->capture_default_str();
  fitc->add_option("--K", fit.K, "Class truncation (default min(J, 20))");
  fitc->add_option("--L", fit.L, "Community truncation")->capture_default_str();
  fitc->add_option("--alpha", fit.alpha, "Beta prior shape for edge probabilities")->capture_default_str();
  fitc->add_option("--beta", fit.beta, "Beta prior shape for edge probabilities")->capture_default_str();
  fitc->add_option("--w0", fit.w0, "Community stick concentration")->capture_default_str();
  fitc->add_option("--pi0", fit.pi0, "Class stick concentration")->capture_default_str();
  fitc->add_option("--seed", fit.seed, "Random seed (falls back to NSBM_SEED, then 0)");
  fitc->add_option("--out", fit.out, "Samples file (NDJSON)")->capture_default_str();
  fitc->add_option("--trace", fit.trace, "Trace file (CSV)")->capture_default_str();
  fitc->add_option("--init", fit.init, "warm | random")->capture_default_str();
  fitc->add_option("--warm-iters", fit.warm_iters, "Warm-start iterations per network")->capture_default_str();
  fitc->add_option("--replicates", fit.replicates, "Independent chains with derived seeds")->capture_default_str();
  fitc->add_option("--parallel", fit.parallel, "Worker threads for replicates")->capture_default_str();
  fitc->add_flag("--no-timing", fit.no_timing, "Write elapsed_ms as 0 for byte-stable traces");
  fitc->add_option("--run-record", fit.run_record, "Write a JSON run record here");

  SummarizeArgs summ;
  auto* summarize = app.add_subcommand("summarize", "Minimum expected-VI point estimate from draws");
  summarize->add_option("--samples", summ.samples, "Samples file (NDJSON)")->required();
  summarize->add_option("--out", summ.out, "Labels file (JSON)")->capture_default_str();

  EvalArgs ev;
  auto* eval = app.add_subcommand("eval", "Score a label estimate against truth");
  eval->add_option("--labels", ev.labels, "Labels file from summarize")->required();
  eval->add_option("--truth", ev.truth, "Network file with truth labels")->required();
  eval->add_option("--out", ev.out, "Metrics file (CSV)")->capture_default_str();
  eval->add_option("--nmi-variant", ev.variant, "arithmetic | sqrt | max")->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(sim, out, err);
    if (fitc->parsed()) return cmd_fit(fit, out);
    if (summarize->parsed()) return cmd_summarize(summ, out);
    if (eval->parsed()) return cmd_eval(ev, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitUsage;
}

}  // namespace nsbm
