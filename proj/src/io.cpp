#include "nsbm/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace nsbm {

using nlohmann::json;

namespace {

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw InputError("cannot open '" + path.string() + "'");
  return is;
}

bool blank(const std::string& line) {
  return std::all_of(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); });
}

std::vector<int> int_array(const json& j, const char* what) {
  if (!j.is_array()) throw InputError(std::string(what) + " must be an array");
  std::vector<int> out;
  for (const auto& v : j) {
    if (!v.is_number_integer()) throw InputError(std::string(what) + " must hold integers");
    out.push_back(v.get<int>());
  }
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string network_to_json_line(const Network& net) {
  json j;
  j["id"] = net.id;
  j["n"] = net.adj.n();
  json edges = json::array();
  for (auto [s, t] : net.adj.edge_list()) edges.push_back({s, t});
  j["edges"] = std::move(edges);
  j["z_true"] = net.z_true ? json(*net.z_true) : json(nullptr);
  j["xi_true"] = net.xi_true ? json(*net.xi_true) : json(nullptr);
  return j.dump();
}

void write_networks(std::ostream& os, const NetworkCollection& data) {
  for (const auto& net : data.networks) os << network_to_json_line(net) << '\n';
}

NetworkCollection read_networks(std::istream& is) {
  NetworkCollection data;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (blank(line)) continue;
    try {
      const json j = json::parse(line);
      Network net;
      net.id = j.contains("id") && j["id"].is_string() ? j["id"].get<std::string>()
                                                        : "net" + std::to_string(data.size());
      const int n = j.at("n").get<int>();
      if (n < 0) throw InputError("negative n");
      std::vector<std::pair<int, int>> edges;
      for (const auto& e : j.at("edges")) {
        if (!e.is_array() || e.size() != 2) throw InputError("edge must be a pair");
        edges.emplace_back(e[0].get<int>(), e[1].get<int>());
      }
      net.adj = Adjacency::from_edges(n, edges);
      if (j.contains("z_true") && !j["z_true"].is_null()) net.z_true = j["z_true"].get<int>();
      if (j.contains("xi_true") && !j["xi_true"].is_null()) {
        net.xi_true = int_array(j["xi_true"], "xi_true");
      }
      data.networks.push_back(std::move(net));
    } catch (const InputError& e) {
      throw InputError("line " + std::to_string(lineno) + ": " + e.what());
    } catch (const std::exception& e) {
      throw InputError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  try {
    data.validate();
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  return data;
}

NetworkCollection read_networks_file(const std::filesystem::path& path) {
  auto is = open_input(path);
  return read_networks(is);
}

NetworkCollection read_edgelist_dir(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw InputError("'" + dir.string() + "' is not a directory");
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file()) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  NetworkCollection data;
  for (const auto& file : files) {
    auto is = open_input(file);
    std::vector<std::pair<int, int>> edges;
    int n = 0;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
      ++lineno;
      if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
      if (blank(line)) continue;
      std::istringstream ls(line);
      int s = -1;
      int t = -1;
      if (!(ls >> s >> t) || s < 0 || t < 0) {
        throw InputError(file.string() + ":" + std::to_string(lineno) + ": expected 's t'");
      }
      if (s == t) continue;  // self-loops carry no information here
      n = std::max({n, s + 1, t + 1});
      edges.emplace_back(s, t);
    }
    data.networks.push_back(
        Network{file.stem().string(), Adjacency::from_edges(n, edges), std::nullopt, std::nullopt});
  }
  if (data.networks.empty()) throw InputError("no edge-list files in '" + dir.string() + "'");
  return data;
}

std::string draw_to_json_line(const Draw& d, int replicate) {
  json j;
  if (replicate >= 0) j["replicate"] = replicate;
  j["iter"] = d.iter;
  j["z"] = d.z;
  j["xi"] = d.xi;
  return j.dump();
}

std::vector<Draw> read_draws(std::istream& is) {
  std::vector<Draw> draws;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (blank(line)) continue;
    try {
      const json j = json::parse(line);
      Draw d;
      d.iter = j.at("iter").get<int>();
      d.z = int_array(j.at("z"), "z");
      for (const auto& row : j.at("xi")) d.xi.push_back(int_array(row, "xi"));
      if (!draws.empty() && (d.z.size() != draws.front().z.size() ||
                             d.xi.size() != draws.front().xi.size())) {
        throw InputError("draw shape differs from the first draw");
      }
      draws.push_back(std::move(d));
    } catch (const std::exception& e) {
      throw InputError("samples line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return draws;
}

std::vector<Draw> read_draws_file(const std::filesystem::path& path) {
  auto is = open_input(path);
  return read_draws(is);
}

std::string trace_header(bool with_truth, bool with_replicate) {
  std::string h = with_replicate ? "replicate," : "";
  h += "iter,log_density,occupied_classes,mean_occupied_communities";
  if (with_truth) h += ",z_nmi,xi_nmi";
  h += ",elapsed_ms";
  return h;
}

std::string trace_row_csv(const TraceRow& row, bool with_truth, int replicate) {
  std::string out = replicate >= 0 ? std::to_string(replicate) + "," : "";
  out += std::to_string(row.iter) + "," + format_double(row.log_density) + "," +
         std::to_string(row.occupied_classes) + "," + format_double(row.mean_occupied_communities);
  if (with_truth) {
    out += "," + (row.z_nmi ? format_double(*row.z_nmi) : std::string());
    out += "," + (row.xi_nmi ? format_double(*row.xi_nmi) : std::string());
  }
  out += "," + format_double(row.elapsed_ms);
  return out;
}

std::string labels_to_json(const LabelEstimate& est) {
  json j;
  j["run_id"] = est.run_id;
  j["z"] = est.z;
  j["xi"] = est.xi;
  return j.dump();
}

LabelEstimate read_labels_file(const std::filesystem::path& path) {
  auto is = open_input(path);
  try {
    const json j = json::parse(is);
    LabelEstimate est;
    est.run_id = j.value("run_id", path.stem().string());
    est.z = int_array(j.at("z"), "z");
    for (const auto& row : j.at("xi")) est.xi.push_back(int_array(row, "xi"));
    return est;
  } catch (const InputError&) {
    throw;
  } catch (const std::exception& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

SimRequest read_sim_config(const std::filesystem::path& path) {
  auto is = open_input(path);
  SimRequest req;
  try {
    const json j = json::parse(is);
    if (!j.is_object()) throw InputError("config must be a JSON object");
    req.generator = j.value("generator", std::string("sbm"));
    SimConfig& c = req.sbm;
    if (req.generator == "personality") {
      req.per_school = j.value("per_school", 40);
      c.n_min = j.value("n_min", 20);
      c.n_max = j.value("n_max", 100);
      if (req.per_school < 1 || c.n_min < 1 || c.n_max < c.n_min) {
        throw InputError("invalid personality benchmark settings");
      }
      return req;
    }
    if (req.generator != "sbm") throw InputError("unknown generator '" + req.generator + "'");
    c.J = j.value("J", c.J);
    if (j.contains("n")) {
      c.n_min = c.n_max = j["n"].get<int>();
    } else {
      c.n_min = j.value("n_min", c.n_min);
      c.n_max = j.value("n_max", c.n_max);
    }
    c.K = j.value("K", c.K);
    if (j.contains("L")) {
      c.L = j["L"].is_array() ? int_array(j["L"], "L") : std::vector<int>(c.K, j["L"].get<int>());
    }
    c.gamma = j.value("gamma", c.gamma);
    c.lambda = j.value("lambda", c.lambda);
    c.tau = j.value("tau", c.tau);
    c.even = j.value("even", c.even);
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    c.validate();
  } catch (const InputError&) {
    throw;
  } catch (const std::exception& e) {
    throw InputError(path.string() + ": " + e.what());
  }
  return req;
}

}  // namespace nsbm
