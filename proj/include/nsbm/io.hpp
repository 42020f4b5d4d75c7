#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "nsbm/model.hpp"
#include "nsbm/simgen.hpp"

namespace nsbm {

/// Malformed or inconsistent input files.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Network files: one JSON object per line,
//   {"id": str, "n": int, "edges": [[s, t], ...], "z_true": int|null, "xi_true": [int]|null}
// with s < t, 0-based, sorted lexicographically.
std::string network_to_json_line(const Network& net);
void write_networks(std::ostream& os, const NetworkCollection& data);
NetworkCollection read_networks(std::istream& is);
NetworkCollection read_networks_file(const std::filesystem::path& path);

/// Directory of edge-list files, one network per file, one "s t" pair per
/// line ('#' starts a comment). Node count is max index + 1; files are read
/// in name order and the stem becomes the network id.
NetworkCollection read_edgelist_dir(const std::filesystem::path& dir);

// Samples: one JSON object per draw, {"iter": int, "z": [...], "xi": [[...], ...]},
// with an extra "replicate" field when several replicates share a file.
std::string draw_to_json_line(const Draw& d, int replicate = -1);
std::vector<Draw> read_draws(std::istream& is);
std::vector<Draw> read_draws_file(const std::filesystem::path& path);

/// CSV header and rows for the per-iteration trace. The z_nmi / xi_nmi
/// columns appear only when `with_truth`, the replicate column only when
/// `with_replicate`.
std::string trace_header(bool with_truth, bool with_replicate);
std::string trace_row_csv(const TraceRow& row, bool with_truth, int replicate = -1);

/// Point estimate of labels: {"run_id": str, "z": [...], "xi": [[...], ...]}.
struct LabelEstimate {
  std::string run_id;
  std::vector<int> z;
  std::vector<std::vector<int>> xi;
};
std::string labels_to_json(const LabelEstimate& est);
LabelEstimate read_labels_file(const std::filesystem::path& path);

/// Generator configuration as JSON. "n" or "n_min"/"n_max"; "generator" is
/// "sbm" (default) or "personality" (uses "per_school").
struct SimRequest {
  std::string generator = "sbm";
  SimConfig sbm;
  int per_school = 40;
};
SimRequest read_sim_config(const std::filesystem::path& path);

std::string format_double(double v);

}  // namespace nsbm
