#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "janus/graph.hpp"
#include "janus/trainer.hpp"

// Dataset bundles, checkpoints, manifests and the flat key-value config
// format used by the CLI.

namespace janus::io {

namespace fs = std::filesystem;

// FNV-1a 64-bit content digest, hex-encoded.
std::string digest_file(const fs::path& path);

using KvMap = std::map<std::string, std::string>;
void write_kv(const fs::path& path, const std::vector<std::pair<std::string, std::string>>& kv);
KvMap read_kv(const fs::path& path);

// ---- dataset bundle ---------------------------------------------------
// Layout: graph.edges, features.bin (row-major f64 LE), views.bin,
// labels.txt (when labeled), manifest.txt.

struct Bundle {
    graph::Graph graph;
    graph::NodeViews views;
    int d_rw = 0;
    int max_deg = 0;
    bool labeled = false;
};

void write_bundle(const fs::path& dir, const graph::Graph& g,
                  const graph::NodeViews& views, int d_rw, int max_deg,
                  const std::vector<std::pair<std::string, std::string>>& extra_manifest = {});
Bundle read_bundle(const fs::path& dir);

// ---- checkpoint -------------------------------------------------------
// Directory with manifest.txt (shapes, config, seed) plus one raw f64
// buffer per parameter tensor, row-major.

void write_checkpoint(const fs::path& dir, const train::TrainedModel& tm);
train::TrainedModel read_checkpoint(const fs::path& dir, const graph::Graph& g);

// ---- scores and metrics ----------------------------------------------

// One "node_id<TAB>score" line per node, 17 significant digits.
void write_scores(const fs::path& path, const Eigen::VectorXd& scores);
Eigen::VectorXd read_scores(const fs::path& path);

void write_cg_curve(const fs::path& path,
                    const std::vector<std::pair<double, double>>& curve);

// ---- config files -----------------------------------------------------

// Parses "key = value" lines into cfg; throws with field-level messages.
void apply_config_entry(train::TrainConfig& cfg, const std::string& key,
                        const std::string& value);
void load_config_file(train::TrainConfig& cfg, const fs::path& path);

std::vector<std::pair<std::string, std::string>> config_snapshot(const train::TrainConfig& cfg);

}  // namespace janus::io
