#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "janus/tensor.hpp"

namespace janus::graph {

using ad::CsrMatrix;
using ad::Mat;

// Immutable undirected graph.  Self-loops are never stored; operators add
// them via A + I.  Isolated nodes are retained.
struct Graph {
    int n = 0;
    std::vector<std::vector<int>> adj;  // sorted neighbor lists, no self-loops
    Mat X;                              // n x d node features
    std::optional<std::vector<int>> labels;  // 0/1 per node

    int degree(int i) const { return static_cast<int>(adj[i].size()); }
    long num_edges() const;

    static Graph from_edges(int n, const std::vector<std::pair<int, int>>& edges,
                            Mat features,
                            std::optional<std::vector<int>> labels = std::nullopt);
};

struct NodeViews {
    Mat Xs;  // original features
    Mat Xg;  // [rw_features || degree_onehot]
};

struct NeighborBatch {
    std::vector<int> seed_nodes;             // positions 0..seeds-1 in `nodes`
    std::vector<int> nodes;                  // induced subgraph node ids
    std::shared_ptr<CsrMatrix> sampled_adjacency;  // normalized, over `nodes`
    std::vector<int> layer_fanouts;
};

// D^{-1/2} (A + I) D^{-1/2} with D the degree matrix of A + I.
std::shared_ptr<CsrMatrix> normalized_adjacency(const Graph& g);

// Row i = diagonal return probabilities [T_ii, (T^2)_ii, ..., (T^p)_ii]
// for the column-stochastic T = (A + I) D^{-1}.
Mat rw_features(const Graph& g, int d_rw);

// Row i one-hot at min(deg_i, max_deg), width max_deg + 1.
Mat degree_onehot(const Graph& g, int max_deg);

NodeViews build_views(const Graph& g, int d_rw, int max_deg);

// Dataset-level default for max_deg: the 95th-percentile degree (>= 1).
int default_max_deg(const Graph& g);

// Node-induced subgraph; node i of the result is nodes[i].  Features and
// labels are carried over.
Graph induced_subgraph(const Graph& g, const std::vector<int>& nodes);

// GraphSAGE-style uniform sampling without replacement, layer by layer.
// Deterministic for a fixed rng_seed.
NeighborBatch sample_neighborhood(const Graph& g, const std::vector<int>& seeds,
                                  const std::vector<int>& fanouts,
                                  std::uint64_t rng_seed);

// ---- text ingestion ---------------------------------------------------
// Edge list: one "u v" pair per line, 0-based ids, '#' comments ignored.
// Features: CSV, n rows, no header.  Labels: one 0/1 per line.
std::vector<std::pair<int, int>> read_edge_list(const std::string& path, int& max_id);
Mat read_feature_csv(const std::string& path);
std::vector<int> read_label_file(const std::string& path);

}  // namespace janus::graph
