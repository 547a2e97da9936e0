#include "janus/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "janus/rng.hpp"

namespace janus::graph {

long Graph::num_edges() const {
    long total = 0;
    for (const auto& nb : adj) total += static_cast<long>(nb.size());
    return total / 2;
}

Graph Graph::from_edges(int n, const std::vector<std::pair<int, int>>& edges,
                        Mat features, std::optional<std::vector<int>> labels) {
    if (n <= 0) throw std::invalid_argument("Graph: node count must be positive");
    if (features.rows() != n)
        throw std::invalid_argument("Graph: feature row count != n");
    if (features.cols() < 1)
        throw std::invalid_argument("Graph: zero-dimensional features");
    if (labels && static_cast<int>(labels->size()) != n)
        throw std::invalid_argument("Graph: label count != n");

    std::vector<std::set<int>> nb(n);
    for (auto [u, v] : edges) {
        if (u < 0 || u >= n || v < 0 || v >= n)
            throw std::invalid_argument("Graph: edge endpoint out of range");
        if (u == v) continue;  // self-loops are an operator concern
        nb[u].insert(v);
        nb[v].insert(u);
    }
    Graph g;
    g.n = n;
    g.adj.reserve(n);
    for (auto& s : nb) g.adj.emplace_back(s.begin(), s.end());
    g.X = std::move(features);
    g.labels = std::move(labels);
    return g;
}

std::shared_ptr<CsrMatrix> normalized_adjacency(const Graph& g) {
    auto m = std::make_shared<CsrMatrix>();
    m->rows = m->cols = g.n;
    m->indptr.assign(g.n + 1, 0);
    std::vector<double> dinv(g.n);
    for (int i = 0; i < g.n; ++i) dinv[i] = 1.0 / std::sqrt(g.degree(i) + 1.0);
    for (int i = 0; i < g.n; ++i) {
        // row = neighbors plus the self-loop, ascending column order
        bool self_done = false;
        for (int j : g.adj[i]) {
            if (!self_done && i < j) {
                m->indices.push_back(i);
                m->values.push_back(dinv[i] * dinv[i]);
                self_done = true;
            }
            m->indices.push_back(j);
            m->values.push_back(dinv[i] * dinv[j]);
        }
        if (!self_done) {
            m->indices.push_back(i);
            m->values.push_back(dinv[i] * dinv[i]);
        }
        m->indptr[i + 1] = static_cast<int>(m->indices.size());
    }
    // restore ascending order inside each row (self-loop may be misplaced
    // when all neighbors are smaller than i)
    for (int i = 0; i < g.n; ++i) {
        int lo = m->indptr[i], hi = m->indptr[i + 1];
        std::vector<std::pair<int, double>> row;
        for (int k = lo; k < hi; ++k) row.emplace_back(m->indices[k], m->values[k]);
        std::sort(row.begin(), row.end());
        for (int k = lo; k < hi; ++k) {
            m->indices[k] = row[k - lo].first;
            m->values[k] = row[k - lo].second;
        }
    }
    return m;
}

namespace {

// Column-stochastic walk operator T = (A + I) D^{-1}, D the degree matrix
// of A + I.
CsrMatrix walk_operator(const Graph& g) {
    CsrMatrix t;
    t.rows = t.cols = g.n;
    t.indptr.assign(g.n + 1, 0);
    std::vector<double> dinv(g.n);
    for (int i = 0; i < g.n; ++i) dinv[i] = 1.0 / (g.degree(i) + 1.0);
    for (int i = 0; i < g.n; ++i) {
        std::vector<int> cols(g.adj[i]);
        cols.push_back(i);
        std::sort(cols.begin(), cols.end());
        for (int j : cols) {
            t.indices.push_back(j);
            t.values.push_back(dinv[j]);
        }
        t.indptr[i + 1] = static_cast<int>(t.indices.size());
    }
    return t;
}

}  // namespace

Mat rw_features(const Graph& g, int d_rw) {
    if (d_rw < 1) throw std::invalid_argument("rw_features: d_rw must be >= 1");
    Mat out(g.n, d_rw);
    CsrMatrix t = walk_operator(g);
    if (g.n <= 2000) {
        Mat td = t.dense();
        Mat power = td;
        for (int p = 0; p < d_rw; ++p) {
            out.col(p) = power.diagonal();
            if (p + 1 < d_rw) power = td * power;
        }
    } else {
        const int batch = 256;
        for (int start = 0; start < g.n; start += batch) {
            int b = std::min(batch, g.n - start);
            Mat v = Mat::Zero(g.n, b);
            for (int c = 0; c < b; ++c) v(start + c, c) = 1.0;
            for (int p = 0; p < d_rw; ++p) {
                v = t.multiply(v);
                for (int c = 0; c < b; ++c) out(start + c, p) = v(start + c, c);
            }
        }
    }
    return out;
}

Mat degree_onehot(const Graph& g, int max_deg) {
    if (max_deg < 1) throw std::invalid_argument("degree_onehot: max_deg must be >= 1");
    Mat out = Mat::Zero(g.n, max_deg + 1);
    for (int i = 0; i < g.n; ++i)
        out(i, std::min(g.degree(i), max_deg)) = 1.0;
    return out;
}

NodeViews build_views(const Graph& g, int d_rw, int max_deg) {
    if (g.X.cols() < 1)
        throw std::invalid_argument("build_views: graph has zero-dimensional features");
    NodeViews v;
    v.Xs = g.X;
    Mat rw = rw_features(g, d_rw);
    Mat oh = degree_onehot(g, max_deg);
    v.Xg.resize(g.n, rw.cols() + oh.cols());
    v.Xg << rw, oh;
    return v;
}

int default_max_deg(const Graph& g) {
    std::vector<int> degs(g.n);
    for (int i = 0; i < g.n; ++i) degs[i] = g.degree(i);
    std::sort(degs.begin(), degs.end());
    int idx = std::min(g.n - 1, static_cast<int>(std::ceil(0.95 * g.n)) - 1);
    if (idx < 0) idx = 0;
    return std::max(1, degs[idx]);
}

Graph induced_subgraph(const Graph& g, const std::vector<int>& nodes) {
    std::vector<int> local(g.n, -1);
    for (size_t i = 0; i < nodes.size(); ++i) {
        if (nodes[i] < 0 || nodes[i] >= g.n)
            throw std::invalid_argument("induced_subgraph: node id out of range");
        local[nodes[i]] = static_cast<int>(i);
    }
    Graph sub;
    sub.n = static_cast<int>(nodes.size());
    sub.adj.resize(sub.n);
    for (int i = 0; i < sub.n; ++i)
        for (int v : g.adj[nodes[i]])
            if (local[v] >= 0) sub.adj[i].push_back(local[v]);
    for (auto& nb : sub.adj) std::sort(nb.begin(), nb.end());
    sub.X.resize(sub.n, g.X.cols());
    for (int i = 0; i < sub.n; ++i) sub.X.row(i) = g.X.row(nodes[i]);
    if (g.labels) {
        std::vector<int> lab(sub.n);
        for (int i = 0; i < sub.n; ++i) lab[i] = (*g.labels)[nodes[i]];
        sub.labels = std::move(lab);
    }
    return sub;
}

NeighborBatch sample_neighborhood(const Graph& g, const std::vector<int>& seeds,
                                  const std::vector<int>& fanouts,
                                  std::uint64_t rng_seed) {
    if (seeds.empty()) throw std::invalid_argument("sample_neighborhood: no seeds");
    if (fanouts.empty()) throw std::invalid_argument("sample_neighborhood: no fanouts");
    for (int s : seeds)
        if (s < 0 || s >= g.n)
            throw std::invalid_argument("sample_neighborhood: unknown node id");

    rng::SplitMix64 rng(rng_seed);
    std::vector<char> in_union(g.n, 0);
    std::vector<int> nodes;
    for (int s : seeds) {
        if (!in_union[s]) {
            in_union[s] = 1;
            nodes.push_back(s);
        }
    }
    std::vector<int> frontier = nodes;
    for (int f : fanouts) {
        std::vector<int> next;
        for (int u : frontier) {
            std::vector<int> pool(g.adj[u]);
            int take = std::min<int>(f, static_cast<int>(pool.size()));
            // partial Fisher-Yates
            for (int k = 0; k < take; ++k) {
                int r = k + static_cast<int>(rng.below(pool.size() - k));
                std::swap(pool[k], pool[r]);
                int v = pool[k];
                if (!in_union[v]) {
                    in_union[v] = 1;
                    nodes.push_back(v);
                    next.push_back(v);
                }
            }
        }
        frontier = std::move(next);
        if (frontier.empty()) break;
    }

    Graph sub = induced_subgraph(g, nodes);
    std::vector<int> local(g.n, -1);
    for (size_t i = 0; i < nodes.size(); ++i) local[nodes[i]] = static_cast<int>(i);

    NeighborBatch batch;
    batch.seed_nodes.resize(seeds.size());
    std::vector<char> seen(g.n, 0);
    size_t si = 0;
    for (int s : seeds)
        if (!seen[s]) {
            seen[s] = 1;
            batch.seed_nodes[si++] = local[s];
        }
    batch.seed_nodes.resize(si);
    batch.nodes = std::move(nodes);
    batch.sampled_adjacency = normalized_adjacency(sub);
    batch.layer_fanouts = fanouts;
    return batch;
}

// ---- ingestion --------------------------------------------------------

std::vector<std::pair<int, int>> read_edge_list(const std::string& path, int& max_id) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open edge file: " + path);
    std::vector<std::pair<int, int>> edges;
    max_id = -1;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        size_t pos = line.find_first_not_of(" \t\r");
        if (pos == std::string::npos || line[pos] == '#') continue;
        std::istringstream ss(line);
        long u, v;
        if (!(ss >> u >> v) || u < 0 || v < 0)
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": malformed edge line");
        std::string rest;
        if (ss >> rest)
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": trailing tokens on edge line");
        edges.emplace_back(static_cast<int>(u), static_cast<int>(v));
        max_id = std::max<int>(max_id, static_cast<int>(std::max(u, v)));
    }
    return edges;
}

Mat read_feature_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open feature file: " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        std::vector<double> row;
        std::istringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            try {
                row.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                         ": malformed number '" + cell + "'");
            }
        }
        if (!rows.empty() && row.size() != rows.front().size())
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": inconsistent column count");
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw std::runtime_error(path + ": empty feature file");
    Mat out(static_cast<long>(rows.size()), static_cast<long>(rows.front().size()));
    for (size_t i = 0; i < rows.size(); ++i)
        for (size_t j = 0; j < rows[i].size(); ++j)
            out(static_cast<long>(i), static_cast<long>(j)) = rows[i][j];
    return out;
}

std::vector<int> read_label_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open label file: " + path);
    std::vector<int> labels;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        size_t pos = line.find_first_not_of(" \t\r");
        if (pos == std::string::npos) continue;
        if (line[pos] != '0' && line[pos] != '1')
            throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                     ": label must be 0 or 1");
        labels.push_back(line[pos] - '0');
    }
    return labels;
}

}  // namespace janus::graph
