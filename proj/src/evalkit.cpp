#include "janus/evalkit.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "janus/rng.hpp"

namespace janus::eval {

namespace {

void check_lengths(const VectorXd& scores, const std::vector<int>& labels) {
    if (static_cast<size_t>(scores.size()) != labels.size())
        throw std::invalid_argument("metrics: score/label length mismatch");
    if (labels.empty()) throw std::invalid_argument("metrics: empty input");
}

int count_positives(const std::vector<int>& labels) {
    return static_cast<int>(std::count(labels.begin(), labels.end(), 1));
}

}  // namespace

double roc_auc(const VectorXd& scores, const std::vector<int>& labels) {
    check_lengths(scores, labels);
    const int n = static_cast<int>(labels.size());
    const int p = count_positives(labels);
    if (p == 0 || p == n)
        throw std::invalid_argument("roc_auc: need both classes present");

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return scores[a] < scores[b]; });

    // midranks, then the Mann-Whitney identity
    std::vector<double> rank(n);
    int i = 0;
    while (i < n) {
        int j = i;
        while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
        double mid = (i + j) / 2.0 + 1.0;
        for (int k = i; k <= j; ++k) rank[order[k]] = mid;
        i = j + 1;
    }
    double rank_sum = 0;
    for (int k = 0; k < n; ++k)
        if (labels[k] == 1) rank_sum += rank[k];
    double u = rank_sum - p * (p + 1.0) / 2.0;
    return u / (static_cast<double>(p) * (n - p));
}

double average_precision(const VectorXd& scores, const std::vector<int>& labels) {
    check_lengths(scores, labels);
    const int n = static_cast<int>(labels.size());
    const int p = count_positives(labels);
    if (p == 0) throw std::invalid_argument("average_precision: no positives");

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return scores[a] > scores[b]; });

    double ap = 0;
    double prev_recall = 0;
    int tp = 0, seen = 0;
    int i = 0;
    while (i < n) {
        int j = i;
        while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
        for (int k = i; k <= j; ++k) {
            ++seen;
            tp += labels[order[k]];
        }
        double recall = static_cast<double>(tp) / p;
        double precision = static_cast<double>(tp) / seen;
        ap += (recall - prev_recall) * precision;
        prev_recall = recall;
        i = j + 1;
    }
    return ap;
}

std::pair<std::vector<std::pair<double, double>>, double>
cumulative_gain(const VectorXd& scores, const std::vector<int>& labels) {
    check_lengths(scores, labels);
    const int n = static_cast<int>(labels.size());
    const int p = count_positives(labels);
    if (p == 0) throw std::invalid_argument("cumulative_gain: no positives");

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return a < b;
    });

    std::vector<std::pair<double, double>> curve;
    curve.reserve(n + 1);
    curve.emplace_back(0.0, 0.0);
    int found = 0, prev_found = 0;
    long numer = 0;  // trapezoid sum scaled by 2 n p, exact in integers
    for (int k = 0; k < n; ++k) {
        found += labels[order[k]];
        curve.emplace_back(static_cast<double>(k + 1) / n,
                           static_cast<double>(found) / p);
        numer += prev_found + found;
        prev_found = found;
    }
    double area = static_cast<double>(numer) / (2.0 * n * p);
    return {curve, area};
}

RankedEval evaluate(const VectorXd& scores, const std::vector<int>& labels) {
    RankedEval r;
    r.roc_auc = roc_auc(scores, labels);
    r.ap = average_precision(scores, labels);
    std::tie(r.cg_curve, r.cg_area) = cumulative_gain(scores, labels);
    return r;
}

InjectionSpec synth500() { return InjectionSpec{}; }

janus::graph::Graph inject_anomalies(const InjectionSpec& spec) {
    if (spec.n < 2 || spec.feature_dim < 1)
        throw std::invalid_argument("inject_anomalies: bad size parameters");
    if (spec.contextual_count < 0 || spec.structural_count < 0 ||
        spec.contextual_count + spec.structural_count >= spec.n)
        throw std::invalid_argument("inject_anomalies: anomaly counts infeasible");
    if (spec.structural_count > 0 &&
        (spec.clique_size < 2 || spec.clique_size > spec.structural_count))
        throw std::invalid_argument("inject_anomalies: clique size infeasible");

    janus::rng::SplitMix64 rng(spec.seed);

    // 1. base edges
    std::vector<std::pair<int, int>> edges;
    if (spec.base_model == BaseModel::erdos_renyi) {
        for (int i = 0; i < spec.n; ++i)
            for (int j = i + 1; j < spec.n; ++j)
                if (rng.uniform() < spec.edge_param) edges.emplace_back(i, j);
    } else {
        int m = std::max(1, static_cast<int>(spec.edge_param));
        std::vector<int> targets;  // repeated-node list for preferential attachment
        for (int i = 0; i < m && i < spec.n; ++i) targets.push_back(i);
        for (int i = m; i < spec.n; ++i) {
            std::vector<int> chosen;
            while (static_cast<int>(chosen.size()) < m) {
                int t = targets[rng.below(targets.size())];
                if (std::find(chosen.begin(), chosen.end(), t) == chosen.end())
                    chosen.push_back(t);
            }
            for (int t : chosen) {
                edges.emplace_back(i, t);
                targets.push_back(t);
                targets.push_back(i);
            }
        }
    }

    // 2. standard-normal features
    graph::Mat features(spec.n, spec.feature_dim);
    for (int i = 0; i < spec.n; ++i)
        for (int j = 0; j < spec.feature_dim; ++j)
            features(i, j) = rng.normal();

    // 3. choose anomalous nodes
    std::vector<int> perm(spec.n);
    std::iota(perm.begin(), perm.end(), 0);
    for (int i = spec.n - 1; i > 0; --i)
        std::swap(perm[i], perm[rng.below(static_cast<std::uint64_t>(i) + 1)]);
    std::vector<int> contextual(perm.begin(), perm.begin() + spec.contextual_count);
    std::vector<int> structural(perm.begin() + spec.contextual_count,
                                perm.begin() + spec.contextual_count + spec.structural_count);

    // 4. contextual: redraw features at outlier scale
    for (int node : contextual)
        for (int j = 0; j < spec.feature_dim; ++j)
            features(node, j) = spec.outlier_scale * rng.normal();

    // 5. structural: wire groups into cliques (last group may be smaller)
    for (size_t start = 0; start < structural.size(); start += spec.clique_size) {
        size_t end = std::min(structural.size(), start + spec.clique_size);
        for (size_t a = start; a < end; ++a)
            for (size_t b = a + 1; b < end; ++b)
                edges.emplace_back(structural[a], structural[b]);
    }

    std::vector<int> labels(spec.n, 0);
    for (int node : contextual) labels[node] = 1;
    for (int node : structural) labels[node] = 1;

    return janus::graph::Graph::from_edges(spec.n, edges, std::move(features),
                                           std::move(labels));
}

}  // namespace janus::eval
