#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <vector>

#include "janus/graph.hpp"

namespace janus::eval {

using Eigen::VectorXd;

struct RankedEval {
    double roc_auc = 0;
    double ap = 0;
    std::vector<std::pair<double, double>> cg_curve;  // (fraction, gain)
    double cg_area = 0;
};

// Mann-Whitney statistic with half credit for ties.  Requires at least one
// positive and one negative label.
double roc_auc(const VectorXd& scores, const std::vector<int>& labels);

// Step-interpolated area under the precision-recall curve; ties grouped at
// one threshold.  Requires at least one positive.
double average_precision(const VectorXd& scores, const std::vector<int>& labels);

// Nodes sorted by descending score, ties broken by ascending node id; the
// curve has n+1 points, area by the trapezoid rule.
std::pair<std::vector<std::pair<double, double>>, double>
cumulative_gain(const VectorXd& scores, const std::vector<int>& labels);

RankedEval evaluate(const VectorXd& scores, const std::vector<int>& labels);

enum class BaseModel { erdos_renyi, barabasi_albert };

struct InjectionSpec {
    int n = 500;
    BaseModel base_model = BaseModel::erdos_renyi;
    double edge_param = 0.02;  // ER edge probability, or BA edges-per-node
    int feature_dim = 16;
    int contextual_count = 13;
    int structural_count = 12;
    int clique_size = 6;
    double outlier_scale = 10.0;
    std::uint64_t seed = 7;
};

// The fixed `synth-500` benchmark spec (5% injected anomalies).
InjectionSpec synth500();

// Base graph with standard-normal features; contextual anomalies get
// features redrawn at outlier_scale sigma, structural anomalies are wired
// into cliques.  Deterministic per seed.
janus::graph::Graph inject_anomalies(const InjectionSpec& spec);

}  // namespace janus::eval
