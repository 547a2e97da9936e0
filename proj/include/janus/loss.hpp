#pragma once

#include <Eigen/Dense>

#include "janus/model.hpp"
#include "janus/tensor.hpp"

namespace janus::loss {

using ad::Tensor;

struct LossWeights {
    double lambda1 = 0.01;
    double lambda2 = 1.0;
    double tau = 0.6;
};

// Graph-connected loss tensors; `total` is the training objective.
struct LossTerms {
    Tensor cl, per_node_cl;      // scalar, n x 1
    Tensor adj, per_node_adj;
    Tensor node, per_node_node;  // `node` is the global product-metric term
    Tensor total;
};

// Plain-value snapshot of a LossTerms evaluation.
struct LossBreakdown {
    double cl = 0, adj = 0, node = 0, total = 0;
    Eigen::VectorXd per_node_cl, per_node_adj, per_node_node;
};

// Symmetric two-view InfoNCE-style loss with product-metric distances and
// negatives-only denominators.  per_node_cl sums to cl.  Throws when n < 2.
std::pair<Tensor, Tensor> contrastive_loss(const model::DualEmbedding& emb, double tau);

// Sum of squared Frobenius distances of the four reconstructions to A;
// per-node vector is the row decomposition.
std::pair<Tensor, Tensor> adjacency_loss(const Tensor& a, const model::Reconstruction& rec);

// Returns (global term, per-node variant).  The global term follows the
// product-metric formula over summed row distances; the per-node variant
// applies the bounded transform per node (x/(1+x) of a sum does not
// decompose, so the two are distinct).
std::pair<Tensor, Tensor> node_feature_loss(const Tensor& xs, const Tensor& xg,
                                            const Tensor& lifted_s, const Tensor& lifted_g,
                                            const model::Reconstruction& rec);

LossTerms total_loss(const model::DualEmbedding& emb, const model::Reconstruction& rec,
                     const Tensor& a, const Tensor& xs, const Tensor& xg,
                     const Tensor& lifted_s, const Tensor& lifted_g,
                     const LossWeights& w);

LossBreakdown snapshot(const LossTerms& t);

// score_i = per_node_cl[i] + lambda2 * per_node_node[i]  (lambda1 = 0 in
// scoring mode).  Higher means more anomalous.
Eigen::VectorXd anomaly_scores(const LossBreakdown& b, const LossWeights& w);

}  // namespace janus::loss
