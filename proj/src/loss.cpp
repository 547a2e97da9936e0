#include "janus/loss.hpp"

#include <stdexcept>

namespace janus::loss {

using namespace janus::ad;

namespace {

// D_ij = 1/2 ( bounded(||e_i - f_j||, 1) + bounded(d_L(p_i, q_j), 1) )
Tensor product_distance_matrix(const Tensor& e, const Tensor& p,
                               const Tensor& f, const Tensor& q) {
    Tensor de = bounded_unit(pairwise_euclid(e, f));
    Tensor dh = bounded_unit(pairwise_lorentz(p, q));
    return scale(add(de, dh), 0.5);
}

// l_i = D_ii / tau + log sum_{j != i} exp(-D_ij / tau)
Tensor info_nce_rows(const Tensor& d, double tau) {
    Tensor scaled = scale(d, -1.0 / tau);
    Tensor pos = scale(diagonal(scaled), -1.0);
    return add(pos, logsumexp_offdiag_rows(scaled));
}

}  // namespace

std::pair<Tensor, Tensor> contrastive_loss(const model::DualEmbedding& emb, double tau) {
    const long n = emb.Hs.rows();
    if (n < 2)
        throw std::invalid_argument("contrastive_loss: need n >= 2 (no negatives)");
    if (tau <= 0.0) throw std::invalid_argument("contrastive_loss: tau must be > 0");
    // l1: anchor is the g view, candidates are s views
    Tensor d1 = product_distance_matrix(emb.Hg, emb.Hhg, emb.Hs, emb.Hhs);
    Tensor l1 = info_nce_rows(d1, tau);
    // l2: roles swapped
    Tensor d2 = product_distance_matrix(emb.Hs, emb.Hhs, emb.Hg, emb.Hhg);
    Tensor l2 = info_nce_rows(d2, tau);
    Tensor per_node = scale(add(l1, l2), 1.0 / (2.0 * static_cast<double>(n)));
    return {sum(per_node), per_node};
}

std::pair<Tensor, Tensor> adjacency_loss(const Tensor& a, const model::Reconstruction& rec) {
    const Tensor* recons[] = {&rec.adj_es, &rec.adj_eg, &rec.adj_hs, &rec.adj_hg};
    Tensor per_node;
    for (const Tensor* r : recons) {
        if (r->rows() != a.rows() || r->cols() != a.cols())
            throw std::invalid_argument("adjacency_loss: shape mismatch");
        Tensor diff = sub(a, *r);
        Tensor term = rowsum(mul(diff, diff));
        per_node = per_node.defined() ? add(per_node, term) : term;
    }
    return {sum(per_node), per_node};
}

std::pair<Tensor, Tensor> node_feature_loss(const Tensor& xs, const Tensor& xg,
                                            const Tensor& lifted_s, const Tensor& lifted_g,
                                            const model::Reconstruction& rec) {
    if (rec.eucl_s.cols() != xs.cols() || rec.eucl_g.cols() != xg.cols())
        throw std::invalid_argument("node_feature_loss: reconstruction width mismatch");
    Tensor es = row_l2_norm(sub(xs, rec.eucl_s));   // n x 1
    Tensor eg = row_l2_norm(sub(xg, rec.eucl_g));
    Tensor hs = rowwise_lorentz(lifted_s, rec.hyp_s);
    Tensor hg = rowwise_lorentz(lifted_g, rec.hyp_g);

    // global: bounded transform of the summed matrix distances
    Tensor e_total = add(sum(eg), sum(es));
    Tensor h_total = add(sum(hg), sum(hs));
    Tensor global = scale(add(bounded_unit(e_total), bounded_unit(h_total)), 0.5);

    // per-node: bounded transform applied per row
    Tensor e_rows = add(eg, es);
    Tensor h_rows = add(hg, hs);
    Tensor per_node = scale(add(bounded_unit(e_rows), bounded_unit(h_rows)), 0.5);
    return {global, per_node};
}

LossTerms total_loss(const model::DualEmbedding& emb, const model::Reconstruction& rec,
                     const Tensor& a, const Tensor& xs, const Tensor& xg,
                     const Tensor& lifted_s, const Tensor& lifted_g,
                     const LossWeights& w) {
    LossTerms t;
    std::tie(t.cl, t.per_node_cl) = contrastive_loss(emb, w.tau);
    std::tie(t.adj, t.per_node_adj) = adjacency_loss(a, rec);
    std::tie(t.node, t.per_node_node) = node_feature_loss(xs, xg, lifted_s, lifted_g, rec);
    t.total = add(t.cl, add(scale(t.adj, w.lambda1), scale(t.node, w.lambda2)));
    return t;
}

LossBreakdown snapshot(const LossTerms& t) {
    LossBreakdown b;
    b.cl = t.cl.value()(0, 0);
    b.adj = t.adj.value()(0, 0);
    b.node = t.node.value()(0, 0);
    b.total = t.total.value()(0, 0);
    b.per_node_cl = t.per_node_cl.value().col(0);
    b.per_node_adj = t.per_node_adj.value().col(0);
    b.per_node_node = t.per_node_node.value().col(0);
    return b;
}

Eigen::VectorXd anomaly_scores(const LossBreakdown& b, const LossWeights& w) {
    return b.per_node_cl + w.lambda2 * b.per_node_node;
}

}  // namespace janus::loss
