#include "janus/model.hpp"

#include <cmath>
#include <stdexcept>

namespace janus::model {

using namespace janus::ad;

Mat lift_to_hyperboloid(const Mat& x) {
    if (!x.allFinite())
        throw std::invalid_argument("lift_to_hyperboloid: non-finite features");
    Tensor t = Tensor::constant(x);
    return exp_origin_rows(t).value();
}

std::shared_ptr<CsrMatrix> plain_adjacency(const janus::graph::Graph& g) {
    auto m = std::make_shared<CsrMatrix>();
    m->rows = m->cols = g.n;
    m->indptr.assign(g.n + 1, 0);
    for (int i = 0; i < g.n; ++i) {
        for (int j : g.adj[i]) {
            m->indices.push_back(j);
            m->values.push_back(1.0);
        }
        m->indptr[i + 1] = static_cast<int>(m->indices.size());
    }
    return m;
}

Tensor reconstruct_adjacency(const Tensor& h) {
    return sigmoid(matmul_nt(h, h));
}

namespace {

Mat glorot(int rows, int cols, janus::rng::SplitMix64& rng) {
    const double bound = std::sqrt(6.0 / (rows + cols));
    Mat w(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j)
            w(i, j) = bound * (2.0 * rng.uniform() - 1.0);
    return w;
}

}  // namespace

JanusModel::Tower JanusModel::build_tower(const std::string& name, int in_w,
                                          int out_w, janus::rng::SplitMix64& rng) {
    Tower t;
    int cur = in_w;
    for (int l = 0; l < cfg_.layers; ++l) {
        int next = (l + 1 == cfg_.layers) ? out_w : cfg_.hidden;
        std::vector<Tensor> layer;
        if (cfg_.backbone == Backbone::norm_conv) {
            layer.push_back(Tensor::param(glorot(cur, next, rng)));
            names_.push_back(name + ".w" + std::to_string(l));
        } else {
            // GIN: two-layer MLP over (1+eps) h + sum_neighbors h, eps = 0
            layer.push_back(Tensor::param(glorot(cur, next, rng)));
            names_.push_back(name + ".mlp0." + std::to_string(l));
            layer.push_back(Tensor::param(glorot(next, next, rng)));
            names_.push_back(name + ".mlp1." + std::to_string(l));
        }
        for (auto& p : layer) params_.push_back(p);
        t.layers.push_back(std::move(layer));
        cur = next;
    }
    return t;
}

JanusModel::JanusModel(EncoderConfig cfg, int width_s, int width_g,
                       std::uint64_t seed)
    : cfg_(cfg), width_s_(width_s), width_g_(width_g) {
    if (cfg.layers < 1 || cfg.hidden < 1)
        throw std::invalid_argument("JanusModel: layers and hidden must be >= 1");
    janus::rng::SplitMix64 rng(seed);
    enc_e_s_ = build_tower("enc_e_s", width_s, cfg.hidden, rng);
    enc_e_g_ = build_tower("enc_e_g", width_g, cfg.hidden, rng);
    enc_h_s_ = build_tower("enc_h_s", width_s, cfg.hidden, rng);
    enc_h_g_ = build_tower("enc_h_g", width_g, cfg.hidden, rng);
    dec_e_s_ = build_tower("dec_e_s", cfg.hidden, width_s, rng);
    dec_e_g_ = build_tower("dec_e_g", cfg.hidden, width_g, rng);
    dec_h_s_ = build_tower("dec_h_s", cfg.hidden, width_s, rng);
    dec_h_g_ = build_tower("dec_h_g", cfg.hidden, width_g, rng);
}

Tensor JanusModel::tower_forward(const Tower& t, Tensor h,
                                 const std::shared_ptr<const CsrMatrix>& op,
                                 const std::shared_ptr<const CsrMatrix>& op_plain) const {
    const size_t last = t.layers.size() - 1;
    for (size_t l = 0; l < t.layers.size(); ++l) {
        if (cfg_.backbone == Backbone::norm_conv) {
            h = matmul(spmm(std::shared_ptr<const CsrMatrix>(op), h), t.layers[l][0]);
            if (l != last) h = relu(h);
        } else {
            Tensor agg = add(h, spmm(std::shared_ptr<const CsrMatrix>(op_plain), h));
            h = matmul(relu(matmul(agg, t.layers[l][0])), t.layers[l][1]);
            if (l != last) h = relu(h);
        }
    }
    return h;
}

DualEmbedding JanusModel::encode(const Tensor& xs, const Tensor& xg,
                                 const std::shared_ptr<const CsrMatrix>& op,
                                 const std::shared_ptr<const CsrMatrix>& op_plain) const {
    if (xs.cols() != width_s_ || xg.cols() != width_g_)
        throw std::invalid_argument("encode: view width mismatch");
    DualEmbedding emb;
    emb.Hs = tower_forward(enc_e_s_, xs, op, op_plain);
    emb.Hg = tower_forward(enc_e_g_, xg, op, op_plain);
    // lift to the hyperboloid and back to tangent coordinates at o, then
    // run the tangent-space recurrence
    Tensor ts = log_origin_rows(exp_origin_rows(xs));
    Tensor tg = log_origin_rows(exp_origin_rows(xg));
    emb.Ths = tower_forward(enc_h_s_, ts, op, op_plain);
    emb.Thg = tower_forward(enc_h_g_, tg, op, op_plain);
    emb.Hhs = exp_origin_rows(emb.Ths);
    emb.Hhg = exp_origin_rows(emb.Thg);
    return emb;
}

Reconstruction JanusModel::decode(const DualEmbedding& emb,
                                  const std::shared_ptr<const CsrMatrix>& op,
                                  const std::shared_ptr<const CsrMatrix>& op_plain) const {
    Reconstruction rec;
    rec.eucl_s = tower_forward(dec_e_s_, emb.Hs, op, op_plain);
    rec.eucl_g = tower_forward(dec_e_g_, emb.Hg, op, op_plain);
    // hyperbolic decoders run in the tangent space; outputs are mapped to
    // the manifold so geodesic reconstruction distances are well defined
    rec.hyp_s = exp_origin_rows(tower_forward(dec_h_s_, emb.Ths, op, op_plain));
    rec.hyp_g = exp_origin_rows(tower_forward(dec_h_g_, emb.Thg, op, op_plain));
    rec.adj_es = reconstruct_adjacency(emb.Hs);
    rec.adj_eg = reconstruct_adjacency(emb.Hg);
    rec.adj_hs = reconstruct_adjacency(emb.Ths);
    rec.adj_hg = reconstruct_adjacency(emb.Thg);
    return rec;
}

}  // namespace janus::model
