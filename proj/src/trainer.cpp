#include "janus/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "janus/rng.hpp"

namespace janus::train {

using ad::Mat;
using ad::Tensor;
using model::JanusModel;

namespace {

bool in_grid(double v, std::initializer_list<double> grid) {
    for (double g : grid)
        if (v == g) return true;
    return false;
}

bool in_grid(int v, std::initializer_list<int> grid) {
    for (int g : grid)
        if (v == g) return true;
    return false;
}

}  // namespace

void validate(const TrainConfig& cfg) {
    if (cfg.tau <= 0.0) throw std::invalid_argument("tau: must be > 0");
    if (cfg.lr < 0.0) throw std::invalid_argument("lr: must be >= 0");
    if (cfg.epochs < 1) throw std::invalid_argument("epochs: must be >= 1");
    if (cfg.layers < 1) throw std::invalid_argument("layers: must be >= 1");
    if (cfg.hidden < 1) throw std::invalid_argument("hidden: must be >= 1");
    if (cfg.d_rw < 1) throw std::invalid_argument("d_rw: must be >= 1");
    if (cfg.max_deg == 0 || cfg.max_deg < -1)
        throw std::invalid_argument("max_deg: must be >= 1 (or -1 for auto)");
    if (cfg.lambda1 < 0.0) throw std::invalid_argument("lambda1: must be >= 0");
    if (cfg.lambda2 < 0.0) throw std::invalid_argument("lambda2: must be >= 0");
    if (cfg.batch_size < 0) throw std::invalid_argument("batch_size: must be >= 0");
    for (int f : cfg.fanouts)
        if (f < 1) throw std::invalid_argument("fanouts: entries must be >= 1");
    if (cfg.grid_mode) {
        if (!in_grid(cfg.lr, {1e-4, 1e-3, 1e-2}))
            throw std::invalid_argument("lr: not in grid {0.0001, 0.001, 0.01}");
        if (!in_grid(cfg.layers, {3, 5}))
            throw std::invalid_argument("layers: not in grid {3, 5}");
        if (!in_grid(cfg.hidden, {8, 32}))
            throw std::invalid_argument("hidden: not in grid {8, 32}");
        if (!in_grid(cfg.d_rw, {4, 8}))
            throw std::invalid_argument("d_rw: not in grid {4, 8}");
        if (cfg.max_deg != -1 && !in_grid(cfg.max_deg, {4, 8}))
            throw std::invalid_argument("max_deg: not in grid {4, 8}");
        if (!in_grid(cfg.tau, {0.3, 0.6, 1.0}))
            throw std::invalid_argument("tau: not in grid {0.3, 0.6, 1.0}");
        if (!in_grid(cfg.lambda1, {0.1, 0.01, 0.001}))
            throw std::invalid_argument("lambda1: not in grid {0.1, 0.01, 0.001}");
        if (cfg.lambda2 != 1.0)
            throw std::invalid_argument("lambda2: grid fixes lambda2 = 1.0");
    }
}

// ---- Adam -------------------------------------------------------------

AdamOptimizer::AdamOptimizer(std::vector<Tensor>& params, double lr)
    : params_(&params), lr_(lr) {
    for (auto& p : params) {
        m_.push_back(Mat::Zero(p.rows(), p.cols()));
        v_.push_back(Mat::Zero(p.rows(), p.cols()));
    }
}

void AdamOptimizer::zero_grad() {
    for (auto& p : *params_) p.zero_grad();
}

void AdamOptimizer::step() {
    constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    ++t_;
    const double bc1 = 1.0 - std::pow(beta1, t_);
    const double bc2 = 1.0 - std::pow(beta2, t_);
    for (size_t i = 0; i < params_->size(); ++i) {
        Tensor& p = (*params_)[i];
        const Mat& g = p.grad();
        if (g.size() == 0) continue;
        m_[i] = beta1 * m_[i] + (1.0 - beta1) * g;
        v_[i] = beta2 * v_[i] + (1.0 - beta2) * g.cwiseProduct(g);
        Mat mhat = m_[i] / bc1;
        Mat vhat = v_[i] / bc2;
        Mat upd = mhat.array() / (vhat.array().sqrt() + eps);
        p.set_value(p.value() - lr_ * upd);
    }
}

// ---- forward helpers --------------------------------------------------

namespace {

Mat dense_adjacency(const graph::Graph& g) {
    Mat a = Mat::Zero(g.n, g.n);
    for (int i = 0; i < g.n; ++i)
        for (int j : g.adj[i]) a(i, j) = 1.0;
    return a;
}

struct ForwardResult {
    model::DualEmbedding emb;
    loss::LossTerms terms;
};

Tensor zero_scalar() { return Tensor::constant(Mat::Zero(1, 1)); }
Tensor zero_col(long n) { return Tensor::constant(Mat::Zero(n, 1)); }

// Loss over all nodes of `sub`, contrastive restricted to `seed_rows`
// (empty: all rows).
ForwardResult forward_graph(const JanusModel& m, const graph::Graph& sub,
                            const Mat& xs_rows, const Mat& xg_rows,
                            const std::vector<int>& seed_rows,
                            const TrainConfig& cfg) {
    auto op = graph::normalized_adjacency(sub);
    auto op_plain = model::plain_adjacency(sub);

    Tensor xs = Tensor::constant(xs_rows);
    Tensor xg = Tensor::constant(xg_rows);
    Tensor lifted_s = ad::exp_origin_rows(xs);
    Tensor lifted_g = ad::exp_origin_rows(xg);

    ForwardResult fr;
    fr.emb = m.encode(xs, xg, op, op_plain);
    loss::LossTerms& t = fr.terms;
    const long n = sub.n;

    if (cfg.disable_contrastive) {
        t.cl = zero_scalar();
        t.per_node_cl = zero_col(n);
    } else if (seed_rows.empty()) {
        std::tie(t.cl, t.per_node_cl) = loss::contrastive_loss(fr.emb, cfg.tau);
    } else {
        model::DualEmbedding seeds;
        seeds.Hs = ad::gather_rows(fr.emb.Hs, seed_rows);
        seeds.Hg = ad::gather_rows(fr.emb.Hg, seed_rows);
        seeds.Hhs = ad::gather_rows(fr.emb.Hhs, seed_rows);
        seeds.Hhg = ad::gather_rows(fr.emb.Hhg, seed_rows);
        seeds.Ths = ad::gather_rows(fr.emb.Ths, seed_rows);
        seeds.Thg = ad::gather_rows(fr.emb.Thg, seed_rows);
        std::tie(t.cl, t.per_node_cl) = loss::contrastive_loss(seeds, cfg.tau);
    }

    if (cfg.disable_reconstruction) {
        t.adj = zero_scalar();
        t.per_node_adj = zero_col(n);
        t.node = zero_scalar();
        t.per_node_node = zero_col(n);
    } else {
        model::Reconstruction rec = m.decode(fr.emb, op, op_plain);
        Tensor a = Tensor::constant(dense_adjacency(sub));
        std::tie(t.adj, t.per_node_adj) = loss::adjacency_loss(a, rec);
        std::tie(t.node, t.per_node_node) =
            loss::node_feature_loss(xs, xg, lifted_s, lifted_g, rec);
    }
    t.total = ad::add(t.cl, ad::add(ad::scale(t.adj, cfg.lambda1),
                                    ad::scale(t.node, cfg.lambda2)));
    return fr;
}

}  // namespace

// ---- training ---------------------------------------------------------

TrainedModel train(const graph::Graph& g, const TrainConfig& cfg,
                   TrainReport* report) {
    validate(cfg);
    const auto t0 = std::chrono::steady_clock::now();

    TrainedModel tm;
    tm.cfg = cfg;
    tm.resolved_max_deg = cfg.max_deg > 0 ? cfg.max_deg : graph::default_max_deg(g);
    tm.views = graph::build_views(g, cfg.d_rw, tm.resolved_max_deg);

    model::EncoderConfig ecfg{cfg.layers, cfg.hidden, cfg.backbone};
    tm.model = std::make_shared<JanusModel>(
        ecfg, static_cast<int>(tm.views.Xs.cols()),
        static_cast<int>(tm.views.Xg.cols()), cfg.seed);

    int batch = cfg.batch_size;
    if (batch == 0 && g.n > 2048) batch = 512;
    const bool minibatch = batch > 0 && batch < g.n;
    std::vector<int> fanouts = cfg.fanouts;
    if (minibatch && fanouts.empty()) fanouts = {10, 10};

    AdamOptimizer opt(tm.model->parameters(), cfg.lr);
    double best_total = std::numeric_limits<double>::infinity();
    std::vector<Mat> best_params;
    int best_epoch = 0;

    janus::rng::SplitMix64 shuffle_rng(cfg.seed ^ 0x5bf0a8f2c1d3e579ULL);

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        loss::LossBreakdown bd;
        if (!minibatch) {
            opt.zero_grad();
            ForwardResult fr = forward_graph(*tm.model, g, tm.views.Xs, tm.views.Xg,
                                             {}, cfg);
            bd = loss::snapshot(fr.terms);
            if (!std::isfinite(bd.total))
                throw DivergenceError("non-finite loss at epoch " +
                                      std::to_string(epoch + 1));
            if (cfg.lr > 0.0) {
                ad::backward(fr.terms.total);
                opt.step();
            }
        } else {
            std::vector<int> perm(g.n);
            std::iota(perm.begin(), perm.end(), 0);
            for (int i = g.n - 1; i > 0; --i)
                std::swap(perm[i],
                          perm[shuffle_rng.below(static_cast<std::uint64_t>(i) + 1)]);
            for (int start = 0; start < g.n; start += batch) {
                int b = std::min(batch, g.n - start);
                if (b < 2) break;  // contrastive needs negatives
                std::vector<int> seeds(perm.begin() + start, perm.begin() + start + b);
                auto nb = graph::sample_neighborhood(
                    g, seeds, fanouts,
                    cfg.seed * 0x9e3779b97f4a7c15ULL + epoch * 65537ULL + start);
                graph::Graph sub = graph::induced_subgraph(g, nb.nodes);
                Mat xs(sub.n, tm.views.Xs.cols()), xg(sub.n, tm.views.Xg.cols());
                for (int i = 0; i < sub.n; ++i) {
                    xs.row(i) = tm.views.Xs.row(nb.nodes[i]);
                    xg.row(i) = tm.views.Xg.row(nb.nodes[i]);
                }
                opt.zero_grad();
                ForwardResult fr = forward_graph(*tm.model, sub, xs, xg,
                                                 nb.seed_nodes, cfg);
                loss::LossBreakdown part = loss::snapshot(fr.terms);
                if (!std::isfinite(part.total))
                    throw DivergenceError("non-finite loss at epoch " +
                                          std::to_string(epoch + 1));
                bd.cl += part.cl;
                bd.adj += part.adj;
                bd.node += part.node;
                bd.total += part.total;
                if (cfg.lr > 0.0) {
                    ad::backward(fr.terms.total);
                    opt.step();
                }
            }
        }

        if (bd.total < best_total) {
            best_total = bd.total;
            best_epoch = epoch;
            best_params.clear();
            for (auto& p : tm.model->parameters()) best_params.push_back(p.value());
        }
        if (report) report->history.push_back(std::move(bd));
    }

    // restore the best epoch's parameters
    if (!best_params.empty())
        for (size_t i = 0; i < best_params.size(); ++i)
            tm.model->parameters()[i].set_value(best_params[i]);

    if (report) {
        report->best_epoch = best_epoch;
        report->seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
    return tm;
}

// ---- scoring ----------------------------------------------------------

namespace {

// Chunked per-node contrastive evaluation on plain matrices, used when the
// full n x n tensor would not fit comfortably.
Eigen::VectorXd chunked_per_node_cl(const Mat& hs, const Mat& hhs, const Mat& hg,
                                    const Mat& hhg, double tau) {
    const long n = hs.rows();
    const long d = hhs.cols() - 1;
    Eigen::VectorXd out(n);
    const long block = 512;
    auto bounded = [](double x) { return x / (1.0 + x); };
    for (long start = 0; start < n; start += block) {
        long b = std::min(block, n - start);
        // rows of D1 (anchor g) and D2 (anchor s)
        for (long r = 0; r < b; ++r) {
            long i = start + r;
            double l1_pos = 0, l2_pos = 0;
            double m1 = -std::numeric_limits<double>::infinity(), m2 = m1;
            std::vector<double> row1(n), row2(n);
            for (long j = 0; j < n; ++j) {
                double de1 = (hg.row(i) - hs.row(j)).norm();
                double mink1 = hhg(i, 0) * hhs(j, 0) -
                               hhg.row(i).tail(d).dot(hhs.row(j).tail(d));
                double dh1 = std::acosh(std::max(1.0, mink1));
                double d1 = 0.5 * (bounded(de1) + bounded(dh1));
                double de2 = (hs.row(i) - hg.row(j)).norm();
                double mink2 = hhs(i, 0) * hhg(j, 0) -
                               hhs.row(i).tail(d).dot(hhg.row(j).tail(d));
                double dh2 = std::acosh(std::max(1.0, mink2));
                double d2 = 0.5 * (bounded(de2) + bounded(dh2));
                if (j == i) {
                    l1_pos = d1 / tau;
                    l2_pos = d2 / tau;
                } else {
                    row1[j] = -d1 / tau;
                    row2[j] = -d2 / tau;
                    m1 = std::max(m1, row1[j]);
                    m2 = std::max(m2, row2[j]);
                }
            }
            double s1 = 0, s2 = 0;
            for (long j = 0; j < n; ++j) {
                if (j == i) continue;
                s1 += std::exp(row1[j] - m1);
                s2 += std::exp(row2[j] - m2);
            }
            double l1 = l1_pos + m1 + std::log(s1);
            double l2 = l2_pos + m2 + std::log(s2);
            out(i) = (l1 + l2) / (2.0 * n);
        }
    }
    return out;
}

}  // namespace

Eigen::VectorXd score(const graph::Graph& g, const TrainedModel& tm) {
    if (tm.views.Xs.rows() != g.n)
        throw std::invalid_argument("score: graph/model dimension mismatch");
    TrainConfig cfg = tm.cfg;
    cfg.lambda1 = 0.0;  // scoring mode ignores adjacency reconstruction

    if (g.n <= 4096) {
        ForwardResult fr = forward_graph(*tm.model, g, tm.views.Xs, tm.views.Xg,
                                         {}, cfg);
        loss::LossBreakdown bd = loss::snapshot(fr.terms);
        loss::LossWeights w{0.0, cfg.lambda2, cfg.tau};
        return loss::anomaly_scores(bd, w);
    }

    // large graphs: full-batch encode, chunked per-node evaluation
    auto op = graph::normalized_adjacency(g);
    auto op_plain = model::plain_adjacency(g);
    Tensor xs = Tensor::constant(tm.views.Xs);
    Tensor xg = Tensor::constant(tm.views.Xg);
    model::DualEmbedding emb = tm.model->encode(xs, xg, op, op_plain);

    Eigen::VectorXd per_cl = Eigen::VectorXd::Zero(g.n);
    if (!cfg.disable_contrastive)
        per_cl = chunked_per_node_cl(emb.Hs.value(), emb.Hhs.value(),
                                     emb.Hg.value(), emb.Hhg.value(), cfg.tau);
    Eigen::VectorXd per_node = Eigen::VectorXd::Zero(g.n);
    if (!cfg.disable_reconstruction) {
        model::Reconstruction rec = tm.model->decode(emb, op, op_plain);
        Tensor lifted_s = ad::exp_origin_rows(xs);
        Tensor lifted_g = ad::exp_origin_rows(xg);
        auto [global, pn] = loss::node_feature_loss(xs, xg, lifted_s, lifted_g, rec);
        per_node = pn.value().col(0);
    }
    return per_cl + cfg.lambda2 * per_node;
}

// ---- multi-seed protocol ----------------------------------------------

AggregateMetrics run_seeds(const graph::Graph& g, const TrainConfig& cfg,
                           const std::vector<std::uint64_t>& seeds,
                           std::vector<Eigen::VectorXd>* scores_out) {
    if (seeds.empty()) throw std::invalid_argument("run_seeds: no seeds");
    if (!g.labels) throw std::invalid_argument("run_seeds: graph has no labels");

    AggregateMetrics agg;
    for (std::uint64_t s : seeds) {
        TrainConfig c = cfg;
        c.seed = s;
        TrainedModel tm = train(g, c);
        Eigen::VectorXd sc = score(g, tm);
        eval::RankedEval re = eval::evaluate(sc, *g.labels);
        agg.per_seed.push_back({s, re.roc_auc, re.ap, re.cg_area});
        if (scores_out) scores_out->push_back(std::move(sc));
    }

    auto mean_std = [&](auto getter, double& mean, double& sd) {
        double sum = 0;
        for (auto& m : agg.per_seed) sum += getter(m);
        mean = sum / agg.per_seed.size();
        double ss = 0;
        for (auto& m : agg.per_seed) ss += (getter(m) - mean) * (getter(m) - mean);
        sd = agg.per_seed.size() > 1 ? std::sqrt(ss / (agg.per_seed.size() - 1)) : 0.0;
    };
    mean_std([](const SeedMetrics& m) { return m.roc_auc; }, agg.mean_roc_auc,
             agg.std_roc_auc);
    mean_std([](const SeedMetrics& m) { return m.ap; }, agg.mean_ap, agg.std_ap);
    mean_std([](const SeedMetrics& m) { return m.cg_area; }, agg.mean_cg_area,
             agg.std_cg_area);
    return agg;
}

}  // namespace janus::train
