#include <doctest.h>

#include <cmath>

#include "janus/evalkit.hpp"
#include "janus/rng.hpp"
#include "janus/trainer.hpp"

using namespace janus::train;
using janus::ad::Mat;
using janus::ad::Tensor;
using janus::graph::Graph;

namespace {

Graph tiny_graph(int n = 12) {
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < n; ++i) edges.emplace_back(i, (i + 1) % n);
    edges.emplace_back(0, n / 2);
    janus::rng::SplitMix64 rng(n);
    Mat x(n, 3);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < 3; ++j) x(i, j) = rng.normal();
    std::vector<int> labels(n, 0);
    labels[0] = labels[1] = 1;
    return Graph::from_edges(n, edges, x, labels);
}

TrainConfig small_cfg(int epochs = 3) {
    TrainConfig cfg;
    cfg.epochs = epochs;
    cfg.layers = 2;
    cfg.hidden = 4;
    cfg.d_rw = 2;
    cfg.max_deg = 2;
    return cfg;
}

}  // namespace

TEST_CASE("validate field messages") {
    TrainConfig cfg;
    validate(cfg);  // defaults are valid

    auto expect_field = [](TrainConfig c, const char* field) {
        try {
            validate(c);
            FAIL("expected rejection for " << field);
        } catch (const std::invalid_argument& e) {
            CHECK(std::string(e.what()).find(field) == 0);
        }
    };
    TrainConfig c = cfg;
    c.tau = 0.0;
    expect_field(c, "tau");
    c = cfg;
    c.lr = -1;
    expect_field(c, "lr");
    c = cfg;
    c.epochs = 0;
    expect_field(c, "epochs");
    c = cfg;
    c.max_deg = 0;
    expect_field(c, "max_deg");
    c = cfg;
    c.fanouts = {5, 0};
    expect_field(c, "fanouts");
}

TEST_CASE("grid_mode restricts to published values") {
    TrainConfig cfg;
    cfg.grid_mode = true;
    validate(cfg);  // defaults sit on the grid
    cfg.lr = 0.005;
    CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
    cfg.lr = 1e-2;
    cfg.layers = 4;
    CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
    cfg.layers = 5;
    cfg.tau = 0.5;
    CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
    cfg.tau = 1.0;
    cfg.lambda2 = 2.0;
    CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
    cfg.lambda2 = 1.0;
    validate(cfg);
}

TEST_CASE("adam first step follows the bias-corrected update") {
    Mat w(1, 1);
    w << 2.0;
    std::vector<Tensor> params = {Tensor::param(w)};
    AdamOptimizer opt(params, 0.1);
    opt.zero_grad();
    // loss = 3 w, grad = 3
    janus::ad::backward(janus::ad::sum(janus::ad::scale(params[0], 3.0)));
    opt.step();
    // at t=1: mhat = g, vhat = g^2, update = lr * g / (|g| + eps) ~ lr
    CHECK(params[0].value()(0, 0) == doctest::Approx(2.0 - 0.1).epsilon(1e-6));

    // steepest descent on a quadratic converges to the minimum
    Mat w2(1, 1);
    w2 << 5.0;
    std::vector<Tensor> p2 = {Tensor::param(w2)};
    AdamOptimizer opt2(p2, 0.2);
    for (int i = 0; i < 400; ++i) {
        opt2.zero_grad();
        janus::ad::backward(janus::ad::sum(janus::ad::mul(p2[0], p2[0])));
        opt2.step();
    }
    CHECK(std::abs(p2[0].value()(0, 0)) < 1e-2);
}

TEST_CASE("train is seed-deterministic") {
    Graph g = tiny_graph();
    TrainConfig cfg = small_cfg();
    Eigen::VectorXd s1 = score(g, train(g, cfg));
    Eigen::VectorXd s2 = score(g, train(g, cfg));
    CHECK((s1 - s2).cwiseAbs().maxCoeff() == 0.0);

    cfg.seed = 2;
    Eigen::VectorXd s3 = score(g, train(g, cfg));
    CHECK((s1 - s3).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("training reduces the loss and tracks the best epoch") {
    Graph g = tiny_graph(16);
    TrainConfig cfg = small_cfg(40);
    TrainReport report;
    train(g, cfg, &report);
    REQUIRE(report.history.size() == 40);
    CHECK(report.history.back().total < report.history.front().total);
    double best = report.history[report.best_epoch].total;
    for (const auto& h : report.history) CHECK(best <= h.total);
    CHECK(report.seconds > 0.0);
}

TEST_CASE("lr = 0 leaves parameters untouched") {
    Graph g = tiny_graph();
    TrainConfig cfg = small_cfg(2);
    cfg.lr = 0.0;
    TrainedModel tm = train(g, cfg);
    janus::model::JanusModel fresh({cfg.layers, cfg.hidden, cfg.backbone},
                                   static_cast<int>(tm.views.Xs.cols()),
                                   static_cast<int>(tm.views.Xg.cols()), cfg.seed);
    for (size_t i = 0; i < fresh.parameters().size(); ++i)
        CHECK((fresh.parameters()[i].value() - tm.model->parameters()[i].value())
                  .cwiseAbs()
                  .maxCoeff() == 0.0);
}

TEST_CASE("minibatch path trains and scores full-batch") {
    Graph g = tiny_graph(24);
    TrainConfig cfg = small_cfg(4);
    cfg.batch_size = 8;
    cfg.fanouts = {3, 3};
    TrainedModel tm = train(g, cfg);
    Eigen::VectorXd s = score(g, tm);
    CHECK(s.size() == 24);
    CHECK(s.allFinite());

    // rerun is byte-identical despite sampling
    Eigen::VectorXd s2 = score(g, train(g, cfg));
    CHECK((s - s2).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("ablation hooks") {
    Graph g = tiny_graph(14);
    TrainConfig cfg = small_cfg(3);

    cfg.disable_reconstruction = true;
    TrainReport r1;
    TrainedModel m1 = train(g, cfg, &r1);
    CHECK(r1.history.back().adj == 0.0);
    CHECK(r1.history.back().node == 0.0);
    CHECK(score(g, m1).allFinite());

    cfg.disable_reconstruction = false;
    cfg.disable_contrastive = true;
    TrainReport r2;
    TrainedModel m2 = train(g, cfg, &r2);
    CHECK(r2.history.back().cl == 0.0);
    CHECK(r2.history.back().adj > 0.0);
    CHECK(score(g, m2).allFinite());
}

TEST_CASE("divergence raises DivergenceError") {
    Graph g = tiny_graph();
    TrainConfig cfg = small_cfg(30);
    cfg.lr = 1e9;  // blows up the tangent norms until cosh overflows
    CHECK_THROWS_AS(train(g, cfg), DivergenceError);
}

TEST_CASE("run_seeds aggregates with sample std") {
    janus::eval::InjectionSpec spec;
    spec.n = 60;
    spec.feature_dim = 4;
    spec.contextual_count = 4;
    spec.structural_count = 4;
    spec.clique_size = 4;
    Graph g = janus::eval::inject_anomalies(spec);

    TrainConfig cfg = small_cfg(5);
    AggregateMetrics agg = run_seeds(g, cfg, {1, 2, 3});
    REQUIRE(agg.per_seed.size() == 3);
    double mean = (agg.per_seed[0].roc_auc + agg.per_seed[1].roc_auc +
                   agg.per_seed[2].roc_auc) / 3.0;
    CHECK(agg.mean_roc_auc == doctest::Approx(mean).epsilon(1e-12));
    double ss = 0;
    for (auto& m : agg.per_seed) ss += (m.roc_auc - mean) * (m.roc_auc - mean);
    CHECK(agg.std_roc_auc == doctest::Approx(std::sqrt(ss / 2.0)).epsilon(1e-12));

    std::vector<Eigen::VectorXd> scores;
    AggregateMetrics again = run_seeds(g, cfg, {1, 2, 3}, &scores);
    CHECK(scores.size() == 3);
    CHECK(again.mean_roc_auc == agg.mean_roc_auc);  // deterministic protocol

    Graph unlabeled = g;
    unlabeled.labels.reset();
    CHECK_THROWS_AS(run_seeds(unlabeled, cfg, {1}), std::invalid_argument);
    CHECK_THROWS_AS(run_seeds(g, cfg, {}), std::invalid_argument);
}

TEST_CASE("score rejects mismatched graphs") {
    Graph g = tiny_graph();
    TrainedModel tm = train(g, small_cfg(1));
    Graph other = tiny_graph(8);
    CHECK_THROWS_AS(score(other, tm), std::invalid_argument);
}
