#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "janus/evalkit.hpp"
#include "janus/rng.hpp"

using namespace janus::eval;
using Eigen::VectorXd;

namespace {

// pair-counting oracle: P(score_pos > score_neg) + 1/2 P(equal)
double brute_auc(const VectorXd& s, const std::vector<int>& y) {
    double num = 0;
    long pairs = 0;
    for (size_t i = 0; i < y.size(); ++i) {
        if (y[i] != 1) continue;
        for (size_t j = 0; j < y.size(); ++j) {
            if (y[j] != 0) continue;
            ++pairs;
            if (s[i] > s[j]) num += 1.0;
            else if (s[i] == s[j]) num += 0.5;
        }
    }
    return num / pairs;
}

// threshold-sweep oracle over distinct score values
double brute_ap(const VectorXd& s, const std::vector<int>& y) {
    std::set<double> thr(s.data(), s.data() + s.size());
    std::vector<double> cuts(thr.rbegin(), thr.rend());  // descending
    int p = 0;
    for (int v : y) p += v;
    double ap = 0, prev_recall = 0;
    for (double c : cuts) {
        int tp = 0, pred = 0;
        for (size_t i = 0; i < y.size(); ++i)
            if (s[i] >= c) {
                ++pred;
                tp += y[i];
            }
        double recall = static_cast<double>(tp) / p;
        ap += (recall - prev_recall) * tp / pred;
        prev_recall = recall;
    }
    return ap;
}

std::pair<VectorXd, std::vector<int>> random_instance(janus::rng::SplitMix64& rng, int n,
                                                      bool with_ties) {
    VectorXd s(n);
    std::vector<int> y(n);
    int pos = 0;
    for (int i = 0; i < n; ++i) {
        s[i] = with_ties ? std::floor(6.0 * rng.uniform()) : rng.normal();
        y[i] = rng.uniform() < 0.3 ? 1 : 0;
        pos += y[i];
    }
    if (pos == 0) y[0] = 1;
    if (pos == n) y[0] = 0;
    return {s, y};
}

}  // namespace

TEST_CASE("roc_auc basics") {
    VectorXd s(4);
    s << 0.9, 0.8, 0.2, 0.1;
    CHECK(roc_auc(s, {1, 1, 0, 0}) == doctest::Approx(1.0));
    CHECK(roc_auc(s, {0, 0, 1, 1}) == doctest::Approx(0.0));
    VectorXd tied = VectorXd::Constant(4, 3.0);
    CHECK(roc_auc(tied, {1, 0, 1, 0}) == doctest::Approx(0.5));
    CHECK_THROWS_AS(roc_auc(s, {1, 1, 1, 1}), std::invalid_argument);
    CHECK_THROWS_AS(roc_auc(s, {0, 0}), std::invalid_argument);
}

TEST_CASE("roc_auc against the pair-counting oracle") {
    janus::rng::SplitMix64 rng(101);
    for (int t = 0; t < 40; ++t) {
        auto [s, y] = random_instance(rng, 30 + static_cast<int>(rng.below(50)), t % 2 == 0);
        CHECK(roc_auc(s, y) == doctest::Approx(brute_auc(s, y)).epsilon(1e-12));
    }
}

TEST_CASE("roc_auc properties") {
    janus::rng::SplitMix64 rng(103);
    for (int t = 0; t < 20; ++t) {
        auto [s, y] = random_instance(rng, 40, false);
        double a = roc_auc(s, y);
        // invariant under strictly monotone transforms
        VectorXd warped = s.array().exp();
        CHECK(roc_auc(warped, y) == doctest::Approx(a).epsilon(1e-12));
        // complement under score negation
        CHECK(roc_auc(-s, y) == doctest::Approx(1.0 - a).epsilon(1e-12));
    }
}

TEST_CASE("average_precision against the threshold-sweep oracle") {
    VectorXd s(4);
    s << 0.9, 0.8, 0.2, 0.1;
    CHECK(average_precision(s, {1, 1, 0, 0}) == doctest::Approx(1.0));
    // perfect inversion: precision at full recall is p/n
    CHECK(average_precision(s, {0, 0, 1, 1}) > 0.0);
    CHECK_THROWS_AS(average_precision(s, {0, 0, 0, 0}), std::invalid_argument);

    janus::rng::SplitMix64 rng(107);
    for (int t = 0; t < 40; ++t) {
        auto [sc, y] = random_instance(rng, 25 + static_cast<int>(rng.below(40)), t % 2 == 0);
        CHECK(average_precision(sc, y) == doctest::Approx(brute_ap(sc, y)).epsilon(1e-12));
    }
}

TEST_CASE("cumulative_gain curve shape and oracle area") {
    VectorXd s(6);
    s << 6, 5, 4, 3, 2, 1;
    std::vector<int> y = {1, 1, 0, 0, 0, 0};
    auto [curve, area] = cumulative_gain(s, y);
    CHECK(curve.size() == 7);
    CHECK(curve.front() == std::pair<double, double>{0.0, 0.0});
    CHECK(curve.back() == std::pair<double, double>{1.0, 1.0});
    // oracle ranking: area = 1 - P/(2n)
    CHECK(area == doctest::Approx(1.0 - 2.0 / 12.0).epsilon(1e-12));

    janus::rng::SplitMix64 rng(109);
    for (int n : {50, 200}) {
        int p = n / 10;
        std::vector<int> labels(n, 0);
        VectorXd sc(n);
        for (int i = 0; i < n; ++i) sc[i] = n - i;
        for (int i = 0; i < p; ++i) labels[i] = 1;  // all positives first
        auto [c2, a2] = cumulative_gain(sc, labels);
        CHECK(a2 == doctest::Approx(1.0 - static_cast<double>(p) / (2.0 * n)).epsilon(1e-12));
    }

    // random scores concentrate near 1/2
    int n = 4000, p = 400;
    std::vector<int> labels(n, 0);
    for (int i = 0; i < p; ++i) labels[i] = 1;
    VectorXd sc(n);
    for (int i = 0; i < n; ++i) sc[i] = rng.uniform();
    auto [c3, a3] = cumulative_gain(sc, labels);
    CHECK(a3 == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("cumulative_gain tie break is by ascending id") {
    VectorXd s(4);
    s << 1, 1, 1, 1;
    std::vector<int> y = {1, 0, 0, 0};
    auto [curve, area] = cumulative_gain(s, y);
    // node 0 (the positive) is ranked first
    CHECK(curve[1].second == doctest::Approx(1.0));
}

TEST_CASE("evaluate bundles all metrics") {
    VectorXd s(5);
    s << 5, 4, 3, 2, 1;
    RankedEval r = evaluate(s, {1, 0, 1, 0, 0});
    CHECK(r.roc_auc == doctest::Approx(brute_auc(s, {1, 0, 1, 0, 0})));
    CHECK(r.ap == doctest::Approx(brute_ap(s, {1, 0, 1, 0, 0})));
    CHECK(r.cg_curve.size() == 6);
    CHECK(r.cg_area > 0.5);
}

TEST_CASE("synth500 spec") {
    InjectionSpec s = synth500();
    CHECK(s.n == 500);
    CHECK(s.contextual_count + s.structural_count == 25);  // 5% anomalies
    CHECK(s.feature_dim == 16);
    CHECK(s.seed == 7);
}

TEST_CASE("inject_anomalies determinism and structure") {
    InjectionSpec spec = synth500();
    janus::graph::Graph a = inject_anomalies(spec);
    janus::graph::Graph b = inject_anomalies(spec);
    CHECK(a.n == 500);
    CHECK(a.adj == b.adj);
    CHECK((a.X - b.X).cwiseAbs().maxCoeff() == 0.0);
    REQUIRE(a.labels.has_value());
    int pos = 0;
    for (int v : *a.labels) pos += v;
    CHECK(pos == 25);

    spec.seed = 8;
    janus::graph::Graph c = inject_anomalies(spec);
    CHECK(a.adj != c.adj);

    // contextual anomalies carry visibly larger features
    double max_norm_normal = 0, min_norm = 1e18;
    (void)min_norm;
    std::vector<double> anom_norms;
    for (int i = 0; i < a.n; ++i) {
        double nrm = a.X.row(i).norm();
        if ((*a.labels)[i] == 0) max_norm_normal = std::max(max_norm_normal, nrm);
        else anom_norms.push_back(nrm);
    }
    std::sort(anom_norms.rbegin(), anom_norms.rend());
    // 13 contextual nodes at 10 sigma dominate every normal node
    for (int i = 0; i < 13; ++i) CHECK(anom_norms[i] > max_norm_normal);

    // structural anomalies form cliques: groups of 6 have degree >= 5
    int high_degree_anoms = 0;
    for (int i = 0; i < a.n; ++i)
        if ((*a.labels)[i] == 1 && a.degree(i) >= 5) ++high_degree_anoms;
    CHECK(high_degree_anoms >= 6);  // at least the first full clique
}

TEST_CASE("inject_anomalies validation") {
    InjectionSpec s = synth500();
    s.contextual_count = 400;
    s.structural_count = 200;
    CHECK_THROWS_AS(inject_anomalies(s), std::invalid_argument);
    s = synth500();
    s.clique_size = 1;
    CHECK_THROWS_AS(inject_anomalies(s), std::invalid_argument);
    s = synth500();
    s.clique_size = 13;  // > structural_count
    CHECK_THROWS_AS(inject_anomalies(s), std::invalid_argument);
    s = synth500();
    s.n = 1;
    CHECK_THROWS_AS(inject_anomalies(s), std::invalid_argument);
}

TEST_CASE("barabasi_albert base model is connected-ish and deterministic") {
    InjectionSpec s;
    s.n = 200;
    s.base_model = BaseModel::barabasi_albert;
    s.edge_param = 3;
    s.contextual_count = 5;
    s.structural_count = 6;
    s.clique_size = 3;
    janus::graph::Graph g = inject_anomalies(s);
    CHECK(g.n == 200);
    CHECK(g.num_edges() >= 3 * (200 - 3));
    janus::graph::Graph g2 = inject_anomalies(s);
    CHECK(g.adj == g2.adj);
}
