#include <doctest.h>

#include <cstdlib>
#include <fstream>

#include "janus/bundle.hpp"
#include "janus/evalkit.hpp"
#include "janus/rng.hpp"

using namespace janus::io;
using janus::graph::Graph;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

Graph small_graph(bool labeled) {
    janus::rng::SplitMix64 rng(5);
    janus::graph::Mat x(6, 3);
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 3; ++j) x(i, j) = rng.normal();
    std::optional<std::vector<int>> labels;
    if (labeled) labels = std::vector<int>{0, 0, 1, 0, 1, 0};
    return Graph::from_edges(6, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 0}, {0, 3}},
                             x, labels);
}

}  // namespace

TEST_CASE("digest_file is content-determined") {
    TempDir d("janus_digest_test");
    std::ofstream(d.path / "a.txt") << "hello";
    std::ofstream(d.path / "b.txt") << "hello";
    std::ofstream(d.path / "c.txt") << "hello!";
    CHECK(digest_file(d.path / "a.txt") == digest_file(d.path / "a.txt"));
    CHECK(digest_file(d.path / "a.txt") == digest_file(d.path / "b.txt"));
    CHECK(digest_file(d.path / "a.txt") != digest_file(d.path / "c.txt"));
    CHECK(digest_file(d.path / "a.txt").size() == 16);
    CHECK_THROWS_AS(digest_file(d.path / "missing"), std::runtime_error);
}

TEST_CASE("kv files round trip") {
    TempDir d("janus_kv_test");
    write_kv(d.path / "m.txt", {{"alpha", "1"}, {"beta", "two words"}});
    KvMap m = read_kv(d.path / "m.txt");
    CHECK(m.at("alpha") == "1");
    CHECK(m.at("beta") == "two words");
    std::ofstream(d.path / "bad.txt") << "no separator here\n";
    CHECK_THROWS_AS(read_kv(d.path / "bad.txt"), std::runtime_error);
}

TEST_CASE("bundle round trip preserves everything") {
    for (bool labeled : {true, false}) {
        TempDir d(labeled ? "janus_bundle_l" : "janus_bundle_u");
        Graph g = small_graph(labeled);
        auto views = janus::graph::build_views(g, 3, 2);
        write_bundle(d.path, g, views, 3, 2);

        Bundle b = read_bundle(d.path);
        CHECK(b.graph.n == 6);
        CHECK(b.graph.adj == g.adj);
        CHECK((b.graph.X - g.X).cwiseAbs().maxCoeff() == 0.0);  // raw f64, bit exact
        CHECK((b.views.Xs - views.Xs).cwiseAbs().maxCoeff() == 0.0);
        CHECK((b.views.Xg - views.Xg).cwiseAbs().maxCoeff() == 0.0);
        CHECK(b.d_rw == 3);
        CHECK(b.max_deg == 2);
        CHECK(b.labeled == labeled);
        if (labeled) CHECK(*b.graph.labels == *g.labels);

        KvMap manifest = read_kv(d.path / "manifest.txt");
        CHECK(manifest.at("format") == "janus-bundle-1");
        CHECK(manifest.count("digest.features.bin") == 1);
    }
}

TEST_CASE("bundle read detects corruption") {
    TempDir d("janus_bundle_corrupt");
    Graph g = small_graph(true);
    auto views = janus::graph::build_views(g, 2, 2);
    write_bundle(d.path, g, views, 2, 2);
    {
        std::ofstream f(d.path / "features.bin", std::ios::app | std::ios::binary);
        f << "x";
    }
    CHECK_THROWS_AS(read_bundle(d.path), std::runtime_error);
    CHECK_THROWS_AS(read_bundle(d.path / "nonexistent"), std::runtime_error);
}

TEST_CASE("checkpoint round trip restores parameters bitwise") {
    TempDir d("janus_ckpt_test");
    Graph g = small_graph(true);
    janus::train::TrainConfig cfg;
    cfg.epochs = 2;
    cfg.layers = 2;
    cfg.hidden = 4;
    cfg.d_rw = 2;
    cfg.max_deg = 2;
    janus::train::TrainedModel tm = janus::train::train(g, cfg);
    write_checkpoint(d.path / "ckpt", tm);

    janus::train::TrainedModel back = read_checkpoint(d.path / "ckpt", g);
    const auto& pa = tm.model->parameters();
    const auto& pb = back.model->parameters();
    REQUIRE(pa.size() == pb.size());
    for (size_t i = 0; i < pa.size(); ++i)
        CHECK((pa[i].value() - pb[i].value()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(back.cfg.hidden == 4);
    CHECK(back.cfg.d_rw == 2);
    CHECK(back.resolved_max_deg == tm.resolved_max_deg);

    Eigen::VectorXd s1 = janus::train::score(g, tm);
    Eigen::VectorXd s2 = janus::train::score(g, back);
    CHECK((s1 - s2).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("checkpoint shape mismatch is reported") {
    TempDir d("janus_ckpt_bad");
    Graph g = small_graph(true);
    janus::train::TrainConfig cfg;
    cfg.epochs = 1;
    cfg.layers = 2;
    cfg.hidden = 4;
    cfg.d_rw = 2;
    cfg.max_deg = 2;
    janus::train::TrainedModel tm = janus::train::train(g, cfg);
    write_checkpoint(d.path / "ckpt", tm);

    // truncate one parameter buffer
    fs::path buf;
    for (const auto& e : fs::directory_iterator(d.path / "ckpt"))
        if (e.path().extension() == ".f64") {
            buf = e.path();
            break;
        }
    REQUIRE(!buf.empty());
    fs::resize_file(buf, fs::file_size(buf) - 8);
    CHECK_THROWS_AS(read_checkpoint(d.path / "ckpt", g), std::runtime_error);
}

TEST_CASE("score files round trip at full precision") {
    TempDir d("janus_scores_test");
    janus::rng::SplitMix64 rng(13);
    Eigen::VectorXd s(100);
    for (int i = 0; i < 100; ++i) s[i] = rng.normal() * std::pow(10.0, (int)rng.below(6) - 3);
    write_scores(d.path / "scores.tsv", s);
    Eigen::VectorXd back = read_scores(d.path / "scores.tsv");
    REQUIRE(back.size() == 100);
    CHECK((s - back).cwiseAbs().maxCoeff() == 0.0);  // 17 significant digits

    std::ofstream(d.path / "bad.tsv") << "0\t1.0\nnot_an_id\t2.0\n";
    CHECK_THROWS_AS(read_scores(d.path / "bad.tsv"), std::runtime_error);
}

TEST_CASE("cg curve file") {
    TempDir d("janus_cg_test");
    write_cg_curve(d.path / "cg.csv", {{0.0, 0.0}, {0.5, 0.8}, {1.0, 1.0}});
    std::ifstream in(d.path / "cg.csv");
    std::string line;
    std::getline(in, line);
    CHECK(line == "fraction,gain");
    std::getline(in, line);
    CHECK(line.substr(0, 2) == "0,");
}

TEST_CASE("config parsing") {
    janus::train::TrainConfig cfg;
    apply_config_entry(cfg, "lr", "0.01");
    apply_config_entry(cfg, "epochs", "50");
    apply_config_entry(cfg, "backbone", "gin");
    apply_config_entry(cfg, "fanouts", "5,8");
    apply_config_entry(cfg, "grid_mode", "true");
    CHECK(cfg.lr == 0.01);
    CHECK(cfg.epochs == 50);
    CHECK(cfg.backbone == janus::model::Backbone::gin);
    CHECK(cfg.fanouts == std::vector<int>{5, 8});
    CHECK(cfg.grid_mode);
    CHECK_THROWS_AS(apply_config_entry(cfg, "no_such_key", "1"), std::invalid_argument);
    CHECK_THROWS_AS(apply_config_entry(cfg, "lr", "fast"), std::invalid_argument);
    CHECK_THROWS_AS(apply_config_entry(cfg, "backbone", "transformer"), std::invalid_argument);

    TempDir d("janus_cfg_test");
    std::ofstream(d.path / "c.cfg") << "# comment\nlr = 0.0001\ntau = 0.3\n\nhidden = 8\n";
    janus::train::TrainConfig file_cfg;
    load_config_file(file_cfg, d.path / "c.cfg");
    CHECK(file_cfg.lr == 0.0001);
    CHECK(file_cfg.tau == 0.3);
    CHECK(file_cfg.hidden == 8);

    // snapshot covers every key that the parser accepts
    auto snap = config_snapshot(file_cfg);
    janus::train::TrainConfig round;
    for (const auto& [k, v] : snap) apply_config_entry(round, k, v);
    CHECK(round.lr == file_cfg.lr);
    CHECK(round.tau == file_cfg.tau);
    CHECK(round.hidden == file_cfg.hidden);
    CHECK(round.seed == file_cfg.seed);
}
