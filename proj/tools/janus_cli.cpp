// Command-line surface: prepare / synth / train / score / eval / run-seeds.
// Exit codes: 0 success, 2 validation error, 3 training divergence.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "janus/bundle.hpp"
#include "janus/evalkit.hpp"
#include "janus/trainer.hpp"

namespace fs = std::filesystem;
using namespace janus;

namespace {

constexpr const char* kVersion = "janus 0.1.0";

std::string join_args(int argc, char** argv) {
    std::string s;
    for (int i = 0; i < argc; ++i) {
        if (i) s += " ";
        s += argv[i];
    }
    return s;
}

// Volatile run metadata kept out of the deterministic bundle manifest.
void write_run_log(const fs::path& dir, const std::string& cmdline, double seconds,
                   const std::vector<std::pair<std::string, std::string>>& extra = {}) {
    std::vector<std::pair<std::string, std::string>> kv = {
        {"command", cmdline},
        {"version", kVersion},
        {"wall_clock_seconds", std::to_string(seconds)},
    };
    for (const auto& e : extra) kv.push_back(e);
    io::write_kv(dir / "run.txt", kv);
}

fs::path resolve_out(std::string out, const std::string& command) {
    if (!out.empty()) return out;
    const char* root = std::getenv("JANUS_RUN_ROOT");
    if (!root)
        throw std::invalid_argument(
            "no output directory: pass -o or set JANUS_RUN_ROOT");
    return fs::path(root) / command;
}

std::vector<std::uint64_t> parse_seed_list(const std::string& s) {
    std::vector<std::uint64_t> seeds;
    std::istringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ','))
        if (!tok.empty()) seeds.push_back(std::stoull(tok));
    if (seeds.empty()) throw std::invalid_argument("seeds: empty list");
    return seeds;
}

void add_train_flags(CLI::App* cmd, train::TrainConfig& cfg, std::string& fanouts_csv) {
    cmd->add_option("--lr", cfg.lr, "learning rate");
    cmd->add_option("--epochs", cfg.epochs, "training epochs");
    cmd->add_option("--layers", cfg.layers, "GNN layers per tower");
    cmd->add_option("--hidden", cfg.hidden, "hidden channels");
    cmd->add_option("--tau", cfg.tau, "contrastive temperature");
    cmd->add_option("--lambda1", cfg.lambda1, "adjacency loss weight");
    cmd->add_option("--lambda2", cfg.lambda2, "feature loss weight");
    cmd->add_option("--batch-size", cfg.batch_size, "0 = auto");
    cmd->add_option("--fanouts", fanouts_csv, "comma-separated sampling fanouts");
    cmd->add_option("--seed", cfg.seed, "RNG seed");
    cmd->add_flag("--grid-mode", cfg.grid_mode, "restrict values to the published grids");
    cmd->add_flag("--disable-reconstruction", cfg.disable_reconstruction,
                  "ablation: contrastive-only");
    cmd->add_flag("--disable-contrastive", cfg.disable_contrastive,
                  "ablation: autoencoder-only");
    std::map<std::string, model::Backbone> backbones{
        {"norm_conv", model::Backbone::norm_conv}, {"gin", model::Backbone::gin}};
    cmd->add_option("--backbone", cfg.backbone, "norm_conv | gin")
        ->transform(CLI::CheckedTransformer(backbones, CLI::ignore_case));
}

train::TrainConfig build_config(const std::string& config_file,
                                const train::TrainConfig& overrides,
                                const CLI::App* cmd, const std::string& fanouts_csv) {
    train::TrainConfig cfg;
    if (!config_file.empty()) io::load_config_file(cfg, config_file);
    // CLI flags override file values; only apply flags the user actually set
    auto used = [&](const std::string& name) { return cmd->count(name) > 0; };
    if (used("--lr")) cfg.lr = overrides.lr;
    if (used("--epochs")) cfg.epochs = overrides.epochs;
    if (used("--layers")) cfg.layers = overrides.layers;
    if (used("--hidden")) cfg.hidden = overrides.hidden;
    if (used("--tau")) cfg.tau = overrides.tau;
    if (used("--lambda1")) cfg.lambda1 = overrides.lambda1;
    if (used("--lambda2")) cfg.lambda2 = overrides.lambda2;
    if (used("--batch-size")) cfg.batch_size = overrides.batch_size;
    if (used("--seed")) cfg.seed = overrides.seed;
    if (used("--grid-mode")) cfg.grid_mode = overrides.grid_mode;
    if (used("--disable-reconstruction"))
        cfg.disable_reconstruction = overrides.disable_reconstruction;
    if (used("--disable-contrastive"))
        cfg.disable_contrastive = overrides.disable_contrastive;
    if (used("--backbone")) cfg.backbone = overrides.backbone;
    if (used("--fanouts")) io::apply_config_entry(cfg, "fanouts", fanouts_csv);
    return cfg;
}

void write_metrics_file(const fs::path& path, const train::AggregateMetrics& agg) {
    std::vector<std::pair<std::string, std::string>> kv;
    char buf[64];
    auto f = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return std::string(buf);
    };
    for (const auto& m : agg.per_seed) {
        std::string p = "seed." + std::to_string(m.seed) + ".";
        kv.emplace_back(p + "roc_auc", f(m.roc_auc));
        kv.emplace_back(p + "ap", f(m.ap));
        kv.emplace_back(p + "cg_area", f(m.cg_area));
    }
    kv.emplace_back("roc_auc.mean", f(agg.mean_roc_auc));
    kv.emplace_back("roc_auc.std", f(agg.std_roc_auc));
    kv.emplace_back("ap.mean", f(agg.mean_ap));
    kv.emplace_back("ap.std", f(agg.std_ap));
    kv.emplace_back("cg_area.mean", f(agg.mean_cg_area));
    kv.emplace_back("cg_area.std", f(agg.std_cg_area));
    io::write_kv(path, kv);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Janus: Euclidean-hyperbolic node anomaly detection"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    const std::string cmdline = join_args(argc, argv);
    const auto t0 = std::chrono::steady_clock::now();
    auto elapsed = [&] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    };

    // prepare
    auto* prepare = app.add_subcommand("prepare", "ingest edge list + features into a bundle");
    std::string edges_file, features_file, labels_file, out_dir;
    int d_rw = 4, max_deg = -1;
    prepare->add_option("--edges", edges_file, "edge list file")->required();
    prepare->add_option("--features", features_file, "feature CSV")->required();
    prepare->add_option("--labels", labels_file, "0/1 label file");
    prepare->add_option("--d-rw", d_rw, "random-walk feature length");
    prepare->add_option("--max-deg", max_deg, "degree one-hot clamp (-1 = auto)");
    prepare->add_option("-o,--out", out_dir, "bundle directory");

    // synth
    auto* synth = app.add_subcommand("synth", "generate a synthetic anomaly bundle");
    eval::InjectionSpec spec;
    std::string base_model = "erdos_renyi", synth_out;
    int synth_d_rw = 4, synth_max_deg = -1;
    synth->add_option("--n", spec.n, "node count");
    synth->add_option("--base", base_model, "erdos_renyi | barabasi_albert");
    synth->add_option("--edge-param", spec.edge_param, "ER probability / BA degree");
    synth->add_option("--dim", spec.feature_dim, "feature dimension");
    synth->add_option("--contextual", spec.contextual_count, "contextual anomaly count");
    synth->add_option("--structural", spec.structural_count, "structural anomaly count");
    synth->add_option("--clique", spec.clique_size, "structural clique size");
    synth->add_option("--scale", spec.outlier_scale, "contextual outlier scale");
    synth->add_option("--seed", spec.seed, "generator seed");
    synth->add_option("--d-rw", synth_d_rw, "random-walk feature length");
    synth->add_option("--max-deg", synth_max_deg, "degree one-hot clamp (-1 = auto)");
    synth->add_option("-o,--out", synth_out, "bundle directory");

    // train
    auto* train_cmd = app.add_subcommand("train", "train on a bundle");
    std::string train_bundle, config_file, train_out, train_fanouts;
    train::TrainConfig overrides;
    train_cmd->add_option("--bundle", train_bundle, "bundle directory")->required();
    train_cmd->add_option("--config", config_file, "key = value config file");
    train_cmd->add_option("-o,--out", train_out, "run directory");
    add_train_flags(train_cmd, overrides, train_fanouts);

    // score
    auto* score_cmd = app.add_subcommand("score", "score a bundle with a checkpoint");
    std::string score_bundle, score_ckpt, score_out;
    score_cmd->add_option("--bundle", score_bundle, "bundle directory")->required();
    score_cmd->add_option("--checkpoint", score_ckpt, "checkpoint directory")->required();
    score_cmd->add_option("-o,--out", score_out, "run directory");

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "evaluate a score file against labels");
    std::string eval_scores, eval_bundle, eval_out;
    eval_cmd->add_option("--scores", eval_scores, "score file")->required();
    eval_cmd->add_option("--bundle", eval_bundle, "labeled bundle directory")->required();
    eval_cmd->add_option("-o,--out", eval_out, "run directory");

    // run-seeds
    auto* seeds_cmd = app.add_subcommand("run-seeds", "train/score/eval over several seeds");
    std::string seeds_bundle, seeds_list = "1,2,3,4,5", seeds_out, seeds_config,
                seeds_fanouts;
    train::TrainConfig seed_overrides;
    seeds_cmd->add_option("--bundle", seeds_bundle, "labeled bundle directory")->required();
    seeds_cmd->add_option("--seeds", seeds_list, "comma-separated seed list");
    seeds_cmd->add_option("--config", seeds_config, "key = value config file");
    seeds_cmd->add_option("-o,--out", seeds_out, "run directory");
    add_train_flags(seeds_cmd, seed_overrides, seeds_fanouts);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*prepare) {
            fs::path out = resolve_out(out_dir, "prepare");
            int max_id = -1;
            auto edge_pairs = graph::read_edge_list(edges_file, max_id);
            graph::Mat features = graph::read_feature_csv(features_file);
            if (max_id >= features.rows())
                throw std::invalid_argument(
                    "edge node id " + std::to_string(max_id) +
                    " exceeds feature row count " + std::to_string(features.rows()));
            std::optional<std::vector<int>> labels;
            if (!labels_file.empty()) {
                labels = graph::read_label_file(labels_file);
                if (labels->size() != static_cast<size_t>(features.rows()))
                    throw std::invalid_argument("label count != feature row count");
            }
            const int n = static_cast<int>(features.rows());
            auto g = graph::Graph::from_edges(n, edge_pairs, std::move(features),
                                              std::move(labels));
            int md = max_deg > 0 ? max_deg : graph::default_max_deg(g);
            auto views = graph::build_views(g, d_rw, md);
            io::write_bundle(out, g, views, d_rw, md,
                             {{"source.edges", io::digest_file(edges_file)},
                              {"source.features", io::digest_file(features_file)}});
            write_run_log(out, cmdline, elapsed());
            std::cout << "bundle written to " << out.string() << "\n";
        } else if (*synth) {
            fs::path out = resolve_out(synth_out, "synth");
            if (base_model == "erdos_renyi") spec.base_model = eval::BaseModel::erdos_renyi;
            else if (base_model == "barabasi_albert")
                spec.base_model = eval::BaseModel::barabasi_albert;
            else throw std::invalid_argument("--base: unknown model '" + base_model + "'");
            auto g = eval::inject_anomalies(spec);
            int md = synth_max_deg > 0 ? synth_max_deg : graph::default_max_deg(g);
            auto views = graph::build_views(g, synth_d_rw, md);
            io::write_bundle(out, g, views, synth_d_rw, md,
                             {{"generator.seed", std::to_string(spec.seed)}});
            write_run_log(out, cmdline, elapsed());
            std::cout << "bundle written to " << out.string() << "\n";
        } else if (*train_cmd) {
            fs::path out = resolve_out(train_out, "train");
            io::Bundle b = io::read_bundle(train_bundle);
            train::TrainConfig cfg =
                build_config(config_file, overrides, train_cmd, train_fanouts);
            cfg.d_rw = b.d_rw;
            cfg.max_deg = b.max_deg;
            train::TrainReport report;
            train::TrainedModel tm = train::train(b.graph, cfg, &report);
            fs::create_directories(out);
            io::write_checkpoint(out / "checkpoint", tm);
            {
                std::ofstream hist(out / "train_report.txt");
                hist << "epoch\tcl\tadj\tnode\ttotal\n";
                for (size_t e = 0; e < report.history.size(); ++e) {
                    const auto& h = report.history[e];
                    hist << e + 1 << "\t" << h.cl << "\t" << h.adj << "\t" << h.node
                         << "\t" << h.total << "\n";
                }
                hist << "# best_epoch = " << report.best_epoch + 1 << "\n";
            }
            write_run_log(out, cmdline, elapsed(),
                          {{"bundle", fs::path(train_bundle).string()},
                           {"best_epoch", std::to_string(report.best_epoch + 1)}});
            std::cout << "checkpoint written to " << (out / "checkpoint").string() << "\n";
        } else if (*score_cmd) {
            fs::path out = resolve_out(score_out, "score");
            io::Bundle b = io::read_bundle(score_bundle);
            train::TrainedModel tm = io::read_checkpoint(score_ckpt, b.graph);
            Eigen::VectorXd scores = train::score(b.graph, tm);
            fs::create_directories(out);
            io::write_scores(out / "scores.tsv", scores);
            write_run_log(out, cmdline, elapsed());
            std::cout << "scores written to " << (out / "scores.tsv").string() << "\n";
        } else if (*eval_cmd) {
            fs::path out = resolve_out(eval_out, "eval");
            io::Bundle b = io::read_bundle(eval_bundle);
            if (!b.labeled)
                throw std::invalid_argument("eval: bundle is unlabeled");
            Eigen::VectorXd scores = io::read_scores(eval_scores);
            if (scores.size() != b.graph.n)
                throw std::invalid_argument(
                    "eval: score count " + std::to_string(scores.size()) +
                    " != node count " + std::to_string(b.graph.n));
            eval::RankedEval re = eval::evaluate(scores, *b.graph.labels);
            fs::create_directories(out);
            char buf[64];
            auto f = [&](double v) {
                std::snprintf(buf, sizeof(buf), "%.17g", v);
                return std::string(buf);
            };
            io::write_kv(out / "metrics.txt", {{"roc_auc", f(re.roc_auc)},
                                               {"ap", f(re.ap)},
                                               {"cg_area", f(re.cg_area)}});
            io::write_cg_curve(out / "cg_curve.csv", re.cg_curve);
            write_run_log(out, cmdline, elapsed());
            std::cout << "roc_auc = " << re.roc_auc << "\nap = " << re.ap
                      << "\ncg_area = " << re.cg_area << "\n";
        } else if (*seeds_cmd) {
            fs::path out = resolve_out(seeds_out, "run-seeds");
            io::Bundle b = io::read_bundle(seeds_bundle);
            if (!b.labeled)
                throw std::invalid_argument("run-seeds: bundle is unlabeled");
            train::TrainConfig cfg =
                build_config(seeds_config, seed_overrides, seeds_cmd, seeds_fanouts);
            cfg.d_rw = b.d_rw;
            cfg.max_deg = b.max_deg;
            auto seeds = parse_seed_list(seeds_list);
            std::vector<Eigen::VectorXd> all_scores;
            train::AggregateMetrics agg =
                train::run_seeds(b.graph, cfg, seeds, &all_scores);
            fs::create_directories(out);
            for (size_t i = 0; i < seeds.size(); ++i)
                io::write_scores(out / ("scores_seed" + std::to_string(seeds[i]) + ".tsv"),
                                 all_scores[i]);
            write_metrics_file(out / "metrics.txt", agg);
            write_run_log(out, cmdline, elapsed());
            std::cout << "roc_auc = " << agg.mean_roc_auc << " +/- " << agg.std_roc_auc
                      << "\nap = " << agg.mean_ap << " +/- " << agg.std_ap
                      << "\ncg_area = " << agg.mean_cg_area << " +/- "
                      << agg.std_cg_area << "\n";
        }
    } catch (const train::DivergenceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
