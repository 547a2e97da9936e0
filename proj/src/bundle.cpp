#include "janus/bundle.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace janus::io {

namespace {

void write_doubles(const fs::path& path, const double* data, size_t count) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(data),
              static_cast<std::streamsize>(count * sizeof(double)));
}

std::vector<double> read_doubles(const fs::path& path, size_t expect) {
    std::ifstream in(path, std::ios::binary | std::ios::ate);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    auto size = static_cast<size_t>(in.tellg());
    if (size != expect * sizeof(double))
        throw std::runtime_error(path.string() + ": unexpected size " +
                                 std::to_string(size));
    std::vector<double> buf(expect);
    in.seekg(0);
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(size));
    return buf;
}

void write_matrix(const fs::path& path, const graph::Mat& m) {
    write_doubles(path, m.data(), static_cast<size_t>(m.size()));
}

graph::Mat read_matrix(const fs::path& path, long rows, long cols) {
    auto buf = read_doubles(path, static_cast<size_t>(rows) * cols);
    graph::Mat m(rows, cols);
    std::copy(buf.begin(), buf.end(), m.data());
    return m;
}

int kv_int(const KvMap& kv, const std::string& key) {
    auto it = kv.find(key);
    if (it == kv.end()) throw std::runtime_error("manifest: missing key " + key);
    return std::stoi(it->second);
}

double kv_double(const KvMap& kv, const std::string& key) {
    auto it = kv.find(key);
    if (it == kv.end()) throw std::runtime_error("manifest: missing key " + key);
    return std::stod(it->second);
}

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

std::string digest_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for digest: " + path.string());
    std::uint64_t h = 0xcbf29ce484222325ULL;
    char buf[65536];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 0x100000001b3ULL;
        }
        if (!in) break;
    }
    char out[17];
    std::snprintf(out, sizeof(out), "%016llx", static_cast<unsigned long long>(h));
    return out;
}

void write_kv(const fs::path& path,
              const std::vector<std::pair<std::string, std::string>>& kv) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    for (const auto& [k, v] : kv) out << k << " = " << v << "\n";
}

KvMap read_kv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    KvMap kv;
    std::string line;
    while (std::getline(in, line)) {
        size_t first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(path.string() + ": malformed key-value line: " + line);
        auto trim = [](std::string s) {
            size_t a = s.find_first_not_of(" \t\r");
            size_t b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return kv;
}

// ---- bundle -----------------------------------------------------------

void write_bundle(const fs::path& dir, const graph::Graph& g,
                  const graph::NodeViews& views, int d_rw, int max_deg,
                  const std::vector<std::pair<std::string, std::string>>& extra_manifest) {
    fs::create_directories(dir);

    {
        std::ofstream out(dir / "graph.edges");
        out << "# undirected edge list, one edge per line\n";
        for (int i = 0; i < g.n; ++i)
            for (int j : g.adj[i])
                if (i < j) out << i << " " << j << "\n";
    }
    write_matrix(dir / "features.bin", g.X);
    write_matrix(dir / "views.bin", views.Xg);
    if (g.labels) {
        std::ofstream out(dir / "labels.txt");
        for (int l : *g.labels) out << l << "\n";
    }

    std::vector<std::pair<std::string, std::string>> kv = {
        {"format", "janus-bundle-1"},
        {"n", std::to_string(g.n)},
        {"feature_dim", std::to_string(g.X.cols())},
        {"view_g_dim", std::to_string(views.Xg.cols())},
        {"d_rw", std::to_string(d_rw)},
        {"max_deg", std::to_string(max_deg)},
        {"labeled", g.labels ? "1" : "0"},
    };
    for (const auto& e : extra_manifest) kv.push_back(e);
    kv.emplace_back("digest.graph.edges", digest_file(dir / "graph.edges"));
    kv.emplace_back("digest.features.bin", digest_file(dir / "features.bin"));
    kv.emplace_back("digest.views.bin", digest_file(dir / "views.bin"));
    if (g.labels) kv.emplace_back("digest.labels.txt", digest_file(dir / "labels.txt"));
    write_kv(dir / "manifest.txt", kv);
}

Bundle read_bundle(const fs::path& dir) {
    KvMap kv = read_kv(dir / "manifest.txt");
    const int n = kv_int(kv, "n");
    const int fdim = kv_int(kv, "feature_dim");
    const int gdim = kv_int(kv, "view_g_dim");

    Bundle b;
    b.d_rw = kv_int(kv, "d_rw");
    b.max_deg = kv_int(kv, "max_deg");
    b.labeled = kv_int(kv, "labeled") != 0;

    int max_id = -1;
    auto edges = graph::read_edge_list((dir / "graph.edges").string(), max_id);
    if (max_id >= n) throw std::runtime_error("bundle: edge id exceeds node count");
    graph::Mat features = read_matrix(dir / "features.bin", n, fdim);
    std::optional<std::vector<int>> labels;
    if (b.labeled) {
        labels = graph::read_label_file((dir / "labels.txt").string());
        if (static_cast<int>(labels->size()) != n)
            throw std::runtime_error("bundle: label count != n");
    }
    b.graph = graph::Graph::from_edges(n, edges, std::move(features), std::move(labels));
    b.views.Xs = b.graph.X;
    b.views.Xg = read_matrix(dir / "views.bin", n, gdim);
    return b;
}

// ---- checkpoint -------------------------------------------------------

void write_checkpoint(const fs::path& dir, const train::TrainedModel& tm) {
    fs::create_directories(dir);
    std::vector<std::pair<std::string, std::string>> kv = {
        {"format", "janus-checkpoint-1"},
        {"width_s", std::to_string(tm.model->width_s())},
        {"width_g", std::to_string(tm.model->width_g())},
        {"resolved_max_deg", std::to_string(tm.resolved_max_deg)},
    };
    for (const auto& e : config_snapshot(tm.cfg)) kv.push_back(e);

    const auto& names = tm.model->parameter_names();
    const auto& params = tm.model->parameters();
    for (size_t i = 0; i < params.size(); ++i) {
        const auto& v = params[i].value();
        kv.emplace_back("param." + names[i],
                        std::to_string(v.rows()) + "x" + std::to_string(v.cols()));
        write_matrix(dir / (names[i] + ".f64"), v);
    }
    write_kv(dir / "manifest.txt", kv);
}

train::TrainedModel read_checkpoint(const fs::path& dir, const graph::Graph& g) {
    KvMap kv = read_kv(dir / "manifest.txt");

    train::TrainConfig cfg;
    for (const auto& [k, v] : kv)
        if (k != "format" && k.rfind("param.", 0) != 0 && k != "width_s" &&
            k != "width_g" && k != "resolved_max_deg")
            apply_config_entry(cfg, k, v);

    train::TrainedModel tm;
    tm.cfg = cfg;
    tm.resolved_max_deg = kv_int(kv, "resolved_max_deg");
    tm.views = graph::build_views(g, cfg.d_rw, tm.resolved_max_deg);

    const int ws = kv_int(kv, "width_s");
    const int wg = kv_int(kv, "width_g");
    if (tm.views.Xs.cols() != ws || tm.views.Xg.cols() != wg)
        throw std::runtime_error(
            "checkpoint: view widths (expected " + std::to_string(ws) + "," +
            std::to_string(wg) + ", found " + std::to_string(tm.views.Xs.cols()) +
            "," + std::to_string(tm.views.Xg.cols()) + ") do not match the graph");

    model::EncoderConfig ecfg{cfg.layers, cfg.hidden, cfg.backbone};
    tm.model = std::make_shared<model::JanusModel>(ecfg, ws, wg, cfg.seed);

    const auto& names = tm.model->parameter_names();
    auto& params = tm.model->parameters();
    for (size_t i = 0; i < params.size(); ++i) {
        auto it = kv.find("param." + names[i]);
        if (it == kv.end())
            throw std::runtime_error("checkpoint: missing parameter " + names[i]);
        long rows = params[i].rows(), cols = params[i].cols();
        std::string expect = std::to_string(rows) + "x" + std::to_string(cols);
        if (it->second != expect)
            throw std::runtime_error("checkpoint: parameter " + names[i] +
                                     " shape mismatch (expected " + expect +
                                     ", found " + it->second + ")");
        params[i].set_value(read_matrix(dir / (names[i] + ".f64"), rows, cols));
    }
    return tm;
}

// ---- scores -----------------------------------------------------------

void write_scores(const fs::path& path, const Eigen::VectorXd& scores) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    for (long i = 0; i < scores.size(); ++i)
        out << i << "\t" << fmt17(scores[i]) << "\n";
}

Eigen::VectorXd read_scores(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::vector<double> vals;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        long id;
        double v;
        if (!(ss >> id >> v))
            throw std::runtime_error(path.string() + ": malformed score line");
        vals.push_back(v);
    }
    Eigen::VectorXd out(static_cast<long>(vals.size()));
    for (size_t i = 0; i < vals.size(); ++i) out[static_cast<long>(i)] = vals[i];
    return out;
}

void write_cg_curve(const fs::path& path,
                    const std::vector<std::pair<double, double>>& curve) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "fraction,gain\n";
    for (const auto& [f, g] : curve) out << fmt17(f) << "," << fmt17(g) << "\n";
}

// ---- config -----------------------------------------------------------

void apply_config_entry(train::TrainConfig& cfg, const std::string& key,
                        const std::string& value) {
    try {
        if (key == "lr") cfg.lr = std::stod(value);
        else if (key == "epochs") cfg.epochs = std::stoi(value);
        else if (key == "layers") cfg.layers = std::stoi(value);
        else if (key == "hidden") cfg.hidden = std::stoi(value);
        else if (key == "d_rw") cfg.d_rw = std::stoi(value);
        else if (key == "max_deg") cfg.max_deg = std::stoi(value);
        else if (key == "tau") cfg.tau = std::stod(value);
        else if (key == "lambda1") cfg.lambda1 = std::stod(value);
        else if (key == "lambda2") cfg.lambda2 = std::stod(value);
        else if (key == "batch_size") cfg.batch_size = std::stoi(value);
        else if (key == "seed") cfg.seed = std::stoull(value);
        else if (key == "grid_mode") cfg.grid_mode = value == "1" || value == "true";
        else if (key == "disable_reconstruction")
            cfg.disable_reconstruction = value == "1" || value == "true";
        else if (key == "disable_contrastive")
            cfg.disable_contrastive = value == "1" || value == "true";
        else if (key == "backbone") {
            if (value == "norm_conv") cfg.backbone = model::Backbone::norm_conv;
            else if (value == "gin") cfg.backbone = model::Backbone::gin;
            else throw std::invalid_argument("backbone: unknown value '" + value + "'");
        } else if (key == "fanouts") {
            cfg.fanouts.clear();
            std::istringstream ss(value);
            std::string tok;
            while (std::getline(ss, tok, ','))
                if (!tok.empty()) cfg.fanouts.push_back(std::stoi(tok));
        } else {
            throw std::invalid_argument("unknown config key '" + key + "'");
        }
    } catch (const std::invalid_argument&) {
        throw;
    } catch (const std::exception&) {
        throw std::invalid_argument(key + ": cannot parse value '" + value + "'");
    }
}

void load_config_file(train::TrainConfig& cfg, const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file: " + path.string());
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        size_t pos = line.find_first_not_of(" \t\r");
        if (pos == std::string::npos || line[pos] == '#') continue;
        size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument(path.string() + ":" + std::to_string(lineno) +
                                        ": expected 'key = value'");
        auto trim = [](std::string s) {
            size_t a = s.find_first_not_of(" \t\r");
            size_t b = s.find_last_not_of(" \t\r");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        apply_config_entry(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
}

std::vector<std::pair<std::string, std::string>> config_snapshot(
    const train::TrainConfig& cfg) {
    std::string fan;
    for (size_t i = 0; i < cfg.fanouts.size(); ++i)
        fan += (i ? "," : "") + std::to_string(cfg.fanouts[i]);
    return {
        {"lr", fmt17(cfg.lr)},
        {"epochs", std::to_string(cfg.epochs)},
        {"layers", std::to_string(cfg.layers)},
        {"hidden", std::to_string(cfg.hidden)},
        {"d_rw", std::to_string(cfg.d_rw)},
        {"max_deg", std::to_string(cfg.max_deg)},
        {"tau", fmt17(cfg.tau)},
        {"lambda1", fmt17(cfg.lambda1)},
        {"lambda2", fmt17(cfg.lambda2)},
        {"backbone", cfg.backbone == model::Backbone::gin ? "gin" : "norm_conv"},
        {"batch_size", std::to_string(cfg.batch_size)},
        {"fanouts", fan},
        {"seed", std::to_string(cfg.seed)},
        {"grid_mode", cfg.grid_mode ? "1" : "0"},
        {"disable_reconstruction", cfg.disable_reconstruction ? "1" : "0"},
        {"disable_contrastive", cfg.disable_contrastive ? "1" : "0"},
    };
}

}  // namespace janus::io
