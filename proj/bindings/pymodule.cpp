// Python bindings for the main operations: geometry, graph views, anomaly
// injection, training/scoring, and ranking metrics.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "janus/evalkit.hpp"
#include "janus/hypgeom.hpp"
#include "janus/trainer.hpp"

namespace py = pybind11;
using namespace janus;

namespace {

graph::Graph make_graph(int n, const std::vector<std::pair<int, int>>& edges,
                        const Eigen::MatrixXd& features,
                        std::optional<std::vector<int>> labels) {
    graph::Mat x = features;
    return graph::Graph::from_edges(n, edges, std::move(x), std::move(labels));
}

}  // namespace

PYBIND11_MODULE(_janus, m) {
    m.doc() = "dual Euclidean/hyperbolic graph anomaly detection";

    // ---- geometry ------------------------------------------------------
    m.def(
        "exp_origin",
        [](const Eigen::VectorXd& v) {
            return geometry::exp_origin(geometry::HTangent(v)).coords;
        },
        py::arg("v"), "exponential map at the hyperboloid origin");
    m.def(
        "log_origin",
        [](const Eigen::VectorXd& x) {
            return geometry::log_origin(geometry::HPoint(x)).coords;
        },
        py::arg("x"), "logarithmic map at the hyperboloid origin");
    m.def(
        "geodesic_dist",
        [](const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
            return geometry::geodesic_dist(geometry::HPoint(x), geometry::HPoint(y));
        },
        py::arg("x"), py::arg("y"));
    m.def("minkowski_inner", &geometry::minkowski_inner, py::arg("a"), py::arg("b"));
    m.def("bounded", &geometry::bounded, py::arg("d"), py::arg("k") = 1.0,
          "bounded metric transform k d / (1 + d)");
    m.def(
        "product_distance",
        [](const Eigen::VectorXd& e1, const Eigen::VectorXd& h1,
           const Eigen::VectorXd& e2, const Eigen::VectorXd& h2) {
            return geometry::product_distance(e1, geometry::HPoint(h1), e2,
                                              geometry::HPoint(h2));
        },
        py::arg("e1"), py::arg("h1"), py::arg("e2"), py::arg("h2"));

    // ---- graphs --------------------------------------------------------
    py::class_<graph::Graph>(m, "Graph")
        .def(py::init(&make_graph), py::arg("n"), py::arg("edges"), py::arg("features"),
             py::arg("labels") = std::nullopt)
        .def_readonly("n", &graph::Graph::n)
        .def_readonly("adj", &graph::Graph::adj)
        .def_property_readonly("features",
                               [](const graph::Graph& g) { return Eigen::MatrixXd(g.X); })
        .def_property_readonly("labels",
                               [](const graph::Graph& g) { return g.labels; })
        .def("degree", &graph::Graph::degree, py::arg("node"))
        .def("num_edges", &graph::Graph::num_edges);

    m.def(
        "build_views",
        [](const graph::Graph& g, int d_rw, int max_deg) {
            if (max_deg <= 0) max_deg = graph::default_max_deg(g);
            auto v = graph::build_views(g, d_rw, max_deg);
            return py::make_tuple(Eigen::MatrixXd(v.Xs), Eigen::MatrixXd(v.Xg));
        },
        py::arg("graph"), py::arg("d_rw") = 4, py::arg("max_deg") = -1,
        "returns (x_s, x_g) node view matrices");

    // ---- synthetic benchmark -------------------------------------------
    py::class_<eval::InjectionSpec>(m, "InjectionSpec")
        .def(py::init<>())
        .def_readwrite("n", &eval::InjectionSpec::n)
        .def_readwrite("edge_param", &eval::InjectionSpec::edge_param)
        .def_readwrite("feature_dim", &eval::InjectionSpec::feature_dim)
        .def_readwrite("contextual_count", &eval::InjectionSpec::contextual_count)
        .def_readwrite("structural_count", &eval::InjectionSpec::structural_count)
        .def_readwrite("clique_size", &eval::InjectionSpec::clique_size)
        .def_readwrite("outlier_scale", &eval::InjectionSpec::outlier_scale)
        .def_readwrite("seed", &eval::InjectionSpec::seed);
    m.def("synth500", &eval::synth500);
    m.def("inject_anomalies", &eval::inject_anomalies, py::arg("spec"));

    // ---- training and scoring ------------------------------------------
    py::class_<train::TrainConfig>(m, "TrainConfig")
        .def(py::init<>())
        .def_readwrite("lr", &train::TrainConfig::lr)
        .def_readwrite("epochs", &train::TrainConfig::epochs)
        .def_readwrite("layers", &train::TrainConfig::layers)
        .def_readwrite("hidden", &train::TrainConfig::hidden)
        .def_readwrite("d_rw", &train::TrainConfig::d_rw)
        .def_readwrite("max_deg", &train::TrainConfig::max_deg)
        .def_readwrite("tau", &train::TrainConfig::tau)
        .def_readwrite("lambda1", &train::TrainConfig::lambda1)
        .def_readwrite("lambda2", &train::TrainConfig::lambda2)
        .def_property(
            "backbone",
            [](const train::TrainConfig& c) {
                return c.backbone == model::Backbone::gin ? "gin" : "norm_conv";
            },
            [](train::TrainConfig& c, const std::string& name) {
                if (name == "gin")
                    c.backbone = model::Backbone::gin;
                else if (name == "norm_conv")
                    c.backbone = model::Backbone::norm_conv;
                else
                    throw std::invalid_argument("backbone: expected norm_conv or gin");
            })
        .def_readwrite("batch_size", &train::TrainConfig::batch_size)
        .def_readwrite("fanouts", &train::TrainConfig::fanouts)
        .def_readwrite("seed", &train::TrainConfig::seed)
        .def_readwrite("grid_mode", &train::TrainConfig::grid_mode)
        .def_readwrite("disable_reconstruction",
                       &train::TrainConfig::disable_reconstruction)
        .def_readwrite("disable_contrastive", &train::TrainConfig::disable_contrastive);

    py::class_<train::TrainedModel>(m, "TrainedModel");

    m.def(
        "train",
        [](const graph::Graph& g, const train::TrainConfig& cfg) {
            return train::train(g, cfg);
        },
        py::arg("graph"), py::arg("config") = train::TrainConfig{});
    m.def("score", &train::score, py::arg("graph"), py::arg("model"),
          "per-node anomaly scores, higher = more anomalous");

    py::class_<train::SeedMetrics>(m, "SeedMetrics")
        .def_readonly("seed", &train::SeedMetrics::seed)
        .def_readonly("roc_auc", &train::SeedMetrics::roc_auc)
        .def_readonly("ap", &train::SeedMetrics::ap)
        .def_readonly("cg_area", &train::SeedMetrics::cg_area);
    py::class_<train::AggregateMetrics>(m, "AggregateMetrics")
        .def_readonly("per_seed", &train::AggregateMetrics::per_seed)
        .def_readonly("mean_roc_auc", &train::AggregateMetrics::mean_roc_auc)
        .def_readonly("std_roc_auc", &train::AggregateMetrics::std_roc_auc)
        .def_readonly("mean_ap", &train::AggregateMetrics::mean_ap)
        .def_readonly("std_ap", &train::AggregateMetrics::std_ap)
        .def_readonly("mean_cg_area", &train::AggregateMetrics::mean_cg_area)
        .def_readonly("std_cg_area", &train::AggregateMetrics::std_cg_area);
    m.def(
        "run_seeds",
        [](const graph::Graph& g, const train::TrainConfig& cfg,
           const std::vector<std::uint64_t>& seeds) {
            return train::run_seeds(g, cfg, seeds);
        },
        py::arg("graph"), py::arg("config"), py::arg("seeds"));

    // ---- metrics -------------------------------------------------------
    m.def("roc_auc", &eval::roc_auc, py::arg("scores"), py::arg("labels"));
    m.def("average_precision", &eval::average_precision, py::arg("scores"),
          py::arg("labels"));
    m.def(
        "cumulative_gain",
        [](const Eigen::VectorXd& s, const std::vector<int>& y) {
            auto [curve, area] = eval::cumulative_gain(s, y);
            return py::make_tuple(curve, area);
        },
        py::arg("scores"), py::arg("labels"), "returns (curve, area)");

    py::register_exception<train::DivergenceError>(m, "DivergenceError");
}
