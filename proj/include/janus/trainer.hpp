#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "janus/evalkit.hpp"
#include "janus/graph.hpp"
#include "janus/loss.hpp"
#include "janus/model.hpp"

namespace janus::train {

struct TrainConfig {
    double lr = 1e-3;
    int epochs = 300;
    int layers = 3;
    int hidden = 32;
    int d_rw = 4;
    int max_deg = -1;  // -1: dataset default (95th-percentile degree)
    double tau = 0.6;
    double lambda1 = 0.01;
    double lambda2 = 1.0;
    model::Backbone backbone = model::Backbone::norm_conv;
    int batch_size = 0;        // 0: full-batch up to 2048 nodes, else 512
    std::vector<int> fanouts;  // empty: {10, 10} when sampling
    std::uint64_t seed = 1;
    bool grid_mode = false;    // restrict values to the published grids
    // ablation hooks
    bool disable_reconstruction = false;  // skip decoders (CL-only variant)
    bool disable_contrastive = false;     // autoencoder-only variant
};

// Throws std::invalid_argument with a field-level message.
void validate(const TrainConfig& cfg);

struct TrainReport {
    std::vector<loss::LossBreakdown> history;
    int best_epoch = 0;  // lowest total loss
    double seconds = 0;
    std::string checkpoint_path;
};

// Raised when the loss goes non-finite.
struct DivergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct TrainedModel {
    std::shared_ptr<model::JanusModel> model;
    graph::NodeViews views;  // cached full-graph views
    TrainConfig cfg;
    int resolved_max_deg = 0;
};

TrainedModel train(const graph::Graph& g, const TrainConfig& cfg,
                   TrainReport* report = nullptr);

// Full forward pass with lambda1 = 0; runs full-batch regardless of how
// training sampled (transductive scoring).
Eigen::VectorXd score(const graph::Graph& g, const TrainedModel& tm);

struct SeedMetrics {
    std::uint64_t seed = 0;
    double roc_auc = 0, ap = 0, cg_area = 0;
};

struct AggregateMetrics {
    std::vector<SeedMetrics> per_seed;
    double mean_roc_auc = 0, std_roc_auc = 0;
    double mean_ap = 0, std_ap = 0;
    double mean_cg_area = 0, std_cg_area = 0;
};

// Trains and evaluates once per seed; sample standard deviation.
AggregateMetrics run_seeds(const graph::Graph& g, const TrainConfig& cfg,
                           const std::vector<std::uint64_t>& seeds,
                           std::vector<Eigen::VectorXd>* scores_out = nullptr);

// Adam with beta1 = 0.9, beta2 = 0.999, eps = 1e-8.
class AdamOptimizer {
public:
    AdamOptimizer(std::vector<ad::Tensor>& params, double lr);
    void step();
    void zero_grad();

private:
    std::vector<ad::Tensor>* params_;
    double lr_;
    long t_ = 0;
    std::vector<ad::Mat> m_, v_;
};

}  // namespace janus::train
