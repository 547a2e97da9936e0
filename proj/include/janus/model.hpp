#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "janus/graph.hpp"
#include "janus/rng.hpp"
#include "janus/tensor.hpp"

namespace janus::model {

using ad::CsrMatrix;
using ad::Mat;
using ad::Tensor;

enum class Backbone { norm_conv, gin };

struct EncoderConfig {
    int layers = 3;
    int hidden = 32;
    Backbone backbone = Backbone::norm_conv;
};

// The four embedding families: Euclidean matrices, hyperboloid points in
// ambient coordinates, and their tangent coordinates at the origin.
struct DualEmbedding {
    Tensor Hs, Hg;      // n x k Euclidean
    Tensor Hhs, Hhg;    // n x (k+1) on the manifold
    Tensor Ths, Thg;    // n x k tangent coordinates
};

struct Reconstruction {
    Tensor eucl_s, eucl_g;          // feature reconstructions, view widths
    Tensor hyp_s, hyp_g;            // manifold points, ambient width
    Tensor adj_es, adj_eg, adj_hs, adj_hg;  // sigmoid(H H^T), n x n
};

// Row-wise exp_origin of [0, x]; plain forward helper (no gradients).
Mat lift_to_hyperboloid(const Mat& x);

// The eight towers of the architecture: Euclidean/hyperbolic encoders and
// decoders for the s and g views.  Parameter sets are disjoint.
class JanusModel {
public:
    JanusModel(EncoderConfig cfg, int width_s, int width_g, std::uint64_t seed);

    DualEmbedding encode(const Tensor& xs, const Tensor& xg,
                         const std::shared_ptr<const CsrMatrix>& op,
                         const std::shared_ptr<const CsrMatrix>& op_plain) const;
    Reconstruction decode(const DualEmbedding& emb,
                          const std::shared_ptr<const CsrMatrix>& op,
                          const std::shared_ptr<const CsrMatrix>& op_plain) const;

    std::vector<Tensor>& parameters() { return params_; }
    const std::vector<Tensor>& parameters() const { return params_; }
    const std::vector<std::string>& parameter_names() const { return names_; }

    const EncoderConfig& config() const { return cfg_; }
    int width_s() const { return width_s_; }
    int width_g() const { return width_g_; }

private:
    struct Tower {
        std::vector<std::vector<Tensor>> layers;  // 1 weight (norm_conv) or 2 (gin)
    };

    Tower build_tower(const std::string& name, int in_w, int out_w,
                      janus::rng::SplitMix64& rng);
    Tensor tower_forward(const Tower& t, Tensor h,
                         const std::shared_ptr<const CsrMatrix>& op,
                         const std::shared_ptr<const CsrMatrix>& op_plain) const;

    EncoderConfig cfg_;
    int width_s_, width_g_;
    Tower enc_e_s_, enc_e_g_, enc_h_s_, enc_h_g_;
    Tower dec_e_s_, dec_e_g_, dec_h_s_, dec_h_g_;
    std::vector<Tensor> params_;
    std::vector<std::string> names_;
};

Tensor reconstruct_adjacency(const Tensor& h);

// Plain adjacency with no self-loops, entries 1 (the GIN aggregation
// operator).
std::shared_ptr<CsrMatrix> plain_adjacency(const janus::graph::Graph& g);

}  // namespace janus::model
