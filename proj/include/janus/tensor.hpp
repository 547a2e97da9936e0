#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <vector>

// Minimal dense reverse-mode autodiff engine.  All values are row-major
// double matrices; vectors are n-by-1, scalars 1-by-1.  Ops never mutate
// their inputs; results are recorded for backward when any input requires
// gradients.

namespace janus::ad {

using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Compressed sparse row matrix used as a constant operator (the normalized
// adjacency).  Not a differentiable quantity.
struct CsrMatrix {
    int rows = 0, cols = 0;
    std::vector<int> indptr;   // length rows+1
    std::vector<int> indices;
    std::vector<double> values;

    Mat multiply(const Mat& x) const;
    CsrMatrix transposed() const;
    Mat dense() const;
};

struct Node {
    Mat value;
    Mat grad;                 // lazily allocated, same shape as value
    bool requires_grad = false;
    bool is_leaf = false;
    std::vector<std::shared_ptr<Node>> parents;
    std::function<void(Node&)> backward_fn;  // scatters this->grad into parents

    void ensure_grad();
};

class Tensor {
public:
    Tensor() = default;

    static Tensor constant(Mat v);
    static Tensor param(Mat v);  // leaf with requires_grad

    const Mat& value() const { return node_->value; }
    const Mat& grad() const { return node_->grad; }
    bool requires_grad() const { return node_ && node_->requires_grad; }
    bool defined() const { return static_cast<bool>(node_); }
    long rows() const { return node_->value.rows(); }
    long cols() const { return node_->value.cols(); }

    void zero_grad();
    void set_value(Mat v) { node_->value = std::move(v); }

    std::shared_ptr<Node> node_;
};

// The ordered record of operations reachable from a scalar output.
struct Tape {
    std::vector<Node*> order;  // topological, leaves first
    static Tape trace(const Tensor& output);
    void run_backward() const;
};

// Populates grads of all requires_grad leaves; accumulates across calls.
// Throws std::invalid_argument if loss is not scalar.
void backward(const Tensor& loss);

// ---- forward ops ------------------------------------------------------

Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);       // elementwise
Tensor scale(const Tensor& a, double c);
Tensor matmul(const Tensor& a, const Tensor& b);
Tensor matmul_nt(const Tensor& a, const Tensor& b); // a * b^T
Tensor spmm(std::shared_ptr<const CsrMatrix> s, const Tensor& x);

Tensor relu(const Tensor& a);
Tensor sigmoid(const Tensor& a);
Tensor cosh_ew(const Tensor& a);
Tensor sinh_ew(const Tensor& a);
// arcosh with input clamped to [1, inf); subgradient 0 at the boundary.
Tensor arcosh_clamped(const Tensor& a);
// x / (1 + x) elementwise; defined for x >= 0.
Tensor bounded_unit(const Tensor& a);

Tensor sum(const Tensor& a);          // 1x1
Tensor rowsum(const Tensor& a);       // n x 1
Tensor diagonal(const Tensor& a);     // of a square matrix, n x 1
Tensor row_l2_norm(const Tensor& a);  // n x 1, subgradient 0 at zero rows

Tensor logsumexp_rows(const Tensor& a);          // n x 1
Tensor logsumexp_offdiag_rows(const Tensor& a);  // square input, n >= 2

Tensor concat_cols(const Tensor& a, const Tensor& b);
Tensor slice_cols(const Tensor& a, long start, long count);
Tensor gather_rows(const Tensor& a, std::vector<int> idx);

// Row-wise exponential map at the hyperboloid origin: n x d tangent
// coordinates to n x (d+1) ambient points.
Tensor exp_origin_rows(const Tensor& x);
// Row-wise logarithmic map at the origin: n x (d+1) ambient to n x d.
Tensor log_origin_rows(const Tensor& p);

// Pairwise distance matrices (n x m).
Tensor pairwise_euclid(const Tensor& a, const Tensor& b);
Tensor pairwise_lorentz(const Tensor& p, const Tensor& q);
// Row-by-row geodesic distances (n x 1).
Tensor rowwise_lorentz(const Tensor& p, const Tensor& q);

// ---- gradient checking ------------------------------------------------

struct GradcheckReport {
    double max_rel_err = 0.0;
    bool pass = false;
};

// Rebuilds the scalar function around the given leaf parameters, compares
// reverse-mode gradients against central finite differences.
GradcheckReport gradcheck(const std::function<Tensor(const std::vector<Tensor>&)>& f,
                          std::vector<Mat> points, double h, double tol);

}  // namespace janus::ad
