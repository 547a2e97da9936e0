#include "janus/tensor.hpp"

#include <cmath>
#include <stdexcept>
#include <unordered_set>
#include <utility>

namespace janus::ad {

namespace {

constexpr double kArcoshClampZone = 1e-12;  // derivative treated as 0 within
constexpr double kNormEps = 1e-12;

std::shared_ptr<Node> make_node(Mat value, std::vector<std::shared_ptr<Node>> parents,
                                std::function<void(Node&)> backward_fn) {
    auto n = std::make_shared<Node>();
    n->value = std::move(value);
    for (auto& p : parents)
        if (p->requires_grad) n->requires_grad = true;
    if (n->requires_grad) {
        n->parents = std::move(parents);
        n->backward_fn = std::move(backward_fn);
    }
    return n;
}

Tensor wrap(std::shared_ptr<Node> n) {
    Tensor t;
    t.node_ = std::move(n);
    return t;
}

void check_same_shape(const Tensor& a, const Tensor& b, const char* op) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw std::invalid_argument(std::string(op) + ": shape mismatch");
}

}  // namespace

// ---- CsrMatrix --------------------------------------------------------

Mat CsrMatrix::multiply(const Mat& x) const {
    if (x.rows() != cols) throw std::invalid_argument("spmm: shape mismatch");
    Mat out = Mat::Zero(rows, x.cols());
    for (int i = 0; i < rows; ++i)
        for (int k = indptr[i]; k < indptr[i + 1]; ++k)
            out.row(i) += values[k] * x.row(indices[k]);
    return out;
}

CsrMatrix CsrMatrix::transposed() const {
    CsrMatrix t;
    t.rows = cols;
    t.cols = rows;
    t.indptr.assign(cols + 1, 0);
    for (int j : indices) ++t.indptr[j + 1];
    for (int j = 0; j < cols; ++j) t.indptr[j + 1] += t.indptr[j];
    t.indices.resize(indices.size());
    t.values.resize(values.size());
    std::vector<int> fill(t.indptr.begin(), t.indptr.end() - 1);
    for (int i = 0; i < rows; ++i)
        for (int k = indptr[i]; k < indptr[i + 1]; ++k) {
            int pos = fill[indices[k]]++;
            t.indices[pos] = i;
            t.values[pos] = values[k];
        }
    return t;
}

Mat CsrMatrix::dense() const {
    Mat out = Mat::Zero(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int k = indptr[i]; k < indptr[i + 1]; ++k)
            out(i, indices[k]) = values[k];
    return out;
}

// ---- Tensor / Tape ----------------------------------------------------

void Node::ensure_grad() {
    if (grad.size() == 0) grad = Mat::Zero(value.rows(), value.cols());
}

Tensor Tensor::constant(Mat v) {
    auto n = std::make_shared<Node>();
    n->value = std::move(v);
    n->is_leaf = true;
    return wrap(std::move(n));
}

Tensor Tensor::param(Mat v) {
    auto n = std::make_shared<Node>();
    n->value = std::move(v);
    n->requires_grad = true;
    n->is_leaf = true;
    return wrap(std::move(n));
}

void Tensor::zero_grad() {
    if (node_) node_->grad = Mat::Zero(node_->value.rows(), node_->value.cols());
}

Tape Tape::trace(const Tensor& output) {
    Tape tape;
    std::unordered_set<Node*> visited;
    // iterative post-order
    std::vector<std::pair<Node*, size_t>> stack;
    stack.emplace_back(output.node_.get(), 0);
    visited.insert(output.node_.get());
    while (!stack.empty()) {
        auto& [node, next] = stack.back();
        if (next < node->parents.size()) {
            Node* p = node->parents[next++].get();
            if (p->requires_grad && !visited.count(p)) {
                visited.insert(p);
                stack.emplace_back(p, 0);
            }
        } else {
            tape.order.push_back(node);
            stack.pop_back();
        }
    }
    return tape;
}

void Tape::run_backward() const {
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        Node* n = *it;
        if (n->backward_fn) {
            for (auto& p : n->parents)
                if (p->requires_grad) p->ensure_grad();
            n->backward_fn(*n);
        }
    }
}

void backward(const Tensor& loss) {
    if (loss.rows() != 1 || loss.cols() != 1)
        throw std::invalid_argument("backward: loss must be scalar");
    if (!loss.requires_grad()) return;
    Tape tape = Tape::trace(loss);
    // non-leaf grads are scratch space for this pass; leaf grads accumulate
    for (Node* n : tape.order)
        if (!n->is_leaf) n->grad = Mat::Zero(n->value.rows(), n->value.cols());
    loss.node_->ensure_grad();
    loss.node_->grad(0, 0) += 1.0;
    tape.run_backward();
}

// ---- elementwise and linear ops ---------------------------------------

Tensor add(const Tensor& a, const Tensor& b) {
    check_same_shape(a, b, "add");
    return wrap(make_node(a.value() + b.value(), {a.node_, b.node_}, [](Node& self) {
        if (self.parents[0]->requires_grad) self.parents[0]->grad += self.grad;
        if (self.parents[1]->requires_grad) self.parents[1]->grad += self.grad;
    }));
}

Tensor sub(const Tensor& a, const Tensor& b) {
    check_same_shape(a, b, "sub");
    return wrap(make_node(a.value() - b.value(), {a.node_, b.node_}, [](Node& self) {
        if (self.parents[0]->requires_grad) self.parents[0]->grad += self.grad;
        if (self.parents[1]->requires_grad) self.parents[1]->grad -= self.grad;
    }));
}

Tensor mul(const Tensor& a, const Tensor& b) {
    check_same_shape(a, b, "mul");
    return wrap(make_node(a.value().cwiseProduct(b.value()), {a.node_, b.node_},
                          [](Node& self) {
        if (self.parents[0]->requires_grad)
            self.parents[0]->grad += self.grad.cwiseProduct(self.parents[1]->value);
        if (self.parents[1]->requires_grad)
            self.parents[1]->grad += self.grad.cwiseProduct(self.parents[0]->value);
    }));
}

Tensor scale(const Tensor& a, double c) {
    return wrap(make_node(c * a.value(), {a.node_}, [c](Node& self) {
        self.parents[0]->grad += c * self.grad;
    }));
}

Tensor matmul(const Tensor& a, const Tensor& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("matmul: shape mismatch");
    return wrap(make_node(a.value() * b.value(), {a.node_, b.node_}, [](Node& self) {
        if (self.parents[0]->requires_grad)
            self.parents[0]->grad += self.grad * self.parents[1]->value.transpose();
        if (self.parents[1]->requires_grad)
            self.parents[1]->grad += self.parents[0]->value.transpose() * self.grad;
    }));
}

Tensor matmul_nt(const Tensor& a, const Tensor& b) {
    if (a.cols() != b.cols()) throw std::invalid_argument("matmul_nt: shape mismatch");
    return wrap(make_node(a.value() * b.value().transpose(), {a.node_, b.node_},
                          [](Node& self) {
        if (self.parents[0]->requires_grad)
            self.parents[0]->grad += self.grad * self.parents[1]->value;
        if (self.parents[1]->requires_grad)
            self.parents[1]->grad += self.grad.transpose() * self.parents[0]->value;
    }));
}

Tensor spmm(std::shared_ptr<const CsrMatrix> s, const Tensor& x) {
    return wrap(make_node(s->multiply(x.value()), {x.node_}, [s](Node& self) {
        // all operators used here are symmetric; transpose kept for generality
        self.parents[0]->grad += s->transposed().multiply(self.grad);
    }));
}

Tensor relu(const Tensor& a) {
    return wrap(make_node(a.value().cwiseMax(0.0), {a.node_}, [](Node& self) {
        self.parents[0]->grad +=
            self.grad.cwiseProduct((self.parents[0]->value.array() > 0.0).cast<double>().matrix());
    }));
}

Tensor sigmoid(const Tensor& a) {
    Mat v = (1.0 / (1.0 + (-a.value().array()).exp())).matrix();
    return wrap(make_node(std::move(v), {a.node_}, [](Node& self) {
        auto s = self.value.array();
        self.parents[0]->grad += self.grad.cwiseProduct((s * (1.0 - s)).matrix());
    }));
}

Tensor cosh_ew(const Tensor& a) {
    return wrap(make_node(a.value().array().cosh().matrix(), {a.node_}, [](Node& self) {
        self.parents[0]->grad +=
            self.grad.cwiseProduct(self.parents[0]->value.array().sinh().matrix());
    }));
}

Tensor sinh_ew(const Tensor& a) {
    return wrap(make_node(a.value().array().sinh().matrix(), {a.node_}, [](Node& self) {
        self.parents[0]->grad +=
            self.grad.cwiseProduct(self.parents[0]->value.array().cosh().matrix());
    }));
}

Tensor arcosh_clamped(const Tensor& a) {
    Mat v = a.value().array().max(1.0).acosh().matrix();
    return wrap(make_node(std::move(v), {a.node_}, [](Node& self) {
        auto x = self.parents[0]->value.array();
        Mat d = (x > 1.0 + kArcoshClampZone)
                    .select((x * x - 1.0).sqrt().inverse(), 0.0)
                    .matrix();
        self.parents[0]->grad += self.grad.cwiseProduct(d);
    }));
}

Tensor bounded_unit(const Tensor& a) {
    Mat v = (a.value().array() / (1.0 + a.value().array())).matrix();
    return wrap(make_node(std::move(v), {a.node_}, [](Node& self) {
        auto x = self.parents[0]->value.array();
        self.parents[0]->grad += self.grad.cwiseProduct(((1.0 + x).square().inverse()).matrix());
    }));
}

// ---- reductions -------------------------------------------------------

Tensor sum(const Tensor& a) {
    Mat v(1, 1);
    v(0, 0) = a.value().sum();
    return wrap(make_node(std::move(v), {a.node_}, [](Node& self) {
        self.parents[0]->grad.array() += self.grad(0, 0);
    }));
}

Tensor rowsum(const Tensor& a) {
    Mat v = a.value().rowwise().sum();
    return wrap(make_node(std::move(v), {a.node_}, [](Node& self) {
        self.parents[0]->grad.colwise() += self.grad.col(0);
    }));
}

Tensor diagonal(const Tensor& a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("diagonal: square input required");
    Mat v = a.value().diagonal();
    return wrap(make_node(std::move(v), {a.node_}, [](Node& self) {
        self.parents[0]->grad.diagonal() += self.grad.col(0);
    }));
}

Tensor row_l2_norm(const Tensor& a) {
    Mat v = a.value().rowwise().norm();
    return wrap(make_node(std::move(v), {a.node_}, [](Node& self) {
        const Mat& x = self.parents[0]->value;
        for (long i = 0; i < x.rows(); ++i) {
            double r = self.value(i, 0);
            if (r > kNormEps)
                self.parents[0]->grad.row(i) += (self.grad(i, 0) / r) * x.row(i);
        }
    }));
}

Tensor logsumexp_rows(const Tensor& a) {
    const Mat& x = a.value();
    Mat v(x.rows(), 1);
    for (long i = 0; i < x.rows(); ++i) {
        double m = x.row(i).maxCoeff();
        v(i, 0) = m + std::log((x.row(i).array() - m).exp().sum());
    }
    return wrap(make_node(std::move(v), {a.node_}, [](Node& self) {
        const Mat& x = self.parents[0]->value;
        for (long i = 0; i < x.rows(); ++i)
            self.parents[0]->grad.row(i) +=
                self.grad(i, 0) * (x.row(i).array() - self.value(i, 0)).exp().matrix();
    }));
}

Tensor logsumexp_offdiag_rows(const Tensor& a) {
    if (a.rows() != a.cols() || a.rows() < 2)
        throw std::invalid_argument("logsumexp_offdiag_rows: need square input, n >= 2");
    const Mat& x = a.value();
    const long n = x.rows();
    Mat v(n, 1);
    for (long i = 0; i < n; ++i) {
        double m = -std::numeric_limits<double>::infinity();
        for (long j = 0; j < n; ++j)
            if (j != i) m = std::max(m, x(i, j));
        double s = 0.0;
        for (long j = 0; j < n; ++j)
            if (j != i) s += std::exp(x(i, j) - m);
        v(i, 0) = m + std::log(s);
    }
    return wrap(make_node(std::move(v), {a.node_}, [](Node& self) {
        const Mat& x = self.parents[0]->value;
        const long n = x.rows();
        for (long i = 0; i < n; ++i)
            for (long j = 0; j < n; ++j)
                if (j != i)
                    self.parents[0]->grad(i, j) +=
                        self.grad(i, 0) * std::exp(x(i, j) - self.value(i, 0));
    }));
}

// ---- structural ops ---------------------------------------------------

Tensor concat_cols(const Tensor& a, const Tensor& b) {
    if (a.rows() != b.rows()) throw std::invalid_argument("concat_cols: row mismatch");
    Mat v(a.rows(), a.cols() + b.cols());
    v << a.value(), b.value();
    const long ca = a.cols();
    return wrap(make_node(std::move(v), {a.node_, b.node_}, [ca](Node& self) {
        if (self.parents[0]->requires_grad)
            self.parents[0]->grad += self.grad.leftCols(ca);
        if (self.parents[1]->requires_grad)
            self.parents[1]->grad += self.grad.rightCols(self.grad.cols() - ca);
    }));
}

Tensor slice_cols(const Tensor& a, long start, long count) {
    if (start < 0 || count < 0 || start + count > a.cols())
        throw std::invalid_argument("slice_cols: out of range");
    Mat v = a.value().middleCols(start, count);
    return wrap(make_node(std::move(v), {a.node_}, [start, count](Node& self) {
        self.parents[0]->grad.middleCols(start, count) += self.grad;
    }));
}

Tensor gather_rows(const Tensor& a, std::vector<int> idx) {
    Mat v(static_cast<long>(idx.size()), a.cols());
    for (size_t i = 0; i < idx.size(); ++i) {
        if (idx[i] < 0 || idx[i] >= a.rows())
            throw std::invalid_argument("gather_rows: index out of range");
        v.row(static_cast<long>(i)) = a.value().row(idx[i]);
    }
    return wrap(make_node(std::move(v), {a.node_}, [idx = std::move(idx)](Node& self) {
        for (size_t i = 0; i < idx.size(); ++i)
            self.parents[0]->grad.row(idx[i]) += self.grad.row(static_cast<long>(i));
    }));
}

// ---- hyperboloid maps -------------------------------------------------

Tensor exp_origin_rows(const Tensor& x) {
    const Mat& in = x.value();
    const long n = in.rows(), d = in.cols();
    Mat v(n, d + 1);
    for (long i = 0; i < n; ++i) {
        double r = in.row(i).norm();
        if (r < kNormEps) {
            v(i, 0) = 1.0;
            v.row(i).tail(d).setZero();
        } else {
            v(i, 0) = std::cosh(r);
            v.row(i).tail(d) = (std::sinh(r) / r) * in.row(i);
        }
    }
    return wrap(make_node(std::move(v), {x.node_}, [](Node& self) {
        const Mat& in = self.parents[0]->value;
        const long n = in.rows(), d = in.cols();
        for (long i = 0; i < n; ++i) {
            double r = in.row(i).norm();
            double g0 = self.grad(i, 0);
            auto gsp = self.grad.row(i).tail(d);
            if (r < kNormEps) {
                self.parents[0]->grad.row(i) += gsp;
                continue;
            }
            double s, c1;  // sinh(r)/r and (r cosh r - sinh r)/r^3
            if (r < 1e-4) {
                s = 1.0 + r * r / 6.0;
                c1 = 1.0 / 3.0 + r * r / 30.0;
            } else {
                s = std::sinh(r) / r;
                c1 = (r * std::cosh(r) - std::sinh(r)) / (r * r * r);
            }
            double dot = gsp.dot(in.row(i));
            self.parents[0]->grad.row(i) +=
                s * gsp + (g0 * s + c1 * dot) * in.row(i);
        }
    }));
}

Tensor log_origin_rows(const Tensor& p) {
    const Mat& in = p.value();
    const long n = in.rows(), d = in.cols() - 1;
    if (d < 1) throw std::invalid_argument("log_origin_rows: ambient width < 2");
    Mat v(n, d);
    for (long i = 0; i < n; ++i) {
        double rho = in.row(i).tail(d).norm();
        if (rho < kNormEps) {
            v.row(i).setZero();
        } else {
            double dist = std::acosh(std::max(1.0, in(i, 0)));
            v.row(i) = (dist / rho) * in.row(i).tail(d);
        }
    }
    return wrap(make_node(std::move(v), {p.node_}, [](Node& self) {
        const Mat& in = self.parents[0]->value;
        const long n = in.rows(), d = in.cols() - 1;
        for (long i = 0; i < n; ++i) {
            auto g = self.grad.row(i);
            auto sp = in.row(i).tail(d);
            double rho = sp.norm();
            if (rho < kNormEps) {
                self.parents[0]->grad.row(i).tail(d) += g;
                continue;
            }
            double x0 = in(i, 0);
            double dist = std::acosh(std::max(1.0, x0));
            double dot = g.dot(sp);
            if (x0 > 1.0 + kArcoshClampZone)
                self.parents[0]->grad(i, 0) +=
                    dot / (rho * std::sqrt(x0 * x0 - 1.0));
            self.parents[0]->grad.row(i).tail(d) +=
                (dist / rho) * g - (dist * dot / (rho * rho * rho)) * sp;
        }
    }));
}

// ---- distance kernels -------------------------------------------------

Tensor pairwise_euclid(const Tensor& a, const Tensor& b) {
    if (a.cols() != b.cols()) throw std::invalid_argument("pairwise_euclid: dim mismatch");
    const Mat& e = a.value();
    const Mat& f = b.value();
    Mat sq = (e.rowwise().squaredNorm().replicate(1, f.rows()) +
              f.rowwise().squaredNorm().transpose().replicate(e.rows(), 1) -
              2.0 * e * f.transpose())
                 .cwiseMax(0.0);
    Mat v = sq.array().sqrt().matrix();
    return wrap(make_node(std::move(v), {a.node_, b.node_}, [](Node& self) {
        const Mat& e = self.parents[0]->value;
        const Mat& f = self.parents[1]->value;
        Mat w = (self.value.array() > kNormEps)
                    .select(self.grad.array() / self.value.array(), 0.0)
                    .matrix();
        if (self.parents[0]->requires_grad)
            self.parents[0]->grad +=
                w.rowwise().sum().asDiagonal() * e - w * f;
        if (self.parents[1]->requires_grad)
            self.parents[1]->grad +=
                w.colwise().sum().asDiagonal() * f - w.transpose() * e;
    }));
}

namespace {
// M = -<p_i, q_j>_L for ambient row matrices: p0*q0 - spatial dot.
Mat neg_minkowski_gram(const Mat& p, const Mat& q) {
    const long d = p.cols() - 1;
    return p.col(0) * q.col(0).transpose() -
           p.rightCols(d) * q.rightCols(d).transpose();
}
}  // namespace

Tensor pairwise_lorentz(const Tensor& p, const Tensor& q) {
    if (p.cols() != q.cols() || p.cols() < 2)
        throw std::invalid_argument("pairwise_lorentz: dim mismatch");
    Mat m = neg_minkowski_gram(p.value(), q.value());
    Mat v = m.array().max(1.0).acosh().matrix();
    return wrap(make_node(std::move(v), {p.node_, q.node_}, [m = std::move(m)](Node& self) {
        const Mat& p = self.parents[0]->value;
        const Mat& q = self.parents[1]->value;
        const long d = p.cols() - 1;
        Mat w = (m.array() > 1.0 + kArcoshClampZone)
                    .select(self.grad.array() / (m.array().square() - 1.0).sqrt(), 0.0)
                    .matrix();
        // d(-<p,q>_L)/dp = G q with G = diag(1, -1, ..., -1)
        Mat gq(q.rows(), q.cols());
        gq.col(0) = q.col(0);
        gq.rightCols(d) = -q.rightCols(d);
        if (self.parents[0]->requires_grad) self.parents[0]->grad += w * gq;
        Mat gp(p.rows(), p.cols());
        gp.col(0) = p.col(0);
        gp.rightCols(d) = -p.rightCols(d);
        if (self.parents[1]->requires_grad) self.parents[1]->grad += w.transpose() * gp;
    }));
}

Tensor rowwise_lorentz(const Tensor& p, const Tensor& q) {
    if (p.rows() != q.rows() || p.cols() != q.cols() || p.cols() < 2)
        throw std::invalid_argument("rowwise_lorentz: shape mismatch");
    const long n = p.rows(), d = p.cols() - 1;
    Mat m(n, 1);
    for (long i = 0; i < n; ++i)
        m(i, 0) = p.value()(i, 0) * q.value()(i, 0) -
                  p.value().row(i).tail(d).dot(q.value().row(i).tail(d));
    Mat v = m.array().max(1.0).acosh().matrix();
    return wrap(make_node(std::move(v), {p.node_, q.node_}, [m = std::move(m)](Node& self) {
        const Mat& p = self.parents[0]->value;
        const Mat& q = self.parents[1]->value;
        const long n = p.rows(), d = p.cols() - 1;
        for (long i = 0; i < n; ++i) {
            if (m(i, 0) <= 1.0 + kArcoshClampZone) continue;
            double w = self.grad(i, 0) / std::sqrt(m(i, 0) * m(i, 0) - 1.0);
            if (self.parents[0]->requires_grad) {
                self.parents[0]->grad(i, 0) += w * q(i, 0);
                self.parents[0]->grad.row(i).tail(d) -= w * q.row(i).tail(d);
            }
            if (self.parents[1]->requires_grad) {
                self.parents[1]->grad(i, 0) += w * p(i, 0);
                self.parents[1]->grad.row(i).tail(d) -= w * p.row(i).tail(d);
            }
        }
    }));
}

// ---- gradcheck --------------------------------------------------------

GradcheckReport gradcheck(const std::function<Tensor(const std::vector<Tensor>&)>& f,
                          std::vector<Mat> points, double h, double tol) {
    std::vector<Tensor> params;
    params.reserve(points.size());
    for (auto& m : points) params.push_back(Tensor::param(m));

    Tensor loss = f(params);
    if (loss.rows() != 1 || loss.cols() != 1)
        throw std::invalid_argument("gradcheck: function must be scalar-valued");
    for (auto& p : params) p.zero_grad();
    backward(loss);

    GradcheckReport report;
    report.max_rel_err = 0.0;
    for (size_t pi = 0; pi < params.size(); ++pi) {
        Mat analytic = params[pi].grad();
        for (long i = 0; i < points[pi].rows(); ++i)
            for (long j = 0; j < points[pi].cols(); ++j) {
                std::vector<Tensor> pp, pm;
                for (size_t k = 0; k < params.size(); ++k) {
                    Mat v = points[k];
                    if (k == pi) v(i, j) += h;
                    pp.push_back(Tensor::param(std::move(v)));
                    Mat w = points[k];
                    if (k == pi) w(i, j) -= h;
                    pm.push_back(Tensor::param(std::move(w)));
                }
                double fp = f(pp).value()(0, 0);
                double fm = f(pm).value()(0, 0);
                double numeric = (fp - fm) / (2.0 * h);
                double denom = std::max({std::abs(numeric), std::abs(analytic(i, j)), 1.0});
                double rel = std::abs(numeric - analytic(i, j)) / denom;
                report.max_rel_err = std::max(report.max_rel_err, rel);
            }
    }
    report.pass = report.max_rel_err < tol;
    return report;
}

}  // namespace janus::ad
