#include "janus/hypgeom.hpp"

#include <cmath>
#include <stdexcept>

namespace janus::geometry {

void HPoint::renormalize() {
    const auto d = coords.size() - 1;
    coords[0] = std::sqrt(1.0 + coords.tail(d).squaredNorm());
}

double minkowski_inner(const Vec& a, const Vec& b) {
    if (a.size() != b.size())
        throw std::invalid_argument("minkowski_inner: dimension mismatch");
    if (a.size() < 2)
        throw std::invalid_argument("minkowski_inner: ambient dimension < 2");
    return -a[0] * b[0] + a.tail(a.size() - 1).dot(b.tail(b.size() - 1));
}

HPoint origin(int d) {
    Vec c = Vec::Zero(d + 1);
    c[0] = 1.0;
    return HPoint(std::move(c));
}

double geodesic_dist(const HPoint& x, const HPoint& y) {
    double arg = -minkowski_inner(x.coords, y.coords);
    if (arg < 1.0) arg = 1.0;
    return std::acosh(arg);
}

HPoint exp_origin(const HTangent& v) {
    if (!v.coords.allFinite())
        throw std::invalid_argument("exp_origin: non-finite input");
    const double r = v.coords.norm();
    if (r < kExpEps) return origin(v.dim());
    Vec out(v.dim() + 1);
    out[0] = std::cosh(r);
    out.tail(v.dim()) = (std::sinh(r) / r) * v.coords;
    return HPoint(std::move(out));
}

HTangent log_origin(const HPoint& y) {
    const int d = y.dim();
    const double dist = geodesic_dist(origin(d), y);
    if (dist < kExpEps) return HTangent(Vec::Zero(d));
    // log_o(y) = dist * (y + <o,y>_L o) / ||...||_L; the bracket has zero
    // first coordinate, so its Lorentz norm is the Euclidean norm of the
    // spatial part, which is sinh(dist).
    Vec spatial = y.coords.tail(d);
    return HTangent(dist / spatial.norm() * spatial);
}

double bounded(double d_val, double k) {
    if (d_val < 0.0) throw std::invalid_argument("bounded: negative distance");
    if (k <= 0.0) throw std::invalid_argument("bounded: k must be positive");
    return k * d_val / (1.0 + d_val);
}

double product_distance(const Vec& a1, const HPoint& a2, const Vec& a3,
                        const HPoint& a4) {
    if (a1.size() != a3.size())
        throw std::invalid_argument("product_distance: dimension mismatch");
    const double de = (a1 - a3).norm();
    const double dh = geodesic_dist(a2, a4);
    return 0.5 * (bounded(de, 1.0) + bounded(dh, 1.0));
}

}  // namespace janus::geometry
