#pragma once

#include <Eigen/Dense>

// Lorentz hyperboloid kernel: points on the upper sheet of <x,x>_L = -1,
// tangent space fixed at the origin o = (1, 0, ..., 0), curvature -1.
// All computations in double precision.

namespace janus::geometry {

using Vec = Eigen::VectorXd;

// Below this tangent norm the exp/log maps collapse to the origin / zero
// vector, avoiding the 0/0 in v/||v||.
inline constexpr double kExpEps = 1e-12;

// Point on H^d in ambient coordinates (length d+1).
struct HPoint {
    Vec coords;

    explicit HPoint(Vec c) : coords(std::move(c)) {}

    int dim() const { return static_cast<int>(coords.size()) - 1; }

    // Projects x0 <- sqrt(1 + ||x_{1:d}||^2), restoring <x,x>_L = -1.
    void renormalize();
};

// Tangent vector at the origin, stored as the Euclidean part v^E (the
// ambient vector is [0, v^E]).
struct HTangent {
    Vec coords;

    explicit HTangent(Vec c) : coords(std::move(c)) {}

    int dim() const { return static_cast<int>(coords.size()); }
};

// -a0*b0 + sum_{i>=1} a_i*b_i.  Throws std::invalid_argument on dimension
// mismatch or length < 2.
double minkowski_inner(const Vec& a, const Vec& b);

HPoint origin(int d);

// arcosh(-<x,y>_L); the argument is clamped to [1, inf) before evaluation.
double geodesic_dist(const HPoint& x, const HPoint& y);

// (cosh||v||, sinh||v|| * v/||v||); exact origin when ||v|| < kExpEps.
HPoint exp_origin(const HTangent& v);

// Inverse of exp_origin; exact zero when the point is within kExpEps of o.
HTangent log_origin(const HPoint& y);

// k * d / (1 + d), a metric of diameter < k.  Throws on d_val < 0 or k <= 0.
double bounded(double d_val, double k);

// D(a1,a2,a3,a4) = 1/2 ( bounded(||a1-a3||, 1) + bounded(d_L(a2,a4), 1) ).
double product_distance(const Vec& a1, const HPoint& a2, const Vec& a3,
                        const HPoint& a4);

}  // namespace janus::geometry
