#pragma once

#include "specmeter/matrix.hpp"

#include <functional>
#include <vector>

namespace specmeter {

using RealFunction = std::function<double(double)>;

// Evaluable callback with a declared support interval.
struct SupportedFunction {
    RealFunction f;
    double lo = 0.0;
    double hi = 0.0;
    double operator()(double x) const { return f(x); }
};

// sign * clamp(x - start, 0, width): a ramp rising by `width` over
// [start, start + width].
struct PiecewiseRamp {
    double start = 0.0;
    double width = 0.0;
    int sign = 1;
    double operator()(double x) const;
};

enum class Curvature { Convex, Concave };

// a * max(x - knot, 0) with a in {+1, -1}; convex for +1, concave for -1.
struct HingePiece {
    double knot = 0.0;
    int sign = 1;
    Curvature curvature() const { return sign > 0 ? Curvature::Convex : Curvature::Concave; }
    double operator()(double x) const;
};

struct LipschitzDecomposition {
    double M = 0.0;
    double delta = 0.0;
    // The staircase ramps g(x + M - k delta), one per step.
    std::vector<PiecewiseRamp> ramps;
    // Convex/concave 1-Lipschitz pieces; runs of equal-sign ramps are merged.
    std::vector<HingePiece> pieces;
    int kappa() const { return static_cast<int>(pieces.size()); }
    // 2 * ceil(2M / delta)
    int kappa_bound() const;

    // Sum of the ramps.
    double evaluate(double x) const;
    // Sum of the hinge pieces; equals evaluate(x) up to rounding.
    double evaluate_pieces(double x) const;
};

constexpr int kDefaultGridPoints = 4096;

// Largest |f(x) - f(y)| / |x - y| over consecutive points of an even grid.
double grid_lipschitz_constant(const RealFunction& f, double lo, double hi, int points = kDefaultGridPoints);

// Staircase approximation of a 1-Lipschitz f vanishing outside [-M, M]:
// g_0 = 0, g_{k+1} = g_k +/- g(x + M - k delta), with + taken when
// f(-M + (k+1) delta) >= g_k(-M + k delta), for k < ceil(2M / delta).
// Throws std::invalid_argument when delta <= 0, M <= 0, or f fails the grid
// Lipschitz / support check by more than 1e-9.
LipschitzDecomposition build_f_delta(const SupportedFunction& f, double M, double delta);

// ||A - B||_HS^2 - sum (lambda_i^A - lambda_i^B)^2; nonnegative by the
// Hoffman-Wielandt inequality.
double check_hoffman_wielandt(const HermitianMatrix& a, const HermitianMatrix& b);

// (1/n) ||A - B||_HS - |int f dL^{A/sqrt n} - int f dL^{B/sqrt n}| for 1-Lipschitz f.
double check_functional_lipschitz(const HermitianMatrix& a, const HermitianMatrix& b, const RealFunction& f);

// lam int f dL^A + (1 - lam) int f dL^B - int f dL^{lam A + (1 - lam) B}
// for convex f, on the unnormalized matrices.
double check_klein_convexity(const HermitianMatrix& a, const HermitianMatrix& b, const RealFunction& f,
                             double lam);

// rank(A - B) / n - kolmogorov(L^A, L^B); the rank counts singular values
// above 1e-10 ||A - B||_HS.
double check_rank_inequality(const HermitianMatrix& a, const HermitianMatrix& b);

// sum ||row_i||^r - sum |lambda_i|^r for 0 < r <= 2.
double check_moment_estimate(const HermitianMatrix& x, double r);

}  // namespace specmeter
