#include "specmeter/approx.hpp"

#include "specmeter/measures.hpp"
#include "specmeter/spectra.hpp"
#include "specmeter/textio.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace specmeter {

double PiecewiseRamp::operator()(double x) const {
    return sign * std::clamp(x - start, 0.0, width);
}

double HingePiece::operator()(double x) const {
    return sign * std::max(x - knot, 0.0);
}

int LipschitzDecomposition::kappa_bound() const {
    return 2 * static_cast<int>(std::ceil(2.0 * M / delta));
}

double LipschitzDecomposition::evaluate(double x) const {
    double s = 0.0;
    for (const auto& r : ramps) s += r(x);
    return s;
}

double LipschitzDecomposition::evaluate_pieces(double x) const {
    double s = 0.0;
    for (const auto& p : pieces) s += p(x);
    return s;
}

double grid_lipschitz_constant(const RealFunction& f, double lo, double hi, int points) {
    if (points < 2 || !(hi > lo)) throw std::invalid_argument("grid_lipschitz_constant: need points >= 2 and hi > lo");
    double best = 0.0;
    double prev_x = lo;
    double prev_f = f(lo);
    for (int k = 1; k < points; ++k) {
        const double x = lo + (hi - lo) * k / (points - 1);
        const double fx = f(x);
        best = std::max(best, std::abs(fx - prev_f) / (x - prev_x));
        prev_x = x;
        prev_f = fx;
    }
    return best;
}

LipschitzDecomposition build_f_delta(const SupportedFunction& f, double M, double delta) {
    if (!(delta > 0.0)) throw std::invalid_argument("build_f_delta: delta must be > 0");
    if (!(M > 0.0)) throw std::invalid_argument("build_f_delta: M must be > 0");
    const double lip = grid_lipschitz_constant(f.f, -M - 1.0, M + 1.0, kDefaultGridPoints);
    if (lip > 1.0 + 1e-9) {
        throw std::invalid_argument("build_f_delta: f is not 1-Lipschitz (grid slope " + format_double(lip) + ")");
    }
    for (int k = 0; k < kDefaultGridPoints; ++k) {
        const double off = static_cast<double>(k) / (kDefaultGridPoints - 1);
        for (double x : {-M - 1.0 + off, M + off}) {
            if (x < -M || x > M) {
                if (std::abs(f(x)) > 1e-9) {
                    throw std::invalid_argument("build_f_delta: f does not vanish outside [-M, M] (f(" +
                                                format_double(x) + ") = " + format_double(f(x)) + ")");
                }
            }
        }
    }

    LipschitzDecomposition out;
    out.M = M;
    out.delta = delta;
    const int steps = static_cast<int>(std::ceil(2.0 * M / delta));
    out.ramps.reserve(static_cast<std::size_t>(steps));
    for (int k = 0; k < steps; ++k) {
        const double here = -M + k * delta;
        const double next = -M + (k + 1) * delta;
        const int sign = f(next) >= out.evaluate(here) ? 1 : -1;
        out.ramps.push_back({here, delta, sign});
    }
    // A run of equal-sign ramps telescopes to sign * (hinge at run start -
    // hinge at run end).
    for (std::size_t k = 0; k < out.ramps.size();) {
        std::size_t end = k;
        while (end + 1 < out.ramps.size() && out.ramps[end + 1].sign == out.ramps[k].sign) ++end;
        const int sign = out.ramps[k].sign;
        out.pieces.push_back({out.ramps[k].start, sign});
        out.pieces.push_back({out.ramps[end].start + delta, -sign});
        k = end + 1;
    }
    return out;
}

namespace {

void require_same_shape(const HermitianMatrix& a, const HermitianMatrix& b, const char* who) {
    if (a.n() != b.n()) {
        throw std::invalid_argument(std::string(who) + ": shape mismatch (" + std::to_string(a.n()) + " vs " +
                                    std::to_string(b.n()) + ")");
    }
}

double mean_of(const std::vector<double>& values, const RealFunction& f, double scale) {
    double s = 0.0;
    for (double v : values) s += f(v / scale);
    return s / static_cast<double>(values.size());
}

}  // namespace

double check_hoffman_wielandt(const HermitianMatrix& a, const HermitianMatrix& b) {
    require_same_shape(a, b, "check_hoffman_wielandt");
    const auto la = eigenvalues(a).values;
    const auto lb = eigenvalues(b).values;
    double s = 0.0;
    for (std::size_t i = 0; i < la.size(); ++i) s += (la[i] - lb[i]) * (la[i] - lb[i]);
    return (a.matrix() - b.matrix()).hs_norm_squared() - s;
}

double check_functional_lipschitz(const HermitianMatrix& a, const HermitianMatrix& b, const RealFunction& f) {
    require_same_shape(a, b, "check_functional_lipschitz");
    const double n = a.n();
    const double root = std::sqrt(n);
    const double fa = mean_of(eigenvalues(a).values, f, root);
    const double fb = mean_of(eigenvalues(b).values, f, root);
    return std::sqrt((a.matrix() - b.matrix()).hs_norm_squared()) / n - std::abs(fa - fb);
}

double check_klein_convexity(const HermitianMatrix& a, const HermitianMatrix& b, const RealFunction& f,
                             double lam) {
    require_same_shape(a, b, "check_klein_convexity");
    if (!(lam >= 0.0 && lam <= 1.0)) throw std::invalid_argument("check_klein_convexity: lambda must lie in [0, 1]");
    const double fa = mean_of(eigenvalues(a).values, f, 1.0);
    const double fb = mean_of(eigenvalues(b).values, f, 1.0);
    const double fm = mean_of(eigenvalues(HermitianMatrix::combine(a, b, lam)).values, f, 1.0);
    return lam * fa + (1.0 - lam) * fb - fm;
}

double check_rank_inequality(const HermitianMatrix& a, const HermitianMatrix& b) {
    require_same_shape(a, b, "check_rank_inequality");
    const HermitianMatrix diff(a.matrix() - b.matrix());
    const double cutoff = 1e-10 * std::sqrt(diff.hs_norm_squared());
    int rank = 0;
    for (double v : eigenvalues(diff).values) {
        if (std::abs(v) > cutoff) ++rank;
    }
    return static_cast<double>(rank) / a.n() - kolmogorov(esd(a, 1.0), esd(b, 1.0));
}

double check_moment_estimate(const HermitianMatrix& x, double r) {
    if (!(r > 0.0 && r <= 2.0)) throw std::invalid_argument("check_moment_estimate: r must lie in (0, 2]");
    double rows = 0.0;
    for (int i = 0; i < x.n(); ++i) {
        double sq = 0.0;
        for (const auto& z : x.matrix().row(i)) sq += std::norm(z);
        rows += std::pow(std::sqrt(sq), r);
    }
    double eig = 0.0;
    for (double v : eigenvalues(x).values) eig += std::pow(std::abs(v), r);
    return rows - eig;
}

}  // namespace specmeter
