// Independent reference computations shared by the unit and acceptance tests.
#pragma once

#include "specmeter/ensembles.hpp"
#include "specmeter/matrix.hpp"
#include "specmeter/measures.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

namespace oracle {

using specmeter::cplx;
using specmeter::HermitianMatrix;
using specmeter::Matrix;
using specmeter::RngStream;

// Number of eigenvalues of h below x, by Sylvester's law of inertia: the
// negative pivots of an LDL* elimination of h - xI. Pivot k is the ratio of
// the characteristic polynomials of the leading k x k and (k-1) x (k-1)
// blocks at x, so this is the classical Sturm-type sign count. A zero pivot
// is nudged.
inline int count_below(const Matrix& h, double x) {
    const int n = h.rows();
    std::vector<cplx> a(h.data().begin(), h.data().end());
    for (int i = 0; i < n; ++i) a[static_cast<std::size_t>(i * n + i)] -= x;
    int negative = 0;
    for (int k = 0; k < n; ++k) {
        double pivot = a[static_cast<std::size_t>(k * n + k)].real();
        if (pivot == 0.0) pivot = 1e-300;
        if (pivot < 0.0) ++negative;
        for (int i = k + 1; i < n; ++i) {
            const cplx f = a[static_cast<std::size_t>(i * n + k)] / pivot;
            for (int j = k + 1; j < n; ++j) {
                a[static_cast<std::size_t>(i * n + j)] -= f * a[static_cast<std::size_t>(k * n + j)];
            }
        }
    }
    return negative;
}

// All eigenvalues by bisection on the inertia count, to absolute tolerance tol.
inline std::vector<double> bisection_eigenvalues(const Matrix& h, double tol = 1e-13) {
    const int n = h.rows();
    double bound = 0.0;
    for (int i = 0; i < n; ++i) {
        double row = 0.0;
        for (int j = 0; j < n; ++j) row += std::abs(h(i, j));
        bound = std::max(bound, row);
    }
    bound += 1.0;
    std::vector<double> out;
    for (int k = 0; k < n; ++k) {
        // Smallest x with count_below(x) > k.
        double lo = -bound, hi = bound;
        while (hi - lo > tol * std::max(1.0, bound)) {
            const double mid = 0.5 * (lo + hi);
            (count_below(h, mid) > k ? hi : lo) = mid;
        }
        out.push_back(0.5 * (lo + hi));
    }
    return out;
}

// Upper bound on the smallest singular value of h - lambda I: the residual
// of a few inverse-iteration steps using LU with partial pivoting.
inline double min_singular_upper_bound(const Matrix& h, double lambda, RngStream& s) {
    const int n = h.rows();
    std::vector<cplx> lu(h.data().begin(), h.data().end());
    for (int i = 0; i < n; ++i) lu[static_cast<std::size_t>(i * n + i)] -= lambda;
    const std::vector<cplx> a = lu;
    auto at = [&](int i, int j) -> cplx& { return lu[static_cast<std::size_t>(i * n + j)]; };
    std::vector<int> perm(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
    double scale = 0.0;
    for (const auto& z : a) scale = std::max(scale, std::abs(z));
    for (int k = 0; k < n; ++k) {
        int p = k;
        for (int i = k + 1; i < n; ++i) {
            if (std::abs(at(i, k)) > std::abs(at(p, k))) p = i;
        }
        if (p != k) {
            for (int j = 0; j < n; ++j) std::swap(at(k, j), at(p, j));
            std::swap(perm[static_cast<std::size_t>(k)], perm[static_cast<std::size_t>(p)]);
        }
        if (at(k, k) == cplx(0.0)) at(k, k) = 1e-300 * std::max(scale, 1.0);
        for (int i = k + 1; i < n; ++i) {
            at(i, k) /= at(k, k);
            for (int j = k + 1; j < n; ++j) at(i, j) -= at(i, k) * at(k, j);
        }
    }
    std::vector<cplx> x(static_cast<std::size_t>(n));
    for (auto& z : x) z = cplx(s.uniform() - 0.5, s.uniform() - 0.5);
    double best = INFINITY;
    for (int it = 0; it < 4; ++it) {
        double norm = 0.0;
        for (const auto& z : x) norm += std::norm(z);
        norm = std::sqrt(norm);
        for (auto& z : x) z /= norm;
        double res = 0.0;
        for (int i = 0; i < n; ++i) {
            cplx r = 0.0;
            for (int j = 0; j < n; ++j) r += a[static_cast<std::size_t>(i * n + j)] * x[static_cast<std::size_t>(j)];
            res += std::norm(r);
        }
        best = std::min(best, std::sqrt(res));
        std::vector<cplx> y(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) y[static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])];
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < i; ++j) y[static_cast<std::size_t>(i)] -= at(i, j) * y[static_cast<std::size_t>(j)];
        }
        for (int i = n - 1; i >= 0; --i) {
            for (int j = i + 1; j < n; ++j) y[static_cast<std::size_t>(i)] -= at(i, j) * y[static_cast<std::size_t>(j)];
            y[static_cast<std::size_t>(i)] /= at(i, i);
        }
        x = y;
    }
    return best;
}

inline Matrix random_complex_matrix(int rows, int cols, RngStream& s, bool complex_entries = true) {
    Matrix m(rows, cols);
    const auto law = complex_entries ? specmeter::EntryLaw::complex_gaussian() : specmeter::EntryLaw::gaussian();
    for (auto& z : m.data()) z = specmeter::sample_entry(law, s);
    return m;
}

inline HermitianMatrix random_hermitian(int n, RngStream& s, bool complex_entries = true) {
    return HermitianMatrix(specmeter::symmetrize_from_upper(random_complex_matrix(n, n, s, complex_entries)));
}

// Unitary from Gram-Schmidt on a complex Gaussian matrix (columns).
inline Matrix random_unitary(int n, RngStream& s) {
    Matrix q = random_complex_matrix(n, n, s);
    for (int j = 0; j < n; ++j) {
        for (int pass = 0; pass < 2; ++pass) {
            for (int k = 0; k < j; ++k) {
                cplx dot = 0.0;
                for (int i = 0; i < n; ++i) dot += std::conj(q(i, k)) * q(i, j);
                for (int i = 0; i < n; ++i) q(i, j) -= dot * q(i, k);
            }
        }
        double norm = 0.0;
        for (int i = 0; i < n; ++i) norm += std::norm(q(i, j));
        norm = std::sqrt(norm);
        for (int i = 0; i < n; ++i) q(i, j) /= norm;
    }
    return q;
}

// Singular values of x, descending, as square roots of the eigenvalues of x x*.
inline std::vector<double> singular_values_via_gram(const Matrix& x) {
    const Matrix g = specmeter::symmetrize_from_upper(x * x.adjoint());
    auto ev = bisection_eigenvalues(g, 1e-15);
    std::vector<double> out;
    for (double v : ev) out.push_back(std::sqrt(std::max(v, 0.0)));
    std::sort(out.rbegin(), out.rend());
    return out;
}

// Cyclic Jacobi on a real symmetric matrix (row-major); eigenvalues ascending.
inline std::vector<double> jacobi_eigenvalues(std::vector<double> a, int n) {
    auto at = [&](int i, int j) -> double& { return a[static_cast<std::size_t>(i * n + j)]; };
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0, total = 0.0;
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                total += at(i, j) * at(i, j);
                if (i != j) off += at(i, j) * at(i, j);
            }
        }
        if (off <= 1e-30 * total) break;
        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                if (at(p, q) == 0.0) continue;
                const double theta = (at(q, q) - at(p, p)) / (2.0 * at(p, q));
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double akp = at(k, p), akq = at(k, q);
                    at(k, p) = c * akp - s * akq;
                    at(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = at(p, k), aqk = at(q, k);
                    at(p, k) = c * apk - s * aqk;
                    at(q, k) = s * apk + c * aqk;
                }
            }
        }
    }
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = at(i, i);
    std::sort(out.begin(), out.end());
    return out;
}

// Eigenvalues of a Hermitian matrix through Jacobi on the real 2n embedding
// [Re -Im; Im Re], which doubles every eigenvalue.
inline std::vector<double> jacobi_hermitian_eigenvalues(const Matrix& h) {
    const int n = h.rows(), m = 2 * n;
    std::vector<double> a(static_cast<std::size_t>(m * m));
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const cplx z = h(i, j);
            a[static_cast<std::size_t>(i * m + j)] = z.real();
            a[static_cast<std::size_t>((i + n) * m + j + n)] = z.real();
            a[static_cast<std::size_t>(i * m + j + n)] = -z.imag();
            a[static_cast<std::size_t>((i + n) * m + j)] = z.imag();
        }
    }
    const auto doubled = jacobi_eigenvalues(std::move(a), m);
    std::vector<double> out;
    for (std::size_t k = 0; k < doubled.size(); k += 2) out.push_back(0.5 * (doubled[k] + doubled[k + 1]));
    return out;
}

// Singular values of x, descending, from the eigenvalues of x x* by Jacobi.
inline std::vector<double> singular_values_via_jacobi(const Matrix& x) {
    const Matrix g = specmeter::symmetrize_from_upper(x * x.adjoint());
    std::vector<double> out;
    for (double v : jacobi_hermitian_eigenvalues(g)) out.push_back(std::sqrt(std::max(v, 0.0)));
    std::sort(out.rbegin(), out.rend());
    return out;
}

// Random measure with atoms on multiples of 1/8 in [-2, 2], so distinct
// measures often share atoms.
inline specmeter::EmpiricalMeasure random_lattice_measure(RngStream& s, int max_atoms = 8) {
    const int m = 1 + static_cast<int>(s.next_u64() % static_cast<std::uint64_t>(max_atoms));
    std::vector<specmeter::Atom> atoms;
    double total = 0.0;
    for (int k = 0; k < m; ++k) {
        const double pos = std::round((4.0 * s.uniform() - 2.0) * 8.0) / 8.0;
        const double w = 0.1 + s.uniform();
        atoms.push_back({pos, w});
        total += w;
    }
    double rest = 0.0;
    for (std::size_t k = 0; k + 1 < atoms.size(); ++k) {
        atoms[k].weight /= total;
        rest += atoms[k].weight;
    }
    atoms.back().weight = 1.0 - rest;
    return specmeter::EmpiricalMeasure(atoms);
}

// First t on a geometric grid of ratio 1 + 1e-6 above b + 1 with n l(t) <= t^2.
inline double bn_grid_oracle(const specmeter::EntryLaw& law, double b, long long n) {
    double t = b + 1.0;
    while (static_cast<double>(n) * specmeter::truncated_second_moment(law, t) > t * t) t *= 1.0 + 1e-6;
    return t;
}

// Composite Simpson rule with m (even) panels.
template <typename F>
double simpson(F f, double a, double b, int m) {
    const double h = (b - a) / m;
    double s = f(a) + f(b);
    for (int k = 1; k < m; ++k) s += f(a + k * h) * (k % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

}  // namespace oracle
