#include "specmeter/spectra.hpp"

#include "specmeter/textio.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

namespace specmeter {

namespace {

constexpr double kDeflation = 1e-12;
constexpr int kMaxSweeps = 50;

// Reduces the full symmetric matrix to tridiagonal form in place, one
// Householder reflector per column; only (diag, offdiag) are returned.
void householder_tridiagonalize(std::vector<double>& a, int n, std::vector<double>& diag,
                                std::vector<double>& offdiag) {
    const auto un = static_cast<std::size_t>(n);
    auto at = [&](int i, int j) -> double& {
        return a[static_cast<std::size_t>(i) * un + static_cast<std::size_t>(j)];
    };
    diag.assign(un, 0.0);
    offdiag.assign(un > 0 ? un - 1 : 0, 0.0);
    std::vector<double> v(un), p(un), w(un);
    for (int k = 0; k + 2 < n; ++k) {
        const int len = n - k - 1;
        double scale = 0.0;
        for (int r = k + 1; r < n; ++r) scale = std::max(scale, std::abs(at(k, r)));
        diag[static_cast<std::size_t>(k)] = at(k, k);
        if (scale == 0.0) {
            offdiag[static_cast<std::size_t>(k)] = 0.0;
            continue;
        }
        double norm2 = 0.0;
        for (int r = 0; r < len; ++r) {
            v[static_cast<std::size_t>(r)] = at(k, k + 1 + r) / scale;
            norm2 += v[static_cast<std::size_t>(r)] * v[static_cast<std::size_t>(r)];
        }
        const double x0 = v[0];
        const double alpha = x0 >= 0.0 ? -std::sqrt(norm2) : std::sqrt(norm2);
        offdiag[static_cast<std::size_t>(k)] = alpha * scale;
        v[0] = x0 - alpha;
        const double vtv = norm2 - 2.0 * alpha * x0 + alpha * alpha;
        if (vtv == 0.0) continue;
        const double tau = 2.0 / vtv;
        // p = tau * S v over the trailing block S.
        double ptv = 0.0;
        for (int r = 0; r < len; ++r) {
            const double* row = &at(k + 1 + r, k + 1);
            double s = 0.0;
            for (int c = 0; c < len; ++c) s += row[c] * v[static_cast<std::size_t>(c)];
            p[static_cast<std::size_t>(r)] = tau * s;
            ptv += p[static_cast<std::size_t>(r)] * v[static_cast<std::size_t>(r)];
        }
        const double kfac = 0.5 * tau * ptv;
        for (int r = 0; r < len; ++r) {
            w[static_cast<std::size_t>(r)] = p[static_cast<std::size_t>(r)] - kfac * v[static_cast<std::size_t>(r)];
        }
        // S -= v w^T + w v^T
        for (int r = 0; r < len; ++r) {
            double* row = &at(k + 1 + r, k + 1);
            const double vr = v[static_cast<std::size_t>(r)];
            const double wr = w[static_cast<std::size_t>(r)];
            for (int c = 0; c < len; ++c) {
                row[c] -= vr * w[static_cast<std::size_t>(c)] + wr * v[static_cast<std::size_t>(c)];
            }
        }
    }
    if (n >= 2) {
        diag[un - 2] = at(n - 2, n - 2);
        offdiag[un - 2] = at(n - 2, n - 1);
    }
    if (n >= 1) diag[un - 1] = at(n - 1, n - 1);
}

}  // namespace

std::vector<double> tridiagonal_eigenvalues(std::vector<double> d, std::vector<double> offdiag) {
    const int n = static_cast<int>(d.size());
    if (n == 0) return d;
    if (offdiag.size() + 1 != d.size()) throw std::invalid_argument("tridiagonal: offdiag must have n-1 entries");
    std::vector<double> e(offdiag);
    e.push_back(0.0);
    double tnorm = 0.0;
    for (int i = 0; i < n; ++i) tnorm = std::max(tnorm, std::abs(d[static_cast<std::size_t>(i)]) + std::abs(e[static_cast<std::size_t>(i)]));
    const double floor = std::numeric_limits<double>::epsilon() * tnorm;

    auto D = [&](int i) -> double& { return d[static_cast<std::size_t>(i)]; };
    auto E = [&](int i) -> double& { return e[static_cast<std::size_t>(i)]; };

    for (int l = 0; l < n; ++l) {
        int sweeps = 0;
        int m = l;
        do {
            for (m = l; m < n - 1; ++m) {
                const double dd = std::abs(D(m)) + std::abs(D(m + 1));
                if (std::abs(E(m)) <= kDeflation * dd || std::abs(E(m)) <= floor) break;
            }
            if (m != l) {
                if (sweeps++ == kMaxSweeps) {
                    throw EigensolverError("QL iteration did not converge for eigenvalue " + std::to_string(l) +
                                           " after " + std::to_string(kMaxSweeps) + " sweeps");
                }
                double g = (D(l + 1) - D(l)) / (2.0 * E(l));
                double r = std::hypot(g, 1.0);
                g = D(m) - D(l) + E(l) / (g + std::copysign(r, g));
                double s = 1.0;
                double c = 1.0;
                double p = 0.0;
                int i = m - 1;
                bool underflow = false;
                for (; i >= l; --i) {
                    const double f = s * E(i);
                    const double b = c * E(i);
                    r = std::hypot(f, g);
                    E(i + 1) = r;
                    if (r == 0.0) {
                        D(i + 1) -= p;
                        E(m) = 0.0;
                        underflow = true;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = D(i + 1) - p;
                    r = (D(i) - g) * s + 2.0 * c * b;
                    p = s * r;
                    D(i + 1) = g + p;
                    g = c * r - b;
                }
                if (underflow) continue;
                D(l) -= p;
                E(l) = g;
                E(m) = 0.0;
            }
        } while (m != l);
    }
    std::sort(d.begin(), d.end());
    return d;
}

std::vector<double> symmetric_eigenvalues(std::vector<double> a, int n) {
    if (n < 0 || a.size() != static_cast<std::size_t>(n) * static_cast<std::size_t>(n)) {
        throw std::invalid_argument("symmetric_eigenvalues: storage does not match n");
    }
    std::vector<double> diag, offdiag;
    householder_tridiagonalize(a, n, diag, offdiag);
    return tridiagonal_eigenvalues(std::move(diag), std::move(offdiag));
}

Spectrum eigenvalues(const HermitianMatrix& h) {
    const Matrix& m = h.matrix();
    if (!m.all_finite()) throw std::invalid_argument("eigenvalues: matrix has non-finite entries");
    const int n = h.n();
    const auto un = static_cast<std::size_t>(n);
    if (m.is_real()) {
        std::vector<double> a(un * un);
        for (std::size_t k = 0; k < a.size(); ++k) a[k] = m.data()[k].real();
        return {symmetric_eigenvalues(std::move(a), n)};
    }
    const std::size_t n2 = 2 * un;
    std::vector<double> a(n2 * n2);
    for (std::size_t i = 0; i < un; ++i) {
        for (std::size_t j = 0; j < un; ++j) {
            const cplx z = m(static_cast<int>(i), static_cast<int>(j));
            a[i * n2 + j] = z.real();
            a[i * n2 + un + j] = -z.imag();
            a[(un + i) * n2 + j] = z.imag();
            a[(un + i) * n2 + un + j] = z.real();
        }
    }
    const auto doubled = symmetric_eigenvalues(std::move(a), 2 * n);
    Spectrum s;
    s.values.reserve(un);
    for (std::size_t k = 0; k < un; ++k) s.values.push_back(doubled[2 * k]);
    return s;
}

EmpiricalMeasure esd_from_spectrum(const Spectrum& s, double scale) {
    if (!(scale > 0.0)) throw std::invalid_argument("esd: scale must be > 0");
    std::vector<double> v(s.values);
    for (auto& x : v) x /= scale;
    return EmpiricalMeasure::uniform(v);
}

EmpiricalMeasure esd(const HermitianMatrix& h, double scale) {
    if (!(scale > 0.0)) throw std::invalid_argument("esd: scale must be > 0");
    return esd_from_spectrum(eigenvalues(h), scale);
}

HermitianMatrix hermitize(const RectMatrix& x) {
    const int n = x.rows();
    const int big_n = x.cols();
    Matrix a(n + big_n, n + big_n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < big_n; ++j) {
            a(i, n + j) = x(i, j);
            a(n + j, i) = std::conj(x(i, j));
        }
    }
    return HermitianMatrix(std::move(a));
}

std::vector<double> singular_values(const RectMatrix& x) {
    const int n = x.rows();
    const auto spec = eigenvalues(hermitize(x)).values;
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) out.push_back(std::abs(spec[spec.size() - 1 - static_cast<std::size_t>(k)]));
    return out;
}

EmpiricalMeasure singular_esd(const RectMatrix& x, double scale) {
    if (!(scale > 0.0)) throw std::invalid_argument("singular_esd: scale must be > 0");
    auto sv = singular_values(x);
    for (auto& s : sv) s /= scale;
    return EmpiricalMeasure::uniform(sv);
}

void write_spectrum_csv(std::ostream& out, const Spectrum& s) {
    out << "lambda\n";
    for (double v : s.values) out << format_double(v) << '\n';
}

}  // namespace specmeter
