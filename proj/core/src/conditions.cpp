#include "specmeter/conditions.hpp"

#include "specmeter/textio.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>

namespace specmeter {

namespace {

LindebergReport truncated_sum(const Matrix& x, double threshold, bool squared, double norm) {
    LindebergReport r;
    r.n = x.rows();
    r.threshold = threshold;
    double s = 0.0;
    for (const auto& z : x.data()) {
        const double sq = std::norm(z);
        const bool over = squared ? sq > threshold : std::abs(z) > threshold;
        if (over) {
            s += sq;
            ++r.exceed_count;
        }
    }
    r.statistic = s / norm;
    return r;
}

void require_threshold(double m) {
    if (!(m >= 0.0)) throw std::invalid_argument("Lindeberg threshold must be >= 0");
}

}  // namespace

LindebergReport lindeberg_stat(const Matrix& x, double m) {
    require_threshold(m);
    if (!x.is_square()) throw std::invalid_argument("lindeberg_stat: use lindeberg_stat_rect for rectangular input");
    const double n = x.rows();
    return truncated_sum(x, m, false, n * n);
}

LindebergReport lindeberg_stat(const HermitianMatrix& x, double m) {
    return lindeberg_stat(x.matrix(), m);
}

LindebergReport lindeberg_stat_rect(const RectMatrix& x, double m) {
    require_threshold(m);
    return truncated_sum(x, m, true, static_cast<double>(x.rows()) * static_cast<double>(x.cols()));
}

LindebergReport lindeberg_an_stat(const HermitianMatrix& x, double eps, double a_n) {
    if (!(eps > 0.0) || !(a_n > 0.0)) throw std::invalid_argument("lindeberg_an_stat: eps and a_n must be > 0");
    LindebergReport r = lindeberg_stat(x, eps * a_n);
    r.exceeds = r.statistic > eps;
    return r;
}

Matrix truncate(const Matrix& x, double threshold) {
    require_threshold(threshold);
    Matrix out = x;
    for (auto& z : out.data()) {
        if (std::abs(z) > threshold) z = 0.0;
    }
    return out;
}

HermitianMatrix truncate(const HermitianMatrix& x, double threshold) {
    // |conj(z)| == |z| bitwise, so mirrored pairs are zeroed together.
    return HermitianMatrix(truncate(x.matrix(), threshold));
}

BnSolution solve_bn(const EntryLaw& law, long long n) {
    if (law.finite_variance()) {
        throw std::invalid_argument("solve_bn: law '" + law.to_string() + "' has finite variance");
    }
    if (!law.slowly_varying()) throw std::invalid_argument("solve_bn: l(t) is not slowly varying");
    if (n < 1) throw std::invalid_argument("solve_bn: n must be >= 1");
    BnSolution out;
    // l vanishes on [0, b] and is positive beyond; the heavy law's b is its cut.
    out.b = law.kind == LawKind::HeavyTailCubic ? law.param : 0.0;
    const double nn = static_cast<double>(n);
    auto h = [&](double t) { return nn * truncated_second_moment(law, t) - t * t; };

    double lo = out.b + 1.0;
    if (h(lo) <= 0.0) {
        out.b_n = lo;
        return out;
    }
    double hi = lo;
    while (h(hi) > 0.0) {
        lo = hi;
        hi *= 1.5;
        if (!std::isfinite(hi)) throw std::runtime_error("solve_bn: no sign change found");
    }
    // h(lo) > 0 >= h(hi)
    while ((hi - lo) > 1e-12 * hi) {
        const double mid = 0.5 * (lo + hi);
        (h(mid) > 0.0 ? lo : hi) = mid;
    }
    out.b_n = hi;
    return out;
}

std::vector<HeavyTailRow> heavy_tail_diagnostics(const EntryLaw& law, std::span<const long long> n_list) {
    std::vector<HeavyTailRow> rows;
    rows.reserve(n_list.size());
    for (long long n : n_list) {
        const double bn = solve_bn(law, n).b_n;
        const double l = truncated_second_moment(law, bn);
        HeavyTailRow r;
        r.n = n;
        r.b_n = bn;
        r.ratio_l = static_cast<double>(n) * l / (bn * bn);
        r.ratio_tail = tail_probability(law, bn) * bn * bn / l;
        r.ratio_mean = tail_first_moment(law, bn) * bn / l;
        rows.push_back(r);
    }
    return rows;
}

void write_diagnostics_csv(std::ostream& out, std::span<const HeavyTailRow> rows) {
    out << "n,b_n,ratio_l,ratio_tail,ratio_mean\n";
    for (const auto& r : rows) {
        out << r.n << ',' << format_double(r.b_n) << ',' << format_double(r.ratio_l) << ','
            << format_double(r.ratio_tail) << ',' << format_double(r.ratio_mean) << '\n';
    }
}

}  // namespace specmeter
