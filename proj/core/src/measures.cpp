#include "specmeter/measures.hpp"

#include "specmeter/textio.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>

namespace specmeter {

namespace {

struct NeumaierSum {
    double sum = 0.0;
    double carry = 0.0;
    void add(double x) {
        const double t = sum + x;
        carry += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
        sum = t;
    }
    double value() const { return sum + carry; }
};

double simpson(const std::function<double(double)>& f, double a, double b, double fa, double fm, double fb,
               double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol) {
    if (b <= a) return 0.0;
    const double fa = f(a);
    const double fb = f(b);
    const double fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson(f, a, b, fa, fm, fb, whole, tol, 48);
}

}  // namespace

// ---------------------------------------------------------------- measure

EmpiricalMeasure::EmpiricalMeasure(std::vector<Atom> atoms) {
    if (atoms.empty()) throw std::invalid_argument("empirical measure needs at least one atom");
    NeumaierSum mass;
    for (const auto& a : atoms) {
        if (!std::isfinite(a.position)) throw std::invalid_argument("atom position is not finite");
        if (!(a.weight > 0.0) || !std::isfinite(a.weight)) throw std::invalid_argument("atom weight must be positive");
        mass.add(a.weight);
    }
    if (std::abs(mass.value() - 1.0) > kMassTolerance) {
        throw std::invalid_argument("atom weights sum to " + format_double(mass.value()) + ", not 1");
    }
    std::sort(atoms.begin(), atoms.end(), [](const Atom& a, const Atom& b) { return a.position < b.position; });
    atoms_.reserve(atoms.size());
    for (const auto& a : atoms) {
        if (!atoms_.empty() && a.position - atoms_.back().position <= kMergeTolerance) {
            atoms_.back().weight += a.weight;
        } else {
            atoms_.push_back(a);
        }
    }
    cumulative_.resize(atoms_.size());
    NeumaierSum running;
    for (std::size_t k = 0; k < atoms_.size(); ++k) {
        running.add(atoms_[k].weight);
        cumulative_[k] = std::min(1.0, running.value());
    }
    cumulative_.back() = 1.0;
}

EmpiricalMeasure EmpiricalMeasure::uniform(std::span<const double> points) {
    if (points.empty()) throw std::invalid_argument("uniform measure needs at least one point");
    const double w = 1.0 / static_cast<double>(points.size());
    std::vector<Atom> atoms;
    atoms.reserve(points.size());
    for (double p : points) atoms.push_back({p, w});
    return EmpiricalMeasure(std::move(atoms));
}

double EmpiricalMeasure::cdf(double x) const {
    const auto it = std::upper_bound(atoms_.begin(), atoms_.end(), x,
                                     [](double v, const Atom& a) { return v < a.position; });
    const auto count = static_cast<std::size_t>(it - atoms_.begin());
    return count == 0 ? 0.0 : cumulative_[count - 1];
}

double EmpiricalMeasure::cdf_left(double x) const {
    const auto it = std::lower_bound(atoms_.begin(), atoms_.end(), x,
                                     [](const Atom& a, double v) { return a.position < v; });
    const auto count = static_cast<std::size_t>(it - atoms_.begin());
    return count == 0 ? 0.0 : cumulative_[count - 1];
}

EmpiricalMeasure EmpiricalMeasure::map_increasing(const std::function<double(double)>& f) const {
    std::vector<Atom> out;
    out.reserve(atoms_.size());
    for (const auto& a : atoms_) out.push_back({f(a.position), a.weight});
    return EmpiricalMeasure(std::move(out));
}

double integrate(const EmpiricalMeasure& mu, const std::function<double(double)>& f) {
    NeumaierSum s;
    for (const auto& a : mu.atoms()) {
        const double v = f(a.position);
        if (!std::isfinite(v)) {
            throw std::domain_error("integrand is not finite at " + format_double(a.position));
        }
        s.add(a.weight * v);
    }
    return s.value();
}

// ---------------------------------------------------------------- metrics

double kolmogorov(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu) {
    const auto a = mu.atoms();
    const auto b = nu.atoms();
    std::size_t i = 0;
    std::size_t j = 0;
    double fa = 0.0;
    double fb = 0.0;
    double best = 0.0;
    // Left limits at each merged point equal the values at the previous one,
    // so tracking right values covers both.
    while (i < a.size() || j < b.size()) {
        const double x = j == b.size() || (i < a.size() && a[i].position <= b[j].position) ? a[i].position
                                                                                             : b[j].position;
        if (i < a.size() && a[i].position == x) fa = mu.cdf(x), ++i;
        if (j < b.size() && b[j].position == x) fb = nu.cdf(x), ++j;
        best = std::max(best, std::abs(fa - fb));
    }
    return std::min(best, 1.0);
}

namespace {

// sup_t F_p(t) - F_q(t + eps) <= eps, checked at the breakpoints of both
// step functions.
bool one_sided_feasible(const EmpiricalMeasure& p, const EmpiricalMeasure& q, double eps) {
    for (const auto& a : p.atoms()) {
        if (p.cdf(a.position) - q.cdf(a.position + eps) > eps) return false;
    }
    for (const auto& b : q.atoms()) {
        const double t = b.position - eps;
        if (p.cdf(t) - q.cdf(t + eps) > eps) return false;
    }
    return true;
}

bool levy_feasible(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, double eps) {
    return one_sided_feasible(mu, nu, eps) && one_sided_feasible(nu, mu, eps);
}

}  // namespace

double levy_prokhorov(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("levy_prokhorov: tol must be > 0");
    if (levy_feasible(mu, nu, 0.0)) return 0.0;
    double lo = 0.0;
    double hi = 1.0;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        (levy_feasible(mu, nu, mid) ? hi : lo) = mid;
    }
    return hi;
}

double Tent::operator()(double x) const {
    return std::max(0.0, 1.0 - std::abs(x - center) / half_width);
}

Tent dyadic_tent(int k) {
    if (k < 1) throw std::invalid_argument("tent index is 1-based");
    long long idx = k - 1;
    long long diag = 0;
    while (idx > diag) {
        idx -= diag + 1;
        ++diag;
    }
    const long long level = idx;
    const long long j = diag - level;
    const long long p = (j % 2 == 1) ? (j + 1) / 2 : -(j / 2);
    const double h = std::ldexp(1.0, static_cast<int>(-level));
    return {static_cast<double>(p) * h, h};
}

std::vector<double> tent_integrals(const EmpiricalMeasure& mu, int K) {
    if (K < 1) throw std::invalid_argument("series metric needs K >= 1");
    const auto atoms = mu.atoms();
    std::vector<double> out(static_cast<std::size_t>(K));
    for (int k = 1; k <= K; ++k) {
        const Tent f = dyadic_tent(k);
        auto first = std::upper_bound(atoms.begin(), atoms.end(), f.center - f.half_width,
                                      [](double v, const Atom& a) { return v < a.position; });
        NeumaierSum s;
        for (auto it = first; it != atoms.end() && it->position < f.center + f.half_width; ++it) {
            s.add(it->weight * f(it->position));
        }
        out[static_cast<std::size_t>(k - 1)] = s.value();
    }
    return out;
}

double series_from_integrals(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::invalid_argument("series metric: integral vectors differ in length");
    double weight = 1.0;
    NeumaierSum s;
    for (std::size_t k = 0; k < a.size(); ++k) {
        weight *= 0.5;
        s.add(weight * std::abs(a[k] - b[k]));
    }
    return s.value();
}

SeriesDistance bl_series_metric(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, int K) {
    const auto a = tent_integrals(mu, K);
    const auto b = tent_integrals(nu, K);
    return {series_from_integrals(a, b), std::ldexp(1.0, 1 - K)};
}

EmpiricalMeasure pooled_mean(std::span<const EmpiricalMeasure> measures) {
    if (measures.empty()) throw std::invalid_argument("pooled_mean needs at least one measure");
    const double scale = 1.0 / static_cast<double>(measures.size());
    std::size_t total = 0;
    for (const auto& m : measures) total += m.size();
    std::vector<Atom> atoms;
    atoms.reserve(total);
    for (const auto& m : measures) {
        for (const auto& a : m.atoms()) atoms.push_back({a.position, a.weight * scale});
    }
    return EmpiricalMeasure(std::move(atoms));
}

// ---------------------------------------------------------------- references

ReferenceLaw ReferenceLaw::marchenko_pastur(double c) {
    if (!(c > 0.0) || !std::isfinite(c)) throw std::invalid_argument("Marchenko-Pastur ratio must be > 0");
    return {ReferenceKind::MarchenkoPastur, c};
}

namespace {

struct MpShape {
    double c, lo, hi, mid, radius;
    explicit MpShape(double ratio)
        : c(ratio),
          lo((1.0 - std::sqrt(ratio)) * (1.0 - std::sqrt(ratio))),
          hi((1.0 + std::sqrt(ratio)) * (1.0 + std::sqrt(ratio))),
          mid(0.5 * (lo + hi)),
          radius(0.5 * (hi - lo)) {}
    double atom() const { return c > 1.0 ? 1.0 - 1.0 / c : 0.0; }
};

double mp_continuous_cdf(const MpShape& s, double x) {
    if (x <= s.lo) return 0.0;
    const double mass = std::min(1.0, 1.0 / s.c);
    if (x >= s.hi) return mass;
    // x = mid - radius cos(theta) removes the square-root endpoints.
    const double theta_x = std::acos(std::clamp((s.mid - x) / s.radius, -1.0, 1.0));
    const auto integrand = [&](double th) {
        // mid - radius cos(th) written without cancellation near th = 0.
        const double half = std::sin(0.5 * th);
        const double denom = s.lo + 2.0 * s.radius * half * half;
        if (denom <= 0.0) return s.radius * (1.0 + std::cos(th)) / (2.0 * std::numbers::pi * s.c);
        const double st = std::sin(th);
        return s.radius * s.radius * st * st / (2.0 * std::numbers::pi * s.c * denom);
    };
    return std::clamp(adaptive_simpson(integrand, 0.0, theta_x, 1e-14), 0.0, mass);
}

}  // namespace

double reference_cdf(const ReferenceLaw& law, double x) {
    switch (law.kind) {
    case ReferenceKind::Semicircle: {
        if (x <= -2.0) return 0.0;
        if (x >= 2.0) return 1.0;
        const double v = 0.5 + x * std::sqrt(4.0 - x * x) / (4.0 * std::numbers::pi) +
                         std::asin(x / 2.0) / std::numbers::pi;
        return std::clamp(v, 0.0, 1.0);
    }
    case ReferenceKind::MarchenkoPastur: {
        const MpShape s(law.param);
        return (x >= 0.0 ? s.atom() : 0.0) + mp_continuous_cdf(s, x);
    }
    case ReferenceKind::Dirac:
        return x >= law.param ? 1.0 : 0.0;
    }
    return 0.0;
}

double reference_cdf_left(const ReferenceLaw& law, double x) {
    switch (law.kind) {
    case ReferenceKind::Semicircle: return reference_cdf(law, x);
    case ReferenceKind::MarchenkoPastur: {
        const MpShape s(law.param);
        return (x > 0.0 ? s.atom() : 0.0) + mp_continuous_cdf(s, x);
    }
    case ReferenceKind::Dirac: return x > law.param ? 1.0 : 0.0;
    }
    return 0.0;
}

double reference_density(const ReferenceLaw& law, double x) {
    switch (law.kind) {
    case ReferenceKind::Semicircle:
        return std::abs(x) >= 2.0 ? 0.0 : std::sqrt(4.0 - x * x) / (2.0 * std::numbers::pi);
    case ReferenceKind::MarchenkoPastur: {
        const MpShape s(law.param);
        if (x <= s.lo || x >= s.hi || x <= 0.0) return 0.0;
        return std::sqrt((s.hi - x) * (x - s.lo)) / (2.0 * std::numbers::pi * s.c * x);
    }
    case ReferenceKind::Dirac: return 0.0;
    }
    return 0.0;
}

double kolmogorov_to_reference(const EmpiricalMeasure& mu, const ReferenceLaw& law) {
    std::vector<double> points;
    points.reserve(mu.size() + 1);
    for (const auto& a : mu.atoms()) points.push_back(a.position);
    if (law.kind == ReferenceKind::Dirac) points.push_back(law.param);
    if (law.kind == ReferenceKind::MarchenkoPastur && law.param > 1.0) points.push_back(0.0);
    double best = 0.0;
    for (double x : points) {
        best = std::max(best, std::abs(mu.cdf(x) - reference_cdf(law, x)));
        best = std::max(best, std::abs(mu.cdf_left(x) - reference_cdf_left(law, x)));
    }
    return best;
}

// ---------------------------------------------------------------- csv

void write_measure_csv(std::ostream& out, const EmpiricalMeasure& mu) {
    out << "position,weight\n";
    for (const auto& a : mu.atoms()) out << format_double(a.position) << ',' << format_double(a.weight) << '\n';
}

EmpiricalMeasure read_measure_csv(std::istream& in) {
    std::string line;
    std::vector<Atom> atoms;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto t = trim(line);
        if (t.empty()) continue;
        if (line_no == 1 && t == "position,weight") continue;
        const auto cols = split(t, ',');
        if (cols.size() != 2) {
            throw std::invalid_argument("measure csv line " + std::to_string(line_no) + ": expected 2 columns");
        }
        try {
            atoms.push_back({parse_double(cols[0]), parse_double(cols[1])});
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument("measure csv line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return EmpiricalMeasure(std::move(atoms));
}

}  // namespace specmeter
