#pragma once

#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

namespace specmeter {

struct Atom {
    double position = 0.0;
    double weight = 0.0;
};

// Finitely supported probability measure on the line. Atoms are sorted,
// strictly separated by more than kMergeTolerance, with positive weights
// summing to one.
class EmpiricalMeasure {
public:
    static constexpr double kMergeTolerance = 1e-12;
    static constexpr double kMassTolerance = 1e-12;

    EmpiricalMeasure() = default;
    // Sorts, merges atoms closer than kMergeTolerance and validates the
    // invariants. Throws std::invalid_argument on non-finite positions,
    // non-positive weights or total mass away from 1.
    explicit EmpiricalMeasure(std::vector<Atom> atoms);

    // Uniform weight 1/size on each point.
    static EmpiricalMeasure uniform(std::span<const double> points);
    static EmpiricalMeasure dirac(double position) { return EmpiricalMeasure({{position, 1.0}}); }

    std::span<const Atom> atoms() const { return atoms_; }
    std::size_t size() const { return atoms_.size(); }
    bool empty() const { return atoms_.empty(); }

    // P(X <= x) and P(X < x).
    double cdf(double x) const;
    double cdf_left(double x) const;

    // Push-forward under an increasing map.
    EmpiricalMeasure map_increasing(const std::function<double(double)>& f) const;

private:
    std::vector<Atom> atoms_;
    std::vector<double> cumulative_;
};

// Sum of weight * f(position). Throws std::domain_error on a non-finite f value.
double integrate(const EmpiricalMeasure& mu, const std::function<double(double)>& f);

// sup_x |F_mu(x) - F_nu(x)|, evaluated at every atom and its left limit.
double kolmogorov(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu);

// Smallest eps with F_nu(t - eps) - eps <= F_mu(t) <= F_nu(t + eps) + eps for
// all t, bracketed by bisection to absolute accuracy `tol`.
double levy_prokhorov(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, double tol = 1e-9);

// Element k (1-based) of the dyadic tent family: center p / 2^q, half-width
// 2^-q, height 1. Levels and centers are enumerated along diagonals.
struct Tent {
    double center = 0.0;
    double half_width = 1.0;
    double operator()(double x) const;
};
Tent dyadic_tent(int k);

struct SeriesDistance {
    double value = 0.0;
    // Bound on the omitted tail, 2^(1-K).
    double truncation_bound = 0.0;
};

constexpr int kDefaultSeriesTerms = 64;

// sum_{k=1..K} 2^-k |int f_k dmu - int f_k dnu|.
SeriesDistance bl_series_metric(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu,
                                int K = kDefaultSeriesTerms);
// The K integrals int f_k dmu; the series metric is linear in them.
std::vector<double> tent_integrals(const EmpiricalMeasure& mu, int K = kDefaultSeriesTerms);
double series_from_integrals(std::span<const double> a, std::span<const double> b);

// Average of the measures: every atom keeps its weight divided by the count.
EmpiricalMeasure pooled_mean(std::span<const EmpiricalMeasure> measures);

enum class ReferenceKind { Semicircle, MarchenkoPastur, Dirac };

struct ReferenceLaw {
    ReferenceKind kind = ReferenceKind::Semicircle;
    // MarchenkoPastur: ratio c > 0. Dirac: atom position.
    double param = 0.0;

    static ReferenceLaw semicircle() { return {ReferenceKind::Semicircle, 0.0}; }
    static ReferenceLaw marchenko_pastur(double c);
    static ReferenceLaw dirac(double a) { return {ReferenceKind::Dirac, a}; }
};

double reference_cdf(const ReferenceLaw& law, double x);
double reference_cdf_left(const ReferenceLaw& law, double x);
// Density of the absolutely continuous part.
double reference_density(const ReferenceLaw& law, double x);

// Kolmogorov distance between an empirical measure and a reference law.
double kolmogorov_to_reference(const EmpiricalMeasure& mu, const ReferenceLaw& law);

// Two-column CSV with header "position,weight".
void write_measure_csv(std::ostream& out, const EmpiricalMeasure& mu);
EmpiricalMeasure read_measure_csv(std::istream& in);

}  // namespace specmeter
