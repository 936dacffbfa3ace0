#pragma once

#include "specmeter/entries.hpp"
#include "specmeter/matrix.hpp"

#include <iosfwd>
#include <span>
#include <vector>

namespace specmeter {

struct LindebergReport {
    int n = 0;
    double threshold = 0.0;
    // Normalized truncated sum; zero exactly when exceed_count is zero.
    double statistic = 0.0;
    long long exceed_count = 0;
    // lindeberg_an_stat only: statistic > eps.
    bool exceeds = false;
};

// (1/n^2) sum |X_ij|^2 1{|X_ij| > M}.
LindebergReport lindeberg_stat(const HermitianMatrix& x, double m);
LindebergReport lindeberg_stat(const Matrix& x, double m);

// Rectangular n x N form: (1/(nN)) sum |X_ij|^2 1{|X_ij|^2 > M}. The threshold
// applies to the squared modulus here.
LindebergReport lindeberg_stat_rect(const RectMatrix& x, double m);

// Threshold eps * a_n; `exceeds` flags statistic > eps.
LindebergReport lindeberg_an_stat(const HermitianMatrix& x, double eps, double a_n);

// Zeroes every entry with |x| > threshold; the boundary is kept.
Matrix truncate(const Matrix& x, double threshold);
HermitianMatrix truncate(const HermitianMatrix& x, double threshold);

struct BnSolution {
    // inf{t > 0 : l(t) > 0}
    double b = 0.0;
    // inf{t > b + 1 : n l(t) <= t^2}
    double b_n = 0.0;
};

// Throws std::invalid_argument for finite-variance laws and n < 1.
BnSolution solve_bn(const EntryLaw& law, long long n);

struct HeavyTailRow {
    long long n = 0;
    double b_n = 0.0;
    double ratio_l = 0.0;     // n l(b_n) / b_n^2
    double ratio_tail = 0.0;  // P(|x| > b_n) b_n^2 / l(b_n)
    double ratio_mean = 0.0;  // E|x| 1{|x| > b_n} b_n / l(b_n)
};

std::vector<HeavyTailRow> heavy_tail_diagnostics(const EntryLaw& law, std::span<const long long> n_list);

// Header "n,b_n,ratio_l,ratio_tail,ratio_mean".
void write_diagnostics_csv(std::ostream& out, std::span<const HeavyTailRow> rows);

}  // namespace specmeter
