#pragma once

#include "specmeter/matrix.hpp"
#include "specmeter/measures.hpp"

#include <iosfwd>
#include <span>
#include <stdexcept>
#include <vector>

namespace specmeter {

struct Spectrum {
    // Ascending, with multiplicity.
    std::vector<double> values;
    int n() const { return static_cast<int>(values.size()); }
};

class EigensolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Eigenvalues of a real symmetric matrix given in full row-major storage.
// Householder tridiagonalization followed by implicit-shift QL; an
// off-diagonal element is deflated once |e_i| <= 1e-12 (|d_i| + |d_{i+1}|),
// with at most 50 QL sweeps per eigenvalue before EigensolverError.
std::vector<double> symmetric_eigenvalues(std::vector<double> a, int n);

// Eigenvalues of tridiagonal (diag, offdiag); offdiag[i] couples i and i+1.
std::vector<double> tridiagonal_eigenvalues(std::vector<double> diag, std::vector<double> offdiag);

// Real matrices go straight to the symmetric solver. Complex ones use the
// real embedding [[Re H, -Im H], [Im H, Re H]] whose spectrum is that of H
// doubled; every second sorted value is kept. Throws std::invalid_argument
// on non-finite entries.
Spectrum eigenvalues(const HermitianMatrix& h);

// Uniform measure on the eigenvalues of h / scale.
EmpiricalMeasure esd(const HermitianMatrix& h, double scale);
EmpiricalMeasure esd_from_spectrum(const Spectrum& s, double scale);

// [0, X; X*, 0].
HermitianMatrix hermitize(const RectMatrix& x);

// The n singular values of an n x N matrix (n - N trailing zeros when n > N),
// descending, via the hermitization.
std::vector<double> singular_values(const RectMatrix& x);

// Uniform measure on the singular values of x / scale (n atoms).
EmpiricalMeasure singular_esd(const RectMatrix& x, double scale);

// One-column CSV with header "lambda".
void write_spectrum_csv(std::ostream& out, const Spectrum& s);

}  // namespace specmeter
