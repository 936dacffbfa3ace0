#include "specmeter/approx.hpp"
#include "specmeter/harness.hpp"
#include "specmeter/spectra.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace specmeter;

namespace {

double grid_sup_error(const RealFunction& f, const LipschitzDecomposition& d, double lo, double hi, int points) {
    double worst = 0.0;
    for (int k = 0; k < points; ++k) {
        const double x = lo + (hi - lo) * k / (points - 1);
        worst = std::max(worst, std::abs(f(x) - d.evaluate(x)));
    }
    return worst;
}

void check_pieces(const LipschitzDecomposition& d, double lo, double hi) {
    const int points = 4096;
    const double h = (hi - lo) / (points - 1);
    for (const auto& p : d.pieces) {
        for (int k = 1; k + 1 < points; ++k) {
            const double x = lo + h * k;
            REQUIRE(std::abs(p(x + h) - p(x)) <= h + 1e-12);
            const double gap = 0.5 * (p(x - h) + p(x + h)) - p(x);
            if (p.curvature() == Curvature::Convex) {
                REQUIRE(gap >= -1e-12);
            } else {
                REQUIRE(gap <= 1e-12);
            }
        }
    }
    for (int k = 0; k < points; ++k) {
        const double x = lo + h * k;
        REQUIRE(std::abs(d.evaluate_pieces(x) - d.evaluate(x)) <= 1e-12);
    }
}

}  // namespace

TEST_CASE("f_delta for the zero function") {
    const SupportedFunction zero{[](double) { return 0.0; }, -1.0, 1.0};
    const auto d = build_f_delta(zero, 1.0, 0.5);
    CHECK(d.ramps.size() == 4);
    CHECK(d.kappa() <= d.kappa_bound());
    // The literal sign rule ties toward +, so f_delta is a sawtooth of height delta.
    CHECK(grid_sup_error(zero.f, d, -2.0, 2.0, 1001) <= 0.5);
    CHECK(d.evaluate(-1.0) == 0.0);
    CHECK(d.evaluate(1.0) == 0.0);
    check_pieces(d, -2.0, 2.0);
}

TEST_CASE("f_delta for the unit tent") {
    const SupportedFunction tent{[](double x) { return std::max(0.0, 1.0 - std::abs(x)); }, -1.0, 1.0};
    const auto d = build_f_delta(tent, 1.0, 0.5);
    CHECK(d.kappa_bound() == 8);
    CHECK(d.kappa() <= 8);
    CHECK(grid_sup_error(tent.f, d, -2.0, 2.0, 1000) <= 0.5);
    check_pieces(d, -2.0, 2.0);
}

TEST_CASE("f_delta for random Lipschitz functions") {
    RngStream s(31);
    for (int trial = 0; trial < 40; ++trial) {
        const double M = trial % 2 ? 2.0 : 1.0;
        const double delta = trial % 4 < 2 ? 0.1 : 0.5;
        const auto f = random_lipschitz_function(M, s);
        REQUIRE(grid_lipschitz_constant(f.f, -M - 1.0, M + 1.0, 8192) <= 1.0 + 1e-12);
        REQUIRE(f(-M - 0.5) == 0.0);
        REQUIRE(f(M + 0.01) == 0.0);
        const auto d = build_f_delta(f, M, delta);
        REQUIRE(d.kappa() <= d.kappa_bound());
        REQUIRE(grid_sup_error(f.f, d, -M - 1.0, M + 1.0, 4096) <= delta);
        // f_delta vanishes to the left of -M.
        REQUIRE(d.evaluate(-M - 0.25) == 0.0);
        check_pieces(d, -M - 1.0, M + 1.0);
    }
}

TEST_CASE("f_delta input checks") {
    const SupportedFunction steep{[](double x) { return std::max(0.0, 1.0 - 2.0 * std::abs(x)); }, -1.0, 1.0};
    CHECK_THROWS_AS(build_f_delta(steep, 1.0, 0.1), std::invalid_argument);
    const SupportedFunction wide{[](double x) { return std::max(0.0, 2.0 - std::abs(x)); }, -2.0, 2.0};
    CHECK_THROWS_AS(build_f_delta(wide, 1.0, 0.1), std::invalid_argument);
    const SupportedFunction ok{[](double) { return 0.0; }, -1.0, 1.0};
    CHECK_THROWS_AS(build_f_delta(ok, 1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(build_f_delta(ok, 1.0, -0.1), std::invalid_argument);
    CHECK(grid_lipschitz_constant([](double x) { return 3.0 * x; }, 0.0, 1.0) == doctest::Approx(3.0));
}

TEST_CASE("lemma checkers: equality cases") {
    RngStream s(32);
    const auto a = oracle::random_hermitian(6, s);
    const auto clip = [](double x) { return std::min(std::abs(x), 1.0); };
    const auto sq = [](double x) { return x * x; };
    CHECK(check_hoffman_wielandt(a, a) == 0.0);
    CHECK(check_functional_lipschitz(a, a, clip) == 0.0);
    CHECK(check_klein_convexity(a, a, sq, 0.3) == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
    CHECK(check_rank_inequality(a, a) == 0.0);
    const auto b = oracle::random_hermitian(6, s);
    CHECK(check_klein_convexity(a, b, sq, 0.0) == 0.0);
    CHECK(check_klein_convexity(a, b, sq, 1.0) == 0.0);
    const auto d1 = HermitianMatrix::diagonal(std::vector<double>{1.0, 2.0, 5.0});
    const auto d2 = HermitianMatrix::diagonal(std::vector<double>{0.5, 3.0, 4.0});
    CHECK(check_hoffman_wielandt(d1, d2) == doctest::Approx(0.0).scale(1.0));
    // Constant f: the margin is the full (1/n) ||A - B||_HS.
    const double hs = std::sqrt((a.matrix() - b.matrix()).hs_norm_squared());
    CHECK(check_functional_lipschitz(a, b, [](double) { return 7.0; }) == doctest::Approx(hs / 6.0));
    CHECK(check_moment_estimate(HermitianMatrix(Matrix(4, 4)), 1.0) == 0.0);
    CHECK(check_moment_estimate(a, 2.0) == doctest::Approx(0.0).scale(a.hs_norm_squared()).epsilon(1e-12));
    CHECK(check_moment_estimate(d1, 1.0) == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("lemma checkers: rank one perturbation") {
    RngStream s(33);
    for (int trial = 0; trial < 20; ++trial) {
        const auto a = oracle::random_hermitian(10, s, false);
        Matrix e = a.matrix();
        e(0, 0) += 1.0;
        const double margin = check_rank_inequality(a, HermitianMatrix(e));
        CHECK(margin >= -1e-12);
        CHECK(margin <= 0.1 + 1e-12);
    }
}

TEST_CASE("lemma checkers: input errors") {
    const auto a = HermitianMatrix::identity(3), b = HermitianMatrix::identity(4);
    CHECK_THROWS(check_hoffman_wielandt(a, b));
    CHECK_THROWS(check_functional_lipschitz(a, b, [](double x) { return x; }));
    CHECK_THROWS(check_klein_convexity(a, b, [](double x) { return x; }, 0.5));
    CHECK_THROWS(check_klein_convexity(a, a, [](double x) { return x; }, 1.5));
    CHECK_THROWS(check_rank_inequality(a, b));
    CHECK_THROWS(check_moment_estimate(a, 0.0));
    CHECK_THROWS(check_moment_estimate(a, 2.5));
}

TEST_CASE("lemma sweeps stay above tolerance") {
    const auto sweeps = run_lemma_sweeps(5, 60, 2);
    REQUIRE(sweeps.size() == 10);
    for (const auto& s : sweeps) {
        CAPTURE(s.check);
        CHECK(s.violations == 0);
        CHECK(s.samples > 0);
    }
}
