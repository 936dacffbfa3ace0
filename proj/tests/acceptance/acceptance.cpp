// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Thresholds marked "pilot" were calibrated once and frozen; the
// calibration runs are listed in PILOT.md next to this file.

#include "specmeter/approx.hpp"
#include "specmeter/conditions.hpp"
#include "specmeter/ensembles.hpp"
#include "specmeter/harness.hpp"
#include "specmeter/measures.hpp"
#include "specmeter/spectra.hpp"
#include "specmeter/textio.hpp"

#include "oracles.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

using namespace specmeter;

namespace {

constexpr std::uint64_t kSeed = 20261018;

struct Outcome {
    bool pass = true;
    std::string detail;
    void require(bool ok, const std::string& what) {
        if (!ok && pass) detail = what;
        pass = pass && ok;
    }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v) { return format_double(v); }

// ---------------------------------------------------------------- 1

Outcome lemma_suite() {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    const auto sweeps = run_lemma_sweeps(kSeed, 500, 1);
    const double elapsed = seconds_since(t0);
    const std::vector<std::string> lemmas{"hoffman_wielandt", "functional_lipschitz", "klein_convexity",
                                          "rank_inequality", "moment_estimate"};
    std::ostringstream d;
    for (const auto& name : lemmas) {
        const auto it = std::find_if(sweeps.begin(), sweeps.end(), [&](const LemmaSweep& s) { return s.check == name; });
        o.require(it != sweeps.end(), name + " missing");
        if (it == sweeps.end()) continue;
        o.require(it->samples == 500, name + " sample count");
        o.require(it->violations == 0 && it->min_margin >= -kLemmaTolerance, name + " margin " + fmt(it->min_margin));
        d << name << " min " << fmt(it->min_margin) << "; ";
    }
    o.require(elapsed < 60.0, "runtime " + fmt(elapsed) + " s");
    if (o.pass) o.detail = d.str() + "runtime " + fmt(std::round(elapsed * 100) / 100) + " s";
    return o;
}

// ---------------------------------------------------------------- 2

Outcome hermitization() {
    Outcome o;
    RngStream s(kSeed, {2});
    double worst = 0.0, worst_sym = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 1 + static_cast<int>(s.next_u64() % 32);
        const int big = 1 + static_cast<int>(s.next_u64() % 32);
        const Matrix x = oracle::random_complex_matrix(n, big, s, trial % 2 == 0);
        auto ev = eigenvalues(hermitize(x)).values;
        const auto want = oracle::singular_values_via_jacobi(x);
        const int r = std::min(n, big);
        // Top r eigenvalues of the hermitization are the singular values.
        for (int k = 0; k < r; ++k) {
            const double got = ev[ev.size() - 1 - static_cast<std::size_t>(k)];
            worst = std::max(worst, std::abs(got - want[static_cast<std::size_t>(k)]));
        }
        // Drop the |n - N| eigenvalues closest to zero, the rest is symmetric.
        std::vector<double> rest = ev;
        std::sort(rest.begin(), rest.end(), [](double a, double b) { return std::abs(a) < std::abs(b); });
        rest.erase(rest.begin(), rest.begin() + std::abs(n - big));
        std::sort(rest.begin(), rest.end());
        for (std::size_t k = 0; k < rest.size(); ++k) worst_sym = std::max(worst_sym, std::abs(rest[k] + rest[rest.size() - 1 - k]));
    }
    o.require(worst <= 1e-9, "singular value mismatch " + fmt(worst));
    o.require(worst_sym <= 1e-9, "symmetry defect " + fmt(worst_sym));
    if (o.pass) o.detail = "max |sv error| " + fmt(worst) + ", max symmetry defect " + fmt(worst_sym);
    return o;
}

// ---------------------------------------------------------------- 3

Outcome eigensolver() {
    Outcome o;
    RngStream s(kSeed, {3});
    double worst = 0.0, worst_trace = 0.0, worst_hs = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 1 + trial % 8;
        const auto h = oracle::random_hermitian(n, s, trial % 3 != 0);
        const auto ev = eigenvalues(h).values;
        const auto want = oracle::bisection_eigenvalues(h.matrix());
        double sum = 0.0, sq = 0.0;
        for (int k = 0; k < n; ++k) {
            worst = std::max(worst, std::abs(ev[static_cast<std::size_t>(k)] - want[static_cast<std::size_t>(k)]));
            sum += ev[static_cast<std::size_t>(k)];
            sq += ev[static_cast<std::size_t>(k)] * ev[static_cast<std::size_t>(k)];
        }
        const double tr = h.trace(), hs = h.hs_norm_squared();
        worst_trace = std::max(worst_trace, std::abs(sum - tr) / std::max(1.0, std::sqrt(hs)));
        worst_hs = std::max(worst_hs, std::abs(sq - hs) / hs);
    }
    o.require(worst <= 1e-8, "eigenvalue mismatch " + fmt(worst));
    o.require(worst_trace <= 1e-8, "trace defect " + fmt(worst_trace));
    o.require(worst_hs <= 1e-8, "HS defect " + fmt(worst_hs));
    if (o.pass) {
        o.detail = "max |error| " + fmt(worst) + ", trace rel " + fmt(worst_trace) + ", HS rel " + fmt(worst_hs);
    }
    return o;
}

// ---------------------------------------------------------------- 4

Outcome f_delta() {
    Outcome o;
    RngStream root(kSeed, {4});
    constexpr double slack = 1e-12;
    int checked = 0;
    for (int k = 0; k < 50; ++k) {
        RngStream s = derive_stream(root, static_cast<std::uint64_t>(k));
        const double M = k % 2 == 0 ? 1.0 : 2.0;
        const double delta = (k / 2) % 2 == 0 ? 0.5 : 0.1;
        const auto f = random_lipschitz_function(M, s);
        const auto d = build_f_delta(f, M, delta);
        const int points = 4096;
        const double lo = -M - 1.0, hi = M + 1.0, h = (hi - lo) / (points - 1);
        double sup = 0.0, sum_err = 0.0;
        for (int g = 0; g < points; ++g) {
            const double x = lo + h * g;
            sup = std::max(sup, std::abs(f(x) - d.evaluate(x)));
            sum_err = std::max(sum_err, std::abs(d.evaluate_pieces(x) - d.evaluate(x)));
        }
        o.require(sup <= delta, "sup error " + fmt(sup) + " > " + fmt(delta));
        o.require(sum_err <= 1e-12, "piece sum error " + fmt(sum_err));
        o.require(d.kappa() <= 2 * static_cast<int>(std::ceil(2.0 * M / delta)), "kappa " + std::to_string(d.kappa()));
        for (const auto& p : d.pieces) {
            for (int g = 1; g + 1 < points; ++g) {
                const double x = lo + h * g;
                const double a = p(x - h), b = p(x), c = p(x + h);
                if (std::abs(c - b) > h + slack) o.require(false, "piece not 1-Lipschitz");
                const double gap = 0.5 * (a + c) - b;
                const bool shape_ok = p.curvature() == Curvature::Convex ? gap >= -slack : gap <= slack;
                if (!shape_ok) o.require(false, "piece curvature tag wrong");
            }
        }
        ++checked;
    }
    if (o.pass) o.detail = std::to_string(checked) + " functions over (M, delta) in {1,2} x {0.5,0.1}";
    return o;
}

// ---------------------------------------------------------------- 5

Outcome metric_axioms() {
    Outcome o;
    RngStream s(kSeed, {5});
    const double tol = 1e-9;
    for (int k = 0; k < 100; ++k) {
        const auto a = oracle::random_lattice_measure(s), b = oracle::random_lattice_measure(s),
                   c = oracle::random_lattice_measure(s);
        for (const auto& m : std::vector<MetricChoice>{MetricChoice::parse("kolmogorov"),
                                                       MetricChoice::parse("levy_prokhorov:tol=1e-10"),
                                                       MetricChoice::parse("bl_series:K=64")}) {
            const double ab = distance(m, a, b), ba = distance(m, b, a);
            const double ac = distance(m, a, c), bc = distance(m, b, c);
            o.require(std::abs(ab - ba) <= tol, m.to_string() + " symmetry");
            o.require(ac <= ab + bc + 3 * tol, m.to_string() + " triangle inequality");
            o.require(distance(m, a, a) <= tol, m.to_string() + " identity");
        }
        o.require(kolmogorov(a, b) + tol >= levy_prokhorov(a, b, 1e-10), "kolmogorov < levy");
    }
    const auto sc = ReferenceLaw::semicircle();
    o.require(reference_cdf(sc, 0.0) == 0.5, "semicircle CDF(0) = " + fmt(reference_cdf(sc, 0.0)));
    // x = 2 sin(u) removes the square-root endpoints.
    const double m2 = oracle::simpson(
        [&](double u) {
            const double x = 2.0 * std::sin(u);
            return x * x * reference_density(sc, x) * 2.0 * std::cos(u);
        },
        -std::numbers::pi / 2, std::numbers::pi / 2, 4000);
    o.require(std::abs(m2 - 1.0) <= 1e-8, "semicircle second moment " + fmt(m2));
    if (o.pass) o.detail = "100 triples x 3 metrics; CDF(0) = 0.5; second moment " + fmt(m2);
    return o;
}

// ---------------------------------------------------------------- 6-9 runs

bool strictly_decreasing(const std::vector<double>& v) {
    for (std::size_t k = 1; k < v.size(); ++k) {
        if (!(v[k] < v[k - 1])) return false;
    }
    return true;
}

std::vector<double> medians(const RunReport& r) {
    std::vector<double> out;
    for (const auto& s : r.sizes) out.push_back(s.median_dist);
    return out;
}

std::string list(const std::vector<double>& v) {
    std::string out;
    for (double x : v) out += (out.empty() ? "" : ", ") + fmt(x);
    return out;
}

RunReport wigner_run(double& elapsed) {
    ExperimentConfig c;
    c.ensemble = EnsembleSpec::wigner(EntryLaw::rademacher());
    c.sizes = {64, 128, 256, 512};
    c.replicas = 16;
    c.metric = MetricChoice::parse("bl_series:K=64");
    c.reference = ReferenceLaw::semicircle();
    c.seed = kSeed;
    c.jobs = 1;
    const auto t0 = std::chrono::steady_clock::now();
    auto r = run_concentration(c);
    elapsed = seconds_since(t0);
    return r;
}

Outcome wigner_trend(const RunReport& r, double elapsed) {
    Outcome o;
    const auto m = medians(r);
    o.require(strictly_decreasing(m), "medians not strictly decreasing: " + list(m));
    o.require(m.back() <= 0.5 * m.front(), "median(512) / median(64) = " + fmt(m.back() / m.front()));
    o.require(elapsed < 300.0, "runtime " + fmt(elapsed) + " s");
    for (const auto& s : r.sizes) o.require(s.failed == 0, "failed replicas");
    if (o.pass) {
        o.detail = "medians " + list(m) + "; ratio " + fmt(m.back() / m.front()) + "; " +
                   fmt(std::round(elapsed * 100) / 100) + " s single-threaded";
    }
    return o;
}

Outcome semicircle_limit(const RunReport& r) {
    Outcome o;
    const auto& last = r.sizes.back();
    o.require(last.n == 512 && last.pooled_ref_dist.has_value(), "missing n = 512 pooled distance");
    if (!o.pass) return o;
    // Pilot value 0.0014; bound frozen at 0.05.
    o.require(*last.pooled_ref_dist <= 0.05, "pooled Kolmogorov distance " + fmt(*last.pooled_ref_dist));
    if (o.pass) o.detail = "pooled Kolmogorov distance to semicircle at n=512: " + fmt(*last.pooled_ref_dist);
    return o;
}

Outcome counterexample(const RunReport& wigner) {
    Outcome o;
    ExperimentConfig c;
    c.ensemble = EnsembleSpec::counterexample(0.5);
    c.sizes = {64, 128, 256};
    c.replicas = 32;
    c.metric = MetricChoice::parse("bl_series:K=64");
    c.seed = kSeed;
    const auto r = run_concentration(c);
    const auto m = medians(r);
    // Pilot floor: medians stayed in [0.021, 0.034] over nine seeds.
    constexpr double floor = 0.015;
    for (double v : m) o.require(v >= floor, "median " + fmt(v) + " below floor " + fmt(floor));
    // No decreasing trend: the median keeps at least half its n=64 value
    // (pilot worst case 0.68), while the Wigner run on the same sizes falls
    // to about a quarter.
    const double ratio = m.back() / m.front();
    o.require(ratio >= 0.5, "median(256) / median(64) = " + fmt(ratio));
    const auto wm = medians(wigner);
    const double wigner_ratio = wm[2] / wm[0];
    o.require(wigner_ratio < 0.5, "no contrast with Wigner ratio " + fmt(wigner_ratio));
    for (std::size_t k = 0; k < r.sizes.size(); ++k) {
        const int n = r.sizes[k].n;
        o.require(r.sizes[k].d_n == static_cast<std::size_t>(n / 2) * static_cast<std::size_t>(n / 2), "d_n != (n/2)^2");
    }
    if (o.pass) {
        o.detail = "medians " + list(m) + " (floor " + fmt(floor) + "); ratio " + fmt(ratio) + " vs Wigner " +
                   fmt(wigner_ratio);
    }
    return o;
}

Outcome heavy_tails() {
    Outcome o;
    const EntryLaw law = EntryLaw::heavy_cubic(1.0);
    std::string d;
    for (long long n : {100LL, 10000LL, 1000000LL}) {
        const double got = solve_bn(law, n).b_n;
        const double want = oracle::bn_grid_oracle(law, 1.0, n);
        o.require(std::abs(got - want) <= 1e-4 * want, "b_n mismatch at n=" + std::to_string(n));
        d += "b_" + std::to_string(n) + "=" + fmt(std::round(got * 1000) / 1000) + " ";
    }
    const std::vector<long long> big{1000000};
    const double ratio_l = heavy_tail_diagnostics(law, big)[0].ratio_l;
    o.require(ratio_l >= 0.9 && ratio_l <= 1.1, "n l(b_n)/b_n^2 = " + fmt(ratio_l));

    ExperimentConfig c;
    c.ensemble = EnsembleSpec::wigner(law);
    c.ensemble.scale_rule = ScaleRule::InvBn;
    c.sizes = {64, 128, 256};
    c.replicas = 16;
    c.metric = MetricChoice::parse("bl_series:K=64");
    c.seed = kSeed;
    const auto r = run_heavy_tail(c);
    const auto m = medians(r);
    o.require(strictly_decreasing(m), "heavy-tail medians not decreasing: " + list(m));
    // Pilot: worst median(256)/median(64) over nine seeds was 0.67.
    o.require(m.back() <= 0.75 * m.front(), "median(256) / median(64) = " + fmt(m.back() / m.front()));
    for (const auto& s : r.sizes) o.require(s.scale == solve_bn(law, s.n).b_n, "scale is not b_n");
    if (o.pass) o.detail = d + "ratio_l " + fmt(ratio_l) + "; medians " + list(m);
    return o;
}

// ---------------------------------------------------------------- 10

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Outcome determinism(const std::string& cli) {
    Outcome o;
    const auto dir = std::filesystem::temp_directory_path() / ("specmeter_accept_" + std::to_string(::getpid()));
    std::filesystem::create_directories(dir);
    const std::vector<std::pair<std::string, std::string>> runs{
        {"concentrate", "concentrate --sizes 16,32 --replicas 6 --reference semicircle"},
        {"concentrate_lp", "concentrate --ensemble toeplitz:entry=gaussian --sizes 12,24 --replicas 5 --metric levy_prokhorov:tol=1e-8"},
        {"heavy", "heavy --sizes 16,32 --replicas 4"},
        {"singular", "singular --ensemble wigner:entry=gaussian --sizes 8,16 --replicas 4 --ratio 2 --reference marchenko_pastur:c=0.5"},
        {"lemmas", "lemmas --samples 40"},
        {"tail", "tail --n 16 --replicas 100"},
        {"conditions", "conditions --mode lindeberg --ensemble wigner:entry=heavy_cubic:cut=1 --sizes 8,16 --replicas 3"},
        {"spectrum", "spectrum --ensemble hankel:entry=complex_gaussian --n 12"},
        {"sample", "sample --ensemble counterexample_z:t=0.5 --n 6"},
    };
    int compared = 0;
    for (const auto& [name, args] : runs) {
        std::string first;
        for (int jobs : {1, 4}) {
            for (int repeat = 0; repeat < 2; ++repeat) {
                const auto out = dir / (name + "_" + std::to_string(jobs) + "_" + std::to_string(repeat) + ".csv");
                const std::string cmd = "\"" + cli + "\" " + args + " --seed 7 --jobs " + std::to_string(jobs) +
                                        " --out \"" + out.string() + "\" 2>/dev/null";
                const int rc = std::system(cmd.c_str());
                o.require(rc == 0, name + " exited with " + std::to_string(rc));
                const std::string text = slurp(out);
                o.require(!text.empty(), name + " produced no output");
                if (first.empty()) {
                    first = text;
                } else {
                    o.require(text == first, name + " differs at --jobs " + std::to_string(jobs));
                }
                ++compared;
            }
        }
    }
    std::filesystem::remove_all(dir);
    if (o.pass) o.detail = std::to_string(runs.size()) + " subcommands, " + std::to_string(compared) + " runs byte-identical";
    return o;
}

// ---------------------------------------------------------------- 11

Outcome lindeberg() {
    Outcome o;
    RngStream s(kSeed, {11});
    for (int k = 0; k < 20; ++k) {
        const auto r = sample_matrix(EnsembleSpec::wigner(EntryLaw::rademacher()), 24, derive_stream(s, k));
        const auto u = sample_matrix(EnsembleSpec::band(3, EntryLaw::uniform(1.5)), 24, derive_stream(s, 100 + k));
        for (double m : {1.0, 1.5, 4.0}) o.require(lindeberg_stat(r, m).statistic == 0.0, "Rademacher above bound");
        for (double m : {1.5, 2.0}) o.require(lindeberg_stat(u, m).statistic == 0.0, "uniform above bound");
    }
    for (int k = 0; k < 100; ++k) {
        const int n = 4 + k % 29;
        const EntryLaw law = k % 3 == 0 ? EntryLaw::heavy_cubic(1.0) : (k % 3 == 1 ? EntryLaw::gaussian() : EntryLaw::complex_gaussian());
        const auto x = sample_matrix(EnsembleSpec::wigner(law), n, derive_stream(s, 1000 + k));
        const double eps = 0.25 + 0.03 * k;
        const double lhs = (x.matrix() - truncate(x, eps).matrix()).hs_norm_squared() / (static_cast<double>(n) * n);
        o.require(lhs == lindeberg_stat(x, eps).statistic, "truncation identity not exact");
    }
    if (o.pass) o.detail = "bounded laws give 0; identity exact on 100 matrices";
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    const std::string cli = argc > 1 ? argv[1] : SPECMETER_CLI_PATH;
    int failures = 0;
    auto report = [&](int id, const std::string& name, const Outcome& o) {
        std::cout << (o.pass ? "PASS" : "FAIL") << "  criterion " << id << ": " << name << " -- " << o.detail << '\n';
        std::cout.flush();
        failures += o.pass ? 0 : 1;
    };
    auto guarded = [&](const std::function<Outcome()>& fn) {
        try {
            return fn();
        } catch (const std::exception& e) {
            Outcome o;
            o.require(false, std::string("exception: ") + e.what());
            return o;
        }
    };
    report(1, "lemma suite", guarded(lemma_suite));
    report(2, "hermitization equivalence", guarded(hermitization));
    report(3, "eigensolver oracle equivalence", guarded(eigensolver));
    report(4, "f_delta construction", guarded(f_delta));
    report(5, "metric axioms", guarded(metric_axioms));
    double elapsed = 0.0;
    RunReport wigner;
    try {
        wigner = wigner_run(elapsed);
    } catch (const std::exception&) {
    }
    const bool have_wigner = wigner.sizes.size() == 4;
    report(6, "Wigner concentration trend", guarded([&] {
               if (!have_wigner) return Outcome{false, "Wigner run failed"};
               return wigner_trend(wigner, elapsed);
           }));
    report(7, "semicircle limit", guarded([&] {
               if (!have_wigner) return Outcome{false, "Wigner run failed"};
               return semicircle_limit(wigner);
           }));
    report(8, "counterexample non-concentration", guarded([&] {
               if (!have_wigner) return Outcome{false, "Wigner run failed"};
               return counterexample(wigner);
           }));
    report(9, "heavy-tail pipeline", guarded(heavy_tails));
    report(10, "CLI determinism", guarded([&] { return determinism(cli); }));
    report(11, "Lindeberg functionals", guarded(lindeberg));
    std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << '\n';
    return failures == 0 ? 0 : 1;
}
