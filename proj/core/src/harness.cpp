#include "specmeter/harness.hpp"

#include "specmeter/conditions.hpp"
#include "specmeter/spectra.hpp"
#include "specmeter/textio.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <istream>
#include <mutex>
#include <ostream>
#include <thread>

namespace specmeter {

// ---------------------------------------------------------------- metrics

std::string MetricChoice::to_string() const {
    switch (kind) {
    case MetricKind::Kolmogorov: return "kolmogorov";
    case MetricKind::LevyProkhorov: return "levy_prokhorov:tol=" + format_double(tol);
    case MetricKind::BLSeries: return "bl_series:K=" + std::to_string(K);
    }
    return {};
}

MetricChoice MetricChoice::parse(std::string_view text) {
    const auto p = split_kind_options(text);
    MetricChoice m;
    auto reject_extra = [&](std::initializer_list<const char*> allowed) {
        for (const auto& [k, v] : p.options) {
            bool ok = false;
            for (const char* a : allowed) ok = ok || k == a;
            if (!ok) throw std::invalid_argument("metric '" + p.kind + "': unknown option '" + k + "'");
        }
    };
    if (p.kind == "kolmogorov") {
        reject_extra({});
        m.kind = MetricKind::Kolmogorov;
    } else if (p.kind == "levy_prokhorov") {
        reject_extra({"tol"});
        m.kind = MetricKind::LevyProkhorov;
        m.tol = p.number("tol", 1e-6);
        if (!(m.tol > 0.0)) throw std::invalid_argument("levy_prokhorov: tol must be > 0");
    } else if (p.kind == "bl_series") {
        reject_extra({"K"});
        m.kind = MetricKind::BLSeries;
        m.K = static_cast<int>(p.integer("K", kDefaultSeriesTerms));
        if (m.K < 1 || m.K > 1000) throw std::invalid_argument("bl_series: K must lie in [1, 1000]");
    } else {
        throw std::invalid_argument("unknown metric '" + p.kind + "'");
    }
    return m;
}

double distance(const MetricChoice& metric, const EmpiricalMeasure& mu, const EmpiricalMeasure& nu) {
    switch (metric.kind) {
    case MetricKind::Kolmogorov: return kolmogorov(mu, nu);
    case MetricKind::LevyProkhorov: return levy_prokhorov(mu, nu, metric.tol);
    case MetricKind::BLSeries: return bl_series_metric(mu, nu, metric.K).value;
    }
    return 0.0;
}

ReferenceLaw parse_reference(std::string_view text) {
    const auto p = split_kind_options(text);
    if (p.kind == "semicircle") return ReferenceLaw::semicircle();
    if (p.kind == "marchenko_pastur") return ReferenceLaw::marchenko_pastur(p.number("c", 1.0));
    if (p.kind == "dirac") return ReferenceLaw::dirac(p.number("a", 0.0));
    throw std::invalid_argument("unknown reference law '" + p.kind + "'");
}

std::string reference_to_string(const ReferenceLaw& law) {
    switch (law.kind) {
    case ReferenceKind::Semicircle: return "semicircle";
    case ReferenceKind::MarchenkoPastur: return "marchenko_pastur:c=" + format_double(law.param);
    case ReferenceKind::Dirac: return "dirac:a=" + format_double(law.param);
    }
    return {};
}

void ExperimentConfig::validate() const {
    if (replicas < 2) throw std::invalid_argument("replicas must be >= 2 for leave-one-out pooling");
    if (sizes.empty()) throw std::invalid_argument("sizes must be nonempty");
    for (std::size_t k = 0; k < sizes.size(); ++k) {
        if (sizes[k] < 1) throw std::invalid_argument("sizes must be positive");
        if (k > 0 && sizes[k] <= sizes[k - 1]) throw std::invalid_argument("sizes must be strictly ascending");
    }
    if (jobs < 1) throw std::invalid_argument("jobs must be >= 1");
}

// ---------------------------------------------------------------- parallel

void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& fn) {
    const auto workers = static_cast<std::size_t>(std::max(1, jobs));
    if (workers == 1 || count <= 1) {
        for (std::size_t k = 0; k < count; ++k) fn(k);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_lock;
    auto work = [&] {
        for (std::size_t k = next++; k < count; k = next++) {
            try {
                fn(k);
            } catch (...) {
                std::lock_guard lock(failure_lock);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < std::min(workers, count); ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

// ---------------------------------------------------------------- runs

double matrix_scale(const EnsembleSpec& spec, int n) {
    if (spec.kind == EnsembleKind::CounterexampleZ) return 1.0;
    if (spec.scale_rule == ScaleRule::InvBn) return solve_bn(spec.entry_law, n).b_n;
    return std::sqrt(static_cast<double>(n));
}

EmpiricalMeasure leave_one_out(std::span<const EmpiricalMeasure> measures, std::size_t skip) {
    std::vector<EmpiricalMeasure> others;
    others.reserve(measures.size());
    for (std::size_t k = 0; k < measures.size(); ++k) {
        if (k != skip) others.push_back(measures[k]);
    }
    return pooled_mean(others);
}

namespace {

struct CellOutput {
    std::optional<EmpiricalMeasure> measure;
    double ms = 0.0;
    double second_moment_error = 0.0;
    std::string error;
};

// Produces the ESD of one sample and its squared HS norm.
using SampleFn = std::function<std::pair<EmpiricalMeasure, double>(int n, double scale, const RngStream& stream)>;
using RefFn = std::function<double(const EmpiricalMeasure&)>;

double median(std::vector<double> v) {
    if (v.empty()) return std::nan("");
    std::sort(v.begin(), v.end());
    const std::size_t h = v.size() / 2;
    return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

RunReport run_cells(const ExperimentConfig& config, const std::function<std::size_t(int)>& d_of,
                    const std::function<double(int)>& scale_of, const SampleFn& sample, const RefFn& ref_of) {
    config.validate();
    const auto R = static_cast<std::size_t>(config.replicas);
    const std::size_t S = config.sizes.size();
    std::vector<double> scales(S);
    std::vector<std::size_t> dns(S);
    for (std::size_t s = 0; s < S; ++s) {
        scales[s] = scale_of(config.sizes[s]);
        dns[s] = d_of(config.sizes[s]);
    }
    const RngStream root(config.seed);
    std::vector<CellOutput> cells(S * R);
    parallel_for(cells.size(), config.jobs, [&](std::size_t c) {
        const std::size_t s = c / R;
        const std::size_t r = c % R;
        const int n = config.sizes[s];
        const RngStream stream = derive_stream(derive_stream(root, static_cast<std::uint64_t>(n)), r);
        auto& out = cells[c];
        const auto start = std::chrono::steady_clock::now();
        try {
            auto [measure, hs] = sample(n, scales[s], stream);
            const double second = integrate(measure, [](double x) { return x * x; });
            const double expected = hs / (static_cast<double>(n) * scales[s] * scales[s]);
            out.second_moment_error = expected > 0.0 ? std::abs(second - expected) / expected : std::abs(second);
            out.measure = std::move(measure);
        } catch (const std::exception& e) {
            out.error = e.what();
        }
        out.ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    });

    RunReport report;
    report.rows.resize(cells.size());
    report.sizes.resize(S);
    for (std::size_t s = 0; s < S; ++s) {
        std::vector<EmpiricalMeasure> valid;
        std::vector<std::size_t> valid_index(R, R);
        for (std::size_t r = 0; r < R; ++r) {
            if (cells[s * R + r].measure) {
                valid_index[r] = valid.size();
                valid.push_back(*cells[s * R + r].measure);
            }
        }
        parallel_for(R, config.jobs, [&](std::size_t r) {
            const auto& cell = cells[s * R + r];
            ResultRow& row = report.rows[s * R + r];
            row.n = config.sizes[s];
            row.d_n = dns[s];
            row.replica = static_cast<int>(r);
            row.scale = scales[s];
            row.ms = config.timing ? cell.ms : 0.0;
            row.second_moment_error = cell.second_moment_error;
            if (!cell.measure) {
                row.error = cell.error;
                return;
            }
            if (valid.size() < 2) {
                row.error = "fewer than two valid replicas";
                return;
            }
            row.dist = distance(config.metric, *cell.measure, leave_one_out(valid, valid_index[r]));
            if (ref_of) row.ref_dist = ref_of(*cell.measure);
        });
        SizeSummary& sum = report.sizes[s];
        sum.n = config.sizes[s];
        sum.d_n = dns[s];
        sum.scale = scales[s];
        std::vector<double> dists;
        for (std::size_t r = 0; r < R; ++r) {
            const auto& row = report.rows[s * R + r];
            if (row.ok()) {
                dists.push_back(row.dist);
            } else {
                ++sum.failed;
            }
        }
        sum.median_dist = median(dists);
        if (ref_of && !valid.empty()) sum.pooled_ref_dist = ref_of(pooled_mean(valid));
    }
    return report;
}

}  // namespace

RunReport run_concentration(const ExperimentConfig& config) {
    const EnsembleSpec& spec = config.ensemble;
    RefFn ref;
    if (config.reference) {
        const ReferenceLaw law = *config.reference;
        ref = [law](const EmpiricalMeasure& mu) { return kolmogorov_to_reference(mu, law); };
    }
    return run_cells(
        config, [&](int n) { return dependency_partition(spec, n).d(); },
        [&](int n) { return matrix_scale(spec, n); },
        [&](int n, double scale, const RngStream& stream) {
            const HermitianMatrix x = sample_matrix(spec, n, stream);
            return std::make_pair(esd(x, scale), x.hs_norm_squared());
        },
        ref);
}

RunReport run_heavy_tail(const ExperimentConfig& config) {
    const EnsembleSpec& spec = config.ensemble;
    if (spec.entry_law.finite_variance()) {
        throw std::invalid_argument("heavy-tail run needs an infinite-variance entry law, got '" +
                                    spec.entry_law.to_string() + "'");
    }
    switch (spec.kind) {
    case EnsembleKind::Wigner:
    case EnsembleKind::Toeplitz:
    case EnsembleKind::Hankel:
    case EnsembleKind::ReversedCirculant:
    case EnsembleKind::SymmetricCirculant:
    case EnsembleKind::Band: break;
    default:
        throw std::invalid_argument("heavy-tail run needs blocks of size O(n); '" + kind_name(spec.kind) +
                                    "' is not supported");
    }
    ExperimentConfig heavy = config;
    heavy.ensemble.scale_rule = ScaleRule::InvBn;
    return run_concentration(heavy);
}

RunReport run_singular(const ExperimentConfig& config, const std::function<int(int)>& n_to_big_n) {
    const EnsembleSpec& spec = config.ensemble;
    if (!spec.rectangular_capable()) {
        throw std::invalid_argument("ensemble '" + kind_name(spec.kind) + "' is square-only");
    }
    RefFn ref;
    if (config.reference) {
        const ReferenceLaw law = *config.reference;
        ref = [law](const EmpiricalMeasure& mu) { return kolmogorov_to_reference(mu, law); };
    }
    // The MP law describes eigenvalues of XX*/N; singular values s of X/sqrt(n)
    // map there through s -> (n/N) s^2, which is increasing on s >= 0.
    std::function<double(const EmpiricalMeasure&, int)> ref_sized;
    return run_cells(
        config, [&](int n) { return rectangular_partition(spec, n, n_to_big_n(n)).d(); },
        [](int n) { return std::sqrt(static_cast<double>(n)); },
        [&](int n, double scale, const RngStream& stream) {
            const int big_n = n_to_big_n(n);
            if (big_n < 1) throw std::invalid_argument("N(n) must be >= 1");
            const RectMatrix x = sample_rectangular(spec, n, big_n, stream);
            EmpiricalMeasure mu = singular_esd(x, scale);
            return std::make_pair(std::move(mu), x.hs_norm_squared());
        },
        config.reference && config.reference->kind == ReferenceKind::MarchenkoPastur
            ? RefFn([law = *config.reference](const EmpiricalMeasure& mu) {
                  const double c = law.param;
                  return kolmogorov_to_reference(mu.map_increasing([c](double s) { return c * s * s; }), law);
              })
            : ref);
}

void write_rows_csv(std::ostream& out, std::span<const ResultRow> rows) {
    out << "n,d_n,replica,dist,ref_dist,ms\n";
    for (const auto& r : rows) {
        out << r.n << ',' << r.d_n << ',' << r.replica << ',';
        if (!r.ok()) {
            out << "error,error," << format_double(r.ms) << '\n';
            continue;
        }
        out << format_double(r.dist) << ',' << (r.ref_dist ? format_double(*r.ref_dist) : std::string()) << ','
            << format_double(r.ms) << '\n';
    }
}

void write_summary_csv(std::ostream& out, std::span<const SizeSummary> sizes) {
    out << "n,d_n,scale,median_dist,pooled_ref_dist,failed\n";
    for (const auto& s : sizes) {
        out << s.n << ',' << s.d_n << ',' << format_double(s.scale) << ',' << format_double(s.median_dist) << ','
            << (s.pooled_ref_dist ? format_double(*s.pooled_ref_dist) : std::string()) << ',' << s.failed << '\n';
    }
}

// ---------------------------------------------------------------- tail profile

TailProfile tail_profile(const EnsembleSpec& ensemble, int n, int replicas, const RealFunction& f,
                         std::span<const double> t_grid, std::uint64_t seed, int jobs) {
    if (replicas < 100) throw std::invalid_argument("tail_profile needs at least 100 replicas");
    for (std::size_t k = 1; k < t_grid.size(); ++k) {
        if (!(t_grid[k] > t_grid[k - 1])) throw std::invalid_argument("tail_profile: t grid must be ascending");
    }
    TailProfile out;
    out.statistics.resize(static_cast<std::size_t>(replicas));
    const double scale = matrix_scale(ensemble, n);
    const RngStream root = derive_stream(RngStream(seed), static_cast<std::uint64_t>(n));
    parallel_for(out.statistics.size(), jobs, [&](std::size_t r) {
        const HermitianMatrix x = sample_matrix(ensemble, n, derive_stream(root, r));
        out.statistics[r] = integrate(esd(x, scale), f);
    });
    double s = 0.0;
    for (double v : out.statistics) s += v;
    out.mean = s / replicas;
    std::vector<double> xs, ys;
    for (double t : t_grid) {
        int hits = 0;
        for (double v : out.statistics) hits += std::abs(v - out.mean) > t ? 1 : 0;
        const double freq = static_cast<double>(hits) / replicas;
        out.t.push_back(t);
        out.exceed_freq.push_back(freq);
        if (freq > 0.0) {
            xs.push_back(t * t);
            ys.push_back(std::log(freq));
        }
    }
    out.fit_points = static_cast<int>(xs.size());
    if (xs.size() >= 2) {
        const double m = static_cast<double>(xs.size());
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (std::size_t k = 0; k < xs.size(); ++k) {
            sx += xs[k];
            sy += ys[k];
            sxx += xs[k] * xs[k];
            sxy += xs[k] * ys[k];
        }
        const double den = m * sxx - sx * sx;
        if (den > 0.0) {
            out.slope = (m * sxy - sx * sy) / den;
            out.intercept = (sy - out.slope * sx) / m;
            double ss_tot = 0, ss_res = 0;
            const double ybar = sy / m;
            for (std::size_t k = 0; k < xs.size(); ++k) {
                const double fit = out.intercept + out.slope * xs[k];
                ss_res += (ys[k] - fit) * (ys[k] - fit);
                ss_tot += (ys[k] - ybar) * (ys[k] - ybar);
            }
            out.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
        }
    }
    return out;
}

void write_tail_csv(std::ostream& out, const TailProfile& profile) {
    out << "t,exceed_freq\n";
    for (std::size_t k = 0; k < profile.t.size(); ++k) {
        out << format_double(profile.t[k]) << ',' << format_double(profile.exceed_freq[k]) << '\n';
    }
}

// ---------------------------------------------------------------- lemma sweeps

SupportedFunction random_lipschitz_function(double M, RngStream& stream) {
    const int knots = 8 + static_cast<int>(stream.next_u64() % 24);
    const double h = 2.0 * M / knots;
    std::vector<double> walk(static_cast<std::size_t>(knots) + 1);
    walk[0] = (2.0 * stream.uniform() - 1.0) * M;
    for (std::size_t k = 1; k < walk.size(); ++k) walk[k] = walk[k - 1] + (2.0 * stream.uniform() - 1.0) * h;
    auto f = [walk, h, M, knots](double x) {
        if (x <= -M || x >= M) return 0.0;
        const double pos = (x + M) / h;
        const int k = std::min(knots - 1, static_cast<int>(pos));
        const double frac = pos - k;
        const double g = walk[static_cast<std::size_t>(k)] * (1.0 - frac) + walk[static_cast<std::size_t>(k) + 1] * frac;
        const double room = M - std::abs(x);
        return std::clamp(g, -room, room);
    };
    return {f, -M, M};
}

namespace {

HermitianMatrix gaussian_hermitian(int n, bool complex_entries, const RngStream& stream) {
    const EntryLaw law = complex_entries ? EntryLaw::complex_gaussian() : EntryLaw::gaussian();
    return sample_matrix(EnsembleSpec::wigner(law), n, stream);
}

HermitianMatrix low_rank_perturbation(const HermitianMatrix& a, int rank, bool complex_entries, RngStream& stream) {
    const int n = a.n();
    Matrix p(n, n);
    const EntryLaw law = complex_entries ? EntryLaw::complex_gaussian() : EntryLaw::gaussian();
    for (int k = 0; k < rank; ++k) {
        std::vector<cplx> v(static_cast<std::size_t>(n));
        for (auto& z : v) z = sample_entry(law, stream);
        const double weight = 2.0 * stream.uniform() - 1.0;
        for (int i = 0; i < n; ++i) {
            for (int j = i; j < n; ++j) {
                p(i, j) += weight * v[static_cast<std::size_t>(i)] * std::conj(v[static_cast<std::size_t>(j)]);
            }
        }
    }
    return HermitianMatrix(a.matrix() + symmetrize_from_upper(std::move(p)));
}

struct SweepAccumulator {
    LemmaSweep result;
    explicit SweepAccumulator(std::string name, int samples) {
        result.check = std::move(name);
        result.samples = samples;
        result.min_margin = INFINITY;
    }
    void add(double normalized_margin, double tolerance) {
        result.min_margin = std::min(result.min_margin, normalized_margin);
        if (normalized_margin < -tolerance) ++result.violations;
    }
};

LemmaSweep sweep(const std::string& name, int samples, int jobs, double tolerance,
                 const std::function<double(std::size_t)>& margin_of) {
    std::vector<double> margins(static_cast<std::size_t>(samples));
    parallel_for(margins.size(), jobs, [&](std::size_t k) { margins[k] = margin_of(k); });
    SweepAccumulator acc(name, samples);
    for (double m : margins) acc.add(m, tolerance);
    return acc.result;
}

}  // namespace

std::vector<LemmaSweep> run_lemma_sweeps(std::uint64_t seed, int samples, int jobs) {
    if (samples < 1) throw std::invalid_argument("lemma sweeps need samples >= 1");
    const RngStream root(seed);
    auto stream_for = [&](std::uint64_t check, std::size_t k) { return derive_stream(derive_stream(root, check), k); };
    std::vector<LemmaSweep> out;

    out.push_back(sweep("hoffman_wielandt", samples, jobs, kLemmaTolerance, [&](std::size_t k) {
        RngStream s = stream_for(1, k);
        const bool cx = k % 2 == 1;
        const auto a = gaussian_hermitian(16, cx, derive_stream(s, 0));
        const auto b = gaussian_hermitian(16, cx, derive_stream(s, 1));
        const double hs = (a.matrix() - b.matrix()).hs_norm_squared();
        return check_hoffman_wielandt(a, b) / std::max(hs, 1e-300);
    }));

    out.push_back(sweep("functional_lipschitz", samples, jobs, kLemmaTolerance, [&](std::size_t k) {
        RngStream s = stream_for(2, k);
        const bool cx = k % 2 == 1;
        const auto a = gaussian_hermitian(16, cx, derive_stream(s, 0));
        // Nearby pairs make the inequality tight enough to be informative.
        const auto noise = gaussian_hermitian(16, cx, derive_stream(s, 1));
        const double eps = std::pow(10.0, -3.0 * s.uniform());
        const HermitianMatrix b(a.matrix() + noise.matrix().scaled(eps));
        const double clip = 0.5 + 2.0 * s.uniform();
        return check_functional_lipschitz(a, b, [clip](double x) { return std::min(std::abs(x), clip); });
    }));

    out.push_back(sweep("klein_convexity", samples, jobs, kLemmaTolerance, [&](std::size_t k) {
        RngStream s = stream_for(3, k);
        const bool cx = k % 2 == 1;
        const auto a = gaussian_hermitian(12, cx, derive_stream(s, 0));
        const auto b = gaussian_hermitian(12, cx, derive_stream(s, 1));
        const double lam = s.uniform();
        const auto sq = [](double x) { return x * x; };
        const double margin = check_klein_convexity(a, b, sq, lam);
        const double level = std::max(1.0, (a.hs_norm_squared() + b.hs_norm_squared()) / 12.0);
        return margin / level;
    }));

    out.push_back(sweep("rank_inequality", samples, jobs, kLemmaTolerance, [&](std::size_t k) {
        RngStream s = stream_for(4, k);
        const bool cx = k % 2 == 1;
        const auto a = gaussian_hermitian(20, cx, derive_stream(s, 0));
        const int rank = 1 + static_cast<int>(s.next_u64() % 3);
        const auto b = low_rank_perturbation(a, rank, cx, s);
        return check_rank_inequality(a, b);
    }));

    out.push_back(sweep("moment_estimate", samples, jobs, kLemmaTolerance, [&](std::size_t k) {
        RngStream s = stream_for(5, k);
        const bool cx = k % 2 == 1;
        const auto x = gaussian_hermitian(10, cx, derive_stream(s, 0));
        // r = 1 on even samples, uniform on (0, 2] on odd ones.
        const double r = k % 2 == 0 ? 1.0 : 2.0 * (1.0 - s.uniform());
        double level = 0.0;
        for (int i = 0; i < x.n(); ++i) {
            double sq = 0.0;
            for (const auto& z : x.matrix().row(i)) sq += std::norm(z);
            level += std::pow(std::sqrt(sq), r);
        }
        return check_moment_estimate(x, r) / std::max(1.0, level);
    }));

    // f_delta construction over (M, delta) in {1, 2} x {0.5, 0.1}.
    constexpr int kFunctions = 50;
    constexpr double kSlack = 1e-12;
    struct FDeltaResult {
        double sup_margin, kappa_margin, lipschitz_margin, curvature_margin, sum_margin;
    };
    std::vector<FDeltaResult> fd(kFunctions);
    parallel_for(fd.size(), jobs, [&](std::size_t k) {
        RngStream s = stream_for(6, k);
        const double M = k % 2 == 0 ? 1.0 : 2.0;
        const double delta = (k / 2) % 2 == 0 ? 0.5 : 0.1;
        const SupportedFunction f = random_lipschitz_function(M, s);
        const LipschitzDecomposition dec = build_f_delta(f, M, delta);
        const int grid = kDefaultGridPoints;
        const double lo = -M - 1.0;
        const double hi = M + 1.0;
        const double step = (hi - lo) / (grid - 1);
        double sup_err = 0.0;
        double sum_err = 0.0;
        for (int g = 0; g < grid; ++g) {
            const double x = lo + step * g;
            const double approx = dec.evaluate(x);
            sup_err = std::max(sup_err, std::abs(f(x) - approx));
            sum_err = std::max(sum_err, std::abs(dec.evaluate_pieces(x) - approx));
        }
        double lip = INFINITY;
        double curv = INFINITY;
        for (const auto& piece : dec.pieces) {
            for (int g = 1; g + 1 < grid; ++g) {
                const double x = lo + step * g;
                const double xl = x - step;
                const double xr = x + step;
                lip = std::min(lip, (xr - x) + kSlack - std::abs(piece(xr) - piece(x)));
                const double mid_gap = 0.5 * (piece(xl) + piece(xr)) - piece(x);
                curv = std::min(curv, (piece.curvature() == Curvature::Convex ? mid_gap : -mid_gap) + kSlack);
            }
        }
        fd[k] = {(delta - sup_err) / delta, static_cast<double>(dec.kappa_bound() - dec.kappa()), lip, curv,
                 kSlack - sum_err};
    });
    const char* names[] = {"f_delta_sup_error", "f_delta_kappa", "f_delta_piece_lipschitz",
                           "f_delta_piece_curvature", "f_delta_piece_sum"};
    for (int c = 0; c < 5; ++c) {
        SweepAccumulator acc(names[c], kFunctions);
        for (const auto& r : fd) {
            const double m[] = {r.sup_margin, r.kappa_margin, r.lipschitz_margin, r.curvature_margin, r.sum_margin};
            acc.add(m[c], 0.0);
        }
        out.push_back(acc.result);
    }
    return out;
}

void write_lemma_csv(std::ostream& out, std::span<const LemmaSweep> sweeps) {
    out << "check,samples,min_margin,violations\n";
    for (const auto& s : sweeps) {
        out << s.check << ',' << s.samples << ',' << format_double(s.min_margin) << ',' << s.violations << '\n';
    }
}

// ---------------------------------------------------------------- config file

ConfigError::ConfigError(int line, std::string field, const std::string& message)
    : std::runtime_error("config line " + std::to_string(line) + ", field '" + field + "': " + message),
      line_(line),
      field_(std::move(field)) {}

RealFunction parse_test_function(std::string_view text) {
    const auto p = split_kind_options(text);
    if (p.kind == "constant") {
        const double v = p.number("value", 1.0);
        return [v](double) { return v; };
    }
    if (p.kind == "clipped_abs") {
        const double clip = p.number("clip", 2.0);
        return [clip](double x) { return std::min(std::abs(x), clip); };
    }
    if (p.kind == "tent") {
        const double c = p.number("center", 0.0);
        const double w = p.number("width", 1.0);
        return [c, w](double x) { return std::max(0.0, w - std::abs(x - c)); };
    }
    throw std::invalid_argument("unknown test function '" + p.kind + "'");
}

namespace {

template <typename T, typename Parse>
std::vector<T> parse_list(const std::string& value, Parse parse) {
    std::vector<T> out;
    for (const auto& item : split(value, ',')) {
        if (item.empty()) throw std::invalid_argument("empty list item");
        out.push_back(parse(item));
    }
    return out;
}

}  // namespace

ConfigFile parse_config(std::istream& in) {
    ConfigFile cfg;
    std::string section = "experiment";
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = raw;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError(line_no, "section", "unterminated section header");
            section = std::string(trim(line.substr(1, line.size() - 2)));
            if (section != "experiment" && section != "singular" && section != "tail" && section != "conditions") {
                throw ConfigError(line_no, "section", "unknown section '" + section + "'");
            }
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ConfigError(line_no, std::string(line), "expected key = value");
        const std::string key(trim(line.substr(0, eq)));
        const std::string value(trim(line.substr(eq + 1)));
        const std::string field = section + "." + key;
        try {
            auto& ex = cfg.experiment;
            if (section == "experiment") {
                if (key == "ensemble") {
                    ex.ensemble = EnsembleSpec::parse(value);
                } else if (key == "sizes") {
                    ex.sizes = parse_list<int>(value, [](const std::string& s) { return static_cast<int>(parse_integer(s)); });
                } else if (key == "replicas") {
                    ex.replicas = static_cast<int>(parse_integer(value));
                } else if (key == "metric") {
                    ex.metric = MetricChoice::parse(value);
                } else if (key == "seed") {
                    const long long s = parse_integer(value);
                    if (s < 0) throw std::invalid_argument("seed must be >= 0");
                    ex.seed = static_cast<std::uint64_t>(s);
                    cfg.seed_given = true;
                } else if (key == "reference") {
                    if (value == "none") {
                        ex.reference.reset();
                    } else {
                        ex.reference = parse_reference(value);
                    }
                } else if (key == "jobs") {
                    ex.jobs = static_cast<int>(parse_integer(value));
                } else if (key == "timing") {
                    if (value != "true" && value != "false") throw std::invalid_argument("expected true or false");
                    ex.timing = value == "true";
                } else {
                    throw ConfigError(line_no, field, "unknown key");
                }
            } else if (section == "singular") {
                if (key != "ratio") throw ConfigError(line_no, field, "unknown key");
                cfg.singular_ratio = parse_double(value);
                if (!(cfg.singular_ratio > 0.0)) throw std::invalid_argument("ratio must be > 0");
            } else if (section == "tail") {
                if (key == "n") {
                    cfg.tail.n = static_cast<int>(parse_integer(value));
                } else if (key == "replicas") {
                    cfg.tail.replicas = static_cast<int>(parse_integer(value));
                } else if (key == "function") {
                    parse_test_function(value);
                    cfg.tail.function = value;
                } else if (key == "t_grid") {
                    cfg.tail.t_grid = parse_list<double>(value, [](const std::string& s) { return parse_double(s); });
                } else {
                    throw ConfigError(line_no, field, "unknown key");
                }
            } else {
                if (key == "thresholds") {
                    cfg.conditions.thresholds =
                        parse_list<double>(value, [](const std::string& s) { return parse_double(s); });
                } else if (key == "n_list") {
                    cfg.conditions.n_list = parse_list<long long>(value, [](const std::string& s) { return parse_integer(s); });
                } else {
                    throw ConfigError(line_no, field, "unknown key");
                }
            }
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception& e) {
            throw ConfigError(line_no, field, e.what());
        }
    }
    try {
        cfg.experiment.validate();
    } catch (const std::exception& e) {
        throw ConfigError(line_no, "experiment", e.what());
    }
    return cfg;
}

}  // namespace specmeter
