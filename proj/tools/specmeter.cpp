// specmeter: command-line front end for the simulation harness.
//
// Exit codes: 0 ok, 1 property violation, 2 usage or configuration error.

#include "specmeter/conditions.hpp"
#include "specmeter/ensembles.hpp"
#include "specmeter/harness.hpp"
#include "specmeter/spectra.hpp"
#include "specmeter/textio.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace specmeter;

constexpr int kOk = 0;
constexpr int kViolation = 1;
constexpr int kUsage = 2;

// Thrown for bad flags or values that CLI11 cannot catch itself.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Options {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out_path;
    std::string summary_path;
    std::optional<int> jobs;
    bool timing = false;

    std::string ensemble;
    std::string sizes;
    std::optional<int> replicas;
    std::string metric;
    std::string reference;

    int n = 8;                       // sample, spectrum
    std::optional<double> ratio;     // singular
    int samples = 500;               // lemmas
    std::string mode = "bn";         // conditions
    std::string law = "heavy_cubic:cut=1";
    std::string n_list;
    std::string thresholds;
    std::optional<int> tail_n;       // tail
    std::optional<int> tail_replicas;
    std::string function;
    std::string t_grid;
};

void add_common(CLI::App& sub, Options& o) {
    sub.add_option("--config", o.config_path, "Config file (key = value with [sections])");
    sub.add_option("--seed", o.seed, "Master seed; falls back to the config, then SPECMETER_SEED, then 0");
    sub.add_option("--out", o.out_path, "Output CSV path (default: stdout)");
    sub.add_option("--jobs", o.jobs, "Worker threads; never changes results")->check(CLI::PositiveNumber);
    sub.add_option("--ensemble", o.ensemble, "Ensemble, e.g. wigner:entry=rademacher");
}

void add_run_options(CLI::App& sub, Options& o) {
    sub.add_option("--sizes", o.sizes, "Comma-separated ascending matrix sizes");
    sub.add_option("--replicas", o.replicas, "Replicas per size (>= 2)");
    sub.add_option("--metric", o.metric, "kolmogorov | levy_prokhorov:tol=T | bl_series:K=K");
    sub.add_option("--reference", o.reference, "semicircle | marchenko_pastur:c=C | dirac:a=A | none");
    sub.add_option("--summary", o.summary_path, "Also write per-size summary CSV here");
    sub.add_flag("--timing", o.timing, "Fill the ms column with wall time (breaks byte reproducibility)");
}

template <typename T, typename Parse>
std::vector<T> parse_csv_list(const std::string& text, const char* what, Parse parse) {
    std::vector<T> out;
    try {
        for (const auto& item : split(text, ',')) out.push_back(parse(std::string(trim(item))));
    } catch (const std::exception& e) {
        throw UsageError(std::string("--") + what + ": " + e.what());
    }
    return out;
}

std::uint64_t env_seed() {
    const char* env = std::getenv("SPECMETER_SEED");
    if (env == nullptr || *env == '\0') return 0;
    try {
        const long long v = parse_integer(env);
        if (v < 0) throw std::invalid_argument("negative");
        return static_cast<std::uint64_t>(v);
    } catch (const std::exception&) {
        throw UsageError(std::string("SPECMETER_SEED is not a nonnegative integer: '") + env + "'");
    }
}

// Config file first, then flag overrides.
ConfigFile resolve(const Options& o) {
    ConfigFile cfg;
    if (!o.config_path.empty()) {
        std::ifstream in(o.config_path);
        if (!in) throw UsageError("cannot open config file '" + o.config_path + "'");
        cfg = parse_config(in);
    }
    auto& ex = cfg.experiment;
    try {
        if (!o.ensemble.empty()) ex.ensemble = EnsembleSpec::parse(o.ensemble);
        if (!o.metric.empty()) ex.metric = MetricChoice::parse(o.metric);
        if (!o.reference.empty()) {
            ex.reference = o.reference == "none" ? std::nullopt : std::optional(parse_reference(o.reference));
        }
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    if (!o.sizes.empty()) {
        ex.sizes = parse_csv_list<int>(o.sizes, "sizes", [](const std::string& s) { return static_cast<int>(parse_integer(s)); });
    }
    if (o.replicas) ex.replicas = *o.replicas;
    if (o.jobs) ex.jobs = *o.jobs;
    if (o.timing) ex.timing = true;
    if (o.seed) {
        ex.seed = *o.seed;
    } else if (!cfg.seed_given) {
        ex.seed = env_seed();
    }
    if (o.ratio) cfg.singular_ratio = *o.ratio;
    if (o.tail_n) cfg.tail.n = *o.tail_n;
    if (o.tail_replicas) cfg.tail.replicas = *o.tail_replicas;
    if (!o.function.empty()) cfg.tail.function = o.function;
    if (!o.t_grid.empty()) {
        cfg.tail.t_grid = parse_csv_list<double>(o.t_grid, "t-grid", [](const std::string& s) { return parse_double(s); });
    }
    if (!o.thresholds.empty()) {
        cfg.conditions.thresholds =
            parse_csv_list<double>(o.thresholds, "thresholds", [](const std::string& s) { return parse_double(s); });
    }
    if (!o.n_list.empty()) {
        cfg.conditions.n_list = parse_csv_list<long long>(o.n_list, "n-list", [](const std::string& s) { return parse_integer(s); });
    }
    try {
        ex.validate();
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    return cfg;
}

void emit(const Options& o, const std::string& text) {
    if (o.out_path.empty()) {
        std::cout << text;
        std::cout.flush();
        return;
    }
    std::ofstream out(o.out_path, std::ios::binary);
    if (!out) throw UsageError("cannot write '" + o.out_path + "'");
    out << text;
}

void emit_summary(const Options& o, const RunReport& report) {
    if (o.summary_path.empty()) return;
    std::ofstream out(o.summary_path, std::ios::binary);
    if (!out) throw UsageError("cannot write '" + o.summary_path + "'");
    write_summary_csv(out, report.sizes);
}

// Writes the rows, reports failed rows and the second-moment self-check.
int finish_run(const Options& o, const RunReport& report) {
    std::ostringstream csv;
    write_rows_csv(csv, report.rows);
    emit(o, csv.str());
    emit_summary(o, report);
    int status = kOk;
    for (const auto& row : report.rows) {
        if (!row.ok()) {
            std::cerr << "specmeter: n=" << row.n << " replica=" << row.replica << ": " << row.error << '\n';
        } else if (row.second_moment_error > 1e-8) {
            std::cerr << "specmeter: n=" << row.n << " replica=" << row.replica
                      << ": second-moment identity off by " << format_double(row.second_moment_error) << '\n';
            status = kViolation;
        }
    }
    for (const auto& s : report.sizes) {
        std::cerr << "n=" << s.n << " d_n=" << s.d_n << " median_dist=" << format_double(s.median_dist);
        if (s.pooled_ref_dist) std::cerr << " pooled_ref_dist=" << format_double(*s.pooled_ref_dist);
        std::cerr << '\n';
    }
    return status;
}

int cmd_sample(const Options& o) {
    const ConfigFile cfg = resolve(o);
    const auto& spec = cfg.experiment.ensemble;
    if (o.n < 1) throw UsageError("--n must be >= 1");
    const HermitianMatrix x = sample_matrix(spec, o.n, RngStream(cfg.experiment.seed));
    const DependencyPartition p = dependency_partition(spec, o.n);
    std::ostringstream csv;
    csv << "i,j,re,im,block\n";
    for (int i = 0; i < o.n; ++i) {
        for (int j = 0; j < o.n; ++j) {
            csv << i << ',' << j << ',' << format_double(x(i, j).real()) << ',' << format_double(x(i, j).imag())
                << ',' << p.block_of(i, j) << '\n';
        }
    }
    emit(o, csv.str());
    std::cerr << "ensemble=" << spec.to_string() << " n=" << o.n << " blocks=" << p.block_count() << " d=" << p.d()
              << '\n';
    return kOk;
}

int cmd_spectrum(const Options& o) {
    const ConfigFile cfg = resolve(o);
    const auto& spec = cfg.experiment.ensemble;
    if (o.n < 1) throw UsageError("--n must be >= 1");
    const HermitianMatrix x = sample_matrix(spec, o.n, RngStream(cfg.experiment.seed));
    Spectrum s = eigenvalues(x);
    const double scale = matrix_scale(spec, o.n);
    for (double& v : s.values) v /= scale;
    std::ostringstream csv;
    write_spectrum_csv(csv, s);
    emit(o, csv.str());
    return kOk;
}

int cmd_concentrate(const Options& o) {
    const ConfigFile cfg = resolve(o);
    return finish_run(o, run_concentration(cfg.experiment));
}

int cmd_heavy(const Options& o) {
    Options with_default = o;
    if (o.ensemble.empty() && o.config_path.empty()) with_default.ensemble = "wigner:entry=heavy_cubic:cut=1";
    ConfigFile cfg = resolve(with_default);
    RunReport report;
    try {
        report = run_heavy_tail(cfg.experiment);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    return finish_run(o, report);
}

int cmd_singular(const Options& o) {
    ConfigFile cfg = resolve(o);
    const double ratio = cfg.singular_ratio;
    if (!(ratio > 0.0)) throw UsageError("--ratio must be > 0");
    for (int n : cfg.experiment.sizes) {
        const double big = ratio * n;
        if (std::abs(big - std::round(big)) > 1e-9) {
            throw UsageError("ratio * n must be an integer (n = " + std::to_string(n) + ")");
        }
    }
    RunReport report;
    try {
        report = run_singular(cfg.experiment, [ratio](int n) { return static_cast<int>(std::lround(ratio * n)); });
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    return finish_run(o, report);
}

int cmd_lemmas(const Options& o) {
    const ConfigFile cfg = resolve(o);
    if (o.samples < 1) throw UsageError("--samples must be >= 1");
    const auto sweeps = run_lemma_sweeps(cfg.experiment.seed, o.samples, cfg.experiment.jobs);
    std::ostringstream csv;
    write_lemma_csv(csv, sweeps);
    emit(o, csv.str());
    int status = kOk;
    for (const auto& s : sweeps) {
        if (s.violations > 0) {
            std::cerr << "specmeter: " << s.check << ": " << s.violations << " violation(s), min margin "
                      << format_double(s.min_margin) << '\n';
            status = kViolation;
        }
    }
    return status;
}

int cmd_conditions(const Options& o) {
    const ConfigFile cfg = resolve(o);
    std::ostringstream csv;
    if (o.mode == "bn") {
        EntryLaw law;
        try {
            law = EntryLaw::parse(o.law);
            auto rows = heavy_tail_diagnostics(law, cfg.conditions.n_list);
            write_diagnostics_csv(csv, rows);
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
    } else if (o.mode == "lindeberg") {
        const auto& ex = cfg.experiment;
        const RngStream root(ex.seed);
        csv << "n,replica,threshold,statistic,exceed_count\n";
        for (int n : ex.sizes) {
            for (int r = 0; r < ex.replicas; ++r) {
                const HermitianMatrix x = sample_matrix(
                    ex.ensemble, n, derive_stream(derive_stream(root, static_cast<std::uint64_t>(n)), r));
                for (double m : cfg.conditions.thresholds) {
                    const auto rep = lindeberg_stat(x, m);
                    csv << n << ',' << r << ',' << format_double(m) << ',' << format_double(rep.statistic) << ','
                        << rep.exceed_count << '\n';
                }
            }
        }
    } else {
        throw UsageError("--mode must be 'bn' or 'lindeberg'");
    }
    emit(o, csv.str());
    return kOk;
}

int cmd_tail(const Options& o) {
    ConfigFile cfg = resolve(o);
    auto& tail = cfg.tail;
    if (tail.t_grid.empty()) {
        for (int k = 1; k <= 20; ++k) tail.t_grid.push_back(0.002 * k);
    }
    RealFunction f;
    TailProfile profile;
    try {
        f = parse_test_function(tail.function);
        profile = tail_profile(cfg.experiment.ensemble, tail.n, tail.replicas, f, tail.t_grid, cfg.experiment.seed,
                               cfg.experiment.jobs);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    std::ostringstream csv;
    write_tail_csv(csv, profile);
    emit(o, csv.str());
    std::cerr << "mean=" << format_double(profile.mean) << " slope=" << format_double(profile.slope)
              << " intercept=" << format_double(profile.intercept) << " r2=" << format_double(profile.r2)
              << " fit_points=" << profile.fit_points << '\n';
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Random matrix spectral concentration laboratory", "specmeter"};
    app.require_subcommand(1);
    Options o;

    auto* sample = app.add_subcommand("sample", "Emit one sampled matrix with its block labels");
    add_common(*sample, o);
    sample->add_option("--n", o.n, "Matrix size");

    auto* spectrum = app.add_subcommand("spectrum", "Emit the scaled eigenvalues of one sample");
    add_common(*spectrum, o);
    spectrum->add_option("--n", o.n, "Matrix size");

    auto* concentrate = app.add_subcommand("concentrate", "Leave-one-out concentration run");
    add_common(*concentrate, o);
    add_run_options(*concentrate, o);

    auto* heavy = app.add_subcommand("heavy", "Concentration run with b_n scaling for heavy tails");
    add_common(*heavy, o);
    add_run_options(*heavy, o);

    auto* singular = app.add_subcommand("singular", "Concentration of singular value distributions");
    add_common(*singular, o);
    add_run_options(*singular, o);
    singular->add_option("--ratio", o.ratio, "N = ratio * n");

    auto* lemmas = app.add_subcommand("lemmas", "Randomized sweeps of the matrix inequalities");
    add_common(*lemmas, o);
    lemmas->add_option("--samples", o.samples, "Samples per inequality");

    auto* conditions = app.add_subcommand("conditions", "b_n diagnostics or Lindeberg statistics");
    add_common(*conditions, o);
    add_run_options(*conditions, o);
    conditions->add_option("--mode", o.mode, "bn | lindeberg");
    conditions->add_option("--law", o.law, "Entry law for --mode bn");
    conditions->add_option("--n-list", o.n_list, "Comma-separated n values for --mode bn");
    conditions->add_option("--thresholds", o.thresholds, "Comma-separated thresholds for --mode lindeberg");

    auto* tail = app.add_subcommand("tail", "Exceedance profile of a spectral statistic");
    add_common(*tail, o);
    tail->add_option("--n", o.tail_n, "Matrix size");
    tail->add_option("--replicas", o.tail_replicas, "Replicas (>= 100)");
    tail->add_option("--function", o.function, "constant | clipped_abs:clip=C | tent:center=C,width=W");
    tail->add_option("--t-grid", o.t_grid, "Comma-separated ascending thresholds");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "specmeter: " << e.what() << "\n\n" << app.help();
        return kUsage;
    }

    try {
        if (*sample) return cmd_sample(o);
        if (*spectrum) return cmd_spectrum(o);
        if (*concentrate) return cmd_concentrate(o);
        if (*heavy) return cmd_heavy(o);
        if (*singular) return cmd_singular(o);
        if (*lemmas) return cmd_lemmas(o);
        if (*conditions) return cmd_conditions(o);
        if (*tail) return cmd_tail(o);
    } catch (const ConfigError& e) {
        std::cerr << "specmeter: " << e.what() << '\n';
        return kUsage;
    } catch (const UsageError& e) {
        std::cerr << "specmeter: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "specmeter: error: " << e.what() << '\n';
        return kViolation;
    }
    return kUsage;
}
