#pragma once

#include "specmeter/approx.hpp"
#include "specmeter/ensembles.hpp"
#include "specmeter/measures.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace specmeter {

enum class MetricKind { Kolmogorov, LevyProkhorov, BLSeries };

struct MetricChoice {
    MetricKind kind = MetricKind::BLSeries;
    double tol = 1e-6;            // LevyProkhorov
    int K = kDefaultSeriesTerms;  // BLSeries

    // "kolmogorov", "levy_prokhorov:tol=1e-6", "bl_series:K=64"
    std::string to_string() const;
    static MetricChoice parse(std::string_view text);
};

double distance(const MetricChoice& metric, const EmpiricalMeasure& mu, const EmpiricalMeasure& nu);

// "semicircle", "marchenko_pastur:c=0.5", "dirac:a=1"
ReferenceLaw parse_reference(std::string_view text);
std::string reference_to_string(const ReferenceLaw& law);

struct ExperimentConfig {
    EnsembleSpec ensemble;
    std::vector<int> sizes{64, 128, 256};
    int replicas = 16;
    MetricChoice metric;
    std::uint64_t seed = 0;
    std::optional<ReferenceLaw> reference;
    int jobs = 1;
    // Record wall time per row; off by default so output is reproducible.
    bool timing = false;

    ScaleRule scale_rule() const { return ensemble.scale_rule; }
    // Throws std::invalid_argument: replicas >= 2, sizes nonempty, positive
    // and strictly ascending, jobs >= 1.
    void validate() const;
};

struct ResultRow {
    int n = 0;
    std::size_t d_n = 0;
    int replica = 0;
    double dist = 0.0;
    std::optional<double> ref_dist;
    double ms = 0.0;
    double scale = 1.0;
    // |int x^2 dL_n - ||X||_HS^2 / (n scale^2)| relative to the latter.
    double second_moment_error = 0.0;
    std::string error;
    bool ok() const { return error.empty(); }
};

struct SizeSummary {
    int n = 0;
    std::size_t d_n = 0;
    double scale = 1.0;
    double median_dist = 0.0;
    // Kolmogorov distance of the pooled ESD (all replicas) to the reference.
    std::optional<double> pooled_ref_dist;
    int failed = 0;
};

struct RunReport {
    std::vector<ResultRow> rows;       // ordered by (n, replica)
    std::vector<SizeSummary> sizes;    // one per configured n
};

// ESD scale for one size: sqrt(n), b_n, or 1 for the self-normalized
// counterexample.
double matrix_scale(const EnsembleSpec& spec, int n);

// Leave-one-out concentration experiment.
RunReport run_concentration(const ExperimentConfig& config);
// As run_concentration with b_n scaling; requires an infinite-variance law
// and a kind with d_n = O(n).
RunReport run_heavy_tail(const ExperimentConfig& config);
// Singular values of n x N(n) samples scaled by sqrt(n). A MarchenkoPastur
// reference is compared after the map s -> (n/N) s^2.
RunReport run_singular(const ExperimentConfig& config, const std::function<int(int)>& n_to_big_n);

// Leave-one-out mean of measures other than `skip`.
EmpiricalMeasure leave_one_out(std::span<const EmpiricalMeasure> measures, std::size_t skip);

// Header "n,d_n,replica,dist,ref_dist,ms".
void write_rows_csv(std::ostream& out, std::span<const ResultRow> rows);
void write_summary_csv(std::ostream& out, std::span<const SizeSummary> sizes);

struct TailProfile {
    std::vector<double> t;
    std::vector<double> exceed_freq;
    std::vector<double> statistics;  // int f dL_n per replica
    double mean = 0.0;
    // Least-squares fit log(freq) = intercept + slope * t^2 over freq > 0.
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    int fit_points = 0;
};

// Requires replicas >= 100 and an ascending t grid.
TailProfile tail_profile(const EnsembleSpec& ensemble, int n, int replicas, const RealFunction& f,
                         std::span<const double> t_grid, std::uint64_t seed, int jobs = 1);
// Header "t,exceed_freq".
void write_tail_csv(std::ostream& out, const TailProfile& profile);

struct LemmaSweep {
    std::string check;
    int samples = 0;
    // Smallest margin divided by the check's scale; >= -tolerance passes.
    double min_margin = 0.0;
    int violations = 0;
};

constexpr double kLemmaTolerance = 1e-8;

// 1-Lipschitz piecewise-linear function vanishing outside [-M, M], built from
// a clamped random walk.
SupportedFunction random_lipschitz_function(double M, RngStream& stream);

// Randomized sweeps over the five matrix inequalities and the f_delta
// construction.
std::vector<LemmaSweep> run_lemma_sweeps(std::uint64_t seed, int samples = 500, int jobs = 1);
// Header "check,samples,min_margin,violations".
void write_lemma_csv(std::ostream& out, std::span<const LemmaSweep> sweeps);

// Runs fn(0..count-1) over `jobs` threads. Exceptions escape only after all
// threads joined.
void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& fn);

// ---------------------------------------------------------------- config file

class ConfigError : public std::runtime_error {
public:
    ConfigError(int line, std::string field, const std::string& message);
    int line() const { return line_; }
    const std::string& field() const { return field_; }

private:
    int line_;
    std::string field_;
};

struct TailSettings {
    int n = 128;
    int replicas = 400;
    std::string function = "clipped_abs:clip=2";
    std::vector<double> t_grid;
};

struct ConditionSettings {
    std::vector<double> thresholds{0.5, 1.0, 2.0, 4.0};
    std::vector<long long> n_list{100, 10000, 1000000};
};

struct ConfigFile {
    ExperimentConfig experiment;
    bool seed_given = false;
    double singular_ratio = 2.0;  // N = ratio * n
    TailSettings tail;
    ConditionSettings conditions;
};

// Flat key=value text with [experiment], [singular], [tail] and
// [conditions] sections; '#' starts a comment. Throws ConfigError.
ConfigFile parse_config(std::istream& in);

// "constant", "clipped_abs:clip=2", "tent:center=0,width=1".
RealFunction parse_test_function(std::string_view text);

}  // namespace specmeter
