#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace specmeter {

using cplx = std::complex<double>;

enum class LawKind {
    Rademacher,
    UniformBounded,
    StdGaussianReal,
    StdGaussianComplex,
    HeavyTailCubic,
};

// Scalar entry distribution. `param` is the bound for UniformBounded and the
// cut for HeavyTailCubic; unused otherwise.
struct EntryLaw {
    LawKind kind = LawKind::Rademacher;
    double param = 0.0;

    static EntryLaw rademacher() { return {LawKind::Rademacher, 0.0}; }
    static EntryLaw uniform(double bound);
    static EntryLaw gaussian() { return {LawKind::StdGaussianReal, 0.0}; }
    static EntryLaw complex_gaussian() { return {LawKind::StdGaussianComplex, 0.0}; }
    static EntryLaw heavy_cubic(double cut);

    bool is_complex() const { return kind == LawKind::StdGaussianComplex; }
    bool is_gaussian() const {
        return kind == LawKind::StdGaussianReal || kind == LawKind::StdGaussianComplex;
    }
    bool finite_variance() const { return kind != LawKind::HeavyTailCubic; }
    // l(t) slowly varying at infinity (domain of attraction of the Gaussian).
    bool slowly_varying() const { return true; }
    // Uniformly bounded absolute moments of every order.
    bool bounded_moments() const { return kind != LawKind::HeavyTailCubic; }
    // sup |x| when the support is bounded, +inf otherwise.
    double support_bound() const;
    // E|x|^2 (+inf for heavy tails).
    double variance() const;

    // Config form: "rademacher", "uniform:bound=2", "gaussian",
    // "complex_gaussian", "heavy_cubic:cut=1.0".
    std::string to_string() const;
    static EntryLaw parse(std::string_view text);

    friend bool operator==(const EntryLaw&, const EntryLaw&) = default;
};

// Reproducible splittable stream. The (seed, path) pair is hashed into a
// Philox-4x32-10 key; draws walk the counter.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed = 0, std::vector<std::uint64_t> path = {});

    std::uint64_t seed() const { return seed_; }
    const std::vector<std::uint64_t>& path() const { return path_; }
    std::uint64_t key() const { return key_; }

    std::uint64_t next_u64();
    // Uniform on [0, 1) with 53 random bits.
    double uniform();
    std::uint64_t draws() const { return counter_ * 2 + (has_spare_ ? 1 : 0); }

private:
    void refill();

    std::uint64_t seed_;
    std::vector<std::uint64_t> path_;
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    std::array<std::uint64_t, 2> block_{};
    bool has_spare_ = false;
};

RngStream derive_stream(const RngStream& parent, std::uint64_t child_index);

// Philox-4x32-10 block function; exposed for known-answer tests.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

double standard_normal(RngStream& stream);
cplx sample_entry(const EntryLaw& law, RngStream& stream);

// l(t) = E|x|^2 1{|x| <= t}, exact.
double truncated_second_moment(const EntryLaw& law, double t);
// P(|x| > t), exact.
double tail_probability(const EntryLaw& law, double t);
// E|x| 1{|x| > t}, exact.
double tail_first_moment(const EntryLaw& law, double t);

}  // namespace specmeter
