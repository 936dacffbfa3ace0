#include "specmeter/entries.hpp"

#include "specmeter/textio.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace specmeter {

namespace {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t hash_path(std::uint64_t seed, const std::vector<std::uint64_t>& path) {
    std::uint64_t h = splitmix64(seed ^ 0x5eed5eed5eed5eedULL);
    for (std::uint64_t p : path) {
        h = splitmix64(h ^ splitmix64(p + 0x632be59bd9b4e019ULL));
    }
    return h;
}

}  // namespace

EntryLaw EntryLaw::uniform(double bound) {
    if (!(bound > 0.0) || !std::isfinite(bound)) {
        throw std::invalid_argument("uniform law needs a finite bound > 0");
    }
    return {LawKind::UniformBounded, bound};
}

EntryLaw EntryLaw::heavy_cubic(double cut) {
    if (!(cut > 0.0) || !std::isfinite(cut)) {
        throw std::invalid_argument("heavy_cubic law needs a finite cut > 0");
    }
    return {LawKind::HeavyTailCubic, cut};
}

double EntryLaw::support_bound() const {
    switch (kind) {
    case LawKind::Rademacher: return 1.0;
    case LawKind::UniformBounded: return param;
    default: return std::numeric_limits<double>::infinity();
    }
}

double EntryLaw::variance() const {
    switch (kind) {
    case LawKind::UniformBounded: return param * param / 3.0;
    case LawKind::HeavyTailCubic: return std::numeric_limits<double>::infinity();
    default: return 1.0;
    }
}

std::string EntryLaw::to_string() const {
    switch (kind) {
    case LawKind::Rademacher: return "rademacher";
    case LawKind::UniformBounded: return "uniform:bound=" + format_double(param);
    case LawKind::StdGaussianReal: return "gaussian";
    case LawKind::StdGaussianComplex: return "complex_gaussian";
    case LawKind::HeavyTailCubic: return "heavy_cubic:cut=" + format_double(param);
    }
    return {};
}

EntryLaw EntryLaw::parse(std::string_view text) {
    const KindWithOptions parsed = split_kind_options(text);
    auto only = [&](std::initializer_list<std::string_view> allowed) {
        for (const auto& [k, v] : parsed.options) {
            bool ok = false;
            for (auto a : allowed) ok = ok || k == a;
            if (!ok) throw std::invalid_argument("entry law '" + parsed.kind + "': unknown option '" + k + "'");
        }
    };
    if (parsed.kind == "rademacher") {
        only({});
        return rademacher();
    }
    if (parsed.kind == "gaussian") {
        only({});
        return gaussian();
    }
    if (parsed.kind == "complex_gaussian") {
        only({});
        return complex_gaussian();
    }
    if (parsed.kind == "uniform") {
        only({"bound"});
        return uniform(parsed.number("bound", 1.0));
    }
    if (parsed.kind == "heavy_cubic") {
        only({"cut"});
        return heavy_cubic(parsed.number("cut", 1.0));
    }
    throw std::invalid_argument("unknown entry law '" + parsed.kind + "'");
}

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key) {
    constexpr std::uint32_t kMul0 = 0xD2511F53U;
    constexpr std::uint32_t kMul1 = 0xCD9E8D57U;
    constexpr std::uint32_t kWeyl0 = 0x9E3779B9U;
    constexpr std::uint32_t kWeyl1 = 0xBB67AE85U;
    for (int round = 0; round < 10; ++round) {
        const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
        const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
        const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
        const auto lo0 = static_cast<std::uint32_t>(p0);
        const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
        const auto lo1 = static_cast<std::uint32_t>(p1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += kWeyl0;
        key[1] += kWeyl1;
    }
    return ctr;
}

RngStream::RngStream(std::uint64_t seed, std::vector<std::uint64_t> path)
    : seed_(seed), path_(std::move(path)), key_(hash_path(seed_, path_)) {}

void RngStream::refill() {
    const std::array<std::uint32_t, 4> ctr{static_cast<std::uint32_t>(counter_),
                                           static_cast<std::uint32_t>(counter_ >> 32), 0U, 0U};
    const std::array<std::uint32_t, 2> key{static_cast<std::uint32_t>(key_),
                                           static_cast<std::uint32_t>(key_ >> 32)};
    const auto out = philox4x32(ctr, key);
    block_[0] = (std::uint64_t{out[1]} << 32) | out[0];
    block_[1] = (std::uint64_t{out[3]} << 32) | out[2];
    ++counter_;
}

std::uint64_t RngStream::next_u64() {
    if (has_spare_) {
        has_spare_ = false;
        return block_[1];
    }
    refill();
    has_spare_ = true;
    return block_[0];
}

double RngStream::uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

RngStream derive_stream(const RngStream& parent, std::uint64_t child_index) {
    std::vector<std::uint64_t> path = parent.path();
    path.push_back(child_index);
    return RngStream(parent.seed(), std::move(path));
}

namespace {

// Box-Muller pair from two uniforms; u1 is mapped into (0, 1].
std::pair<double, double> normal_pair(RngStream& s) {
    const double u1 = 1.0 - s.uniform();
    const double u2 = s.uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(theta), r * std::sin(theta)};
}

}  // namespace

double standard_normal(RngStream& stream) {
    return normal_pair(stream).first;
}

cplx sample_entry(const EntryLaw& law, RngStream& stream) {
    switch (law.kind) {
    case LawKind::Rademacher:
        return (stream.next_u64() >> 63) ? 1.0 : -1.0;
    case LawKind::UniformBounded:
        return law.param * (2.0 * stream.uniform() - 1.0);
    case LawKind::StdGaussianReal:
        return normal_pair(stream).first;
    case LawKind::StdGaussianComplex: {
        const auto [a, b] = normal_pair(stream);
        return cplx(a, b) / std::numbers::sqrt2;
    }
    case LawKind::HeavyTailCubic: {
        const double u = stream.uniform();
        const double magnitude = law.param / std::sqrt(1.0 - u);
        return (stream.next_u64() >> 63) ? magnitude : -magnitude;
    }
    }
    return 0.0;
}

double truncated_second_moment(const EntryLaw& law, double t) {
    if (!(t >= 0.0)) throw std::invalid_argument("truncated_second_moment: t must be >= 0");
    switch (law.kind) {
    case LawKind::Rademacher:
        return t >= 1.0 ? 1.0 : 0.0;
    case LawKind::UniformBounded: {
        const double b = law.param;
        return t >= b ? b * b / 3.0 : t * t * t / (3.0 * b);
    }
    case LawKind::StdGaussianReal:
        if (std::isinf(t)) return 1.0;
        return std::erf(t / std::numbers::sqrt2) -
               std::sqrt(2.0 / std::numbers::pi) * t * std::exp(-0.5 * t * t);
    case LawKind::StdGaussianComplex: {
        // |x|^2 ~ Exp(1)
        if (std::isinf(t)) return 1.0;
        const double s = t * t;
        return -std::expm1(-s) - s * std::exp(-s);
    }
    case LawKind::HeavyTailCubic: {
        const double c = law.param;
        return t <= c ? 0.0 : 2.0 * c * c * std::log(t / c);
    }
    }
    return 0.0;
}

double tail_probability(const EntryLaw& law, double t) {
    if (!(t >= 0.0)) throw std::invalid_argument("tail_probability: t must be >= 0");
    switch (law.kind) {
    case LawKind::Rademacher: return t < 1.0 ? 1.0 : 0.0;
    case LawKind::UniformBounded: return t < law.param ? 1.0 - t / law.param : 0.0;
    case LawKind::StdGaussianReal: return std::erfc(t / std::numbers::sqrt2);
    case LawKind::StdGaussianComplex: return std::exp(-t * t);
    case LawKind::HeavyTailCubic: {
        const double c = law.param;
        return t < c ? 1.0 : c * c / (t * t);
    }
    }
    return 0.0;
}

double tail_first_moment(const EntryLaw& law, double t) {
    if (!(t >= 0.0)) throw std::invalid_argument("tail_first_moment: t must be >= 0");
    switch (law.kind) {
    case LawKind::Rademacher: return t < 1.0 ? 1.0 : 0.0;
    case LawKind::UniformBounded: {
        const double b = law.param;
        return t < b ? (b * b - t * t) / (2.0 * b) : 0.0;
    }
    case LawKind::StdGaussianReal:
        return std::sqrt(2.0 / std::numbers::pi) * std::exp(-0.5 * t * t);
    case LawKind::StdGaussianComplex: {
        // |x| is Rayleigh with E|x|^2 = 1: density 2r e^{-r^2}.
        return t * std::exp(-t * t) + 0.5 * std::sqrt(std::numbers::pi) * std::erfc(t);
    }
    case LawKind::HeavyTailCubic: {
        const double c = law.param;
        return t < c ? 2.0 * c : 2.0 * c * c / t;
    }
    }
    return 0.0;
}

}  // namespace specmeter
