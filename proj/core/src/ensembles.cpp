#include "specmeter/ensembles.hpp"

#include "specmeter/textio.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <stdexcept>
#include <unordered_map>

namespace specmeter {

namespace {

std::string pair_text(int i, int j) {
    return "(" + std::to_string(i) + "," + std::to_string(j) + ")";
}

void require_size(int n) {
    if (n < 1) throw std::invalid_argument("matrix size must be >= 1, got " + std::to_string(n));
}

}  // namespace

// ---------------------------------------------------------------- partition

DependencyPartition DependencyPartition::from_labels(int n_rows, int n_cols,
                                                     const std::function<std::int64_t(int, int)>& label) {
    require_size(n_rows);
    require_size(n_cols);
    DependencyPartition p;
    p.n_rows_ = n_rows;
    p.n_cols_ = n_cols;
    p.labels_.resize(static_cast<std::size_t>(n_rows) * static_cast<std::size_t>(n_cols));
    std::unordered_map<std::int64_t, std::int32_t> ids;
    ids.reserve(p.labels_.size());
    std::size_t cell = 0;
    for (int i = 0; i < n_rows; ++i) {
        for (int j = 0; j < n_cols; ++j, ++cell) {
            const auto [it, inserted] = ids.try_emplace(label(i, j), static_cast<std::int32_t>(ids.size()));
            p.labels_[cell] = it->second;
        }
    }
    p.offsets_.assign(ids.size() + 1, 0);
    p.build_blocks();
    return p;
}

DependencyPartition DependencyPartition::from_blocks(int n_rows, int n_cols,
                                                     const std::vector<std::vector<IndexPair>>& blocks) {
    require_size(n_rows);
    require_size(n_cols);
    std::vector<std::int32_t> owner(static_cast<std::size_t>(n_rows) * static_cast<std::size_t>(n_cols), -1);
    for (std::size_t r = 0; r < blocks.size(); ++r) {
        if (blocks[r].empty()) throw std::invalid_argument("partition block " + std::to_string(r) + " is empty");
        for (const auto& c : blocks[r]) {
            if (c.i < 0 || c.i >= n_rows || c.j < 0 || c.j >= n_cols) {
                throw std::invalid_argument("partition cell " + pair_text(c.i, c.j) + " is out of range");
            }
            auto& slot = owner[static_cast<std::size_t>(c.i) * static_cast<std::size_t>(n_cols) +
                               static_cast<std::size_t>(c.j)];
            if (slot != -1) {
                throw std::invalid_argument("partition overlap at " + pair_text(c.i, c.j) + ": blocks " +
                                            std::to_string(slot) + " and " + std::to_string(r));
            }
            slot = static_cast<std::int32_t>(r);
        }
    }
    for (int i = 0; i < n_rows; ++i) {
        for (int j = 0; j < n_cols; ++j) {
            if (owner[static_cast<std::size_t>(i) * static_cast<std::size_t>(n_cols) + static_cast<std::size_t>(j)] == -1) {
                throw std::invalid_argument("partition gap: cell " + pair_text(i, j) + " is in no block");
            }
        }
    }
    return from_labels(n_rows, n_cols, [&](int i, int j) {
        return std::int64_t{owner[static_cast<std::size_t>(i) * static_cast<std::size_t>(n_cols) +
                                  static_cast<std::size_t>(j)]};
    });
}

void DependencyPartition::build_blocks() {
    for (auto id : labels_) ++offsets_[static_cast<std::size_t>(id) + 1];
    for (std::size_t r = 1; r < offsets_.size(); ++r) offsets_[r] += offsets_[r - 1];
    cells_.resize(labels_.size());
    std::vector<std::size_t> cursor(offsets_.begin(), offsets_.end() - 1);
    std::size_t cell = 0;
    for (int i = 0; i < n_rows_; ++i) {
        for (int j = 0; j < n_cols_; ++j, ++cell) {
            cells_[cursor[static_cast<std::size_t>(labels_[cell])]++] = {i, j};
        }
    }
    d_ = 0;
    for (std::size_t r = 0; r + 1 < offsets_.size(); ++r) d_ = std::max(d_, offsets_[r + 1] - offsets_[r]);
}

std::span<const IndexPair> DependencyPartition::block(std::size_t r) const {
    return std::span<const IndexPair>(cells_).subspan(offsets_[r], offsets_[r + 1] - offsets_[r]);
}

std::vector<std::size_t> DependencyPartition::block_sizes() const {
    std::vector<std::size_t> sizes(block_count());
    for (std::size_t r = 0; r < sizes.size(); ++r) sizes[r] = block_size(r);
    return sizes;
}

bool DependencyPartition::transpose_closed() const {
    if (n_rows_ != n_cols_) return false;
    for (int i = 0; i < n_rows_; ++i) {
        for (int j = i + 1; j < n_cols_; ++j) {
            if (block_of(i, j) != block_of(j, i)) return false;
        }
    }
    return true;
}

bool DependencyPartition::tiles_exactly() const {
    std::vector<bool> seen(labels_.size(), false);
    for (const auto& c : cells_) {
        const auto k = static_cast<std::size_t>(c.i) * static_cast<std::size_t>(n_cols_) + static_cast<std::size_t>(c.j);
        if (seen[k]) return false;
        seen[k] = true;
    }
    return std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
}

// ---------------------------------------------------------------- ensemble descriptions

std::int64_t link_label(EnsembleKind kind, int i, int j, int n) {
    switch (kind) {
    case EnsembleKind::Toeplitz: return std::abs(i - j);
    case EnsembleKind::Hankel: return i + j;
    case EnsembleKind::ReversedCirculant: return (i + j) % n;
    case EnsembleKind::SymmetricCirculant:
        // 2 * (n/2 - |n/2 - |i-j||), kept integral for odd n.
        return n - std::abs(n - 2 * std::abs(i - j));
    default:
        return std::int64_t{std::min(i, j)} * n + std::max(i, j);
    }
}

LinkFunction named_relation(std::string_view name) {
    name = trim(name);
    const auto colon = name.find(':');
    const std::string kind(trim(name.substr(0, colon)));
    const std::string_view arg = colon == std::string_view::npos ? std::string_view{} : name.substr(colon + 1);
    if (!arg.empty() && kind != "tiles") {
        throw std::invalid_argument("relation '" + kind + "' takes no argument");
    }
    if (kind == "transpose" || kind == "wigner") {
        return [](int i, int j, int n) { return link_label(EnsembleKind::Wigner, i, j, n); };
    }
    if (kind == "toeplitz") return [](int i, int j, int n) { return link_label(EnsembleKind::Toeplitz, i, j, n); };
    if (kind == "hankel") return [](int i, int j, int n) { return link_label(EnsembleKind::Hankel, i, j, n); };
    if (kind == "reversed_circulant") {
        return [](int i, int j, int n) { return link_label(EnsembleKind::ReversedCirculant, i, j, n); };
    }
    if (kind == "symmetric_circulant") {
        return [](int i, int j, int n) { return link_label(EnsembleKind::SymmetricCirculant, i, j, n); };
    }
    if (kind == "full") return [](int, int, int) { return std::int64_t{0}; };
    if (kind == "tiles") {
        const long long k = arg.empty() ? 2 : parse_integer(arg);
        if (k < 1) throw std::invalid_argument("tiles relation needs k >= 1");
        return [k](int i, int j, int n) {
            const std::int64_t a = std::min(i, j) / k;
            const std::int64_t b = std::max(i, j) / k;
            return a * (n + 1) + b;
        };
    }
    throw std::invalid_argument("unknown relation '" + kind + "'");
}

std::string kind_name(EnsembleKind kind) {
    switch (kind) {
    case EnsembleKind::Wigner: return "wigner";
    case EnsembleKind::Toeplitz: return "toeplitz";
    case EnsembleKind::Hankel: return "hankel";
    case EnsembleKind::ReversedCirculant: return "reversed_circulant";
    case EnsembleKind::SymmetricCirculant: return "symmetric_circulant";
    case EnsembleKind::Band: return "band";
    case EnsembleKind::BlockDependent: return "block";
    case EnsembleKind::SchenkerSchulz: return "schenker";
    case EnsembleKind::CounterexampleZ: return "counterexample_z";
    }
    return {};
}

EnsembleSpec EnsembleSpec::wigner(EntryLaw law) {
    EnsembleSpec s;
    s.kind = EnsembleKind::Wigner;
    s.entry_law = law;
    return s;
}

EnsembleSpec EnsembleSpec::patterned(EnsembleKind kind, EntryLaw law) {
    EnsembleSpec s;
    s.kind = kind;
    s.entry_law = law;
    return s;
}

EnsembleSpec EnsembleSpec::band(int width, EntryLaw law) {
    if (width < 0) throw std::invalid_argument("band width must be >= 0");
    EnsembleSpec s = patterned(EnsembleKind::Band, law);
    s.band_width = width;
    return s;
}

EnsembleSpec EnsembleSpec::blocks(int tile, EntryLaw law) {
    if (tile < 1) throw std::invalid_argument("tile size must be >= 1");
    EnsembleSpec s = patterned(EnsembleKind::BlockDependent, law);
    s.tile = tile;
    return s;
}

EnsembleSpec EnsembleSpec::schenker(std::string relation, EntryLaw law) {
    named_relation(relation);  // validate eagerly
    EnsembleSpec s = patterned(EnsembleKind::SchenkerSchulz, law);
    s.relation = std::move(relation);
    return s;
}

EnsembleSpec EnsembleSpec::counterexample(double t, EntryLaw law) {
    if (!(t > 0.0 && t < 1.0)) throw std::invalid_argument("counterexample t must lie in (0, 1)");
    EnsembleSpec s = patterned(EnsembleKind::CounterexampleZ, law);
    s.t = t;
    return s;
}

std::string EnsembleSpec::to_string() const {
    std::string out = kind_name(kind) + ":entry=" + entry_law.to_string();
    switch (kind) {
    case EnsembleKind::Band: out += ",b=" + std::to_string(band_width); break;
    case EnsembleKind::BlockDependent: out += ",tile=" + std::to_string(tile); break;
    case EnsembleKind::SchenkerSchulz: out += ",relation=" + relation; break;
    case EnsembleKind::CounterexampleZ:
        out += ",t=" + format_double(t) + ",dilation=" + format_double(dilation);
        break;
    default: break;
    }
    if (scale_rule == ScaleRule::InvBn) out += ",scale=inv_bn";
    if (mode == BlockMode::CorrelatedGaussian) out += ",mode=correlated,rho=" + format_double(rho);
    return out;
}

EnsembleSpec EnsembleSpec::parse(std::string_view text) {
    const KindWithOptions p = split_kind_options(text);
    EnsembleSpec s;
    std::vector<std::string> allowed{"entry", "scale", "mode", "rho"};
    if (p.kind == "wigner") {
        s.kind = EnsembleKind::Wigner;
    } else if (p.kind == "toeplitz") {
        s.kind = EnsembleKind::Toeplitz;
    } else if (p.kind == "hankel") {
        s.kind = EnsembleKind::Hankel;
    } else if (p.kind == "reversed_circulant") {
        s.kind = EnsembleKind::ReversedCirculant;
    } else if (p.kind == "symmetric_circulant") {
        s.kind = EnsembleKind::SymmetricCirculant;
    } else if (p.kind == "band") {
        s.kind = EnsembleKind::Band;
        s.band_width = static_cast<int>(p.integer("b", 1));
        if (s.band_width < 0) throw std::invalid_argument("band: b must be >= 0");
        allowed.emplace_back("b");
    } else if (p.kind == "block") {
        s.kind = EnsembleKind::BlockDependent;
        s.tile = static_cast<int>(p.integer("tile", 2));
        if (s.tile < 1) throw std::invalid_argument("block: tile must be >= 1");
        allowed.emplace_back("tile");
    } else if (p.kind == "schenker") {
        s.kind = EnsembleKind::SchenkerSchulz;
        s.relation = p.text("relation", "transpose");
        named_relation(s.relation);
        allowed.emplace_back("relation");
    } else if (p.kind == "counterexample_z") {
        s.kind = EnsembleKind::CounterexampleZ;
        s.t = p.number("t", 0.5);
        s.dilation = p.number("dilation", 2.0);
        if (!(s.t > 0.0 && s.t < 1.0)) throw std::invalid_argument("counterexample_z: t must lie in (0, 1)");
        allowed.emplace_back("t");
        allowed.emplace_back("dilation");
    } else {
        throw std::invalid_argument("unknown ensemble kind '" + p.kind + "'");
    }
    for (const auto& [k, v] : p.options) {
        if (std::find(allowed.begin(), allowed.end(), k) == allowed.end()) {
            throw std::invalid_argument("ensemble '" + p.kind + "': unknown option '" + k + "'");
        }
    }
    if (p.has("entry")) s.entry_law = EntryLaw::parse(p.text("entry", ""));
    const std::string scale = p.text("scale", "inv_sqrt_n");
    if (scale == "inv_sqrt_n") {
        s.scale_rule = ScaleRule::InvSqrtN;
    } else if (scale == "inv_bn") {
        s.scale_rule = ScaleRule::InvBn;
    } else {
        throw std::invalid_argument("unknown scale rule '" + scale + "'");
    }
    const std::string mode = p.text("mode", "replicated");
    if (mode == "replicated") {
        s.mode = BlockMode::Replicated;
    } else if (mode == "correlated") {
        s.mode = BlockMode::CorrelatedGaussian;
    } else {
        throw std::invalid_argument("unknown block mode '" + mode + "'");
    }
    s.rho = p.number("rho", 0.5);
    if (!(s.rho >= 0.0 && s.rho <= 1.0)) throw std::invalid_argument("rho must lie in [0, 1]");
    return s;
}

// ---------------------------------------------------------------- partitions

int counterexample_split(int n, double t_n) {
    require_size(n);
    const double m = n * t_n;
    const double rest = n * (1.0 - t_n);
    const double mr = std::round(m);
    if (std::abs(m - mr) > 1e-9 || std::abs(rest - std::round(rest)) > 1e-9) {
        throw std::invalid_argument("counterexample split n*t_n = " + format_double(m) + " is not an integer (n=" +
                                    std::to_string(n) + ")");
    }
    if (mr < 1.0 || mr > n - 1.0) {
        throw std::invalid_argument("counterexample split must leave both blocks nonempty (n=" +
                                    std::to_string(n) + ", t_n=" + format_double(t_n) + ")");
    }
    return static_cast<int>(mr);
}

DependencyPartition dependency_partition(const EnsembleSpec& spec, int n) {
    require_size(n);
    switch (spec.kind) {
    case EnsembleKind::Wigner:
    case EnsembleKind::Band:
    case EnsembleKind::Toeplitz:
    case EnsembleKind::Hankel:
    case EnsembleKind::ReversedCirculant:
    case EnsembleKind::SymmetricCirculant: {
        const EnsembleKind k = spec.kind == EnsembleKind::Band ? EnsembleKind::Wigner : spec.kind;
        return DependencyPartition::from_labels(n, n, [&](int i, int j) { return link_label(k, i, j, n); });
    }
    case EnsembleKind::BlockDependent: {
        if (spec.partition_rule) return spec.partition_rule(n, n);
        const auto link = named_relation("tiles:" + std::to_string(spec.tile));
        return DependencyPartition::from_labels(n, n, [&](int i, int j) { return link(i, j, n); });
    }
    case EnsembleKind::SchenkerSchulz: {
        const LinkFunction link = spec.relation_link ? spec.relation_link : named_relation(spec.relation);
        return DependencyPartition::from_labels(n, n, [&](int i, int j) { return link(i, j, n); });
    }
    case EnsembleKind::CounterexampleZ: {
        const int m = counterexample_split(n, spec.split_fraction(n));
        return DependencyPartition::from_labels(n, n, [&](int i, int j) -> std::int64_t {
            if (i < m && j < m) return -1;
            return std::int64_t{i} * n + j;
        });
    }
    }
    throw std::logic_error("unhandled ensemble kind");
}

DependencyPartition rectangular_partition(const EnsembleSpec& spec, int n_rows, int n_cols) {
    if (!spec.rectangular_capable()) {
        throw std::invalid_argument("ensemble '" + kind_name(spec.kind) + "' is square-only");
    }
    if (spec.kind == EnsembleKind::BlockDependent) {
        if (spec.partition_rule) return spec.partition_rule(n_rows, n_cols);
        const std::int64_t k = spec.tile;
        return DependencyPartition::from_labels(n_rows, n_cols, [&](int i, int j) {
            return (i / k) * (n_cols + 1) + j / k;
        });
    }
    return DependencyPartition::from_labels(n_rows, n_cols,
                                            [&](int i, int j) { return std::int64_t{i} * n_cols + j; });
}

// ---------------------------------------------------------------- sampling

namespace {

// Real diagonal value carrying the same second moment as the block draw.
double diagonal_value(cplx z, const EntryLaw& law) {
    return law.is_complex() ? std::numbers::sqrt2 * z.real() : z.real();
}

struct BlockDraw {
    const EntryLaw& law;
    BlockMode mode;
    double rho;
    RngStream stream;
    cplx common{};

    BlockDraw(const EntryLaw& l, BlockMode m, double r, RngStream s)
        : law(l), mode(m), rho(r), stream(std::move(s)) {
        common = sample_entry(law, stream);
    }
    cplx next() {
        if (mode == BlockMode::Replicated) return common;
        return std::sqrt(rho) * common + std::sqrt(1.0 - rho) * sample_entry(law, stream);
    }
};

void check_mode(const EntryLaw& law, BlockMode mode, double rho) {
    if (mode == BlockMode::CorrelatedGaussian) {
        if (!law.is_gaussian()) throw std::invalid_argument("correlated block mode requires a Gaussian entry law");
        if (!(rho >= 0.0 && rho <= 1.0)) throw std::invalid_argument("rho must lie in [0, 1]");
    }
}

}  // namespace

HermitianMatrix sample_from_partition(const DependencyPartition& partition, const EntryLaw& law, BlockMode mode,
                                      double rho, const BlockStreamFn& block_stream,
                                      const std::function<bool(int, int)>& active) {
    if (partition.n_rows() != partition.n_cols()) throw std::invalid_argument("Hermitian sampling needs a square partition");
    check_mode(law, mode, rho);
    const int n = partition.n_rows();
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (partition.block_of(i, j) != partition.block_of(j, i)) {
                throw std::invalid_argument("partition is not transpose-closed at " + pair_text(i, j));
            }
        }
    }
    Matrix m(n, n);
    for (std::size_t r = 0; r < partition.block_count(); ++r) {
        BlockDraw draw(law, mode, rho, block_stream(r));
        for (const auto& c : partition.block(r)) {
            if (c.i > c.j) continue;
            const cplx z = draw.next();
            if (active && !active(c.i, c.j)) continue;
            m(c.i, c.j) = c.i == c.j ? cplx(diagonal_value(z, law)) : z;
        }
    }
    return HermitianMatrix(symmetrize_from_upper(std::move(m)));
}

HermitianMatrix sample_matrix(const EnsembleSpec& spec, int n, const RngStream& stream) {
    require_size(n);
    if (spec.kind == EnsembleKind::CounterexampleZ) {
        const double t = spec.split_fraction(n);
        return counterexample_z(
            n, [t](int) { return t; }, derive_stream(stream, 0),
            {derive_stream(stream, 1), derive_stream(stream, 2)}, spec.entry_law, spec.dilation);
    }
    const DependencyPartition partition = dependency_partition(spec, n);
    std::function<bool(int, int)> active;
    if (spec.kind == EnsembleKind::Band) {
        const int b = spec.band_width;
        active = [b](int i, int j) { return std::abs(i - j) <= b; };
    }
    return sample_from_partition(partition, spec.entry_law, spec.mode, spec.rho,
                                 [&](std::size_t r) { return derive_stream(stream, r); }, active);
}

RectMatrix sample_rectangular(const EnsembleSpec& spec, int n, int N, const RngStream& stream) {
    const DependencyPartition partition = rectangular_partition(spec, n, N);
    check_mode(spec.entry_law, spec.mode, spec.rho);
    Matrix m(n, N);
    for (std::size_t r = 0; r < partition.block_count(); ++r) {
        BlockDraw draw(spec.entry_law, spec.mode, spec.rho, derive_stream(stream, r));
        for (const auto& c : partition.block(r)) {
            const cplx z = draw.next();
            if (spec.kind == EnsembleKind::Band && std::abs(c.i - c.j) > spec.band_width) continue;
            m(c.i, c.j) = z;
        }
    }
    return m;
}

// ---------------------------------------------------------------- relations

RelationCounts schenker_counts(const RelationPredicate& related, int n) {
    require_size(n);
    if (n > 64) throw std::invalid_argument("exhaustive relation counting is capped at n = 64");
    RelationCounts out;
    for (int i = 0; i < n; ++i) {
        long long row_total = 0;
        for (int j = 0; j < n; ++j) {
            long long class_size = 0;
            for (int ip = 0; ip < n; ++ip) {
                long long per_row = 0;
                for (int jp = 0; jp < n; ++jp) {
                    if (related({i, j}, {ip, jp})) ++per_row;
                }
                out.c2_max = std::max(out.c2_max, per_row);
                class_size += per_row;
            }
            out.d_max = std::max(out.d_max, class_size);
            row_total += class_size;
        }
        out.c1_max = std::max(out.c1_max, row_total);
    }
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            for (int ip = 0; ip < n; ++ip) {
                if (ip != i && related({i, j}, {j, ip})) ++out.c3_count;
            }
        }
    }
    return out;
}

RelationCounts schenker_counts(const LinkFunction& link, int n) {
    require_size(n);
    const auto un = static_cast<std::size_t>(n);
    std::vector<std::int64_t> label(un * un);
    std::unordered_map<std::int64_t, long long> class_size;
    std::vector<std::unordered_map<std::int64_t, long long>> row_count(un);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const std::int64_t l = link(i, j, n);
            label[static_cast<std::size_t>(i) * un + static_cast<std::size_t>(j)] = l;
            ++class_size[l];
            ++row_count[static_cast<std::size_t>(i)][l];
        }
    }
    auto at = [&](int i, int j) { return label[static_cast<std::size_t>(i) * un + static_cast<std::size_t>(j)]; };
    RelationCounts out;
    for (const auto& [l, size] : class_size) out.d_max = std::max(out.d_max, size);
    for (const auto& row : row_count) {
        for (const auto& [l, c] : row) out.c2_max = std::max(out.c2_max, c);
    }
    for (int i = 0; i < n; ++i) {
        long long row_total = 0;
        for (int j = 0; j < n; ++j) {
            const std::int64_t l = at(i, j);
            row_total += class_size[l];
            const auto& target = row_count[static_cast<std::size_t>(j)];
            const auto it = target.find(l);
            long long hits = it == target.end() ? 0 : it->second;
            if (at(j, i) == l) --hits;  // i' = i is excluded
            out.c3_count += hits;
        }
        out.c1_max = std::max(out.c1_max, row_total);
    }
    return out;
}

// ---------------------------------------------------------------- counterexample

HermitianMatrix counterexample_z(int n, const std::function<double(int)>& t_rule, RngStream epsilon_stream,
                                 const CounterexampleStreams& sub_streams, const EntryLaw& law, double dilation) {
    const int m = counterexample_split(n, t_rule(n));
    const double eps = (epsilon_stream.next_u64() >> 63) ? 1.0 : 0.0;
    const EnsembleSpec sub = EnsembleSpec::wigner(law);
    const HermitianMatrix x = sample_matrix(sub, m, sub_streams.x);
    const HermitianMatrix y = sample_matrix(sub, m, sub_streams.y);
    const double norm = 1.0 / std::sqrt(static_cast<double>(m));
    Matrix z(n, n);
    for (int i = 0; i < m; ++i) {
        for (int j = i; j < m; ++j) {
            z(i, j) = eps * (norm * x(i, j)) + (1.0 - eps) * (dilation * norm * y(i, j));
        }
    }
    for (int i = m; i < n; ++i) z(i, i) = 1.0;
    return HermitianMatrix(symmetrize_from_upper(std::move(z)));
}

}  // namespace specmeter
