#pragma once

#include "specmeter/entries.hpp"
#include "specmeter/matrix.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace specmeter {

struct IndexPair {
    int i = 0;
    int j = 0;
    friend bool operator==(const IndexPair&, const IndexPair&) = default;
};

// Partition of the index rectangle into independent blocks. Block ids are
// assigned in order of first appearance in a row-major scan.
class DependencyPartition {
public:
    // Cells with equal labels share a block.
    static DependencyPartition from_labels(int n_rows, int n_cols,
                                           const std::function<std::int64_t(int, int)>& label);
    // Validates disjointness and coverage; throws std::invalid_argument naming
    // the first overlapping or uncovered cell.
    static DependencyPartition from_blocks(int n_rows, int n_cols,
                                           const std::vector<std::vector<IndexPair>>& blocks);

    int n_rows() const { return n_rows_; }
    int n_cols() const { return n_cols_; }
    std::size_t block_count() const { return offsets_.size() - 1; }
    std::span<const IndexPair> block(std::size_t r) const;
    std::size_t block_size(std::size_t r) const { return offsets_[r + 1] - offsets_[r]; }
    std::int32_t block_of(int i, int j) const {
        return labels_[static_cast<std::size_t>(i) * static_cast<std::size_t>(n_cols_) +
                       static_cast<std::size_t>(j)];
    }
    // Largest block size.
    std::size_t d() const { return d_; }
    std::vector<std::size_t> block_sizes() const;

    // Every (i, j) shares its block with (j, i); required for Hermitian sampling.
    bool transpose_closed() const;
    // Exact tiling check via a coverage bitmap.
    bool tiles_exactly() const;

private:
    void build_blocks();

    int n_rows_ = 0;
    int n_cols_ = 0;
    std::vector<std::int32_t> labels_;
    std::vector<std::size_t> offsets_{0};
    std::vector<IndexPair> cells_;
    std::size_t d_ = 0;
};

enum class EnsembleKind {
    Wigner,
    Toeplitz,
    Hankel,
    ReversedCirculant,
    SymmetricCirculant,
    Band,
    BlockDependent,
    SchenkerSchulz,
    CounterexampleZ,
};

enum class ScaleRule { InvSqrtN, InvBn };

// Intra-block dependence. Replicated: one draw per block. CorrelatedGaussian:
// the free cells of a block form an equicorrelated Gaussian vector.
enum class BlockMode { Replicated, CorrelatedGaussian };

// Label on index pairs of an n x n matrix; equal labels are related.
using LinkFunction = std::function<std::int64_t(int i, int j, int n)>;
using PartitionRule = std::function<DependencyPartition(int n_rows, int n_cols)>;
using RelationPredicate = std::function<bool(IndexPair, IndexPair)>;

// Link for a named relation: "transpose", "toeplitz", "hankel",
// "reversed_circulant", "symmetric_circulant", "full", "tiles:k".
LinkFunction named_relation(std::string_view name);

struct EnsembleSpec {
    EnsembleKind kind = EnsembleKind::Wigner;
    EntryLaw entry_law = EntryLaw::rademacher();
    ScaleRule scale_rule = ScaleRule::InvSqrtN;
    BlockMode mode = BlockMode::Replicated;
    double rho = 0.5;

    int band_width = 1;                // Band
    int tile = 2;                      // BlockDependent built-in rule: k x k tiles
    PartitionRule partition_rule;      // BlockDependent custom rule, overrides `tile`
    std::string relation = "transpose";  // SchenkerSchulz
    LinkFunction relation_link;        // SchenkerSchulz custom link, overrides `relation`
    double t = 0.5;                    // CounterexampleZ split
    std::function<double(int)> t_rule; // CounterexampleZ custom t_n, overrides `t`
    double dilation = 2.0;             // CounterexampleZ: second sub-ensemble is dilation * Wigner

    static EnsembleSpec wigner(EntryLaw law = EntryLaw::rademacher());
    static EnsembleSpec patterned(EnsembleKind kind, EntryLaw law = EntryLaw::rademacher());
    static EnsembleSpec band(int width, EntryLaw law = EntryLaw::rademacher());
    static EnsembleSpec blocks(int tile, EntryLaw law = EntryLaw::rademacher());
    static EnsembleSpec schenker(std::string relation, EntryLaw law = EntryLaw::rademacher());
    static EnsembleSpec counterexample(double t, EntryLaw law = EntryLaw::rademacher());

    bool rectangular_capable() const {
        return kind == EnsembleKind::Wigner || kind == EnsembleKind::Band ||
               kind == EnsembleKind::BlockDependent;
    }
    double split_fraction(int n) const { return t_rule ? t_rule(n) : t; }

    // Config form: "toeplitz:entry=rademacher", "band:b=3,entry=gaussian",
    // "counterexample_z:t=0.5". Custom callbacks are not serialized.
    std::string to_string() const;
    static EnsembleSpec parse(std::string_view text);
};

std::string kind_name(EnsembleKind kind);

// Label of cell (i, j) for patterned kinds (0-based indices).
std::int64_t link_label(EnsembleKind kind, int i, int j, int n);

DependencyPartition dependency_partition(const EnsembleSpec& spec, int n);
DependencyPartition rectangular_partition(const EnsembleSpec& spec, int n_rows, int n_cols);

// Stream used for block r. The default derives child r of the matrix stream.
using BlockStreamFn = std::function<RngStream(std::size_t block)>;

HermitianMatrix sample_matrix(const EnsembleSpec& spec, int n, const RngStream& stream);
// Hermitian sample over an explicit partition with caller-provided block
// streams. Cells for which `active` returns false are held at zero.
HermitianMatrix sample_from_partition(const DependencyPartition& partition, const EntryLaw& law,
                                      BlockMode mode, double rho, const BlockStreamFn& block_stream,
                                      const std::function<bool(int, int)>& active = {});

RectMatrix sample_rectangular(const EnsembleSpec& spec, int n, int N, const RngStream& stream);

struct RelationCounts {
    long long c1_max = 0;
    long long c2_max = 0;
    long long c3_count = 0;
    long long d_max = 0;
};

// Exhaustive O(n^4) enumeration; n is capped at 64.
RelationCounts schenker_counts(const RelationPredicate& related, int n);
// Fiber counting for label-induced relations.
RelationCounts schenker_counts(const LinkFunction& link, int n);

struct CounterexampleStreams {
    RngStream x;
    RngStream y;
};

// [eps*X + (1-eps)*Y, 0; 0, I] with X = W/sqrt(m), Y = dilation*W'/sqrt(m),
// m = n*t_n. Throws std::invalid_argument unless n*t_n and n*(1-t_n) are
// positive integers.
HermitianMatrix counterexample_z(int n, const std::function<double(int)>& t_rule,
                                 RngStream epsilon_stream, const CounterexampleStreams& sub_streams,
                                 const EntryLaw& law = EntryLaw::rademacher(), double dilation = 2.0);

// Size of the dependent upper-left block, validated as above.
int counterexample_split(int n, double t_n);

}  // namespace specmeter
