#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "hcs/acquisition.hpp"
#include "hcs/matrix.hpp"
#include "hcs/schedule.hpp"

namespace hcs {

/// Cross-correlation block of A^T A between frequency groups i and j.
struct GramBlock {
    std::size_t i = 0;
    std::size_t j = 0;
    RealMatrix matrix;
    double sigma_max = 0.0;
    double sigma_min = 0.0;
};

/// Reference block computation: accumulates Phi(F(i;t))^T D_t Phi(F(j;t))
/// over the sampled rows of every pixel. O(N 4^d) per block.
GramBlock gram_block(const AcquisitionOperator& op, std::size_t i, std::size_t j);

/// Fast evaluation of arbitrary Gram blocks.
///
/// The 0/1 selection at each pixel is expanded in the Walsh basis of
/// component sign patterns, M_r(t) = sum_S c_S(t) (-1)^{|r & S|}. Each mode
/// S contributes Phi(H_S(l^S - k)) Z_S / N, where l^S negates l on the
/// dimensions in S, Z_S = diag((-1)^{|v & S|}) and H_S is the unnormalized
/// transform of c_S. Blocks then cost O(#modes 4^d) after a one-off
/// O(#modes N sum T_j 2^d) setup.
class GramEngine {
public:
    explicit GramEngine(const SamplingSchedule& schedule);

    const Dims& dims() const noexcept { return dims_; }
    int dimension() const noexcept { return d_; }
    std::size_t group_count() const noexcept { return n_; }
    std::size_t mode_count() const noexcept { return modes_.size(); }

    RealMatrix block(std::size_t k, std::size_t l) const;
    /// Writes the block into `out` (2^d x 2^d, row-major).
    void block_into(std::size_t k, std::size_t l, std::span<double> out) const;

    /// Flat index of -k (mod T).
    std::size_t negate(std::size_t k) const noexcept { return neg_[k]; }

private:
    struct Mode {
        std::uint32_t subset;
        std::vector<double> spectrum;  // N x 2^d, H_S(f) for every f
        std::vector<double> blocks;    // N x 2^d x 2^d signed matrices, optional
    };
    Dims dims_;
    int d_;
    std::size_t n_;
    std::size_t comps_;
    std::vector<Mode> modes_;
    std::vector<std::size_t> neg_;
    std::vector<std::size_t> strides_;
    std::vector<double> mode_sign_;
    std::vector<std::uint32_t> coords_;
};

/// One scalar per frequency group making sigma_min of every diagonal
/// block equal to 1. `infinite` marks a singular diagonal block.
struct Normalization {
    std::vector<double> scale;
    std::vector<double> sigma_min;
    bool infinite = false;
    std::optional<std::size_t> singular_group;
};

/// Tolerance under which sigma_min(G^{ii}) counts as zero.
inline constexpr double kSingularTolerance = 1e-10;

Normalization normalize_blocks(std::span<const RealMatrix> diagonal_blocks, double tol = kSingularTolerance);
Normalization normalization(const GramEngine& engine, double tol = kSingularTolerance);

/// Dimensions along which the schedule is uniformly sampled (U) and in
/// quadrature (Q), 0-based.
struct LemmaAnalysis {
    Dims dims;
    std::vector<bool> uniform;
    std::vector<bool> quadrature;
};

LemmaAnalysis analyze(const SamplingSchedule& s);

enum class ZeroPrediction { Zero, Unconstrained };

/// Cross-correlation zero pattern implied by uniformly sampled dimensions:
/// k_u = l_u is required on every u in U with quadrature, and
/// k_u in {l_u, T_u - l_u} on every u in U without it.
ZeroPrediction lemma_zero_pattern(const LemmaAnalysis& a, std::span<const std::size_t> k,
                                  std::span<const std::size_t> l);
ZeroPrediction lemma_zero_pattern(const SamplingSchedule& s, std::span<const std::size_t> k,
                                  std::span<const std::size_t> l);

/// Collapsing a dimension that is both uniformly sampled and in quadrature
/// to length 1 leaves every surviving block unchanged and zeroes the blocks
/// between groups that differ along it.
struct ReducedSchedule {
    SamplingSchedule schedule;
    std::vector<bool> collapsed;
};

ReducedSchedule reduce(const SamplingSchedule& s);

struct CoherenceOptions {
    bool traditional = false;
    /// Use the exact dimension reduction above.
    bool reduce = true;
    double singular_tol = kSingularTolerance;
};

struct CoherenceReport {
    double mu_h = 0.0;
    bool infinite = false;
    std::optional<std::size_t> singular_group;
    std::optional<double> traditional_mu;
    bool traditional_infinite = false;
    /// Per-group scale on the original grid.
    std::vector<double> normalization;
    std::optional<std::pair<std::size_t, std::size_t>> argmax;
    Dims evaluated_dims;
    ScheduleDescriptor descriptor;
    std::uint64_t seed = 0;
    std::size_t blocks_evaluated = 0;
};

CoherenceReport mu_hypercomplex(const SamplingSchedule& s, const CoherenceOptions& opt = {});
CoherenceReport mu_hypercomplex(const AcquisitionOperator& op, const CoherenceOptions& opt = {});

/// max |a_i^T a_j| / (|a_i| |a_j|) over distinct real columns; nullopt when
/// some column is zero (infinite coherence).
std::optional<double> mu_traditional(const SamplingSchedule& s, double tol = kSingularTolerance);
std::optional<double> mu_traditional(const AcquisitionOperator& op, double tol = kSingularTolerance);

/// Coherences computed straight from an explicit (N 2^d)^2 Gram matrix.
/// Oracle path for tests.
double mu_hypercomplex_dense(const RealMatrix& gram_matrix, int d, double tol = kSingularTolerance);
double mu_traditional_dense(const RealMatrix& gram_matrix, double tol = kSingularTolerance);

struct HpsfResult {
    Dims dims;
    Index spike;
    /// sigma_max of the normalized block (spike, j); the spike entry is 0.
    std::vector<double> values;
    double spike_value = 0.0;
    bool infinite = false;
};

HpsfResult hpsf(const SamplingSchedule& s, std::span<const std::size_t> spike, bool use_reduction = true);
HpsfResult hpsf(const AcquisitionOperator& op, std::span<const std::size_t> spike, bool use_reduction = true);

}  // namespace hcs
