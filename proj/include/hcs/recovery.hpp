#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hcs/acquisition.hpp"
#include "hcs/coherence.hpp"

namespace hcs {

class RecoveryError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Planted spectrum: distinct frequency tuples with their values.
struct SparseSpectrum {
    Dims dims;
    std::vector<Index> support;
    std::vector<HyperComplex> values;

    HyperArray to_array() const;
    std::size_t sparsity() const noexcept { return support.size(); }
};

SparseSpectrum sparse_from_json(std::string_view text);
std::string to_json(const SparseSpectrum& s, int indent = 2);

/// x = D^{-1} A^T y with D the diagonal of A^T A. Coordinates whose
/// diagonal entry vanishes are set to zero and counted.
struct MatchedFilterResult {
    HyperArray estimate;
    std::size_t zero_diagonal = 0;
};
MatchedFilterResult matched_filter(const AcquisitionOperator& op, std::span<const double> y);

/// Sum of hypercomplex moduli.
double hyper_l1_norm(const HyperArray& x);

struct RecoveryParams {
    double rho = 1.0;
    double tol = 1e-9;
    int max_iter = 5000;
    int cg_max_iter = 200;
    double cg_tol = 1e-12;
    /// Real coordinates per group: 2^d for the hypercomplex program, 1 for
    /// the scalar l1 program. 0 means 2^d.
    std::size_t group_size = 0;
    /// One positive weight per group; empty means all ones.
    std::vector<double> weights;
};

struct RecoveryResult {
    HyperArray estimate;
    bool converged = false;
    int iterations = 0;
    double primal_residual = 0.0;
    double dual_residual = 0.0;
    /// Unweighted sum of group norms of the estimate.
    double objective = 0.0;
    double weighted_objective = 0.0;
    /// |A x - y| / max(|y|, tiny).
    double feasibility = 0.0;
};

/// Minimizes sum_i w_i |x_i| subject to A x = y by ADMM: projection onto
/// the affine constraint set (conjugate gradients on A A^T), group soft
/// thresholding, scaled dual update.
RecoveryResult solve_ph1(const AcquisitionOperator& op, std::span<const double> y, const RecoveryParams& params = {});

/// Weights that make the group program the unweighted one in normalized
/// variables: w_i = sqrt(sigma_min(G^{ii})).
std::vector<double> normalization_weights(const SamplingSchedule& s);
/// Real column norms, giving the scalar l1 program on unit columns.
std::vector<double> column_norm_weights(const SamplingSchedule& s);

/// k < (1 + 1/mu) / 2.
bool sparsity_certificate(double mu, bool infinite, std::size_t k);
bool theorem2_certificate(const CoherenceReport& r, std::size_t k);

/// Relative l2 error of the estimate against the planted spectrum.
double relative_error(const HyperArray& estimate, const HyperArray& truth);

std::string to_json(const RecoveryResult& r, double support_tol = 1e-8, int indent = 2);

}  // namespace hcs
