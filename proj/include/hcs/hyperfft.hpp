#pragma once

#include <span>
#include <vector>

#include "hcs/hyperarray.hpp"

namespace hcs {

/// Hypercomplex Fourier transform with the unitary 1/sqrt(prod T_j) scaling.
/// Input indexed by frequency k, output by time t, kernel
/// exp(2 pi i_1 k_1 t_1 / T_1) ... exp(2 pi i_d k_d t_d / T_d).
HyperArray forward(const HyperArray& spectrum);

/// Exact inverse of forward(): conjugate kernel, same scaling.
HyperArray inverse(const HyperArray& fid);

enum class KernelSign { Positive, Negative };

/// One-dimension-at-a-time transform with explicit control over the kernel
/// sign, the scaling and the order in which dimensions are processed
/// (0-based; empty means natural order). Algebra commutativity makes the
/// result independent of that order.
HyperArray separable_transform(const HyperArray& x, KernelSign sign, bool unitary,
                               std::span<const std::size_t> order = {});

/// Kernel coefficient F(k; t) = exp(sum_j 2 pi i_j k_j t_j / T_j), optionally
/// scaled by 1/sqrt(prod T_j). Always factorizable.
HyperComplex fourier_kernel(const Dims& dims, std::span<const std::size_t> k, std::span<const std::size_t> t,
                            bool unitary = true);

/// Max over all frequency pairs (k, l) of the deviation of
/// sum_t F(k;t) F^#(l;t) from the real element prod T_j * [k == l], using the
/// unscaled kernel. Exhaustive; intended for small grids.
double orthogonality_check(const Dims& dims);

}  // namespace hcs
