#include "hcs/hyperfft.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace hcs {

namespace {

void transform_dimension(const HyperArray& in, HyperArray& out, std::size_t dim, double sin_sign) {
    const Dims& dims = in.dims();
    const std::size_t len = dims[dim];
    const std::size_t comps = in.components();
    const std::uint32_t bit = std::uint32_t{1} << dim;
    std::size_t inner = 1;
    for (std::size_t m = dim + 1; m < dims.size(); ++m) inner *= dims[m];
    const std::size_t outer = in.size() / (inner * len);

    std::vector<double> cs(len), sn(len);
    for (std::size_t m = 0; m < len; ++m) {
        const double a = 2.0 * std::numbers::pi * static_cast<double>(m) / static_cast<double>(len);
        cs[m] = std::cos(a);
        sn[m] = sin_sign * std::sin(a);
    }
    // Exact zeros at quarter turns keep structurally-zero outputs exactly zero.
    for (std::size_t m = 0; m < len; ++m) {
        if ((4 * m) % len == 0) {
            const std::size_t q = (4 * m) / len;
            cs[m] = (q == 0) ? 1.0 : (q == 2 ? -1.0 : 0.0);
            sn[m] = sin_sign * ((q == 1) ? 1.0 : (q == 3 ? -1.0 : 0.0));
        }
    }

    auto src = in.coords();
    auto dst = out.coords();
    std::fill(dst.begin(), dst.end(), 0.0);
    for (std::size_t o = 0; o < outer; ++o) {
        for (std::size_t i = 0; i < inner; ++i) {
            const std::size_t base = o * len * inner + i;
            for (std::size_t t = 0; t < len; ++t) {
                double* y = dst.data() + (base + t * inner) * comps;
                for (std::size_t k = 0; k < len; ++k) {
                    const double* x = src.data() + (base + k * inner) * comps;
                    const std::size_t m = (k * t) % len;
                    const double c = cs[m];
                    const double s = sn[m];
                    // y += (c + s i_dim) x; (i_dim x)[g] = +-x[g ^ bit].
                    for (std::uint32_t g = 0; g < comps; ++g) {
                        const double rot = (g & bit) ? x[g ^ bit] : -x[g ^ bit];
                        y[g] += c * x[g] + s * rot;
                    }
                }
            }
        }
    }
}

}  // namespace

HyperArray separable_transform(const HyperArray& x, KernelSign sign, bool unitary, std::span<const std::size_t> order) {
    const std::size_t rank = x.dims().size();
    std::vector<std::size_t> dims_order(rank);
    if (order.empty()) {
        std::iota(dims_order.begin(), dims_order.end(), std::size_t{0});
    } else {
        if (order.size() != rank) throw DimensionError("transform order must list every dimension once");
        dims_order.assign(order.begin(), order.end());
        auto sorted = dims_order;
        std::ranges::sort(sorted);
        for (std::size_t j = 0; j < rank; ++j)
            if (sorted[j] != j) throw DimensionError("transform order must list every dimension once");
    }
    const double sin_sign = sign == KernelSign::Positive ? 1.0 : -1.0;
    HyperArray cur = x;
    HyperArray next(x.dims());
    for (std::size_t dim : dims_order) {
        if (x.dims()[dim] == 1) continue;
        transform_dimension(cur, next, dim, sin_sign);
        std::swap(cur, next);
    }
    if (unitary) cur *= 1.0 / std::sqrt(static_cast<double>(x.size()));
    return cur;
}

HyperArray forward(const HyperArray& spectrum) { return separable_transform(spectrum, KernelSign::Positive, true); }

HyperArray inverse(const HyperArray& fid) { return separable_transform(fid, KernelSign::Negative, true); }

HyperComplex fourier_kernel(const Dims& dims, std::span<const std::size_t> k, std::span<const std::size_t> t,
                            bool unitary) {
    const int d = static_cast<int>(dims.size());
    if (k.size() != dims.size() || t.size() != dims.size()) throw DimensionError("kernel index rank mismatch");
    HyperComplex z = HyperComplex::one(d);
    for (int j = 0; j < d; ++j) {
        const std::size_t m = (k[j] * t[j]) % dims[j];
        const double angle = 2.0 * std::numbers::pi * static_cast<double>(m) / static_cast<double>(dims[j]);
        z = multiply(z, exp_generator({j + 1, angle}, d));
    }
    if (unitary) z *= 1.0 / std::sqrt(static_cast<double>(element_count(dims)));
    return z;
}

double orthogonality_check(const Dims& dims) {
    check_dims(dims);
    const int d = static_cast<int>(dims.size());
    const std::size_t n = element_count(dims);
    std::vector<HyperComplex> kernel;
    kernel.reserve(n * n);
    for (std::size_t k = 0; k < n; ++k) {
        const Index ki = unflatten(dims, k);
        for (std::size_t t = 0; t < n; ++t) kernel.push_back(fourier_kernel(dims, ki, unflatten(dims, t), false));
    }
    double worst = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t l = 0; l < n; ++l) {
            HyperComplex sum(d);
            for (std::size_t t = 0; t < n; ++t) sum += multiply(kernel[k * n + t], conjugate(kernel[l * n + t]));
            sum[0] -= (k == l) ? static_cast<double>(n) : 0.0;
            for (double c : sum.coeffs()) worst = std::max(worst, std::abs(c));
        }
    }
    return worst;
}

}  // namespace hcs
