#pragma once

// Reference implementations used only by the tests. They are written from
// first principles and share no code with the library beyond plain types.

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "hcs/acquisition.hpp"
#include "hcs/hyperarray.hpp"
#include "hcs/rng.hpp"

namespace oracle {

using Eigen::MatrixXd;

// H_d as the tensor power of C. The basis element with bitmask g is the
// tensor with i in slot j whenever bit j is set; slot j = 0 is the
// least-significant Kronecker factor.
inline MatrixXd kron(const MatrixXd& a, const MatrixXd& b) {
    MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index r = 0; r < a.rows(); ++r)
        for (Eigen::Index c = 0; c < a.cols(); ++c)
            out.block(r * b.rows(), c * b.cols(), b.rows(), b.cols()) = a(r, c) * b;
    return out;
}

inline MatrixXd basis_matrix(int d, std::uint32_t g) {
    MatrixXd j(2, 2);
    j << 0, -1, 1, 0;
    const MatrixXd id = MatrixXd::Identity(2, 2);
    MatrixXd m = MatrixXd::Identity(1, 1);
    for (int slot = d - 1; slot >= 0; --slot) m = kron(m, (g >> slot) & 1u ? j : id);
    return m;
}

inline MatrixXd phi(int d, const std::vector<double>& z) {
    const std::size_t m = std::size_t{1} << d;
    MatrixXd out = MatrixXd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
    for (std::size_t g = 0; g < m; ++g) out += z[g] * basis_matrix(d, static_cast<std::uint32_t>(g));
    return out;
}

inline std::vector<double> product(int d, const std::vector<double>& a, const std::vector<double>& b) {
    const Eigen::VectorXd bv = Eigen::Map<const Eigen::VectorXd>(b.data(), static_cast<Eigen::Index>(b.size()));
    const Eigen::VectorXd r = phi(d, a) * bv;
    return {r.data(), r.data() + r.size()};
}

// Coefficients of prod_j (cos th_j + sin th_j i_j).
inline std::vector<double> kernel(const std::vector<double>& angles) {
    const std::size_t d = angles.size();
    std::vector<double> c(std::size_t{1} << d, 1.0);
    for (std::size_t g = 0; g < c.size(); ++g)
        for (std::size_t j = 0; j < d; ++j) c[g] *= (g >> j) & 1u ? std::sin(angles[j]) : std::cos(angles[j]);
    return c;
}

inline std::vector<double> angles(const hcs::Dims& dims, const hcs::Index& k, const hcs::Index& t, double sign) {
    std::vector<double> a(dims.size());
    for (std::size_t j = 0; j < dims.size(); ++j)
        a[j] = sign * 2.0 * std::numbers::pi * static_cast<double>(k[j] * t[j] % dims[j]) /
               static_cast<double>(dims[j]);
    return a;
}

// O(N^2) unitary transform with kernel exp(sign 2 pi i_j k_j t_j / T_j).
inline hcs::HyperArray naive_transform(const hcs::HyperArray& x, double sign) {
    const hcs::Dims& dims = x.dims();
    const int d = x.dimension();
    const std::size_t n = x.size();
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    hcs::HyperArray out(dims);
    for (std::size_t t = 0; t < n; ++t) {
        const hcs::Index ti = hcs::unflatten(dims, t);
        std::vector<double> acc(x.components(), 0.0);
        for (std::size_t k = 0; k < n; ++k) {
            const auto e = x.entry(k);
            const auto p = product(d, kernel(angles(dims, hcs::unflatten(dims, k), ti, sign)),
                                   std::vector<double>(e.begin(), e.end()));
            for (std::size_t g = 0; g < acc.size(); ++g) acc[g] += scale * p[g];
        }
        std::copy(acc.begin(), acc.end(), out.entry(t).begin());
    }
    return out;
}

// Acquisition matrix straight from the sampled kernel rows.
inline MatrixXd acquisition_matrix(const hcs::SamplingSchedule& s) {
    const hcs::Dims& dims = s.dims();
    const int d = s.dimension();
    const std::size_t n = s.pixel_count();
    const std::size_t m = s.components();
    std::vector<std::pair<std::size_t, std::size_t>> rows;
    for (std::size_t t = 0; t < n; ++t)
        for (std::size_t r = 0; r < m; ++r)
            if (s.mask(t).test(r)) rows.emplace_back(t, r);
    MatrixXd a = MatrixXd::Zero(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(n * m));
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (std::size_t row = 0; row < rows.size(); ++row) {
        const auto [t, r] = rows[row];
        const hcs::Index ti = hcs::unflatten(dims, t);
        for (std::size_t k = 0; k < n; ++k) {
            const MatrixXd f = phi(d, kernel(angles(dims, hcs::unflatten(dims, k), ti, 1.0)));
            for (std::size_t c = 0; c < m; ++c)
                a(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(k * m + c)) =
                    scale * f(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
        }
    }
    return a;
}

inline MatrixXd to_eigen(const hcs::RealMatrix& m) {
    MatrixXd out(m.rows(), m.cols());
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < m.cols(); ++c) out(r, c) = m(r, c);
    return out;
}

inline double sigma_max(const MatrixXd& m) { return Eigen::JacobiSVD<MatrixXd>(m).singularValues()(0); }
inline double sigma_min(const MatrixXd& m) {
    const auto sv = Eigen::JacobiSVD<MatrixXd>(m).singularValues();
    return sv(sv.size() - 1);
}

struct Coherence {
    double mu_h = 0.0;
    bool infinite = false;
};

// Hypercomplex coherence from the explicit Gram matrix G = A^T A.
inline Coherence mu_h(const MatrixXd& gram, std::size_t m, double tol = 1e-10) {
    const auto groups = static_cast<std::size_t>(gram.rows()) / m;
    auto blk = [&](std::size_t i, std::size_t j) {
        return gram.block(static_cast<Eigen::Index>(i * m), static_cast<Eigen::Index>(j * m),
                          static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
    };
    std::vector<double> sc(groups);
    for (std::size_t i = 0; i < groups; ++i) {
        const double smin = sigma_min(blk(i, i));
        if (smin <= tol) return {std::numeric_limits<double>::infinity(), true};
        sc[i] = 1.0 / std::sqrt(smin);
    }
    double mu = 0.0;
    for (std::size_t i = 0; i < groups; ++i)
        for (std::size_t j = 0; j < groups; ++j)
            if (i != j) mu = std::max(mu, sc[i] * sc[j] * sigma_max(blk(i, j)));
    return {mu, false};
}

inline hcs::HyperArray random_array(const hcs::Dims& dims, std::uint64_t seed) {
    hcs::Rng rng(seed);
    hcs::HyperArray x(dims);
    for (double& v : x.coords()) v = 2.0 * rng.uniform() - 1.0;
    return x;
}

inline std::vector<double> random_coeffs(hcs::Rng& rng, std::size_t n) {
    std::vector<double> v(n);
    for (double& x : v) x = 2.0 * rng.uniform() - 1.0;
    return v;
}

}  // namespace oracle
