#include "hcs/hypercomplex.hpp"

#include <cmath>
#include <string>

namespace hcs {

void check_dimension(int d) {
    if (d < 1 || d > kMaxDimension)
        throw DimensionError("hypercomplex dimension must be in 1.." + std::to_string(kMaxDimension) + ", got " +
                             std::to_string(d));
}

HyperComplex::HyperComplex(int d) : d_(d) {
    check_dimension(d);
    coeffs_.assign(component_count(d), 0.0);
}

HyperComplex::HyperComplex(int d, std::vector<double> coeffs) : d_(d), coeffs_(std::move(coeffs)) {
    check_dimension(d);
    if (coeffs_.size() != component_count(d))
        throw DimensionError("H_" + std::to_string(d) + " element needs " + std::to_string(component_count(d)) +
                             " coefficients, got " + std::to_string(coeffs_.size()));
}

HyperComplex HyperComplex::real(int d, double value) {
    HyperComplex z(d);
    z.coeffs_[0] = value;
    return z;
}

HyperComplex HyperComplex::basis(int d, std::uint32_t g) {
    HyperComplex z(d);
    if (g >= z.size()) throw DimensionError("basis index out of range");
    z.coeffs_[g] = 1.0;
    return z;
}

HyperComplex HyperComplex::generator(int d, int j) {
    if (j < 1 || j > d) throw DimensionError("generator index out of range");
    return basis(d, std::uint32_t{1} << (j - 1));
}

bool HyperComplex::is_real(double tol) const noexcept {
    for (std::size_t g = 1; g < coeffs_.size(); ++g)
        if (std::abs(coeffs_[g]) > tol) return false;
    return true;
}

HyperComplex& HyperComplex::operator+=(const HyperComplex& o) {
    if (o.d_ != d_) throw DimensionError("hypercomplex dimension mismatch");
    for (std::size_t g = 0; g < coeffs_.size(); ++g) coeffs_[g] += o.coeffs_[g];
    return *this;
}

HyperComplex& HyperComplex::operator-=(const HyperComplex& o) {
    if (o.d_ != d_) throw DimensionError("hypercomplex dimension mismatch");
    for (std::size_t g = 0; g < coeffs_.size(); ++g) coeffs_[g] -= o.coeffs_[g];
    return *this;
}

HyperComplex& HyperComplex::operator*=(double s) noexcept {
    for (auto& c : coeffs_) c *= s;
    return *this;
}

HyperComplex& HyperComplex::operator*=(const HyperComplex& o) { return *this = multiply(*this, o); }

HyperComplex operator*(const HyperComplex& a, const HyperComplex& b) { return multiply(a, b); }

HyperComplex HyperComplex::operator-() const {
    HyperComplex z = *this;
    for (auto& c : z.coeffs_) c = -c;
    return z;
}

HyperComplex multiply(const HyperComplex& a, const HyperComplex& b) {
    if (a.dimension() != b.dimension()) throw DimensionError("hypercomplex dimension mismatch");
    HyperComplex r(a.dimension());
    const auto n = static_cast<std::uint32_t>(a.size());
    for (std::uint32_t g = 0; g < n; ++g) {
        const double ag = a[g];
        if (ag == 0.0) continue;
        for (std::uint32_t h = 0; h < n; ++h) r[g ^ h] += basis_product_sign(g, h) * ag * b[h];
    }
    return r;
}

HyperComplex conjugate(const HyperComplex& z) {
    HyperComplex r = z;
    for (std::uint32_t g = 0; g < r.size(); ++g)
        if (std::popcount(g) & 1) r[g] = -r[g];
    return r;
}

double modulus(const HyperComplex& z) {
    double s = 0.0;
    for (double c : z.coeffs()) s += c * c;
    return std::sqrt(s);
}

HyperComplex from_factors(std::span<const std::pair<double, double>> factors) {
    if (factors.empty()) throw DimensionError("from_factors needs at least one factor");
    const int d = static_cast<int>(factors.size());
    check_dimension(d);
    // Coefficient of i_g is the product of b_j over j in g and a_j over j not in g.
    HyperComplex z(d);
    for (std::uint32_t g = 0; g < z.size(); ++g) {
        double c = 1.0;
        for (int j = 0; j < d; ++j) c *= (g >> j & 1u) ? factors[j].second : factors[j].first;
        z[g] = c;
    }
    return z;
}

HyperComplex inverse_factorizable(const HyperComplex& x, double tol) {
    const double m2 = modulus(x) * modulus(x);
    if (m2 == 0.0) throw SingularElementError("inverse of a zero-modulus element");
    const HyperComplex xs = conjugate(x);
    const HyperComplex p = multiply(xs, x);
    for (std::size_t g = 1; g < p.size(); ++g)
        if (std::abs(p[g]) > tol * m2)
            throw std::domain_error("element is not factorizable: x^# x has non-real part");
    return xs * (1.0 / m2);
}

RealMatrix matrix_iso(const HyperComplex& z) {
    const auto n = static_cast<std::uint32_t>(z.size());
    RealMatrix m(n, n);
    // Column v is phi(z * i_v): entry u collects z_g with g = u xor v.
    for (std::uint32_t u = 0; u < n; ++u)
        for (std::uint32_t v = 0; v < n; ++v) m(u, v) = basis_product_sign(u ^ v, v) * z[u ^ v];
    return m;
}

HyperComplex exp_generator(const GeneratorExponent& e, int d) {
    if (e.generator < 1 || e.generator > d) throw DimensionError("generator index out of range");
    HyperComplex z(d);
    z[0] = std::cos(e.angle);
    z[std::size_t{1} << (e.generator - 1)] = std::sin(e.angle);
    return z;
}

}  // namespace hcs
