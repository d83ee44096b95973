#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "hcs/matrix.hpp"

namespace hcs {

/// Largest supported number of generators.
inline constexpr int kMaxDimension = 8;

/// Absolute tolerance for algebra identities on O(1) values.
inline constexpr double kAlgebraTolerance = 1e-12;

class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class SingularElementError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Number of real coefficients of an element of H_d.
constexpr std::size_t component_count(int d) noexcept { return std::size_t{1} << d; }

/// Sign of i_g * i_h = sign * i_{g xor h}; each shared generator contributes i^2 = -1.
constexpr double basis_product_sign(std::uint32_t g, std::uint32_t h) noexcept {
    return (std::popcount(g & h) & 1) ? -1.0 : 1.0;
}

/// Element of the commutative hypercomplex algebra H_d.
///
/// Coefficients are indexed by generator subsets encoded as bitmasks: bit j-1
/// of the index set means generator i_j is a factor of that basis element. So
/// coefficient 0 is the real unit, 2^d - 1 is i_{1,2,...,d}, and for d = 3 the
/// order is 1, i1, i2, i12, i3, i13, i23, i123.
class HyperComplex {
public:
    explicit HyperComplex(int d);
    HyperComplex(int d, std::vector<double> coeffs);

    static HyperComplex real(int d, double value);
    static HyperComplex one(int d) { return real(d, 1.0); }
    /// Basis element i_g for subset bitmask g.
    static HyperComplex basis(int d, std::uint32_t g);
    /// Generator i_j, j in 1..d.
    static HyperComplex generator(int d, int j);

    int dimension() const noexcept { return d_; }
    std::size_t size() const noexcept { return coeffs_.size(); }

    double operator[](std::size_t g) const noexcept { return coeffs_[g]; }
    double& operator[](std::size_t g) noexcept { return coeffs_[g]; }

    /// The vector isomorphism phi: the coefficient vector itself.
    std::span<const double> coeffs() const noexcept { return coeffs_; }
    std::span<double> coeffs() noexcept { return coeffs_; }

    bool is_real(double tol = kAlgebraTolerance) const noexcept;

    HyperComplex& operator+=(const HyperComplex& o);
    HyperComplex& operator-=(const HyperComplex& o);
    HyperComplex& operator*=(double s) noexcept;
    HyperComplex& operator*=(const HyperComplex& o);

    friend HyperComplex operator+(HyperComplex a, const HyperComplex& b) { return a += b; }
    friend HyperComplex operator-(HyperComplex a, const HyperComplex& b) { return a -= b; }
    friend HyperComplex operator*(HyperComplex a, double s) { return a *= s; }
    friend HyperComplex operator*(double s, HyperComplex a) { return a *= s; }
    friend HyperComplex operator*(const HyperComplex& a, const HyperComplex& b);
    HyperComplex operator-() const;

    friend bool operator==(const HyperComplex&, const HyperComplex&) = default;

private:
    int d_;
    std::vector<double> coeffs_;
};

/// A generator raised in the exponential: exp(theta * i_j).
struct GeneratorExponent {
    int generator;  // 1..d
    double angle;
};

void check_dimension(int d);

HyperComplex multiply(const HyperComplex& a, const HyperComplex& b);

/// Flips the sign of every basis element with an odd number of generators.
HyperComplex conjugate(const HyperComplex& z);

/// Euclidean norm of the coefficient vector.
double modulus(const HyperComplex& z);

/// Product (a_1 + b_1 i_1)(a_2 + b_2 i_2)...(a_d + b_d i_d).
HyperComplex from_factors(std::span<const std::pair<double, double>> factors);

/// x^# / |x|^2 for a factorizable x. Throws SingularElementError for a zero
/// element and std::domain_error when x^# x is not real (x not factorizable).
HyperComplex inverse_factorizable(const HyperComplex& x, double tol = 1e-10);

/// Matrix isomorphism Phi into 2^d x 2^d real matrices, with
/// Phi(x) phi(y) = phi(x y) and Phi(i_j) a Kronecker product carrying the 2x2
/// rotation [[0,-1],[1,0]] at the factor of generator j.
RealMatrix matrix_iso(const HyperComplex& z);

/// cos(theta) + sin(theta) i_j as an element of H_d.
HyperComplex exp_generator(const GeneratorExponent& e, int d);

}  // namespace hcs
