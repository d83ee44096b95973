#include <cmath>
#include <numbers>

#include "doctest.h"
#include "hcs/hypercomplex.hpp"
#include "hcs/rng.hpp"
#include "oracles.hpp"

using namespace hcs;

namespace {

HyperComplex random_element(Rng& rng, int d) { return {d, oracle::random_coeffs(rng, component_count(d))}; }

double max_diff(const HyperComplex& a, const HyperComplex& b) {
    double m = 0.0;
    for (std::size_t g = 0; g < a.size(); ++g) m = std::max(m, std::abs(a[g] - b[g]));
    return m;
}

double max_diff(const RealMatrix& a, const oracle::MatrixXd& b) { return (oracle::to_eigen(a) - b).cwiseAbs().maxCoeff(); }

}  // namespace

TEST_SUITE("hypercomplex") {
    TEST_CASE("generator squares to minus one") {
        for (int d = 1; d <= 4; ++d)
            for (int j = 1; j <= d; ++j) {
                const HyperComplex i = HyperComplex::generator(d, j);
                CHECK(i * i == HyperComplex::real(d, -1.0));
            }
    }

    TEST_CASE("identity and the two-factor expansion") {
        Rng rng(3);
        const HyperComplex z = random_element(rng, 3);
        CHECK(HyperComplex::one(3) * z == z);
        const HyperComplex a(2, {1, 2, 0, 0});
        const HyperComplex b(2, {3, 0, 4, 0});
        const HyperComplex p = a * b;
        CHECK(p[0] == 3.0);
        CHECK(p[1] == 6.0);
        CHECK(p[2] == 4.0);
        CHECK(p[3] == 8.0);
    }

    TEST_CASE("multiplication matches the tensor-product oracle") {
        Rng rng(11);
        for (int d = 1; d <= 4; ++d)
            for (int rep = 0; rep < 20; ++rep) {
                const HyperComplex a = random_element(rng, d), b = random_element(rng, d);
                const auto ref = oracle::product(d, {a.coeffs().begin(), a.coeffs().end()},
                                                 {b.coeffs().begin(), b.coeffs().end()});
                CHECK(max_diff(a * b, HyperComplex(d, ref)) < 1e-12);
                CHECK(max_diff(matrix_iso(a), oracle::phi(d, {a.coeffs().begin(), a.coeffs().end()})) < 1e-15);
            }
    }

    TEST_CASE("algebraic laws on random elements") {
        Rng rng(5);
        for (int d : {2, 3}) {
            for (int rep = 0; rep < 50; ++rep) {
                const HyperComplex a = random_element(rng, d), b = random_element(rng, d), c = random_element(rng, d);
                CHECK(max_diff(a * b, b * a) < 1e-12);
                CHECK(max_diff((a * b) * c, a * (b * c)) < 1e-12);
                const RealMatrix lhs = matrix_iso(a * b);
                const RealMatrix rhs = matrix_iso(a) * matrix_iso(b);
                CHECK((lhs - rhs).max_abs() < 1e-12);
                CHECK((matrix_iso(conjugate(a)) - matrix_iso(a).transposed()).max_abs() == 0.0);
                CHECK(modulus(conjugate(a)) == modulus(a));
                CHECK(conjugate(conjugate(a)) == a);
            }
        }
    }

    TEST_CASE("conjugate sign pattern in H_3") {
        // Bitmask order: 1, i1, i2, i12, i3, i13, i23, i123.
        const HyperComplex z(3, std::vector<double>(8, 1.0));
        const HyperComplex c = conjugate(z);
        const std::vector<double> want{1, -1, -1, 1, -1, 1, 1, -1};
        for (std::size_t g = 0; g < 8; ++g) CHECK(c[g] == want[g]);
        const HyperComplex r = HyperComplex::real(3, 2.5);
        CHECK(conjugate(r) == r);
    }

    TEST_CASE("modulus") {
        CHECK(modulus(HyperComplex(2, {3, 4, 0, 0})) == doctest::Approx(5.0));
        CHECK(modulus(HyperComplex(3)) == 0.0);
        const std::pair<double, double> f[] = {{1, 1}, {1, 1}};
        CHECK(modulus(from_factors(f)) * modulus(from_factors(f)) == doctest::Approx(4.0));
    }

    TEST_CASE("factorizable elements") {
        const std::pair<double, double> ones[] = {{1, 0}, {1, 0}, {1, 0}};
        CHECK(from_factors(ones) == HyperComplex::one(3));
        const std::pair<double, double> ii[] = {{0, 1}, {0, 1}};
        CHECK(max_diff(from_factors(ii), HyperComplex::basis(2, 3)) < 1e-15);

        Rng rng(9);
        for (int rep = 0; rep < 100; ++rep) {
            const int d = 2 + rep % 2;
            std::vector<std::pair<double, double>> f;
            for (int j = 0; j < d; ++j) f.emplace_back(2 * rng.uniform() - 1, 2 * rng.uniform() - 1);
            const HyperComplex x = from_factors(f);
            const HyperComplex n = conjugate(x) * x;
            for (std::size_t g = 1; g < n.size(); ++g) CHECK(std::abs(n[g]) <= 1e-12);
            double prod = 1.0;
            for (auto [a, b] : f) prod *= a * a + b * b;
            CHECK(modulus(x) * modulus(x) == doctest::Approx(prod).epsilon(1e-12));
            CHECK(max_diff(x * inverse_factorizable(x), HyperComplex::one(d)) < 1e-9);
        }

        // 1 + i12 is not factorizable and its norm element is not real.
        const HyperComplex z(2, {1, 0, 0, 1});
        const HyperComplex n = conjugate(z) * z;
        CHECK(std::abs(n[3]) > 0.5);
    }

    TEST_CASE("inverse of factorizable elements") {
        CHECK(inverse_factorizable(HyperComplex::one(2)) == HyperComplex::one(2));
        const HyperComplex inv = inverse_factorizable(HyperComplex(1, {1, 1}));
        CHECK(inv[0] == doctest::Approx(0.5));
        CHECK(inv[1] == doctest::Approx(-0.5));
        const HyperComplex two = inverse_factorizable(HyperComplex::real(3, 2.0));
        CHECK(max_diff(two, HyperComplex::real(3, 0.5)) < 1e-15);
        CHECK_THROWS_AS(inverse_factorizable(HyperComplex(2)), SingularElementError);
    }

    TEST_CASE("matrix isomorphism examples") {
        for (int d = 1; d <= 3; ++d)
            CHECK((matrix_iso(HyperComplex::one(d)) - RealMatrix::identity(component_count(d))).max_abs() == 0.0);
        const RealMatrix i = matrix_iso(HyperComplex::generator(1, 1));
        CHECK(i(0, 0) == 0.0);
        CHECK(i(0, 1) == -1.0);
        CHECK(i(1, 0) == 1.0);
        CHECK(i(1, 1) == 0.0);
    }

    TEST_CASE("generator exponentials") {
        CHECK(max_diff(exp_generator({1, 0.0}, 3), HyperComplex::one(3)) < 1e-15);
        const HyperComplex q = exp_generator({1, std::numbers::pi / 2}, 2);
        CHECK(max_diff(q, HyperComplex::basis(2, 1)) < 1e-15);
        for (std::size_t t_len : {3u, 4u, 7u})
            for (std::size_t k = 0; k < t_len; ++k) {
                HyperComplex sum(2);
                for (std::size_t t = 0; t < t_len; ++t)
                    sum += exp_generator({2, 2 * std::numbers::pi * static_cast<double>(t * k) / t_len}, 2);
                const HyperComplex want = HyperComplex::real(2, k == 0 ? static_cast<double>(t_len) : 0.0);
                CHECK(max_diff(sum, want) < 1e-12);
            }
    }

    TEST_CASE("dimension checks") {
        CHECK_THROWS_AS(HyperComplex(2, {1, 2, 3}), DimensionError);
        CHECK_THROWS_AS(HyperComplex(2) * HyperComplex(3), DimensionError);
        CHECK_THROWS_AS(HyperComplex(kMaxDimension + 1), DimensionError);
        CHECK_THROWS_AS(HyperComplex::generator(2, 3), DimensionError);
    }
}
