#include <cmath>

#include "doctest.h"
#include "hcs/recovery.hpp"
#include "oracles.hpp"

using namespace hcs;

namespace {

HyperArray planted(const Dims& dims, std::size_t k, std::uint64_t seed) {
    Rng rng(seed);
    HyperArray x(dims);
    const std::size_t m = x.components();
    for (std::size_t g : rng.sample(x.size(), k))
        for (std::size_t e = 0; e < m; ++e) x.coords()[g * m + e] = 2.0 * rng.uniform() - 1.0;
    return x;
}

std::size_t certified(const CoherenceReport& r, std::size_t cap) {
    std::size_t k = 0;
    while (k < cap && theorem2_certificate(r, k + 1)) ++k;
    return k;
}

}  // namespace

TEST_SUITE("recovery") {
    TEST_CASE("modulus sum") {
        HyperArray x(Dims{4, 2});
        x.set(Index{1, 1}, HyperComplex::one(2));
        CHECK(hyper_l1_norm(x) == doctest::Approx(1.0));
        x.set(Index{1, 1}, HyperComplex(2, {3, 0, 0, 0}));
        x.set(Index{2, 0}, HyperComplex(2, {0, 0, 4, 0}));
        CHECK(hyper_l1_norm(x) == doctest::Approx(7.0));
        for (std::uint64_t s = 0; s < 10; ++s) {
            const HyperArray a = oracle::random_array(Dims{3, 3}, s), b = oracle::random_array(Dims{3, 3}, s + 9);
            HyperArray c = a;
            c += b;
            CHECK(hyper_l1_norm(c) <= hyper_l1_norm(a) + hyper_l1_norm(b) + 1e-12);
        }
    }

    TEST_CASE("matched filter") {
        const AcquisitionOperator u(uniform({4, 3}));
        const HyperArray x = oracle::random_array(Dims{4, 3}, 2);
        CHECK(max_abs_difference(matched_filter(u, u.apply(x)).estimate, x) < 1e-10);
        const AcquisitionOperator op(nus_random({4, 4, 2}, 0.5, 1));
        const MatchedFilterResult z = matched_filter(op, std::vector<double>(op.row_count(), 0.0));
        for (double v : z.estimate.coords()) CHECK(v == 0.0);
        // Support of the estimate lies inside the hPSF support of a spike.
        HyperArray spike(op.dims());
        spike.set(0, HyperComplex::one(3));
        const MatchedFilterResult mf = matched_filter(op, op.apply(spike));
        const HpsfResult h = hpsf(op.schedule(), Index{0, 0, 0});
        for (std::size_t f = 1; f < spike.size(); ++f)
            if (h.values[f] <= 1e-10) CHECK(modulus(mf.estimate.at(f)) <= 1e-10);
    }

    TEST_CASE("certificate arithmetic") {
        CHECK(sparsity_certificate(0.0, false, 1000));
        CHECK(sparsity_certificate(1.0, false, 0));
        CHECK_FALSE(sparsity_certificate(1.0, false, 1));
        CHECK(sparsity_certificate(1.0 / 9.0, false, 4));
        CHECK_FALSE(sparsity_certificate(1.0 / 9.0, false, 5));
        CHECK_FALSE(sparsity_certificate(0.1, true, 1));
        CHECK(sparsity_certificate(0.1, true, 0));
    }

    TEST_CASE("uniform sampling recovers immediately") {
        const SamplingSchedule s = uniform({4, 4, 2});
        const AcquisitionOperator op(s);
        const HyperArray x = planted(s.dims(), 1, 3);
        const RecoveryResult r = solve_ph1(op, op.apply(x));
        CHECK(r.converged);
        CHECK(r.iterations <= 2);
        CHECK(relative_error(r.estimate, x) < 1e-10);
    }

    TEST_CASE("certified sparsity is recovered with both weightings") {
        for (const SamplingSchedule& s : {nus_random({5, 5, 4}, 0.5, 3), pcs({5, 5, 4}, 1.0, 0.5, "S4", Approach::A2, 4),
                                          rpd({5, 5, 4}, "S4", Approach::A1, 5)}) {
            const AcquisitionOperator op(s);
            const CoherenceReport rep = mu_hypercomplex(s);
            const std::size_t k = std::max<std::size_t>(certified(rep, s.pixel_count()), 1);
            REQUIRE(theorem2_certificate(rep, k));
            RecoveryParams p;
            p.weights = normalization_weights(s);
            for (std::uint64_t seed = 0; seed < 3; ++seed) {
                const HyperArray x = planted(s.dims(), k, seed);
                const auto y = op.apply(x);
                const RecoveryResult r = solve_ph1(op, y, p);
                CHECK(r.converged);
                CHECK(relative_error(r.estimate, x) <= 1e-6);
                CHECK(r.feasibility <= 1e-8);
            }
        }
    }

    TEST_CASE("solution beats feasible perturbations") {
        const SamplingSchedule s = pcs({4, 4, 2}, 0.5, 0.5, "S4", Approach::A2, 2);
        const AcquisitionOperator op(s);
        const HyperArray x = planted(s.dims(), 6, 1);
        const auto y = op.apply(x);
        const RecoveryResult r = solve_ph1(op, y);
        REQUIRE(r.converged);
        const double f0 = hyper_l1_norm(r.estimate);
        CHECK(r.objective == doctest::Approx(f0));
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            // v = (I - A^T A) w lies in the null space since A A^T = I.
            const HyperArray w = oracle::random_array(s.dims(), seed);
            const auto atax = op.adjoint_coords(op.apply(w));
            HyperArray cand = r.estimate;
            for (std::size_t i = 0; i < atax.size(); ++i) cand.coords()[i] += 1e-3 * (w.coords()[i] - atax[i]);
            CHECK(hyper_l1_norm(cand) >= f0 - 1e-9);
        }
    }

    TEST_CASE("null-space directions are annihilated by the Gram blocks") {
        const SamplingSchedule s = rpd({4, 4, 2}, "S4", Approach::A2, 7);
        const AcquisitionOperator op(s);
        const GramEngine e(s);
        const std::size_t m = s.components();
        const HyperArray w = oracle::random_array(s.dims(), 1);
        const auto atax = op.adjoint_coords(op.apply(w));
        std::vector<double> v(atax.size());
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = w.coords()[i] - atax[i];
        CHECK(std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0)) > 0.1);
        double worst = 0.0;
        for (std::size_t i = 0; i < s.pixel_count(); ++i) {
            std::vector<double> acc(m, 0.0);
            for (std::size_t j = 0; j < s.pixel_count(); ++j) {
                const RealMatrix g = e.block(i, j);
                for (std::size_t a = 0; a < m; ++a)
                    for (std::size_t b = 0; b < m; ++b) acc[a] += g(a, b) * v[j * m + b];
            }
            for (double x : acc) worst = std::max(worst, std::abs(x));
        }
        CHECK(worst <= 1e-8);
    }

    TEST_CASE("real-coordinate variant with traditional coherence") {
        const SamplingSchedule s = nus_random({6, 6, 1}, 0.75, 2);
        const AcquisitionOperator op(s);
        const auto mu = mu_traditional(s);
        REQUIRE(mu.has_value());
        std::size_t k = 0;
        while (sparsity_certificate(*mu, false, k + 1)) ++k;
        k = std::max<std::size_t>(k, 1);
        RecoveryParams p;
        p.group_size = 1;
        p.weights = column_norm_weights(s);
        Rng rng(4);
        HyperArray x(s.dims());
        for (std::size_t c : rng.sample(x.coords().size(), k)) x.coords()[c] = 1.0 + rng.uniform();
        const RecoveryResult r = solve_ph1(op, op.apply(x), p);
        CHECK(r.converged);
        CHECK(relative_error(r.estimate, x) <= 1e-6);
    }

    TEST_CASE("iteration cap reports non-convergence") {
        const SamplingSchedule s = rpd({4, 4, 2}, "S4", Approach::A1, 1);
        const AcquisitionOperator op(s);
        RecoveryParams p;
        p.max_iter = 2;
        const RecoveryResult r = solve_ph1(op, op.apply(planted(s.dims(), 8, 2)), p);
        CHECK_FALSE(r.converged);
        CHECK(r.iterations == 2);
        CHECK(r.primal_residual > 0.0);
    }

    TEST_CASE("parameter validation") {
        const AcquisitionOperator op(uniform({2, 2}));
        CHECK_THROWS_AS(solve_ph1(op, std::vector<double>(3)), DimensionError);
        RecoveryParams p;
        p.rho = 0.0;
        CHECK_THROWS_AS(solve_ph1(op, std::vector<double>(op.row_count()), p), std::invalid_argument);
        p.rho = 1.0;
        p.weights = {1.0};
        CHECK_THROWS_AS(solve_ph1(op, std::vector<double>(op.row_count()), p), std::invalid_argument);
    }

    TEST_CASE("sparse spectrum JSON") {
        SparseSpectrum sp{{3, 2}, {{1, 0}, {2, 1}}, {HyperComplex(2, {1, 0, 0, 0}), HyperComplex(2, {0, 1, 2, 3})}};
        const SparseSpectrum back = sparse_from_json(to_json(sp));
        CHECK(back.dims == sp.dims);
        CHECK(back.support == sp.support);
        CHECK(back.values == sp.values);
        CHECK(back.to_array().at(Index{2, 1}) == sp.values[1]);
        CHECK_THROWS_AS(sparse_from_json(R"({"dims":[2],"support":[{"k":[0],"value":[1,0]},{"k":[0],"value":[1,0]}]})"),
                        std::invalid_argument);
        CHECK_THROWS_AS(sparse_from_json(R"({"dims":[2],"support":[{"k":[5],"value":[1,0]}]})"), std::invalid_argument);
    }
}
