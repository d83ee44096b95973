#include <cmath>
#include <numeric>

#include "doctest.h"
#include "hcs/stats.hpp"

using namespace hcs;

namespace {

// Composite Simpson in long double; the integrands below are smooth.
template <class F>
long double simpson(F f, long double a, long double b, int n = 20000) {
    const long double h = (b - a) / n;
    long double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0L : 2.0L) * f(a + i * h);
    return s * h / 3.0L;
}

long double t_cdf_oracle(long double t, long double df) {
    const long double c =
        std::exp(std::lgamma((df + 1) / 2) - std::lgamma(df / 2)) / std::sqrt(df * 3.14159265358979323846264338L);
    auto dens = [&](long double x) { return c * std::pow(1 + x * x / df, -(df + 1) / 2); };
    return 0.5L + simpson(dens, 0.0L, t);
}

long double beta_oracle(long double a, long double b, long double x) {
    auto f = [&](long double u) { return std::pow(u, a - 1) * std::pow(1 - u, b - 1); };
    // Exact normalizer: the full-interval integrand is singular at 1 when b < 2.
    return simpson(f, 0.0L, x) / std::exp(std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
}

}  // namespace

TEST_SUITE("stats") {
    TEST_CASE("summaries") {
        const SampleSummary s = summarize({1.0, 2.0, 3.0, 4.0});
        CHECK(s.mean == doctest::Approx(2.5));
        CHECK(s.sd == doctest::Approx(std::sqrt(5.0 / 3.0)));
        CHECK(s.se == doctest::Approx(s.sd / 2.0));
        CHECK(s.count == 4);
        CHECK_THROWS_AS(summarize({}), StatsError);
    }

    TEST_CASE("z scores") {
        const SampleSummary a = summarize({1.0, 2.0, 4.0}), b = summarize({1.0, 2.0, 4.0});
        CHECK(z_score(a, b) == 0.0);
        CHECK(z_score(1.0, 0.6, 0.0, 0.8) == doctest::Approx(1.0));
        CHECK(z_score(0.0, 0.6, 1.0, 0.8) == doctest::Approx(-1.0));
        const SampleSummary c = summarize({0.5, 0.9, 1.7, 2.2});
        CHECK(z_score(a, c) == doctest::Approx(-z_score(c, a)));
        CHECK_THROWS_AS(z_score(summarize({1.0, 1.0}), summarize({2.0, 2.0})), StatsError);
        CHECK_THROWS_AS(z_score(summarize({1.0}), c), StatsError);
    }

    TEST_CASE("exact power law fits") {
        const std::vector<double> ns{10, 20, 40};
        std::vector<double> ys;
        for (double n : ns) ys.push_back(2.0 / n);
        const ScalingFit f = ols_fit(ns, ys, 1.0, FitModel::InterceptFree);
        CHECK(f.beta1 == doctest::Approx(2.0));
        CHECK(f.r2 == doctest::Approx(1.0));
        CHECK_FALSE(f.beta0.has_value());
        CHECK_FALSE(f.p_beta0.has_value());
        CHECK_THROWS_AS(ols_fit(std::vector<double>{1, 2}, std::vector<double>{1, 2}, 1.0, FitModel::InterceptFree),
                        StatsError);
    }

    TEST_CASE("gamma grid selects the generating exponent") {
        const std::vector<double> ns{8, 12, 16, 20, 24, 32};
        for (double g : {1.5, 1.0, 0.5}) {
            std::vector<double> ys;
            for (double n : ns) ys.push_back(0.8 * std::pow(n, -g));
            double best_r2 = -1.0, best_g = 0.0, best_p = -1.0, best_pg = 0.0;
            for (double cand : kGammaGrid) {
                const ScalingFit f = ols_fit(ns, ys, cand, FitModel::InterceptFree);
                if (f.r2 > best_r2) best_r2 = f.r2, best_g = cand;
                // Tiny noise keeps the residual variance of the exact fit nonzero.
                std::vector<double> noisy = ys;
                for (std::size_t i = 0; i < noisy.size(); ++i) noisy[i] *= 1.0 + 1e-6 * ((i % 2) ? 1.0 : -1.0);
                const ScalingFit w = ols_fit(ns, noisy, cand, FitModel::WithIntercept);
                CHECK(w.r2 >= 0.0);
                CHECK(w.r2 <= 1.0);
                if (*w.p_beta0 > best_p) best_p = *w.p_beta0, best_pg = cand;
            }
            CHECK(best_g == g);
            CHECK(best_pg == g);
            CHECK(best_p > 0.05);
        }
    }

    TEST_CASE("residuals are orthogonal to the regressors") {
        const std::vector<double> ns{5, 7, 11, 13, 17};
        const std::vector<double> ys{0.31, 0.22, 0.17, 0.12, 0.11};
        for (FitModel m : {FitModel::InterceptFree, FitModel::WithIntercept}) {
            const ScalingFit f = ols_fit(ns, ys, 0.75, m);
            double dx = 0.0, d1 = 0.0;
            for (std::size_t i = 0; i < ns.size(); ++i) {
                dx += f.residuals[i] * std::pow(ns[i], -0.75);
                d1 += f.residuals[i];
            }
            CHECK(std::abs(dx) < 1e-10);
            if (m == FitModel::WithIntercept) CHECK(std::abs(d1) < 1e-10);
            CHECK(f.r2 >= 0.0);
            CHECK(f.r2 <= 1.0);
        }
    }

    TEST_CASE("exclusion drops small problems") {
        const std::vector<double> ns{4, 6, 8, 10, 12};
        const std::vector<double> ys{0.5, 0.4, 0.3, 0.25, 0.2};
        const ScalingFit f = ols_fit(ns, ys, 1.0, FitModel::InterceptFree, FitExclusion{2.0, 60.0});
        CHECK(f.excluded == std::vector<double>{4, 6});
        CHECK(f.points == 3);
        CHECK_THROWS_AS(ols_fit(ns, ys, 1.0, FitModel::InterceptFree, FitExclusion{1.0, 60.0}), StatsError);
    }

    TEST_CASE("t distribution against quadrature") {
        const std::pair<double, double> pts[] = {{0.5, 1}, {-1.3, 3}, {2.0, 5}, {0.1, 10}, {-3.7, 2}, {1.96, 30}};
        for (auto [t, df] : pts) {
            CHECK(std::abs(student_t_cdf(t, df) - static_cast<double>(t_cdf_oracle(t, df))) < 1e-8);
            CHECK(student_t_two_sided_p(t, df) ==
                  doctest::Approx(2.0 * (1.0 - student_t_cdf(std::abs(t), df))).epsilon(1e-10));
        }
        CHECK(student_t_cdf(0.0, 4.0) == doctest::Approx(0.5));
        const double ab[][3] = {{2, 3, 0.4}, {1, 1, 0.7}, {5, 2.5, 0.9}, {3.5, 1.5, 0.2}};
        for (const auto& r : ab)
            CHECK(std::abs(incomplete_beta(r[0], r[1], r[2]) - static_cast<double>(beta_oracle(r[0], r[1], r[2]))) <
                  1e-9);
    }

    TEST_CASE("histograms") {
        const Histogram c = histogram(std::vector<double>(7, 3.0), 5);
        std::size_t occupied = 0;
        for (std::size_t n : c.counts) occupied += n > 0;
        CHECK(occupied == 1);
        CHECK(std::accumulate(c.counts.begin(), c.counts.end(), std::size_t{0}) == 7);
        std::vector<double> u;
        for (int i = 0; i < 100; ++i) u.push_back((i + 0.5) / 100.0);
        const Histogram h = histogram(u, 10);
        for (std::size_t n : h.counts) CHECK(n == 10);
        CHECK(h.edges.front() <= u.front());
        CHECK(h.edges.back() >= u.back());
        CHECK_THROWS_AS(histogram(std::vector<double>{}, 3), StatsError);
        CHECK_THROWS_AS(histogram(u, 0), StatsError);
    }

    TEST_CASE("quantiles and Q-Q pairs") {
        const std::vector<double> a{3.0, 1.0, 4.0, 1.5, 9.0, 2.6};
        CHECK(quantile(a, 0.0) == 1.0);
        CHECK(quantile(a, 1.0) == 9.0);
        CHECK(quantile(std::vector<double>{1, 2, 3, 4}, 0.5) == doctest::Approx(2.5));
        double prev = -1e300;
        for (int i = 0; i <= 20; ++i) {
            const double q = quantile(a, i / 20.0);
            CHECK(q >= prev);
            prev = q;
        }
        for (auto [x, y] : qq_pairs(a, a)) CHECK(x == y);
        std::vector<double> b = a;
        for (double& v : b) v += 1.0;
        for (auto [x, y] : qq_pairs(a, b, 9)) CHECK(y - x == doctest::Approx(1.0));
        CHECK_THROWS_AS(qq_pairs(a, std::vector<double>{}), StatsError);
    }
}
