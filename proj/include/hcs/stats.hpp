#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace hcs {

class StatsError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

struct SampleSummary {
    std::vector<double> values;
    double mean = 0.0;
    /// Sample standard deviation (n - 1 denominator); 0 for one value.
    double sd = 0.0;
    /// sd / sqrt(count).
    double se = 0.0;
    std::size_t count = 0;
};

SampleSummary summarize(std::vector<double> values);

/// (mean_a - mean_b) / sqrt(se_a^2 + se_b^2).
double z_score(const SampleSummary& a, const SampleSummary& b);
double z_score(double mean_a, double se_a, double mean_b, double se_b);

enum class FitModel { InterceptFree, WithIntercept };

/// Candidate exponents for the finite-size fits.
inline constexpr std::array<double, 9> kGammaGrid{2.0, 1.75, 1.5, 1.25, 1.0, 0.75, 0.5, 0.33, 0.25};

/// Drop sizes with N^m_exponent <= threshold before fitting.
struct FitExclusion {
    double m_exponent = 1.0;
    double threshold = 60.0;
};

struct ScalingFit {
    FitModel model = FitModel::InterceptFree;
    double gamma = 1.0;
    std::optional<double> beta0;
    double beta1 = 0.0;
    /// Uncentered for the intercept-free model, centered otherwise.
    double r2 = 0.0;
    /// Two-sided t-test of beta0 = 0 with n - 2 degrees of freedom.
    std::optional<double> p_beta0;
    std::vector<double> excluded;
    std::size_t points = 0;
    std::vector<double> residuals;
};

/// Least squares of ys on x = N^{-gamma}.
ScalingFit ols_fit(std::span<const double> ns, std::span<const double> ys, double gamma, FitModel model,
                   std::optional<FitExclusion> exclusion = std::nullopt);

/// Regularized incomplete beta I_x(a, b).
double incomplete_beta(double a, double b, double x);
double student_t_cdf(double t, double df);
/// P(|T| >= |t|).
double student_t_two_sided_p(double t, double df);

struct Histogram {
    std::vector<double> edges;
    std::vector<std::size_t> counts;
};

/// Equal-width bins over [min, max], last bin closed. A constant sample
/// yields a single bin of width 1 centred on the value.
Histogram histogram(std::span<const double> values, std::size_t bins);

/// Linear-interpolation quantile (type 7) of an unsorted sample.
double quantile(std::span<const double> values, double p);

/// Quantile pairs on the common grid p_i = i / (points - 1); points = 0
/// uses the larger sample size.
std::vector<std::pair<double, double>> qq_pairs(std::span<const double> a, std::span<const double> b,
                                                std::size_t points = 0);

}  // namespace hcs
