#include "hcs/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace hcs {

SampleSummary summarize(std::vector<double> values) {
    SampleSummary s;
    s.count = values.size();
    if (s.count == 0) throw StatsError("summarize: empty sample");
    s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(s.count);
    if (s.count > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - s.mean) * (v - s.mean);
        s.sd = std::sqrt(ss / static_cast<double>(s.count - 1));
        s.se = s.sd / std::sqrt(static_cast<double>(s.count));
    }
    s.values = std::move(values);
    return s;
}

double z_score(double mean_a, double se_a, double mean_b, double se_b) {
    const double den = std::sqrt(se_a * se_a + se_b * se_b);
    if (!(den > 0.0)) throw StatsError("z_score: both standard errors vanish");
    return (mean_a - mean_b) / den;
}

double z_score(const SampleSummary& a, const SampleSummary& b) {
    if (a.count < 2 || b.count < 2) throw StatsError("z_score: need at least two values per sample");
    return z_score(a.mean, a.se, b.mean, b.se);
}

ScalingFit ols_fit(std::span<const double> ns, std::span<const double> ys, double gamma, FitModel model,
                   std::optional<FitExclusion> exclusion) {
    if (ns.size() != ys.size()) throw StatsError("ols_fit: size and value lists differ in length");
    ScalingFit fit;
    fit.model = model;
    fit.gamma = gamma;
    std::vector<double> x, y;
    for (std::size_t i = 0; i < ns.size(); ++i) {
        if (exclusion && std::pow(ns[i], exclusion->m_exponent) <= exclusion->threshold) {
            fit.excluded.push_back(ns[i]);
            continue;
        }
        x.push_back(std::pow(ns[i], -gamma));
        y.push_back(ys[i]);
    }
    const std::size_t n = x.size();
    fit.points = n;
    if (n < 3) throw StatsError("ols_fit: need at least three sizes after exclusion");
    fit.residuals.resize(n);
    if (model == FitModel::InterceptFree) {
        double sxx = 0.0, sxy = 0.0, syy = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            sxx += x[i] * x[i];
            sxy += x[i] * y[i];
            syy += y[i] * y[i];
        }
        if (!(sxx > 0.0)) throw StatsError("ols_fit: degenerate regressor");
        fit.beta1 = sxy / sxx;
        double ssr = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            fit.residuals[i] = y[i] - fit.beta1 * x[i];
            ssr += fit.residuals[i] * fit.residuals[i];
        }
        fit.r2 = syy > 0.0 ? std::clamp(1.0 - ssr / syy, 0.0, 1.0) : 1.0;
        return fit;
    }
    const double xm = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
    const double ym = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - xm) * (x[i] - xm);
        sxy += (x[i] - xm) * (y[i] - ym);
        syy += (y[i] - ym) * (y[i] - ym);
    }
    if (!(sxx > 0.0)) throw StatsError("ols_fit: rank-deficient design");
    fit.beta1 = sxy / sxx;
    const double b0 = ym - fit.beta1 * xm;
    fit.beta0 = b0;
    double ssr = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        fit.residuals[i] = y[i] - b0 - fit.beta1 * x[i];
        ssr += fit.residuals[i] * fit.residuals[i];
    }
    fit.r2 = syy > 0.0 ? std::clamp(1.0 - ssr / syy, 0.0, 1.0) : 1.0;
    const double df = static_cast<double>(n - 2);
    const double se0 = std::sqrt(ssr / df * (1.0 / static_cast<double>(n) + xm * xm / sxx));
    if (se0 > 0.0) fit.p_beta0 = student_t_two_sided_p(b0 / se0, df);
    else fit.p_beta0 = b0 == 0.0 ? 1.0 : 0.0;
    return fit;
}

namespace {

// Continued fraction for I_x(a, b), modified Lentz.
double beta_cf(double a, double b, double x) {
    constexpr double tiny = 1e-300;
    constexpr double eps = 1e-16;
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 10000; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < eps) return h;
    }
    throw StatsError("incomplete_beta: continued fraction did not converge");
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0 && b > 0.0)) throw StatsError("incomplete_beta: parameters must be positive");
    if (!(x >= 0.0 && x <= 1.0)) throw StatsError("incomplete_beta: x outside [0, 1]");
    if (x == 0.0 || x == 1.0) return x;
    const double lbt = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
    const double bt = std::exp(lbt);
    if (x < (a + 1.0) / (a + b + 2.0)) return bt * beta_cf(a, b, x) / a;
    return 1.0 - bt * beta_cf(b, a, 1.0 - x) / b;
}

double student_t_cdf(double t, double df) {
    if (!(df > 0.0)) throw StatsError("student_t_cdf: degrees of freedom must be positive");
    if (std::isinf(t)) return t > 0 ? 1.0 : 0.0;
    const double tail = 0.5 * incomplete_beta(0.5 * df, 0.5, df / (df + t * t));
    return t >= 0.0 ? 1.0 - tail : tail;
}

double student_t_two_sided_p(double t, double df) {
    if (!(df > 0.0)) throw StatsError("student_t_two_sided_p: degrees of freedom must be positive");
    if (std::isinf(t)) return 0.0;
    return incomplete_beta(0.5 * df, 0.5, df / (df + t * t));
}

Histogram histogram(std::span<const double> values, std::size_t bins) {
    if (values.empty()) throw StatsError("histogram: empty sample");
    if (bins == 0) throw StatsError("histogram: need at least one bin");
    const auto [lo_it, hi_it] = std::ranges::minmax_element(values);
    const double lo = *lo_it, hi = *hi_it;
    Histogram h;
    if (lo == hi) {
        h.edges = {lo - 0.5, lo + 0.5};
        h.counts = {values.size()};
        return h;
    }
    const double w = (hi - lo) / static_cast<double>(bins);
    h.edges.resize(bins + 1);
    for (std::size_t i = 0; i <= bins; ++i) h.edges[i] = lo + w * static_cast<double>(i);
    h.edges.back() = hi;
    h.counts.assign(bins, 0);
    for (double v : values) {
        auto b = static_cast<std::size_t>((v - lo) / w);
        if (b >= bins) b = bins - 1;
        ++h.counts[b];
    }
    return h;
}

double quantile(std::span<const double> values, double p) {
    if (values.empty()) throw StatsError("quantile: empty sample");
    if (!(p >= 0.0 && p <= 1.0)) throw StatsError("quantile: probability outside [0, 1]");
    std::vector<double> s(values.begin(), values.end());
    std::ranges::sort(s);
    const double h = static_cast<double>(s.size() - 1) * p;
    const auto i = static_cast<std::size_t>(std::floor(h));
    if (i + 1 >= s.size()) return s.back();
    return s[i] + (h - static_cast<double>(i)) * (s[i + 1] - s[i]);
}

std::vector<std::pair<double, double>> qq_pairs(std::span<const double> a, std::span<const double> b,
                                                std::size_t points) {
    if (a.empty() || b.empty()) throw StatsError("qq_pairs: empty sample");
    if (points == 0) points = std::max(a.size(), b.size());
    std::vector<std::pair<double, double>> out;
    out.reserve(points);
    for (std::size_t i = 0; i < points; ++i) {
        const double p = points == 1 ? 0.5 : static_cast<double>(i) / static_cast<double>(points - 1);
        out.emplace_back(quantile(a, p), quantile(b, p));
    }
    return out;
}

}  // namespace hcs
