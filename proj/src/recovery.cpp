#include "hcs/recovery.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "json.hpp"

namespace hcs {

namespace {

using Json = nlohmann::ordered_json;

double norm2(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

// Solves (A A^T) w = r by conjugate gradients starting from w.
void cg_normal(const AcquisitionOperator& op, std::span<const double> r, std::vector<double>& w, int max_iter,
               double tol) {
    auto aat = [&](std::span<const double> v) { return op.apply_coords(op.adjoint_coords(v)); };
    std::vector<double> res(r.begin(), r.end());
    const auto aw = aat(w);
    for (std::size_t i = 0; i < res.size(); ++i) res[i] -= aw[i];
    const double target = tol * std::max(norm2(r), 1e-300);
    std::vector<double> p = res;
    double rr = dot(res, res);
    for (int it = 0; it < max_iter && std::sqrt(rr) > target; ++it) {
        const auto ap = aat(p);
        const double alpha = rr / dot(p, ap);
        for (std::size_t i = 0; i < w.size(); ++i) {
            w[i] += alpha * p[i];
            res[i] -= alpha * ap[i];
        }
        const double rr_new = dot(res, res);
        const double beta = rr_new / rr;
        rr = rr_new;
        for (std::size_t i = 0; i < p.size(); ++i) p[i] = res[i] + beta * p[i];
    }
}

double group_norm_sum(std::span<const double> x, std::size_t gs, std::span<const double> weights) {
    double s = 0.0;
    for (std::size_t g = 0; g * gs < x.size(); ++g) {
        const double w = weights.empty() ? 1.0 : weights[g];
        s += w * norm2(x.subspan(g * gs, gs));
    }
    return s;
}

}  // namespace

HyperArray SparseSpectrum::to_array() const {
    HyperArray x(dims);
    std::set<std::size_t> seen;
    if (values.size() != support.size()) throw DimensionError("sparse spectrum: support and values differ in length");
    for (std::size_t i = 0; i < support.size(); ++i) {
        const std::size_t f = flatten(dims, support[i]);
        if (!seen.insert(f).second) throw std::invalid_argument("sparse spectrum: repeated support entry");
        x.set(f, values[i]);
    }
    return x;
}

SparseSpectrum sparse_from_json(std::string_view text) {
    try {
        const Json j = Json::parse(text);
        SparseSpectrum s;
        s.dims = j.at("dims").get<Dims>();
        check_dims(s.dims);
        const int d = static_cast<int>(s.dims.size());
        for (const Json& e : j.at("support")) {
            Index k = e.at("k").get<Index>();
            if (k.size() != s.dims.size()) throw std::invalid_argument("sparse spectrum: index rank mismatch");
            for (std::size_t t = 0; t < k.size(); ++t)
                if (k[t] >= s.dims[t]) throw std::invalid_argument("sparse spectrum: index out of range");
            auto coeffs = e.at("value").get<std::vector<double>>();
            if (coeffs.size() != component_count(d))
                throw std::invalid_argument("sparse spectrum: value needs 2^d coefficients");
            s.support.push_back(std::move(k));
            s.values.emplace_back(d, std::move(coeffs));
        }
        (void)s.to_array();
        return s;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("sparse spectrum JSON: ") + e.what());
    }
}

std::string to_json(const SparseSpectrum& s, int indent) {
    Json j;
    j["dims"] = s.dims;
    Json sup = Json::array();
    for (std::size_t i = 0; i < s.support.size(); ++i) {
        const auto c = s.values[i].coeffs();
        sup.push_back({{"k", s.support[i]}, {"value", std::vector<double>(c.begin(), c.end())}});
    }
    j["support"] = std::move(sup);
    return j.dump(indent);
}

MatchedFilterResult matched_filter(const AcquisitionOperator& op, std::span<const double> y) {
    MatchedFilterResult out{op.adjoint_apply(y), 0};
    const GramEngine engine(op.schedule());
    const std::size_t m = op.components();
    auto coords = out.estimate.coords();
    std::vector<double> g(m * m);
    for (std::size_t i = 0; i < engine.group_count(); ++i) {
        engine.block_into(i, i, g);
        for (std::size_t u = 0; u < m; ++u) {
            const double dgn = g[u * m + u];
            if (dgn <= kSingularTolerance) {
                coords[i * m + u] = 0.0;
                ++out.zero_diagonal;
            } else {
                coords[i * m + u] /= dgn;
            }
        }
    }
    return out;
}

double hyper_l1_norm(const HyperArray& x) {
    return group_norm_sum(x.coords(), std::max<std::size_t>(x.components(), 1), {});
}

RecoveryResult solve_ph1(const AcquisitionOperator& op, std::span<const double> y, const RecoveryParams& params) {
    if (y.size() != op.row_count()) throw DimensionError("solve_ph1: measurement length mismatch");
    if (!(params.rho > 0.0)) throw std::invalid_argument("solve_ph1: rho must be positive");
    const std::size_t n = op.column_count();
    const std::size_t gs = params.group_size == 0 ? op.components() : params.group_size;
    if (n % gs != 0) throw std::invalid_argument("solve_ph1: group size does not divide the unknown count");
    const std::size_t groups = n / gs;
    if (!params.weights.empty() && params.weights.size() != groups)
        throw std::invalid_argument("solve_ph1: expected one weight per group");
    for (double w : params.weights)
        if (!(w >= 0.0)) throw std::invalid_argument("solve_ph1: weights must be non-negative");
    auto weight = [&](std::size_t g) { return params.weights.empty() ? 1.0 : params.weights[g]; };

    const double ynorm = norm2(y);
    const double eps = params.tol * (ynorm > 0.0 ? ynorm : 1.0);

    // Start from the minimum-norm feasible point with the dual set to a
    // subgradient there, so an already optimal start is accepted at once.
    std::vector<double> w_cg(y.size(), 0.0);
    cg_normal(op, y, w_cg, params.cg_max_iter, params.cg_tol);
    std::vector<double> z = op.adjoint_coords(w_cg);
    std::vector<double> u(n, 0.0);
    for (std::size_t g = 0; g < groups; ++g) {
        const double nz = norm2(std::span<const double>(z).subspan(g * gs, gs));
        if (nz > 0.0)
            for (std::size_t e = 0; e < gs; ++e) u[g * gs + e] = weight(g) / params.rho * z[g * gs + e] / nz;
    }

    RecoveryResult res;
    std::vector<double> v(n), x(n), z_old(n), r(y.size());
    for (int it = 1; it <= params.max_iter; ++it) {
        // x = argmin |x - v| subject to A x = y.
        for (std::size_t i = 0; i < n; ++i) v[i] = z[i] - u[i];
        const auto av = op.apply_coords(v);
        for (std::size_t i = 0; i < r.size(); ++i) r[i] = av[i] - y[i];
        std::fill(w_cg.begin(), w_cg.end(), 0.0);
        cg_normal(op, r, w_cg, params.cg_max_iter, params.cg_tol);
        const auto corr = op.adjoint_coords(w_cg);
        for (std::size_t i = 0; i < n; ++i) x[i] = v[i] - corr[i];

        z_old = z;
        for (std::size_t g = 0; g < groups; ++g) {
            const double t = weight(g) / params.rho;
            double nrm = 0.0;
            for (std::size_t e = 0; e < gs; ++e) {
                const double a = x[g * gs + e] + u[g * gs + e];
                nrm += a * a;
            }
            nrm = std::sqrt(nrm);
            const double f = nrm > t ? 1.0 - t / nrm : 0.0;
            for (std::size_t e = 0; e < gs; ++e) z[g * gs + e] = f * (x[g * gs + e] + u[g * gs + e]);
        }
        double rp = 0.0, rd = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            u[i] += x[i] - z[i];
            rp += (x[i] - z[i]) * (x[i] - z[i]);
            rd += (z[i] - z_old[i]) * (z[i] - z_old[i]);
        }
        res.primal_residual = std::sqrt(rp);
        res.dual_residual = params.rho * std::sqrt(rd);
        res.iterations = it;
        if (res.primal_residual < eps && res.dual_residual < eps) {
            res.converged = true;
            break;
        }
    }
    res.estimate = HyperArray(op.dims(), z);
    res.objective = group_norm_sum(z, gs, {});
    res.weighted_objective = group_norm_sum(z, gs, params.weights);
    const auto az = op.apply_coords(z);
    double fe = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) fe += (az[i] - y[i]) * (az[i] - y[i]);
    res.feasibility = std::sqrt(fe) / (ynorm > 0.0 ? ynorm : 1.0);
    return res;
}

std::vector<double> normalization_weights(const SamplingSchedule& s) {
    const Normalization norm = normalization(GramEngine(s));
    std::vector<double> w(norm.sigma_min.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::sqrt(std::max(0.0, norm.sigma_min[i]));
    return w;
}

std::vector<double> column_norm_weights(const SamplingSchedule& s) {
    const GramEngine engine(s);
    const std::size_t m = s.components();
    std::vector<double> w(engine.group_count() * m);
    std::vector<double> g(m * m);
    for (std::size_t i = 0; i < engine.group_count(); ++i) {
        engine.block_into(i, i, g);
        for (std::size_t u = 0; u < m; ++u) w[i * m + u] = std::sqrt(std::max(0.0, g[u * m + u]));
    }
    return w;
}

bool sparsity_certificate(double mu, bool infinite, std::size_t k) {
    if (infinite || std::isinf(mu)) return k == 0;
    if (mu <= 0.0) return true;
    return static_cast<double>(k) < 0.5 * (1.0 + 1.0 / mu);
}

bool theorem2_certificate(const CoherenceReport& r, std::size_t k) { return sparsity_certificate(r.mu_h, r.infinite, k); }

double relative_error(const HyperArray& estimate, const HyperArray& truth) {
    if (estimate.dims() != truth.dims()) throw DimensionError("relative_error: shape mismatch");
    double num = 0.0, den = 0.0;
    const auto a = estimate.coords();
    const auto b = truth.coords();
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += (a[i] - b[i]) * (a[i] - b[i]);
        den += b[i] * b[i];
    }
    return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

std::string to_json(const RecoveryResult& r, double support_tol, int indent) {
    Json j;
    j["converged"] = r.converged;
    j["iterations"] = r.iterations;
    j["primal_residual"] = r.primal_residual;
    j["dual_residual"] = r.dual_residual;
    j["objective"] = r.objective;
    j["weighted_objective"] = r.weighted_objective;
    j["feasibility"] = r.feasibility;
    Json sup = Json::array();
    for (std::size_t f = 0; f < r.estimate.size(); ++f) {
        const HyperComplex z = r.estimate.at(f);
        const double mod = modulus(z);
        if (mod <= support_tol) continue;
        const auto c = z.coeffs();
        sup.push_back({{"k", unflatten(r.estimate.dims(), f)},
                       {"modulus", mod},
                       {"value", std::vector<double>(c.begin(), c.end())}});
    }
    j["support"] = std::move(sup);
    return j.dump(indent);
}

}  // namespace hcs
