#include "hcs/coherence.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include "hcs/hyperfft.hpp"

namespace hcs {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kExpandedBudget = std::size_t{1} << 25;  // doubles

inline bool odd_parity(std::uint32_t x) { return (std::popcount(x) & 1) != 0; }

// Largest singular value of sc * G when it may exceed `threshold`, else
// nullopt. Rejection runs through the nested bounds
// sigma_max^2 <= |B^q|_F^{1/q}, B = (sc G)^T (sc G), q = 1/2, 1, 2, ..., so
// most blocks are dismissed without an eigensolve.
std::optional<double> sigma_above(std::span<const double> g, std::size_t m, double sc, double threshold) {
    double fro2 = 0.0;
    for (double x : g) fro2 += x * x;
    fro2 *= sc * sc;
    if (std::sqrt(fro2) <= threshold) return std::nullopt;
    constexpr std::size_t kStack = 16;
    if (m > kStack) {
        RealMatrix gm(m, m);
        std::ranges::copy(g, gm.data().begin());
        return sigma_max(gm) * sc;
    }
    double b[kStack * kStack], p[kStack * kStack], sq[kStack * kStack];
    for (std::size_t u = 0; u < m; ++u)
        for (std::size_t v = u; v < m; ++v) {
            double acc = 0.0;
            for (std::size_t r = 0; r < m; ++r) acc += g[r * m + u] * g[r * m + v];
            b[u * m + v] = b[v * m + u] = acc * sc * sc;
        }
    const double log_thr = std::log(threshold);
    std::copy(b, b + m * m, p);
    double log_scale = 0.0;
    double q = 1.0;
    for (int step = 0; step < 5; ++step) {
        double nf = 0.0;
        for (std::size_t e = 0; e < m * m; ++e) nf += p[e] * p[e];
        nf = std::sqrt(nf);
        if (nf == 0.0) return std::nullopt;
        if ((log_scale + std::log(nf)) / (2.0 * q) <= log_thr) return std::nullopt;
        double c = 0.0;
        for (std::size_t u = 0; u < m; ++u)
            for (std::size_t v = u; v < m; ++v) {
                double acc = 0.0;
                for (std::size_t r = 0; r < m; ++r) acc += p[u * m + r] * p[r * m + v];
                sq[u * m + v] = sq[v * m + u] = acc;
                c = std::max(c, std::abs(acc));
            }
        if (c == 0.0) return std::nullopt;
        for (std::size_t e = 0; e < m * m; ++e) p[e] = sq[e] / c;
        log_scale = 2.0 * log_scale + std::log(c);
        q *= 2.0;
    }
    RealMatrix bm(m, m);
    std::copy(b, b + m * m, bm.data().begin());
    const auto ev = symmetric_eigenvalues(bm);
    return std::sqrt(std::max(0.0, ev.back()));
}

}  // namespace

GramBlock gram_block(const AcquisitionOperator& op, std::size_t i, std::size_t j) {
    const Dims& dims = op.dims();
    const std::size_t n = element_count(dims);
    if (i >= n || j >= n) throw std::out_of_range("gram_block: frequency index out of range");
    const std::size_t m = op.components();
    const Index ki = unflatten(dims, i);
    const Index kj = unflatten(dims, j);
    const SamplingSchedule& s = op.schedule();
    RealMatrix g(m, m);
    for (std::size_t p = 0; p < n; ++p) {
        const ComponentMask& mask = s.mask(p);
        if (mask.none()) continue;
        const Index t = unflatten(dims, p);
        const RealMatrix fi = matrix_iso(fourier_kernel(dims, ki, t));
        const RealMatrix fj = matrix_iso(fourier_kernel(dims, kj, t));
        for (std::size_t r = 0; r < m; ++r) {
            if (!mask.test(r)) continue;
            for (std::size_t u = 0; u < m; ++u)
                for (std::size_t v = 0; v < m; ++v) g(u, v) += fi(r, u) * fj(r, v);
        }
    }
    const auto sv = singular_values(g);
    return {i, j, g, sv.front(), sv.back()};
}

GramEngine::GramEngine(const SamplingSchedule& schedule)
    : dims_(schedule.dims()),
      d_(schedule.dimension()),
      n_(schedule.pixel_count()),
      comps_(schedule.components()) {
    const double w = 1.0 / static_cast<double>(comps_);
    for (std::uint32_t S = 0; S < comps_; ++S) {
        HyperArray c(dims_);
        bool any = false;
        for (std::size_t p = 0; p < n_; ++p) {
            const ComponentMask& mask = schedule.mask(p);
            double acc = 0.0;
            for (std::uint32_t r = 0; r < comps_; ++r)
                if (mask.test(r)) acc += odd_parity(r & S) ? -1.0 : 1.0;
            if (acc != 0.0) {
                any = true;
                c.entry(p)[0] = acc * w;
            }
        }
        if (!any) continue;
        const HyperArray h = separable_transform(c, KernelSign::Positive, false);
        modes_.push_back({S, {h.coords().begin(), h.coords().end()}, {}});
    }
    strides_.assign(dims_.size(), 1);
    for (std::size_t j = dims_.size() - 1; j-- > 0;) strides_[j] = strides_[j + 1] * dims_[j + 1];
    neg_.resize(n_);
    for (std::size_t k = 0; k < n_; ++k) {
        std::size_t f = 0;
        for (std::size_t j = 0; j < dims_.size(); ++j) {
            const std::size_t kj = (k / strides_[j]) % dims_[j];
            f += ((dims_[j] - kj) % dims_[j]) * strides_[j];
        }
        neg_[k] = f;
    }
    // Phi sign of (u ^ v, v), the Z_S sign of v and the 1/N factor, per mode.
    const double inv_n = 1.0 / static_cast<double>(n_);
    mode_sign_.resize(modes_.size() * comps_ * comps_);
    for (std::size_t mi = 0; mi < modes_.size(); ++mi)
        for (std::uint32_t u = 0; u < comps_; ++u)
            for (std::uint32_t v = 0; v < comps_; ++v)
                mode_sign_[(mi * comps_ + u) * comps_ + v] =
                    (odd_parity((u ^ v) & v) != odd_parity(v & modes_[mi].subset)) ? -inv_n : inv_n;
    coords_.resize(n_ * dims_.size());
    for (std::size_t k = 0; k < n_; ++k)
        for (std::size_t j = 0; j < dims_.size(); ++j)
            coords_[k * dims_.size() + j] = static_cast<std::uint32_t>((k / strides_[j]) % dims_[j]);

    // Expanded per-frequency mode matrices turn block assembly into
    // contiguous adds; skipped when they would not fit the memory budget.
    const std::size_t mm = comps_ * comps_;
    if (modes_.size() * n_ * mm <= kExpandedBudget) {
        for (std::size_t mi = 0; mi < modes_.size(); ++mi) {
            Mode& mode = modes_[mi];
            mode.blocks.resize(n_ * mm);
            const double* sg = mode_sign_.data() + mi * mm;
            for (std::size_t f = 0; f < n_; ++f) {
                const double* h = mode.spectrum.data() + f * comps_;
                double* b = mode.blocks.data() + f * mm;
                for (std::uint32_t u = 0; u < comps_; ++u)
                    for (std::uint32_t v = 0; v < comps_; ++v) b[u * comps_ + v] = sg[u * comps_ + v] * h[u ^ v];
            }
        }
    }
}

RealMatrix GramEngine::block(std::size_t k, std::size_t l) const {
    RealMatrix g(comps_, comps_);
    block_into(k, l, g.data());
    return g;
}

void GramEngine::block_into(std::size_t k, std::size_t l, std::span<double> out) const {
    std::fill(out.begin(), out.end(), 0.0);
    const std::size_t rank = dims_.size();
    const std::uint32_t* kk = coords_.data() + k * rank;
    const std::uint32_t* ll = coords_.data() + l * rank;
    const std::size_t m = comps_;
    const std::size_t mm = m * m;
    double* o = out.data();
    for (std::size_t mi = 0; mi < modes_.size(); ++mi) {
        const Mode& mode = modes_[mi];
        std::size_t f = 0;
        for (std::size_t j = 0; j < rank; ++j) {
            const std::size_t T = dims_[j];
            const std::size_t lj = (mode.subset >> j & 1u) ? T - ll[j] : ll[j];
            f += ((lj + T - kk[j]) % T) * strides_[j];
        }
        if (!mode.blocks.empty()) {
            const double* b = mode.blocks.data() + f * mm;
            for (std::size_t e = 0; e < mm; ++e) o[e] += b[e];
            continue;
        }
        const double* h = mode.spectrum.data() + f * m;
        const double* sg = mode_sign_.data() + mi * mm;
        for (std::uint32_t u = 0; u < m; ++u)
            for (std::uint32_t v = 0; v < m; ++v) o[u * m + v] += sg[u * m + v] * h[u ^ v];
    }
}

Normalization normalize_blocks(std::span<const RealMatrix> diagonal_blocks, double tol) {
    Normalization out;
    out.scale.resize(diagonal_blocks.size());
    out.sigma_min.resize(diagonal_blocks.size());
    for (std::size_t i = 0; i < diagonal_blocks.size(); ++i) {
        const double smin = sigma_min_psd(diagonal_blocks[i]);
        out.sigma_min[i] = smin;
        if (smin <= tol) {
            out.scale[i] = kInf;
            if (!out.infinite) out.singular_group = i;
            out.infinite = true;
        } else {
            out.scale[i] = 1.0 / std::sqrt(smin);
        }
    }
    return out;
}

Normalization normalization(const GramEngine& engine, double tol) {
    std::vector<RealMatrix> diag;
    diag.reserve(engine.group_count());
    for (std::size_t i = 0; i < engine.group_count(); ++i) diag.push_back(engine.block(i, i));
    return normalize_blocks(diag, tol);
}

LemmaAnalysis analyze(const SamplingSchedule& s) {
    LemmaAnalysis a{s.dims(), {}, {}};
    for (std::size_t j = 0; j < s.dims().size(); ++j) {
        a.uniform.push_back(uniform_dimension_check(s, j));
        a.quadrature.push_back(quadrature_check(s, j));
    }
    return a;
}

ZeroPrediction lemma_zero_pattern(const LemmaAnalysis& a, std::span<const std::size_t> k,
                                  std::span<const std::size_t> l) {
    if (k.size() != a.dims.size() || l.size() != a.dims.size())
        throw DimensionError("lemma_zero_pattern: index rank mismatch");
    for (std::size_t u = 0; u < a.dims.size(); ++u) {
        if (!a.uniform[u]) continue;
        const std::size_t T = a.dims[u];
        const std::size_t mirror = (T - l[u] % T) % T;
        if (a.quadrature[u]) {
            if (k[u] != l[u]) return ZeroPrediction::Zero;
        } else if (k[u] != l[u] && k[u] != mirror) {
            return ZeroPrediction::Zero;
        }
    }
    return ZeroPrediction::Unconstrained;
}

ZeroPrediction lemma_zero_pattern(const SamplingSchedule& s, std::span<const std::size_t> k,
                                  std::span<const std::size_t> l) {
    return lemma_zero_pattern(analyze(s), k, l);
}

ReducedSchedule reduce(const SamplingSchedule& s) {
    const Dims& dims = s.dims();
    std::vector<bool> collapsed(dims.size(), false);
    Dims rdims = dims;
    for (std::size_t j = 0; j < dims.size(); ++j) {
        if (dims[j] > 1 && uniform_dimension_check(s, j) && quadrature_check(s, j)) {
            collapsed[j] = true;
            rdims[j] = 1;
        }
    }
    SamplingSchedule r(rdims, s.descriptor(), s.seed());
    for (std::size_t p = 0; p < r.pixel_count(); ++p) r.set_mask(p, s.mask(flatten(dims, unflatten(rdims, p))));
    return {std::move(r), std::move(collapsed)};
}

namespace {

struct ScanResult {
    double mu_h = 0.0;
    std::optional<std::pair<std::size_t, std::size_t>> argmax;
    double traditional = 0.0;
    bool traditional_infinite = false;
    std::size_t blocks = 0;
};

// Pair scan over unordered pairs, visiting one representative of each
// {(k,l), (-k,-l)} class: the negated pair has the same normalized
// singular values since G^{-k,-l} = Z G^{k,l} Z with Z the full sign flip.
// Along `mirror_dims` (uniformly sampled, no quadrature) only partners with
// l_u = +-k_u are visited; every other block vanishes.
ScanResult scan(const GramEngine& engine, const Normalization& norm, bool want_h, bool want_trad, double tol,
                const std::vector<bool>& mirror_dims) {
    ScanResult res;
    const std::size_t n = engine.group_count();
    const std::size_t m = component_count(engine.dimension());
    const Dims& dims = engine.dims();
    std::vector<double> g(m * m);
    std::vector<double> colnorm;
    if (want_trad) {
        colnorm.resize(n * m);
        for (std::size_t i = 0; i < n; ++i) {
            engine.block_into(i, i, g);
            for (std::size_t u = 0; u < m; ++u) {
                colnorm[i * m + u] = std::sqrt(std::max(0.0, g[u * m + u]));
                if (g[u * m + u] <= tol) res.traditional_infinite = true;
            }
            for (std::size_t u = 0; u < m; ++u)
                for (std::size_t v = u + 1; v < m; ++v)
                    res.traditional =
                        std::max(res.traditional, std::abs(g[u * m + v]) / (colnorm[i * m + u] * colnorm[i * m + v]));
        }
        if (res.traditional_infinite) want_trad = false;
    }
    auto visit = [&](std::size_t k, std::size_t nk, std::size_t l) {
        const std::size_t nl = engine.negate(l);
        const std::size_t a = std::min(nk, nl), b = std::max(nk, nl);
        if (a < k || (a == k && b < l)) return;
        engine.block_into(k, l, g);
        ++res.blocks;
        if (want_trad) {
            for (std::size_t u = 0; u < m; ++u)
                for (std::size_t v = 0; v < m; ++v)
                    res.traditional =
                        std::max(res.traditional, std::abs(g[u * m + v]) / (colnorm[k * m + u] * colnorm[l * m + v]));
        }
        if (!want_h) return;
        const auto smax = sigma_above(g, m, norm.scale[k] * norm.scale[l], res.mu_h);
        if (smax && *smax > res.mu_h) {
            res.mu_h = *smax;
            res.argmax = std::pair{k, l};
        }
    };
    const bool restricted = std::ranges::any_of(mirror_dims, [](bool b) { return b; });
    std::vector<std::size_t> cand, next;
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t nk = engine.negate(k);
        if (!restricted) {
            for (std::size_t l = k + 1; l < n; ++l) visit(k, nk, l);
            continue;
        }
        const Index kt = unflatten(dims, k);
        cand.assign(1, 0);
        for (std::size_t j = 0; j < dims.size(); ++j) {
            next.clear();
            for (std::size_t c : cand) {
                if (mirror_dims[j]) {
                    const std::size_t a = kt[j], b = (dims[j] - kt[j]) % dims[j];
                    next.push_back(c * dims[j] + a);
                    if (b != a) next.push_back(c * dims[j] + b);
                } else {
                    for (std::size_t t = 0; t < dims[j]; ++t) next.push_back(c * dims[j] + t);
                }
            }
            std::swap(cand, next);
        }
        std::ranges::sort(cand);
        for (std::size_t l : cand)
            if (l > k) visit(k, nk, l);
    }
    return res;
}

std::vector<bool> mirror_dimensions(const SamplingSchedule& s) {
    const LemmaAnalysis a = analyze(s);
    std::vector<bool> out(a.dims.size());
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = a.dims[j] > 1 && a.uniform[j] && !a.quadrature[j];
    return out;
}

std::size_t embed(const Dims& from, const Dims& to, std::size_t flat) { return flatten(to, unflatten(from, flat)); }

}  // namespace

CoherenceReport mu_hypercomplex(const SamplingSchedule& s, const CoherenceOptions& opt) {
    CoherenceReport rep;
    rep.descriptor = s.descriptor();
    rep.seed = s.seed();
    const Dims& dims = s.dims();
    std::optional<ReducedSchedule> red;
    if (opt.reduce) red = reduce(s);
    const SamplingSchedule& work = red ? red->schedule : s;
    rep.evaluated_dims = work.dims();

    const GramEngine engine(work);
    const Normalization norm = normalization(engine, opt.singular_tol);
    rep.normalization.resize(s.pixel_count());
    for (std::size_t p = 0; p < s.pixel_count(); ++p) {
        Index t = unflatten(dims, p);
        for (std::size_t j = 0; j < t.size(); ++j)
            if (red && red->collapsed[j]) t[j] = 0;
        rep.normalization[p] = norm.scale[flatten(work.dims(), t)];
    }
    if (norm.infinite) {
        rep.infinite = true;
        rep.mu_h = kInf;
        rep.singular_group = embed(work.dims(), dims, *norm.singular_group);
    }
    const ScanResult res =
        scan(engine, norm, !norm.infinite, opt.traditional, opt.singular_tol, mirror_dimensions(work));
    rep.blocks_evaluated = res.blocks;
    if (!norm.infinite) {
        rep.mu_h = res.mu_h;
        if (res.argmax)
            rep.argmax = std::pair{embed(work.dims(), dims, res.argmax->first),
                                   embed(work.dims(), dims, res.argmax->second)};
    }
    if (opt.traditional) {
        rep.traditional_infinite = res.traditional_infinite;
        rep.traditional_mu = res.traditional_infinite ? kInf : res.traditional;
    }
    return rep;
}

CoherenceReport mu_hypercomplex(const AcquisitionOperator& op, const CoherenceOptions& opt) {
    return mu_hypercomplex(op.schedule(), opt);
}

std::optional<double> mu_traditional(const SamplingSchedule& s, double tol) {
    const ReducedSchedule red = reduce(s);
    const GramEngine engine(red.schedule);
    const ScanResult res = scan(engine, Normalization{}, false, true, tol, mirror_dimensions(red.schedule));
    if (res.traditional_infinite) return std::nullopt;
    return res.traditional;
}

std::optional<double> mu_traditional(const AcquisitionOperator& op, double tol) {
    return mu_traditional(op.schedule(), tol);
}

double mu_hypercomplex_dense(const RealMatrix& gm, int d, double tol) {
    const std::size_t m = component_count(d);
    if (gm.rows() != gm.cols() || gm.rows() % m != 0) throw DimensionError("dense Gram matrix has the wrong shape");
    const std::size_t n = gm.rows() / m;
    auto sub = [&](std::size_t i, std::size_t j) {
        RealMatrix b(m, m);
        for (std::size_t u = 0; u < m; ++u)
            for (std::size_t v = 0; v < m; ++v) b(u, v) = gm(i * m + u, j * m + v);
        return b;
    };
    std::vector<RealMatrix> diag;
    for (std::size_t i = 0; i < n; ++i) diag.push_back(sub(i, i));
    const Normalization norm = normalize_blocks(diag, tol);
    if (norm.infinite) return kInf;
    double mu = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j) mu = std::max(mu, sigma_max(sub(i, j)) * norm.scale[i] * norm.scale[j]);
    return mu;
}

double mu_traditional_dense(const RealMatrix& gm, double tol) {
    const std::size_t n = gm.rows();
    double mu = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (gm(i, i) <= tol) return kInf;
        for (std::size_t j = 0; j < n; ++j)
            if (i != j) mu = std::max(mu, std::abs(gm(i, j)) / std::sqrt(gm(i, i) * gm(j, j)));
    }
    return mu;
}

HpsfResult hpsf(const SamplingSchedule& s, std::span<const std::size_t> spike, bool use_reduction) {
    const Dims& dims = s.dims();
    if (spike.size() != dims.size()) throw DimensionError("hpsf: spike rank mismatch");
    for (std::size_t j = 0; j < dims.size(); ++j)
        if (spike[j] >= dims[j]) throw std::out_of_range("hpsf: spike outside the grid");
    HpsfResult out{dims, Index(spike.begin(), spike.end()), std::vector<double>(s.pixel_count(), 0.0), 0.0, false};

    std::optional<ReducedSchedule> red;
    if (use_reduction) red = reduce(s);
    const SamplingSchedule& work = red ? red->schedule : s;
    const Dims& rdims = work.dims();
    const GramEngine engine(work);
    const Normalization norm = normalization(engine);
    out.infinite = norm.infinite;

    Index rspike(spike.begin(), spike.end());
    for (std::size_t j = 0; j < dims.size(); ++j)
        if (red && red->collapsed[j]) rspike[j] = 0;
    const std::size_t ks = flatten(rdims, rspike);
    const std::size_t m = component_count(engine.dimension());
    std::vector<double> g(m * m);
    RealMatrix gm(m, m);
    auto value = [&](std::size_t l) {
        const double sc = norm.scale[ks] * norm.scale[l];
        if (!std::isfinite(sc)) return kInf;
        engine.block_into(ks, l, g);
        std::ranges::copy(g, gm.data().begin());
        return sigma_max(gm) * sc;
    };
    out.spike_value = value(ks);
    for (std::size_t l = 0; l < engine.group_count(); ++l) {
        if (l == ks) continue;
        Index t = unflatten(rdims, l);
        for (std::size_t j = 0; j < dims.size(); ++j)
            if (red && red->collapsed[j]) t[j] = spike[j];
        out.values[flatten(dims, t)] = value(l);
    }
    return out;
}

HpsfResult hpsf(const AcquisitionOperator& op, std::span<const std::size_t> spike, bool use_reduction) {
    return hpsf(op.schedule(), spike, use_reduction);
}

}  // namespace hcs
