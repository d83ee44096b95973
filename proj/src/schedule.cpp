#include "hcs/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "hcs/rng.hpp"
#include "json.hpp"

namespace hcs {

namespace {

using Json = nlohmann::ordered_json;

template <typename E, std::size_t M>
E parse_enum(std::string_view s, const std::array<std::pair<E, std::string_view>, M>& table, const char* what) {
    for (const auto& [e, name] : table)
        if (name == s) return e;
    throw ScheduleError(std::string("unknown ") + what + " '" + std::string(s) + "'");
}

constexpr std::array<std::pair<ScheduleClass, std::string_view>, 6> kClassNames{{
    {ScheduleClass::Uniform, "uniform"},
    {ScheduleClass::Nus, "nus"},
    {ScheduleClass::Pcs, "pcs"},
    {ScheduleClass::Rpd, "rpd"},
    {ScheduleClass::PcsEqualCoverage, "pcs-equal"},
    {ScheduleClass::Custom, "custom"},
}};
constexpr std::array<std::pair<Approach, std::string_view>, 3> kApproachNames{{
    {Approach::A1, "A1"},
    {Approach::A2, "A2"},
    {Approach::A3, "A3"},
}};
constexpr std::array<std::pair<Bias, std::string_view>, 3> kBiasNames{{
    {Bias::Random, "random"},
    {Bias::ExpRandom, "exp-random"},
    {Bias::ExpDeterministic, "exp-det"},
}};

void check_fraction(double v, const char* name) {
    if (!(v > 0.0 && v <= 1.0)) throw ScheduleError(std::string(name) + " must lie in (0, 1]");
}

// Indirect coordinates of an indel, i.e. the pixel index with t_d dropped.
Dims indel_dims(const Dims& dims) {
    Dims out(dims.begin(), dims.end() - 1);
    if (out.empty()) out.push_back(1);
    return out;
}

std::vector<double> exponential_weights(const Dims& dims, double decay) {
    const Dims idims = indel_dims(dims);
    const std::size_t count = element_count(idims);
    std::vector<double> w(count);
    const bool no_indirect = dims.size() == 1;
    for (std::size_t i = 0; i < count; ++i) {
        double s = 0.0;
        if (!no_indirect) {
            const Index t = unflatten(idims, i);
            for (std::size_t j = 0; j < t.size(); ++j) s += static_cast<double>(t[j]) / static_cast<double>(idims[j]);
        }
        w[i] = std::exp(-decay * s);
    }
    return w;
}

// Inclusion probabilities min(1, c w_i) summing to `expected`.
std::vector<double> water_fill(const std::vector<double>& w, double expected) {
    std::vector<std::size_t> order(w.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::ranges::stable_sort(order, [&](std::size_t a, std::size_t b) { return w[a] > w[b]; });
    std::vector<double> suffix(w.size() + 1, 0.0);
    for (std::size_t i = w.size(); i-- > 0;) suffix[i] = suffix[i + 1] + w[order[i]];
    std::vector<double> p(w.size(), 1.0);
    if (expected >= static_cast<double>(w.size())) return p;
    for (std::size_t h = 0; h < w.size(); ++h) {
        const double c = (expected - static_cast<double>(h)) / suffix[h];
        if (c * w[order[h]] <= 1.0) {
            for (std::size_t i = h; i < w.size(); ++i) p[order[i]] = std::min(1.0, c * w[order[i]]);
            return p;
        }
    }
    return p;
}

std::vector<std::size_t> top_weights(const std::vector<double>& w, std::size_t k) {
    std::vector<std::size_t> order(w.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::ranges::stable_sort(order, [&](std::size_t a, std::size_t b) { return w[a] > w[b]; });
    order.resize(k);
    std::ranges::sort(order);
    return order;
}

std::vector<std::size_t> select_indels(const Dims& dims, double delta, Bias bias, double decay, Rng& rng) {
    check_fraction(delta, "indel fraction");
    const std::size_t count = element_count(indel_dims(dims));
    if (bias == Bias::Random) return rng.sample(count, round_count(delta * static_cast<double>(count)));
    if (!(decay > 0.0)) throw ScheduleError("decay must be positive");
    const auto w = exponential_weights(dims, decay);
    if (bias == Bias::ExpDeterministic) return top_weights(w, round_count(delta * static_cast<double>(count)));
    const auto p = water_fill(w, delta * static_cast<double>(count));
    std::vector<std::size_t> chosen;
    for (std::size_t i = 0; i < count; ++i)
        if (rng.uniform() < p[i]) chosen.push_back(i);
    return chosen;
}

}  // namespace

std::string_view to_string(ScheduleClass c) {
    for (const auto& [e, n] : kClassNames)
        if (e == c) return n;
    return "?";
}
std::string_view to_string(Approach a) { return kApproachNames[static_cast<std::size_t>(a)].second; }
std::string_view to_string(Bias b) { return kBiasNames[static_cast<std::size_t>(b)].second; }
ScheduleClass parse_schedule_class(std::string_view s) { return parse_enum(s, kClassNames, "schedule class"); }
Approach parse_approach(std::string_view s) { return parse_enum(s, kApproachNames, "approach"); }
Bias parse_bias(std::string_view s) { return parse_enum(s, kBiasNames, "bias"); }

std::string ScheduleDescriptor::label() const {
    std::ostringstream os;
    os << to_string(schedule_class);
    switch (schedule_class) {
        case ScheduleClass::Uniform:
        case ScheduleClass::Custom:
            break;
        case ScheduleClass::Nus:
            os << ";di=" << delta_i << ";bias=" << to_string(bias);
            if (bias != Bias::Random) os << ";decay=" << decay;
            break;
        case ScheduleClass::Pcs:
            os << ";di=" << delta_i << ";dc=" << delta_c << ";" << scheme << ";" << to_string(approach);
            break;
        case ScheduleClass::Rpd:
            os << ";" << scheme << ";" << to_string(approach);
            break;
        case ScheduleClass::PcsEqualCoverage:
            os << ";delta=" << delta_c << ";bias=" << to_string(bias);
            if (bias != Bias::Random) os << ";decay=" << decay;
            break;
    }
    return os.str();
}

ComponentScheme ComponentScheme::named(std::string_view name, int d) {
    check_dimension(d);
    ComponentScheme s{std::string(name), {}};
    if (d == 3) {
        using P = std::array<std::uint32_t, 2>;
        if (name == "S1") s.reads = {P{0, 1}, P{2, 3}, P{4, 5}, P{6, 7}};
        else if (name == "S2") s.reads = {P{0, 2}, P{1, 3}, P{4, 7}, P{5, 6}};
        else if (name == "S3") s.reads = {P{0, 3}, P{1, 5}, P{2, 6}, P{4, 7}};
        else if (name == "S4") s.reads = {P{0, 4}, P{1, 5}, P{2, 6}, P{3, 7}};
        else throw ScheduleError("unknown scheme '" + std::string(name) + "'");
        return s;
    }
    if (name != "S4") throw ScheduleError("only scheme S4 is defined for d != 3");
    const std::uint32_t half = static_cast<std::uint32_t>(component_count(d) / 2);
    for (std::uint32_t r = 0; r < half; ++r) s.reads.push_back({r, r + half});
    return s;
}

ComponentMask ComponentScheme::read_mask(std::size_t read) const {
    ComponentMask m;
    m.set(reads.at(read)[0]);
    m.set(reads.at(read)[1]);
    return m;
}

SamplingSchedule::SamplingSchedule(Dims dims, ScheduleDescriptor descriptor, std::uint64_t seed)
    : dims_(std::move(dims)), descriptor_(std::move(descriptor)), seed_(seed) {
    check_dims(dims_);
    check_dimension(static_cast<int>(dims_.size()));
    masks_.assign(element_count(dims_), ComponentMask{});
}

void SamplingSchedule::set_mask(std::size_t pixel, const ComponentMask& m) {
    if ((m & ~full_mask()).any()) throw ScheduleError("component index exceeds 2^d - 1");
    masks_.at(pixel) = m;
}

void SamplingSchedule::set_indel_mask(std::size_t indel, const ComponentMask& m) {
    const std::size_t td = dims_.back();
    for (std::size_t t = 0; t < td; ++t) set_mask(indel * td + t, m);
}

ComponentMask SamplingSchedule::full_mask() const {
    ComponentMask m;
    for (std::size_t g = 0; g < components(); ++g) m.set(g);
    return m;
}

std::size_t SamplingSchedule::sampled_count() const {
    std::size_t n = 0;
    for (const auto& m : masks_) n += m.count();
    return n;
}

double SamplingSchedule::undersampling_ratio() const {
    return static_cast<double>(sampled_count()) / static_cast<double>(masks_.size() * components());
}

bool SamplingSchedule::full_component() const {
    const ComponentMask full = full_mask();
    return std::ranges::all_of(masks_, [&](const ComponentMask& m) { return m.none() || m == full; });
}

void SamplingSchedule::validate() const {
    const ComponentMask full = full_mask();
    for (std::size_t p = 0; p < masks_.size(); ++p)
        if ((masks_[p] & ~full).any())
            throw ScheduleError("pixel " + std::to_string(p) + " names a component index >= 2^d");
}

SamplingSchedule uniform(const Dims& dims) {
    SamplingSchedule s(dims, ScheduleDescriptor{}, 0);
    const ComponentMask full = s.full_mask();
    for (std::size_t p = 0; p < s.pixel_count(); ++p) s.set_mask(p, full);
    return s;
}

namespace {

SamplingSchedule nus_impl(const Dims& dims, double delta_i, Bias bias, double decay, std::uint64_t seed) {
    ScheduleDescriptor desc;
    desc.schedule_class = ScheduleClass::Nus;
    desc.delta_i = delta_i;
    desc.bias = bias;
    desc.decay = decay;
    SamplingSchedule s(dims, desc, seed);
    Rng rng(seed);
    const ComponentMask full = s.full_mask();
    for (std::size_t indel : select_indels(dims, delta_i, bias, decay, rng)) s.set_indel_mask(indel, full);
    return s;
}

}  // namespace

SamplingSchedule nus_random(const Dims& dims, double delta_i, std::uint64_t seed) {
    return nus_impl(dims, delta_i, Bias::Random, kDefaultDecay, seed);
}

SamplingSchedule nus_exponential(const Dims& dims, double delta_i, double decay, bool deterministic,
                                 std::uint64_t seed) {
    if (!(decay > 0.0)) throw ScheduleError("decay must be positive");
    return nus_impl(dims, delta_i, deterministic ? Bias::ExpDeterministic : Bias::ExpRandom, decay, seed);
}

std::vector<std::vector<std::size_t>> combinations(std::size_t r, std::size_t m) {
    std::vector<std::vector<std::size_t>> out;
    if (m > r) return out;
    std::vector<std::size_t> cur(m);
    std::iota(cur.begin(), cur.end(), std::size_t{0});
    while (true) {
        out.push_back(cur);
        std::size_t i = m;
        while (i > 0 && cur[i - 1] == r - m + i - 1) --i;
        if (i == 0) break;
        ++cur[i - 1];
        for (std::size_t j = i; j < m; ++j) cur[j] = cur[j - 1] + 1;
    }
    return out;
}

SamplingSchedule pcs(const Dims& dims, double delta_i, double delta_c, std::string_view scheme, Approach approach,
                     std::uint64_t seed) {
    const int d = static_cast<int>(dims.size());
    check_dimension(d);
    check_fraction(delta_c, "component fraction");
    if (approach != Approach::A1 && d < 2) throw ScheduleError("approaches A2 and A3 need at least two dimensions");
    const ComponentScheme sch = ComponentScheme::named(scheme, d);
    const std::size_t reads = sch.reads.size();
    const double m_real = delta_c * static_cast<double>(reads);
    const auto m = static_cast<std::size_t>(std::llround(m_real));
    if (m == 0 || std::abs(m_real - static_cast<double>(m)) > 1e-9)
        throw ScheduleError("component fraction must be a multiple of 1/" + std::to_string(reads));

    std::vector<ComponentMask> choice;
    for (const auto& combo : combinations(reads, m)) {
        ComponentMask mk;
        for (std::size_t r : combo) mk |= sch.read_mask(r);
        choice.push_back(mk);
    }

    ScheduleDescriptor desc;
    desc.schedule_class = ScheduleClass::Pcs;
    desc.delta_i = delta_i;
    desc.delta_c = delta_c;
    desc.scheme = std::string(scheme);
    desc.approach = approach;
    SamplingSchedule s(dims, desc, seed);
    Rng rng(seed);
    auto draw = [&]() -> const ComponentMask& {
        return choice.size() == 1 ? choice[0] : choice[static_cast<std::size_t>(rng.below(choice.size()))];
    };

    const auto indels = select_indels(dims, delta_i, Bias::Random, kDefaultDecay, rng);
    const std::size_t td = dims.back();
    switch (approach) {
        case Approach::A1:
            for (std::size_t indel : indels)
                for (std::size_t t = 0; t < td; ++t) s.set_mask(indel * td + t, draw());
            break;
        case Approach::A2:
            for (std::size_t indel : indels) s.set_indel_mask(indel, draw());
            break;
        case Approach::A3: {
            std::vector<ComponentMask> plane(dims.front());
            for (auto& pm : plane) pm = draw();
            for (std::size_t indel : indels) s.set_indel_mask(indel, plane[s.plane_of(indel * td)]);
            break;
        }
    }
    return s;
}

SamplingSchedule rpd(const Dims& dims, std::string_view scheme, Approach approach, std::uint64_t seed) {
    const int d = static_cast<int>(dims.size());
    if (d < 2) throw ScheduleError("random phase detection needs at least two dimensions");
    const double delta_c = 1.0 / static_cast<double>(component_count(d) / 2);
    SamplingSchedule s = pcs(dims, 1.0, delta_c, scheme, approach, seed);
    ScheduleDescriptor desc = s.descriptor();
    desc.schedule_class = ScheduleClass::Rpd;
    s.set_descriptor(desc);
    return s;
}

SamplingSchedule pcs_equal_coverage(const Dims& dims, double delta, Bias bias, std::uint64_t seed, double decay) {
    const int d = static_cast<int>(dims.size());
    const ComponentScheme sch = ComponentScheme::named("S4", d);
    ScheduleDescriptor desc;
    desc.schedule_class = ScheduleClass::PcsEqualCoverage;
    desc.delta_c = delta;
    desc.bias = bias;
    desc.decay = decay;
    SamplingSchedule s(dims, desc, seed);
    Rng rng(seed);
    const std::size_t td = dims.back();
    for (std::size_t r = 0; r < sch.reads.size(); ++r) {
        const ComponentMask rm = sch.read_mask(r);
        for (std::size_t indel : select_indels(dims, delta, bias, decay, rng))
            for (std::size_t t = 0; t < td; ++t) s.set_mask(indel * td + t, s.mask(indel * td + t) | rm);
    }
    return s;
}

SamplingSchedule generate(const Dims& dims, const ScheduleDescriptor& desc, std::uint64_t seed) {
    switch (desc.schedule_class) {
        case ScheduleClass::Uniform:
            return uniform(dims);
        case ScheduleClass::Nus:
            if (desc.bias == Bias::Random) return nus_random(dims, desc.delta_i, seed);
            return nus_exponential(dims, desc.delta_i, desc.decay, desc.bias == Bias::ExpDeterministic, seed);
        case ScheduleClass::Pcs:
            return pcs(dims, desc.delta_i, desc.delta_c, desc.scheme, desc.approach, seed);
        case ScheduleClass::Rpd:
            return rpd(dims, desc.scheme, desc.approach, seed);
        case ScheduleClass::PcsEqualCoverage:
            return pcs_equal_coverage(dims, desc.delta_c, desc.bias, seed, desc.decay);
        case ScheduleClass::Custom:
            break;
    }
    throw ScheduleError("custom schedules cannot be generated from a descriptor");
}

bool quadrature_check(const SamplingSchedule& s, std::size_t dim) {
    if (dim >= s.dims().size()) throw DimensionError("quadrature_check: dimension out of range");
    const std::size_t bit = std::size_t{1} << dim;
    for (std::size_t p = 0; p < s.pixel_count(); ++p) {
        const ComponentMask& m = s.mask(p);
        for (std::size_t g = 0; g < s.components(); ++g)
            if (m.test(g) && !m.test(g ^ bit)) return false;
    }
    return true;
}

bool uniform_dimension_check(const SamplingSchedule& s, std::size_t dim) {
    const Dims& dims = s.dims();
    if (dim >= dims.size()) throw DimensionError("uniform_dimension_check: dimension out of range");
    std::size_t stride = 1;
    for (std::size_t j = dim + 1; j < dims.size(); ++j) stride *= dims[j];
    for (std::size_t p = 0; p < s.pixel_count(); ++p) {
        const std::size_t t = (p / stride) % dims[dim];
        if (t != 0 && s.mask(p) != s.mask(p - t * stride)) return false;
    }
    return true;
}

std::string to_json(const SamplingSchedule& s, int indent) {
    const auto& desc = s.descriptor();
    Json j;
    j["dims"] = s.dims();
    j["d"] = s.dimension();
    j["descriptor"] = {{"class", to_string(desc.schedule_class)},
                       {"delta_i", desc.delta_i},
                       {"delta_c", desc.delta_c},
                       {"scheme", desc.scheme},
                       {"approach", to_string(desc.approach)},
                       {"bias", to_string(desc.bias)},
                       {"decay", desc.decay}};
    j["seed"] = s.seed();
    Json entries = Json::array();
    for (std::size_t p = 0; p < s.pixel_count(); ++p) {
        const ComponentMask& m = s.mask(p);
        if (m.none()) continue;
        std::vector<std::size_t> comps;
        for (std::size_t g = 0; g < s.components(); ++g)
            if (m.test(g)) comps.push_back(g);
        entries.push_back({{"t", unflatten(s.dims(), p)}, {"components", comps}});
    }
    j["entries"] = std::move(entries);
    return j.dump(indent);
}

SamplingSchedule schedule_from_json(std::string_view text) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ScheduleError(std::string("schedule JSON: ") + e.what());
    }
    try {
        const Dims dims = j.at("dims").get<Dims>();
        if (j.contains("d") && j.at("d").get<std::size_t>() != dims.size())
            throw ScheduleError("schedule JSON: d does not match dims");
        ScheduleDescriptor desc;
        desc.schedule_class = ScheduleClass::Custom;
        if (j.contains("descriptor")) {
            const Json& dj = j.at("descriptor");
            desc.schedule_class = parse_schedule_class(dj.value("class", std::string("custom")));
            desc.delta_i = dj.value("delta_i", 1.0);
            desc.delta_c = dj.value("delta_c", 1.0);
            desc.scheme = dj.value("scheme", std::string("S4"));
            desc.approach = parse_approach(dj.value("approach", std::string("A2")));
            desc.bias = parse_bias(dj.value("bias", std::string("random")));
            desc.decay = dj.value("decay", kDefaultDecay);
        }
        SamplingSchedule s(dims, desc, j.value("seed", std::uint64_t{0}));
        for (const Json& e : j.at("entries")) {
            const Index t = e.at("t").get<Index>();
            if (t.size() != dims.size()) throw ScheduleError("schedule JSON: entry rank mismatch");
            for (std::size_t k = 0; k < t.size(); ++k)
                if (t[k] >= dims[k]) throw ScheduleError("schedule JSON: entry index out of range");
            ComponentMask m;
            for (std::size_t g : e.at("components").get<std::vector<std::size_t>>()) {
                if (g >= s.components()) throw ScheduleError("schedule JSON: component index >= 2^d");
                m.set(g);
            }
            s.set_mask(flatten(dims, t), m);
        }
        return s;
    } catch (const nlohmann::json::exception& e) {
        throw ScheduleError(std::string("schedule JSON: ") + e.what());
    }
}

}  // namespace hcs
