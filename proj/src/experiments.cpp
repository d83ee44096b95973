#include "hcs/experiments.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <thread>

#include "hcs/rng.hpp"
#include "hcs/stats.hpp"
#include "json.hpp"

namespace hcs {

namespace {

using Json = nlohmann::ordered_json;
using Cell = Table::Cell;

constexpr std::string_view kKinds[] = {"coverage-sweep", "method-compare", "scheme-compare", "scaling-fit",
                                       "hpsf",           "recover",        "qq"};

const std::set<std::string> kSweepSeries{"nus",        "nus-exp-random",   "nus-exp-det",          "pcs-half",
                                         "pcs-quarter", "pcs-equal-random", "pcs-equal-exp-random", "pcs-equal-exp-det"};
const std::set<std::string> kScaleSeries{"rpd-A1", "rpd-A2", "rpd-A3", "pcs-equal-random"};
const std::set<std::string> kMethods{"NUS", "PCS", "FCPCS"};

[[noreturn]] void fail(const std::string& path, const std::string& what) { throw ConfigError(path + ": " + what); }

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Typed readers for config values. Every failure names the JSON path.

double get_real(const Json& j, const std::string& path) {
    if (!j.is_number()) fail(path, "expected a number");
    return j.get<double>();
}

std::uint64_t get_uint(const Json& j, const std::string& path) {
    if (j.is_number_unsigned()) return j.get<std::uint64_t>();
    if (j.is_number_integer()) {
        if (j.get<long long>() < 0) fail(path, "expected a non-negative integer");
        return j.get<std::uint64_t>();
    }
    fail(path, "expected a non-negative integer");
}

std::size_t get_size(const Json& j, const std::string& path) { return static_cast<std::size_t>(get_uint(j, path)); }

bool get_bool(const Json& j, const std::string& path) {
    if (!j.is_boolean()) fail(path, "expected true or false");
    return j.get<bool>();
}

std::string get_string(const Json& j, const std::string& path) {
    if (!j.is_string()) fail(path, "expected a string");
    return j.get<std::string>();
}

template <class T, class F>
std::vector<T> get_list(const Json& j, const std::string& path, F item) {
    if (!j.is_array()) fail(path, "expected an array");
    std::vector<T> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(item(j[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

std::vector<std::size_t> get_sizes(const Json& j, const std::string& path) {
    return get_list<std::size_t>(j, path, get_size);
}

std::vector<double> get_reals(const Json& j, const std::string& path) { return get_list<double>(j, path, get_real); }

std::vector<std::string> get_strings(const Json& j, const std::string& path) {
    return get_list<std::string>(j, path, get_string);
}

template <class F>
auto parse_enum(const Json& j, const std::string& path, F parser) {
    const std::string s = get_string(j, path);
    try {
        return parser(s);
    } catch (const std::invalid_argument& e) {
        fail(path, e.what());
    }
}

ScheduleDescriptor parse_descriptor(const Json& j, const std::string& path, ScheduleDescriptor d) {
    if (!j.is_object()) fail(path, "expected an object");
    for (const auto& [key, v] : j.items()) {
        const std::string p = path + "." + key;
        if (key == "class")
            d.schedule_class = parse_enum(v, p, parse_schedule_class);
        else if (key == "delta_i")
            d.delta_i = get_real(v, p);
        else if (key == "delta_c")
            d.delta_c = get_real(v, p);
        else if (key == "scheme")
            d.scheme = get_string(v, p);
        else if (key == "approach")
            d.approach = parse_enum(v, p, parse_approach);
        else if (key == "bias")
            d.bias = parse_enum(v, p, parse_bias);
        else if (key == "decay")
            d.decay = get_real(v, p);
        else
            fail(p, "unknown key");
    }
    return d;
}

Json descriptor_json(const ScheduleDescriptor& d) {
    return {{"class", to_string(d.schedule_class)}, {"delta_i", d.delta_i},      {"delta_c", d.delta_c},
            {"scheme", d.scheme},                   {"approach", to_string(d.approach)}, {"bias", to_string(d.bias)},
            {"decay", d.decay}};
}

// Runs fn(t) for every t; the first failing trial (by index) is rethrown.
template <class F>
void parallel_for(std::size_t count, std::size_t threads, F&& fn) {
    threads = std::max<std::size_t>(1, std::min(threads, count));
    if (threads == 1) {
        for (std::size_t t = 0; t < count; ++t) fn(t);
        return;
    }
    std::vector<std::exception_ptr> errors(count);
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < threads; ++w)
        pool.emplace_back([&, w] {
            for (std::size_t t = w; t < count; t += threads) {
                try {
                    fn(t);
                } catch (...) {
                    errors[t] = std::current_exception();
                }
            }
        });
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

struct Summary {
    double mean = std::numeric_limits<double>::quiet_NaN();
    double sd = std::numeric_limits<double>::quiet_NaN();
    double se = std::numeric_limits<double>::quiet_NaN();
    std::size_t count = 0;
    std::size_t infinite = 0;
};

// Summary of the finite draws. When every draw is infinite the mean is
// reported as inf.
Summary summarize_finite(const std::vector<double>& finite, std::size_t infinite) {
    Summary s;
    s.infinite = infinite;
    s.count = finite.size();
    if (finite.empty()) {
        if (infinite > 0) s.mean = std::numeric_limits<double>::infinity();
        return s;
    }
    const SampleSummary ss = summarize(finite);
    s.mean = ss.mean;
    s.sd = ss.sd;
    s.se = ss.se;
    return s;
}

Cell real_or_blank(std::optional<double> v) {
    if (!v) return std::string();
    return *v;
}

Cell count_cell(std::size_t v) { return static_cast<long long>(v); }

Cell seed_cell(const ExperimentConfig& c) {
    if (c.seeds.empty()) return static_cast<long long>(c.seed);
    std::string s;
    for (std::size_t i = 0; i < c.seeds.size(); ++i) s += (i ? " " : "") + std::to_string(c.seeds[i]);
    return s;
}

std::size_t indel_count_of(const Dims& indel) { return element_count(indel); }

bool is_kind(std::string_view s) { return std::find(std::begin(kKinds), std::end(kKinds), s) != std::end(kKinds); }

std::string upper(std::string s) {
    for (char& ch : s) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    return s;
}

void check_fraction(double v, const std::string& path) {
    if (!(v > 0.0 && v <= 1.0)) fail(path, "must lie in (0, 1]");
}

ScheduleDescriptor sweep_descriptor(const std::string& series, double delta, const ExperimentConfig& c) {
    ScheduleDescriptor d;
    d.decay = c.decay;
    if (series.rfind("nus", 0) == 0) {
        d.schedule_class = ScheduleClass::Nus;
        d.delta_i = delta;
        d.bias = series == "nus" ? Bias::Random : series == "nus-exp-random" ? Bias::ExpRandom : Bias::ExpDeterministic;
    } else if (series == "pcs-half" || series == "pcs-quarter") {
        d.schedule_class = ScheduleClass::Pcs;
        d.delta_i = delta;
        d.delta_c = series == "pcs-half" ? 0.5 : 0.25;
        d.scheme = c.scheme;
        d.approach = c.approach;
    } else {
        d.schedule_class = ScheduleClass::PcsEqualCoverage;
        d.delta_c = delta;
        d.bias = series == "pcs-equal-random" ? Bias::Random
                 : series == "pcs-equal-exp-random" ? Bias::ExpRandom
                                                    : Bias::ExpDeterministic;
    }
    return d;
}

SamplingSchedule load_or_generate(const ExperimentConfig& c) {
    if (!c.schedule_file.empty()) {
        try {
            return schedule_from_json(read_file(c.schedule_file));
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception& e) {
            throw ConfigError("$.schedule_file: " + std::string(e.what()));
        }
    }
    return generate(grid(c.dims, c.direct), c.schedule, c.seed);
}

}  // namespace

std::string_view version() { return HCS_VERSION; }

std::uint64_t ExperimentConfig::trial_seed(std::size_t trial) const {
    return seeds.empty() ? seed + trial : seeds.at(trial);
}

std::string canonical_experiment(std::string_view name) {
    if (name == "sweep") return "coverage-sweep";
    if (name == "compare") return "method-compare";
    if (name == "schemes") return "scheme-compare";
    if (name == "scale") return "scaling-fit";
    if (is_kind(name)) return std::string(name);
    throw ConfigError("$.experiment: unknown experiment '" + std::string(name) + "'");
}

ExperimentConfig default_config(std::string_view experiment) {
    ExperimentConfig c;
    c.experiment = canonical_experiment(experiment);
    const std::string& e = c.experiment;
    if (e == "coverage-sweep") {
        c.dims = {24, 24};
        c.n_monte = 10;
        c.deltas = {0.25, 0.5, 0.75, 1.0};
        c.series = {"nus", "pcs-half", "pcs-quarter"};
    } else if (e == "method-compare") {
        c.sizes = {16, 24, 32};
        c.n_monte = 30;
        c.delta = 0.25;
        c.methods = {"NUS", "PCS", "FCPCS"};
    } else if (e == "scheme-compare") {
        c.dims = {16, 16};
        c.direct = 4;
        c.n_monte = 30;
        c.schemes = {"S1", "S2", "S3", "S4"};
        c.delta_i = 1.0;
        c.delta_c = 0.5;
    } else if (e == "scaling-fit") {
        c.series = {"rpd-A1", "rpd-A2", "rpd-A3", "pcs-equal-random"};
        c.sizes = {8, 12, 16, 20, 24};
        // m = N for A3, so the exclusion rule removes all of the small sizes.
        c.series_sizes = {{"rpd-A3", {64, 80, 96, 112, 128}}};
        c.deltas = {0.25, 0.5};
        c.n_monte = 10;
        c.gammas.assign(kGammaGrid.begin(), kGammaGrid.end());
    } else if (e == "hpsf") {
        c.dims = {8, 8};
        c.direct = 8;
        c.schedule = {ScheduleClass::Rpd, 1.0, 0.25, "S4", Approach::A3, Bias::Random, kDefaultDecay};
    } else if (e == "recover") {
        c.dims = {6, 6};
        c.direct = 4;
        c.schedule = {ScheduleClass::Pcs, 1.0, 0.5, "S4", Approach::A2, Bias::Random, kDefaultDecay};
    } else if (e == "qq") {
        c.dims = {16, 16};
        c.n_monte = 30;
        c.delta = 0.5;
        c.methods = {"PCS", "FCPCS"};
    }
    return c;
}

ExperimentConfig parse_config(std::string_view json_text, std::string_view experiment) {
    Json j;
    try {
        j = Json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("$: invalid JSON: ") + e.what());
    }
    if (!j.is_object()) fail("$", "expected an object");
    std::string kind(experiment);
    if (j.contains("experiment")) kind = get_string(j["experiment"], "$.experiment");
    if (kind.empty()) fail("$.experiment", "missing");
    if (!experiment.empty() && canonical_experiment(kind) != canonical_experiment(experiment))
        fail("$.experiment", "config is for '" + kind + "', not '" + std::string(experiment) + "'");
    ExperimentConfig c = default_config(kind);

    for (const auto& [key, v] : j.items()) {
        const std::string p = "$." + key;
        if (key == "experiment") continue;
        if (key == "dims")
            c.dims = get_sizes(v, p);
        else if (key == "direct")
            c.direct = get_size(v, p);
        else if (key == "seed")
            c.seed = get_uint(v, p);
        else if (key == "seeds")
            c.seeds = get_list<std::uint64_t>(v, p, get_uint);
        else if (key == "n_monte")
            c.n_monte = get_size(v, p);
        else if (key == "threads")
            c.threads = get_size(v, p);
        else if (key == "format")
            c.format = get_string(v, p);
        else if (key == "output")
            c.output = get_string(v, p);
        else if (key == "series")
            c.series = get_strings(v, p);
        else if (key == "deltas")
            c.deltas = get_reals(v, p);
        else if (key == "sizes")
            c.sizes = get_sizes(v, p);
        else if (key == "series_sizes") {
            if (!v.is_object()) fail(p, "expected an object");
            c.series_sizes.clear();
            for (const auto& [name, list] : v.items()) c.series_sizes[name] = get_sizes(list, p + "." + name);
        } else if (key == "delta")
            c.delta = get_real(v, p);
        else if (key == "scheme")
            c.scheme = get_string(v, p);
        else if (key == "schemes")
            c.schemes = get_strings(v, p);
        else if (key == "approach")
            c.approach = parse_enum(v, p, parse_approach);
        else if (key == "delta_i")
            c.delta_i = get_real(v, p);
        else if (key == "delta_c")
            c.delta_c = get_real(v, p);
        else if (key == "decay")
            c.decay = get_real(v, p);
        else if (key == "traditional")
            c.traditional = get_bool(v, p);
        else if (key == "methods")
            c.methods = get_strings(v, p);
        else if (key == "bins")
            c.bins = get_size(v, p);
        else if (key == "quantiles")
            c.quantiles = get_size(v, p);
        else if (key == "gammas")
            c.gammas = get_reals(v, p);
        else if (key == "exclusion_threshold")
            c.exclusion_threshold = get_real(v, p);
        else if (key == "exclude")
            c.exclude = get_bool(v, p);
        else if (key == "schedule")
            c.schedule = parse_descriptor(v, p, c.schedule);
        else if (key == "spike")
            c.spike = get_sizes(v, p);
        else if (key == "schedule_file")
            c.schedule_file = get_string(v, p);
        else if (key == "spectrum_file")
            c.spectrum_file = get_string(v, p);
        else if (key == "sparsity")
            c.sparsity = get_size(v, p);
        else if (key == "mode")
            c.mode = get_string(v, p);
        else if (key == "success_tol")
            c.success_tol = get_real(v, p);
        else if (key == "solver") {
            if (!v.is_object()) fail(p, "expected an object");
            for (const auto& [sk, sv] : v.items()) {
                const std::string sp = p + "." + sk;
                if (sk == "rho")
                    c.solver.rho = get_real(sv, sp);
                else if (sk == "tol")
                    c.solver.tol = get_real(sv, sp);
                else if (sk == "max_iter")
                    c.solver.max_iter = static_cast<int>(get_size(sv, sp));
                else if (sk == "cg_max_iter")
                    c.solver.cg_max_iter = static_cast<int>(get_size(sv, sp));
                else if (sk == "cg_tol")
                    c.solver.cg_tol = get_real(sv, sp);
                else
                    fail(sp, "unknown key");
            }
        } else
            fail(p, "unknown key");
    }
    validate(c);
    return c;
}

std::string config_to_json(const ExperimentConfig& c, int indent) {
    Json j;
    j["experiment"] = c.experiment;
    j["dims"] = c.dims;
    j["direct"] = c.direct;
    j["seed"] = c.seed;
    if (!c.seeds.empty()) j["seeds"] = c.seeds;
    j["n_monte"] = c.n_monte;
    j["threads"] = c.threads;
    j["format"] = c.format;
    j["output"] = c.output;
    j["series"] = c.series;
    j["deltas"] = c.deltas;
    j["sizes"] = c.sizes;
    Json ss = Json::object();
    for (const auto& [k, v] : c.series_sizes) ss[k] = v;
    j["series_sizes"] = std::move(ss);
    j["delta"] = c.delta;
    j["scheme"] = c.scheme;
    j["schemes"] = c.schemes;
    j["approach"] = to_string(c.approach);
    j["delta_i"] = c.delta_i;
    j["delta_c"] = c.delta_c;
    j["decay"] = c.decay;
    j["traditional"] = c.traditional;
    j["methods"] = c.methods;
    j["bins"] = c.bins;
    j["quantiles"] = c.quantiles;
    j["gammas"] = c.gammas;
    j["exclusion_threshold"] = c.exclusion_threshold;
    j["exclude"] = c.exclude;
    j["schedule"] = descriptor_json(c.schedule);
    j["spike"] = c.spike;
    j["schedule_file"] = c.schedule_file;
    j["spectrum_file"] = c.spectrum_file;
    j["sparsity"] = c.sparsity;
    j["mode"] = c.mode;
    j["solver"] = {{"rho", c.solver.rho},
                   {"tol", c.solver.tol},
                   {"max_iter", c.solver.max_iter},
                   {"cg_max_iter", c.solver.cg_max_iter},
                   {"cg_tol", c.solver.cg_tol}};
    j["success_tol"] = c.success_tol;
    return j.dump(indent);
}

Dims grid(const Dims& indel, std::size_t direct) {
    Dims g = indel;
    g.push_back(direct);
    return g;
}

ScheduleDescriptor method_descriptor(std::string_view method, double delta) {
    ScheduleDescriptor d;
    if (method == "NUS") {
        d.schedule_class = ScheduleClass::Nus;
        d.delta_i = delta;
    } else if (method == "PCS") {
        d.schedule_class = ScheduleClass::PcsEqualCoverage;
        d.delta_c = delta;
    } else if (method == "FCPCS") {
        d.schedule_class = ScheduleClass::Pcs;
        d.delta_i = 1.0;
        d.delta_c = delta;
        d.scheme = "S4";
        d.approach = Approach::A2;
    } else {
        throw ConfigError("$.methods: unknown method '" + std::string(method) + "'");
    }
    return d;
}

std::size_t method_dof(std::string_view method, double delta, const Dims& indel, std::size_t direct) {
    const std::size_t indels = indel_count_of(indel);
    const std::size_t reads = component_count(static_cast<int>(indel.size()) + 1) / 2;
    const std::size_t chosen = round_count(delta * static_cast<double>(indels));
    if (method == "NUS") return chosen * 2 * reads * direct;
    if (method == "PCS") return reads * chosen * 2 * direct;
    if (method == "FCPCS") {
        const double m = delta * static_cast<double>(reads);
        if (std::abs(m - std::round(m)) > 1e-9) return 0;
        return indels * static_cast<std::size_t>(std::llround(m)) * 2 * direct;
    }
    throw ConfigError("$.methods: unknown method '" + std::string(method) + "'");
}

void validate(const ExperimentConfig& c) {
    if (!is_kind(c.experiment)) fail("$.experiment", "unknown experiment '" + c.experiment + "'");
    const std::string& e = c.experiment;
    if (c.format != "csv" && c.format != "json") fail("$.format", "expected \"csv\" or \"json\"");
    if (c.threads == 0) fail("$.threads", "must be at least 1");
    if (c.direct == 0) fail("$.direct", "must be at least 1");
    if (c.seeds.empty() && c.n_monte == 0) fail("$.n_monte", "must be at least 1");
    const bool uses_dims = e == "coverage-sweep" || e == "scheme-compare" || e == "qq" ||
                           ((e == "hpsf" || e == "recover") && c.schedule_file.empty());
    if (uses_dims) {
        if (c.dims.empty()) fail("$.dims", "needs at least one indirect dimension");
        if (c.dims.size() + 1 > static_cast<std::size_t>(kMaxDimension)) fail("$.dims", "too many dimensions");
        for (std::size_t i = 0; i < c.dims.size(); ++i)
            if (c.dims[i] == 0) fail("$.dims[" + std::to_string(i) + "]", "must be at least 1");
    }
    for (std::size_t i = 0; i < c.deltas.size(); ++i) check_fraction(c.deltas[i], "$.deltas[" + std::to_string(i) + "]");
    for (std::size_t i = 0; i < c.sizes.size(); ++i)
        if (c.sizes[i] == 0) fail("$.sizes[" + std::to_string(i) + "]", "must be at least 1");
    auto d_of = [&] { return static_cast<int>(c.dims.size()) + 1; };
    auto check_scheme = [&](const std::string& name, const std::string& path, int d) {
        try {
            (void)ComponentScheme::named(name, d);
        } catch (const std::exception& ex) {
            fail(path, ex.what());
        }
    };

    if (e == "coverage-sweep") {
        if (c.series.empty()) fail("$.series", "must not be empty");
        if (c.deltas.empty()) fail("$.deltas", "must not be empty");
        for (std::size_t i = 0; i < c.series.size(); ++i)
            if (!kSweepSeries.count(c.series[i])) fail("$.series[" + std::to_string(i) + "]", "unknown series");
        check_scheme(c.scheme, "$.scheme", d_of());
    } else if (e == "method-compare" || e == "qq") {
        check_fraction(c.delta, "$.delta");
        if (c.methods.size() < 2) fail("$.methods", "needs at least two methods");
        for (std::size_t i = 0; i < c.methods.size(); ++i)
            if (!kMethods.count(upper(c.methods[i]))) fail("$.methods[" + std::to_string(i) + "]", "unknown method");
        if (c.trial_count() < 2) fail("$.n_monte", "needs at least two trials");
        std::vector<Dims> lattices;
        if (e == "method-compare") {
            if (c.sizes.empty()) fail("$.sizes", "must not be empty");
            for (std::size_t n : c.sizes) lattices.push_back({n, n});
        } else {
            lattices.push_back(c.dims);
        }
        for (const Dims& lat : lattices) {
            std::set<std::size_t> dof;
            for (const std::string& m : c.methods) dof.insert(method_dof(upper(m), c.delta, lat, c.direct));
            if (dof.size() != 1 || dof.count(0))
                fail("$.delta", "methods acquire unequal numbers of real coordinates on a " +
                                    std::to_string(lat.front()) + "-indel lattice (DOF mismatch)");
        }
    } else if (e == "scheme-compare") {
        if (c.schemes.empty()) fail("$.schemes", "must not be empty");
        for (std::size_t i = 0; i < c.schemes.size(); ++i)
            check_scheme(c.schemes[i], "$.schemes[" + std::to_string(i) + "]", d_of());
        check_fraction(c.delta_i, "$.delta_i");
        check_fraction(c.delta_c, "$.delta_c");
    } else if (e == "scaling-fit") {
        if (c.series.empty()) fail("$.series", "must not be empty");
        for (std::size_t i = 0; i < c.series.size(); ++i)
            if (!kScaleSeries.count(c.series[i])) fail("$.series[" + std::to_string(i) + "]", "unknown series");
        for (const auto& [name, list] : c.series_sizes) {
            if (!kScaleSeries.count(name)) fail("$.series_sizes." + name, "unknown series");
            for (std::size_t n : list)
                if (n == 0) fail("$.series_sizes." + name, "sizes must be at least 1");
        }
        for (const std::string& s : c.series) {
            const auto it = c.series_sizes.find(s);
            const auto& list = it == c.series_sizes.end() ? c.sizes : it->second;
            if (std::set<std::size_t>(list.begin(), list.end()).size() < 4)
                fail(it == c.series_sizes.end() ? "$.sizes" : "$.series_sizes." + s,
                     "scaling fits need at least four distinct sizes");
        }
        if (c.gammas.empty()) fail("$.gammas", "must not be empty");
        for (std::size_t i = 0; i < c.gammas.size(); ++i)
            if (!(c.gammas[i] > 0.0)) fail("$.gammas[" + std::to_string(i) + "]", "must be positive");
        if (std::find(c.series.begin(), c.series.end(), "pcs-equal-random") != c.series.end() && c.deltas.empty())
            fail("$.deltas", "must not be empty");
    } else if (e == "hpsf") {
        if (c.schedule_file.empty()) {
            const std::size_t rank = c.dims.size() + 1;
            if (!c.spike.empty() && c.spike.size() != rank)
                fail("$.spike", "needs " + std::to_string(rank) + " entries");
            const Dims g = grid(c.dims, c.direct);
            for (std::size_t i = 0; i < c.spike.size(); ++i)
                if (c.spike[i] >= g[i]) fail("$.spike[" + std::to_string(i) + "]", "outside the grid");
        }
    } else if (e == "recover") {
        if (c.mode != "ph1" && c.mode != "matched" && c.mode != "l1")
            fail("$.mode", "expected \"ph1\", \"matched\" or \"l1\"");
        if (!(c.solver.rho > 0.0)) fail("$.solver.rho", "must be positive");
        if (!(c.solver.tol > 0.0)) fail("$.solver.tol", "must be positive");
        if (c.solver.max_iter < 1) fail("$.solver.max_iter", "must be at least 1");
        if (!(c.success_tol > 0.0)) fail("$.success_tol", "must be positive");
    }
}

std::vector<double> run_trials(std::size_t count, std::size_t threads, const std::function<double(std::size_t)>& fn) {
    std::vector<double> out(count);
    parallel_for(count, threads, [&](std::size_t t) { out[t] = fn(t); });
    return out;
}

CoherenceSample coherence_trials(const Dims& dims, const ScheduleDescriptor& desc, const ExperimentConfig& c,
                                 bool traditional) {
    const std::size_t n = c.trial_count();
    std::vector<CoherenceReport> reports(n);
    parallel_for(n, c.threads, [&](std::size_t t) {
        CoherenceOptions opt;
        opt.traditional = traditional;
        reports[t] = mu_hypercomplex(generate(dims, desc, c.trial_seed(t)), opt);
    });
    CoherenceSample out;
    for (const CoherenceReport& r : reports) {
        if (r.infinite)
            ++out.infinite;
        else
            out.finite.push_back(r.mu_h);
        if (traditional) {
            if (r.traditional_infinite)
                ++out.traditional_infinite;
            else
                out.traditional.push_back(*r.traditional_mu);
        }
    }
    return out;
}

Table run_coverage_sweep(const ExperimentConfig& c) {
    validate(c);
    Table t({"series", "class", "delta_i", "delta_c", "mean_mu_h", "sd_mu_h", "se_mu_h", "n_monte", "n_infinite",
             "mean_mu", "sd_mu", "descriptor", "seed", "version"});
    const Dims dims = grid(c.dims, c.direct);
    for (const std::string& series : c.series) {
        for (double delta : c.deltas) {
            const ScheduleDescriptor desc = sweep_descriptor(series, delta, c);
            const bool trad = c.traditional && series == "nus";
            const CoherenceSample smp = coherence_trials(dims, desc, c, trad);
            const Summary h = summarize_finite(smp.finite, smp.infinite);
            const std::string label = generate(dims, desc, c.trial_seed(0)).descriptor().label();
            Cell mean_mu = std::string(), sd_mu = std::string();
            if (trad) {
                const Summary m = summarize_finite(smp.traditional, smp.traditional_infinite);
                mean_mu = m.mean;
                sd_mu = m.sd;
            }
            const double di = desc.schedule_class == ScheduleClass::PcsEqualCoverage ? 1.0 : desc.delta_i;
            t.add_row({series, std::string(to_string(desc.schedule_class)), di, desc.delta_c, h.mean, h.sd, h.se,
                       count_cell(c.trial_count()), count_cell(h.infinite), mean_mu, sd_mu, label, seed_cell(c),
                       std::string(version())});
        }
    }
    return t;
}

Table run_method_compare(const ExperimentConfig& c) {
    validate(c);
    Table t({"N", "row", "mean", "se", "sd", "n_monte", "n_infinite", "z", "descriptor", "seed", "version"});
    for (std::size_t n : c.sizes) {
        const Dims dims = grid({n, n}, c.direct);
        std::vector<Summary> sums;
        std::vector<std::string> labels;
        for (const std::string& raw : c.methods) {
            const std::string m = upper(raw);
            const ScheduleDescriptor desc = method_descriptor(m, c.delta);
            const CoherenceSample smp = coherence_trials(dims, desc, c);
            sums.push_back(summarize_finite(smp.finite, smp.infinite));
            labels.push_back(desc.label());
            t.add_row({count_cell(n), m, sums.back().mean, sums.back().se, sums.back().sd,
                       count_cell(c.trial_count()), count_cell(sums.back().infinite), std::string(), labels.back(),
                       seed_cell(c), std::string(version())});
        }
        for (std::size_t a = 0; a < sums.size(); ++a)
            for (std::size_t b = a + 1; b < sums.size(); ++b) {
                Cell z = std::string();
                if (sums[a].count >= 2 && sums[b].count >= 2) {
                    try {
                        z = z_score(sums[a].mean, sums[a].se, sums[b].mean, sums[b].se);
                    } catch (const StatsError&) {
                    }
                }
                t.add_row({count_cell(n), "Z(" + upper(c.methods[a]) + "," + upper(c.methods[b]) + ")", std::string(),
                           std::string(), std::string(), count_cell(c.trial_count()), std::string(), z,
                           labels[a] + "|" + labels[b], seed_cell(c), std::string(version())});
            }
    }
    return t;
}

Table run_scheme_compare(const ExperimentConfig& c) {
    validate(c);
    Table t({"row", "approach", "delta_i", "delta_c", "mean", "se", "sd", "n_monte", "n_infinite", "z",
             "descriptor", "seed", "version"});
    const Dims dims = grid(c.dims, c.direct);
    std::vector<Summary> sums;
    std::vector<std::string> labels;
    for (const std::string& scheme : c.schemes) {
        ScheduleDescriptor desc{ScheduleClass::Pcs, c.delta_i, c.delta_c, scheme, c.approach, Bias::Random, c.decay};
        const CoherenceSample smp = coherence_trials(dims, desc, c);
        sums.push_back(summarize_finite(smp.finite, smp.infinite));
        labels.push_back(desc.label());
        t.add_row({scheme, std::string(to_string(c.approach)), c.delta_i, c.delta_c, sums.back().mean,
                   sums.back().se, sums.back().sd, count_cell(c.trial_count()), count_cell(sums.back().infinite),
                   std::string(), labels.back(), seed_cell(c), std::string(version())});
    }
    for (std::size_t a = 0; a < sums.size(); ++a)
        for (std::size_t b = a + 1; b < sums.size(); ++b) {
            Cell z = std::string();
            if (sums[a].count >= 2 && sums[b].count >= 2) {
                try {
                    z = z_score(sums[a].mean, sums[a].se, sums[b].mean, sums[b].se);
                } catch (const StatsError&) {
                }
            }
            t.add_row({"Z(" + c.schemes[a] + "," + c.schemes[b] + ")", std::string(to_string(c.approach)), c.delta_i,
                       c.delta_c, std::string(), std::string(), std::string(), count_cell(c.trial_count()),
                       std::string(), z, labels[a] + "|" + labels[b], seed_cell(c), std::string(version())});
        }
    return t;
}

Table run_scaling_fit(const ExperimentConfig& c) {
    validate(c);
    Table t({"series", "delta", "row", "N", "m", "mean", "se", "n_monte", "n_infinite", "model", "gamma", "beta0",
             "beta1", "r2", "p_beta0", "best_r2", "best_p", "excluded", "descriptor", "seed", "version"});
    struct Series {
        std::string name;
        double delta;
        double m_exponent;
    };
    std::vector<Series> all;
    for (const std::string& s : c.series) {
        if (s == "pcs-equal-random")
            for (double d : c.deltas) all.push_back({s, d, 2.0});
        else
            all.push_back({s, 0.25, s == "rpd-A1" ? 3.0 : s == "rpd-A2" ? 2.0 : 1.0});
    }
    const std::string blank;
    for (const Series& s : all) {
        const auto it = c.series_sizes.find(s.name);
        std::vector<std::size_t> sizes = it == c.series_sizes.end() ? c.sizes : it->second;
        std::sort(sizes.begin(), sizes.end());
        sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());
        ScheduleDescriptor desc;
        if (s.name == "pcs-equal-random") {
            desc = {ScheduleClass::PcsEqualCoverage, 1.0, s.delta, "S4", Approach::A2, Bias::Random, c.decay};
        } else {
            const Approach a = parse_approach(s.name.substr(4));
            desc = {ScheduleClass::Rpd, 1.0, 0.25, "S4", a, Bias::Random, c.decay};
        }
        std::string label;
        std::vector<double> ns, means;
        for (std::size_t n : sizes) {
            const Dims dims = s.name == "pcs-equal-random" ? grid({n, n}, c.direct) : Dims{n, n, n};
            const SamplingSchedule probe = generate(dims, desc, c.trial_seed(0));
            label = probe.descriptor().label();
            const CoherenceSample smp = coherence_trials(dims, desc, c);
            const Summary sm = summarize_finite(smp.finite, smp.infinite);
            if (sm.infinite > 0) throw NumericalError("scaling fit: infinite coherence for " + s.name);
            ns.push_back(static_cast<double>(n));
            means.push_back(sm.mean);
            t.add_row({s.name, s.delta, "mean", count_cell(n), std::pow(static_cast<double>(n), s.m_exponent), sm.mean,
                       sm.se, count_cell(c.trial_count()), count_cell(sm.infinite), blank, blank, blank, blank, blank,
                       blank, blank, blank, blank, label, seed_cell(c), std::string(version())});
        }
        std::optional<FitExclusion> excl;
        if (c.exclude) excl = FitExclusion{s.m_exponent, c.exclusion_threshold};
        for (FitModel model : {FitModel::InterceptFree, FitModel::WithIntercept}) {
            std::vector<ScalingFit> fits;
            for (double g : c.gammas) {
                try {
                    fits.push_back(ols_fit(ns, means, g, model, excl));
                } catch (const StatsError& e) {
                    throw ConfigError("$.sizes: " + s.name + ": " + e.what());
                }
            }
            std::size_t best_r2 = 0, best_p = 0;
            for (std::size_t i = 1; i < fits.size(); ++i) {
                if (fits[i].r2 > fits[best_r2].r2) best_r2 = i;
                if (fits[i].p_beta0.value_or(-1.0) > fits[best_p].p_beta0.value_or(-1.0)) best_p = i;
            }
            for (std::size_t i = 0; i < fits.size(); ++i) {
                const ScalingFit& f = fits[i];
                std::string ex;
                for (double x : f.excluded) ex += (ex.empty() ? "" : " ") + format_double(x);
                const bool wi = model == FitModel::WithIntercept;
                t.add_row({s.name, s.delta, "fit", blank, blank, blank, blank, count_cell(c.trial_count()), blank,
                           std::string(wi ? "with-intercept" : "intercept-free"), f.gamma, real_or_blank(f.beta0),
                           f.beta1, f.r2, real_or_blank(f.p_beta0), i == best_r2, wi && i == best_p, ex, label,
                           seed_cell(c), std::string(version())});
            }
        }
    }
    return t;
}

Table run_hpsf(const ExperimentConfig& c) {
    validate(c);
    const SamplingSchedule s = load_or_generate(c);
    const Dims& dims = s.dims();
    Index spike = c.spike;
    if (spike.empty()) spike.assign(dims.size(), 0);
    if (spike.size() != dims.size()) fail("$.spike", "needs " + std::to_string(dims.size()) + " entries");
    for (std::size_t i = 0; i < spike.size(); ++i)
        if (spike[i] >= dims[i]) fail("$.spike[" + std::to_string(i) + "]", "outside the grid");
    const HpsfResult r = hpsf(s, spike);
    std::vector<std::string> cols;
    for (std::size_t j = 0; j < dims.size(); ++j) cols.push_back("k" + std::to_string(j + 1));
    for (const char* name : {"index", "value", "is_spike", "descriptor", "seed", "version"}) cols.emplace_back(name);
    Table t(std::move(cols));
    const std::size_t ks = flatten(dims, spike);
    const std::string label = s.descriptor().label();
    for (std::size_t f = 0; f < r.values.size(); ++f) {
        std::vector<Cell> row;
        for (std::size_t k : unflatten(dims, f)) row.push_back(count_cell(k));
        row.push_back(count_cell(f));
        row.push_back(f == ks && r.infinite ? std::numeric_limits<double>::infinity() : r.values[f]);
        row.push_back(f == ks);
        row.push_back(label);
        row.push_back(static_cast<long long>(s.seed()));
        row.push_back(std::string(version()));
        t.add_row(std::move(row));
    }
    return t;
}

Table run_qq(const ExperimentConfig& c) {
    validate(c);
    Table t({"row", "method", "p", "quantile_a", "quantile_b", "bin_lo", "bin_hi", "count", "descriptor", "seed",
             "version"});
    const Dims dims = grid(c.dims, c.direct);
    std::vector<std::vector<double>> samples;
    std::vector<std::string> labels;
    const std::string blank;
    for (const std::string& raw : c.methods) {
        const std::string m = upper(raw);
        const ScheduleDescriptor desc = method_descriptor(m, c.delta);
        CoherenceSample smp = coherence_trials(dims, desc, c);
        if (smp.finite.empty()) throw NumericalError("qq: every " + m + " draw has infinite coherence");
        samples.push_back(std::move(smp.finite));
        labels.push_back(desc.label());
        if (c.bins > 0) {
            const Histogram h = histogram(samples.back(), c.bins);
            for (std::size_t b = 0; b < h.counts.size(); ++b)
                t.add_row({"hist", m, blank, blank, blank, h.edges[b], h.edges[b + 1], count_cell(h.counts[b]),
                           labels.back(), seed_cell(c), std::string(version())});
        }
    }
    for (std::size_t a = 0; a < samples.size(); ++a)
        for (std::size_t b = a + 1; b < samples.size(); ++b) {
            const auto pairs = qq_pairs(samples[a], samples[b], c.quantiles);
            const std::string name = upper(c.methods[a]) + "|" + upper(c.methods[b]);
            for (std::size_t i = 0; i < pairs.size(); ++i) {
                const double p =
                    pairs.size() == 1 ? 0.5 : static_cast<double>(i) / static_cast<double>(pairs.size() - 1);
                t.add_row({"qq", name, p, pairs[i].first, pairs[i].second, blank, blank, blank,
                           labels[a] + "|" + labels[b], seed_cell(c), std::string(version())});
            }
        }
    return t;
}

RecoverReport run_recover(const ExperimentConfig& c) {
    validate(c);
    const SamplingSchedule s = load_or_generate(c);
    const AcquisitionOperator op(s);
    const std::size_t m = s.components();
    const std::size_t groups = s.pixel_count();
    const bool real_mode = c.mode == "l1";

    // Coherence and the certified sparsity level for the recovery regime.
    double mu = 0.0;
    bool infinite = false;
    if (real_mode) {
        const auto tm = mu_traditional(s);
        infinite = !tm.has_value();
        mu = tm.value_or(std::numeric_limits<double>::infinity());
    } else {
        const CoherenceReport rep = mu_hypercomplex(s);
        infinite = rep.infinite;
        mu = rep.mu_h;
    }
    const std::size_t units = real_mode ? groups * m : groups;
    std::size_t kcert = 0;
    while (kcert < units && sparsity_certificate(mu, infinite, kcert + 1)) ++kcert;

    HyperArray truth(s.dims());
    std::size_t k = 0;
    if (!c.spectrum_file.empty()) {
        SparseSpectrum sp;
        try {
            sp = sparse_from_json(read_file(c.spectrum_file));
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception& e) {
            throw ConfigError("$.spectrum_file: " + std::string(e.what()));
        }
        if (sp.dims != s.dims()) fail("$.spectrum_file", "spectrum grid does not match the schedule");
        truth = sp.to_array();
        auto coords = truth.coords();
        if (real_mode)
            k = static_cast<std::size_t>(std::count_if(coords.begin(), coords.end(), [](double v) { return v != 0.0; }));
        else
            k = sp.sparsity();
    } else {
        k = c.sparsity > 0 ? c.sparsity : std::max<std::size_t>(kcert, 1);
        if (k > units) fail("$.sparsity", "exceeds the number of unknowns");
        Rng rng(c.seed ^ 0x9e3779b97f4a7c15ULL);
        auto coords = truth.coords();
        for (std::size_t g : rng.sample(units, k)) {
            const std::size_t width = real_mode ? 1 : m;
            for (std::size_t e = 0; e < width; ++e) {
                // Magnitudes in [0.5, 1] with random sign keep every group visibly nonzero.
                const double mag = 0.5 + 0.5 * rng.uniform();
                coords[g * width + e] = rng.uniform() < 0.5 ? -mag : mag;
            }
        }
    }
    const bool certified = sparsity_certificate(mu, infinite, k);
    const std::vector<double> y = op.apply(truth);

    Json j;
    j["mode"] = c.mode;
    j["descriptor"] = s.descriptor().label();
    j["seed"] = s.seed();
    j["version"] = version();
    j["dims"] = s.dims();
    j[real_mode ? "mu" : "mu_h"] = infinite ? Json("inf") : Json(mu);
    j["certified_sparsity"] = kcert;
    j["sparsity"] = k;
    j["certified"] = certified;

    RecoverReport out;
    out.certified = certified;
    HyperArray estimate(s.dims());
    if (c.mode == "matched") {
        const MatchedFilterResult mf = matched_filter(op, y);
        estimate = mf.estimate;
        out.converged = true;
        j["zero_diagonal"] = mf.zero_diagonal;
    } else {
        RecoveryParams p;
        p.rho = c.solver.rho;
        p.tol = c.solver.tol;
        p.max_iter = c.solver.max_iter;
        p.cg_max_iter = c.solver.cg_max_iter;
        p.cg_tol = c.solver.cg_tol;
        if (real_mode) {
            p.group_size = 1;
            p.weights = column_norm_weights(s);
        } else {
            p.weights = normalization_weights(s);
        }
        const RecoveryResult r = solve_ph1(op, y, p);
        estimate = r.estimate;
        out.converged = r.converged;
        j["result"] = Json::parse(to_json(r, 1e-8, -1));
    }
    const double err = relative_error(estimate, truth);
    out.success = out.converged && err <= c.success_tol;
    j["relative_error"] = err;
    j["converged"] = out.converged;
    j["success"] = out.success;
    out.json = j.dump(2);
    return out;
}

std::string run_experiment(const ExperimentConfig& c, int* status) {
    if (status) *status = 0;
    const std::string& e = c.experiment;
    if (e == "recover") {
        const RecoverReport r = run_recover(c);
        if (status) *status = !r.converged ? 3 : !r.success ? 4 : 0;
        return r.json + "\n";
    }
    Table t = e == "coverage-sweep"   ? run_coverage_sweep(c)
              : e == "method-compare" ? run_method_compare(c)
              : e == "scheme-compare" ? run_scheme_compare(c)
              : e == "scaling-fit"    ? run_scaling_fit(c)
              : e == "hpsf"           ? run_hpsf(c)
              : e == "qq"             ? run_qq(c)
                                      : throw ConfigError("$.experiment: unknown experiment '" + e + "'");
    return t.render(c.format);
}

}  // namespace hcs
