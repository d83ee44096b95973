// Command-line front end for the coherence and recovery experiments.
//
// Settings are resolved as built-in defaults, then the --config file, then
// individual flags. Exit codes: 0 success, 2 bad configuration or input,
// 3 numerical failure (including solver non-convergence), 4 recovery that
// converged to the wrong spectrum.

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "hcs/experiments.hpp"

namespace {

using namespace hcs;

struct Flags {
    std::string config;
    std::string format, output, mode, scheme, schedule_file, spectrum_file, klass, bias;
    std::string approach;
    std::vector<std::size_t> dims, sizes, spike;
    std::vector<double> deltas, gammas;
    std::vector<std::string> series, schemes, methods;
    std::size_t direct = 0, n_monte = 0, threads = 0, bins = 0, quantiles = 0, sparsity = 0;
    std::uint64_t seed = 0;
    double delta = 0, delta_i = 0, delta_c = 0, decay = 0, threshold = 0, success_tol = 0;
    bool no_exclude = false, no_traditional = false, print_config = false;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void emit(const std::string& text, const std::string& path) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path);
    out << text;
}

class Command {
public:
    Command(CLI::App& parent, const std::string& name, const std::string& kind, const std::string& help)
        : app_(parent.add_subcommand(name, help)), kind_(kind) {
        app_->add_option("-c,--config", f_.config, "JSON config file")->check(CLI::ExistingFile);
        opt("--format", f_.format, "csv or json");
        opt("-o,--output", f_.output, "output file (default stdout)");
        opt("--seed", f_.seed, "base seed");
        opt("--threads", f_.threads, "worker threads");
        app_->add_flag("--print-config", f_.print_config, "print the resolved config and exit");
    }

    template <class T>
    Command& opt(const std::string& name, T& target, const std::string& help) {
        app_->add_option(name, target, help);
        return *this;
    }
    Command& flag(const std::string& name, bool& target, const std::string& help) {
        app_->add_flag(name, target, help);
        return *this;
    }

    Flags& f() { return f_; }
    CLI::App* app() { return app_; }

    bool given(const std::string& name) const {
        const CLI::Option* o = app_->get_option_no_throw(name);
        return o != nullptr && o->count() > 0;
    }

    ExperimentConfig resolve() const {
        ExperimentConfig c = f_.config.empty() ? default_config(kind_) : parse_config(slurp(f_.config), kind_);
        auto set = [&](const char* name, auto& field, const auto& value) {
            if (given(name)) field = value;
        };
        set("--format", c.format, f_.format);
        set("--output", c.output, f_.output);
        set("--seed", c.seed, f_.seed);
        set("--threads", c.threads, f_.threads);
        set("--dims", c.dims, f_.dims);
        set("--direct", c.direct, f_.direct);
        set("--n-monte", c.n_monte, f_.n_monte);
        set("--deltas", c.deltas, f_.deltas);
        set("--sizes", c.sizes, f_.sizes);
        set("--series", c.series, f_.series);
        set("--delta", c.delta, f_.delta);
        set("--scheme", c.scheme, f_.scheme);
        set("--schemes", c.schemes, f_.schemes);
        set("--methods", c.methods, f_.methods);
        set("--bins", c.bins, f_.bins);
        set("--quantiles", c.quantiles, f_.quantiles);
        set("--gammas", c.gammas, f_.gammas);
        set("--exclusion-threshold", c.exclusion_threshold, f_.threshold);
        set("--decay", c.decay, f_.decay);
        set("--spike", c.spike, f_.spike);
        set("--schedule", c.schedule_file, f_.schedule_file);
        set("--spectrum", c.spectrum_file, f_.spectrum_file);
        set("--sparsity", c.sparsity, f_.sparsity);
        set("--mode", c.mode, f_.mode);
        set("--success-tol", c.success_tol, f_.success_tol);
        if (given("--sizes")) c.series_sizes.clear();
        if (given("--no-exclude")) c.exclude = false;
        if (given("--no-traditional")) c.traditional = false;
        if (given("--seed")) c.seeds.clear();
        if (given("--n-monte")) c.seeds.clear();
        if (given("--approach")) {
            c.approach = parse_approach(f_.approach);
            c.schedule.approach = c.approach;
        }
        if (given("--class")) c.schedule.schedule_class = parse_schedule_class(f_.klass);
        if (given("--bias")) c.schedule.bias = parse_bias(f_.bias);
        if (given("--delta-i")) {
            c.delta_i = f_.delta_i;
            c.schedule.delta_i = f_.delta_i;
        }
        if (given("--delta-c")) {
            c.delta_c = f_.delta_c;
            c.schedule.delta_c = f_.delta_c;
        }
        if (given("--scheme")) c.schedule.scheme = f_.scheme;
        if (given("--decay")) c.schedule.decay = f_.decay;
        validate(c);
        return c;
    }

private:
    CLI::App* app_;
    std::string kind_;
    Flags f_;
};

void add_grid(Command& c) {
    auto& f = c.f();
    c.opt("--dims", f.dims, "indirect dimension lengths").opt("--direct", f.direct, "direct dimension length");
}

void add_monte(Command& c) { c.opt("--n-monte", c.f().n_monte, "Monte Carlo trials"); }

void add_descriptor(Command& c) {
    auto& f = c.f();
    c.opt("--class", f.klass, "schedule class")
        .opt("--delta-i", f.delta_i, "indel coverage")
        .opt("--delta-c", f.delta_c, "component coverage")
        .opt("--scheme", f.scheme, "component scheme S1..S4")
        .opt("--approach", f.approach, "A1, A2 or A3")
        .opt("--bias", f.bias, "random, exp-random or exp-det")
        .opt("--decay", f.decay, "exponential bias decay")
        .opt("--schedule", f.schedule_file, "schedule JSON file");
}

int schedule_gen(const Flags& f, CLI::App* app) {
    ScheduleDescriptor d;
    if (app->count("--class")) d.schedule_class = parse_schedule_class(f.klass);
    if (app->count("--delta-i")) d.delta_i = f.delta_i;
    if (app->count("--delta-c")) d.delta_c = f.delta_c;
    if (app->count("--scheme")) d.scheme = f.scheme;
    if (app->count("--approach")) d.approach = parse_approach(f.approach);
    if (app->count("--bias")) d.bias = parse_bias(f.bias);
    if (app->count("--decay")) d.decay = f.decay;
    if (f.dims.empty()) throw ConfigError("--dims: required");
    const SamplingSchedule s = generate(grid(f.dims, app->count("--direct") ? f.direct : 1), d, f.seed);
    emit(to_json(s, 2) + "\n", f.output);
    return 0;
}

int schedule_validate(const std::string& path) {
    SamplingSchedule s = [&] {
        try {
            return schedule_from_json(slurp(path));
        } catch (const ConfigError&) {
            throw;
        } catch (const std::exception& e) {
            throw ConfigError(path + ": " + e.what());
        }
    }();
    s.validate();
    std::cout << "dims:";
    for (std::size_t n : s.dims()) std::cout << ' ' << n;
    std::cout << "\ndescriptor: " << s.descriptor().label() << "\nseed: " << s.seed()
              << "\nsampled: " << s.sampled_count() << "\nratio: " << format_double(s.undersampling_ratio())
              << "\nquadrature:";
    for (std::size_t j = 0; j < s.dims().size(); ++j) std::cout << ' ' << (quadrature_check(s, j) ? 1 : 0);
    std::cout << "\nuniform:";
    for (std::size_t j = 0; j < s.dims().size(); ++j) std::cout << ' ' << (uniform_dimension_check(s, j) ? 1 : 0);
    std::cout << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hypercomplex coherence and recovery experiments"};
    app.set_version_flag("--version", std::string(hcs::version()));
    app.require_subcommand(1);

    Command sweep(app, "sweep", "coverage-sweep", "mean coherence against sampling coverage");
    add_grid(sweep);
    add_monte(sweep);
    sweep.opt("--deltas", sweep.f().deltas, "coverages")
        .opt("--series", sweep.f().series, "series names")
        .opt("--scheme", sweep.f().scheme, "component scheme")
        .opt("--approach", sweep.f().approach, "approach")
        .opt("--decay", sweep.f().decay, "exponential bias decay")
        .flag("--no-traditional", sweep.f().no_traditional, "skip the traditional coherence column");

    Command compare(app, "compare", "method-compare", "NUS, PCS and FCPCS at equal degrees of freedom");
    add_monte(compare);
    compare.opt("--sizes", compare.f().sizes, "indel lattice sizes")
        .opt("--direct", compare.f().direct, "direct dimension length")
        .opt("--delta", compare.f().delta, "total coverage")
        .opt("--methods", compare.f().methods, "methods");

    Command schemes(app, "schemes", "scheme-compare", "coherence of the component schemes");
    add_grid(schemes);
    add_monte(schemes);
    schemes.opt("--schemes", schemes.f().schemes, "schemes")
        .opt("--approach", schemes.f().approach, "approach")
        .opt("--delta-i", schemes.f().delta_i, "indel coverage")
        .opt("--delta-c", schemes.f().delta_c, "component coverage");

    Command scale(app, "scale", "scaling-fit", "finite-size scaling fits");
    add_monte(scale);
    scale.opt("--series", scale.f().series, "series names")
        .opt("--sizes", scale.f().sizes, "sizes (replaces per-series sizes)")
        .opt("--deltas", scale.f().deltas, "coverages of the PCS series")
        .opt("--direct", scale.f().direct, "direct length of the PCS series")
        .opt("--gammas", scale.f().gammas, "exponent grid")
        .opt("--exclusion-threshold", scale.f().threshold, "drop sizes with m at or below this")
        .flag("--no-exclude", scale.f().no_exclude, "fit every size");

    Command hpsf_cmd(app, "hpsf", "hpsf", "point spread function around a spike");
    add_grid(hpsf_cmd);
    add_descriptor(hpsf_cmd);
    hpsf_cmd.opt("--spike", hpsf_cmd.f().spike, "spike location");

    Command recover(app, "recover", "recover", "plant a sparse spectrum and recover it");
    add_grid(recover);
    add_descriptor(recover);
    recover.opt("--spectrum", recover.f().spectrum_file, "sparse spectrum JSON file")
        .opt("--sparsity", recover.f().sparsity, "planted sparsity (0 picks the certified level)")
        .opt("--mode", recover.f().mode, "ph1, matched or l1")
        .opt("--success-tol", recover.f().success_tol, "relative error counted as exact recovery");

    Command qq(app, "qq", "qq", "quantile pairs and histograms of coherence samples");
    add_grid(qq);
    add_monte(qq);
    qq.opt("--delta", qq.f().delta, "total coverage")
        .opt("--methods", qq.f().methods, "methods")
        .opt("--bins", qq.f().bins, "histogram bins (0 for none)")
        .opt("--quantiles", qq.f().quantiles, "quantile points (0 for the larger sample size)");

    Flags gen;
    auto* gen_app = app.add_subcommand("schedule-gen", "write a schedule as JSON");
    gen_app->add_option("--dims", gen.dims, "indirect dimension lengths")->required();
    gen_app->add_option("--direct", gen.direct, "direct dimension length");
    gen_app->add_option("--class", gen.klass, "schedule class");
    gen_app->add_option("--delta-i", gen.delta_i, "indel coverage");
    gen_app->add_option("--delta-c", gen.delta_c, "component coverage");
    gen_app->add_option("--scheme", gen.scheme, "component scheme");
    gen_app->add_option("--approach", gen.approach, "approach");
    gen_app->add_option("--bias", gen.bias, "bias");
    gen_app->add_option("--decay", gen.decay, "decay");
    gen_app->add_option("--seed", gen.seed, "seed");
    gen_app->add_option("-o,--output", gen.output, "output file");

    std::string validate_path;
    auto* val_app = app.add_subcommand("schedule-validate", "check a schedule JSON file");
    val_app->add_option("file", validate_path, "schedule JSON")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (gen_app->parsed()) return schedule_gen(gen, gen_app);
        if (val_app->parsed()) return schedule_validate(validate_path);
        for (Command* cmd : {&sweep, &compare, &schemes, &scale, &hpsf_cmd, &recover, &qq}) {
            if (!cmd->app()->parsed()) continue;
            const ExperimentConfig c = cmd->resolve();
            if (cmd->f().print_config) {
                std::cout << config_to_json(c) << "\n";
                return 0;
            }
            int status = 0;
            const std::string out = run_experiment(c, &status);
            emit(out, c.output);
            if (status == 3) std::cerr << "numerical failure: solver did not converge\n";
            if (status == 4) std::cerr << "recovery failure: estimate differs from the planted spectrum\n";
            return status;
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
