#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "hcs/coherence.hpp"
#include "hcs/format.hpp"
#include "hcs/recovery.hpp"
#include "hcs/schedule.hpp"

namespace hcs {

/// Library version written into every table.
std::string_view version();

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Failed numerical step inside an experiment.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Solver settings exposed in experiment configs.
struct SolverSettings {
    double rho = 1.0;
    double tol = 1e-9;
    int max_iter = 5000;
    int cg_max_iter = 200;
    double cg_tol = 1e-12;
    friend bool operator==(const SolverSettings&, const SolverSettings&) = default;
};

/// Every parameter of an experiment run. `dims` are the indirect lengths
/// and `direct` the direct-dimension length, so schedules live on
/// dims + [direct]. Trial t uses seed + t unless `seeds` lists them.
struct ExperimentConfig {
    std::string experiment;
    Dims dims;
    std::size_t direct = 1;
    std::uint64_t seed = 1;
    std::vector<std::uint64_t> seeds;
    std::size_t n_monte = 10;
    std::size_t threads = 1;
    std::string format = "csv";
    std::string output;

    // coverage sweep, method and scheme comparison, qq
    std::vector<std::string> series;
    std::vector<double> deltas;
    std::vector<std::size_t> sizes;
    std::map<std::string, std::vector<std::size_t>> series_sizes;
    double delta = 0.25;
    std::string scheme = "S4";
    std::vector<std::string> schemes;
    Approach approach = Approach::A2;
    double delta_i = 1.0;
    double delta_c = 0.5;
    double decay = kDefaultDecay;
    bool traditional = true;
    std::vector<std::string> methods;
    std::size_t bins = 0;
    std::size_t quantiles = 0;

    // scaling fit
    std::vector<double> gammas;
    double exclusion_threshold = 60.0;
    bool exclude = true;

    // hpsf, recover
    ScheduleDescriptor schedule;
    Index spike;
    std::string schedule_file;
    std::string spectrum_file;
    std::size_t sparsity = 0;
    std::string mode = "ph1";
    SolverSettings solver;
    double success_tol = 1e-6;

    std::uint64_t trial_seed(std::size_t trial) const;
    std::size_t trial_count() const { return seeds.empty() ? n_monte : seeds.size(); }

    friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Experiment kinds: coverage-sweep, method-compare, scheme-compare,
/// scaling-fit, hpsf, recover, qq. Short aliases sweep, compare, schemes
/// and scale are accepted.
std::string canonical_experiment(std::string_view name);
ExperimentConfig default_config(std::string_view experiment);

/// Reads a JSON config on top of the defaults of its experiment kind
/// (the "experiment" key, else `experiment`). Unknown keys, wrong types and
/// invalid values raise ConfigError naming the JSON path.
ExperimentConfig parse_config(std::string_view json_text, std::string_view experiment = "");
std::string config_to_json(const ExperimentConfig& c, int indent = 2);
/// Range and consistency checks; throws ConfigError.
void validate(const ExperimentConfig& c);

/// dims + [direct].
Dims grid(const Dims& indel, std::size_t direct);

/// Calls fn(t) for t in [0, count) on up to `threads` workers and returns
/// the results indexed by t.
std::vector<double> run_trials(std::size_t count, std::size_t threads, const std::function<double(std::size_t)>& fn);

/// mu_H (and optionally traditional mu) over the config's trial seeds.
/// Infinite draws are counted and left out of `finite`.
struct CoherenceSample {
    std::vector<double> finite;
    std::size_t infinite = 0;
    std::vector<double> traditional;
    std::size_t traditional_infinite = 0;
};
CoherenceSample coherence_trials(const Dims& dims, const ScheduleDescriptor& desc, const ExperimentConfig& c,
                                 bool traditional = false);

/// Descriptor of NUS, PCS (equal coverage) or FCPCS at coverage delta.
ScheduleDescriptor method_descriptor(std::string_view method, double delta);
/// Real coordinates acquired by a method on an indel grid; used to enforce
/// equal degrees of freedom across compared methods.
std::size_t method_dof(std::string_view method, double delta, const Dims& indel, std::size_t direct);

Table run_coverage_sweep(const ExperimentConfig& c);
Table run_method_compare(const ExperimentConfig& c);
Table run_scheme_compare(const ExperimentConfig& c);
Table run_scaling_fit(const ExperimentConfig& c);
Table run_hpsf(const ExperimentConfig& c);
Table run_qq(const ExperimentConfig& c);

struct RecoverReport {
    std::string json;
    bool converged = false;
    bool success = false;
    bool certified = false;
};
RecoverReport run_recover(const ExperimentConfig& c);

/// Dispatches on c.experiment and renders in c.format. `status` receives
/// the recover outcome code (0, 3 or 4) and 0 otherwise.
std::string run_experiment(const ExperimentConfig& c, int* status = nullptr);

}  // namespace hcs
