#include <bit>

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hcs/coherence.hpp"
#include "hcs/experiments.hpp"
#include "hcs/hyperfft.hpp"
#include "hcs/recovery.hpp"
#include "hcs/stats.hpp"

namespace py = pybind11;
using namespace hcs;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

// Hypercomplex arrays cross the boundary as float arrays of shape dims + (2^d,).
HyperArray to_hyper(const Array& a) {
    if (a.ndim() < 2) throw DimensionError("expected an array of shape dims + (2^d,)");
    Dims dims(a.shape(), a.shape() + a.ndim() - 1);
    if (static_cast<std::size_t>(a.shape(a.ndim() - 1)) != component_count(static_cast<int>(dims.size())))
        throw DimensionError("last axis must have length 2^d");
    return HyperArray(dims, std::vector<double>(a.data(), a.data() + a.size()));
}

Array from_hyper(const HyperArray& x) {
    std::vector<py::ssize_t> shape(x.dims().begin(), x.dims().end());
    shape.push_back(static_cast<py::ssize_t>(x.components()));
    Array out(shape);
    std::copy(x.coords().begin(), x.coords().end(), out.mutable_data());
    return out;
}

Array from_vector(const std::vector<double>& v) {
    Array out(static_cast<py::ssize_t>(v.size()));
    std::copy(v.begin(), v.end(), out.mutable_data());
    return out;
}

std::vector<double> to_vector(const Array& a) { return {a.data(), a.data() + a.size()}; }

Array from_matrix(const RealMatrix& m) {
    Array out({static_cast<py::ssize_t>(m.rows()), static_cast<py::ssize_t>(m.cols())});
    std::copy(m.data().begin(), m.data().end(), out.mutable_data());
    return out;
}

HyperComplex element(const std::vector<double>& c) {
    if (!std::has_single_bit(c.size())) throw DimensionError("coefficient count must be a power of two");
    return HyperComplex(std::countr_zero(c.size()), c);
}

std::vector<double> coeffs(const HyperComplex& z) { return {z.coeffs().begin(), z.coeffs().end()}; }

py::dict report_dict(const CoherenceReport& r) {
    py::dict d;
    d["mu_h"] = r.mu_h;
    d["infinite"] = r.infinite;
    d["singular_group"] = r.singular_group;
    d["traditional_mu"] = r.traditional_mu;
    d["traditional_infinite"] = r.traditional_infinite;
    d["normalization"] = r.normalization;
    d["argmax"] = r.argmax;
    d["evaluated_dims"] = r.evaluated_dims;
    d["descriptor"] = r.descriptor.label();
    d["seed"] = r.seed;
    return d;
}

}  // namespace

PYBIND11_MODULE(_hcs, m) {
    m.doc() = "Hypercomplex compressed sensing: algebra, transforms, schedules, coherence and recovery";
    m.attr("__version__") = std::string(version());

    py::register_exception<DimensionError>(m, "DimensionError", PyExc_ValueError);
    py::register_exception<ScheduleError>(m, "ScheduleError", PyExc_ValueError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<StatsError>(m, "StatsError", PyExc_ValueError);

    // Algebra on coefficient vectors.
    m.def(
        "multiply", [](const std::vector<double>& a, const std::vector<double>& b) {
            return coeffs(element(a) * element(b));
        },
        py::arg("a"), py::arg("b"));
    m.def("conjugate", [](const std::vector<double>& a) { return coeffs(conjugate(element(a))); }, py::arg("a"));
    m.def("modulus", [](const std::vector<double>& a) { return modulus(element(a)); }, py::arg("a"));
    m.def("matrix_iso", [](const std::vector<double>& a) { return from_matrix(matrix_iso(element(a))); },
          py::arg("a"));

    m.def(
        "forward", [](const Array& x) { return from_hyper(forward(to_hyper(x))); }, py::arg("spectrum"));
    m.def(
        "inverse", [](const Array& x) { return from_hyper(inverse(to_hyper(x))); }, py::arg("fid"));

    py::enum_<ScheduleClass>(m, "ScheduleClass")
        .value("Uniform", ScheduleClass::Uniform)
        .value("Nus", ScheduleClass::Nus)
        .value("Pcs", ScheduleClass::Pcs)
        .value("Rpd", ScheduleClass::Rpd)
        .value("PcsEqualCoverage", ScheduleClass::PcsEqualCoverage)
        .value("Custom", ScheduleClass::Custom);
    py::enum_<Approach>(m, "Approach").value("A1", Approach::A1).value("A2", Approach::A2).value("A3", Approach::A3);
    py::enum_<Bias>(m, "Bias")
        .value("Random", Bias::Random)
        .value("ExpRandom", Bias::ExpRandom)
        .value("ExpDeterministic", Bias::ExpDeterministic);

    py::class_<SamplingSchedule>(m, "SamplingSchedule")
        .def_property_readonly("dims", &SamplingSchedule::dims)
        .def_property_readonly("components", &SamplingSchedule::components)
        .def_property_readonly("seed", &SamplingSchedule::seed)
        .def_property_readonly("pixel_count", &SamplingSchedule::pixel_count)
        .def_property_readonly("sampled_count", &SamplingSchedule::sampled_count)
        .def_property_readonly("undersampling_ratio", &SamplingSchedule::undersampling_ratio)
        .def_property_readonly("label", [](const SamplingSchedule& s) { return s.descriptor().label(); })
        .def("mask", [](const SamplingSchedule& s, std::size_t p) { return s.mask(p).to_ulong(); })
        .def("to_json", [](const SamplingSchedule& s, int indent) { return to_json(s, indent); },
             py::arg("indent") = -1)
        .def_static("from_json", &schedule_from_json)
        .def("__eq__", [](const SamplingSchedule& a, const SamplingSchedule& b) { return a == b; });

    m.def("uniform", &uniform, py::arg("dims"));
    m.def("nus_random", &nus_random, py::arg("dims"), py::arg("delta_i"), py::arg("seed"));
    m.def("pcs", &pcs, py::arg("dims"), py::arg("delta_i"), py::arg("delta_c"), py::arg("scheme"),
          py::arg("approach"), py::arg("seed"));
    m.def("rpd", &rpd, py::arg("dims"), py::arg("scheme"), py::arg("approach"), py::arg("seed"));
    m.def("pcs_equal_coverage", &pcs_equal_coverage, py::arg("dims"), py::arg("delta"), py::arg("bias"),
          py::arg("seed"), py::arg("decay") = kDefaultDecay);
    m.def("quadrature_check", &quadrature_check, py::arg("schedule"), py::arg("dim"));
    m.def("uniform_dimension_check", &uniform_dimension_check, py::arg("schedule"), py::arg("dim"));

    py::class_<AcquisitionOperator>(m, "AcquisitionOperator")
        .def(py::init<SamplingSchedule>(), py::arg("schedule"))
        .def_property_readonly("row_count", &AcquisitionOperator::row_count)
        .def_property_readonly("column_count", &AcquisitionOperator::column_count)
        .def_property_readonly("schedule", &AcquisitionOperator::schedule)
        .def("apply", [](const AcquisitionOperator& op, const Array& x) { return from_vector(op.apply(to_hyper(x))); })
        .def("adjoint",
             [](const AcquisitionOperator& op, const Array& y) { return from_hyper(op.adjoint_apply(to_vector(y))); })
        .def("dense_matrix", [](const AcquisitionOperator& op) { return from_matrix(op.dense_matrix()); });

    m.def(
        "mu_hypercomplex",
        [](const SamplingSchedule& s, bool traditional, bool reduce) {
            CoherenceOptions o;
            o.traditional = traditional;
            o.reduce = reduce;
            return report_dict(mu_hypercomplex(s, o));
        },
        py::arg("schedule"), py::arg("traditional") = false, py::arg("reduce") = true);
    m.def(
        "mu_traditional", [](const SamplingSchedule& s) { return mu_traditional(s); }, py::arg("schedule"));
    m.def(
        "hpsf",
        [](const SamplingSchedule& s, const Index& spike) {
            const HpsfResult r = hpsf(s, spike);
            std::vector<py::ssize_t> shape(r.dims.begin(), r.dims.end());
            Array out(shape);
            std::copy(r.values.begin(), r.values.end(), out.mutable_data());
            return out;
        },
        py::arg("schedule"), py::arg("spike"));

    m.def(
        "solve_ph1",
        [](const AcquisitionOperator& op, const Array& y, std::vector<double> weights, std::size_t group_size,
           double rho, double tol, int max_iter) {
            RecoveryParams p;
            p.weights = std::move(weights);
            p.group_size = group_size;
            p.rho = rho;
            p.tol = tol;
            p.max_iter = max_iter;
            RecoveryResult r;
            {
                py::gil_scoped_release release;
                r = solve_ph1(op, to_vector(y), p);
            }
            py::dict d;
            d["estimate"] = from_hyper(r.estimate);
            d["converged"] = r.converged;
            d["iterations"] = r.iterations;
            d["objective"] = r.objective;
            d["weighted_objective"] = r.weighted_objective;
            d["feasibility"] = r.feasibility;
            return d;
        },
        py::arg("op"), py::arg("y"), py::arg("weights") = std::vector<double>{}, py::arg("group_size") = 0,
        py::arg("rho") = 1.0, py::arg("tol") = 1e-9, py::arg("max_iter") = 5000);
    m.def("normalization_weights", &normalization_weights, py::arg("schedule"));
    m.def("column_norm_weights", &column_norm_weights, py::arg("schedule"));

    m.def("student_t_cdf", &student_t_cdf, py::arg("t"), py::arg("df"));
    m.def("incomplete_beta", &incomplete_beta, py::arg("a"), py::arg("b"), py::arg("x"));
    m.def(
        "z_score", [](double ma, double sa, double mb, double sb) { return z_score(ma, sa, mb, sb); },
        py::arg("mean_a"), py::arg("se_a"), py::arg("mean_b"), py::arg("se_b"));
    m.def(
        "quantile", [](std::vector<double> v, double p) { return quantile(v, p); }, py::arg("values"), py::arg("p"));
    m.def(
        "qq_pairs", [](std::vector<double> a, std::vector<double> b) { return qq_pairs(a, b); }, py::arg("a"),
        py::arg("b"));

    m.def("default_config", [](const std::string& kind) { return config_to_json(default_config(kind)); },
          py::arg("experiment"));
    m.def(
        "run_experiment",
        [](const std::string& config_json, const std::string& experiment) {
            const ExperimentConfig c = parse_config(config_json, experiment);
            int status = 0;
            std::string out;
            {
                py::gil_scoped_release release;
                out = run_experiment(c, &status);
            }
            return py::make_tuple(out, status);
        },
        py::arg("config"), py::arg("experiment") = "");
}
