#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <random>

#include "georing/analysis.hpp"
#include "georing/config.hpp"
#include "georing/experiments.hpp"
#include "georing/params.hpp"

namespace py = pybind11;
using namespace georing;

PYBIND11_MODULE(_georing, m)
{
    m.doc() = "Ring-based position publishing and geographic routing";

    py::enum_<Profile>(m, "Profile")
        .value("reference_eps0", Profile::reference_eps0)
        .value("reference_eps2", Profile::reference_eps2)
        .value("accuracy", Profile::accuracy);

    py::class_<ProtocolParams>(m, "ProtocolParams")
        .def(py::init<>())
        .def_readwrite("n", &ProtocolParams::n)
        .def_readwrite("sigma", &ProtocolParams::sigma)
        .def_readwrite("epsilon", &ProtocolParams::epsilon)
        .def_readwrite("alpha", &ProtocolParams::alpha)
        .def_readwrite("beta", &ProtocolParams::beta)
        .def_readwrite("mu", &ProtocolParams::mu)
        .def_readwrite("gamma", &ProtocolParams::gamma)
        .def_readwrite("r0", &ProtocolParams::r0)
        .def_readwrite("d0", &ProtocolParams::d0)
        .def_readwrite("T0", &ProtocolParams::T0)
        .def("comm_radius", &ProtocolParams::comm_radius)
        .def("check", &ProtocolParams::check);

    m.def("make_profile", [](const std::string& name, double n) { return make_profile(parse_profile(name), n); },
          py::arg("profile"), py::arg("n"));
    m.def("comm_radius", py::overload_cast<double, double>(&comm_radius), py::arg("n"), py::arg("epsilon"));
    m.def(
        "derive_defaults",
        [](double n, double eps, double alpha, double beta, double sigma) {
            ZeroRing z = derive_defaults(n, eps, alpha, beta, sigma);
            return py::make_tuple(z.r0, z.d0, z.T0);
        },
        py::arg("n"), py::arg("epsilon"), py::arg("alpha"), py::arg("beta"), py::arg("sigma"));

    py::class_<Ring>(m, "Ring")
        .def_readonly("index", &Ring::index)
        .def_readonly("radius", &Ring::radius)
        .def_readonly("thickness", &Ring::thickness)
        .def_readonly("lifetime", &Ring::lifetime);
    py::class_<RingSchedule>(m, "RingSchedule")
        .def_readonly("rings", &RingSchedule::rings)
        .def_readonly("K", &RingSchedule::K)
        .def_readonly("single_ring", &RingSchedule::single_ring);
    m.def("ring_schedule", py::overload_cast<const ProtocolParams&>(&ring_schedule));
    m.def("ring_schedule_with_k", py::overload_cast<const ProtocolParams&, int>(&ring_schedule));

    py::class_<Condition>(m, "Condition")
        .def_readonly("name", &Condition::name)
        .def_readonly("inequality", &Condition::inequality)
        .def_readonly("passed", &Condition::pass)
        .def_readonly("accuracy_only", &Condition::accuracy_only);
    py::class_<ValidationReport>(m, "ValidationReport")
        .def_readonly("conditions", &ValidationReport::conditions)
        .def_readonly("u_max", &ValidationReport::u_max)
        .def_readonly("min_epsilon_for_delta", &ValidationReport::min_epsilon_for_delta)
        .def_readonly("core_regime_pass", &ValidationReport::core_regime_pass)
        .def_readonly("accuracy_regime_pass", &ValidationReport::accuracy_regime_pass)
        .def("failed", &ValidationReport::failed);
    m.def("validate", &validate, py::arg("params"), py::arg("delta") = kAccuracyDelta);

    m.def("u_max", &u_max);
    m.def("stretch_bound", &stretch_bound);
    m.def("bootstrap_distance", &bootstrap_distance);
    m.def("stretch_profile", &stretch_profile);
    m.def(
        "stretch_oracle",
        [](double a, double b, int grid) {
            StretchMaximum s = stretch_oracle(a, b, grid);
            return py::make_tuple(s.value, s.argmax);
        },
        py::arg("alpha"), py::arg("beta"), py::arg("grid_points") = 10000);
    m.def("bessel_i0", &bessel_i0);
    m.def("bessel_i0_scaled", &bessel_i0_scaled);

    m.def(
        "pmiss_asymptotic",
        [](const ProtocolParams& p, int i) { return pmiss_asymptotic(miss_inputs(p, ring_schedule(p), i)); },
        py::arg("params"), py::arg("index"));
    m.def(
        "pmiss_product_bound",
        [](const ProtocolParams& p, int i) {
            ProductBound b = pmiss_product_bound(i, p, ring_schedule(p));
            return py::make_tuple(b.product, b.integral, b.hops);
        },
        py::arg("params"), py::arg("index"));
    m.def(
        "update_density",
        [](double a, double t, double inner, double thickness, double sigma) {
            return update_density(a, t, Annulus({0.0, 0.0}, inner, thickness), sigma);
        },
        py::arg("a"), py::arg("t"), py::arg("inner_radius"), py::arg("thickness"), py::arg("sigma") = 1.0);
    m.def(
        "overhead_rate",
        [](const ProtocolParams& p, int K) {
            OverheadRate o = overhead_rate(p, K < 0 ? ring_schedule(p) : ring_schedule(p, K));
            py::dict d;
            d["total"] = o.total;
            d["area_terms"] = o.area_terms;
            d["line_terms"] = o.line_terms;
            d["ratio"] = o.ratio;
            d["contracting"] = o.contracting;
            return d;
        },
        py::arg("params"), py::arg("K") = -1);
    m.def("uniform_update_overhead", &uniform_update_overhead);
    m.def("min_epsilon_for_angle", &min_epsilon_for_angle, py::arg("delta"), py::arg("tightened") = false);
    m.def("anchor_area", &anchor_area);
    m.def(
        "anchor_occupancy",
        [](double n, double eps, double delta, int probes, std::uint64_t seed) {
            std::mt19937_64 rng(seed);
            return anchor_occupancy_mc(n, eps, delta, probes, rng).fraction_all_occupied;
        },
        py::arg("n"), py::arg("epsilon"), py::arg("delta"), py::arg("probes"), py::arg("seed") = 1);

    m.def(
        "run_worst_case_miss",
        [](const ProtocolParams& p, std::vector<int> indices, int realizations, int angles, double thickness_scale,
           std::uint64_t seed) {
            MissConfig cfg;
            cfg.indices = std::move(indices);
            cfg.realizations = realizations;
            cfg.angles = angles;
            cfg.thickness_scale = thickness_scale;
            MissResult res;
            {
                py::gil_scoped_release release;
                res = run_worst_case_miss(p, cfg, seed);
            }
            py::list rows;
            for (const auto& r : res.rows) {
                py::dict d;
                d["index"] = r.index;
                d["trials"] = r.trials;
                d["misses"] = r.misses;
                d["p_miss"] = r.p_miss;
                d["asymptotic"] = r.asymptotic;
                d["mean_ring_relays"] = r.mean_ring_relays;
                rows.append(d);
            }
            return rows;
        },
        py::arg("params"), py::arg("indices") = std::vector<int>{0, 1, 2, 3}, py::arg("realizations") = 20,
        py::arg("angles") = 500, py::arg("thickness_scale") = 1.0, py::arg("seed") = 1);

    m.def(
        "run_dynamic",
        [](const ProtocolParams& p, int routes, int epochs, double dest_sigma, std::uint64_t seed) {
            DynamicConfig cfg;
            cfg.routes = routes;
            cfg.epochs = epochs;
            cfg.dest_sigma = dest_sigma;
            DynamicResult res;
            {
                py::gil_scoped_release release;
                res = run_dynamic(p, cfg, seed);
            }
            py::dict d;
            d["routes"] = res.routes;
            d["delivered"] = res.delivered;
            d["delivery_rate"] = res.delivery_rate();
            d["uncertainty"] = res.uncertainty.values;
            d["stretch"] = res.stretch.values;
            d["reciprocal_stretch"] = res.reciprocal_stretch.values;
            d["face_hops"] = res.face_hops;
            d["total_hops"] = res.total_hops;
            d["measured_tx_rate"] = res.measured_tx_rate;
            d["predicted_rate"] = res.predicted_rate;
            return d;
        },
        py::arg("params"), py::arg("routes") = 500, py::arg("epochs") = 20, py::arg("dest_sigma") = -1.0,
        py::arg("seed") = 1);

    m.def(
        "run_overhead_scaling",
        [](const ProtocolParams& p, std::vector<int> k_extra, double horizon_factor, std::uint64_t seed) {
            OverheadConfig cfg;
            cfg.k_extra = std::move(k_extra);
            cfg.horizon_factor = horizon_factor;
            OverheadResult res;
            {
                py::gil_scoped_release release;
                res = run_overhead_scaling(p, cfg, seed);
            }
            py::list pts;
            for (const auto& q : res.points) {
                py::dict d;
                d["K"] = q.K;
                d["measured_rate"] = q.measured_rate;
                d["predicted_rate"] = q.predicted_rate;
                d["ratio"] = q.ratio;
                pts.append(d);
            }
            return pts;
        },
        py::arg("params"), py::arg("k_extra") = std::vector<int>{0, 1, 2, 3, 4}, py::arg("horizon_factor") = 8.0,
        py::arg("seed") = 1);

    m.def(
        "params_from_config",
        [](const std::string& json_text) { return parse_config(json_text).params; }, py::arg("json_text"));
}
