#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "floquet/asymptotics.hpp"
#include "floquet/greenfn.hpp"
#include "floquet/isofreq.hpp"
#include "floquet/lyapunov.hpp"
#include "floquet/profile_io.hpp"
#include "floquet/spectrum.hpp"
#include "floquet/verify.hpp"

namespace py = pybind11;
using namespace floquet;

namespace {

QuadratureConfig make_cfg(double tol) {
    QuadratureConfig cfg;
    cfg.abs_tol = cfg.rel_tol = tol;
    return cfg;
}

SecondDeriv parse_which(const std::string& s) {
    if (s == "w2w2")
        return SecondDeriv::W2W2;
    if (s == "k2k2")
        return SecondDeriv::K2K2;
    if (s == "w2k2")
        return SecondDeriv::W2K2;
    throw ConfigError("second derivative selector must be w2w2, k2k2 or w2k2");
}

ResolventMode parse_mode(const std::string& s) {
    if (s == "omega2")
        return ResolventMode::OmegaSquared;
    if (s == "k2")
        return ResolventMode::KSquared;
    throw ConfigError("resolvent mode must be omega2 or k2");
}

const char* slope_kind_name(IsoSlope::Kind k) {
    switch (k) {
    case IsoSlope::Kind::Interior: return "interior";
    case IsoSlope::Kind::VerticalEdge: return "vertical_edge";
    case IsoSlope::Kind::ZwsEdge: return "zws_edge";
    case IsoSlope::Kind::AxisRegular: return "axis_regular";
    case IsoSlope::Kind::AxisCutoff: return "axis_cutoff";
    case IsoSlope::Kind::AxisZws: return "axis_zws";
    }
    return "?";
}

} // namespace

PYBIND11_MODULE(floquet1d, m) {
    m.doc() = "Floquet spectral toolkit for the 1D periodic Sturm-Liouville wave equation";

    py::register_exception<NumericalError>(m, "NumericalError", PyExc_RuntimeError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

    py::class_<MaterialProfile>(m, "Profile")
        .def_property_readonly("period", &MaterialProfile::period_scale)
        .def_property_readonly("piecewise_constant", &MaterialProfile::piecewise_constant)
        .def_property_readonly("mean_rho", &MaterialProfile::mean_rho)
        .def_property_readonly("mean_mu1", &MaterialProfile::mean_mu1)
        .def_property_readonly("mean_mu2", &MaterialProfile::mean_mu2)
        .def_property_readonly("mean_inv_mu1", &MaterialProfile::mean_inv_mu1)
        .def("rho", &MaterialProfile::rho, py::arg("y"))
        .def("mu1", &MaterialProfile::mu1, py::arg("y"))
        .def("mu2", &MaterialProfile::mu2, py::arg("y"))
        .def("to_json", &profile_to_json)
        .def_static("homogeneous", &MaterialProfile::homogeneous, py::arg("rho"),
                    py::arg("mu1"), py::arg("mu2"));

    m.def("load_profile", &load_profile, py::arg("path"));
    m.def("parse_profile", &parse_profile, py::arg("text"));

    py::class_<LyapunovSample>(m, "DeltaSample")
        .def_readonly("omega2", &LyapunovSample::omega2)
        .def_readonly("k2", &LyapunovSample::k2)
        .def_readonly("delta", &LyapunovSample::delta)
        .def_readonly("K", &LyapunovSample::K)
        .def_readonly("origin", &LyapunovSample::origin)
        .def_property_readonly("band", [](const LyapunovSample& s) {
            return std::string(band_class_name(s.classification));
        });

    m.def(
        "delta",
        [](const MaterialProfile& p, cplx omega2, cplx k2, double tol) {
            return delta(p, omega2, k2, make_cfg(tol));
        },
        py::arg("profile"), py::arg("omega2"), py::arg("k2"), py::arg("tol") = 1e-12);

    m.def(
        "monodromy",
        [](const MaterialProfile& p, cplx omega2, cplx k2, double tol) -> Mat2 {
            return propagate(p, 0.0, 1.0, omega2, k2, make_cfg(tol)).M;
        },
        py::arg("profile"), py::arg("omega2"), py::arg("k2"), py::arg("tol") = 1e-12);

    m.def(
        "propagate",
        [](const MaterialProfile& p, double y0, double y, cplx omega2, cplx k2,
           double tol) -> Mat2 { return propagate(p, y0, y, omega2, k2, make_cfg(tol)).M; },
        py::arg("profile"), py::arg("y0"), py::arg("y"), py::arg("omega2"), py::arg("k2"),
        py::arg("tol") = 1e-12);

    m.def(
        "d_delta",
        [](const MaterialProfile& p, double omega2, double k2, double tol) {
            const auto d = d_delta_integral(p, omega2, k2, make_cfg(tol));
            return py::make_tuple(d.d_dw2, d.d_dk2);
        },
        py::arg("profile"), py::arg("omega2"), py::arg("k2"), py::arg("tol") = 1e-12,
        "first derivatives (d/d omega^2, d/d k^2) of the Lyapunov function");

    m.def(
        "d2_delta",
        [](const MaterialProfile& p, double omega2, double k2, const std::string& which,
           double tol) { return d2_delta(p, omega2, k2, parse_which(which), make_cfg(tol)); },
        py::arg("profile"), py::arg("omega2"), py::arg("k2"), py::arg("which") = "w2w2",
        py::arg("tol") = 1e-12);

    m.def(
        "branch_omega",
        [](const MaterialProfile& p, double K, double k, int n, double tol) {
            return branch_omega(p, K, k, n, make_cfg(tol));
        },
        py::arg("profile"), py::arg("K"), py::arg("k"), py::arg("n") = 1,
        py::arg("tol") = 1e-12);

    m.def(
        "band_edges",
        [](const MaterialProfile& p, double k, double omega_max, double tol) {
            py::list out;
            for (const auto& e : band_edges(p, k, omega_max, make_cfg(tol)))
                out.append(py::make_tuple(e.omega, e.parity, e.tangent));
            return out;
        },
        py::arg("profile"), py::arg("k"), py::arg("omega_max"), py::arg("tol") = 1e-12,
        "cutoff frequencies as (omega, parity, tangent) tuples");

    m.def(
        "stopband_intervals",
        [](const MaterialProfile& p, double k, double omega_max, double tol) {
            py::list out;
            for (const auto& g : stopband_intervals(p, k, omega_max, make_cfg(tol)))
                out.append(py::make_tuple(g.lo, g.hi, g.parity));
            return out;
        },
        py::arg("profile"), py::arg("k"), py::arg("omega_max"), py::arg("tol") = 1e-12);

    m.def(
        "dirichlet_neumann",
        [](const MaterialProfile& p, double y0, double k, double omega_max, double tol) {
            return dirichlet_neumann(p, y0, k, omega_max, make_cfg(tol));
        },
        py::arg("profile"), py::arg("y0"), py::arg("k"), py::arg("omega_max"),
        py::arg("tol") = 1e-12);

    py::class_<BranchDerivative>(m, "BranchDerivative")
        .def_readonly("omega", &BranchDerivative::omega)
        .def_readonly("value", &BranchDerivative::value)
        .def_readonly("at_cutoff", &BranchDerivative::at_cutoff)
        .def_readonly("curvature", &BranchDerivative::curvature)
        .def_readonly("zws", &BranchDerivative::zws)
        .def_readonly("origin", &BranchDerivative::origin);

    m.def(
        "domega_dK",
        [](const MaterialProfile& p, double K, double k, int n, double tol) {
            return domega_dK(p, K, k, n, make_cfg(tol));
        },
        py::arg("profile"), py::arg("K"), py::arg("k"), py::arg("n") = 1,
        py::arg("tol") = 1e-12);

    m.def(
        "domega_dk",
        [](const MaterialProfile& p, double K, double k, int n, double tol) {
            return domega_dk(p, K, k, n, make_cfg(tol));
        },
        py::arg("profile"), py::arg("K"), py::arg("k"), py::arg("n") = 1,
        py::arg("tol") = 1e-12);

    py::class_<ZwsReport>(m, "ZwsReport")
        .def_readonly("omega", &ZwsReport::omega)
        .def_readonly("k", &ZwsReport::k)
        .def_readonly("sign", &ZwsReport::sign)
        .def_readonly("residual_M", &ZwsReport::residual_M)
        .def_readonly("residual_m2", &ZwsReport::residual_m2)
        .def_readonly("newton_converged", &ZwsReport::newton_converged)
        .def_readonly("confirmed", &ZwsReport::confirmed);

    m.def(
        "detect_zws",
        [](const MaterialProfile& p, double omega, double k, const std::string& mode,
           bool refine, double tolerance, double tol) {
            const ZwsMode zm = (mode == "fix_k") ? ZwsMode::FixK : ZwsMode::Free;
            if (mode != "free" && mode != "fix_k")
                throw ConfigError("detect_zws mode must be free or fix_k");
            return detect_zws(p, omega, k, make_cfg(tol), zm, refine, tolerance);
        },
        py::arg("profile"), py::arg("omega"), py::arg("k"), py::arg("mode") = "free",
        py::arg("refine") = true, py::arg("tolerance") = tol_zws, py::arg("tol") = 1e-12);

    py::class_<IsoBranch::Edge>(m, "IsoEdge")
        .def_readonly("k", &IsoBranch::Edge::k)
        .def_readonly("m", &IsoBranch::Edge::m)
        .def_readonly("tangent", &IsoBranch::Edge::tangent);

    py::class_<IsoBranch>(m, "IsoBranch")
        .def_readonly("j", &IsoBranch::j)
        .def_readonly("omega", &IsoBranch::omega)
        .def_readonly("points", &IsoBranch::points)
        .def_readonly("edges", &IsoBranch::edges)
        .def_readonly("closed", &IsoBranch::closed);

    m.def(
        "iso_branches",
        [](const MaterialProfile& p, double omega, double k_max, double tol) {
            return iso_branches(p, omega, k_max, make_cfg(tol));
        },
        py::arg("profile"), py::arg("omega"), py::arg("k_max"), py::arg("tol") = 1e-12);

    py::class_<IsoSlope>(m, "IsoSlope")
        .def_readonly("dK_dk", &IsoSlope::dK_dk)
        .def_readonly("d2k_dK2", &IsoSlope::d2k_dK2)
        .def_readonly("d2K_dk2", &IsoSlope::d2K_dk2)
        .def_readonly("m", &IsoSlope::m)
        .def_readonly("j", &IsoSlope::j)
        .def_property_readonly(
            "kind", [](const IsoSlope& s) { return std::string(slope_kind_name(s.kind)); });

    m.def(
        "dK_dk",
        [](const MaterialProfile& p, double omega, double k, double tol) {
            return dK_dk(p, omega, k, make_cfg(tol));
        },
        py::arg("profile"), py::arg("omega"), py::arg("k"), py::arg("tol") = 1e-12);

    py::class_<ConvexityCertificate>(m, "ConvexityCertificate")
        .def_readonly("omega", &ConvexityCertificate::omega)
        .def_readonly("k10", &ConvexityCertificate::k10)
        .def_readonly("bracket_lo", &ConvexityCertificate::bracket_lo)
        .def_readonly("bracket_hi", &ConvexityCertificate::bracket_hi)
        .def_readonly("k", &ConvexityCertificate::k)
        .def_readonly("h", &ConvexityCertificate::h)
        .def_readonly("min_h", &ConvexityCertificate::min_h)
        .def_readonly("lemma_ok", &ConvexityCertificate::lemma_ok)
        .def_readonly("bracket_ok", &ConvexityCertificate::bracket_ok)
        .def_readonly("passed", &ConvexityCertificate::passed);

    m.def(
        "convexity_certificate",
        [](const MaterialProfile& p, double omega, double tol) {
            return convexity_certificate(p, omega, make_cfg(tol));
        },
        py::arg("profile"), py::arg("omega"), py::arg("tol") = 1e-12);

    m.def("truncated_delta", &truncated_delta, py::arg("profile"), py::arg("omega"),
          py::arg("k"), py::arg("terms"));

    m.def(
        "truncated_series_isofreq",
        [](const MaterialProfile& p, double omega, int terms, double tol) {
            return truncated_series_isofreq(p, omega, terms, make_cfg(tol));
        },
        py::arg("profile"), py::arg("omega"), py::arg("terms"), py::arg("tol") = 1e-12);

    m.def("wkb_delta", &wkb_delta, py::arg("profile"), py::arg("omega"), py::arg("k"));

    py::class_<BoundReport>(m, "BoundReport")
        .def_readonly("omega2", &BoundReport::omega2)
        .def_readonly("k2", &BoundReport::k2)
        .def_readonly("bound", &BoundReport::bound_value)
        .def_readonly("actual", &BoundReport::actual_value)
        .def_readonly("satisfied", &BoundReport::satisfied);

    m.def(
        "bound_upper_envelope",
        [](const MaterialProfile& p, cplx omega2, cplx k2, double tol) {
            return bound_upper_envelope(p, omega2, k2, make_cfg(tol));
        },
        py::arg("profile"), py::arg("omega2"), py::arg("k2"), py::arg("tol") = 1e-12);

    m.def(
        "bound_evanescent",
        [](const MaterialProfile& p, double omega2, double k2, double tol) {
            return bound_evanescent(p, omega2, k2, make_cfg(tol));
        },
        py::arg("profile"), py::arg("omega2"), py::arg("k2"), py::arg("tol") = 1e-12);

    m.def(
        "first_eig_bounds",
        [](const MaterialProfile& p, double K, double k, double tol) {
            return first_eig_bounds(p, K, k, make_cfg(tol));
        },
        py::arg("profile"), py::arg("K"), py::arg("k"), py::arg("tol") = 1e-12);

    m.def(
        "green_tensor",
        [](const MaterialProfile& p, double y, double s, double K, cplx omega2, cplx k2,
           double tol) -> Mat2 { return green_tensor(p, y, s, K, omega2, k2, make_cfg(tol)); },
        py::arg("profile"), py::arg("y"), py::arg("s"), py::arg("K"), py::arg("omega2"),
        py::arg("k2"), py::arg("tol") = 1e-12);

    m.def(
        "resolvent_apply",
        [](const MaterialProfile& p, double K, const std::string& mode, cplx omega2, cplx k2,
           const std::vector<cplx>& g, double tol) {
            return resolvent_apply(p, K, parse_mode(mode), omega2, k2, g, make_cfg(tol));
        },
        py::arg("profile"), py::arg("K"), py::arg("mode"), py::arg("omega2"), py::arg("k2"),
        py::arg("g"), py::arg("tol") = 1e-12,
        "apply the quasi-periodic resolvent to g sampled on a uniform [0,1] grid");

    py::class_<BlochFunction>(m, "BlochFunction")
        .def_readonly("omega", &BlochFunction::omega)
        .def_readonly("K", &BlochFunction::K)
        .def_readonly("k", &BlochFunction::k)
        .def_readonly("n", &BlochFunction::n)
        .def_readonly("y", &BlochFunction::y)
        .def_readonly("u", &BlochFunction::u)
        .def_readonly("mu1_du", &BlochFunction::mu1_du)
        .def_readonly("qp_residual", &BlochFunction::qp_residual);

    m.def(
        "bloch_eigenfunction",
        [](const MaterialProfile& p, double K, double k, int n,
           const std::vector<double>& grid, double tol) {
            return bloch_eigenfunction(p, K, k, n, grid, make_cfg(tol));
        },
        py::arg("profile"), py::arg("K"), py::arg("k"), py::arg("n"), py::arg("grid"),
        py::arg("tol") = 1e-12);

    m.def(
        "high_k_limit",
        [](const MaterialProfile& p, double K, int n, const std::vector<double>& k_list,
           double tol) { return high_k_limit(p, K, n, k_list, make_cfg(tol)); },
        py::arg("profile"), py::arg("K"), py::arg("n"), py::arg("k_list"),
        py::arg("tol") = 1e-12);

    py::class_<CheckResult>(m, "CheckResult")
        .def_readonly("suite", &CheckResult::suite)
        .def_readonly("name", &CheckResult::name)
        .def_readonly("residual", &CheckResult::residual)
        .def_readonly("tolerance", &CheckResult::tolerance)
        .def_readonly("passed", &CheckResult::passed);

    m.def(
        "verify",
        [](const MaterialProfile& p, double tol) { return verify_all(p, make_cfg(tol)); },
        py::arg("profile"), py::arg("tol") = 1e-12);
}
