// Python bindings for the impedance-spectroscopy core. The surface mirrors
// the CLI workflows: scene handling, meshing, forward frames, multi-frequency
// difference imaging, rational-model recovery, and the contrast scalars.
//
// Conventions: points are (x, y) tuples, nodal and rim data are numpy arrays,
// frames keep their 16x16 complex matrix behind a .array property. build_mesh
// defaults to zero-width crack interfaces (the operational default of the
// CLI); pass resolve_crack_strips=True to mesh the strips as thin regions.

#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <complex>
#include <cstring>
#include <string>
#include <utility>
#include <vector>

#include "eis/asymptotics.hpp"
#include "eis/errors.hpp"
#include "eis/forward.hpp"
#include "eis/geometry.hpp"
#include "eis/io.hpp"
#include "eis/mesh.hpp"
#include "eis/reconstruct.hpp"
#include "eis/scene.hpp"
#include "eis/spectro.hpp"

namespace py = pybind11;

namespace pybind11 {
namespace detail {

// Vec2 <-> any 2-sequence (tuple, list, numpy row).
template <>
struct type_caster<eis::Vec2> {
    PYBIND11_TYPE_CASTER(eis::Vec2, const_name("tuple[float, float]"));

    bool load(handle src, bool) {
        if (!py::isinstance<py::sequence>(src) || py::isinstance<py::str>(src)) return false;
        auto seq = py::reinterpret_borrow<py::sequence>(src);
        if (seq.size() != 2) return false;
        try {
            value.x = seq[0].cast<double>();
            value.y = seq[1].cast<double>();
        } catch (const py::cast_error&) {
            return false;
        }
        return true;
    }

    static handle cast(const eis::Vec2& v, return_value_policy, handle) {
        return py::make_tuple(v.x, v.y).release();
    }
};

}  // namespace detail
}  // namespace pybind11

namespace {

using eis::Complex;

py::array_t<double> to_array(const std::vector<double>& v) {
    py::array_t<double> out(static_cast<py::ssize_t>(v.size()));
    std::memcpy(out.mutable_data(), v.data(), v.size() * sizeof(double));
    return out;
}

py::array_t<Complex> to_array(const std::vector<Complex>& v) {
    py::array_t<Complex> out(static_cast<py::ssize_t>(v.size()));
    std::memcpy(out.mutable_data(), v.data(), v.size() * sizeof(Complex));
    return out;
}

std::vector<double> to_dvec(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
    if (a.ndim() != 1) throw py::value_error("expected a 1-d array");
    return {a.data(), a.data() + a.size()};
}

std::vector<Complex> to_cvec(const py::array_t<Complex, py::array::c_style | py::array::forcecast>& a) {
    if (a.ndim() != 1) throw py::value_error("expected a 1-d array");
    return {a.data(), a.data() + a.size()};
}

py::array_t<Complex> frame_array(const eis::Frame& f) {
    const py::ssize_t n = static_cast<py::ssize_t>(f.v.size());
    py::array_t<Complex> out({n, n});
    auto w = out.mutable_unchecked<2>();
    for (py::ssize_t j = 0; j < n; ++j)
        for (py::ssize_t k = 0; k < n; ++k) w(j, k) = f.v[j][k];
    return out;
}

py::array_t<double> mesh_nodes(const eis::Mesh& m) {
    py::array_t<double> out({static_cast<py::ssize_t>(m.nodes.size()), py::ssize_t(2)});
    auto w = out.mutable_unchecked<2>();
    for (py::ssize_t i = 0; i < static_cast<py::ssize_t>(m.nodes.size()); ++i) {
        w(i, 0) = m.nodes[i].x;
        w(i, 1) = m.nodes[i].y;
    }
    return out;
}

py::array_t<int> mesh_tris(const eis::Mesh& m) {
    py::array_t<int> out({static_cast<py::ssize_t>(m.tris.size()), py::ssize_t(3)});
    auto w = out.mutable_unchecked<2>();
    for (py::ssize_t i = 0; i < static_cast<py::ssize_t>(m.tris.size()); ++i)
        for (py::ssize_t k = 0; k < 3; ++k) w(i, k) = m.tris[i].v[k];
    return out;
}

py::array_t<int> mesh_regions(const eis::Mesh& m) {
    py::array_t<int> out(static_cast<py::ssize_t>(m.tris.size()));
    auto w = out.mutable_unchecked<1>();
    for (py::ssize_t i = 0; i < static_cast<py::ssize_t>(m.tris.size()); ++i) w(i) = m.tris[i].region;
    return out;
}

py::dict separation_dict(const eis::SeparationReport& r) {
    py::dict d;
    d["crack_crack"] = r.crack_crack;
    d["crack_bar"] = r.crack_bar;
    d["bar_bar"] = r.bar_bar;
    d["crack_boundary"] = r.crack_boundary;
    d["bar_boundary"] = r.bar_boundary;
    return d;
}

eis::BoundarySamples make_samples(double radius,
                                  const py::array_t<double, py::array::c_style | py::array::forcecast>& theta,
                                  const py::array_t<double, py::array::c_style | py::array::forcecast>& values) {
    eis::BoundarySamples s;
    s.radius = radius;
    s.theta = to_dvec(theta);
    s.values = to_dvec(values);
    return s;
}

}  // namespace

PYBIND11_MODULE(_eisndt, m) {
    m.doc() =
        "Finite element and rational-model toolkit for multi-frequency electrical "
        "impedance imaging of insulating cracks and conducting bars in a disk.";
    m.attr("__version__") = "0.1.0";
    m.attr("NUM_ELECTRODES") = eis::kNumElectrodes;
    m.attr("VACUUM_PERMITTIVITY") = eis::kVacuumPermittivity;

    py::register_exception<eis::ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<eis::ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<eis::SolverError>(m, "SolverError", PyExc_RuntimeError);

    py::class_<eis::Material>(m, "Material")
        .def(py::init<>())
        .def(py::init([](double sigma, double epsilon) {
                 return eis::Material{sigma, epsilon};
             }),
             py::arg("sigma"), py::arg("epsilon"))
        .def_readwrite("sigma", &eis::Material::sigma)
        .def_readwrite("epsilon", &eis::Material::epsilon)
        .def("admittivity", &eis::Material::admittivity, py::arg("omega"))
        .def("__repr__", [](const eis::Material& v) {
            return "Material(sigma=" + std::to_string(v.sigma) +
                   ", epsilon=" + std::to_string(v.epsilon) + ")";
        });

    py::class_<eis::Crack>(m, "Crack")
        .def(py::init<>())
        .def(py::init([](std::vector<eis::Vec2> polyline, double half_thickness) {
                 eis::Crack c;
                 c.polyline = std::move(polyline);
                 c.half_thickness = half_thickness;
                 return c;
             }),
             py::arg("polyline"), py::arg("half_thickness"))
        .def_readwrite("polyline", &eis::Crack::polyline)
        .def_readwrite("half_thickness", &eis::Crack::half_thickness)
        .def("closed", &eis::Crack::closed)
        .def("length", &eis::Crack::length);

    py::class_<eis::Bar>(m, "Bar")
        .def(py::init<>())
        .def(py::init([](eis::Vec2 center, double radius) {
                 eis::Bar b;
                 b.center = center;
                 b.radius = radius;
                 return b;
             }),
             py::arg("center"), py::arg("radius"))
        .def_readwrite("center", &eis::Bar::center)
        .def_readwrite("radius", &eis::Bar::radius);

    py::class_<eis::Scene>(m, "Scene")
        .def(py::init<>())
        .def_readwrite("domain_radius", &eis::Scene::domain_radius)
        .def_readwrite("d0", &eis::Scene::d0)
        .def_readwrite("background", &eis::Scene::background)
        .def_readwrite("crack_material", &eis::Scene::crack_material)
        .def_readwrite("bar_material", &eis::Scene::bar_material)
        .def_readwrite("cracks", &eis::Scene::cracks)
        .def_readwrite("bars", &eis::Scene::bars)
        .def("__repr__", [](const eis::Scene& s) {
            return "Scene(R=" + std::to_string(s.domain_radius) + ", " +
                   std::to_string(s.cracks.size()) + " cracks, " + std::to_string(s.bars.size()) +
                   " bars)";
        });

    m.def("builtin_model", &eis::builtin_model, py::arg("model"),
          "Built-in test configuration 1, 2, or 3.");
    m.def("without_defects", &eis::without_defects, py::arg("scene"));
    m.def("with_crack_thickness", &eis::with_crack_thickness, py::arg("scene"), py::arg("delta"));
    m.def("scene_to_json", &eis::scene_to_json, py::arg("scene"));
    m.def("scene_from_json", &eis::scene_from_json, py::arg("text"));
    m.def(
        "validate_scene",
        [](const eis::Scene& s) { return separation_dict(eis::validate_scene(s)); },
        py::arg("scene"), "Check geometry and separation rules; returns the measured gaps.");
    m.def("region_at", &eis::region_at, py::arg("scene"), py::arg("p"),
          "Region id at a point: 0 background, then cracks, then bars.");
    m.def("admittivity_at", &eis::admittivity_at, py::arg("scene"), py::arg("p"), py::arg("omega"));

    py::class_<eis::Mesh>(m, "Mesh")
        .def_property_readonly("num_nodes", &eis::Mesh::n_nodes)
        .def_property_readonly("num_tris", &eis::Mesh::n_tris)
        .def_readonly("domain_radius", &eis::Mesh::domain_radius)
        .def_readonly("target_h", &eis::Mesh::target_h)
        .def_property_readonly("nodes", &mesh_nodes, "Node coordinates, shape (n_nodes, 2).")
        .def_property_readonly("triangles", &mesh_tris, "CCW node ids, shape (n_tris, 3).")
        .def_property_readonly("regions", &mesh_regions, "Per-triangle region id.")
        .def_property_readonly("num_interfaces",
                               [](const eis::Mesh& me) { return me.interfaces.size(); })
        .def("median_edge_length", [](const eis::Mesh& me) { return eis::median_edge_length(me); })
        .def("__repr__", [](const eis::Mesh& me) {
            return "Mesh(" + std::to_string(me.n_nodes()) + " nodes, " +
                   std::to_string(me.n_tris()) + " tris)";
        });

    m.def(
        "build_mesh",
        [](const eis::Scene& scene, double target_h, double electrode_coverage, int element_cap,
           bool resolve_crack_strips, double interface_spacing) {
            eis::MeshOptions o;
            o.target_h = target_h;
            o.electrode_coverage = electrode_coverage;
            o.element_cap = element_cap;
            o.resolve_crack_strips = resolve_crack_strips;
            o.interface_spacing = interface_spacing;
            return eis::build_mesh(scene, o);
        },
        py::arg("scene"), py::kw_only(), py::arg("target_h") = 0.0,
        py::arg("electrode_coverage") = 0.5, py::arg("element_cap") = 200000,
        py::arg("resolve_crack_strips") = false, py::arg("interface_spacing") = 0.0,
        "Deterministic mesh; target_h = 0 means domain_radius / 25.");

    m.def("rim_angles", &eis::rim_angles, py::arg("mesh"),
          "Rim node angles in [0, 2 pi), boundary order.");
    m.def(
        "rim_trace",
        [](const eis::Mesh& mesh, const py::array_t<Complex, py::array::c_style | py::array::forcecast>& u) {
            return to_array(eis::rim_trace(mesh, to_cvec(u)));
        },
        py::arg("mesh"), py::arg("u"), "Nodal field restricted to the rim, boundary order.");
    m.def(
        "boundary_perturbation",
        [](const eis::Mesh& mesh, const py::array_t<Complex, py::array::c_style | py::array::forcecast>& ud,
           const py::array_t<Complex, py::array::c_style | py::array::forcecast>& uh, Complex gamma_b) {
            return to_array(eis::boundary_perturbation(mesh, to_cvec(ud), to_cvec(uh), gamma_b));
        },
        py::arg("mesh"), py::arg("u_defect"), py::arg("u_homog"), py::arg("gamma_background"),
        "Rim defect signature -1/2 gamma_b (u_defect - u_homog), mean removed.");

    py::class_<eis::Frame>(m, "Frame")
        .def_readonly("frequency", &eis::Frame::frequency)
        .def_property_readonly("array", &frame_array,
                               "v[j][k]: voltage difference at pair k for drive pair j.")
        .def("__repr__", [](const eis::Frame& f) {
            return "Frame(frequency=" + std::to_string(f.frequency) + ")";
        });

    m.def("reciprocity_defect", &eis::reciprocity_defect, py::arg("frame"));
    m.def("telescope_defect", &eis::telescope_defect, py::arg("frame"));
    m.def("frame_max", &eis::frame_max, py::arg("frame"));

    py::class_<eis::ForwardSolver>(m, "ForwardSolver")
        .def(py::init([](const eis::Mesh& mesh, const eis::Scene& scene, double omega,
                         bool shunt_electrodes, bool homogenize) {
                 eis::ForwardOptions o;
                 o.shunt_electrodes = shunt_electrodes;
                 o.homogenize = homogenize;
                 return new eis::ForwardSolver(mesh, scene, omega, o);
             }),
             py::arg("mesh"), py::arg("scene"), py::arg("omega"), py::kw_only(),
             py::arg("shunt_electrodes") = false, py::arg("homogenize") = false,
             py::keep_alive<1, 2>(),
             "Factorized operator at one frequency; keeps the mesh alive.")
        .def("solve_pair",
             [](const eis::ForwardSolver& s, int j) { return to_array(s.solve_pair(j)); },
             py::arg("j"), "Nodal solution for the +1/-1 injection into electrodes (j, j+1).")
        .def("solve_continuous",
             [](const eis::ForwardSolver& s, const eis::Vec2& a) {
                 return to_array(s.solve_continuous(a));
             },
             py::arg("a"), "Nodal solution for the smooth rim drive g = a . nu.")
        .def("measure_frame", &eis::ForwardSolver::measure_frame)
        .def("interface_flux",
             [](const eis::ForwardSolver& s,
                const py::array_t<Complex, py::array::c_style | py::array::forcecast>& u, int chain) {
                 return to_array(s.interface_flux(to_cvec(u), chain));
             },
             py::arg("u"), py::arg("chain"))
        .def_property_readonly("omega", &eis::ForwardSolver::omega)
        .def_property_readonly("gamma_background", &eis::ForwardSolver::gamma_background);

    m.def(
        "disk_trace_operator",
        [](const py::array_t<Complex, py::array::c_style | py::array::forcecast>& w) {
            return to_array(eis::disk_trace_operator(to_cvec(w)));
        },
        py::arg("w"),
        "Trace integral operator on uniform rim samples: halves constants, kills mean-free data.");

    m.def(
        "strip_signature",
        [](const eis::Scene& scene, double omega, const eis::Vec2& a, const std::vector<eis::Vec2>& pts) {
            return to_array(eis::strip_signature(scene, omega, a, pts));
        },
        py::arg("scene"), py::arg("omega"), py::arg("a"), py::arg("points"),
        "First-order thin-strip and bar-dipole signature at the given points.");

    py::class_<eis::MeromorphicModel>(m, "MeromorphicModel")
        .def_property_readonly("cracks",
                               [](const eis::MeromorphicModel& mm) {
                                   py::list out;
                                   for (const auto& t : mm.cracks) out.append(py::make_tuple(t.p, t.q, t.c));
                                   return out;
                               },
                               "(p, q, c) per crack term: endpoints and log strength.")
        .def_property_readonly("bars",
                               [](const eis::MeromorphicModel& mm) {
                                   py::list out;
                                   for (const auto& t : mm.bars) out.append(py::make_tuple(t.z, t.d));
                                   return out;
                               },
                               "(z, d) per bar term: center and dipole strength.")
        .def("evaluate", &eis::MeromorphicModel::evaluate, py::arg("X"))
        .def("derivative", &eis::MeromorphicModel::derivative, py::arg("X"))
        .def("__repr__", [](const eis::MeromorphicModel& mm) {
            return "MeromorphicModel(" + std::to_string(mm.cracks.size()) + " crack terms, " +
                   std::to_string(mm.bars.size()) + " bar terms)";
        });

    m.def("model_from_scene", &eis::model_from_scene, py::arg("scene"), py::arg("omega"),
          py::arg("a"), py::arg("real_channel"),
          "Rational boundary model of one signature channel (cracks must be straight).");

    m.def(
        "harmonic_moments",
        [](double radius, const py::array_t<double, py::array::c_style | py::array::forcecast>& theta,
           const py::array_t<double, py::array::c_style | py::array::forcecast>& values, int count) {
            return to_array(eis::harmonic_moments(make_samples(radius, theta, values), count));
        },
        py::arg("radius"), py::arg("theta"), py::arg("values"), py::arg("count"),
        "Scaled harmonic moments of one uniformly sampled rim channel.");

    m.def(
        "recover_terms",
        [](double radius, const py::array_t<double, py::array::c_style | py::array::forcecast>& theta,
           const py::array_t<double, py::array::c_style | py::array::forcecast>& values, int n_cracks,
           int n_bars) {
            return eis::recover_terms(make_samples(radius, theta, values), n_cracks, n_bars);
        },
        py::arg("radius"), py::arg("theta"), py::arg("values"), py::arg("n_cracks"),
        py::arg("n_bars"),
        "Prony-type recovery of crack endpoints and bar centers from one rim channel.");

    m.def("lambda_c", &eis::lambda_c, py::arg("crack"), py::arg("background"), py::arg("omega"),
          "Crack contrast gamma_c / gamma_b.");
    m.def("lambda_d", &eis::lambda_d, py::arg("bar"), py::arg("background"), py::arg("omega"),
          "Bar contrast scalar entering the disk polarization strength.");
    m.def(
        "classify_regime",
        [](double crack_half_thickness, const eis::Material& crack, const eis::Material& background,
           double omega, double c0, double beta_lo, double beta_hi) {
            eis::RegimeThresholds thr;
            thr.c0 = c0;
            thr.beta_lo = beta_lo;
            thr.beta_hi = beta_hi;
            return eis::regime_name(
                eis::classify_regime(crack_half_thickness, crack, background, omega, thr));
        },
        py::arg("crack_half_thickness"), py::arg("crack"), py::arg("background"), py::arg("omega"),
        py::kw_only(), py::arg("c0") = 1e-3, py::arg("beta_lo") = 1e-3, py::arg("beta_hi") = 1e3,
        "Frequency regime of a crack: 'High', 'Low', or 'Intermediate'.");

    py::class_<eis::SensitivityMatrix>(m, "SensitivityMatrix")
        .def_readonly("rows", &eis::SensitivityMatrix::rows)
        .def_readonly("cols", &eis::SensitivityMatrix::cols)
        .def_property_readonly("array", [](const eis::SensitivityMatrix& s) {
            py::array_t<double> out({static_cast<py::ssize_t>(s.rows), static_cast<py::ssize_t>(s.cols)});
            std::memcpy(out.mutable_data(), s.a.data(), s.a.size() * sizeof(double));
            return out;
        });

    m.def("sensitivity_matrix", &eis::sensitivity_matrix, py::arg("mesh"),
          "Linearized voltage sensitivity to per-triangle admittivity changes.");

    py::class_<eis::AdmittivityImage>(m, "AdmittivityImage")
        .def_readonly("frequency", &eis::AdmittivityImage::frequency)
        .def_readonly("alpha", &eis::AdmittivityImage::alpha)
        .def_property_readonly("delta_sigma",
                               [](const eis::AdmittivityImage& im) { return to_array(im.delta_sigma); })
        .def_property_readonly("delta_epsilon",
                               [](const eis::AdmittivityImage& im) { return to_array(im.delta_epsilon); })
        .def("__repr__", [](const eis::AdmittivityImage& im) {
            return "AdmittivityImage(frequency=" + std::to_string(im.frequency) + ", " +
                   std::to_string(im.delta_sigma.size()) + " triangles)";
        });

    m.def(
        "reconstruct_frame",
        [](const eis::SensitivityMatrix& S, const eis::Frame& frame, const eis::Frame& reference,
           double alpha_rel, bool use_tsvd, int tsvd_rank) {
            eis::ReconstructionOptions o;
            o.alpha_rel = alpha_rel;
            o.use_tsvd = use_tsvd;
            o.tsvd_rank = tsvd_rank;
            return eis::reconstruct_frame(S, frame, reference, o);
        },
        py::arg("sensitivity"), py::arg("frame"), py::arg("reference"), py::kw_only(),
        py::arg("alpha_rel") = 1e-4, py::arg("use_tsvd") = false, py::arg("tsvd_rank") = 48,
        "Regularized difference image from a frame and its defect-free reference.");

    m.def(
        "sweep",
        [](const eis::Scene& scene, const eis::Mesh& mesh, const std::vector<double>& frequencies,
           double alpha_rel, bool use_tsvd, int tsvd_rank, const eis::Mesh* inverse_mesh) {
            eis::SweepOptions o;
            o.recon.alpha_rel = alpha_rel;
            o.recon.use_tsvd = use_tsvd;
            o.recon.tsvd_rank = tsvd_rank;
            o.inverse_mesh = inverse_mesh;
            return eis::sweep(scene, mesh, frequencies, o);
        },
        py::arg("scene"), py::arg("mesh"), py::arg("frequencies"), py::kw_only(),
        py::arg("alpha_rel") = 1e-4, py::arg("use_tsvd") = false, py::arg("tsvd_rank") = 48,
        py::arg("inverse_mesh") = static_cast<const eis::Mesh*>(nullptr),
        "Difference image per frequency; images live on inverse_mesh when given.");

    m.def(
        "visibility",
        [](const eis::AdmittivityImage& image, const eis::Scene& scene, const eis::Mesh& mesh) {
            const eis::VisibilityScores v = eis::visibility(image, scene, mesh);
            py::dict d;
            d["crack"] = to_array(v.crack);
            d["bar"] = to_array(v.bar);
            d["background_median"] = v.background_median;
            return d;
        },
        py::arg("image"), py::arg("scene"), py::arg("mesh"),
        "Per-defect contrast-to-background scores of the delta_sigma channel.");
}
