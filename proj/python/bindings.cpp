// Python bindings for the rootshift core: polynomial construction, ideal
// certification, the perturbation bound, root finding, homotopy tracking
// and multiple-root splitting.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "rootshift/homotopy.hpp"
#include "rootshift/io.hpp"
#include "rootshift/splitter.hpp"

namespace py = pybind11;
using namespace rootshift;

namespace {

MultiPoly poly_from_terms(int n, const std::vector<std::pair<std::vector<int>, double>>& terms) {
    MultiPoly p(n);
    for (const auto& [e, c] : terms) p.add_term(e, c);
    return p;
}

std::vector<std::pair<std::vector<int>, double>> poly_terms(const MultiPoly& p) {
    std::vector<std::pair<std::vector<int>, double>> out;
    for (const auto& [e, c] : p.terms()) out.emplace_back(e, c);
    return out;
}

Eigen::MatrixXd matrix_from_rows(const std::vector<std::vector<double>>& rows) {
    const int n = static_cast<int>(rows.size());
    Eigen::MatrixXd M(n, n);
    for (int i = 0; i < n; ++i) {
        if (static_cast<int>(rows[i].size()) != n) throw std::invalid_argument("matrix must be square");
        for (int j = 0; j < n; ++j) M(i, j) = rows[i][j];
    }
    return M;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "perturbation bounds, root tracking and multiple-root splitting "
              "for polynomial systems";

    py::class_<MultiPoly>(m, "MultiPoly")
        .def(py::init(&poly_from_terms), py::arg("n"), py::arg("terms"))
        .def_property_readonly("n", &MultiPoly::var_count)
        .def("terms", &poly_terms)
        .def("evaluate",
             [](const MultiPoly& p, const std::vector<double>& x) { return p.evaluate(x); })
        .def("partial", &MultiPoly::partial, py::arg("var"))
        .def("weighted_norm", &MultiPoly::weighted_norm)
        .def("total_degree",
             [](const MultiPoly& p) -> py::object {
                 const auto d = p.total_degree();
                 return d ? py::cast(*d) : py::none();
             })
        .def("__add__", [](const MultiPoly& a, const MultiPoly& b) { return a + b; })
        .def("__sub__", [](const MultiPoly& a, const MultiPoly& b) { return a - b; })
        .def("__mul__", [](const MultiPoly& a, const MultiPoly& b) { return a * b; })
        .def("__rmul__", [](const MultiPoly& a, double s) { return a * s; })
        .def("__repr__", &MultiPoly::to_string);

    py::class_<Box>(m, "Box")
        .def(py::init([](const std::vector<std::pair<double, double>>& iv) {
                 std::vector<std::array<double, 2>> v;
                 for (auto [lo, hi] : iv) v.push_back({lo, hi});
                 return Box(std::move(v));
             }),
             py::arg("intervals"))
        .def_static("symmetric", &Box::symmetric, py::arg("n"), py::arg("r"))
        .def_property_readonly("dim", &Box::dim);

    py::class_<PolySystem>(m, "PolySystem")
        .def(py::init<std::vector<MultiPoly>, int>(), py::arg("polys"), py::arg("ell") = 1)
        .def_property_readonly("n", &PolySystem::dim)
        .def_property_readonly("degrees", &PolySystem::degrees)
        .def_property_readonly("ell", &PolySystem::ell)
        .def("canonical_index", &PolySystem::canonical_index)
        .def("poly", &PolySystem::poly, py::return_value_policy::copy);

    py::class_<PerturbationSpec>(m, "PerturbationSpec")
        .def_static(
            "for_rows",
            [](MultiPoly phi, const std::vector<int>& rows, int n, int k) {
                return PerturbationSpec::for_rows(std::move(phi), rows, n, k);
            },
            py::arg("phi"), py::arg("rows"), py::arg("n"), py::arg("k") = 0)
        .def_readwrite("k", &PerturbationSpec::k)
        .def_readonly("k_prime", &PerturbationSpec::k_prime);

    m.def("monomial_count", &monomial_count, py::arg("n"), py::arg("k"));
    m.def("is_convenient", &is_convenient);
    m.def(
        "lattice_index",
        [](const MultiPoly& f) -> py::object {
            const auto report = lattice_check(f);
            return report.index ? py::cast(*report.index) : py::none();
        },
        "lattice index of the top-degree support differences, None when infinite");

    py::class_<IdealCertificate>(m, "IdealCertificate")
        .def_readonly("k", &IdealCertificate::k)
        .def_readonly("ell", &IdealCertificate::ell)
        .def_readonly("mu", &IdealCertificate::mu)
        .def_readonly("residual", &IdealCertificate::residual);

    m.def(
        "certify_ideal_power",
        [](const PolySystem& sys, int k, double tol) {
            CertifyOptions opts;
            opts.tolerance = tol;
            return certify_ideal_power(sys, k, opts);
        },
        py::arg("sys"), py::arg("k"), py::arg("tol") = 1e-9);
    m.def(
        "minimal_certified_k",
        [](const PolySystem& sys, int cap) -> py::object {
            const auto k = minimal_certified_k(sys, cap);
            return k ? py::cast(*k) : py::none();
        },
        py::arg("sys"), py::arg("cap") = 20);

    m.def(
        "certificate_constant",
        [](const IdealCertificate& cert, const Box& K, int k_prime) {
            const auto c = certificate_constant(cert, K, k_prime);
            return py::make_tuple(c.rigorous, c.sampled);
        },
        py::arg("cert"), py::arg("box"), py::arg("k_prime"),
        "(rigorous upper bound, grid-sampled estimate)");
    m.def("perturbation_bound", &perturbation_bound, py::arg("phi_norm"), py::arg("c"),
          py::arg("mu"));
    m.def(
        "lemma1_invertible",
        [](const std::vector<std::vector<double>>& A) {
            const auto r = lemma1_invertible(matrix_from_rows(A));
            return py::make_tuple(r.invertible, r.via_hypothesis);
        },
        "(invertible, decided_by_entry_bound)");

    py::class_<Root>(m, "Root")
        .def_readonly("x", &Root::x)
        .def_readonly("residual", &Root::residual)
        .def_readonly("jf", &Root::jf_value)
        .def_readonly("multiple", &Root::multiple)
        .def_readonly("multiplicity_estimate", &Root::multiplicity_estimate)
        .def_readonly("cluster_members", &Root::cluster_members)
        .def("__repr__", [](const Root& r) {
            std::string s = "Root([";
            for (std::size_t i = 0; i < r.x.size(); ++i)
                s += (i ? ", " : "") + std::to_string(r.x[i]);
            return s + (r.multiple ? "], multiple)" : "], simple)");
        });

    py::class_<RootSet>(m, "RootSet")
        .def_readonly("roots", &RootSet::roots)
        .def("simple_count", &RootSet::simple_count)
        .def("multiple_count", &RootSet::multiple_count)
        .def("__len__", [](const RootSet& r) { return r.roots.size(); });

    m.def(
        "find_roots",
        [](const PolySystem& sys, const Box& K, int grid, std::uint64_t seed) {
            SolveConfig cfg;
            cfg.grid_per_axis = grid;
            cfg.seed = seed;
            return find_roots(sys, K, cfg);
        },
        py::arg("sys"), py::arg("box"), py::arg("grid") = 16, py::arg("seed") = 20240061u);
    m.def("jacobian_det",
          [](const PolySystem& sys, const std::vector<double>& x) { return jacobian_det(sys, x); });

    m.def(
        "perturbed_system",
        [](const PolySystem& sys, const PerturbationSpec& pert, double tau) {
            return perturbed_system(sys, pert, tau);
        },
        py::arg("sys"), py::arg("pert"), py::arg("tau"));

    py::class_<TrackReport>(m, "TrackReport")
        .def_readonly("start", &TrackReport::start)
        .def_readonly("end", &TrackReport::end)
        .def_readonly("min_abs_jf", &TrackReport::min_abs_jf)
        .def_readonly("max_residual", &TrackReport::max_residual)
        .def_property_readonly("status",
                               [](const TrackReport& r) { return to_string(r.status); });

    m.def(
        "track_path",
        [](const PolySystem& sys, const PerturbationSpec& pert, const std::vector<double>& root,
           double t_from, double t_to) { return track_path(sys, pert, root, t_from, t_to); },
        py::arg("sys"), py::arg("pert"), py::arg("root"), py::arg("t_from"), py::arg("t_to"));
    m.def(
        "track_between",
        [](const PolySystem& f, const PolySystem& big_f, const std::vector<double>& root) {
            return track_path(f, deformation_direction(f, big_f), root, 0.0, 1.0);
        },
        py::arg("f"), py::arg("F"), py::arg("root"),
        "continue a simple root of f into a root of F along f + tau (F - f)");

    py::class_<InvarianceReport>(m, "InvarianceReport")
        .def_readonly("count_start", &InvarianceReport::count_start)
        .def_readonly("count_end", &InvarianceReport::count_end)
        .def_readonly("counts_match", &InvarianceReport::counts_match)
        .def_readonly("bijection", &InvarianceReport::bijection)
        .def_readonly("min_path_separation", &InvarianceReport::min_path_separation);

    m.def(
        "verify_root_count_invariance",
        [](const PolySystem& sys, const PerturbationSpec& pert, double t, const Box& K) {
            return verify_root_count_invariance(sys, pert, t, K);
        },
        py::arg("sys"), py::arg("pert"), py::arg("t"), py::arg("box"));

    py::class_<Deformation>(m, "Deformation")
        .def(py::init([](const std::vector<MultiPoly>& H, double magnitude) {
                 Deformation d;
                 d.H = H;
                 d.magnitude = magnitude;
                 return d;
             }),
             py::arg("H"), py::arg("magnitude") = 0.0);

    py::class_<SplitReport>(m, "SplitReport")
        .def_readonly("before", &SplitReport::before)
        .def_readonly("after", &SplitReport::after)
        .def_readonly("conservation_ok", &SplitReport::conservation_ok)
        .def_readonly("expected_total", &SplitReport::expected_total);

    m.def(
        "apply_deformation",
        [](const PolySystem& sys, const Deformation& d) { return apply_deformation(sys, d); },
        py::arg("sys"), py::arg("deformation"));
    m.def(
        "split_multiple_roots",
        [](const PolySystem& sys, const Deformation& d, const Box& K, bool probe) {
            SplitConfig cfg;
            cfg.probe_multiplicities = probe;
            return split_multiple_roots(sys, d, K, cfg);
        },
        py::arg("sys"), py::arg("deformation"), py::arg("box"), py::arg("probe") = false);
    m.def(
        "probe_multiplicity",
        [](const PolySystem& sys, const std::vector<double>& root) {
            const auto r = probe_multiplicity(sys, root);
            return py::make_tuple(r.count, r.stable);
        },
        py::arg("sys"), py::arg("root"), "(count, stable)");

    py::class_<KovReport>(m, "KovReport")
        .def_readonly("epsilon", &KovReport::epsilon)
        .def_readonly("epsilon_f", &KovReport::epsilon_f)
        .def_readonly("epsilon_F", &KovReport::epsilon_big_f)
        .def_readonly("min_boundary_distance", &KovReport::min_boundary_distance)
        .def_readonly("pass_", &KovReport::pass)
        .def_readonly("root_count", &KovReport::root_count);

    m.def(
        "check_kov_conditions",
        [](const PolySystem& f, const PolySystem& big_f, double r, int samples,
           std::uint64_t seed) {
            KovConfig cfg;
            cfg.samples = samples;
            cfg.seed = seed;
            return check_kov_conditions(f, big_f, r, cfg);
        },
        py::arg("f"), py::arg("F"), py::arg("r"), py::arg("samples") = 10000,
        py::arg("seed") = 99991u);

    m.def("parse_system_file", [](const std::string& path) {
        const SystemFile file = parse_system_file(path);
        py::dict out;
        out["system"] = file.sys;
        if (file.perturbation) out["perturbation"] = *file.perturbation;
        if (file.box) out["box"] = *file.box;
        return out;
    });

    py::register_exception<NotInIdealError>(m, "NotInIdealError");
    py::register_exception<SplitFailedError>(m, "SplitFailedError");
    py::register_exception<RankDeficientError>(m, "RankDeficientError");
    py::register_exception<ParseError>(m, "ParseError");
}
