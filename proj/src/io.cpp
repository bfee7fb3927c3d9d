#include "rootshift/io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

namespace rootshift {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& context, const std::string& what) {
    throw ParseError(context + ": " + what);
}

const json& need(const json& j, const char* key, const std::string& context) {
    if (!j.is_object() || !j.contains(key)) fail(context, std::string("missing field '") + key + "'");
    return j.at(key);
}

}  // namespace

MultiPoly poly_from_json(const json& j, int n, const std::string& context) {
    if (!j.is_array()) fail(context, "polynomial must be an array of {coeff, exp} terms");
    MultiPoly p(n);
    int t = 0;
    for (const auto& term : j) {
        const std::string tctx = context + ".term[" + std::to_string(t++) + "]";
        const json& coeff = need(term, "coeff", tctx);
        const json& exp = need(term, "exp", tctx);
        if (!coeff.is_number()) fail(tctx, "coeff must be a number");
        if (!exp.is_array() || static_cast<int>(exp.size()) != n)
            fail(tctx, "exp must be an array of length n");
        Exponents e(n);
        for (int i = 0; i < n; ++i) {
            if (!exp[i].is_number_integer() || exp[i].get<int>() < 0)
                fail(tctx, "exponents must be non-negative integers");
            e[i] = exp[i].get<int>();
        }
        p.add_term(e, coeff.get<double>());
    }
    return p;
}

SystemFile parse_system_json(const json& j) {
    const std::string top = "input";
    const json& jn = need(j, "n", top);
    if (!jn.is_number_integer() || jn.get<int>() < 1) fail(top, "n must be a positive integer");
    const int n = jn.get<int>();

    const json& jp = need(j, "polynomials", top);
    if (!jp.is_array() || jp.empty()) fail(top, "polynomials must be a non-empty array");
    if (static_cast<int>(jp.size()) != n)
        fail(top, "system must be square: expected " + std::to_string(n) + " polynomials");
    std::vector<MultiPoly> polys;
    for (std::size_t i = 0; i < jp.size(); ++i) {
        MultiPoly p = poly_from_json(jp[i], n, "polynomials[" + std::to_string(i) + "]");
        if (p.is_zero()) fail(top, "polynomials[" + std::to_string(i) + "] is the zero polynomial");
        polys.push_back(std::move(p));
    }

    int ell = 1;
    if (j.contains("ell")) {
        if (!j["ell"].is_number_integer()) fail(top, "ell must be an integer");
        ell = j["ell"].get<int>();
        if (ell < 1 || ell > n) fail(top, "ell out of range");
    }

    SystemFile file;
    file.sys = PolySystem(std::move(polys), ell);

    if (j.contains("variables")) {
        const json& jv = j["variables"];
        if (!jv.is_array() || static_cast<int>(jv.size()) != n)
            fail(top, "variables must list n names");
        for (const auto& v : jv) file.variables.push_back(v.get<std::string>());
    } else {
        for (int i = 0; i < n; ++i) file.variables.push_back("x" + std::to_string(i + 1));
    }

    if (j.contains("perturbation")) {
        const std::string ctx = "perturbation";
        const json& jpert = j[ctx];
        MultiPoly phi = poly_from_json(need(jpert, "phi", ctx), n, ctx + ".phi");
        if (phi.is_zero()) fail(ctx, "phi is the zero polynomial");
        PerturbationSpec spec;
        if (jpert.contains("F")) {
            const json& jf = jpert["F"];
            if (!jf.is_array() || static_cast<int>(jf.size()) != n) fail(ctx, "F must be n x n");
            Eigen::MatrixXd F(n, n);
            for (int r = 0; r < n; ++r) {
                if (!jf[r].is_array() || static_cast<int>(jf[r].size()) != n)
                    fail(ctx, "F must be n x n");
                for (int c = 0; c < n; ++c) F(r, c) = jf[r][c].get<double>();
            }
            // Rows of F follow the file's equation order; remap to canonical.
            Eigen::MatrixXd Fc(n, n);
            for (int r = 1; r <= n; ++r) Fc.row(file.sys.canonical_index(r) - 1) = F.row(r - 1);
            Eigen::JacobiSVD<Eigen::MatrixXd> svd(Fc);
            const double smin = svd.singularValues().minCoeff();
            if (smin <= 0.0 || svd.singularValues().maxCoeff() / smin > 1e12)
                fail(ctx, "F must be invertible (condition number below 1e12)");
            spec.phi = std::move(phi);
            spec.F = std::move(Fc);
            spec.k_prime = spec.phi.total_degree().value_or(0);
        } else {
            std::vector<int> rows;
            if (jpert.contains("rows")) {
                for (const auto& r : jpert["rows"]) {
                    if (!r.is_number_integer()) fail(ctx, "rows must be integers");
                    const int row = r.get<int>();
                    if (row < 1 || row > n) fail(ctx, "row index out of range");
                    rows.push_back(file.sys.canonical_index(row));
                }
            } else {
                rows.push_back(1);
            }
            spec = PerturbationSpec::for_rows(std::move(phi), rows, n);
        }
        file.perturbation = std::move(spec);
    }

    if (j.contains("deformation")) {
        const std::string ctx = "deformation";
        const json& jh = need(j[ctx], "H", ctx);
        if (!jh.is_array() || static_cast<int>(jh.size()) != n)
            fail(ctx, "H must list one polynomial per equation");
        std::vector<MultiPoly> H_input;
        for (int i = 0; i < n; ++i)
            H_input.push_back(poly_from_json(jh[i], n, ctx + ".H[" + std::to_string(i) + "]"));
        std::vector<MultiPoly> H(n, MultiPoly(n));
        for (int i = 1; i <= n; ++i) H[file.sys.canonical_index(i) - 1] = std::move(H_input[i - 1]);
        file.deformation = std::move(H);
    }

    if (j.contains("box")) {
        const json& jb = j["box"];
        if (!jb.is_array() || static_cast<int>(jb.size()) != n)
            fail(top, "box must list n [lo, hi] intervals");
        std::vector<std::array<double, 2>> iv;
        for (const auto& pair : jb) {
            if (!pair.is_array() || pair.size() != 2) fail(top, "box entries must be [lo, hi]");
            iv.push_back({pair[0].get<double>(), pair[1].get<double>()});
            if (!(iv.back()[0] <= iv.back()[1])) fail(top, "box interval with lo > hi");
        }
        file.box = Box(std::move(iv));
    }

    if (j.contains("ball")) {
        const json& jb = j["ball"];
        double r = 0.0;
        if (jb.is_number())
            r = jb.get<double>();
        else if (jb.is_object() && jb.contains("r"))
            r = jb["r"].get<double>();
        else
            fail(top, "ball must be a radius or {r: radius}");
        if (!(r > 0.0)) fail(top, "ball radius must be positive");
        file.ball_r = r;
    }
    return file;
}

SystemFile parse_system_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParseError("invalid JSON in '" + path + "': " + e.what());
    }
    return parse_system_json(j);
}

json to_json(const MultiPoly& p) {
    json terms = json::array();
    for (const auto& [e, c] : p.terms()) terms.push_back({{"coeff", c}, {"exp", e}});
    return terms;
}

json to_json(const Box& box) {
    json j = json::array();
    for (const auto& iv : box.intervals) j.push_back({iv[0], iv[1]});
    return j;
}

json to_json(const SystemFile& file) {
    json j;
    j["n"] = file.sys.dim();
    j["variables"] = file.variables;
    j["ell"] = file.sys.ell();
    json polys = json::array();
    for (const auto& p : file.sys.polys()) polys.push_back(to_json(p));
    j["polynomials"] = std::move(polys);
    j["degrees"] = file.sys.degrees();
    if (file.perturbation) {
        json pert;
        pert["phi"] = to_json(file.perturbation->phi);
        json F = json::array();
        for (int r = 0; r < file.sys.dim(); ++r) {
            json row = json::array();
            for (int c = 0; c < file.sys.dim(); ++c) row.push_back(file.perturbation->F(r, c));
            F.push_back(std::move(row));
        }
        pert["F"] = std::move(F);
        j["perturbation"] = std::move(pert);
    }
    if (file.deformation) {
        json H = json::array();
        for (const auto& h : *file.deformation) H.push_back(to_json(h));
        j["deformation"] = {{"H", std::move(H)}};
    }
    if (file.box) j["box"] = to_json(*file.box);
    if (file.ball_r) j["ball"] = {{"r", *file.ball_r}};
    return j;
}

json to_json(const LatticeReport& report) {
    json j;
    j["difference_vectors"] = report.difference_vectors;
    if (report.index)
        j["index"] = *report.index;
    else
        j["index"] = "infinite";
    j["passes"] = report.passes();
    return j;
}

json to_json(const IdealCertificate& cert) {
    json j;
    j["ell"] = cert.ell;
    j["k"] = cert.k;
    j["mu"] = cert.mu;
    j["residual"] = cert.residual;
    json entries = json::array();
    for (const auto& e : cert.entries) {
        json row;
        row["monomial"] = e.monomial;
        json cof = json::array();
        for (const auto& h : e.cofactors) cof.push_back(to_json(h));
        row["cofactors"] = std::move(cof);
        row["residual"] = e.residual;
        entries.push_back(std::move(row));
    }
    j["entries"] = std::move(entries);
    return j;
}

json to_json(const BoundReport& report) {
    return json{{"phi_norm", report.phi_norm},
                {"C", report.c_rigorous},
                {"C_sampled", report.c_sampled},
                {"mu", report.mu},
                {"t_star", report.t_star},
                {"k", report.k},
                {"k_prime", report.k_prime},
                {"ell", report.ell},
                {"certificate_residual", report.certificate_residual},
                {"box", to_json(report.box)}};
}

json to_json(const Root& root) {
    return json{{"x", root.x},
                {"residual", root.residual},
                {"jf", root.jf_value},
                {"jf_ratio", root.jf_ratio},
                {"class", root.multiple ? "multiple" : "simple"},
                {"multiplicity_estimate", root.multiplicity_estimate},
                {"probed", root.probed},
                {"cluster_members", root.cluster_members}};
}

json to_json(const RootSet& roots) {
    json j;
    json list = json::array();
    for (const auto& r : roots.roots) list.push_back(to_json(r));
    j["roots"] = std::move(list);
    j["count"] = roots.roots.size();
    j["simple"] = roots.simple_count();
    j["multiple"] = roots.multiple_count();
    j["box"] = to_json(roots.box);
    j["diagnostics"] = {{"starts", roots.diagnostics.starts},
                        {"accepted_endpoints", roots.diagnostics.accepted_endpoints},
                        {"newton_iterations", roots.diagnostics.newton_iterations},
                        {"merges", roots.diagnostics.merges},
                        {"seed", roots.diagnostics.seed}};
    return j;
}

json to_json(const TrackReport& report) {
    json j;
    j["start"] = report.start;
    j["end"] = report.end;
    j["status"] = to_string(report.status);
    j["tau_reached"] = report.tau_reached;
    j["min_abs_jf"] = report.min_abs_jf;
    j["max_residual"] = report.max_residual;
    j["points"] = report.path.size();
    return j;
}

json to_json(const InvarianceReport& report) {
    json j;
    j["count_start"] = report.count_start;
    j["count_end"] = report.count_end;
    j["multiple_at_start"] = report.multiple_at_start;
    j["counts_match"] = report.counts_match;
    j["bijection"] = report.bijection;
    j["min_path_separation"] = report.min_path_separation;
    if (report.t_star) j["t_star"] = *report.t_star;
    j["bound_respected"] = report.bound_respected;
    json tracks = json::array();
    for (const auto& t : report.tracks) tracks.push_back(to_json(t));
    j["tracks"] = std::move(tracks);
    json collisions = json::array();
    for (const auto& c : report.collisions)
        collisions.push_back({{"path_a", c.path_a},
                              {"path_b", c.path_b},
                              {"min_distance", c.min_distance},
                              {"tau", c.tau},
                              {"jf_degenerate", c.jf_degenerate}});
    j["collisions"] = std::move(collisions);
    return j;
}

json to_json(const SplitReport& report) {
    json j;
    j["before"] = to_json(report.before);
    j["after"] = to_json(report.after);
    j["cluster_radius"] = report.cluster_radius;
    json clusters = json::array();
    for (const auto& c : report.clusters)
        clusters.push_back({{"before_index", c.before_index}, {"after_indices", c.after_indices}});
    j["clusters"] = std::move(clusters);
    j["stray_after"] = report.stray_after;
    j["conservation_checked"] = report.conservation_checked;
    j["conservation_ok"] = report.conservation_ok;
    j["expected_total"] = report.expected_total;
    j["deformation_seed"] = report.used.seed;
    j["deformation_magnitude"] = report.used.magnitude;
    return j;
}

json to_json(const ProbeResult& probe) {
    return json{{"count", probe.count},
                {"stable", probe.stable},
                {"per_trial", probe.per_trial},
                {"seed", probe.seed}};
}

json to_json(const KovReport& report) {
    return json{{"epsilon_f", report.epsilon_f},
                {"epsilon_F", report.epsilon_big_f},
                {"epsilon", report.epsilon},
                {"min_boundary_distance", report.min_boundary_distance},
                {"root_count", report.root_count},
                {"pass", report.pass},
                {"seed", report.seed}};
}

void write_roots_csv(std::ostream& os, const RootSet& roots) {
    const int n = roots.box.dim();
    for (int i = 0; i < n; ++i) os << "x" << (i + 1) << ",";
    os << "residual,jf,class,multiplicity,cluster_members\n";
    os << std::setprecision(17);
    for (const auto& r : roots.roots) {
        for (double v : r.x) os << v << ",";
        os << r.residual << "," << r.jf_value << "," << (r.multiple ? "multiple" : "simple") << ","
           << r.multiplicity_estimate << "," << r.cluster_members << "\n";
    }
}

void write_paths_csv(std::ostream& os, const std::vector<TrackReport>& reports) {
    if (reports.empty()) {
        os << "path,tau,jf,step,residual\n";
        return;
    }
    const std::size_t n = reports.front().start.size();
    os << "path,tau,";
    for (std::size_t i = 0; i < n; ++i) os << "x" << (i + 1) << ",";
    os << "jf,step,residual\n";
    os << std::setprecision(17);
    for (std::size_t p = 0; p < reports.size(); ++p) {
        for (const auto& point : reports[p].path) {
            os << p << "," << point.tau << ",";
            for (double v : point.x) os << v << ",";
            os << point.jf_value << "," << point.step << "," << point.residual << "\n";
        }
    }
}

}  // namespace rootshift
