// rootshift: certify safe perturbation sizes for polynomial systems, track
// their roots along the deformation, and split multiple roots.
//
// Exit codes: 0 success, 1 usage or I/O error, 2 certification or
// verification failure.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>

#include "rootshift/homotopy.hpp"
#include "rootshift/io.hpp"
#include "rootshift/splitter.hpp"

using nlohmann::json;
using namespace rootshift;

namespace {

constexpr std::uint64_t kDefaultSeed = 20240061u;

struct Options {
    std::string input;
    std::optional<double> t;
    std::string box_spec;
    std::optional<double> ball_r;
    std::optional<double> tol;
    std::uint64_t seed = kDefaultSeed;
    int grid = 16;
    int k = 0;       // 0 = search for the minimal certified power
    int k_cap = 20;
    bool probe = false;
    std::string out;
    std::string format = "json";
};

Box parse_box_spec(const std::string& spec, int n) {
    // Either a single radius r (meaning [-r, r]^n) or comma-separated
    // lo:hi pairs, one per variable.
    if (spec.find(':') == std::string::npos) {
        return Box::symmetric(n, std::stod(spec));
    }
    std::vector<std::array<double, 2>> iv;
    std::stringstream ss(spec);
    std::string part;
    while (std::getline(ss, part, ',')) {
        const auto colon = part.find(':');
        if (colon == std::string::npos) throw ParseError("--box expects lo:hi pairs");
        iv.push_back({std::stod(part.substr(0, colon)), std::stod(part.substr(colon + 1))});
    }
    if (static_cast<int>(iv.size()) != n) throw ParseError("--box needs one interval per variable");
    return Box(std::move(iv));
}

Box resolve_box(const SystemFile& file, const Options& opts) {
    if (!opts.box_spec.empty()) return parse_box_spec(opts.box_spec, file.sys.dim());
    if (file.box) return *file.box;
    throw ParseError("no box: give one in the input file or with --box");
}

SolveConfig solve_config(const Options& opts) {
    SolveConfig cfg;
    cfg.seed = opts.seed;
    cfg.grid_per_axis = opts.grid;
    if (opts.tol) cfg.accept_residual = *opts.tol;
    return cfg;
}

void emit(const Options& opts, const json& payload, const std::string& csv = "") {
    std::ostream* os = &std::cout;
    std::ofstream of;
    if (!opts.out.empty()) {
        of.open(opts.out);
        if (!of) throw ParseError("cannot write '" + opts.out + "'");
        os = &of;
    }
    if (opts.format == "csv" && !csv.empty())
        *os << csv;
    else
        *os << payload.dump(2) << "\n";
}

json envelope(const char* command, const Options& opts) {
    return json{{"command", command}, {"input", opts.input}, {"seed", opts.seed}};
}

// The deformed system selected by --t: the perturbation block when present,
// otherwise t times the deformation block.
PolySystem system_at_t(const SystemFile& file, double t) {
    if (t == 0.0) return file.sys;
    if (file.perturbation) return perturbed_system(file.sys, *file.perturbation, t);
    if (file.deformation) {
        Deformation def;
        def.magnitude = t;
        for (const auto& h : *file.deformation) def.H.push_back(h * t);
        return apply_deformation(file.sys, def);
    }
    throw ParseError("--t needs a perturbation or deformation block in the input file");
}

int cmd_check_ideal(const Options& opts) {
    const SystemFile file = parse_system_file(opts.input);
    CertifyOptions copts;
    if (opts.tol) copts.tolerance = *opts.tol;

    json j = envelope("check-ideal", opts);
    j["ell"] = file.sys.ell();
    j["lattice"] = to_json(lattice_check(file.sys.distinguished()));
    j["convenient"] = is_convenient(file.sys.distinguished());

    std::optional<IdealCertificate> cert;
    if (opts.k > 0) {
        CertifyFailure failure;
        cert = try_certify_ideal_power(file.sys, opts.k, copts, &failure);
        if (!cert) {
            j["certified"] = false;
            j["k"] = opts.k;
            j["worst_monomial"] = failure.worst_monomial;
            j["worst_residual"] = failure.residual;
        }
    } else {
        const auto k = minimal_certified_k(file.sys, opts.k_cap, copts);
        if (k)
            cert = try_certify_ideal_power(file.sys, *k, copts);
        else {
            j["certified"] = false;
            j["k"] = nullptr;
            j["cap"] = opts.k_cap;
        }
    }
    if (cert) {
        j["certified"] = true;
        j["k"] = cert->k;
        j["certificate"] = to_json(*cert);
    }
    emit(opts, j);
    return cert ? 0 : 2;
}

int cmd_bound(const Options& opts) {
    const SystemFile file = parse_system_file(opts.input);
    if (!file.perturbation) throw ParseError("bound needs a perturbation block");
    const Box K = resolve_box(file, opts);

    CertifyOptions copts;
    if (opts.tol) copts.tolerance = *opts.tol;
    std::optional<IdealCertificate> cert;
    if (opts.k > 0) {
        cert = try_certify_ideal_power(file.sys, opts.k, copts);
    } else if (const auto k = minimal_certified_k(file.sys, opts.k_cap, copts)) {
        cert = try_certify_ideal_power(file.sys, *k, copts);
    }
    json j = envelope("bound", opts);
    if (!cert) {
        j["certified"] = false;
        emit(opts, j);
        return 2;
    }
    PerturbationSpec pert = *file.perturbation;
    pert.k = cert->k;
    j["certified"] = true;
    const BoundReport report = make_bound_report(*cert, pert, K);
    j["bound"] = to_json(report);
    json violations = json::array();
    for (const auto& e : pert.support_violations()) violations.push_back(e);
    j["phi_support_violations"] = std::move(violations);
    emit(opts, j);
    return 0;
}

int cmd_solve(const Options& opts) {
    const SystemFile file = parse_system_file(opts.input);
    const Box K = resolve_box(file, opts);
    const PolySystem sys = system_at_t(file, opts.t.value_or(0.0));
    const RootSet roots = find_roots(sys, K, solve_config(opts));

    json j = envelope("solve", opts);
    j["t"] = opts.t.value_or(0.0);
    j["roots"] = to_json(roots);
    std::ostringstream csv;
    write_roots_csv(csv, roots);
    emit(opts, j, csv.str());
    return 0;
}

int cmd_track(const Options& opts) {
    const SystemFile file = parse_system_file(opts.input);
    if (!file.perturbation) throw ParseError("track needs a perturbation block");
    if (!opts.t) throw ParseError("track needs --t");
    const Box K = resolve_box(file, opts);

    // When the system certifies, report whether t sits under the bound.
    std::optional<double> t_star;
    if (const auto k = minimal_certified_k(file.sys, opts.k_cap)) {
        const IdealCertificate cert = certify_ideal_power(file.sys, *k);
        PerturbationSpec pert = *file.perturbation;
        pert.k = cert.k;
        if (pert.k_prime >= cert.k + 1) t_star = make_bound_report(cert, pert, K).t_star;
    }

    const InvarianceReport report = verify_root_count_invariance(
        file.sys, *file.perturbation, *opts.t, K, solve_config(opts), TrackConfig{}, t_star);
    json j = envelope("track", opts);
    j["t"] = *opts.t;
    j["invariance"] = to_json(report);
    std::ostringstream csv;
    write_paths_csv(csv, report.tracks);
    emit(opts, j, csv.str());

    bool ok = report.counts_match && report.bijection;
    for (const auto& t : report.tracks)
        if (t.status != TrackStatus::Completed) ok = false;
    return ok ? 0 : 2;
}

int cmd_split(const Options& opts) {
    const SystemFile file = parse_system_file(opts.input);
    const Box K = resolve_box(file, opts);
    const double t = opts.t.value_or(0.5);

    SplitConfig cfg;
    cfg.solve = solve_config(opts);
    cfg.probe_multiplicities = opts.probe;

    SplitReport report = [&] {
        if (file.deformation) {
            Deformation def;
            def.magnitude = t;
            for (const auto& h : *file.deformation) def.H.push_back(h * t);
            return split_multiple_roots(file.sys, def, K, cfg);
        }
        // No declared deformation: search random directions over degree <= 1.
        return search_splitting_deformation(
            file.sys, SupportSpec::dense_up_to(file.sys.dim(), 1), t, K, cfg, 8, opts.seed);
    }();

    json j = envelope("split", opts);
    j["t"] = t;
    j["split"] = to_json(report);
    std::ostringstream csv;
    write_roots_csv(csv, report.after);
    emit(opts, j, csv.str());
    return 0;
}

int cmd_check_kov(const Options& opts) {
    const SystemFile file = parse_system_file(opts.input);
    double r = 0.0;
    if (opts.ball_r)
        r = *opts.ball_r;
    else if (file.ball_r)
        r = *file.ball_r;
    else
        throw ParseError("check-kov needs --ball-r or a ball in the input file");

    const PolySystem big_f = system_at_t(file, opts.t.value_or(0.0));
    KovConfig cfg;
    cfg.seed = opts.seed;
    cfg.solve = solve_config(opts);
    const KovReport report = check_kov_conditions(file.sys, big_f, r, cfg);

    json j = envelope("check-kov", opts);
    j["t"] = opts.t.value_or(0.0);
    j["kov"] = to_json(report);
    emit(opts, j);
    return report.pass ? 0 : 2;
}

int cmd_report(const Options& opts) {
    const SystemFile file = parse_system_file(opts.input);
    json j = envelope("report", opts);
    j["system"] = to_json(file);

    j["lattice"] = to_json(lattice_check(file.sys.distinguished()));
    j["convenient"] = is_convenient(file.sys.distinguished());

    CertifyOptions copts;
    std::optional<IdealCertificate> cert;
    if (const auto k = minimal_certified_k(file.sys, opts.k_cap, copts))
        cert = try_certify_ideal_power(file.sys, *k, copts);
    j["certified"] = cert.has_value();
    if (cert) {
        j["k"] = cert->k;
        j["mu"] = cert->mu;
        j["certificate_residual"] = cert->residual;
    }

    std::optional<Box> K;
    try {
        K = resolve_box(file, opts);
    } catch (const ParseError&) {
    }
    if (K) {
        const RootSet roots = find_roots(file.sys, *K, solve_config(opts));
        j["roots"] = to_json(roots);
        if (cert && file.perturbation) {
            PerturbationSpec pert = *file.perturbation;
            pert.k = cert->k;
            if (pert.k_prime >= cert->k + 1) {
                j["bound"] = to_json(make_bound_report(*cert, pert, *K));
                json violations = json::array();
                for (const auto& e : pert.support_violations()) violations.push_back(e);
                j["phi_support_violations"] = std::move(violations);
            } else {
                j["bound"] = nullptr;
                j["bound_note"] = "phi has total degree below k + 1; no window to bound";
            }
        }
    }
    emit(opts, j);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"perturbation bounds, root tracking and multiple-root splitting for "
                 "polynomial systems"};
    app.require_subcommand(1);

    Options opts;
    auto add_common = [&](CLI::App* cmd, bool needs_input = true) {
        if (needs_input) cmd->add_option("input", opts.input, "input system JSON")->required();
        cmd->add_option("--t", opts.t, "perturbation magnitude");
        cmd->add_option("--box", opts.box_spec, "box: radius or lo:hi,lo:hi,...");
        cmd->add_option("--ball-r", opts.ball_r, "ball radius");
        cmd->add_option("--tol", opts.tol, "main tolerance of the command")
            ->check(CLI::PositiveNumber);
        cmd->add_option("--seed", opts.seed, "64-bit seed for all randomness");
        cmd->add_option("--grid", opts.grid, "multistart grid points per axis")
            ->check(CLI::PositiveNumber);
        cmd->add_option("--out", opts.out, "write the report here instead of stdout");
        cmd->add_option("--format", opts.format, "json or csv")
            ->check(CLI::IsMember({"json", "csv"}));
    };

    auto* check_ideal = app.add_subcommand("check-ideal", "gradient-ideal membership certificate");
    add_common(check_ideal);
    check_ideal->add_option("--k", opts.k, "certify exactly this power");
    check_ideal->add_option("--k-cap", opts.k_cap, "search cap for the minimal power");

    auto* bound = app.add_subcommand("bound", "safe perturbation bound t*");
    add_common(bound);
    bound->add_option("--k", opts.k, "certify exactly this power");
    bound->add_option("--k-cap", opts.k_cap, "search cap for the minimal power");

    auto* solve = app.add_subcommand("solve", "real roots in a box");
    add_common(solve);

    auto* track = app.add_subcommand("track", "follow roots along the deformation");
    add_common(track);

    auto* split = app.add_subcommand("split", "split multiple roots into simple ones");
    add_common(split);
    split->add_flag("--probe", opts.probe, "probe multiplicities before splitting");

    auto* kov = app.add_subcommand("check-kov", "sampled deformation conditions on a ball");
    add_common(kov);

    auto* report = app.add_subcommand("report", "full pipeline report");
    add_common(report);
    report->add_option("--k-cap", opts.k_cap, "search cap for the minimal power");

    CLI11_PARSE(app, argc, argv);

    try {
        if (check_ideal->parsed()) return cmd_check_ideal(opts);
        if (bound->parsed()) return cmd_bound(opts);
        if (solve->parsed()) return cmd_solve(opts);
        if (track->parsed()) return cmd_track(opts);
        if (split->parsed()) return cmd_split(opts);
        if (kov->parsed()) return cmd_check_kov(opts);
        if (report->parsed()) return cmd_report(opts);
    } catch (const SplitFailedError& e) {
        std::cerr << "split failed: " << e.what() << "\n";
        return 2;
    } catch (const RankDeficientError& e) {
        std::cerr << "check-kov: " << e.what() << "\n";
        return 2;
    } catch (const NotInIdealError& e) {
        std::cerr << "certification failed: " << e.what() << "\n";
        return 2;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
