#include "rootshift/splitter.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace rootshift {

namespace {

double dist(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

}  // namespace

PolySystem apply_deformation(const PolySystem& sys, const Deformation& def) {
    if (def.H.empty()) return sys;
    if (static_cast<int>(def.H.size()) != sys.dim())
        throw std::invalid_argument("deformation dimension mismatch");
    std::vector<MultiPoly> polys;
    polys.reserve(sys.dim());
    for (int i = 0; i < sys.dim(); ++i) polys.push_back(sys.poly(i) + def.H[i]);
    return PolySystem(std::move(polys), sys.ell());
}

SupportSpec SupportSpec::dense_up_to(int n, int max_degree) {
    SupportSpec spec;
    spec.per_equation.assign(n, monomials_up_to_degree(n, max_degree));
    return spec;
}

Deformation random_deformation(const SupportSpec& spec, double magnitude, std::uint64_t seed) {
    Deformation def;
    def.magnitude = magnitude;
    def.seed = seed;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    const int n = static_cast<int>(spec.per_equation.size());
    for (int i = 0; i < n; ++i) {
        MultiPoly h(n);
        for (const auto& e : spec.per_equation[i]) h.add_term(e, unit(rng) * magnitude);
        def.H.push_back(std::move(h));
    }
    return def;
}

SplitReport split_multiple_roots(const PolySystem& sys, const Deformation& def, const Box& K,
                                 const SplitConfig& cfg) {
    SplitReport report;
    report.used = def;
    report.before = find_roots(sys, K, cfg.solve);
    if (report.before.multiple_count() == 0)
        throw std::invalid_argument("system has no multiple root in the box to split");

    if (cfg.probe_multiplicities) {
        ProbeConfig pc;
        pc.local_solve.seed = cfg.solve.seed;
        for (Root& r : report.before.roots) {
            if (!r.multiple) continue;
            const ProbeResult probe = probe_multiplicity(sys, r.x, pc);
            if (probe.count > 0) {
                r.multiplicity_estimate = probe.count;
                r.probed = true;
            }
        }
    }

    const PolySystem deformed = apply_deformation(sys, def);
    report.after = find_roots(deformed, K, cfg.solve);
    for (const Root& r : report.after.roots) {
        if (r.multiple) {
            std::ostringstream os;
            os << "deformed system still has a multiple root near (";
            for (std::size_t i = 0; i < r.x.size(); ++i) os << (i ? ", " : "") << r.x[i];
            os << "), |jf| ratio " << r.jf_ratio;
            throw SplitFailedError(os.str());
        }
    }

    // Assignment radius: small enough that distinct before-clusters cannot
    // swallow each other.
    double radius = cfg.cluster_radius;
    if (radius <= 0.0) {
        radius = 0.0;
        for (int i = 0; i < K.dim(); ++i) {
            const double w = K.hi(i) - K.lo(i);
            radius += w * w;
        }
        radius = std::sqrt(radius);  // box diagonal when only one before-root
        for (std::size_t a = 0; a < report.before.roots.size(); ++a)
            for (std::size_t b = a + 1; b < report.before.roots.size(); ++b)
                radius = std::min(radius, dist(report.before.roots[a].x, report.before.roots[b].x));
    }
    report.cluster_radius = radius;

    report.clusters.resize(report.before.roots.size());
    for (std::size_t i = 0; i < report.clusters.size(); ++i)
        report.clusters[i].before_index = static_cast<int>(i);
    for (std::size_t j = 0; j < report.after.roots.size(); ++j) {
        int nearest = -1;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < report.before.roots.size(); ++i) {
            const double d = dist(report.after.roots[j].x, report.before.roots[i].x);
            if (d < best) {
                best = d;
                nearest = static_cast<int>(i);
            }
        }
        if (nearest >= 0 && best <= radius)
            report.clusters[nearest].after_indices.push_back(static_cast<int>(j));
        else
            report.stray_after.push_back(static_cast<int>(j));
    }

    report.conservation_checked = true;
    for (const Root& r : report.before.roots)
        if (r.multiple && !r.probed) report.conservation_checked = false;
    report.expected_total = 0;
    for (const Root& r : report.before.roots) report.expected_total += r.multiplicity_estimate;
    report.conservation_ok = report.conservation_checked &&
                             report.expected_total == static_cast<int>(report.after.roots.size()) &&
                             report.stray_after.empty();
    return report;
}

SplitReport search_splitting_deformation(const PolySystem& sys, const SupportSpec& spec,
                                         double magnitude, const Box& K, const SplitConfig& cfg,
                                         int max_attempts, std::uint64_t seed) {
    std::string last_error = "no attempts made";
    for (int attempt = 0; attempt < max_attempts; ++attempt) {
        const Deformation def = random_deformation(spec, magnitude, seed + attempt);
        try {
            return split_multiple_roots(sys, def, K, cfg);
        } catch (const SplitFailedError& e) {
            last_error = e.what();
        }
    }
    throw SplitFailedError("no splitting deformation found in " + std::to_string(max_attempts) +
                           " attempts; last: " + last_error);
}

ProbeResult probe_multiplicity(const PolySystem& sys, std::span<const double> root,
                               const ProbeConfig& cfg) {
    const int n = sys.dim();
    Box local{std::vector<std::array<double, 2>>(n)};
    for (int i = 0; i < n; ++i)
        local.intervals[i] = {root[i] - cfg.local_radius, root[i] + cfg.local_radius};

    std::vector<Deformation> trials = cfg.explicit_trials;
    if (trials.empty()) {
        const SupportSpec spec = SupportSpec::dense_up_to(n, cfg.support_degree);
        for (int s = 0; s < cfg.seeds; ++s) {
            for (double mag : cfg.magnitudes) {
                Deformation d = random_deformation(spec, mag, cfg.seed + 1000 * s);
                trials.push_back(d);
                // Sign-paired twin: a double root splits to the real side
                // for exactly one of +-H in the x^2 - t picture.
                Deformation neg = d;
                for (auto& h : neg.H) h = -h;
                trials.push_back(std::move(neg));
            }
        }
    }

    ProbeResult result;
    result.seed = cfg.seed;
    for (const auto& def : trials) {
        const PolySystem deformed = apply_deformation(sys, def);
        const RootSet local_roots = find_roots(deformed, local, cfg.local_solve);
        int count = 0;
        for (const Root& r : local_roots.roots)
            if (!r.multiple && dist(r.x, root) <= cfg.local_radius) ++count;
        result.per_trial.push_back(count);
        result.count = std::max(result.count, count);
    }
    result.stable = true;
    for (int c : result.per_trial)
        if (c != 0 && c != result.count) result.stable = false;
    return result;
}

KovReport check_kov_conditions(const PolySystem& f, const PolySystem& big_f, double r,
                               const KovConfig& cfg) {
    const int n = f.dim();
    if (big_f.dim() != n) throw std::invalid_argument("systems must share dimension");
    if (!(r > 0.0)) throw std::invalid_argument("ball radius must be positive");

    // Pair equations in their input order: canonical (degree-sorted) order
    // can differ between f and F when the perturbation raises a degree.
    const std::vector<MultiPoly> f_rows = f.polys_in_input_order();
    const std::vector<MultiPoly> F_rows = big_f.polys_in_input_order();
    std::vector<MultiPoly> diff;
    diff.reserve(n);
    for (int i = 0; i < n; ++i) diff.push_back(F_rows[i] - f_rows[i]);
    PolyVecEvaluator diff_eval(diff);
    PolyVecEvaluator f_eval(f_rows), F_eval(F_rows);

    KovReport report;
    report.seed = cfg.seed;

    // Roots of f inside the ball, via the bounding box.
    const RootSet roots = find_roots(f, Box::symmetric(n, r), cfg.solve);
    report.min_boundary_distance = r;
    for (const Root& root : roots.roots) {
        double norm = 0.0;
        for (double v : root.x) norm += v * v;
        norm = std::sqrt(norm);
        if (norm <= r) {
            ++report.root_count;
            report.min_boundary_distance = std::min(report.min_boundary_distance, r - norm);
        }
    }

    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto ball_sample = [&](std::vector<double>& x) {
        double norm = 0.0;
        for (int i = 0; i < n; ++i) {
            x[i] = gauss(rng);
            norm += x[i] * x[i];
        }
        norm = std::sqrt(norm);
        const double rad = r * std::pow(unit(rng), 1.0 / n);
        for (int i = 0; i < n; ++i) x[i] = norm == 0.0 ? 0.0 : x[i] / norm * rad;
    };

    std::vector<double> x(n), y(n);
    Eigen::VectorXd d;
    Eigen::MatrixXd J;
    for (int s = 0; s < cfg.samples; ++s) {
        ball_sample(x);
        ball_sample(y);
        diff_eval.eval_f(x, d);

        for (int which = 0; which < 2; ++which) {
            const PolyVecEvaluator& ev = which == 0 ? f_eval : F_eval;
            ev.eval_jacobian(y, J);
            Eigen::JacobiSVD<Eigen::MatrixXd> svd(J, Eigen::ComputeThinU | Eigen::ComputeThinV);
            const double smax = svd.singularValues().maxCoeff();
            const double smin = svd.singularValues().minCoeff();
            if (smin <= cfg.rank_tol * smax) {
                std::ostringstream os;
                os << "sampled Jacobian of " << (which == 0 ? "f" : "F")
                   << " is rank deficient (sigma_min/sigma_max = "
                   << (smax == 0.0 ? 0.0 : smin / smax) << ")";
                throw RankDeficientError(os.str());
            }
            const Eigen::VectorXd c = svd.solve(d);
            const double comp = c.cwiseAbs().maxCoeff();
            (which == 0 ? report.epsilon_f : report.epsilon_big_f) =
                std::max(which == 0 ? report.epsilon_f : report.epsilon_big_f, comp);
        }
    }
    report.epsilon = std::max(report.epsilon_f, report.epsilon_big_f);
    report.pass = report.epsilon < report.min_boundary_distance;
    return report;
}

}  // namespace rootshift
