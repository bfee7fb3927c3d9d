#include "rootshift/homotopy.hpp"

#include <algorithm>
#include <cmath>

namespace rootshift {

namespace {

// Evaluator for F_tau = f + tau * direction at varying tau.
class DeformedEvaluator {
public:
    DeformedEvaluator(const PolySystem& sys, const std::vector<MultiPoly>& direction)
        : n_(sys.dim()), base_(sys.polys()), pert_(direction) {
        if (static_cast<int>(direction.size()) != n_)
            throw std::invalid_argument("deformation direction dimension mismatch");
    }

    int dim() const { return n_; }

    void eval_f(std::span<const double> x, double tau, Eigen::VectorXd& out) const {
        base_.eval_f(x, out);
        pert_.eval_f(x, tmp_v_);
        out += tau * tmp_v_;
    }
    void eval_jacobian(std::span<const double> x, double tau, Eigen::MatrixXd& out) const {
        base_.eval_jacobian(x, out);
        pert_.eval_jacobian(x, tmp_m_);
        out += tau * tmp_m_;
    }
    void eval_phi_vec(std::span<const double> x, Eigen::VectorXd& out) const {
        pert_.eval_f(x, out);
    }

private:
    int n_;
    PolyVecEvaluator base_, pert_;
    mutable Eigen::VectorXd tmp_v_;
    mutable Eigen::MatrixXd tmp_m_;
};

struct Spectrum {
    double smin = 0.0;
    double smax = 0.0;
    double cond() const {
        return smin == 0.0 ? std::numeric_limits<double>::infinity() : smax / smin;
    }
};

Spectrum singular_values(const Eigen::MatrixXd& J) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(J);
    return {svd.singularValues().minCoeff(), svd.singularValues().maxCoeff()};
}

double det_of(const Eigen::MatrixXd& J) {
    if (J.rows() == 1) return J(0, 0);
    if (J.rows() == 2) return J(0, 0) * J(1, 1) - J(0, 1) * J(1, 0);
    return Eigen::PartialPivLU<Eigen::MatrixXd>(J).determinant();
}

}  // namespace

const char* to_string(TrackStatus s) {
    switch (s) {
        case TrackStatus::Completed: return "Completed";
        case TrackStatus::CrashSuspected: return "CrashSuspected";
        case TrackStatus::LeftBox: return "LeftBox";
        case TrackStatus::SingularJacobian: return "SingularJacobian";
    }
    return "?";
}

PolySystem perturbed_system(const PolySystem& sys, const PerturbationSpec& pert, double tau) {
    if (pert.phi.var_count() != sys.dim())
        throw std::invalid_argument("perturbation dimension mismatch");
    if (tau == 0.0) return sys;
    std::vector<MultiPoly> polys;
    polys.reserve(sys.dim());
    for (int i = 0; i < sys.dim(); ++i) polys.push_back(sys.poly(i) + pert.row_poly(i) * tau);
    return PolySystem(std::move(polys), sys.ell());
}

TrackReport track_path(const PolySystem& sys, const PerturbationSpec& pert,
                       std::span<const double> root, double t_from, double t_to,
                       const TrackConfig& cfg, const Box* K) {
    std::vector<MultiPoly> direction;
    direction.reserve(sys.dim());
    for (int i = 0; i < sys.dim(); ++i) direction.push_back(pert.row_poly(i));
    return track_path(sys, direction, root, t_from, t_to, cfg, K);
}

std::vector<MultiPoly> deformation_direction(const PolySystem& f, const PolySystem& big_f) {
    if (f.dim() != big_f.dim()) throw std::invalid_argument("systems must share dimension");
    const std::vector<MultiPoly> f_rows = f.polys_in_input_order();
    const std::vector<MultiPoly> F_rows = big_f.polys_in_input_order();
    std::vector<MultiPoly> direction(f.dim(), MultiPoly(f.dim()));
    for (int j = 1; j <= f.dim(); ++j)
        direction[f.canonical_index(j) - 1] = F_rows[j - 1] - f_rows[j - 1];
    return direction;
}

TrackReport track_path(const PolySystem& sys, const std::vector<MultiPoly>& direction,
                       std::span<const double> root, double t_from, double t_to,
                       const TrackConfig& cfg, const Box* K) {
    const int n = sys.dim();
    if (static_cast<int>(root.size()) != n) throw std::invalid_argument("root dimension mismatch");
    DeformedEvaluator eval(sys, direction);

    TrackReport report;
    report.start.assign(root.begin(), root.end());
    report.min_abs_jf = std::numeric_limits<double>::infinity();

    Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(root.data(), n);
    Eigen::VectorXd f, phi, xn;
    Eigen::MatrixXd J;

    auto span_of = [n](const Eigen::VectorXd& v) {
        return std::span<const double>(v.data(), static_cast<std::size_t>(n));
    };

    // Newton corrector at fixed tau; returns the final residual (negative
    // when it failed to converge) and the iterations it took.
    struct Corrected {
        double res;
        int iters;
    };
    auto correct = [&](Eigen::VectorXd& y, double tau) -> Corrected {
        for (int it = 0; it < cfg.corrector_max_iterations; ++it) {
            eval.eval_f(span_of(y), tau, f);
            const double res = f.cwiseAbs().maxCoeff();
            if (res <= cfg.corrector_tol) return {res, it};
            eval.eval_jacobian(span_of(y), tau, J);
            Eigen::PartialPivLU<Eigen::MatrixXd> lu(J);
            const Eigen::VectorXd step = lu.solve(-f);
            if (!step.allFinite()) return {-1.0, it};
            y += step;
        }
        eval.eval_f(span_of(y), tau, f);
        const double res = f.cwiseAbs().maxCoeff();
        return {res <= cfg.corrector_tol ? res : -1.0, cfg.corrector_max_iterations};
    };

    auto record = [&](double tau, double step, double res) {
        PathPoint p;
        p.tau = tau;
        p.x.assign(x.data(), x.data() + n);
        eval.eval_jacobian(span_of(x), tau, J);
        p.jf_value = det_of(J);
        p.step = step;
        p.residual = res;
        report.min_abs_jf = std::min(report.min_abs_jf, std::abs(p.jf_value));
        report.max_residual = std::max(report.max_residual, res);
        report.path.push_back(std::move(p));
    };

    double tau = t_from;
    // Settle the start point onto the tau = t_from level set.
    {
        const auto c = correct(x, tau);
        if (c.res < 0.0)
            throw std::invalid_argument("start point is not a root of the tau-start system");
        record(tau, 0.0, c.res);
    }
    eval.eval_jacobian(span_of(x), tau, J);
    const double smin_start = singular_values(J).smin;

    const double range = t_to - t_from;
    auto finish = [&](TrackStatus status) {
        report.status = status;
        report.end.assign(x.data(), x.data() + n);
        report.tau_reached = tau;
        return report;
    };
    if (range == 0.0) return finish(TrackStatus::Completed);

    double h = range * cfg.initial_step_fraction;
    const double hmax = std::abs(range) * cfg.max_step_fraction;

    while (tau != t_to) {
        // Clip the last step to land exactly on t_to.
        double step = h;
        if (std::abs(t_to - tau) <= std::abs(step)) step = t_to - tau;

        // Euler predictor along the Davidenko field.
        eval.eval_jacobian(span_of(x), tau, J);
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(J);
        eval.eval_phi_vec(span_of(x), phi);
        Eigen::VectorXd v = lu.solve(-phi);
        bool predictor_ok = v.allFinite();

        xn = predictor_ok ? (x + step * v).eval() : x;
        const auto c = correct(xn, tau + step);
        if (c.res >= 0.0) {
            x = xn;
            tau += step;
            record(tau, step, c.res);
            if (K && !K->contains(span_of(x), 1e-9)) return finish(TrackStatus::LeftBox);
            if (step == h && c.iters <= 4 && std::abs(h) < hmax) h *= 2.0;
            if (std::abs(h) > hmax) h = std::copysign(hmax, range);
        } else {
            h *= 0.5;
            if (std::abs(h) < cfg.min_step) {
                eval.eval_jacobian(span_of(x), tau, J);
                const Spectrum s = singular_values(J);
                const bool singular = s.cond() > cfg.condition_limit ||
                                      s.smin <= cfg.singular_collapse * smin_start;
                return finish(singular ? TrackStatus::SingularJacobian
                                       : TrackStatus::CrashSuspected);
            }
        }
    }
    return finish(TrackStatus::Completed);
}

std::vector<PathCollision> detect_path_collisions(const std::vector<TrackReport>& reports,
                                                  double radius, double jf_tol) {
    std::vector<PathCollision> out;
    if (reports.empty()) return out;

    // Shared tau grid across the overlap of all paths.
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const auto& r : reports) {
        if (r.path.empty()) continue;
        lo = std::min(lo, std::min(r.path.front().tau, r.path.back().tau));
        hi = std::max(hi, std::max(r.path.front().tau, r.path.back().tau));
    }
    if (!(lo < hi)) hi = lo + 1.0;
    const int grid = 129;

    auto sample = [](const TrackReport& r, double tau) -> std::vector<double> {
        const auto& p = r.path;
        if (p.empty()) return {};
        if (tau <= p.front().tau) return p.front().x;
        if (tau >= p.back().tau) return p.back().x;
        for (std::size_t i = 1; i < p.size(); ++i) {
            if (tau <= p[i].tau) {
                const double w = (tau - p[i - 1].tau) / (p[i].tau - p[i - 1].tau);
                std::vector<double> x(p[i].x.size());
                for (std::size_t d = 0; d < x.size(); ++d)
                    x[d] = (1.0 - w) * p[i - 1].x[d] + w * p[i].x[d];
                return x;
            }
        }
        return p.back().x;
    };

    for (std::size_t a = 0; a < reports.size(); ++a) {
        if (reports[a].min_abs_jf < jf_tol) {
            PathCollision c;
            c.path_a = c.path_b = static_cast<int>(a);
            c.jf_degenerate = true;
            c.min_distance = 0.0;
            out.push_back(c);
        }
        for (std::size_t b = a + 1; b < reports.size(); ++b) {
            double best = std::numeric_limits<double>::infinity();
            double best_tau = lo;
            for (int g = 0; g < grid; ++g) {
                const double tau = lo + (hi - lo) * g / (grid - 1);
                const auto xa = sample(reports[a], tau);
                const auto xb = sample(reports[b], tau);
                if (xa.empty() || xb.empty()) continue;
                double d2 = 0.0;
                for (std::size_t i = 0; i < xa.size(); ++i)
                    d2 += (xa[i] - xb[i]) * (xa[i] - xb[i]);
                const double d = std::sqrt(d2);
                if (d < best) {
                    best = d;
                    best_tau = tau;
                }
            }
            if (best < radius) {
                PathCollision c;
                c.path_a = static_cast<int>(a);
                c.path_b = static_cast<int>(b);
                c.min_distance = best;
                c.tau = best_tau;
                out.push_back(c);
            }
        }
    }
    return out;
}

InvarianceReport verify_root_count_invariance(const PolySystem& sys, const PerturbationSpec& pert,
                                              double t, const Box& K, const SolveConfig& solve_cfg,
                                              const TrackConfig& track_cfg,
                                              std::optional<double> t_star) {
    InvarianceReport report;
    report.t_star = t_star;
    report.bound_respected = !t_star || t < *t_star;

    report.roots_start = find_roots(sys, K, solve_cfg);
    report.count_start = static_cast<int>(report.roots_start.roots.size());
    report.multiple_at_start = report.roots_start.multiple_count();

    for (const auto& r : report.roots_start.roots) {
        if (r.multiple) continue;  // the theorem tracks simple roots
        report.tracks.push_back(track_path(sys, pert, r.x, 0.0, t, track_cfg, &K));
    }

    const PolySystem deformed = perturbed_system(sys, pert, t);
    report.roots_end = find_roots(deformed, K, solve_cfg);
    report.count_end = static_cast<int>(report.roots_end.roots.size());
    report.counts_match = report.count_start == report.count_end;

    // Endpoint-to-resolve bijection within the dedup radius.
    const double match_r = solve_cfg.dedup_radius;
    std::vector<bool> used(report.roots_end.roots.size(), false);
    bool bijection = true;
    for (const auto& tr : report.tracks) {
        if (tr.status != TrackStatus::Completed) {
            bijection = false;
            continue;
        }
        bool matched = false;
        for (std::size_t j = 0; j < report.roots_end.roots.size(); ++j) {
            if (used[j]) continue;
            double d2 = 0.0;
            for (std::size_t i = 0; i < tr.end.size(); ++i) {
                const double d = tr.end[i] - report.roots_end.roots[j].x[i];
                d2 += d * d;
            }
            if (d2 <= match_r * match_r) {
                used[j] = true;
                matched = true;
                break;
            }
        }
        if (!matched) bijection = false;
    }
    report.bijection = bijection && report.tracks.size() == report.roots_end.roots.size();

    // Minimum separation between distinct tracked paths.
    report.min_path_separation = std::numeric_limits<double>::infinity();
    for (const auto& c : detect_path_collisions(report.tracks,
                                                std::numeric_limits<double>::infinity(), 0.0))
        if (c.path_a != c.path_b)
            report.min_path_separation = std::min(report.min_path_separation, c.min_distance);
    report.collisions = detect_path_collisions(report.tracks, solve_cfg.dedup_radius, 1e-6);
    return report;
}

}  // namespace rootshift
