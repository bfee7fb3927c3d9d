#include "rootshift/rootfind.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace rootshift {

namespace {

double dist2(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return s;
}

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) {
        for (int i = 0; i < n; ++i) parent[i] = i;
    }
    int find(int i) {
        while (parent[i] != i) i = parent[i] = parent[parent[i]];
        return i;
    }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

double hadamard_row_bound(const Eigen::MatrixXd& J) {
    double p = 1.0;
    for (Eigen::Index i = 0; i < J.rows(); ++i) p *= J.row(i).cwiseAbs().sum();
    return p;
}

// |det J| relative to the row-sum Hadamard bound at x; ~1 is perfectly
// conditioned, ~0 is singular. Scale-free in both x and f.
double jacobian_ratio(const Eigen::MatrixXd& J, double& det_out) {
    det_out = J.rows() == 2 ? J(0, 0) * J(1, 1) - J(0, 1) * J(1, 0)
                            : Eigen::PartialPivLU<Eigen::MatrixXd>(J).determinant();
    const double had = hadamard_row_bound(J);
    if (had == 0.0) return det_out == 0.0 ? 0.0 : 1.0;
    return std::abs(det_out) / had;
}

// Gaussian elimination with partial pivoting in double-double. Returns
// false when a pivot vanishes; det always reflects the eliminated rows.
bool dd_solve(std::vector<std::vector<DD>> M, std::vector<DD> rhs, std::vector<DD>& x, DD& det) {
    const int n = static_cast<int>(M.size());
    det = DD(1.0);
    for (int c = 0; c < n; ++c) {
        int piv = c;
        for (int i = c + 1; i < n; ++i)
            if (abs(M[i][c]) > abs(M[piv][c])) piv = i;
        if (piv != c) {
            std::swap(M[c], M[piv]);
            std::swap(rhs[c], rhs[piv]);
            det = -det;
        }
        det *= M[c][c];
        if (M[c][c].hi == 0.0) return false;
        for (int i = c + 1; i < n; ++i) {
            const DD m = M[i][c] / M[c][c];
            for (int j = c; j < n; ++j) M[i][j] -= m * M[c][j];
            rhs[i] -= m * rhs[c];
        }
    }
    x.resize(n);
    for (int i = n - 1; i >= 0; --i) {
        DD s = rhs[i];
        for (int j = i + 1; j < n; ++j) s -= M[i][j] * x[j];
        x[i] = s / M[i][i];
    }
    return true;
}

// jacobian_ratio evaluated in double-double at a double-double point: near
// a multiple root the double-precision determinant is cancellation noise,
// which would make a well-polished candidate look regular.
double jacobian_ratio_dd(const PolyVecEvaluator& eval, const std::vector<DD>& xd,
                         double& det_out) {
    const int n = eval.dim();
    std::vector<DD> Jdd;
    eval.eval_jacobian_dd(xd, Jdd);
    std::vector<std::vector<DD>> M(n, std::vector<DD>(n));
    DD had(1.0);
    for (int i = 0; i < n; ++i) {
        DD row_sum{};
        for (int j = 0; j < n; ++j) {
            M[i][j] = Jdd[i * n + j];
            row_sum += abs(M[i][j]);
        }
        had *= row_sum;
    }
    std::vector<DD> dummy_rhs(n), dummy_x;
    DD det;
    dd_solve(M, dummy_rhs, dummy_x, det);
    det_out = static_cast<double>(det);
    const double h = static_cast<double>(had);
    if (h == 0.0) return det_out == 0.0 ? 0.0 : 1.0;
    return std::abs(det_out) / h;
}

}  // namespace

int RootSet::simple_count() const {
    return static_cast<int>(std::count_if(roots.begin(), roots.end(),
                                          [](const Root& r) { return !r.multiple; }));
}

int RootSet::multiple_count() const {
    return static_cast<int>(roots.size()) - simple_count();
}

NewtonResult damped_newton(const PolyVecEvaluator& eval, std::span<const double> start,
                           int max_iterations) {
    const int n = eval.dim();
    Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(start.data(), n);
    Eigen::VectorXd f, fx;
    Eigen::MatrixXd J;

    NewtonResult res;
    eval.eval_f({x.data(), static_cast<std::size_t>(n)}, f);
    double merit = f.cwiseAbs().maxCoeff();
    res.x.assign(x.data(), x.data() + n);
    res.residual = merit;

    for (int iter = 0; iter < max_iterations; ++iter) {
        res.iterations = iter;
        if (merit == 0.0) break;
        eval.eval_jacobian({x.data(), static_cast<std::size_t>(n)}, J);

        Eigen::PartialPivLU<Eigen::MatrixXd> lu(J);
        const double det = lu.determinant();
        const double had = hadamard_row_bound(J);
        const bool regular = had != 0.0 && std::abs(det) >= 1e-14 * had;

        // Plain Newton first; on line-search failure escalate Levenberg
        // damping toward gradient descent, which still makes progress when
        // the Jacobian degenerates along a whole variety.
        bool accepted = false;
        double lambda = 1e-12 * J.squaredNorm() + 1e-300;
        for (int attempt = 0; attempt < 6 && !accepted; ++attempt) {
            Eigen::VectorXd step;
            if (regular && attempt == 0) {
                step = lu.solve(-f);
            } else {
                Eigen::MatrixXd JtJ = J.transpose() * J;
                JtJ.diagonal().array() += lambda;
                step = JtJ.ldlt().solve(-(J.transpose() * f));
                lambda *= 1e4;
            }
            if (!step.allFinite()) continue;

            double alpha = 1.0;
            for (int bt = 0; bt < 14; ++bt) {
                Eigen::VectorXd xn = x + alpha * step;
                eval.eval_f({xn.data(), static_cast<std::size_t>(n)}, fx);
                const double mn = fx.cwiseAbs().maxCoeff();
                if (mn < merit * (1.0 - 1e-4 * alpha)) {
                    x = xn;
                    f = fx;
                    merit = mn;
                    accepted = true;
                    break;
                }
                alpha *= 0.5;
            }
        }
        if (merit < res.residual) {
            res.residual = merit;
            res.x.assign(x.data(), x.data() + n);
        }
        if (!accepted) {
            res.stalled = true;  // at the numerical floor
            break;
        }
    }
    return res;
}

NewtonResult dd_polish(const PolyVecEvaluator& eval, std::span<const double> start,
                       int max_iterations) {
    const int n = eval.dim();
    std::vector<DD> x(n), f, Jdd, step;
    for (int i = 0; i < n; ++i) x[i] = DD(start[i]);

    auto inf_norm = [&](const std::vector<DD>& v) {
        double m = 0.0;
        for (const auto& c : v) m = std::max(m, std::abs(static_cast<double>(c)));
        return m;
    };

    NewtonResult res;
    eval.eval_f_dd(x, f);
    res.residual = inf_norm(f);
    res.x.assign(start.begin(), start.end());
    res.x_dd = x;

    // Full Newton steps without a line search: near a root of multiplicity
    // m the step contracts the singular direction by (m-1)/m while the
    // regular residual components bounce at second order, so an inf-norm
    // decrease test would stall the iteration long before the floor.
    std::vector<std::vector<DD>> M(n, std::vector<DD>(n));
    std::vector<DD> rhs(n);
    for (int iter = 0; iter < max_iterations; ++iter) {
        res.iterations = iter;
        const double merit = inf_norm(f);
        if (merit < res.residual) {
            res.residual = merit;
            res.x_dd = x;
            for (int i = 0; i < n; ++i) res.x[i] = static_cast<double>(x[i]);
        }
        if (merit == 0.0) break;

        eval.eval_jacobian_dd(x, Jdd);
        for (int i = 0; i < n; ++i) {
            rhs[i] = -f[i];
            for (int j = 0; j < n; ++j) M[i][j] = Jdd[i * n + j];
        }
        DD det;
        bool solved = dd_solve(M, rhs, step, det);
        auto norm_of = [&](const std::vector<DD>& v) {
            double m = 0.0;
            for (const auto& c : v) m = std::max(m, std::abs(c.hi));
            return m;
        };
        if (!solved || !std::isfinite(norm_of(step)) || norm_of(step) > 0.5) {
            // Rank-deficient Jacobian (a whole valley of near-zeros): the
            // plain step explodes along the null direction. The damped
            // normal-equations step keeps only the minimum-norm part.
            DD scale{};
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) scale += Jdd[i * n + j] * Jdd[i * n + j];
            const DD lambda = DD(1e-24) * scale + DD(1e-280);
            std::vector<std::vector<DD>> N(n, std::vector<DD>(n));
            std::vector<DD> g(n);
            for (int i = 0; i < n; ++i) {
                g[i] = DD(0.0);
                for (int k = 0; k < n; ++k) g[i] -= Jdd[k * n + i] * f[k];
                for (int j = 0; j < n; ++j) {
                    N[i][j] = (i == j) ? lambda : DD(0.0);
                    for (int k = 0; k < n; ++k) N[i][j] += Jdd[k * n + i] * Jdd[k * n + j];
                }
            }
            DD ndet;
            if (!dd_solve(N, g, step, ndet)) break;
            if (!std::isfinite(norm_of(step)) || norm_of(step) > 0.5) break;
        }
        if (norm_of(step) < 1e-26) break;  // converged to the dd floor
        for (int i = 0; i < n; ++i) x[i] += step[i];
        eval.eval_f_dd(x, f);
    }
    return res;
}

RootSet find_roots(const PolySystem& sys, const Box& K, const SolveConfig& cfg) {
    const int n = sys.dim();
    if (K.dim() != n) throw std::invalid_argument("box dimension mismatch");
    SystemEvaluator eval(sys);

    RootSet out;
    out.box = K;
    out.diagnostics.seed = cfg.seed;

    // Start points: endpoint-inclusive uniform grid, then seeded uniforms.
    std::vector<std::vector<double>> starts;
    const int G = std::max(1, cfg.grid_per_axis);
    std::vector<int> idx(n, 0);
    while (true) {
        std::vector<double> p(n);
        for (int i = 0; i < n; ++i) {
            const double u = G == 1 ? 0.5 : static_cast<double>(idx[i]) / (G - 1);
            p[i] = K.lo(i) + u * (K.hi(i) - K.lo(i));
        }
        starts.push_back(std::move(p));
        int i = 0;
        while (i < n && ++idx[i] == G) idx[i++] = 0;
        if (i == n) break;
    }
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int s = 0; s < cfg.random_starts; ++s) {
        std::vector<double> p(n);
        for (int i = 0; i < n; ++i) p[i] = K.lo(i) + unit(rng) * (K.hi(i) - K.lo(i));
        starts.push_back(std::move(p));
    }
    out.diagnostics.starts = static_cast<long long>(starts.size());

    // Newton from every start; keep in-box converged endpoints.
    std::vector<std::vector<double>> pts;
    std::vector<double> residuals;
    for (const auto& s : starts) {
        NewtonResult r = damped_newton(eval, s, cfg.max_iterations);
        out.diagnostics.newton_iterations += r.iterations;
        if (r.residual <= cfg.accept_residual && K.contains(r.x, 1e-9)) {
            pts.push_back(std::move(r.x));
            residuals.push_back(r.residual);
        }
    }
    out.diagnostics.accepted_endpoints = static_cast<long long>(pts.size());

    std::vector<int> weights(pts.size(), 1);
    std::vector<std::vector<DD>> refined(pts.size());
    auto dedup = [&](double radius) {
        const int m = static_cast<int>(pts.size());
        UnionFind uf(m);
        for (int i = 0; i < m; ++i)
            for (int j = i + 1; j < m; ++j)
                if (dist2(pts[i], pts[j]) <= radius * radius) uf.unite(i, j);
        std::map<int, std::vector<int>> comps;
        for (int i = 0; i < m; ++i) comps[uf.find(i)].push_back(i);
        std::vector<std::vector<double>> np;
        std::vector<double> nr;
        std::vector<int> nw;
        std::vector<std::vector<DD>> nd;
        for (auto& [c, ids] : comps) {
            int best = ids.front();
            int w = 0;
            for (int i : ids) {
                w += weights[i];
                if (residuals[i] < residuals[best] ||
                    (residuals[i] == residuals[best] && pts[i] < pts[best]))
                    best = i;
            }
            np.push_back(pts[best]);
            nr.push_back(residuals[best]);
            nw.push_back(w);
            nd.push_back(refined[best]);
        }
        pts = std::move(np);
        residuals = std::move(nr);
        weights = std::move(nw);
        refined = std::move(nd);
    };

    dedup(cfg.dedup_radius);

    // Every candidate gets the double-double polish. Regular roots converge
    // in a couple of cheap iterations; singular candidates need it because
    // plain doubles cannot place a triple root to better than ~1e-5, and
    // flat near-zero valleys (a high-order root) only collapse onto the
    // actual root under the extended precision.
    for (std::size_t i = 0; i < pts.size(); ++i) {
        NewtonResult r = dd_polish(eval, pts[i], cfg.polish_iterations);
        if (r.residual <= residuals[i] && K.contains(r.x, 1e-9)) {
            pts[i] = std::move(r.x);
            residuals[i] = r.residual;
            refined[i] = std::move(r.x_dd);
        }
    }

    // Polished points may have collapsed together; dedup again, carrying
    // the endpoint counts through.
    dedup(cfg.dedup_radius);

    for (std::size_t i = 0; i < pts.size(); ++i) {
        Root r;
        r.x = pts[i];
        r.x_refined = refined[i];
        r.residual = residuals[i];
        r.cluster_members = weights[i];
        out.roots.push_back(std::move(r));
    }
    classify_roots(eval, out, cfg.jf_rel_tol);

    // Spec'd cluster stage: multiple-root candidates within cluster_radius
    // are one root. Normally a no-op after the dd polish.
    {
        const int m = static_cast<int>(out.roots.size());
        UnionFind uf(m);
        for (int i = 0; i < m; ++i)
            for (int j = i + 1; j < m; ++j)
                if ((out.roots[i].multiple || out.roots[j].multiple) &&
                    dist2(out.roots[i].x, out.roots[j].x) <=
                        cfg.cluster_radius * cfg.cluster_radius)
                    uf.unite(i, j);
        std::map<int, Root> rep;
        for (int i = 0; i < m; ++i) {
            const int c = uf.find(i);
            auto it = rep.find(c);
            if (it == rep.end()) {
                rep.emplace(c, out.roots[i]);
            } else {
                it->second.cluster_members += out.roots[i].cluster_members;
                if (out.roots[i].residual < it->second.residual) {
                    const int mem = it->second.cluster_members;
                    it->second = out.roots[i];
                    it->second.cluster_members = mem;
                }
            }
        }
        std::vector<Root> merged;
        merged.reserve(rep.size());
        for (auto& [c, r] : rep) merged.push_back(std::move(r));
        out.roots = std::move(merged);
    }
    out.diagnostics.merges =
        out.diagnostics.accepted_endpoints - static_cast<long long>(out.roots.size());

    std::sort(out.roots.begin(), out.roots.end(),
              [](const Root& a, const Root& b) { return a.x < b.x; });
    return out;
}

void classify_roots(const SystemEvaluator& eval, RootSet& roots, double jf_rel_tol) {
    // Box-global Hadamard bound on |jf| from the coefficient bounds of the
    // Jacobian entries. The point-local ratio alone cannot see a
    // quasi-homogeneous singularity (determinant and row product vanish at
    // the same order along a ray into the root), so near-zero |jf| against
    // this global scale is a second, absolute criterion.
    const int n = eval.dim();
    double global_scale = 0.0;
    if (roots.box.dim() == n) {
        global_scale = 1.0;
        for (int i = 0; i < n; ++i) {
            double row = 0.0;
            for (int j = 0; j < n; ++j)
                row += coeff_bound_on_box(eval.partial_poly(i, j), roots.box);
            global_scale *= row;
        }
    }

    Eigen::MatrixXd J;
    for (Root& r : roots.roots) {
        eval.eval_jacobian(r.x, J);
        double det = 0.0;
        r.jf_ratio = jacobian_ratio(J, det);
        if (r.jf_ratio <= 1e-3) {
            // Close call: the double determinant here is mostly rounding
            // noise, so decide in double-double at the refined position.
            std::vector<DD> xd;
            if (!r.x_refined.empty())
                xd = r.x_refined;
            else
                for (double v : r.x) xd.emplace_back(v);
            r.jf_ratio = jacobian_ratio_dd(eval, xd, det);
        }
        r.jf_value = det;
        r.multiple = r.jf_ratio <= jf_rel_tol ||
                     (global_scale > 0.0 && std::abs(det) <= 1e-12 * global_scale);
        if (r.multiple) {
            if (!r.probed) r.multiplicity_estimate = std::max(r.multiplicity_estimate, 2);
        } else {
            r.multiplicity_estimate = 1;
            r.probed = false;
        }
    }
}

void classify_roots(const PolySystem& sys, RootSet& roots, double jf_rel_tol) {
    SystemEvaluator eval(sys);
    classify_roots(eval, roots, jf_rel_tol);
}

bool is_sign_flip_invariant(const RootSet& roots, const std::vector<std::vector<int>>& generators,
                            double radius) {
    for (const auto& g : generators) {
        for (const auto& r : roots.roots) {
            if (g.size() != r.x.size()) throw std::invalid_argument("generator dimension mismatch");
            std::vector<double> flipped(r.x.size());
            for (std::size_t i = 0; i < r.x.size(); ++i) flipped[i] = g[i] < 0 ? -r.x[i] : r.x[i];
            bool found = false;
            for (const auto& other : roots.roots) {
                if (dist2(flipped, other.x) <= radius * radius) {
                    found = true;
                    break;
                }
            }
            if (!found) return false;
        }
    }
    return true;
}

}  // namespace rootshift
