#ifndef ROOTSHIFT_ROOTFIND_HPP
#define ROOTSHIFT_ROOTFIND_HPP

#include <cstdint>
#include <vector>

#include "rootshift/evaluator.hpp"
#include "rootshift/multipoly.hpp"

namespace rootshift {

struct SolveConfig {
    int grid_per_axis = 16;
    int random_starts = 64;
    std::uint64_t seed = 20240061u;
    int max_iterations = 100;
    /// Endpoints with larger residual are discarded as non-converged.
    double accept_residual = 1e-8;
    /// Endpoints closer than this are the same root.
    double dedup_radius = 1e-6;
    /// Multiple-root candidates within this radius merge into one cluster.
    double cluster_radius = 1e-4;
    /// Final simple/multiple cut: |jf| <= tol * prod_i ||row_i(J)||_2.
    double jf_rel_tol = 1e-6;
    /// Candidates below this Jacobian ratio get the double-double polish.
    double polish_ratio = 1e-3;
    int polish_iterations = 80;
};

struct Root {
    std::vector<double> x;
    /// Double-double position from the polish stage, kept because the
    /// rounded x already sits ~1e-16 off the solution manifold, which is
    /// enough to drown the Jacobian determinant of a multiple root.
    /// Empty for roots that never needed polishing.
    std::vector<DD> x_refined;
    double residual = 0.0;
    double jf_value = 0.0;
    /// |jf| relative to the Hadamard bound at x; near-zero means singular.
    double jf_ratio = 0.0;
    bool multiple = false;
    /// 1 for simple roots; >= 2 for multiple ones (a floor until probed).
    int multiplicity_estimate = 1;
    /// True once a splitting probe refined multiplicity_estimate.
    bool probed = false;
    /// Number of merged Newton endpoints behind this root.
    int cluster_members = 1;
};

struct SolveDiagnostics {
    long long starts = 0;
    long long accepted_endpoints = 0;
    long long newton_iterations = 0;
    long long merges = 0;
    std::uint64_t seed = 0;
};

struct RootSet {
    std::vector<Root> roots;
    Box box;
    SolveDiagnostics diagnostics;

    int simple_count() const;
    int multiple_count() const;
};

/// All real roots of sys inside K: damped multistart Newton from a uniform
/// grid plus seeded random starts, dedup within cfg.dedup_radius, singular
/// candidates polished in double-double and merged per cluster, then
/// classified. Deterministic for a fixed cfg.seed.
RootSet find_roots(const PolySystem& sys, const Box& K, const SolveConfig& cfg = {});

/// Recomputes jf and the simple/multiple partition on an existing root set.
/// A root is multiple when its Jacobian determinant is below jf_rel_tol
/// relative to the Hadamard row bound at the root.
void classify_roots(const SystemEvaluator& eval, RootSet& roots, double jf_rel_tol = 1e-6);
void classify_roots(const PolySystem& sys, RootSet& roots, double jf_rel_tol = 1e-6);

/// Newton from one start point; returns the best point reached and its
/// residual. Exposed for the homotopy corrector and tests.
struct NewtonResult {
    std::vector<double> x;
    std::vector<DD> x_dd;  // filled by dd_polish only
    double residual = 0.0;
    int iterations = 0;
    bool stalled = false;
};
NewtonResult damped_newton(const PolyVecEvaluator& eval, std::span<const double> start,
                           int max_iterations);

/// Double-double Newton polish; returns the refined point (rounded back to
/// double) and the double-precision residual there.
NewtonResult dd_polish(const PolyVecEvaluator& eval, std::span<const double> start,
                       int max_iterations);

/// Setwise invariance of the root set under per-coordinate sign flips.
/// Each generator is a vector of +1/-1. Distances measured in Euclidean
/// norm against the given radius.
bool is_sign_flip_invariant(const RootSet& roots, const std::vector<std::vector<int>>& generators,
                            double radius);

}  // namespace rootshift

#endif
