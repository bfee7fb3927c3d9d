#ifndef ROOTSHIFT_SPLITTER_HPP
#define ROOTSHIFT_SPLITTER_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "rootshift/errors.hpp"
#include "rootshift/rootfind.hpp"

namespace rootshift {

/// Explicit additive deformation H_1, ..., H_n of a system.
struct Deformation {
    std::vector<MultiPoly> H;
    double magnitude = 0.0;     // scale the H were built with, metadata
    std::uint64_t seed = 0;     // 0 when hand-written
};

/// The system (f_i + H_i). H entries must match the system dimension; a
/// zero-length H means no deformation.
PolySystem apply_deformation(const PolySystem& sys, const Deformation& def);

/// Allowed exponents per equation used when deformations are drawn randomly.
struct SupportSpec {
    std::vector<std::vector<Exponents>> per_equation;

    /// Every monomial of total degree <= max_degree, in every equation.
    static SupportSpec dense_up_to(int n, int max_degree);
};

/// Random deformation with coefficients uniform in [-magnitude, magnitude]
/// over the given support.
Deformation random_deformation(const SupportSpec& spec, double magnitude, std::uint64_t seed);

struct ClusterAssignment {
    int before_index = 0;
    std::vector<int> after_indices;
};

struct SplitReport {
    RootSet before;
    RootSet after;
    std::vector<ClusterAssignment> clusters;
    std::vector<int> stray_after;  // after-roots farther than cluster_radius from any before-root
    double cluster_radius = 0.0;
    /// True when every before-multiplicity was known (simple or probed), so
    /// the conservation count sum n_j == #after is meaningful.
    bool conservation_checked = false;
    bool conservation_ok = false;
    int expected_total = 0;
    Deformation used;
};

struct SplitConfig {
    SolveConfig solve;
    /// Assignment radius; 0 picks the minimum pairwise distance between
    /// before-roots (the whole box diagonal when only one root exists).
    double cluster_radius = 0.0;
    /// Probe each multiple root for its multiplicity before splitting.
    bool probe_multiplicities = false;
};

/// Solves f and f + H in K, verifies every deformed root is simple, and
/// assigns each after-root to its nearest before-root. Throws
/// SplitFailedError when the deformed system still has a multiple root and
/// std::invalid_argument when f has no multiple root to split.
SplitReport split_multiple_roots(const PolySystem& sys, const Deformation& def, const Box& K,
                                 const SplitConfig& cfg = {});

/// Retry schedule over random deformations from the support spec: the
/// first H whose deformed system passes the all-simple check wins.
SplitReport search_splitting_deformation(const PolySystem& sys, const SupportSpec& spec,
                                         double magnitude, const Box& K,
                                         const SplitConfig& cfg = {}, int max_attempts = 8,
                                         std::uint64_t seed = 1u);

struct ProbeConfig {
    std::uint64_t seed = 7u;
    int seeds = 3;
    std::vector<double> magnitudes = {1e-2, 1e-3};
    /// Support of the random probe deformations: all monomials of total
    /// degree <= this, every equation.
    int support_degree = 1;
    /// Half-width of the local solve box around the probed root, and the
    /// radius within which split-off roots are counted.
    double local_radius = 0.3;
    SolveConfig local_solve;
    /// Explicit deformations to try instead of random ones.
    std::vector<Deformation> explicit_trials;

    ProbeConfig() {
        local_solve.grid_per_axis = 6;
        local_solve.random_starts = 16;
        local_solve.max_iterations = 60;
    }
};

struct ProbeResult {
    int count = 0;  // max simple roots seen near the probed root
    bool stable = false;  // all trials with any real splitting agreed
    std::vector<int> per_trial;
    std::uint64_t seed = 0;
};

/// Estimates the multiplicity of a root by deforming the system with small
/// random (sign-paired) perturbations and counting the simple roots that
/// appear nearby. Complex-conjugate escapes show up as trial-to-trial
/// variation; the maximum count is reported with a stability flag.
ProbeResult probe_multiplicity(const PolySystem& sys, std::span<const double> root,
                               const ProbeConfig& cfg = {});

struct KovConfig {
    int samples = 10000;
    std::uint64_t seed = 99991u;
    /// Relative singular-value floor below which a sampled Jacobian is
    /// reported as rank deficient.
    double rank_tol = 1e-12;
    SolveConfig solve;
};

struct KovReport {
    double epsilon_f = 0.0;      // from the Jacobian of f
    double epsilon_big_f = 0.0;  // from the Jacobian of the perturbed system
    double epsilon = 0.0;        // max of the two
    double min_boundary_distance = 0.0;
    int root_count = 0;
    bool pass = false;
    std::uint64_t seed = 0;
};

/// Monte-Carlo estimate of the componentwise bounds on J^{-1}(F - f) over
/// sampled (x, y) pairs in the ball |x| <= r, for both Jacobians, compared
/// against the distance of the roots of f to the sphere. Throws
/// RankDeficientError when a sampled Jacobian is singular beyond rank_tol.
KovReport check_kov_conditions(const PolySystem& f, const PolySystem& big_f, double r,
                               const KovConfig& cfg = {});

}  // namespace rootshift

#endif
