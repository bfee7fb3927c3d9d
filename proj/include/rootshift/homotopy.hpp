#ifndef ROOTSHIFT_HOMOTOPY_HPP
#define ROOTSHIFT_HOMOTOPY_HPP

#include <optional>
#include <vector>

#include "rootshift/bound.hpp"
#include "rootshift/rootfind.hpp"

namespace rootshift {

/// The deformed system f_i + tau * (F (phi, 0, ..., 0)^T)_i as explicit
/// polynomials. tau = 0 returns the system unchanged.
PolySystem perturbed_system(const PolySystem& sys, const PerturbationSpec& pert, double tau);

struct PathPoint {
    double tau = 0.0;
    std::vector<double> x;
    double jf_value = 0.0;  // Jacobian determinant of the deformed system at (x, tau)
    double step = 0.0;      // last accepted step size
    double residual = 0.0;
};

enum class TrackStatus { Completed, CrashSuspected, LeftBox, SingularJacobian };

const char* to_string(TrackStatus s);

struct TrackReport {
    std::vector<double> start;
    std::vector<double> end;
    std::vector<PathPoint> path;
    TrackStatus status = TrackStatus::Completed;
    double min_abs_jf = 0.0;
    double max_residual = 0.0;
    double tau_reached = 0.0;
};

struct TrackConfig {
    /// First step as a fraction of the tau range.
    double initial_step_fraction = 0.01;
    double min_step = 1e-12;
    double max_step_fraction = 0.1;
    double corrector_tol = 1e-11;
    int corrector_max_iterations = 20;
    /// Condition number beyond which the Jacobian counts as singular.
    double condition_limit = 1e12;
    /// A stalled path also counts as singular when the smallest singular
    /// value has collapsed to this fraction of its value at the start.
    double singular_collapse = 1e-4;
};

/// Follows one root of the tau = t_from system to tau = t_to along the
/// deformation: Euler predictor on J_{F_tau} xdot = -(F (phi,0,...)^T),
/// full-Newton corrector on F_tau(x) = 0, halving the step on corrector
/// failure and doubling it after easy corrections. When K is given,
/// leaving it stops the path.
TrackReport track_path(const PolySystem& sys, const PerturbationSpec& pert,
                       std::span<const double> root, double t_from, double t_to,
                       const TrackConfig& cfg = {}, const Box* K = nullptr);

/// Same tracker along an arbitrary deformation direction, one polynomial
/// per equation (matching the canonical equation order): the homotopy
/// f + tau * direction. With direction = F - f this continues roots of f
/// into roots of F over tau in [0, 1].
TrackReport track_path(const PolySystem& sys, const std::vector<MultiPoly>& direction,
                       std::span<const double> root, double t_from, double t_to,
                       const TrackConfig& cfg = {}, const Box* K = nullptr);

/// Rows of big_f minus rows of f, paired in their original input order and
/// returned in f's canonical order, ready for track_path.
std::vector<MultiPoly> deformation_direction(const PolySystem& f, const PolySystem& big_f);

struct PathCollision {
    int path_a = 0;
    int path_b = 0;  // == path_a for single-path jf degeneracy flags
    double min_distance = 0.0;
    double tau = 0.0;
    bool jf_degenerate = false;
};

/// Pairs of paths that get closer than `radius` after resampling onto a
/// shared tau grid, plus paths whose |jf| dips under jf_tol anywhere.
std::vector<PathCollision> detect_path_collisions(const std::vector<TrackReport>& reports,
                                                  double radius, double jf_tol = 1e-6);

struct InvarianceReport {
    int count_start = 0;
    int count_end = 0;
    int multiple_at_start = 0;
    bool counts_match = false;
    bool bijection = false;
    double min_path_separation = 0.0;
    std::vector<TrackReport> tracks;
    RootSet roots_start;
    RootSet roots_end;
    std::vector<PathCollision> collisions;
    std::optional<double> t_star;  // bound this run was checked against, if any
    bool bound_respected = true;
};

/// Solves at tau = 0, tracks every simple root to tau = t, re-solves the
/// deformed system independently, and reports counts, endpoint/re-solve
/// matching and path separations. t >= t_star only warns (bound_respected
/// = false); this is how falsification experiments run.
InvarianceReport verify_root_count_invariance(const PolySystem& sys, const PerturbationSpec& pert,
                                              double t, const Box& K,
                                              const SolveConfig& solve_cfg = {},
                                              const TrackConfig& track_cfg = {},
                                              std::optional<double> t_star = std::nullopt);

}  // namespace rootshift

#endif
