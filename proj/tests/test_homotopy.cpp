#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "paper_systems.hpp"
#include "rootshift/homotopy.hpp"
#include "rootshift/ideal.hpp"

using namespace rootshift;
using fixtures::mono2;

namespace {

double dist(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

bool endpoint_set_matches(const std::vector<TrackReport>& tracks,
                          const std::vector<std::vector<double>>& expected, double tol) {
    if (tracks.size() != expected.size()) return false;
    std::vector<bool> used(expected.size(), false);
    for (const auto& t : tracks) {
        bool found = false;
        for (std::size_t i = 0; i < expected.size(); ++i) {
            if (used[i]) continue;
            if (dist(t.end, expected[i]) <= tol) {
                used[i] = true;
                found = true;
                break;
            }
        }
        if (!found) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("deformed system adds tau times the distributed direction") {
    const PolySystem sys = fixtures::kearfott_system();
    const PerturbationSpec pert = fixtures::kearfott_pert_first_row();

    const PolySystem at_zero = perturbed_system(sys, pert, 0.0);
    CHECK(at_zero.poly(0) == sys.poly(0));
    CHECK(at_zero.poly(1) == sys.poly(1));

    const PolySystem deformed = perturbed_system(sys, pert, 0.033);
    // canonical order re-sorts by degree: the cubic lands last
    const MultiPoly expected_f1 =
        mono2(2, 0, 1) + mono2(0, 2, -1) + mono2(0, 0, -1) + mono2(1, 2, 0.033);
    CHECK(deformed.poly(1) == expected_f1);
    CHECK(deformed.poly(0) == sys.poly(1));

    const PolySystem both = perturbed_system(sys, fixtures::kearfott_pert_both_rows(), 0.033);
    CHECK(both.poly(0).coeff({1, 2}) == 0.033);
    CHECK(both.poly(1).coeff({1, 2}) == 0.033);
}

TEST_CASE("tracking the conic pair to t = 0.033") {
    const PolySystem sys = fixtures::kearfott_system();
    const PerturbationSpec pert = fixtures::kearfott_pert_first_row();
    const Box K = Box::symmetric(2, 2.0);

    const std::vector<double> start{1.22474487139159, 0.70710678118655};
    const TrackReport report = track_path(sys, pert, start, 0.0, 0.033, {}, &K);
    CHECK(report.status == TrackStatus::Completed);
    CHECK(report.max_residual <= 1e-9);
    CHECK(dist(report.end, {1.22054232589618, 0.71433635683474}) <= 1e-8);

    const TrackReport still = track_path(sys, pert, start, 0.0, 0.0);
    CHECK(still.status == TrackStatus::Completed);
    CHECK(dist(still.end, start) <= 1e-11);
}

TEST_CASE("tracking the 3D system to t = 0.1") {
    const PolySystem sys = fixtures::threed_system();
    const PerturbationSpec pert = fixtures::threed_pert();
    const std::vector<double> start{0.62830967308983, 0.91412675198426, 0.76883755100759};
    const TrackReport report = track_path(sys, pert, start, 0.0, 0.1);
    CHECK(report.status == TrackStatus::Completed);
    CHECK(dist(report.end, {0.63087661393950, 0.91351892559324, 0.77060795720733}) <= 1e-8);
}

TEST_CASE("reverse tracking returns to the start") {
    const PolySystem sys = fixtures::kearfott_system();
    for (const PerturbationSpec& pert :
         {fixtures::kearfott_pert_first_row(), fixtures::kearfott_pert_both_rows()}) {
        for (const auto& start : fixtures::kearfott_roots()) {
            const TrackReport fwd = track_path(sys, pert, start, 0.0, 0.033);
            REQUIRE(fwd.status == TrackStatus::Completed);
            const TrackReport back = track_path(sys, pert, fwd.end, 0.033, 0.0);
            REQUIRE(back.status == TrackStatus::Completed);
            CHECK(dist(back.end, start) <= 1e-7);
        }
    }
}

TEST_CASE("root-count invariance for the conic pair below the bound") {
    const PolySystem sys = fixtures::kearfott_system();
    const InvarianceReport report = verify_root_count_invariance(
        sys, fixtures::kearfott_pert_first_row(), 0.033, Box::symmetric(2, 2.0), {}, {},
        1.0 / 30.0);
    CHECK(report.count_start == 4);
    CHECK(report.count_end == 4);
    CHECK(report.counts_match);
    CHECK(report.bijection);
    CHECK(report.bound_respected);
    CHECK(report.collisions.empty());
    CHECK(report.min_path_separation > 0.5);
    CHECK(endpoint_set_matches(report.tracks, fixtures::kearfott_perturbed_roots_first(), 1e-8));

    const InvarianceReport both = verify_root_count_invariance(
        sys, fixtures::kearfott_pert_both_rows(), 0.033, Box::symmetric(2, 2.0));
    CHECK(both.counts_match);
    CHECK(both.bijection);
    CHECK(endpoint_set_matches(both.tracks, fixtures::kearfott_perturbed_roots_both(), 1e-8));
}

TEST_CASE("sixteen 3D roots keep their count at t = 0.1") {
    const InvarianceReport report = verify_root_count_invariance(
        fixtures::threed_system(), fixtures::threed_pert(), 0.1, Box::symmetric(3, 2.0), {}, {},
        1.0 / 9.0);
    CHECK(report.count_start == 16);
    CHECK(report.count_end == 16);
    CHECK(report.counts_match);
    CHECK(report.bijection);
    CHECK(report.bound_respected);
    CHECK(report.collisions.empty());
    CHECK(endpoint_set_matches(report.tracks, fixtures::threed_perturbed_roots(), 1e-8));
}

TEST_CASE("tau = 0 invariance is the identity") {
    const InvarianceReport report = verify_root_count_invariance(
        fixtures::kearfott_system(), fixtures::kearfott_pert_first_row(), 0.0,
        Box::symmetric(2, 2.0));
    CHECK(report.counts_match);
    CHECK(report.bijection);
    for (const auto& t : report.tracks) CHECK(dist(t.start, t.end) <= 1e-10);
}

TEST_CASE("general system-to-system homotopy reaches the target roots") {
    // Continue roots of f into roots of F along f + tau (F - f), tau 0..1.
    const PolySystem f = fixtures::kearfott_system();
    const PolySystem F = perturbed_system(f, fixtures::kearfott_pert_first_row(), 0.033);
    const std::vector<MultiPoly> direction = deformation_direction(f, F);

    std::vector<TrackReport> tracks;
    for (const auto& start : fixtures::kearfott_roots()) {
        tracks.push_back(track_path(f, direction, start, 0.0, 1.0));
        CHECK(tracks.back().status == TrackStatus::Completed);
        CHECK(tracks.back().max_residual <= 1e-9);
    }
    CHECK(endpoint_set_matches(tracks, fixtures::kearfott_perturbed_roots_first(), 1e-8));

    // consistent with the scalar-direction tracker
    const TrackReport scalar = track_path(f, fixtures::kearfott_pert_first_row(),
                                          fixtures::kearfott_roots().front(), 0.0, 0.033);
    const TrackReport general =
        track_path(f, direction, fixtures::kearfott_roots().front(), 0.0, 1.0);
    CHECK(dist(scalar.end, general.end) <= 1e-9);
}

TEST_CASE("a fold collapses tracking with a singular Jacobian") {
    // x1^2 - 0.1 + tau = 0: the two roots meet at tau = 0.1 and vanish.
    MultiPoly f(1);
    f.add_term({2}, 1.0);
    f.add_term({0}, -0.1);
    const PolySystem sys({f}, 1);
    const PerturbationSpec pert = PerturbationSpec::for_rows(MultiPoly::constant(1, 1.0), {1}, 1);

    const std::vector<double> start{std::sqrt(0.1)};
    const TrackReport report = track_path(sys, pert, start, 0.0, 0.2);
    CHECK(report.status == TrackStatus::SingularJacobian);
    CHECK(report.tau_reached < 0.1 + 1e-6);
    CHECK(report.tau_reached > 0.09);
    CHECK(report.min_abs_jf < 1e-3);

    const auto collisions = detect_path_collisions({report}, 1e-6, 1e-3);
    REQUIRE(collisions.size() == 1);
    CHECK(collisions.front().jf_degenerate);
}

TEST_CASE("collision detector stays quiet on clean fixtures") {
    const PolySystem sys = fixtures::kearfott_system();
    const PerturbationSpec pert = fixtures::kearfott_pert_first_row();
    std::vector<TrackReport> tracks;
    for (const auto& start : fixtures::kearfott_roots())
        tracks.push_back(track_path(sys, pert, start, 0.0, 0.033));
    CHECK(detect_path_collisions(tracks, 1e-6).empty());
    CHECK(detect_path_collisions({tracks.front()}, 1e-6).empty());
}

TEST_CASE("random convenient pairs keep their root count at 0.9 t*") {
    std::mt19937_64 rng(271828);
    std::uniform_real_distribution<double> pos(0.5, 1.5), small(-0.3, 0.3), any(-1.0, 1.0);
    const Box K = Box::symmetric(2, 2.0);

    int tested = 0;
    for (int draw = 0; draw < 60 && tested < 10; ++draw) {
        MultiPoly f1 = mono2(2, 0, pos(rng)) + mono2(0, 2, pos(rng)) + mono2(1, 1, small(rng)) +
                       mono2(0, 0, -1.0 - std::abs(any(rng)));
        MultiPoly f2 = mono2(3, 0, pos(rng)) + mono2(0, 3, pos(rng)) + mono2(1, 2, small(rng)) +
                       mono2(0, 0, any(rng));
        const PolySystem sys({f1, f2}, 1);

        const auto cert = try_certify_ideal_power(sys, 1);
        if (!cert) continue;

        MultiPoly phi = mono2(1, 2, any(rng)) + mono2(2, 1, any(rng)) + mono2(2, 0, small(rng));
        if (phi.is_zero() || phi.total_degree() != 3) continue;
        PerturbationSpec pert = PerturbationSpec::for_rows(phi, {1}, 2, cert->k);

        const RootSet roots = find_roots(sys, K);
        if (roots.roots.size() < 2 || roots.multiple_count() > 0) continue;
        bool interior = true;
        for (const auto& r : roots.roots)
            for (double v : r.x)
                if (std::abs(v) > 1.6) interior = false;
        if (!interior) continue;

        const BoundReport bound = make_bound_report(*cert, pert, K);
        const double t = 0.9 * bound.t_star;
        const InvarianceReport report =
            verify_root_count_invariance(sys, pert, t, K, {}, {}, bound.t_star);
        CHECK(report.counts_match);
        CHECK(report.bijection);
        CHECK(report.bound_respected);
        CHECK(report.collisions.empty());
        ++tested;
    }
    CHECK(tested == 10);
}
