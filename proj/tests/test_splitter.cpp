#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "paper_systems.hpp"
#include "rootshift/homotopy.hpp"
#include "rootshift/splitter.hpp"

using namespace rootshift;
using fixtures::mono2;
using fixtures::mono3;

namespace {

bool contains_point(const RootSet& roots, const std::vector<double>& p, double tol) {
    for (const auto& r : roots.roots) {
        double d2 = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i) d2 += (r.x[i] - p[i]) * (r.x[i] - p[i]);
        if (std::sqrt(d2) <= tol) return true;
    }
    return false;
}

}  // namespace

TEST_CASE("applying a deformation adds it equationwise") {
    const PolySystem sys = fixtures::double_root_system();
    const Deformation def = fixtures::double_root_deformation(0.5);
    const PolySystem deformed = apply_deformation(sys, def);
    // f2 + 0.5 (x1 - 2): input order preserved by matching degrees here
    const MultiPoly expected =
        mono2(4, 0, 1) + mono2(0, 2, 1) + mono2(0, 0, -1) + mono2(1, 0, 0.5) + mono2(0, 0, -1.0);
    CHECK(deformed.poly(1) == expected);
    CHECK(deformed.poly(0) == sys.poly(0));

    CHECK(apply_deformation(sys, Deformation{}).poly(0) == sys.poly(0));
}

TEST_CASE("splitting the double roots of the quartic pair at t = 0.5") {
    SplitConfig cfg;
    cfg.probe_multiplicities = true;
    const SplitReport report = split_multiple_roots(
        fixtures::double_root_system(), fixtures::double_root_deformation(0.5),
        Box::symmetric(2, 2.0), cfg);

    REQUIRE(report.before.roots.size() == 2);
    CHECK(report.before.multiple_count() == 2);
    REQUIRE(report.after.roots.size() == 4);
    CHECK(report.after.multiple_count() == 0);

    CHECK(contains_point(report.after, {1.07123233675477, 0.38410769233261}, 1e-8));
    CHECK(contains_point(report.after, {1.07123233675477, -0.38410769233261}, 1e-8));
    CHECK(contains_point(report.after, {-1.20970135357686, 0.68071827127359}, 1e-8));
    CHECK(contains_point(report.after, {-1.20970135357686, -0.68071827127359}, 1e-8));

    // two clusters, two shards each, nothing stray
    CHECK(report.stray_after.empty());
    for (const auto& c : report.clusters) CHECK(c.after_indices.size() == 2);
    CHECK(report.conservation_checked);
    CHECK(report.expected_total == 4);
    CHECK(report.conservation_ok);
}

TEST_CASE("shrinking t pulls the shards back toward the double roots") {
    const std::vector<std::vector<double>> plus_lists = {
        {1.07123233675477, 0.38410769233261},   // t = 0.5
        {1.00412951827050, 0.09097301502177},   // t = 0.025
        {1.00207398824224, 0.06443817123186},   // t = 0.0125
    };
    const std::vector<std::vector<double>> minus_lists = {
        {-1.20970135357686, 0.68071827127359},
        {-1.01237171332486, 0.15778620326351},
        {-1.00621769007449, 0.11168724107454},
    };
    double prev_plus = 1e9, prev_minus = 1e9;
    int i = 0;
    for (double t : {0.5, 0.025, 0.0125}) {
        const SplitReport report =
            split_multiple_roots(fixtures::double_root_system(),
                                 fixtures::double_root_deformation(t), Box::symmetric(2, 2.0));
        REQUIRE(report.after.roots.size() == 4);
        CHECK(contains_point(report.after, plus_lists[i], 1e-8));
        CHECK(contains_point(report.after, minus_lists[i], 1e-8));

        const double dp = std::hypot(plus_lists[i][0] - 1.0, plus_lists[i][1]);
        const double dm = std::hypot(minus_lists[i][0] + 1.0, minus_lists[i][1]);
        CHECK(dp < prev_plus);
        CHECK(dm < prev_minus);
        prev_plus = dp;
        prev_minus = dm;
        ++i;
    }
}

TEST_CASE("splitting the triple-root system at t = 0.5") {
    const SplitReport report =
        split_multiple_roots(fixtures::triple_root_system(), fixtures::triple_root_deformation(0.5),
                             Box::symmetric(3, 2.0));
    REQUIRE(report.before.roots.size() == 16);
    CHECK(report.before.multiple_count() == 8);
    REQUIRE(report.after.roots.size() == 32);
    CHECK(report.after.multiple_count() == 0);
    CHECK(report.stray_after.empty());

    // the eight old triple positions survive as simple roots
    for (const auto& p : fixtures::orbit(fixtures::triple_root_triple_rep()))
        CHECK(contains_point(report.after, p, 1e-8));
    // the two new orbits from the paper's solution display
    for (const auto& p : fixtures::orbit({0.78897550317143, 0.32932116069209, 1.20907797224513}))
        CHECK(contains_point(report.after, p, 1e-8));
    for (const auto& p : fixtures::orbit({0.44474589932680, 1.07278013064881, 1.64234961179579}))
        CHECK(contains_point(report.after, p, 1e-8));
    // the shifted simple orbit
    for (const auto& p : fixtures::orbit({0.27142016486929, 1.20645760731621, 1.74883324771051}))
        CHECK(contains_point(report.after, p, 1e-8));

    // At this deformation size the outer shards of a triple sit nearer to
    // the old simple roots than to their own parent, so nearest-root
    // assignment is only conservative globally.
    std::size_t assigned = 0;
    for (const auto& c : report.clusters) assigned += c.after_indices.size();
    CHECK(assigned == 32);
}

TEST_CASE("small deformations keep every shard near its parent") {
    SplitConfig cfg;
    cfg.probe_multiplicities = true;
    const SplitReport report =
        split_multiple_roots(fixtures::triple_root_system(), fixtures::triple_root_deformation(0.05),
                             Box::symmetric(3, 2.0), cfg);
    REQUIRE(report.after.roots.size() == 32);
    CHECK(report.after.multiple_count() == 0);
    CHECK(report.stray_after.empty());

    int singles = 0, triples = 0;
    for (std::size_t i = 0; i < report.clusters.size(); ++i) {
        const auto& c = report.clusters[i];
        const Root& parent = report.before.roots[c.before_index];
        if (parent.multiple) {
            CHECK(c.after_indices.size() == 3);
            CHECK(parent.multiplicity_estimate == 3);
            ++triples;
        } else {
            CHECK(c.after_indices.size() == 1);
            ++singles;
        }
    }
    CHECK(singles == 8);
    CHECK(triples == 8);
    CHECK(report.conservation_checked);
    CHECK(report.expected_total == 32);
    CHECK(report.conservation_ok);
}

TEST_CASE("multiplicity probe on the paper fixtures") {
    const ProbeResult dbl = probe_multiplicity(fixtures::double_root_system(), std::vector<double>{1.0, 0.0});
    CHECK(dbl.count == 2);

    const ProbeResult same =
        probe_multiplicity(fixtures::double_root_system(), std::vector<double>{1.0, 0.0});
    CHECK(same.per_trial == dbl.per_trial);  // fixed seed, fixed counts

    ProbeConfig pc;
    pc.local_radius = 0.35;
    const ProbeResult triple = probe_multiplicity(
        fixtures::triple_root_system(),
        std::vector<double>{0.68824720161168, 0.68824720161168, 1.37649440322337}, pc);
    CHECK(triple.count == 3);
}

TEST_CASE("explicit cubic probes show the two real splittings") {
    // x1^3: pulling down gives three real roots, pushing up leaves one
    MultiPoly f(1);
    f.add_term({3}, 1.0);
    const PolySystem sys({f}, 1);

    MultiPoly down(1), up(1);
    down.add_term({1}, -0.01);
    up.add_term({1}, 0.01);

    ProbeConfig cfg;
    cfg.explicit_trials = {Deformation{{down}, 0.01, 0}, Deformation{{up}, 0.01, 0}};
    const ProbeResult probe = probe_multiplicity(sys, std::vector<double>{0.0}, cfg);
    REQUIRE(probe.per_trial.size() == 2);
    CHECK(probe.per_trial[0] == 3);
    CHECK(probe.per_trial[1] == 1);
    CHECK(probe.count == 3);
    CHECK_FALSE(probe.stable);
}

TEST_CASE("a deformation that keeps the singularity is rejected") {
    // f2 + t x2^2 leaves (+-1, 0) double
    MultiPoly h2 = mono2(0, 2, 0.25);
    const Deformation bad =
        fixtures::make_deformation(fixtures::double_root_system(), {MultiPoly(2), h2}, 0.25);
    CHECK_THROWS_AS(split_multiple_roots(fixtures::double_root_system(), bad,
                                         Box::symmetric(2, 2.0)),
                    SplitFailedError);

    CHECK_THROWS_AS(split_multiple_roots(fixtures::kearfott_system(),
                                         fixtures::double_root_deformation(0.5),
                                         Box::symmetric(2, 2.0)),
                    std::invalid_argument);  // nothing multiple to split
}

TEST_CASE("random search finds a splitting deformation") {
    const SplitReport report = search_splitting_deformation(
        fixtures::double_root_system(), SupportSpec::dense_up_to(2, 1), 0.05,
        Box::symmetric(2, 2.0));
    CHECK(report.after.multiple_count() == 0);
    CHECK(report.after.roots.size() >= 2);
    CHECK(report.used.seed != 0);
}

TEST_CASE("sampled deformation conditions on the ball") {
    const PolySystem f = fixtures::kearfott_system();

    KovConfig cfg;
    cfg.samples = 2000;
    SUBCASE("identical systems trivially pass") {
        const KovReport report = check_kov_conditions(f, f, 2.0, cfg);
        CHECK(report.epsilon == 0.0);
        CHECK(report.root_count == 4);
        CHECK(report.min_boundary_distance ==
              doctest::Approx(2.0 - std::sqrt(2.0)).epsilon(1e-9));
        CHECK(report.pass);
    }

    SUBCASE("a constant shift of 10 overwhelms the boundary margin") {
        std::vector<MultiPoly> polys = f.polys_in_input_order();
        polys[0] += MultiPoly::constant(2, 10.0);
        const PolySystem big_f(polys, 1);
        const KovReport report = check_kov_conditions(f, big_f, 2.0, cfg);
        CHECK_FALSE(report.pass);
        CHECK(report.epsilon > report.min_boundary_distance);
    }

    SUBCASE("a sup estimate over a ball with interior Jacobian zeros blows up") {
        // The conic pair's Jacobian vanishes on both axes inside the ball,
        // so the max over sampled pairs of |J(y)^{-1} (F - f)(x)| keeps
        // growing with the sample count and dwarfs the boundary margin.
        const PolySystem big_f =
            perturbed_system(f, fixtures::kearfott_pert_first_row(), 0.033);
        KovConfig full;
        const KovReport report = check_kov_conditions(f, big_f, 2.0, full);
        CHECK(report.root_count == 4);
        CHECK(report.min_boundary_distance ==
              doctest::Approx(2.0 - std::sqrt(2.0)).epsilon(1e-6));
        CHECK(report.epsilon > report.min_boundary_distance);
        CHECK_FALSE(report.pass);
    }

    SUBCASE("an everywhere-singular Jacobian is reported") {
        const PolySystem degenerate(
            {mono2(1, 0, 1) + mono2(0, 1, 1), mono2(1, 0, 2) + mono2(0, 1, 2)}, 1);
        CHECK_THROWS_AS(check_kov_conditions(degenerate, degenerate, 1.0, cfg),
                        RankDeficientError);
    }
}
