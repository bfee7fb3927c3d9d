#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "paper_systems.hpp"
#include "rootshift/rootfind.hpp"

using namespace rootshift;
using fixtures::mono2;

namespace {

// Set-match: every expected point has exactly one root within tol.
bool roots_match(const RootSet& roots, const std::vector<std::vector<double>>& expected,
                 double tol) {
    if (roots.roots.size() != expected.size()) return false;
    std::vector<bool> used(roots.roots.size(), false);
    for (const auto& e : expected) {
        bool found = false;
        for (std::size_t i = 0; i < roots.roots.size(); ++i) {
            if (used[i]) continue;
            double d2 = 0.0;
            for (std::size_t c = 0; c < e.size(); ++c) {
                const double d = roots.roots[i].x[c] - e[c];
                d2 += d * d;
            }
            if (std::sqrt(d2) <= tol) {
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

TEST_CASE("jacobian determinant closed forms") {
    const PolySystem dbl = fixtures::double_root_system();
    const std::vector<double> at{1.0, 0.0};
    CHECK(jacobian_det(dbl, at) == 0.0);

    const PolySystem kearfott = fixtures::kearfott_system();
    const std::vector<double> root{std::sqrt(1.5), std::sqrt(0.5)};
    CHECK(jacobian_det(kearfott, root) == doctest::Approx(8.0 * std::sqrt(0.75)).epsilon(1e-12));

    const PolySystem linear({mono2(1, 0, 1.0), mono2(0, 1, 1.0)}, 1);
    const std::vector<double> origin{0.0, 0.0};
    CHECK(jacobian_det(linear, origin) == 1.0);
}

TEST_CASE("jacobian determinant matches finite differences") {
    const PolySystem sys = fixtures::kearfott_system();
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> unit(-1.5, 1.5);
    for (int rep = 0; rep < 30; ++rep) {
        std::vector<double> x{unit(rng), unit(rng)};
        const double h = 1e-6;
        Eigen::MatrixXd J(2, 2);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                std::vector<double> xp = x, xm = x;
                xp[j] += h;
                xm[j] -= h;
                J(i, j) =
                    (sys.poly(i).evaluate(xp) - sys.poly(i).evaluate(xm)) / (2 * h);
            }
        const double fd = J(0, 0) * J(1, 1) - J(0, 1) * J(1, 0);
        const double exact = jacobian_det(sys, x);
        CHECK(std::abs(fd - exact) <= 1e-5 * (1.0 + std::abs(exact)));
    }
}

TEST_CASE("four simple roots of the conic pair") {
    const RootSet roots = find_roots(fixtures::kearfott_system(), Box::symmetric(2, 2.0));
    REQUIRE(roots.roots.size() == 4);
    CHECK(roots_match(roots, fixtures::kearfott_roots(), 1e-8));
    for (const auto& r : roots.roots) {
        CHECK_FALSE(r.multiple);
        CHECK(r.multiplicity_estimate == 1);
        CHECK(r.residual <= 1e-10);
    }
}

TEST_CASE("sixteen roots of the 3D quartic system") {
    const RootSet roots = find_roots(fixtures::threed_system(), Box::symmetric(3, 2.0));
    REQUIRE(roots.roots.size() == 16);
    CHECK(roots_match(roots, fixtures::threed_roots(), 1e-8));
    CHECK(roots.simple_count() == 16);
    for (const auto& r : roots.roots) CHECK(r.residual <= 1e-10);
}

TEST_CASE("system without real roots yields an empty set") {
    const MultiPoly f1 = mono2(2, 0, 1) + mono2(0, 2, 1) + mono2(0, 0, 1);
    const MultiPoly f2 = mono2(1, 0, 1) + mono2(0, 1, -1);
    const RootSet roots = find_roots(PolySystem({f1, f2}, 1), Box::symmetric(2, 2.0));
    CHECK(roots.roots.empty());
}

TEST_CASE("double roots collapse to two multiple roots") {
    const RootSet roots = find_roots(fixtures::double_root_system(), Box::symmetric(2, 2.0));
    REQUIRE(roots.roots.size() == 2);
    CHECK(roots_match(roots, {{1.0, 0.0}, {-1.0, 0.0}}, 1e-6));
    for (const auto& r : roots.roots) {
        CHECK(r.multiple);
        CHECK(r.multiplicity_estimate >= 2);
        CHECK(std::abs(r.jf_value) <= 1e-6);
        CHECK(r.residual <= 1e-8);
        CHECK(r.cluster_members >= 1);
    }
}

TEST_CASE("triple-root system classifies eight simple and eight multiple") {
    const RootSet roots = find_roots(fixtures::triple_root_system(), Box::symmetric(3, 2.0));
    REQUIRE(roots.roots.size() == 16);
    CHECK(roots.simple_count() == 8);
    CHECK(roots.multiple_count() == 8);

    std::vector<std::vector<double>> expected = fixtures::orbit(fixtures::triple_root_simple_rep());
    const auto triples = fixtures::orbit(fixtures::triple_root_triple_rep());
    expected.insert(expected.end(), triples.begin(), triples.end());
    CHECK(roots_match(roots, expected, 1e-6));

    const std::vector<std::vector<int>> flips{{-1, 1, 1}, {1, -1, 1}, {1, 1, -1}};
    CHECK(is_sign_flip_invariant(roots, flips, 1e-6));
}

TEST_CASE("sign-flip invariance of root sets") {
    const RootSet roots = find_roots(fixtures::threed_system(), Box::symmetric(3, 2.0));
    const std::vector<std::vector<int>> group{{-1, -1, 1}, {1, 1, -1}};
    CHECK(is_sign_flip_invariant(roots, group, 1e-6));

    const PolySystem assym({mono2(1, 0, 1.0) + mono2(0, 0, -1.0), mono2(0, 1, 1.0)}, 1);
    const RootSet ar = find_roots(assym, Box::symmetric(2, 2.0));
    REQUIRE(ar.roots.size() == 1);
    CHECK_FALSE(is_sign_flip_invariant(ar, {{-1, 1}}, 1e-6));
}

TEST_CASE("double-double arithmetic carries ~31 digits") {
    const DD third = DD(1.0) / DD(3.0);
    const DD back = third * DD(3.0) - DD(1.0);
    CHECK(std::abs(back.hi) < 1e-30);

    // error-free addition split
    const DD s = DD(1.0) + DD(1e-20);
    CHECK(s.hi == 1.0);
    CHECK(s.lo == 1e-20);

    // exact product split: (1 + 2^-30)(1 - 2^-30) = 1 - 2^-60
    const double eps30 = std::ldexp(1.0, -30);
    const DD p = DD(1.0 + eps30) * DD(1.0 - eps30);
    CHECK(p.hi == 1.0);
    CHECK(p.lo == -std::ldexp(1.0, -60));
}

TEST_CASE("identical seeds reproduce identical root sets") {
    SolveConfig cfg;
    cfg.seed = 31337;
    const RootSet a = find_roots(fixtures::kearfott_system(), Box::symmetric(2, 2.0), cfg);
    const RootSet b = find_roots(fixtures::kearfott_system(), Box::symmetric(2, 2.0), cfg);
    REQUIRE(a.roots.size() == b.roots.size());
    for (std::size_t i = 0; i < a.roots.size(); ++i) {
        CHECK(a.roots[i].x == b.roots[i].x);  // bitwise
        CHECK(a.roots[i].residual == b.roots[i].residual);
        CHECK(a.roots[i].jf_value == b.roots[i].jf_value);
    }
}
