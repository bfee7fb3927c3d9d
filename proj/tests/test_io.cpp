#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "paper_systems.hpp"
#include "rootshift/io.hpp"
#include "rootshift/splitter.hpp"

using namespace rootshift;
using nlohmann::json;

static const std::string kFixtures = FIXTURE_DIR;

TEST_CASE("parsing the conic-pair fixture") {
    const SystemFile file = parse_system_file(kFixtures + "/kearfott.json");
    CHECK(file.sys.dim() == 2);
    CHECK(file.sys.degrees() == std::vector<int>{2, 2});
    CHECK(file.sys.ell() == 2);
    CHECK(file.sys.poly(0) == fixtures::kearfott_system().poly(0));
    CHECK(file.sys.poly(1) == fixtures::kearfott_system().poly(1));
    REQUIRE(file.perturbation.has_value());
    CHECK(file.perturbation->phi == fixtures::kearfott_pert_first_row().phi);
    CHECK(file.perturbation->row_poly(0) == file.perturbation->phi);
    CHECK(file.perturbation->row_poly(1).is_zero());
    REQUIRE(file.box.has_value());
    CHECK(file.box->lo(0) == -2.0);
    CHECK(file.ball_r == 2.0);
}

TEST_CASE("parsing the 3D fixture applies the canonical order") {
    const SystemFile file = parse_system_file(kFixtures + "/sys3d.json");
    CHECK(file.sys.dim() == 3);
    CHECK(file.sys.degrees() == std::vector<int>{2, 2, 4});
    CHECK(file.sys.ell() == 2);  // the ellipsoid
    const PolySystem expected = fixtures::threed_system();
    for (int i = 0; i < 3; ++i) CHECK(file.sys.poly(i) == expected.poly(i));
    REQUIRE(file.perturbation.has_value());
    CHECK(file.perturbation->row_poly(0) == file.perturbation->phi);
}

TEST_CASE("the expanded fixtures agree with their product form") {
    const SystemFile base = parse_system_file(kFixtures + "/mult3d.json");
    const PolySystem built = fixtures::triple_root_system();
    for (int i = 0; i < 3; ++i) CHECK(base.sys.poly(i) == built.poly(i));

    const SystemFile deformed = parse_system_file(kFixtures + "/mult3d_t05.json");
    const PolySystem expected =
        apply_deformation(built, fixtures::triple_root_deformation(0.5));
    for (int i = 0; i < 3; ++i) CHECK(deformed.sys.poly(i) == expected.poly(i));
}

TEST_CASE("round trip through json is semantically identical") {
    for (const char* name : {"/kearfott.json", "/sys3d.json", "/mult2d.json", "/mult3d.json"}) {
        const SystemFile a = parse_system_file(kFixtures + name);
        const SystemFile b = parse_system_json(to_json(a));
        REQUIRE(a.sys.dim() == b.sys.dim());
        for (int i = 0; i < a.sys.dim(); ++i) CHECK(a.sys.poly(i) == b.sys.poly(i));
        CHECK(a.sys.ell() == b.sys.ell());
        CHECK(a.perturbation.has_value() == b.perturbation.has_value());
        if (a.perturbation) {
            CHECK(a.perturbation->phi == b.perturbation->phi);
            CHECK(a.perturbation->F == b.perturbation->F);
        }
        if (a.deformation) {
            REQUIRE(b.deformation.has_value());
            for (std::size_t i = 0; i < a.deformation->size(); ++i)
                CHECK((*a.deformation)[i] == (*b.deformation)[i]);
        }
    }
}

TEST_CASE("schema violations carry the offending field") {
    auto expect_error = [](const json& j, const char* needle) {
        try {
            parse_system_json(j);
            FAIL_CHECK("expected ParseError for " << needle);
        } catch (const ParseError& e) {
            CHECK(std::string(e.what()).find(needle) != std::string::npos);
        }
    };

    expect_error(json{{"polynomials", json::array()}}, "n");
    expect_error(json{{"n", 2}, {"polynomials", json::array()}}, "polynomials");

    json square{{"n", 2},
                {"polynomials",
                 {{{{"coeff", 1.0}, {"exp", {1, 0}}}}, {{{"coeff", 1.0}, {"exp", {0, 1}}}}}}};
    {
        json j = square;
        j["polynomials"][0] = json::array();  // zero polynomial
        expect_error(j, "zero polynomial");
    }
    {
        json j = square;
        j["polynomials"][0][0]["exp"] = {1, 0, 0};
        expect_error(j, "exp");
    }
    {
        json j = square;
        j["polynomials"][0][0]["exp"] = {-1, 0};
        expect_error(j, "non-negative");
    }
    {
        json j = square;
        j["ell"] = 3;
        expect_error(j, "ell");
    }
    {
        json j = square;
        j["box"] = {{2.0, -2.0}, {0.0, 1.0}};
        expect_error(j, "box");
    }
    {
        json j = square;
        j["perturbation"] = {{"phi", {{{"coeff", 1.0}, {"exp", {1, 1}}}}},
                             {"F", {{1.0, 1.0}, {1.0, 1.0}}}};
        expect_error(j, "invertible");
    }
    {
        json j = square;
        j["perturbation"] = {{"phi", {{{"coeff", 1.0}, {"exp", {1, 1}}}}}, {"rows", {5}}};
        expect_error(j, "row");
    }
    CHECK_THROWS_AS(parse_system_file(kFixtures + "/bad.json"), ParseError);
    CHECK_THROWS_AS(parse_system_file(kFixtures + "/no_such_file.json"), ParseError);
}

TEST_CASE("csv writers") {
    const RootSet roots = find_roots(fixtures::kearfott_system(), Box::symmetric(2, 2.0));
    std::ostringstream os;
    write_roots_csv(os, roots);
    const std::string csv = os.str();
    CHECK(csv.find("x1,x2,residual,jf,class,multiplicity,cluster_members") == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);  // header + 4 roots

    const TrackReport track = track_path(fixtures::kearfott_system(),
                                         fixtures::kearfott_pert_first_row(),
                                         roots.roots.front().x, 0.0, 0.033);
    std::ostringstream ps;
    write_paths_csv(ps, {track});
    const std::string paths_csv = ps.str();
    CHECK(paths_csv.find("path,tau,x1,x2,jf,step,residual") == 0);
    CHECK(std::count(paths_csv.begin(), paths_csv.end(), '\n') >=
          static_cast<long>(track.path.size()));
}

TEST_CASE("report serializers keep the key fields") {
    const PolySystem sys = fixtures::kearfott_system();
    const IdealCertificate cert = certify_ideal_power(sys, 1);
    const json jc = to_json(cert);
    CHECK(jc["k"] == 1);
    CHECK(jc["mu"] == 2);
    CHECK(jc["entries"].size() == 2);

    PerturbationSpec pert = fixtures::kearfott_pert_first_row();
    pert.k = 1;
    const json jb = to_json(make_bound_report(cert, pert, Box::symmetric(2, 2.0)));
    CHECK(jb["phi_norm"] == 3.0);
    CHECK(jb["mu"] == 2);
    CHECK(jb["t_star"].get<double>() == doctest::Approx(1.0 / 30.0));

    const json jl = to_json(lattice_check(fixtures::lattice_counterexample().poly(0)));
    CHECK(jl["index"] == 3);
    CHECK(jl["passes"] == false);
}
