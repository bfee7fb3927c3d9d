"""Smoke tests for the python bindings: the main operations end to end."""

import math

import pytest

import rootshift as rs


def conic_pair():
    f1 = rs.MultiPoly(2, [([2, 0], 1.0), ([0, 2], -1.0), ([0, 0], -1.0)])
    f2 = rs.MultiPoly(2, [([2, 0], 1.0), ([0, 2], 1.0), ([0, 0], -2.0)])
    return rs.PolySystem([f1, f2], ell=2)


def test_poly_basics():
    p = rs.MultiPoly(2, [([1, 2], 1.0)])
    assert p.weighted_norm() == 3.0
    assert p.total_degree() == 3
    assert p.evaluate([2.0, 3.0]) == pytest.approx(18.0)
    d = p.partial(1)
    assert d.terms() == [([1, 1], 2.0)]


def test_certificate_and_bound():
    sys = conic_pair()
    assert rs.minimal_certified_k(sys) == 1
    cert = rs.certify_ideal_power(sys, 1)
    assert cert.mu == 2
    assert cert.residual <= 1e-9

    c_rig, c_est = rs.certificate_constant(cert, rs.Box.symmetric(2, 2.0), 3)
    assert c_rig == pytest.approx(2.5, abs=1e-12)
    assert c_est <= c_rig + 1e-12
    assert rs.perturbation_bound(3.0, c_rig, cert.mu) == pytest.approx(1.0 / 30.0)

    assert rs.monomial_count(3, 4) == 15
    invertible, via_bound = rs.lemma1_invertible([[0.2, 0.1], [0.0, -0.2]])
    assert invertible and via_bound


def test_solve_track_invariance():
    sys = conic_pair()
    box = rs.Box.symmetric(2, 2.0)
    roots = rs.find_roots(sys, box)
    assert len(roots) == 4
    assert roots.simple_count() == 4
    xs = sorted(abs(r.x[0]) for r in roots.roots)
    assert xs[0] == pytest.approx(math.sqrt(1.5), abs=1e-10)

    phi = rs.MultiPoly(2, [([1, 2], 1.0)])
    pert = rs.PerturbationSpec.for_rows(phi, [1], 2, k=1)
    track = rs.track_path(sys, pert, roots.roots[-1].x, 0.0, 0.033)
    assert track.status == "Completed"
    assert track.max_residual <= 1e-9

    inv = rs.verify_root_count_invariance(sys, pert, 0.033, box)
    assert inv.counts_match
    assert inv.bijection

    deformed = rs.perturbed_system(sys, pert, 0.033)
    bridged = rs.track_between(sys, deformed, roots.roots[-1].x)
    assert bridged.status == "Completed"
    assert max(abs(a - b) for a, b in zip(bridged.end, track.end)) < 1e-9


def test_split_and_probe():
    f1 = rs.MultiPoly(2, [([2, 0], 1.0), ([0, 2], -1.0), ([0, 0], -1.0)])
    f2 = rs.MultiPoly(2, [([4, 0], 1.0), ([0, 2], 1.0), ([0, 0], -1.0)])
    sys = rs.PolySystem([f1, f2], ell=1)
    box = rs.Box.symmetric(2, 2.0)

    roots = rs.find_roots(sys, box)
    assert len(roots) == 2
    assert roots.multiple_count() == 2

    count, _stable = rs.probe_multiplicity(sys, [1.0, 0.0])
    assert count == 2

    h2 = rs.MultiPoly(2, [([1, 0], 0.5), ([0, 0], -1.0)])
    deformation = rs.Deformation([rs.MultiPoly(2, []), h2], magnitude=0.5)
    report = rs.split_multiple_roots(sys, deformation, box, probe=True)
    assert len(report.after) == 4
    assert report.after.multiple_count() == 0
    assert report.conservation_ok


def test_kov_conditions_and_errors():
    sys = conic_pair()
    report = rs.check_kov_conditions(sys, sys, 2.0, samples=500)
    assert report.epsilon == 0.0
    assert report.pass_

    with pytest.raises(rs.NotInIdealError):
        bad = rs.PolySystem(
            [rs.MultiPoly(2, [([3, 0], 1.0)]), rs.MultiPoly(2, [([0, 3], 1.0)])], ell=1
        )
        rs.certify_ideal_power(bad, 12)
