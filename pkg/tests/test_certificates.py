import math

import numpy as np
import pytest

from errbound import InputError, ModelError, PreconditionError, SamplingError, make_instance
from errbound import certificates as cert
from errbound.core import distance_to_solution_set


def test_sample_points_reproducible(quad1d):
    a = cert.sample_points(quad1d, 3, seed=1, variant="original")
    b = cert.sample_points(quad1d, 3, seed=1, variant="original")
    assert a.shape == (3, 1) and np.all(a != 0)
    np.testing.assert_array_equal(a, b)


def test_sample_points_prefix_stable(lasso7):
    big = cert.sample_points(lasso7, 50, seed=4)
    np.testing.assert_array_equal(cert.sample_points(lasso7, 20, seed=4), big[:20])


def test_modified_samples_feasible(instances):
    p = instances["box_ls"]
    Q = p.constraint
    pts = cert.sample_points(p, 300, seed=0, variant="modified")
    assert np.all(pts @ Q.A.T <= Q.b + 1e-10)


def test_extended_samples_in_sublevel_set(lasso7):
    pts = cert.sample_points(lasso7, 300, seed=0, variant="extended", omega=0.1)
    assert max(lasso7.phi(y) for y in pts) <= lasso7.phi_star + 0.1 + 1e-12


def test_variant_rules(lasso7, rankdef):
    with pytest.raises(InputError):
        cert.sample_points(lasso7, 5, 0, variant="original")
    with pytest.raises(InputError):
        cert.sample_points(lasso7, 5, 0, variant="modified")
    with pytest.raises(InputError):
        cert.sample_points(rankdef, 5, 0, variant="sideways")
    with pytest.raises(InputError):
        cert.sample_points(rankdef, 0, 0)


def test_sampling_error_when_sublevel_set_is_tiny(quad1d):
    # phi <= 1e-18 forces |y| <= ~1.4e-9, below the 1e-8 distance floor
    with pytest.raises(SamplingError):
        cert.sample_points(quad1d, 5, 0, variant="extended", omega=1e-18)


def test_quad1d_constants(quad1d):
    for prop in cert.PROPERTIES:
        est = cert.estimate_constant(quad1d, prop, n_samples=200, seed=0)
        assert est.constant == pytest.approx(1.0, abs=1e-12)
        assert est.upper_bound


@pytest.mark.parametrize("prop", cert.PROPERTIES)
def test_rankdef_constants(rankdef, prop):
    est = cert.estimate_constant(rankdef, prop, n_samples=500, seed=0)
    assert est.constant == pytest.approx(2.0, abs=1e-9)


def test_lasso_estimate_reproducible(lasso7):
    a = cert.estimate_constant(lasso7, "qg", "extended", omega=1.0, n_samples=300, seed=9)
    b = cert.estimate_constant(lasso7, "qg", "extended", omega=1.0, n_samples=300, seed=9)
    assert a.constant > 0 and a.constant == b.constant and a.proxy
    d = a.to_dict()
    assert d["upper_bound_flag"] is True and d["property"] == "qg"


def test_estimates_decrease_with_samples(lasso7):
    small = cert.estimate_constant(lasso7, "geb", n_samples=50, seed=2).constant
    large = cert.estimate_constant(lasso7, "geb", n_samples=400, seed=2).constant
    assert large <= small


def test_unknown_property(quad1d):
    with pytest.raises(InputError):
        cert.estimate_constant(quad1d, "pl", n_samples=5)


def test_qg_chain_constants():
    assert cert.chain_theorem1(2.0) == {"rsc": 1.0, "geb": 1.0, "qg": 0.5}
    assert cert.chain_theorem1(1.0) == {"rsc": 0.5, "geb": 0.5, "qg": 0.25}
    assert cert.chain_theorem1(4 * 0.3)["qg"] == pytest.approx(0.3, rel=1e-15)
    with pytest.raises(InputError):
        cert.chain_theorem1(0.0)


def test_extended_conversion():
    c = cert.chain_theorem2(1.0, 1.0, 1.0)
    assert c["geb"] == pytest.approx(1 / 6, rel=1e-15)
    assert c["rsc"] == pytest.approx(1 / 36, rel=1e-15)
    c = cert.chain_theorem2(2.0, 2.0, 2.0)
    assert c["geb"] == pytest.approx(1 / 3, rel=1e-15)
    assert c["rsc"] == pytest.approx(1 / 18, rel=1e-15)
    tiny = cert.chain_theorem2(1e-12, 1.0, 1.0)
    assert tiny["geb"] < 1e-12 and tiny["rsc"] < 1e-24
    with pytest.raises(PreconditionError):
        cert.chain_theorem2(1.0, 0.5, 1.0)
    assert cert.chain_theorem2_forward(0.7) == {"geb": 0.7, "qg": 0.7}


def test_verify_chain_rankdef(rankdef):
    rep = cert.verify_chain(rankdef, n_samples=500)
    assert rep.passed
    c = rep.constants
    assert c["rsc"] - c["qg"] / 2 >= 0 and c["geb"] - c["rsc"] >= -1e-12


def test_verify_chain_quad1d_strict(quad1d):
    rep = cert.verify_chain(quad1d, n_samples=200)
    assert rep.passed
    # <y, y> - y^2 / 2 = y^2 / 2 > 0
    assert rep.check("gradient_mapping_strengthening").worst > 0


def test_verify_chain_families(instances):
    for p in instances.values():
        for omega in (math.inf, 1.0):
            rep = cert.verify_chain(p, omega=omega, n_samples=300, seed=1)
            assert rep.passed, (p.family, omega, [str(c) for c in rep.checks])


def test_verify_chain_catches_wrong_phi_star(rankdef):
    import dataclasses
    bad = dataclasses.replace(rankdef, solution_set=dataclasses.replace(
        rankdef.solution_set, phi_star=0.5))
    rep = cert.verify_chain(bad, n_samples=100)
    assert not rep.passed and rep.violations


def test_verify_pointwise_families(instances):
    for p in instances.values():
        rep = cert.verify_pointwise(p, n_samples=300, seed=2)
        assert rep.passed, (p.family, [str(c) for c in rep.checks])
        assert rep.check("composition_growth").checked == 300


def test_hoffman_scalar():
    est = cert.hoffman_estimate([[1.0]], [[-1.0]], [0.0], [1.0], n_samples=200)
    assert est.theta == pytest.approx(1.0, abs=1e-12)


def test_hoffman_rankdef():
    est = cert.hoffman_estimate([[1.0, 1.0]], None, None, [1.0], n_samples=300)
    assert est.theta == pytest.approx(2.0, abs=1e-9)


def test_hoffman_random_reproducible():
    E = np.random.default_rng(11).standard_normal((2, 4))
    a = cert.hoffman_estimate(E, None, None, [0.5, -1.0], n_samples=200, seed=11)
    b = cert.hoffman_estimate(E, None, None, [0.5, -1.0], n_samples=200, seed=11)
    assert a.theta > 0 and a.theta == b.theta
    # unconstrained slice: the smallest eigenvalue of E E^T is the exact value
    assert a.theta >= np.linalg.eigvalsh(E @ E.T)[0] * (1 - 1e-9)


def test_hoffman_inconsistent():
    with pytest.raises(ModelError):
        cert.hoffman_estimate([[1.0]], [[1.0]], [0.0], [1.0], n_samples=5)


def test_case_study_rankdef(rankdef):
    rep = cert.verify_case_study(rankdef, n_samples=500)
    assert rep.passed
    assert rep.constants["theta"] == pytest.approx(2.0, abs=1e-12)
    assert rep.constants["C1"] == pytest.approx(1.0, abs=1e-12)


def test_case_study_sides_on_solution_set(rankdef):
    y = np.array([0.25, 0.75])
    lhs_s, rhs_s, lhs_q, rhs_q, lhs_n, rhs_n = cert.case_study_sides(rankdef, y, 2.0, 1.0, 1.0, 0.5)
    assert max(abs(lhs_s), abs(rhs_s), abs(lhs_q), abs(rhs_q), abs(lhs_n), abs(rhs_n)) <= 1e-15


def test_case_study_rankdef_by_hand(rankdef):
    # ||G|| = 2 d, so 2 d^2 >= (1/4) 4 d^2 + d^2 holds with equality
    y = np.array([2.0, 1.0])
    d = distance_to_solution_set(rankdef, y).d
    lhs_s, rhs_s, *_ = cert.case_study_sides(rankdef, y, 2.0, 1.0, 1.0, 0.5)
    assert lhs_s == pytest.approx(2 * d * d) and rhs_s == pytest.approx(2 * d * d)


def test_case_study_fitted_theta():
    p = make_instance("case_study", seed=3)
    rep = cert.verify_case_study(p, n_samples=1500, seed=3)
    assert rep.passed
    assert rep.constants["theta_source"] == "fitted"
    assert 0 < rep.constants["theta"] < 1


def test_case_study_preconditions(lasso7, rankdef):
    with pytest.raises(ModelError):
        cert.verify_case_study(lasso7, n_samples=5)
    with pytest.raises(PreconditionError):
        cert.verify_case_study(rankdef, gamma=1.0, n_samples=5)


def test_verify_rates_rankdef(rankdef):
    rep, trace = cert.verify_rates(rankdef, gamma=2.0, tau=2.0, kappa=2.0, x0=[2.0, 1.0])
    assert rep.passed and trace.iterations == 1


def test_verify_rates_lasso(lasso7):
    rep, trace = cert.verify_rates(lasso7, omega=1.0, n_samples=500, x0=np.zeros(10),
                                   cap=500, tol=0.0)
    assert rep.passed and trace.iterations == 500
    names = [c.name for c in rep.checks]
    assert "rlinear_iterates" in names and "qlinear_distance" in names
