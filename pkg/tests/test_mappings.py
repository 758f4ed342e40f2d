import numpy as np
import pytest

from errbound import ModelError, Polyhedron, PreconditionError
from errbound.core import Regularizer
from errbound.mappings import (descent_gap, gradient_mapping, lemma3_gap, lemma4_gaps, lemma5_gap,
                               natural_residual, problem_mapping, project_polyhedron, prox,
                               prox_gradient_mapping)
from errbound.certificates import sample_points

from conftest import constrained_quadratic


def test_project_box():
    Q = Polyhedron.box([0.0, 0.0], [1.0, 1.0])
    np.testing.assert_array_equal(project_polyhedron(Q, [1.5, -0.3]), [1.0, 0.0])


def test_project_halfspace():
    Q = Polyhedron(np.array([[1.0, 1.0]]), np.array([1.0]))
    np.testing.assert_allclose(project_polyhedron(Q, [1.0, 1.0]), [0.5, 0.5], atol=1e-15)


def test_project_whole_space():
    y = np.array([3.0, -1.0, 2.0])
    np.testing.assert_array_equal(project_polyhedron(Polyhedron.whole_space(3), y), y)
    np.testing.assert_array_equal(project_polyhedron(None, y), y)


def test_project_general_polyhedron_kkt():
    # triangle x >= 0, y >= 0, x + 2y <= 2; closed-form answers on each face
    Q = Polyhedron(np.array([[-1.0, 0.0], [0.0, -1.0], [1.0, 2.0]]), np.array([0.0, 0.0, 2.0]))
    np.testing.assert_allclose(project_polyhedron(Q, [3.0, 3.0]), [1.6, 0.2], atol=1e-12)
    np.testing.assert_allclose(project_polyhedron(Q, [-1.0, 3.0]), [0.0, 1.0], atol=1e-12)
    np.testing.assert_allclose(project_polyhedron(Q, [1.0, 1.0]), [0.8, 0.6], atol=1e-12)
    np.testing.assert_array_equal(project_polyhedron(Q, [0.5, 0.5]), [0.5, 0.5])


@pytest.mark.parametrize("z, expected", [(3.0, 2.0), (0.5, 0.0), (-3.0, -2.0)])
def test_prox_l1(z, expected):
    assert prox(Regularizer("l1", 1.0), np.array([z]), 1.0)[0] == expected


def test_prox_zero_and_bad_gamma():
    z = np.array([0.1, -7.0])
    np.testing.assert_array_equal(prox(Regularizer(), z, 3.0), z)
    with pytest.raises(PreconditionError):
        prox(Regularizer(), z, 0.0)


def test_gradient_mapping_quad1d(quad1d):
    res = gradient_mapping(quad1d.f, None, np.array([2.0]), 1.0)
    assert res.forward[0] == 0.0 and res.G[0] == 2.0


def test_gradient_mapping_vanishes_on_solution_set(instances):
    for p in instances.values():
        for x in p.solution_set.points:
            assert problem_mapping(p, x, p.auto_gamma()).norm <= 1e-9


def test_gradient_mapping_box_vertex():
    # 0.5 ||x + 1||^2 on [0, 1]^2: at the vertex 0 the gradient (1, 1) points inward
    Q = Polyhedron.box([0.0, 0.0], [1.0, 1.0])
    p = constrained_quadratic(Q, np.array([-1.0, -1.0]), [0.0, 0.0])
    for gamma in (1.0, 2.0, 10.0):
        res = gradient_mapping(p.f, Q, np.zeros(2), gamma)
        np.testing.assert_array_equal(res.forward, [0.0, 0.0])
        np.testing.assert_array_equal(res.G, [0.0, 0.0])


def test_box_ls_vertex(instances):
    p = instances["box_ls"]
    x = p.solution_set.points[0]
    assert np.any(np.abs(np.abs(x) - 1.0) < 1e-12), "expected an active bound"
    res = gradient_mapping(p.f, p.constraint, x, p.L)
    assert res.norm <= 1e-10


def test_prox_gradient_reductions(instances):
    rng = np.random.default_rng(0)
    for p in instances.values():
        Q = p.constraint
        for _ in range(20):
            x = rng.standard_normal(p.n)
            gamma = p.auto_gamma()
            pg = prox_gradient_mapping(p.f, Regularizer("indicator", polyhedron=Q), x, gamma) \
                if Q.k else None
            if pg is not None:
                gm = gradient_mapping(p.f, Q, x, gamma)
                np.testing.assert_allclose(pg.G, gm.G, rtol=0, atol=1e-12)
            z = prox_gradient_mapping(p.f, Regularizer(), x, gamma)
            np.testing.assert_array_equal(z.G, p.f.grad(x))


def test_lasso_mapping_at_proxy(lasso7):
    x = lasso7.solution_set.points[0]
    assert problem_mapping(lasso7, x, lasso7.L).norm <= 1e-10


def test_natural_residual():
    Q = Polyhedron(np.array([[-1.0]]), np.array([-1.0]))   # x >= 1
    p = constrained_quadratic(Q, np.zeros(1), [1.0])
    assert natural_residual(p.f, Q, np.array([1.0])) == 0.0
    assert natural_residual(p.f, Q, np.array([3.0])) == 2.0
    y = np.array([0.4, -2.0])
    p2 = constrained_quadratic(Polyhedron.whole_space(2), np.ones(2), [1.0, 1.0])
    assert natural_residual(p2.f, None, y) == pytest.approx(np.linalg.norm(y - 1.0), abs=1e-15)
    assert natural_residual(p2.f, None, np.ones(2)) == 0.0


def test_key_inequality_quad1d_by_hand(quad1d):
    assert lemma3_gap(quad1d, np.array([0.0]), np.array([2.0]), 1.0) == pytest.approx(2.0)


def test_key_inequality_at_minimiser(instances):
    for p in instances.values():
        x = p.solution_set.points[0]
        assert abs(lemma3_gap(p, x, x, p.auto_gamma())) <= 1e-9


def test_key_inequality_requires_gamma_at_least_L(rankdef):
    with pytest.raises(PreconditionError):
        lemma3_gap(rankdef, np.zeros(2), np.ones(2), 1.0)


def test_key_inequality_lasso_pairs(lasso7):
    pts = sample_points(lasso7, 1000, seed=5)
    gaps = [lemma3_gap(lasso7, x, xb, lasso7.L) for x, xb in zip(pts, np.roll(pts, 1, axis=0))]
    assert min(gaps) >= -1e-9


def test_composition_growth_rankdef_by_hand(rankdef):
    # G = 2 (1, 1), forward = (1, 0); every term cancels: the inequality is tight
    gap = lemma5_gap(rankdef, np.array([1.0, 0.0]), np.array([2.0, 1.0]), 2.0)
    assert gap == pytest.approx(0.0, abs=1e-12)
    assert gap >= -1e-9


def test_composition_growth_at_minimiser(instances):
    for p in instances.values():
        x = p.solution_set.points[0]
        if p.g.kind != "l1":
            assert abs(lemma5_gap(p, x, x, p.auto_gamma())) <= 1e-9


def test_composition_growth_case_study_pairs(instances):
    p = instances["case_study"]
    pts = sample_points(p, 1000, seed=2, variant="modified")
    gaps = [lemma5_gap(p, x, xb, p.auto_gamma()) for x, xb in zip(pts, np.roll(pts, 1, axis=0))]
    assert min(gaps) >= -1e-9


def test_composition_growth_preconditions(rankdef, quad1d):
    with pytest.raises(PreconditionError):
        lemma5_gap(rankdef, np.zeros(2), np.ones(2), 1.5)
    from errbound.core import CompositeProblem, SmoothTerm
    plain = CompositeProblem(SmoothTerm(1, quad1d.f.value, quad1d.f.grad, 1.0), quad1d.g,
                             quad1d.solution_set)
    with pytest.raises(ModelError):
        lemma5_gap(plain, np.zeros(1), np.ones(1), 1.0)


def test_bregman_two_sided(instances):
    rng = np.random.default_rng(1)
    for p in instances.values():
        for _ in range(200):
            x, y = rng.standard_normal((2, p.n)) * 3
            lo, up = lemma4_gaps(p, x, y)
            assert lo >= -1e-9 * (1 + abs(lo)) and up >= -1e-9 * (1 + abs(up))


def test_descent_gap_nonnegative(instances):
    rng = np.random.default_rng(2)
    for p in instances.values():
        for y in sample_points(p, 100, seed=int(rng.integers(1 << 30)),
                               variant="original" if p.g.kind == "zero" else "extended"):
            assert descent_gap(p, y, p.auto_gamma()) >= -1e-9
