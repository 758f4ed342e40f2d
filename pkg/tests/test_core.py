import numpy as np
import pytest

from errbound import (GenerationError, InputError, ModelError, Polyhedron, distance_to_solution_set,
                      make_instance, spectral_norm)
from errbound.core import CompositionStructure, Regularizer, SolutionSetModel


def test_quad1d_instance(quad1d):
    assert quad1d.L == 1.0
    assert quad1d.composition.mu == 1.0
    assert quad1d.phi_star == 0.0
    assert quad1d.g.kind == "zero"
    assert quad1d.phi(np.array([3.0])) == 4.5
    np.testing.assert_array_equal(quad1d.solution_set.points[0], [0.0])


def test_rankdef_instance(rankdef):
    comp = rankdef.composition
    np.testing.assert_array_equal(comp.E, [[1.0, 1.0]])
    np.testing.assert_array_equal(rankdef.solution_set.t_star, [1.0])
    assert comp.L_hat == pytest.approx(2.0, abs=1e-14)
    x = np.array([0.3, 0.9])
    assert rankdef.phi(x) == pytest.approx(0.5 * 0.2 ** 2, abs=1e-15)


def test_lasso_reproducible():
    p1 = make_instance("lasso", seed=7)
    p2 = make_instance("lasso", seed=7)
    assert p1.solution_set.variant == "proxy"
    x1, x2 = p1.solution_set.points[0], p2.solution_set.points[0]
    assert np.array_equal(x1, x2)
    assert p1.phi(x1) == p2.phi(x2)
    assert p1.phi_star == p2.phi_star


def test_lasso_seeds_differ():
    a = make_instance("lasso", seed=1).composition.E
    b = make_instance("lasso", seed=2).composition.E
    assert not np.array_equal(a, b)


@pytest.mark.parametrize("M, expected", [
    (np.eye(3), 1.0),
    (np.array([[1.0, 1.0]]) @ np.array([[1.0, 1.0]]).T, 2.0),
    (np.zeros((3, 3)), 0.0),
])
def test_spectral_norm(M, expected):
    assert spectral_norm(M) == pytest.approx(expected, abs=1e-14)


def test_spectral_norm_power_iteration_branch():
    rng = np.random.default_rng(0)
    M = rng.standard_normal((80, 80))
    M = M @ M.T
    assert spectral_norm(M) == pytest.approx(np.linalg.norm(M, 2), rel=1e-9)


def test_spectral_norm_rejects_empty():
    with pytest.raises(InputError):
        spectral_norm(np.zeros((0, 3)))


def test_distance_quad1d(quad1d):
    d = distance_to_solution_set(quad1d, np.array([3.0]))
    assert d.d == 3.0
    np.testing.assert_array_equal(d.proj, [0.0])
    assert not d.upper_bound


def test_distance_rankdef(rankdef):
    d = distance_to_solution_set(rankdef, np.array([2.0, 1.0]))
    assert d.d == pytest.approx(np.sqrt(2.0), abs=1e-15)
    np.testing.assert_allclose(d.proj, [1.0, 0.0], atol=1e-15)


def test_distance_inside_solution_set(instances):
    for p in instances.values():
        x = p.solution_set.points[0]
        d = distance_to_solution_set(p, x)
        assert d.d <= 1e-12
        np.testing.assert_allclose(d.proj, x, atol=1e-12)


def test_distance_proxy_flag(lasso7):
    assert distance_to_solution_set(lasso7, np.zeros(10)).upper_bound


def test_case_study_solution_set_is_exact(instances):
    p = instances["case_study"]
    S = p.solution_set
    assert S.exact and S.polyhedron is p.constraint
    x = S.points[0]
    assert p.constraint.contains(x)
    # the reference point sits at least 0.1 inside every facet
    slack = (p.constraint.b - p.constraint.A @ x) / np.linalg.norm(p.constraint.A, axis=1)
    assert slack.min() >= 0.1


def test_polyhedron_box_and_whole_space():
    Q = Polyhedron.box([0.0, 0.0], [1.0, 2.0])
    lo, hi = Q.box_bounds()
    np.testing.assert_array_equal(lo, [0.0, 0.0])
    np.testing.assert_array_equal(hi, [1.0, 2.0])
    assert Q.contains(np.array([1.0, 2.0]))
    assert not Q.contains(np.array([1.1, 0.0]))
    assert Polyhedron.whole_space(3).k == 0


def test_empty_polyhedron_is_model_error():
    with pytest.raises(ModelError):
        Polyhedron(np.array([[1.0], [-1.0]]), np.array([0.0, -1.0]))


def test_bad_inputs():
    with pytest.raises(InputError):
        make_instance("nope")
    with pytest.raises(InputError):
        make_instance("lasso", n=0)
    with pytest.raises(InputError):
        make_instance("lasso", n=10_000)
    with pytest.raises(InputError):
        make_instance("rankdef_ls", m=3, n=2)
    with pytest.raises(InputError):
        CompositionStructure.quadratic([[1.0]], [0.0], [[0.0]])
    with pytest.raises(ModelError):
        Regularizer("indicator")
    with pytest.raises(ModelError):
        SolutionSetModel("affine_slice", 0.0, ())


def test_case_study_generation_failure():
    # a ball of radius 10 never fits inside slacks drawn from [0, |a_i|)
    from errbound.core import _case_study
    with pytest.raises(GenerationError):
        _case_study(np.random.default_rng(0), 0, radius=10.0)


def test_custom_sizes():
    p = make_instance("rankdef_ls", seed=1, m=2, n=5)
    assert p.n == 5 and p.composition.E.shape == (2, 5)
    x = p.solution_set.points[0]
    assert p.phi(x) == pytest.approx(0.0, abs=1e-20)
    assert make_instance("case_study", seed=2, m=3, n=6, k=8).constraint.k == 8
