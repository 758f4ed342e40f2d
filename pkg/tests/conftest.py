import numpy as np
import pytest

from errbound import FAMILIES, make_instance
from errbound.core import (CompositeProblem, CompositionStructure, Polyhedron, Regularizer,
                           SmoothTerm, SolutionSetModel)


@pytest.fixture(scope="session")
def instances():
    """One instance per family; lasso uses the reference seed 7."""
    return {fam: make_instance(fam, seed=7 if fam == "lasso" else 3) for fam in FAMILIES}


@pytest.fixture(scope="session")
def quad1d():
    return make_instance("quad1d")


@pytest.fixture(scope="session")
def rankdef():
    return make_instance("rankdef_ls")


@pytest.fixture(scope="session")
def lasso7():
    return make_instance("lasso", seed=7)


def constrained_quadratic(Q, center, solution):
    """``0.5 ||x - center||^2`` over ``Q`` with a known unique minimiser."""
    n = len(center)
    comp = CompositionStructure.quadratic(np.eye(n), center, mu=1.0, L_inner=1.0)
    S = SolutionSetModel("singleton", 0.5 * float(np.sum((np.asarray(solution) - center) ** 2)),
                         (np.asarray(solution, dtype=float),))
    return CompositeProblem(SmoothTerm.from_composition(comp),
                            Regularizer("indicator", polyhedron=Q), S)
