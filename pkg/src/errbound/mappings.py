"""Gradient mapping, proximal gradient mapping and the inequality gaps.

The gap functions return ``lhs - rhs`` of the inequality they evaluate, so
a violation shows up as a negative number whose size can be reported.
"""

from dataclasses import dataclass

import numpy as np

from . import _activeset
from .core import Polyhedron
from .errors import ModelError, PreconditionError


def slack(rhs, scale=1e-9):
    """Additive tolerance ``scale * (1 + |rhs|)`` used by every ``>=`` check."""
    return scale * (1.0 + abs(rhs))


@dataclass(frozen=True, eq=False)
class MappingResult:
    base: np.ndarray
    gamma: float
    forward: np.ndarray
    G: np.ndarray

    @property
    def norm(self):
        return float(np.linalg.norm(self.G))


def _box_clip(Q, y):
    bounds = Q.box_bounds()
    if bounds is None:
        return None
    return np.clip(y, *bounds)


def project_polyhedron(Q, y):
    """Euclidean projection of ``y`` onto ``Q = {x : A x <= b}``.

    Closed forms handle the whole space, boxes and single halfspaces; the
    rest goes through the dual active-set solver.
    """
    y = np.asarray(y, dtype=float)
    if Q is None or Q.k == 0:
        return y.copy()
    x = _box_clip(Q, y)
    if x is not None:
        return x
    if Q.k == 1:
        a, beta = Q.A[0], Q.b[0]
        viol = a @ y - beta
        aa = a @ a
        if aa == 0.0:
            if beta < 0:
                raise ModelError("polyhedron is empty")
            return y.copy()
        return y - max(viol, 0.0) / aa * a
    return _activeset.project(y, Q.A, Q.b)[0]


def prox(g, z, gamma):
    """``argmin_x g(x) + (gamma/2) ||x - z||^2``."""
    if gamma <= 0:
        raise PreconditionError(f"gamma must be positive, got {gamma}")
    z = np.asarray(z, dtype=float)
    if g.kind == "zero":
        return z.copy()
    if g.kind == "l1":
        thr = g.lam / gamma
        return np.sign(z) * np.maximum(np.abs(z) - thr, 0.0)
    if g.kind == "indicator":
        return project_polyhedron(g.polyhedron, z)
    raise ModelError(f"unknown regularizer kind {g.kind!r}")


def gradient_mapping(f, Q, x, gamma):
    """``G = gamma (x - x_Q)`` with ``x_Q = P_Q(x - grad f(x) / gamma)``."""
    if gamma <= 0:
        raise PreconditionError(f"gamma must be positive, got {gamma}")
    x = np.asarray(x, dtype=float)
    grad = f.grad(x)
    if Q is None or Q.k == 0:
        # exact reduction to the gradient, no round trip through x - grad/gamma
        return MappingResult(x, gamma, x - grad / gamma, grad.copy())
    fwd = project_polyhedron(Q, x - grad / gamma)
    return MappingResult(x, gamma, fwd, gamma * (x - fwd))


def prox_gradient_mapping(f, g, x, gamma):
    """``G = gamma (x - p)`` with ``p = prox_g(x - grad f(x) / gamma, gamma)``."""
    if g.kind == "indicator":
        return gradient_mapping(f, g.polyhedron, x, gamma)
    if g.kind == "zero":
        return gradient_mapping(f, None, x, gamma)
    x = np.asarray(x, dtype=float)
    fwd = prox(g, x - f.grad(x) / gamma, gamma)
    return MappingResult(x, gamma, fwd, gamma * (x - fwd))


def problem_mapping(p, x, gamma):
    """Proximal gradient mapping of a composite problem at ``x``."""
    return prox_gradient_mapping(p.f, p.g, x, gamma)


def natural_residual(f, Q, y):
    """``||y - P_Q(y - grad f(y))||``, i.e. the gradient-mapping norm at gamma=1."""
    return gradient_mapping(f, Q, y, 1.0).norm


def lemma3_gap(p, x, xbar, gamma):
    """Gap in ``phi(x) - phi(p) >= <G, x - xbar> + ||G||^2 / (2 gamma)``.

    ``p`` is the proximal gradient step from ``xbar``; valid for every ``x``
    in the domain of ``g`` when ``gamma >= L``.
    """
    if gamma < p.L * (1 - 1e-12):
        raise PreconditionError(f"requires gamma >= L = {p.L}, got {gamma}")
    x = np.asarray(x, dtype=float)
    res = problem_mapping(p, xbar, gamma)
    lhs = p.phi(x) - p.phi(res.forward)
    rhs = float(res.G @ (x - res.base)) + res.norm ** 2 / (2 * gamma)
    return lhs - rhs


def lemma5_gap(p, x, xbar, gamma):
    """Gap in the composition strengthening of the gradient-mapping inequality.

    ``f(x) >= f(x_Q) + <G, x - xbar> + ||G||^2/(2 gamma) + mu/2 ||E x - E xbar||^2``
    for ``x`` in ``Q`` and ``gamma >= L_hat``; ``Q`` is the problem's
    constraint set (the whole space unless ``g`` is an indicator).
    """
    comp = p.composition
    if comp is None:
        raise ModelError("lemma5_gap needs a composition structure f = g(Ex)")
    L_hat = comp.L_hat
    if gamma < L_hat * (1 - 1e-12):
        raise PreconditionError(f"requires gamma >= L_hat = {L_hat}, got {gamma}")
    x = np.asarray(x, dtype=float)
    Q = p.constraint
    res = gradient_mapping(p.f, Q, xbar, gamma)
    dE = comp.E @ (x - res.base)
    lhs = p.f(x)
    rhs = (p.f(res.forward) + float(res.G @ (x - res.base))
           + res.norm ** 2 / (2 * gamma) + 0.5 * comp.mu * float(dE @ dE))
    return lhs - rhs


def lemma4_gaps(p, x, y):
    """Both gaps of the two-sided Bregman bound for ``f = g_in(E x)``.

    Returns ``(lower, upper)`` where ``lower = D - mu/2 ||E(y-x)||^2`` and
    ``upper = L_hat/2 ||y-x||^2 - D`` with ``D`` the Bregman divergence.
    """
    comp = p.composition
    if comp is None:
        raise ModelError("lemma4_gaps needs a composition structure f = g(Ex)")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    D = p.f(y) - p.f(x) - float(p.f.grad(x) @ (y - x))
    dE = comp.E @ (y - x)
    return D - 0.5 * comp.mu * float(dE @ dE), 0.5 * comp.L_hat * float((y - x) @ (y - x)) - D


def descent_gap(p, xbar, gamma):
    """Gap in ``phi(xbar) - phi(p) >= (gamma/2) ||xbar - p||^2``."""
    res = problem_mapping(p, xbar, gamma)
    step = res.base - res.forward
    return p.phi(res.base) - p.phi(res.forward) - 0.5 * gamma * float(step @ step)


__all__ = [
    "MappingResult", "Polyhedron", "descent_gap", "gradient_mapping",
    "lemma3_gap", "lemma4_gaps", "lemma5_gap", "natural_residual", "problem_mapping",
    "project_polyhedron", "prox", "prox_gradient_mapping", "slack",
]
