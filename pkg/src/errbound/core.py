"""Problem model, instance library and small dense linear algebra.

Every problem handled by the package has the composite form
``phi(x) = f(x) + g(x)`` with ``f`` smooth (gradient Lipschitz with constant
``L``) and ``g`` one of three prox-friendly regularizers.  The instance
library builds all smooth terms as ``f(x) = g_in(E x)`` with a quadratic,
strongly convex ``g_in``, so ``mu`` and the composite constant
``L_hat = L_in * ||E E^T||`` are known exactly.

Randomness: every generator in this package is ``numpy.random.default_rng``
(PCG64) seeded from a single integer; no ambient entropy is used.
"""

from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional

import numpy as np
from scipy.optimize import linprog

from . import _activeset
from .errors import GenerationError, InputError, ModelError

FAMILIES = ("quad1d", "rankdef_ls", "lasso", "box_ls", "case_study")

MAX_N, MAX_K, MAX_M = 512, 64, 128


def spectral_norm(M):
    """Largest singular value of a dense matrix.

    Small matrices (``min(shape) <= 64``) go through LAPACK's SVD; larger ones
    use power iteration on ``M^T M`` from the deterministic start
    ``ones / sqrt(n)``.
    """
    M = np.atleast_2d(np.asarray(M, dtype=float))
    if M.size == 0:
        raise InputError("spectral_norm of an empty matrix")
    if M.ndim != 2:
        raise InputError(f"expected a 2-D matrix, got shape {M.shape}")
    if min(M.shape) <= 64:
        return float(np.linalg.norm(M, 2))
    v = np.ones(M.shape[1]) / np.sqrt(M.shape[1])
    sigma = 0.0
    for _ in range(10000):
        w = M.T @ (M @ v)
        nw = np.linalg.norm(w)
        if nw == 0.0:
            return 0.0
        v = w / nw
        new = np.sqrt(nw)
        if abs(new - sigma) <= 1e-13 * new:
            return float(new)
        sigma = new
    return float(sigma)


@dataclass(frozen=True, eq=False)
class Polyhedron:
    """``Q = {x : A x <= b}``; ``k = 0`` rows encodes the whole space."""

    A: np.ndarray
    b: np.ndarray
    feasible_point: Optional[np.ndarray] = None

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A, dtype=float))
        b = np.asarray(self.b, dtype=float).reshape(-1)
        if A.shape[0] != b.shape[0]:
            raise InputError(f"A has {A.shape[0]} rows but b has {b.shape[0]}")
        if A.shape[0] > MAX_K:
            raise InputError(f"at most {MAX_K} inequality rows supported")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        fp = self.feasible_point
        if fp is None:
            fp = _find_feasible(A, b)
        fp = np.asarray(fp, dtype=float)
        if not np.all(A @ fp <= b + 1e-9 * (1 + np.abs(b))):
            raise ModelError("stored point is not feasible for the polyhedron")
        object.__setattr__(self, "feasible_point", fp)

    @classmethod
    def whole_space(cls, n):
        return cls(np.zeros((0, n)), np.zeros(0), np.zeros(n))

    @classmethod
    def box(cls, lo, hi):
        lo = np.asarray(lo, dtype=float)
        hi = np.asarray(hi, dtype=float)
        n = lo.shape[0]
        if np.any(lo > hi):
            raise ModelError("empty box")
        A = np.vstack([np.eye(n), -np.eye(n)])
        return cls(A, np.concatenate([hi, -lo]), (lo + hi) / 2)

    @property
    def n(self):
        return self.A.shape[1]

    @property
    def k(self):
        return self.A.shape[0]

    def contains(self, x, tol=1e-10):
        return bool(np.all(self.A @ x - self.b <= tol * (1 + np.abs(self.b))))

    def box_bounds(self):
        """``(lo, hi)`` when every row is a signed coordinate bound, else None."""
        if self.k == 0:
            return None
        lo = np.full(self.n, -np.inf)
        hi = np.full(self.n, np.inf)
        for a, beta in zip(self.A, self.b):
            nz = np.flatnonzero(a)
            if nz.size != 1:
                return None
            i = nz[0]
            if a[i] > 0:
                hi[i] = min(hi[i], beta / a[i])
            else:
                lo[i] = max(lo[i], beta / a[i])
        return lo, hi


def _find_feasible(A, b):
    n = A.shape[1]
    if A.shape[0] == 0:
        return np.zeros(n)
    res = linprog(np.zeros(n), A_ub=A, b_ub=b, bounds=[(None, None)] * n,
                  method="highs")
    if res.status != 0:
        raise ModelError("polyhedron is empty")
    return res.x


@dataclass(frozen=True, eq=False)
class CompositionStructure:
    """``f(x) = g_in(E x)`` with ``g_in`` ``mu``-strongly convex, ``L_in``-smooth.

    For the quadratic inner functions used by the instance library
    ``g_in(s) = 0.5 (s - c)^T H (s - c)`` the data ``H`` and ``c`` are kept
    so that problems can be written to disk.
    """

    E: np.ndarray
    inner_value: Callable
    inner_grad: Callable
    mu: float
    L_inner: float
    H: Optional[np.ndarray] = None
    c: Optional[np.ndarray] = None

    @property
    def L_hat(self):
        return self.L_inner * spectral_norm(self.E @ self.E.T)

    @classmethod
    def quadratic(cls, E, c, H=None, mu=None, L_inner=None):
        E = np.atleast_2d(np.asarray(E, dtype=float))
        c = np.asarray(c, dtype=float).reshape(-1)
        m = E.shape[0]
        H = np.eye(m) if H is None else np.asarray(H, dtype=float)
        if mu is None or L_inner is None:
            ev = np.linalg.eigvalsh(H)
            mu = float(ev[0]) if mu is None else mu
            L_inner = float(ev[-1]) if L_inner is None else L_inner
        if mu <= 0:
            raise InputError("inner function must be strongly convex (mu > 0)")

        def value(s):
            r = s - c
            return 0.5 * float(r @ (H @ r))

        def grad(s):
            return H @ (s - c)

        return cls(E, value, grad, float(mu), float(L_inner), H, c)


@dataclass(frozen=True, eq=False)
class SmoothTerm:
    n: int
    value: Callable
    grad: Callable
    L: float
    composition: Optional[CompositionStructure] = None

    def __call__(self, x):
        return self.value(x)

    @classmethod
    def from_composition(cls, comp):
        E = comp.E

        def value(x):
            return comp.inner_value(E @ x)

        def grad(x):
            return E.T @ comp.inner_grad(E @ x)

        return cls(E.shape[1], value, grad, comp.L_hat, comp)


@dataclass(frozen=True, eq=False)
class Regularizer:
    """``zero``, ``l1`` (``lam * ||x||_1``) or ``indicator`` of a polyhedron."""

    kind: str = "zero"
    lam: float = 0.0
    polyhedron: Optional[Polyhedron] = None

    def __post_init__(self):
        if self.kind not in ("zero", "l1", "indicator"):
            raise ModelError(f"unknown regularizer kind {self.kind!r}")
        if self.kind == "l1" and self.lam < 0:
            raise InputError("l1 weight must be nonnegative")
        if self.kind == "indicator" and self.polyhedron is None:
            raise ModelError("indicator regularizer needs a polyhedron")

    def __call__(self, x):
        if self.kind == "zero":
            return 0.0
        if self.kind == "l1":
            return self.lam * float(np.sum(np.abs(x)))
        return 0.0 if self.polyhedron.contains(x) else np.inf


@dataclass(frozen=True, eq=False)
class SolutionSetModel:
    """How the minimiser set is accessed.

    ``singleton``: ``points[0]`` is the unique minimiser.
    ``affine_slice``: ``{x : E x = t_star}`` intersected with ``polyhedron``
    (when given); ``points`` holds representatives.
    ``proxy``: ``points`` are numerically computed minimisers; distances are
    upper bounds only.
    """

    variant: str
    phi_star: float
    points: tuple
    E: Optional[np.ndarray] = None
    t_star: Optional[np.ndarray] = None
    polyhedron: Optional[Polyhedron] = None

    def __post_init__(self):
        if self.variant not in ("singleton", "affine_slice", "proxy"):
            raise ModelError(f"unknown solution set variant {self.variant!r}")
        object.__setattr__(self, "points", tuple(
            np.asarray(p, dtype=float).reshape(-1) for p in self.points))
        if self.variant == "affine_slice" and (self.E is None or self.t_star is None):
            raise ModelError("affine_slice needs E and t_star")

    @property
    def exact(self):
        return self.variant != "proxy"


@dataclass(frozen=True, eq=False)
class CompositeProblem:
    f: SmoothTerm
    g: Regularizer
    solution_set: SolutionSetModel
    family: str = "custom"
    seed: Optional[int] = None
    sizes: dict = field(default_factory=dict)

    @property
    def n(self):
        return self.f.n

    @property
    def L(self):
        return self.f.L

    @property
    def phi_star(self):
        return self.solution_set.phi_star

    @property
    def composition(self):
        return self.f.composition

    @property
    def constraint(self):
        """The polyhedron ``Q`` (whole space unless ``g`` is an indicator)."""
        if self.g.kind == "indicator":
            return self.g.polyhedron
        return Polyhedron.whole_space(self.n)

    def phi(self, x):
        gx = self.g(x)
        if not np.isfinite(gx):
            return np.inf
        return self.f(x) + gx

    def auto_gamma(self):
        """``L_hat`` for composition problems, else ``L``."""
        if self.composition is not None:
            return self.composition.L_hat
        return self.L


class Distance(NamedTuple):
    d: float
    proj: np.ndarray
    upper_bound: bool


def distance_to_solution_set(p, y):
    """Distance from ``y`` to the minimiser set and the nearest point found."""
    y = np.asarray(y, dtype=float).reshape(-1)
    S = p.solution_set
    if S.variant == "singleton":
        proj = S.points[0]
    elif S.variant == "affine_slice":
        Q = S.polyhedron
        if Q is None or Q.k == 0:
            E = S.E
            delta = np.linalg.lstsq(E, S.t_star - E @ y, rcond=None)[0]
            proj = y + delta
        else:
            proj = _activeset.project(y, Q.A, Q.b, S.E, S.t_star)[0]
    else:
        if not S.points:
            raise ModelError("proxy solution set has no reference points")
        dists = [np.linalg.norm(y - q) for q in S.points]
        j = int(np.argmin(dists))
        return Distance(float(dists[j]), S.points[j].copy(), True)
    return Distance(float(np.linalg.norm(y - proj)), proj, False)


# --------------------------------------------------------------------------
# instance library


def _check_sizes(**sizes):
    for name, v in sizes.items():
        if not isinstance(v, (int, np.integer)) or v < 1:
            raise InputError(f"size {name}={v!r} must be a positive integer")
    if sizes.get("n", 1) > MAX_N or sizes.get("m", 1) > MAX_M or sizes.get("k", 1) > MAX_K:
        raise InputError(f"sizes exceed caps n<={MAX_N}, m<={MAX_M}, k<={MAX_K}")


def make_instance(family, seed=0, **sizes):
    """Build one of the analytic or seeded instance families.

    ``quad1d``      f = x^2/2 on R, solution {0}.
    ``rankdef_ls``  f = ||E x - c||^2/2 with wide E (default E = [1 1], c = 1).
    ``lasso``       ||A x - b||^2/2 + lam ||x||_1 (default 5 x 10), proxy set.
    ``box_ls``      ||A x - b||^2/2 over a box (default 3 x 5), proxy set.
    ``case_study``  (E x - c)^T H (E x - c)/2 over a random polyhedron that
                    contains a ball of radius 0.1 around a point of the
                    affine slice {E x = c}; solution set exact.
    """
    if family not in FAMILIES:
        raise InputError(f"unknown family {family!r}; choose from {FAMILIES}")
    seed = int(seed)
    rng = np.random.default_rng(seed)
    if family == "quad1d":
        return _quad1d(seed)
    if family == "rankdef_ls":
        return _rankdef_ls(rng, seed, **sizes)
    if family == "lasso":
        return _lasso(rng, seed, **sizes)
    if family == "box_ls":
        return _box_ls(rng, seed, **sizes)
    return _case_study(rng, seed, **sizes)


def _quad1d(seed):
    comp = CompositionStructure.quadratic([[1.0]], [0.0], [[1.0]], mu=1.0, L_inner=1.0)
    f = SmoothTerm.from_composition(comp)
    S = SolutionSetModel("singleton", 0.0, (np.zeros(1),))
    return CompositeProblem(f, Regularizer(), S, "quad1d", seed, {"n": 1})


def _rankdef_ls(rng, seed, m=None, n=None):
    if m is None and n is None:
        m, n = 1, 2
        E = np.array([[1.0, 1.0]])
        c = np.array([1.0])
    else:
        m = 1 if m is None else m
        n = m + 1 if n is None else n
        _check_sizes(m=m, n=n)
        if m >= n:
            raise InputError("rankdef_ls needs m < n")
        E = rng.standard_normal((m, n))
        c = E @ rng.standard_normal(n)
    comp = CompositionStructure.quadratic(E, c, np.eye(m), mu=1.0, L_inner=1.0)
    f = SmoothTerm.from_composition(comp)
    x0 = np.linalg.lstsq(E, c, rcond=None)[0]
    S = SolutionSetModel("affine_slice", 0.0, (x0,), E=E, t_star=c.copy())
    return CompositeProblem(f, Regularizer(), S, "rankdef_ls", seed, {"m": m, "n": n})


def _lasso(rng, seed, m=5, n=10, lam=None):
    _check_sizes(m=m, n=n)
    A = rng.standard_normal((m, n)) / np.sqrt(m)
    b = rng.standard_normal(m)
    if lam is None:
        lam = 0.1 * float(np.max(np.abs(A.T @ b)))
    comp = CompositionStructure.quadratic(A, b, np.eye(m), mu=1.0, L_inner=1.0)
    f = SmoothTerm.from_composition(comp)
    g = Regularizer("l1", float(lam))
    S = _proxy_solution_set(f, g, rng)
    return CompositeProblem(f, g, S, "lasso", seed, {"m": m, "n": n})


def _box_ls(rng, seed, m=3, n=5):
    _check_sizes(m=m, n=n)
    A = rng.standard_normal((m, n)) / np.sqrt(m)
    b = A @ (2.0 * rng.standard_normal(n)) + 0.1 * rng.standard_normal(m)
    comp = CompositionStructure.quadratic(A, b, np.eye(m), mu=1.0, L_inner=1.0)
    f = SmoothTerm.from_composition(comp)
    g = Regularizer("indicator", polyhedron=Polyhedron.box(-np.ones(n), np.ones(n)))
    S = _proxy_solution_set(f, g, rng)
    return CompositeProblem(f, g, S, "box_ls", seed, {"m": m, "n": n})


def _case_study(rng, seed, m=2, n=4, k=6, radius=0.1):
    _check_sizes(m=m, n=n, k=k)
    if m >= n:
        raise InputError("case_study needs m < n so that the solution set is not a point")
    for _ in range(100):
        E = rng.standard_normal((m, n))
        x_ref = rng.standard_normal(n)
        A = rng.standard_normal((k, n))
        norms = np.linalg.norm(A, axis=1)
        slack = rng.uniform(0.0, 1.0, size=k) * norms
        if np.min(slack / norms) >= radius and np.linalg.matrix_rank(E) == m:
            break
    else:
        raise GenerationError("could not generate a polyhedron containing the "
                              f"radius-{radius} ball after 100 attempts")
    b = A @ x_ref + slack
    # H with eigenvalues in [1, 4], smallest exactly 1
    Qm, _ = np.linalg.qr(rng.standard_normal((m, m)))
    ev = np.concatenate([[1.0], rng.uniform(1.0, 4.0, size=m - 1)])
    H = (Qm * ev) @ Qm.T
    H = 0.5 * (H + H.T)
    c = E @ x_ref
    comp = CompositionStructure.quadratic(E, c, H, mu=1.0, L_inner=float(ev.max()))
    f = SmoothTerm.from_composition(comp)
    Q = Polyhedron(A, b, x_ref)
    S = SolutionSetModel("affine_slice", 0.0, (x_ref,), E=E, t_star=c.copy(),
                         polyhedron=Q)
    return CompositeProblem(f, Regularizer("indicator", polyhedron=Q), S,
                            "case_study", seed, {"m": m, "n": n, "k": k})


# proxy solution sets ---------------------------------------------------------

PROXY_STARTS = 8
PROXY_TOL = 1e-12


def _proxy_solution_set(f, g, rng, starts=PROXY_STARTS, tol=PROXY_TOL, cap=200000):
    from .mappings import prox_gradient_mapping

    gamma = f.L
    points = []
    for _ in range(starts):
        x = rng.standard_normal(f.n)
        for _ in range(cap):
            res = prox_gradient_mapping(f, g, x, gamma)
            if res.norm <= tol:
                break
            x = res.forward
        x = _polish(f, g, x, gamma)
        points.append(x)
    phis = [f(x) + g(x) for x in points]
    return SolutionSetModel("proxy", float(min(phis)), tuple(points))


def _polish(f, g, x, gamma):
    """Newton step on the active manifold identified by the iterate.

    Both proxy families have a quadratic ``f``; once the active pattern is
    fixed the optimality system is linear, so one least-squares correction
    removes the residual left by the fixed-step iteration.  The corrected
    point is kept only if its mapping norm is smaller.
    """
    from .mappings import prox_gradient_mapping

    comp = f.composition
    if comp is None or comp.H is None:
        return x
    E, H = comp.E, comp.H
    before = prox_gradient_mapping(f, g, x, gamma).norm
    if g.kind == "l1":
        free = np.flatnonzero(np.abs(x) > 0)
        shift = g.lam * np.sign(x[free])
    elif g.kind == "indicator":
        bounds = g.polyhedron.box_bounds()
        if bounds is None:
            return x
        lo, hi = bounds
        span = 1e-9 * (1 + np.abs(x))
        free = np.flatnonzero((x > lo + span) & (x < hi - span))
        shift = np.zeros(free.size)
    else:
        free = np.arange(f.n)
        shift = np.zeros(f.n)
    if free.size == 0:
        return x
    EF = E[:, free]
    resid = EF.T @ (H @ (E @ x - comp.c)) + shift
    step = np.linalg.lstsq(EF.T @ H @ EF, resid, rcond=None)[0]
    cand = x.copy()
    cand[free] -= step
    if g.kind == "l1" and np.any(np.sign(cand[free]) != np.sign(x[free])):
        return x
    if g.kind == "indicator" and not g.polyhedron.contains(cand, tol=0.0):
        return x
    after = prox_gradient_mapping(f, g, cand, gamma).norm
    return cand if after < before else x
