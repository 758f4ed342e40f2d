"""Fixed-step proximal gradient method and checks of its rate guarantees.

The iteration is ``x_{k+1} = x_k - G(x_k; gamma) / gamma`` with ``G`` the
proximal gradient mapping.  ``run`` records every iterate together with the
objective, the distance to the minimiser set and the mapping norm; the
``check_*`` functions compare such a trace against the guarantees that hold
after the burn-in index ``m``.
"""

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .core import distance_to_solution_set
from .errors import InputError, NumericalError, PreconditionError
from .mappings import problem_mapping
from .report import Report

DIST_FLOOR = 1e-13


@dataclass
class SolverTrace:
    iterates: np.ndarray          # (K+1, n)
    phi: np.ndarray
    dist: np.ndarray
    gmap_norm: np.ndarray
    gamma: float
    x0: np.ndarray
    cap: int
    tol: float
    phi_star: float
    L: float
    proxy: bool = False
    info: dict = field(default_factory=dict)

    @property
    def iterations(self):
        return len(self.phi) - 1

    @property
    def converged(self):
        return bool(self.gmap_norm[-1] <= self.tol)

    def gaps(self):
        return self.phi - self.phi_star

    def distance_ratios(self):
        """``d_{k+1} / d_k`` (nan where ``d_k`` is below the floor)."""
        d = self.dist
        out = np.full(len(d) - 1, np.nan)
        ok = d[:-1] >= DIST_FLOOR
        out[ok] = d[1:][ok] / d[:-1][ok]
        return out

    def to_rows(self):
        return [(k, self.phi[k], self.dist[k], self.gmap_norm[k])
                for k in range(len(self.phi))]


def run(p, x0, gamma="auto", cap=1000, tol=1e-12):
    """Run the proximal gradient method from ``x0`` with step ``1/gamma``.

    Stops at the first iterate whose mapping norm is at most ``tol`` or
    after ``cap`` steps, so the trace holds between 1 and ``cap + 1``
    records.  A non-finite objective raises ``NumericalError`` carrying the
    trace prefix as ``err.trace``.
    """
    if gamma == "auto":
        gamma = p.auto_gamma()
    gamma = float(gamma)
    if not gamma >= p.L * (1 - 1e-12):
        raise PreconditionError(f"gamma={gamma} must be >= L={p.L}")
    if cap < 0 or tol < 0:
        raise InputError("cap and tol must be nonnegative")
    x = np.array(x0, dtype=float).reshape(-1)
    if x.shape[0] != p.n:
        raise InputError(f"x0 has dimension {x.shape[0]}, problem has {p.n}")
    xs, phis, ds, gs = [], [], [], []
    proxy = not p.solution_set.exact

    def _trace():
        return SolverTrace(np.array(xs), np.array(phis), np.array(ds), np.array(gs),
                           gamma, np.array(x0, dtype=float).reshape(-1), cap, tol,
                           p.phi_star, p.L, proxy)

    for k in range(cap + 1):
        res = problem_mapping(p, x, gamma)
        phi = p.phi(x)
        if not math.isfinite(phi):
            err = NumericalError(f"non-finite objective {phi} at iteration {k}")
            err.trace = _trace()
            raise err
        xs.append(x)
        phis.append(phi)
        ds.append(distance_to_solution_set(p, x).d)
        gs.append(res.norm)
        if res.norm <= tol or k == cap:
            break
        x = res.forward
    return _trace()


def burn_in(lipschitz, d2, omega):
    """``floor(lipschitz * d2 / (2 omega)) + 1``; 1 when ``omega`` is infinite."""
    if not omega > 0:
        raise InputError(f"omega must be positive, got {omega}")
    if math.isinf(omega):
        return 1
    return int(math.floor(lipschitz * d2 / (2.0 * omega))) + 1


def burn_in_index(p, x0, omega, gamma=None):
    """First index after which the sublinear estimate forces ``phi - phi* <= omega``.

    The estimate's constant is ``gamma`` when given (the step actually used),
    otherwise ``L``; the two coincide for the automatic step.
    """
    d = distance_to_solution_set(p, x0).d
    return burn_in(p.L if gamma is None else gamma, d * d, omega)


def check_sublinear(trace):
    """``phi(x_k) - phi* <= gamma d^2(x_0, X) / (2k)`` for every ``k >= 1``."""
    rep = Report("sublinear", flags={"proxy": trace.proxy})
    d0 = trace.dist[0]
    worst = -np.inf
    for k in range(1, len(trace.phi)):
        lhs = trace.phi[k] - trace.phi_star
        rhs = trace.gamma * d0 * d0 / (2.0 * k)
        rep.checked += 1
        worst = max(worst, lhs - rhs)
        if lhs > rhs + 1e-9 * (1 + abs(rhs)):
            rep.add(lhs, rhs, index=k)
    rep.worst = worst if rep.checked else float("nan")
    rep.bound = 0.0
    return rep


def check_qlinear_distance(trace, tau, m):
    """``d_{k+1} <= sqrt(gamma / (gamma + tau)) d_k`` for ``k >= m``."""
    if not tau > 0:
        raise InputError("tau must be positive")
    bound = math.sqrt(trace.gamma / (trace.gamma + tau))
    rep = Report("qlinear_distance", bound=bound, flags={"proxy": trace.proxy})
    d = trace.dist
    worst = 0.0
    for k in range(max(m, 0), len(d) - 1):
        if d[k] < DIST_FLOOR:
            continue
        ratio = d[k + 1] / d[k]
        rep.checked += 1
        worst = max(worst, ratio)
        if ratio > bound + 1e-9:
            rep.add(d[k + 1], bound * d[k], index=k)
    rep.worst = worst
    return rep


def _contraction_factor(kappa, gamma):
    if not kappa > 0:
        raise InputError("kappa must be positive")
    if kappa >= 2 * gamma:
        raise InputError(f"kappa={kappa} must be < 2*gamma={2 * gamma}; "
                         "the contraction factor 1 - kappa/(2 gamma) would be <= 0")
    return 1.0 - kappa / (2.0 * gamma)


def check_fvalue_contraction(trace, kappa, m):
    """``phi(x_{i+1}) - phi* <= (1 - kappa/(2 gamma)) (phi(x_i) - phi*)`` for ``i >= m``.

    Pairs whose gap is below ``1e-12 (1 + |phi*|)`` are still checked but
    only against that round-off floor; they do not enter the worst factor.
    """
    rho = _contraction_factor(kappa, trace.gamma)
    rep = Report("fvalue_contraction", bound=rho, flags={"proxy": trace.proxy})
    gaps = trace.gaps()
    floor = 1e-12 * (1 + abs(trace.phi_star))
    worst = 0.0
    for i in range(max(m, 0), len(gaps) - 1):
        a, b = gaps[i + 1], gaps[i]
        rep.checked += 1
        if b > floor:
            worst = max(worst, a / b)
        if a > rho * b + max(1e-9 * abs(b), floor):
            rep.add(a, rho * b, index=i)
    rep.worst = worst
    return rep


def geometric_factor(rho):
    """``sum_i rho^(i/2) = 1 / (1 - sqrt(rho))`` for ``0 < rho < 1``."""
    return 1.0 / (1.0 - math.sqrt(rho))


def rlinear_constant(trace, kappa, m):
    rho = _contraction_factor(kappa, trace.gamma)
    gap_m = max(trace.phi[m] - trace.phi_star, 0.0)
    return 2.0 * gap_m / trace.gamma * geometric_factor(rho) ** 2, rho


def check_rlinear_iterates(trace, x_star, kappa, m):
    """``d^2(x_{k+m}, x*) <= C (1 - kappa/(2 gamma))^k`` for recorded ``k >= 1``.

    ``x_star=None`` uses the last iterate, which then must have mapping norm
    at most 1e-12.  An explicit ``x_star`` must be approached by the trace
    (final distance not larger than the initial one).
    """
    if x_star is None:
        if not trace.gmap_norm[-1] <= 1e-12:
            raise PreconditionError("trace has not converged (final mapping norm "
                                    f"{trace.gmap_norm[-1]:.3e} > 1e-12)")
        x_star = trace.iterates[-1]
    x_star = np.asarray(x_star, dtype=float)
    dx = np.linalg.norm(trace.iterates - x_star, axis=1)
    if not np.all(np.isfinite(dx)) or dx[-1] > dx[0]:
        raise PreconditionError("trace does not approach x_star")
    if m >= len(trace.phi):
        _contraction_factor(kappa, trace.gamma)
        return Report("rlinear_iterates", flags={"proxy": trace.proxy,
                                                 "vacuous": "burn-in beyond trace"})
    C, rho = rlinear_constant(trace, kappa, m)
    rep = Report("rlinear_iterates", bound=C,
                 flags={"proxy": trace.proxy, "rho": rho,
                        "advisory": trace.proxy})
    floor = 1e-24 * (1 + float(x_star @ x_star))
    worst = 0.0
    for k in range(1, len(dx) - m):
        lhs = dx[k + m] ** 2
        rhs = C * rho ** k
        rep.checked += 1
        if rhs > 0:
            worst = max(worst, lhs / rhs)
        if lhs > rhs * (1 + 1e-9) + floor:
            rep.add(lhs, rhs, index=k + m)
    rep.worst = worst
    return rep


def check_descent(trace):
    """Monotone decrease with slope ``phi_k - phi_{k+1} >= (gamma/2) ||x_k - x_{k+1}||^2``."""
    rep = Report("descent", bound=0.0, flags={"proxy": trace.proxy})
    worst = np.inf
    for k in range(len(trace.phi) - 1):
        step = trace.iterates[k] - trace.iterates[k + 1]
        lhs = trace.phi[k] - trace.phi[k + 1]
        rhs = 0.5 * trace.gamma * float(step @ step)
        rep.checked += 1
        worst = min(worst, lhs - rhs)
        if lhs < rhs - 1e-9 * (1 + abs(rhs)) - 1e-12 * abs(trace.phi[k]):
            rep.add(lhs, rhs, index=k)
    rep.worst = worst if rep.checked else float("nan")
    return rep


def stopping_bound(p, trace):
    """Gap of the last forward point versus ``||G|| d`` (reported only)."""
    x = trace.iterates[-1]
    res = problem_mapping(p, x, trace.gamma)
    dist = distance_to_solution_set(p, x)
    return {
        "gap": p.phi(res.forward) - p.phi_star,
        "bound": res.norm * dist.d,
        "upper_bound_distance": dist.upper_bound,
    }


def write_trace_csv(trace, path):
    """Columns ``k,phi,dist,gmap_norm``; reals at 17 significant digits."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["k", "phi", "dist", "gmap_norm"])
        for k, phi, d, g in trace.to_rows():
            w.writerow([k, "%.16e" % phi, "%.16e" % d, "%.16e" % g])


def read_trace_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    return {key: np.array([float(r[key]) for r in rows])
            for key in ("k", "phi", "dist", "gmap_norm")}
