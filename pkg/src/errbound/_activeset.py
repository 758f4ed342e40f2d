"""Dual active-set projection onto ``{x : A x <= b, E x = t}``.

This is the Goldfarb-Idnani dual method specialised to the identity Hessian:
start at the unconstrained minimiser ``y`` and add violated constraints one at
a time (lowest index among the most violated), dropping active inequalities
whose multiplier would turn negative.  Every added constraint strictly
increases the dual objective, so the loop terminates; the iteration cap only
guards against round-off induced cycling.
"""

import numpy as np

from .errors import ModelError, NumericalError

_FEAS_TOL = 1e-13


def _lstsq(N, v):
    return np.linalg.lstsq(N, v, rcond=None)[0]


def project(y, A=None, b=None, E=None, t=None, max_iter=None):
    """Return ``argmin ||x - y||`` over the polyhedron and its multipliers.

    Returns ``(x, lam, nu)`` with ``lam >= 0`` for the ``k`` inequality rows
    and free ``nu`` for the equality rows.  Raises ``ModelError`` when the
    set is empty.
    """
    y = np.asarray(y, dtype=float)
    n = y.shape[0]
    A = np.zeros((0, n)) if A is None else np.asarray(A, dtype=float)
    b = np.zeros(0) if b is None else np.asarray(b, dtype=float)
    E = np.zeros((0, n)) if E is None else np.asarray(E, dtype=float)
    t = np.zeros(0) if t is None else np.asarray(t, dtype=float)
    k, meq = A.shape[0], E.shape[0]

    # constraints stored as  n_j . x >= c_j  (inequalities) / = c_j (equalities)
    normals = np.vstack([-A, E]) if k + meq else np.zeros((0, n))
    rhs = np.concatenate([-b, t])
    scale = np.linalg.norm(normals, axis=1) if k + meq else np.zeros(0)
    scale[scale == 0] = 1.0

    x = y.copy()
    active = []          # constraint indices in insertion order
    u = np.zeros(0)      # multipliers of `active`
    if max_iter is None:
        max_iter = 10 * (k + meq) + 10
    iters = 0
    _signs = np.ones(k + meq)  # +1, or -1 for equalities entered from above

    def step_to(p, sign):
        # add constraint p (normal multiplied by sign) with the dual step
        nonlocal x, active, u, iters
        npv = sign * normals[p]
        cp = sign * rhs[p]
        uplus = 0.0
        while True:
            iters += 1
            if iters > max_iter:
                raise NumericalError(
                    f"active-set projection exceeded {max_iter} iterations "
                    f"(active={active}, violation={cp - npv @ x:.3e})")
            if active:
                N = normals[active].T * _signs[active]
                r = _lstsq(N, npv)
                z = npv - N @ r
            else:
                r = np.zeros(0)
                z = npv
            s = npv @ x - cp
            zz = z @ npv
            full = np.inf if zz <= 1e-14 * (npv @ npv) else -s / zz
            partial, drop = np.inf, -1
            for j, (idx, rj) in enumerate(zip(active, r)):
                if idx < k and rj > 0:
                    ratio = u[j] / rj
                    if ratio < partial:
                        partial, drop = ratio, j
            if not np.isfinite(full) and not np.isfinite(partial):
                if abs(s) <= _FEAS_TOL * (abs(cp) + scale[p] * (1 + np.linalg.norm(x))):
                    return  # implied by the active set, nothing to add
                raise ModelError("polyhedron is empty (inconsistent constraints)")
            step = min(full, partial)
            if np.isfinite(full):
                x = x + step * z
            u = u - step * r
            uplus += step
            if step == full:
                active.append(p)
                _signs[p] = sign
                u = np.append(u, uplus)
                return
            del active[drop]
            u = np.delete(u, drop)

    for e in range(meq):
        p = k + e
        s = normals[p] @ x - rhs[p]
        step_to(p, 1.0 if s <= 0 else -1.0)

    while k:
        viol = rhs[:k] - normals[:k] @ x
        viol /= np.abs(rhs[:k]) + scale[:k] * (1 + np.linalg.norm(x))
        viol[[i for i in active if i < k]] = -np.inf
        p = int(np.argmax(viol))
        if viol[p] <= _FEAS_TOL:
            break
        step_to(p, 1.0)

    # polish: exact projection onto the final active face; x = y + N u
    lam = np.zeros(k)
    nu = np.zeros(meq)
    if active:
        sg = _signs[active]
        N = normals[active].T * sg
        c = rhs[active] * sg
        delta = _lstsq(N.T, c - N.T @ y)
        xp = y + delta
        if np.all(np.isfinite(xp)):
            x = xp
        mult = _lstsq(N, x - y)
        for idx, val, s in zip(active, mult, sg):
            if idx < k:
                lam[idx] = max(val, 0.0)
            else:
                nu[idx - k] = -s * val
    return x, lam, nu


def kkt_residual(x, y, A=None, b=None, E=None, t=None, lam=None, nu=None):
    """Max of primal infeasibility, stationarity and complementarity."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    n = x.shape[0]
    A = np.zeros((0, n)) if A is None else np.asarray(A, dtype=float)
    b = np.zeros(0) if b is None else np.asarray(b, dtype=float)
    E = np.zeros((0, n)) if E is None else np.asarray(E, dtype=float)
    t = np.zeros(0) if t is None else np.asarray(t, dtype=float)
    lam = np.zeros(A.shape[0]) if lam is None else lam
    nu = np.zeros(E.shape[0]) if nu is None else nu
    res = 0.0
    if A.shape[0]:
        slack = A @ x - b
        res = max(res, float(np.max(slack, initial=0.0)),
                  float(np.max(np.abs(lam * slack))), float(-np.min(lam)))
    if E.shape[0]:
        res = max(res, float(np.max(np.abs(E @ x - t))))
    stat = x - y + A.T @ lam + E.T @ nu
    return max(res, float(np.max(np.abs(stat), initial=0.0)))
