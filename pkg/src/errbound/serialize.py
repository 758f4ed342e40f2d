"""Problem files: one JSON document per problem, reals at 17 significant digits."""

import json

import numpy as np

from .core import (CompositeProblem, CompositionStructure, Polyhedron, Regularizer,
                   SmoothTerm, SolutionSetModel)
from .errors import InputError, ModelError
from .report import dumps


def _arr(x):
    return None if x is None else np.asarray(x, dtype=float).tolist()


def problem_to_dict(p):
    comp = p.composition
    if comp is None or comp.H is None:
        raise ModelError("only quadratic composition problems can be serialized")
    Q = p.g.polyhedron if p.g.kind == "indicator" else None
    S = p.solution_set
    sol = {"variant": S.variant, "points": [q.tolist() for q in S.points]}
    if S.variant == "affine_slice":
        sol["E"] = _arr(S.E)
        sol["t_star"] = _arr(S.t_star)
        if S.polyhedron is not None:
            sol["A"] = _arr(S.polyhedron.A)
            sol["b"] = _arr(S.polyhedron.b)
    return {
        "family": p.family,
        "seed": p.seed,
        "n": p.n,
        "sizes": dict(p.sizes),
        "E": _arr(comp.E),
        "c": _arr(comp.c),
        "H": _arr(comp.H),
        "regularizer": p.g.kind,
        "lambda": p.g.lam if p.g.kind == "l1" else None,
        "A": _arr(Q.A) if Q is not None else None,
        "b": _arr(Q.b) if Q is not None else None,
        "feasible_point": _arr(Q.feasible_point) if Q is not None else None,
        "mu": comp.mu,
        "L_inner": comp.L_inner,
        "L": p.L,
        "L_hat": comp.L_hat,
        "phi_star": p.phi_star,
        "solution_set": sol,
    }


def problem_from_dict(d):
    """Rebuild a problem; ``phi_star`` and the solution set are taken as given."""
    try:
        n = int(d["n"])
        E = np.asarray(d["E"], dtype=float).reshape(-1, n)
        comp = CompositionStructure.quadratic(E, d["c"], d["H"], mu=float(d["mu"]),
                                              L_inner=float(d["L_inner"]))
        kind = d.get("regularizer", "zero")
        if kind == "indicator":
            A = np.asarray(d["A"], dtype=float).reshape(-1, n)
            fp = d.get("feasible_point")
            Q = Polyhedron(A, d["b"], None if fp is None else np.asarray(fp, dtype=float))
            g = Regularizer("indicator", polyhedron=Q)
        elif kind == "l1":
            g = Regularizer("l1", float(d["lambda"]))
        else:
            g = Regularizer(kind)
        sol = d["solution_set"]
        phi_star = float(d["phi_star"])
        points = tuple(np.asarray(q, dtype=float) for q in sol["points"])
        if sol["variant"] == "affine_slice":
            SE = np.asarray(sol["E"], dtype=float).reshape(-1, n)
            SQ = None
            if sol.get("A") is not None:
                SQ = Polyhedron(np.asarray(sol["A"], dtype=float).reshape(-1, n), sol["b"],
                                points[0] if points else None)
            S = SolutionSetModel("affine_slice", phi_star, points, E=SE,
                                 t_star=np.asarray(sol["t_star"], dtype=float), polyhedron=SQ)
        else:
            S = SolutionSetModel(sol["variant"], phi_star, points)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed problem file: {exc}") from exc
    return CompositeProblem(SmoothTerm.from_composition(comp), g, S,
                            d.get("family", "custom"), d.get("seed"), dict(d.get("sizes", {})))


def save_problem(p, path):
    with open(path, "w") as fh:
        fh.write(dumps(problem_to_dict(p)) + "\n")


def load_problem(path):
    with open(path) as fh:
        try:
            d = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InputError(f"{path}: not valid JSON ({exc})") from exc
    return problem_from_dict(d)
