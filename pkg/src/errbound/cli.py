"""Command-line entry point: ``errbound {probgen,estimate,solve,verify}``.

Exit codes: 0 when everything checked holds, 1 when a mathematical violation
(or a non-finite objective) is found, 2 for usage, input and I/O errors.
"""

import argparse
import math
import sys
from dataclasses import asdict, dataclass

import numpy as np

from . import certificates, solver
from .core import FAMILIES, make_instance
from .errors import ErrboundError, NumericalError
from .report import dumps
from .serialize import load_problem, problem_to_dict, save_problem

SUITES = ("pointwise", "chain", "rates", "case-study")


class UsageError(Exception):
    pass


@dataclass
class ExperimentConfig:
    command: str
    problem: str = None
    family: str = None
    seed: int = 0
    gamma: object = "auto"
    omega: float = math.inf
    samples: int = 1000
    iters: int = 1000
    tol: float = 1e-12
    out: str = None
    suite: str = None
    property: str = None
    variant: str = None
    x0: list = None
    sizes: dict = None

    def to_dict(self):
        """Echoed into reports; the output path is left out so reruns compare equal."""
        d = asdict(self)
        del d["out"]
        d["sizes"] = dict(self.sizes or {})
        return d


def _gamma(text):
    if text == "auto":
        return "auto"
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'auto' or a positive real, got {text!r}")
    if not (v > 0 and math.isfinite(v)):
        raise argparse.ArgumentTypeError(f"gamma must be positive and finite, got {text!r}")
    return v


def _omega(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'inf' or a positive real, got {text!r}")
    if not v > 0:
        raise argparse.ArgumentTypeError(f"omega must be positive, got {text!r}")
    return v


def _positive_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {v}")
    return v


def _seed(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer seed, got {text!r}")
    if not 0 <= v < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return v


def _nonneg_float(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a real, got {text!r}")
    if not v >= 0:
        raise argparse.ArgumentTypeError(f"expected a nonnegative real, got {text!r}")
    return v


def _vector(text):
    try:
        return [float(t) for t in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated reals, got {text!r}")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="errbound",
        description="Gradient-mapping error bounds: instances, estimates, solver traces, checks.")
    sub = parser.add_subparsers(dest="command", required=True)

    def source(sp):
        sp.add_argument("--problem", help="problem JSON written by probgen")
        sp.add_argument("--family", choices=FAMILIES, help="generate the problem instead")
        sp.add_argument("--n", type=_positive_int)
        sp.add_argument("--m", type=_positive_int)
        sp.add_argument("--k", type=_positive_int)

    def common(sp, samples=True):
        sp.add_argument("--seed", type=_seed, default=0)
        sp.add_argument("--gamma", type=_gamma, default="auto")
        if samples:
            sp.add_argument("--omega", type=_omega, default=math.inf)
            sp.add_argument("--samples", type=_positive_int, default=1000)
        sp.add_argument("--out", help="output path (default: stdout)")

    sp = sub.add_parser("probgen", help="write a problem file")
    sp.add_argument("--family", choices=FAMILIES, required=True)
    sp.add_argument("--seed", type=_seed, default=0)
    sp.add_argument("--n", type=_positive_int)
    sp.add_argument("--m", type=_positive_int)
    sp.add_argument("--k", type=_positive_int)
    sp.add_argument("--out", help="output path (default: stdout)")

    sp = sub.add_parser("estimate", help="sampled RSC/GEB/QG constant")
    source(sp)
    common(sp)
    sp.add_argument("--property", required=True,
                    help="one of " + ", ".join(certificates.PROPERTIES))
    sp.add_argument("--variant", help="original, modified or extended")

    sp = sub.add_parser("solve", help="run the proximal gradient method, write a CSV trace")
    source(sp)
    common(sp, samples=False)
    sp.add_argument("--iters", type=_positive_int, default=1000)
    sp.add_argument("--tol", type=_nonneg_float, default=1e-12)
    sp.add_argument("--x0", type=_vector, help="start point, comma separated")

    sp = sub.add_parser("verify", help="run a check suite")
    source(sp)
    common(sp)
    sp.add_argument("--suite", required=True, help="one of " + ", ".join(SUITES))
    sp.add_argument("--iters", type=_positive_int, default=1000)
    sp.add_argument("--tol", type=_nonneg_float, default=1e-12)
    sp.add_argument("--x0", type=_vector)
    return parser


def config_from_args(args):
    sizes = {k: getattr(args, k) for k in ("n", "m", "k") if getattr(args, k, None) is not None}
    fields = {k: v for k, v in vars(args).items() if k not in ("n", "m", "k")}
    return ExperimentConfig(sizes=sizes, **fields)


def _problem(cfg):
    if cfg.problem and cfg.family:
        raise UsageError("give either --problem or --family, not both")
    if cfg.problem:
        if cfg.sizes:
            raise UsageError("--n/--m/--k only apply with --family")
        return load_problem(cfg.problem)
    if cfg.family:
        return make_instance(cfg.family, seed=cfg.seed, **cfg.sizes)
    raise UsageError("one of --problem or --family is required")


def _emit(text, path):
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _log(msg):
    print(msg, file=sys.stderr)


def cmd_probgen(cfg):
    p = make_instance(cfg.family, seed=cfg.seed, **cfg.sizes)
    if cfg.out:
        save_problem(p, cfg.out)
    else:
        sys.stdout.write(dumps(problem_to_dict(p)) + "\n")
    comp = p.composition
    _log(f"family={p.family} n={p.n} L={p.L!r} L_hat={comp.L_hat!r} "
         f"mu={comp.mu!r} phi_star={p.phi_star!r}")
    return 0


def cmd_estimate(cfg):
    if cfg.property not in certificates.PROPERTIES:
        raise UsageError(f"unknown property {cfg.property!r}; choose from "
                         + ", ".join(certificates.PROPERTIES))
    p = _problem(cfg)
    gamma = certificates.resolve_gamma(p, cfg.gamma)
    _log(f"gamma={gamma!r}")
    est = certificates.estimate_constant(p, cfg.property, cfg.variant, gamma, cfg.omega,
                                         cfg.samples, cfg.seed)
    out = est.to_dict()
    out["config"] = cfg.to_dict()
    _emit(dumps(out) + "\n", cfg.out)
    _log(f"{est.property} ({est.variant}) constant={est.constant!r} "
         "(sampled infimum; an upper bound on the true constant)")
    return 0


def _x0(cfg, p):
    if cfg.x0 is None:
        return certificates.default_start(p)
    x0 = np.array(cfg.x0, dtype=float)
    if x0.size == 1 and p.n > 1:
        x0 = np.full(p.n, x0[0])
    if x0.size != p.n:
        raise UsageError(f"--x0 has {x0.size} entries, problem dimension is {p.n}")
    if not math.isfinite(p.g(x0)):
        raise UsageError("--x0 is outside the domain of the objective")
    return x0


def cmd_solve(cfg):
    p = _problem(cfg)
    gamma = certificates.resolve_gamma(p, cfg.gamma)
    _log(f"gamma={gamma!r}")
    try:
        trace = solver.run(p, _x0(cfg, p), gamma, cfg.iters, cfg.tol)
    except NumericalError as exc:
        if getattr(exc, "trace", None) is not None and cfg.out:
            solver.write_trace_csv(exc.trace, cfg.out)
        _log(f"error: {exc}")
        return 1
    if cfg.out:
        solver.write_trace_csv(trace, cfg.out)
    else:
        sys.stdout.write("k,phi,dist,gmap_norm\n")
        for k, phi, d, g in trace.to_rows():
            sys.stdout.write("%d,%.16e,%.16e,%.16e\n" % (k, phi, d, g))
    _log(f"iterations={trace.iterations} final_gmap_norm={float(trace.gmap_norm[-1])!r}"
         + (" (distances to a proxy solution set)" if trace.proxy else ""))
    return 0


def cmd_verify(cfg):
    if cfg.suite not in SUITES:
        raise UsageError(f"unknown suite {cfg.suite!r}; choose from " + ", ".join(SUITES))
    p = _problem(cfg)
    gamma = certificates.resolve_gamma(p, cfg.gamma)
    _log(f"gamma={gamma!r}")
    if cfg.suite == "pointwise":
        rep = certificates.verify_pointwise(p, gamma, cfg.samples, cfg.seed)
    elif cfg.suite == "chain":
        rep = certificates.verify_chain(p, gamma, cfg.omega, cfg.samples, cfg.seed)
    elif cfg.suite == "rates":
        try:
            rep, _ = certificates.verify_rates(p, gamma, cfg.omega, cfg.samples, cfg.seed,
                                               _x0(cfg, p), cfg.iters, cfg.tol)
        except NumericalError as exc:
            _log(f"error: {exc}")
            return 1
    else:
        rep = certificates.verify_case_study(p, gamma, cfg.samples, cfg.seed)
    out = rep.to_dict()
    out["config"] = cfg.to_dict()
    _emit(dumps(out) + "\n", cfg.out)
    for c in rep.checks:
        _log(str(c))
    _log(f"{rep.suite}: {'PASS' if rep.passed else 'FAIL'} "
         f"({len(rep.violations)} violations)")
    return 0 if rep.passed else 1


COMMANDS = {"probgen": cmd_probgen, "estimate": cmd_estimate,
            "solve": cmd_solve, "verify": cmd_verify}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)   # exits with status 2 on bad usage
    cfg = config_from_args(args)
    try:
        return COMMANDS[cfg.command](cfg)
    except (UsageError, ErrboundError, OSError) as exc:
        _log(f"error: {exc}")
        return 2


if __name__ == "__main__":
    sys.exit(main())
