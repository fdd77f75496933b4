"""Command-line front end.

    rvnorm norm    --spec normal:0,1 --d 3 --in Z.json
    rvnorm bounds  --spec rademacher --d 3 --n 4 --seeds 100
    rvnorm submult --spec normal:1,1 --d 2 --n 16
    rvnorm ratio   --spec normal:1,1 --n-min 2 --n-max 64
    rvnorm stable  --alpha 1.5 --in A.json --seeds 20

``norm`` and ``submult`` print JSON; ``bounds``, ``ratio`` and ``stable`` print
CSV preceded by ``#`` lines recording the run configuration.  Floats are
written with ``repr`` so reruns are byte-identical.

Exit codes: 0 ok, 2 bad input or I/O, 3 violated precondition, 4 numerical
failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

from . import __version__
from .bounds import (
    SearchConfig,
    certificates_to_csv,
    check_d2_comparison,
    check_frobenius_sandwich,
    check_lower_d_le2,
    check_stable_d1,
    check_stable_sandwich,
    check_upper_d_ge2,
    estimate_c,
    gamma_d,
    gamma_d2,
    sharpness_ratio,
    submult_criterion_d2,
)
from .distributions import DistributionSpec, parse_spec
from .engine import (
    DEFAULT_MC_SAMPLES,
    NormParams,
    full_norm,
    full_norm_closed_d2,
    hermitian_norm,
    stable_full_norm_d1,
)
from .errors import ConvergenceError, DomainError, ParseError
from .matrix import HermitianMatrix, load_matrix, random_complex, random_hermitian
from .streams import substream

EXIT_OK, EXIT_INPUT, EXIT_DOMAIN, EXIT_NUMERIC = 0, 2, 3, 4

# builtin defaults; a --config file overrides these, flags override both
DEFAULTS = {
    "spec": "normal:0,1",
    "d": 2.0,
    "n": 4,
    "seed": 0,
    "mc_samples": None,
    "quad_nodes": None,
    "epsilon": 1.0,
    "in": None,
    "out": None,
    "seeds": None,
    "n_min": 2,
    "n_max": 64,
    "restarts": 4,
    "iters": 200,
    "step": 0.5,
    "alpha": 1.5,
    "d1_samples": 10_000_000,
    "coefficient": "stated",
    "which": "all",
}
_TYPES = {"d": float, "n": int, "seed": int, "mc_samples": int, "quad_nodes": int,
          "epsilon": float, "seeds": int, "n_min": int, "n_max": int, "restarts": int,
          "iters": int, "step": float, "alpha": float, "d1_samples": int}
_COMMAND_MC = {"norm": DEFAULT_MC_SAMPLES, "bounds": 20_000, "submult": 4_000, "stable": 20_000}
_COMMAND_SEEDS = {"bounds": 100, "stable": 20}
_RUN_KEYS = ("spec", "seed", "mc_samples", "quad_nodes")
COMMAND_KEYS = {
    "norm": _RUN_KEYS + ("d", "in", "n"),
    "bounds": _RUN_KEYS + ("d", "n", "epsilon", "seeds", "which", "coefficient"),
    "submult": _RUN_KEYS + ("d", "n", "epsilon", "restarts", "iters", "step"),
    "ratio": ("spec", "n_min", "n_max"),
    "stable": _RUN_KEYS + ("alpha", "in", "n", "seeds", "d1_samples"),
}


def read_config(path) -> dict:
    """Flat ``key = value`` file; ``#`` starts a comment; dashes in keys become underscores."""
    out = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise ParseError(f"cannot read config {path}: {exc}") from exc
    for num, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ParseError(f"{path}:{num}: expected key=value, got {line!r}")
        key = key.strip().replace("-", "_")
        if key not in DEFAULTS:
            raise ParseError(f"{path}:{num}: unknown key {key!r}")
        value = value.strip()
        if key in _TYPES:
            try:
                value = _TYPES[key](value)
            except ValueError:
                raise ParseError(f"{path}:{num}: {key} must be {_TYPES[key].__name__}") from None
        out[key] = value
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rvnorm", description="Random-vector matrix norms.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, spec=True, matrix=False):
        S = argparse.SUPPRESS
        if spec:
            p.add_argument("--spec", default=S, help="distribution, e.g. normal:0,1 or stable:1.5")
            p.add_argument("--d", type=float, default=S, help="norm order d >= 1")
        p.add_argument("--n", type=int, default=S, help="matrix size")
        p.add_argument("--seed", type=int, default=S)
        p.add_argument("--mc-samples", dest="mc_samples", type=int, default=S)
        p.add_argument("--quad-nodes", dest="quad_nodes", type=int, default=S)
        p.add_argument("--epsilon", type=float, default=S, help="moment slack for d < 2")
        if matrix:
            p.add_argument("--in", dest="in", default=S, help="matrix JSON file")
        p.add_argument("--out", default=S, help="write report here instead of stdout")
        p.add_argument("--config", default=None, help="key=value defaults file")

    p = sub.add_parser("norm", help="compute |||Z|||_{X,d}")
    common(p, matrix=True)

    p = sub.add_parser("bounds", help="batch of inequality certificates")
    common(p)
    p.add_argument("--seeds", type=int, default=argparse.SUPPRESS)
    p.add_argument("--which", choices=["all", "frobenius", "comparison", "upper", "lower"],
                   default=argparse.SUPPRESS)
    p.add_argument("--coefficient", choices=["stated", "jensen"], default=argparse.SUPPRESS)

    p = sub.add_parser("submult", help="submultiplicativity scalar and c(N) search")
    common(p)
    p.add_argument("--restarts", type=int, default=argparse.SUPPRESS)
    p.add_argument("--iters", type=int, default=argparse.SUPPRESS)
    p.add_argument("--step", type=float, default=argparse.SUPPRESS)

    p = sub.add_parser("ratio", help="sharpness ratio sweep over n")
    p.add_argument("--spec", default=argparse.SUPPRESS)
    p.add_argument("--n-min", dest="n_min", type=int, default=argparse.SUPPRESS)
    p.add_argument("--n-max", dest="n_max", type=int, default=argparse.SUPPRESS)
    p.add_argument("--out", default=argparse.SUPPRESS)
    p.add_argument("--config", default=None)

    p = sub.add_parser("stable", help="stable-entry d = 1 closed form and sandwich")
    common(p, spec=False, matrix=True)
    p.add_argument("--alpha", type=float, default=argparse.SUPPRESS)
    p.add_argument("--seeds", type=int, default=argparse.SUPPRESS)
    p.add_argument("--d1-samples", dest="d1_samples", type=int, default=argparse.SUPPRESS,
                   help="draws for the closed-form check on the input matrix")
    return parser


def resolve(args: argparse.Namespace) -> dict:
    cfg = dict(DEFAULTS)
    if args.config:
        cfg.update(read_config(args.config))
    cfg.update({k: v for k, v in vars(args).items() if k not in ("config", "command")})
    cfg["command"] = args.command
    if cfg["mc_samples"] is None:
        cfg["mc_samples"] = _COMMAND_MC.get(args.command, DEFAULT_MC_SAMPLES)
    if cfg["seeds"] is None:
        cfg["seeds"] = _COMMAND_SEEDS.get(args.command, 1)
    return cfg


def _header(cfg) -> list[str]:
    keys = ("command",) + COMMAND_KEYS[cfg["command"]]
    return [f"rvnorm {__version__}"] + [f"{k}={_fmt(cfg[k])}" for k in keys
                                        if cfg.get(k) is not None]


def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _params(cfg, d=None) -> NormParams:
    return NormParams(cfg["d"] if d is None else d, cfg["mc_samples"], cfg["quad_nodes"],
                      cfg["seed"])


def _matrix(cfg, hermitian=False):
    if cfg["in"]:
        m = load_matrix(cfg["in"])
        if hermitian and not isinstance(m, HermitianMatrix):
            raise DomainError(f"{cfg['in']} must hold a Hermitian matrix")
        return m
    n = int(cfg["n"])
    rng = substream(cfg["seed"], 3)
    return random_hermitian(n, rng) if hermitian else random_complex(n, rng)


def _validate(cfg):
    if cfg["n"] is not None and int(cfg["n"]) < 1:
        raise DomainError(f"n must be >= 1, got {cfg['n']}")
    if int(cfg["seeds"]) < 1:
        raise DomainError(f"seeds must be >= 1, got {cfg['seeds']}")
    if not cfg["epsilon"] > 0:
        raise DomainError(f"epsilon must be > 0, got {cfg['epsilon']!r}")


# --- commands ----------------------------------------------------------------


def cmd_norm(cfg) -> str:
    spec = parse_spec(cfg["spec"])
    p = _params(cfg)
    z = _matrix(cfg)
    if p.d == 2.0 and spec.has_variance:
        est = full_norm_closed_d2(z, spec)
        est = type(est)(est.value, est.stderr, p, est.method)
    elif isinstance(z, HermitianMatrix):
        est = hermitian_norm(z, spec, p)
    else:
        est = full_norm(z, spec, p)
    report = est.as_dict()
    report.update(spec=str(spec), n=z.n, hermitian=isinstance(z, HermitianMatrix),
                  input=cfg["in"] or f"random_complex(n={z.n}, seed={cfg['seed']})",
                  version=__version__)
    return json.dumps(report, indent=2) + "\n"


def cmd_bounds(cfg) -> str:
    spec = parse_spec(cfg["spec"])
    d, n = float(cfg["d"]), int(cfg["n"])
    which = cfg["which"]
    checks = []
    if which in ("all", "frobenius") and d >= 2.0 and spec.mean == 0.0 and spec.has_variance:
        checks.append(lambda z, a, p: check_frobenius_sandwich(a, spec, d, p))
    if which in ("all", "comparison"):
        checks.append(lambda z, a, p: check_d2_comparison(z, spec, d, p, cfg["coefficient"]))
    if which in ("all", "upper") and d >= 2.0:
        checks.append(lambda z, a, p: check_upper_d_ge2(z, spec, d, p))
    if which in ("all", "lower") and d <= 2.0:
        checks.append(lambda z, a, p: check_lower_d_le2(z, spec, d, cfg["epsilon"], p))
    if not checks:
        raise DomainError(f"no certificate in {which!r} applies to d={d!r}, spec {spec}")
    certs = []
    for s in range(cfg["seed"], cfg["seed"] + cfg["seeds"]):
        p = NormParams(d, cfg["mc_samples"], cfg["quad_nodes"], s)
        z = random_complex(n, substream(s, 3))
        a = random_hermitian(n, substream(s, 4))
        certs.extend(check(z, a, p) for check in checks)
    passed = sum(c.passed for c in certs)
    body = certificates_to_csv(certs, _header(cfg))
    return body + f"# pass_rate={passed}/{len(certs)}\n"


def cmd_submult(cfg) -> str:
    spec = parse_spec(cfg["spec"])
    d, n = float(cfg["d"]), int(cfg["n"])
    p = _params(cfg)
    search = SearchConfig(cfg["restarts"], cfg["iters"], cfg["step"])
    g = gamma_d2(spec) if d == 2.0 else gamma_d(spec, d, cfg["epsilon"])
    c = estimate_c(spec, d, n, p, search)
    report = {
        "spec": str(spec), "d": d, "n": n,
        "gamma": g,
        "gamma_formula": "gamma_d2" if d == 2.0 else "gamma_d",
        "c_estimate": c,
        "margin": g - c,
        "criterion_d2": submult_criterion_d2(spec) if d == 2.0 and spec.has_variance else None,
        "seed": p.seed, "mc_samples": p.mc_samples, "quad_nodes": p.quad_nodes,
        "restarts": search.restarts, "iters": search.iters, "step": search.step,
        "version": __version__,
    }
    return json.dumps(report, indent=2) + "\n"


def cmd_ratio(cfg) -> str:
    spec = parse_spec(cfg["spec"])
    lo, hi = int(cfg["n_min"]), int(cfg["n_max"])
    if lo < 2 or hi < lo:
        raise DomainError(f"need 2 <= n_min <= n_max, got {lo}..{hi}")
    buf = io.StringIO()
    for line in _header(cfg):
        buf.write(f"# {line}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "computed", "analytic", "abs_diff"])
    for n in range(lo, hi + 1):
        comp, ana = sharpness_ratio(spec, n)
        w.writerow([n, repr(comp), repr(ana), repr(abs(comp - ana))])
    return buf.getvalue()


def cmd_stable(cfg) -> str:
    alpha = float(cfg["alpha"])
    spec = DistributionSpec.stable(alpha)
    a = _matrix(cfg, hermitian=True)
    samples = cfg["mc_samples"]
    buf = io.StringIO()
    cfg = dict(cfg, spec=str(spec), n=a.n)
    for line in _header(cfg):
        buf.write(f"# {line}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["check", "seed", "lower", "measured", "upper", "closed_form", "rel_gap", "pass"])
    c = check_stable_d1(a, alpha, cfg["d1_samples"], cfg["seed"])
    w.writerow(["stable_d1", cfg["seed"], repr(c.lower), repr(c.measured), repr(c.upper),
                repr(c.context["closed_form"]), repr(c.context["rel_gap"]), _b(c.passed)])
    n = a.n
    passed = 0
    for s in range(cfg["seed"], cfg["seed"] + cfg["seeds"]):
        z = random_complex(n, substream(s, 3))
        p = NormParams(1.0, samples, cfg["quad_nodes"] or 32, s)
        c = check_stable_sandwich(z, alpha, p)
        exact = stable_full_norm_d1(z, alpha).value
        passed += c.passed
        w.writerow(["stable_sandwich", s, repr(c.lower), repr(c.measured), repr(c.upper),
                    repr(exact), repr(abs(c.measured - exact) / exact), _b(c.passed)])
    buf.write(f"# sandwich_pass_rate={passed}/{cfg['seeds']}\n")
    return buf.getvalue()


def _b(x):
    return "true" if x else "false"


COMMANDS = {"norm": cmd_norm, "bounds": cmd_bounds, "submult": cmd_submult,
            "ratio": cmd_ratio, "stable": cmd_stable}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve(args)
        _validate(cfg)
        text = COMMANDS[cfg["command"]](cfg)
        if cfg.get("out"):
            with open(cfg["out"], "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    except (ParseError, OSError) as exc:
        print(f"rvnorm: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except DomainError as exc:
        print(f"rvnorm: precondition violated: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (ConvergenceError, FloatingPointError) as exc:
        print(f"rvnorm: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
