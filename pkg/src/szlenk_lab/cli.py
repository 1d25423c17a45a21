"""``szlenk-lab`` command line.

Exit codes: 0 success, 1 a check or certificate failed, 2 usage error,
3 output could not be written.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass

from .vecspace import DEFAULT_TOL, DomainError, SparseVec

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    seed: int = 0
    tolerance: float = DEFAULT_TOL
    oracle_cap: int = 9
    exact_mode: bool = False
    output_path: str = "-"
    output_format: str = "json"
    samples: int = 200

    def __post_init__(self):
        if not self.tolerance > 0:
            raise UsageError("tolerance must be positive")
        if self.oracle_cap < 4:
            raise UsageError("oracle cap must be at least 4")
        if self.seed < 0:
            raise UsageError("seed must be nonnegative")
        if self.output_format not in ("json", "csv"):
            raise UsageError(f"unknown output format {self.output_format!r}")


def run_verify_suite(suite: str, cfg: RunConfig):
    """Records for ``suite`` (or every suite for ``"all"``) and whether all
    of them passed."""
    from .suites import SUITES, run_suite

    names = SUITES if suite == "all" else (suite,)
    if suite != "all" and suite not in SUITES:
        raise UsageError(f"unknown suite {suite!r}; expected one of {', '.join(SUITES + ('all',))}")
    records = []
    for name in names:
        records += [r.to_jsonable() for r in run_suite(name, cfg.seed, cfg.samples, cfg.tolerance,
                                                       cfg.oracle_cap)]
    return {"seed": cfg.seed, "samples": cfg.samples, "records": records}, all(
        r["status"] == "pass" for r in records)


def _fmt(x):
    return format(x, ".12g") if isinstance(x, float) else x


def curve_text(curve, fmt: str) -> str:
    if fmt == "json":
        return _dumps(curve.to_jsonable())
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(curve.COLUMNS)
    for s in curve.samples:
        w.writerow([_fmt(x) for x in s.as_row()])
    return buf.getvalue()


def emit_curve(space: str, grid, cfg: RunConfig, budget=None):
    """Build the curve for ``space`` on ``grid`` and write it per ``cfg``;
    returns the curve."""
    from .szlenk import DEFAULT_BUDGET, build_curve

    curve = build_curve(space, grid, DEFAULT_BUDGET if budget is None else budget, tol=cfg.tolerance)
    _write(curve_text(curve, cfg.output_format), cfg.output_path)
    return curve


def _dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, default=_json_default) + "\n"


def _json_default(o):
    try:
        import numpy as np

        if isinstance(o, np.generic):
            return o.item()
    except ImportError:  # pragma: no cover
        pass
    if hasattr(o, "to_jsonable"):
        return o.to_jsonable()
    return str(o)


def _write(text: str, path: str):
    if path in ("-", "", None):
        sys.stdout.write(text)
        return
    try:
        with open(path, "w") as fh:
            fh.write(text)
    except OSError as exc:
        raise _IOFailure(str(exc)) from exc


class _IOFailure(Exception):
    pass


def _parse_vec(text: str, exact: bool = False) -> SparseVec:
    try:
        return SparseVec.from_json(text, exact=exact)
    except (ValueError, TypeError) as exc:
        raise UsageError(f"bad vector {text!r}: {exc}") from exc


def _config(args) -> RunConfig:
    out = getattr(args, "out", None) or "-"
    fmt = getattr(args, "format", None)
    # "--out json" / "--out csv" names a format written to stdout
    if out in ("json", "csv"):
        fmt, out = fmt or out, "-"
    if fmt is None:
        fmt = "csv" if out.endswith(".csv") else "json"
    return RunConfig(seed=args.seed, tolerance=args.tol, oracle_cap=args.oracle_cap,
                     exact_mode=getattr(args, "exact", False), output_path=out, output_format=fmt,
                     samples=args.samples)


def _orlicz_params(args):
    from .orlicz import OrliczParams

    try:
        return OrliczParams(args.A, args.B)
    except DomainError as exc:
        raise UsageError(str(exc)) from exc


def cmd_norm(args, cfg):
    v = _parse_vec(args.vec, exact=cfg.exact_mode)
    space = args.space
    if cfg.exact_mode and space != "tsirelson":
        raise UsageError("--exact is only available for the tsirelson space")
    if space == "tsirelson":
        from .tsirelson import t_norm, t_norm_oracle

        res = t_norm(v, exact=cfg.exact_mode or None, witness=args.witness)
        out = res.to_jsonable()
        if args.oracle:
            o = t_norm_oracle(v, cap=cfg.oracle_cap, exact=cfg.exact_mode or None)
            out["oracle"] = str(o) if cfg.exact_mode else float(o)
    elif space == "schlumprecht":
        from .schlumprecht import s_norm, s_norm_oracle

        out = s_norm(v, witness=args.witness).to_jsonable()
        if args.oracle:
            out["oracle"] = s_norm_oracle(v, cap=cfg.oracle_cap)
    elif space == "baernstein":
        from .baernstein import b_norm, b_norm_exact, b_norm_interval

        engine = {"topk": b_norm, "bnb": b_norm_exact, "interval": b_norm_interval}[args.engine]
        out = engine(v).to_jsonable()
        if not args.witness:
            out.pop("witness", None)
    elif space == "orlicz":
        from .orlicz import closed_form_norm, luxemburg_oracle

        p = _orlicz_params(args)
        out = {"value": closed_form_norm(v, p)}
        if args.oracle:
            out["oracle"] = luxemburg_oracle(v, p)
    else:  # pragma: no cover - argparse restricts choices
        raise UsageError(space)
    out["space"] = space
    _write(_dumps(out), cfg.output_path)
    return EXIT_OK


def cmd_verify(args, cfg):
    report, ok = run_verify_suite(args.suite, cfg)
    _write(_dumps(report), cfg.output_path)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_curves(args, cfg):
    from .szlenk import parse_grid

    try:
        grid = parse_grid(args.eps_grid)
    except DomainError as exc:
        raise UsageError(str(exc)) from exc
    curve = emit_curve(args.space, grid, cfg, args.budget)
    return EXIT_OK if not curve.violations(cfg.tolerance) else EXIT_FAIL


def cmd_certify(args, cfg):
    from .szlenk import check_certificate

    space, eps = args.space, args.eps
    if space != "orlicz" and args.point is None:
        raise UsageError("--point is required")
    try:
        if space == "tsirelson":
            from .tsirelson import t_membership_witness

            cert = t_membership_witness(_parse_vec(args.point), eps)
        elif space == "schlumprecht":
            from .schlumprecht import s_membership_witness

            cert = s_membership_witness(_parse_vec(args.point), eps)
        elif space == "baernstein":
            from .baernstein import b_membership_witness

            cert = b_membership_witness(_parse_vec(args.point), eps)
        else:
            from .orlicz import membership_certificate

            p = _orlicz_params(args)
            cert, _ = membership_certificate(eps, p.reduced, B=p.B)
    except DomainError as exc:
        sys.stderr.write(f"refused: {exc}\n")
        return EXIT_FAIL
    chk = check_certificate(cert, cfg.tolerance)
    out = cert.to_jsonable()
    out["validation"] = {"valid": chk.valid, "maxNorm": chk.max_norm, "minGap": chk.min_gap,
                         "reasons": list(chk.reasons)}
    _write(_dumps(out), cfg.output_path)
    return EXIT_OK if chk.valid else EXIT_FAIL


def cmd_orlicz(args, cfg):
    from . import orlicz

    p = _orlicz_params(args)
    Ared = p.reduced
    if args.action == "norm":
        if args.vec is None:
            raise UsageError("orlicz norm needs --vec")
        v = _parse_vec(args.vec)
        out = {"value": orlicz.closed_form_norm(v, p), "Ared": Ared}
        if v:
            out["oracle"] = orlicz.luxemburg_oracle(v, p)
        ok = True
    elif args.action == "kkt":
        n = args.n or 5
        rep = orlicz.kkt_minimize(args.mu, n, Ared)
        out, ok = rep.to_jsonable(), rep.ok
    elif args.action == "claim":
        n = args.n or 5
        rep = orlicz.claim_report(n, Ared, cfg.samples, cfg.seed)
        out, ok = rep.to_jsonable(), rep.ok
    else:
        if args.eps is None:
            raise UsageError("orlicz demo needs --eps")
        rep = orlicz.not_a_ball_demo(Ared, args.eps, samples=cfg.samples, seed=cfg.seed, n=args.n)
        out, ok = rep.to_jsonable(), rep.ok
    _write(_dumps(out), cfg.output_path)
    return EXIT_OK if ok else EXIT_FAIL


SPACE_CHOICES = ("tsirelson", "schlumprecht", "baernstein", "orlicz")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--samples", type=int, default=200)
    common.add_argument("--tol", type=float, default=DEFAULT_TOL)
    common.add_argument("--oracle-cap", type=int, default=9)
    common.add_argument("--out", default="-", help="output path, '-' for stdout, or json/csv")
    common.add_argument("--format", choices=("json", "csv"))
    common.add_argument("--A", type=float, default=0.75)
    common.add_argument("--B", type=float, default=1.0)

    parser = argparse.ArgumentParser(prog="szlenk-lab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("norm", parents=[common], help="evaluate a norm")
    p.add_argument("--space", choices=SPACE_CHOICES, required=True)
    p.add_argument("--vec", required=True, help="JSON list of [index, value] pairs")
    p.add_argument("--exact", action="store_true", help="rational arithmetic (tsirelson)")
    p.add_argument("--witness", action="store_true")
    p.add_argument("--oracle", action="store_true", help="also run the exhaustive oracle")
    p.add_argument("--engine", choices=("topk", "bnb", "interval"), default="topk",
                   help="baernstein engine")
    p.set_defaults(func=cmd_norm)

    p = sub.add_parser("verify", parents=[common], help="run verification checks")
    p.add_argument("--suite", default="all")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("curves", parents=[common], help="radius curves")
    p.add_argument("--space", choices=SPACE_CHOICES, required=True)
    p.add_argument("--eps-grid", required=True, help="a:b:step")
    p.add_argument("--budget", type=int, default=None, help="norm evaluations per sample")
    p.set_defaults(func=cmd_curves)

    p = sub.add_parser("certify", parents=[common], help="membership certificate")
    p.add_argument("--space", choices=SPACE_CHOICES, required=True)
    p.add_argument("--point", help="JSON vector (ignored for orlicz)")
    p.add_argument("--eps", type=float, required=True)
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("orlicz", parents=[common], help="Orlicz space tools")
    p.add_argument("action", choices=("norm", "kkt", "claim", "demo"))
    p.add_argument("--vec")
    p.add_argument("--eps", type=float)
    p.add_argument("--mu", type=float, default=1.0)
    p.add_argument("--n", type=int)
    p.set_defaults(func=cmd_orlicz)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        cfg = _config(args)
        return args.func(args, cfg)
    except UsageError as exc:
        sys.stderr.write(f"usage error: {exc}\n")
        return EXIT_USAGE
    except _IOFailure as exc:
        sys.stderr.write(f"cannot write output: {exc}\n")
        return EXIT_IO


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
