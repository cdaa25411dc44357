"""Command-line front end: ``wtl widths|transfer|sample|classify|verify``.

Every output starts with a ``#`` header echoing the fully resolved
configuration, so re-running with that configuration reproduces the file.
Settings come from (lowest to highest precedence) built-in defaults, an
optional ``--config`` file of ``key = value`` lines, and explicit flags.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import os
import re
import sys
from pathlib import Path

from . import __version__
from . import model_spaces as ms
from . import sampler as smp
from . import tractability as trc
from . import transfer as tr
from . import verify as vf
from ._io import csv_text, header_lines, json_text
from .errors import WTLError

IDEALIZED = "(idealized default)"
CONSTANT_DEFAULTS = {"b": 1, "r": 1.0, "D": 1.0}
# keys that never go into the header
_PRIVATE = {"command", "func", "config", "out", "inject_fault", "plan_out"}


class UsageError(WTLError):
    pass


# -- parsing helpers -------------------------------------------------------

_EXP = re.compile(r"^e\^?\(?-\s*([0-9.]+)\)?$")


def _parse_log_inv(token: str) -> float:
    token = token.strip()
    m = _EXP.match(token)
    if m:
        return float(m.group(1))
    eps = float(token)
    if not 0 < eps <= 1:
        raise UsageError(f"accuracy {token!r} is not in (0, 1]")
    return -math.log(eps)


def parse_eps_grid(text: str) -> list[float]:
    """``e^-1..e^-5`` (integer steps), ``e^-2``, plain decimals, comma separated; returns ``ln 1/eps``."""
    out = []
    for part in str(text).split(","):
        part = part.strip()
        if not part:
            continue
        if ".." in part:
            lo, hi = (_parse_log_inv(p) for p in part.split(".."))
            if lo != int(lo) or hi != int(hi):
                raise UsageError(f"ranges need integer exponents: {part!r}")
            step = 1 if hi >= lo else -1
            out.extend(float(k) for k in range(int(lo), int(hi) + step, step))
        else:
            out.append(_parse_log_inv(part))
    if not out:
        raise UsageError("empty accuracy grid")
    return out


def parse_int_list(text) -> list[int]:
    if isinstance(text, (list, tuple)):
        return [int(v) for v in text]
    return [int(v) for v in re.split(r"[,\s]+", str(text).strip()) if v]


def parse_float_list(text) -> list[float]:
    return [float(v) for v in re.split(r"[,\s]+", str(text).strip()) if v]


def _read_config(path: str) -> dict[str, str]:
    text = Path(path).read_text()
    return {k.replace("-", "_"): v for k, v in ms.parse_key_value(text).items()}


def config_from_header(text: str) -> dict[str, str]:
    """Resolved configuration recorded in an output header, ready for ``--config``."""
    from ._io import parse_header

    # idealized constants were defaults, so leaving them out keeps them flagged
    return {k: v for k, v in parse_header(text).items() if IDEALIZED not in v}


# -- argument parser ----------------------------------------------------------


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="key = value file; flags override it")
    p.add_argument("--out", help="output path (default: stdout)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--b", type=int, default=None, help="index multiplier of the DKU inequality")
    p.add_argument("--r", type=float, default=None, help="DKU exponent, 0 < r < 2")
    p.add_argument("--D", type=float, default=None, help="constant of the weak-tractability bound")


def _space_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--family", default="geometric", choices=["geometric", "stretched-exponential", "explicit"])
    p.add_argument("--omega", type=float, default=None)
    p.add_argument("--c", type=float, default=None)
    p.add_argument("--kappa", type=float, default=None)
    p.add_argument("--values", default=None, help="explicit eigenvalues, comma separated")
    p.add_argument("--d", type=int, default=1)
    p.add_argument("--basis", default="trig", choices=["trig", "legendre"])


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wtl", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"wtl {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("widths", help="Gelfand (= linear) widths of a Hilbert model space")
    _common(p)
    _space_args(p)
    p.add_argument("--count", type=int, default=16)
    p.set_defaults(func=cmd_widths)

    p = sub.add_parser("transfer", help="bound on n_std from a linear-information profile")
    _common(p)
    p.add_argument("--A", type=float, default=None)
    p.add_argument("--B", type=float, default=None)
    p.add_argument("--c", type=float, default=None)
    p.add_argument("--p", type=float, default=None)
    p.add_argument("--q", type=float, default=None)
    p.add_argument("--t", type=float, default=None)
    p.add_argument("--d", type=int, default=None)
    p.add_argument("--eps-grid", dest="eps_grid", default="e^-1..e^-10")
    p.set_defaults(func=cmd_transfer)

    p = sub.add_parser("sample", help="empirical worst-case error of weighted least squares")
    _common(p)
    _space_args(p)
    p.add_argument("--n-grid", dest="n_grid", default="4,8,16,32")
    p.add_argument("--trials", type=int, default=5)
    p.add_argument("--m", type=int, default=None, help="fixed basis size (default: from the oversampling rule)")
    p.add_argument("--factor", type=float, default=2.0, help="oversampling factor in n = factor m ln(m+1)")
    p.add_argument("--M", type=int, default=None, help="evaluation truncation (default 4m)")
    p.add_argument("--plan-out", dest="plan_out", default=None, help="write the drawn plans as JSON")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("classify", help="exponential tractability class of a profile family")
    _common(p)
    p.add_argument("--form", choices=["constant", "poly", "quasi-poly", "data"], default=None)
    p.add_argument("--A", type=float, default=None)
    p.add_argument("--B", type=float, default=None)
    p.add_argument("--c", type=float, default=None)
    p.add_argument("--q", type=float, default=None)
    p.add_argument("--p", type=float, default=None)
    p.add_argument("--t", type=float, default=None)
    p.add_argument("--data", default=None, help="CSV with columns d,epsilon,n (or d,log_inv_epsilon,n)")
    p.add_argument("--uwt", action="store_true", help="add weak-tractability ratio diagnostics")
    p.add_argument("--alphas", default="0.25,0.5,1")
    p.add_argument("--j-max", dest="j_max", type=int, default=10)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("verify", help="run the inequality suites")
    _common(p)
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--inject-fault", dest="inject_fault", type=float, default=None, help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_verify)
    return parser


def parse_args(argv=None) -> argparse.Namespace:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        config = _read_config(args.config)
        subparser = parser._subparsers._group_actions[0].choices[args.command]
        known = {a.dest for a in subparser._actions}
        unknown = sorted(set(config) - known - {"command"})
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(unknown)}")
        typed = {}
        for action in subparser._actions:
            if action.dest in config:
                raw = config[action.dest]
                if isinstance(action, argparse._StoreTrueAction):
                    typed[action.dest] = raw.lower() in ("1", "true", "yes")
                else:
                    typed[action.dest] = action.type(raw) if action.type else raw
        subparser.set_defaults(**typed)
        args = parser.parse_args(argv)
    return args


def _constants(args) -> tuple[tr.BoundConstants, dict]:
    """Constants plus their header rendering (defaults flagged as idealized)."""
    shown = {}
    values = {}
    for key, default in CONSTANT_DEFAULTS.items():
        v = getattr(args, key)
        if v is None:
            values[key] = default
            shown[key] = f"{default} {IDEALIZED}"
        else:
            values[key] = v
            shown[key] = str(v)
    return tr.BoundConstants(**values), shown


def _resolved(args, shown_constants: dict) -> dict:
    cfg = {k: v for k, v in vars(args).items() if k not in _PRIVATE and v is not None and k not in CONSTANT_DEFAULTS}
    cfg.update(shown_constants)
    return cfg


def _emit(args, text: str) -> None:
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


# -- commands ------------------------------------------------------------------


def _space(args) -> ms.ModelSpace:
    cfg = {"family": args.family, "d": args.d, "basis": args.basis}
    for key in ("omega", "c", "kappa", "values"):
        v = getattr(args, key)
        if v is not None:
            cfg[key] = v
    try:
        family = ms.family_from_config(cfg)
    except KeyError as exc:
        raise UsageError(f"family {args.family!r} needs --{exc.args[0]}") from None
    return ms.ModelSpace(args.d, family, basis=args.basis)


def cmd_widths(args) -> int:
    consts, shown = _constants(args)
    space = _space(args)
    eigs = ms.tensor_top_eigenvalues(space, args.count)
    widths = ms.widths_from_eigenvalues(eigs, "gelfand")
    header = header_lines("widths", _resolved(args, shown))
    _emit(args, csv_text(("index", "value"), ((i, float(v)) for i, v in enumerate(widths.values)), header))
    return 0


def cmd_transfer(args) -> int:
    consts, shown = _constants(args)
    grid = parse_eps_grid(args.eps_grid)
    extra = {}
    if args.A is not None or args.B is not None:
        if args.A is None or args.B is None:
            raise UsageError("profile mode needs both --A and --B")
        mode = "profile"
        profile = tr.ComplexityProfile(args.A, args.B)
    elif args.t is not None:
        if args.c is None or args.d is None:
            raise UsageError("quasi-polynomial mode needs --c, --t and --d")
        mode = "quasi-poly"
        profile = tr.qpt_profile(args.c, args.t, args.d)
        extra["display_constant"] = tr.qpt_display_constant(args.c, args.t, consts)
        extra["validity_threshold_d"] = tr.qpt_threshold(args.c, args.t)
    elif args.c is not None:
        if args.p is None or args.d is None:
            raise UsageError("polynomial mode needs --c, --p, --d (and optionally --q)")
        mode = "poly"
        q = 0.0 if args.q is None else args.q
        profile = tr.corollary_profile(args.c, args.p, q, args.d)
        extra["display_constant"] = tr.corollary_display_constant(args.c, args.p, q, consts)
    else:
        raise UsageError("give --A/--B, --c/--p/--q/--d or --c/--t/--d")
    report = tr.transfer_report(profile, consts, grid)
    doc = {"mode": mode, **report.to_document(), **extra}
    doc["constants"] = {k: shown[k] for k in ("b", "r", "D")}
    header = header_lines("transfer", _resolved(args, shown))
    _emit(args, json_text(doc, header))
    return 0


def cmd_sample(args) -> int:
    consts, shown = _constants(args)
    space = _space(args)
    n_grid = parse_int_list(args.n_grid)
    rows = smp.e_n_empirical_curve(
        space, n_grid, args.trials, args.seed, m=args.m, factor=args.factor, M=args.M, consts=consts
    )
    header = header_lines("sample", _resolved(args, shown))
    cols = ("n", "median_error", "best_error", "floor_sigma", "ceiling_bound")
    _emit(args, csv_text(cols, ((r.n, r.median_error, r.best_error, r.floor_sigma, r.ceiling_bound) for r in rows), header))
    if args.plan_out:
        system, _ = smp.system_for(space, max(r.m for r in rows))
        plans = []
        for i, r in enumerate(rows):
            for t in range(args.trials):
                plans.append(smp.draw_plan(system, r.m, r.n, args.seed, stream=i * args.trials + t).to_document())
        Path(args.plan_out).write_text(json_text({"plans": plans}, header))
    return 0


def _read_data(path: str) -> tuple[list, bool]:
    text = "\n".join(l for l in Path(path).read_text().splitlines() if not l.startswith("#"))
    reader = csv.DictReader(io.StringIO(text))
    fields = reader.fieldnames or []
    if "log_inv_epsilon" in fields:
        col, log_inv = "log_inv_epsilon", True
    elif "epsilon" in fields:
        col, log_inv = "epsilon", False
    else:
        raise UsageError("data CSV needs columns d, epsilon (or log_inv_epsilon), n")
    return [(float(r["d"]), float(r[col]), float(r["n"])) for r in reader], log_inv


def _family(args):
    form = args.form or ("data" if args.data else None)
    if form == "constant":
        return trc.ConstantFamily(args.A, args.B)
    if form == "poly":
        return trc.PolynomialFamily(args.c, 0.0 if args.q is None else args.q, args.p)
    if form == "quasi-poly":
        return trc.QuasiPolyFamily(args.c, args.t)
    if form == "data":
        if not args.data:
            raise UsageError("--form data needs --data")
        rows, log_inv = _read_data(args.data)
        return trc.tabulate_from_data(rows, log_inv=log_inv)
    raise UsageError("give --form (constant, poly, quasi-poly) or --data")


def _std_log_bound(family, consts):
    """ln of the standard-information bound obtained by transferring ``family``."""
    if isinstance(family, trc.ConstantFamily):
        prof = tr.ComplexityProfile(max(family.A, 1.0), family.B)
        return lambda d, L: tr.log_n_std_bound(prof, consts, log_inv_eps=L)
    if isinstance(family, trc.PolynomialFamily):
        return lambda d, L: tr.log_n_std_bound(tr.corollary_profile(family.c, family.p, family.q, d), consts, log_inv_eps=L)
    if isinstance(family, trc.QuasiPolyFamily):
        return lambda d, L: tr.log_qpt_transfer_bound(family.c, family.t, consts, d, log_inv_eps=L)
    return None


def cmd_classify(args) -> int:
    consts, shown = _constants(args)
    family = _family(args)
    result = trc.classify(family)
    doc = {
        "family": family.describe(),
        "class": result.cls.label,
        "implied": [c.label for c in result.implied],
        "fitted": result.fitted,
        "residual": result.residual,
    }
    if args.uwt:
        grid = trc.dyadic_grid(args.j_max)
        if isinstance(family, trc.QuasiPolyFamily):
            threshold = tr.qpt_threshold(family.c, family.t)
            grid = [(d, L) for d, L in grid if d > threshold]
        diags = {"linear_information": [], "standard_information": []}
        bounds = {"linear_information": family.log_bound, "standard_information": _std_log_bound(family, consts)}
        for key, bound in bounds.items():
            if bound is None:
                continue
            for a in parse_float_list(args.alphas):
                dg = trc.uwt_diagnostic(bound, a, a, grid)
                diags[key].append(
                    {
                        "alpha": a,
                        "beta": a,
                        "verdict": dg.label,
                        "ratios": [[d, L, r] for (d, L), r in zip(dg.grid, dg.ratios)],
                    }
                )
        doc["diagnostics"] = diags
    header = header_lines("classify", _resolved(args, shown))
    _emit(args, json_text(doc, header))
    return 0


def cmd_verify(args) -> int:
    consts, shown = _constants(args)
    results = vf.run_all(seed=args.seed, samples=args.samples, fault_scale=args.inject_fault)
    header = header_lines("verify", _resolved(args, shown))
    rows = [(r.name, r.checked, len(r.violations), "pass" if r.passed else "fail") for r in results]
    text = "\n".join(header) + "\nsuite,checked,violations,status\n"
    text += "".join(f'"{name}",{c},{v},{s}\n' for name, c, v, s in rows)
    _emit(args, text)
    for r in results:
        print(r.line(), file=sys.stderr)
        if r.violations:
            print(f"  counterexample: {r.violations[0]}", file=sys.stderr)
    return 0 if all(r.passed for r in results) else 1


def main(argv=None) -> int:
    try:
        args = parse_args(argv)
        return args.func(args)
    except (WTLError, ValueError, OSError) as exc:
        print(f"wtl: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
