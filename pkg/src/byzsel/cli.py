"""Command-line interface.

Instance files are single JSON objects {"values": [...], "t": ..., "l": ...}
with values in user order; zero values are allowed and dropped. Numbers may
be decimals or "a/b" fraction strings (the latter mainly for --exact, which
switches all arithmetic and output to exact rationals).

All output referring to boxes uses 1-based positions in the user's original
value order. Exit codes: 0 success, 1 verification failure, 2 input error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from fractions import Fraction
from pathlib import Path

from ._numeric import REL_TOL, format_number, parse_number
from .ell_one import solve_ell1
from .errors import ByzselError, InvalidMarginals, InvalidValue
from .model import (
    Instance,
    adversary_best_response,
    check_marginals,
    normalize,
    to_original_order,
    value_of_marginals,
)
from .oracle import (
    BRUTE_VALUE_MAX_N,
    brute_deterministic,
    brute_value,
    grid_check,
    mwu_game_value,
)
from .rounding import decompose, pad_marginals, sample_many
from .waterfill import (
    best_breakpoint,
    chain_violations,
    deterministic_baseline,
    niceness_violations,
    solve,
    sweep,
)

__all__ = ["main"]


def _load_json(path: str, exact: bool):
    text = Path(path).read_text(encoding="utf-8")
    if exact:
        return json.loads(text, parse_float=Fraction)
    return json.loads(text)


def load_instance(path: str, exact: bool) -> Instance:
    doc = _load_json(path, exact)
    if not isinstance(doc, dict):
        raise InvalidValue("instance file must hold a JSON object")
    missing = [key for key in ("values", "t", "l") if key not in doc]
    if missing:
        raise InvalidValue(f"instance file missing fields: {', '.join(missing)}")
    values = doc["values"]
    if not isinstance(values, list) or not values:
        raise InvalidValue("values must be a non-empty array")
    return normalize(values, doc["t"], doc["l"], exact=exact)


def load_marginals(path: str, inst: Instance, exact: bool) -> list:
    """Marginals in original input order: a JSON array or an object with a
    marginals field (cmd_solve output round-trips directly)."""
    doc = _load_json(path, exact)
    if isinstance(doc, dict):
        doc = doc.get("marginals")
    if not isinstance(doc, list):
        raise InvalidMarginals("marginals file must hold an array or a marginals field")
    raw = [parse_number(x, exact) for x in doc]
    if len(raw) != inst.raw_size:
        raise InvalidMarginals(
            f"expected {inst.raw_size} marginals (original order), got {len(raw)}"
        )
    for pos in inst.dropped:
        if raw[pos] != 0:
            raise InvalidMarginals(
                f"position {pos + 1} has zero value; its marginal must be 0"
            )
    return [raw[int(pos)] for pos in inst.perm]


def _original_set(indices, inst: Instance) -> list[int]:
    return sorted(int(inst.perm[j]) + 1 for j in indices)


def _fmt_set(indices, inst: Instance) -> str:
    return "{" + ",".join(str(k) for k in _original_set(indices, inst)) + "}"


class _Emitter:
    """Renders either line-oriented text or one JSON document."""

    def __init__(self, as_json: bool, precision: int):
        self.as_json = as_json
        self.precision = precision
        self.doc: dict = {}

    def fmt(self, x) -> str:
        return format_number(x, self.precision)

    def jnum(self, x):
        if isinstance(x, Fraction):
            return self.fmt(x)
        return float(self.fmt(x))

    def field(self, name: str, value, text_line: str | None = None):
        self.doc[name] = value
        if not self.as_json and text_line is not None:
            print(text_line)

    def finish(self) -> None:
        if self.as_json:
            print(json.dumps(self.doc, indent=2))


def _solve_report(inst: Instance, out: _Emitter):
    p, val = solve(inst)
    resp = adversary_best_response(p, inst, check=False)
    level = inst.values[0] * p.p[0]
    marg = to_original_order(list(p.p), inst, fill=0)
    out.field("value", out.jnum(val), f"value {out.fmt(val)}")
    out.field("level", out.jnum(level), f"level {out.fmt(level)}")
    out.field(
        "marginals",
        [out.jnum(q) for q in marg],
        "marginals " + " ".join(out.fmt(q) for q in marg),
    )
    out.field(
        "byz_set",
        _original_set(resp.byz_set, inst),
        f"byz_set {_fmt_set(resp.byz_set, inst)}",
    )
    return p, val


def cmd_solve(args) -> int:
    inst = load_instance(args.instance, args.exact)
    out = _Emitter(args.json, args.precision)
    _solve_report(inst, out)
    status = 0
    if args.verify:
        checks = _verification_checks(inst, args.resolution)
        out.doc["checks"] = [{"name": name, "status": st} for name, st, _ in checks]
        if not args.json:
            for name, st, detail in checks:
                print(f"{st} {name}{': ' + detail if detail else ''}")
        if any(st == "FAIL" for _, st, _ in checks):
            status = 1
    out.finish()
    return status


def cmd_eval(args) -> int:
    inst = load_instance(args.instance, args.exact)
    sorted_p = load_marginals(args.marginals, inst, args.exact)
    check_marginals(sorted_p, inst)
    val = value_of_marginals(sorted_p, inst, check=False)
    resp = adversary_best_response(sorted_p, inst, check=False)
    out = _Emitter(args.json, args.precision)
    out.field("value", out.jnum(val), f"value {out.fmt(val)}")
    out.field(
        "byz_set",
        _original_set(resp.byz_set, inst),
        f"byz_set {_fmt_set(resp.byz_set, inst)}",
    )
    out.finish()
    return 0


def cmd_baseline(args) -> int:
    inst = load_instance(args.instance, args.exact)
    chosen, val = deterministic_baseline(inst)
    out = _Emitter(args.json, args.precision)
    out.field(
        "selected",
        _original_set(chosen.indices, inst),
        f"selected {_fmt_set(chosen.indices, inst)}",
    )
    out.field("value", out.jnum(val), f"value {out.fmt(val)}")
    out.finish()
    return 0


def cmd_sample(args) -> int:
    if args.count < 1:
        raise InvalidValue("count must be >= 1")
    inst = load_instance(args.instance, args.exact)
    p, _ = solve(inst)
    padded = pad_marginals(p, inst)
    draws = sample_many(padded, inst, args.count, args.seed)
    out = _Emitter(args.json, args.precision)
    sets = [_original_set(chosen.indices, inst) for chosen in draws]
    if args.json:
        out.field("samples", sets)
    else:
        for chosen in draws:
            print(_fmt_set(chosen.indices, inst))
    out.finish()
    return 0


def cmd_decompose(args) -> int:
    inst = load_instance(args.instance, args.exact)
    p, _ = solve(inst)
    padded = pad_marginals(p, inst)
    dist = decompose(padded, inst)
    out = _Emitter(args.json, args.precision)
    atoms = [
        {"weight": out.jnum(w), "set": _original_set(chosen.indices, inst)}
        for chosen, w in dist.atoms
    ]
    if args.json:
        out.field("atoms", atoms)
    else:
        for (chosen, w) in dist.atoms:
            print(f"{out.fmt(w)} {_fmt_set(chosen.indices, inst)}")
    out.finish()
    return 0


def cmd_curve(args) -> int:
    inst = load_instance(args.instance, args.exact)
    bps = sweep(inst)
    out = _Emitter(args.json, args.precision)
    if args.json:
        out.field(
            "breakpoints",
            [
                {
                    "level": out.jnum(b.level),
                    "value": out.jnum(b.value),
                    "at_level": b.at_level,
                    "saturated": b.saturated,
                }
                for b in bps
            ],
        )
    else:
        for b in bps:
            print(f"{out.fmt(b.level)} {out.fmt(b.value)} {b.at_level} {b.saturated}")
    out.finish()
    return 0


def _rel_ok(a: float, b: float, rel: float = REL_TOL) -> bool:
    return abs(a - b) <= rel * max(1.0, abs(a), abs(b))


def _verification_checks(inst: Instance, resolution: int) -> list[tuple]:
    """Run every oracle applicable at this instance size.

    Returns (name, PASS|FAIL|SKIP, detail) triples.
    """
    checks: list[tuple] = []
    p, val = solve(inst)
    valf = float(val)

    def record(name, ok, detail=""):
        checks.append((name, "PASS" if ok else "FAIL", detail))

    def skip(name, why):
        checks.append((name, "SKIP", why))

    bp = best_breakpoint(inst)
    nice = niceness_violations(inst, bp.level, p)
    chain = chain_violations(inst, p)
    record("solution-structure", not nice and not chain, "; ".join(nice + chain))

    _, base = deterministic_baseline(inst)
    record(
        "dominates-deterministic",
        float(base) <= valf * (1 + REL_TOL) + 1e-12,
        f"baseline {base} vs solve {val}",
    )

    if inst.n <= BRUTE_VALUE_MAX_N:
        bv = brute_value(p, inst)
        ok = bv == val if inst.exact else _rel_ok(float(bv), valf)
        record("adversary-enumeration", ok, f"brute {bv} vs solve {val}")
    else:
        skip("adversary-enumeration", f"n={inst.n} beyond guard")

    try:
        bd = brute_deterministic(inst)
        ok = bd == base if inst.exact else _rel_ok(float(bd), float(base))
        record("baseline-enumeration", ok, f"brute {bd} vs baseline {base}")
    except ByzselError as exc:
        skip("baseline-enumeration", str(exc))

    if inst.ell == 1:
        cand = solve_ell1(inst)
        ok = cand.value == val if inst.exact else _rel_ok(float(cand.value), valf)
        record("closed-form-consistency", ok, f"closed form {cand.value} vs solve {val}")

    g = float(grid_check(inst, resolution))
    ok = g <= valf * (1 + REL_TOL) + 1e-12 and (
        valf <= 0 or g >= valf * (1 - 1e-4)
    )
    record("grid-domination", ok, f"grid {g} vs solve {valf}")

    if math.comb(inst.n, inst.ell) <= 2000 and math.comb(inst.n, inst.t) <= 2000:
        est = mwu_game_value(inst, 20000)
        ok = abs(est.value - valf) <= est.error_bound + REL_TOL * max(1.0, valf)
        record(
            "game-value",
            ok,
            f"mwu {est.value} +- {est.error_bound} vs solve {valf}",
        )
    else:
        skip("game-value", "strategy space beyond guard")

    padded = pad_marginals(p, inst)
    if inst.n <= 200:
        dist = decompose(padded, inst)
        induced = dist.induced_marginals(inst.n)
        if inst.exact:
            ok = induced == list(padded.p)
        else:
            ok = all(_rel_ok(float(a), float(b)) for a, b in zip(induced, padded.p))
        ok = ok and len(dist.atoms) <= inst.n
        record("decompose-recompose", ok, f"{len(dist.atoms)} atoms")
    else:
        skip("decompose-recompose", f"n={inst.n} beyond guard")

    draws = sample_many(padded, inst, 16, 0)
    record("sample-size", all(len(s) == inst.ell for s in draws))
    return checks


def cmd_verify(args) -> int:
    inst = load_instance(args.instance, args.exact)
    checks = _verification_checks(inst, args.resolution)
    out = _Emitter(args.json, args.precision)
    if args.json:
        out.field(
            "checks",
            [{"name": name, "status": st, "detail": detail} for name, st, detail in checks],
        )
        out.field("ok", not any(st == "FAIL" for _, st, _ in checks))
    else:
        for name, st, detail in checks:
            print(f"{st} {name}{': ' + detail if detail else ''}")
    out.finish()
    return 1 if any(st == "FAIL" for _, st, _ in checks) else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="byzsel",
        description="Worst-case optimal selection of l boxes when t are byzantine.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("instance", help="JSON instance file {values, t, l}")
        sp.add_argument("--exact", action="store_true", help="exact rational arithmetic")
        sp.add_argument("--json", action="store_true", help="emit one JSON document")
        sp.add_argument(
            "--precision", type=int, default=12, metavar="N",
            help="significant digits for float output (default 12)",
        )

    sp = sub.add_parser("solve", help="optimal marginals, value, level, adversary set")
    common(sp)
    sp.add_argument("--verify", action="store_true", help="run oracle checks afterwards")
    sp.add_argument("--resolution", type=int, default=10001, metavar="N",
                    help="grid points for the verification scan")
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("eval", help="value and adversary set of given marginals")
    common(sp)
    sp.add_argument("marginals", help="JSON array (original order) or solve output")
    sp.set_defaults(func=cmd_eval)

    sp = sub.add_parser("baseline", help="best deterministic selection and value")
    common(sp)
    sp.set_defaults(func=cmd_baseline)

    sp = sub.add_parser("sample", help="draw size-l selections from the optimum")
    common(sp)
    sp.add_argument("--seed", type=int, required=True, help="64-bit RNG seed")
    sp.add_argument("--count", type=int, default=1, metavar="N", help="number of draws")
    sp.set_defaults(func=cmd_sample)

    sp = sub.add_parser("decompose", help="explicit distribution over selections")
    common(sp)
    sp.set_defaults(func=cmd_decompose)

    sp = sub.add_parser("curve", help="breakpoints of the value curve, one per line")
    common(sp)
    sp.set_defaults(func=cmd_curve)

    sp = sub.add_parser("verify", help="run all applicable oracles; exit 1 on FAIL")
    common(sp)
    sp.add_argument("--resolution", type=int, default=10001, metavar="N",
                    help="grid points for the verification scan")
    sp.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ByzselError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except BrokenPipeError:
        devnull = os.open(os.devnull, os.O_WRONLY)
        os.dup2(devnull, sys.stdout.fileno())
        return 1
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: cannot read input: {exc}", file=sys.stderr)
        return 2
    except (KeyError, TypeError, ValueError) as exc:
        print(f"error: bad input: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
