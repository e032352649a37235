"""``sep-limit``: counting, checking, sampling, limit prefixes and stable-law checks.

Exit status is 0 on success (a ``not separable`` verdict is a result, not an
error), 2 on usage errors and 3 when a numeric routine leaves its domain.
Every randomized subcommand is a function of ``--seed`` (default 0), the
flags and the package version; streams are PCG64 seeded via SeedSequence.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from collections.abc import Sequence

import numpy as np

from . import __version__
from ._rng import make_rng
from .limitlaw import DEFAULT_CAP, INF, Mode, compare_prefix_laws, ratio_stats, sample_limit_prefix
from .perm import build_sep_tree, find_occurrence, parse_permutation
from .sampler import SepClass, iter_sep_values
from .schroeder import (
    OutOfDomainError,
    _allow_long_ints,
    get_table,
    install_table,
    load_table,
    save_table,
    shared_value,
)
from .stablelab import cf_grid, mc_ratio_experiment

EXIT_USAGE = 2
EXIT_DOMAIN = 3
TABLE_ENV = "SEP_LIMIT_TABLE"


class UsageError(Exception):
    pass


# --------------------------------------------------------------------------
# serialisation


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if x == INF:
            return "inf"
        if math.isnan(x):
            return None
        return x
    return x


def _dump(obj) -> str:
    return json.dumps(_jsonable(obj), sort_keys=True)


def _fmt_value(v) -> str:
    return "inf" if v == INF else str(int(v))


def _meta(args) -> dict:
    flags = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "seed")}
    return {"version": __version__, "seed": args.seed, "flags": flags}


def _positive(name):
    def parse(text):
        try:
            v = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{name} must be an integer, got {text!r}") from None
        if v < 1:
            raise argparse.ArgumentTypeError(f"{name} must be >= 1, got {v}")
        return v

    return parse


# --------------------------------------------------------------------------
# subcommands


def cmd_count(args, out):
    value = shared_value(args.n)
    if args.format == "json":
        out.write(_dump({"n": args.n, "s_n": value, **_meta(args)}) + "\n")
    else:
        out.write(f"{value}\n")


def _root_narrative(tree) -> str:
    if tree.kind.value == "leaf":
        return "leaf"
    sizes = [len(c.flatten()) for c in tree.children]
    cuts, acc = [], 0
    for k in sizes[:-1]:
        acc += k
        cuts.append(str(acc))
    kind = "direct sum" if tree.kind.value == "+" else "skew sum"
    return f"{kind} of {len(sizes)} blocks, splitting after position {', '.join(cuts)}"


def cmd_check(args, out):
    try:
        sigma = parse_permutation(args.perm)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    tree = build_sep_tree(sigma)
    if tree is not None:
        result = {"separable": True, "tree": tree.to_text(), "root": _root_narrative(tree)}
    else:
        for pat in ((2, 4, 1, 3), (3, 1, 4, 2)):
            occ = find_occurrence(pat, sigma)
            if occ is not None:
                break
        result = {
            "separable": False,
            "pattern": "".join(map(str, pat)),
            "positions": list(occ),
            "values": [sigma[i - 1] for i in occ],
        }
    if args.format == "json":
        out.write(_dump({"perm": list(sigma), **result, **_meta(args)}) + "\n")
    elif result["separable"]:
        out.write(f"separable\n{result['tree']}\nroot: {result['root']}\n")
    else:
        pos = " ".join(map(str, result["positions"]))
        vals = " ".join(map(str, result["values"]))
        out.write(f"not separable\nwitness: {result['pattern']} at positions {pos} (values {vals})\n")


def cmd_sample(args, out):
    rng = make_rng(args.seed)
    cls = SepClass.parse(args.cls)
    rows = [list(iter_sep_values(args.n, cls, rng)) for _ in range(args.count)]
    if args.format == "json":
        out.write(_dump({"n": args.n, "class": cls.value, "perms": rows, **_meta(args)}) + "\n")
    else:
        for r in rows:
            out.write(" ".join(map(str, r)) + "\n")


def _window_dict(w) -> dict:
    appearing, integers = ratio_stats(w)
    return {
        "coords": w.coords,
        "pieces": [
            {
                "discard_start": p.discard_start,
                "discarded_len": p.discarded_len,
                "discard_arrivals": p.arrivals,
                "kind": p.kind,
                "length": p.length,
                "block_start": p.block_start,
                "values": list(p.values),
                "complete": p.complete,
                "states": [s.value for s in p.states],
            }
            for p in w.pieces
        ],
        "frontier": w.frontier,
        "truncated": w.truncated,
        "truncations": w.truncations,
        "ratio_appearing_vs_total": appearing,
        "ratio_integers_vs_coords": integers,
    }


def cmd_limit(args, out):
    if args.cap < args.m:
        raise UsageError(f"--cap ({args.cap}) must be >= --m ({args.m})")
    w = sample_limit_prefix(args.m, args.mode, args.cap, make_rng(args.seed))
    d = _window_dict(w)
    if args.format == "json":
        out.write(_dump({"m": args.m, "mode": args.mode, **d, **_meta(args)}) + "\n")
        return
    out.write("coords: " + " ".join(_fmt_value(v) for v in w.coords) + "\n")
    for i, p in enumerate(w.pieces, 1):
        if p.discarded_len:
            disc = f"discard [{p.discard_start}, {p.discard_start + p.discarded_len - 1}]"
        else:
            disc = "discard none"
        if p.kind == "perm":
            shown = " ".join(map(str, p.values)) + ("" if p.complete else " ...")
            body = f"perm on [{p.block_start}, {p.block_start + p.length - 1}]: {shown}"
        else:
            body = f"inf x {p.length}"
        out.write(f"piece {i}: {disc}; {body}\n")
    flag = f" (truncated {w.truncations}x at cap {args.cap})" if w.truncated else ""
    out.write(
        "ratios: appearing/(appearing+discarded) = "
        f"{d['ratio_appearing_vs_total']:.6g}, integers/(integers+infinities) = "
        f"{d['ratio_integers_vs_coords']:.6g}{flag}\n"
    )


def cmd_converge(args, out):
    report = compare_prefix_laws(
        args.n, args.m, args.value_cap, args.reps, args.mode, args.seed,
        limit_reps=args.limit_reps, cap=args.cap, jobs=args.jobs,
    )
    report.update(_meta(args))
    out.write(_dump(report) + "\n")


def _parse_grid(text: str) -> list[float]:
    try:
        if ":" in text:
            a, b, k = text.split(":")
            k = int(k)
            if k < 1:
                raise ValueError
            return [float(x) for x in np.linspace(float(a), float(b), k)]
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise UsageError(f"bad --t-grid {text!r}; use a:b:k or a comma list") from None


def cmd_stable_cf(args, out):
    rows = cf_grid(args.kind, args.n, _parse_grid(args.t_grid), s=args.s)
    if args.format == "json":
        out.write(_dump({"kind": args.kind, "n": args.n, "rows": rows, **_meta(args)}) + "\n")
        return
    cols = ["t", "re_exact", "im_exact", "re_limit", "im_limit", "abs_err"]
    w = csv.DictWriter(out, fieldnames=cols, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: repr(r[k]) for k in cols})


def cmd_stable_ratio(args, out):
    samples, summary = mc_ratio_experiment(args.which, args.n, args.reps, make_rng(args.seed))
    summary.update(_meta(args))
    if args.format == "json":
        out.write(_dump({"samples": samples.tolist(), "summary": summary}) + "\n")
        return
    out.write("replica,ratio\n")
    for i, x in enumerate(samples):
        out.write(f"{i},{'nan' if math.isnan(x) else repr(float(x))}\n")
    out.write("# summary: " + _dump(summary) + "\n")


# --------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
    common.add_argument("--table", default=None,
                        help=f"Schröder table cache file (default ${TABLE_ENV}, else no cache)")
    common.add_argument("--format", choices=("text", "json", "csv"), default="text")

    p = argparse.ArgumentParser(prog="sep-limit", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("count", parents=[common], help="print s_n")
    c.add_argument("--n", type=_positive("--n"), required=True)
    c.set_defaults(func=cmd_count)

    c = sub.add_parser("check", parents=[common], help="separability verdict and tree")
    c.add_argument("perm", help='e.g. "4 3 5 2 1 6 7" or 4352167')
    c.set_defaults(func=cmd_check)

    c = sub.add_parser("sample", parents=[common], help="uniform separable permutations")
    c.add_argument("--n", type=_positive("--n"), required=True)
    c.add_argument("--class", dest="cls", choices=("all", "indec", "skewindec"), default="all")
    c.add_argument("--count", type=_positive("--count"), default=1)
    c.set_defaults(func=cmd_sample)

    modes = [m.value for m in Mode]
    c = sub.add_parser("limit", parents=[common], help="prefix of the limit object")
    c.add_argument("--m", type=_positive("--m"), required=True)
    c.add_argument("--mode", choices=modes, default="mechanism")
    c.add_argument("--cap", type=_positive("--cap"), default=DEFAULT_CAP)
    c.set_defaults(func=cmd_limit)

    c = sub.add_parser("converge", parents=[common], help="TV probe, finite n vs limit")
    c.add_argument("--n", type=_positive("--n"), required=True)
    c.add_argument("--m", type=_positive("--m"), default=1)
    c.add_argument("--value-cap", type=_positive("--value-cap"), default=10)
    c.add_argument("--reps", type=_positive("--reps"), default=10_000)
    c.add_argument("--limit-reps", type=_positive("--limit-reps"), default=None)
    c.add_argument("--mode", choices=modes, default="mechanism")
    c.add_argument("--cap", type=_positive("--cap"), default=DEFAULT_CAP)
    c.add_argument("--jobs", type=_positive("--jobs"), default=1)
    c.set_defaults(func=cmd_converge)

    c = sub.add_parser("stable-cf", parents=[common], help="exact vs limit CF grid (CSV)")
    c.add_argument("--kind", choices=("zl", "zr", "z", "joint"), required=True)
    c.add_argument("--n", type=_positive("--n"), required=True)
    c.add_argument("--t-grid", default="0:2:9", help="a:b:k (linspace) or comma list")
    c.add_argument("--s", type=float, default=None, help="second argument for --kind joint")
    c.set_defaults(func=cmd_stable_cf)

    c = sub.add_parser("stable-ratio", parents=[common], help="ratio Monte Carlo (CSV + summary)")
    c.add_argument("--which", choices=("discard", "infinity"), required=True)
    c.add_argument("--n", type=_positive("--n"), required=True)
    c.add_argument("--reps", type=_positive("--reps"), default=1000)
    c.set_defaults(func=cmd_stable_ratio)
    return p


def _prepare_table(path: str | None) -> None:
    if path and os.path.exists(path):
        install_table(load_table(path))


def _store_table(path: str | None, n: int | None) -> None:
    # Persist s_1..s_n for the size the command asked about. Tables grown
    # internally (e.g. the heavy-law heads) are not written: decimal I/O of
    # ~10^4 entries costs tens of seconds.
    if not path or n is None:
        return
    if os.path.exists(path):
        with open(path, encoding="ascii") as fh:
            have = int(fh.readline().split()[-1])
        if have >= n:
            return
    save_table(get_table(n).prefix(n), path)


def main(argv: Sequence[str] | None = None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    args = parser.parse_args(argv)
    _allow_long_ints()
    table_path = args.table or os.environ.get(TABLE_ENV)
    try:
        _prepare_table(table_path)
        args.func(args, out)
        sized = args.command in ("count", "sample", "converge")
        _store_table(table_path, args.n if sized else None)
    except UsageError as exc:
        parser.error(str(exc))
    except OutOfDomainError as exc:
        print(f"sep-limit: out of domain: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (ValueError, OSError) as exc:
        print(f"sep-limit: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return 0


if __name__ == "__main__":
    sys.exit(main())
