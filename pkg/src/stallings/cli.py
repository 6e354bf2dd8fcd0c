"""Command-line front end.

Exit status: 0 on success, 1 on usage errors, 2 when an internal check fails.
Results go to standard output, diagnostics to standard error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import counting, generator, graphs, injections, oracle
from .randomness import RandomSource, fresh_seed


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _log(msg):
    print(msg, file=sys.stderr)


def load_or_build_table(n_max: int, cache: str | None) -> counting.InjectionTable:
    """Table covering ``n_max``, read from and written back to ``cache``."""
    if cache is None:
        return counting.build_injection_table(n_max)
    path = Path(cache)
    if path.exists():
        try:
            table = counting.load_table(path)
        except ValueError as exc:
            _log(f"warning: {exc}; rebuilding")
        else:
            if table.n_max >= n_max:
                return table
    table = counting.build_injection_table(n_max)
    counting.save_table(table, path)
    return table


def _seed(args) -> int:
    if args.seed is None:
        args.seed = fresh_seed()
        _log(f"seed: {args.seed}")
    return args.seed


def _positive(name, value, low=1):
    if value < low:
        raise UsageError(f"--{name} must be at least {low}")


# -- subcommands ----------------------------------------------------------------

def cmd_table(args, out):
    _positive("n-max", args.n_max, 0)
    table = load_or_build_table(args.n_max, args.table_cache)
    if args.format == "json":
        out.write(json.dumps([str(table[k]) for k in range(args.n_max + 1)]) + "\n")
    elif args.format == "csv":
        out.write("k,I_k\n")
        for k in range(args.n_max + 1):
            out.write(f"{k},{table[k]}\n")
    else:
        for k in range(args.n_max + 1):
            out.write(f"{k} {table[k]}\n")


def cmd_gen_injection(args, out):
    _positive("n", args.n, 0)
    table = load_or_build_table(args.n, args.table_cache)
    src = RandomSource(_seed(args))
    inj = injections.random_partial_injection(args.n, table, src, args.method)
    if args.format == "json":
        out.write(json.dumps({"n": inj.n, "image": list(inj.image)}) + "\n")
    else:
        out.write(" ".join("-" if v is None else str(v) for v in inj.image) + "\n")


def _write_graphs(reports, fmt, out, verbose):
    for i, rep in enumerate(reports):
        if verbose:
            _log(f"draw {i}: rejections={rep.rejections}")
        if fmt == "dot":
            out.write(graphs.to_dot(rep.graph, name=f"G{i}"))
        else:
            out.write(json.dumps(graphs.to_json(rep.graph), separators=(",", ":")) + "\n")


def cmd_gen(args, out):
    _positive("n", args.n)
    _positive("r", args.r, 2)
    _positive("count", args.count)
    table = load_or_build_table(args.n, args.table_cache)
    reports = generator.sample_batch(args.n, args.r, args.count, table, _seed(args),
                                     method=args.method)
    _write_graphs(reports, args.format, out, args.verbose)


def cmd_gen_fi(args, out):
    _positive("n", args.n)
    _positive("r", args.r, 2)
    _positive("count", args.count)
    reports = generator.sample_batch(args.n, args.r, args.count, None, _seed(args),
                                     finite_index=True)
    _write_graphs(reports, args.format, out, args.verbose)


def cmd_count(args, out):
    _positive("n", args.n)
    _positive("r", args.r, 2)
    res = oracle.enumerate_admissible(args.n, args.r)
    out.write(json.dumps(res.to_dict()) + "\n")


def cmd_stats(args, out):
    _positive("n", args.n)
    _positive("trials", args.trials)
    if args.metric != "sequences":
        _positive("r", args.r, 2)
    src = RandomSource(_seed(args))
    if args.metric == "fi-accept":
        rep = oracle.finite_index_accept_stat(args.n, args.r, args.trials, src)
    else:
        table = load_or_build_table(args.n, args.table_cache)
        if args.metric == "rank":
            rep = oracle.rank_stat(args.n, args.r, args.trials, src, table)
        elif args.metric == "connectivity":
            rep = oracle.connectivity_stat(args.n, args.r, args.trials, src, table)
        else:
            rep = oracle.sequence_stat(args.n, args.trials, src, table, r=args.r)
    out.write(json.dumps(rep.to_dict()) + "\n")


def cmd_selftest(args, out):
    failures = 0
    for name, check in _SELFTESTS:
        t0 = time.perf_counter()
        try:
            ok = bool(check())
        except Exception as exc:  # report and keep going
            ok = False
            name = f"{name} ({type(exc).__name__}: {exc})"
        dt = time.perf_counter() - t0
        out.write(f"{'PASS' if ok else 'FAIL'}  {name}  [{dt:.2f}s]\n")
        failures += not ok
    out.write(f"{len(_SELFTESTS) - failures}/{len(_SELFTESTS)} checks passed\n")
    return 2 if failures else 0


# -- self-test checks -----------------------------------------------------------

_A002720 = [1, 2, 7, 34, 209, 1546, 13327, 130922, 1441729, 17572114, 234662231]


def _st_table():
    return counting.build_injection_table(10).values == _A002720


def _st_identities():
    table = counting.build_injection_table(500)
    return (all(counting.verify_pointing_identity(n, table) for n in range(1, 201))
            and all(counting.check_injection_bounds(n, table) for n in range(1, 501)))


def _st_enumeration():
    table = counting.build_injection_table(6)
    if any(len(oracle.enumerate_partial_injections(n)) != table[n] for n in range(7)):
        return False
    for n, r in [(1, 1), (1, 2), (2, 2), (3, 2)]:
        oracle.enumerate_admissible(n, r)  # raises if the two routes disagree
    return True


def _st_canonical():
    for n in (1, 2, 3):
        by_fast, by_brute = {}, {}
        for g in oracle.admissible_graphs(n, 2):
            by_fast.setdefault(graphs.canonical_form(g), set()).add(oracle.brute_force_canonical(g))
            by_brute.setdefault(oracle.brute_force_canonical(g), set()).add(graphs.canonical_form(g))
        if any(len(s) != 1 for s in by_fast.values()) or any(len(s) != 1 for s in by_brute.values()):
            return False
    return True


def _st_injection_uniformity():
    table = counting.build_injection_table(3)
    for n in (2, 3):
        classes = [inj.image for inj in oracle.enumerate_partial_injections(n)]
        for method in injections.METHODS:
            p = oracle.uniformity_test(
                lambda s: injections.random_partial_injection(n, table, s, method),
                classes, 100 * len(classes), RandomSource(2024, n), key=lambda i: i.image)
            if p <= 1e-3:
                return False
    return True


def _st_subgroup_uniformity():
    table = counting.build_injection_table(2)
    classes = oracle.admissible_classes(2, 2)
    p = oracle.uniformity_test(
        lambda s: generator.random_admissible_graph(2, 2, table, s).graph,
        classes, 100 * len(classes), RandomSource(7))
    return p > 1e-3


def _st_fold_roundtrip():
    table = counting.build_injection_table(20)
    src = RandomSource(11)
    for n in (1, 5, 12, 20):
        g = generator.random_admissible_graph(n, 2, table, src).graph
        basis = graphs.basis_words(g)
        if len(basis) != graphs.rank_of(g):
            return False
        if basis and graphs.canonical_form(graphs.fold(basis, g.r)) != graphs.canonical_form(g):
            return False
        if not all(graphs.accepts_word(g, w) for w in basis):
            return False
    return True


_SELFTESTS = [
    ("partial injection counts I_0..I_10", _st_table),
    ("pointing identity n<=200, injection bounds n<=500", _st_identities),
    ("enumeration: counts and two subgroup-counting routes", _st_enumeration),
    ("canonical form agrees with brute-force isomorphism, n<=3", _st_canonical),
    ("uniform partial injections, n=2,3, both methods", _st_injection_uniformity),
    ("uniform subgroups, n=2, r=2", _st_subgroup_uniformity),
    ("fold(basis(g)) == g on sampled graphs", _st_fold_roundtrip),
]


# -- parser ------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="stallings", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, seed=True, table=True):
        if seed:
            sp.add_argument("--seed", type=int, default=None,
                            help="64-bit seed; drawn from system entropy when omitted")
        if table:
            sp.add_argument("--table-cache", default=None, metavar="PATH",
                            help="read/write the I_n table cache at PATH")

    sp = sub.add_parser("table", help="print I_0..I_N")
    sp.add_argument("--n-max", type=int, required=True)
    sp.add_argument("--format", choices=["text", "json", "csv"], default="text")
    common(sp, seed=False)
    sp.set_defaults(func=cmd_table)

    sp = sub.add_parser("gen-injection", help="one uniform partial injection")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--format", choices=["text", "json"], default="json")
    sp.add_argument("--method", choices=injections.METHODS, default="guided")
    common(sp)
    sp.set_defaults(func=cmd_gen_injection)

    for name, func, helptext in (("gen", cmd_gen, "uniform size-n subgroups"),
                                 ("gen-fi", cmd_gen_fi, "uniform size-n finite-index subgroups")):
        sp = sub.add_parser(name, help=helptext)
        sp.add_argument("--n", type=int, required=True)
        sp.add_argument("--r", type=int, required=True)
        sp.add_argument("--count", type=int, default=1)
        sp.add_argument("--format", choices=["json", "dot"], default="json")
        sp.add_argument("--verbose", action="store_true",
                        help="report rejection counts on stderr")
        if name == "gen":
            sp.add_argument("--method", choices=injections.METHODS, default="guided")
        common(sp, table=name == "gen")
        sp.set_defaults(func=func)

    sp = sub.add_parser("count", help="exact subgroup count by enumeration")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--r", type=int, required=True)
    sp.set_defaults(func=cmd_count)

    sp = sub.add_parser("stats", help="sampled statistics")
    sp.add_argument("--metric", choices=[m.value for m in oracle.Metric], required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--r", type=int, default=2)
    sp.add_argument("--trials", type=int, required=True)
    common(sp)
    sp.set_defaults(func=cmd_stats)

    sp = sub.add_parser("selftest", help="run the built-in invariant checks")
    sp.set_defaults(func=cmd_selftest)
    return p


def run(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        code = args.func(args, out)
        return code or 0
    except UsageError as exc:
        _log(f"error: {exc}")
        return 1
    except (ValueError, IndexError) as exc:
        _log(f"error: {exc}")
        return 1
    except (AssertionError, generator.GenerationError) as exc:
        _log(f"internal error: {exc}")
        return 2


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
