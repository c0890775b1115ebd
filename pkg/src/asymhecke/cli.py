"""Command-line interface: ``asymhecke <command> ...``."""

from __future__ import annotations

import argparse
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import __version__
from .asymptotic import (GammaFormatError, TensorInvariantError, check_tensor, format_gamma,
                         gamma_tensor, left_mult_matrix, read_gamma, small_cell_summary)
from .cells import compute_cells, left_cell_graph
from .coxeter import CoxeterDescriptor, CoxeterError, CoxeterGroup, builtin_descriptor
from .exact import char_poly
from .fixtures import FixtureError, load_fixture, verify_fixture
from .hecke import CACHE_ENV, KLCacheError, compute_kl_table
from .ringlab import (RelationSyntaxError, center_dimension, derived_algebra_dimension,
                      enumerate_unital_subrings, eval_expr, find_permutation_isomorphisms,
                      parse_relation, trace_form_gram)

log = logging.getLogger("asymhecke")

LONG_RUN_THRESHOLD = 2000


class CLIError(Exception):
    pass


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--cache-dir", default=None,
                        help=f"directory for KL tables (default: ${CACHE_ENV})")
    common.add_argument("--require-cache", action="store_true",
                        help="fail instead of computing KL polynomials")
    common.add_argument("--threads", type=_positive_int, default=1)
    common.add_argument("--long-running", action="store_true",
                        help=f"allow the full pipeline on groups larger than {LONG_RUN_THRESHOLD}")
    common.add_argument("-v", "--verbose", action="store_true")

    group_sel = argparse.ArgumentParser(add_help=False)
    sel = group_sel.add_mutually_exclusive_group(required=True)
    sel.add_argument("--type", help="built-in type such as A3, B3, H3, H4, I2_5")
    sel.add_argument("--descriptor", help="Coxeter descriptor file")

    p = argparse.ArgumentParser(prog="asymhecke", description="Asymptotic Hecke algebras of finite Coxeter groups.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("group", help="Coxeter group information")
    gsub = g.add_subparsers(dest="group_command", required=True)
    gsub.add_parser("info", parents=[common, group_sel], help="order, longest length, length distribution")

    c = sub.add_parser("cells", parents=[common, group_sel], help="list Kazhdan-Lusztig cells")
    c.add_argument("--kind", choices=["left", "right", "twosided"], default="left")

    gm = sub.add_parser("gamma", parents=[common, group_sel], help="structure constants of J for one left cell")
    gm.add_argument("--cell", type=int, required=True, help="left cell id as listed by 'cells --kind left'")
    gm.add_argument("--out", help="output file (default: standard output)")

    a = sub.add_parser("analyze", parents=[common], help="analyze a gamma tensor file")
    a.add_argument("--tensor", required=True)
    for flag in ("charpoly", "subrings", "automorphisms", "derived", "center", "trace-form"):
        a.add_argument(f"--{flag}", action="store_true")
    a.add_argument("--relations", help="file of 'M<k> = expr' lines to check against the tensor")

    f = sub.add_parser("fixtures", help="shipped cell data")
    fsub = f.add_subparsers(dest="fixtures_command", required=True)
    fv = fsub.add_parser("verify", parents=[common], help="verify fixture files (packaged copies used by basename)")
    fv.add_argument("files", nargs="+")
    return p


# ---------------------------------------------------------------------------


def _load_group(args) -> CoxeterGroup:
    if args.type:
        desc = builtin_descriptor(args.type)
    else:
        try:
            desc = CoxeterDescriptor.parse(Path(args.descriptor).read_text())
        except OSError as exc:
            raise CLIError(f"cannot read descriptor: {exc}") from None
    return CoxeterGroup(desc)


def _gate(args, g: CoxeterGroup) -> None:
    if g.order > LONG_RUN_THRESHOLD and not args.long_running:
        raise CLIError(f"group has {g.order} elements; pass --long-running to run the full pipeline "
                       f"on groups larger than {LONG_RUN_THRESHOLD}")


def _kl(args, g: CoxeterGroup):
    def progress(w, N):
        log.info("KL polynomials: %d / %d", w, N)

    return compute_kl_table(g, cache_dir=args.cache_dir, require_cache=args.require_cache,
                            progress=progress if g.order > LONG_RUN_THRESHOLD else None)


def cmd_group_info(args, out) -> int:
    g = _load_group(args)
    print(f"order {g.order}", file=out)
    print(f"longest-length {g.longest_length}", file=out)
    print(f"reflections {g.n_pos_roots}", file=out)
    print("length-distribution " + " ".join(map(str, g.length_distribution())), file=out)
    return 0


def cmd_cells(args, out) -> int:
    g = _load_group(args)
    _gate(args, g)
    kl = _kl(args, g)
    part = compute_cells(g, kl, args.kind)
    for line in part.lines():
        print(line, file=out)
    return 0


def cmd_gamma(args, out) -> int:
    g = _load_group(args)
    _gate(args, g)
    kl = _kl(args, g)
    adj = left_cell_graph(g, kl)
    part = compute_cells(g, kl, "left", left_adj=adj)
    if not 0 <= args.cell < len(part):
        raise CLIError(f"cell id {args.cell} out of range 0..{len(part) - 1}")
    cell = part.blocks[args.cell]
    ring = gamma_tensor(g, kl, cell)
    text = format_gamma(ring.tensor)
    if args.out:
        Path(args.out).write_text(text)
        log.info("cell %d: size %d, basis %d, a = %d, distinguished involution %s",
                 args.cell, len(cell), ring.tensor.n, ring.a_value, g.word(ring.distinguished) or "1")
    else:
        out.write(text)
    return 0


def cmd_analyze(args, out) -> int:
    try:
        t = read_gamma(args.tensor)
    except OSError as exc:
        raise CLIError(f"cannot read tensor: {exc}") from None
    problems = check_tensor(t, raise_on_failure=False)
    print(f"n {t.n}", file=out)
    print("invariants " + ("ok" if not problems else "; ".join(problems)), file=out)
    chosen = [k for k in ("charpoly", "subrings", "automorphisms", "derived", "center", "trace_form")
              if getattr(args, k)]
    if not chosen and not args.relations:
        chosen = ["subrings", "automorphisms", "derived", "center", "trace_form"]
    status = 0 if not problems else 1
    if t.n <= 2 and not problems:
        print("ring " + small_cell_summary(t), file=out)
    if "charpoly" in chosen:
        for j in range(t.n):
            print(f"charpoly {j + 1} {char_poly(left_mult_matrix(t, j))}", file=out)
    if "subrings" in chosen:
        if problems:
            raise CLIError("subring enumeration needs a valid tensor")
        for s in enumerate_unital_subrings(t).as_one_based():
            print("subring {" + ",".join(map(str, s)) + "}", file=out)
    if "automorphisms" in chosen:
        autos = find_permutation_isomorphisms(t, t)
        print(f"automorphisms {len(autos)}", file=out)
        for p in autos:
            print("automorphism " + " ".join(str(i + 1) for i in p), file=out)
    if "derived" in chosen:
        print(f"derived-dim {derived_algebra_dimension(t)}", file=out)
    if "center" in chosen:
        print(f"center-dim {center_dimension(t)}", file=out)
    if "trace_form" in chosen:
        _, nondeg = trace_form_gram(t)
        print(f"trace-form {'nondegenerate' if nondeg else 'degenerate'}", file=out)
    if args.relations:
        status |= _check_relations(args.relations, t, out)
    return status


def _check_relations(path: str, t, out) -> int:
    bindings = {f"M{j + 1}": left_mult_matrix(t, j) for j in range(t.n)}
    status = 0
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line.startswith("relation "):
            line = line[len("relation "):]
        if not line:
            continue
        try:
            target, tree = parse_relation(line)
            value = eval_expr(tree, bindings, t.n)
        except (RelationSyntaxError, KeyError, ValueError) as exc:
            raise CLIError(f"{path}:{lineno}: {exc}") from None
        if target not in bindings:
            raise CLIError(f"{path}:{lineno}: unknown matrix {target}")
        ok = value == bindings[target]
        status |= not ok
        print(f"relation {'holds' if ok else 'FAILS'}: {line}", file=out)
    return status


def cmd_fixtures_verify(args, out) -> int:
    def run(name):
        return verify_fixture(load_fixture(name))

    with ThreadPoolExecutor(max_workers=args.threads) as pool:
        reports = list(pool.map(run, args.files))
    ok = True
    for rep in reports:
        for line in rep.lines():
            print(line, file=out)
        ok &= rep.passed
    print("all checks passed" if ok else "some checks FAILED", file=out)
    return 0 if ok else 1


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING,
                        format="%(message)s", stream=sys.stderr)
    if getattr(args, "cache_dir", None) is None and os.environ.get(CACHE_ENV):
        args.cache_dir = os.environ[CACHE_ENV]
    handlers = {
        "group": cmd_group_info,
        "cells": cmd_cells,
        "gamma": cmd_gamma,
        "analyze": cmd_analyze,
        "fixtures": cmd_fixtures_verify,
    }
    try:
        return handlers[args.command](args, out)
    except (CLIError, CoxeterError, KLCacheError, FixtureError, GammaFormatError,
            TensorInvariantError, FileNotFoundError) as exc:
        print(f"asymhecke: error: {exc}", file=sys.stderr)
        return 2


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
