"""Shipped H4 cell data: parsing, reconstruction and verification.

A fixture file lists the basis words of a cell ring, a few explicit
matrices ``M_j`` (with ``M_j[y][z] = G[j, y, z]``), relations expressing
the remaining matrices in those generators, and the expected invariants.
File indices are 1-based; everything returned here is 0-based except the
``index`` keys of :attr:`CellFixture.matrices`, :attr:`relations` and
:attr:`charpolys`, which keep the file's numbering.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .asymptotic import GammaTensor, check_tensor, cyclic_symmetry_failures
from .coxeter import CoxeterDescriptor, CoxeterGroup, WordError
from .exact import FactoredPolyError, char_poly, expand_factored_poly, identity_matrix
from .ringlab import (RelationSyntaxError, atoms, center_dimension, derived_algebra_dimension,
                      enumerate_unital_subrings, eval_expr, find_permutation_isomorphisms,
                      parse_relation, trace_form_gram)

__all__ = [
    "FixtureError",
    "CellFixture",
    "CheckResult",
    "FixtureReport",
    "parse_fixture",
    "load_fixture",
    "packaged_fixture_path",
    "FIXTURE_NAMES",
    "reconstruct_matrices",
    "fixture_tensor",
    "verify_fixture",
]

FIXTURE_NAMES = ("A1", "A9", "A19")


class FixtureError(ValueError):
    def __init__(self, msg: str, line: int | None = None, source: str = "<fixture>"):
        where = f"{source}:{line}: " if line is not None else f"{source}: "
        super().__init__(where + msg)
        self.line = line


@dataclass
class CellFixture:
    name: str
    group_name: str
    order: list[str]
    bonds: list[tuple[str, str, int]]
    n: int
    identity: int  # 0-based
    words: list[str]
    matrices: dict[int, list[list[int]]]
    relations: dict[int, tuple[str, object]] = field(default_factory=dict)
    charpolys: dict[int, str] = field(default_factory=dict)
    subrings: list[frozenset[int]] = field(default_factory=list)  # 0-based
    derived_dim: int | None = None
    center_dim: int | None = None
    source: str = "<fixture>"

    def descriptor(self) -> CoxeterDescriptor:
        return CoxeterDescriptor.from_bonds(self.order, self.bonds)

    @property
    def generator_indices(self) -> list[int]:
        return sorted(self.matrices)


def _ints(tokens, lineno, source):
    try:
        return [int(t) for t in tokens]
    except ValueError:
        raise FixtureError("expected integers", lineno, source) from None


_SET = re.compile(r"^\{\s*(\d+(?:\s*,\s*\d+)*)\s*\}$")


def parse_fixture(text: str, source: str = "<fixture>") -> CellFixture:
    """Parse the line-oriented fixture format; errors name the offending line."""
    lines = text.splitlines()
    header: dict[str, object] = {}
    bonds: list[tuple[str, str, int]] = []
    words: dict[int, str] = {}
    matrices: dict[int, list[list[int]]] = {}
    relations: dict[int, tuple[str, object]] = {}
    rel_lines: dict[int, int] = {}
    charpolys: dict[int, str] = {}
    subring_specs: list[tuple[str, int]] = []
    i = 0

    def need_n(lineno):
        if "n" not in header:
            raise FixtureError("'n' must come before indexed entries", lineno, source)
        return header["n"]

    def check_index(j, lineno):
        n = need_n(lineno)
        if not 1 <= j <= n:
            raise FixtureError(f"index {j} out of range 1..{n}", lineno, source)

    while i < len(lines):
        lineno = i + 1
        line = lines[i].split("#", 1)[0].strip()
        i += 1
        if not line:
            continue
        key, _, rest = line.partition(" ")
        rest = rest.strip()
        if key in ("cell", "group"):
            if key in header:
                raise FixtureError(f"duplicate '{key}' line", lineno, source)
            header[key] = rest
        elif key == "order":
            header["order"] = rest.split()
        elif key == "coxeter":
            parts = rest.split()
            if len(parts) != 3:
                raise FixtureError("coxeter line needs two generators and an order", lineno, source)
            order = header.get("order", [])
            for gname in parts[:2]:
                if gname not in order:
                    raise FixtureError(f"unknown generator {gname!r}", lineno, source)
            bonds.append((parts[0], parts[1], _ints(parts[2:], lineno, source)[0]))
        elif key in ("n", "identity", "derived-dim", "center-dim"):
            if key in header:
                raise FixtureError(f"duplicate '{key}' line", lineno, source)
            vals = _ints(rest.split(), lineno, source)
            if len(vals) != 1:
                raise FixtureError(f"'{key}' takes one integer", lineno, source)
            header[key] = vals[0]
        elif key == "element":
            parts = rest.split()
            if len(parts) != 2:
                raise FixtureError("element line needs an index and a word", lineno, source)
            j = _ints(parts[:1], lineno, source)[0]
            check_index(j, lineno)
            if j in words:
                raise FixtureError(f"duplicate element {j}", lineno, source)
            words[j] = parts[1]
        elif key == "matrix":
            j = _ints(rest.split(), lineno, source)[0]
            check_index(j, lineno)
            if j in matrices:
                raise FixtureError(f"duplicate matrix {j}", lineno, source)
            n = header["n"]
            rows = []
            while len(rows) < n:
                if i >= len(lines):
                    raise FixtureError(f"matrix {j} ends after {len(rows)} rows, expected {n}", lineno, source)
                row_line = lines[i].split("#", 1)[0].strip()
                i += 1
                if not row_line:
                    continue
                row = _ints(row_line.split(), i, source)
                if len(row) != n:
                    raise FixtureError(f"matrix {j} row has {len(row)} entries, expected {n}", i, source)
                rows.append(row)
            matrices[j] = rows
        elif key == "relation":
            try:
                target, tree = parse_relation(rest)
            except RelationSyntaxError as exc:
                raise FixtureError(str(exc), lineno, source) from None
            j = int(target[1:])
            check_index(j, lineno)
            if j in relations:
                raise FixtureError(f"duplicate relation for M{j}", lineno, source)
            for name in atoms(tree):
                check_index(int(name[1:]), lineno)
            relations[j] = (rest, tree)
            rel_lines[j] = lineno
        elif key == "charpoly":
            parts = rest.split(None, 1)
            if len(parts) != 2:
                raise FixtureError("charpoly line needs an index and a polynomial", lineno, source)
            j = _ints(parts[:1], lineno, source)[0]
            check_index(j, lineno)
            if j in charpolys:
                raise FixtureError(f"duplicate charpoly {j}", lineno, source)
            try:
                expand_factored_poly(parts[1])
            except FactoredPolyError as exc:
                raise FixtureError(f"charpoly {j}: {exc}", lineno, source) from None
            charpolys[j] = parts[1]
        elif key == "subrings":
            subring_specs.append((rest, lineno))
        else:
            raise FixtureError(f"unknown keyword {key!r}", lineno, source)

    for req in ("cell", "group", "order", "n", "identity"):
        if req not in header:
            raise FixtureError(f"missing '{req}' line", None, source)
    n = header["n"]
    ident = header["identity"]
    if not 1 <= ident <= n:
        raise FixtureError(f"identity {ident} out of range 1..{n}", None, source)
    for j in range(1, n + 1):
        if j not in words:
            raise FixtureError(f"element {j} has no word", None, source)
        defs = (j in matrices) + (j in relations) + (j == ident)
        if defs == 0:
            raise FixtureError(f"index {j} has no definition", None, source)
        if defs > 1:
            raise FixtureError(f"index {j} is defined more than once", rel_lines.get(j), source)
    if len(set(words.values())) != n:
        raise FixtureError("element words are not pairwise distinct", None, source)

    subrings: list[frozenset[int]] = []
    for spec, lineno in subring_specs:
        if spec == "ALL":
            subrings.append(frozenset(range(n)))
            continue
        m = _SET.match(spec)
        if not m:
            raise FixtureError(f"malformed subring set {spec!r}", lineno, source)
        members = [int(t) for t in m.group(1).split(",")]
        for j in members:
            check_index(j, lineno)
        subrings.append(frozenset(j - 1 for j in members))

    return CellFixture(
        name=header["cell"], group_name=header["group"], order=header["order"], bonds=bonds,
        n=n, identity=ident - 1, words=[words[j] for j in range(1, n + 1)],
        matrices=matrices, relations=relations, charpolys=charpolys, subrings=subrings,
        derived_dim=header.get("derived-dim"), center_dim=header.get("center-dim"), source=source,
    )


def packaged_fixture_path(name: str) -> Path:
    """Path of a shipped fixture (``"A1"``, ``"A9.cell"``, ...)."""
    base = name[:-5] if name.endswith(".cell") else name
    if base not in FIXTURE_NAMES:
        raise FileNotFoundError(f"no packaged fixture named {name!r}")
    return Path(str(resources.files("asymhecke") / "data" / f"{base}.cell"))


def load_fixture(name_or_path: str | Path) -> CellFixture:
    """Load a fixture by file path, falling back to the packaged copy by basename."""
    path = Path(name_or_path)
    if not path.exists():
        path = packaged_fixture_path(path.name)
    return parse_fixture(path.read_text(), source=str(path))


def reconstruct_matrices(f: CellFixture) -> list[list[list[int]]]:
    """All ``M_1 .. M_n`` (as a 0-based list)."""
    bindings = {f"M{j}": m for j, m in f.matrices.items()}
    bindings[f"M{f.identity + 1}"] = identity_matrix(f.n)
    out = {}
    for j, (text, tree) in f.relations.items():
        missing = atoms(tree) - bindings.keys()
        if missing:
            raise FixtureError(f"relation for M{j} references undefined {', '.join(sorted(missing))}",
                               None, f.source)
        out[j] = eval_expr(tree, bindings, f.n)
    for name, m in bindings.items():
        out[int(name[1:])] = [list(r) for r in m]
    return [out[j] for j in range(1, f.n + 1)]


def fixture_tensor(f: CellFixture, check: bool = True) -> GammaTensor:
    """``G[j, y, z] = M_j[y][z]``; the a-value is left unknown."""
    t = GammaTensor(np.array(reconstruct_matrices(f), dtype=np.int64), f.identity, None, list(f.words))
    if check:
        check_tensor(t)
    return t


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str = ""

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}" + (f": {self.detail}" if self.detail else "")


@dataclass
class FixtureReport:
    fixture: str
    checks: list[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name: str, passed: bool, detail: str = "") -> None:
        self.checks.append(CheckResult(name, bool(passed), detail))

    def lines(self) -> list[str]:
        return [f"[{self.fixture}] {c.line()}" for c in self.checks]


def _anti_automorphism_failures(g: CoxeterGroup, f: CellFixture, t: GammaTensor) -> tuple[int, int]:
    """Count checked and failing entries of ``G(x,y,z) = G(y^-1, x^-1, z^-1)``."""
    elems = [g.parse_word(w) for w in f.words]
    pos = {e: i for i, e in enumerate(elems)}
    inv = [pos.get(int(g.inverse[e])) for e in elems]
    if any(v is None for v in inv):
        return 0, 0
    perm = np.array(inv)
    H = t.G[np.ix_(perm, perm, perm)].transpose(1, 0, 2)
    return t.n ** 3, int((H != t.G).sum())


def verify_fixture(f: CellFixture, group: CoxeterGroup | None = None) -> FixtureReport:
    """Run every check on a parsed fixture; failures become report entries."""
    rep = FixtureReport(f.name)
    try:
        mats = reconstruct_matrices(f)
    except (FixtureError, KeyError, ValueError) as exc:
        rep.add("reconstruction", False, str(exc))
        return rep
    rep.add("reconstruction", True, f"{f.n} matrices")
    t = GammaTensor(np.array(mats, dtype=np.int64), f.identity, None, list(f.words))

    problems = check_tensor(t, raise_on_failure=False)
    rep.add("tensor invariants", not problems, "; ".join(problems) or "associativity, identity, nonnegativity, inverse pairing")

    bad = []
    for j in range(1, f.n + 1):
        text = f.charpolys.get(j)
        if text is None:
            bad.append(f"M{j}: no table entry")
        elif char_poly(mats[j - 1]) != expand_factored_poly(text):
            bad.append(f"M{j}")
    rep.add("characteristic polynomials", not bad,
            f"{f.n - len(bad)}/{f.n} match" + (f"; mismatched {', '.join(bad)}" if bad else ""))

    if problems:
        rep.add("subrings", False, "skipped: invalid tensor")
        rep.add("automorphisms", False, "skipped: invalid tensor")
    else:
        found = set(enumerate_unital_subrings(t).subsets)
        want = set(f.subrings)
        ok = found == want
        detail = f"{len(found)} closed subsets"
        if not ok:
            extra = sorted(sorted(i + 1 for i in s) for s in found - want)
            miss = sorted(sorted(i + 1 for i in s) for s in want - found)
            detail += f"; unexpected {extra}; missing {miss}"
        rep.add("subrings", ok, detail)
        autos = find_permutation_isomorphisms(t, t)
        rep.add("automorphisms", autos == [tuple(range(f.n))], f"{len(autos)} found")
        bad_cyc = cyclic_symmetry_failures(t)
        rep.add("cyclic symmetry", bad_cyc == 0, f"{bad_cyc} entries differ")

    if f.derived_dim is not None:
        d = derived_algebra_dimension(t)
        rep.add("derived algebra dimension", d == f.derived_dim, f"{d} (expected {f.derived_dim})")
    if f.center_dim is not None:
        c = center_dimension(t)
        rep.add("center dimension", c == f.center_dim, f"{c} (expected {f.center_dim})")
    _, nondeg = trace_form_gram(t)
    rep.add("trace form nondegenerate", nondeg)

    try:
        if group is None:
            group = CoxeterGroup(f.descriptor())
        elems = [group.parse_word(w) for w in f.words]
    except (WordError, ValueError) as exc:
        rep.add("words", False, str(exc))
        return rep
    lengths_ok = all(group.length(e) == len(w) for e, w in zip(elems, f.words))
    even = all(len(w) % 2 == 0 for w in f.words)
    distinct = len(set(elems)) == f.n
    rep.add("words", lengths_ok and even and distinct,
            "reduced, even length, distinct" if lengths_ok and even and distinct else
            f"reduced={lengths_ok} even={even} distinct={distinct}")
    checked, failures = _anti_automorphism_failures(group, f, t)
    rep.add("anti-automorphism symmetry", checked > 0 and failures == 0,
            f"{failures} of {checked} entries differ" if checked else "basis not closed under inversion")
    return rep
