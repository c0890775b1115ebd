"""Analysis of based rings given by structure-constant tensors.

Covers the relation language used to describe the matrices ``M_j``, unital
subring enumeration, permutation isomorphisms, and the linear-algebra
invariants (derived algebra, center, trace form).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .asymptotic import GammaTensor, find_identity
from .exact import determinant, identity_matrix, mat_mul, rational_nullspace_dim, rational_rank

__all__ = [
    "RelationSyntaxError",
    "Num", "Ident", "Mat", "Add", "Neg", "Mul", "Pow",
    "parse_relation",
    "parse_expr",
    "eval_expr",
    "SubringReport",
    "enumerate_unital_subrings",
    "is_closed",
    "find_permutation_isomorphisms",
    "derived_algebra_dimension",
    "center_dimension",
    "trace_form_gram",
]


# ---------------------------------------------------------------------------
# expression trees


@dataclass(frozen=True)
class Num:
    value: int


@dataclass(frozen=True)
class Ident:
    pass


@dataclass(frozen=True)
class Mat:
    index: int

    @property
    def name(self) -> str:
        return f"M{self.index}"


@dataclass(frozen=True)
class Add:
    left: object
    right: object


@dataclass(frozen=True)
class Sub:
    left: object
    right: object


@dataclass(frozen=True)
class Neg:
    operand: object


@dataclass(frozen=True)
class Mul:
    left: object
    right: object


@dataclass(frozen=True)
class Pow:
    base: object
    exponent: int


class RelationSyntaxError(ValueError):
    def __init__(self, msg: str, pos: int):
        super().__init__(f"{msg} at offset {pos}")
        self.pos = pos


_TOKEN = re.compile(r"\s*(?:(?P<mat>M\d+)|(?P<int>\d+)|(?P<id>I)|(?P<op>[-+^=()*·]|\{|\}))")


def _tokenize(text: str):
    pos = 0
    toks = []
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise RelationSyntaxError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        start = m.start(kind)
        toks.append((kind, m.group(kind), start))
        pos = m.end()
    toks.append(("end", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        kind, val, pos = self.take()
        if val != value:
            raise RelationSyntaxError(f"expected {value!r}, found {val or 'end of input'!r}", pos)

    def starts_factor(self) -> bool:
        kind, val, _ = self.peek()
        return kind in ("mat", "int", "id") or val == "("

    def expr(self):
        node = None
        if self.peek()[1] == "-":
            self.take()
            node = Neg(self.term())
        else:
            node = self.term()
        while self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            rhs = self.term()
            node = Add(node, rhs) if op == "+" else Sub(node, rhs)
        return node

    def term(self):
        if not self.starts_factor():
            kind, val, pos = self.peek()
            raise RelationSyntaxError(f"expected a factor, found {val or 'end of input'!r}", pos)
        node = self.factor()
        while True:
            if self.peek()[1] in ("*", "·"):
                self.take()
                node = Mul(node, self.factor())
            elif self.starts_factor():
                node = Mul(node, self.factor())
            else:
                return node

    def factor(self):
        kind, val, pos = self.take()
        if kind == "int":
            node = Num(int(val))
        elif kind == "id":
            node = Ident()
        elif kind == "mat":
            node = Mat(int(val[1:]))
        elif val == "(":
            node = self.expr()
            self.expect(")")
        else:
            raise RelationSyntaxError(f"expected a factor, found {val or 'end of input'!r}", pos)
        while self.peek()[1] == "^":
            self.take()
            braced = self.peek()[1] == "{"
            if braced:
                self.take()
            kind, val, pos = self.take()
            if kind != "int":
                raise RelationSyntaxError("exponent must be a nonnegative integer", pos)
            if braced:
                self.expect("}")
            node = Pow(node, int(val))
        return node


def parse_expr(text: str):
    p = _Parser(text)
    node = p.expr()
    kind, val, pos = p.peek()
    if kind != "end":
        raise RelationSyntaxError(f"unexpected {val!r}", pos)
    return node


def parse_relation(text: str) -> tuple[str, object]:
    """``"M3 = -I + M2^2"`` -> ``("M3", tree)``."""
    p = _Parser(text)
    kind, val, pos = p.take()
    if kind != "mat":
        raise RelationSyntaxError("relation must start with a matrix name", pos)
    p.expect("=")
    node = p.expr()
    kind, rest, pos = p.peek()
    if kind != "end":
        raise RelationSyntaxError(f"unexpected {rest!r}", pos)
    return val, node


def atoms(node) -> set[str]:
    if isinstance(node, Mat):
        return {node.name}
    if isinstance(node, (Num, Ident)):
        return set()
    if isinstance(node, (Neg,)):
        return atoms(node.operand)
    if isinstance(node, Pow):
        return atoms(node.base)
    return atoms(node.left) | atoms(node.right)


def _scalar(c: int, n: int):
    return [[c if i == j else 0 for j in range(n)] for i in range(n)]


def eval_expr(node, bindings: Mapping[str, Sequence[Sequence[int]]], n: int | None = None) -> list[list[int]]:
    """Evaluate a relation tree to an exact integer matrix.

    Integer literals and ``I`` are scalar matrices; ``n`` defaults to the
    size of the bound matrices.
    """
    if n is None:
        sizes = {len(m) for m in bindings.values()}
        if len(sizes) > 1:
            raise ValueError(f"bound matrices have different sizes {sorted(sizes)}")
        if not sizes:
            raise ValueError("matrix size unknown: pass n or bind a matrix")
        n = sizes.pop()

    def ev(nd):
        if isinstance(nd, Num):
            return _scalar(nd.value, n)
        if isinstance(nd, Ident):
            return identity_matrix(n)
        if isinstance(nd, Mat):
            if nd.name not in bindings:
                raise KeyError(f"unbound matrix {nd.name}")
            m = [list(map(int, r)) for r in bindings[nd.name]]
            if len(m) != n or any(len(r) != n for r in m):
                raise ValueError(f"{nd.name} is not {n}x{n}")
            return m
        if isinstance(nd, Neg):
            return [[-x for x in r] for r in ev(nd.operand)]
        if isinstance(nd, Add):
            a, b = ev(nd.left), ev(nd.right)
            return [[x + y for x, y in zip(r, s)] for r, s in zip(a, b)]
        if isinstance(nd, Sub):
            a, b = ev(nd.left), ev(nd.right)
            return [[x - y for x, y in zip(r, s)] for r, s in zip(a, b)]
        if isinstance(nd, Mul):
            return mat_mul(ev(nd.left), ev(nd.right))
        if isinstance(nd, Pow):
            base = ev(nd.base)
            out = identity_matrix(n)
            for _ in range(nd.exponent):
                out = mat_mul(out, base)
            return out
        raise TypeError(f"not an expression node: {nd!r}")

    return ev(node)


# ---------------------------------------------------------------------------
# subrings


def _pair_supports(G: np.ndarray) -> list[list[int]]:
    n = G.shape[0]
    nz = G != 0
    weights = 1 << np.arange(n, dtype=object)
    return [[int(np.dot(nz[i, j].astype(object), weights)) for j in range(n)] for i in range(n)]


def is_closed(G: np.ndarray, subset: Sequence[int]) -> bool:
    """Direct check that ``t_i t_j`` stays in the span of ``subset``."""
    members = set(subset)
    for i in members:
        for j in members:
            if any(G[i, j, k] and k not in members for k in range(G.shape[0])):
                return False
    return True


@dataclass
class SubringReport:
    identity_index: int
    subsets: list[frozenset[int]]
    # subsets closed under products whose own idempotent identity is not t_e
    other_unital: list[frozenset[int]] = field(default_factory=list)

    def as_one_based(self) -> list[list[int]]:
        return [sorted(i + 1 for i in s) for s in self.subsets]


def enumerate_unital_subrings(t: GammaTensor, with_secondary: bool = False) -> SubringReport:
    """Every basis subset ``X`` containing the identity whose span is product-closed.

    Exhaustive over all ``2^(n-1)`` candidates.  The union of pair supports
    ``U(X)`` is built for every subset at once by doubling over bits
    (``U(X + b) = U(X) | S_b(X + b)``), and ``X`` is closed iff ``U(X)`` is
    inside ``X``.
    """
    G = t.G
    n = t.n
    e = t.identity_index
    if e is None:
        found = find_identity(G)
        if len(found) != 1:
            raise ValueError("tensor has no unique identity")
        e = found[0]
    if n > 31:
        raise ValueError("subset enumeration is limited to n <= 31")
    others = [i for i in range(n) if i != e]
    m = len(others)
    supp = _pair_supports(G)
    # re-index supports onto the bits of `others`; the identity bit is always present
    remap = {orig: b for b, orig in enumerate(others)}

    def to_bits(mask: int) -> int:
        out = 0
        for orig, b in remap.items():
            if mask >> orig & 1:
                out |= 1 << b
        return out

    pair = [[to_bits(supp[i][j] | supp[j][i]) for j in others] for i in others]
    U = np.zeros(1 << m, dtype=np.int64)
    for b in range(m):
        size = 1 << b
        S = np.zeros(1, dtype=np.int64)
        for j in range(b):
            S = np.concatenate([S, S | pair[b][j]])
        U[size:2 * size] = U[:size] | S | pair[b][b]
    X = np.arange(1 << m, dtype=np.int64)
    closed = np.flatnonzero((U & ~X) == 0)
    subsets = []
    for mask in closed.tolist():
        subsets.append(frozenset([e] + [others[b] for b in range(m) if mask >> b & 1]))
    subsets.sort(key=lambda s: (len(s), sorted(s)))
    report = SubringReport(e, subsets)
    if with_secondary:
        report.other_unital = _other_unital(G, e)
    return report


def _other_unital(G: np.ndarray, e: int, limit: int = 16) -> list[frozenset[int]]:
    """Closed subsets without ``t_e`` that nonetheless contain a unit element.

    Only basis-element units are searched (``t_i`` idempotent acting as
    identity on the subset); bounded by ``n <= limit`` to stay cheap.
    """
    n = G.shape[0]
    if n > limit:
        return []
    out = []
    others = [i for i in range(n) if i != e]
    for mask in range(1, 1 << len(others)):
        X = [others[b] for b in range(len(others)) if mask >> b & 1]
        if not is_closed(G, X):
            continue
        for u in X:
            if all(G[u, j, k] == (j == k) and G[j, u, k] == (j == k) for j in X for k in X):
                out.append(frozenset(X))
                break
    return out


# ---------------------------------------------------------------------------
# permutation isomorphisms


def _signatures(G: np.ndarray, ident: int | None) -> list[tuple]:
    n = G.shape[0]
    sigs = []
    for i in range(n):
        sigs.append((
            i == ident,
            int(G[i, i, i]),
            tuple(sorted(G[i].sum(axis=1).tolist())),
            tuple(sorted(G[i].sum(axis=0).tolist())),
            tuple(sorted(G[:, i, :].sum(axis=1).tolist())),
            tuple(sorted(G[:, :, i].sum(axis=0).tolist())),
            int(G[i].sum()),
            int(G[:, :, i].sum()),
            int(np.trace(G[i])),
            i == _partner(G, ident, i),
        ))
    return sigs


def _partner(G: np.ndarray, ident: int | None, i: int) -> int | None:
    if ident is None:
        return None
    nz = np.flatnonzero(G[i, :, ident])
    return int(nz[0]) if len(nz) == 1 else None


def find_permutation_isomorphisms(t1: GammaTensor, t2: GammaTensor, limit: int | None = None) -> list[tuple[int, ...]]:
    """All bijections ``p`` with ``G1[i, j, k] == G2[p i, p j, p k]``.

    Backtracking: indices are assigned in order of fewest candidates, the
    candidates are restricted by per-index invariant signatures, and each
    new assignment is checked against every triple among the assigned set.
    """
    G1, G2 = t1.G, t2.G
    n = t1.n
    if t2.n != n:
        return []
    if n > 64:
        raise ValueError("isomorphism search is limited to n <= 64")
    id1 = find_identity(G1)
    id2 = find_identity(G2)
    e1 = id1[0] if len(id1) == 1 else None
    e2 = id2[0] if len(id2) == 1 else None
    s1, s2 = _signatures(G1, e1), _signatures(G2, e2)
    if sorted(s1) != sorted(s2):
        return []
    cands = [[j for j in range(n) if s2[j] == s1[i]] for i in range(n)]
    order = sorted(range(n), key=lambda i: (len(cands[i]), i))
    pi = [-1] * n
    used = [False] * n
    results: list[tuple[int, ...]] = []
    assigned: list[int] = []

    def consistent(a: int) -> bool:
        b = pi[a]
        idx1 = np.array(assigned + [a])
        idx2 = np.array([pi[x] for x in idx1])
        # all triples involving a among assigned indices
        if (G1[a][np.ix_(idx1, idx1)] != G2[b][np.ix_(idx2, idx2)]).any():
            return False
        if (G1[np.ix_(idx1, [a], idx1)][:, 0, :] != G2[np.ix_(idx2, [b], idx2)][:, 0, :]).any():
            return False
        if (G1[np.ix_(idx1, idx1, [a])][:, :, 0] != G2[np.ix_(idx2, idx2, [b])][:, :, 0]).any():
            return False
        return True

    def search(depth: int):
        if limit is not None and len(results) >= limit:
            return
        if depth == n:
            results.append(tuple(pi))
            return
        a = order[depth]
        for b in cands[a]:
            if used[b]:
                continue
            pi[a] = b
            used[b] = True
            if consistent(a):
                assigned.append(a)
                search(depth + 1)
                assigned.pop()
            used[b] = False
            pi[a] = -1

    search(0)
    results.sort()
    return results


# ---------------------------------------------------------------------------
# linear invariants


def derived_algebra_dimension(t: GammaTensor) -> int:
    """Rank over Q of the commutators ``t_i t_j - t_j t_i``."""
    G = t.G
    comm = G - G.transpose(1, 0, 2)
    rows = comm.reshape(-1, t.n).tolist()
    return rational_rank(rows)


def center_dimension(t: GammaTensor) -> int:
    """Nullity of ``sum_i c_i (G[i, j, k] - G[j, i, k]) = 0`` over all ``j, k``."""
    G = t.G
    comm = G - G.transpose(1, 0, 2)  # comm[i, j, k]
    # one equation per (j, k), unknowns c_i
    rows = comm.transpose(1, 2, 0).reshape(-1, t.n).tolist()
    return rational_nullspace_dim(rows, width=t.n)


def trace_form_gram(t: GammaTensor) -> tuple[list[list[int]], bool]:
    """Gram matrix of ``(r, s) -> tr(L_r L_s)`` on the basis, and nondegeneracy."""
    G = t.G
    gram = np.einsum("iuz,jzu->ij", G, G).tolist()
    return gram, determinant(gram) != 0
