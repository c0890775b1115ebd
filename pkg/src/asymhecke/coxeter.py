"""Finite Coxeter groups realised through their root systems.

A group is built from a Coxeter matrix.  Positive roots are generated by
closure (a simple reflection permutes the positive roots other than its own
simple root), so no sign test on algebraic numbers is ever needed.  Each
element is stored as the permutation it induces on the roots; length is the
number of positive roots sent negative.

Elements are indexed in ShortLex order of their lexicographically least
reduced words, so index 0 is the identity and every downstream table is
reproducible.
"""

from __future__ import annotations

import hashlib
from fractions import Fraction
from dataclasses import dataclass
from functools import cached_property, reduce
from math import lcm
from typing import Iterable, Sequence

import numpy as np

from .exact import QuadExt, RealCyclotomic

__all__ = [
    "CoxeterError",
    "WordError",
    "CoxeterDescriptor",
    "CoxeterGroup",
    "Element",
    "builtin_descriptor",
    "BUILTIN_NAMES",
    "DEFAULT_CEILING",
]

DEFAULT_CEILING = 20000


class CoxeterError(ValueError):
    """Invalid Coxeter matrix or a presentation that is too large/infinite."""


class WordError(ValueError):
    def __init__(self, msg: str, pos: int):
        super().__init__(f"{msg} at position {pos}")
        self.pos = pos


@dataclass(frozen=True)
class CoxeterDescriptor:
    names: tuple[str, ...]
    matrix: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        n = len(self.names)
        if len(set(self.names)) != n:
            raise CoxeterError("duplicate generator names")
        for name in self.names:
            if len(name) != 1 or not name.isalpha():
                raise CoxeterError(f"generator name {name!r} must be a single letter")
        if len(self.matrix) != n or any(len(r) != n for r in self.matrix):
            raise CoxeterError("Coxeter matrix has the wrong shape")
        for i in range(n):
            if self.matrix[i][i] != 1:
                raise CoxeterError("Coxeter matrix diagonal must be 1")
            for j in range(n):
                if self.matrix[i][j] != self.matrix[j][i]:
                    raise CoxeterError("Coxeter matrix must be symmetric")
                if i != j and self.matrix[i][j] < 2:
                    raise CoxeterError(f"m({self.names[i]},{self.names[j]}) must be >= 2")

    @property
    def rank(self) -> int:
        return len(self.names)

    @classmethod
    def from_bonds(cls, names: Sequence[str], bonds: Iterable[tuple[str, str, int]]) -> CoxeterDescriptor:
        names = tuple(names)
        pos = {s: i for i, s in enumerate(names)}
        m = [[1 if i == j else 2 for j in range(len(names))] for i in range(len(names))]
        for s, t, val in bonds:
            if s not in pos or t not in pos:
                raise CoxeterError(f"bond {s} {t} names an undeclared generator")
            if s == t:
                raise CoxeterError("a generator cannot be bonded to itself")
            m[pos[s]][pos[t]] = m[pos[t]][pos[s]] = int(val)
        return cls(names, tuple(map(tuple, m)))

    @classmethod
    def parse(cls, text: str) -> CoxeterDescriptor:
        """Read the ``rank`` / ``order`` / ``coxeter`` line format."""
        rank = None
        names: list[str] | None = None
        bonds = []
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, *rest = line.split()
            try:
                if key == "rank":
                    rank = int(rest[0])
                elif key == "order":
                    names = rest
                elif key == "coxeter":
                    s, t, m = rest
                    bonds.append((s, t, int(m)))
                else:
                    raise CoxeterError(f"line {lineno}: unknown keyword {key!r}")
            except (IndexError, ValueError) as exc:
                if isinstance(exc, CoxeterError):
                    raise
                raise CoxeterError(f"line {lineno}: malformed {key!r} line") from None
        if names is None:
            raise CoxeterError("descriptor has no 'order' line")
        if rank is not None and rank != len(names):
            raise CoxeterError(f"rank {rank} does not match {len(names)} generators")
        return cls.from_bonds(names, bonds)

    def canonical_text(self) -> str:
        lines = [f"rank {self.rank}", "order " + " ".join(self.names)]
        for i in range(self.rank):
            for j in range(i + 1, self.rank):
                if self.matrix[i][j] != 2:
                    lines.append(f"coxeter {self.names[i]} {self.names[j]} {self.matrix[i][j]}")
        return "\n".join(lines) + "\n"

    def digest(self) -> str:
        return hashlib.sha256(self.canonical_text().encode()).hexdigest()


_LETTERS = "abcdefgh"


def _chain(kind_bonds: Sequence[int]) -> CoxeterDescriptor:
    names = _LETTERS[: len(kind_bonds) + 1]
    return CoxeterDescriptor.from_bonds(
        names, [(names[i], names[i + 1], m) for i, m in enumerate(kind_bonds)])


def builtin_descriptor(name: str) -> CoxeterDescriptor:
    """``A1``..``A4``, ``B3``, ``H3``, ``H4`` or ``I2_m`` (2 <= m <= 12)."""
    key = name.strip().upper()
    if key.startswith("I2_") or key.startswith("I2("):
        m = int(key[3:].rstrip(")"))
        if not 2 <= m <= 12:
            raise CoxeterError("built-in dihedral types need 2 <= m <= 12")
        return CoxeterDescriptor.from_bonds("st", [("s", "t", m)])
    table = {
        "A1": [], "A2": [3], "A3": [3, 3], "A4": [3, 3, 3],
        "B3": [4, 3],
        # same bond layout as a,b,c,d in H4 (a-b, b-c, c-d = 3, 3, 5)
        "H3": [3, 5],
        "H4": [3, 3, 5],
    }
    if key not in table:
        raise CoxeterError(f"unknown built-in type {name!r}")
    if key == "A1":
        return CoxeterDescriptor(("a",), ((1,),))
    return _chain(table[key])


BUILTIN_NAMES = ("A1", "A2", "A3", "A4", "B3", "H3", "H4") + tuple(f"I2_{m}" for m in range(2, 13))


def _has_cycle(matrix) -> bool:
    n = len(matrix)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if matrix[i][j] > 2:
                a, b = find(i), find(j)
                if a == b:
                    return True
                parent[a] = b
    return False


def _cartan_matrix(matrix):
    """Cartan entries ``a[i][j]`` with ``s_i(alpha_j) = alpha_j - a[i][j] alpha_i``.

    Bonds 2..6 stay in Q(sqrt 5) (integers for 3, 4, 6 and the golden ratio
    for 5); any other bond switches the whole matrix to Z[2cos(2 pi / N)].
    """
    n = len(matrix)
    bonds = {matrix[i][j] for i in range(n) for j in range(n) if i != j}
    if bonds <= {2, 3, 4, 5, 6}:
        phi = QuadExt(Fraction(1, 2), Fraction(1, 2))
        one = QuadExt(1)
        a = [[QuadExt(2) if i == j else QuadExt(0) for j in range(n)] for i in range(n)]
        for i in range(n):
            for j in range(i + 1, n):
                m = matrix[i][j]
                if m == 3:
                    a[i][j] = a[j][i] = -one
                elif m == 4:
                    a[i][j], a[j][i] = -one, QuadExt(-2)
                elif m == 6:
                    a[i][j], a[j][i] = -one, QuadExt(-3)
                elif m == 5:
                    a[i][j] = a[j][i] = -phi
        return a
    big = reduce(lcm, (2 * m for m in bonds), 1)
    a = [[RealCyclotomic(big, [2 if i == j else 0]) for j in range(n)] for i in range(n)]
    for i in range(n):
        for j in range(n):
            if i != j and matrix[i][j] != 2:
                # 2cos(pi/m) = 2cos(2 pi k / big) with k = big / (2m)
                a[i][j] = -RealCyclotomic.two_cos(big, big // (2 * matrix[i][j]))
    return a



class CoxeterGroup:
    """All elements of a finite Coxeter group with their basic data.

    Elements are integer indices; ``Element`` wraps an index with its group
    for a friendlier interface.
    """

    def __init__(self, descriptor: CoxeterDescriptor, ceiling: int = DEFAULT_CEILING):
        self.descriptor = descriptor
        self.names = descriptor.names
        self.rank = descriptor.rank
        self.ceiling = ceiling
        if _has_cycle(descriptor.matrix):
            raise CoxeterError("Coxeter graph contains a cycle; the group is infinite")
        self._build_roots()
        self._enumerate()

    @classmethod
    def builtin(cls, name: str, ceiling: int = DEFAULT_CEILING) -> CoxeterGroup:
        return cls(builtin_descriptor(name), ceiling)

    # -- roots ---------------------------------------------------------------
    def _build_roots(self):
        n = self.rank
        cart = _cartan_matrix(self.descriptor.matrix)
        zero, one = cart[0][0] * 0, cart[0][0] * 0 + 1
        simple = [tuple(one if k == i else zero for k in range(n)) for i in range(n)]

        def reflect(i, root):
            c = sum((cart[i][j] * root[j] for j in range(n)), zero)
            return tuple(x - c if k == i else x for k, x in enumerate(root))

        pos_index = {r: k for k, r in enumerate(simple)}
        roots = list(simple)
        k = 0
        # distinct reflections are distinct elements, so #roots < ceiling
        root_ceiling = self.ceiling
        while k < len(roots):
            r = roots[k]
            for i in range(n):
                if r == simple[i]:
                    continue
                img = reflect(i, r)
                if img not in pos_index:
                    pos_index[img] = len(roots)
                    roots.append(img)
                    if len(roots) > root_ceiling:
                        raise CoxeterError(
                            f"group exceeds element ceiling {self.ceiling} (root system too large)")
            k += 1
        npos = len(roots)
        self.n_pos_roots = npos
        self._roots = roots
        # simple reflection s_i as a permutation of 2*npos roots (negatives at k + npos)
        perms = []
        for i in range(n):
            p = [0] * (2 * npos)
            for k, r in enumerate(roots):
                if k == i:
                    p[k], p[k + npos] = i + npos, i
                else:
                    j = pos_index[reflect(i, r)]
                    p[k], p[k + npos] = j, j + npos
            perms.append(np.asarray(p, dtype=np.int32))
        self._root_perms = perms

    # -- enumeration ---------------------------------------------------------
    def _enumerate(self):
        n, npos = self.rank, self.n_pos_roots
        perms = self._root_perms
        ident = np.arange(2 * npos, dtype=np.int32)
        simple_idx = np.arange(n)

        def key(p):
            return p[simple_idx].tobytes()

        elements = [ident]
        lengths = [0]
        words = [""]
        lookup = {key(ident): 0}
        frontier = [0]
        length = 0
        while frontier:
            length += 1
            nxt = []
            # ShortLex: the least reduced word of s*u starts with s iff s is the
            # least left descent of s*u; generating by (s, nf(u)) keeps lex order
            for i in range(n):
                for u in frontier:
                    p = perms[i][elements[u]]
                    k = key(p)
                    if k in lookup:
                        continue
                    # s*u is longer than u iff u^{-1}(alpha_s) > 0, i.e. new here
                    negs = p[:npos] >= npos
                    ln = int(negs.sum())
                    if ln != length:
                        continue
                    # least left descent of s*u: min j with (s u)^{-1}(alpha_j) < 0
                    inv = np.empty_like(p)
                    inv[p] = ident
                    left = next(j for j in range(n) if inv[j] >= npos)
                    if left != i:
                        continue
                    lookup[k] = len(elements)
                    elements.append(p)
                    lengths.append(length)
                    words.append(self.names[i] + words[u])
                    nxt.append(len(elements) - 1)
                    if len(elements) > self.ceiling:
                        raise CoxeterError(f"group exceeds element ceiling {self.ceiling}")
            frontier = nxt
        self.order = len(elements)
        self._perms = np.stack(elements)
        self.lengths = np.asarray(lengths, dtype=np.int64)
        self.words = words
        self._lookup = lookup
        self._key = key

        N = self.order
        lmul = np.empty((n, N), dtype=np.int64)
        rmul = np.empty((n, N), dtype=np.int64)
        inverse = np.empty(N, dtype=np.int64)
        ldesc = np.zeros(N, dtype=np.int64)
        rdesc = np.zeros(N, dtype=np.int64)
        for w in range(N):
            p = self._perms[w]
            for i in range(n):
                lmul[i, w] = lookup[key(perms[i][p])]
                rmul[i, w] = lookup[key(p[perms[i]])]
                if p[i] >= npos:
                    rdesc[w] |= 1 << i
            inv = np.empty_like(p)
            inv[p] = ident
            inverse[w] = lookup[key(inv)]
        for w in range(N):
            ldesc[w] = rdesc[inverse[w]]
        self.lmul, self.rmul, self.inverse = lmul, rmul, inverse
        self.left_descent_mask, self.right_descent_mask = ldesc, rdesc
        self.w0 = int(np.argmax(self.lengths))
        self.longest_length = int(self.lengths[self.w0])

    # -- basic queries -------------------------------------------------------
    def __len__(self):
        return self.order

    def __repr__(self):
        return f"CoxeterGroup(order={self.order}, names={''.join(self.names)})"

    def generator(self, name: str) -> int:
        return int(self.lmul[self.names.index(name), 0])

    def length(self, w: int) -> int:
        return int(self.lengths[w])

    def sign(self, w: int) -> int:
        return -1 if self.lengths[w] & 1 else 1

    def descents_left(self, w: int) -> frozenset[str]:
        m = int(self.left_descent_mask[w])
        return frozenset(s for i, s in enumerate(self.names) if m >> i & 1)

    def descents_right(self, w: int) -> frozenset[str]:
        m = int(self.right_descent_mask[w])
        return frozenset(s for i, s in enumerate(self.names) if m >> i & 1)

    def word(self, w: int) -> str:
        return self.words[w]

    def multiply(self, x: int, y: int) -> int:
        for ch in reversed(self.words[x]):
            y = int(self.lmul[self.names.index(ch), y])
        return y

    def left_translation(self, x: int) -> np.ndarray:
        """Array whose entry ``w`` is the index of ``x * w``."""
        arr = np.arange(self.order)
        for ch in reversed(self.words[x]):
            arr = self.lmul[self.names.index(ch)][arr]
        return arr

    @cached_property
    def w0_times(self) -> np.ndarray:
        return self.left_translation(self.w0)

    def parse_word(self, word: str) -> int:
        w = 0
        idx = {s: i for i, s in enumerate(self.names)}
        for pos, ch in enumerate(word):
            if ch not in idx:
                raise WordError(f"unknown generator {ch!r}", pos)
            w = int(self.rmul[idx[ch], w])
        return w

    def element(self, w: int | str) -> Element:
        if isinstance(w, str):
            w = self.parse_word(w)
        return Element(self, int(w))

    def length_distribution(self) -> list[int]:
        return np.bincount(self.lengths, minlength=self.longest_length + 1).tolist()

    # -- Bruhat order ----------------------------------------------------------
    @cached_property
    def bruhat_matrix(self) -> np.ndarray:
        """``B[w, x]`` is True iff ``x <= w``.

        Built with the descent rule: if ``sw < w`` then the lower interval of
        ``w`` is that of ``sw`` together with its left translate by ``s``.
        """
        N = self.order
        B = np.zeros((N, N), dtype=bool)
        B[0, 0] = True
        for w in range(1, N):
            i = (int(self.left_descent_mask[w]) & -int(self.left_descent_mask[w])).bit_length() - 1
            v = int(self.lmul[i, w])
            B[w] = B[v] | B[v][self.lmul[i]]
        return B

    def bruhat_leq(self, x: int, w: int) -> bool:
        return bool(self.bruhat_matrix[w, x])

    def bruhat_leq_recursive(self, x: int, w: int) -> bool:
        """Bruhat comparison straight from the descent rule, without tables."""
        while True:
            if self.lengths[x] > self.lengths[w]:
                return False
            if w == 0:
                return x == 0
            m = int(self.left_descent_mask[w])
            i = (m & -m).bit_length() - 1
            sw = int(self.lmul[i, w])
            if self.left_descent_mask[x] >> i & 1:
                x = int(self.lmul[i, x])
            w = sw

    def least_left_descent(self, w: int) -> int:
        m = int(self.left_descent_mask[w])
        if not m:
            raise ValueError("identity has no descents")
        return (m & -m).bit_length() - 1


class Element:
    """An element of a specific :class:`CoxeterGroup`."""

    __slots__ = ("group", "index")

    def __init__(self, group: CoxeterGroup, index: int):
        self.group = group
        self.index = index

    def _same(self, other: Element):
        if not isinstance(other, Element) or other.group is not self.group:
            raise ValueError("elements belong to different groups")

    def __mul__(self, other: Element) -> Element:
        self._same(other)
        return Element(self.group, self.group.multiply(self.index, other.index))

    def inverse(self) -> Element:
        return Element(self.group, int(self.group.inverse[self.index]))

    @property
    def length(self) -> int:
        return self.group.length(self.index)

    @property
    def sign(self) -> int:
        return self.group.sign(self.index)

    @property
    def word(self) -> str:
        return self.group.word(self.index)

    def descents_left(self):
        return self.group.descents_left(self.index)

    def descents_right(self):
        return self.group.descents_right(self.index)

    def __le__(self, other: Element) -> bool:
        self._same(other)
        return self.group.bruhat_leq(self.index, other.index)

    def __eq__(self, other):
        return isinstance(other, Element) and other.group is self.group and other.index == self.index

    def __hash__(self):
        return hash((id(self.group), self.index))

    def __repr__(self):
        return f"Element({self.word or 'e'})"
