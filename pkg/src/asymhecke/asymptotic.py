"""Structure constants of the asymptotic Hecke algebra on a left cell.

For ``x, y, z`` in ``G = Gamma ∩ Gamma^-1`` the sum

    L(x, y, z) = sum_w  e_z e_w P[w0 w, w0 z](v^2) F[x, y, w]

equals ``v^(l(x) + l(y) - l(z))`` times the coefficient of ``c_z`` in
``T_x T_y``, so its top term is ``gamma(x, y, z^-1) v^(a + l(x) + l(y) - l(z))``.
The ``a``-value of the cell is the largest ``deg L - (l(x) + l(y) - l(z))``
over all triples, and the structure constants are the coefficients at that
predicted exponent.  All degrees are in powers of ``v``.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .cells import DistinguishedInvolutionError, intersection_with_inverse
from .coxeter import CoxeterGroup
from .exact import LaurentPoly
from .hecke import KLTable, t_multiply_raw

__all__ = [
    "GammaTensor",
    "CellRing",
    "TensorInvariantError",
    "GammaFormatError",
    "lhs_polynomial",
    "delta_and_mu",
    "gamma_tensor",
    "cell_ring",
    "left_mult_matrix",
    "tensor_from_matrices",
    "check_tensor",
    "inverse_pairing",
    "cyclic_symmetry_failures",
    "find_identity",
    "distinguished_involution",
    "small_cell_summary",
    "write_gamma",
    "read_gamma",
    "format_gamma",
]


class TensorInvariantError(ArithmeticError):
    """A structure-constant tensor fails associativity, identity, ... checks."""


class GammaFormatError(ValueError):
    pass


@dataclass
class GammaTensor:
    """Structure constants ``G[i, j, k]``: coefficient of ``t_k`` in ``t_i t_j``.

    ``a_value`` is ``None`` when unknown (tensors built from published
    matrices).  ``identity_index`` is 0-based.
    """

    G: np.ndarray
    identity_index: int | None = None
    a_value: int | None = None
    words: list[str] | None = None

    def __post_init__(self):
        self.G = np.asarray(self.G, dtype=np.int64)
        if self.G.ndim != 3 or len(set(self.G.shape)) != 1:
            raise ValueError("structure constants must form an n x n x n array")

    @property
    def n(self) -> int:
        return self.G.shape[0]

    def product(self, a: Sequence[int], b: Sequence[int]) -> np.ndarray:
        """Multiply two coordinate vectors."""
        return np.einsum("i,j,ijk->k", np.asarray(a), np.asarray(b), self.G)

    def relabel(self, perm: Sequence[int]) -> GammaTensor:
        """Tensor ``H`` with ``H[p i, p j, p k] = G[i, j, k]``."""
        perm = np.asarray(perm)
        inv = np.empty_like(perm)
        inv[perm] = np.arange(len(perm))
        H = self.G[np.ix_(inv, inv, inv)]
        words = None
        if self.words is not None:
            words = [self.words[i] for i in inv]
        ident = None if self.identity_index is None else int(perm[self.identity_index])
        return GammaTensor(H, ident, self.a_value, words)

    def __eq__(self, other):
        return (isinstance(other, GammaTensor) and self.n == other.n
                and np.array_equal(self.G, other.G)
                and self.identity_index == other.identity_index)


@dataclass
class CellRing:
    """``J(Gamma)`` with its back-references into the group."""

    tensor: GammaTensor
    group: CoxeterGroup
    cell: list[int]
    basis: list[int]
    degrees: dict[tuple[int, int, int], int] = field(default_factory=dict)

    @property
    def a_value(self) -> int:
        return self.tensor.a_value

    @property
    def distinguished(self) -> int:
        return self.basis[self.tensor.identity_index]


# ---------------------------------------------------------------------------


def _lhs_raw(g: CoxeterGroup, kl: KLTable, x: int, y: int, z: int,
             product: dict[int, dict[int, int]]) -> dict[int, int]:
    B = g.bruhat_matrix
    w0t = g.w0_times
    lengths = g.lengths
    base = int(lengths[x] + lengths[y])
    w0z = int(w0t[z])
    sz = int(lengths[z]) & 1
    acc: dict[int, int] = {}
    for w, f in product.items():
        if not B[w, z]:
            continue
        P = kl.P(int(w0t[w]), w0z)
        if not P:
            continue
        lw = int(lengths[w])
        sign = -1 if (sz ^ (lw & 1)) else 1
        shift = base - lw
        for k, pc in enumerate(P):
            if not pc:
                continue
            e0 = 2 * k + shift
            m = sign * pc
            for e, c in f.items():
                acc[e0 + e] = acc.get(e0 + e, 0) + m * c
    return {e: c for e, c in acc.items() if c}


def lhs_polynomial(g: CoxeterGroup, kl: KLTable, x: int, y: int, z: int,
                   product: dict[int, dict[int, int]] | None = None) -> LaurentPoly:
    """``sum_w e_z e_w P[w0 w, w0 z] F[x, y, w]`` as a Laurent polynomial in ``v``.

    Only ``w`` in the support of ``T_x T_y`` with ``z <= w`` contribute.
    """
    if product is None:
        product = t_multiply_raw(g, x, y)
    return LaurentPoly(_lhs_raw(g, kl, x, y, z, product))


def delta_and_mu(g: CoxeterGroup, kl: KLTable, basis: Sequence[int]):
    """Degrees of the left-hand sums over ``basis^3`` and the resulting a-value.

    Returns ``(degrees, mu, sums)`` where ``degrees[(x, y, z)]`` is the
    v-degree (absent for zero sums) and ``sums`` keeps the polynomials.
    """
    lengths = g.lengths
    degrees: dict[tuple[int, int, int], int] = {}
    sums: dict[tuple[int, int, int], dict[int, int]] = {}
    best = None
    for x in basis:
        for y in basis:
            prod = t_multiply_raw(g, x, y)
            for z in basis:
                s = _lhs_raw(g, kl, x, y, z, prod)
                if not s:
                    continue
                d = max(s)
                degrees[(x, y, z)] = d
                sums[(x, y, z)] = s
                val = d - int(lengths[x] + lengths[y] - lengths[z])
                if best is None or val > best:
                    best = val
    if best is None:
        raise ValueError("every left-hand sum vanishes; not a left cell intersection")
    return degrees, best, sums


def find_identity(G: np.ndarray) -> list[int]:
    """All indices ``e`` with ``t_e t_j = t_j t_e = t_j`` for every ``j``."""
    n = G.shape[0]
    eye = np.eye(n, dtype=G.dtype)
    return [e for e in range(n) if np.array_equal(G[e], eye) and np.array_equal(G[:, e, :], eye)]


def distinguished_involution(g: CoxeterGroup, kl: KLTable, basis: Sequence[int],
                             G: np.ndarray, a_value: int | None = None) -> int:
    """Element of ``basis`` whose ``t`` is the identity of ``J(Gamma)``.

    When ``a_value`` is given the answer is cross-checked against
    ``a = l(d) - 2 deg P[e, d]``.
    """
    found = find_identity(G)
    if not found:
        raise DistinguishedInvolutionError("no identity found in J(Gamma)")
    if len(found) > 1:
        raise DistinguishedInvolutionError("identity not unique in J(Gamma)")
    d = basis[found[0]]
    if int(g.inverse[d]) != d:
        raise DistinguishedInvolutionError(f"identity element {g.word(d)} is not an involution")
    if a_value is not None:
        deg = len(kl.P(0, d)) - 1
        if g.length(d) - 2 * deg != a_value:
            raise DistinguishedInvolutionError(
                f"l(d) - 2 deg P[e, d] = {g.length(d) - 2 * deg} but a = {a_value}")
    return d


def gamma_tensor(g: CoxeterGroup, kl: KLTable, cell: Sequence[int]) -> CellRing:
    """Structure constants of ``J(Gamma)`` for the left cell ``cell``."""
    basis = intersection_with_inverse(g, cell)
    if not basis:
        raise ValueError("left cell has empty intersection with its inverse")
    degrees, a, sums = delta_and_mu(g, kl, basis)
    lengths = g.lengths
    n = len(basis)
    G = np.zeros((n, n, n), dtype=np.int64)
    for i, x in enumerate(basis):
        for j, y in enumerate(basis):
            for k, z in enumerate(basis):
                s = sums.get((x, y, z))
                if not s:
                    continue
                target = a + int(lengths[x] + lengths[y] - lengths[z])
                top = max(s)
                if top > target:
                    raise TensorInvariantError(
                        f"degree overflow at ({g.word(x)}, {g.word(y)}, {g.word(z)}): "
                        f"v^{top} above predicted v^{target}")
                G[i, j, k] = s.get(target, 0)
    idents = find_identity(G)
    if len(idents) != 1:
        raise TensorInvariantError("identity missing" if not idents else "identity not unique")
    tensor = GammaTensor(G, idents[0], a, [g.word(x) for x in basis])
    check_tensor(tensor)
    distinguished_involution(g, kl, basis, G, a)
    return CellRing(tensor, g, sorted(cell), basis, degrees)


cell_ring = gamma_tensor


def left_mult_matrix(t: GammaTensor, j: int) -> list[list[int]]:
    """``M_j[y][z] = G[j, y, z]``; the transpose of left multiplication by ``t_j``."""
    return t.G[j].tolist()


def tensor_from_matrices(matrices: Sequence[Sequence[Sequence[int]]],
                         identity_index: int | None = None,
                         words: list[str] | None = None, check: bool = True) -> GammaTensor:
    t = GammaTensor(np.array(matrices, dtype=np.int64), identity_index, None, words)
    if check:
        check_tensor(t)
    return t


def check_tensor(t: GammaTensor, nonnegative: bool = True, raise_on_failure: bool = True) -> list[str]:
    """Associativity, identity, nonnegativity and inverse pairing.

    Returns the list of problems; raises :class:`TensorInvariantError` on the
    first one unless ``raise_on_failure`` is false.
    """
    G = t.G
    n = t.n
    problems: list[str] = []
    lhs = np.einsum("ijm,mkl->ijkl", G, G)
    rhs = np.einsum("jkm,iml->ijkl", G, G)
    bad = np.argwhere(lhs != rhs)
    if len(bad):
        i, j, k, l = (int(v) + 1 for v in bad[0])
        problems.append(f"associativity fails at (i,j,k,l)=({i},{j},{k},{l}) (1-based); "
                        f"{len(bad)} failing quadruples")
    e = t.identity_index
    if e is None:
        found = find_identity(G)
        if len(found) != 1:
            problems.append("identity missing" if not found else "identity not unique")
        else:
            e = found[0]
    if e is not None:
        eye = np.eye(n, dtype=G.dtype)
        if not (np.array_equal(G[e], eye) and np.array_equal(G[:, e, :], eye)):
            problems.append(f"index {e + 1} is not a two-sided identity")
    if nonnegative and (G < 0).any():
        i, j, k = (int(v) + 1 for v in np.argwhere(G < 0)[0])
        problems.append(f"negative structure constant at ({i},{j},{k})")
    if e is not None:
        col = G[:, :, e]
        pairing = []
        for i in range(n):
            ones = np.flatnonzero(col[i])
            if len(ones) != 1 or col[i, ones[0]] != 1:
                problems.append(f"row {i + 1} has no unique inverse partner")
                break
            pairing.append(int(ones[0]))
        else:
            if any(pairing[p] != i for i, p in enumerate(pairing)):
                problems.append("inverse pairing is not an involution")
    if problems and raise_on_failure:
        raise TensorInvariantError("; ".join(problems))
    return problems


def inverse_pairing(t: GammaTensor) -> list[int]:
    col = t.G[:, :, t.identity_index]
    return [int(np.flatnonzero(col[i])[0]) for i in range(t.n)]


def cyclic_symmetry_failures(t: GammaTensor) -> int:
    """Number of entries violating ``G[i, j, k] == G[j, k*, i*]`` (``*`` = inverse partner)."""
    inv = np.asarray(inverse_pairing(t))
    rotated = t.G[:, inv, :][:, :, inv].transpose(2, 0, 1)
    return int((rotated != t.G).sum())


def small_cell_summary(ring: CellRing | GammaTensor) -> str:
    """Describe ``J(Gamma)`` when ``|Gamma ∩ Gamma^-1| <= 2``."""
    t = ring.tensor if isinstance(ring, CellRing) else ring
    if t.n == 1:
        if t.G[0, 0, 0] != 1:
            return f"Z t_e with t_e^2 = {t.G[0, 0, 0]} t_e"
        return "Z t_e, t_e^2 = t_e"
    if t.n != 2:
        raise ValueError("small_cell_summary needs at most two basis elements")
    e = t.identity_index if t.identity_index is not None else find_identity(t.G)[0]
    s = 1 - e
    ce, cs = int(t.G[s, s, e]), int(t.G[s, s, s])
    if (ce, cs) == (1, 0):
        law = "t_s^2 = t_e"
    elif (ce, cs) == (1, 1):
        law = "t_s^2 = t_e + t_s"
    else:
        law = f"t_s^2 = {ce} t_e + {cs} t_s (other)"
    return f"Z t_e + Z t_s, {law}"


# ---------------------------------------------------------------------------
# file format


def format_gamma(t: GammaTensor) -> str:
    lines = ["gamma v1", f"n {t.n}", f"a {'?' if t.a_value is None else t.a_value}",
             f"identity {'?' if t.identity_index is None else t.identity_index + 1}"]
    if t.words is not None:
        lines.append("words " + " ".join(w or "1" for w in t.words))
    for i, j, k in np.argwhere(t.G != 0):
        lines.append(f"g {i + 1} {j + 1} {k + 1} {t.G[i, j, k]}")
    return "\n".join(lines) + "\n"


def write_gamma(t: GammaTensor, path: str | os.PathLike) -> None:
    with open(path, "w") as fh:
        fh.write(format_gamma(t))


def read_gamma(path_or_text: str | os.PathLike, is_text: bool = False) -> GammaTensor:
    text = path_or_text if is_text else open(path_or_text).read()
    lines = [ln.strip() for ln in text.splitlines()]
    if not lines or lines[0] != "gamma v1":
        raise GammaFormatError("missing 'gamma v1' header")
    n = a = ident = None
    words = None
    entries = []
    for lineno, line in enumerate(lines[1:], 2):
        if not line or line.startswith("#"):
            continue
        key, *rest = line.split()
        try:
            if key == "n":
                n = int(rest[0])
            elif key == "a":
                a = None if rest[0] == "?" else int(rest[0])
            elif key == "identity":
                ident = None if rest[0] == "?" else int(rest[0]) - 1
            elif key == "words":
                words = ["" if w == "1" else w for w in rest]
            elif key == "g":
                i, j, k, val = map(int, rest)
                entries.append((i - 1, j - 1, k - 1, val))
            else:
                raise GammaFormatError(f"line {lineno}: unknown keyword {key!r}")
        except (ValueError, IndexError) as exc:
            if isinstance(exc, GammaFormatError):
                raise
            raise GammaFormatError(f"line {lineno}: malformed {key!r} line") from None
    if n is None:
        raise GammaFormatError("missing 'n' line")
    G = np.zeros((n, n, n), dtype=np.int64)
    for i, j, k, val in entries:
        if not (0 <= i < n and 0 <= j < n and 0 <= k < n):
            raise GammaFormatError(f"entry ({i + 1},{j + 1},{k + 1}) out of range")
        G[i, j, k] = val
    if words is not None and len(words) != n:
        raise GammaFormatError("'words' line has the wrong length")
    return GammaTensor(G, ident, a, words)
