"""Hecke algebra in the standard basis and Kazhdan-Lusztig polynomials.

Conventions: ``v = q^(1/2)``; ``T_s T_w = T_{sw}`` if ``sw > w`` and
``T_{sw} + (v - v^-1) T_w`` otherwise.  ``P[x, w]`` is kept as ascending
integer coefficients in ``q``; the rescaled ``p[x, w] = v^(l(x) - l(w)) P[x, w]``
lives in :class:`~asymhecke.exact.LaurentPoly`.
"""

from __future__ import annotations

import logging
import os
from pathlib import Path
from typing import Iterator

import numpy as np

from .coxeter import CoxeterGroup
from .exact import LaurentPoly

__all__ = [
    "HeckeVector",
    "t_multiply",
    "t_multiply_raw",
    "f_rescaled",
    "KLTable",
    "KLCacheError",
    "compute_kl_table",
    "CACHE_ENV",
]

log = logging.getLogger(__name__)

CACHE_ENV = "ASYMHECKE_CACHE"

QPoly = tuple  # ascending q-coefficients


class HeckeVector(dict):
    """Finite combination ``sum a_w T_w`` as ``{element index: LaurentPoly}``."""

    def __setitem__(self, key, value):
        if value:
            super().__setitem__(key, value)
        elif key in self:
            del self[key]

    @classmethod
    def from_raw(cls, raw: dict[int, dict[int, int]]) -> HeckeVector:
        out = cls()
        for w, terms in raw.items():
            p = LaurentPoly(terms)
            if p:
                dict.__setitem__(out, w, p)
        return out

    def coeff(self, w: int) -> LaurentPoly:
        return self.get(w, LaurentPoly())


def _apply_generator(g: CoxeterGroup, i: int, vec: dict[int, dict[int, int]]) -> dict:
    """Left-multiply ``vec`` (raw sparse form) by ``T_{s_i}``."""
    out: dict[int, dict[int, int]] = {}
    lmul = g.lmul[i]
    mask = 1 << i
    for w, coeffs in vec.items():
        sw = int(lmul[w])
        tgt = out.setdefault(sw, {})
        for k, c in coeffs.items():
            tgt[k] = tgt.get(k, 0) + c
        if g.left_descent_mask[w] & mask:
            tgt = out.setdefault(w, {})
            for k, c in coeffs.items():
                tgt[k + 1] = tgt.get(k + 1, 0) + c
                tgt[k - 1] = tgt.get(k - 1, 0) - c
    cleaned = {}
    for w, coeffs in out.items():
        nz = {k: c for k, c in coeffs.items() if c}
        if nz:
            cleaned[w] = nz
    return cleaned


def t_multiply_raw(g: CoxeterGroup, x: int, y: int) -> dict[int, dict[int, int]]:
    vec = {y: {0: 1}}
    names = g.names
    for ch in reversed(g.words[x]):
        vec = _apply_generator(g, names.index(ch), vec)
    return vec


def t_multiply(g: CoxeterGroup, x: int, y: int) -> HeckeVector:
    """``T_x T_y`` in the standard basis: the coefficients ``f[x, y, z]``."""
    return HeckeVector.from_raw(t_multiply_raw(g, x, y))


def f_rescaled(g: CoxeterGroup, x: int, y: int, z: int, f: LaurentPoly) -> LaurentPoly:
    """``F[x, y, z] = v^(l(x) + l(y) - l(z)) f[x, y, z]``."""
    return f.shift(g.length(x) + g.length(y) - g.length(z))


# ---------------------------------------------------------------------------
# Kazhdan-Lusztig polynomials


def _qadd(a: QPoly, b: QPoly, shift: int = 0, scale: int = 1) -> list[int]:
    out = list(a)
    need = len(b) + shift
    if need > len(out):
        out.extend([0] * (need - len(out)))
    for k, c in enumerate(b):
        out[k + shift] += scale * c
    return out


def _qtrim(a: list[int]) -> QPoly:
    while a and a[-1] == 0:
        a.pop()
    return tuple(a)


class KLCacheError(RuntimeError):
    pass


class KLTable:
    """All ``P[x, w]`` with ``x <= w`` for a finite Coxeter group.

    Rows are stored per ``w`` as ``{x: coefficients}``; pairs with ``x`` not
    below ``w`` are implicit zeros.
    """

    def __init__(self, group: CoxeterGroup, rows: list[dict[int, QPoly]]):
        self.group = group
        self._rows = rows
        self._mu_rows: list[dict[int, int]] | None = None

    # -- access ----------------------------------------------------------------
    def P(self, x: int, w: int) -> QPoly:
        return self._rows[w].get(x, ())

    def row(self, w: int) -> dict[int, QPoly]:
        return self._rows[w]

    def p(self, x: int, w: int) -> LaurentPoly:
        P = self._rows[w].get(x)
        if P is None:
            return LaurentPoly()
        g = self.group
        return LaurentPoly.from_q_poly(P, g.length(x) - g.length(w))

    def mu(self, x: int, w: int) -> int:
        if x == w:
            return 0
        g = self.group
        d = g.length(w) - g.length(x)
        if d <= 0 or d % 2 == 0:
            return 0
        P = self._rows[w].get(x)
        if P is None:
            return 0
        k = (d - 1) // 2
        return P[k] if k < len(P) else 0

    def mu_row(self, w: int) -> dict[int, int]:
        """``{z: mu(z, w)}`` over ``z < w`` with nonzero mu."""
        if self._mu_rows is None:
            self._mu_rows = [self._compute_mu_row(v) for v in range(self.group.order)]
        return self._mu_rows[w]

    def _compute_mu_row(self, w: int) -> dict[int, int]:
        out = {}
        for z in self._rows[w]:
            m = self.mu(z, w)
            if m:
                out[z] = m
        return out

    def p_prime(self, z: int, w: int) -> LaurentPoly:
        """Entry of the inverse of ``[p[z, w]]``: ``e_z e_w p[w0 w, w0 z]``."""
        g = self.group
        w0 = g.w0
        p = self.p(g.multiply(w0, w), g.multiply(w0, z))
        return p if g.sign(z) == g.sign(w) else -p

    def f_prime(self, x: int, y: int, z: int, product: HeckeVector | None = None) -> LaurentPoly:
        """Coefficient of ``c_z`` in ``T_x T_y``: ``sum_w p'[z, w] f[x, y, w]``."""
        if product is None:
            product = t_multiply(self.group, x, y)
        acc = LaurentPoly()
        for w, f in product.items():
            pp = self.p_prime(z, w)
            if pp:
                acc = acc + pp * f
        return acc

    def n_pairs(self) -> int:
        return sum(len(r) for r in self._rows)

    # -- persistence -----------------------------------------------------------
    def records(self) -> Iterator[str]:
        for w, row in enumerate(self._rows):
            for x in sorted(row):
                yield "P {} {} {}".format(x, w, " ".join(map(str, row[x])))

    def header(self) -> str:
        return f"klcache v1 {self.group.descriptor.digest()}"

    def save(self, path: str | os.PathLike) -> None:
        path = Path(path)
        tmp = path.with_suffix(path.suffix + ".tmp")
        with open(tmp, "w") as fh:
            fh.write(self.header() + "\n")
            for rec in self.records():
                fh.write(rec + "\n")
        os.replace(tmp, path)

    @classmethod
    def load(cls, group: CoxeterGroup, path: str | os.PathLike) -> KLTable:
        rows: list[dict[int, QPoly]] = [dict() for _ in range(group.order)]
        with open(path) as fh:
            header = fh.readline().split()
            want = ["klcache", "v1", group.descriptor.digest()]
            if header != want:
                raise KLCacheError(f"{path}: cache header does not match this group")
            for lineno, line in enumerate(fh, 2):
                parts = line.split()
                if not parts:
                    continue
                if parts[0] != "P" or len(parts) < 4:
                    raise KLCacheError(f"{path}:{lineno}: malformed record")
                x, w = int(parts[1]), int(parts[2])
                rows[w][x] = tuple(int(c) for c in parts[3:])
        return cls(group, rows)


def cache_path(group: CoxeterGroup, cache_dir: str | os.PathLike) -> Path:
    return Path(cache_dir) / f"kl-{group.descriptor.digest()[:16]}.klcache"


def compute_kl_table(group: CoxeterGroup, cache_dir: str | os.PathLike | None = None,
                     require_cache: bool = False, progress=None) -> KLTable:
    """Kazhdan-Lusztig polynomials of ``group`` by the classical recursion.

    For ``w`` with least left descent ``s`` and ``v = sw``::

        P[x, w] = q^(1-c) P[sx, v] + q^c P[x, v]
                  - sum_{z < v, sz < z} mu(z, v) q^((l(w) - l(z)) / 2) P[x, z]

    with ``c = 1`` if ``sx < x`` else ``0``.  If ``cache_dir`` is given (or the
    ``ASYMHECKE_CACHE`` environment variable is set) the table is read from /
    written to a ``klcache v1`` file there.
    """
    if cache_dir is None:
        cache_dir = os.environ.get(CACHE_ENV) or None
    path = cache_path(group, cache_dir) if cache_dir else None
    if path is not None and path.exists():
        log.info("loading KL cache %s", path)
        return KLTable.load(group, path)
    if require_cache:
        raise KLCacheError(f"no KL cache for this group at {path}")

    g = group
    N = g.order
    B = g.bruhat_matrix
    lengths = g.lengths
    rows: list[dict[int, QPoly]] = [dict() for _ in range(N)]
    mu_rows: list[list[tuple[int, int]]] = [[] for _ in range(N)]
    rows[0][0] = (1,)
    for w in range(1, N):
        i = g.least_left_descent(w)
        v = int(g.lmul[i, w])
        lw = int(lengths[w])
        rv = rows[v]
        lm = g.lmul[i]
        mask = 1 << i
        corrections = [(z, m, rows[z]) for z, m in mu_rows[v] if g.left_descent_mask[z] & mask]
        row = {}
        for x in np.flatnonzero(B[w]).tolist():
            sx = int(lm[x])
            if g.left_descent_mask[x] & mask:
                acc = _qadd(rv.get(sx, ()), rv.get(x, ()), shift=1)
            else:
                acc = _qadd(rv.get(x, ()), rv.get(sx, ()), shift=1)
            for z, m, rz in corrections:
                pz = rz.get(x)
                if pz:
                    acc = _qadd(acc, pz, shift=(lw - int(lengths[z])) // 2, scale=-m)
            poly = _qtrim(acc)
            d = lw - int(lengths[x])
            if x != w:
                if not poly or poly[0] != 1:
                    raise ArithmeticError(f"P[{x},{w}] has constant term != 1: {poly}")
                if 2 * (len(poly) - 1) > d - 1:
                    raise ArithmeticError(f"P[{x},{w}] violates the degree bound: {poly}")
            row[x] = poly
        if row.get(w) != (1,):
            raise ArithmeticError(f"P[{w},{w}] != 1")
        rows[w] = row
        mus = []
        for x, poly in row.items():
            d = lw - int(lengths[x])
            if d % 2 == 1:
                k = (d - 1) // 2
                if k < len(poly) and poly[k]:
                    mus.append((x, poly[k]))
        mu_rows[w] = mus
        if progress is not None and w % 500 == 0:
            progress(w, N)
    table = KLTable(g, rows)
    table._mu_rows = [dict(m) for m in mu_rows]
    if path is not None:
        path.parent.mkdir(parents=True, exist_ok=True)
        table.save(path)
        log.info("wrote KL cache %s", path)
    return table
