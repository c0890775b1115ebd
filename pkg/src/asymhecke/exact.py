"""Exact arithmetic kernel.

Everything here works over Python integers and :class:`fractions.Fraction`;
nothing ever touches a float.  The main citizens are

* :class:`LaurentPoly` -- Laurent polynomials in ``v = q^(1/2)``,
* :class:`QuadExt` -- the field Q(sqrt 5),
* :class:`RealCyclotomic` -- the ring Z[2cos(2 pi / N)], used for root
  systems whose bonds are not covered by Q(sqrt 5),
* :class:`IntPoly` -- univariate integer polynomials in ``u``,

plus a division-free characteristic polynomial, fraction-free rank and
determinant, and a parser for factored polynomials such as
``(-1+u)^{7}(1+u)^{7}``.
"""

from __future__ import annotations

import re
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Iterable, Mapping, Sequence

__all__ = [
    "LaurentPoly",
    "QuadExt",
    "RealCyclotomic",
    "IntPoly",
    "IntMatrix",
    "FactoredPolyError",
    "char_poly",
    "determinant",
    "rational_rank",
    "rational_nullspace_dim",
    "expand_factored_poly",
    "mat_mul",
    "identity_matrix",
]


class LaurentPoly:
    """Laurent polynomial in ``v`` with integer coefficients.

    Stored as a dict ``exponent -> coefficient`` with zeros stripped, so
    structural equality is mathematical equality.
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[int, int] | None = None):
        self._terms = {k: c for k, c in (terms or {}).items() if c}
        self._hash = None

    @classmethod
    def monomial(cls, exponent: int, coeff: int = 1) -> LaurentPoly:
        return cls({exponent: coeff})

    @classmethod
    def constant(cls, c: int) -> LaurentPoly:
        return cls({0: c})

    @classmethod
    def from_q_poly(cls, coeffs: Sequence[int], shift: int = 0) -> LaurentPoly:
        """``v**shift * P(v**2)`` for ``P`` given by ascending q-coefficients."""
        return cls({shift + 2 * k: c for k, c in enumerate(coeffs)})

    @property
    def terms(self) -> dict[int, int]:
        return dict(self._terms)

    def items(self):
        return sorted(self._terms.items())

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def degree(self) -> float | int:
        """Top exponent; ``-inf`` for the zero polynomial."""
        return max(self._terms) if self._terms else float("-inf")

    def low_degree(self) -> float | int:
        return min(self._terms) if self._terms else float("inf")

    def leading_term(self) -> tuple[int, int]:
        if not self._terms:
            raise ValueError("no leading term: zero polynomial")
        k = max(self._terms)
        return k, self._terms[k]

    def coeff(self, exponent: int) -> int:
        return self._terms.get(exponent, 0)

    def bar(self) -> LaurentPoly:
        return LaurentPoly({-k: c for k, c in self._terms.items()})

    def shift(self, k: int) -> LaurentPoly:
        """Multiply by ``v**k``."""
        return LaurentPoly({e + k: c for e, c in self._terms.items()})

    def __add__(self, other):
        other = _as_laurent(other)
        if other is NotImplemented:
            return other
        out = dict(self._terms)
        for k, c in other._terms.items():
            out[k] = out.get(k, 0) + c
        return LaurentPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly({k: -c for k, c in self._terms.items()})

    def __sub__(self, other):
        other = _as_laurent(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = _as_laurent(other)
        if other is NotImplemented:
            return other
        out: dict[int, int] = {}
        for a, ca in self._terms.items():
            for b, cb in other._terms.items():
                out[a + b] = out.get(a + b, 0) + ca * cb
        return LaurentPoly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative powers are not Laurent-polynomial closed")
        result = LaurentPoly.constant(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        other = _as_laurent(other)
        if other is NotImplemented:
            return other
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __repr__(self):
        return f"LaurentPoly({self})"

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for k, c in sorted(self._terms.items(), reverse=True):
            mag = abs(c)
            if k == 0:
                body = str(mag)
            else:
                mono = "v" if k == 1 else f"v^{k}"
                body = mono if mag == 1 else f"{mag}*{mono}"
            parts.append(("-" if c < 0 else "+", body))
        head_sign, head = parts[0]
        s = ("-" if head_sign == "-" else "") + head
        for sign, body in parts[1:]:
            s += f" {sign} {body}"
        return s


def _as_laurent(x):
    if isinstance(x, LaurentPoly):
        return x
    if isinstance(x, int):
        return LaurentPoly.constant(x)
    return NotImplemented


V = LaurentPoly.monomial(1)


class QuadExt:
    """Element ``a + b*sqrt(5)`` of Q(sqrt 5) with rational ``a``, ``b``."""

    __slots__ = ("a", "b")

    def __init__(self, a=0, b=0):
        self.a = Fraction(a)
        self.b = Fraction(b)

    def __add__(self, other):
        other = _as_quad(other)
        return QuadExt(self.a + other.a, self.b + other.b)

    __radd__ = __add__

    def __neg__(self):
        return QuadExt(-self.a, -self.b)

    def __sub__(self, other):
        other = _as_quad(other)
        return QuadExt(self.a - other.a, self.b - other.b)

    def __rsub__(self, other):
        return _as_quad(other) - self

    def __mul__(self, other):
        other = _as_quad(other)
        return QuadExt(self.a * other.a + 5 * self.b * other.b,
                       self.a * other.b + self.b * other.a)

    __rmul__ = __mul__

    def conjugate(self) -> QuadExt:
        return QuadExt(self.a, -self.b)

    def norm(self) -> Fraction:
        return self.a * self.a - 5 * self.b * self.b

    def inverse(self) -> QuadExt:
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("QuadExt zero has no inverse")
        return QuadExt(self.a / n, -self.b / n)

    def __truediv__(self, other):
        return self * _as_quad(other).inverse()

    def __eq__(self, other):
        try:
            other = _as_quad(other)
        except TypeError:
            return NotImplemented
        return self.a == other.a and self.b == other.b

    def __hash__(self):
        return hash((self.a, self.b))

    def __bool__(self):
        return bool(self.a or self.b)

    def __repr__(self):
        return f"QuadExt({self.a}, {self.b})"


def _as_quad(x) -> QuadExt:
    if isinstance(x, QuadExt):
        return x
    if isinstance(x, (int, Fraction)):
        return QuadExt(x, 0)
    raise TypeError(f"cannot coerce {type(x).__name__} to QuadExt")


# ---------------------------------------------------------------------------
# Z[2cos(2 pi / N)]


def _poly_divmod_int(num: list[int], den: list[int]) -> tuple[list[int], list[int]]:
    # den must be monic; ascending coefficients
    num = list(num)
    dd = len(den) - 1
    if len(num) - 1 < dd:
        return [0], num
    quot = [0] * (len(num) - dd)
    for i in range(len(num) - 1, dd - 1, -1):
        c = num[i]
        if c:
            quot[i - dd] = c
            for j in range(dd + 1):
                num[i - dd + j] -= c * den[j]
    rem = num[:dd] or [0]
    return quot, rem


@lru_cache(maxsize=None)
def cyclotomic_poly(n: int) -> tuple[int, ...]:
    """Ascending integer coefficients of the n-th cyclotomic polynomial."""
    poly = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            poly, rem = _poly_divmod_int(poly, list(cyclotomic_poly(d)))
            assert not any(rem)
    return tuple(poly)


@lru_cache(maxsize=None)
def real_cyclotomic_minpoly(n: int) -> tuple[int, ...]:
    """Minimal polynomial of ``2cos(2 pi / n)`` (ascending, monic), n >= 3."""
    phi = list(cyclotomic_poly(n))
    d = (len(phi) - 1) // 2
    # phi(z) = z^d * psi(z + 1/z); peel off (z + 1/z)^k from the top
    sym = {k - d: c for k, c in enumerate(phi)}
    psi = [0] * (d + 1)
    for k in range(d, -1, -1):
        c = sym.get(k, 0)
        psi[k] = c
        if c:
            for i in range(k + 1):
                e = k - 2 * i
                sym[e] = sym.get(e, 0) - c * _binom(k, i)
    assert not any(sym.values())
    return tuple(psi)


def _binom(n: int, k: int) -> int:
    from math import comb
    return comb(n, k)


class RealCyclotomic:
    """Element of Z[c], ``c = 2cos(2 pi / N)``, in the power basis of ``c``."""

    __slots__ = ("n", "coeffs")

    def __init__(self, n: int, coeffs: Iterable[int]):
        self.n = n
        mp = real_cyclotomic_minpoly(n)
        deg = len(mp) - 1
        cs = list(coeffs)
        if len(cs) > deg:
            _, cs = _poly_divmod_int(cs, list(mp))
        cs = cs + [0] * (deg - len(cs))
        self.coeffs = tuple(cs)

    @classmethod
    def gen(cls, n: int) -> RealCyclotomic:
        return cls(n, [0, 1])

    @classmethod
    def two_cos(cls, n: int, k: int) -> RealCyclotomic:
        """``2cos(2 pi k / n)`` via the recursion V_{j+1} = c V_j - V_{j-1}."""
        c = cls.gen(n)
        prev, cur = cls(n, [2]), c
        if k == 0:
            return prev
        for _ in range(k - 1):
            prev, cur = cur, c * cur - prev
        return cur

    def _wrap(self, other):
        if isinstance(other, RealCyclotomic):
            if other.n != self.n:
                raise ValueError("mixing RealCyclotomic rings")
            return other
        if isinstance(other, int):
            return RealCyclotomic(self.n, [other])
        return NotImplemented

    def __add__(self, other):
        other = self._wrap(other)
        return RealCyclotomic(self.n, [a + b for a, b in zip(self.coeffs, other.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        return RealCyclotomic(self.n, [-a for a in self.coeffs])

    def __sub__(self, other):
        return self + (-self._wrap(other))

    def __mul__(self, other):
        other = self._wrap(other)
        out = [0] * (len(self.coeffs) + len(other.coeffs))
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return RealCyclotomic(self.n, out)

    __rmul__ = __mul__

    def __eq__(self, other):
        other = self._wrap(other)
        if other is NotImplemented:
            return other
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.n, self.coeffs))

    def __bool__(self):
        return any(self.coeffs)

    def __repr__(self):
        return f"RealCyclotomic({self.n}, {self.coeffs})"


# ---------------------------------------------------------------------------
# integer polynomials in u


class IntPoly:
    """Univariate polynomial in ``u`` with integer coefficients (ascending)."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[int] = ()):
        cs = list(coeffs)
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs = tuple(cs)

    @classmethod
    def u(cls) -> IntPoly:
        return cls((0, 1))

    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def __add__(self, other):
        other = _as_intpoly(other)
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (0,) * (n - len(self.coeffs))
        b = other.coeffs + (0,) * (n - len(other.coeffs))
        return IntPoly(x + y for x, y in zip(a, b))

    __radd__ = __add__

    def __neg__(self):
        return IntPoly(-c for c in self.coeffs)

    def __sub__(self, other):
        return self + (-_as_intpoly(other))

    def __mul__(self, other):
        other = _as_intpoly(other)
        if not self.coeffs or not other.coeffs:
            return IntPoly()
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return IntPoly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        result = IntPoly((1,))
        for _ in range(n):
            result = result * self
        return result

    def content(self) -> int:
        g = 0
        for c in self.coeffs:
            g = gcd(g, c)
        return g

    def __eq__(self, other):
        try:
            other = _as_intpoly(other)
        except TypeError:
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"IntPoly({list(self.coeffs)})"

    def __str__(self):
        if not self.coeffs:
            return "0"
        terms = []
        for k in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[k]
            if not c:
                continue
            mono = "" if k == 0 else ("u" if k == 1 else f"u^{k}")
            mag = abs(c)
            body = str(mag) if not mono else (mono if mag == 1 else f"{mag}{mono}")
            terms.append(("-" if c < 0 else "+", body))
        s = ("-" if terms[0][0] == "-" else "") + terms[0][1]
        for sign, body in terms[1:]:
            s += f" {sign} {body}"
        return s


def _as_intpoly(x) -> IntPoly:
    if isinstance(x, IntPoly):
        return x
    if isinstance(x, int):
        return IntPoly((x,))
    raise TypeError(f"cannot coerce {type(x).__name__} to IntPoly")


# ---------------------------------------------------------------------------
# matrices

IntMatrix = list  # n x n list of lists of int


def identity_matrix(n: int) -> list[list[int]]:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def mat_mul(a: Sequence[Sequence[int]], b: Sequence[Sequence[int]]) -> list[list[int]]:
    m, p = len(b), len(b[0]) if b else 0
    if a and len(a[0]) != m:
        raise ValueError(f"dimension mismatch: {len(a)}x{len(a[0])} times {m}x{p}")
    bt = list(zip(*b))
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def _check_square(m: Sequence[Sequence[int]]) -> int:
    n = len(m)
    for row in m:
        if len(row) != n:
            raise ValueError("matrix is not square")
    return n


def char_poly(m: Sequence[Sequence[int]]) -> IntPoly:
    """``det(uI - M)`` by Berkowitz's division-free algorithm.

    Grows the leading principal block one row/column at a time.  When the
    r x r block ``A`` is bordered by row ``R``, column ``C`` and corner
    ``a``, the lower-triangular Toeplitz matrix with first column
    ``1, -a, -RC, -RAC, -RA^2C, ...`` maps the (descending) coefficients of
    ``char(A)`` to those of the bordered block.
    """
    n = _check_square(m)
    if n == 0:
        return IntPoly((1,))
    # coefficient vectors are descending: [1, c1, ..., cr]
    vec = [1, -m[0][0]]
    for r in range(1, n):
        a = m[r][r]
        row = [m[r][j] for j in range(r)]
        col = [m[i][r] for i in range(r)]
        block = [list(m[i][:r]) for i in range(r)]
        # t = [1, -a, -R C, -R A C, -R A^2 C, ...] of length r + 2
        t = [1, -a]
        x = col
        for _ in range(r):
            t.append(-sum(p * q for p, q in zip(row, x)))
            x = [sum(block[i][j] * x[j] for j in range(r)) for i in range(r)]
        # lower-triangular Toeplitz (r+2) x (r+1) times vec
        new = []
        for i in range(r + 2):
            s = 0
            for j in range(min(i, r) + 1):
                s += t[i - j] * vec[j]
            new.append(s)
        vec = new
    return IntPoly(reversed(vec))


def determinant(m: Sequence[Sequence[int]]) -> int:
    """Exact determinant by Bareiss fraction-free elimination."""
    n = _check_square(m)
    a = [list(map(int, row)) for row in m]
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k]:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1] if n else 1


def rational_rank(rows: Sequence[Sequence[int | Fraction]]) -> int:
    """Rank over Q, clearing denominators and eliminating fraction-free."""
    mat = []
    width = None
    for r in rows:
        r = list(r)
        if width is None:
            width = len(r)
        elif len(r) != width:
            raise ValueError("rows of unequal length")
        den = 1
        for x in r:
            if isinstance(x, Fraction):
                den = den * x.denominator // gcd(den, x.denominator)
        ints = [int(x * den) for x in r]
        if any(ints):
            mat.append(ints)
    if not mat:
        return 0
    rank = 0
    cols = len(mat[0])
    for c in range(cols):
        piv = next((i for i in range(rank, len(mat)) if mat[i][c]), None)
        if piv is None:
            continue
        mat[rank], mat[piv] = mat[piv], mat[rank]
        p = mat[rank]
        for i in range(rank + 1, len(mat)):
            f = mat[i][c]
            if f:
                row = [p[c] * x - f * y for x, y in zip(mat[i], p)]
                g = 0
                for x in row:
                    g = gcd(g, x)
                mat[i] = [x // g for x in row] if g > 1 else row
        rank += 1
        if rank == len(mat):
            break
    return rank


def rational_nullspace_dim(rows: Sequence[Sequence[int | Fraction]], width: int | None = None) -> int:
    """Dimension of ``{x : r . x = 0 for every row r}``."""
    rows = list(rows)
    if width is None:
        if not rows:
            raise ValueError("width required for an empty row set")
        width = len(rows[0])
    return width - rational_rank(rows)


# ---------------------------------------------------------------------------
# factored polynomial text, e.g. "(-2+u)(-1+u)u(1+u)(-2+u^{2})^{2}"


class FactoredPolyError(ValueError):
    def __init__(self, msg: str, pos: int):
        super().__init__(f"{msg} at position {pos}")
        self.pos = pos


_EXP = re.compile(r"\^\s*(?:\{\s*(\d+)\s*\}|(\d+))")
_TERM = re.compile(r"\s*([+-])?\s*(\d*)\s*(u(?:\s*\^\s*(?:\{\s*\d+\s*\}|\d+))?)?")


def _parse_intexpr(text: str, start: int, end: int) -> IntPoly:
    pos = start
    acc = IntPoly()
    first = True
    while True:
        while pos < end and text[pos].isspace():
            pos += 1
        if pos >= end:
            break
        m = _TERM.match(text, pos, end)
        sign, digits, mono = m.group(1), m.group(2), m.group(3)
        if not digits and not mono:
            raise FactoredPolyError("expected a term", pos)
        if not first and not sign:
            raise FactoredPolyError("expected '+' or '-'", pos)
        c = int(digits) if digits else 1
        if sign == "-":
            c = -c
        k = 0
        if mono:
            e = _EXP.search(mono)
            k = int(e.group(1) or e.group(2)) if e else 1
        acc = acc + IntPoly([0] * k + [c])
        pos = m.end()
        first = False
    if first:
        raise FactoredPolyError("empty factor", start)
    return acc


def _parse_exponent(text: str, pos: int) -> tuple[int, int]:
    m = _EXP.match(text, pos)
    if not m:
        return 1, pos
    return int(m.group(1) or m.group(2)), m.end()


def expand_factored_poly(text: str) -> IntPoly:
    """Expand a product of factors such as ``u^{2}(1-3u+u^{2})`` exactly."""
    result = IntPoly((1,))
    pos, n = 0, len(text)
    seen = False
    while True:
        while pos < n and text[pos].isspace():
            pos += 1
        if pos >= n:
            break
        ch = text[pos]
        if ch == "(":
            close = text.find(")", pos)
            if close < 0:
                raise FactoredPolyError("unclosed '('", pos)
            factor = _parse_intexpr(text, pos + 1, close)
            k, pos = _parse_exponent(text, close + 1)
        elif ch == "u":
            factor = IntPoly.u()
            k, pos = _parse_exponent(text, pos + 1)
        elif ch.isdigit() or ch == "-":
            m = re.compile(r"-?\d+").match(text, pos)
            if not m:
                raise FactoredPolyError("bad integer", pos)
            factor = IntPoly((int(m.group()),))
            k, pos = _parse_exponent(text, m.end())
        else:
            raise FactoredPolyError(f"unexpected character {ch!r}", pos)
        result = result * factor ** k
        seen = True
    if not seen:
        raise FactoredPolyError("empty polynomial", 0)
    return result
