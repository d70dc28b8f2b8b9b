"""Exact univariate polynomials over the rationals and real-root counting.

Everything here uses ``fractions.Fraction``; no floating point is involved, so
sign changes, discriminants and Sturm counts are exact statements.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

Number = int | Fraction


class NotSquarefreeError(ValueError):
    """Raised when a Sturm count is requested for a polynomial with repeated roots."""

    def __init__(self, p: "IntPolynomial", witness: "IntPolynomial"):
        self.polynomial = p
        self.witness = witness
        super().__init__(f"polynomial is not squarefree; gcd(p, p') = {witness}")


class IntPolynomial:
    """Polynomial with exact rational coefficients, stored in ascending degree."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[Number] = ()):
        c = [Fraction(x) for x in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self.coeffs: tuple[Fraction, ...] = tuple(c)

    @classmethod
    def from_roots(cls, roots: Iterable[Number]) -> "IntPolynomial":
        p = cls([1])
        for r in roots:
            p = p * cls([-Fraction(r), 1])
        return p

    @classmethod
    def x(cls) -> "IntPolynomial":
        return cls([0, 1])

    # ------------------------------------------------------------ basic queries
    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def leading(self) -> Fraction:
        if not self.coeffs:
            raise ValueError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def __call__(self, x: Number) -> Fraction:
        x = Fraction(x)
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def sign_at(self, x) -> int:
        """Sign at a rational point or at +/-infinity (pass float('inf') or '-inf')."""
        if not self.coeffs:
            return 0
        if x == float("inf"):
            return _sgn(self.leading)
        if x == float("-inf"):
            return _sgn(self.leading) * (-1 if self.degree % 2 else 1)
        return _sgn(self(x))

    def derivative(self) -> "IntPolynomial":
        return IntPolynomial(k * c for k, c in enumerate(self.coeffs) if k)

    def monic(self) -> "IntPolynomial":
        lc = self.leading
        return IntPolynomial(c / lc for c in self.coeffs)

    def primitive(self) -> "IntPolynomial":
        """Integer coefficients with gcd 1 and positive leading coefficient."""
        from math import gcd, lcm

        if not self.coeffs:
            return self
        den = lcm(*(c.denominator for c in self.coeffs))
        ints = [int(c * den) for c in self.coeffs]
        g = 0
        for v in ints:
            g = gcd(g, v)
        if ints[-1] < 0:
            g = -g
        return IntPolynomial(v // g for v in ints)

    def substitute_square(self) -> "IntPolynomial":
        """p(x^2): turns a polynomial in y = x^2 into one in x."""
        out = [Fraction(0)] * (2 * len(self.coeffs) - 1 if self.coeffs else 0)
        for k, c in enumerate(self.coeffs):
            out[2 * k] = c
        return IntPolynomial(out)

    # ---------------------------------------------------------------- arithmetic
    def __add__(self, other) -> "IntPolynomial":
        other = _lift(other)
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (Fraction(0),) * (n - len(self.coeffs))
        b = other.coeffs + (Fraction(0),) * (n - len(other.coeffs))
        return IntPolynomial(x + y for x, y in zip(a, b))

    __radd__ = __add__

    def __neg__(self) -> "IntPolynomial":
        return IntPolynomial(-c for c in self.coeffs)

    def __sub__(self, other) -> "IntPolynomial":
        return self + (-_lift(other))

    def __rsub__(self, other) -> "IntPolynomial":
        return _lift(other) - self

    def __mul__(self, other) -> "IntPolynomial":
        other = _lift(other)
        if not self.coeffs or not other.coeffs:
            return IntPolynomial()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return IntPolynomial(out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "IntPolynomial":
        if k < 0:
            raise ValueError("negative power")
        out = IntPolynomial([1])
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __divmod__(self, other) -> tuple["IntPolynomial", "IntPolynomial"]:
        other = _lift(other)
        if other.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        rem = list(self.coeffs)
        q = [Fraction(0)] * max(len(rem) - len(other.coeffs) + 1, 0)
        lc = other.leading
        d = other.degree
        for k in range(len(rem) - 1, d - 1, -1):
            c = rem[k] / lc
            if c:
                q[k - d] = c
                for j, b in enumerate(other.coeffs):
                    rem[k - d + j] -= c * b
        return IntPolynomial(q), IntPolynomial(rem[:d] if d > 0 else [])

    def __floordiv__(self, other) -> "IntPolynomial":
        return divmod(self, other)[0]

    def __mod__(self, other) -> "IntPolynomial":
        return divmod(self, other)[1]

    def exact_div(self, other) -> "IntPolynomial":
        q, r = divmod(self, other)
        if not r.is_zero():
            raise ValueError(f"division leaves remainder {r}")
        return q

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = IntPolynomial([other])
        return isinstance(other, IntPolynomial) and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __repr__(self) -> str:
        return f"IntPolynomial({[str(c) for c in self.coeffs]})"

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        terms = []
        for k in range(self.degree, -1, -1):
            c = self.coeffs[k]
            if c == 0:
                continue
            mono = "" if k == 0 else "x" if k == 1 else f"x^{k}"
            mag = abs(c)
            body = f"{mag}" if (mag != 1 or k == 0) else ""
            if body and mono:
                body += "*"
            terms.append(("-" if c < 0 else "+", body + mono))
        s = " ".join(f"{sg} {t}" for sg, t in terms)
        return s[2:] if s.startswith("+ ") else "-" + s[2:]


def _lift(v) -> IntPolynomial:
    return v if isinstance(v, IntPolynomial) else IntPolynomial([v])


def _sgn(v: Fraction) -> int:
    return (v > 0) - (v < 0)


def poly(*coeffs_desc: Number) -> IntPolynomial:
    """Build from coefficients in descending degree, the way polynomials are usually written."""
    return IntPolynomial(reversed(coeffs_desc))


def gcd(p: IntPolynomial, q: IntPolynomial) -> IntPolynomial:
    """Monic greatest common divisor (zero if both are zero)."""
    a, b = p, q
    while not b.is_zero():
        a, b = b, a % b
    return a.monic() if not a.is_zero() else a


# ----------------------------------------------------------------- resultants
def _det(rows: list[list[Fraction]]) -> Fraction:
    """Determinant by fraction-exact Gaussian elimination."""
    m = [list(r) for r in rows]
    n = len(m)
    det = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            det = -det
        pv = m[col][col]
        det *= pv
        for r in range(col + 1, n):
            f = m[r][col] / pv
            if f:
                row, prow = m[r], m[col]
                for c in range(col, n):
                    row[c] -= f * prow[c]
    return det


def resultant(p: IntPolynomial, q: IntPolynomial) -> Fraction:
    """Determinant of the Sylvester matrix of p and q."""
    m, n = p.degree, q.degree
    if m < 0 or n < 0:
        return Fraction(0)
    if m == 0:
        return p.leading**n
    if n == 0:
        return q.leading**m
    size = m + n
    pd = list(reversed(p.coeffs))
    qd = list(reversed(q.coeffs))
    rows = []
    for i in range(n):
        rows.append([Fraction(0)] * i + pd + [Fraction(0)] * (size - m - 1 - i))
    for i in range(m):
        rows.append([Fraction(0)] * i + qd + [Fraction(0)] * (size - n - 1 - i))
    return _det(rows)


def discriminant(p: IntPolynomial) -> Fraction:
    """(-1)^(n(n-1)/2) Res(p, p') / a_n."""
    n = p.degree
    if n < 2:
        raise ValueError("discriminant needs degree >= 2")
    sign = -1 if (n * (n - 1) // 2) % 2 else 1
    return sign * resultant(p, p.derivative()) / p.leading


# ------------------------------------------------------------ sign-based counts
def descartes_positive_bound(p: IntPolynomial) -> int:
    """Sign changes of the coefficient sequence: an upper bound (same parity) on positive roots."""
    if p.is_zero():
        raise ValueError("Descartes' rule is undefined for the zero polynomial")
    signs = [_sgn(c) for c in p.coeffs if c != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def sturm_sequence(p: IntPolynomial) -> list[IntPolynomial]:
    seq = [p, p.derivative()]
    while not seq[-1].is_zero():
        r = seq[-2] % seq[-1]
        if r.is_zero():
            break
        seq.append(-r)
    return seq


def _variations(seq: Sequence[IntPolynomial], x) -> int:
    signs = [s for s in (q.sign_at(x) for q in seq) if s != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def require_squarefree(p: IntPolynomial) -> None:
    if p.degree < 1:
        return
    g = gcd(p, p.derivative())
    if g.degree > 0:
        raise NotSquarefreeError(p, g)


def squarefree_part(p: IntPolynomial) -> IntPolynomial:
    g = gcd(p, p.derivative())
    return p.exact_div(g) if g.degree > 0 else p


def sturm_count(p: IntPolynomial, a=float("-inf"), b=float("inf")) -> int:
    """Number of distinct real roots in (a, b]; endpoints rational or +/-infinity."""
    if p.is_zero():
        raise ValueError("the zero polynomial has infinitely many roots")
    if not (a == float("-inf") or b == float("inf")) and Fraction(a) >= Fraction(b):
        return 0
    require_squarefree(p)
    seq = sturm_sequence(p)
    a = a if a in (float("inf"), float("-inf")) else Fraction(a)
    b = b if b in (float("inf"), float("-inf")) else Fraction(b)
    return _variations(seq, a) - _variations(seq, b)


def root_bound(p: IntPolynomial) -> Fraction:
    """Cauchy bound: every real root lies in (-B, B)."""
    lc = abs(p.leading)
    return 1 + max((abs(c) / lc for c in p.coeffs[:-1]), default=Fraction(0))


@dataclass(frozen=True)
class IsolatedRoot:
    lo: Fraction
    hi: Fraction

    @property
    def midpoint(self) -> Fraction:
        return (self.lo + self.hi) / 2

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo


def isolate_roots(p: IntPolynomial, precision: Number = Fraction(1, 10**12),
                  lo=None, hi=None) -> list[IsolatedRoot]:
    """Disjoint intervals (lo, hi], one per real root, each of width <= precision."""
    precision = Fraction(precision)
    if precision <= 0:
        raise ValueError("precision must be positive")
    require_squarefree(p)
    if p.degree < 1:
        return []
    seq = sturm_sequence(p)
    B = root_bound(p)
    a = -B if lo is None else Fraction(lo)
    b = B if hi is None else Fraction(hi)

    def count(x, y):
        return _variations(seq, x) - _variations(seq, y)

    out: list[IsolatedRoot] = []
    stack = [(a, b, count(a, b))]
    while stack:
        x, y, k = stack.pop()
        if k == 0:
            continue
        if k == 1:
            while y - x > precision:
                mid = (x + y) / 2
                if count(x, mid):
                    y = mid
                else:
                    x = mid
            out.append(IsolatedRoot(x, y))
            continue
        mid = (x + y) / 2
        left = count(x, mid)
        stack.append((mid, y, k - left))
        stack.append((x, mid, left))
    return sorted(out, key=lambda r: r.lo)


def interpolate(points: Sequence[tuple[Number, Number]]) -> IntPolynomial:
    """Exact Lagrange interpolation through distinct abscissae."""
    xs = [Fraction(x) for x, _ in points]
    if len(set(xs)) != len(xs):
        raise ValueError("interpolation nodes must be distinct")
    total = IntPolynomial()
    for i, (xi, (_, yi)) in enumerate(zip(xs, points)):
        basis = IntPolynomial([1])
        denom = Fraction(1)
        for j, xj in enumerate(xs):
            if j != i:
                basis = basis * IntPolynomial([-xj, 1])
                denom *= xi - xj
        total = total + basis * (Fraction(yi) / denom)
    return total


def parametric_discriminant(family, degree_bound: int, nodes: Sequence[Number] | None = None) -> IntPolynomial:
    """Discriminant of ``family(y)`` as an exact polynomial in the parameter y.

    ``family`` maps a rational y to an IntPolynomial whose coefficients are
    polynomials in y of total weight at most ``degree_bound`` in the discriminant.
    The result is interpolated on degree_bound + 3 nodes and checked on the spare ones.
    """
    if nodes is None:
        nodes = list(range(2, degree_bound + 5))
    nodes = [Fraction(v) for v in nodes]
    if len(nodes) < degree_bound + 2:
        raise ValueError("need at least degree_bound + 2 nodes")
    values = [(y, discriminant(family(y))) for y in nodes]
    fit = interpolate(values[: degree_bound + 1])
    for y, v in values[degree_bound + 1:]:
        if fit(y) != v:
            raise ValueError("degree bound too small for this family")
    return fit
