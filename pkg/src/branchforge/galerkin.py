"""Finite Galerkin systems of the cubic wave equation.

Projecting  Omega^2 u_tautau - u_xx + sign*u^3 = 0  onto the span of modes
cos((2m+1)tau) sin((2n+1)x) and multiplying every equation by 64/pi^2 gives

    F_k = 16 ((2n_k+1)^2 - (2m_k+1)^2 Omega^2) a_k + sign * sum_{ijl} c^k_{ijl} a_i a_j a_l

with integer coefficients c^k_{ijl} = sum over ordered triples of C*S (overlaps in
units of pi/8).  ``sign`` is +1 for the defocusing equation and -1 for the
focusing one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property, lru_cache
from itertools import combinations_with_replacement
from typing import Iterable, Sequence

import numpy as np
from scipy import sparse

from .modes import ModeIndex, ModeSet, cos_overlap, sin_overlap

NORMALIZATION = 64 / math.pi**2


@dataclass(frozen=True)
class SolutionPoint:
    omega: float
    amplitudes: np.ndarray
    residual_norm: float = 0.0

    def state(self) -> np.ndarray:
        """Concatenated vector (amplitudes..., omega)."""
        return np.append(self.amplitudes, self.omega)

    def negated(self) -> "SolutionPoint":
        return SolutionPoint(self.omega, -self.amplitudes, self.residual_norm)


def _overlap_table(factors: Sequence[int], func) -> np.ndarray:
    n = len(factors)
    table = np.zeros((n, n, n, n), dtype=np.int64)
    for a in range(n):
        for b in range(a, n):
            for c in range(b, n):
                for d in range(n):
                    v = func(factors[a], factors[b], factors[c], factors[d])
                    if v:
                        for p in {(a, b, c), (a, c, b), (b, a, c), (b, c, a), (c, a, b), (c, b, a)}:
                            table[p + (d,)] = v
    return table


class AlgebraicSystem:
    """Residual, Jacobian and cubic coefficient table of the Galerkin system on ``span``.

    The cubic table is a list of rows (equation k, i <= j <= l, integer coefficient)
    in lexicographic order; it is built once and never mutated.
    """

    def __init__(self, span: Iterable, sign: int = 1):
        self.span = span if isinstance(span, ModeSet) else ModeSet(span)
        if len(self.span) == 0:
            raise ValueError("a Galerkin system needs at least one mode")
        if sign not in (1, -1):
            raise ValueError("sign must be +1 (defocusing) or -1 (focusing)")
        self.sign = sign
        self.size = len(self.span)
        self.temporal = np.array([x.temporal for x in self.span], dtype=float)
        self.spatial = np.array([x.spatial for x in self.span], dtype=float)
        self._eq, self._i, self._j, self._l, self._coef = self._assemble()
        self._fcoef = self.sign * self._coef.astype(float)
        self._gram = self._quadratic_operator()

    def _assemble(self):
        ms = sorted({x.m for x in self.span})
        ns = sorted({x.n for x in self.span})
        ct = _overlap_table([2 * m + 1 for m in ms], cos_overlap)
        st = _overlap_table([2 * n + 1 for n in ns], sin_overlap)
        mi = np.array([ms.index(x.m) for x in self.span])
        ni = np.array([ns.index(x.n) for x in self.span])
        S = self.size
        rows = []
        for k in range(S):
            c = ct[mi[:, None, None], mi[None, :, None], mi[None, None, :], mi[k]]
            s = st[ni[:, None, None], ni[None, :, None], ni[None, None, :], ni[k]]
            prod = c * s
            p, q, r = np.nonzero(prod)
            if p.size == 0:
                continue
            trip = np.sort(np.stack([p, q, r], axis=1), axis=1)
            keys = (trip[:, 0] * S + trip[:, 1]) * S + trip[:, 2]
            uniq, inv = np.unique(keys, return_inverse=True)
            tot = np.bincount(inv, weights=prod[p, q, r]).round().astype(np.int64)
            keep = tot != 0
            uniq, tot = uniq[keep], tot[keep]
            rows.append(np.stack([np.full(uniq.size, k), uniq // (S * S), (uniq // S) % S, uniq % S, tot], axis=1))
        if rows:
            table = np.concatenate(rows).astype(np.int64)
        else:
            table = np.zeros((0, 5), dtype=np.int64)
        return table[:, 0], table[:, 1], table[:, 2], table[:, 3], table[:, 4]

    def _quadratic_operator(self) -> sparse.csr_matrix:
        """Sparse G with vec(dCubic/da) = G @ vec(a a^T), row k*S+i, column j*S+l."""
        S = self.size
        c, k, i, j, l = self._fcoef, self._eq, self._i, self._j, self._l
        rows = np.concatenate([k * S + i, k * S + j, k * S + l])
        cols = np.concatenate([j * S + l, i * S + l, i * S + j])
        vals = np.concatenate([c, c, c])
        return sparse.csr_matrix((vals, (rows, cols)), shape=(S * S, S * S))

    def _cubic_jacobian(self, a: np.ndarray) -> np.ndarray:
        S = self.size
        return (self._gram @ np.outer(a, a).ravel()).reshape(S, S)

    # ---------------------------------------------------------------- exact data
    def cubic_table(self) -> dict[tuple[int, tuple[int, int, int]], int]:
        """Exact integer coefficients keyed by (equation, sorted index triple), before ``sign``."""
        return {
            (int(k), (int(i), int(j), int(l))): int(c)
            for k, i, j, l, c in zip(self._eq, self._i, self._j, self._l, self._coef)
        }

    def linear_coefficients(self) -> list[tuple[int, int]]:
        """Per equation (constant, Omega^2 coefficient) of the linear part: 16N^2 - 16M^2 Omega^2."""
        return [(16 * x.spatial**2, -16 * x.temporal**2) for x in self.span]

    @cached_property
    def coupling_matrix(self) -> np.ndarray | None:
        """Integer matrix K if every cubic part has the form a_k * sum_j K_kj a_j^2, else None."""
        S = self.size
        K = np.zeros((S, S), dtype=np.int64)
        for (k, (i, j, l)), c in self.cubic_table().items():
            trip = (i, j, l)
            if trip.count(k) == 3:
                K[k, k] = c
                continue
            if trip.count(k) != 1:
                return None
            rest = [t for t in trip if t != k]
            if rest[0] != rest[1]:
                return None
            K[k, rest[0]] = c
        return K

    # ------------------------------------------------------------ float evaluation
    def _check(self, amplitudes) -> np.ndarray:
        a = np.asarray(amplitudes, dtype=float)
        if a.shape != (self.size,):
            raise ValueError(f"expected {self.size} amplitudes, got shape {a.shape}")
        return a

    def residual(self, omega: float, amplitudes) -> np.ndarray:
        a = self._check(amplitudes)
        lin = 16.0 * (self.spatial**2 - self.temporal**2 * omega**2) * a
        # the cubic part is homogeneous of degree 3, so it equals J_cubic a / 3
        return lin + self._cubic_jacobian(a) @ a / 3.0

    def jacobian(self, omega: float, amplitudes) -> tuple[np.ndarray, np.ndarray]:
        """Return (dF/da, dF/dOmega)."""
        a = self._check(amplitudes)
        S = self.size
        J = self._cubic_jacobian(a)
        J[np.diag_indices(S)] += 16.0 * (self.spatial**2 - self.temporal**2 * omega**2)
        dw = -32.0 * self.temporal**2 * omega * a
        return J, dw

    def residual_norm(self, omega: float, amplitudes) -> float:
        return float(np.max(np.abs(self.residual(omega, amplitudes))))

    def point(self, omega: float, amplitudes) -> SolutionPoint:
        a = self._check(amplitudes).copy()
        return SolutionPoint(float(omega), a, self.residual_norm(omega, a))

    def energy(self, omega: float, amplitudes) -> float:
        return energy(omega, amplitudes, self.span)

    def __repr__(self) -> str:
        kind = "defocusing" if self.sign == 1 else "focusing"
        return f"AlgebraicSystem({self.span!r}, {kind})"


def assemble_residual(system: AlgebraicSystem, omega: float, amplitudes) -> np.ndarray:
    return system.residual(omega, amplitudes)


def assemble_jacobian(system: AlgebraicSystem, omega: float, amplitudes):
    return system.jacobian(omega, amplitudes)


def energy(omega: float, amplitudes, span: Sequence[ModeIndex]) -> float:
    """E = (pi/4) Omega^2 sum_n (sum_m a_mn (-1)^m (2m+1))^2."""
    a = np.asarray(amplitudes, dtype=float)
    if a.shape != (len(span),):
        raise ValueError("amplitude vector does not match span")
    sums: dict[int, float] = {}
    for mode, v in zip(span, a):
        w = -mode.temporal if mode.m % 2 else mode.temporal
        sums[mode.n] = sums.get(mode.n, 0.0) + w * v
    return math.pi / 4 * omega**2 * sum(s * s for _, s in sorted(sums.items()))


@dataclass(frozen=True)
class PatternWitness:
    equation: ModeIndex
    monomial: tuple[ModeIndex, ModeIndex, ModeIndex]
    coefficient: int
    expected: int

    def __str__(self) -> str:
        mono = "*".join(f"a{x}" for x in self.monomial)
        return f"equation {self.equation}: {mono} has coefficient {self.coefficient}, expected {self.expected}"


def reducible_pattern_check(system: AlgebraicSystem) -> tuple[bool, PatternWitness | None]:
    """Check the polynomial identity cubic_k = a_k (9 a_k^2 + 12 sum_{j!=k} a_j^2) exactly."""
    S = system.size
    expected: dict[tuple[int, tuple[int, int, int]], int] = {}
    for k in range(S):
        expected[(k, (k, k, k))] = 9
        for j in range(S):
            if j != k:
                expected[(k, tuple(sorted((k, j, j))))] = 12
    actual = system.cubic_table()
    for key in sorted(set(expected) | set(actual)):
        got, want = actual.get(key, 0), expected.get(key, 0)
        if got != want:
            k, trip = key
            span = system.span
            return False, PatternWitness(span[k], tuple(span[t] for t in trip), got, want)
    return True, None


def is_reducible(modes: Iterable) -> bool:
    return reducible_pattern_check(AlgebraicSystem(modes))[0]


@lru_cache(maxsize=1 << 20)
def _cs(i: ModeIndex, j: ModeIndex, l: ModeIndex, k: ModeIndex) -> int:
    c = cos_overlap(i.temporal, j.temporal, l.temporal, k.temporal)
    return c * sin_overlap(i.spatial, j.spatial, l.spatial, k.spatial) if c else 0


def cubic_coefficient(k: ModeIndex, trip: tuple[ModeIndex, ModeIndex, ModeIndex]) -> int:
    """Coefficient of a_i a_j a_l in equation k, computed directly from the overlaps.

    The overlaps are symmetric in all four arguments, so every ordering of the
    triple contributes the same product.
    """
    i, j, l = trip
    distinct = len({i, j, l})
    count = 1 if distinct == 1 else 3 if distinct == 2 else 6
    return count * _cs(i, j, l, k)


@lru_cache(maxsize=1 << 20)
def _overlap_product(t: tuple[int, ...], x: tuple[int, ...]) -> int:
    # both factors are symmetric, so sorted keys are canonical
    c = cos_overlap(*t)
    return c * sin_overlap(*x) if c else 0


def pattern_holds(modes: Sequence[ModeIndex], new: Sequence[ModeIndex] | None = None) -> bool:
    """Exact 9/12 pattern test without assembling a system.

    With ``new`` given, only monomials and equations touching a mode of ``new``
    are examined (the rest is assumed checked already).
    """
    modes = list(modes)
    tem = [x.temporal for x in modes]
    spa = [x.spatial for x in modes]
    n = len(modes)
    fresh = set(range(n)) if new is None else {i for i, x in enumerate(modes) if x in set(new)}
    for k in range(n):
        for trip in combinations_with_replacement(range(n), 3):
            if k not in fresh and fresh.isdisjoint(trip):
                continue
            i, j, l = trip
            distinct = len({i, j, l})
            hits = (i == k) + (j == k) + (l == k)
            want = 9 if hits == 3 else 12 if hits == 1 and distinct == 2 else 0
            t = (tem[i], tem[j], tem[l], tem[k])
            x = (spa[i], spa[j], spa[l], spa[k])
            c = _overlap_product(tuple(sorted(t)), tuple(sorted(x)))
            if c * (1 if distinct == 1 else 3 if distinct == 2 else 6) != want:
                return False
    return True


@lru_cache(maxsize=1 << 16)
def pair_is_reducible(a: ModeIndex, b: ModeIndex) -> bool:
    return a != b and pattern_holds((a, b))


def focusing_map(point: SolutionPoint, span: ModeSet) -> tuple[SolutionPoint, ModeSet]:
    """Map a defocusing solution to a focusing one (and back): a'_{nm} = s a_{mn}/Omega, Omega' = 1/Omega."""
    if point.omega == 0:
        raise ValueError("focusing map is undefined at omega = 0")
    new_span = span.transposed()
    out = np.zeros(len(span))
    for mode, v in zip(span, point.amplitudes):
        s = 1.0 if (mode.m + mode.n) % 2 else -1.0
        out[new_span.index(mode.transposed())] = s * v / point.omega
    return SolutionPoint(1.0 / point.omega, out, 0.0), new_span
