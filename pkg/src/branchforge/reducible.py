"""Closed-form solutions of reducible systems.

A reducible system on modes (M_k, N_k) = (2m_k+1, 2n_k+1) reads

    A_k [9 A_k^2 + 12 sum_{j!=k} A_j^2] = 16 (M_k^2 Omega^2 - N_k^2) A_k,

so the squares of the non-zero amplitudes solve a linear system.  Every square
is affine in w = Omega^2 with exact rational coefficients, and every interval
endpoint is the square root of a rational; both are kept exact here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .galerkin import AlgebraicSystem, PatternWitness, energy, reducible_pattern_check
from .modes import FUNDAMENTAL, ModeIndex, ModeSet, as_mode


class NotReducibleError(ValueError):
    """Raised for mode sets whose cubic terms do not follow the 9/12 pattern."""

    def __init__(self, modes: ModeSet, witness: PatternWitness | None):
        self.modes = modes
        self.witness = witness
        super().__init__(f"mode set {list(map(str, modes))} is not reducible: {witness}")


@dataclass(frozen=True, order=True)
class SqrtRational:
    """The non-negative number sqrt(square) with rational ``square``."""

    square: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "square", Fraction(self.square))
        if self.square < 0:
            raise ValueError("square must be non-negative")

    def __float__(self) -> float:
        return math.sqrt(self.square.numerator / self.square.denominator) if self.square else 0.0

    @property
    def value(self) -> float:
        return float(self)

    def as_pair(self) -> list[int]:
        return [self.square.numerator, self.square.denominator]

    def __str__(self) -> str:
        return f"sqrt({self.square})"


@dataclass(frozen=True)
class OmegaInterval:
    """Open interval (lo, hi) of frequencies; ``hi`` None means unbounded."""

    lo: SqrtRational
    hi: SqrtRational | None

    def contains(self, omega: float) -> bool:
        return omega > self.lo.value and (self.hi is None or omega < self.hi.value)

    def contains_square(self, w: Fraction) -> bool:
        return w > self.lo.square and (self.hi is None or w < self.hi.square)

    def clip(self, omega_max: float | None) -> "OmegaInterval | None":
        """Intersection with (0, omega_max]; None if empty.  Endpoints stay exact."""
        if omega_max is None:
            return self
        return self if self.lo.value < omega_max else None

    def __str__(self) -> str:
        return f"({self.lo}, {self.hi if self.hi is not None else 'inf'})"


@dataclass(frozen=True)
class BranchSolution:
    """Exact squares A_k^2 = p_k Omega^2 + q_k of a reducible N-mode solution."""

    mode_set: ModeSet
    coeff_sq: tuple[tuple[Fraction, Fraction], ...]

    @property
    def order(self) -> int:
        return len(self.mode_set)

    @property
    def orbit_size(self) -> int:
        """Number of sign-flipped copies; the canonical one has all amplitudes >= 0."""
        return 2 ** self.order

    @property
    def domain(self) -> list[OmegaInterval]:
        if "_domain" not in self.__dict__:
            object.__setattr__(self, "_domain", tuple(positivity_domain(self)))
        return list(self.__dict__["_domain"])

    def squares_exact(self, w) -> tuple[Fraction, ...]:
        w = Fraction(w)
        return tuple(p * w + q for p, q in self.coeff_sq)

    def squares(self, omega: float) -> np.ndarray:
        w = omega * omega
        return np.array([float(p) * w + float(q) for p, q in self.coeff_sq])

    def amplitudes(self, omega: float) -> np.ndarray:
        """Canonical (non-negative) amplitudes; tiny negative squares from rounding are clipped."""
        sq = self.squares(omega)
        if np.any(sq < -1e-9 * max(1.0, float(np.max(np.abs(sq))))):
            raise ValueError(f"omega={omega} is outside the positivity domain")
        return np.sqrt(np.clip(sq, 0.0, None))

    def energy(self, omega: float) -> float:
        return energy(omega, self.amplitudes(omega), self.mode_set)

    def energy_over_pi(self, w) -> Fraction:
        """Exact E/pi at Omega^2 = w, for sets whose spatial indices are distinct."""
        ns = [x.n for x in self.mode_set]
        if len(set(ns)) != len(ns):
            raise ValueError("exact energy needs distinct spatial indices")
        w = Fraction(w)
        return w / 4 * sum(x.temporal**2 * s for x, s in zip(self.mode_set, self.squares_exact(w)))

    def vanishing_at(self, w) -> tuple[ModeIndex, ...]:
        """Modes whose exact square is zero at Omega^2 = w."""
        return tuple(x for x, s in zip(self.mode_set, self.squares_exact(w)) if s == 0)


def _as_set(modes) -> ModeSet:
    return modes if isinstance(modes, ModeSet) else ModeSet(modes)


def reducible_coefficients(modes: Iterable) -> BranchSolution:
    """Closed-form squares for ``modes`` without checking reducibility."""
    return _coefficients(_as_set(modes))


@lru_cache(maxsize=1 << 16)
def _coefficients(span: ModeSet) -> BranchSolution:
    N = len(span)
    if N == 0:
        raise ValueError("empty mode set")
    beta = Fraction(4, 3 * (4 * N - 1))
    sigma = beta * sum(x.temporal**2 for x in span)
    xi = beta * sum(x.spatial**2 for x in span)
    coeffs = tuple(
        (16 * (sigma - Fraction(x.temporal**2, 3)), -16 * (xi - Fraction(x.spatial**2, 3))) for x in span
    )
    return BranchSolution(span, coeffs)


def alpha_beta(N: int) -> tuple[Fraction, Fraction]:
    """Entries of the inverse of the 9/12 matrix: diagonal alpha_N, off-diagonal beta_N (times 3)."""
    return Fraction(-(4 * N - 5), 3 * (4 * N - 1)), Fraction(4, 3 * (4 * N - 1))


def n_mode_solution(modes: Iterable) -> BranchSolution:
    """Closed form of the all-modes-active solution of a reducible system."""
    span = _as_set(modes)
    ok, witness = reducible_pattern_check(AlgebraicSystem(span))
    if not ok:
        raise NotReducibleError(span, witness)
    return reducible_coefficients(span)


def positivity_domain(solution: BranchSolution) -> list[OmegaInterval]:
    """Frequencies where every square is positive: [] or a single interval."""
    lo, hi = Fraction(0), None
    for p, q in solution.coeff_sq:
        if p > 0:
            lo = max(lo, -q / p)
        elif p < 0:
            bound = -q / p
            hi = bound if hi is None else min(hi, bound)
        elif q <= 0:
            return []
        if hi is not None and hi <= lo:
            return []
    return [OmegaInterval(SqrtRational(lo), None if hi is None else SqrtRational(hi))]


# ------------------------------------------------------------------- eta values
def eta(m1: int, m2: int) -> int:
    return 1 + 16 * m1 * (m1 + 1) - 12 * m2 * (m2 + 1)


def eta_A(m1: int, m2: int) -> int:
    return 1 + 16 * m1 * (m1 + 1) + 16 * m2 * (m2 + 1)


def eta_B(m1: int, m2: int) -> int:
    return 1 + 16 * m1 * (m1 + 1) - 28 * m2 * (m2 + 1)


# ------------------------------------------------------------- classification
TWO_MODE_LABELS = ("branch-from-trunk-1", "branch-from-trunk-2", "branch-from-zero", "connecting-branch", "no-branch")


@dataclass(frozen=True)
class TwoModeClass:
    label: str
    case: int  # 1, 2, 3 from the signs of eta(m2,m1), eta(m1,m2)
    interval: OmegaInterval | None
    attachments: tuple  # (lower end, upper end); each a ModeSet, "zero" or None (unbounded)


def _attachment(solution: BranchSolution, w: Fraction):
    dead = set(solution.vanishing_at(w))
    rest = ModeSet(x for x in solution.mode_set if x not in dead)
    return "zero" if len(rest) == 0 else rest


def attachments(solution: BranchSolution, interval: OmegaInterval) -> tuple:
    lower = _attachment(solution, interval.lo.square) if interval.lo.square > 0 else "zero"
    upper = None if interval.hi is None else _attachment(solution, interval.hi.square)
    return lower, upper


def _compare_ratio(a: ModeIndex, b: ModeIndex) -> int:
    """Sign of N_a/M_a - N_b/M_b by cross-multiplication."""
    d = a.spatial * b.temporal - b.spatial * a.temporal
    return (d > 0) - (d < 0)


def _two_mode_label(b1: ModeIndex, b2: ModeIndex) -> tuple[int, str]:
    em21, em12 = eta(b2.m, b1.m), eta(b1.m, b2.m)
    en21, en12 = eta(b2.n, b1.n), eta(b1.n, b2.n)
    order = _compare_ratio(b1, b2)  # -1: Omega_1 < Omega_2
    if em21 > 0 and em12 > 0:
        return 1, {-1: "branch-from-trunk-2", 0: "branch-from-zero", 1: "branch-from-trunk-1"}[order]
    if em21 > 0:
        return 2, "connecting-branch" if en12 < 0 and order < 0 else "no-branch"
    return 3, "connecting-branch" if en21 < 0 and order > 0 else "no-branch"


def classify_two_mode(b1, b2) -> TwoModeClass:
    """Table-style classification of the two-mode solution of a reducible pair.

    The label comes from the eta signs and the order of the linear
    frequencies; the interval and end attachments come from the exact closed form.
    """
    b1, b2 = as_mode(b1), as_mode(b2)
    sol = n_mode_solution([b1, b2])
    # keep the caller's numbering: coefficients are stored in canonical order
    case, label = _two_mode_label(b1, b2)
    dom = sol.domain
    if not dom:
        return TwoModeClass(label, case, None, (None, None))
    iv = dom[0]
    return TwoModeClass(label, case, iv, attachments(sol, iv))


@dataclass(frozen=True)
class ThreeModeClass:
    case: int  # 1: both eta_B < 0; 2: eta_B(m2,m1) > 0; 3: eta_B(m1,m2) > 0
    interval: OmegaInterval | None
    attachments: tuple


def classify_three_mode(b1, b2) -> ThreeModeClass:
    """Three-mode solution on {(0,0), b1, b2}: case, exact interval and what it connects."""
    b1, b2 = as_mode(b1), as_mode(b2)
    if FUNDAMENTAL in (b1, b2):
        raise ValueError("pass the two non-fundamental modes")
    sol = n_mode_solution([FUNDAMENTAL, b1, b2])
    e21, e12 = eta_B(b2.m, b1.m), eta_B(b1.m, b2.m)
    if e21 > 0 and e12 > 0:
        raise AssertionError("eta_B(m1,m2) and eta_B(m2,m1) cannot both be positive")
    case = 2 if e21 > 0 else 3 if e12 > 0 else 1
    dom = sol.domain
    if not dom:
        return ThreeModeClass(case, None, (None, None))
    return ThreeModeClass(case, dom[0], attachments(sol, dom[0]))


def three_mode_closed_form(b1: ModeIndex, b2: ModeIndex) -> tuple[tuple[Fraction, Fraction], ...]:
    """(p, q) of A^2, B1^2, B2^2 written with eta_A and eta_B."""
    c = Fraction(16, 33)
    return (
        (c * eta_A(b1.m, b2.m), -c * eta_A(b1.n, b2.n)),
        (c * eta_B(b2.m, b1.m), -c * eta_B(b2.n, b1.n)),
        (c * eta_B(b1.m, b2.m), -c * eta_B(b1.n, b2.n)),
    )


def two_mode_closed_form(b1: ModeIndex, b2: ModeIndex) -> tuple[tuple[Fraction, Fraction], ...]:
    c = Fraction(16, 21)
    return ((c * eta(b2.m, b1.m), -c * eta(b2.n, b1.n)), (c * eta(b1.m, b2.m), -c * eta(b1.n, b2.n)))


# --------------------------------------------------------------------- shoots
@dataclass(frozen=True)
class Shoot:
    omega: SqrtRational
    energy_over_pi: Fraction

    @property
    def energy(self) -> float:
        return math.pi * float(self.energy_over_pi)


def shoot_of_primary_branch(m: int, n: int) -> Shoot:
    """Highest-energy end of the primary branch {(0,0),(m,n)}, on the (m,n)-trunk."""
    if m >= n:
        raise ValueError("a primary branch needs m < n")
    if m < 1:
        raise ValueError("a primary branch needs m >= 1")
    a = 16 * m * m + 16 * m + 1
    b = 16 * n * n + 16 * n + 1
    e = Fraction(16 * (2 * m + 1) ** 2 * b * (n - m) * (m + n + 1), 3 * a * a)
    return Shoot(SqrtRational(Fraction(b, a)), e)


def primary_bifurcation(m: int, n: int) -> SqrtRational:
    """Frequency where the primary branch {(0,0),(m,n)} leaves the primary trunk."""
    return SqrtRational(Fraction(12 * n * n + 12 * n - 1, 12 * m * m + 12 * m - 1))


def primary_energy_bounds(m: int, n: int) -> tuple[Fraction, Fraction]:
    """Bounds on E/pi along the primary branch {(0,0),(m,n)}."""
    scale = Fraction(16, 3) * (n - m) * (m + n + 1)
    lo = Fraction(12 * n * n + 12 * n - 1, (12 * m * m + 12 * m - 1) ** 2)
    hi = Fraction((2 * m + 1) ** 2 * (16 * n * n + 16 * n + 1), (16 * m * m + 16 * m + 1) ** 2)
    return scale * lo, scale * hi


def sample_branch(solution: BranchSolution, count: int, omega_max: float | None = None,
                  omega_cap: float = 6.0) -> np.ndarray:
    """Omega samples spanning the (clipped) domain, endpoints included."""
    dom = solution.domain
    if not dom:
        return np.zeros(0)
    iv = dom[0]
    lo = iv.lo.value
    hi = iv.hi.value if iv.hi is not None else max(omega_cap, lo + 1.0)
    if omega_max is not None:
        hi = min(hi, omega_max)
    if hi <= lo:
        return np.zeros(0)
    return np.linspace(lo, hi, count)


def sign_orbit(amplitudes: Sequence[float]) -> list[np.ndarray]:
    """All 2^N sign flips of an amplitude vector."""
    a = np.asarray(amplitudes, dtype=float)
    out = []
    for k in range(2 ** len(a)):
        s = np.array([-1.0 if (k >> i) & 1 else 1.0 for i in range(len(a))])
        out.append(s * a)
    return out
