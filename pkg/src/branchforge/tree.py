"""The N-reducible tree: primary trunk plus the branches of reducible subsystems.

A subsystem of the N x N truncation is chosen when it contains the fundamental
mode, is reducible and has an all-modes-active solution below ``omega_max``;
every branch (solution with at least two active modes) of a chosen subsystem
belongs to the tree.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Iterable

import numpy as np

from .galerkin import AlgebraicSystem, pair_is_reducible, pattern_holds, reducible_pattern_check
from .modes import FUNDAMENTAL, ModeIndex, ModeSet, diagonal_truncation
from .reducible import (
    BranchSolution,
    OmegaInterval,
    attachments,
    primary_bifurcation,
    reducible_coefficients,
    shoot_of_primary_branch,
)


@dataclass(frozen=True)
class Endpoint:
    """Finite end of an element's domain: exact Omega^2 and E/pi, and what it lies on."""

    omega_sq: Fraction
    energy_over_pi: Fraction
    attaches_to: ModeSet | str  # a trunk/branch type, or "zero"

    @property
    def omega(self) -> float:
        return math.sqrt(self.omega_sq)

    @property
    def energy(self) -> float:
        return math.pi * float(self.energy_over_pi)

    def to_dict(self) -> dict:
        return {
            "omega_sq": [self.omega_sq.numerator, self.omega_sq.denominator],
            "energy_over_pi": [self.energy_over_pi.numerator, self.energy_over_pi.denominator],
            "attaches_to": self.attaches_to if isinstance(self.attaches_to, str) else self.attaches_to.as_pairs(),
        }


@dataclass(frozen=True)
class TreeElement:
    kind: str  # "trunk" | "branch"
    type_tag: ModeSet
    solution: BranchSolution
    endpoints: tuple[Endpoint, ...]

    def __post_init__(self) -> None:
        if self.kind == "trunk" and len(self.type_tag) != 1:
            raise ValueError("a trunk has exactly one mode")
        if self.kind == "branch" and len(self.type_tag) < 2:
            raise ValueError("a branch has at least two modes")

    @property
    def order(self) -> int:
        return len(self.type_tag)

    @property
    def is_primary_branch(self) -> bool:
        return self.kind == "branch" and self.order == 2 and FUNDAMENTAL in self.type_tag

    @property
    def category(self) -> str:
        if self.kind == "trunk":
            return "primary-trunk" if self.type_tag[0] == FUNDAMENTAL else "secondary-trunk"
        if self.order == 2:
            return "primary" if FUNDAMENTAL in self.type_tag else "secondary"
        return f"order-{self.order}"

    @property
    def interval(self) -> OmegaInterval:
        return self.solution.domain[0]

    def sample(self, count: int = 200, omega_max: float = 6.0) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(omega, energy, amplitudes) on the element's domain clipped to omega_max."""
        iv = self.interval
        lo = iv.lo.value
        hi = omega_max if iv.hi is None else min(iv.hi.value, omega_max)
        if hi <= lo:
            return np.zeros(0), np.zeros(0), np.zeros((0, self.order))
        om = np.linspace(lo, hi, count)
        amps = np.array([self.solution.amplitudes(w) for w in om])
        en = np.array([self.solution.energy(w) for w in om])
        return om, en, amps

    def to_dict(self) -> dict:
        iv = self.interval
        hi = [None, None] if iv.hi is None else iv.hi.as_pair()
        return {
            "kind": self.kind,
            "category": self.category,
            "type": self.type_tag.as_pairs(),
            "coeff_sq": [[p.numerator, p.denominator, q.numerator, q.denominator] for p, q in self.solution.coeff_sq],
            "domain": [iv.lo.as_pair() + hi],
            "endpoints": [e.to_dict() for e in self.endpoints],
        }


@dataclass(frozen=True)
class ReducibleTree:
    truncation: int
    omega_max: float | None
    elements: tuple[TreeElement, ...]
    stats: dict = field(default_factory=dict)

    @property
    def trunks(self) -> list[TreeElement]:
        return [e for e in self.elements if e.kind == "trunk"]

    @property
    def branches(self) -> list[TreeElement]:
        return [e for e in self.elements if e.kind == "branch"]

    def find(self, modes) -> TreeElement | None:
        key = modes if isinstance(modes, ModeSet) else ModeSet(modes)
        for e in self.elements:
            if e.type_tag == key:
                return e
        return None

    def stats_line(self) -> str:
        s = self.stats
        return f"N={self.truncation} trunks={s['trunks']} branches={s['branches']} primary={s['primary']}"

    def to_dict(self) -> dict:
        return {
            "truncation": self.truncation,
            "omega_max": self.omega_max,
            "stats": self.stats,
            "elements": [e.to_dict() for e in self.elements],
        }


# ----------------------------------------------------------------- construction
def _element(modes: ModeSet, solution: BranchSolution | None = None) -> TreeElement:
    sol = solution or reducible_coefficients(modes)
    iv = sol.domain[0]
    lower, upper = attachments(sol, iv)
    ends = []
    if iv.lo.square > 0:
        ends.append(Endpoint(iv.lo.square, sol.energy_over_pi(iv.lo.square), lower))
    if iv.hi is not None:
        ends.append(Endpoint(iv.hi.square, sol.energy_over_pi(iv.hi.square), upper))
    kind = "trunk" if len(modes) == 1 else "branch"
    return TreeElement(kind, modes, sol, tuple(ends))


def _in_window(sol: BranchSolution, omega_max: float | None) -> bool:
    dom = sol.domain
    if not dom:
        return False
    if omega_max is None:
        return True
    # exact test lo^2 < omega_max^2 when omega_max is rational-representable
    return dom[0].lo.square < Fraction(omega_max) ** 2


def _num_workers(workers: int | None) -> int:
    if workers is not None:
        return max(1, int(workers))
    env = os.environ.get("BRANCHFORGE_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError as exc:
            raise ValueError(f"BRANCHFORGE_THREADS must be an integer, got {env!r}") from exc
    return 1


def chosen_subsystems(N: int, max_order: int = 3, omega_max: float | None = 6.0,
                      workers: int | None = None) -> list[ModeSet]:
    """Reducible subsystems containing (0,0) whose full solution exists below omega_max."""
    if N < 1:
        raise ValueError("truncation must be positive")
    if max_order < 1:
        raise ValueError("max_order must be positive")
    span = diagonal_truncation(N)
    partners = [x for x in span if x != FUNDAMENTAL and pair_is_reducible(FUNDAMENTAL, x)]
    chosen = [ModeSet([FUNDAMENTAL])]

    def grow(level: list[tuple[ModeIndex, ...]]) -> list[tuple[ModeIndex, ...]]:
        # extend each reducible tuple by a later partner, re-checking only new monomials
        def extend(t):
            out = []
            start = partners.index(t[-1]) + 1 if t else 0
            for x in partners[start:]:
                if all(pair_is_reducible(y, x) for y in t) and pattern_holds((FUNDAMENTAL,) + t + (x,), new=(x,)):
                    out.append(t + (x,))
            return out

        n = _num_workers(workers)
        if n > 1 and len(level) > 1:
            with ThreadPoolExecutor(n) as pool:
                parts = list(pool.map(extend, level))
        else:
            parts = [extend(t) for t in level]
        return [t for part in parts for t in part]

    level: list[tuple[ModeIndex, ...]] = [()]
    for _ in range(1, max_order):
        level = grow(level)
        for t in level:
            modes = ModeSet((FUNDAMENTAL,) + t)
            if _in_window(reducible_coefficients(modes), omega_max):
                chosen.append(modes)
    return chosen


def build_tree(N: int, max_order: int = 3, omega_max: float | None = 6.0,
               workers: int | None = None, verify: bool = True) -> ReducibleTree:
    """Primary trunk plus every branch of every chosen subsystem, in canonical order.

    Branches are ordered by (order, modes).  ``verify`` re-checks each chosen
    subsystem with the assembled integer coefficient table.
    """
    if omega_max is not None and omega_max <= 1:
        raise ValueError("omega_max must exceed 1")
    chosen = chosen_subsystems(N, max_order, omega_max, workers)
    branch_sets: set[ModeSet] = set()
    for S in chosen:
        if verify:
            ok, witness = reducible_pattern_check(AlgebraicSystem(S))
            if not ok:
                raise AssertionError(f"fast reducibility test disagrees on {S}: {witness}")
        for r in range(2, len(S) + 1):
            for sub in combinations(S, r):
                T = ModeSet(sub)
                if T not in branch_sets and _in_window(reducible_coefficients(T), omega_max):
                    branch_sets.add(T)
    elements = [_element(ModeSet([FUNDAMENTAL]))]
    for T in sorted(branch_sets, key=lambda s: (len(s), tuple(s))):
        elements.append(_element(T))
    return ReducibleTree(N, omega_max, tuple(elements), _stats(elements))


def _stats(elements: list[TreeElement]) -> dict:
    branches = [e for e in elements if e.kind == "branch"]
    by_order: dict[str, int] = {}
    for e in branches:
        by_order[str(e.order)] = by_order.get(str(e.order), 0) + 1
    return {
        "trunks": sum(1 for e in elements if e.kind == "trunk"),
        "branches": len(branches),
        "primary": sum(1 for e in branches if e.is_primary_branch),
        "secondary": sum(1 for e in branches if e.order == 2 and not e.is_primary_branch),
        "by_order": dict(sorted(by_order.items())),
    }


def primary_branch_count(N: int) -> int:
    """Number of primary branches of the N-reducible tree, checked against (N-2)(N-1)/2."""
    if N < 2:
        raise ValueError("need N >= 2")
    tree = build_tree(N, max_order=2, omega_max=None)
    count = tree.stats["primary"]
    expected = (N - 2) * (N - 1) // 2
    if count != expected:
        raise AssertionError(f"N={N}: tree has {count} primary branches, formula gives {expected}")
    return count


# -------------------------------------------------------------------- rescaling
def rescale_mode(mode: ModeIndex, n: int, m: int) -> ModeIndex:
    return ModeIndex((m * mode.temporal - 1) // 2, (n * mode.spatial - 1) // 2)


def rescale_solution(sol: BranchSolution, n: int, m: int) -> BranchSolution:
    """Image under (u, Omega) -> (n u(m tau, n x), n Omega / m)."""
    _check_scaling(n, m)
    modes = [rescale_mode(x, n, m) for x in sol.mode_set]
    coeffs = dict(zip(modes, ((p * m * m, q * n * n) for p, q in sol.coeff_sq)))
    new_set = ModeSet(modes)
    return BranchSolution(new_set, tuple(coeffs[x] for x in new_set))


def _check_scaling(n: int, m: int) -> None:
    for v, name in ((n, "n"), (m, "m")):
        if not isinstance(v, int) or v < 1:
            raise ValueError(f"{name} must be a positive integer")
        if v % 2 == 0:
            raise ValueError(f"{name}={v} is even: the image leaves the odd-harmonic basis")


def rescale_tree(tree: ReducibleTree, n: int, m: int) -> ReducibleTree:
    """Rescaled copy of ``tree``: frequencies scale by n/m, amplitudes by n, energies by n^4."""
    _check_scaling(n, m)
    elements = [_element(ModeSet(rescale_mode(x, n, m) for x in e.type_tag), rescale_solution(e.solution, n, m))
                for e in tree.elements]
    omax = None if tree.omega_max is None else tree.omega_max * n / m
    return ReducibleTree(tree.truncation, omax, tuple(elements), _stats(elements))


# ------------------------------------------------------------------ asymptotics
@dataclass(frozen=True)
class LowestBranchRow:
    N: int
    omega_offset: float  # Omega_bif - 1
    shoot_energy: float


def lowest_branch_asymptotics(N_range: Iterable[int]) -> list[LowestBranchRow]:
    """Lowest primary branch (m, n) = (N-2, N-1): trunk bifurcation offset and shoot energy."""
    rows = []
    for N in N_range:
        if N < 3:
            raise ValueError("need N >= 3")
        m, n = N - 2, N - 1
        rows.append(LowestBranchRow(N, primary_bifurcation(m, n).value - 1.0, shoot_of_primary_branch(m, n).energy))
    return rows


# ---------------------------------------------------------------- order-4 scan
def _pair_domain(a: ModeIndex, b: ModeIndex) -> tuple[Fraction, Fraction | None] | None:
    dom = reducible_coefficients([a, b]).domain
    if not dom:
        return None
    iv = dom[0]
    return iv.lo.square, None if iv.hi is None else iv.hi.square


def _meet(*ivs):
    lo = max(iv[0] for iv in ivs)
    his = [iv[1] for iv in ivs if iv[1] is not None]
    hi = min(his) if his else None
    return None if hi is not None and hi <= lo else (lo, hi)


def order_scan(order: int, max_index: int) -> list[ModeSet]:
    """All types of the given order containing (0,0), with indices <= max_index, that are
    reducible and have a non-empty positivity domain.

    Pruning: the positivity domain of an N-mode solution lies inside the domain of
    the two-mode formula of every pair it contains, so candidates are cliques of
    reducible pairs whose pair domains have a common point.
    """
    if order < 2:
        raise ValueError("order must be at least 2")
    nodes = []
    base = {}
    for m in range(1, max_index + 1):
        for n in range(1, max_index + 1):
            x = ModeIndex(m, n)
            if pair_is_reducible(FUNDAMENTAL, x):
                d = _pair_domain(FUNDAMENTAL, x)
                if d is not None:
                    nodes.append(x)
                    base[x] = d
    nodes.sort()
    adj: dict[ModeIndex, dict[ModeIndex, tuple]] = {x: {} for x in nodes}
    for i, a in enumerate(nodes):
        for b in nodes[i + 1:]:
            if a.m == b.m or a.n == b.n:
                continue
            d = _pair_domain(a, b)
            if d is None:
                continue
            w = _meet(base[a], base[b], d)
            if w is None or not pair_is_reducible(a, b):
                continue
            adj[a][b] = w

    found: list[ModeSet] = []

    def search(chosen: list[ModeIndex], window, cands: list[ModeIndex]):
        if len(chosen) == order - 1:
            modes = ModeSet([FUNDAMENTAL] + chosen)
            if pattern_holds(list(modes)) and reducible_coefficients(modes).domain:
                found.append(modes)
            return
        for i, x in enumerate(cands):
            w = _meet(window, adj[chosen[-1]][x]) if chosen else base[x]
            if w is None:
                continue
            for y in chosen[:-1]:
                w = _meet(w, adj[y][x])
                if w is None:
                    break
            if w is None:
                continue
            nxt = [y for y in cands[i + 1:] if y in adj[x]]
            search(chosen + [x], w, nxt)

    search([], None, nodes)
    return sorted(found, key=lambda s: tuple(s))
