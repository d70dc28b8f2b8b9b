"""Fourier modes cos((2m+1)tau) sin((2n+1)x) and their quartic overlap integrals.

Overlaps are returned as exact integers in units of pi/8, so that

    int_0^pi cos(i x) cos(j x) cos(k x) cos(l x) dx = (pi/8) * cos_overlap(i, j, k, l)

and likewise for the sine product.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence


@dataclass(frozen=True, order=True)
class ModeIndex:
    """Temporal index m and spatial index n of the mode cos((2m+1)tau) sin((2n+1)x)."""

    m: int
    n: int

    def __post_init__(self) -> None:
        if not (isinstance(self.m, int) and isinstance(self.n, int)):
            raise TypeError(f"mode indices must be integers, got ({self.m!r}, {self.n!r})")
        if self.m < 0 or self.n < 0:
            raise ValueError(f"mode indices must be non-negative, got ({self.m}, {self.n})")

    @property
    def temporal(self) -> int:
        return 2 * self.m + 1

    @property
    def spatial(self) -> int:
        return 2 * self.n + 1

    @property
    def linear_frequency(self) -> float:
        """Frequency at which the one-mode trunk leaves the zero solution."""
        return self.spatial / self.temporal

    def transposed(self) -> "ModeIndex":
        return ModeIndex(self.n, self.m)

    def tag(self) -> str:
        return f"a_{self.m}_{self.n}"

    def __str__(self) -> str:
        return f"({self.m},{self.n})"


FUNDAMENTAL = ModeIndex(0, 0)


def as_mode(obj) -> ModeIndex:
    if isinstance(obj, ModeIndex):
        return obj
    m, n = obj
    return ModeIndex(int(m), int(n))


class ModeSet(Sequence[ModeIndex]):
    """Immutable, duplicate-free, lexicographically ordered collection of modes."""

    __slots__ = ("_modes", "_pos")

    def __init__(self, modes: Iterable = ()):
        items = [as_mode(x) for x in modes]
        seen: set[ModeIndex] = set()
        for x in items:
            if x in seen:
                raise ValueError(f"duplicate mode {x} in mode set")
            seen.add(x)
        self._modes = tuple(sorted(items))
        self._pos = {mode: i for i, mode in enumerate(self._modes)}

    def __getitem__(self, i):
        return self._modes[i]

    def __len__(self) -> int:
        return len(self._modes)

    def __iter__(self) -> Iterator[ModeIndex]:
        return iter(self._modes)

    def __contains__(self, mode) -> bool:
        return as_mode(mode) in self._pos

    def __eq__(self, other) -> bool:
        return isinstance(other, ModeSet) and self._modes == other._modes

    def __hash__(self) -> int:
        return hash(self._modes)

    def __repr__(self) -> str:
        return "ModeSet([" + ", ".join(str(x) for x in self._modes) + "])"

    def index(self, mode, *args) -> int:  # type: ignore[override]
        return self._pos[as_mode(mode)]

    def union(self, other: Iterable) -> "ModeSet":
        return ModeSet(set(self._modes) | {as_mode(x) for x in other})

    def without(self, mode) -> "ModeSet":
        mode = as_mode(mode)
        return ModeSet(x for x in self._modes if x != mode)

    def transposed(self) -> "ModeSet":
        return ModeSet(x.transposed() for x in self._modes)

    def as_pairs(self) -> list[list[int]]:
        return [[x.m, x.n] for x in self._modes]


def parse_modes(text: str) -> ModeSet:
    """Parse a list like ``"(0,0),(1,2)"``; duplicates raise ValueError."""
    import re

    pairs = re.findall(r"\(\s*(\d+)\s*,\s*(\d+)\s*\)", text)
    leftover = re.sub(r"\(\s*\d+\s*,\s*\d+\s*\)", "", text).replace(",", "").strip()
    if not pairs or leftover:
        raise ValueError(f"cannot parse mode list {text!r}")
    return ModeSet((int(m), int(n)) for m, n in pairs)


def _check_odd(*args: int) -> None:
    for v in args:
        if not isinstance(v, int) or v <= 0 or v % 2 == 0:
            raise ValueError(f"overlap arguments must be odd positive integers, got {args}")


def _delta_terms(i: int, j: int, k: int) -> tuple[int, ...]:
    # Order matches the sign pattern (+,+,+,-,-,-,-) of the sine overlap.
    return (-i + j + k, i - j + k, i + j - k, i + j + k, -i - j + k, -i + j - k, i - j - k)


_SIN_SIGNS = (1, 1, 1, -1, -1, -1, -1)


def cos_overlap(i: int, j: int, k: int, l: int) -> int:
    """Integral of cos(ix)cos(jx)cos(kx)cos(lx) over [0, pi], in units of pi/8."""
    _check_odd(i, j, k, l)
    return sum(1 for v in _delta_terms(i, j, k) if v == l)


def sin_overlap(i: int, j: int, k: int, l: int) -> int:
    """Integral of sin(ix)sin(jx)sin(kx)sin(lx) over [0, pi], in units of pi/8."""
    _check_odd(i, j, k, l)
    return sum(s for s, v in zip(_SIN_SIGNS, _delta_terms(i, j, k)) if v == l)


def diagonal_truncation(N: int) -> ModeSet:
    """The N*N modes with 0 <= m, n <= N-1."""
    if not isinstance(N, int) or N < 1:
        raise ValueError(f"truncation must be a positive integer, got {N!r}")
    return ModeSet((m, n) for m in range(N) for n in range(N))
