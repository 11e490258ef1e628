"""Finitely supported vectors in l_p and their p-norms.

Only the l_p model (0 < p <= 1) is provided.  Vectors are immutable maps
from positive integer coordinates to nonzero floats.
"""

from __future__ import annotations

import math
from typing import Iterable, Mapping, Tuple

# Only exact cancellation removes a coordinate.
TAU_ZERO = 1e-300


def check_exponent(p: float) -> float:
    """Return ``p`` as a float, or raise if it is not in (0, 1]."""
    p = float(p)
    if not (0.0 < p <= 1.0):
        raise ValueError(f"exponent p must lie in (0, 1], got {p!r}")
    return p


class SparseVector:
    """Immutable finitely supported real sequence indexed from 1."""

    __slots__ = ("_entries",)

    def __init__(self, entries: Mapping[int, float] | Iterable[Tuple[int, float]] = ()):
        items = entries.items() if isinstance(entries, Mapping) else entries
        clean = {}
        for i, c in items:
            if isinstance(i, bool) or not isinstance(i, int) or i < 1:
                raise ValueError(f"coordinates must be positive integers, got {i!r}")
            c = float(c)
            if abs(c) > TAU_ZERO:
                clean[i] = c
        self._entries = clean

    @classmethod
    def unit(cls, i: int, scale: float = 1.0) -> "SparseVector":
        return cls({i: scale})

    @classmethod
    def zero(cls) -> "SparseVector":
        return cls()

    def items(self):
        return sorted(self._entries.items())

    @property
    def support(self) -> Tuple[int, ...]:
        return tuple(sorted(self._entries))

    def is_zero(self) -> bool:
        return not self._entries

    def __getitem__(self, i: int) -> float:
        return self._entries.get(i, 0.0)

    def __len__(self) -> int:
        return len(self._entries)

    def __bool__(self) -> bool:
        return bool(self._entries)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SparseVector):
            return NotImplemented
        return self._entries == other._entries

    def __hash__(self) -> int:
        return hash(frozenset(self._entries.items()))

    def __neg__(self) -> "SparseVector":
        return SparseVector({i: -c for i, c in self._entries.items()})

    def __add__(self, other: "SparseVector") -> "SparseVector":
        if not isinstance(other, SparseVector):
            return NotImplemented
        return linear_combine([(1.0, self), (1.0, other)])

    def __sub__(self, other: "SparseVector") -> "SparseVector":
        if not isinstance(other, SparseVector):
            return NotImplemented
        return linear_combine([(1.0, self), (-1.0, other)])

    def __mul__(self, alpha: float) -> "SparseVector":
        alpha = float(alpha)
        return SparseVector({i: alpha * c for i, c in self._entries.items()})

    __rmul__ = __mul__

    def __truediv__(self, alpha: float) -> "SparseVector":
        alpha = float(alpha)
        return SparseVector({i: c / alpha for i, c in self._entries.items()})

    def __repr__(self) -> str:
        body = ", ".join(f"{i}: {c!r}" for i, c in self.items())
        return f"SparseVector({{{body}}})"


def linear_combine(terms: Iterable[Tuple[float, SparseVector]]) -> SparseVector:
    """Sum of ``scalar * vector`` over ``terms``, coordinate by coordinate.

    Each coordinate is summed with ``math.fsum``, so a pair of terms with
    equal magnitude and opposite sign cancels to an exact zero and the
    coordinate is dropped.
    """
    acc: dict[int, list[float]] = {}
    for alpha, v in terms:
        alpha = float(alpha)
        if alpha == 0.0:
            continue
        for i, c in v._entries.items():
            acc.setdefault(i, []).append(alpha * c)
    return SparseVector({i: math.fsum(parts) for i, parts in acc.items()})


def quasi_norm(v: SparseVector, p: float) -> float:
    """The l_p quasi-norm ``(sum |v_i|^p)^(1/p)``."""
    p = check_exponent(p)
    if v.is_zero():
        return 0.0
    mags = [abs(c) for c in v._entries.values()]
    if p == 1.0:
        return math.fsum(mags)
    # Scale by the largest entry so neither |v_i|^p nor the final power underflows.
    top = max(mags)
    s = math.fsum((m / top) ** p for m in mags)
    return top * s ** (1.0 / p)
