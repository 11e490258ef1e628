"""Flat index k <-> block coordinates (q, j, eps).

Every k >= 1 is uniquely ``k = q^2 + 1/2 + eps*(2j - 1)/2`` with
``1 <= j <= q`` and ``eps = +-1``.  Block q occupies the indices
``q(q-1)+1 .. q(q+1)``: first ``eps = -1`` with j running q down to 1,
then ``eps = +1`` with j running 1 up to q.
"""

from __future__ import annotations

from math import isqrt
from typing import NamedTuple, Tuple


class BlockCoordinates(NamedTuple):
    q: int
    j: int
    eps: int


def _check_index(k: int) -> int:
    if isinstance(k, bool) or not isinstance(k, int):
        raise TypeError(f"index must be an int, got {type(k).__name__}")
    if k < 1:
        raise ValueError(f"index must be >= 1, got {k}")
    return k


def _check_pair(q: int, j: int) -> None:
    if q < 1:
        raise ValueError(f"block q must be >= 1, got {q}")
    if not 1 <= j <= q:
        raise ValueError(f"position j must lie in [1, {q}], got {j}")


def block_of(k: int) -> int:
    """Smallest q with ``q(q+1) >= k``."""
    _check_index(k)
    q = max(1, (isqrt(4 * k) - 1) // 2)
    while q * (q + 1) < k:
        q += 1
    while q > 1 and (q - 1) * q >= k:
        q -= 1
    return q


def block_range(q: int) -> Tuple[int, int]:
    """First and last flat index of block q (inclusive)."""
    if q < 1:
        raise ValueError(f"block q must be >= 1, got {q}")
    return q * (q - 1) + 1, q * (q + 1)


def decode(k: int) -> BlockCoordinates:
    q = block_of(k)
    if k <= q * q:
        return BlockCoordinates(q, q * q - k + 1, -1)
    return BlockCoordinates(q, k - q * q, 1)


def encode(c: BlockCoordinates | Tuple[int, int, int]) -> int:
    q, j, eps = c
    _check_pair(q, j)
    if eps == 1:
        return q * q + j
    if eps == -1:
        return q * q - j + 1
    raise ValueError(f"sign eps must be -1 or +1, got {eps}")


def coordinate(q: int, j: int) -> int:
    """Basis coordinate carrying the witness vector of (q, j).

    Triangular numbering keeps different blocks on disjoint coordinates.
    """
    _check_pair(q, j)
    return q * (q - 1) // 2 + j
