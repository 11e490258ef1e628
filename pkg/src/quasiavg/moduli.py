"""The convexity modulus C_q of l_p and an exhaustive-grid oracle for it.

``C_q`` is the largest quasi-norm of a convex combination of q vectors in
the unit ball.  In l_p it equals ``q^(1/p - 1)``, attained by equal
weights on q disjointly supported unit vectors.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import comb
from typing import List, Tuple

import numpy as np

from .block_index import coordinate
from .lp_space import SparseVector, check_exponent, linear_combine, quasi_norm

MAX_ORACLE_Q = 6
# Upper bound on (grid points) x (support/sign patterns) the oracle will evaluate.
ORACLE_BUDGET = 60_000_000


def concavity_modulus(q: int, p: float) -> float:
    if q < 1:
        raise ValueError(f"q must be >= 1, got {q}")
    p = check_exponent(p)
    if q == 1 or p == 1.0:
        return 1.0
    return float(q) ** (1.0 / p - 1.0)


@dataclass(frozen=True)
class WitnessFamily:
    q: int
    weights: Tuple[float, ...]
    vectors: Tuple[SparseVector, ...]

    def combination(self) -> SparseVector:
        return linear_combine(zip(self.weights, self.vectors))


def extremal_witness(q: int, p: float) -> WitnessFamily:
    """Uniform weights on the unit vectors ``e_coordinate(q, j)``, j = 1..q."""
    if q < 1:
        raise ValueError(f"q must be >= 1, got {q}")
    check_exponent(p)
    w = 1.0 / q
    return WitnessFamily(
        q=q,
        weights=(w,) * q,
        vectors=tuple(SparseVector.unit(coordinate(q, j)) for j in range(1, q + 1)),
    )


def _set_partitions(n: int):
    """All set partitions of range(n), as lists of blocks (restricted growth strings)."""
    def grow(prefix, top):
        if len(prefix) == n:
            yield list(prefix)
            return
        for label in range(top + 2):
            yield from grow(prefix + [label], max(top, label))

    for rgs in grow([0], 0) if n else iter([[]]):
        yield rgs


def _sign_patterns(q: int) -> List[np.ndarray]:
    """Signed incidence matrices (q x d) for every shared-support pattern.

    Vector j is ``sign_j * e_{label_j}``.  Labels come from a set partition of
    the q vectors; within each block the first member has sign +1, since
    flipping a whole block does not change the norm.
    """
    mats = []
    for labels in _set_partitions(q):
        d = max(labels) + 1
        free = [j for j in range(q) if labels.index(labels[j]) != j]
        for signs in itertools.product((1.0, -1.0), repeat=len(free)):
            m = np.zeros((q, d))
            for j in range(q):
                m[j, labels[j]] = 1.0
            for j, s in zip(free, signs):
                m[j, labels[j]] = s
            mats.append(m)
    return mats


def _simplex_grid(q: int, n: int) -> np.ndarray:
    """All weight vectors (a_1/n, ..., a_q/n) with positive integer a_j."""
    if q == 1:
        return np.ones((1, 1))
    cuts = np.array(list(itertools.combinations(range(1, n), q - 1)), dtype=np.int64)
    edges = np.hstack([np.zeros((len(cuts), 1), np.int64), cuts, np.full((len(cuts), 1), n)])
    return np.diff(edges, axis=1) / n


def modulus_sup_oracle(q: int, p: float, resolution: float) -> float:
    """Brute-force lower estimate of C_q in l_p.

    Maximizes ``||sum mu_j y_j||_p`` over the simplex grid of step
    ``resolution`` and over every assignment of signed unit basis vectors
    to the y_j, with supports either disjoint or shared.
    """
    p = check_exponent(p)
    if q < 1:
        raise ValueError(f"q must be >= 1, got {q}")
    if q > MAX_ORACLE_Q:
        raise ValueError(f"q={q} is beyond the oracle search budget (q <= {MAX_ORACLE_Q})")
    if not 0.0 < resolution <= 1.0:
        raise ValueError(f"resolution must lie in (0, 1], got {resolution}")
    n = max(q, int(round(1.0 / resolution)))
    patterns = _sign_patterns(q)
    if comb(n - 1, q - 1) * len(patterns) > ORACLE_BUDGET:
        raise ValueError(f"q={q} at resolution {resolution} is beyond the oracle search budget")
    mu = _simplex_grid(q, n)
    best = 0.0
    chunk = 200_000
    for m in patterns:
        for start in range(0, len(mu), chunk):
            x = np.abs(mu[start:start + chunk] @ m)
            if p == 1.0:
                vals = x.sum(axis=1)
            else:
                vals = (x ** p).sum(axis=1) ** (1.0 / p)
            best = max(best, float(vals.max()))
    return best


def witness_norm(q: int, p: float) -> float:
    """Quasi-norm of the extremal combination, evaluated on actual vectors."""
    return quasi_norm(extremal_witness(q, p).combination(), p)
