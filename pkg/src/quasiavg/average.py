"""Exact integrals and averages of tent-sum functions.

Everything here is closed form per tent: the integral of a tent from its
left end up to relative position tau is ``lambda * H(tau)`` with
``H(tau) = 2 tau^2`` on the rising half and ``1 - 2 (1 - tau)^2`` on the
falling half.  No quadrature is used anywhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple

from .block_index import block_of, block_range
from .construction import (
    ConstructionSpec,
    TentInterval,
    Verdict,
    block_start,
    f_component,
    f_eval,
    half_block_nodes,
    interval,
    limit_verdicts,
    locate,
    partial_sum,
    x_vector,
)
from .lp_space import SparseVector, linear_combine, quasi_norm


class UndefinedExtensionError(ArithmeticError):
    """Ave[f] has no separately continuous extension to (1, 1)."""


@dataclass(frozen=True)
class AverageSample:
    s: float
    t: float
    value: Optional[SparseVector]
    norm: float


@dataclass(frozen=True)
class TaggedPartition:
    nodes: Tuple[float, ...]
    tags: Tuple[float, ...]

    def __post_init__(self):
        nodes, tags = tuple(map(float, self.nodes)), tuple(map(float, self.tags))
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "tags", tags)
        if len(nodes) < 2 or nodes[0] != 0.0 or nodes[-1] != 1.0:
            raise ValueError("partition nodes must run from 0 to 1")
        if len(tags) != len(nodes) - 1:
            raise ValueError("need exactly one tag per subinterval")
        for a, b, x in zip(nodes, nodes[1:], tags):
            if not a < b:
                raise ValueError("partition nodes must be strictly increasing")
            if not a <= x <= b:
                raise ValueError(f"tag {x!r} lies outside [{a!r}, {b!r}]")

    @property
    def mesh(self) -> float:
        return max(b - a for a, b in zip(self.nodes, self.nodes[1:]))

    @classmethod
    def uniform(cls, n: int, tag: str = "midpoint") -> "TaggedPartition":
        """n equal cells; ``tag`` is ``left``, ``midpoint`` or ``right``."""
        if n < 1:
            raise ValueError("need at least one cell")
        offset = {"left": 0.0, "midpoint": 0.5, "right": 1.0}[tag]
        nodes = [i / n for i in range(n + 1)]
        tags = [(i + offset) / n for i in range(n)]
        return cls(tuple(nodes), tuple(tags))


def _H(tau: float) -> float:
    if tau <= 0.5:
        return 2.0 * tau * tau
    r = 1.0 - tau
    return 1.0 - 2.0 * r * r


def _overlap_weight(iv: TentInterval, s: float, t: float) -> float:
    lo, hi = max(s, iv.left), min(t, iv.right)
    if not hi > lo:
        return 0.0
    width = iv.right - iv.left
    tau_lo = 0.0 if lo == iv.left else (lo - iv.left) / width
    tau_hi = 1.0 if hi == iv.right else (hi - iv.left) / width
    return iv.length * (_H(tau_hi) - _H(tau_lo))


def block_weight(spec: ConstructionSpec, k: int, s: float, t: float) -> float:
    """Integral of the k-th scalar tent over [s, t]."""
    if s > t:
        raise ValueError(f"block_weight needs s <= t, got s={s!r}, t={t!r}")
    return _overlap_weight(interval(spec, k), s, t)


def integral(spec: ConstructionSpec, s: float, t: float) -> SparseVector:
    """The Riemann integral of f over [s, t], exact per tent."""
    if not 0.0 <= s <= t <= 1.0:
        raise ValueError(f"integral needs 0 <= s <= t <= 1, got s={s!r}, t={t!r}")
    if s == t:
        return SparseVector()
    iv_s = locate(spec, s)
    if t < 1.0:
        iv_t = locate(spec, t)
        if iv_t.k == iv_s.k:
            return x_vector(spec, iv_s.k) * _overlap_weight(iv_s, s, t)
        k_end = iv_t.k - 1
    else:
        iv_t = None
        # everything after the block of k_s+1 cancels block by block
        k_end = block_range(block_of(iv_s.k + 1))[1]

    terms = [(_overlap_weight(iv_s, s, iv_s.right), x_vector(spec, iv_s.k))]
    if iv_s.k + 1 <= k_end:
        terms.append((1.0, partial_sum(spec, iv_s.k + 1, k_end)))
    if iv_t is not None:
        terms.append((_overlap_weight(iv_t, iv_t.left, t), x_vector(spec, iv_t.k)))
    return linear_combine(terms)


def primitive(spec: ConstructionSpec, t: float) -> SparseVector:
    """F(t) = integral of f over [0, t]."""
    return integral(spec, 0.0, t)


def ave(spec: ConstructionSpec, s: float, t: float) -> AverageSample:
    """Ave[f](s, t): the mean of f between s and t, f(c) on the diagonal.

    At (1, 1) the value is 0 when Ave[f] extends separately continuously,
    and ``UndefinedExtensionError`` is raised otherwise.
    """
    for w in (s, t):
        if not 0.0 <= w <= 1.0:
            raise ValueError(f"ave is defined on [0, 1]^2, got ({s!r}, {t!r})")
    if s == t:
        if s == 1.0:
            verdict = limit_verdicts(spec)["separately_continuous"]
            if verdict is not Verdict.HOLDS:
                raise UndefinedExtensionError(
                    f"Ave[f] has no separately continuous extension to (1, 1) "
                    f"({spec.variant.value}: {verdict.value})")
            value = SparseVector()
        else:
            value = f_eval(spec, s)
    else:
        lo, hi = (s, t) if s < t else (t, s)
        value = integral(spec, lo, hi) / (hi - lo)
    return AverageSample(s, t, value, quasi_norm(value, spec.p))


def riemann_sum(spec: ConstructionSpec, partition: TaggedPartition) -> SparseVector:
    """sum_i (u_i - u_{i-1}) f(xi_i)."""
    acc: dict = {}
    nodes = partition.nodes
    for a, b, x in zip(nodes, nodes[1:], partition.tags):
        comp = f_component(spec, x)
        if comp is not None:
            acc.setdefault(comp[0], []).append((b - a) * comp[1])
    return SparseVector({i: math.fsum(v) for i, v in acc.items()})


def aligned_points(spec: ConstructionSpec, q_lo: int, q_hi: int) -> List[float]:
    """Block starts and half-block nodes for blocks q_lo..q_hi, plus the start of q_hi+1."""
    pts = set()
    for q in range(q_lo, q_hi + 1):
        pts.add(block_start(spec, q))
        pts.add(half_block_nodes(spec, q)[0])
    pts.add(block_start(spec, q_hi + 1))
    return sorted(u for u in pts if u < 1.0)


def _pair_max(spec: ConstructionSpec, pts: Sequence[float]) -> float:
    best = 0.0
    for i, s in enumerate(pts):
        for t in pts[i + 1:]:
            if t > s:
                best = max(best, ave(spec, s, t).norm)
    return best


def lipschitz_quotient(spec: ConstructionSpec, grid_size: int,
                       align_q: Optional[int] = None) -> float:
    """max ||Ave[f](s, t)|| over pairs s < t of grid points.

    This is a lower bound for the Lipschitz quasi-norm of the primitive.
    The grid is ``grid_size`` uniform points of [0, 1], plus block starts and
    half-block nodes of blocks 1..align_q when ``align_q`` is given.
    """
    if grid_size < 2:
        raise ValueError("grid_size must be >= 2")
    pts = {i / (grid_size - 1) for i in range(grid_size)}
    if align_q:
        pts.update(aligned_points(spec, 1, align_q))
    return _pair_max(spec, sorted(pts))


def window_max(spec: ConstructionSpec, q_lo: int, q_hi: int) -> float:
    """max ||Ave[f](s, t)|| over block-aligned pairs in [t_{q_lo(q_lo-1)}, 1)."""
    return _pair_max(spec, aligned_points(spec, q_lo, q_hi))


def _axis(lo: float, hi: float, n: int) -> List[float]:
    if n == 1:
        return [lo]
    return [lo + (hi - lo) * i / (n - 1) for i in range(n)]


def _snap_points(spec: ConstructionSpec, lo: float, hi: float) -> List[float]:
    pts = []
    for q in range(1, spec.q_cap + 1):
        for u in (block_start(spec, q + 1), half_block_nodes(spec, q)[0]):
            if lo <= u <= hi:
                pts.append(u)
    return pts


def grid_scan(spec: ConstructionSpec, s_range: Tuple[float, float],
              t_range: Tuple[float, float], n: int,
              snap: bool = False) -> List[AverageSample]:
    """Row-major table of Ave[f] over an n x n grid (s outer, t inner).

    With ``snap`` the block ends and half-block nodes of blocks up to q_cap
    that fall inside each range are merged into the axis.  A cell at (1, 1)
    without a defined extension gets ``value=None`` and ``norm=nan``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    axes = []
    for lo, hi in (s_range, t_range):
        if not 0.0 <= lo <= hi <= 1.0:
            raise ValueError(f"scan range ({lo!r}, {hi!r}) must lie in [0, 1]")
        ax = _axis(lo, hi, n)
        if snap:
            ax = sorted(set(ax) | set(_snap_points(spec, lo, hi)))
        axes.append(ax)
    rows = []
    for s in axes[0]:
        for t in axes[1]:
            try:
                rows.append(ave(spec, s, t))
            except UndefinedExtensionError:
                rows.append(AverageSample(s, t, None, math.nan))
    return rows


def half_block_sample(spec: ConstructionSpec, q: int) -> AverageSample:
    """Ave[f] over the eps=+1 half of block q; its norm is A_q C_q."""
    s, t = half_block_nodes(spec, q)
    if not s < t:
        raise ValueError(f"half block of q={q} is below double-precision node resolution")
    return ave(spec, s, t)


def format_csv(rows: Iterable[Sequence], header: Sequence[str]) -> str:
    """CSV text: floats with 17 significant digits, LF line endings."""
    def cell(x):
        if isinstance(x, float):
            return format(x, ".17g")
        return str(x)

    lines = [",".join(header)]
    lines += [",".join(cell(x) for x in row) for row in rows]
    return "\n".join(lines) + "\n"
