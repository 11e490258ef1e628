"""Boundedness / continuity criteria for Ave[f] and the class each construction lands in.

Verdicts come from the closed forms of the coefficient rules; the finite
tables are computed alongside and checked against them.  Only a rule with
no closed form (a Python callable for A_q) yields ``undetermined-at-cap``.
"""

from __future__ import annotations

import enum
import json
import math
import random
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional, Tuple

from .block_index import block_of, block_range
from .construction import (
    ConfigError,
    ConstructionSpec,
    Variant,
    Verdict,
    coefficient_A,
    coefficient_beta,
    half_block,
    lam,
    limit_verdicts,
    modulus,
    modulus_product,
    partial_sum,
    separate_ratio,
    span_weight,
    x_vector,
)
from .lp_space import SparseVector, quasi_norm

# relative slack for floating-point comparisons of the proof inequalities
REL_TOL = 1e-9
BRUTE_FORCE_MAX_Q = 8


class Label(str, enum.Enum):
    JOINTLY_CONTINUOUS = "JOINTLY_CONTINUOUS"
    BOUNDED_AND_SEPARATELY_NOT_JOINTLY = "BOUNDED_AND_SEPARATELY_NOT_JOINTLY"
    BOUNDED_NOT_SEPARATELY = "BOUNDED_NOT_SEPARATELY"
    SEPARATELY_NOT_BOUNDED = "SEPARATELY_NOT_BOUNDED"
    NEITHER = "NEITHER"
    UNDETERMINED = "UNDETERMINED_AT_CAP"


# What each built-in variant is constructed to show.
EXPECTED_LABELS = {
    Variant.THM13: Label.BOUNDED_AND_SEPARATELY_NOT_JOINTLY,
    Variant.THM14: Label.BOUNDED_NOT_SEPARATELY,
    Variant.THM15: Label.NEITHER,
}


@dataclass(frozen=True)
class QRow:
    q: int
    A: float
    C: float
    beta: float
    AC: float
    separate_ratio: float


def _check_depth(spec: ConstructionSpec, Q: int) -> None:
    if not 1 <= Q <= spec.q_cap:
        raise ValueError(f"Q must lie in [1, q_cap={spec.q_cap}], got {Q}")


def modulus_table(spec: ConstructionSpec, Q: int) -> List[QRow]:
    _check_depth(spec, Q)
    return [QRow(q, coefficient_A(spec, q), modulus(spec, q), coefficient_beta(spec, q),
                 modulus_product(spec, q), separate_ratio(spec, q))
            for q in range(1, Q + 1)]


# -- boundedness -------------------------------------------------------------

def _cross_ratio(spec: ConstructionSpec, q0: int, a: int, q1: int, c: int) -> float:
    """Ratio for the span: last a tents of block q0 through first c tents of block q1."""
    p = spec.p
    n0 = coefficient_A(spec, q0) * coefficient_beta(spec, q0) / q0 * a ** (1.0 / p)
    n1 = coefficient_A(spec, q1) * coefficient_beta(spec, q1) / q1 * c ** (1.0 / p)
    num = n0 + n1 if p == 1.0 else (n0 ** p + n1 ** p) ** (1.0 / p)
    den = math.fsum([a * coefficient_beta(spec, q0) / q0, c * coefficient_beta(spec, q1) / q1]
                    + [2.0 * coefficient_beta(spec, r) for r in range(q0 + 1, q1)])
    return num / den


def structured_sup_ratio(spec: ConstructionSpec, Q: int) -> Tuple[float, Tuple[int, int]]:
    """max over 1 <= m <= n <= Q(Q+1) of ||sum lambda_k x_k|| / sum lambda_k.

    Returns the maximum and a span (m, n) attaining it.  Spans that start in
    a first half or end in a second half only add cancelled mass, so the
    candidates are: a half block (ratio A_q C_q), or the last a tents of one
    block joined to the first c tents of a later one.  For fixed blocks that
    ratio is a convex function over an affine one in (a, c), hence
    quasiconvex, and its maximum sits at a in {1, q0}, c in {1, q1}.
    """
    best, arg = -1.0, (1, 1)
    for q in range(1, Q + 1):
        r = modulus_product(spec, q)
        if r > best:
            best, arg = r, half_block(q)
    for q0 in range(1, Q + 1):
        for q1 in range(q0 + 1, Q + 1):
            for a in {1, q0}:
                for c in {1, q1}:
                    r = _cross_ratio(spec, q0, a, q1, c)
                    if r > best:
                        best, arg = r, (q0 * (q0 + 1) - a + 1, q1 * (q1 - 1) + c)
    return best, arg


def brute_force_sup_ratio(spec: ConstructionSpec, Q: int) -> Tuple[float, Tuple[int, int]]:
    """The same maximum by direct summation over every span."""
    if Q > BRUTE_FORCE_MAX_Q:
        raise ValueError(f"exhaustive search limited to Q <= {BRUTE_FORCE_MAX_Q}")
    K = Q * (Q + 1)
    terms = [None] + [(lam(spec, k), x_vector(spec, k)) for k in range(1, K + 1)]
    best, arg = -1.0, (1, 1)
    for m in range(1, K + 1):
        acc: Dict[int, float] = {}
        weights: List[float] = []
        for n in range(m, K + 1):
            w, x = terms[n]
            for i, c in x.items():
                acc[i] = acc.get(i, 0.0) + w * c
            weights.append(w)
            r = quasi_norm(SparseVector(acc), spec.p) / math.fsum(weights)
            if r > best:
                best, arg = r, (m, n)
    return best, arg


def boundedness_report(spec: ConstructionSpec, Q: int) -> Tuple[float, Verdict]:
    _check_depth(spec, Q)
    sup, _ = structured_sup_ratio(spec, Q)
    return sup, limit_verdicts(spec)["bounded"]


def _trend_agrees(values: List[float], verdict: Verdict) -> Optional[bool]:
    """Does the tail of a table that should tend to 0 (or not) look like it?"""
    if verdict is Verdict.UNDETERMINED or len(values) < 4:
        return None
    half = values[len(values) // 2]
    return (values[-1] < half) == (verdict is Verdict.HOLDS)


def separate_continuity_report(spec: ConstructionSpec, Q: int) -> Tuple[List[float], Verdict]:
    _check_depth(spec, Q)
    ratios = [separate_ratio(spec, q) for q in range(1, Q + 1)]
    return ratios, limit_verdicts(spec)["separately_continuous"]


def joint_continuity_report(spec: ConstructionSpec, Q: int) -> Tuple[List[float], Verdict]:
    _check_depth(spec, Q)
    products = [modulus_product(spec, q) for q in range(1, Q + 1)]
    return products, limit_verdicts(spec)["jointly_continuous"]


def label_for(bounded: Verdict, separately: Verdict, jointly: Verdict) -> Label:
    if Verdict.UNDETERMINED in (bounded, separately, jointly):
        return Label.UNDETERMINED
    if jointly is Verdict.HOLDS:
        return Label.JOINTLY_CONTINUOUS
    if bounded is Verdict.HOLDS:
        if separately is Verdict.HOLDS:
            return Label.BOUNDED_AND_SEPARATELY_NOT_JOINTLY
        return Label.BOUNDED_NOT_SEPARATELY
    if separately is Verdict.HOLDS:
        return Label.SEPARATELY_NOT_BOUNDED
    return Label.NEITHER


def classify(spec: ConstructionSpec, Q: Optional[int] = None) -> Label:
    Q = spec.q_cap if Q is None else Q
    _check_depth(spec, Q)
    v = limit_verdicts(spec)
    if v["continuous"] is not Verdict.HOLDS:
        # outside the continuous, Riemann-integrable class
        return Label.UNDETERMINED
    return label_for(v["bounded"], v["separately_continuous"], v["jointly_continuous"])


# -- proof inequalities ------------------------------------------------------

INEQUALITIES = ("same_block_mass", "same_block_beta", "cross_block_mass", "cross_block_beta")


@dataclass
class InequalityReport:
    trials: int
    seed: int
    q_max: int
    checks: Dict[str, int] = field(default_factory=lambda: dict.fromkeys(INEQUALITIES, 0))
    tightest: Dict[str, float] = field(default_factory=lambda: dict.fromkeys(INEQUALITIES, 0.0))
    violations: List[dict] = field(default_factory=list)
    full_block_max_norm: float = 0.0
    half_block_max_relerr: float = 0.0
    half_block_lower_ok: bool = True

    @property
    def passed(self) -> bool:
        return (not self.violations and self.full_block_max_norm <= 1e-12
                and self.half_block_max_relerr <= REL_TOL and self.half_block_lower_ok)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["passed"] = self.passed
        return d


def _random_span(rng: random.Random, q_max: int) -> Tuple[int, int]:
    if rng.random() < 0.5:
        lo, hi = block_range(rng.randint(1, q_max))
    else:
        lo, hi = 1, q_max * (q_max + 1)
    m, n = sorted((rng.randint(lo, hi), rng.randint(lo, hi)))
    return m, n


def verify_proof_inequalities(spec: ConstructionSpec, trials: int, seed: int,
                              q_max: int = 20) -> InequalityReport:
    """Check the span estimates on ``trials`` seeded random spans with q(n) <= q_max.

    same_block_mass:  ||S|| <= A_q C_q sum lambda          (q(m) = q(n) = q)
    same_block_beta:  ||S|| <= A_q C_q beta_q              (q(m) = q(n) = q)
    cross_block_mass: ||S|| <= 2^(1/p-1) max(A C) sum lambda
    cross_block_beta: ||S|| <= 2^(1/p) (A_q0 C_q0 beta_q0 + A_q1 C_q1 beta_q1)

    S is sum_{k=m..n} lambda_k x_k.  Every full block must sum to zero, and
    every half block must have norm exactly A_q C_q beta_q (at least half
    of it is what the lower estimate needs).
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    p = spec.p
    rep = InequalityReport(trials=trials, seed=seed, q_max=q_max)
    rng = random.Random(seed)

    def check(name, lhs, rhs, m, n):
        rep.checks[name] += 1
        if rhs > 0:
            rep.tightest[name] = max(rep.tightest[name], lhs / rhs)
        if lhs > rhs * (1.0 + REL_TOL):
            rep.violations.append({"inequality": name, "m": m, "n": n, "lhs": lhs, "rhs": rhs})

    for _ in range(trials):
        m, n = _random_span(rng, q_max)
        q0, q1 = block_of(m), block_of(n)
        lhs = quasi_norm(partial_sum(spec, m, n), p)
        mass = span_weight(spec, m, n)
        ac0, ac1 = modulus_product(spec, q0), modulus_product(spec, q1)
        b0, b1 = coefficient_beta(spec, q0), coefficient_beta(spec, q1)
        if q0 == q1:
            check("same_block_mass", lhs, ac0 * mass, m, n)
            check("same_block_beta", lhs, ac0 * b0, m, n)
        check("cross_block_mass", lhs, 2.0 ** (1.0 / p - 1.0) * max(ac0, ac1) * mass, m, n)
        check("cross_block_beta", lhs, 2.0 ** (1.0 / p) * (ac0 * b0 + ac1 * b1), m, n)

    for q in range(1, q_max + 1):
        lo, hi = block_range(q)
        rep.full_block_max_norm = max(rep.full_block_max_norm,
                                      quasi_norm(partial_sum(spec, lo, hi), p))
        target = modulus_product(spec, q) * coefficient_beta(spec, q)
        got = quasi_norm(partial_sum(spec, *half_block(q)), p)
        rep.half_block_max_relerr = max(rep.half_block_max_relerr, abs(got - target) / target)
        rep.half_block_lower_ok &= got >= 0.5 * target
    return rep


# -- full report -------------------------------------------------------------

@dataclass
class DiagnosticsReport:
    config: dict
    Q: int
    rows: List[QRow]
    sup_ratio: float
    sup_span: Tuple[int, int]
    verdicts: Dict[str, Verdict]
    numeric_agrees: Dict[str, Optional[bool]]
    label: Label

    def to_dict(self) -> dict:
        return {
            "config": self.config,
            "Q": self.Q,
            "rows": [asdict(r) for r in self.rows],
            "sup_ratio": self.sup_ratio,
            "sup_span": list(self.sup_span),
            "verdicts": {k: v.value for k, v in self.verdicts.items()},
            "numeric_agrees": self.numeric_agrees,
            "label": self.label.value,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def to_text(self) -> str:
        head = ("q", "A_q", "C_q", "beta_q", "A_q*C_q", "sep_ratio")
        body = [(str(r.q),) + tuple(f"{x:.6e}" for x in (r.A, r.C, r.beta, r.AC, r.separate_ratio))
                for r in self.rows]
        widths = [max(len(h), *(len(b[i]) for b in body)) for i, h in enumerate(head)]
        lines = ["  ".join(h.rjust(w) for h, w in zip(head, widths))]
        lines += ["  ".join(c.rjust(w) for c, w in zip(b, widths)) for b in body]
        lines.append("")
        lines.append(f"sup ratio (spans up to q={self.Q}): {self.sup_ratio:.12g} at {self.sup_span}")
        for k, v in self.verdicts.items():
            lines.append(f"{k:>22}: {v.value}")
        lines.append(f"{'label':>22}: {self.label.value}")
        return "\n".join(lines) + "\n"


def build_report(spec: ConstructionSpec, Q: Optional[int] = None) -> DiagnosticsReport:
    Q = spec.q_cap if Q is None else Q
    rows = modulus_table(spec, Q)
    sup, span = structured_sup_ratio(spec, Q)
    verdicts = limit_verdicts(spec)
    ratios = [r.separate_ratio for r in rows]
    products = [r.AC for r in rows]
    agrees = {
        "separately_continuous": _trend_agrees(ratios, verdicts["separately_continuous"]),
        "jointly_continuous": _trend_agrees(products, verdicts["jointly_continuous"]),
    }
    try:
        config = spec.to_config()
    except ConfigError:
        config = {"p": spec.p, "variant": spec.variant.value, "A": "callable"}
    return DiagnosticsReport(config, Q, rows, sup, span, verdicts, agrees, classify(spec, Q))
