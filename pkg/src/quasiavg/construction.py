"""Tent-sum functions f: [0, 1] -> l_p built from block sequences (A_q, beta_q).

Block q carries 2q tents.  Tent k has length ``lambda_k = beta_q / q`` and
vector ``x_k = eps * A_q * e_coordinate(q, j)``, where ``(q, j, eps)`` are
the block coordinates of k.  Paired tents (j, -1) and (j, +1) carry opposite
vectors, so every full block contributes exactly zero to ``sum lambda_k x_k``.

Nodes are never accumulated term by term: block q starts at
``1 - 2 * sum_{r >= q} beta_r`` (closed-form tail) and steps uniformly by
``beta_q / q`` inside the block.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Callable, Dict, NamedTuple, Optional, Tuple

from .block_index import block_of, block_range, coordinate, decode
from .lp_space import SparseVector, check_exponent, quasi_norm
from .moduli import concavity_modulus


class ConfigError(ValueError):
    """Invalid construction parameters."""


class Variant(str, enum.Enum):
    THM13 = "thm13"  # bounded, separately but not jointly continuous
    THM14 = "thm14"  # bounded, not separately continuous
    THM15 = "thm15"  # neither bounded nor separately continuous
    CUSTOM = "custom"


class Verdict(str, enum.Enum):
    HOLDS = "holds"
    FAILS = "fails"
    UNDETERMINED = "undetermined-at-cap"


@dataclass(frozen=True)
class ARule:
    """Rule for the amplitudes A_q.

    kinds: ``inverse_modulus`` (1/C_q), ``inverse_sqrt_modulus`` (1/sqrt(C_q)),
    ``power`` (q^-a) and ``callable`` (``fn(q)``, no closed-form asymptotics).
    """

    kind: str
    a: float = 0.0
    fn: Optional[Callable[[int], float]] = field(default=None, compare=True)

    def __post_init__(self):
        if self.kind not in ("inverse_modulus", "inverse_sqrt_modulus", "power", "callable"):
            raise ConfigError(f"unknown A rule {self.kind!r}")
        if self.kind == "callable" and self.fn is None:
            raise ConfigError("callable A rule needs fn")

    @classmethod
    def parse(cls, text: str) -> "ARule":
        kind, _, arg = str(text).partition(":")
        kind = kind.strip()
        if kind == "power":
            try:
                return cls("power", float(arg))
            except ValueError:
                raise ConfigError(f"power rule needs a numeric exponent, got {text!r}") from None
        return cls(kind)

    def __str__(self) -> str:
        return f"power:{self.a!r}" if self.kind == "power" else self.kind

    def value(self, q: int, c_q: float) -> float:
        if self.kind == "inverse_modulus":
            return 1.0 / c_q
        if self.kind == "inverse_sqrt_modulus":
            return 1.0 / math.sqrt(c_q)
        if self.kind == "power":
            return float(q) ** (-self.a)
        return float(self.fn(q))

    def product(self, q: int, c_q: float) -> float:
        """A_q * C_q, in closed form where one exists."""
        if self.kind == "inverse_modulus":
            return 1.0
        if self.kind == "inverse_sqrt_modulus":
            return math.sqrt(c_q)
        return self.value(q, c_q) * c_q

    def amplitude_exponent(self, p: float) -> Optional[float]:
        """e with A_q = q^e exactly, or None when unknown."""
        g = 1.0 / p - 1.0
        return {"inverse_modulus": -g, "inverse_sqrt_modulus": -g / 2,
                "power": -self.a}.get(self.kind)

    def product_exponent(self, p: float) -> Optional[float]:
        """gamma with A_q * C_q = q^gamma exactly, or None when unknown."""
        e = self.amplitude_exponent(p)
        return None if e is None else e + (1.0 / p - 1.0)


@dataclass(frozen=True)
class BetaRule:
    """Block masses beta_q with ``sum_q beta_q = 1/2``.

    ``geometric``: 2^(-q-1), tail 2^-q.
    ``telescoping``: (q^-b - (q+1)^-b)/2, tail q^-b / 2.
    """

    kind: str
    b: float = 0.0

    def __post_init__(self):
        if self.kind not in ("geometric", "telescoping"):
            raise ConfigError(f"unknown beta rule {self.kind!r}")
        if self.kind == "telescoping" and not self.b > 0:
            raise ConfigError(f"telescoping beta rule needs b > 0, got {self.b}")

    @classmethod
    def parse(cls, text: str) -> "BetaRule":
        kind, _, arg = str(text).partition(":")
        kind = kind.strip()
        if kind == "telescoping":
            try:
                return cls("telescoping", float(arg))
            except ValueError:
                raise ConfigError(f"telescoping rule needs b, got {text!r}") from None
        return cls(kind)

    def __str__(self) -> str:
        return f"telescoping:{self.b!r}" if self.kind == "telescoping" else self.kind

    def value(self, q: int) -> float:
        if self.kind == "geometric":
            return math.ldexp(1.0, -q - 1)
        # q^-b (1 - (q/(q+1))^b) without cancellation
        return 0.5 * float(q) ** (-self.b) * -math.expm1(-self.b * math.log1p(1.0 / q))

    def tail(self, q: int) -> float:
        """sum_{r >= q} beta_r."""
        if self.kind == "geometric":
            return math.ldexp(1.0, -q)
        return 0.5 * float(q) ** (-self.b)


def default_b(p: float) -> float:
    return 2.0 * (1.0 - p) / p + 1.0


@dataclass(frozen=True)
class ConstructionSpec:
    p: float
    variant: Variant = Variant.THM14
    b: Optional[float] = None
    a_rule: Optional[ARule] = None
    beta_rule: Optional[BetaRule] = None
    q_cap: int = 60
    tol: float = 1e-9

    def __post_init__(self):
        set_ = object.__setattr__
        try:
            p = check_exponent(self.p)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        set_(self, "p", p)
        try:
            variant = Variant(self.variant)
        except ValueError:
            raise ConfigError(f"unknown variant {self.variant!r}") from None
        set_(self, "variant", variant)
        if not (isinstance(self.q_cap, int) and self.q_cap >= 1):
            raise ConfigError(f"q_cap must be a positive integer, got {self.q_cap!r}")
        if not self.tol > 0:
            raise ConfigError(f"tol must be positive, got {self.tol!r}")

        if variant is Variant.CUSTOM:
            a_rule, beta_rule = self.a_rule, self.beta_rule
            if a_rule is None or beta_rule is None:
                raise ConfigError("custom variant needs both an A rule and a beta rule")
            if isinstance(a_rule, str):
                a_rule = ARule.parse(a_rule)
            if isinstance(beta_rule, str):
                beta_rule = BetaRule.parse(beta_rule)
            set_(self, "a_rule", a_rule)
            set_(self, "beta_rule", beta_rule)
            set_(self, "b", beta_rule.b if beta_rule.kind == "telescoping" else None)
            return

        if self.a_rule is not None or self.beta_rule is not None:
            raise ConfigError(f"{variant.value} fixes its own rules; use variant custom")
        if p == 1.0:
            raise ConfigError(f"{variant.value} needs p < 1 (l_1 is locally convex)")
        if variant is Variant.THM13:
            bound = 2.0 * (1.0 - p) / p
            b = default_b(p) if self.b is None else float(self.b)
            if not b > bound:
                raise ConfigError(f"thm13 needs b > 2(1-p)/p = {bound!r}, got b = {b!r}")
            set_(self, "b", b)
            set_(self, "a_rule", ARule("inverse_modulus"))
            set_(self, "beta_rule", BetaRule("telescoping", b))
        else:
            if self.b is not None:
                raise ConfigError(f"{variant.value} takes no b parameter")
            kind = "inverse_modulus" if variant is Variant.THM14 else "inverse_sqrt_modulus"
            set_(self, "a_rule", ARule(kind))
            set_(self, "beta_rule", BetaRule("geometric"))

    def to_config(self) -> Dict[str, Any]:
        if self.a_rule.kind == "callable":
            raise ConfigError("a callable A rule cannot be serialized")
        cfg: Dict[str, Any] = {"p": self.p, "variant": self.variant.value, "b": self.b,
                               "q_cap": self.q_cap, "tol": self.tol}
        if self.variant is Variant.CUSTOM:
            cfg["A"] = str(self.a_rule)
            cfg["beta"] = str(self.beta_rule)
        return cfg

    @classmethod
    def from_config(cls, cfg: Dict[str, Any]) -> "ConstructionSpec":
        known = {"p", "variant", "b", "q_cap", "tol", "A", "beta"}
        extra = set(cfg) - known
        if extra:
            raise ConfigError(f"unknown construction keys: {sorted(extra)}")
        if "p" not in cfg:
            raise ConfigError("config needs p")
        variant = str(cfg.get("variant", "thm14")).lower()
        kwargs: Dict[str, Any] = {"p": cfg["p"], "variant": variant,
                                  "q_cap": int(cfg.get("q_cap", 60)),
                                  "tol": float(cfg.get("tol", 1e-9))}
        if variant == "custom":
            kwargs["a_rule"] = cfg.get("A")
            kwargs["beta_rule"] = cfg.get("beta")
        elif cfg.get("b") is not None:
            kwargs["b"] = float(cfg["b"])
        return cls(**kwargs)


# -- coefficient sequences ---------------------------------------------------

def modulus(spec: ConstructionSpec, q: int) -> float:
    return concavity_modulus(q, spec.p)


def coefficient_A(spec: ConstructionSpec, q: int) -> float:
    return spec.a_rule.value(q, modulus(spec, q))


def coefficient_beta(spec: ConstructionSpec, q: int) -> float:
    return spec.beta_rule.value(q)


def beta_tail(spec: ConstructionSpec, q: int) -> float:
    """sum_{r >= q} beta_r in closed form."""
    return spec.beta_rule.tail(q)


def modulus_product(spec: ConstructionSpec, q: int) -> float:
    """A_q * C_q."""
    return spec.a_rule.product(q, modulus(spec, q))


def separate_ratio(spec: ConstructionSpec, q: int) -> float:
    """A_q C_q beta_q / sum_{r >= q} beta_r."""
    rule = spec.beta_rule
    if rule.kind == "geometric":
        frac = 0.5
    else:
        frac = -math.expm1(-rule.b * math.log1p(1.0 / q))
    return modulus_product(spec, q) * frac


def lam(spec: ConstructionSpec, k: int) -> float:
    """Tent length lambda_k = beta_q * mu_{q,j} with uniform mu = 1/q."""
    q = block_of(k)
    return coefficient_beta(spec, q) / q


def x_vector(spec: ConstructionSpec, k: int) -> SparseVector:
    q, j, eps = decode(k)
    return SparseVector.unit(coordinate(q, j), eps * coefficient_A(spec, q))


def limit_verdicts(spec: ConstructionSpec) -> Dict[str, Verdict]:
    """Asymptotic behaviour read off the closed forms of the rules.

    Keys: ``continuous`` (A_q -> 0), ``integrable`` (sum q^(1-p) beta_q^p
    finite with A bounded), ``bounded``, ``separately_continuous`` and
    ``jointly_continuous``.
    """
    p = spec.p
    alpha = spec.a_rule.amplitude_exponent(p)
    gamma = spec.a_rule.product_exponent(p)
    if alpha is None or gamma is None:
        return {k: Verdict.UNDETERMINED for k in
                ("continuous", "integrable", "bounded", "separately_continuous",
                 "jointly_continuous")}

    def v(flag: bool) -> Verdict:
        return Verdict.HOLDS if flag else Verdict.FAILS

    continuous = alpha < 0
    if spec.beta_rule.kind == "geometric":
        summable = True
        sep = gamma < 0            # ratio = q^gamma / 2
    else:
        b = spec.beta_rule.b
        summable = b * p + 2 * p - 1 > 1
        sep = gamma < 1            # ratio ~ b q^(gamma - 1)
    return {
        "continuous": v(continuous),
        "integrable": v(summable and alpha <= 0),
        "bounded": v(gamma <= 0),
        # the separate-continuity criterion presumes A_q -> 0
        "separately_continuous": v(sep) if continuous else Verdict.UNDETERMINED,
        "jointly_continuous": v(gamma < 0),
    }


# -- partition ---------------------------------------------------------------

class TentInterval(NamedTuple):
    k: int
    left: float
    right: float
    length: float

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.left + self.right)


@lru_cache(maxsize=65536)
def block_start(spec: ConstructionSpec, q: int) -> float:
    """t_{q(q-1)} = 1 - 2 * sum_{r >= q} beta_r."""
    if q == 1:
        return 0.0
    return 1.0 - 2.0 * beta_tail(spec, q)


def _inner_node(spec: ConstructionSpec, q: int, i: int) -> float:
    """Node after the first i tents of block q (0 <= i <= 2q)."""
    if i == 2 * q:
        return block_start(spec, q + 1)
    beta = coefficient_beta(spec, q)
    return block_start(spec, q) + (i * beta) / q


def node(spec: ConstructionSpec, k: int) -> float:
    """t_k = lambda_1 + ... + lambda_k."""
    if k < 0:
        raise ValueError(f"node index must be >= 0, got {k}")
    if k == 0:
        return 0.0
    q = block_of(k)
    return _inner_node(spec, q, k - q * (q - 1))


def interval(spec: ConstructionSpec, k: int) -> TentInterval:
    return TentInterval(k, node(spec, k - 1), node(spec, k), lam(spec, k))


def _block_containing(spec: ConstructionSpec, u: float) -> int:
    hi = 2
    while block_start(spec, hi) <= u:
        hi *= 2
    lo = hi // 2  # block_start(lo) <= u
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if block_start(spec, mid) <= u:
            lo = mid
        else:
            hi = mid
    return lo


def locate(spec: ConstructionSpec, u: float) -> TentInterval:
    """The tent interval [t_{k-1}, t_k) containing u, for 0 <= u < 1."""
    if not 0.0 <= u < 1.0:
        raise ValueError(f"locate needs 0 <= u < 1, got {u!r}")
    q = _block_containing(spec, u)
    # largest i with node_i <= u; nodes can coincide deep in the tail
    lo, hi = 0, 2 * q
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if _inner_node(spec, q, mid) <= u:
            lo = mid
        else:
            hi = mid
    i = lo
    return interval(spec, q * (q - 1) + i + 1)


def tent_value(iv: TentInterval, u: float) -> float:
    """Height of the tent on ``iv`` at u: 0 at the ends, 2 at the midpoint."""
    if not iv.left <= u <= iv.right:
        return 0.0
    tau = (u - iv.left) / (iv.right - iv.left)
    return 4.0 * tau if tau < 0.5 else 4.0 * (1.0 - tau)


def f_component(spec: ConstructionSpec, u: float) -> Optional[Tuple[int, float]]:
    """(coordinate, coefficient) of f(u), or None where f(u) = 0."""
    if not 0.0 <= u <= 1.0:
        raise ValueError(f"f is defined on [0, 1], got {u!r}")
    if u == 1.0:
        return None
    iv = locate(spec, u)
    h = tent_value(iv, u)
    if h == 0.0:
        return None
    q, j, eps = decode(iv.k)
    return coordinate(q, j), h * eps * coefficient_A(spec, q)


def f_eval(spec: ConstructionSpec, u: float) -> SparseVector:
    comp = f_component(spec, u)
    return SparseVector() if comp is None else SparseVector({comp[0]: comp[1]})


# -- sums over tents ---------------------------------------------------------

def _accumulate_block(spec, q, a, b, out):
    """Add sum_{k=a..b} lambda_k x_k for a sub-range of block q into ``out``."""
    coef = coefficient_beta(spec, q) / q * coefficient_A(spec, q)
    qq = q * q
    for j in range(1, q + 1):
        plus = a <= qq + j <= b
        minus = a <= qq - j + 1 <= b
        if plus != minus:
            out[coordinate(q, j)] = coef if plus else -coef


def partial_sum(spec: ConstructionSpec, m: int, n: int) -> SparseVector:
    """sum_{k=m..n} lambda_k x_k.

    Interior full blocks vanish identically, so only the blocks of m and n
    are touched.
    """
    if not 1 <= m <= n:
        raise ValueError(f"partial_sum needs 1 <= m <= n, got m={m}, n={n}")
    out: Dict[int, float] = {}
    for q in sorted({block_of(m), block_of(n)}):
        lo, hi = block_range(q)
        a, b = max(m, lo), min(n, hi)
        if (a, b) != (lo, hi):
            _accumulate_block(spec, q, a, b, out)
    return SparseVector(out)


def span_weight(spec: ConstructionSpec, m: int, n: Optional[int] = None) -> float:
    """sum_{k=m..n} lambda_k; ``n=None`` means the whole tail k >= m."""
    q0 = block_of(m)
    lo0, hi0 = block_range(q0)
    if n is None:
        return (hi0 - m + 1) * lam(spec, m) + 2.0 * beta_tail(spec, q0 + 1)
    if n < m:
        raise ValueError(f"span_weight needs m <= n, got m={m}, n={n}")
    q1 = block_of(n)
    if q0 == q1:
        return (n - m + 1) * lam(spec, m)
    parts = [(hi0 - m + 1) * lam(spec, m), (n - block_range(q1)[0] + 1) * lam(spec, n)]
    parts += [2.0 * coefficient_beta(spec, r) for r in range(q0 + 1, q1)]
    return math.fsum(parts)


def tail_ratio(spec: ConstructionSpec, n: int) -> float:
    """||sum_{k>=n} lambda_k x_k|| / sum_{k>=n} lambda_k.

    Blocks after q(n) cancel, so the numerator is a finite sum.
    """
    end = block_range(block_of(n))[1]
    return quasi_norm(partial_sum(spec, n, end), spec.p) / span_weight(spec, n)


def half_block(q: int) -> Tuple[int, int]:
    """Index span of the eps=+1 half of block q: no cancellation inside."""
    return q * q + 1, q * (q + 1)


def half_block_nodes(spec: ConstructionSpec, q: int) -> Tuple[float, float]:
    """(t_{q^2}, t_{q(q+1)}): the interval covered by the eps=+1 half of block q."""
    m, n = half_block(q)
    return node(spec, m - 1), node(spec, n)


def resolvable_depth(spec: ConstructionSpec, limit: Optional[int] = None) -> int:
    """Largest q whose half-block nodes are distinct in double precision."""
    limit = spec.q_cap if limit is None else limit
    q = 0
    while q < limit:
        s, t = half_block_nodes(spec, q + 1)
        if not (block_start(spec, q + 1) < s < t):
            break
        q += 1
    return q
