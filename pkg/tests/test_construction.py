import math

import pytest
from hypothesis import given, settings, strategies as st

from quasiavg.block_index import block_range, decode
from quasiavg.construction import (
    ARule,
    BetaRule,
    ConfigError,
    ConstructionSpec,
    Variant,
    Verdict,
    beta_tail,
    coefficient_A,
    coefficient_beta,
    f_eval,
    half_block,
    lam,
    limit_verdicts,
    locate,
    node,
    partial_sum,
    resolvable_depth,
    span_weight,
    tail_ratio,
    x_vector,
)
from quasiavg.lp_space import SparseVector, linear_combine, quasi_norm


def brute_sum(spec, m, n):
    return linear_combine((lam(spec, k), x_vector(spec, k)) for k in range(m, n + 1))


def brute_nodes(spec, K):
    """t_0..t_K by accumulating lambda_k one at a time (exactly, via fsum)."""
    lams = [lam(spec, k) for k in range(1, K + 1)]
    return [0.0] + [math.fsum(lams[:k]) for k in range(1, K + 1)]


# -- coefficients ------------------------------------------------------------

def test_A_examples(thm13, thm14):
    assert coefficient_A(ConstructionSpec(0.5, "thm15"), 4) == pytest.approx(0.5, rel=1e-15)
    assert coefficient_A(thm13, 1) == 1.0
    assert coefficient_A(ConstructionSpec(0.3, "thm13"), 1) == 1.0
    assert coefficient_A(thm14, 3) == pytest.approx(1 / 3, rel=1e-15)


def test_beta_examples(thm14):
    assert coefficient_beta(thm14, 3) == 1 / 16
    assert coefficient_beta(ConstructionSpec(0.5, "thm13", b=3.0), 1) == pytest.approx(7 / 16, rel=1e-15)
    assert beta_tail(thm14, 5) == 1 / 32


@pytest.mark.parametrize("rule", [BetaRule("geometric"), BetaRule("telescoping", 3.0),
                                  BetaRule("telescoping", 0.7)])
def test_beta_tail_matches_summation(rule):
    for q in (1, 2, 5, 17):
        direct = math.fsum(rule.value(r) for r in range(q, q + 4000)) + rule.tail(q + 4000)
        assert rule.tail(q) == pytest.approx(direct, rel=1e-13)
    total = math.fsum(rule.value(r) for r in range(1, 5000)) + rule.tail(5000)
    assert total == pytest.approx(0.5, abs=1e-12)


def test_telescoping_beta_has_no_cancellation():
    rule = BetaRule("telescoping", 3.0)
    q = 10 ** 6
    naive = 0.5 * (q ** -3.0 - (q + 1) ** -3.0)
    assert rule.value(q) == pytest.approx(naive, rel=1e-6)
    assert rule.value(q) == pytest.approx(1.5 * q ** -4.0, rel=1e-5)


def test_lambda_examples(thm14):
    assert lam(thm14, 1) == 1 / 4
    assert lam(thm14, 3) == 1 / 16
    lo, hi = block_range(4)
    assert math.fsum(lam(thm14, k) for k in range(lo, hi + 1)) == 2 * coefficient_beta(thm14, 4) == 1 / 16


@pytest.mark.parametrize("variant", ["thm13", "thm14", "thm15"])
def test_lambdas_sum_to_one(variant):
    spec = ConstructionSpec(0.5, variant)
    K = 40 * 41
    s = span_weight(spec, 1, K) + 2 * beta_tail(spec, 41)
    assert s == pytest.approx(1.0, abs=1e-12)
    assert span_weight(spec, 1) == pytest.approx(1.0, abs=1e-15)


def test_x_vector_examples(thm13):
    assert x_vector(thm13, 1) == SparseVector({1: -1.0})
    spec = ConstructionSpec(0.5, "thm15")
    k = block_range(9)[0]
    assert quasi_norm(x_vector(spec, k), 0.5) == pytest.approx(1 / 3, rel=1e-15)
    q, j = 7, 3
    plus, minus = x_vector(spec, q * q + j), x_vector(spec, q * q - j + 1)
    assert decode(q * q + j) == (q, j, 1) and decode(q * q - j + 1) == (q, j, -1)
    assert (plus + minus).is_zero()


@pytest.mark.parametrize("variant", ["thm13", "thm14", "thm15"])
def test_amplitudes_decrease_to_zero(variant):
    spec = ConstructionSpec(0.5, variant)
    amps = [quasi_norm(x_vector(spec, block_range(q)[0]), 0.5) for q in range(1, 101)]
    assert all(b < a for a, b in zip(amps, amps[1:]))
    assert amps[-1] <= 0.1 + 1e-15
    assert limit_verdicts(spec)["continuous"] is Verdict.HOLDS


def test_integrability_series_is_cauchy(thm13):
    # sum_q q^(1-p) beta_q^p, with beta_q <= (b/2) q^(-b-1)
    p, b = thm13.p, thm13.b
    expo = b * p + 2 * p - 1
    assert expo > 1
    terms = [q ** (1 - p) * coefficient_beta(thm13, q) ** p for q in range(1, 20001)]
    for Q in (10, 100, 1000):
        tail = math.fsum(terms[Q:])
        bound = (b / 2) ** p * Q ** (1 - expo) / (expo - 1)
        assert tail <= bound
    assert limit_verdicts(thm13)["integrable"] is Verdict.HOLDS
    # too small b breaks the criterion
    weak = ConstructionSpec(0.5, "custom", a_rule="inverse_modulus", beta_rule="telescoping:1.5")
    assert limit_verdicts(weak)["integrable"] is Verdict.FAILS


# -- partition ---------------------------------------------------------------

def test_node_examples(thm14):
    assert node(thm14, 0) == 0.0
    assert node(thm14, 2) == 0.5
    assert node(thm14, 6) == 0.75


@pytest.mark.parametrize("variant", ["thm13", "thm14", "thm15"])
def test_nodes_match_accumulated_lambdas(variant):
    spec = ConstructionSpec(0.5, variant)
    K = 25 * 26
    ref = brute_nodes(spec, K)
    got = [node(spec, k) for k in range(K + 1)]
    assert max(abs(a - b) for a, b in zip(ref, got)) <= 1e-15
    assert all(a < b for a, b in zip(got, got[1:]))
    for k in range(1, K + 1):
        assert got[k] - got[k - 1] == pytest.approx(lam(spec, k), abs=1e-14)


def test_nodes_approach_one(thm13, thm14):
    assert node(thm14, 50 * 51) == 1 - 2.0 ** -50
    assert 1 - node(thm13, 60 * 61) == pytest.approx(61.0 ** -3, rel=1e-9)


def test_locate_examples(thm14):
    iv = locate(thm14, 0.3)
    assert iv.k == 2 and (iv.left, iv.right) == (0.25, 0.5)
    assert locate(thm14, 0.0).k == 1
    iv = locate(thm14, 0.74)
    assert iv.k == 6 and (iv.left, iv.right) == (11 / 16, 0.75)


@pytest.mark.parametrize("u", [1.0, -0.1, 1.5])
def test_locate_rejects_outside(thm14, u):
    with pytest.raises(ValueError):
        locate(thm14, u)


@settings(max_examples=300)
@given(st.sampled_from(["thm13", "thm14", "thm15"]), st.floats(0.0, 1.0, exclude_max=True))
def test_locate_brackets(variant, u):
    spec = ConstructionSpec(0.5, variant)
    iv = locate(spec, u)
    assert node(spec, iv.k - 1) <= u < node(spec, iv.k)
    assert iv.length == lam(spec, iv.k)


def test_locate_at_every_node(thm13):
    for k in range(1, 300):
        assert locate(thm13, node(thm13, k - 1)).k == k


def test_f_at_midpoints_and_nodes(thm15):
    for k in (1, 2, 7, 30, 111):
        iv = locate(thm15, node(thm15, k - 1))
        assert f_eval(thm15, iv.midpoint) == 2 * x_vector(thm15, k) or \
            quasi_norm(f_eval(thm15, iv.midpoint) - 2 * x_vector(thm15, k), 0.5) <= 1e-12
        q = decode(k).q
        assert quasi_norm(f_eval(thm15, iv.midpoint), 0.5) == pytest.approx(2 * coefficient_A(thm15, q), rel=1e-12)
        assert f_eval(thm15, node(thm15, k)).is_zero()
    assert f_eval(thm15, 1.0).is_zero()
    with pytest.raises(ValueError):
        f_eval(thm15, 1.01)


def test_f_is_piecewise_linear(thm14):
    iv = locate(thm14, 0.3)  # I_2 = [1/4, 1/2), x_2 = +e_1 * A_1
    a = coefficient_A(thm14, 1)
    assert f_eval(thm14, 0.3)[1] == pytest.approx(4 * (0.3 - 0.25) / 0.25 * a)
    assert f_eval(thm14, 0.45)[1] == pytest.approx(4 * (0.5 - 0.45) / 0.25 * a)
    assert iv.midpoint == 0.375


# -- sums --------------------------------------------------------------------

@pytest.mark.parametrize("variant", ["thm13", "thm14", "thm15"])
def test_full_blocks_vanish(variant):
    spec = ConstructionSpec(0.5, variant)
    for q in range(1, 51):
        lo, hi = block_range(q)
        assert partial_sum(spec, lo, hi).is_zero()
        assert brute_sum(spec, lo, hi).is_zero()


@pytest.mark.parametrize("variant", ["thm13", "thm14", "thm15"])
def test_half_block_norm(variant):
    spec = ConstructionSpec(0.5, variant)
    for q in range(1, 31):
        m, n = half_block(q)
        v = partial_sum(spec, m, n)
        expected = coefficient_A(spec, q) * q * coefficient_beta(spec, q)  # A_q C_q beta_q, C_q = q
        assert quasi_norm(v, 0.5) == pytest.approx(expected, rel=1e-12)


def test_single_term(thm13):
    for k in (1, 5, 44, 200):
        v = partial_sum(thm13, k, k)
        assert v == lam(thm13, k) * x_vector(thm13, k)
        assert quasi_norm(v, 0.5) == pytest.approx(lam(thm13, k) * coefficient_A(thm13, decode(k).q))


@settings(max_examples=200)
@given(st.sampled_from(["thm13", "thm14", "thm15"]), st.integers(1, 600), st.integers(0, 600))
def test_partial_sum_matches_brute_force(variant, m, extra):
    spec = ConstructionSpec(0.5, variant)
    n = m + extra
    assert partial_sum(spec, m, n) == brute_sum(spec, m, n)
    w = math.fsum(lam(spec, k) for k in range(m, n + 1))
    assert span_weight(spec, m, n) == pytest.approx(w, rel=1e-13)


def test_tail_ratio_examples(thm13, thm14, thm15):
    for spec in (thm13, thm14, thm15):
        assert tail_ratio(spec, 1) == 0.0
    # thm14 at n = q^2 + 1: A_q C_q beta_q / (beta_q + 2 * 2^-(q+1)) = 1/3
    for q in range(1, 31):
        assert tail_ratio(thm14, q * q + 1) == pytest.approx(1 / 3, rel=1e-12)
    r13 = [tail_ratio(thm13, q * q + 1) for q in range(1, 60)]
    assert all(b < a for a, b in zip(r13, r13[1:]))
    assert r13[-1] < 0.03


# -- spec ----------------------------------------------------------------------

def test_default_b_and_constraint():
    assert ConstructionSpec(0.5, "thm13").b == 3.0
    with pytest.raises(ConfigError, match="2\\(1-p\\)/p"):
        ConstructionSpec(0.5, "thm13", b=1.5)
    with pytest.raises(ConfigError):
        ConstructionSpec(0.5, "thm13", b=2.0)


@pytest.mark.parametrize("kwargs", [
    {"p": 0.0}, {"p": 1.2}, {"p": 1.0, "variant": "thm14"}, {"p": 0.5, "variant": "thm99"},
    {"p": 0.5, "variant": "custom"}, {"p": 0.5, "variant": "thm14", "b": 3.0},
    {"p": 0.5, "variant": "custom", "a_rule": "nope", "beta_rule": "geometric"},
    {"p": 0.5, "variant": "custom", "a_rule": "power:x", "beta_rule": "geometric"},
    {"p": 0.5, "variant": "custom", "a_rule": "power:1", "beta_rule": "telescoping:-1"},
    {"p": 0.5, "q_cap": 0},
])
def test_invalid_specs(kwargs):
    with pytest.raises(ConfigError):
        ConstructionSpec(**kwargs)


@pytest.mark.parametrize("spec", [
    ConstructionSpec(0.5, "thm13", b=4.5),
    ConstructionSpec(0.25, "thm14", q_cap=30),
    ConstructionSpec(2 / 3, "thm15", tol=1e-8),
    ConstructionSpec(1.0, "custom", a_rule="power:1", beta_rule="geometric"),
    ConstructionSpec(0.5, "custom", a_rule="inverse_sqrt_modulus", beta_rule="telescoping:3"),
])
def test_config_round_trip(spec):
    assert ConstructionSpec.from_config(spec.to_config()) == spec


def test_callable_rule_is_not_serializable():
    spec = ConstructionSpec(0.5, "custom", a_rule=ARule("callable", fn=lambda q: 1 / q),
                            beta_rule="geometric")
    assert coefficient_A(spec, 4) == 0.25
    with pytest.raises(ConfigError):
        spec.to_config()
    assert set(limit_verdicts(spec).values()) == {Verdict.UNDETERMINED}


def test_resolvable_depth(thm14, thm13):
    assert resolvable_depth(thm14) == 52
    assert resolvable_depth(thm13) == thm13.q_cap
    assert ConstructionSpec(0.5, Variant.THM14).variant is Variant.THM14
