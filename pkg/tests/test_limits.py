# tests/test_limits.py

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from pydantic import ValidationError

from ptorus.adapters.exceptions import NotConvergingToInfinity, ZeroMultiplier
from ptorus.domain.enums import ApproachKind, DivergenceReason, VerdictKind
from ptorus.domain.models.sequences import (
    AffineEndpoint,
    AffineSequence,
    InfinityEndpoint,
    PeriodicOffsetSequence,
    PolynomialSequence,
    TableSequence,
    TwistSequenceSpec,
)
from ptorus.services.limits import (
    LimitClassifier,
    anderson_canary_spec,
    approach_of_affine,
    classify_boundary_approach,
    multiplier_horocyclic_check,
    pivot_distance,
    pivot_estimate,
    predict_limit,
    realizing_spec,
    reindex_invariance_check,
    solve_pq,
)


@pytest.fixture
def classifier() -> LimitClassifier:
    return LimitClassifier()


# ── формула предела ───────────────────────────────────────────────────────────
@pytest.mark.parametrize(
    "mu, nu, p, q, expected",
    [
        (2j, 2j, 2, 0, 10j),
        (1 + 2j, 3j, 0, 4, 9 + 2j),
        (1 + 2j, 3 + 3j, -1, 1, 5 - 3j),
    ],
)
def test_predict_limit(mu, nu, p, q, expected):
    assert abs(predict_limit(mu, nu, p, q) - expected) < 1e-14


def test_reindex_invariance_random_shifts():
    """Сдвиги u, v на целые не меняют xi при согласованном сдвиге q."""
    rng = np.random.default_rng(11)
    for _ in range(100):
        mu = complex(rng.uniform(-3, 3), rng.uniform(1, 4))
        nu = complex(rng.uniform(-3, 3), rng.uniform(1, 4))
        p, q = int(rng.integers(-6, 7)), int(rng.integers(-10, 11))
        u, v = int(rng.integers(-5, 6)), int(rng.integers(-5, 6))
        assert reindex_invariance_check(mu, nu, p, q, u, v)


@given(
    st.integers(min_value=-20, max_value=20),
    st.integers(min_value=-20, max_value=20),
    st.integers(min_value=-50, max_value=50),
)
def test_reindex_invariance_property(p, u, q):
    assert reindex_invariance_check(0.5 + 2j, -1 + 3j, p, q, u, -u)


# ── решение (p+1) k_n - p l_n + q = 0 ─────────────────────────────────────────
@pytest.mark.parametrize("p", [-4, -3, 1, 2, 7])
def test_solve_pq_anderson_canary(p):
    spec = anderson_canary_spec(p)
    assert solve_pq(spec.k, spec.l) == (p, 0)


def test_solve_pq_cases():
    assert solve_pq(AffineSequence(a=2, b=1), AffineSequence(a=3, b=5)) == (2, 7)
    assert solve_pq(AffineSequence(a=1), AffineSequence(a=1)) is None
    assert solve_pq(AffineSequence(a=1), PolynomialSequence(coeffs=[0, 0, 1])) is None
    assert solve_pq(AffineSequence(a=1), PeriodicOffsetSequence(a=2, offsets=[1, -1])) is None


@given(
    st.integers(min_value=-8, max_value=8).filter(lambda p: p not in (0, -1)),
    st.integers(min_value=-20, max_value=20),
    st.integers(min_value=-5, max_value=5).filter(lambda c: c != 0),
    st.integers(min_value=-10, max_value=10),
)
def test_solve_pq_swap_symmetry(p, q, c, d):
    """k_n = -p t_n - q, l_n = -(p+1) t_n - q при t_n = c n + d; перестановка k и l даёт (-1-p, q)."""
    k = AffineSequence(a=-p * c, b=-p * d - q)
    l = AffineSequence(a=-(p + 1) * c, b=-(p + 1) * d - q)
    assert solve_pq(k, l) == (p, q)
    assert solve_pq(l, k) == (-1 - p, q)


# ── классификатор ─────────────────────────────────────────────────────────────
def test_anderson_canary_exotic(classifier):
    verdict = classifier.classify_sequence(anderson_canary_spec(2, mu=2j, nu=2j))
    assert verdict.kind == VerdictKind.CONVERGES_EXOTIC
    assert (verdict.p, verdict.q) == (2, 0)
    assert abs(verdict.xi - 10j) < 1e-14


@pytest.mark.parametrize("p", [-3, -2, 1, 3])
def test_anderson_canary_family(classifier, p):
    """Экзотический предел (p, 0) с xi = (p+1) mu - p nu_bar; Im xi > 0 при p >= 1 и < 0 при p <= -2."""
    mu, nu = 0.5 + 2j, -1 + 3j
    verdict = classifier.classify_sequence(anderson_canary_spec(p, mu=mu, nu=nu))
    assert verdict.kind == VerdictKind.CONVERGES_EXOTIC
    assert (verdict.p, verdict.q) == (p, 0)
    assert verdict.xi == (p + 1) * mu - p * nu.conjugate()
    assert (verdict.xi.imag > 0) == (p >= 1)


@pytest.mark.parametrize("p", [-3, -2, 1, 3])
@pytest.mark.parametrize("u, v", [(1, 0), (0, -2), (3, 2), (-4, 5)])
def test_anderson_canary_reindexed(classifier, p, u, v):
    """Сдвиг k на u, l на v вместе с mu + 2u, nu + 2v: тот же тип вердикта и тот же xi."""
    mu, nu = 0.5 + 2j, -1 + 3j
    base = classifier.classify_sequence(anderson_canary_spec(p, mu=mu, nu=nu))
    shifted = classifier.classify_sequence(TwistSequenceSpec(
        k=AffineSequence(a=-p, b=u), l=AffineSequence(a=-(p + 1), b=v), mu=mu + 2 * u, nu=nu + 2 * v,
    ))
    assert shifted.kind == base.kind
    assert shifted.p == base.p
    assert shifted.q == base.q - (p + 1) * u + p * v
    assert abs(shifted.xi - base.xi) < 1e-14


def test_anderson_canary_fills_cusps(slice_service):
    """При u = v = 0 параметры mu, nu берутся из каспы 0/1 (mu = 2i)."""
    verdict = LimitClassifier(slice_service).classify_sequence(anderson_canary_spec(2))
    assert verdict.kind == VerdictKind.CONVERGES_EXOTIC
    assert abs(verdict.xi - 10j) < 1e-9


def test_missing_parameters_leave_xi_empty(classifier):
    verdict = classifier.classify_sequence(anderson_canary_spec(3))
    assert verdict.kind == VerdictKind.CONVERGES_EXOTIC
    assert verdict.xi is None
    assert verdict.note


def test_affine_exotic_with_offset(classifier):
    spec = TwistSequenceSpec(k=AffineSequence(a=2, b=1), l=AffineSequence(a=3, b=5), mu=1j, nu=1j)
    verdict = classifier.classify_sequence(spec)
    assert (verdict.kind, verdict.p, verdict.q) == (VerdictKind.CONVERGES_EXOTIC, 2, 7)


def test_quadratic_tangential_divergence(classifier):
    spec = TwistSequenceSpec(k=AffineSequence(a=1), l=PolynomialSequence(coeffs=[0, 0, 1]))
    verdict = classifier.classify_sequence(spec)
    assert verdict.kind == VerdictKind.DIVERGES
    assert verdict.reason == DivergenceReason.TANDIV


def test_equal_rates_diverge(classifier):
    spec = TwistSequenceSpec(k=AffineSequence(a=1), l=AffineSequence(a=1))
    assert classifier.classify_sequence(spec).kind == VerdictKind.DIVERGES


def test_periodic_residual_splits(classifier):
    spec = TwistSequenceSpec(
        k=AffineSequence(a=1), l=PeriodicOffsetSequence(a=2, offsets=[1, -1]), mu=2j, nu=2j
    )
    verdict = classifier.classify_sequence(spec)
    assert verdict.kind == VerdictKind.SPLITS_BY_SUBSEQUENCE
    assert verdict.p == 1
    assert sorted(s.q for s in verdict.subsequences) == [-1, 1]
    assert all(s.period == 2 for s in verdict.subsequences)


def test_table_prefix_is_ignored(classifier):
    spec = TwistSequenceSpec(
        k=TableSequence(values=[100, -50, 3], tail=AffineSequence(a=-2)),
        l=AffineSequence(a=-3),
    )
    verdict = classifier.classify_sequence(spec)
    assert (verdict.kind, verdict.p, verdict.q) == (VerdictKind.CONVERGES_EXOTIC, 2, 0)


def test_one_side_bounded_is_standard(classifier):
    spec = TwistSequenceSpec(k=AffineSequence(a=0, b=3), l=AffineSequence(a=-1), mu=2j, nu=2j)
    verdict = classifier.classify_sequence(spec)
    assert verdict.kind == VerdictKind.CONVERGES_STANDARD
    assert (verdict.p, verdict.q) == (0, -3)
    assert abs(verdict.xi - (-6 + 2j)) < 1e-14


def test_horocyclic_divergence(classifier):
    spec = TwistSequenceSpec(x=InfinityEndpoint(), y=AffineEndpoint(a=1j))
    verdict = classifier.classify_sequence(spec)
    assert verdict.kind == VerdictKind.DIVERGES
    assert verdict.reason == DivergenceReason.HOROCYCLIC


def test_explicit_tangential_is_converted(classifier):
    spec = TwistSequenceSpec(x=AffineEndpoint(a=-2), y=AffineEndpoint(a=-3))
    verdict = classifier.classify_sequence(spec)
    assert (verdict.kind, verdict.p, verdict.q) == (VerdictKind.CONVERGES_EXOTIC, 2, 0)


def test_explicit_one_side_stable(classifier):
    spec = TwistSequenceSpec(x=AffineEndpoint(a=1), y=AffineEndpoint(a=0, b=1j))
    assert classifier.classify_sequence(spec).kind == VerdictKind.CONVERGES_STANDARD


def test_explicit_leaving_half_plane_is_unknown(classifier):
    spec = TwistSequenceSpec(x=AffineEndpoint(a=-1j), y=AffineEndpoint(a=1))
    assert classifier.classify_sequence(spec).kind == VerdictKind.UNKNOWN


def test_irrational_limit_point(classifier):
    verdict = classifier.classify_sequence(TwistSequenceSpec(limit_point="irrational"))
    assert verdict.kind == VerdictKind.DIVERGES
    assert verdict.reason == DivergenceReason.IRRATIONAL_LIMIT


@pytest.mark.parametrize("p", [-3, -1, 0, 1, 2, 5])
@pytest.mark.parametrize("q", [-2, 0, 3])
def test_realizing_spec_round_trip(classifier, p, q):
    verdict = classifier.classify_sequence(realizing_spec(p, q))
    assert (verdict.p, verdict.q) == (p, q)
    expected = VerdictKind.CONVERGES_STANDARD if p in (0, -1) else VerdictKind.CONVERGES_EXOTIC
    assert verdict.kind == expected


def test_classify_batch_keeps_order(classifier):
    specs = [anderson_canary_spec(p) for p in (1, 2, 3)]
    verdicts = classifier.classify_batch(specs, workers=1)
    assert [v.p for v in verdicts] == [1, 2, 3]


def test_mixed_forms_rejected():
    with pytest.raises(ValidationError):
        TwistSequenceSpec(k=AffineSequence(a=1), l=AffineSequence(a=2), x=InfinityEndpoint())
    with pytest.raises(ValidationError):
        TwistSequenceSpec(k=AffineSequence(a=1))


# ── характер приближения ──────────────────────────────────────────────────────
def test_approach_of_affine():
    assert approach_of_affine(1j, 0) == ApproachKind.HOROCYCLIC
    assert approach_of_affine(2, 1j) == ApproachKind.TANGENTIAL
    with pytest.raises(NotConvergingToInfinity):
        approach_of_affine(0, 1j)
    with pytest.raises(NotConvergingToInfinity):
        approach_of_affine(-1j, 0)


@pytest.mark.parametrize(
    "make, expected",
    [
        (lambda n: complex(0, n * n), ApproachKind.HOROCYCLIC),
        (lambda n: complex(n * n, 1), ApproachKind.TANGENTIAL),
        (lambda n: complex(n * n, n), ApproachKind.MIXED),
    ],
)
def test_classify_boundary_approach(make, expected):
    samples = [make(n) for n in range(1, 41)]
    assert classify_boundary_approach(samples) == expected


def test_classify_boundary_approach_edge_cases():
    assert classify_boundary_approach([None] * 5) == ApproachKind.HOROCYCLIC
    with pytest.raises(NotConvergingToInfinity):
        classify_boundary_approach([1j] * 40)
    with pytest.raises(NotConvergingToInfinity):
        classify_boundary_approach([])


# ── опорная точка и мультипликаторы ───────────────────────────────────────────
def test_pivot_estimate_and_distance():
    x, y = 1 + 2j, 0.5 + 1j
    target = x - y.conjugate() + 1j
    lam = 2j * math.pi / target
    assert abs(pivot_estimate(lam) - (x - y.conjugate())) < 1e-12
    assert pivot_distance(lam, x, y) < 1e-7
    with pytest.raises(ZeroMultiplier):
        pivot_estimate(0)
    with pytest.raises(ZeroMultiplier):
        pivot_distance(0, x, y)


def test_multiplier_horocyclic_check():
    eps = 0.1
    inside = [eps + 0.5 * eps * complex(math.cos(t), math.sin(t)) for t in np.linspace(0, 6, 20)]
    assert multiplier_horocyclic_check(inside, eps)
    assert not multiplier_horocyclic_check([1.0 + 0j] * 8, eps)
    assert not multiplier_horocyclic_check([], eps)
