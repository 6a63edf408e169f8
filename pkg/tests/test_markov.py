# tests/test_markov.py

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ptorus.adapters.exceptions import ElementaryPair, InconsistentBase
from ptorus.domain.enums import BowditchVerdictKind, FilterResult, MembershipVerdict
from ptorus.domain.models.markov import FareySlope, FareyWord, Representation, TraceTriple
from ptorus.domain.models.moebius import MoebiusMap
from ptorus.services.bowditch import BowditchTester
from ptorus.services.farey import (
    FareyTraceTable,
    farey_neighbors,
    farey_parents,
    farey_word,
    markov_residual,
    stern_brocot_path,
    trace_of_slope,
)
from ptorus.services.markov import (
    commutator_trace,
    jorgensen_filter,
    shimizu_leutbecher_filter,
    trace_triple,
    twist_action,
    word_matrix,
)
from ptorus.services.maskit import maskit_base_triple, maskit_rep
from ptorus.services.moebius import diagonal, translation

maskit_params = st.builds(
    complex,
    st.floats(min_value=-2.0, max_value=2.0, allow_nan=False),
    st.floats(min_value=1.0, max_value=5.0, allow_nan=False),
)


def _slopes(q_max: int):
    return [
        FareySlope.of(p, q)
        for q in range(1, q_max + 1)
        for p in range(-q, 2 * q + 1)
        if FareySlope.of(p, q).q == q
    ]


# ── наклоны и слова ───────────────────────────────────────────────────────────
def test_slope_normalization():
    assert FareySlope.of(-2, -4) == FareySlope(p=1, q=2)
    assert FareySlope.of(-1, 0) == FareySlope(p=1, q=0)
    assert FareySlope.parse("3/6") == FareySlope(p=1, q=2)
    assert FareySlope.parse("inf").is_infinity
    with pytest.raises(ValueError):
        FareySlope(p=2, q=4)
    with pytest.raises(ValueError):
        FareySlope.of(0, 0)


def test_word_base_cases():
    assert farey_word(FareySlope(p=1, q=0)) == FareyWord.from_string("a")
    assert farey_word(FareySlope(p=0, q=1)) == FareyWord.from_string("b")
    assert farey_word(FareySlope(p=1, q=1)) == FareyWord.from_string("Ab")


@pytest.mark.parametrize("slope", _slopes(8))
def test_word_abelianization(slope):
    word = farey_word(slope)
    assert word.abelianization() == (-slope.p, slope.q)
    assert word.is_cyclically_reduced


def test_word_rejects_unreduced():
    with pytest.raises(ValueError):
        FareyWord(letters=("a", "A"))
    assert len(FareyWord.from_string("aAb")) == 1


def test_farey_parents_and_neighbors():
    assert farey_parents(FareySlope(p=1, q=2)) == (FareySlope(p=0, q=1), FareySlope(p=1, q=1))
    assert farey_parents(FareySlope(p=3, q=1)) == (FareySlope(p=2, q=1), FareySlope(p=1, q=0))
    assert farey_parents(FareySlope(p=0, q=1)) is None
    assert FareySlope(p=1, q=3) in farey_neighbors(FareySlope(p=1, q=2))
    assert stern_brocot_path(FareySlope(p=2, q=5)) == (0, "LR")


# ── следы ─────────────────────────────────────────────────────────────────────
@pytest.mark.parametrize(
    "triple",
    [TraceTriple(x=0, y=0, z=0), TraceTriple(x=3, y=3, z=3)],
)
def test_markov_residual_examples(triple):
    assert markov_residual(triple) == 0


@given(maskit_params)
def test_markov_identity_on_maskit_family(mu):
    assert abs(markov_residual(maskit_base_triple(mu))) < 1e-12


@given(maskit_params)
def test_commutator_trace_minus_two(mu):
    assert abs(commutator_trace(maskit_rep(mu)) + 2) < 1e-9


def test_commutator_trace_conjugation_invariant():
    g = MoebiusMap([[1, 0.5 + 1j], [0.25, 2]])
    assert abs(commutator_trace(maskit_rep(1 + 1j).conjugate(g)) + 2) < 1e-9


def test_maskit_triple_values():
    t = maskit_base_triple(2j)
    assert (t.x, t.y, t.z) == (2, -2, -2 - 2j)
    rep = maskit_rep(2j)
    assert abs(trace_triple(rep).z - t.z) < 1e-14


def test_trace_of_slope_one_half():
    mu = 0.3 + 1.7j
    expected = -mu * mu + 2 * mu - 2
    assert abs(trace_of_slope(maskit_base_triple(mu), FareySlope(p=1, q=2)) - expected) < 1e-12
    assert trace_of_slope(maskit_base_triple(mu), FareySlope(p=1, q=0)) == 2


@pytest.mark.parametrize("mu", [0.4 + 1.9j, -1.2 + 2.5j, 1.0 + 1.65j])
def test_recursion_matches_word_matrices(mu):
    """Рекурсия по дереву Фарея совпадает со следом матрицы слова для q <= 8."""
    rep = maskit_rep(mu)
    table = FareyTraceTable(trace_triple(rep))
    for slope in _slopes(8):
        by_word = word_matrix(rep, farey_word(slope)).trace
        by_table = table.trace(slope)
        assert abs(by_word - by_table) <= 1e-9 * max(1.0, abs(by_word))


def test_trace_derivative_matches_difference():
    slope, mu, h = FareySlope(p=3, q=5), 0.7 + 1.8j, 1e-6
    table = FareyTraceTable(maskit_base_triple(mu), TraceTriple(x=0, y=1j, z=1j), check=False)
    value, derivative = table.trace_with_derivative(slope)
    shifted = FareyTraceTable(maskit_base_triple(mu + h), check=False).trace(slope)
    assert abs((shifted - value) / h - derivative) <= 1e-4 * max(1.0, abs(derivative))


def test_inconsistent_base_rejected():
    with pytest.raises(InconsistentBase):
        trace_of_slope(TraceTriple(x=2, y=2, z=5), FareySlope(p=1, q=2))


# ── скручивание ───────────────────────────────────────────────────────────────
def test_twist_action():
    mu = 0.5 + 2j
    rep = maskit_rep(mu)
    assert twist_action(rep, 0) is rep
    twisted = twist_action(rep, 1)
    assert abs(twisted.B.trace - 1j * (mu + 2)) < 1e-12
    composed = twist_action(twist_action(rep, 2), 3)
    assert composed.B.isclose(twist_action(rep, 5).B, 1e-10)


def test_twist_preserves_subgroup_h():
    rep = maskit_rep(-0.5 + 2.2j)
    conj = rep.B.inverse() @ rep.A @ rep.B
    for k in (-2, 1, 4):
        twisted = twist_action(rep, k)
        assert twisted.A.isclose(rep.A, 1e-12)
        assert (twisted.B.inverse() @ twisted.A @ twisted.B).isclose(conj, 1e-9)


# ── фильтры дискретности ──────────────────────────────────────────────────────
def test_jorgensen_filter():
    assert jorgensen_filter(maskit_rep(1 + 2j)) == FilterResult.PASS
    near = Representation(
        A=MoebiusMap([[1, 1e-4], [0, 1]]), B=MoebiusMap([[1, 0], [1e-4, 1]])
    )
    assert jorgensen_filter(near) == FilterResult.FAIL
    with pytest.raises(ElementaryPair):
        jorgensen_filter(Representation(A=diagonal(2), B=diagonal(3)))


def test_shimizu_leutbecher():
    inside = shimizu_leutbecher_filter(maskit_rep(4j), word_length=4)
    assert inside.applicable and inside.violation is None
    assert inside.min_abs_c is not None and inside.min_abs_c >= 0.5 - 1e-9
    outside = shimizu_leutbecher_filter(maskit_rep(0.1j), word_length=4)
    assert outside.violation is not None
    assert not shimizu_leutbecher_filter(Representation(A=diagonal(2), B=translation(1))).applicable


@pytest.mark.parametrize(
    "mu, expected",
    [
        (4j, BowditchVerdictKind.NOT_REJECTED),
        (2j, BowditchVerdictKind.NOT_REJECTED),
        (0.1 + 0.5j, BowditchVerdictKind.REJECTED),
    ],
)
def test_bowditch_examples(mu, expected):
    verdict = BowditchTester(depth=20).test(maskit_rep(mu))
    assert verdict.kind == expected
    if expected == BowditchVerdictKind.REJECTED:
        assert verdict.witness


def _random_conjugator(rng: np.random.Generator) -> MoebiusMap:
    """Случайная матрица SL(2, C) с |det| исходной матрицы не меньше 1/2."""
    while True:
        m = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        if abs(np.linalg.det(m)) >= 0.5:
            return MoebiusMap(m)


@pytest.mark.parametrize(
    "mu, expected, membership",
    [
        (2 + 3j, BowditchVerdictKind.NOT_REJECTED, MembershipVerdict.INSIDE),
        (1 + 0.3j, BowditchVerdictKind.REJECTED, MembershipVerdict.OUTSIDE),
    ],
)
def test_bowditch_verdict_stable_under_conjugation(slice_service, mu, expected, membership):
    """Поиск идёт только по следам: 100 случайных сопряжений не меняют вердикт."""
    tester = BowditchTester(depth=20)
    rep = maskit_rep(mu)
    assert tester.test(rep).kind == expected
    assert slice_service.membership(mu).verdict == membership
    rng = np.random.default_rng(2024)
    for _ in range(100):
        assert tester.test(rep.conjugate(_random_conjugator(rng))).kind == expected


def test_identities_on_large_maskit_sample():
    """x^2 + y^2 + z^2 - xyz = 0 до 1e-12 и tr[A, B] = -2 до 1e-9 на 10^4 случайных mu."""
    rng = np.random.default_rng(5)
    mus = rng.uniform(-2.0, 2.0, 10 ** 4) + 1j * rng.uniform(1.0, 5.0, 10 ** 4)
    for mu in mus:
        mu = complex(mu)
        assert abs(markov_residual(maskit_base_triple(mu))) < 1e-12
        assert abs(commutator_trace(maskit_rep(mu)) + 2) < 1e-9
