# tests/test_moebius.py

import cmath
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ptorus.adapters.exceptions import IdentityMap, NotInUpperHalfPlane, NotLoxodromic, SingularMatrix
from ptorus.config import numeric_settings
from ptorus.domain.enums import IsometryClass
from ptorus.domain.models.moebius import MoebiusMap, RiemannPoint, matrix_distance
from ptorus.services.moebius import (
    classify,
    commutator,
    compose,
    complex_translation_length,
    diagonal,
    fixed_points,
    hyperbolic_distance,
    identity_map,
    maskit_generator,
    translation,
)

reals = st.floats(min_value=-2.0, max_value=2.0, allow_nan=False)
heights = st.floats(min_value=1.0, max_value=5.0, allow_nan=False)
maskit_params = st.builds(complex, reals, heights)


def test_translations_add():
    assert (translation(2) @ translation(3)).isclose(translation(5), 1e-15)


def test_compose_acts_as_composition():
    f, g = maskit_generator(1 + 2j), MoebiusMap([[2, 1j], [1, 1 + 1j]])
    z = 0.3 + 0.7j
    assert compose(f, g).apply(z).value == pytest.approx(f.apply(g.apply(z)).value, abs=1e-12)
    assert compose(translation(2), translation(-2)).isclose(identity_map(), 1e-15)


def test_maskit_quotient_is_translation():
    mu, nu = 1 + 2j, 3j
    assert (maskit_generator(mu) @ maskit_generator(nu).inverse()).isclose(translation(mu - nu), 1e-13)


@given(maskit_params, maskit_params)
def test_maskit_quotient_property(mu, nu):
    """U_mu U_nu^-1 = T_{mu - nu} для случайных пар."""
    quotient = maskit_generator(mu) @ maskit_generator(nu).inverse()
    assert matrix_distance(quotient, translation(mu - nu)) < 1e-13


def test_inverse_gives_identity():
    f = MoebiusMap([[2 + 1j, 3], [1, 2]])
    assert (f @ f.inverse()).isclose(identity_map(), 1e-12)


def test_zero_determinant_rejected():
    with pytest.raises(SingularMatrix):
        MoebiusMap([[1, 2], [2, 4]])


def test_projective_equality():
    f = maskit_generator(1 + 1j)
    g = MoebiusMap(-f.matrix, normalize=False)
    assert f == g
    assert hash(f) == hash(g)
    assert classify(f) == classify(g)


@pytest.mark.parametrize(
    "f, expected",
    [
        (translation(2), IsometryClass.PARABOLIC),
        (maskit_generator(2j), IsometryClass.PARABOLIC),
        (diagonal(2), IsometryClass.LOXODROMIC),
        (identity_map(), IsometryClass.IDENTITY),
        (MoebiusMap([[math.cos(0.3), -math.sin(0.3)], [math.sin(0.3), math.cos(0.3)]]), IsometryClass.ELLIPTIC),
    ],
)
def test_classify(f, expected):
    assert classify(f) == expected


small = st.builds(complex, reals, reals)
conjugators = st.builds(lambda b, c: MoebiusMap([[1, b], [c, 1 + b * c]], normalize=False), small, small)
multipliers = st.builds(
    cmath.rect,
    st.floats(min_value=1.2, max_value=3.0, allow_nan=False),
    st.floats(min_value=-math.pi, max_value=math.pi, allow_nan=False),
)


@pytest.mark.parametrize(
    "f",
    [
        translation(2),
        maskit_generator(1 + 2j),
        diagonal(2),
        identity_map(),
        MoebiusMap([[math.cos(0.3), -math.sin(0.3)], [math.sin(0.3), math.cos(0.3)]]),
    ],
)
@given(g=conjugators)
def test_classify_invariant_under_conjugation(f, g):
    assert classify(g @ f @ g.inverse()) == classify(f)


@given(multipliers, conjugators)
def test_translation_length_exponent_is_multiplier(k, g):
    """exp(lambda) совпадает с multiplier() для сопряжённого diag(k)."""
    f = g @ diagonal(k) @ g.inverse()
    multiplier = f.multiplier()
    assert abs(cmath.exp(complex_translation_length(f)) - multiplier) <= 1e-10 * abs(multiplier)


def test_fixed_points():
    assert fixed_points(translation(2)) == [RiemannPoint.infinity()]
    (point,) = fixed_points(maskit_generator(2j))
    assert abs(point.value - 1j) < 1e-12
    points = fixed_points(diagonal(2))
    assert RiemannPoint.infinity() in points
    assert any(p.value is not None and abs(p.value) < 1e-15 for p in points)
    with pytest.raises(IdentityMap):
        fixed_points(identity_map())


def test_complex_translation_length():
    assert abs(complex_translation_length(diagonal(2)) - math.log(4)) < 1e-12
    rotated = diagonal(2 * cmath.exp(1j * math.pi / 6))
    assert abs(complex_translation_length(rotated) - complex(math.log(4), math.pi / 3)) < 1e-12
    with pytest.raises(NotLoxodromic):
        complex_translation_length(translation(2))


def test_hyperbolic_distance():
    assert abs(hyperbolic_distance(1j, 2j) - math.log(2)) < 1e-14
    assert hyperbolic_distance(1 + 1j, 1 + 1j) == 0
    with pytest.raises(NotInUpperHalfPlane):
        hyperbolic_distance(1j, -1j)


@given(maskit_params, maskit_params)
def test_hyperbolic_distance_symmetric(z, w):
    assert abs(hyperbolic_distance(z, w) - hyperbolic_distance(w, z)) < 1e-12


def test_apply_handles_infinity():
    u = maskit_generator(1 + 1j)
    assert translation(2).apply(RiemannPoint.infinity()).is_infinity
    assert u.apply(0).is_infinity
    assert abs(u.apply(RiemannPoint.infinity()).value - (1 + 1j)) < 1e-15
    assert abs(translation(2).apply(1j).value - (2 + 1j)) < 1e-15


@pytest.mark.parametrize("k", [0, 1, 5, 17, -3])
def test_power_matches_repeated_product(k):
    f = MoebiusMap([[1 + 0.2j, 0.5], [0.3j, 1]])
    expected = identity_map()
    step = f if k >= 0 else f.inverse()
    for _ in range(abs(k)):
        expected = expected @ step
    assert f.power(k).isclose(expected, 1e-10)


def test_long_unitary_chain_keeps_unit_determinant():
    """10^4 композиций случайных SU(2): det остаётся в пределах det_tol."""
    rng = np.random.default_rng(11)
    acc = identity_map()
    for _ in range(10 ** 4):
        v = rng.normal(size=4)
        alpha, beta = complex(v[0], v[1]), complex(v[2], v[3])
        norm = math.sqrt(abs(alpha) ** 2 + abs(beta) ** 2)
        alpha, beta = alpha / norm, beta / norm
        acc = compose(acc, MoebiusMap([[alpha, -beta.conjugate()], [beta, alpha.conjugate()]], normalize=False))
    assert abs(acc.det - 1) <= numeric_settings.det_tol


def test_long_loxodromic_chain_keeps_trace():
    """h = g diag(k) g^-1, произведение 10^4 копий: без SingularMatrix, след k^n + k^-n."""
    k, n = 1.001, 10 ** 4
    g = MoebiusMap([[1, 1], [1, 2]])
    h = g @ diagonal(k) @ g.inverse()
    acc = identity_map()
    for _ in range(n):
        acc = compose(acc, h)
    expected = k ** n + k ** -n
    assert abs(acc.trace - expected) <= 1e-8 * expected


def test_product_with_large_entries_is_not_rescaled():
    """det = 1 в точной арифметике: произведение совпадает с сырым произведением матриц."""
    f = MoebiusMap([[1e6 + 1, 1e6], [1, 1]], normalize=False)
    assert np.array_equal(compose(f, f).matrix, f.matrix @ f.matrix)


@given(maskit_params)
def test_commutator_of_maskit_pair_is_parabolic(mu):
    c = commutator(translation(2), maskit_generator(mu))
    assert abs(c.trace + 2) < 1e-9


def test_sign_normalized_trace():
    f = MoebiusMap(-np.eye(2) @ translation(3).matrix, normalize=False)
    assert f.sign_normalized().trace.real > 0
