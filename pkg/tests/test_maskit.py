# tests/test_maskit.py

import math

import pytest

from ptorus.adapters.exceptions import NewtonDiverged, NoUpperHalfPlaneRoot, UsageError
from ptorus.domain.enums import FilterResult, MembershipVerdict
from ptorus.domain.models.markov import FareySlope
from ptorus.services.markov import jorgensen_filter
from ptorus.services.maskit import CuspSolver, boundary_max_im, cusp_solve, maskit_rep, maskit_trace

SQRT3 = math.sqrt(3)


def test_maskit_trace_one_half_polynomial():
    mu = -0.4 + 2.3j
    value, derivative = maskit_trace(FareySlope(p=1, q=2), mu)
    assert abs(value - (-mu * mu + 2 * mu - 2)) < 1e-12
    assert abs(derivative - (-2 * mu + 2)) < 1e-12


@pytest.mark.parametrize(
    "slope, guess, expected, sign",
    [
        (FareySlope(p=0, q=1), 2.5j, 2j, -2),
        (FareySlope(p=1, q=1), 2 + 2.5j, 2 + 2j, -2),
        (FareySlope(p=1, q=2), 1 + 2j, 1 + SQRT3 * 1j, 2),
    ],
)
def test_cusp_values(slope, guess, expected, sign):
    cusp = cusp_solve(slope, guess)
    assert abs(cusp.mu - expected) < 1e-10
    assert cusp.trace_sign == sign
    assert cusp.residual <= 1e-10


def test_cusp_rejects_bad_input():
    with pytest.raises(NoUpperHalfPlaneRoot):
        cusp_solve(FareySlope(p=1, q=2), 1 - 1j)
    with pytest.raises(UsageError):
        cusp_solve(FareySlope(p=1, q=0), 2j)


def test_trace_boundary_q2(slice_service):
    trace = slice_service.trace_boundary(2, workers=1)
    assert [str(c.slope) for c in trace.cusps] == ["0/1", "1/2"]
    assert abs(trace.min_im - SQRT3) < 1e-10
    assert trace.min_cusp.slope == FareySlope(p=1, q=2)


def test_trace_boundary_sorted_and_monotone(slice_service):
    previous = math.inf
    for q_max in (2, 3, 5, 8):
        trace = slice_service.trace_boundary(q_max, workers=1)
        values = [c.slope.value for c in trace.cusps]
        assert values == sorted(values)
        assert all(c.slope.q <= q_max for c in trace.cusps)
        assert all(c.mu.imag > 0 for c in trace.cusps)
        assert trace.min_im <= previous + 1e-12
        previous = trace.min_im


def test_trace_boundary_rejects_zero(slice_service):
    with pytest.raises(UsageError):
        slice_service.trace_boundary(0)


@pytest.mark.slow
def test_trace_boundary_deep_minimum(slice_service):
    """Минимум Im по каспам с q <= 50 около 1.6."""
    trace = slice_service.trace_boundary(50, workers=1)
    assert 1.58 <= trace.min_im <= 1.68
    assert all(c.mu.imag > 1.5 for c in trace.cusps)


@pytest.mark.parametrize("q_max", [10, 20])
def test_trace_boundary_stays_above_one_and_a_half(slice_service, q_max):
    trace = slice_service.trace_boundary(q_max, workers=1)
    assert trace.min_im > 1.5
    assert all(c.mu.imag > 1.5 for c in trace.cusps)


def test_trace_boundary_real_parts_follow_farey_order(slice_service):
    """Re mu строго растёт вдоль наклонов, отсортированных по значению."""
    reals = [c.mu.real for c in slice_service.trace_boundary(10, workers=1).cusps]
    assert all(a < b for a, b in zip(reals, reals[1:]))


@pytest.mark.parametrize(
    "slope, expected",
    [
        (FareySlope(p=3, q=8), 0.6806 + 1.6332j),
        (FareySlope(p=5, q=13), 0.7183 + 1.6222j),
    ],
)
def test_deep_cusp_values(slice_service, slope, expected):
    assert abs(slice_service.cusp_by_continuation(slope).mu - expected) < 1e-3
    assert abs(cusp_solve(slope).mu - expected) < 1e-3


def test_midpoint_guess_cannot_pull_root_outside_parents():
    """С приближением от середины касп родителей каспа 3/8 лежит между их Re."""
    solver = CuspSolver()
    left, right = cusp_solve(FareySlope(p=1, q=3)), cusp_solve(FareySlope(p=2, q=5))
    cusp = solver.solve(FareySlope(p=3, q=8), (left.mu + right.mu) / 2, (left.mu.real, right.mu.real))
    assert left.mu.real < cusp.mu.real < right.mu.real
    assert cusp.mu.imag > 1.6


def test_root_outside_parent_interval_is_rejected():
    with pytest.raises(NewtonDiverged):
        CuspSolver().solve(FareySlope(p=3, q=8), 0.6806 + 1.6332j, (5.0, 6.0))


def test_boundary_cusps_are_parabolic_and_pass_jorgensen(slice_service):
    for cusp in slice_service.trace_boundary(8, workers=1).cusps:
        trace, _ = maskit_trace(cusp.slope, cusp.mu)
        assert abs(abs(trace) - 2) < 1e-10
        assert jorgensen_filter(maskit_rep(cusp.mu)) == FilterResult.PASS


@pytest.mark.parametrize("p, q", [(1, 3), (2, 5), (3, 8)])
def test_cusps_symmetric_under_reflection(slice_service, p, q):
    """cusp(-p/q) = -conj(cusp(p/q))."""
    positive = slice_service.cusp_by_continuation(FareySlope(p=p, q=q)).mu
    negative = slice_service.cusp_by_continuation(FareySlope(p=-p, q=q)).mu
    assert abs(negative + positive.conjugate()) < 1e-9


def test_boundary_height_is_periodic(slice_service):
    trace = slice_service.trace_boundary(3, workers=1)
    assert abs(boundary_max_im(trace, 0.0) - 2.0) < 1e-10
    assert abs(boundary_max_im(trace, 0.3) - boundary_max_im(trace, 2.3)) < 1e-12
    assert abs(boundary_max_im(trace, -0.7) - boundary_max_im(trace, 1.3)) < 1e-12


def test_rational_end_invariant_period(slice_service):
    half = slice_service.rational_end_invariant(FareySlope(p=1, q=2))
    shifted = slice_service.rational_end_invariant(FareySlope(p=3, q=2))
    assert abs(half.mu - (1 + SQRT3 * 1j)) < 1e-10
    assert abs(shifted.mu - (half.mu + 2)) < 1e-12
    assert shifted.slope == FareySlope(p=3, q=2)


def test_cusp_by_continuation_matches_direct(slice_service):
    slope = FareySlope(p=2, q=5)
    by_tree = slice_service.cusp_by_continuation(slope)
    direct = cusp_solve(slope, by_tree.mu + 0.01j)
    assert abs(by_tree.mu - direct.mu) < 1e-9
    with pytest.raises(UsageError):
        slice_service.cusp_by_continuation(FareySlope(p=1, q=0))


@pytest.mark.parametrize(
    "mu, expected",
    [
        (3j, MembershipVerdict.INSIDE),
        (0.5j, MembershipVerdict.OUTSIDE),
        (1 - 0.2j, MembershipVerdict.OUTSIDE),
    ],
)
def test_membership(slice_service, mu, expected):
    assert slice_service.membership(mu).verdict == expected


def test_membership_on_cusp_is_not_outside(slice_service):
    report = slice_service.membership(2j)
    assert report.verdict != MembershipVerdict.OUTSIDE
    assert report.reason
