from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ratsys.core import (
    DegenerateRiccati, DivisionByZero, Line, Params, Point, advance, iterate, lift,
    matrix, step, validate_params,
)

coef = st.floats(-3, 3, allow_nan=False).filter(lambda v: abs(v) > 1e-3)
EXAMPLE = (1, 3, -4, -10)


@st.composite
def systems(draw):
    a = [draw(coef) for _ in range(4)]
    if draw(st.booleans()):
        a[3] = 0.0
    if a[0] * a[3] == a[2] * a[1]:
        a[0] += 0.5
    return validate_params(*a)


def test_validate_accepts_example_system():
    assert validate_params(*EXAMPLE) == Params(*EXAMPLE)


@pytest.mark.parametrize("raw", [(2, 4, 1, 2), (0, 1, 0, 0)])
def test_validate_rejects_riccati(raw):
    with pytest.raises(DegenerateRiccati, match=r"alpha1\*beta2 == alpha2\*beta1"):
        validate_params(*raw)


@pytest.mark.parametrize("bad", [float("nan"), float("inf"), "1"])
def test_validate_rejects_non_finite(bad):
    with pytest.raises(ValueError):
        validate_params(1, bad, 2, 3)


def test_step_by_hand():
    p = validate_params(*map(Fraction, EXAMPLE))
    assert step(p, (Fraction(-11, 20), Fraction(3, 2))) == (Fraction(-13, 30), 1)
    assert step(p, (Fraction(-1, 2), Fraction(1))) == (Fraction(-1, 2), 1)


def test_step_zero_denominator():
    with pytest.raises(DivisionByZero):
        step(validate_params(*EXAMPLE), (0.0, 0.0))


def test_iterate_four_cycle():
    o = iterate(validate_params(1, 1, -1, 0), (0.0, 1.0), 4)
    assert o.complete and o.points[4] == pytest.approx((0.0, 1.0))


def test_iterate_zero_steps():
    o = iterate(validate_params(*EXAMPLE), (1.0, 2.0), 0)
    assert o.points == (Point(1.0, 2.0),) and o.status == "complete" and o.steps == 0


def test_iterate_reports_failing_step():
    # (-2/5, y0) sends y1 to zero, so the second step cannot be taken
    o = iterate(validate_params(*EXAMPLE), (-0.4, 7.0), 5)
    assert o.hit == 2 and len(o.points) == 2 and abs(o.points[-1].y) < 1e-12


def test_matrix_layout_and_determinant():
    a = matrix(validate_params(*EXAMPLE))
    assert a.tolist() == [[3, 0, 1], [-10, 0, -4], [0, 1, 0]]
    assert np.linalg.det(a) == pytest.approx(2.0)
    assert np.trace(matrix(validate_params(1, 0, 2, 3))) == 0


def test_line_normalisation():
    ln = Line(-10.0, -2.0, -2.0).normalized()
    assert (ln.a, ln.b, ln.c) == (1.0, 0.2, 0.2)
    assert Line(0.0, -3.0, 6.0).normalized() == Line(0.0, 1.0, -2.0)
    assert ln.same_locus(Line(5.0, 1.0, 1.0))


def exact_lift(p, z0, n):
    a1, b1, a2, b2 = map(Fraction, p)
    v = [Fraction(z0[0]), Fraction(z0[1]), Fraction(1)]
    for _ in range(n):
        v = [b1 * v[0] + a1 * v[2], b2 * v[0] + a2 * v[2], v[1]]
    return v[0] / v[2], v[1] / v[2]


@settings(max_examples=300, deadline=None)
@given(systems(), st.floats(-3, 3), st.floats(-3, 3), st.integers(0, 30))
def test_orbit_matches_linear_lift(p, x0, y0, n):
    o = iterate(p, (x0, y0), n)
    if not o.complete:
        return
    for u, v in zip(o.points[n], exact_lift(p, (x0, y0), n)):
        assert abs(u - float(v)) <= 1e-9 * max(1.0, abs(float(v)))


@settings(max_examples=100, deadline=None)
@given(systems(), st.floats(-3, 3), st.floats(0.1, 3), st.integers(0, 20), st.integers(0, 20))
def test_iterate_prefix(p, x0, y0, n, m):
    n, m = sorted((n, m))
    a, b = iterate(p, (x0, y0), n), iterate(p, (x0, y0), m)
    if a.complete and b.complete:
        assert b.points[: n + 1] == a.points


@settings(max_examples=50, deadline=None)
@given(systems(), st.floats(-3, 3), st.floats(-3, 3))
def test_step_is_deterministic(p, x0, y0):
    try:
        assert step(p, (x0, y0)) == step(p, (x0, y0))
    except DivisionByZero:
        pass


def test_advance_matches_iterate():
    p = validate_params(1.0, 1.0, 2.0, 1.0)
    rng = np.random.default_rng(0)
    x0, y0 = rng.uniform(0, 3, 20), rng.uniform(0.1, 3, 20)
    x, y, hit = advance(p, x0, y0, 25)
    for i in range(20):
        o = iterate(p, (x0[i], y0[i]), 25)
        assert hit[i] == 0 and (x[i], y[i]) == o.points[-1]


def test_advance_reports_hit():
    x, y, hit = advance(validate_params(*EXAMPLE), [-0.4, 1.0], [7.0, 1.0], 5)
    assert hit.tolist() == [2, 0]
