import cmath
import math

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from ratsys.core import matrix, validate_params
from ratsys.spectrum import (
    CharPoly, Regime, char_poly, classify_regime, power_coeffs, roots, spectrum,
)

coef = st.floats(-5, 5, allow_nan=False)


@st.composite
def systems(draw):
    a = [draw(coef) for _ in range(4)]
    assume(a[0] * a[3] != a[2] * a[1])
    assume(abs(a[0] * a[3] - a[2] * a[1]) > 1e-6)
    return validate_params(*a)


def test_char_poly_example_system():
    assert char_poly(validate_params(1, 3, -4, -10)) == (-3, 4, -2)


def test_char_poly_pure_cube():
    # beta1 = alpha2 = 0 leaves x^3 - beta2*alpha1
    assert char_poly(validate_params(2, 0, 0, 1)) == (0, 0, -2)


def test_beta2_zero_roots():
    s = spectrum(validate_params(0.5, 3.0, 4.0, 0.0))
    assert sorted(r.value for r in s.real_roots) == pytest.approx([-2.0, 2.0, 3.0])


def test_example_roots():
    s = roots(CharPoly(-3.0, 4.0, -2.0))
    assert [(r.value, r.multiplicity) for r in s.real_roots] == [(pytest.approx(1.0), 1)]
    assert s.complex_pair.rho == pytest.approx(math.sqrt(2))
    assert s.complex_pair.theta == pytest.approx(math.pi / 4)
    assert s.regime is Regime.COMPLEX_RECESSIVE


def test_triple_root():
    s = roots(CharPoly(-3.0, 3.0, -1.0))
    assert [(r.value, r.multiplicity) for r in s.real_roots] == [(1.0, 3)]
    assert s.regime is Regime.TRIPLE


@pytest.mark.parametrize("b1", [1.0, 0.3, -1.7, 2.5])
def test_same_modulus_family_double_root(b1):
    s = spectrum(validate_params(0.0, b1, b1 * b1, 1.0))
    got = {round(r.value, 9): r.multiplicity for r in s.real_roots}
    assert got == {round(b1, 9): 2, round(-b1, 9): 1}
    assert s.regime is Regime.TWO_REAL_SAME_MODULUS


def test_same_modulus_family_dominant_pair():
    s = spectrum(validate_params(0.0, 1.0, 4.0, 1.0))
    assert s.regime is Regime.TWO_REAL_SAME_MODULUS
    assert s.spectral_radius == pytest.approx(2.0)


def test_distinct_moduli():
    # (x - 2)(x - 1)(x - 0.5)
    s = roots(CharPoly(-3.5, 3.5, -1.0))
    assert [r.value for r in s.real_roots] == pytest.approx([2.0, 1.0, 0.5])
    assert s.regime is Regime.DISTINCT_MODULI


def test_double_patterns():
    assert roots(CharPoly(-5.0, 8.0, -4.0)).regime is Regime.DOUBLE_DOMINANT  # 2, 2, 1
    assert roots(CharPoly(-4.0, 5.0, -2.0)).regime is Regime.DOUBLE_RECESSIVE  # 2, 1, 1


def test_complex_equal_regime():
    lam, th = 1.0, 1.0
    b1 = lam + 2 * math.cos(th)
    a2 = -(2 * lam * math.cos(th) + 1.0)
    p = validate_params((b1 * a2 + lam) / 1.0, b1, a2, 1.0)
    s = spectrum(p)
    assert s.regime is Regime.COMPLEX_EQUAL
    assert s.complex_pair.theta == pytest.approx(th)


@pytest.mark.parametrize("n,expected", [(0, (1, 0, 0)), (1, (0, 1, 0)), (2, (0, 0, 1))])
def test_power_coeffs_small(n, expected):
    assert (lambda c: (c.a0, c.a1, c.a2))(power_coeffs(CharPoly(-3, 4, -2), n)) == expected


def test_power_coeffs_three():
    p = validate_params(1, 3, -4, -10)
    c = power_coeffs(char_poly(p), 3)
    # x^3 = beta1 x^2 + alpha2 x - (beta1 alpha2 - beta2 alpha1)
    assert (c.a0, c.a1, c.a2) == (-(3 * -4 - (-10) * 1), -4, 3)


@settings(max_examples=300, deadline=None)
@given(systems())
def test_vieta_and_residuals(p):
    s = spectrum(p)
    eig = s.eigenvalues()
    assert len(eig) == 3
    scale = max(1.0, s.spectral_radius)
    assert abs(sum(eig).real - p.beta1) <= 1e-10 * scale
    prod = eig[0] * eig[1] * eig[2]
    assert abs(prod.real - p.det) <= 1e-10 * scale ** 3
    cp = char_poly(p)
    for r in s.real_roots:
        assert abs(cp(r.value)) <= 1e-9 * (1 + s.spectral_radius) ** 3
    if s.complex_pair is not None:
        z = s.complex_pair.value
        assert 0 < s.complex_pair.theta < math.pi
        assert abs(((z + cp.c2) * z + cp.c1) * z + cp.c0) <= 1e-9 * (1 + s.spectral_radius) ** 3


@settings(max_examples=200, deadline=None)
@given(systems())
def test_roots_agree_with_numpy(p):
    s = spectrum(p)
    ours = sorted(s.eigenvalues(), key=lambda z: (round(z.real, 6), z.imag))
    ref = sorted(np.roots([1.0, *char_poly(p)]), key=lambda z: (round(z.real, 6), z.imag))
    for a, b in zip(ours, ref):
        # numpy itself splits multiple roots by ~eps**(1/m)
        assert abs(a - b) <= 1e-4 * max(1.0, abs(b))


@settings(max_examples=100, deadline=None)
@given(systems())
def test_regime_is_reproducible(p):
    s = spectrum(p)
    assert classify_regime(s) is s.regime
    assert spectrum(p).regime is s.regime


@settings(max_examples=100, deadline=None)
@given(systems(), st.integers(0, 40))
def test_power_reconstruction(p, n):
    a = matrix(p)
    c = power_coeffs(char_poly(p), n)
    rec = c.a0 * np.eye(3) + c.a1 * a + c.a2 * a @ a
    direct = np.linalg.matrix_power(a, n)
    scale = np.abs(direct).max()
    # the three-term reduction is a different rounding path: compare entrywise relative to the
    # largest entry of the power
    assert np.abs(rec - direct).max() <= 1e-8 * max(1.0, scale)


def test_multiplicity_lookup():
    s = spectrum(validate_params(0.0, 1.0, 1.0, 1.0))
    assert s.multiplicity(1.0) == 2 and s.multiplicity(-1.0) == 1 and s.multiplicity(0.3) == 0
    assert cmath.isclose(s.eigenvalues()[0], 1.0)
