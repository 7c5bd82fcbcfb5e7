"""Closed-form solutions.

For beta2 != 0 the orbit is a ratio of terms of the third-order linear
recurrence

    v[n+3] = beta1 v[n+2] + alpha2 v[n+1] - (beta1 alpha2 - beta2 alpha1) v[n]

started from v[-1] = 1, v[0] = y0, v[1] = beta2 x0 + alpha2:

    x[n] = v[n+1] / (beta2 v[n-1]) - alpha2 / beta2,    y[n] = v[n] / v[n-1].

For beta2 == 0, y alternates between y0 and alpha2/y0 and x solves a linear
equation with 2-periodic coefficients.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .core import DIVIDE_TOL, Line, Params, Point, divide_threshold
from .spectrum import CLUSTER_TOL, Regime, Spectrum, spectrum as compute_spectrum

ZERO_TOL = 1e-12


class ForbiddenOrbit(ArithmeticError):
    """The requested iterate does not exist: the orbit meets y = 0 first."""

    def __init__(self, message, witness_n=None):
        super().__init__(message)
        self.witness_n = witness_n


class SingularSystem(ArithmeticError):
    pass


class NotApplicable(ValueError):
    pass


@dataclass(frozen=True)
class VSequence:
    """Terms v[-1..n] stored as mantissa * 2**exponent.

    ``bound`` carries a running bound on the magnitudes that entered each term
    (same exponent as the mantissa); a term is treated as zero when it is
    below ``ZERO_TOL * bound``.
    """

    params: Params
    mantissa: tuple
    exponent: tuple
    bound: tuple

    def __len__(self):
        return len(self.mantissa)

    def _i(self, n):
        i = n + 1
        if not 0 <= i < len(self.mantissa):
            raise IndexError(n)
        return i

    def __getitem__(self, n) -> float:
        i = self._i(n)
        return math.ldexp(self.mantissa[i], self.exponent[i])

    def ratio(self, n, m) -> float:
        """v[n] / v[m] without overflow in the individual terms."""
        i, j = self._i(n), self._i(m)
        return math.ldexp(self.mantissa[i] / self.mantissa[j], self.exponent[i] - self.exponent[j])

    def is_zero(self, n, tol: float = ZERO_TOL) -> bool:
        i = self._i(n)
        return abs(self.mantissa[i]) <= tol * self.bound[i]

    def margin(self, n) -> float:
        """|v[n]| relative to its rounding bound; tiny values mean near-forbidden."""
        i = self._i(n)
        return abs(self.mantissa[i]) / self.bound[i] if self.bound[i] else math.inf


def _normalize(m, g, e):
    big = max(abs(m), g)
    if big == 0 or not math.isfinite(big):
        return m, g, e
    k = math.frexp(big)[1]
    return math.ldexp(m, -k), math.ldexp(g, -k), e + k


def v_sequence(p: Params, z0, n: int) -> VSequence:
    """v[-1], v[0], ..., v[n] for the initial point z0."""
    x0, y0 = z0
    c0 = p.beta1 * p.alpha2 - p.beta2 * p.alpha1
    coeffs = (float(p.beta1), float(p.alpha2), -float(c0))
    start = [
        (1.0, 1.0, 0),
        (float(y0), abs(float(y0)), 0),
        (float(p.beta2 * x0 + p.alpha2), abs(float(p.beta2 * x0)) + abs(float(p.alpha2)), 0),
    ]
    terms = [_normalize(*t) for t in start][: n + 2]
    for _ in range(n - 1):
        window = terms[-3:][::-1]  # v[k+2], v[k+1], v[k]
        e = max(t[2] for t in window)
        parts, bound = [], 0.0
        for c, (m, g, ek) in zip(coeffs, window):
            parts.append(c * math.ldexp(m, ek - e))
            bound += abs(c) * math.ldexp(g, ek - e)
        terms.append(_normalize(math.fsum(parts), bound, e))
    return VSequence(p, tuple(t[0] for t in terms), tuple(t[2] for t in terms),
                     tuple(t[1] for t in terms))


def _point_at(p: Params, seq: VSequence, k: int) -> Point:
    b2 = float(p.beta2)
    return Point(seq.ratio(k + 1, k - 1) / b2 - float(p.alpha2) / b2, seq.ratio(k, k - 1))


def solve_beta2_nonzero(p: Params, z0, n: int, seq: Optional[VSequence] = None,
                        tol: float = DIVIDE_TOL) -> Point:
    """n-th iterate from the v-sequence.

    An earlier iterate whose y is zero under the same guard ``core.step``
    uses raises ForbiddenOrbit, so both evaluation paths stop at the same step.
    """
    if p.beta2 == 0:
        raise ValueError("beta2 must be nonzero")
    if seq is None or len(seq) < n + 3:
        seq = v_sequence(p, z0, n + 1)
    for k in range(0, n):
        z = _point_at(p, seq, k)
        if abs(z.y) <= divide_threshold(p, z.x, tol):
            raise ForbiddenOrbit(f"y vanishes at iterate {k}: the orbit fails at step {k + 1}", k + 1)
    return _point_at(p, seq, n)


def _geometric(r: float, m: int) -> float:
    """sum_{k<m} r**k, stable for r near 1."""
    if m == 0:
        return 0.0
    if r == 1.0:
        return float(m)
    if r > 0:
        lr = math.log(r)
        return math.expm1(m * lr) / math.expm1(lr)
    return (1.0 - r ** m) / (1.0 - r)


def solve_beta2_zero(p: Params, z0, n: int) -> Point:
    if p.beta2 != 0:
        raise ValueError("beta2 must be zero")
    a1, b1, a2 = float(p.alpha1), float(p.beta1), float(p.alpha2)
    x0, y0 = float(z0[0]), float(z0[1])
    if y0 == 0:
        raise ForbiddenOrbit("y0 = 0", 1)
    y = y0 if n % 2 == 0 else a2 / y0
    m = n // 2
    drive = a1 * (b1 + y0) / (b1 * b1)
    if a2 == b1 * b1:
        # resonant case: the 2-step multiplier is exactly one
        core = x0 + drive * m
    else:
        r = a2 / (b1 * b1)
        core = r ** -m * (x0 + drive * _geometric(r, m))
    x = core if n % 2 == 0 else a1 / y0 + b1 / y0 * core
    return Point(x, y)


def closed_form(p: Params, z0, n: int) -> Point:
    """n-th iterate from the closed form of the matching branch."""
    if p.beta2 == 0:
        return solve_beta2_zero(p, z0, n)
    return solve_beta2_nonzero(p, z0, n)


def closed_form_orbit(p: Params, z0, n: int, tol: float = DIVIDE_TOL) -> list:
    """Points 0..n from the closed form; None from the first missing iterate on."""
    if p.beta2 == 0:
        if abs(float(z0[1])) <= divide_threshold(p, float(z0[0]), tol):
            return [Point(*z0)] + [None] * n
        return [solve_beta2_zero(p, z0, k) for k in range(n + 1)]
    seq = v_sequence(p, z0, n + 1)
    out: list = []
    for k in range(n + 1):
        prev = out[-1] if out else None
        if k > 0 and (prev is None or abs(prev.y) <= divide_threshold(p, prev.x, tol)):
            out.append(None)
            continue
        out.append(_point_at(p, seq, k))
    return out


def closed_form_exact(p: Params, z0, n: int) -> list:
    """Points 0..n of the closed form in rational arithmetic.

    Parameters and z0 are converted with ``Fraction`` (floats exactly), so the
    result is the true orbit of the given values.  None marks missing iterates.
    """
    a1, b1, a2, b2 = (Fraction(c) for c in p)
    x0, y0 = Fraction(z0[0]), Fraction(z0[1])
    out: list = [Point(x0, y0)]
    if b2 == 0:
        if y0 == 0:
            return out + [None] * n
        drive = a1 * (b1 + y0) / (b1 * b1)
        r = a2 / (b1 * b1)
        for k in range(1, n + 1):
            m = k // 2
            core = x0 + drive * m if r == 1 else (x0 + drive * (1 - r ** m) / (1 - r)) / r ** m
            x = core if k % 2 == 0 else a1 / y0 + b1 / y0 * core
            out.append(Point(x, y0 if k % 2 == 0 else a2 / y0))
        return out
    c0 = b1 * a2 - b2 * a1
    v = [Fraction(1), y0, b2 * x0 + a2]  # v[-1], v[0], v[1]
    while len(v) < n + 3:
        v.append(b1 * v[-1] + a2 * v[-2] - c0 * v[-3])
    for k in range(1, n + 1):
        if v[k] == 0 or out[-1] is None:  # v[k] is v[k-1] in sequence terms
            out.append(None)
            continue
        out.append(Point(v[k + 2] / (b2 * v[k]) - a2 / b2, v[k + 1] / v[k]))
    return out


# complex regime ------------------------------------------------------------

@dataclass(frozen=True)
class ComplexConstants:
    """v[n] = k (P lam**n + 2 rho**n cos(a + n theta)), up to an overall sign.

    P >= 0 is reached by flipping the sign of v (a -> a + pi).  At the fixed
    point the oscillating part vanishes: k = 0 and P = inf.
    """

    P: float
    a: float
    k: float
    lam: float
    rho: float
    theta: float

    @property
    def at_fixed_point(self) -> bool:
        return self.k == 0


def _complex_parts(s: Spectrum):
    if s.complex_pair is None:
        raise NotApplicable("spectrum has no complex pair")
    return s.real_roots[0].value, s.complex_pair.rho, s.complex_pair.theta


def complex_constants(p: Params, z0, s: Optional[Spectrum] = None) -> ComplexConstants:
    """Solve for (kP, k cos a, k sin a) from v[1], v[0], v[-1] in real arithmetic."""
    if s is None:
        s = compute_spectrum(p)
    lam, rho, th = _complex_parts(s)
    c, sn = math.cos(th), math.sin(th)
    # v[n] = A lam^n + 2 rho^n (B cos n th - C sin n th)
    m = np.array([
        [lam, 2 * rho * c, -2 * rho * sn],
        [1.0, 2.0, 0.0],
        [1 / lam, 2 * c / rho, 2 * sn / rho],
    ])
    rhs = np.array([float(p.beta2 * z0[0] + p.alpha2), float(z0[1]), 1.0])
    cond = np.linalg.cond(m)
    if not np.isfinite(cond) or cond > 1e12:
        raise SingularSystem(f"coefficient matrix is numerically singular (cond={cond:.3g})")
    big_a, big_b, big_c = np.linalg.solve(m, rhs)
    k = math.hypot(big_b, big_c)
    scale = max(abs(big_a), k, 1e-300)
    if k <= 1e-13 * scale:
        return ComplexConstants(math.inf, 0.0, 0.0, lam, rho, th)
    a = math.atan2(big_c, big_b)
    if big_a < 0:
        a += math.pi
    a %= 2 * math.pi
    if 2 * math.pi - a <= 1e-14:
        a = 0.0
    return ComplexConstants(float(abs(big_a) / k), a, float(k), lam, rho, th)


def sigma_tau(c: ComplexConstants, n: int):
    if c.lam == 0:
        raise ValueError("lambda must be nonzero")
    amp = 2 * (c.rho / c.lam) ** n
    ang = c.a + n * c.theta
    return amp * math.cos(ang), amp * math.sin(ang)


@dataclass(frozen=True)
class LineL:
    """beta2 x = (beta1 - lam)(y + lam), and its parallel through the fixed point."""

    lam: float
    line: Line
    parallel: Line
    fixed_point: Point


def fixed_point_of(p: Params, lam: float) -> Point:
    return Point((lam * lam - float(p.alpha2)) / float(p.beta2), lam)


def line_L(p: Params, lam: float) -> LineL:
    if p.beta2 == 0:
        raise ValueError("beta2 must be nonzero")
    d = float(p.beta1) - lam
    line = Line(float(p.beta2), -d, -d * lam).normalized()
    fp = fixed_point_of(p, lam)
    return LineL(lam, line, line.through(fp).normalized(), fp)


@dataclass(frozen=True)
class Conic:
    """Orbit invariant in the |lam| = rho complex regime.

    ``transform`` maps (x, y) to coordinates where the conic is
    X^2 + Y^2 = (2/P)^2 (X - rho*lam)^2: focus at the origin (the image of
    the fixed point) and directrix X = rho*lam.
    """

    rows: tuple  # ((ax, ay, a0), (bx, by, b0))
    P: float
    directrix: float
    constants: ComplexConstants

    @property
    def eccentricity(self) -> float:
        return 2.0 / self.P

    def transform(self, z) -> Point:
        (ax, ay, a0), (bx, by, b0) = self.rows
        return Point(ax * z[0] + ay * z[1] + a0, bx * z[0] + by * z[1] + b0)

    def inverse(self, w) -> Point:
        (ax, ay, a0), (bx, by, b0) = self.rows
        det = ax * by - ay * bx
        u, v = w[0] - a0, w[1] - b0
        return Point((by * u - ay * v) / det, (ax * v - bx * u) / det)

    def residual(self, z) -> float:
        """Relative defect of the conic equation at z."""
        X, Y = self.transform(z)
        lhs = X * X + Y * Y
        rhs = (self.eccentricity * (X - self.directrix)) ** 2
        denom = lhs + rhs
        return abs(lhs - rhs) / denom if denom else 0.0

    def curve(self, phi: float) -> Optional[Point]:
        """Conic point at polar angle phi about the focus (None at asymptotes)."""
        e, d = self.eccentricity, self.directrix
        den = 1.0 + e * math.cos(phi)
        if den == 0:
            return None
        r = e * d / den
        return self.inverse((r * math.cos(phi), r * math.sin(phi)))


P_ZERO_TOL = 1e-12


def conic_of(p: Params, z0, s: Optional[Spectrum] = None) -> Conic:
    if s is None:
        s = compute_spectrum(p)
    if s.regime is not Regime.COMPLEX_EQUAL:
        raise NotApplicable(f"conic invariant needs |lambda| = rho, regime is {s.regime.value}")
    cc = complex_constants(p, z0, s)
    # rounding leaves P ~ eps for points on L
    if cc.at_fixed_point or cc.P <= P_ZERO_TOL or not math.isfinite(cc.P):
        raise NotApplicable("initial point is the fixed point or lies on L (P = 0)")
    lam, rho, th = cc.lam, cc.rho, cc.theta
    c, sn = math.cos(th), math.sin(th)
    den = lam * c - rho
    if abs(den) <= CLUSTER_TOL * max(1.0, abs(lam)):
        raise NotApplicable("lambda*cos(theta) = rho: change of variables undefined")
    b2, a2 = float(p.beta2), float(p.alpha2)
    # X = (b2 x + a2 - rho^2) lam / (2 den) - (y - lam) rho lam c / den
    # Y = (b2 x + a2 - rho^2) / (2 sin) - (y - lam)(lam + rho c) / sin
    fx = lam / (2 * den)
    gx = -rho * lam * c / den
    fy = 1 / (2 * sn)
    gy = -(lam + rho * c) / sn
    k0 = a2 - rho * rho
    rows = (
        (fx * b2, gx, fx * k0 - gx * lam),
        (fy * b2, gy, fy * k0 - gy * lam),
    )
    return Conic(rows, cc.P, rho * lam, cc)
