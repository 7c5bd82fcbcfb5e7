"""The rational system and its direct iteration.

    x[n+1] = (alpha1 + beta1 * x[n]) / y[n]
    y[n+1] = (alpha2 + beta2 * x[n]) / y[n]

Direct iteration is the ground truth every closed form in this package is
checked against.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Real
from typing import NamedTuple, Optional

import numpy as np

DIVIDE_TOL = 1e-12


@dataclass(frozen=True)
class Tolerances:
    divide: float = DIVIDE_TOL
    cluster: float = 1e-8
    membership: float = 1e-9
    period: float = 1e-8


class DegenerateRiccati(ValueError):
    """alpha1*beta2 == alpha2*beta1: the system collapses to a Riccati equation."""


class DivisionByZero(ArithmeticError):
    """The denominator y vanished (the point is on the forbidden set)."""


@dataclass(frozen=True)
class Params:
    alpha1: Real
    beta1: Real
    alpha2: Real
    beta2: Real

    def __iter__(self):
        return iter((self.alpha1, self.beta1, self.alpha2, self.beta2))

    @property
    def det(self):
        """Determinant of the associated matrix, beta2*alpha1 - beta1*alpha2."""
        return self.beta2 * self.alpha1 - self.beta1 * self.alpha2


class Point(NamedTuple):
    x: float
    y: float


@dataclass(frozen=True)
class Orbit:
    """A finite trajectory.

    ``hit`` is None when all requested steps were taken.  Otherwise it is the
    1-based index of the step that could not be taken: ``points`` then holds
    ``hit`` points and the last one has a vanishing y.
    """

    start: Point
    points: tuple
    hit: Optional[int] = None

    @property
    def complete(self) -> bool:
        return self.hit is None

    @property
    def status(self) -> str:
        return "complete" if self.hit is None else "hit_forbidden"

    @property
    def steps(self) -> int:
        return len(self.points) - 1

    def __len__(self):
        return len(self.points)

    def as_array(self) -> np.ndarray:
        return np.array(self.points, dtype=float).reshape(-1, 2)


@dataclass(frozen=True)
class Line:
    """The locus a*x + b*y + c = 0, optionally tagged with a step index."""

    a: float
    b: float
    c: float
    witness_n: Optional[int] = None

    def normalized(self) -> "Line":
        """Scale so max(|a|, |b|) = 1 with the first nonzero of (a, b) positive."""
        m = max(abs(self.a), abs(self.b))
        if m == 0:
            raise ValueError("a and b are both zero")
        lead = self.a if self.a != 0 else self.b
        m = math.copysign(m, lead)
        # + 0.0 turns -0.0 into 0.0
        return Line(self.a / m + 0.0, self.b / m + 0.0, self.c / m + 0.0, self.witness_n)

    def value(self, z) -> float:
        return self.a * z[0] + self.b * z[1] + self.c

    def distance(self, z) -> float:
        return abs(self.value(z)) / math.hypot(self.a, self.b)

    def contains(self, z, tol: float = 1e-9) -> bool:
        return self.distance(z) <= tol

    def through(self, z) -> "Line":
        """Parallel line through z."""
        return Line(self.a, self.b, -(self.a * z[0] + self.b * z[1]), self.witness_n)

    def same_locus(self, other: "Line", tol: float = 1e-12) -> bool:
        u, v = self.normalized(), other.normalized()
        return max(abs(u.a - v.a), abs(u.b - v.b), abs(u.c - v.c)) <= tol * max(1.0, abs(u.c))


def validate_params(alpha1, beta1, alpha2, beta2) -> Params:
    """Build Params, rejecting non-finite values and the Riccati case.

    The degeneracy test is exact on the given values, so callers wanting a
    nearby non-degenerate system must perturb it themselves.
    """
    values = (alpha1, beta1, alpha2, beta2)
    for name, v in zip(("alpha1", "beta1", "alpha2", "beta2"), values):
        if not isinstance(v, Real) or not math.isfinite(v):
            raise ValueError(f"{name} must be a finite real number, got {v!r}")
    if alpha1 * beta2 == alpha2 * beta1:
        raise DegenerateRiccati(
            "degenerate parameters: alpha1*beta2 == alpha2*beta1 "
            f"({alpha1}*{beta2} == {alpha2}*{beta1}); the system reduces to a "
            "Riccati equation and is not handled"
        )
    return Params(alpha1, beta1, alpha2, beta2)


def divide_threshold(p: Params, x, tol: float = DIVIDE_TOL):
    """Largest |y| treated as zero at a point with abscissa x."""
    return tol * max(1, abs(p.alpha2) + abs(p.beta2) * abs(x))


def step(p: Params, z, tol: float = DIVIDE_TOL) -> Point:
    """One application of the map."""
    x, y = z
    if abs(y) <= divide_threshold(p, x, tol):
        raise DivisionByZero(f"y = {y!r} is zero within tolerance at x = {x!r}")
    return Point((p.alpha1 + p.beta1 * x) / y, (p.alpha2 + p.beta2 * x) / y)


class _ErrorTrack:
    """First-order rounding error carried along an orbit.

    The covariance of the (x, y) error is pushed through the Jacobian of the
    map each step and the local rounding of that step is added.  A y whose
    magnitude is below its own standard error cannot be told apart from zero.
    Contracting orbits shrink the estimate, so it stays small on healthy
    orbits and only grows where the orbit is genuinely sensitive.
    """

    EPS = 2.0 ** -53

    def __init__(self, p: Params, x, y):
        self.a1, self.b1, self.a2, self.b2 = (abs(float(c)) for c in p)
        self.fb1, self.fb2 = float(p.beta1), float(p.beta2)
        e = self.EPS
        self.cxx, self.cxy, self.cyy = (e * x) ** 2, 0 * x, (e * y) ** 2

    def sigma_y(self):
        return np.sqrt(np.maximum(self.cyy, 0.0))

    def update(self, x, y, xn, yn):
        j11, j12 = self.fb1 / y, -xn / y
        j21, j22 = self.fb2 / y, -yn / y
        cxx, cxy, cyy = self.cxx, self.cxy, self.cyy
        nxx = j11 * j11 * cxx + 2 * j11 * j12 * cxy + j12 * j12 * cyy
        nxy = j11 * j21 * cxx + (j11 * j22 + j12 * j21) * cxy + j12 * j22 * cyy
        nyy = j21 * j21 * cxx + 2 * j21 * j22 * cxy + j22 * j22 * cyy
        e, ay = self.EPS, abs(y)
        lx = e * (self.a1 + 2 * self.b1 * abs(x)) / ay + e * abs(xn)
        ly = e * (self.a2 + 2 * self.b2 * abs(x)) / ay + e * abs(yn)
        self.cxx, self.cxy, self.cyy = nxx + lx * lx, nxy, nyy + ly * ly


def iterate(p: Params, z0, n: int, tol: float = DIVIDE_TOL) -> Orbit:
    """Apply the map up to n times; a vanishing denominator ends the orbit early.

    y counts as zero when it is within ``divide_threshold`` or within its own
    propagated rounding error (skipped for Fraction input, which is exact).
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    z = Point(*z0)
    points = [z]
    exact = any(isinstance(v, Fraction) for v in (*z, *p))
    track = None if exact else _ErrorTrack(p, float(z.x), float(z.y))
    for k in range(1, n + 1):
        if track is not None and abs(z.y) <= track.sigma_y():
            return Orbit(points[0], tuple(points), hit=k)
        try:
            nz = step(p, z, tol)
        except DivisionByZero:
            return Orbit(points[0], tuple(points), hit=k)
        if track is not None:
            with np.errstate(over="ignore", invalid="ignore"):
                track.update(z.x, z.y, nz.x, nz.y)
        z = nz
        points.append(z)
    return Orbit(points[0], tuple(points))


def matrix(p: Params) -> np.ndarray:
    """The 3x3 matrix whose projective action is the map."""
    return np.array(
        [[p.beta1, 0.0, p.alpha1],
         [p.beta2, 0.0, p.alpha2],
         [0.0, 1.0, 0.0]],
        dtype=float,
    )


def lift(p: Params, z0, n: int) -> Point:
    """n-th iterate through the linear lift: q(A^n (x0, y0, 1))."""
    a = matrix(p)
    v = np.array([z0[0], z0[1], 1.0])
    # square-and-multiply with renormalisation; only ratios matter
    power = np.eye(3)
    base = a.copy()
    k = n
    while k:
        if k & 1:
            power = power @ base
            power /= np.abs(power).max()
        k >>= 1
        if k:
            base = base @ base
            base /= np.abs(base).max()
    u = power @ v
    return Point(u[0] / u[2], u[1] / u[2])


def advance(p: Params, x, y, n: int, tol: float = DIVIDE_TOL):
    """Vectorised iteration of many initial points for n steps.

    Returns ``(x, y, hit)`` where ``hit`` holds the failing step (0 when the
    orbit completed).  Coordinates of failed orbits are frozen at the last
    point reached.  Uses the same zero test as ``iterate``.
    """
    x = np.array(x, dtype=float, copy=True)
    y = np.array(y, dtype=float, copy=True)
    x, y = np.broadcast_arrays(x, y)
    x, y = x.copy(), y.copy()
    hit = np.zeros(x.shape, dtype=int)
    a1, b1, a2, b2 = (float(c) for c in p)
    scale = abs(a2)
    track = _ErrorTrack(p, x, y)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        for k in range(1, n + 1):
            small = np.abs(y) <= np.maximum(tol * np.maximum(1.0, scale + abs(b2) * np.abs(x)),
                                            track.sigma_y())
            hit[(hit == 0) & small] = k
            live = hit == 0
            if not live.any():
                break
            xn = (a1 + b1 * x) / y
            yn = (a2 + b2 * x) / y
            old = (track.cxx, track.cxy, track.cyy)
            track.update(x, y, xn, yn)
            track.cxx, track.cxy, track.cyy = (np.where(live, new, o) for new, o in
                                                zip((track.cxx, track.cxy, track.cyy), old))
            x = np.where(live, xn, x)
            y = np.where(live, yn, y)
    return x, y, hit
