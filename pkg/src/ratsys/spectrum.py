"""Eigenvalues of the associated matrix and the coefficients of its powers.

The characteristic polynomial is x^3 + c2 x^2 + c1 x + c0 with
(c2, c1, c0) = (-beta1, -alpha2, beta1*alpha2 - beta2*alpha1).  Roots come
from the closed-form cubic formulas (trigonometric for three real roots,
Cardano otherwise).  Multiple roots are detected on the exact rational value
of the floating-point coefficients, because rounding splits a double root by
about sqrt(eps) and a triple one by about eps**(1/3), which no distance test
at 1e-8 can reliably undo.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import NamedTuple, Optional

from .core import Params

CLUSTER_TOL = 1e-8


class Regime(str, Enum):
    DISTINCT_MODULI = "distinct_moduli"
    DOUBLE_DOMINANT = "double_dominant"
    DOUBLE_RECESSIVE = "double_recessive"
    TRIPLE = "triple"
    TWO_REAL_SAME_MODULUS = "two_real_same_modulus"
    COMPLEX_DOMINANT = "complex_dominant"
    COMPLEX_RECESSIVE = "complex_recessive"
    COMPLEX_EQUAL = "complex_equal"

    @property
    def is_complex(self) -> bool:
        return self.name.startswith("COMPLEX")


class CharPoly(NamedTuple):
    c2: float
    c1: float
    c0: float

    def __call__(self, x):
        return ((x + self.c2) * x + self.c1) * x + self.c0

    def derivative(self, x):
        return (3 * x + 2 * self.c2) * x + self.c1


class RealRoot(NamedTuple):
    value: float
    multiplicity: int


class ComplexPair(NamedTuple):
    """rho * exp(+-i theta) with 0 < theta < pi."""

    rho: float
    theta: float

    @property
    def value(self) -> complex:
        return cmath.rect(self.rho, self.theta)


@dataclass(frozen=True)
class Spectrum:
    real_roots: tuple
    complex_pair: Optional[ComplexPair]
    spectral_radius: float
    regime: Regime
    cluster_tol: float = CLUSTER_TOL
    diagnostics: tuple = field(default=(), compare=False)

    def eigenvalues(self) -> list:
        """All three eigenvalues, repeated by multiplicity, dominant first."""
        out = []
        for r in self.real_roots:
            out.extend([complex(r.value)] * r.multiplicity)
        if self.complex_pair is not None:
            z = self.complex_pair.value
            out.extend([z, z.conjugate()])
        return sorted(out, key=lambda z: -abs(z))

    def multiplicity(self, lam: float) -> int:
        tol = self.cluster_tol * max(1.0, self.spectral_radius)
        for r in self.real_roots:
            if abs(r.value - lam) <= tol:
                return r.multiplicity
        return 0

    @property
    def dominant_real(self) -> Optional[float]:
        """Real root of largest modulus (the unique real root if a complex pair exists)."""
        return self.real_roots[0].value if self.real_roots else None

    def same_modulus(self, a: float, b: float) -> bool:
        return abs(abs(a) - abs(b)) <= self.cluster_tol * max(1.0, self.spectral_radius)


@dataclass(frozen=True)
class PowerCoeffs:
    """A^n = a0 I + a1 A + a2 A^2."""

    n: int
    a0: float
    a1: float
    a2: float


def char_poly(p: Params) -> CharPoly:
    return CharPoly(-p.beta1, -p.alpha2, p.beta1 * p.alpha2 - p.beta2 * p.alpha1)


def _cbrt(x: float) -> float:
    return math.copysign(abs(x) ** (1.0 / 3.0), x)


def _polish(cp: CharPoly, x: float, rounds: int = 3) -> float:
    """Newton refinement, kept only while it lowers the residual."""
    best, best_res = x, abs(cp(x))
    for _ in range(rounds):
        d = cp.derivative(best)
        if d == 0 or best_res == 0:
            break
        cand = best - cp(best) / d
        res = abs(cp(cand))
        if res >= best_res:
            break
        best, best_res = cand, res
    return best


def _root_scale(cp: CharPoly) -> float:
    return max(abs(cp.c2), math.sqrt(abs(cp.c1)), _cbrt(abs(cp.c0)))


def _solve(cp: CharPoly, cluster_tol: float):
    """Return (real roots with multiplicity, complex pair or None, diagnostics)."""
    c2, c1, c0 = (Fraction(c) for c in cp)
    shift = -c2 / 3
    p = c1 - c2 * c2 / 3
    q = 2 * c2 ** 3 / 27 - c2 * c1 / 3 + c0
    disc = (q / 2) ** 2 + (p / 3) ** 3  # > 0: one real root, < 0: three real
    scale = max(1.0, _root_scale(cp))
    tol = cluster_tol * scale
    fshift = float(shift)
    diags = []

    # triple root: both invariants of the depressed cubic vanish
    if max(math.sqrt(abs(float(p))), _cbrt(abs(float(q)))) <= tol:
        return [RealRoot(fshift, 3)], None, diags

    # double root: separation estimated from the discriminant
    # (the estimate sqrt(|disc|) / spread**2 only holds when the discriminant is
    # small relative to its terms; evenly spread roots, p ~ 0, must not pass)
    if p != 0 and q != 0:
        spread = (Fraction(9, 2) * q / p) ** 2
        size = 4 * abs(p) ** 3 + 27 * q * q
        near = 108 * abs(disc) <= Fraction(1, 10 ** 6) * size
        if near and 108 * abs(disc) <= Fraction(tol) ** 2 * spread ** 2:
            sep = math.sqrt(float(108 * abs(disc) / spread ** 2))
            simple = float(3 * q / p + shift)
            double = float(-3 * q / (2 * p) + shift)
            if disc != 0:
                diags.append(f"merged roots separated by {sep:.3g} into a double root")
            return [RealRoot(_polish(cp, simple), 1), RealRoot(double, 2)], None, diags

    fp, fq, fd = float(p), float(q), float(disc)
    if disc < 0:
        m = 2.0 * math.sqrt(-fp / 3.0)
        arg = max(-1.0, min(1.0, 1.5 * fq / fp * math.sqrt(-3.0 / fp)))
        phi = math.acos(arg) / 3.0
        ts = [m * math.cos(phi - 2.0 * math.pi * k / 3.0) for k in range(3)]
        roots = [_polish(cp, t + fshift) for t in ts]
        return _merge_real(roots, tol, diags), None, diags

    # one real root and a conjugate pair (Cardano, cancellation-free branch)
    s = math.sqrt(fd)
    u = -math.copysign(_cbrt(abs(fq) / 2.0 + s), fq)
    v = -fp / (3.0 * u) if u else 0.0
    r = _polish(cp, u + v + fshift)
    re = (-float(cp.c2) - r) / 2.0
    im = abs(math.sqrt(3.0) / 2.0 * (u - v))
    if 2.0 * im <= tol:
        diags.append(f"complex pair with imaginary part {im:.3g} merged into a double root")
        return _merge_real([r, re, re], tol, diags), None, diags
    return [RealRoot(r, 1)], ComplexPair(math.hypot(re, im), math.atan2(im, re)), diags


def _merge_real(values, tol, diags):
    values = sorted(values)
    groups = [[values[0]]]
    for v in values[1:]:
        if abs(v - groups[-1][-1]) <= tol:
            groups[-1].append(v)
        else:
            groups.append([v])
    if len(groups) < len(values):
        diags.append("nearby real roots merged by distance")
    return [RealRoot(math.fsum(g) / len(g), len(g)) for g in groups]


def classify_regime(s: Spectrum) -> Regime:
    """Regime tag derived from the roots alone."""
    if s.complex_pair is not None:
        lam = s.real_roots[0].value
        if s.same_modulus(lam, s.complex_pair.rho):
            return Regime.COMPLEX_EQUAL
        return Regime.COMPLEX_DOMINANT if abs(lam) > s.complex_pair.rho else Regime.COMPLEX_RECESSIVE
    roots = s.real_roots
    if len(roots) == 1:
        return Regime.TRIPLE
    for i, a in enumerate(roots):
        for b in roots[i + 1:]:
            if s.same_modulus(a.value, b.value):
                return Regime.TWO_REAL_SAME_MODULUS
    if len(roots) == 2:
        dominant = max(roots, key=lambda r: abs(r.value))
        return Regime.DOUBLE_DOMINANT if dominant.multiplicity == 2 else Regime.DOUBLE_RECESSIVE
    return Regime.DISTINCT_MODULI


def roots(cp: CharPoly, cluster_tol: float = CLUSTER_TOL) -> Spectrum:
    if cp.c0 == 0:
        raise ValueError("constant term is zero: the matrix is singular")
    real, pair, diags = _solve(cp, cluster_tol)
    real = tuple(sorted(real, key=lambda r: (-abs(r.value), -r.value)))
    radius = max([abs(r.value) for r in real] + ([pair.rho] if pair else []))
    draft = Spectrum(real, pair, radius, Regime.DISTINCT_MODULI, cluster_tol)
    regime = classify_regime(draft)
    if regime is Regime.TWO_REAL_SAME_MODULUS:
        a, b = real[0].value, real[1].value
        if a * b < 0 and abs(a + b) > 0:
            diags.append(f"real roots {a!r} and {b!r} tie in modulus only within tolerance")
    return Spectrum(real, pair, radius, regime, cluster_tol, tuple(diags))


def spectrum(p: Params, cluster_tol: float = CLUSTER_TOL) -> Spectrum:
    return roots(char_poly(p), cluster_tol)


def power_coeffs(cp: CharPoly, n: int) -> PowerCoeffs:
    """Coefficients of x^n mod the characteristic polynomial."""
    if n < 0:
        raise ValueError("n must be non-negative")
    c2, c1, c0 = cp
    a0, a1, a2 = 1, 0, 0
    for _ in range(n):
        # multiply by x and reduce x^3 = -c2 x^2 - c1 x - c0
        a0, a1, a2 = -c0 * a2, a0 - c1 * a2, a1 - c2 * a2
    return PowerCoeffs(n, a0, a1, a2)
