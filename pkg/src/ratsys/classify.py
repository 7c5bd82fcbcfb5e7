"""Equilibria, stability and the asymptotic fate of orbits.

Every verdict here is analytic: it is read off the spectrum of the
associated matrix and the position of the initial point relative to a few
exceptional lines.  Numeric iteration is only used as an optional probe.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Optional, Union

import numpy as np

from .core import Line, Orbit, Params, Point, Tolerances, iterate, matrix
from .forbidden import HORIZON, is_forbidden
from .solution import (
    Conic, LineL, NotApplicable, complex_constants, conic_of, fixed_point_of, line_L,
)
from .spectrum import Regime, Spectrum, char_poly, spectrum as compute_spectrum

RATIONAL_QMAX = 64
RATIONAL_TOL = 1e-10


class Stability(str, Enum):
    ASYMPTOTICALLY_STABLE = "asymptotically_stable"
    STABLE_NOT_ASYMPTOTIC = "stable_not_asymptotic"
    UNSTABLE = "unstable"
    ATTRACTING_UNSTABLE = "attracting_unstable"


@dataclass(frozen=True)
class StabilityVerdict:
    kind: Stability
    jacobian_eigen_moduli: tuple


@dataclass(frozen=True)
class Equilibrium:
    point: Point
    associated_lambda: float
    multiplicity: int
    stability: Optional[StabilityVerdict] = None


@dataclass(frozen=True)
class LineOfEquilibria:
    """Every (x, y_value) is fixed (beta2 = 0, alpha1 = 0, alpha2 = beta1**2)."""

    y_value: float
    associated_lambda: float
    multiplicity: int
    stability: Optional[StabilityVerdict] = None

    @property
    def line(self) -> Line:
        return Line(0.0, 1.0, -self.y_value)


class BehaviorKind(str, Enum):
    CONVERGES_TO_FIXED_POINT = "converges_to_fixed_point"
    CONVERGES_TO_2_CYCLE = "converges_to_2_cycle"
    PERIODIC = "periodic"
    UNBOUNDED = "unbounded"
    ON_INVARIANT_CONIC = "on_invariant_conic"
    ACCUMULATES_ON_LINE = "accumulates_on_line"
    STARTS_FORBIDDEN = "starts_forbidden"


@dataclass(frozen=True)
class Behavior:
    kind: BehaviorKind
    equilibrium: Optional[Equilibrium] = None
    cycle: tuple = ()
    period: Optional[int] = None
    line: Optional[LineL] = None
    conic: Optional[Conic] = None
    witness_n: Optional[int] = None
    diagnostics: tuple = field(default=(), compare=False)


class NegativeCoefficient(ValueError):
    pass


class NonnegKind(str, Enum):
    NO_NONNEG_PERIODICS_UNBOUNDED = "no_nonneg_periodics_unbounded"
    GLOBALLY_2_PERIODIC = "globally_2_periodic"
    NON_ATTRACTING_FIXED_PLUS_2_CYCLES = "non_attracting_fixed_plus_2_cycles"
    BOUNDED_WITH_2_CYCLE_LINE = "bounded_with_2_cycle_line"
    POSITIVE_GLOBAL_ATTRACTOR = "positive_global_attractor"
    GLOBALLY_3_PERIODIC = "globally_3_periodic"


@dataclass(frozen=True)
class NonnegReport:
    kind: NonnegKind
    subcase: Optional[str] = None
    equilibrium: Optional[Equilibrium] = None
    fixed_points: tuple = ()
    cycle_line: Optional[Line] = None
    checks: dict = field(default_factory=dict)


# helpers --------------------------------------------------------------------

def _close(u, v, tol) -> bool:
    return abs(u - v) <= tol * max(1.0, abs(u), abs(v))


def _same_point(z, w, tol) -> bool:
    scale = max(1.0, abs(w[0]), abs(w[1]))
    return max(abs(z[0] - w[0]), abs(z[1] - w[1])) <= tol * scale


def rational_multiple_of_pi(theta: float, qmax: int = RATIONAL_QMAX,
                            tol: float = RATIONAL_TOL) -> Optional[Fraction]:
    """p/q with q <= qmax and |theta/pi - p/q| <= tol, by continued fractions."""
    ratio = theta / math.pi
    best = Fraction(ratio).limit_denominator(qmax)
    return best if abs(ratio - best) <= tol else None


def global_period(p: Params, max_n: int = 128, rtol: float = 1e-9) -> Optional[int]:
    """Smallest N <= max_n with A^N a multiple of the identity, if any."""
    a = matrix(p)
    m = np.eye(3)
    for n in range(1, max_n + 1):
        m = m @ a
        scale = np.abs(m).max()
        if scale == 0 or not np.isfinite(scale):
            return None
        m = m / scale
        d = np.diag(m)
        if np.abs(m - np.diag(d)).max() <= rtol and np.ptp(d) <= rtol and abs(d[0]) > 0.5:
            return n
    return None


# equilibria and stability ---------------------------------------------------

def _jacobian_moduli(s: Spectrum, lam: float) -> tuple:
    eig = s.eigenvalues()
    i = min(range(3), key=lambda k: abs(eig[k] - lam))
    rest = eig[:i] + eig[i + 1:]
    return tuple(sorted((abs(z / lam) for z in rest), reverse=True))


def stability(p: Params, s: Spectrum, e) -> StabilityVerdict:
    """Lyapunov verdict for an equilibrium associated to a real eigenvalue."""
    lam = e.associated_lambda
    moduli = _jacobian_moduli(s, lam)
    radius = s.spectral_radius

    def verdict(kind):
        return StabilityVerdict(kind, moduli)

    if not s.same_modulus(lam, radius):
        return verdict(Stability.UNSTABLE)
    if (p.beta2 == 0 and p.alpha1 == 0 and p.alpha2 > 0
            and s.same_modulus(p.beta1, math.sqrt(p.alpha2))):
        # A^2 = beta1^2 I: the map is an involution, every fixed point is a centre
        return verdict(Stability.STABLE_NOT_ASYMPTOTIC)
    top = [(r.value, r.multiplicity) for r in s.real_roots if s.same_modulus(r.value, radius)]
    if s.complex_pair is not None and s.same_modulus(s.complex_pair.rho, radius):
        top += [(s.complex_pair.value, 1), (s.complex_pair.value.conjugate(), 1)]
    if all(m == 1 for _, m in top):
        return verdict(Stability.ASYMPTOTICALLY_STABLE if len(top) == 1
                       else Stability.STABLE_NOT_ASYMPTOTIC)
    if p.beta2 != 0 and s.multiplicity(lam) > 1:
        return verdict(Stability.ATTRACTING_UNSTABLE)
    return verdict(Stability.UNSTABLE)


def equilibria(p: Params, s: Optional[Spectrum] = None,
               with_stability: bool = True) -> list:
    """Fixed points, each tied to the real eigenvalue equal to its y coordinate."""
    if s is None:
        s = compute_spectrum(p)
    out: list = []
    if p.beta2 != 0:
        for r in s.real_roots:
            out.append(Equilibrium(fixed_point_of(p, r.value), r.value, r.multiplicity))
    else:
        a1, b1, a2 = float(p.alpha1), float(p.beta1), float(p.alpha2)
        if a2 > 0:
            root = math.sqrt(a2)
            if s.same_modulus(b1, root):
                if a1 != 0:
                    out.append(Equilibrium(Point(-a1 / (2 * b1), -b1), -b1, s.multiplicity(-b1)))
                else:
                    out.append(Equilibrium(Point(0.0, -b1), -b1, s.multiplicity(-b1)))
                    out.append(LineOfEquilibria(b1, b1, s.multiplicity(b1)))
            else:
                out.append(Equilibrium(Point(a1 / (root - b1), root), root, 1))
                out.append(Equilibrium(Point(-a1 / (root + b1), -root), -root, 1))
    if with_stability:
        out = [type(e)(*(getattr(e, f) for f in e.__dataclass_fields__ if f != "stability"),
                       stability=stability(p, s, e)) for e in out]
    return out


def period2_criterion(p: Params) -> Optional[tuple]:
    """A prime period-2 cycle when one exists (exactly when alpha1*beta2 == 0)."""
    if p.alpha1 == 0:
        y0 = 1.0 if p.alpha2 != 1 else 2.0
        return (Point(0.0, y0), Point(0.0, p.alpha2 / y0))
    if p.beta2 == 0:
        z0 = Point(0.0, -p.beta1)
        return (z0, Point(p.alpha1 / z0.y, p.alpha2 / z0.y))
    return None


def detect_period(orbit: Union[Orbit, np.ndarray, list], tol: float = 1e-8,
                  max_period: Optional[int] = None) -> Optional[tuple]:
    """Smallest period p with a tail of at least 3p points repeating, and where it starts.

    Points k and k+p are matched in max-norm relative to max(1, |point|).
    Returns (period, phase) or None.
    """
    pts = orbit.as_array() if isinstance(orbit, Orbit) else np.asarray(orbit, dtype=float)
    n = len(pts)
    limit = n // 3 if max_period is None else min(max_period, n // 3)
    with np.errstate(invalid="ignore", over="ignore"):
        for per in range(1, limit + 1):
            diff = np.abs(pts[per:] - pts[:-per]).max(axis=1)
            scale = np.maximum(1.0, np.abs(pts[per:]).max(axis=1))
            good = diff <= tol * scale
            bad = np.flatnonzero(~good)
            phase = int(bad[-1]) + 1 if bad.size else 0
            if n - phase >= 3 * per:
                return per, phase
    return None


# behaviour ------------------------------------------------------------------

def _eq(p: Params, s: Spectrum, lam: float) -> Equilibrium:
    e = Equilibrium(fixed_point_of(p, lam), lam, s.multiplicity(lam))
    return Equilibrium(e.point, lam, e.multiplicity, stability(p, s, e))


def classify_behavior(p: Params, z0, budget: int = 0,
                      tols: Tolerances = Tolerances(),
                      s: Optional[Spectrum] = None,
                      horizon: int = HORIZON) -> Behavior:
    """Asymptotic fate of the orbit from z0.

    ``budget`` > 0 runs a confirming iteration of that many steps and adds
    its outcome to the diagnostics; it never changes the verdict.
    """
    z0 = Point(float(z0[0]), float(z0[1]))
    if s is None:
        s = compute_spectrum(p, tols.cluster)
    diags = list(s.diagnostics)
    witness = is_forbidden(p, z0, horizon, tols.membership)
    if witness is not None:
        # forbidden lines accumulate, so closeness alone is not proof; the
        # orbit has to actually fail at that step
        if iterate(p, z0, witness, tols.divide).hit == witness:
            return Behavior(BehaviorKind.STARTS_FORBIDDEN, witness_n=witness)
        diags.append(f"within {tols.membership:g} of the step-{witness} forbidden line "
                     "but iteration passes that step; classified as complete")
    if p.beta2 == 0:
        b = _behavior_beta2_zero(p, s, z0, tols, diags)
    else:
        b = _behavior_general(p, s, z0, tols, diags)
    if budget > 0:
        diags.extend(_probe(p, z0, b, budget, tols))
    return Behavior(b.kind, b.equilibrium, b.cycle, b.period, b.line, b.conic,
                    b.witness_n, tuple(diags))


def _periodic_from(p: Params, z0: Point, period: int, tols: Tolerances) -> Behavior:
    cyc = iterate(p, z0, period - 1, tols.divide).points
    return Behavior(BehaviorKind.PERIODIC, cycle=tuple(cyc), period=period)


def _behavior_beta2_zero(p, s, z0, tols, diags) -> Behavior:
    a1, b1, a2 = float(p.alpha1), float(p.beta1), float(p.alpha2)
    x0, y0 = z0
    root = math.sqrt(abs(a2))
    fixed = [e for e in equilibria(p, s) if isinstance(e, Equilibrium)]
    for e in fixed:
        if _same_point(z0, e.point, tols.membership):
            return Behavior(BehaviorKind.PERIODIC, equilibrium=e, cycle=(e.point,), period=1)
    scale = max(1.0, abs(x0), abs(y0), abs(a1), abs(b1), abs(a2))
    if s.same_modulus(b1, root):
        if not _close(b1 * b1, abs(a2), 0.0):
            diags.append("beta1^2 = |alpha2| only within tolerance; boundary case used")
        if a2 > 0:
            if a1 == 0:
                if _close(y0, b1, tols.membership):
                    return Behavior(BehaviorKind.PERIODIC, cycle=(z0,), period=1)
                return _periodic_from(p, z0, 2, tols)
            if _close(y0, -b1, tols.membership):
                return _periodic_from(p, z0, 2, tols)
            return Behavior(BehaviorKind.UNBOUNDED)
        # beta1^2 = -alpha2: globally 4-periodic
        if abs(2 * b1 * b1 * x0 + a1 * (b1 + y0)) <= tols.membership * scale * max(1.0, b1 * b1):
            return _periodic_from(p, z0, 2, tols)
        return _periodic_from(p, z0, 4, tols)
    # line of period-two initial conditions  x0 = a1 (b1 + y0) / (a2 - b1^2)
    two_cycle_line = Line(a2 - b1 * b1, -a1, -a1 * b1)
    if two_cycle_line.contains(z0, tols.membership):
        return _periodic_from(p, z0, 2, tols)
    if abs(b1) > root:
        return Behavior(BehaviorKind.UNBOUNDED)
    xs = a1 * (b1 + y0) / (a2 - b1 * b1)
    cycle = (Point(xs, y0), Point((a1 + b1 * xs) / y0, a2 / y0))
    return Behavior(BehaviorKind.CONVERGES_TO_2_CYCLE, cycle=cycle, period=2)


def _behavior_general(p, s, z0, tols, diags) -> Behavior:
    regime = s.regime
    x0, y0 = z0
    reals = [r.value for r in s.real_roots]
    for lam in reals:
        e = _eq(p, s, lam)
        if _same_point(z0, e.point, tols.membership):
            return Behavior(BehaviorKind.PERIODIC, equilibrium=e, cycle=(e.point,), period=1)

    if regime is Regime.TWO_REAL_SAME_MODULUS:
        return _behavior_same_modulus(p, s, z0, tols, diags)

    lam1 = reals[0]
    ll = line_L(p, lam1)
    on_l = ll.line.contains(z0, tols.membership)

    if regime in (Regime.DISTINCT_MODULI, Regime.DOUBLE_RECESSIVE):
        target = reals[1] if on_l else lam1
        return Behavior(BehaviorKind.CONVERGES_TO_FIXED_POINT, equilibrium=_eq(p, s, target), line=ll)
    if regime in (Regime.DOUBLE_DOMINANT, Regime.TRIPLE):
        return Behavior(BehaviorKind.CONVERGES_TO_FIXED_POINT, equilibrium=_eq(p, s, lam1))

    # complex pair
    theta = s.complex_pair.theta
    frac = rational_multiple_of_pi(theta)
    if on_l:
        if frac is not None:
            return _periodic_from(p, z0, frac.denominator, tols)
        diags.append("no small-period rational theta/pi detected; treated as unbounded on L")
        return Behavior(BehaviorKind.UNBOUNDED, line=ll)
    if regime is Regime.COMPLEX_DOMINANT:
        return Behavior(BehaviorKind.CONVERGES_TO_FIXED_POINT, equilibrium=_eq(p, s, lam1), line=ll)
    if regime is Regime.COMPLEX_RECESSIVE:
        return Behavior(BehaviorKind.ACCUMULATES_ON_LINE, line=ll,
                        diagnostics=("bounded subsequences accumulate on L; unbounded ones may "
                                     "follow the parallel line through the fixed point",))
    try:
        conic = conic_of(p, z0, s)
    except NotApplicable as exc:
        diags.append(f"conic not available: {exc}")
        conic = None
    period = global_period(p) if frac is not None else None
    return Behavior(BehaviorKind.ON_INVARIANT_CONIC, conic=conic, line=ll, period=period)


def _behavior_same_modulus(p, s, z0, tols, diags) -> Behavior:
    b1, a2, b2 = float(p.beta1), float(p.alpha2), float(p.beta2)
    x0, y0 = z0
    root = math.sqrt(a2)
    if abs(x0) <= tols.membership:
        return _periodic_from(p, z0, 2, tols)
    if p.alpha1 != 0:
        diags.append("two real roots of equal modulus with alpha1 != 0 (numerical tie)")
    if s.multiplicity(b1) >= 2 or abs(b1) > root:
        return Behavior(BehaviorKind.CONVERGES_TO_FIXED_POINT, equilibrium=_eq(p, s, b1))
    xs = (b1 * b1 - a2) / b2
    unbounded_lines = (Line(1.0, 0.0, -xs), Line(b2, (a2 - b1 * b1) / b1, 0.0))
    if any(ln.contains(z0, tols.membership) for ln in unbounded_lines):
        return Behavior(BehaviorKind.UNBOUNDED)
    m = np.array([[b1, root, -root], [1.0, 1.0, 1.0], [1 / b1, 1 / root, -1 / root]])
    p1, p2, p3 = np.linalg.solve(m, [b2 * x0 + a2, y0, 1.0])
    k = (p2 + p3) / (p2 - p3)
    cycle = (Point(0.0, float(k * root)), Point(0.0, float(root / k)))
    return Behavior(BehaviorKind.CONVERGES_TO_2_CYCLE, cycle=cycle, period=2)


def _probe(p, z0, b: Behavior, budget: int, tols: Tolerances) -> list:
    orbit = iterate(p, z0, budget, tols.divide)
    if not orbit.complete:
        return [f"probe: orbit hit the forbidden set at step {orbit.hit}"]
    last = orbit.points[-1]
    if b.kind is BehaviorKind.CONVERGES_TO_FIXED_POINT:
        t = b.equilibrium.point
        return [f"probe: distance to the fixed point after {budget} steps is "
                f"{max(abs(last[0] - t[0]), abs(last[1] - t[1])):.3g}"]
    if b.kind is BehaviorKind.CONVERGES_TO_2_CYCLE:
        d = min(max(abs(last[0] - c[0]), abs(last[1] - c[1])) for c in b.cycle)
        return [f"probe: distance to the 2-cycle after {budget} steps is {d:.3g}"]
    if b.kind is BehaviorKind.PERIODIC:
        found = detect_period(orbit, tols.period)
        return [f"probe: detected period {found[0] if found else None}"]
    if b.kind is BehaviorKind.UNBOUNDED:
        peak = float(np.abs(orbit.as_array()).max())
        return [f"probe: largest coordinate over {budget} steps is {peak:.3g}"]
    if b.kind is BehaviorKind.ON_INVARIANT_CONIC and b.conic is not None:
        worst = max(b.conic.residual(z) for z in orbit.points)
        return [f"probe: worst relative conic residual over {budget} steps is {worst:.3g}"]
    if b.kind is BehaviorKind.ACCUMULATES_ON_LINE:
        near = sum(b.line.line.distance(z) < 1e-3 for z in orbit.points[budget // 2:])
        return [f"probe: {near} of the last {budget - budget // 2 + 1} points lie within 1e-3 of L"]
    return []


# non-negative coefficients --------------------------------------------------

def classify_nonneg(p: Params, s: Optional[Spectrum] = None) -> NonnegReport:
    """Fate of non-negative orbits when every coefficient is non-negative."""
    a1, b1, a2, b2 = (float(c) for c in p)
    if min(a1, b1, a2, b2) < 0:
        raise NegativeCoefficient("all coefficients must be non-negative")
    if s is None:
        s = compute_spectrum(p)
    if a1 * b2 == 0:
        if b2 == 0:
            root = math.sqrt(a2)
            if a2 <= b1 * b1 or s.same_modulus(b1, root):
                if a1 == 0 and s.same_modulus(b1, root):
                    return NonnegReport(NonnegKind.GLOBALLY_2_PERIODIC)
                return NonnegReport(NonnegKind.NO_NONNEG_PERIODICS_UNBOUNDED)
            e = Equilibrium(Point(a1 / (root - b1), root), root, 1)
            e = Equilibrium(e.point, root, 1, stability(p, s, e))
            return NonnegReport(NonnegKind.NON_ATTRACTING_FIXED_PLUS_2_CYCLES,
                                fixed_points=(e,), cycle_line=Line(a2 - b1 * b1, -a1, -a1 * b1))
        root = math.sqrt(a2)
        x_line = Line(1.0, 0.0, 0.0)
        if s.same_modulus(b1, root):
            eq = _eq(p, s, b1)
            return NonnegReport(NonnegKind.BOUNDED_WITH_2_CYCLE_LINE, "b", eq, (eq,), x_line)
        if a2 < b1 * b1:
            eq = _eq(p, s, b1)
            return NonnegReport(NonnegKind.BOUNDED_WITH_2_CYCLE_LINE, "a", eq,
                                (eq, _eq(p, s, root)), x_line)
        return NonnegReport(NonnegKind.BOUNDED_WITH_2_CYCLE_LINE, "c", None,
                            (_eq(p, s, root),), x_line)

    lam1 = s.spectral_radius
    if a2 == 0 and b1 == 0:
        eq = _eq(p, s, s.dominant_real)
        checks = {"A^3 = alpha1*beta2*I": global_period(p) == 3}
        return NonnegReport(NonnegKind.GLOBALLY_3_PERIODIC, equilibrium=eq,
                            fixed_points=(eq,), checks=checks)
    a = matrix(p)
    shifted = a + np.eye(3)
    cp = char_poly(p)
    perron = s.dominant_real
    checks = {
        "(A+I)^2 positive": bool(np.all(shifted @ shifted > 0)),
        "Perron root is a simple positive eigenvalue": bool(
            perron is not None and perron > 0 and s.multiplicity(perron) == 1
            and s.same_modulus(perron, lam1)
            and s.regime in (Regime.DISTINCT_MODULI, Regime.DOUBLE_RECESSIVE,
                             Regime.COMPLEX_DOMINANT)),
        # det(A - mu I) = -charpoly(mu)
        "det(A - beta1 I) = alpha1*beta2 > 0": bool(-cp(b1) > 0),
        "beta1 < Perron root": bool(perron is not None and b1 < perron),
        "det(A - sqrt(alpha2) I) > 0": bool(-cp(math.sqrt(a2)) > 0),
        "sqrt(alpha2) < Perron root": bool(perron is not None and math.sqrt(a2) < perron),
    }
    # beta2 x0 >= 0 while (beta1 - lam1)(y0 + lam1) < 0, so no non-negative point is on L
    checks["non-negative quadrant avoids L"] = checks["beta1 < Perron root"]
    eq = _eq(p, s, perron)
    return NonnegReport(NonnegKind.POSITIVE_GLOBAL_ATTRACTOR, equilibrium=eq,
                        fixed_points=(eq,), checks=checks)


def system_verdict(p: Params, s: Optional[Spectrum] = None) -> str:
    """One-word summary of the whole system, independent of initial data."""
    if s is None:
        s = compute_spectrum(p)
    n = global_period(p)
    if n is not None:
        return f"globally_{n}_periodic"
    if min(float(c) for c in p) >= 0:
        return classify_nonneg(p, s).kind.value
    if p.beta2 == 0:
        b1, a2 = float(p.beta1), float(p.alpha2)
        root = math.sqrt(abs(a2))
        if abs(b1) > root or (a2 > 0 and s.same_modulus(b1, root)):
            return "unbounded_except_2_cycles"
        return "bounded_converging_to_2_cycles"
    return {
        Regime.DISTINCT_MODULI: "attractor_off_L",
        Regime.DOUBLE_RECESSIVE: "attractor_off_L",
        Regime.DOUBLE_DOMINANT: "global_attractor",
        Regime.TRIPLE: "global_attractor",
        Regime.TWO_REAL_SAME_MODULUS: "period_2_line_x0",
        Regime.COMPLEX_DOMINANT: "attractor_off_L",
        Regime.COMPLEX_RECESSIVE: "accumulates_on_L",
        Regime.COMPLEX_EQUAL: "invariant_conics",
    }[s.regime]
