"""The forbidden set: initial conditions whose orbit reaches y = 0.

The third component of A^n (x0, y0, 1) is y[0] y[1] ... y[n-1], so a point
fails at step n when it vanishes for the first time at n.  Writing the power as
a0 I + a1 A + a2 A^2 turns that into the line
a2*beta2*x0 + a1*y0 + a2*alpha2 + a0 = 0.  The coefficients are taken from the
third row of the power, propagated by r <- r A, which is the same relation
but keeps the structural zeros (e.g. every beta2 = 0 system) exactly zero.
"""
from __future__ import annotations

from typing import Optional

from .core import Line, Params, Point

HORIZON = 64
MEMBERSHIP_TOL = 1e-9
_DEGENERATE_RTOL = 1e-12


def forbidden_scan(p: Params, horizon: int = HORIZON):
    """Forbidden lines for steps 1..horizon plus diagnostics.

    Lines are normalised and deduplicated, keeping the smallest step index.
    Steps whose relation has no x0/y0 dependence (A^n a multiple of the
    identity, e.g. in globally periodic systems) add no line.
    """
    if horizon < 1:
        raise ValueError("horizon must be at least 1")
    b1, a1 = p.beta1, p.alpha1
    b2, a2 = p.beta2, p.alpha2
    row = (0, 1, 0)  # third row of A: picks out y0
    lines: list[Line] = []
    diagnostics: list[str] = []
    scalar_steps: list[int] = []
    for n in range(1, horizon + 1):
        if n > 1:
            r0, r1, r2 = row
            row = (r0 * b1 + r1 * b2, r2, r0 * a1 + r1 * a2)
        a, b, c = (float(v) for v in row)
        size = max(abs(a), abs(b))
        if not size == size or size == float("inf"):
            diagnostics.append(f"step {n}: coefficients overflowed; scan stopped")
            break
        if size <= _DEGENERATE_RTOL * abs(c) or size == 0:
            if c == 0:
                diagnostics.append(f"step {n}: relation vanishes identically (whole plane); "
                                   "impossible for validated parameters")
            else:
                scalar_steps.append(n)
            continue
        line = Line(a, b, c, n).normalized()
        if any(line.same_locus(old) for old in lines):
            continue
        lines.append(line)
    if scalar_steps:
        shown = ", ".join(map(str, scalar_steps[:6])) + (", ..." if len(scalar_steps) > 6 else "")
        diagnostics.append(f"no forbidden line at {len(scalar_steps)} steps ({shown}): "
                           "A^n is a multiple of the identity there")
    return lines, diagnostics


def forbidden_lines(p: Params, horizon: int = HORIZON) -> list:
    return forbidden_scan(p, horizon)[0]


def is_forbidden(p: Params, z0, horizon: int = HORIZON,
                 tol: float = MEMBERSHIP_TOL, lines=None) -> Optional[int]:
    """Smallest step n <= horizon whose forbidden line passes within tol of z0."""
    z0 = Point(*z0)
    if lines is None:
        lines = forbidden_lines(p, horizon)
    hits = [ln.witness_n for ln in lines if ln.witness_n <= horizon and ln.contains(z0, tol)]
    return min(hits) if hits else None
