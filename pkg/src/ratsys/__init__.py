"""Closed forms, forbidden sets and dynamics of x' = (a1 + b1 x)/y, y' = (a2 + b2 x)/y."""
from .core import (
    DegenerateRiccati, DivisionByZero, Line, Orbit, Params, Point, Tolerances,
    advance, iterate, lift, matrix, step, validate_params,
)
from .spectrum import CharPoly, PowerCoeffs, Regime, Spectrum, char_poly, power_coeffs, roots, spectrum
from .forbidden import forbidden_lines, forbidden_scan, is_forbidden
from .solution import (
    ComplexConstants, Conic, ForbiddenOrbit, LineL, NotApplicable, SingularSystem, VSequence,
    closed_form, closed_form_exact, closed_form_orbit, complex_constants, conic_of, line_L,
    sigma_tau, solve_beta2_nonzero, solve_beta2_zero, v_sequence,
)
from .classify import (
    Behavior, BehaviorKind, Equilibrium, LineOfEquilibria, NegativeCoefficient, NonnegKind,
    NonnegReport, Stability, StabilityVerdict, classify_behavior, classify_nonneg,
    detect_period, equilibria, global_period, period2_criterion, stability, system_verdict,
)

__version__ = "0.1.0"
