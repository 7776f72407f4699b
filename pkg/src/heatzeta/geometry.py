"""Explicit spectral geometry: circle and flat-torus factors, finite isometry
actions with flat bundle lifts, and factorized quotient heat traces.

A circle factor of radius r with holonomy e^{2 pi i alpha} has Laplacian
eigenmodes f_k ~ e^{i (k+alpha) theta} with eigenvalue ((k+alpha)/r)^2, the
same on 0- and 1-forms.  Group elements act per factor as rotations or
reflections together with a bundle phase fixing the flat lift:

    rotation(phi, sigma):     f_k -> sigma e^{i (k+alpha) phi} f_k
    reflection(theta0, eps):  f_k -> eps e^{2 i (k+alpha) theta0} f_{-k-2 alpha}
                              (requires 2 alpha integral), with d theta -> -d theta.

Twisted traces follow from the mode action: rotations contribute phased theta
sums with empty small-t expansion (no fixed points), reflections are exactly
constant in t (only self-paired modes contribute), and the quotient trace is
the average over group elements of products of factor traces.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable

from .errors import CapabilityError, DomainError, ValidationError
from .spectral import (
    SQRT_PI,
    AdmissibleExpansion,
    GradedSpectrum,
    HeatTraceModel,
    LatticeFamily,
    Spectrum,
    circle_spectrum,
    theta_sum,
    theta_dual_tail,
    poisson_dual_eval,
    zero_model,
)
from .multizeta import MultiAdmissibleData, SeparableTerm, from_separable

_TWO_PI = 2.0 * math.pi
_ANGLE_TOL = 1e-12


# ---------------------------------------------------------------------------
# Factors
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CircleFactor:
    """Circle of radius ``radius`` with flat line-bundle holonomy e^{2 pi i alpha}."""

    radius: float
    alpha: float

    def __post_init__(self) -> None:
        if self.radius <= 0.0:
            raise ValidationError("circle radius must be positive")
        if not 0.0 <= self.alpha < 1.0:
            raise ValidationError("holonomy alpha must lie in [0, 1)")

    @property
    def dim(self) -> int:
        return 1

    @property
    def acyclic(self) -> bool:
        return self.alpha != 0.0

    @property
    def degree_mults(self) -> tuple[int, ...]:
        return (1, 1)

    def spectrum(self) -> Spectrum:
        return circle_spectrum(self.radius, self.alpha)

    def graded_spectrum(self) -> GradedSpectrum:
        spec = self.spectrum()
        return GradedSpectrum(per_degree=(spec, spec))


@dataclass(frozen=True)
class TorusFactor:
    """Flat square 2-torus with holonomies (alpha, beta); form degrees 0/1/2 with
    multiplicities 1/2/1 over the common scalar spectrum ((k+a)^2+(l+b)^2)/r^2."""

    radius: float
    alpha: float
    beta: float

    def __post_init__(self) -> None:
        if self.radius <= 0.0:
            raise ValidationError("torus radius must be positive")
        if not (0.0 <= self.alpha < 1.0 and 0.0 <= self.beta < 1.0):
            raise ValidationError("holonomies must lie in [0, 1)")

    @property
    def dim(self) -> int:
        return 2

    @property
    def acyclic(self) -> bool:
        return (self.alpha, self.beta) != (0.0, 0.0)

    @property
    def degree_mults(self) -> tuple[int, ...]:
        return (1, 2, 1)


Factor = CircleFactor | TorusFactor


# ---------------------------------------------------------------------------
# Group element actions and their mode operators
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Rotation:
    angle: float
    phase: complex = 1.0 + 0j

    def __post_init__(self) -> None:
        if abs(abs(complex(self.phase)) - 1.0) > 1e-10:
            raise ValidationError("rotation bundle phase must be unimodular")


@dataclass(frozen=True)
class Reflection:
    axis_angle: float
    phase: float = 1.0

    def __post_init__(self) -> None:
        if self.phase not in (1.0, -1.0, 1, -1):
            raise ValidationError("reflection lift phase must be +1 or -1")


Action = Rotation | Reflection


def _canon_angle(phi: float) -> float:
    phi = phi % _TWO_PI
    if phi > _TWO_PI - _ANGLE_TOL:
        phi = 0.0
    return phi


@dataclass(frozen=True)
class _ModeOp:
    """Unitary action on modes: diag f_k = c e^{i k phi} f_k, or
    swap f_k = c e^{i k phi} f_{-k-shift}."""

    kind: str  # "diag" | "swap"
    phi: float
    const: complex
    shift: int = 0

    def compose(self, other: "_ModeOp") -> "_ModeOp":
        """Operator product self∘other (apply ``other`` first)."""
        a, b = self, other
        if a.kind == "diag" and b.kind == "diag":
            return _ModeOp("diag", _canon_angle(a.phi + b.phi), a.const * b.const)
        if a.kind == "diag" and b.kind == "swap":
            const = a.const * b.const * cmath.exp(-1j * b.shift * a.phi)
            return _ModeOp("swap", _canon_angle(b.phi - a.phi), const, b.shift)
        if a.kind == "swap" and b.kind == "diag":
            return _ModeOp("swap", _canon_angle(a.phi + b.phi), a.const * b.const, a.shift)
        const = a.const * b.const * cmath.exp(-1j * a.shift * a.phi)
        return _ModeOp("diag", _canon_angle(b.phi - a.phi), const)

    def close_to(self, other: "_ModeOp") -> bool:
        if self.kind != other.kind or self.shift != other.shift:
            return False
        dphi = abs(self.phi - other.phi)
        dphi = min(dphi, _TWO_PI - dphi)
        return dphi < 1e-9 and abs(self.const - other.const) < 1e-9

    @property
    def has_fixed_points(self) -> bool:
        """Fixed points of the underlying diffeomorphism of the circle."""
        return self.kind == "swap" or self.phi < _ANGLE_TOL


def _mode_op(action: Action, alpha: float) -> _ModeOp:
    if isinstance(action, Rotation):
        phi = _canon_angle(action.angle)
        return _ModeOp("diag", phi, complex(action.phase) * cmath.exp(1j * alpha * action.angle))
    two_alpha = 2.0 * alpha
    if abs(two_alpha - round(two_alpha)) > 1e-12:
        raise ValidationError(
            f"reflection needs conjugate-symmetric holonomy (alpha in {{0, 1/2}}), got alpha={alpha}"
        )
    shift = int(round(two_alpha))
    const = float(action.phase) * cmath.exp(2j * alpha * action.axis_angle)
    return _ModeOp("swap", _canon_angle(2.0 * action.axis_angle), const, shift)


def reflection_fixed_point_phases(factor: CircleFactor, refl: Reflection) -> tuple[complex, complex]:
    """Bundle phases (eps1, eps2) of the lift at the two reflection fixed points.

    The fixed points sit at the axis angle and its antipode; transporting a
    section once around the half loop multiplies by the holonomy, so
    eps2 = eps1 * e^{-2 pi i alpha}.
    """
    _mode_op(refl, factor.alpha)  # equivariance check
    eps1 = complex(refl.phase)
    eps2 = eps1 * cmath.exp(-2j * math.pi * factor.alpha)
    return eps1, eps2


# ---------------------------------------------------------------------------
# Quotient geometry
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GroupElement:
    f1: Action
    f2: Action
    label: str = ""


@dataclass(frozen=True)
class QuotientGeometry:
    factor1: Factor
    factor2: Factor
    group: tuple[GroupElement, ...]


def identity_element() -> GroupElement:
    return GroupElement(Rotation(0.0), Rotation(0.0), label="id")


def trivial_quotient(factor1: Factor, factor2: Factor) -> QuotientGeometry:
    return QuotientGeometry(factor1, factor2, (identity_element(),))


@dataclass
class GeometryReport:
    checks: dict[str, bool] = field(default_factory=dict)
    messages: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def record(self, name: str, ok: bool, message: str = "") -> None:
        self.checks[name] = self.checks.get(name, True) and ok
        if message and not ok:
            self.messages.append(message)


def validate_geometry(geom: QuotientGeometry) -> GeometryReport:
    """Check the standing hypotheses: group axioms on the action table,
    equivariance of every lift, freeness on the product, and acyclicity."""
    report = GeometryReport()

    for j, factor in ((1, geom.factor1), (2, geom.factor2)):
        if isinstance(factor, TorusFactor):
            nontrivial = [
                g for g in geom.group
                for act in [g.f1 if j == 1 else g.f2]
                if not (isinstance(act, Rotation) and _canon_angle(act.angle) == 0.0
                        and abs(complex(act.phase) - 1.0) < 1e-12)
            ]
            report.record("equivariance", not nontrivial,
                          "torus factors support only the trivial action")

    ops: list[tuple[_ModeOp | None, _ModeOp | None]] = []
    equivariant = True
    for g in geom.group:
        pair: list[_ModeOp | None] = []
        for j, (factor, act) in enumerate(((geom.factor1, g.f1), (geom.factor2, g.f2)), start=1):
            if isinstance(factor, TorusFactor):
                pair.append(None)
                continue
            try:
                pair.append(_mode_op(act, factor.alpha))
            except ValidationError as exc:
                equivariant = False
                report.record("equivariance", False, f"factor {j} of '{g.label}': {exc}")
                pair.append(None)
        ops.append((pair[0], pair[1]))
    report.record("equivariance", equivariant)

    circle_ops = [(o1, o2) for (o1, o2) in ops if o1 is not None and o2 is not None]
    both_circles = isinstance(geom.factor1, CircleFactor) and isinstance(geom.factor2, CircleFactor)

    has_id = any(
        (o1 is None or o1.close_to(_ModeOp("diag", 0.0, 1.0 + 0j)))
        and (o2 is None or o2.close_to(_ModeOp("diag", 0.0, 1.0 + 0j)))
        for o1, o2 in ops
    )
    report.record("identity", has_id, "group must contain the identity action")

    if both_circles and equivariant:
        def find(pair: tuple[_ModeOp, _ModeOp]) -> int | None:
            for idx, (o1, o2) in enumerate(circle_ops):
                if pair[0].close_to(o1) and pair[1].close_to(o2):
                    return idx
            return None

        closed = True
        table: dict[tuple[int, int], int] = {}
        for i, (a1, a2) in enumerate(circle_ops):
            for j, (b1, b2) in enumerate(circle_ops):
                k = find((a1.compose(b1), a2.compose(b2)))
                if k is None:
                    closed = False
                else:
                    table[(i, j)] = k
        report.record("closure", closed, "action table is not closed under composition")

        assoc = True
        if closed:
            n = len(circle_ops)
            for i in range(n):
                for j in range(n):
                    for k in range(n):
                        if table[(table[(i, j)], k)] != table[(i, table[(j, k)])]:
                            assoc = False
        report.record("associativity", assoc, "composition table is not associative")

    free = True
    for g, (o1, o2) in zip(geom.group, ops):
        f1_fixed = o1.has_fixed_points if o1 is not None else True  # trivial torus action
        f2_fixed = o2.has_fixed_points if o2 is not None else True
        is_identity = (
            (o1 is None or o1.close_to(_ModeOp("diag", 0.0, 1.0 + 0j)))
            and (o2 is None or o2.close_to(_ModeOp("diag", 0.0, 1.0 + 0j)))
        )
        if not is_identity and f1_fixed and f2_fixed:
            free = False
            report.record("freeness", False,
                          f"element '{g.label}' has fixed points in both factors")
    report.record("freeness", free)

    report.record(
        "acyclicity",
        geom.factor1.acyclic and geom.factor2.acyclic,
        "both flat bundles must be acyclic (nontrivial holonomy)",
    )
    return report


# ---------------------------------------------------------------------------
# Twisted factor traces
# ---------------------------------------------------------------------------

def factor_trace_model(factor: Factor, action: Action,
                       weight: Callable[[int], complex], label: str = "") -> HeatTraceModel:
    """Heat-trace model of  sum_q w(q) Tr'(action* e^{-t Delta_q})  on one factor.

    Expansions are exact and finite: identity-type actions give the single
    t^{-1/2} (circle) or t^{-1} (torus) term, rotations give the empty
    expansion, reflections a single t^0 term computed from the self-paired
    modes.
    """
    if isinstance(factor, TorusFactor):
        if not (isinstance(action, Rotation) and _canon_angle(action.angle) == 0.0
                and abs(complex(action.phase) - 1.0) < 1e-12):
            raise CapabilityError("torus factors support only the trivial action")
        return _torus_identity_model(factor, weight, label)

    mults = factor.degree_mults
    r, alpha = factor.radius, factor.alpha

    if isinstance(action, Rotation):
        wsum = sum(weight(q) * 1.0 for q in range(len(mults)))  # rotations preserve d theta
        sigma = complex(action.phase)
        phi = _canon_angle(action.angle)
        coeff = wsum * sigma
        if coeff == 0:
            return zero_model(label or "rotation")
        has_kernel = abs(alpha % 1.0) < 1e-14
        # kernel modes: one per degree, rotation diagonal = sigma on each
        kernel_trace = sigma * sum(weight(q) for q in range(len(mults))) if has_kernel else 0.0

        if phi == 0.0:
            terms = ((-0.5, coeff * SQRT_PI * r),)

            def remainder(t: float, tol: float) -> complex:
                return coeff * theta_dual_tail(r, alpha, t, tol / max(abs(coeff), 1e-30))
        else:
            terms = ()

            def remainder(t: float, tol: float) -> complex:
                raw = poisson_dual_eval(r, alpha, t, tol / max(abs(coeff), 1e-30), phi=phi)
                return coeff * raw

        def evaluator(t: float, tol: float) -> complex:
            val = theta_sum(r, alpha, t, tol / max(abs(coeff), 1e-30), phi=phi,
                            exclude_kernel=has_kernel)
            return coeff * val

        gap = LatticeFamily(r, alpha % 1.0).smallest_positive
        h1 = abs(evaluator(1.0, 1e-13))
        bound = max(h1 * math.exp(gap),
                    abs(coeff) * abs(theta_sum(r, alpha, 1.0, 1e-13, exclude_kernel=has_kernel)) * math.exp(gap))
        return HeatTraceModel(
            evaluator=evaluator,
            expansion=AdmissibleExpansion(terms=terms, decay_rate=gap, kernel_trace=kernel_trace),
            decay_bound=bound,
            remainder=remainder,
            label=label or ("circle" if phi == 0.0 else f"rotation({phi:.3f})"),
        )

    # reflection: only self-paired modes k = -alpha contribute, exactly constant
    op = _mode_op(action, alpha)  # validates equivariance
    w_net = weight(0) - weight(1)  # d theta -> -d theta flips the 1-form sign
    has_kernel = abs(alpha % 1.0) < 1e-14
    if has_kernel:
        # self-paired mode is the kernel mode; diagonal phase is eps on 0-forms
        diag = complex(action.phase)
        raw_const = w_net * diag
        kernel_trace = raw_const
    else:
        raw_const = 0.0
        kernel_trace = 0.0
    gap = LatticeFamily(r, alpha % 1.0).smallest_positive
    terms = ((0.0, raw_const),) if raw_const != 0 else ()
    return HeatTraceModel(
        evaluator=lambda t, tol: 0.0,
        expansion=AdmissibleExpansion(terms=terms, decay_rate=gap, kernel_trace=kernel_trace),
        decay_bound=0.0,
        remainder=lambda t, tol: 0.0,
        label=label or "reflection",
    )


def _torus_identity_model(factor: TorusFactor, weight: Callable[[int], complex],
                          label: str) -> HeatTraceModel:
    wsum = sum(weight(q) * m for q, m in enumerate(factor.degree_mults))
    if wsum == 0:
        return zero_model(label or "torus")
    if not factor.acyclic:
        raise CapabilityError("torus factor with trivial holonomies has a kernel; unsupported here")
    r, a, b = factor.radius, factor.alpha, factor.beta

    def evaluator(t: float, tol: float) -> complex:
        per = tol / (2.0 * max(abs(wsum), 1e-30))
        ta = theta_sum(r, a, t, per)
        tb = theta_sum(r, b, t, per)
        return wsum * ta * tb

    def remainder(t: float, tol: float) -> complex:
        # theta_a theta_b - pi r^2 / t, assembled from dual tails (cancellation-free)
        per = tol / (4.0 * max(abs(wsum), 1e-30))
        lead = r * SQRT_PI / math.sqrt(t)
        da = theta_dual_tail(r, a, t, per)
        db = theta_dual_tail(r, b, t, per)
        return wsum * (lead * db + da * lead + da * db)

    gap = min(LatticeFamily(r, a).smallest_positive, LatticeFamily(r, b).smallest_positive)
    h1 = abs(evaluator(1.0, 1e-13))
    return HeatTraceModel(
        evaluator=evaluator,
        expansion=AdmissibleExpansion(terms=((-1.0, wsum * math.pi * r * r),), decay_rate=gap),
        decay_bound=h1 * math.exp(gap),
        remainder=remainder,
        label=label or "torus",
    )


def factor_twisted_trace(factor: Factor, action: Action, weight: Callable[[int], complex],
                         t: float, tol: float) -> complex:
    """Raw twisted trace  sum_q w(q) Tr(action* e^{-t Delta_q})  (kernel included)."""
    if t <= 0.0 or tol <= 0.0:
        raise DomainError("t and tol must be positive")
    model = factor_trace_model(factor, action, weight)
    return model.evaluator(t, tol) + model.expansion.kernel_trace


def quotient_weighted_trace(geom: QuotientGeometry,
                            weight1: Callable[[int], complex],
                            weight2: Callable[[int], complex]) -> MultiAdmissibleData:
    """Two-parameter quotient heat trace as the group average of factor-trace
    products, packaged with full multi-asymptotic data.

    The bidegree weight is assumed to factorize as w1(q1) * w2(q2) across the
    two gradings (signs included in the factors).
    """
    report = validate_geometry(geom)
    if not report.passed:
        raise ValidationError("invalid quotient geometry: " + "; ".join(report.messages))
    scale = 1.0 / len(geom.group)
    terms = []
    for idx, g in enumerate(geom.group):
        label = g.label or f"gamma{idx}"
        m1 = factor_trace_model(geom.factor1, g.f1, weight1, label=f"{label}.f1")
        m2 = factor_trace_model(geom.factor2, g.f2, weight2, label=f"{label}.f2")
        terms.append(SeparableTerm(label=label, factor1=m1, factor2=m2, weight=scale))
    return from_separable(terms)


# ---------------------------------------------------------------------------
# Ready-made geometries
# ---------------------------------------------------------------------------

def klein_bottle_quotient(r1: float, alpha1: float = 0.5, r2: float = 1.0,
                          axis: float = 0.0, refl_phase: float = 1.0) -> QuotientGeometry:
    """Z/2 quotient of circle x circle by (rotation by pi, reflection).

    The rotation lift must square to the identity on the alpha1 bundle, which
    forces its bundle phase sigma to satisfy sigma^2 e^{2 pi i alpha1} = 1.
    """
    sigma = cmath.exp(-1j * math.pi * alpha1)
    gamma = GroupElement(Rotation(math.pi, sigma), Reflection(axis, refl_phase), label="rot-refl")
    return QuotientGeometry(CircleFactor(r1, alpha1), CircleFactor(r2, 0.5),
                            (identity_element(), gamma))
