"""Two-variable zeta continuation for multi-admissible heat traces, and multi-torsion.

A multi-admissible h(t1, t2) has four asymptotic regimes: a double power
expansion with coefficient functions where only one variable is small, an
exponentially decaying coefficient family where one variable is large, and
joint exponential decay.  Splitting the Mellin integral

    f(s1, s2) = int int t1^(s1-1) t2^(s2-1) h dt1 dt2

over the four quadrants at t = 1 yields the Laurent data at the origin:

    f = a00/(s1 s2) + P1(s2)/s1 + P2(s1)/s2 + G(s1, s2),

with P1, P2, G analytic there.  Multiplying by 1/(Gamma(s1) Gamma(s2)) =
(s1 + g s1^2 + ...)(s2 + g s2^2 + ...) with g the Euler-Mascheroni constant
gives

    zeta(0,0)            = a00
    d zeta/d s2 (0,0)    = P1(0) + g a00
    d zeta/d s1 (0,0)    = P2(0) + g a00
    d^2 zeta/ds1 ds2     = G(0,0) + g (P1(0) + P2(0)) + g^2 a00.

P1(0) collects the pole coefficient of 1/s1: the a_{0,p2}/p2 pole sum plus the
Mellin values at 0 of the two t1^0 coefficient functions.  This second-order
bookkeeping is locked against the separable product oracle, where
zeta(s1, s2) = sum_g w_g zeta1_g(s1) zeta2_g(s2) is computable one variable at
a time.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

from .errors import AccuracyError, CapabilityError, DomainError
from .mellin import EULER_GAMMA, continue_zeta
from .quadrature import decay_horizon, integrate, integrate2d, integrate_decades
from .spectral import HeatTraceModel


@dataclass(frozen=True)
class SeparableTerm:
    """One product term  weight * h1(t1) * h2(t2)  of a separable trace."""

    label: str
    factor1: HeatTraceModel
    factor2: HeatTraceModel
    weight: complex


CoeffFn = Callable[[float, float], complex]  # (t, tol) -> value


@dataclass(frozen=True)
class MultiAdmissibleData:
    """Evaluable two-parameter trace bundled with its multi-asymptotic data.

    ``a`` holds the double expansion coefficients; ``b1``/``b2`` the small-t
    coefficient functions (superpolynomially small as their argument -> 0);
    ``c1``/``c2`` the mixed-regime coefficient functions (exponentially
    decaying); ``r_core``, ``s1_core``, ``s2_core`` the fully subtracted
    remainders of the corresponding quadrants.  ``ma4`` = (C, eps1, eps2)
    bounds |h| <= C e^{-eps1 t1 - eps2 t2} on [1, inf)^2.
    """

    evaluator: Callable[[float, float, float], complex]  # (t1, t2, tol)
    a: tuple[tuple[tuple[float, float], complex], ...]
    b1: tuple[tuple[float, CoeffFn], ...]
    b2: tuple[tuple[float, CoeffFn], ...]
    c1: tuple[tuple[float, CoeffFn], ...]
    c2: tuple[tuple[float, CoeffFn], ...]
    r_core: Callable[[float, float, float], complex]
    s1_core: Callable[[float, float, float], complex]
    s2_core: Callable[[float, float, float], complex]
    ma4: tuple[float, float, float]
    separable_form: tuple[SeparableTerm, ...] | None = None

    def coeff(self, p1: float, p2: float) -> complex:
        for (q1, q2), c in self.a:
            if abs(q1 - p1) < 1e-12 and abs(q2 - p2) < 1e-12:
                return c
        return 0.0


def from_separable(terms: Sequence[SeparableTerm]) -> MultiAdmissibleData:
    """Assemble full multi-asymptotic data from a finite sum of product terms.

    Factor models must be kernel-free (the acyclicity standing hypothesis);
    their exact finite expansions and cancellation-free remainders provide
    every coefficient function in closed form.
    """
    terms = tuple(terms)
    if not terms:
        raise CapabilityError("need at least one separable term")
    for term in terms:
        for fac in (term.factor1, term.factor2):
            if fac.expansion.kernel_trace != 0:
                raise CapabilityError(
                    f"factor '{fac.label}' has a kernel; multi-zeta requires acyclic factors"
                )

    live = [t for t in terms if t.weight != 0 and not (t.factor1.is_zero or t.factor2.is_zero)]

    a: dict[tuple[float, float], complex] = {}
    for term in live:
        for p1, c1_ in term.factor1.expansion.terms:
            for p2, c2_ in term.factor2.expansion.terms:
                key = (p1, p2)
                a[key] = a.get(key, 0.0) + term.weight * c1_ * c2_
    a = {k: v for k, v in a.items() if v != 0.0}

    p1_powers = sorted({p for t in live for p, _ in t.factor1.expansion.terms})
    p2_powers = sorted({p for t in live for p, _ in t.factor2.expansion.terms})

    def _coeff_b1(p: float) -> CoeffFn:
        sel = [(t.weight * t.factor1.expansion.coeff(p), t.factor2) for t in live]
        sel = [(w, f) for w, f in sel if w != 0.0]
        return lambda t2, tol: sum(w * f.remainder_at(t2, tol / max(len(sel), 1)) for w, f in sel)

    def _coeff_c1(p: float) -> CoeffFn:
        sel = [(t.weight * t.factor1.expansion.coeff(p), t.factor2) for t in live]
        sel = [(w, f) for w, f in sel if w != 0.0]
        return lambda t2, tol: sum(w * f.evaluator(t2, tol / max(len(sel), 1)) for w, f in sel)

    def _coeff_b2(p: float) -> CoeffFn:
        sel = [(t.weight * t.factor2.expansion.coeff(p), t.factor1) for t in live]
        sel = [(w, f) for w, f in sel if w != 0.0]
        return lambda t1, tol: sum(w * f.remainder_at(t1, tol / max(len(sel), 1)) for w, f in sel)

    def _coeff_c2(p: float) -> CoeffFn:
        sel = [(t.weight * t.factor2.expansion.coeff(p), t.factor1) for t in live]
        sel = [(w, f) for w, f in sel if w != 0.0]
        return lambda t1, tol: sum(w * f.evaluator(t1, tol / max(len(sel), 1)) for w, f in sel)

    n = max(len(live), 1)

    def evaluator(t1: float, t2: float, tol: float) -> complex:
        per = tol / (2 * n)
        return sum(t.weight * t.factor1.evaluator(t1, per) * t.factor2.evaluator(t2, per)
                   for t in live)

    def r_core(t1: float, t2: float, tol: float) -> complex:
        per = tol / (2 * n)
        return sum(t.weight * t.factor1.remainder_at(t1, per) * t.factor2.remainder_at(t2, per)
                   for t in live)

    def s1_core(t1: float, t2: float, tol: float) -> complex:
        per = tol / (2 * n)
        return sum(t.weight * t.factor1.remainder_at(t1, per) * t.factor2.evaluator(t2, per)
                   for t in live)

    def s2_core(t1: float, t2: float, tol: float) -> complex:
        per = tol / (2 * n)
        return sum(t.weight * t.factor1.evaluator(t1, per) * t.factor2.remainder_at(t2, per)
                   for t in live)

    if live:
        cap = sum(abs(t.weight) * t.factor1.decay_bound * t.factor2.decay_bound for t in live)
        eps1 = min(t.factor1.expansion.decay_rate for t in live)
        eps2 = min(t.factor2.expansion.decay_rate for t in live)
    else:
        cap, eps1, eps2 = 0.0, 1.0, 1.0

    return MultiAdmissibleData(
        evaluator=evaluator,
        a=tuple(sorted(a.items())),
        b1=tuple((p, _coeff_b1(p)) for p in p1_powers),
        b2=tuple((p, _coeff_b2(p)) for p in p2_powers),
        c1=tuple((p, _coeff_c1(p)) for p in p1_powers),
        c2=tuple((p, _coeff_c2(p)) for p in p2_powers),
        r_core=r_core,
        s1_core=s1_core,
        s2_core=s2_core,
        ma4=(cap, eps1, eps2),
        separable_form=terms,
    )


@dataclass(frozen=True)
class MultiZetaResult:
    value_at_origin: complex
    ds1_at_origin: complex
    ds2_at_origin: complex
    mixed_at_origin: complex


def continue_multizeta(h: MultiAdmissibleData, tol: float) -> MultiZetaResult:
    """Quadrant-split continuation of the two-variable zeta at the origin.

    Uses only the multi-asymptotic data (never the separable shortcut), so a
    separable input exercises a genuinely independent evaluation path.
    """
    if tol <= 0.0:
        raise DomainError("tol must be positive")
    cap, eps1, eps2 = h.ma4
    if eps1 <= 0.0 or eps2 <= 0.0:
        raise CapabilityError("multi-admissible data lacks joint decay rates")
    itol = tol * 1e-3

    t1_hi = decay_horizon(max(cap, 1.0), eps1, 0.0, tol / 16.0)
    t2_hi = decay_horizon(max(cap, 1.0), eps2, 0.0, tol / 16.0)

    a00 = h.coeff(0.0, 0.0)

    def tilde_b(fn: CoeffFn, budget: float) -> complex:
        return integrate(lambda t: fn(t, itol) / t, 0.0, 1.0, budget)

    def tilde_c(fn: CoeffFn, horizon: float, budget: float) -> complex:
        return integrate_decades(lambda t: fn(t, itol) / t, 1.0, horizon, budget)

    n_1d = max(len(h.b1) + len(h.b2) + len(h.c1) + len(h.c2), 1)
    b1d = tol / (4.0 * n_1d)

    bt1 = {p: tilde_b(fn, b1d) for p, fn in h.b1}
    ct1 = {p: tilde_c(fn, t2_hi, b1d) for p, fn in h.c1}
    bt2 = {p: tilde_b(fn, b1d) for p, fn in h.b2}
    ct2 = {p: tilde_c(fn, t1_hi, b1d) for p, fn in h.c2}

    p1_of = lambda: {p for (p, _q), _ in h.a} | set(bt1) | set(ct1)
    p2_of = lambda: {q for (_p, q), _ in h.a} | set(bt2) | set(ct2)

    pole1 = sum(h.coeff(0.0, q) / q for q in p2_of() if q != 0.0)
    pole2 = sum(h.coeff(p, 0.0) / p for p in p1_of() if p != 0.0)
    p1_const = pole1 + bt1.get(0.0, 0.0) + ct1.get(0.0, 0.0)
    p2_const = pole2 + bt2.get(0.0, 0.0) + ct2.get(0.0, 0.0)

    g00 = sum(c / (p1 * p2) for (p1, p2), c in h.a if p1 != 0.0 and p2 != 0.0)
    g00 += sum((bt1[p] + ct1.get(p, 0.0)) / p for p in bt1 if p != 0.0)
    g00 += sum(ct1[p] / p for p in ct1 if p != 0.0 and p not in bt1)
    g00 += sum((bt2[p] + ct2.get(p, 0.0)) / p for p in bt2 if p != 0.0)
    g00 += sum(ct2[p] / p for p in ct2 if p != 0.0 and p not in bt2)

    b2d = tol / 16.0
    g00 += integrate2d(lambda t1, t2: h.r_core(t1, t2, itol) / (t1 * t2), 0.0, 1.0, 0.0, 1.0, b2d)
    g00 += integrate2d(lambda t1, t2: h.s1_core(t1, t2, itol) / (t1 * t2), 0.0, 1.0, 1.0, t2_hi, b2d)
    g00 += integrate2d(lambda t1, t2: h.s2_core(t1, t2, itol) / (t1 * t2), 1.0, t1_hi, 0.0, 1.0, b2d)
    g00 += integrate2d(lambda t1, t2: h.evaluator(t1, t2, itol) / (t1 * t2), 1.0, t1_hi, 1.0, t2_hi, b2d)

    g = EULER_GAMMA
    return MultiZetaResult(
        value_at_origin=a00,
        ds1_at_origin=p2_const + g * a00,
        ds2_at_origin=p1_const + g * a00,
        mixed_at_origin=g00 + g * (p1_const + p2_const) + g * g * a00,
    )


def separable_mixed_oracle(terms: Sequence[SeparableTerm], tol: float) -> complex:
    """Product-form mixed partial  sum_g w_g zeta1_g'(0) zeta2_g'(0)."""
    total = 0j
    for term in terms:
        if term.weight == 0 or term.factor1.is_zero or term.factor2.is_zero:
            continue
        z1 = continue_zeta(term.factor1, tol)
        z2 = continue_zeta(term.factor2, tol)
        total += term.weight * z1.derivative_at_0 * z2.derivative_at_0
    return total


def multi_torsion(h: MultiAdmissibleData, tol: float = 1e-8) -> float:
    """Multi-torsion  (1/4) * mixed partial of the two-variable zeta at the origin.

    When the input carries its separable form the product fast path is also
    computed and must agree within 2 tol.
    """
    result = continue_multizeta(h, tol)
    mixed = result.mixed_at_origin
    if abs(mixed.imag) > 100.0 * tol:
        raise AccuracyError(f"mixed partial has imaginary part {mixed.imag:.2e}")
    value = 0.25 * mixed.real
    if h.separable_form is not None:
        fast = 0.25 * separable_mixed_oracle(h.separable_form, tol)
        if abs(value - fast.real) > 2.0 * tol:
            raise AccuracyError(
                f"multi-torsion paths disagree: quadrant split {value!r} vs product {fast.real!r}"
            )
    return value
