"""Spectra and heat traces of model operators, evaluated with certified truncation.

The discrete stand-in for an elliptic operator is a Spectrum: a finite list of
(eigenvalue, multiplicity) pairs, optionally backed by circle-type lattice
families {((k + alpha)/r)^2 : k in Z} that are summed with rigorous Gaussian
tail bounds.  Heat traces switch between the direct eigensum (large t) and the
Poisson-dual sum (small t) at t = r^2 so both regimes keep uniform absolute
accuracy; both representations stay available for cross-checks.

A HeatTraceModel bundles the kernel-excluded evaluator with the exact finite
small-t expansion of the raw trace and its large-t decay data.  Conventions:

* ``evaluator(t, tol)`` returns the kernel-excluded trace (the Tr' value).
* ``expansion.terms`` are the small-t coefficients of the raw trace (kernel
  included); ``expansion.kernel_trace`` is the weighted trace of the kernel
  projection, so the kernel-excluded t^0 coefficient is
  ``coeff(0) - kernel_trace``.
* ``remainder(t, tol)`` is raw(t) minus the stored terms, computed in a
  cancellation-free form wherever one exists (Poisson-dual tails, Taylor
  tails).  The same function is the kernel-excluded remainder because the
  kernel constant cancels between evaluator and expansion.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable, Sequence

from .errors import CapabilityError, DomainError

SQRT_PI = math.sqrt(math.pi)


# ---------------------------------------------------------------------------
# Gaussian lattice tail bounds
# ---------------------------------------------------------------------------

def _gaussian_tail(beta: float, x0: float) -> float:
    """Upper bound for sum_{j>=0} exp(-beta (x0+j)^2), x0 > 0."""
    if x0 <= 0.0:
        raise DomainError("tail start must be positive")
    expo = beta * x0 * x0
    if expo > 700.0:
        return 0.0
    rho = math.exp(-beta * (2.0 * x0 + 1.0))
    return math.exp(-expo) / (1.0 - rho)


def _gaussian_moment_tail(beta: float, x0: float) -> float:
    """Upper bound for sum_{j>=0} (x0+j) exp(-beta (x0+j)^2), x0 > 0."""
    if x0 <= 0.0:
        raise DomainError("tail start must be positive")
    expo = beta * x0 * x0
    if expo > 700.0:
        return 0.0
    rho = math.exp(-beta * (2.0 * x0 + 1.0))
    return math.exp(-expo) * (x0 / (1.0 - rho) + rho / (1.0 - rho) ** 2)


def truncate_with_tail_bound(radius: float, alpha: float, t: float, tol: float) -> int:
    """Smallest K with  sum_{|k|>K} exp(-t ((k+alpha)/r)^2) < tol.

    Monotone in tol.  Valid for the direct eigensum regime; for small t the
    Poisson-dual representation should be used instead.
    """
    if t <= 0.0:
        raise DomainError("t must be positive")
    if tol <= 0.0:
        raise DomainError("tol must be positive")
    beta = t / (radius * radius)
    a = alpha % 1.0
    k = 0
    while True:
        # both one-sided tails start at distance >= k + 1 - a from 0
        x0 = k + 1.0 - a
        if x0 > 0 and 2.0 * _gaussian_tail(beta, x0) < tol:
            return k
        k += 1
        if k > 10_000_000:
            raise DomainError("truncation index overflow; use the Poisson-dual form")


def _dual_index_bound(radius: float, t: float, tol: float, weight_cap: float = 1.0) -> int:
    """Number of dual modes needed so the omitted Gaussian tail is < tol."""
    beta = math.pi * math.pi * radius * radius / t
    m = 1
    while True:
        if 2.0 * weight_cap * _gaussian_tail(beta, float(m)) < tol:
            return m
        m += 1
        if m > 10_000_000:
            raise DomainError("dual truncation overflow")


# ---------------------------------------------------------------------------
# Theta-type lattice sums (both representations)
# ---------------------------------------------------------------------------

def theta_sum_direct(radius: float, alpha: float, t: float, tol: float,
                     phi: float = 0.0, exclude_kernel: bool = False) -> complex:
    """Direct eigensum  sum_k e^{i (k+alpha) phi} e^{-t ((k+alpha)/r)^2}."""
    if t <= 0.0 or tol <= 0.0:
        raise DomainError("t and tol must be positive")
    K = truncate_with_tail_bound(radius, alpha, t, tol)
    total = 0j
    for k in range(-K, K + 1):
        x = k + alpha
        if exclude_kernel and abs(x) < 1e-14:
            continue
        total += cmath.exp(1j * x * phi) * math.exp(-t * (x / radius) ** 2)
    return total


def poisson_dual_eval(radius: float, alpha: float, t: float, tol: float,
                      phi: float = 0.0, exclude_kernel: bool = False) -> complex:
    """Poisson-dual form of the same sum:

        r sqrt(pi/t) * sum_m e^{2 pi i m alpha} e^{-r^2 (phi - 2 pi m)^2 / (4 t)}

    Numerically stable for small t; agrees with the direct eigensum wherever
    both converge.
    """
    if t <= 0.0 or tol <= 0.0:
        raise DomainError("t and tol must be positive")
    amp = radius * math.sqrt(math.pi / t)
    # shifted Gaussian in m centred at phi/(2 pi); widen the bound accordingly
    m_center = phi / (2.0 * math.pi)
    M = _dual_index_bound(radius, t, tol / max(amp, 1.0)) + int(abs(m_center)) + 2
    total = 0j
    for m in range(-M, M + 1):
        total += cmath.exp(2j * math.pi * m * alpha) * math.exp(
            -radius * radius * (phi - 2.0 * math.pi * m) ** 2 / (4.0 * t)
        )
    value = amp * total
    if exclude_kernel and abs((alpha % 1.0)) < 1e-14:
        value -= 1.0  # the k = -alpha zero mode carries phase e^{i*0*phi} = 1
    return value


def theta_sum(radius: float, alpha: float, t: float, tol: float,
              phi: float = 0.0, exclude_kernel: bool = False) -> complex:
    """Certified lattice sum; switches representation at t = r^2."""
    if t < radius * radius:
        return poisson_dual_eval(radius, alpha, t, tol, phi, exclude_kernel)
    return theta_sum_direct(radius, alpha, t, tol, phi, exclude_kernel)


def theta_dual_tail(radius: float, alpha: float, t: float, tol: float) -> complex:
    """Untwisted theta minus its leading r sqrt(pi/t) term, cancellation-free.

        r sqrt(pi/t) * sum_{m != 0} e^{2 pi i m alpha} e^{-pi^2 m^2 r^2 / t}
    """
    if t <= 0.0:
        raise DomainError("t must be positive")
    amp = radius * math.sqrt(math.pi / t)
    M = _dual_index_bound(radius, t, tol / max(amp, 1.0))
    total = 0.0
    for m in range(1, M + 1):
        total += 2.0 * math.cos(2.0 * math.pi * m * alpha) * math.exp(
            -math.pi * math.pi * m * m * radius * radius / t
        )
    return amp * total


def first_moment_sum(a: float, t: float, tol: float) -> float:
    """sum_k (k + a) e^{-t (k+a)^2}  for the unit-radius signed circle operator.

    Direct for t >= 1; for t < 1 the dual form

        sum_{m>=1} 2 pi m sqrt(pi) t^{-3/2} sin(2 pi m a) e^{-pi^2 m^2 / t}

    whose m = 0 term vanishes, so the small-t expansion is empty.
    """
    if t <= 0.0 or tol <= 0.0:
        raise DomainError("t and tol must be positive")
    if t >= 1.0:
        frac = a % 1.0
        k = 0
        while True:
            x0 = k + 1.0 - frac
            if x0 > 0 and 2.0 * _gaussian_moment_tail(t, x0) < tol:
                break
            k += 1
        return math.fsum((k_ + a) * math.exp(-t * (k_ + a) ** 2) for k_ in range(-k, k + 1))
    amp = 2.0 * math.pi * SQRT_PI * t ** (-1.5)
    beta = math.pi * math.pi / t
    total = 0.0
    m = 1
    while True:
        term = m * math.exp(-beta * m * m)
        total += term * math.sin(2.0 * math.pi * m * a)
        if amp * _gaussian_moment_tail(beta, float(m + 1)) < tol:
            break
        m += 1
    return amp * total


# ---------------------------------------------------------------------------
# Spectrum types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LatticeFamily:
    """Circle-type eigenvalue family {((k + alpha)/radius)^2 : k in Z}.

    ``weight`` scales the family's contribution to traces.  When alpha is an
    integer the k = -alpha mode is a zero mode (one per family).
    """

    radius: float
    alpha: float
    weight: complex = 1.0

    def __post_init__(self) -> None:
        if self.radius <= 0.0:
            raise DomainError("lattice radius must be positive")

    @property
    def has_kernel(self) -> bool:
        return abs(self.alpha % 1.0) < 1e-14

    @property
    def smallest_positive(self) -> float:
        frac = self.alpha % 1.0
        gap = 1.0 if self.has_kernel else min(frac, 1.0 - frac)
        return (gap / self.radius) ** 2


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalue data: finite entries plus optional lattice families.

    ``entries`` hold nonzero eigenvalues sorted ascending by absolute value
    with multiplicities >= 1; zero eigenvalues are counted in ``kernel_dim``
    and excluded from every sum (the kernel-excluded trace convention).
    """

    entries: tuple[tuple[float, int], ...] = ()
    kernel_dim: int = 0
    lattices: tuple[LatticeFamily, ...] = ()

    def __post_init__(self) -> None:
        lams = [lam for lam, _ in self.entries]
        if any(lam == 0.0 for lam in lams):
            raise DomainError("zero eigenvalues belong in kernel_dim, not entries")
        if any(m < 1 for _, m in self.entries):
            raise DomainError("multiplicities must be >= 1")
        if lams != sorted(lams, key=abs):
            raise DomainError("entries must be sorted ascending by |lambda|")
        if self.kernel_dim < 0:
            raise DomainError("kernel_dim must be nonnegative")
        if self.lattices:
            n_zero = sum(1 for fam in self.lattices if fam.has_kernel)
            if self.kernel_dim != n_zero:
                raise DomainError(
                    f"kernel_dim {self.kernel_dim} disagrees with the {n_zero} "
                    "lattice zero mode(s)"
                )

    @property
    def smallest_positive(self) -> float:
        cands = [abs(lam) for lam, _ in self.entries]
        cands += [fam.smallest_positive for fam in self.lattices]
        if not cands:
            raise CapabilityError("empty spectrum has no spectral gap")
        return min(cands)

    def scaled(self, c: float) -> "Spectrum":
        """Spectrum of c * L (eigenvalues scaled by c > 0)."""
        if c <= 0.0:
            raise DomainError("scale must be positive")
        return Spectrum(
            entries=tuple((c * lam, m) for lam, m in self.entries),
            kernel_dim=self.kernel_dim,
            lattices=tuple(
                LatticeFamily(fam.radius / math.sqrt(c), fam.alpha, fam.weight)
                for fam in self.lattices
            ),
        )


def circle_spectrum(radius: float, alpha: float) -> Spectrum:
    """Spectrum of the flat-bundle Laplacian on one form degree of a circle."""
    fam = LatticeFamily(radius, alpha % 1.0)
    return Spectrum(kernel_dim=1 if fam.has_kernel else 0, lattices=(fam,))


@dataclass(frozen=True)
class GradedSpectrum:
    """Per-degree spectra for a graded complex, degrees 0..r contiguous.

    ``signs`` (optional) carries one sign per finite entry of each degree, for
    operators B with B^2 equal to the stored eigenvalue.
    """

    per_degree: tuple[Spectrum, ...]
    signs: tuple[tuple[int, ...], ...] | None = None

    def __post_init__(self) -> None:
        if not self.per_degree:
            raise DomainError("graded spectrum needs at least one degree")
        if self.signs is not None:
            if len(self.signs) != len(self.per_degree):
                raise DomainError("signs must cover every degree")
            for sg, spec in zip(self.signs, self.per_degree):
                if len(sg) != len(spec.entries):
                    raise DomainError("one sign per spectral entry required")
                if any(s not in (-1, 1) for s in sg):
                    raise DomainError("signs must be +1 or -1")

    @property
    def degrees(self) -> range:
        return range(len(self.per_degree))


@dataclass(frozen=True)
class BigradedSpectrum:
    """Finite bidegree spectrum; the operator value at (t1, t2) is t1*mu1 + t2*mu2."""

    per_bidegree: tuple[tuple[tuple[int, int], tuple[tuple[float, float, int], ...]], ...]
    kernel_pairs: int = 0

    def __post_init__(self) -> None:
        for _, entries in self.per_bidegree:
            for mu1, mu2, mult in entries:
                if mu1 < 0 or mu2 < 0 or mult < 1:
                    raise DomainError("bigraded entries need mu1, mu2 >= 0 and mult >= 1")
                if mu1 == 0.0 and mu2 == 0.0:
                    raise DomainError("zero pairs belong in kernel_pairs")

    def weighted_trace(self, weight: Callable[[int, int], complex], t1: float, t2: float) -> complex:
        if t1 <= 0.0 or t2 <= 0.0:
            raise DomainError("t1 and t2 must be positive")
        total = 0j
        for (q1, q2), entries in self.per_bidegree:
            w = weight(q1, q2)
            if w == 0:
                continue
            total += w * math.fsum(
                mult * math.exp(-t1 * mu1 - t2 * mu2) for mu1, mu2, mult in entries
            )
        return total


# ---------------------------------------------------------------------------
# Admissible expansions and heat-trace models
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AdmissibleExpansion:
    """Finite small-t expansion data of a raw heat trace.

    ``terms`` maps strictly increasing powers p to coefficients a_p; absent
    powers have coefficient zero by convention.  ``kernel_trace`` is the
    weighted trace of the operator on the kernel, shifting the t^0
    coefficient of the kernel-excluded trace.  ``decay_rate`` is the
    exponential rate of the kernel-excluded trace at large t.
    """

    terms: tuple[tuple[float, complex], ...] = ()
    decay_rate: float = 0.0
    kernel_trace: complex = 0.0

    def __post_init__(self) -> None:
        powers = [p for p, _ in self.terms]
        if powers != sorted(powers) or len(set(powers)) != len(powers):
            raise DomainError("expansion powers must be strictly increasing")

    def coeff(self, power: float) -> complex:
        for p, c in self.terms:
            if abs(p - power) < 1e-12:
                return c
        return 0.0

    def prime_terms(self) -> tuple[tuple[float, complex], ...]:
        """Terms of the kernel-excluded trace (t^0 shifted by -kernel_trace)."""
        terms = dict(self.terms)
        if self.kernel_trace != 0:
            terms[0.0] = terms.get(0.0, 0.0) - self.kernel_trace
        return tuple(sorted(terms.items()))


@dataclass(frozen=True)
class HeatTraceModel:
    """A kernel-excluded heat trace with its exact expansion and decay data.

    ``decay_bound`` is C with |evaluator(t)| <= C e^{-decay_rate * t} for
    t >= 1.  ``remainder(t, tol)`` evaluates raw(t) - sum of stored terms.
    """

    evaluator: Callable[[float, float], complex]
    expansion: AdmissibleExpansion
    decay_bound: float
    remainder: Callable[[float, float], complex] | None = None
    label: str = ""

    def __call__(self, t: float, tol: float = 1e-12) -> complex:
        if t <= 0.0:
            raise DomainError("t must be positive")
        if tol <= 0.0:
            raise DomainError("tol must be positive")
        return self.evaluator(t, tol)

    def remainder_at(self, t: float, tol: float) -> complex:
        if self.remainder is not None:
            return self.remainder(t, tol)
        # fallback: direct subtraction (noise floor ~ eps * |value|)
        raw = self.evaluator(t, tol) + self.expansion.kernel_trace
        return raw - sum(c * t ** p for p, c in self.expansion.terms)

    @property
    def is_zero(self) -> bool:
        return self.decay_bound == 0.0 and not self.expansion.terms and self.expansion.kernel_trace == 0


def zero_model(label: str = "zero") -> HeatTraceModel:
    return HeatTraceModel(
        evaluator=lambda t, tol: 0.0,
        expansion=AdmissibleExpansion(terms=(), decay_rate=1.0),
        decay_bound=0.0,
        remainder=lambda t, tol: 0.0,
        label=label,
    )


def _taylor_order(lam_max: float, target: float = 1e-18) -> int:
    """Order J with lam_max^(J+1)/(J+1)! below target (remainder on (0,1])."""
    j, term = 0, lam_max
    while term > target and j < 400:
        j += 1
        term *= lam_max / (j + 1)
    return j + 2


def _taylor_coefficients(lam: float, order: int) -> list[float]:
    """[(-lam)^j / j! for j = 0..order], built incrementally to avoid overflow."""
    coeffs = [1.0]
    for j in range(1, order + 1):
        coeffs.append(coeffs[-1] * (-lam) / j)
    return coeffs


def _exp_taylor_tail(x: float, order: int) -> float:
    """e^x - sum_{j<=order} x^j/j!, summed forward (no cancellation for |x| modest)."""
    term = 1.0
    for j in range(1, order + 2):
        term *= x / j
    total, j = 0.0, order + 1
    while abs(term) > 1e-24:
        total += term
        j += 1
        term *= x / j
    return total


def spectrum_trace_model(spec: Spectrum, weight: complex = 1.0, label: str = "") -> HeatTraceModel:
    """Heat-trace model of a Spectrum: weight * Tr' e^{-tL}.

    Lattice families contribute an exact single t^(-1/2) term each; finite
    entries contribute a Taylor expansion truncated far below the working
    precision.  Remainders are assembled from Poisson-dual and Taylor tails.

    Taylor coefficient sums carry rounding noise growing like e^{lam_max} eps,
    so eigenvalues are capped at 12 (noise < 4e-11); rescale larger spectra
    through the exact scaling law (see Spectrum.scaled and log_det).
    """
    lam_max = max((abs(lam) for lam, _ in spec.entries), default=0.0)
    if lam_max > 12.0:
        raise CapabilityError(
            "finite eigenvalues above 12 lose precision in the expansion; "
            "rescale the spectrum (Spectrum.scaled) and use the scaling law"
        )
    order = _taylor_order(lam_max) if spec.entries else 0

    terms: dict[float, complex] = {}
    half_coeff = sum(fam.weight * SQRT_PI * fam.radius for fam in spec.lattices)
    if spec.lattices:
        terms[-0.5] = weight * half_coeff
    if spec.entries:
        per_entry = [(mult, _taylor_coefficients(lam, order)) for lam, mult in spec.entries]
        for j in range(order + 1):
            c = sum(mult * coeffs[j] for mult, coeffs in per_entry)
            terms[float(j)] = terms.get(float(j), 0.0) + weight * c
    if spec.kernel_dim and not spec.lattices:
        # finite kernel modes add an exact constant to the raw trace
        terms[0.0] = terms.get(0.0, 0.0) + weight * spec.kernel_dim
    kernel_trace = weight * spec.kernel_dim

    def evaluator(t: float, tol: float) -> complex:
        parts = len(spec.lattices) + (1 if spec.entries else 0)
        per = tol / max(parts, 1)
        total = 0j
        for fam in spec.lattices:
            total += fam.weight * theta_sum(fam.radius, fam.alpha, t, per / max(abs(fam.weight), 1e-30),
                                            exclude_kernel=fam.has_kernel)
        if spec.entries:
            total += math.fsum(mult * math.exp(-t * lam) for lam, mult in spec.entries)
        return weight * total

    def remainder(t: float, tol: float) -> complex:
        total = 0j
        for fam in spec.lattices:
            total += fam.weight * theta_dual_tail(fam.radius, fam.alpha, t, tol / max(len(spec.lattices), 1))
        for lam, mult in spec.entries:
            total += mult * _exp_taylor_tail(-lam * t, order)
        return weight * total

    rate = spec.smallest_positive
    h1 = sum(abs(fam.weight) * abs(theta_sum(fam.radius, fam.alpha, 1.0, 1e-12, exclude_kernel=fam.has_kernel))
             for fam in spec.lattices)
    h1 += sum(mult * math.exp(-abs(lam)) for lam, mult in spec.entries)
    decay_bound = abs(weight) * h1 * math.exp(rate)

    return HeatTraceModel(
        evaluator=evaluator,
        expansion=AdmissibleExpansion(terms=tuple(sorted(terms.items())), decay_rate=rate,
                                      kernel_trace=kernel_trace),
        decay_bound=decay_bound,
        remainder=remainder,
        label=label or "spectrum",
    )


def weighted_sum(parts: Sequence[tuple[complex, HeatTraceModel]], label: str = "") -> HeatTraceModel:
    """Finite weighted sum of heat-trace models (expansions merge additively)."""
    parts = [(w, m) for w, m in parts if w != 0 and not m.is_zero]
    if not parts:
        return zero_model(label or "sum")
    terms: dict[float, complex] = {}
    kernel = 0j
    for w, m in parts:
        kernel += w * m.expansion.kernel_trace
        for p, c in m.expansion.terms:
            terms[p] = terms.get(p, 0.0) + w * c
    terms = {p: c for p, c in terms.items() if abs(c) > 0.0}
    rate = min(m.expansion.decay_rate for _, m in parts)
    bound = sum(abs(w) * m.decay_bound for w, m in parts)
    n = len(parts)

    def evaluator(t: float, tol: float) -> complex:
        return sum(w * m.evaluator(t, tol / (n * max(abs(w), 1e-30))) for w, m in parts)

    def remainder(t: float, tol: float) -> complex:
        return sum(w * m.remainder_at(t, tol / (n * max(abs(w), 1e-30))) for w, m in parts)

    return HeatTraceModel(
        evaluator=evaluator,
        expansion=AdmissibleExpansion(terms=tuple(sorted(terms.items())), decay_rate=rate,
                                      kernel_trace=kernel),
        decay_bound=bound,
        remainder=remainder,
        label=label or "sum(" + ",".join(m.label for _, m in parts) + ")",
    )


def graded_trace_model(spec: GradedSpectrum, weight: Callable[[int], complex],
                       label: str = "") -> HeatTraceModel:
    """Model of  sum_q w(q) Tr' e^{-t Delta_q}  for a graded spectrum."""
    parts = [(weight(q), spectrum_trace_model(spec.per_degree[q], label=f"deg{q}"))
             for q in spec.degrees]
    return weighted_sum(parts, label=label or "graded")


def signed_trace_model(spec: GradedSpectrum, label: str = "") -> HeatTraceModel:
    """Model of  Tr' B e^{-t B^2}  from a graded spectrum carrying signs.

    Entries are eigenvalues of B^2; the stored sign recovers the eigenvalue
    of B as sign * sqrt(lambda).  Lattice-backed degrees are not supported
    here (use circle_dirac_trace_model for the circle operator).
    """
    if spec.signs is None:
        raise CapabilityError("eta-type trace needs sign data")
    entries: list[tuple[float, float]] = []  # (b_eigenvalue, mult)
    for q in spec.degrees:
        sub = spec.per_degree[q]
        if sub.lattices:
            raise CapabilityError("signed lattice spectra need a dedicated model")
        for (lam, mult), sign in zip(sub.entries, spec.signs[q]):
            entries.append((sign * math.sqrt(lam), float(mult)))
    if not entries:
        return zero_model(label or "signed")
    b_max = max(abs(b) for b, _ in entries)
    if b_max * b_max > 12.0:
        raise CapabilityError(
            "squared eigenvalues above 12 lose precision in the expansion; "
            "rescale the spectrum first (eta is invariant under positive scaling)"
        )
    order = _taylor_order(b_max * b_max)
    per_entry = [(b, mult, _taylor_coefficients(b * b, order)) for b, mult in entries]
    terms: dict[float, complex] = {}
    for j in range(order + 1):
        c = sum(mult * b * coeffs[j] for b, mult, coeffs in per_entry)
        terms[float(j)] = c

    def evaluator(t: float, tol: float) -> complex:
        return math.fsum(mult * b * math.exp(-t * b * b) for b, mult in entries)

    def remainder(t: float, tol: float) -> complex:
        return math.fsum(mult * b * _exp_taylor_tail(-b * b * t, order) for b, mult in entries)

    rate = min(b * b for b, _ in entries)
    h1 = sum(abs(b) * mult * math.exp(-b * b) for b, mult in entries)
    return HeatTraceModel(
        evaluator=evaluator,
        expansion=AdmissibleExpansion(terms=tuple(sorted(terms.items())), decay_rate=rate),
        decay_bound=h1 * math.exp(rate),
        remainder=remainder,
        label=label or "signed",
    )


def circle_dirac_trace_model(a: float) -> HeatTraceModel:
    """Tr B e^{-t B^2} for the circle operator with spectrum {k + a : k in Z}.

    Poisson summation kills every power of t, so the expansion is empty and
    the associated Mellin integral converges directly at the origin.
    """
    frac = a % 1.0
    if abs(frac) < 1e-14:
        raise DomainError("a must not be an integer (zero mode)")
    rate = min(frac, 1.0 - frac) ** 2

    def evaluator(t: float, tol: float) -> complex:
        return first_moment_sum(a, t, tol)

    h1 = abs(first_moment_sum(a, 1.0, 1e-13))
    # modest cap: |h(t)| <= sum |k+a| e^{-(k+a)^2 t} <= C e^{-rate t} for t>=1
    cap = math.fsum(abs(k + a) * math.exp(-((k + a) ** 2 - rate)) for k in range(-40, 41))
    return HeatTraceModel(
        evaluator=evaluator,
        expansion=AdmissibleExpansion(terms=(), decay_rate=rate),
        decay_bound=max(h1 * math.exp(rate), cap),
        remainder=evaluator,
        label=f"dirac(a={a})",
    )


# ---------------------------------------------------------------------------
# Weighted evaluation API
# ---------------------------------------------------------------------------

def eval_weighted_trace(spec: GradedSpectrum, weight: Callable[[int], complex],
                        t: float, tol: float) -> complex:
    """sum_q w(q) sum_entries mult * e^{-t lambda}, kernel excluded, |error| < tol."""
    if t <= 0.0:
        raise DomainError("t must be positive")
    if tol <= 0.0:
        raise DomainError("tol must be positive")
    degs = [q for q in spec.degrees if weight(q) != 0]
    if not degs:
        return 0.0
    per = tol / len(degs)
    total = 0j
    for q in degs:
        w = weight(q)
        sub = spec.per_degree[q]
        value = 0j
        for fam in sub.lattices:
            value += fam.weight * theta_sum(fam.radius, fam.alpha, t,
                                            per / (max(abs(w), 1e-30) * max(len(sub.lattices), 1)),
                                            exclude_kernel=fam.has_kernel)
        value += math.fsum(mult * math.exp(-t * lam) for lam, mult in sub.entries)
        total += w * value
    return total


WEIGHTS: dict[str, Callable[[int], complex]] = {
    "ones": lambda q: 1.0,
    "euler": lambda q: float((-1) ** q),
    "torsion": lambda q: float((-1) ** q * q),
}
