"""Continuation tests against Hurwitz-zeta and closed-form oracles.

Oracle identities used here (computed independently via mpmath):

* circle determinant: zeta(s) = zeta_H(2s, a) + zeta_H(2s, 1-a), so
  log det = -2 [zeta_H'(0, a) + zeta_H'(0, 1-a)] = log(4 sin^2 pi a);
* circle with trivial holonomy: log det' = 2 log(2 pi r) via the Riemann zeta;
* circle torsion: log T = log(2 |sin pi a|);
* eta: eta(0) = zeta_H(0, a) - zeta_H(0, 1-a) = 1 - 2a.
"""

import math

import mpmath as mp
import pytest

from heatzeta.errors import CapabilityError, DomainError
from heatzeta.mellin import (
    circle_eta,
    continue_zeta,
    eta_invariant,
    eta_variation_coefficient,
    eta_variation_smooth,
    log_det,
    log_torsion,
    mellin_residue_check,
    variation_coefficient,
)
from heatzeta.geometry import CircleFactor
from heatzeta.spectral import (
    AdmissibleExpansion,
    GradedSpectrum,
    HeatTraceModel,
    Spectrum,
    circle_dirac_trace_model,
    circle_spectrum,
    spectrum_trace_model,
)

mp.mp.dps = 40
TOL = 1e-10


def hurwitz_logdet(alpha: float) -> float:
    """-zeta'(0) for the circle Laplacian, via the Hurwitz oracle."""
    d = mp.zeta(mp.mpf(0), mp.mpf(alpha), 1) + mp.zeta(mp.mpf(0), mp.mpf(1 - alpha), 1)
    return float(-2 * d)


class TestContinueZeta:
    def test_exponential_model_is_constant_one(self):
        model = spectrum_trace_model(Spectrum(entries=((1.0, 1),)))
        res = continue_zeta(model, TOL)
        assert res.value_at_0 == 1.0
        assert abs(res.derivative_at_0) < 1e-12
        # zeta(s) = 1 for every s away from the Mellin poles
        for s in (0.7, 2.0, -0.3 + 0.4j):
            assert abs(res.evaluator(s) - 1.0) < 1e-9

    def test_scaled_exponential(self):
        # h = e^{-2t}: zeta(s) = 2^{-s}
        model = spectrum_trace_model(Spectrum(entries=((2.0, 1),)))
        res = continue_zeta(model, TOL)
        assert res.value_at_0 == 1.0
        assert abs(res.derivative_at_0 + math.log(2.0)) < 1e-11

    @pytest.mark.parametrize("alpha,expected", [
        (0.25, 0.0), (0.5, 0.0),
    ])
    def test_circle_value_at_zero(self, alpha, expected):
        # odd dimension, trivial kernel: zeta(0) = 0
        model = spectrum_trace_model(circle_spectrum(1.0, alpha))
        res = continue_zeta(model, TOL)
        assert res.value_at_0 == expected

    def test_value_at_zero_with_kernel(self):
        model = spectrum_trace_model(circle_spectrum(1.0, 0.0))
        assert continue_zeta(model, TOL).value_at_0 == -1.0

    def test_residue_recovery_by_contour(self):
        model = spectrum_trace_model(circle_spectrum(1.0, 0.25))
        recovered = mellin_residue_check(model, 0.5, TOL)
        assert abs(recovered - math.sqrt(math.pi)) < 1e-8

    def test_missing_decay_rate(self):
        model = HeatTraceModel(
            evaluator=lambda t, tol: 1.0,
            expansion=AdmissibleExpansion(terms=((0.0, 1.0),), decay_rate=0.0),
            decay_bound=1.0,
        )
        with pytest.raises(CapabilityError):
            continue_zeta(model, TOL)

    def test_evaluator_refuses_poles(self):
        model = spectrum_trace_model(circle_spectrum(1.0, 0.25))
        res = continue_zeta(model, TOL)
        with pytest.raises(DomainError):
            res.evaluator(0.5 + 1e-12)

    def test_zero_model_returns_all_zero(self):
        from heatzeta.spectral import zero_model
        res = continue_zeta(zero_model(), TOL)
        assert res.value_at_0 == 0.0
        assert res.derivative_at_0 == 0.0
        assert res.residues == ()
        assert res.evaluator(0.7) == 0.0

    def test_residue_recovery_at_second_pole(self):
        # h = e^{-2t}: Mellin poles at s = -j with residue (-2)^j / j!
        model = spectrum_trace_model(Spectrum(entries=((2.0, 1),)))
        assert abs(mellin_residue_check(model, -1.0, TOL) - (-2.0)) < 1e-7
        assert abs(mellin_residue_check(model, -2.0, TOL) - 2.0) < 1e-7


class TestLogDet:
    @pytest.mark.parametrize("alpha", [0.1, 0.25, 0.5, 0.7])
    def test_circle_against_hurwitz(self, alpha):
        value = log_det(circle_spectrum(1.0, alpha), TOL)
        closed = math.log(4.0 * math.sin(math.pi * alpha) ** 2)
        assert abs(value - hurwitz_logdet(alpha)) < 1e-8
        assert abs(value - closed) < 1e-8

    def test_trivial_holonomy_against_riemann(self):
        # log det' = 2 log(2 pi r); kernel exclusion exercised
        for r in (1.0, 2.0):
            value = log_det(circle_spectrum(r, 0.0), TOL)
            assert abs(value - 2.0 * math.log(2.0 * math.pi * r)) < 1e-8

    def test_finite_spectrum(self):
        assert abs(log_det(Spectrum(entries=((1.0, 2),)), TOL)) < 1e-11

    def test_scaling_law(self):
        # zeta_c(s) = c^{-s} zeta(s) => log det shifts by zeta(0) log c
        spec = Spectrum(entries=((1.0, 2),))
        base = log_det(spec, TOL)
        for c in (0.5, 2.0):
            assert abs(log_det(spec.scaled(c), TOL) - base - 2.0 * math.log(c)) < 1e-10
        # circle with zeta(0) = 0 is scale invariant
        circ_base = log_det(circle_spectrum(1.0, 0.25), TOL)
        for c in (0.5, 2.0):
            scaled = log_det(circle_spectrum(1.0, 0.25).scaled(c), TOL)
            assert abs(scaled - circ_base) < 1e-9

    def test_large_eigenvalues_reduced_by_scaling(self):
        # the expansion route would lose ~e^lambda eps; the scaling reduction
        # keeps the determinant exact
        spec = Spectrum(entries=((1.0, 1), (55.0, 2)))
        assert abs(log_det(spec, TOL) - 2.0 * math.log(55.0)) < 1e-9
        with pytest.raises(CapabilityError):
            spectrum_trace_model(spec)  # the raw model refuses to silently degrade


class TestLogTorsion:
    @pytest.mark.parametrize("alpha,expected", [
        (0.5, math.log(2.0)),
        (1.0 / 6.0, 0.0),
        (0.25, 0.5 * math.log(2.0)),
    ])
    def test_circle_torsion_values(self, alpha, expected):
        spec = CircleFactor(1.0, alpha).graded_spectrum()
        assert abs(log_torsion(spec, TOL) - expected) < 1e-9

    def test_metric_independence_across_radii(self):
        values = [log_torsion(CircleFactor(r, 0.5).graded_spectrum(), TOL)
                  for r in (0.7, 1.0, 1.3)]
        assert max(values) - min(values) < 1e-9
        assert abs(values[1] - math.log(2.0)) < 1e-9


class TestEta:
    @pytest.mark.parametrize("a", [0.25, 0.5, 0.9])
    def test_circle_eta_values(self, a):
        oracle = float(mp.zeta(0, mp.mpf(a)) - mp.zeta(0, mp.mpf(1 - a)))
        assert abs(oracle - (1.0 - 2.0 * a)) < 1e-25  # oracle self-check
        assert abs(circle_eta(a, TOL) - (1.0 - 2.0 * a)) < 1e-9

    def test_cauchy_stability_under_tol_halving(self):
        a = 0.3
        coarse = circle_eta(a, 1e-8)
        fine = circle_eta(a, 5e-9)
        assert abs(coarse - fine) < 1e-8

    def test_finite_signed_spectrum(self):
        # B eigenvalues {-1, 2, 3}: eta(0) = sum of signs = 1
        spec = GradedSpectrum(
            per_degree=(Spectrum(entries=((1.0, 1), (4.0, 1), (9.0, 1))),),
            signs=((-1, 1, 1),),
        )
        assert abs(eta_invariant(spec, TOL) - 1.0) < 1e-9

    def test_signs_required(self):
        spec = GradedSpectrum(per_degree=(Spectrum(entries=((1.0, 1),)),))
        with pytest.raises(CapabilityError):
            eta_invariant(spec, TOL)

    def test_large_signed_spectrum_reduced_by_scaling(self):
        # B in {-5, 30, 31}; eta(0) = 1 and is invariant under B -> B/sqrt(c)
        spec = GradedSpectrum(
            per_degree=(Spectrum(entries=((25.0, 1), (900.0, 1), (961.0, 1))),),
            signs=((-1, 1, 1),),
        )
        assert abs(eta_invariant(spec, 1e-9) - 1.0) < 1e-7


class TestVariationCoefficients:
    def test_circle_family_coefficient(self):
        # Tr e^{-t B^2} for the circle: single t^{-1/2} term sqrt(pi)
        model = spectrum_trace_model(circle_spectrum(1.0, 0.3))
        assert abs(variation_coefficient(model, -0.5) - math.sqrt(math.pi)) < 1e-14
        assert variation_coefficient(model, 0.25) == 0.0

    def test_kernel_correction_at_zero(self):
        model = spectrum_trace_model(circle_spectrum(1.0, 0.0))
        assert variation_coefficient(model, 0.0) == -1.0

    def test_torsion_t0_vanishes_odd_acyclic(self):
        # degree-weighted circle trace has no t^0 term and no kernel
        from heatzeta.spectral import graded_trace_model
        spec = CircleFactor(1.0, 0.5).graded_spectrum()
        model = graded_trace_model(spec, lambda q: float((-1) ** q * q))
        assert variation_coefficient(model, 0.0) == 0.0

    def test_eta_variation_sign_and_magnitude(self):
        # family B + u: |d eta/du| = 2; smooth derivative is -2 on a
        # crossing-free interval (adopted orientation convention)
        model = spectrum_trace_model(circle_spectrum(1.0, 0.3))
        formula = eta_variation_coefficient(model)
        assert abs(formula - 2.0) < 1e-12
        a0, delta = 0.3, 1e-3
        fd = (circle_eta(a0 + delta, TOL) - circle_eta(a0 - delta, TOL)) / (2 * delta)
        assert abs(abs(fd) - abs(formula)) < 1e-4
        assert abs(fd - eta_variation_smooth(model)) < 1e-4

    def test_dirac_model_expansion_empty(self):
        model = circle_dirac_trace_model(0.25)
        assert model.expansion.terms == ()
        assert variation_coefficient(model, -0.5) == 0.0
