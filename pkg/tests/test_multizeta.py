"""Two-variable continuation tests.

The quadrant-split generic path is checked against the separable product
oracle  zeta(s1, s2) = sum_g w_g zeta1_g(s1) zeta2_g(s2), whose derivatives
at the origin follow from the one-variable module.
"""

import math

import numpy as np
import pytest

from heatzeta.errors import CapabilityError
from heatzeta.geometry import (
    CircleFactor,
    Rotation,
    factor_trace_model,
    klein_bottle_quotient,
    quotient_weighted_trace,
    trivial_quotient,
)
from heatzeta.multizeta import (
    SeparableTerm,
    continue_multizeta,
    from_separable,
    multi_torsion,
    separable_mixed_oracle,
)
from heatzeta.spectral import WEIGHTS, Spectrum, spectrum_trace_model

TOL = 1e-8
LOG2 = math.log(2.0)


def exp_model(rate: float):
    return spectrum_trace_model(Spectrum(entries=((rate, 1),)), label=f"exp{rate}")


def circle_torsion_model(r: float, alpha: float):
    return factor_trace_model(CircleFactor(r, alpha), Rotation(0.0), WEIGHTS["torsion"])


class TestProductIdentities:
    def test_exp_x_exp(self):
        data = from_separable([SeparableTerm("id", exp_model(1.0), exp_model(1.0), 1.0)])
        res = continue_multizeta(data, TOL)
        assert res.value_at_origin == 1.0
        assert abs(res.ds1_at_origin) < 1e-10
        assert abs(res.ds2_at_origin) < 1e-10
        assert abs(res.mixed_at_origin) < 1e-10

    def test_exp_x_exp2_closed_form(self):
        # zeta(s1, s2) = 2^{-s2}: value 1, ds2 = -log 2, ds1 = 0, mixed = 0
        data = from_separable([SeparableTerm("id", exp_model(1.0), exp_model(2.0), 1.0)])
        res = continue_multizeta(data, TOL)
        assert res.value_at_origin == 1.0
        assert abs(res.ds2_at_origin + LOG2) < 1e-9
        assert abs(res.ds1_at_origin) < 1e-9
        assert abs(res.mixed_at_origin) < 1e-9

    def test_two_circle_torsion_kernel(self):
        data = from_separable([SeparableTerm(
            "id", circle_torsion_model(1.0, 0.5), circle_torsion_model(1.0, 0.5), 1.0)])
        res = continue_multizeta(data, TOL)
        assert abs(res.mixed_at_origin - 4.0 * LOG2 ** 2) < 1e-7
        assert res.value_at_origin == 0.0

    @pytest.mark.parametrize("case", ["exp-x-exp", "exp-x-exp2", "circle-x-circle",
                                      "circle-x-exp", "klein-sum"])
    def test_generic_path_matches_product_oracle(self, case):
        datasets = {
            "exp-x-exp": from_separable(
                [SeparableTerm("id", exp_model(1.0), exp_model(1.0), 1.0)]),
            "exp-x-exp2": from_separable(
                [SeparableTerm("id", exp_model(1.0), exp_model(2.0), 1.0)]),
            "circle-x-circle": from_separable(
                [SeparableTerm("id", circle_torsion_model(1.0, 0.5),
                               circle_torsion_model(1.0, 0.5), 1.0)]),
            "circle-x-exp": from_separable(
                [SeparableTerm("id", circle_torsion_model(1.0, 0.25), exp_model(1.0), 1.0)]),
            "klein-sum": quotient_weighted_trace(
                klein_bottle_quotient(1.0), WEIGHTS["torsion"], WEIGHTS["torsion"]),
        }
        data = datasets[case]
        res = continue_multizeta(data, TOL)
        oracle = separable_mixed_oracle(data.separable_form, TOL)
        assert abs(res.mixed_at_origin - oracle) < 2e-6


class TestStructuralInvariants:
    def test_value_at_origin_is_stored_coefficient(self):
        data = from_separable([SeparableTerm("id", exp_model(1.0), exp_model(3.0), 2.0)])
        assert continue_multizeta(data, TOL).value_at_origin == data.coeff(0.0, 0.0) == 2.0

    def test_separable_evaluator_consistency_on_grid(self):
        data = quotient_weighted_trace(klein_bottle_quotient(1.0),
                                       WEIGHTS["torsion"], WEIGHTS["torsion"])
        for t1 in (0.3, 1.0, 2.0):
            for t2 in (0.5, 1.5):
                direct = data.evaluator(t1, t2, 1e-12)
                summed = sum(term.weight * term.factor1.evaluator(t1, 1e-13)
                             * term.factor2.evaluator(t2, 1e-13)
                             for term in data.separable_form)
                assert abs(direct - summed) < 1e-11

    def test_ma4_bound_on_grid(self):
        data = quotient_weighted_trace(klein_bottle_quotient(1.0),
                                       WEIGHTS["torsion"], WEIGHTS["torsion"])
        cap, eps1, eps2 = data.ma4
        for t1 in np.linspace(1.0, 10.0, 5):
            for t2 in np.linspace(1.0, 10.0, 5):
                bound = cap * math.exp(-eps1 * t1 - eps2 * t2)
                assert abs(data.evaluator(float(t1), float(t2), 1e-12)) <= bound * (1 + 1e-9)

    def test_empty_t1_expansion_kills_ds2(self):
        rot = factor_trace_model(CircleFactor(1.0, 0.5), Rotation(math.pi, phase=-1j),
                                 WEIGHTS["torsion"])
        data = from_separable([SeparableTerm("rot", rot, circle_torsion_model(1.0, 0.5), 1.0)])
        res = continue_multizeta(data, TOL)
        assert abs(res.ds2_at_origin) < 1e-8

    def test_kernel_factors_rejected(self):
        bad = spectrum_trace_model(Spectrum(entries=((1.0, 1),), kernel_dim=1))
        with pytest.raises(CapabilityError):
            from_separable([SeparableTerm("id", bad, exp_model(1.0), 1.0)])


class TestMultiTorsion:
    def test_product_formula_half(self):
        geom = trivial_quotient(CircleFactor(1.0, 0.5), CircleFactor(1.0, 0.5))
        data = quotient_weighted_trace(geom, WEIGHTS["torsion"], WEIGHTS["torsion"])
        assert abs(multi_torsion(data, TOL) - LOG2 ** 2) < 1e-6

    def test_product_formula_sixth(self):
        geom = trivial_quotient(CircleFactor(1.0, 1.0 / 6.0), CircleFactor(1.0, 0.5))
        data = quotient_weighted_trace(geom, WEIGHTS["torsion"], WEIGHTS["torsion"])
        assert abs(multi_torsion(data, TOL)) < 1e-6

    def test_fast_path_cross_check_is_enforced(self):
        # the two paths agree within 2 tol by contract; run one case tightly
        geom = trivial_quotient(CircleFactor(1.0, 0.5), CircleFactor(1.0, 0.5))
        data = quotient_weighted_trace(geom, WEIGHTS["torsion"], WEIGHTS["torsion"])
        multi_torsion(data, 1e-9)  # raises AccuracyError on disagreement

    def test_klein_independent_of_second_factor_radius(self):
        # the reflection factor has nondegenerate fixed points and dim 1 is
        # odd, so independence holds in the second metric as well
        import dataclasses
        values = []
        for r2 in (0.8, 1.2):
            geom = klein_bottle_quotient(1.0)
            geom = dataclasses.replace(
                geom, factor2=dataclasses.replace(geom.factor2, radius=r2))
            data = quotient_weighted_trace(geom, WEIGHTS["torsion"], WEIGHTS["torsion"])
            values.append(multi_torsion(data, TOL))
        assert abs(values[0] - values[1]) < 3e-6
        assert abs(values[0] - 0.5 * LOG2 ** 2) < 1e-7
