"""Named verification suites behind the CLI ``verify`` task.

Each suite returns a list of check records {name, passed, detail...}; a run
passes when every record passes.  Tolerances are pinned here, not configurable
per check, so a green suite always means the same thing.
"""

from __future__ import annotations

import math

import numpy as np

from . import matrixmodel as mm
from .errors import AccuracyError
from .geometry import (
    CircleFactor,
    Reflection,
    Rotation,
    TorusFactor,
    factor_trace_model,
    klein_bottle_quotient,
    quotient_weighted_trace,
    reflection_fixed_point_phases,
    trivial_quotient,
)
from .mellin import (
    continue_zeta,
    eta_variation_coefficient,
    eta_variation_smooth,
    log_torsion,
    mellin_residue_check,
    circle_eta,
)
from .multizeta import continue_multizeta, multi_torsion, separable_mixed_oracle
from .spectral import (
    WEIGHTS,
    GradedSpectrum,
    Spectrum,
    circle_spectrum,
    poisson_dual_eval,
    spectrum_trace_model,
    theta_sum_direct,
)

LOG2 = math.log(2.0)


def fit_power_decay(ts, values, floor: float = 1e-13) -> float:
    """Least-squares exponent p of |v| ~ C t^p on a log grid.

    Signals below ``floor`` everywhere decay faster than any power here;
    report +inf for that degenerate (exact-to-rounding) case.
    """
    mags = np.abs(np.asarray(values, dtype=complex))
    if mags.max(initial=0.0) < floor:
        return math.inf
    keep = mags > floor
    if keep.sum() < 2:
        return math.inf
    slope, _ = np.polyfit(np.log(np.asarray(ts)[keep]), np.log(mags[keep]), 1)
    return float(slope)


def _check(name: str, passed: bool, **detail) -> dict:
    rec = {"name": name, "passed": bool(passed)}
    rec.update(detail)
    return rec


# ---------------------------------------------------------------------------
# Suites
# ---------------------------------------------------------------------------

def suite_dualrep(tol: float = 1e-10, seed: int = 0) -> list[dict]:
    checks = []
    worst = 0.0
    for t in np.logspace(-3, 3, 25):
        direct = theta_sum_direct(1.0, 0.25, float(t), tol)
        dual = poisson_dual_eval(1.0, 0.25, float(t), tol)
        worst = max(worst, abs(direct - dual))
    checks.append(_check("theta-direct-vs-dual", worst < 2.0 * tol, max_gap=worst))

    # scaling covariance: radius c*r equals t -> t/c^2
    worst = 0.0
    for t in (0.3, 1.0, 4.0):
        lhs = poisson_dual_eval(2.0, 0.3, t, tol)
        rhs = poisson_dual_eval(1.0, 0.3, t / 4.0, tol)
        worst = max(worst, abs(lhs - rhs))
    checks.append(_check("radius-covariance", worst < 2.0 * tol, max_gap=worst))

    # kernel exclusion never changes the weighted trace
    base = Spectrum(entries=((1.0, 2), (3.0, 1)))
    bumped = Spectrum(entries=((1.0, 2), (3.0, 1)), kernel_dim=4)
    g1 = GradedSpectrum(per_degree=(base,))
    g2 = GradedSpectrum(per_degree=(bumped,))
    from .spectral import eval_weighted_trace
    gap = max(abs(eval_weighted_trace(g1, WEIGHTS["ones"], t, tol)
                  - eval_weighted_trace(g2, WEIGHTS["ones"], t, tol)) for t in (0.1, 1.0, 7.0))
    checks.append(_check("kernel-exclusion-invariance", gap == 0.0, max_gap=gap))
    return checks


def suite_mellin(tol: float = 1e-10, seed: int = 0) -> list[dict]:
    checks = []
    models = {
        "exp": spectrum_trace_model(Spectrum(entries=((1.0, 1),)), label="exp"),
        "circle-0.25": spectrum_trace_model(circle_spectrum(1.0, 0.25), label="circle"),
        "circle-0.5": spectrum_trace_model(circle_spectrum(1.0, 0.5), label="circle"),
        "circle-kernel": spectrum_trace_model(circle_spectrum(1.0, 0.0), label="circle0"),
    }
    for name, model in models.items():
        res = continue_zeta(model, tol)
        stored = model.expansion.coeff(0.0) - model.expansion.kernel_trace
        exact = res.value_at_0 == stored
        # quadrature route: Richardson-extrapolated symmetric evaluation
        sym = lambda d: 0.5 * (res.evaluator(d) + res.evaluator(-d))
        quad_route = (4.0 * sym(5e-4) - sym(1e-3)) / 3.0
        gap = abs(quad_route - res.value_at_0)
        checks.append(_check(f"zeta0-identity[{name}]", exact and gap < tol,
                             value=float(np.real(res.value_at_0)), quad_gap=float(gap)))

    model = models["circle-0.25"]
    residue = mellin_residue_check(model, 0.5, tol)
    target = model.expansion.coeff(-0.5)
    checks.append(_check("mellin-residue", abs(residue - target) < 1e-6,
                         recovered=float(np.real(residue)), stored=float(np.real(target))))

    # spectral scaling: zeta_c(s) = c^-s zeta(s) => logdet shifts by zeta(0) log c
    from .mellin import log_det
    spec = Spectrum(entries=((1.0, 2),))
    base = log_det(spec, tol)
    ok = True
    for c in (0.5, 2.0):
        shifted = log_det(spec.scaled(c), tol)
        expect = base + 2.0 * math.log(c)  # zeta(0) = 2 here
        ok = ok and abs(shifted - expect) < 100 * tol
    checks.append(_check("scaling-law", ok))

    # torsion two-route agreement is enforced inside log_torsion
    val = log_torsion(CircleFactor(1.0, 0.5).graded_spectrum(), tol)
    checks.append(_check("torsion-two-routes", abs(val - LOG2) < 1e-8, value=val))
    return checks


def _separable_cases(tol: float):
    from .multizeta import SeparableTerm, from_separable

    def exp_model(rate: float):
        return spectrum_trace_model(Spectrum(entries=((rate, 1),)), label=f"exp{rate}")

    def circle_torsion(r: float, alpha: float):
        return factor_trace_model(CircleFactor(r, alpha), Rotation(0.0), WEIGHTS["torsion"])

    klein = klein_bottle_quotient(1.0)
    cases = {
        "exp-x-exp": from_separable([SeparableTerm("id", exp_model(1.0), exp_model(1.0), 1.0)]),
        "exp-x-exp2": from_separable([SeparableTerm("id", exp_model(1.0), exp_model(2.0), 1.0)]),
        "circle-x-circle": from_separable(
            [SeparableTerm("id", circle_torsion(1.0, 0.5), circle_torsion(1.0, 0.5), 1.0)]),
        "circle-x-exp": from_separable(
            [SeparableTerm("id", circle_torsion(1.0, 0.25), exp_model(1.0), 1.0)]),
        "klein-sum": quotient_weighted_trace(klein, WEIGHTS["torsion"], WEIGHTS["torsion"]),
    }
    return cases


def suite_multizeta(tol: float = 1e-8, seed: int = 0) -> list[dict]:
    checks = []
    for name, data in _separable_cases(tol).items():
        res = continue_multizeta(data, tol)
        oracle = separable_mixed_oracle(data.separable_form, tol)
        gap = abs(res.mixed_at_origin - oracle)
        checks.append(_check(f"separable-oracle[{name}]", gap < 2e-6,
                             mixed=float(np.real(res.mixed_at_origin)), gap=float(gap)))

    # vanishing clause: rotation-twisted factor 1 has an empty t1 expansion
    from .multizeta import SeparableTerm, from_separable
    rot = factor_trace_model(CircleFactor(1.0, 0.5), Rotation(math.pi, phase=-1j), WEIGHTS["torsion"])
    tors = factor_trace_model(CircleFactor(1.0, 0.5), Rotation(0.0), WEIGHTS["torsion"])
    data = from_separable([SeparableTerm("rot", rot, tors, 1.0)])
    res = continue_multizeta(data, tol)
    checks.append(_check("no-t1-terms-kills-ds2", abs(res.ds2_at_origin) < 1e-8,
                         ds2=float(np.real(res.ds2_at_origin))))
    return checks


def suite_evenvanish(tol: float = 1e-8, seed: int = 0) -> list[dict]:
    checks = []
    torus = TorusFactor(1.0, 0.25, 0.5)
    circle = CircleFactor(1.0, 0.5)
    geom = trivial_quotient(torus, circle)

    # pointwise: Tr (-1)^Q Q2 e^{-Delta(t1,t2)} assembled from per-degree thetas
    worst = 0.0
    for t1 in np.linspace(0.4, 2.0, 5):
        th1 = float(np.real(theta_sum_direct(1.0, torus.alpha, float(t1), 1e-13)
                            * theta_sum_direct(1.0, torus.beta, float(t1), 1e-13)))
        for t2 in np.linspace(0.4, 2.0, 5):
            th2 = float(np.real(theta_sum_direct(1.0, circle.alpha, float(t2), 1e-13)))
            total = 0.0
            for q1, mult in enumerate(torus.degree_mults):
                for q2 in (0, 1):
                    total += ((-1) ** (q1 + q2)) * q2 * mult * th1 * th2
            worst = max(worst, abs(total))
    checks.append(_check("even-factor-integrand-zero", worst < 1e-10, max_abs=worst))

    data = quotient_weighted_trace(geom, WEIGHTS["torsion"], WEIGHTS["torsion"])
    mt = multi_torsion(data, tol)
    checks.append(_check("even-factor-mt-zero", abs(mt) < 1e-5, value=mt))
    return checks


def suite_fixedpoint(tol: float = 1e-10, seed: int = 0) -> list[dict]:
    checks = []
    for alpha, phase in ((0.0, 1.0), (0.5, 1.0), (0.5, -1.0)):
        factor = CircleFactor(1.0, alpha)
        refl = Reflection(0.3, phase)
        eps1, eps2 = reflection_fixed_point_phases(factor, refl)
        # Lefschetz reading: t^0 coefficient on 0-forms is (eps1 + eps2)/2
        model0 = factor_trace_model(factor, refl, lambda q: 1.0 if q == 0 else 0.0)
        stored = model0.expansion.coeff(0.0)
        gap = abs(stored - (eps1 + eps2) / 2.0)
        checks.append(_check(f"reflection-t0[alpha={alpha},eps={phase}]", gap < 1e-12,
                             coefficient=str(stored), phases=str((eps1, eps2))))

        # remainder after removing t^0 decays at least like t^(1/2)
        model = factor_trace_model(factor, refl, WEIGHTS["torsion"])
        ts = np.logspace(-4, -1, 13)
        resid = [model.evaluator(float(t), 1e-13) + model.expansion.kernel_trace
                 - model.expansion.coeff(0.0) for t in ts]
        expo = fit_power_decay(ts, resid)
        checks.append(_check(f"reflection-decay[alpha={alpha},eps={phase}]", expo >= 0.45,
                             exponent=expo if math.isfinite(expo) else "inf"))

    # rotation-twisted trace has no t^0 term: it tends to 0 as t -> 0
    rot_model = factor_trace_model(CircleFactor(1.0, 0.5), Rotation(math.pi, phase=-1j),
                                   WEIGHTS["ones"])
    small = max(abs(rot_model.evaluator(t, 1e-13)) for t in (1e-3, 1e-2))
    checks.append(_check("rotation-no-t0", small < 1e-10, max_small_t=small))
    return checks


def suite_index(tol: float = 1e-10, seed: int = 0) -> list[dict]:
    checks = []
    t_grid = [0.25, 0.7, 1.0, 2.5, 6.0]
    cases = {
        "two-term": (mm.GradedComplex((2, 1), (np.array([[1.0 + 0j, 0.0]]),)), 1),
        "acyclic": (mm.random_acyclic_complex([2, 2], seed=seed + 1), 0),
        "betti": (mm.random_graded_complex([2, 1], betti=[1, 0, 2], seed=seed + 2), 3),
    }
    for name, (cx, expected) in cases.items():
        fam = mm.exp_metric_family(cx, 1, seed=seed + 5)
        ok, dev = True, 0.0
        for u in (-0.3, 0.0, 0.4):
            rep = mm.index_mckean_singer(cx, fam.h([u]), t_grid)
            ok = ok and rep["constant"] and rep["index"] == expected
            dev = max(dev, rep["max_deviation"])
        checks.append(_check(f"mckean-singer[{name}]", ok, index=expected, max_deviation=dev))
    return checks


def _closedness_order(values: dict[float, float], noise_floor: float = 1e-10) -> float:
    steps = sorted(values, reverse=True)
    a, b = values[steps[0]], values[steps[1]]
    if max(a, b) < noise_floor:
        return math.inf  # exact to rounding at every step
    if b == 0.0:
        return math.inf
    return math.log2(a / b)


def suite_closedness(tol: float = 1e-10, seed: int = 0) -> list[dict]:
    checks = []
    u0 = [0.35, -0.3, 0.25]

    hf = mm.HermitianFamily(5, 2, seed=seed + 11, scale=0.9)
    form_eta = lambda u, i: mm.omega_asymmetry(hf, u, i)
    vals = {s: abs(mm.exterior_derivative_1(form_eta, u0[:2], 0, 1, s)) for s in (4e-3, 2e-3, 1e-4)}
    order = _closedness_order({s: vals[s] for s in (4e-3, 2e-3)})
    checks.append(_check("closed-asymmetry-form", vals[1e-4] <= 1e-6 and order >= 1.9,
                         residual_at_1e4=vals[1e-4], order=order))

    cx = mm.random_acyclic_complex([2, 2], seed=seed + 12)
    fam = mm.exp_metric_family(cx, 2, seed=seed + 13, scale=0.9)
    form_t = lambda u, i: mm.omega_torsion(fam, u, i)
    vals = {s: abs(mm.exterior_derivative_1(form_t, u0[:2], 0, 1, s)) for s in (4e-3, 2e-3, 1e-4)}
    order = _closedness_order({s: vals[s] for s in (4e-3, 2e-3)})
    checks.append(_check("closed-torsion-form", vals[1e-4] <= 1e-6 and order >= 1.9,
                         residual_at_1e4=vals[1e-4], order=order))

    cx1 = mm.random_acyclic_complex([2, 1], seed=seed + 14)
    cx2 = mm.random_acyclic_complex([2], seed=seed + 15)
    pf = mm.ProductFamily(mm.exp_metric_family(cx1, 2, seed=seed + 16, scale=1.2),
                          mm.exp_metric_family(cx2, 1, seed=seed + 17, scale=1.2))
    for z in (-1.0, complex(-1.0, 2.0), complex(0.0, 5.0)):
        form2 = lambda u, i, j, z=z: pf.omega_tilde_mt(u, i, j, z, 2)
        vals = {s: abs(mm.exterior_derivative_2(form2, u0, 0, 1, 2, s)) for s in (4e-3, 2e-3, 1e-4)}
        order = _closedness_order({s: vals[s] for s in (4e-3, 2e-3)})
        checks.append(_check(f"closed-two-variable-form[z={z}]",
                             vals[1e-4] <= 1e-6 and order >= 1.9,
                             residual_at_1e4=vals[1e-4], order=order))
    return checks


def suite_variation(tol: float = 1e-10, seed: int = 0) -> list[dict]:
    checks = []

    # closed-form 1x1 complex: log T = log|d| + u, slope exactly 1
    cx1 = mm.GradedComplex((1, 1), (np.array([[1.0 + 0j]]),))
    fam = mm.MetricFamily(
        cx1, 1,
        lambda u: [np.eye(1, dtype=complex), np.array([[math.exp(2.0 * u[0])]], dtype=complex)],
        lambda u, i: [np.zeros((1, 1), dtype=complex),
                      np.array([[2.0 * math.exp(2.0 * u[0])]], dtype=complex)],
    )
    rep = mm.torsion_variation_check(fam, [0.0, 0.3], fd_step=1e-4)
    checks.append(_check("variation-closed-form", rep["max_discrepancy"] < 1e-9,
                         max_discrepancy=rep["max_discrepancy"]))

    for k, ranks in enumerate(([2, 2], [3, 1], [2, 1, 2])):
        cx = mm.random_acyclic_complex(ranks, seed=seed + 21 + k)
        famk = mm.exp_metric_family(cx, 1, seed=seed + 31 + k, scale=0.7)
        rep = mm.torsion_variation_check(famk, [-0.2, 0.0, 0.25], fd_step=1e-4)
        checks.append(_check(f"variation-seeded[{k}]", rep["max_discrepancy"] < 1e-6,
                             max_discrepancy=rep["max_discrepancy"]))

    # constant metric: both sides vanish
    cx = mm.random_acyclic_complex([2, 2], seed=seed + 41)
    rep = mm.torsion_variation_check(mm.constant_metric_family(cx), [0.0], fd_step=1e-4)
    checks.append(_check("variation-constant-metric", rep["max_discrepancy"] < 1e-10,
                         max_discrepancy=rep["max_discrepancy"]))

    # eta variation: finite difference of the circle eta against the local formula
    a0, delta = 0.3, 1e-3
    fd = (circle_eta(a0 + delta, 1e-10) - circle_eta(a0 - delta, 1e-10)) / (2.0 * delta)
    model = spectrum_trace_model(circle_spectrum(1.0, a0))
    formula = eta_variation_coefficient(model)
    smooth = eta_variation_smooth(model)
    checks.append(_check("eta-variation",
                         abs(abs(fd) - abs(formula)) < 1e-4 and abs(fd - smooth) < 1e-4,
                         finite_difference=fd, formula_magnitude=formula))
    return checks


def suite_adjoint(tol: float = 1e-10, seed: int = 0) -> list[dict]:
    checks = []
    rep = mm.adjoint_trace_identities_check(seed=seed)
    checks.append(_check("trace-adjoint-identities", rep["passed"], **{
        k: v for k, v in rep.items() if k != "passed"}))

    cx = mm.random_acyclic_complex([2, 2], seed=seed + 3)
    fam = mm.exp_metric_family(cx, 2, seed=seed + 4)
    gap = max(mm.b_symmetry_gap(fam, u) for u in ([0.0, 0.0], [0.3, -0.2]))
    checks.append(_check("b-symmetric", gap < 1e-12, max_gap=gap))

    dgap = max(mm.adjoint_derivative_identity_gap(fam, u) for u in ([0.0, 0.0], [0.2, 0.1]))
    checks.append(_check("adjoint-derivative-commutator", dgap < 1e-6, max_gap=dgap))

    hs = fam.h([0.1, -0.1])
    rep = mm.scaling_curve_check(cx, hs, 1.7)
    checks.append(_check("scaling-curve", rep["passed"],
                         b_gap=rep["b_gap"], laplacian_gap=rep["laplacian_gap"]))
    return checks


SUITES = {
    "dualrep": suite_dualrep,
    "mellin": suite_mellin,
    "multizeta": suite_multizeta,
    "evenvanish": suite_evenvanish,
    "fixedpoint": suite_fixedpoint,
    "index": suite_index,
    "closedness": suite_closedness,
    "variation": suite_variation,
    "adjoint": suite_adjoint,
}


def run_suite(name: str, tol: float = 1e-10, seed: int = 0) -> list[dict]:
    if name == "all":
        out = []
        for key in SUITES:
            out.extend(run_suite(key, tol, seed))
        return out
    try:
        fn = SUITES[name]
    except KeyError as exc:
        raise AccuracyError(f"unknown verify suite {name!r}") from exc
    return fn(tol=tol, seed=seed)
