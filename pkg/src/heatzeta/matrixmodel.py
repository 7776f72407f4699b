"""Finite-dimensional graded complexes with parameter-dependent metrics.

The testbed realizes the operator-valued differential forms concretely:
b = h^{-1} (dh), adjoints d* = h^{-1} d^dagger h, Laplacians, heat operators
and resolvents, all as dense matrices.  It verifies numerically that the
index form, the asymmetry one-form Tr (dB) e^{-B^2}, the torsion one-form
Tr' (-1)^Q e^{-Delta} b, and the two-variable resolvent two-form are closed,
and that the torsion variation matches its local trace formula.

Conventions checked empirically against closed-form cases:

* d/du log T(h(u)) = -(1/2) tr' (-1)^Q h^{-1} (dh/du) (I - P_ker); the -1/2
  normalization is the one consistent with log T = -(1/2) sum (-1)^q q
  log det' Delta_q (validated on 1x1 complexes where both sides are exact).
* heat operator from the resolvent:  e^{-A} P = (-1)^{N-1} (N-1)!
  (2 pi i)^{-1} contour integral of e^{-z} (z - A)^{-N} P dz.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from itertools import permutations
from typing import Callable, Sequence

import numpy as np
from scipy.linalg import eigh, expm, expm_frechet

from .errors import ConditioningError, DomainError, ValidationError
from .spectral import BigradedSpectrum

Array = np.ndarray


# ---------------------------------------------------------------------------
# Graded complexes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GradedComplex:
    """Chain complex 0 -> C^{n_0} -> ... -> C^{n_r} -> 0 with d_{q+1} d_q = 0."""

    dims: tuple[int, ...]
    diff: tuple[Array, ...]  # diff[q]: dims[q+1] x dims[q]

    def __post_init__(self) -> None:
        if len(self.diff) != len(self.dims) - 1:
            raise ValidationError("need one differential per adjacent degree pair")
        for q, d in enumerate(self.diff):
            if d.shape != (self.dims[q + 1], self.dims[q]):
                raise ValidationError(f"differential {q} has shape {d.shape}")
        for q in range(len(self.diff) - 1):
            prod = self.diff[q + 1] @ self.diff[q]
            scale = max(1.0, np.linalg.norm(self.diff[q + 1]) * np.linalg.norm(self.diff[q]))
            if np.linalg.norm(prod) > 1e-12 * scale:
                raise ValidationError(f"d_{q + 1} d_{q} != 0 (norm {np.linalg.norm(prod):.2e})")

    @property
    def degrees(self) -> range:
        return range(len(self.dims))

    def d(self, q: int) -> Array:
        """diff[q] when defined, else a zero map of the right shape."""
        if 0 <= q < len(self.diff):
            return self.diff[q]
        rows = self.dims[q + 1] if q + 1 < len(self.dims) else 0
        cols = self.dims[q] if 0 <= q < len(self.dims) else 0
        return np.zeros((rows, cols), dtype=complex)


def random_graded_complex(ranks: Sequence[int], betti: Sequence[int] | None = None,
                          seed: int = 0) -> GradedComplex:
    """Random complex with prescribed differential ranks and cohomology dims.

    Built from unitary frames so d_{q+1} d_q = 0 holds to rounding: in each
    degree the frame splits into (image of d_{q-1} | cohomology | coimage of
    d_q) blocks, and d_q maps the coimage block isometrically (scaled by
    random positive singular values) onto the next image block.
    """
    ranks = list(ranks)
    betti = list(betti) if betti is not None else [0] * (len(ranks) + 1)
    if len(betti) != len(ranks) + 1:
        raise ValidationError("need one cohomology dimension per degree")
    rng = np.random.default_rng(seed)
    prev = [0] + ranks
    nxt = ranks + [0]
    dims = [prev[q] + betti[q] + nxt[q] for q in range(len(betti))]
    frames = []
    for n in dims:
        m = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        qmat, _ = np.linalg.qr(m)
        frames.append(qmat)
    diffs = []
    for q, rank in enumerate(ranks):
        coimage = frames[q][:, prev[q] + betti[q]:]
        image = frames[q + 1][:, :rank]
        sing = rng.uniform(0.5, 2.0, size=rank)
        diffs.append(image @ np.diag(sing) @ coimage.conj().T)
    return GradedComplex(dims=tuple(dims), diff=tuple(diffs))


def random_acyclic_complex(ranks: Sequence[int], seed: int = 0) -> GradedComplex:
    return random_graded_complex(ranks, betti=None, seed=seed)


# ---------------------------------------------------------------------------
# Metrics, adjoints, Laplacians
# ---------------------------------------------------------------------------

class MetricFamily:
    """Smooth family of per-degree positive-definite Hermitian metrics h_q(u).

    ``h(u)`` returns the list of metric blocks, ``dh(u, i)`` their exact
    partial derivatives in parameter i.  Degrees are mutually orthogonal by
    construction (block-diagonal metric).
    """

    def __init__(self, cx: GradedComplex, nparams: int,
                 h: Callable[[Sequence[float]], list[Array]],
                 dh: Callable[[Sequence[float], int], list[Array]]):
        self.cx = cx
        self.nparams = nparams
        self.h = h
        self.dh = dh

    def b(self, u: Sequence[float], i: int) -> list[Array]:
        """Metric logarithmic derivative h^{-1} dh/du_i, one block per degree."""
        hs, dhs = self.h(u), self.dh(u, i)
        return [np.linalg.solve(hq, dq) for hq, dq in zip(hs, dhs)]


def exp_metric_family(cx: GradedComplex, nparams: int, seed: int = 0,
                      coupled: bool = True, scale: float = 0.6) -> MetricFamily:
    """h_q(u) = expm(A_q(u)) with A_q Hermitian, linear plus optional bilinear terms."""
    rng = np.random.default_rng(seed)

    def herm(n: int) -> Array:
        m = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        return scale * (m + m.conj().T) / 2.0

    lin = [[herm(n) for n in cx.dims] for _ in range(nparams)]
    pairs = [(i, j) for i in range(nparams) for j in range(i + 1, nparams)]
    cross = {p: [herm(n) for n in cx.dims] for p in pairs} if coupled else {}

    def a_blocks(u: Sequence[float]) -> list[Array]:
        out = []
        for qi, n in enumerate(cx.dims):
            acc = np.zeros((n, n), dtype=complex)
            for i in range(nparams):
                acc += u[i] * lin[i][qi]
            for (i, j), blocks in cross.items():
                acc += u[i] * u[j] * blocks[qi]
            out.append(acc)
        return out

    def da_blocks(u: Sequence[float], i: int) -> list[Array]:
        out = []
        for qi, n in enumerate(cx.dims):
            acc = lin[i][qi].copy()
            for (a, b_), blocks in cross.items():
                if a == i:
                    acc = acc + u[b_] * blocks[qi]
                elif b_ == i:
                    acc = acc + u[a] * blocks[qi]
            out.append(acc)
        return out

    def h(u: Sequence[float]) -> list[Array]:
        return [expm(aq) for aq in a_blocks(u)]

    def dh(u: Sequence[float], i: int) -> list[Array]:
        return [expm_frechet(aq, daq, compute_expm=False)
                for aq, daq in zip(a_blocks(u), da_blocks(u, i))]

    return MetricFamily(cx, nparams, h, dh)


def constant_metric_family(cx: GradedComplex, nparams: int = 1) -> MetricFamily:
    hs = [np.eye(n, dtype=complex) for n in cx.dims]
    zs = [np.zeros((n, n), dtype=complex) for n in cx.dims]
    return MetricFamily(cx, nparams, lambda u: [m.copy() for m in hs],
                        lambda u, i: [m.copy() for m in zs])


def adjoint_diffs(cx: GradedComplex, hs: Sequence[Array]) -> list[Array]:
    """d*_q = h_q^{-1} d_q^dagger h_{q+1} : E^{q+1} -> E^q."""
    out = []
    for q in range(len(cx.diff)):
        out.append(np.linalg.solve(hs[q], cx.diff[q].conj().T @ hs[q + 1]))
    return out


def laplacians(cx: GradedComplex, hs: Sequence[Array]) -> list[Array]:
    adj = adjoint_diffs(cx, hs)
    out = []
    for q in cx.degrees:
        n = cx.dims[q]
        lap = np.zeros((n, n), dtype=complex)
        if q - 1 >= 0:
            lap += cx.diff[q - 1] @ adj[q - 1]
        if q < len(cx.diff):
            lap += adj[q] @ cx.diff[q]
        out.append(lap)
    return out


def _sqrt_pair(h: Array) -> tuple[Array, Array]:
    vals, vecs = eigh(h)
    if vals.min() <= 0:
        raise ValidationError("metric block is not positive definite")
    root = vecs @ np.diag(np.sqrt(vals)) @ vecs.conj().T
    inv_root = vecs @ np.diag(1.0 / np.sqrt(vals)) @ vecs.conj().T
    return root, inv_root


def metric_eigh(lap: Array, h: Array) -> tuple[Array, Array, Array, Array]:
    """Eigendecomposition of an h-self-adjoint operator via h^{1/2} conjugation.

    Returns (eigenvalues, root, inv_root, vecs) with
    lap = inv_root @ vecs diag vecs* @ root.
    """
    root, inv_root = _sqrt_pair(h)
    sym = root @ lap @ inv_root
    sym = (sym + sym.conj().T) / 2.0
    vals, vecs = eigh(sym)
    return vals, root, inv_root, vecs


def heat_operator(cx: GradedComplex, hs: Sequence[Array], t: float) -> list[Array]:
    """Per-degree e^{-t Delta_q} via the h-weighted eigendecomposition."""
    if t < 0:
        raise DomainError("t must be nonnegative")
    out = []
    for lap, h in zip(laplacians(cx, hs), hs):
        vals, root, inv_root, vecs = metric_eigh(lap, h)
        out.append(inv_root @ vecs @ np.diag(np.exp(-t * np.clip(vals, 0.0, None))) @ vecs.conj().T @ root)
    return out


def resolvent_power(cx: GradedComplex, hs: Sequence[Array], z: complex, n_pow: int) -> list[Array]:
    """Per-degree (z - Delta_q)^{-n_pow}; refuses z within 1e-8 of the spectrum."""
    out = []
    for lap, h in zip(laplacians(cx, hs), hs):
        vals, root, inv_root, vecs = metric_eigh(lap, h)
        dist = np.abs(z - vals).min() if len(vals) else np.inf
        if dist < 1e-8:
            raise ConditioningError(f"z = {z} is within {dist:.1e} of an eigenvalue")
        out.append(inv_root @ vecs @ np.diag((z - vals) ** (-n_pow)) @ vecs.conj().T @ root)
    return out


def kernel_projectors(cx: GradedComplex, hs: Sequence[Array], cutoff: float = 1e-10) -> list[Array]:
    """h-orthogonal projectors onto ker Delta_q."""
    out = []
    for lap, h in zip(laplacians(cx, hs), hs):
        vals, root, inv_root, vecs = metric_eigh(lap, h)
        scale = max(vals.max(initial=0.0), 1.0)
        mask = np.diag((vals < cutoff * scale).astype(float))
        out.append(inv_root @ vecs @ mask @ vecs.conj().T @ root)
    return out


def log_det_prime(cx: GradedComplex, hs: Sequence[Array], cutoff: float = 1e-10) -> list[float]:
    """log of the product of nonzero eigenvalues, per degree."""
    out = []
    for lap, h in zip(laplacians(cx, hs), hs):
        vals, *_ = metric_eigh(lap, h)
        scale = max(vals.max(initial=0.0), 1.0)
        positive = vals[vals >= cutoff * scale]
        out.append(float(np.sum(np.log(positive))) if len(positive) else 0.0)
    return out


def matrix_log_torsion(cx: GradedComplex, hs: Sequence[Array]) -> float:
    """-(1/2) sum_q (-1)^q q log det' Delta_q."""
    dets = log_det_prime(cx, hs)
    return -0.5 * sum((-1) ** q * q * dets[q] for q in cx.degrees)


# ---------------------------------------------------------------------------
# Index and McKean-Singer
# ---------------------------------------------------------------------------

def supertrace_heat(cx: GradedComplex, hs: Sequence[Array], t: float) -> float:
    heats = heat_operator(cx, hs, t)
    return float(np.real(sum((-1) ** q * np.trace(hq) for q, hq in enumerate(heats))))


def index_mckean_singer(cx: GradedComplex, hs: Sequence[Array],
                        t_grid: Sequence[float]) -> dict:
    """Graded kernel index plus constancy of the supertrace over the t grid."""
    projs = kernel_projectors(cx, hs)
    index = sum((-1) ** q * int(round(np.real(np.trace(p)))) for q, p in enumerate(projs))
    euler = sum((-1) ** q * n for q, n in enumerate(cx.dims))
    values = [supertrace_heat(cx, hs, t) for t in t_grid]
    deviation = max(abs(v - index) for v in values) if values else 0.0
    return {
        "index": index,
        "euler_characteristic": euler,
        "supertrace_values": values,
        "max_deviation": deviation,
        "constant": deviation <= 1e-10,
    }


# ---------------------------------------------------------------------------
# Operator-valued one- and two-forms
# ---------------------------------------------------------------------------

def omega_index(fam: MetricFamily, u: Sequence[float]) -> float:
    """Tr (-1)^Q e^{-D^2} for D = d + d*(h(u)); locally constant in u."""
    return supertrace_heat(fam.cx, fam.h(u), 1.0)


def omega_torsion(fam: MetricFamily, u: Sequence[float], i: int) -> complex:
    """Tr' (-1)^Q e^{-Delta} b_i  evaluated at u (coordinate direction i)."""
    hs = fam.h(u)
    heats = heat_operator(fam.cx, hs, 1.0)
    projs = kernel_projectors(fam.cx, hs)
    bs = fam.b(u, i)
    total = 0j
    for q in fam.cx.degrees:
        eye = np.eye(fam.cx.dims[q])
        total += (-1) ** q * np.trace(heats[q] @ (eye - projs[q]) @ bs[q])
    return complex(total)


class HermitianFamily:
    """Smooth family of Hermitian operators B(u) with exact partials."""

    def __init__(self, n: int, nparams: int, seed: int = 0, scale: float = 0.5,
                 coupled: bool = True):
        rng = np.random.default_rng(seed)

        def herm() -> Array:
            m = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
            return scale * (m + m.conj().T) / 2.0

        self.n = n
        self.nparams = nparams
        self.base = herm()
        self.lin = [herm() for _ in range(nparams)]
        pairs = [(i, j) for i in range(nparams) for j in range(i + 1, nparams)]
        self.cross = {p: herm() for p in pairs} if coupled else {}

    def b_op(self, u: Sequence[float]) -> Array:
        acc = self.base.copy()
        for i in range(self.nparams):
            acc += u[i] * self.lin[i]
        for (i, j), m in self.cross.items():
            acc += u[i] * u[j] * m
        return acc

    def db_op(self, u: Sequence[float], i: int) -> Array:
        acc = self.lin[i].copy()
        for (a, b_), m in self.cross.items():
            if a == i:
                acc = acc + u[b_] * m
            elif b_ == i:
                acc = acc + u[a] * m
        return acc


def omega_asymmetry(fam: HermitianFamily, u: Sequence[float], i: int) -> complex:
    """Tr (dB/du_i) e^{-B(u)^2}."""
    b = fam.b_op(u)
    return complex(np.trace(fam.db_op(u, i) @ expm(-(b @ b))))


def exterior_derivative_1(form: Callable[[Sequence[float], int], complex],
                          u: Sequence[float], i: int, j: int, step: float) -> complex:
    """(d omega)(e_i, e_j) by central differences, O(step^2)."""
    if step <= 0:
        raise DomainError("step must be positive")
    u = np.asarray(u, dtype=float)

    def partial(k: int, direction: int) -> complex:
        up, um = u.copy(), u.copy()
        up[k] += step
        um[k] -= step
        return (form(up, direction) - form(um, direction)) / (2.0 * step)

    return partial(i, j) - partial(j, i)


def exterior_derivative_2(form: Callable[[Sequence[float], int, int], complex],
                          u: Sequence[float], i: int, j: int, k: int, step: float) -> complex:
    """(d omega)(e_i, e_j, e_k) for a two-form, alternating 3-term central sum."""
    if step <= 0:
        raise DomainError("step must be positive")
    u = np.asarray(u, dtype=float)

    def partial(a: int, b_: int, c: int) -> complex:
        up, um = u.copy(), u.copy()
        up[a] += step
        um[a] -= step
        return (form(up, b_, c) - form(um, b_, c)) / (2.0 * step)

    return partial(i, j, k) - partial(j, i, k) + partial(k, i, j)


# ---------------------------------------------------------------------------
# Product families and the two-variable resolvent form
# ---------------------------------------------------------------------------

class ProductFamily:
    """Tensor product of two graded complexes with block metric h1(u1,u2) x h2(u3).

    The total differential is d = d1 x 1 + sigma x d2 with sigma the first
    factor's degree sign, so the anticommutation relations hold exactly and
    the Laplacian splits as Delta = Delta_1 + Delta_2.  Operators are
    assembled as dense matrices over the flattened bidegree decomposition.
    """

    def __init__(self, fam1: MetricFamily, fam2: MetricFamily):
        if fam2.nparams != 1:
            raise ValidationError("second factor family must have exactly one parameter")
        self.fam1, self.fam2 = fam1, fam2
        cx1, cx2 = fam1.cx, fam2.cx
        self.bidegrees = [(q1, q2) for q1 in cx1.degrees for q2 in cx2.degrees]
        self.block_dims = {(q1, q2): cx1.dims[q1] * cx2.dims[q2] for q1, q2 in self.bidegrees}
        self.offsets, off = {}, 0
        for bd in self.bidegrees:
            self.offsets[bd] = off
            off += self.block_dims[bd]
        self.dim = off
        self.nparams = fam1.nparams + 1

        self.q1_vec = np.zeros(self.dim)
        self.q2_vec = np.zeros(self.dim)
        for (q1, q2), ofs in self.offsets.items():
            size = self.block_dims[(q1, q2)]
            self.q1_vec[ofs:ofs + size] = q1
            self.q2_vec[ofs:ofs + size] = q2
        self.sign_vec = (-1.0) ** (self.q1_vec + self.q2_vec)

        self.d1_full = np.zeros((self.dim, self.dim), dtype=complex)
        self.d2_full = np.zeros((self.dim, self.dim), dtype=complex)
        for (q1, q2) in self.bidegrees:
            if (q1 + 1, q2) in self.offsets:
                blk = np.kron(cx1.d(q1), np.eye(cx2.dims[q2]))
                self._put(self.d1_full, (q1 + 1, q2), (q1, q2), blk)
            if (q1, q2 + 1) in self.offsets:
                blk = (-1.0) ** q1 * np.kron(np.eye(cx1.dims[q1]), cx2.d(q2))
                self._put(self.d2_full, (q1, q2 + 1), (q1, q2), blk)

    def _put(self, mat: Array, row_bd, col_bd, blk: Array) -> None:
        r, c = self.offsets[row_bd], self.offsets[col_bd]
        mat[r:r + blk.shape[0], c:c + blk.shape[1]] = blk

    def _split(self, u: Sequence[float]) -> tuple[list[float], list[float]]:
        u = list(u)
        return u[: self.fam1.nparams], u[self.fam1.nparams:]

    def metric(self, u: Sequence[float]) -> Array:
        u1, u2 = self._split(u)
        h1, h2 = self.fam1.h(u1), self.fam2.h(u2)
        out = np.zeros((self.dim, self.dim), dtype=complex)
        for (q1, q2) in self.bidegrees:
            self._put(out, (q1, q2), (q1, q2), np.kron(h1[q1], h2[q2]))
        return out

    def b1_matrix(self, u: Sequence[float], i: int) -> Array:
        """Factor-1 component of h^{-1} dh/du_i (zero for factor-2 directions)."""
        out = np.zeros((self.dim, self.dim), dtype=complex)
        if i < self.fam1.nparams:
            u1, _ = self._split(u)
            blocks = self.fam1.b(u1, i)
            for (q1, q2) in self.bidegrees:
                self._put(out, (q1, q2), (q1, q2),
                          np.kron(blocks[q1], np.eye(self.fam2.cx.dims[q2])))
        return out

    def b2_matrix(self, u: Sequence[float], i: int) -> Array:
        """Factor-2 component of h^{-1} dh/du_i (zero for factor-1 directions)."""
        out = np.zeros((self.dim, self.dim), dtype=complex)
        if i >= self.fam1.nparams:
            _, u2 = self._split(u)
            blocks = self.fam2.b(u2, 0)
            for (q1, q2) in self.bidegrees:
                self._put(out, (q1, q2), (q1, q2),
                          np.kron(np.eye(self.fam1.cx.dims[q1]), blocks[q2]))
        return out

    def b_matrix(self, u: Sequence[float], i: int) -> Array:
        """Full metric logarithmic derivative h^{-1} dh/du_i."""
        return self.b1_matrix(u, i) + self.b2_matrix(u, i)

    def split_laplacians(self, u: Sequence[float]) -> tuple[Array, Array]:
        h = self.metric(u)
        hinv = np.linalg.inv(h)
        d1, d2 = self.d1_full, self.d2_full
        d1s = hinv @ d1.conj().T @ h
        d2s = hinv @ d2.conj().T @ h
        return d1 @ d1s + d1s @ d1, d2 @ d2s + d2s @ d2

    def laplacian(self, u: Sequence[float]) -> Array:
        lap1, lap2 = self.split_laplacians(u)
        return lap1 + lap2

    def omega_tilde_mt(self, u: Sequence[float], i: int, j: int, z: complex,
                       n_pow: int = 2) -> complex:
        """Two-variable resolvent form evaluated on coordinate directions (i, j).

        Average over compositions N = i1 + i2 of
        (1/2) [ T_I + conj T_I ]  with  T_I(X, Y) =
        Tr S R_z^{i1} b_1(X) R_z^{i2} b_2(Y) - Tr S R_z^{i1} b_1(Y) R_z^{i2} b_2(X),
        S the total degree sign; conj T_I uses the conjugate resolvent point.
        """
        if n_pow < 2:
            raise DomainError("the two-variable form needs n_pow >= 2 (one resolvent per slot)")
        lap = self.laplacian(u)
        vals = np.linalg.eigvals(lap)
        if np.abs(z - vals).min() < 1e-8:
            raise ConditioningError(f"z = {z} is within 1e-8 of the spectrum")
        eye = np.eye(self.dim)
        sign = np.diag(self.sign_vec.astype(complex))
        b1_i, b1_j = self.b1_matrix(u, i), self.b1_matrix(u, j)
        b2_i, b2_j = self.b2_matrix(u, i), self.b2_matrix(u, j)

        def tr_term(res: Array, x: Array, y: Array, i1: int, i2: int) -> complex:
            m = sign @ np.linalg.matrix_power(res, i1) @ x @ np.linalg.matrix_power(res, i2) @ y
            return complex(np.trace(m))

        res_z = np.linalg.inv(z * eye - lap)
        res_zb = np.linalg.inv(np.conj(z) * eye - lap)
        comps = [(i1, n_pow - i1) for i1 in range(1, n_pow)]
        total = 0j
        for i1, i2 in comps:
            t_plain = tr_term(res_z, b1_i, b2_j, i1, i2) - tr_term(res_z, b1_j, b2_i, i1, i2)
            t_conj = np.conj(tr_term(res_zb, b1_i, b2_j, i1, i2) - tr_term(res_zb, b1_j, b2_i, i1, i2))
            total += 0.5 * (t_plain + t_conj)
        return total / len(comps)

    def heat_weighted_trace(self, u: Sequence[float], t1: float, t2: float,
                            weight: Callable[[int, int], complex]) -> complex:
        """Tr w(Q1, Q2) e^{-(t1 Delta_1 + t2 Delta_2)} by direct eigendecomposition."""
        lap1, lap2 = self.split_laplacians(u)
        op = t1 * lap1 + t2 * lap2
        w = np.array([weight(int(a), int(b)) for a, b in zip(self.q1_vec, self.q2_vec)])
        return complex(np.trace(np.diag(w) @ expm(-op)))

    def bigraded_spectrum(self, u: Sequence[float]) -> BigradedSpectrum:
        """Joint (Delta_1, Delta_2) eigenvalues per bidegree block."""
        lap1, lap2 = self.split_laplacians(u)
        per = []
        kernel_pairs = 0
        for bd in self.bidegrees:
            ofs, size = self.offsets[bd], self.block_dims[bd]
            blk1 = lap1[ofs:ofs + size, ofs:ofs + size]
            blk2 = lap2[ofs:ofs + size, ofs:ofs + size]
            # commuting h-self-adjoint blocks: diagonalize the sum, read both
            vals, vecs = np.linalg.eig(blk1 + 2.0 * blk2)
            entries = []
            for col in range(size):
                v = vecs[:, col]
                mu1 = float(np.real(v.conj() @ blk1 @ v / (v.conj() @ v)))
                mu2 = float(np.real(v.conj() @ blk2 @ v / (v.conj() @ v)))
                mu1, mu2 = max(mu1, 0.0), max(mu2, 0.0)
                if mu1 < 1e-12 and mu2 < 1e-12:
                    kernel_pairs += 1
                else:
                    entries.append((mu1, mu2, 1))
            per.append((bd, tuple(entries)))
        return BigradedSpectrum(per_bidegree=tuple(per), kernel_pairs=kernel_pairs)

    def omega_mt_contour(self, u: Sequence[float], i: int, j: int, n_pow: int = 2,
                         nodes_per_edge: int = 80, pad: float = 2.0) -> complex:
        """Contour-integrated heat form:

            (-1)^(N-1) (N-1)! (2 pi i)^{-1}  oint e^{-z} omega_tilde(z) dz

        by Gauss-Legendre panels on the edges of a rectangle enclosing
        [0, lambda_max]; the integrand is analytic near each edge so the
        panel rule converges geometrically.
        """
        lap = self.laplacian(u)
        lam_max = float(np.max(np.real(np.linalg.eigvals(lap))))
        left, right = -pad, lam_max + pad
        height = pad
        corners = [complex(left, -height), complex(right, -height),
                   complex(right, height), complex(left, height)]
        xs, ws = np.polynomial.legendre.leggauss(nodes_per_edge)
        total = 0j
        for a, b_ in zip(corners, corners[1:] + corners[:1]):
            mid, half = (a + b_) / 2.0, (b_ - a) / 2.0
            for x, w in zip(xs, ws):
                z = mid + half * x
                total += w * half * cmath.exp(-z) * self.omega_tilde_mt(u, i, j, z, n_pow)
        pref = (-1.0) ** (n_pow - 1) * math.factorial(n_pow - 1)
        return pref * total / (2j * math.pi)


def scaling_surface_family(cx1: GradedComplex, cx2: GradedComplex,
                           h1_base: list[Array], h2_base: list[Array]) -> ProductFamily:
    """Product family over (t1, t2) with h_j = t_j^(Q_j - n_j/2) h_j^0.

    Parametrized by u = (log t1, log t2) to keep the domain unconstrained;
    b_j = (Q_j - n_j/2) d(log t_j) exactly.
    """
    n1 = len(cx1.dims) - 1
    n2 = len(cx2.dims) - 1

    def h1(u: Sequence[float]) -> list[Array]:
        t1 = math.exp(u[0])
        return [t1 ** (q - n1 / 2.0) * h1_base[q] for q in cx1.degrees]

    def dh1(u: Sequence[float], i: int) -> list[Array]:
        t1 = math.exp(u[0])
        return [(q - n1 / 2.0) * t1 ** (q - n1 / 2.0) * h1_base[q] for q in cx1.degrees]

    def h2(u: Sequence[float]) -> list[Array]:
        t2 = math.exp(u[0])
        return [t2 ** (q - n2 / 2.0) * h2_base[q] for q in cx2.degrees]

    def dh2(u: Sequence[float], i: int) -> list[Array]:
        t2 = math.exp(u[0])
        return [(q - n2 / 2.0) * t2 ** (q - n2 / 2.0) * h2_base[q] for q in cx2.degrees]

    fam1 = MetricFamily(cx1, 1, h1, dh1)
    fam2 = MetricFamily(cx2, 1, h2, dh2)
    return ProductFamily(fam1, fam2)


# ---------------------------------------------------------------------------
# Verification reports
# ---------------------------------------------------------------------------

def torsion_variation_check(fam: MetricFamily, u_grid: Sequence[float],
                            fd_step: float = 1e-4) -> dict:
    """Finite-difference d/du log T against -(1/2) tr' (-1)^Q h^{-1} h' (I - P_ker)."""
    cx = fam.cx
    rows = []
    for u0 in u_grid:
        lt = lambda v: matrix_log_torsion(cx, fam.h([v]))
        fd = (lt(u0 + fd_step) - lt(u0 - fd_step)) / (2.0 * fd_step)
        hs = fam.h([u0])
        bs = fam.b([u0], 0)
        projs = kernel_projectors(cx, hs)
        formula = 0j
        for q in cx.degrees:
            eye = np.eye(cx.dims[q])
            formula += (-1) ** q * np.trace(bs[q] @ (eye - projs[q]))
        formula = -0.5 * formula
        rows.append({"u": float(u0), "fd": float(fd), "formula": float(np.real(formula)),
                     "discrepancy": float(abs(fd - np.real(formula)))})
    return {"rows": rows, "max_discrepancy": max(r["discrepancy"] for r in rows)}


def adjoint_trace_identities_check(seed: int = 0, n: int = 5) -> dict:
    """Graded trace/adjoint rules on random matrix-valued forms, exact to rounding.

    Checks Tr kl = (-1)^{kl} Tr lk for one-forms, Tr k = conj Tr k*, reality of
    the trace of symmetric one-forms, and the order-reversing sign for a
    product of three one-forms.
    """
    rng = np.random.default_rng(seed)

    def mat() -> Array:
        return rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))

    m = mat()
    h = m @ m.conj().T + n * np.eye(n)  # positive definite metric
    hinv = np.linalg.inv(h)

    def adj(x: Array) -> Array:
        return hinv @ x.conj().T @ h

    kappa = [mat(), mat()]   # one-form: matrix per coordinate direction (2 params)
    lam = [mat(), mat()]

    # wedge of two one-forms evaluated on (e_0, e_1)
    def wedge_trace(a, b_) -> complex:
        return complex(np.trace(a[0] @ b_[1]) - np.trace(a[1] @ b_[0]))

    anticommute = abs(wedge_trace(kappa, lam) - (-1) * wedge_trace(lam, kappa))

    # adjoint of a one-form acts componentwise; Tr kappa = conj Tr kappa*
    conj_gap = max(abs(np.trace(kappa[k]) - np.conj(np.trace(adj(kappa[k])))) for k in range(2))

    sym = [kappa[0] + adj(kappa[0]), kappa[1] + adj(kappa[1])]
    sym_imag = max(abs(np.trace(sym[k]).imag) for k in range(2))

    # three one-forms on (e_0, e_1, e_2): (k1 k2 k3)* = eps_3 k3* k2* k1*, eps_3 = -1
    k1, k2, k3 = ([mat(), mat(), mat()] for _ in range(3))

    def triple(a, b_, c) -> complex:
        total = 0j
        for perm in permutations(range(3)):
            sgn = np.linalg.det(np.eye(3)[list(perm)])
            total += sgn * np.trace(a[perm[0]] @ b_[perm[1]] @ c[perm[2]])
        return complex(total)

    lhs = np.conj(triple(k1, k2, k3))
    adj3 = lambda f: [adj(f[k]) for k in range(3)]
    rhs = -1.0 * triple(adj3(k3), adj3(k2), adj3(k1))
    triple_gap = abs(lhs - rhs)

    return {
        "anticommutation_gap": float(anticommute),
        "conjugate_trace_gap": float(conj_gap),
        "symmetric_trace_imag": float(sym_imag),
        "order_reversal_gap": float(triple_gap),
        "passed": max(anticommute, conj_gap, sym_imag, triple_gap) < 1e-9,
    }


def b_symmetry_gap(fam: MetricFamily, u: Sequence[float]) -> float:
    """max_q || (h b)^dagger - h b ||; zero iff b is h-symmetric."""
    hs = fam.h(u)
    worst = 0.0
    for i in range(fam.nparams):
        for hq, bq in zip(hs, fam.b(u, i)):
            m = hq @ bq
            worst = max(worst, float(np.linalg.norm(m - m.conj().T)))
    return worst


def adjoint_derivative_identity_gap(fam: MetricFamily, u: Sequence[float],
                                    step: float = 1e-5) -> float:
    """|| delta d* - [d*, b] || via central differences, per parameter."""
    cx = fam.cx
    u = np.asarray(u, dtype=float)
    worst = 0.0
    for i in range(fam.nparams):
        up, um = u.copy(), u.copy()
        up[i] += step
        um[i] -= step
        adj_p = adjoint_diffs(cx, fam.h(up))
        adj_m = adjoint_diffs(cx, fam.h(um))
        adj_0 = adjoint_diffs(cx, fam.h(u))
        bs = fam.b(u, i)
        for q in range(len(cx.diff)):
            fd = (adj_p[q] - adj_m[q]) / (2.0 * step)
            comm = adj_0[q] @ bs[q + 1] - bs[q] @ adj_0[q]
            worst = max(worst, float(np.linalg.norm(fd - comm)))
    return worst


def scaling_curve_check(cx: GradedComplex, hs: Sequence[Array], t: float) -> dict:
    """Along h_t = t^Q h: b = Q/t exactly and Delta(t) = t Delta(h)."""
    hts = [t ** q * np.asarray(hq) for q, hq in enumerate(hs)]
    b_gap = 0.0
    for q, (hq, htq) in enumerate(zip(hs, hts)):
        dht = q * t ** (q - 1) * np.asarray(hq)
        b_block = np.linalg.solve(htq, dht)
        b_gap = max(b_gap, float(np.linalg.norm(b_block - (q / t) * np.eye(cx.dims[q]))))
    lap_t = laplacians(cx, hts)
    lap_0 = laplacians(cx, hs)
    lap_gap = max(float(np.linalg.norm(lt - t * l0)) for lt, l0 in zip(lap_t, lap_0))
    return {"b_gap": b_gap, "laplacian_gap": lap_gap, "passed": max(b_gap, lap_gap) < 1e-10}
