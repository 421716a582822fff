"""Projectivized-bundle machinery over a chart.

The fiber over each base point is P^{r-1} (projectivized dual fiber),
covered by the affine chart whose last homogeneous coordinate is 1 (the
removed hyperplane has Fubini-Study measure zero).  The induced metric
e^{-phi} on the dual tautological line bundle has the explicit potential

    phi(z, [w]) = log( w^H G(z) w ),      G = matrix of the dual metric,

so fiber and mixed derivatives are analytic in w while base derivatives
fall back to finite differences of G.

Segre forms are computed as signed fiber integrals of powers of the
curvature form of e^{-phi}: the power is reduced symbolically to
determinants of Hessian sub-blocks (the full-fiber-degree component),
then sampled and integrated by a calibrated quadrature.  A streaming
evaluator keeps memory bounded; a general total-space form type provides
the independent wedge/pushforward route used for cross-checks.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .forms import Chart, FormDegreeError, FormField, graded_merge
from .metrics import MetricField, _cholesky_inverse, _d_dz_stack, dual_metric

__all__ = [
    "FiberAtlas",
    "CalibrationReport",
    "CalibrationError",
    "InducedPhi",
    "induced_phi",
    "TotalSpaceForm",
    "o1_curvature",
    "fiber_pushforward",
    "segre_form",
    "segre_forms",
]


class CalibrationError(RuntimeError):
    """Fiber quadrature failed its closed-form calibration battery."""


# ---------------------------------------------------------------------------
# fiber quadrature
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CalibrationReport:
    tests: dict[str, tuple[float, float]]  # name -> (got, want)
    worst_error: float

    def as_json(self) -> dict:
        return {
            "tests": {k: {"got": g, "want": w, "error": abs(g - w)}
                      for k, (g, w) in self.tests.items()},
            "worst_error": self.worst_error,
        }


@dataclass(frozen=True)
class FiberAtlas:
    """Quadrature on P^{r-1} exact for the normalized Fubini-Study measure.

    ``nodes``: (Q, r-1) affine coordinates; ``weights``: (Q,) with sum 1,
    integrating smooth functions against the FS probability measure.

    r = 2: Gauss-Legendre in the FS-uniform radial variable
    u = |w|^2/(1+|w|^2) times a uniform angle rule (the chart at infinity
    carries FS measure 0, so the single chart is exact up to smoothness).
    r = 3: Gauss-Legendre x Gauss-Legendre through the moment map
    (mu_1, mu_2) -> uniform on the simplex, times two uniform angles.
    r > 3: seeded Monte Carlo on the unit sphere (fixed seed, fallback).
    """

    rank: int
    nodes: np.ndarray
    weights: np.ndarray
    scheme: str

    @property
    def fiber_dim(self) -> int:
        return self.rank - 1

    @property
    def count(self) -> int:
        return len(self.weights)

    @staticmethod
    def for_rank(rank: int, radial: int = 16, angular: int = 16,
                 mc_samples: int = 8192, seed: int = 20240) -> "FiberAtlas":
        if rank < 1:
            raise ValueError("rank must be >= 1")
        if rank == 1:
            return FiberAtlas(1, np.zeros((1, 0), dtype=complex), np.ones(1), "point")
        if rank == 2:
            x, gw = np.polynomial.legendre.leggauss(radial)
            u = 0.5 * (x + 1.0)
            gw = 0.5 * gw
            theta = 2.0 * math.pi * np.arange(angular) / angular
            r_nodes = np.sqrt(u / (1.0 - u))
            w = (r_nodes[:, None] * np.exp(1j * theta)[None, :]).reshape(-1, 1)
            weights = np.repeat(gw / angular, angular)
            return FiberAtlas(2, w, weights, f"gl{radial}xangle{angular}")
        if rank == 3:
            x, gw = np.polynomial.legendre.leggauss(radial)
            a = 0.5 * (x + 1.0)
            wa = 0.5 * gw
            b, wb = a, wa
            theta = 2.0 * math.pi * np.arange(angular) / angular
            nodes = []
            weights = []
            for ia in range(radial):
                for ib in range(radial):
                    mu1 = a[ia] * (1.0 - b[ib])
                    mu2 = a[ia] * b[ib]
                    mu0 = 1.0 - a[ia]
                    rho1 = math.sqrt(mu1 / mu0)
                    rho2 = math.sqrt(mu2 / mu0)
                    base_w = 2.0 * a[ia] * wa[ia] * wb[ib] / (angular * angular)
                    for t1 in theta:
                        for t2 in theta:
                            nodes.append((rho1 * np.exp(1j * t1), rho2 * np.exp(1j * t2)))
                            weights.append(base_w)
            return FiberAtlas(3, np.asarray(nodes), np.asarray(weights),
                              f"simplex-gl{radial}^2xangle{angular}^2")
        rng = np.random.default_rng(seed)
        vecs = rng.normal(size=(mc_samples, rank)) + 1j * rng.normal(size=(mc_samples, rank))
        # avoid near-zero last coordinates (affine chart); FS-measure-zero set
        bad = np.abs(vecs[:, -1]) < 1e-6 * np.linalg.norm(vecs, axis=1)
        vecs[bad, -1] = 1e-3
        affine = vecs[:, :-1] / vecs[:, -1:]
        weights = np.full(mc_samples, 1.0 / mc_samples)
        return FiberAtlas(rank, affine, weights, f"mc{mc_samples}-seed{seed}")

    # -- embeddings ----------------------------------------------------------

    def embedded(self) -> np.ndarray:
        """(Q, r) homogeneous vectors with last coordinate 1."""
        Q = self.count
        out = np.ones((Q, self.rank), dtype=complex)
        out[:, : self.fiber_dim] = self.nodes
        return out

    def norm_sq(self) -> np.ndarray:
        return np.einsum("qa,qa->q", np.conj(self.embedded()), self.embedded()).real

    def volume_weights(self) -> np.ndarray:
        """Weights turning coefficient samples into euclidean fiber volume
        integrals: int_C^f g dV = sum_q vw_q g(w_q) for g with FS-smooth
        compensation g*(1+|w|^2)^{f+1}."""
        f = self.fiber_dim
        if f == 0:
            return np.ones(1)
        factorial = math.factorial(f)
        return (math.pi ** f / factorial) * self.weights * self.norm_sq() ** (f + 1)

    def fs_average(self, values: np.ndarray) -> complex:
        return complex(np.sum(self.weights * values))

    # -- calibration ---------------------------------------------------------

    def calibrate(self) -> CalibrationReport:
        """Closed-form moment battery for the FS probability measure."""
        tests: dict[str, tuple[float, float]] = {}
        tests["mass"] = (float(np.sum(self.weights)), 1.0)
        if self.rank >= 2:
            W = self.nodes
            s = np.einsum("qa,qa->q", np.conj(W), W).real
            mu1 = (np.abs(W[:, 0]) ** 2) / (1.0 + s)
            if self.rank == 2:
                for p, want in ((1, 1.0 / 2.0), (2, 1.0 / 3.0), (3, 1.0 / 4.0)):
                    tests[f"mu^{p}"] = (float(np.sum(self.weights * mu1 ** p)), want)
                angle = (W[:, 0].real ** 2) / (1.0 + s) ** 2
                tests["radial-angular"] = (float(np.sum(self.weights * angle)), 1.0 / 12.0)
            elif self.rank == 3:
                mu2 = (np.abs(W[:, 1]) ** 2) / (1.0 + s)
                tests["mu1"] = (float(np.sum(self.weights * mu1)), 1.0 / 3.0)
                tests["mu1^2"] = (float(np.sum(self.weights * mu1 ** 2)), 1.0 / 6.0)
                tests["mu1*mu2"] = (float(np.sum(self.weights * mu1 * mu2)), 1.0 / 12.0)
                cross = (W[:, 0] * np.conj(W[:, 1])).real ** 2 / (1.0 + s) ** 2
                tests["angular-cross"] = (float(np.sum(self.weights * cross)), 1.0 / 24.0)
            else:
                tests["mu1"] = (float(np.sum(self.weights * mu1)), 1.0 / self.rank)
        worst = max(abs(g - w) for g, w in tests.values())
        return CalibrationReport(tests, worst)

    def require_calibration(self, tolerance: float) -> CalibrationReport:
        report = self.calibrate()
        if report.worst_error > tolerance:
            raise CalibrationError(
                f"fiber quadrature calibration error {report.worst_error:.3e} "
                f"exceeds {tolerance:.3e}")
        return report


# ---------------------------------------------------------------------------
# the induced potential and its Hessian blocks
# ---------------------------------------------------------------------------


class InducedPhi:
    """phi(z, [w]) = log(w^H G(z) w) with analytic fiber/mixed derivatives.

    Precomputes G and its first and mixed second finite-difference
    derivatives on the chart; Hessian blocks for batches of fiber nodes
    come out of closed-form expressions in those arrays.
    """

    def __init__(self, hstar: MetricField):
        self.chart = hstar.chart
        self.rank = hstar.rank
        self.fiber_dim = hstar.rank - 1
        chart = self.chart
        n = chart.dim
        G = np.ascontiguousarray(np.broadcast_to(
            np.asarray(hstar.entries_broadcast(), dtype=complex),
            chart.grid_shape + (self.rank, self.rank)))
        self.G = G
        self.dG = [_d_dz_stack(G, chart, j) for j in range(n)]
        # ddG[j][k] = d^2 G / dz_j dzbar_k; hermitian completion for j > k
        self.ddG: list[list[np.ndarray | None]] = [[None] * n for _ in range(n)]
        for j in range(n):
            for k in range(j, n):
                self.ddG[j][k] = _d_dz_stack(self.dG[j], chart, k, conjugate=True)
                if k != j:
                    self.ddG[k][j] = np.conj(np.swapaxes(self.ddG[j][k], -1, -2))

    def values(self, w: np.ndarray) -> np.ndarray:
        """log psi at one embedded fiber vector (length r); -inf flagged."""
        w = np.asarray(w, dtype=complex)
        if np.all(w == 0):
            raise ValueError("all-zero fiber vector")
        psi = np.einsum("a,...ab,b->...", np.conj(w), self.G, w).real
        with np.errstate(divide="ignore"):
            return np.log(psi)

    def hessian_blocks(self, W: np.ndarray) -> dict[str, np.ndarray]:
        """Raw Hessian blocks of phi for a batch of embedded fiber vectors.

        W: (Q, r).  Returns arrays keyed ``bb`` (grid,Q,n,n), ``bf``
        (grid,Q,n,f), ``fb`` (grid,Q,f,n), ``ff`` (grid,Q,f,f); the (i/2pi)
        factor is NOT included.
        """
        chart = self.chart
        n = chart.dim
        f = self.fiber_dim
        W = np.asarray(W, dtype=complex)
        Wc = np.conj(W)
        G, dG, ddG = self.G, self.dG, self.ddG
        psi = np.einsum("qa,...ab,qb->...q", Wc, G, W)
        Gw = np.einsum("...ab,qb->...qa", G, W)          # (G w)_a
        q_hol = [np.einsum("qa,...ab,qb->...q", Wc, dG[j], W) for j in range(n)]
        dGw = [np.einsum("...ab,qb->...qa", dG[j], W) for j in range(n)]
        # wbar^T dGbar_k = conj(dG_k w); scalar w^H dGbar_k w = conj(q_hol[k])
        inv_psi = 1.0 / psi
        inv_psi2 = inv_psi * inv_psi
        grid_q = psi.shape
        bb = np.empty(grid_q + (n, n), dtype=complex)
        for j in range(n):
            for k in range(n):
                qjk = np.einsum("qa,...ab,qb->...q", Wc, ddG[j][k], W)
                bb[..., j, k] = qjk * inv_psi - q_hol[j] * np.conj(q_hol[k]) * inv_psi2
        out = {"bb": bb}
        if f:
            free = slice(0, f)
            ff = np.empty(grid_q + (f, f), dtype=complex)
            # d^2 log psi / dw_a dwbar_b = G_ba/psi - (Gw)_b (w^H G)_a / psi^2
            wHG = np.conj(Gw)  # (w^H G)_a = conj((G w)_a) for hermitian G
            for a in range(f):
                for b in range(f):
                    ff[..., a, b] = (G[..., None, b, a] * inv_psi
                                     - Gw[..., b] * wHG[..., a] * inv_psi2)
            bf = np.empty(grid_q + (n, f), dtype=complex)
            fb = np.empty(grid_q + (f, n), dtype=complex)
            for j in range(n):
                for b in range(f):
                    bf[..., j, b] = (dGw[j][..., b] * inv_psi
                                     - Gw[..., b] * q_hol[j] * inv_psi2)
            for a in range(f):
                for k in range(n):
                    # conj-symmetric to bf: d/dw_a dzbar_k = conj(d/dz_k dwbar_a)
                    fb[..., a, k] = np.conj(bf[..., k, a])
            out.update(ff=ff, bf=bf, fb=fb)
        return out


def induced_phi(hstar: MetricField) -> InducedPhi:
    """Potential of the induced metric on the dual tautological bundle."""
    return InducedPhi(hstar)


# ---------------------------------------------------------------------------
# total-space forms (general route, test scale)
# ---------------------------------------------------------------------------


class TotalSpaceForm:
    """Form on chart x fiber with split bidegree bookkeeping.

    Keys are (I, J, A, B): base holomorphic, base antiholomorphic, fiber
    holomorphic, fiber antiholomorphic multi-indices; coefficients have
    shape broadcastable to grid + (Q,)."""

    __slots__ = ("chart", "atlas", "coeffs")

    def __init__(self, chart: Chart, atlas: FiberAtlas,
                 coeffs: Mapping[tuple, np.ndarray] | None = None):
        self.chart = chart
        self.atlas = atlas
        self.coeffs: dict[tuple, np.ndarray] = {}
        if coeffs:
            for key, arr in coeffs.items():
                key = tuple(tuple(part) for part in key)
                self.coeffs[key] = np.asarray(arr, dtype=complex)

    @staticmethod
    def pullback(form: FormField, atlas: FiberAtlas) -> "TotalSpaceForm":
        """pi^* of a base form: same coefficients, constant along fibers."""
        out = {}
        for (I, J), arr in form.coeffs.items():
            out[(I, J, (), ())] = np.asarray(arr, dtype=complex)[..., None]
        return TotalSpaceForm(form.chart, atlas, out)

    def __add__(self, other: "TotalSpaceForm") -> "TotalSpaceForm":
        coeffs = dict(self.coeffs)
        for k, v in other.coeffs.items():
            coeffs[k] = coeffs[k] + v if k in coeffs else v
        return TotalSpaceForm(self.chart, self.atlas, coeffs)

    def __mul__(self, scalar) -> "TotalSpaceForm":
        if isinstance(scalar, TotalSpaceForm):
            return self.wedge(scalar)
        return TotalSpaceForm(self.chart, self.atlas,
                              {k: v * scalar for k, v in self.coeffs.items()})

    __rmul__ = __mul__

    def wedge(self, other: "TotalSpaceForm") -> "TotalSpaceForm":
        if self.chart != other.chart or self.atlas is not other.atlas:
            raise ValueError("total-space factors live on different spaces")
        out: dict = {}
        for k1, c1 in self.coeffs.items():
            for k2, c2 in other.coeffs.items():
                merged = graded_merge(k1, k2)
                if merged is None:
                    continue
                sign, key = merged
                term = sign * (c1 * c2)
                out[key] = out[key] + term if key in out else term
        return TotalSpaceForm(self.chart, self.atlas, out)

    def wedge_power(self, m: int) -> "TotalSpaceForm":
        acc = None
        for _ in range(m):
            acc = self if acc is None else acc.wedge(self)
        if acc is None:
            raise ValueError("power must be >= 1")
        return acc


def o1_curvature(phi: InducedPhi, atlas: FiberAtlas) -> TotalSpaceForm:
    """The (1,1) curvature form of e^{-phi} on the total space, sampled at
    every (base node, fiber node) pair.  Test-scale: materializes all
    Hessian blocks."""
    if atlas.rank != phi.rank:
        raise ValueError("atlas rank does not match the metric rank")
    n = phi.chart.dim
    f = phi.fiber_dim
    blocks = phi.hessian_blocks(atlas.embedded())
    factor = 1j / (2.0 * math.pi)
    out: dict = {}
    for j in range(n):
        for k in range(n):
            out[((j,), (k,), (), ())] = factor * blocks["bb"][..., j, k]
    for j in range(n):
        for b in range(f):
            out[((j,), (), (), (b,))] = factor * blocks["bf"][..., j, b]
    for a in range(f):
        for k in range(n):
            out[((), (k,), (a,), ())] = factor * blocks["fb"][..., a, k]
    for a in range(f):
        for b in range(f):
            out[((), (), (a,), (b,))] = factor * blocks["ff"][..., a, b]
    return TotalSpaceForm(phi.chart, atlas, out)


def fiber_pushforward(eta: TotalSpaceForm) -> FormField:
    """Integrate the full-fiber-degree component over the fiber.

    Components with fiber bidegree below (f, f) push to zero; the output
    base bidegree drops by (f, f) relative to eta's top fiber terms.
    """
    atlas = eta.atlas
    f = atlas.fiber_dim
    full = tuple(range(f))
    vol_w = atlas.volume_weights()
    base_terms: dict = {}
    degrees = set()
    for (I, J, A, B), arr in eta.coeffs.items():
        if A == full and B == full:
            degrees.add((len(I), len(J)))
            # move dzbar_J across dw_full, then integrate the fiber top form
            sign = (-1) ** (len(J) * f) * (-1) ** (f * (f - 1) // 2) * (-2j) ** f
            val = sign * np.einsum("...q,q->...", arr, vol_w)
            key = (I, J)
            base_terms[key] = base_terms[key] + val if key in base_terms else val
    if not degrees:
        # nothing of full fiber degree: find the base bidegree of what's there
        degs = {(len(I), len(J)) for (I, J, A, B) in eta.coeffs}
        p, q = max(degs, default=(0, 0))
        return FormField.zero(eta.chart, p, q)
    if len(degrees) > 1:
        raise FormDegreeError("mixed base bidegrees at full fiber degree")
    (p, q), = degrees
    return FormField(eta.chart, p, q, base_terms)


# ---------------------------------------------------------------------------
# Segre forms: streaming determinant evaluator
# ---------------------------------------------------------------------------


def _det_stack(entries: list[list[np.ndarray]]) -> np.ndarray:
    """Determinant of a small matrix of equally-shaped arrays (m <= 4)."""
    m = len(entries)
    if m == 1:
        return entries[0][0]
    if m == 2:
        a, b = entries[0]
        c, d = entries[1]
        return a * d - b * c
    if m == 3:
        a, b, c = entries[0]
        d, e, f_ = entries[1]
        g, h, i = entries[2]
        return a * (e * i - f_ * h) - b * (d * i - f_ * g) + c * (d * h - e * g)
    acc = None
    for col in range(m):
        minor = [[entries[r][cc] for cc in range(m) if cc != col]
                 for r in range(1, m)]
        term = entries[0][col] * _det_stack(minor)
        sign = (-1) ** col
        acc = sign * term if acc is None else acc + sign * term
    return acc


def segre_forms(h: MetricField, degrees: Sequence[int],
                atlas: FiberAtlas | None = None,
                fiber_chunk: int = 32,
                calibration_tolerance: float | None = 1e-6,
                ) -> dict[int, FormField]:
    """Segre (k,k)-forms of a smooth metric for several degrees in one sweep.

    s_k = (-1)^k * (fiber integral of the (k + r - 1) power of the induced
    curvature form); the full-fiber-degree component is reduced to
    determinants of Hessian sub-blocks before sampling, and the fiber
    integral streams over quadrature-node chunks.
    """
    if h.regularity != "smooth":
        raise ValueError("segre forms need a smooth (regularized) metric")
    chart = h.chart
    n = chart.dim
    r = h.rank
    f = r - 1
    degrees = sorted(set(int(k) for k in degrees))
    if degrees and degrees[-1] > n:
        raise FormDegreeError(f"s_k needs k <= chart dimension {n}")
    if any(k < 0 for k in degrees):
        raise ValueError("degrees must be non-negative")
    if atlas is None:
        atlas = FiberAtlas.for_rank(r)
    if atlas.rank != r:
        raise ValueError("atlas rank does not match the metric")
    if calibration_tolerance is not None:
        atlas.require_calibration(calibration_tolerance)

    hstar = dual_metric(h)
    phi = InducedPhi(hstar)
    grid = chart.grid_shape

    acc: dict[int, dict] = {
        k: {(I, J): np.zeros(grid, dtype=complex)
            for I in itertools.combinations(range(n), k)
            for J in itertools.combinations(range(n), k)}
        for k in degrees
    }

    W_all = atlas.embedded()
    vol_all = atlas.volume_weights()
    factor_i2pi = 1j / (2.0 * math.pi)
    for start in range(0, atlas.count, fiber_chunk):
        stop = min(start + fiber_chunk, atlas.count)
        blocks = phi.hessian_blocks(W_all[start:stop])
        vol = vol_all[start:stop]
        for k in degrees:
            m = k + f
            pref = (math.factorial(m)
                    * (-1) ** (m * (m - 1) // 2)
                    * (-1) ** (k * f)
                    * (-1) ** (f * (f - 1) // 2)
                    * (-2j) ** f
                    * factor_i2pi ** m
                    * (-1) ** k)
            for I in itertools.combinations(range(n), k):
                for J in itertools.combinations(range(n), k):
                    if m == 0:
                        # rank 1, degree 0: empty determinant is 1
                        ones = np.ones(blocks["bb"].shape[:-2])
                        acc[k][(I, J)] += pref * np.einsum("...q,q->...", ones, vol)
                        continue
                    entries: list[list[np.ndarray]] = []
                    for row in range(m):
                        entries.append([])
                        for col in range(m):
                            if row < k and col < k:
                                block = blocks["bb"][..., I[row], J[col]]
                            elif row < k:
                                block = blocks["bf"][..., I[row], col - k]
                            elif col < k:
                                block = blocks["fb"][..., row - k, J[col]]
                            else:
                                block = blocks["ff"][..., row - k, col - k]
                            entries[row].append(block)
                    det = _det_stack(entries)
                    acc[k][(I, J)] += pref * np.einsum("...q,q->...", det, vol)
    out: dict[int, FormField] = {}
    for k in degrees:
        if k == 0:
            # s_0 integrates the fiber volume: keep it as a function field
            out[0] = FormField(chart, 0, 0, {((), ()): acc[0][((), ())]})
        else:
            out[k] = FormField(chart, k, k, acc[k])
    return out


def segre_form(h: MetricField, k: int, atlas: FiberAtlas | None = None,
               **kwargs) -> FormField:
    """Single Segre (k,k)-form; see :func:`segre_forms`."""
    return segre_forms(h, [k], atlas, **kwargs)[k]
