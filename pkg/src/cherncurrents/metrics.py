"""Hermitian metric fields on trivial bundles over polydisc charts.

Covers duals, section-induced singular metrics, Chern-connection curvature,
Chern forms via form-valued principal minors, the log-det route to the
first Chern form, and a sampled Griffiths-positivity diagnostic.

The artifact deliberately restricts singular metrics to the shipped
catalog and to section-induced ones: degeneracy varieties are declared
example metadata (polynomial equations, claimed codimension, distance and
sampling helpers), never inferred from the samples.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from .forms import (
    Chart,
    FormDegreeError,
    FormField,
    ScalarField,
    axis_derivative,
    ddc,
    min_levi_eigenvalue,
)

__all__ = [
    "Poly",
    "SectionMatrix",
    "DegeneracyVariety",
    "Provenance",
    "MetricField",
    "dual_metric",
    "from_sections",
    "curvature",
    "chern_forms",
    "first_chern_via_det",
    "griffiths_diagnostic",
    "GriffithsReport",
    "direct_sum",
    "catalog_metric",
    "CATALOG_NAMES",
]


# ---------------------------------------------------------------------------
# polynomials in the chart coordinates
# ---------------------------------------------------------------------------


class Poly:
    """Holomorphic polynomial sum_e coeff_e * z^e on C^n (e an exponent tuple)."""

    __slots__ = ("dim", "coeffs")

    def __init__(self, dim: int, coeffs: Mapping[tuple[int, ...], complex]):
        self.dim = dim
        self.coeffs = {tuple(e): complex(c) for e, c in coeffs.items() if c != 0}
        for e in self.coeffs:
            if len(e) != dim or any(x < 0 for x in e):
                raise ValueError(f"bad exponent tuple {e} for dim {dim}")

    @staticmethod
    def constant(dim: int, value: complex) -> "Poly":
        return Poly(dim, {(0,) * dim: value})

    @staticmethod
    def coordinate(dim: int, j: int) -> "Poly":
        e = [0] * dim
        e[j] = 1
        return Poly(dim, {tuple(e): 1.0})

    def __call__(self, zs: Sequence[np.ndarray]):
        acc = 0
        for e, c in self.coeffs.items():
            term = c
            for j, power in enumerate(e):
                if power:
                    term = term * zs[j] ** power
            acc = acc + term
        if not self.coeffs:
            return np.asarray(0.0 + 0j)
        return acc

    def __repr__(self):
        return f"Poly(dim={self.dim}, {self.coeffs})"


@dataclass(frozen=True)
class SectionMatrix:
    """m x r matrix of holomorphic polynomials (global sections stacked)."""

    rows: int
    cols: int
    entries: tuple[tuple[Poly, ...], ...]

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise ValueError("section matrix must be at least 1x1")
        if len(self.entries) != self.rows or any(len(r) != self.cols for r in self.entries):
            raise ValueError("entry grid does not match declared shape")

    @staticmethod
    def from_polys(entries: Sequence[Sequence[Poly]]) -> "SectionMatrix":
        rows = len(entries)
        cols = len(entries[0])
        return SectionMatrix(rows, cols, tuple(tuple(r) for r in entries))

    def evaluate(self, zs: Sequence[np.ndarray]) -> np.ndarray:
        """Stacked values, shape broadcast(grid) + (rows, cols)."""
        sample = [[np.asarray(p(zs)) for p in row] for row in self.entries]
        shape = np.broadcast_shapes(*(a.shape for row in sample for a in row))
        out = np.zeros(shape + (self.rows, self.cols), dtype=complex)
        for i, row in enumerate(sample):
            for j, val in enumerate(row):
                out[..., i, j] = val
        return out

    def gram(self, zs: Sequence[np.ndarray]) -> np.ndarray:
        """S^H S, the dual-metric matrix of the induced singular metric."""
        S = self.evaluate(zs)
        return np.einsum("...ia,...ib->...ab", np.conj(S), S)

    def compose_linear(self, U: np.ndarray) -> "SectionMatrix":
        """Sections pulled back through the linear change z -> U z."""
        n = U.shape[0]
        new_entries = []
        for row in self.entries:
            new_row = []
            for p in row:
                acc: dict[tuple[int, ...], complex] = {}
                for e, c in p.coeffs.items():
                    terms = [{(0,) * n: c}]
                    for j, power in enumerate(e):
                        for _ in range(power):
                            lin = {}
                            for k in range(n):
                                if U[j, k] != 0:
                                    ek = [0] * n
                                    ek[k] = 1
                                    lin[tuple(ek)] = U[j, k]
                            terms.append(lin)
                    prod: dict[tuple[int, ...], complex] = {(0,) * n: 1.0}
                    for t in terms:
                        nxt: dict[tuple[int, ...], complex] = {}
                        for e1, c1 in prod.items():
                            for e2, c2 in t.items():
                                e3 = tuple(x + y for x, y in zip(e1, e2))
                                nxt[e3] = nxt.get(e3, 0.0) + c1 * c2
                        prod = nxt
                    for e3, c3 in prod.items():
                        acc[e3] = acc.get(e3, 0.0) + c3
                new_row.append(Poly(n, acc))
            new_entries.append(tuple(new_row))
        return SectionMatrix(self.rows, self.cols, tuple(new_entries))


# ---------------------------------------------------------------------------
# degeneracy metadata and provenance
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DegeneracyVariety:
    """Declared degeneracy set: polynomial equations + claimed codimension.

    ``distance_fn(zs)`` returns the distance-to-V field; ``sample_fn(count,
    rng)`` yields points on V (both declared with the example, since the
    grid cannot infer them).
    """

    equations: tuple[Poly, ...]
    codim: int
    distance_fn: Callable[[Sequence[np.ndarray]], np.ndarray] | None = None
    sample_fn: Callable[[int, np.random.Generator], np.ndarray] | None = None

    @staticmethod
    def origin(dim: int) -> "DegeneracyVariety":
        eqs = tuple(Poly.coordinate(dim, j) for j in range(dim))

        def dist(zs):
            acc = 0.0
            for Z in zs:
                acc = acc + (Z * np.conj(Z)).real
            return np.sqrt(acc)

        def sample(count, rng):
            return np.zeros((count, dim), dtype=complex)

        return DegeneracyVariety(eqs, dim, dist, sample)

    @staticmethod
    def coordinate_hyperplane(dim: int, axis: int, extent: float = 1.0) -> "DegeneracyVariety":
        eqs = (Poly.coordinate(dim, axis),)

        def dist(zs):
            Z = zs[axis]
            return np.sqrt((Z * np.conj(Z)).real) + 0.0 * sum(0.0 * z.real for z in zs)

        def sample(count, rng):
            pts = (rng.normal(size=(count, dim)) + 1j * rng.normal(size=(count, dim)))
            pts *= extent / 3.0
            pts[:, axis] = 0.0
            return pts

        return DegeneracyVariety(eqs, 1, dist, sample)


@dataclass(frozen=True)
class Provenance:
    kind: str  # "catalog" | "section-induced" | "dual-of" | "mollified"
    detail: tuple = ()


# ---------------------------------------------------------------------------
# metric fields
# ---------------------------------------------------------------------------


@dataclass
class MetricField:
    """r x r hermitian-matrix field on a chart.

    ``entry_fn(chart)`` rebuilds the entries on any chart (used by windows
    and fine mollification grids); ``entries`` of any shape broadcastable
    to grid + (r, r) is materialized lazily.  ``flagged`` marks nodes where
    the positive-definiteness guard failed (degenerate points).
    """

    chart: Chart
    rank: int
    regularity: str
    provenance: Provenance
    entries: np.ndarray | None = None
    entry_fn: Callable[[Chart], np.ndarray] | None = None
    degeneracy: DegeneracyVariety | None = None
    flagged: np.ndarray | None = None
    dual_partner: "MetricField | None" = field(default=None, repr=False)

    def __post_init__(self):
        if self.regularity not in ("smooth", "singular"):
            raise ValueError(f"regularity must be smooth|singular, got {self.regularity}")
        if self.entries is None and self.entry_fn is None:
            raise ValueError("need entries or entry_fn")

    # -- evaluation ----------------------------------------------------------

    def entries_broadcast(self) -> np.ndarray:
        if self.entries is None:
            self.entries = np.asarray(self.entry_fn(self.chart), dtype=complex)
        return self.entries

    def entries_full(self) -> np.ndarray:
        arr = self.entries_broadcast()
        target = self.chart.grid_shape + (self.rank, self.rank)
        if arr.shape == target:
            return arr
        return np.broadcast_to(arr, target)

    def quadratic_form(self, xi: np.ndarray) -> np.ndarray:
        """||xi||_h^2 as a field, xi a constant frame vector."""
        xi = np.asarray(xi, dtype=complex)
        return np.einsum("a,...ab,b->...", np.conj(xi), self.entries_broadcast(), xi).real

    def restrict(self, slices: Sequence[slice]) -> "MetricField":
        sub = self.chart.subchart(slices)
        if self.entry_fn is not None:
            entries = None
        else:
            entries = self.entries_full()[tuple(slices)]
        flagged = None
        if self.flagged is not None:
            flagged = np.broadcast_to(self.flagged, self.chart.grid_shape)[tuple(slices)]
        out = MetricField(sub, self.rank, self.regularity, self.provenance,
                          entries, self.entry_fn, self.degeneracy, flagged)
        if self.dual_partner is not None:
            dp = self.dual_partner
            d_entries = None if dp.entry_fn is not None else dp.entries_full()[tuple(slices)]
            out.dual_partner = MetricField(sub, dp.rank, dp.regularity, dp.provenance,
                                           d_entries, dp.entry_fn, dp.degeneracy, None)
            out.dual_partner.dual_partner = out
        return out

    def det_field(self) -> np.ndarray:
        return np.linalg.det(self.entries_full()).real


def _hermitize(entries: np.ndarray) -> np.ndarray:
    return 0.5 * (entries + np.conj(np.swapaxes(entries, -1, -2)))


def _cholesky_inverse(entries: np.ndarray, guard: float = 0.0):
    """Inverse of a stack of hermitian matrices via Cholesky.

    Nodes whose smallest eigenvalue is <= guard are flagged and returned
    as identity placeholders instead of aborting.
    """
    entries = _hermitize(np.asarray(entries, dtype=complex))
    eigmin = np.linalg.eigvalsh(entries)[..., 0]
    flagged = eigmin <= guard
    patched = np.array(entries, copy=True)
    r = entries.shape[-1]
    if np.any(flagged):
        patched[flagged] = np.eye(r)
    L = np.linalg.cholesky(patched)
    Linv = np.linalg.inv(L)
    inv = np.einsum("...ba,...bc->...ac", np.conj(Linv), Linv)
    return inv, (flagged if np.any(flagged) else None)


def dual_metric(h: MetricField) -> MetricField:
    """Canonical dual metric: entry matrix conj(inverse) nodewise.

    Exact section-induced partners are returned directly; otherwise the
    inverse runs through a Cholesky positive-definiteness guard, flagging
    degenerate nodes rather than aborting.
    """
    if h.dual_partner is not None:
        return h.dual_partner
    inv, flagged = _cholesky_inverse(h.entries_full())
    entry_fn = None
    if h.entry_fn is not None:
        src = h.entry_fn

        def entry_fn(chart, _src=src):
            inv_c, _ = _cholesky_inverse(np.broadcast_to(
                np.asarray(_src(chart), dtype=complex),
                chart.grid_shape + (h.rank, h.rank)))
            return np.conj(inv_c)

    out = MetricField(h.chart, h.rank, h.regularity,
                      Provenance("dual-of", (h.provenance,)),
                      np.conj(inv), entry_fn, h.degeneracy, flagged)
    out.dual_partner = h
    return out


def from_sections(S: SectionMatrix, chart: Chart,
                  degeneracy: DegeneracyVariety | None = None,
                  ) -> tuple[MetricField, MetricField]:
    """Singular metric pair (h*, h) induced by stacked global sections.

    h* has entries S^H S (Griffiths negative: every ||xi||^2 is a sum of
    squared moduli of holomorphic functions); h is its dual, Griffiths
    positive, degenerate exactly where rank S < r.
    """
    if S.cols < 1:
        raise ValueError("section matrix needs at least one column")
    r = S.cols

    def hstar_fn(ch: Chart) -> np.ndarray:
        return S.gram(ch.mesh())

    def h_fn(ch: Chart) -> np.ndarray:
        gram = np.broadcast_to(S.gram(ch.mesh()), ch.grid_shape + (r, r))
        inv, _ = _cholesky_inverse(gram)
        return np.conj(inv)

    prov = Provenance("section-induced", (S,))
    hstar = MetricField(chart, r, "singular", prov, None, hstar_fn, degeneracy)
    h = MetricField(chart, r, "singular", prov, None, h_fn, degeneracy)
    hstar.dual_partner = h
    h.dual_partner = hstar
    return hstar, h


# ---------------------------------------------------------------------------
# curvature and Chern forms
# ---------------------------------------------------------------------------


def _d_dz_stack(values: np.ndarray, chart: Chart, j: int, conjugate: bool = False) -> np.ndarray:
    """Wirtinger derivative of a grid + trailing (r, r) stack."""
    grid = chart.grid_shape
    full = values if values.shape[:len(grid)] == grid \
        else np.broadcast_to(values, grid + values.shape[values.ndim - 2:])
    h = chart.spacing(j)
    dx = axis_derivative(full, 2 * j, h)
    dy = axis_derivative(full, 2 * j + 1, h)
    return 0.5 * (dx + 1j * dy) if conjugate else 0.5 * (dx - 1j * dy)


def curvature(h: MetricField) -> list[list[FormField]]:
    """Chern-connection curvature dbar(h^{-1} del h): r x r matrix of (1,1)-forms.

    For a rank-1 metric e^{-phi} this reduces to del dbar phi, so
    (i/2pi) * curvature equals ddc(phi).
    """
    if h.regularity != "smooth":
        raise ValueError("curvature needs a smooth metric")
    chart = h.chart
    n = chart.dim
    r = h.rank
    H = h.entries_full()
    inv, flagged = _cholesky_inverse(H)
    if flagged is not None:
        raise ValueError("metric is not positive definite on the chart")
    A = [np.einsum("...ab,...bc->...ac", inv, _d_dz_stack(H, chart, j)) for j in range(n)]
    theta = [[None] * r for _ in range(r)]
    coeff_blocks = {}
    for j in range(n):
        for k in range(n):
            coeff_blocks[(j, k)] = -_d_dz_stack(A[j], chart, k, conjugate=True)
    for a in range(r):
        for b in range(r):
            coeffs = {((j,), (k,)): coeff_blocks[(j, k)][..., a, b]
                      for j in range(n) for k in range(n)}
            theta[a][b] = FormField(chart, 1, 1, coeffs)
    return theta


def chern_forms(h: MetricField, up_to: int) -> list[FormField]:
    """Chern forms c_0..c_up_to as the graded parts of det(Id + (i/2pi) Theta).

    The determinant is expanded over k x k principal minors with
    form-valued entries ((1,1)-forms commute under wedge, so the usual
    Leibniz determinant makes sense).
    """
    n = h.chart.dim
    if up_to > min(h.rank, n):
        raise FormDegreeError(f"c_k defined for k <= min(rank, dim) = {min(h.rank, n)}")
    theta = curvature(h)
    factor = 1j / (2.0 * math.pi)
    X = [[theta[a][b] * factor for b in range(h.rank)] for a in range(h.rank)]
    out = [FormField.constant(h.chart, 1.0)]
    for k in range(1, up_to + 1):
        acc = FormField.zero(h.chart, k, k)
        for subset in itertools.combinations(range(h.rank), k):
            for perm in itertools.permutations(range(k)):
                sign = _perm_sign(perm)
                term = X[subset[0]][subset[perm[0]]]
                for row in range(1, k):
                    term = term * X[subset[row]][subset[perm[row]]]
                acc = acc + float(sign) * term
        out.append(acc)
    return out


def _perm_sign(perm: Sequence[int]) -> int:
    sign = 1
    for i in range(len(perm)):
        for j in range(i + 1, len(perm)):
            if perm[i] > perm[j]:
                sign = -sign
    return sign


def first_chern_via_det(h: MetricField) -> FormField:
    """ddc(log det h*) = -ddc(log det h), the determinant route to c_1.

    Works for singular metrics wherever det h > 0 on the grid; for smooth
    metrics it agrees with chern_forms(h, 1)[1] within stencil tolerance.
    """
    det = h.det_field()
    if np.any(det <= 0):
        raise ValueError("det h must be positive at evaluation nodes")
    u = ScalarField(h.chart, -np.log(det))
    return ddc(u)


def direct_sum(h: MetricField, g: MetricField) -> MetricField:
    """Block-diagonal metric on the direct-sum bundle."""
    if h.chart != g.chart:
        raise ValueError("summands must share the chart")
    r = h.rank + g.rank

    def fn(chart: Chart) -> np.ndarray:
        Hh = np.broadcast_to(np.asarray(h.entry_fn(chart) if h.entry_fn else h.entries_full(), dtype=complex),
                             chart.grid_shape + (h.rank, h.rank))
        Hg = np.broadcast_to(np.asarray(g.entry_fn(chart) if g.entry_fn else g.entries_full(), dtype=complex),
                             chart.grid_shape + (g.rank, g.rank))
        out = np.zeros(chart.grid_shape + (r, r), dtype=complex)
        out[..., :h.rank, :h.rank] = Hh
        out[..., h.rank:, h.rank:] = Hg
        return out

    regularity = "smooth" if (h.regularity == "smooth" and g.regularity == "smooth") else "singular"
    return MetricField(h.chart, r, regularity,
                       Provenance("catalog", ("direct-sum", h.provenance, g.provenance)),
                       None, fn, h.degeneracy or g.degeneracy)


# ---------------------------------------------------------------------------
# Griffiths positivity diagnostic
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GriffithsReport:
    passed: bool
    min_levi: float
    samples: int
    tolerance: float


def griffiths_diagnostic(h: MetricField, samples: int = 12, seed: int = 0,
                         tolerance: float = 1e-8) -> GriffithsReport:
    """Sampled positivity check: the squared dual norm of random constant
    holomorphic sections must be plurisubharmonic.

    The minimum Levi-form eigenvalue over grid nodes equals the infimum of
    the Levi form over complex lines, so a PASS means no violation was
    found at any sampled (node, section, line).  A diagnostic, not a proof.
    """
    dual = dual_metric(h)
    rng = np.random.default_rng(seed)
    worst = np.inf
    margin = 2  # one-sided stencils are noisier; judge interior nodes
    sl = tuple(slice(margin, m - margin) for m in h.chart.grid_shape)
    for _ in range(samples):
        xi = rng.normal(size=h.rank) + 1j * rng.normal(size=h.rank)
        xi /= np.linalg.norm(xi)
        psi = ScalarField(h.chart, dual.quadratic_form(xi))
        worst = min(worst, float(np.min(min_levi_eigenvalue(psi)[sl])))
    return GriffithsReport(worst >= -tolerance, worst, samples, tolerance)


def degeneracy_consistency(h: MetricField, delta: float,
                           on_tol: float = 1e-8, off_floor: float = 1e-10,
                           seed: int = 0) -> bool:
    """Sampled check that det h* vanishes on the declared V and stays
    bounded away from 0 at distance > delta from it."""
    if h.degeneracy is None:
        return True
    hstar = dual_metric(h)
    var = h.degeneracy
    if var.sample_fn is not None:
        rng = np.random.default_rng(seed)
        pts = var.sample_fn(32, rng)
        gram = hstar.entry_fn or (lambda ch: hstar.entries_full())
        for point in pts:
            if any(abs(point[j] - h.chart.center[j]) > h.chart.radii[j]
                   for j in range(h.chart.dim)):
                continue
            zs = [np.asarray(point[j]) for j in range(h.chart.dim)]
            det_on = abs(np.linalg.det(np.asarray(
                _eval_entries(hstar, zs), dtype=complex)))
            if det_on > on_tol:
                return False
    if var.distance_fn is not None:
        dist = var.distance_fn(h.chart.mesh())
        det = np.abs(np.linalg.det(hstar.entries_full()))
        far = np.broadcast_to(dist, h.chart.grid_shape) > delta
        if np.any(far) and float(np.min(det[far])) <= off_floor:
            return False
    return True


def _eval_entries(metric: MetricField, zs) -> np.ndarray:
    if metric.provenance.kind == "section-induced":
        S: SectionMatrix = metric.provenance.detail[0]
        return S.gram(zs)
    # fall back to nearest grid node
    idx = []
    for j, z in enumerate(zs):
        xs = metric.chart.real_axis_nodes(j)
        ys = metric.chart.imag_axis_nodes(j)
        idx += [int(np.argmin(np.abs(xs - z.real))), int(np.argmin(np.abs(ys - z.imag)))]
    return metric.entries_full()[tuple(idx)]


# ---------------------------------------------------------------------------
# catalog
# ---------------------------------------------------------------------------

CATALOG_NAMES = ("flat", "diag-exp", "fubini-study-o1", "sections")


def catalog_metric(name: str, chart: Chart, params: Mapping | None = None) -> MetricField:
    """Catalog metrics addressable by name + parameter map (CLI contract).

    flat             identity metric of rank ``rank`` (default 1)
    diag-exp         diag(exp(-a_i |z|^2)) for weights ``a``; optional
                     constant-unitary conjugation via ``mix_seed``
    fubini-study-o1  rank 1, h = 1/(1 + |z|^2)
    sections         singular metric from a polynomial section matrix
                     (``matrix`` nested coefficient lists, see SectionMatrix);
                     returns the Griffiths-positive side h
    """
    params = dict(params or {})
    if name == "flat":
        r = int(params.pop("rank", 1))
        scale = float(params.pop("scale", 1.0))
        _reject_extra(name, params)
        return MetricField(chart, r, "smooth", Provenance("catalog", ("flat", r)),
                           scale * np.eye(r, dtype=complex), lambda ch, r=r: scale * np.eye(r, dtype=complex))
    if name == "diag-exp":
        weights = tuple(float(w) for w in params.pop("weights", (1.0,)))
        mix_seed = params.pop("mix_seed", None)
        _reject_extra(name, params)
        r = len(weights)
        U = None
        if mix_seed is not None:
            U = _haar_unitary(r, int(mix_seed))

        def fn(ch: Chart) -> np.ndarray:
            s = 0.0
            for Z in ch.mesh():
                s = s + (Z * np.conj(Z)).real
            diag = np.zeros(np.shape(s) + (r, r), dtype=complex)
            for i, w in enumerate(weights):
                diag[..., i, i] = np.exp(-w * s)
            if U is not None:
                diag = np.einsum("ab,...bc,dc->...ad", U, diag, np.conj(U))
            return diag

        return MetricField(chart, r, "smooth",
                           Provenance("catalog", ("diag-exp", weights, mix_seed)), None, fn)
    if name == "fubini-study-o1":
        _reject_extra(name, params)

        def fn(ch: Chart) -> np.ndarray:
            s = 0.0
            for Z in ch.mesh():
                s = s + (Z * np.conj(Z)).real
            return (1.0 / (1.0 + s))[..., None, None]

        return MetricField(chart, 1, "smooth",
                           Provenance("catalog", ("fubini-study-o1",)), None, fn)
    if name == "sections":
        matrix = params.pop("matrix")
        degeneracy = params.pop("degeneracy", None)
        _reject_extra(name, params)
        S = _section_matrix_from_config(matrix, chart.dim)
        _, h = from_sections(S, chart, degeneracy)
        return h
    raise ValueError(f"unknown catalog metric {name!r} (have {CATALOG_NAMES})")


def _reject_extra(name: str, params: Mapping) -> None:
    if params:
        raise ValueError(f"unknown parameters for catalog metric {name!r}: {sorted(params)}")


def _haar_unitary(r: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    ginibre = rng.normal(size=(r, r)) + 1j * rng.normal(size=(r, r))
    Q, R = np.linalg.qr(ginibre)
    return Q * (np.diagonal(R) / np.abs(np.diagonal(R)))


def _section_matrix_from_config(matrix, dim: int) -> SectionMatrix:
    """Nested lists: matrix[i][j] is a list of [re, im, e_1..e_n] monomials."""
    entries = []
    for row in matrix:
        poly_row = []
        for monomials in row:
            coeffs = {}
            for mono in monomials:
                re, im, *exps = mono
                if len(exps) != dim:
                    raise ValueError(f"monomial {mono} has wrong arity for dim {dim}")
                e = tuple(int(x) for x in exps)
                coeffs[e] = coeffs.get(e, 0.0) + complex(re, im)
            poly_row.append(Poly(dim, coeffs))
        entries.append(tuple(poly_row))
    return SectionMatrix.from_polys(entries)
