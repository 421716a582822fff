"""Exterior calculus of complex (p,q)-forms on gridded polydisc charts.

A chart covers a polydisc in C^n with a uniform rectangular grid: complex
axis j contributes two real grid axes (Re z_j at array axis 2j, Im z_j at
array axis 2j+1), each with ``resolution[j]`` nodes.

A (p,q)-form is stored by coefficients on the canonical wedge basis

    dz_I ^ dzbar_J = dz_{i_1} ^ ... ^ dz_{i_p} ^ dzbar_{j_1} ^ ... ^ dzbar_{j_q}

with I, J strictly increasing; all factors of i and 2*pi live inside the
coefficients.  Coefficient arrays may use any shape broadcastable to the
chart grid, which keeps product-structured forms (cut-offs, pullbacks)
cheap.

Derivatives are fourth-order central finite differences (one-sided on the
outermost two layers); scalar fields may carry analytic derivative
callbacks that take precedence.  Reductions use numpy's pairwise
summation, deterministic run to run.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

__all__ = [
    "Chart",
    "Box",
    "Polydisc",
    "FormField",
    "ScalarField",
    "ChartMismatchError",
    "FormDegreeError",
    "SingularStencilError",
    "wedge",
    "del_form",
    "dbar_form",
    "exterior_d",
    "ddc",
    "integrate",
    "coordinate_projection_pullback",
    "graded_merge",
    "merge_sign",
]


class ChartMismatchError(ValueError):
    """Operands live on different charts."""


class FormDegreeError(ValueError):
    """Bidegree out of range for the requested operation."""


class SingularStencilError(ValueError):
    """Finite differencing would cross a flagged singular node."""


# ---------------------------------------------------------------------------
# charts
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Chart:
    """Uniform grid over a polydisc ``prod_j D(center_j, radii_j)``.

    ``resolution[j]`` grid points per real axis of complex coordinate j,
    spacing ``2*radii[j]/(resolution[j]-1)``.
    """

    dim: int
    center: tuple[complex, ...]
    radii: tuple[float, ...]
    resolution: tuple[int, ...]

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError("chart dimension must be >= 1")
        for name, seq in (("center", self.center), ("radii", self.radii),
                          ("resolution", self.resolution)):
            if len(seq) != self.dim:
                raise ValueError(f"{name} must have {self.dim} entries")
        if any(r <= 0 for r in self.radii):
            raise ValueError("radii must be positive")
        if any(m < 8 for m in self.resolution):
            raise ValueError("resolution must be >= 8 per axis")

    @staticmethod
    def square(dim: int, radius: float, resolution: int,
               center: complex | Sequence[complex] = 0j) -> "Chart":
        if isinstance(center, (int, float, complex)):
            centers = (complex(center),) * dim
        else:
            centers = tuple(complex(c) for c in center)
        return Chart(dim, centers, (float(radius),) * dim, (int(resolution),) * dim)

    def spacing(self, j: int) -> float:
        return 2.0 * self.radii[j] / (self.resolution[j] - 1)

    @property
    def spacings(self) -> tuple[float, ...]:
        return tuple(self.spacing(j) for j in range(self.dim))

    @property
    def grid_shape(self) -> tuple[int, ...]:
        shape = []
        for m in self.resolution:
            shape += [m, m]
        return tuple(shape)

    @property
    def num_nodes(self) -> int:
        n = 1
        for m in self.grid_shape:
            n *= m
        return n

    def real_axis_nodes(self, j: int) -> np.ndarray:
        c = self.center[j].real
        return c + np.linspace(-self.radii[j], self.radii[j], self.resolution[j])

    def imag_axis_nodes(self, j: int) -> np.ndarray:
        c = self.center[j].imag
        return c + np.linspace(-self.radii[j], self.radii[j], self.resolution[j])

    def mesh(self) -> tuple[np.ndarray, ...]:
        """Sparse broadcastable complex coordinate arrays Z_1..Z_n."""
        out = []
        nax = 2 * self.dim
        for j in range(self.dim):
            shape_x = [1] * nax
            shape_x[2 * j] = self.resolution[j]
            shape_y = [1] * nax
            shape_y[2 * j + 1] = self.resolution[j]
            x = self.real_axis_nodes(j).reshape(shape_x)
            y = self.imag_axis_nodes(j).reshape(shape_y)
            out.append(x + 1j * y)
        return tuple(out)

    # -- windows -----------------------------------------------------------

    def subchart(self, slices: Sequence[slice]) -> "Chart":
        """Chart restricted to per-real-axis node slices (must stay uniform)."""
        if len(slices) != 2 * self.dim:
            raise ValueError("need one slice per real axis")
        centers, radii, resolution = [], [], []
        for j in range(self.dim):
            sx, sy = slices[2 * j], slices[2 * j + 1]
            xs = self.real_axis_nodes(j)[sx]
            ys = self.imag_axis_nodes(j)[sy]
            if len(xs) != len(ys):
                raise ValueError("window must keep equal Re/Im resolution per axis")
            if len(xs) < 8:
                raise ValueError("window too small (resolution >= 8 per axis)")
            centers.append(0.5 * (xs[0] + xs[-1]) + 0.5j * (ys[0] + ys[-1]))
            radii.append(0.5 * (xs[-1] - xs[0]))
            resolution.append(len(xs))
        return Chart(self.dim, tuple(centers), tuple(radii), tuple(resolution))

    def window_slices(self, center: Sequence[complex], half_width: Sequence[float],
                      margin_cells: int = 4) -> tuple[slice, ...]:
        """Node slices covering the box around ``center`` plus a stencil margin."""
        slices: list[slice] = []
        for j in range(self.dim):
            h = self.spacing(j)
            m = self.resolution[j]
            lengths = []
            for c in (center[j].real, center[j].imag):
                nodes = self.real_axis_nodes(j) if not lengths else self.imag_axis_nodes(j)
                lo = np.searchsorted(nodes, c - half_width[j]) - margin_cells
                hi = np.searchsorted(nodes, c + half_width[j]) + margin_cells
                lengths.append((max(0, int(lo)), min(m, int(hi))))
            # keep Re/Im windows the same length so the window is a Chart
            (xlo, xhi), (ylo, yhi) = lengths
            size = max(xhi - xlo, yhi - ylo, 8)
            xlo, xhi = _fit_window(xlo, xhi, size, m)
            ylo, yhi = _fit_window(ylo, yhi, size, m)
            slices += [slice(xlo, xhi), slice(ylo, yhi)]
        return tuple(slices)


def _fit_window(lo: int, hi: int, size: int, m: int) -> tuple[int, int]:
    size = min(size, m)
    lo = max(0, min(lo, m - size))
    return lo, lo + size


def _same_chart(a: Chart, b: Chart) -> None:
    if a != b:
        raise ChartMismatchError("operands live on different charts")


# ---------------------------------------------------------------------------
# multi-index algebra
# ---------------------------------------------------------------------------


def merge_sign(a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, tuple[int, ...]] | None:
    """Sign and sorted union of two strictly increasing index tuples.

    Returns None when an index repeats (the wedge vanishes).  The sign is
    the parity of the permutation sorting the concatenation ``a + b``.
    """
    if set(a) & set(b):
        return None
    inversions = 0
    for x in a:
        for y in b:
            if x > y:
                inversions += 1
    merged = tuple(sorted(a + b))
    return (-1) ** inversions, merged


Key4 = tuple[tuple[int, ...], tuple[int, ...], tuple[int, ...], tuple[int, ...]]


def graded_merge(k1: Key4, k2: Key4) -> tuple[int, Key4] | None:
    """Wedge two basis elements ``dz_I dzbar_J dw_A dwbar_B`` (fiber blocks
    optional).  Returns (sign, merged key) or None when it vanishes."""
    i1, j1, a1, b1 = k1
    i2, j2, a2, b2 = k2
    mi = merge_sign(i1, i2)
    if mi is None:
        return None
    mj = merge_sign(j1, j2)
    if mj is None:
        return None
    ma = merge_sign(a1, a2)
    if ma is None:
        return None
    mb = merge_sign(b1, b2)
    if mb is None:
        return None
    crossings = (
        len(i2) * (len(j1) + len(a1) + len(b1))
        + len(j2) * (len(a1) + len(b1))
        + len(a2) * len(b1)
    )
    sign = (-1) ** crossings * mi[0] * mj[0] * ma[0] * mb[0]
    return sign, (mi[1], mj[1], ma[1], mb[1])


# ---------------------------------------------------------------------------
# finite differences
# ---------------------------------------------------------------------------

_INTERIOR = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0
_FORWARD0 = np.array([-25.0, 48.0, -36.0, 16.0, -3.0]) / 12.0
_FORWARD1 = np.array([-3.0, -10.0, 18.0, -6.0, 1.0]) / 12.0


def axis_derivative(values: np.ndarray, axis: int, spacing: float) -> np.ndarray:
    """Fourth-order d/dt along one real grid axis, one-sided at the edges."""
    v = np.asarray(values)
    m = v.shape[axis]
    if m < 5:
        raise ValueError("need at least 5 nodes along a differentiated axis")
    v = np.moveaxis(v, axis, 0)
    out = np.empty_like(v)
    out[2:-2] = (v[:-4] - 8.0 * v[1:-3] + 8.0 * v[3:-1] - v[4:]) / 12.0
    for row, coeffs in ((0, _FORWARD0), (1, _FORWARD1)):
        acc = coeffs[0] * v[0]
        for i in range(1, 5):
            acc = acc + coeffs[i] * v[i]
        out[row] = acc
    for row, coeffs in ((-1, _FORWARD0), (-2, _FORWARD1)):
        acc = coeffs[0] * v[-1]
        for i in range(1, 5):
            acc = acc + coeffs[i] * v[-1 - i]
        out[row] = -acc
    return np.moveaxis(out, 0, axis) / spacing


def _broadcast_full(values: np.ndarray, chart: Chart) -> np.ndarray:
    arr = np.asarray(values)
    if arr.shape == chart.grid_shape:
        return arr
    return np.broadcast_to(arr, chart.grid_shape)


def d_dz(values: np.ndarray, chart: Chart, j: int) -> np.ndarray:
    """Holomorphic Wirtinger derivative along complex axis j."""
    full = _broadcast_full(values, chart)
    h = chart.spacing(j)
    dx = axis_derivative(full, 2 * j, h)
    dy = axis_derivative(full, 2 * j + 1, h)
    return 0.5 * (dx - 1j * dy)


def d_dzbar(values: np.ndarray, chart: Chart, j: int) -> np.ndarray:
    """Antiholomorphic Wirtinger derivative along complex axis j."""
    full = _broadcast_full(values, chart)
    h = chart.spacing(j)
    dx = axis_derivative(full, 2 * j, h)
    dy = axis_derivative(full, 2 * j + 1, h)
    return 0.5 * (dx + 1j * dy)


# ---------------------------------------------------------------------------
# fields
# ---------------------------------------------------------------------------


@dataclass
class ScalarField:
    """Scalar samples on a chart, with optional analytic derivative callbacks.

    ``grad_fn(chart) -> [n arrays]`` returns d/dz_j; ``hess_fn(chart) ->
    [[n x n arrays]]`` returns d^2/dz_j dzbar_k.  Callbacks are evaluated on
    the chart handed in, so restricted fields keep exact derivatives.
    """

    chart: Chart
    values: np.ndarray
    grad_fn: Callable[[Chart], Sequence[np.ndarray]] | None = None
    hess_fn: Callable[[Chart], Sequence[Sequence[np.ndarray]]] | None = None
    singular_mask: np.ndarray | None = None

    @staticmethod
    def from_function(chart: Chart, fn: Callable, **callbacks) -> "ScalarField":
        return ScalarField(chart, np.asarray(fn(*chart.mesh())), **callbacks)

    def restrict(self, slices: Sequence[slice]) -> "ScalarField":
        sub = self.chart.subchart(slices)
        values = _broadcast_full(self.values, self.chart)[tuple(slices)]
        mask = None
        if self.singular_mask is not None:
            mask = _broadcast_full(self.singular_mask, self.chart)[tuple(slices)]
        return ScalarField(sub, values, self.grad_fn, self.hess_fn, mask)


class FormField:
    """A (p,q)-form with complex coefficient arrays per basis multi-index."""

    __slots__ = ("chart", "p", "q", "coeffs")

    def __init__(self, chart: Chart, p: int, q: int,
                 coeffs: Mapping[tuple[tuple[int, ...], tuple[int, ...]], np.ndarray] | None = None):
        n = chart.dim
        if not (0 <= p <= n and 0 <= q <= n):
            raise FormDegreeError(f"bidegree ({p},{q}) out of range for dim {n}")
        self.chart = chart
        self.p = p
        self.q = q
        self.coeffs: dict[tuple[tuple[int, ...], tuple[int, ...]], np.ndarray] = {}
        if coeffs:
            for (I, J), arr in coeffs.items():
                I, J = tuple(I), tuple(J)
                _check_multiindex(I, p, n)
                _check_multiindex(J, q, n)
                arr = np.asarray(arr, dtype=complex)
                np.broadcast_shapes(arr.shape, chart.grid_shape)
                self.coeffs[(I, J)] = arr

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero(chart: Chart, p: int, q: int) -> "FormField":
        return FormField(chart, p, q)

    @staticmethod
    def constant(chart: Chart, value: complex) -> "FormField":
        return FormField(chart, 0, 0, {((), ()): np.asarray(complex(value))})

    @staticmethod
    def function(chart: Chart, values: np.ndarray) -> "FormField":
        return FormField(chart, 0, 0, {((), ()): np.asarray(values, dtype=complex)})

    @staticmethod
    def dz(chart: Chart, j: int) -> "FormField":
        return FormField(chart, 1, 0, {(((j,), ())): np.asarray(1.0 + 0j)})

    @staticmethod
    def dzbar(chart: Chart, j: int) -> "FormField":
        return FormField(chart, 0, 1, {(((), (j,))): np.asarray(1.0 + 0j)})

    # -- bookkeeping ---------------------------------------------------------

    @property
    def bidegree(self) -> tuple[int, int]:
        return (self.p, self.q)

    def coefficient(self, I: Iterable[int], J: Iterable[int]) -> np.ndarray:
        return self.coeffs.get((tuple(I), tuple(J)), np.asarray(0.0 + 0j))

    def items(self):
        return self.coeffs.items()

    def map_coefficients(self, fn) -> "FormField":
        return FormField(self.chart, self.p, self.q,
                         {k: fn(v) for k, v in self.coeffs.items()})

    def full_coefficient(self, I, J) -> np.ndarray:
        return _broadcast_full(self.coefficient(I, J), self.chart)

    def sup_norm(self, margin: int = 0) -> float:
        """Max coefficient magnitude over the grid, excluding ``margin``
        boundary layers per real axis."""
        if not self.coeffs:
            return 0.0
        sl = tuple(slice(margin, m - margin if margin else None)
                   for m in self.chart.grid_shape)
        return max(float(np.max(np.abs(self.full_coefficient(*k)[sl])))
                   for k in self.coeffs)

    # -- algebra -------------------------------------------------------------

    def __add__(self, other: "FormField") -> "FormField":
        _same_chart(self.chart, other.chart)
        if self.bidegree != other.bidegree:
            raise FormDegreeError("can only add forms of equal bidegree")
        coeffs = dict(self.coeffs)
        for k, v in other.coeffs.items():
            coeffs[k] = coeffs[k] + v if k in coeffs else v
        return FormField(self.chart, self.p, self.q, coeffs)

    def __sub__(self, other: "FormField") -> "FormField":
        return self + (-1.0) * other

    def __mul__(self, scalar) -> "FormField":
        if isinstance(scalar, FormField):
            return wedge(self, scalar)
        arr = np.asarray(scalar)
        return self.map_coefficients(lambda v: v * arr)

    __rmul__ = __mul__

    def __neg__(self) -> "FormField":
        return (-1.0) * self

    def conjugate(self) -> "FormField":
        """Complex conjugate: a (q,p)-form."""
        out: dict = {}
        for (I, J), arr in self.coeffs.items():
            sign = (-1) ** (len(I) * len(J))
            out[(J, I)] = sign * np.conj(arr)
        return FormField(self.chart, self.q, self.p, out)

    def restrict(self, slices: Sequence[slice]) -> "FormField":
        sub = self.chart.subchart(slices)
        out = {k: _broadcast_full(v, self.chart)[tuple(slices)]
               for k, v in self.coeffs.items()}
        return FormField(sub, self.p, self.q, out)

    # -- (1,1)-form helpers ---------------------------------------------------

    def coefficient_matrix(self) -> np.ndarray:
        """For a (1,1)-form: stack M with form = sum M[...,j,k] dz_j dzbar_k."""
        if self.bidegree != (1, 1):
            raise FormDegreeError("coefficient_matrix needs a (1,1)-form")
        n = self.chart.dim
        out = np.zeros(self.chart.grid_shape + (n, n), dtype=complex)
        for (I, J), arr in self.coeffs.items():
            out[..., I[0], J[0]] = _broadcast_full(arr, self.chart)
        return out

    def levi_matrix(self) -> np.ndarray:
        """Hermitian Hessian H with form = (i/2pi) sum H_jk dz_j dzbar_k."""
        return self.coefficient_matrix() / (1j / (2.0 * math.pi))

    # -- serialization (debugging aid, not a stability contract) -------------

    def to_npz(self, path) -> None:
        payload = {"p": self.p, "q": self.q,
                   "center": np.asarray(self.chart.center),
                   "radii": np.asarray(self.chart.radii),
                   "resolution": np.asarray(self.chart.resolution)}
        for (I, J), arr in self.coeffs.items():
            key = "I" + "_".join(map(str, I)) + "__J" + "_".join(map(str, J))
            payload[key] = _broadcast_full(arr, self.chart)
        np.savez_compressed(path, **payload)

    def to_csv_dir(self, directory) -> None:
        import csv
        import os

        os.makedirs(directory, exist_ok=True)
        for (I, J), arr in self.coeffs.items():
            name = "I" + "-".join(map(str, I)) + "_J" + "-".join(map(str, J)) + ".csv"
            full = _broadcast_full(arr, self.chart)
            with open(os.path.join(directory, name), "w", newline="") as fh:
                writer = csv.writer(fh)
                writer.writerow(["flat_index", "re", "im"])
                flat = full.ravel()
                for idx in range(flat.size):
                    writer.writerow([idx, flat[idx].real, flat[idx].imag])

    def __repr__(self) -> str:
        return f"FormField(p={self.p}, q={self.q}, terms={len(self.coeffs)})"


def _check_multiindex(I: tuple[int, ...], length: int, n: int) -> None:
    if len(I) != length:
        raise FormDegreeError(f"multi-index {I} has wrong length (expected {length})")
    if any(not (0 <= i < n) for i in I):
        raise FormDegreeError(f"multi-index {I} out of range for dim {n}")
    if any(a >= b for a, b in zip(I, I[1:])):
        raise FormDegreeError(f"multi-index {I} must be strictly increasing")


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------


def wedge(a: FormField, b: FormField) -> FormField:
    """Graded-commutative wedge product of two forms on the same chart."""
    _same_chart(a.chart, b.chart)
    n = a.chart.dim
    if a.p + b.p > n or a.q + b.q > n:
        raise FormDegreeError(
            f"wedge degree ({a.p + b.p},{a.q + b.q}) exceeds chart dimension {n}")
    out: dict = {}
    for (I1, J1), c1 in a.coeffs.items():
        for (I2, J2), c2 in b.coeffs.items():
            merged = graded_merge((I1, J1, (), ()), (I2, J2, (), ()))
            if merged is None:
                continue
            sign, (I, J, _, _) = merged
            term = sign * (c1 * c2)
            key = (I, J)
            out[key] = out[key] + term if key in out else term
    return FormField(a.chart, a.p + b.p, a.q + b.q, out)


def del_form(a: FormField) -> FormField:
    """Holomorphic exterior derivative: (p,q) -> (p+1,q)."""
    n = a.chart.dim
    if a.p + 1 > n:
        raise FormDegreeError("del would exceed the chart dimension")
    out: dict = {}
    for (I, J), arr in a.coeffs.items():
        for j in range(n):
            merged = merge_sign((j,), I)
            if merged is None:
                continue
            sign, Inew = merged
            term = sign * d_dz(arr, a.chart, j)
            key = (Inew, J)
            out[key] = out[key] + term if key in out else term
    return FormField(a.chart, a.p + 1, a.q, out)


def dbar_form(a: FormField) -> FormField:
    """Antiholomorphic exterior derivative: (p,q) -> (p,q+1)."""
    n = a.chart.dim
    if a.q + 1 > n:
        raise FormDegreeError("dbar would exceed the chart dimension")
    out: dict = {}
    for (I, J), arr in a.coeffs.items():
        sign_p = (-1) ** len(I)
        for j in range(n):
            merged = merge_sign((j,), J)
            if merged is None:
                continue
            sign, Jnew = merged
            term = sign_p * sign * d_dzbar(arr, a.chart, j)
            key = (I, Jnew)
            out[key] = out[key] + term if key in out else term
    return FormField(a.chart, a.p, a.q + 1, out)


def exterior_d(a: FormField) -> list[FormField]:
    """d = del + dbar; returned as the [(p+1,q), (p,q+1)] components."""
    parts = []
    if a.p + 1 <= a.chart.dim:
        parts.append(del_form(a))
    if a.q + 1 <= a.chart.dim:
        parts.append(dbar_form(a))
    return parts


def d_sup_norm(a: FormField, margin: int = 2) -> float:
    return max((part.sup_norm(margin) for part in exterior_d(a)), default=0.0)


def ddc(u: ScalarField) -> FormField:
    """(i/2pi) del dbar u as a (1,1)-form with hermitian Hessian.

    Uses the analytic Hessian callback when present; otherwise composed
    fourth-order finite differences.  Raises when the sampled field has
    flagged singular nodes and no callback.
    """
    chart = u.chart
    n = chart.dim
    if u.hess_fn is not None:
        hess = u.hess_fn(chart)
        M = [[np.asarray(hess[j][k], dtype=complex) for k in range(n)] for j in range(n)]
    else:
        if u.singular_mask is not None and bool(np.any(u.singular_mask)):
            raise SingularStencilError(
                "singular nodes present and no analytic Hessian callback")
        values = _broadcast_full(np.asarray(u.values), chart)
        dz_rows = [d_dz(values, chart, j) for j in range(n)]
        M = [[d_dzbar(dz_rows[j], chart, k) for k in range(n)] for j in range(n)]
        # hermitize exactly: the continuum matrix is hermitian for real u
        for j in range(n):
            for k in range(j, n):
                sym = 0.5 * (M[j][k] + np.conj(M[k][j]))
                M[j][k] = sym
                if k != j:
                    M[k][j] = np.conj(sym)
                else:
                    M[j][j] = sym.real + 0j
    factor = 1j / (2.0 * math.pi)
    coeffs = {((j,), (k,)): factor * M[j][k] for j in range(n) for k in range(n)}
    return FormField(chart, 1, 1, coeffs)


def min_levi_eigenvalue(u: ScalarField) -> np.ndarray:
    """Smallest eigenvalue field of the complex Hessian of ``u``."""
    H = ddc(u).levi_matrix()
    H = 0.5 * (H + np.conj(np.swapaxes(H, -1, -2)))
    return np.linalg.eigvalsh(H)[..., 0]


# ---------------------------------------------------------------------------
# integration
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Box:
    """Axis-aligned sub-box: per complex axis, (re_lo, re_hi, im_lo, im_hi).

    Bounds snap outward to grid nodes; trapezoid weights on the sub-grid.
    """

    bounds: tuple[tuple[float, float, float, float], ...]

    @staticmethod
    def centered(center: Sequence[complex], half_width: Sequence[float]) -> "Box":
        return Box(tuple(
            (c.real - w, c.real + w, c.imag - w, c.imag + w)
            for c, w in zip((complex(c) for c in center), half_width)))


@dataclass(frozen=True)
class Polydisc:
    """Product of discs |z_j - center_j| <= radii_j; exact cell-overlap weights."""

    center: tuple[complex, ...]
    radii: tuple[float, ...]


def _trapezoid_weights_1d(nodes: np.ndarray, lo: float, hi: float, h: float) -> np.ndarray:
    inside = (nodes >= lo - 1e-12) & (nodes <= hi + 1e-12)
    w = np.zeros(len(nodes))
    idx = np.nonzero(inside)[0]
    if len(idx) == 0:
        return w
    w[idx] = h
    w[idx[0]] = h / 2.0
    w[idx[-1]] = h / 2.0
    if len(idx) == 1:
        w[idx[0]] = 0.0
    return w


def _circle_quadrant_area(x: np.ndarray, y: np.ndarray, R: float) -> np.ndarray:
    """Area of {t^2+s^2<=R^2, 0<=t<=x, 0<=s<=y} for x,y >= 0 (vectorized)."""
    a = np.minimum(x, R)
    t0 = np.clip(np.sqrt(np.maximum(R * R - y * y, 0.0)), 0.0, a)
    prim_a = 0.5 * (a * np.sqrt(np.maximum(R * R - a * a, 0.0))
                    + R * R * np.arcsin(np.clip(a / R, -1.0, 1.0)))
    prim_t0 = 0.5 * (t0 * np.sqrt(np.maximum(R * R - t0 * t0, 0.0))
                     + R * R * np.arcsin(np.clip(t0 / R, -1.0, 1.0)))
    return y * t0 + prim_a - prim_t0


def _circle_rect_area(x0, x1, y0, y1, R: float) -> np.ndarray:
    """Area of the disc of radius R (centered at 0) inside [x0,x1]x[y0,y1]."""

    def F(x, y):
        return (np.sign(x) * np.sign(y)
                * _circle_quadrant_area(np.abs(x), np.abs(y), R))

    return F(x1, y1) - F(x0, y1) - F(x1, y0) + F(x0, y0)


def _disc_cell_weights(nodes_x: np.ndarray, nodes_y: np.ndarray,
                       center: complex, radius: float, h: float) -> np.ndarray:
    """Per-node weights = area of the node's grid cell inside the disc."""
    x = nodes_x - center.real
    y = nodes_y - center.imag
    X0 = (x - h / 2.0)[:, None]
    X1 = (x + h / 2.0)[:, None]
    Y0 = (y - h / 2.0)[None, :]
    Y1 = (y + h / 2.0)[None, :]
    return _circle_rect_area(X0, X1, Y0, Y1, radius)


def integration_weights(chart: Chart, region: Box | Polydisc | None) -> np.ndarray:
    """Full-grid quadrature weight array for the requested region."""
    n = chart.dim
    nax = 2 * n
    total = np.ones((1,) * nax)
    for j in range(n):
        h = chart.spacing(j)
        xs = chart.real_axis_nodes(j)
        ys = chart.imag_axis_nodes(j)
        if region is None:
            w2 = np.outer(_trapezoid_weights_1d(xs, xs[0], xs[-1], h),
                          _trapezoid_weights_1d(ys, ys[0], ys[-1], h))
        elif isinstance(region, Box):
            xlo, xhi, ylo, yhi = region.bounds[j]
            w2 = np.outer(_trapezoid_weights_1d(xs, xlo, xhi, h),
                          _trapezoid_weights_1d(ys, ylo, yhi, h))
        elif isinstance(region, Polydisc):
            w2 = _disc_cell_weights(xs, ys, region.center[j], region.radii[j], h)
        else:
            raise TypeError(f"unknown region type {type(region).__name__}")
        shape = [1] * nax
        shape[2 * j] = len(xs)
        shape[2 * j + 1] = len(ys)
        total = total * w2.reshape(shape)
    return total


def volume_element_factor(n: int) -> complex:
    """dz_1..dz_n dzbar_1..dzbar_n = factor * dV(R^{2n})."""
    return (-1) ** (n * (n - 1) // 2) * (-2j) ** n


def integrate(a: FormField, region: Box | Polydisc | None = None) -> complex:
    """Integral of a top-bidegree (n,n)-form over a region of its chart.

    Default region is the whole chart box with trapezoid weights; Polydisc
    regions use exact disc/cell overlap areas as weights.
    """
    chart = a.chart
    n = chart.dim
    if a.bidegree != (n, n):
        raise FormDegreeError(f"integrate needs bidegree ({n},{n}), got {a.bidegree}")
    top = tuple(range(n))
    coeff = a.coefficient(top, top)
    weights = integration_weights(chart, region)
    value = np.sum(coeff * weights) * volume_element_factor(n)
    return complex(value)


# ---------------------------------------------------------------------------
# coordinate projections
# ---------------------------------------------------------------------------


def coordinate_projection_pullback(g: ScalarField, indices: Sequence[int],
                                   chart: Chart) -> ScalarField:
    """Pull a scalar field on the coordinate factor ``z_I`` back to ``chart``.

    ``g`` lives on a chart of dimension ``len(indices)`` whose axes must
    match the corresponding axes of ``chart``; the result is constant along
    the complementary coordinates.
    """
    indices = tuple(indices)
    if len(indices) != g.chart.dim:
        raise ValueError("index subset must match the factor chart dimension")
    if any(not (0 <= i < chart.dim) for i in indices):
        raise ValueError(f"index subset {indices} out of range")
    if any(a >= b for a, b in zip(indices, indices[1:])):
        raise ValueError("index subset must be strictly increasing")
    for pos, j in enumerate(indices):
        same = (g.chart.center[pos] == chart.center[j]
                and g.chart.radii[pos] == chart.radii[j]
                and g.chart.resolution[pos] == chart.resolution[j])
        if not same:
            raise ChartMismatchError(
                f"factor axis {pos} does not match chart axis {j}")
    src = _broadcast_full(np.asarray(g.values), g.chart)
    # src axes are (x_{I_1}, y_{I_1}, x_{I_2}, ...); with I increasing they
    # keep their relative order, so padding with singleton axes suffices
    shape = [1] * (2 * chart.dim)
    for pos, j in enumerate(indices):
        shape[2 * j] = g.chart.resolution[pos]
        shape[2 * j + 1] = g.chart.resolution[pos]
    return ScalarField(chart, src.reshape(shape))
