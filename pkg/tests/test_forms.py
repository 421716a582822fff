"""Exterior-calculus checks: wedge algebra, derivatives, quadrature.

Closed-form expected values: areas of discs, the radial integral
int_{|z|<R} ddc log(1+|z|^2) = R^2/(1+R^2), and the regularized log
potential int_{|z|<rho} ddc log(|z|^2+eps^2) = rho^2/(rho^2+eps^2).
"""

import math

import numpy as np
import pytest

from cherncurrents import forms as F
from cherncurrents.forms import (
    Box,
    Chart,
    ChartMismatchError,
    FormDegreeError,
    FormField,
    Polydisc,
    ScalarField,
    SingularStencilError,
)


@pytest.fixture(scope="module")
def c1_chart():
    return Chart.square(1, 1.0, 64)


@pytest.fixture(scope="module")
def c2_chart():
    return Chart.square(2, 1.0, 16)


def radial_sq(chart):
    total = 0.0
    for Z in chart.mesh():
        total = total + (Z * np.conj(Z)).real
    return total


class TestChart:
    def test_spacing(self):
        ch = Chart.square(1, 2.0, 9)
        assert ch.spacing(0) == pytest.approx(0.5)

    def test_resolution_floor(self):
        with pytest.raises(ValueError):
            Chart.square(1, 1.0, 7)

    def test_mesh_sparse_shapes(self, c2_chart):
        z1, z2 = c2_chart.mesh()
        assert z1.shape == (16, 16, 1, 1)
        assert z2.shape == (1, 1, 16, 16)

    def test_subchart_preserves_nodes(self, c1_chart):
        sub = c1_chart.subchart((slice(8, 40), slice(8, 40)))
        assert np.allclose(sub.real_axis_nodes(0), c1_chart.real_axis_nodes(0)[8:40])
        assert sub.spacing(0) == pytest.approx(c1_chart.spacing(0))

    def test_window_slices_cover_box(self, c1_chart):
        sl = c1_chart.window_slices((0j,), (0.5,), margin_cells=2)
        sub = c1_chart.subchart(sl)
        assert sub.real_axis_nodes(0)[0] <= -0.5
        assert sub.real_axis_nodes(0)[-1] >= 0.5


class TestWedge:
    def test_repeated_index_vanishes(self, c2_chart):
        dz1 = FormField.dz(c2_chart, 0)
        assert F.wedge(dz1, dz1).coeffs == {}

    def test_graded_commutativity(self, c2_chart):
        rng = np.random.default_rng(7)
        shape = c2_chart.grid_shape
        a = FormField(c2_chart, 1, 0, {((0,), ()): rng.normal(size=shape) + 1j * rng.normal(size=shape),
                                       ((1,), ()): rng.normal(size=shape)})
        b = FormField(c2_chart, 1, 1, {((0,), (1,)): rng.normal(size=shape),
                                       ((1,), (0,)): rng.normal(size=shape)})
        ab = F.wedge(a, b)
        ba = F.wedge(b, a)
        sign = (-1) ** ((a.p + a.q) * (b.p + b.q))
        for key in set(ab.coeffs) | set(ba.coeffs):
            assert np.allclose(ab.full_coefficient(*key),
                               sign * ba.full_coefficient(*key))

    def test_reversed_order_flips_sign(self, c1_chart):
        dz = FormField.dz(c1_chart, 0)
        dzb = FormField.dzbar(c1_chart, 0)
        fwd = F.wedge(dz, dzb).coefficient((0,), (0,))
        rev = F.wedge(dzb, dz).coefficient((0,), (0,))
        assert np.allclose(fwd, -rev)

    def test_constant_one_is_unit(self, c2_chart):
        rng = np.random.default_rng(3)
        a = FormField(c2_chart, 1, 1, {((0,), (0,)): rng.normal(size=c2_chart.grid_shape)})
        one = FormField.constant(c2_chart, 1.0)
        out = F.wedge(one, a)
        assert np.allclose(out.full_coefficient((0,), (0,)),
                           a.full_coefficient((0,), (0,)))

    def test_chart_mismatch_raises(self, c1_chart, c2_chart):
        with pytest.raises(ChartMismatchError):
            F.wedge(FormField.constant(c1_chart, 1.0), FormField.constant(c2_chart, 1.0))

    def test_degree_overflow_raises(self, c1_chart):
        dz = FormField.dz(c1_chart, 0)
        with pytest.raises(FormDegreeError):
            F.wedge(dz, dz * 1.0 + dz)  # (2,0) on a 1-dim chart


class TestDerivatives:
    def test_axis_derivative_fourth_order(self):
        errs, hs = [], []
        for m in (64, 128):
            ch = Chart.square(1, 1.0, m)
            x = ch.real_axis_nodes(0)
            vals = np.sin(2.0 * x)[:, None] * np.ones((1, 8))
            d = F.axis_derivative(vals, 0, ch.spacing(0))
            err = np.abs(d - 2.0 * np.cos(2.0 * x)[:, None])
            errs.append(err[2:-2].max())
            hs.append(ch.spacing(0))
        order = math.log(errs[0] / errs[1]) / math.log(hs[0] / hs[1])
        assert order > 3.9

    def test_ddc_quadratic_exact(self, c1_chart):
        Z, = c1_chart.mesh()
        u = ScalarField(c1_chart, (Z * np.conj(Z)).real)
        coeff = F.ddc(u).full_coefficient((0,), (0,))
        assert np.max(np.abs(coeff - 1j / (2 * math.pi))) < 1e-11

    def test_ddc_pluriharmonic_vanishes(self, c1_chart):
        Z, = c1_chart.mesh()
        u = ScalarField(c1_chart, (Z ** 3).real)
        assert F.ddc(u).sup_norm() < 1e-8

    def test_ddc_radial_integral_closed_form(self):
        # int_{|z|<R} ddc log(1+|z|^2) = R^2/(1+R^2)
        ch = Chart.square(1, 0.9, 128)
        Z, = ch.mesh()
        u = ScalarField(ch, np.log(1.0 + (Z * np.conj(Z)).real))
        for R in (0.4, 0.8):
            got = F.integrate(F.ddc(u), Polydisc((0j,), (R,))).real
            assert got == pytest.approx(R * R / (1 + R * R), abs=2e-5)

    def test_ddc_hermitian_exactly(self, c2_chart):
        z1, z2 = c2_chart.mesh()
        u = ScalarField(c2_chart, (z1 * np.conj(z1)).real + (z1 * np.conj(z2)).real)
        H = F.ddc(u).levi_matrix()
        assert np.array_equal(H, np.conj(np.swapaxes(H, -1, -2)))

    def test_ddc_uses_analytic_callbacks(self, c1_chart):
        # log|z|^2 is singular at 0; the callback path must bypass stencils
        def hess(chart):
            Z, = chart.mesh()
            s = (Z * np.conj(Z)).real
            eps2 = 0.01
            return [[eps2 / (s + eps2) ** 2]]

        Z, = c1_chart.mesh()
        u = ScalarField(c1_chart, np.log((Z * np.conj(Z)).real + 0.01), hess_fn=hess)
        form = F.ddc(u)
        got = form.full_coefficient((0,), (0,))
        want = hess(c1_chart)[0][0] * 1j / (2 * math.pi)
        assert np.allclose(got, want)

    def test_singular_mask_without_callback_raises(self, c1_chart):
        Z, = c1_chart.mesh()
        vals = np.log(np.maximum((Z * np.conj(Z)).real, 1e-300))
        mask = np.zeros(c1_chart.grid_shape, dtype=bool)
        mask[32, 32] = True
        u = ScalarField(c1_chart, vals, singular_mask=mask)
        with pytest.raises(SingularStencilError):
            F.ddc(u)

    def test_dbar_squared_zero(self, c2_chart):
        z1, z2 = c2_chart.mesh()
        f = FormField.function(c2_chart, np.exp(z1) * np.conj(z2) + z2 ** 2)
        ddf = F.dbar_form(F.dbar_form(f))
        assert ddf.sup_norm() < 1e-10

    def test_del_squared_zero(self, c2_chart):
        z1, z2 = c2_chart.mesh()
        f = FormField.function(c2_chart, np.sin(z1.real) + z1 * z2 * np.conj(z1))
        assert F.del_form(F.del_form(f)).sup_norm() < 1e-10

    def test_del_dbar_anticommute(self, c2_chart):
        z1, z2 = c2_chart.mesh()
        f = FormField.function(c2_chart, (z1 * np.conj(z1) * z2).real)
        a = F.dbar_form(F.del_form(f))
        b = F.del_form(F.dbar_form(f))
        diff = a + b
        assert diff.sup_norm() < 1e-9

    def test_leibniz_polynomial_exact(self, c2_chart):
        z1, z2 = c2_chart.mesh()
        a = FormField(c2_chart, 1, 0, {((0,), ()): z1 * np.conj(z2) + 0 * z2})
        b = FormField(c2_chart, 0, 1, {((), (1,)): z2 * z2 + np.conj(z1)})
        lhs = F.exterior_d(F.wedge(a, b))
        da, db = F.exterior_d(a), F.exterior_d(b)
        sign = (-1) ** (a.p + a.q)
        rhs = {}
        for part in lhs:
            rhs[part.bidegree] = part
        for part in da:
            term = F.wedge(part, b)
            rhs[term.bidegree] = rhs[term.bidegree] - term
        for part in db:
            term = sign * F.wedge(a, part)
            rhs[term.bidegree] = rhs[term.bidegree] - term
        for residual in rhs.values():
            assert residual.sup_norm(margin=0) < 1e-9

    def test_leibniz_smooth_within_stencil_tolerance(self):
        ch = Chart.square(1, 1.0, 64)
        Z, = ch.mesh()
        a = FormField.function(ch, np.sin(Z.real) * np.exp(0.5 * Z.imag))
        b = FormField(ch, 0, 1, {((), (0,)): np.cos(0.7 * Z.imag) + 0j})
        lhs = F.del_form(F.wedge(a, b))
        rhs = F.wedge(F.del_form(a), b) + F.wedge(a, F.del_form(b))
        assert (lhs - rhs).sup_norm(margin=2) < 1e-6

    def test_positivity_detector(self, c2_chart):
        z1, z2 = c2_chart.mesh()
        u = ScalarField(c2_chart, (z1 * np.conj(z1) + z2 * np.conj(z2)).real
                        + 0.2 * (z1 * np.conj(z2)).real)
        assert np.min(F.min_levi_eigenvalue(u)) > 0


class TestIntegration:
    def test_constant_form_over_disc(self, c1_chart):
        w = FormField(c1_chart, 1, 1, {((0,), (0,)): np.asarray(1j / (2 * math.pi))})
        got = F.integrate(w, Polydisc((0j,), (1.0,)))
        assert got.real == pytest.approx(1.0, abs=1e-12)
        assert abs(got.imag) < 1e-12

    def test_zero_form(self, c1_chart):
        assert F.integrate(FormField.zero(c1_chart, 1, 1)) == 0

    def test_box_area(self):
        # box edges on grid nodes: radius 1 at 65 nodes puts nodes at k/32
        ch = Chart.square(1, 1.0, 65)
        w = FormField(ch, 1, 1, {((0,), (0,)): np.asarray(1j / (2 * math.pi))})
        got = F.integrate(w, Box(((-0.5, 0.5, -0.5, 0.5),)))
        assert got.real == pytest.approx(1.0 / math.pi, abs=1e-12)

    def test_regularized_log_matches_closed_form(self):
        ch = Chart.square(1, 1.0, 256)
        Z, = ch.mesh()
        rho = 0.5
        for eps in (0.25, 0.1, 0.05):
            u = ScalarField(ch, np.log((Z * np.conj(Z)).real + eps * eps))
            got = F.integrate(F.ddc(u), Polydisc((0j,), (rho,))).real
            want = rho * rho / (rho * rho + eps * eps)
            assert got == pytest.approx(want, abs=1e-4)

    def test_c2_polydisc_volume(self, c2_chart):
        # (i/2pi)^2 dz1 dzb1 dz2 dzb2 over product of unit discs: (1/pi)^2 * (pi*pi)
        coeff = (1j / (2 * math.pi)) ** 2
        # canonical order dz1 dz2 dzb1 dzb2 = -(dz1 dzb1 dz2 dzb2)
        w = FormField(c2_chart, 2, 2, {((0, 1), (0, 1)): np.asarray(-coeff)})
        got = F.integrate(w, Polydisc((0j, 0j), (1.0, 1.0)))
        assert got.real == pytest.approx(1.0, abs=1e-12)

    def test_non_top_degree_rejected(self, c2_chart):
        with pytest.raises(FormDegreeError):
            F.integrate(FormField.zero(c2_chart, 1, 1))

    def test_linear_in_integrand(self, c1_chart):
        rng = np.random.default_rng(11)
        arr1 = rng.normal(size=c1_chart.grid_shape) + 0j
        arr2 = rng.normal(size=c1_chart.grid_shape) + 0j
        f1 = FormField(c1_chart, 1, 1, {((0,), (0,)): arr1})
        f2 = FormField(c1_chart, 1, 1, {((0,), (0,)): arr2})
        lhs = F.integrate(f1 + 2.0 * f2)
        rhs = F.integrate(f1) + 2.0 * F.integrate(f2)
        assert lhs == pytest.approx(rhs, rel=1e-12)


class TestProjectionPullback:
    def test_constant(self, c2_chart):
        g = ScalarField(Chart.square(1, 1.0, 16), np.ones((16, 16)))
        pulled = F.coordinate_projection_pullback(g, (0,), c2_chart)
        assert np.all(F._broadcast_full(pulled.values, c2_chart) == 1.0)

    def test_definition_constant_along_complement(self, c2_chart):
        factor = Chart.square(1, 1.0, 16)
        X, = factor.mesh()
        g = ScalarField(factor, np.exp(-np.abs(X) ** 2).real)
        pulled = F.coordinate_projection_pullback(g, (0,), c2_chart)
        full = F._broadcast_full(pulled.values, c2_chart)
        assert np.allclose(full[:, :, 0, 0], full[:, :, 7, 3])

    def test_second_axis(self, c2_chart):
        factor = Chart.square(1, 1.0, 16)
        X, = factor.mesh()
        g = ScalarField(factor, X.real)
        pulled = F.coordinate_projection_pullback(g, (1,), c2_chart)
        full = F._broadcast_full(pulled.values, c2_chart)
        assert np.allclose(full[0, 0], full[5, 9])
        assert np.allclose(full[0, 0, :, 0], factor.real_axis_nodes(0))

    def test_index_out_of_range(self, c2_chart):
        g = ScalarField(Chart.square(1, 1.0, 16), np.ones((16, 16)))
        with pytest.raises(ValueError):
            F.coordinate_projection_pullback(g, (2,), c2_chart)

    def test_bump_product_matches_direct_quadrature(self, c2_chart):
        # beta-style term chi1(z1) chi2(z2) i dz1 dzb1 paired with a smooth
        # (1,1)-form, vs an independently coded dense 4d trapezoid sum
        factor0 = Chart.square(1, 1.0, 16)
        factor1 = Chart.square(1, 1.0, 16)
        X0, = factor0.mesh()
        X1, = factor1.mesh()
        chi1 = np.where(np.abs(X0) < 0.8, np.exp(-1.0 / np.maximum(0.64 - np.abs(X0) ** 2, 1e-12)), 0.0).real
        chi2 = np.where(np.abs(X1) < 0.8, np.exp(-1.0 / np.maximum(0.64 - np.abs(X1) ** 2, 1e-12)), 0.0).real
        p1 = F.coordinate_projection_pullback(ScalarField(factor0, chi1), (0,), c2_chart)
        p2 = F.coordinate_projection_pullback(ScalarField(factor1, chi2), (1,), c2_chart)
        beta = FormField(c2_chart, 1, 1,
                         {((0,), (0,)): 1j * p1.values * p2.values})
        z1, z2 = c2_chart.mesh()
        gvals = (1.0 + 0.3 * (z2 * np.conj(z2)).real + 0.1 * z1.real) + 0j
        T = FormField(c2_chart, 1, 1, {((1,), (1,)): 1j * gvals})
        got = F.integrate(F.wedge(beta, T)).real

        # oracle: dense trapezoid of 4 * chi1 * chi2 * g over the 4d grid
        h = c2_chart.spacing(0)
        w1 = np.ones(16); w1[0] = w1[-1] = 0.5
        w4 = (np.einsum("a,b,c,d->abcd", w1, w1, w1, w1) * h ** 4)
        integrand = 4.0 * chi1[:, :, None, None] * chi2[None, None, :, :] * gvals
        want = float(np.sum(integrand.real * w4))
        assert got == pytest.approx(want, abs=1e-6)


class TestSerialization:
    def test_npz_round_values(self, tmp_path, c1_chart):
        rng = np.random.default_rng(5)
        arr = rng.normal(size=c1_chart.grid_shape) + 1j * rng.normal(size=c1_chart.grid_shape)
        form = FormField(c1_chart, 1, 1, {((0,), (0,)): arr})
        path = tmp_path / "form.npz"
        form.to_npz(path)
        data = np.load(path)
        assert np.allclose(data["I0__J0"], arr)

    def test_csv_dir(self, tmp_path, c1_chart):
        small = Chart.square(1, 1.0, 8)
        form = FormField(small, 1, 1, {((0,), (0,)): np.ones(small.grid_shape)})
        form.to_csv_dir(tmp_path / "form")
        assert (tmp_path / "form" / "I0_J0.csv").exists()
