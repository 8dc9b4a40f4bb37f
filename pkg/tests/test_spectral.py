import warnings

import numpy as np
import pytest

from exactpot import catalog
from exactpot.algebra import MultiPoly, PolyMatrix
from exactpot.construction import potential
from exactpot.spectral import (
    GridField,
    NonzeroMeanWarning,
    NotConstantRankError,
    RankDropError,
    SpectralGapWarning,
    apply_symbol,
    build_multiplier_plan,
    column_estimate_check,
    decomposition_report,
    frequencies,
    helmholtz_decompose,
    penrose_residuals,
    projector_numeric,
    pseudoinverse_numeric,
    random_bandlimited,
    row_normalized_pinv,
    sobolev_negative_norm,
    symbol_at,
)

from conftest import xs


def op(name):
    return catalog.get(name).operator


def plan_for(name, shape, **kw):
    A = op(name)
    return A, build_multiplier_plan(A, potential(A), shape, **kw)


def at_kappa(plan, k):
    idx = np.nonzero((plan.kappa == np.array(k)).all(axis=1))[0][0]
    return idx


class TestProjectorNumeric:
    def test_rank_one(self):
        P = projector_numeric(np.array([[1.0, 1.0], [1.0, 1.0]]))
        np.testing.assert_allclose(P, [[0.5, -0.5], [-0.5, 0.5]], atol=1e-14)

    def test_identity_and_zero(self):
        np.testing.assert_allclose(projector_numeric(np.eye(3)), 0, atol=1e-14)
        np.testing.assert_allclose(projector_numeric(np.zeros((3, 3))), np.eye(3))

    def test_paths_agree_on_indefinite(self):
        M = np.diag([2.0, -1.0, 0.0])
        for path in ("polynomial", "spectral"):
            np.testing.assert_allclose(projector_numeric(M, path=path), np.diag([0, 0, 1.0]),
                                       atol=1e-14)

    def test_ambiguous_gap_flagged(self):
        with pytest.warns(SpectralGapWarning):
            projector_numeric(np.diag([1.0, 1e-9]))

    def test_not_symmetric(self):
        with pytest.raises(ValueError):
            projector_numeric(np.array([[1.0, 2.0], [0.0, 1.0]]))

    def test_stacked(self):
        M = np.stack([np.eye(2), np.zeros((2, 2)), np.ones((2, 2))])
        P = projector_numeric(M)
        assert P.shape == (3, 2, 2)
        np.testing.assert_allclose(P[1], np.eye(2))


class TestPseudoinverseNumeric:
    def test_examples(self):
        np.testing.assert_allclose(pseudoinverse_numeric(np.array([[1.0, 1.0], [0.0, 0.0]])),
                                   [[0.5, 0], [0.5, 0]], atol=1e-15)
        np.testing.assert_allclose(pseudoinverse_numeric(np.diag([2.0, 0.0])),
                                   np.diag([0.5, 0]), atol=1e-15)
        np.testing.assert_allclose(pseudoinverse_numeric(np.eye(3)), np.eye(3), atol=1e-15)

    def test_zero(self):
        np.testing.assert_array_equal(pseudoinverse_numeric(np.zeros((2, 3))), np.zeros((3, 2)))

    def test_complex_against_svd(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            m, n, r = rng.integers(1, 5), rng.integers(1, 5), rng.integers(0, 4)
            r = min(r, m, n)
            U = np.linalg.qr(rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m)))[0]
            V = np.linalg.qr(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))[0]
            P = U[:, :r] @ np.diag(rng.uniform(0.5, 2, r)) @ V[:r, :]
            X = pseudoinverse_numeric(P)
            assert np.linalg.norm(X - np.linalg.pinv(P), 2) < 1e-10
            assert max(penrose_residuals(P, X)) < 1e-10


class TestPlan:
    def test_div_axis(self):
        _, plan = plan_for("div3", (4, 4, 4))
        np.testing.assert_allclose(plan.proj[at_kappa(plan, (1, 0, 0))], np.diag([0, 1, 1.0]),
                                   atol=1e-14)

    def test_curl_axis(self):
        _, plan = plan_for("curl3", (4, 4, 4))
        np.testing.assert_allclose(plan.proj[at_kappa(plan, (0, 1, 0))], np.diag([0, 1, 0.0]),
                                   atol=1e-14)

    @pytest.mark.parametrize("name", ["div3", "curl3", "grad_scalar", "zero"])
    def test_zero_frequency_policy(self, name):
        A, plan = plan_for(name, (4, 4, 4))
        i = at_kappa(plan, (0, 0, 0))
        np.testing.assert_array_equal(plan.proj[i], np.eye(A.N))
        assert not plan.a_pinv[i].any() and not plan.b_pinv[i].any()

    @pytest.mark.parametrize("name,shape", [("div3", (8, 8, 8)), ("curl3", (8, 8, 8)),
                                            ("mixed", (16, 16)), ("div2", (16, 16))])
    def test_projector_laws(self, name, shape):
        A, plan = plan_for(name, shape)
        P = plan.proj
        PH = np.conj(np.swapaxes(P, -1, -2))
        assert np.abs(P @ P - P).max() < 1e-10
        assert np.abs(P - PH).max() < 1e-10
        anorm = np.linalg.norm(plan.a_symbol, axis=(1, 2))[:, None, None] + 1e-300
        assert np.abs(plan.a_symbol @ P / anorm).max() < 1e-10

    def test_wave_refused(self):
        with pytest.raises(NotConstantRankError):
            plan_for("wave2", (8, 8))

    def test_rank_drop_named(self):
        with pytest.raises(RankDropError, match="kappa"):
            plan_for("wave2", (8, 8), check_samples=0, use_cache=False)

    def test_cached(self):
        _, p1 = plan_for("div2", (8, 8))
        _, p2 = plan_for("div2", (8, 8))
        assert p1 is p2


class TestHomogeneity:
    def kappas(self, n, k=40):
        rng = np.random.default_rng(1)
        out = rng.integers(-6, 7, size=(k, n))
        return out[np.any(out != 0, axis=1)]

    @pytest.mark.parametrize("name", ["div3", "curl3", "mixed"])
    def test_projector_zero_homogeneous(self, name):
        from exactpot.construction import homogenize
        A = op(name)
        k = self.kappas(A.n)
        At = homogenize(A).symbol

        def proj(kk):
            Z = symbol_at(At, kk)
            return projector_numeric(np.conj(np.swapaxes(Z, -1, -2)) @ Z)

        for lam in (2, 3):
            assert np.abs(proj(lam * k) - proj(k)).max() < 1e-12

    def test_row_normalized_pinv_columns(self):
        A = op("mixed")
        k = self.kappas(2)
        C1, C3 = row_normalized_pinv(A, k), row_normalized_pinv(A, 3 * k)
        for i, h in enumerate(A.row_degrees):
            scale = np.abs(C1[:, :, i]).max()
            assert np.abs(C3[:, :, i] * 3 ** h - C1[:, :, i]).max() < 1e-10 * scale

    def test_row_normalized_pinv_same_action(self):
        A = op("mixed")
        k = self.kappas(2)
        Az = symbol_at(A.symbol, k)
        np.testing.assert_allclose(row_normalized_pinv(A, k) @ Az,
                                   pseudoinverse_numeric(Az) @ Az, atol=1e-12)


def gradient_field(shape, seed, perp=False):
    phi = random_bandlimited(shape, 1, 3, seed)
    kappa = frequencies(shape)
    g = 2j * np.pi * kappa * phi.fourier()
    if perp:
        g = np.stack([-g[..., 1], g[..., 0]], axis=-1)
    return GridField.from_fourier(g)


class TestHelmholtz:
    def test_solenoidal_is_kept(self):
        A = op("div2")
        v = gradient_field((32, 32), 0, perp=True)
        v1, v2, u = helmholtz_decompose(A, None, v)
        assert v2.l2_norm() / v.l2_norm() < 1e-8
        assert (v1 - v).l2_norm() / v.l2_norm() < 1e-12

    def test_gradient_goes_to_v2(self):
        A = op("div2")
        v = gradient_field((32, 32), 1)
        v1, v2, u = helmholtz_decompose(A, None, v)
        assert v1.l2_norm() / v.l2_norm() < 1e-12
        assert (v2 - v).l2_norm() / v.l2_norm() < 1e-12

    def test_curl_against_eigen_oracle(self):
        A = op("curl3")
        v = random_bandlimited((16, 16, 16), 3, 3, seed=2, mean_zero=False)
        v1, v2, u = helmholtz_decompose(A, None, v)
        # oracle: project each coefficient onto span(kappa) (curl-free part)
        vh = v.fourier().reshape(-1, 3)
        k = frequencies(v.shape).reshape(-1, 3).astype(float)
        k2 = (k ** 2).sum(axis=1)
        nz = k2 > 0
        oracle = vh.copy()
        oracle[nz] = k[nz] * (np.einsum("ki,ki->k", k[nz], vh[nz]) / k2[nz])[:, None]
        v1h = v1.fourier().reshape(-1, 3)
        assert np.abs(v1h - oracle).max() < 1e-12 * np.abs(vh).max()
        rep = decomposition_report(A, potential(A), v, v1, v2, u)
        assert rep["reassembly_error"] < 1e-12
        assert rep["Av1_residual"] < 1e-8
        assert rep["Bu_minus_v1"] < 1e-8
        assert rep["energy_defect"] < 1e-10

    def test_frequency_orthogonality(self):
        A = op("div3")
        v = random_bandlimited((8, 8, 8), 3, 3, seed=4)
        v1, v2, _ = helmholtz_decompose(A, None, v)
        inner = np.einsum("ki,ki->k", np.conj(v1.fourier().reshape(-1, 3)),
                          v2.fourier().reshape(-1, 3))
        assert np.abs(inner).max() < 1e-14

    def test_refinement_stability(self):
        A = op("curl3")
        outs = []
        for s in (16, 32):
            v = random_bandlimited((s,) * 3, 3, 4, seed=9)
            v1, _, _ = helmholtz_decompose(A, None, v)
            h = v1.fourier()
            # gather the band-limited coefficients, which live on both grids
            ks = np.arange(-4, 5)
            outs.append(h[np.ix_(ks % s, ks % s, ks % s)])
        assert np.abs(outs[0] - outs[1]).max() < 1e-10

    def test_channel_mismatch(self):
        with pytest.raises(ValueError):
            helmholtz_decompose(op("div3"), None, random_bandlimited((8, 8, 8), 2, 2, 0))


class TestSobolev:
    def test_unit_shell(self):
        coeffs = np.zeros((16, 16, 1), dtype=complex)
        coeffs[1, 0, 0] = coeffs[-1, 0, 0] = 1 / np.sqrt(2)
        f = GridField.from_fourier(coeffs)
        assert sobolev_negative_norm(f, 1) == pytest.approx(1 / (2 * np.pi), rel=1e-13)

    def test_zero(self):
        assert sobolev_negative_norm(GridField(np.zeros((8, 8, 1))), 2) == 0

    def test_h0_is_l2_of_mean_zero_part(self):
        f = random_bandlimited((16, 16), 2, 3, seed=3, mean_zero=False)
        g = GridField(f.data - f.mean())
        with pytest.warns(NonzeroMeanWarning):
            val = sobolev_negative_norm(f, 0)
        assert val == pytest.approx(g.l2_norm(), rel=1e-12)


class TestColumnEstimate:
    def test_gradient_ratio_one(self):
        B = PolyMatrix([[x] for x in xs(3)])
        u = random_bandlimited((16, 16, 16), 1, 3, seed=0)
        rep = column_estimate_check(B, u)
        assert rep.ratios[0][0] == pytest.approx(1.0, rel=1e-12)
        assert rep.bound[0] == pytest.approx(1.0, rel=1e-12)

    def test_div_potential_bounded(self):
        res = potential(op("div3"))
        us = [random_bandlimited((16, 16, 16), 3, 3, seed=s) for s in range(5)]
        rep = column_estimate_check(res, us)
        assert rep.col_degrees == [2, 2, 2]
        assert all(0 < r <= b * (1 + 1e-9) for row in rep.ratios for r, b in zip(row, rep.bound))

    def test_zero_field_undefined(self):
        res = potential(op("div3"))
        rep = column_estimate_check(res, GridField(np.zeros((8, 8, 8, 3))))
        assert rep.ratios == [[None] * 3]
        assert rep.to_json()["max_ratio"] == ["undefined"] * 3

    def test_inhomogeneous_column_refused(self):
        x1, x2 = xs(2)
        with pytest.raises(ValueError):
            column_estimate_check(PolyMatrix([[x1, x2], [x1 * x1, x2]]),
                                  GridField(np.zeros((8, 8, 2))))


class TestGridField:
    def test_fft_round_trip(self):
        f = random_bandlimited((16, 8), 2, 3, seed=0)
        g = GridField.from_fourier(f.fourier())
        assert (f - g).l2_norm() <= 1e-12 * f.l2_norm()

    def test_binary_round_trip(self, tmp_path):
        f = GridField(np.arange(16 * 3).reshape(4, 4, 3) * (1 + 2j))
        f.save(tmp_path / "f.grid")
        g = GridField.load(tmp_path / "f.grid")
        np.testing.assert_array_equal(f.data, g.data)
        raw = (tmp_path / "f.grid").read_bytes()
        assert raw.startswith(b"GRIDFLD1") and b'"layout": "row-major"' in raw

    def test_csv_round_trip(self):
        f = random_bandlimited((4, 4), 2, 1, seed=1)
        g = GridField.from_csv(f.to_csv())
        np.testing.assert_array_equal(f.data, g.data)

    def test_power_of_two(self):
        with pytest.raises(ValueError):
            GridField(np.zeros((6, 6, 1)))

    def test_apply_symbol_matches_finite_formula(self):
        # d/dx1 of sin(2 pi x1) is 2 pi cos(2 pi x1)
        s = 16
        x = np.arange(s) / s
        X1, _ = np.meshgrid(x, x, indexing="ij")
        f = GridField(np.sin(2 * np.pi * X1)[..., None])
        d = apply_symbol(PolyMatrix([[MultiPoly.variable(0, 2)]]), f)
        np.testing.assert_allclose(d.data[..., 0], 2 * np.pi * np.cos(2 * np.pi * X1), atol=1e-12)
