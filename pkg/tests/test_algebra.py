from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from exactpot.algebra import (
    MultiPoly,
    PolyMatrix,
    exact_rank,
    homogeneity_degree,
    mat_mul,
    mat_transpose,
    matrix_from_json,
    matrix_to_json,
    poly_eval,
    poly_from_json,
    poly_mul,
    poly_to_json,
    rank_at_point,
)
from exactpot import catalog

from conftest import polys, random_points, rational_points, xs


def convolve(p, q):
    # brute-force oracle, independent of MultiPoly.__mul__
    out = {}
    for e1, c1 in p.terms.items():
        for e2, c2 in q.terms.items():
            e = tuple(a + b for a, b in zip(e1, e2))
            out[e] = out.get(e, 0) + c1 * c2
    return {e: c for e, c in out.items() if c}


class TestPolyMul:
    def test_difference_of_squares(self):
        x1, x2 = xs(2)
        assert poly_mul(x1 + x2, x1 - x2) == x1 * x1 - x2 * x2

    def test_zero_absorbs(self):
        x1, x2 = xs(2)
        assert poly_mul(MultiPoly.zero(2), x1 + 3 * x2).is_zero()

    def test_square_of_wave_symbol(self):
        x1, x2 = xs(2)
        w = x1 * x1 - x2 * x2
        expected = MultiPoly(2, {(4, 0): 1, (2, 2): -2, (0, 4): 1})
        assert poly_mul(w, w) == expected
        assert poly_mul(w, w).terms == convolve(w, w)

    def test_mismatch(self):
        with pytest.raises(ValueError):
            poly_mul(MultiPoly.variable(0, 2), MultiPoly.variable(0, 3))

    @given(polys(), polys())
    def test_matches_convolution(self, p, q):
        assert (p * q).terms == convolve(p, q)

    @given(polys(), polys())
    def test_degree_additive(self, p, q):
        if p and q:
            assert (p * q).total_degree() == p.total_degree() + q.total_degree()


class TestRingAxioms:
    @given(polys(), polys(), polys())
    @settings(max_examples=50)
    def test_associative(self, p, q, s):
        assert (p * q) * s == p * (q * s)
        assert (p + q) + s == p + (q + s)

    @given(polys(), polys(), polys())
    @settings(max_examples=50)
    def test_distributive(self, p, q, s):
        assert p * (q + s) == p * q + p * s

    @given(polys(), polys())
    def test_commutative(self, p, q):
        assert p * q == q * p
        assert p + q == q + p

    @given(polys())
    def test_additive_inverse(self, p):
        assert (p - p).is_zero()


class TestEval:
    def test_on_cone(self):
        x1, x2 = xs(2)
        assert poly_eval(x1 * x1 - x2 * x2, [1, 1]) == 0

    def test_substitution(self):
        x1, x2 = xs(2)
        assert poly_eval(x1 * x1 - x2 * x2, [2, 1]) == 3

    def test_unit_vector(self):
        x1, x2 = xs(2)
        val = poly_eval(x1 * x1 + x2 * x2, [Fraction(3, 5), Fraction(4, 5)])
        assert val == 1 and isinstance(val, Fraction)

    def test_float_and_complex(self):
        x1, x2 = xs(2)
        p = x1 * x1 - x2 * x2
        assert poly_eval(p, [2.0, 1.0]) == pytest.approx(3.0)
        assert poly_eval(p, [1j, 0]) == pytest.approx(-1)

    def test_batch(self):
        x1, x2 = xs(2)
        p = x1 * x1 * x2 + Fraction(1, 2)
        pts = np.array([[1.0, 2.0], [3.0, -1.0]])
        np.testing.assert_allclose(poly_eval(p, pts), [2.5, -8.5])

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            poly_eval(MultiPoly.variable(0, 2), [1, 2, 3])

    def test_homomorphism_random_points(self):
        rng = np.random.default_rng(3)
        x1, x2 = xs(2)
        p = x1 * x1 * x2 - Fraction(3, 2) * x2 + 7
        q = x1 - Fraction(1, 3) * x2 * x2 * x2
        for pt in random_points(2, 100, seed=4):
            assert poly_eval(p * q, pt) == poly_eval(p, pt) * poly_eval(q, pt)
            assert poly_eval(p + q, pt) == poly_eval(p, pt) + poly_eval(q, pt)

    @given(polys(), polys(), rational_points())
    def test_homomorphism_property(self, p, q, pt):
        assert poly_eval(p * q, pt) == poly_eval(p, pt) * poly_eval(q, pt)


class TestHomogeneity:
    def test_cases(self):
        x1, x2 = xs(2)
        assert homogeneity_degree(x1 * x1 - x2 * x2) == 2
        assert homogeneity_degree(x1 + x2 * x2) == "inhomogeneous"
        assert homogeneity_degree(MultiPoly.zero(2)) == "zero"
        assert homogeneity_degree(MultiPoly.constant(5, 2)) == 0


def curl_symbol():
    return catalog.get("curl3").operator.symbol


class TestMatrices:
    def test_curl_times_transpose(self):
        x = xs(3)
        C = curl_symbol()
        sq = x[0] * x[0] + x[1] * x[1] + x[2] * x[2]
        expected = PolyMatrix([[(sq if i == j else 0) - x[i] * x[j] for j in range(3)]
                               for i in range(3)])
        assert mat_mul(C, mat_transpose(C)) == expected
        for pt in random_points(3, 5, seed=0):
            lhs = np.array(mat_mul(C, C.T).evaluate(pt), dtype=object)
            c = np.array(C.evaluate(pt), dtype=object)
            assert (lhs == c.dot(c.T)).all()

    def test_identity(self):
        C = curl_symbol()
        assert C @ PolyMatrix.identity(3, 3) == C

    def test_div_outer_product(self):
        x = xs(3)
        d = PolyMatrix([x])
        assert d.T @ d == PolyMatrix([[a * b for b in x] for a in x])

    def test_transpose_of_product(self):
        C = curl_symbol()
        D = PolyMatrix([xs(3)]).T @ PolyMatrix([xs(3)])
        assert (C @ D).T == D.T @ C.T

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            PolyMatrix([xs(3)]) @ PolyMatrix([xs(3)])


class TestRank:
    def test_div(self):
        assert rank_at_point(PolyMatrix([xs(3)]), [1, 2, 3]) == 1

    def test_wave_on_cone(self):
        x1, x2 = xs(2)
        assert rank_at_point(PolyMatrix([[x1 * x1 - x2 * x2]]), [1, 1]) == 0

    def test_curl_axis(self):
        assert rank_at_point(curl_symbol(), [0, 0, 1]) == 2

    def test_float_point_rejected(self):
        with pytest.raises(TypeError):
            rank_at_point(curl_symbol(), [0.5, 0, 1])

    def test_against_svd(self):
        rng = np.random.default_rng(11)
        for _ in range(200):
            m, n, r = rng.integers(1, 7), rng.integers(1, 7), rng.integers(0, 6)
            X = rng.integers(-3, 4, size=(m, r)) @ rng.integers(-3, 4, size=(r, n))
            expected = int(np.sum(np.linalg.svd(X.astype(float), compute_uv=False) > 1e-8))
            assert exact_rank(X.tolist()) == expected

    @given(st.lists(st.lists(st.fractions(-3, 3, max_denominator=3), min_size=4, max_size=4),
                    min_size=1, max_size=5))
    def test_row_scaling_invariant(self, rows):
        scaled = [[x * (i + 2) for x in r] for i, r in enumerate(rows)]
        assert exact_rank(rows) == exact_rank(scaled)
        assert exact_rank(rows) == exact_rank([list(c) for c in zip(*rows)])


class TestJson:
    def test_round_trip(self):
        x1, x2 = xs(2)
        p = Fraction(-3, 7) * x1 * x2 * x2 + 2
        assert poly_from_json(poly_to_json(p), 2) == p
        assert poly_to_json(p)[0] == {"c": "-3/7", "e": [1, 2]}
        X = PolyMatrix([[p, x1], [MultiPoly.zero(2), x2]])
        assert matrix_from_json(matrix_to_json(X)) == X

    def test_bad_exponent(self):
        with pytest.raises(ValueError):
            poly_from_json([{"c": "1/1", "e": [1]}], 2)

    def test_shape_mismatch(self):
        obj = matrix_to_json(PolyMatrix([xs(2)]))
        obj["rows"] = 2
        with pytest.raises(ValueError):
            matrix_from_json(obj)
