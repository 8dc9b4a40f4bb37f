"""Potential operators, kernel projections and pseudoinverses of polynomial symbols.

Given a symbol A(xi) with homogeneous rows, :func:`potential` returns a
polynomial N x N matrix B(xi) with ``A B == 0`` identically and
``ker A(xi) = im B(xi)`` wherever A(xi) has maximal rank.  B is the matrix
polynomial Q(M) in the Gram matrix M of the row-homogenized symbol, where
Q(t) is the monic polynomial whose roots are the nonzero eigenvalues of M.
Its coefficients are read off the characteristic polynomial of M, because
det(t I - M) = t^(N - r) Q(t) for a rank-r positive semidefinite M.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .algebra import (
    INHOMOGENEOUS,
    ZERO,
    MultiPoly,
    PolyMatrix,
    homogeneity_degree,
    monomials_of_degree,
    trace,
)


class InvalidOperatorError(ValueError):
    """The symbol cannot be treated as a row-homogeneous operator."""


class ZeroRowWarning(UserWarning):
    pass


def _row_degree(row: Sequence[MultiPoly], i: int):
    degs = set()
    for p in row:
        d = homogeneity_degree(p)
        if d == INHOMOGENEOUS:
            raise InvalidOperatorError(f"row {i}: entry {p} is not homogeneous")
        if d != ZERO:
            degs.add(d)
    if len(degs) > 1:
        raise InvalidOperatorError(f"row {i}: entries have different degrees {sorted(degs)}")
    return degs.pop() if degs else None


def column_degrees(X: PolyMatrix) -> list[int]:
    """Per-column homogeneity degrees; raises if a column is mixed or zero."""
    out = []
    for j in range(X.cols):
        degs = set()
        for i in range(X.rows):
            d = homogeneity_degree(X[i, j])
            if d == INHOMOGENEOUS:
                raise InvalidOperatorError(f"column {j}: entry {X[i, j]} is not homogeneous")
            if d != ZERO:
                degs.add(d)
        if len(degs) != 1:
            raise InvalidOperatorError(
                f"column {j} is not homogeneous" if degs else f"column {j} is zero"
            )
        out.append(degs.pop())
    return out


@dataclass(frozen=True)
class DiffOperator:
    """A polynomial symbol with validated per-row homogeneity degrees.

    ``row_degrees[i]`` is None exactly when row i is identically zero.
    """

    symbol: PolyMatrix
    row_degrees: tuple
    col_degrees: Optional[tuple] = None
    name: str = ""

    @classmethod
    def from_symbol(cls, symbol: PolyMatrix, name: str = "", row_degrees=None,
                    sort_rows: bool = True) -> "DiffOperator":
        degs = [_row_degree(symbol.row(i), i) for i in range(symbol.rows)]
        if row_degrees is not None:
            row_degrees = list(row_degrees)
            if len(row_degrees) != symbol.rows:
                raise InvalidOperatorError(
                    f"{len(row_degrees)} row degrees given for {symbol.rows} rows")
            for i, (given, found) in enumerate(zip(row_degrees, degs)):
                if found is not None and given != found:
                    raise InvalidOperatorError(
                        f"row {i}: declared degree {given}, entries have degree {found}")
        rows = list(range(symbol.rows))
        if sort_rows:
            rows.sort(key=lambda i: -1 if degs[i] is None else degs[i])
        sym = PolyMatrix([symbol.row(i) for i in rows], symbol.n)
        try:
            cdeg = tuple(column_degrees(sym))
        except InvalidOperatorError:
            cdeg = None
        return cls(sym, tuple(degs[i] for i in rows), cdeg, name)

    @property
    def n(self) -> int:
        return self.symbol.n

    @property
    def m(self) -> int:
        return self.symbol.rows

    @property
    def N(self) -> int:
        return self.symbol.cols

    @property
    def h_max(self) -> int:
        return max((d for d in self.row_degrees if d is not None), default=0)

    def is_zero(self) -> bool:
        return all(d is None for d in self.row_degrees)

    def without_zero_rows(self) -> "DiffOperator":
        keep = [i for i, d in enumerate(self.row_degrees) if d is not None]
        if len(keep) == self.m:
            return self
        if not keep:
            raise InvalidOperatorError("operator is identically zero")
        sym = PolyMatrix([self.symbol.row(i) for i in keep], self.n)
        return DiffOperator(sym, tuple(self.row_degrees[i] for i in keep), self.col_degrees,
                            self.name)


def homogenize(A: DiffOperator) -> DiffOperator:
    """Lift every row to degree ``h_max`` by multiplying with all monomials
    of the missing degree. The kernel of the symbol is unchanged at every
    nonzero xi."""
    if any(d is None for d in A.row_degrees):
        zero_rows = [i for i, d in enumerate(A.row_degrees) if d is None]
        raise InvalidOperatorError(f"rows {zero_rows} are zero; their degree is undefined")
    hm = A.h_max
    rows, degs = [], []
    for i, h in enumerate(A.row_degrees):
        row = A.symbol.row(i)
        if h == hm:
            rows.append(row)
        else:
            for alpha in monomials_of_degree(A.n, hm - h):
                mono = MultiPoly.monomial(alpha)
                rows.append([p * mono for p in row])
        degs.extend([hm] * (len(rows) - len(degs)))
    if len(rows) == A.m:
        return A
    return DiffOperator(PolyMatrix(rows, A.n), tuple(degs), A.col_degrees, A.name)


def gram(A_tilde) -> PolyMatrix:
    """M = A^T A (real coefficients, so transpose is the adjoint)."""
    X = A_tilde.symbol if isinstance(A_tilde, DiffOperator) else A_tilde
    return X.T @ X


def char_coeffs(M: PolyMatrix) -> list[MultiPoly]:
    """Coefficients c_0..c_N of det(t I - M) = sum_i c_i t^(N-i) (Faddeev-LeVerrier)."""
    if M.rows != M.cols:
        raise ValueError(f"characteristic polynomial of a {M.rows}x{M.cols} matrix")
    N = M.rows
    ident = PolyMatrix.identity(N, M.n)
    coeffs = [MultiPoly.constant(1, M.n)]
    Bk = PolyMatrix.zeros(N, N, M.n)
    for k in range(1, N + 1):
        Bk = M @ Bk + ident.scale(coeffs[-1])
        coeffs.append(trace(M @ Bk) * Fraction(-1, k))
    # Cayley-Hamilton: the next iterate must vanish
    assert (M @ Bk + ident.scale(coeffs[-1])).is_zero()
    return coeffs


def generic_rank(coeffs: Sequence[MultiPoly]) -> int:
    """Largest i with c_i not identically zero (Gram matrices are PSD, so
    this is the maximal rank of the symbol)."""
    return max(i for i, c in enumerate(coeffs) if not c.is_zero())


def matrix_polynomial(M: PolyMatrix, coeffs: Sequence[MultiPoly]) -> PolyMatrix:
    """sum_j coeffs[j] * M^(len-1-j), evaluated by Horner's rule."""
    ident = PolyMatrix.identity(M.rows, M.n)
    H = ident.scale(coeffs[0])
    for c in coeffs[1:]:
        H = H @ M + ident.scale(c)
    return H


@dataclass(frozen=True)
class PotentialResult:
    B: PolyMatrix
    rank: int
    char_coeffs: tuple
    a_r: MultiPoly
    degree: Optional[int]        # None when B is the zero matrix
    nominal_degree: int          # 2 * r * h_max
    gram: Optional[PolyMatrix] = field(default=None, repr=False)

    def to_json(self) -> dict:
        from .algebra import matrix_to_json, poly_to_json

        return {
            "B": matrix_to_json(self.B),
            "r": self.rank,
            "degree": "zero matrix" if self.degree is None else self.degree,
            "char_coeffs": [poly_to_json(c) for c in self.char_coeffs],
        }


def _reduce_content(B: PolyMatrix) -> PolyMatrix:
    from math import gcd, lcm

    contents = [e.content() for e in B.entries() if not e.is_zero()]
    if not contents:
        return B
    num = 0
    for c in contents:
        num = gcd(num, c.numerator)
    den = lcm(*(c.denominator for c in contents))
    return B.scale(Fraction(den, num))


def potential(A: DiffOperator, reduce_content: bool = False) -> PotentialResult:
    N, n = A.N, A.n
    if A.is_zero():
        coeffs = tuple([MultiPoly.constant(1, n)] + [MultiPoly.zero(n)] * N)
        return PotentialResult(PolyMatrix.identity(N, n), 0, coeffs, coeffs[0], 0, 0)
    if any(d is None for d in A.row_degrees):
        warnings.warn(f"dropping zero rows of {A.name or 'operator'}", ZeroRowWarning,
                      stacklevel=2)
        A = A.without_zero_rows()
    M = gram(homogenize(A))
    coeffs = char_coeffs(M)
    r = generic_rank(coeffs)
    B = matrix_polynomial(M, coeffs[: r + 1])
    if reduce_content:
        B = _reduce_content(B)
    nominal = 2 * r * A.h_max
    if B.is_zero():
        degree = None
    else:
        degs = {homogeneity_degree(e) for e in B.entries() if not e.is_zero()}
        # the degree claim; a failure here is an implementation bug
        assert degs == {nominal}, (degs, nominal)
        degree = nominal
    return PotentialResult(B, r, tuple(coeffs), coeffs[r], degree, nominal, M)


@dataclass(frozen=True)
class RationalMatrixFunction:
    """numerator(xi) / denominator(xi) with a polynomial matrix numerator."""

    numerator: PolyMatrix
    denominator: MultiPoly

    def __post_init__(self):
        if self.denominator.is_zero():
            raise ValueError("denominator is identically zero")

    def evaluate(self, point):
        den = self.denominator(point)
        if den == 0:
            raise ZeroDivisionError(f"denominator vanishes at {tuple(point)}")
        num = self.numerator.evaluate(point)
        if isinstance(num, list):
            return [[x / den for x in r] for r in num]
        return num / den

    def evaluate_batch(self, pts):
        den = self.denominator(pts)
        return self.numerator.evaluate_batch(pts) / den[:, None, None]


def _sign(r: int) -> int:
    return -1 if r % 2 else 1


def kernel_projection_symbolic(A: DiffOperator) -> RationalMatrixFunction:
    """Orthogonal projector onto ker A(xi), valid where A(xi) has maximal rank.

    Returned as Q(M) / a_r with both sides multiplied by (-1)^r, so the
    denominator is the product of the nonzero eigenvalues of M and hence
    positive on the maximal-rank set.
    """
    res = potential(A)
    s = _sign(res.rank)
    return RationalMatrixFunction(res.B.scale(s), res.a_r * s)


def decell_pseudoinverse_symbolic(P: PolyMatrix) -> RationalMatrixFunction:
    """Moore-Penrose inverse of a polynomial matrix as a rational function:

        P^+ = -(1/a_r) * sum_{i=1..r} a_{r-i} P^T (P P^T)^(i-1)

    with a_i the characteristic coefficients of P P^T.
    """
    n = P.n
    M = P @ P.T
    coeffs = char_coeffs(M)
    r = generic_rank(coeffs)
    if r == 0:
        return RationalMatrixFunction(PolyMatrix.zeros(P.cols, P.rows, n),
                                      MultiPoly.constant(1, n))
    H = matrix_polynomial(M, coeffs[:r])
    s = _sign(r)
    return RationalMatrixFunction((P.T @ H).scale(-s), coeffs[r] * s)
