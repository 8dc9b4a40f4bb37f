"""Exact multivariate polynomials and polynomial matrices over the rationals.

Coefficients are :class:`fractions.Fraction`; exponent vectors are tuples of
non-negative ints. Everything here is immutable.
"""
from __future__ import annotations

from fractions import Fraction
from itertools import product
from math import gcd, lcm
from numbers import Rational
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

Scalar = Union[int, Fraction]
Exps = tuple

INHOMOGENEOUS = "inhomogeneous"
ZERO = "zero"


def _as_fraction(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, (int, Rational)):
        return Fraction(c)
    if isinstance(c, str):
        return Fraction(c)
    raise TypeError(f"exact coefficient required, got {type(c).__name__}")


def _grlex_key(exps: Exps):
    return (-sum(exps), tuple(-e for e in exps))


class MultiPoly:
    """Sparse polynomial in ``n`` variables with rational coefficients."""

    __slots__ = ("n", "_terms", "_hash")

    def __init__(self, n: int, terms: Mapping[Exps, Scalar] | None = None):
        if n < 0:
            raise ValueError("variable count must be non-negative")
        clean = {}
        for exps, c in (terms or {}).items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != n:
                raise ValueError(f"exponent {exps} has length {len(exps)}, expected {n}")
            if any(e < 0 for e in exps):
                raise ValueError(f"negative exponent in {exps}")
            c = _as_fraction(c)
            if c:
                clean[exps] = clean.get(exps, 0) + c
                if not clean[exps]:
                    del clean[exps]
        self.n = n
        self._terms = dict(sorted(clean.items(), key=lambda kv: _grlex_key(kv[0])))
        self._hash = None

    # -- constructors -------------------------------------------------------
    @classmethod
    def zero(cls, n: int) -> "MultiPoly":
        return cls(n)

    @classmethod
    def constant(cls, c: Scalar, n: int) -> "MultiPoly":
        return cls(n, {(0,) * n: c})

    @classmethod
    def variable(cls, i: int, n: int) -> "MultiPoly":
        if not 0 <= i < n:
            raise IndexError(f"variable index {i} out of range for n={n}")
        e = [0] * n
        e[i] = 1
        return cls(n, {tuple(e): 1})

    @classmethod
    def monomial(cls, exps: Sequence[int], c: Scalar = 1) -> "MultiPoly":
        return cls(len(exps), {tuple(exps): c})

    # -- basic queries ------------------------------------------------------
    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def __len__(self):
        return len(self._terms)

    def total_degree(self) -> int:
        """Largest total degree of a stored term; -1 for the zero polynomial."""
        return max((sum(e) for e in self._terms), default=-1)

    def content(self) -> Fraction:
        """Positive rational c with self / c having coprime integer coefficients."""
        if not self._terms:
            return Fraction(0)
        den = lcm(*(c.denominator for c in self._terms.values()))
        num = 0
        for c in self._terms.values():
            num = gcd(num, c.numerator * (den // c.denominator))
        return Fraction(num, den)

    # -- arithmetic ---------------------------------------------------------
    def _coerce(self, other) -> "MultiPoly":
        if isinstance(other, MultiPoly):
            if other.n != self.n:
                raise ValueError(f"variable-count mismatch: {self.n} vs {other.n}")
            return other
        return MultiPoly.constant(_as_fraction(other), self.n)

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self._terms)
        for e, c in other._terms.items():
            out[e] = out.get(e, 0) + c
        return MultiPoly(self.n, out)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly(self.n, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, MultiPoly):
            c = _as_fraction(other)
            return MultiPoly(self.n, {e: c * v for e, v in self._terms.items()})
        other = self._coerce(other)
        out: dict = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return MultiPoly(self.n, out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        # only division by a nonzero scalar is exact in this ring
        c = _as_fraction(other)
        if not c:
            raise ZeroDivisionError("polynomial division by zero")
        return self * (1 / c)

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative powers are not polynomials")
        out = MultiPoly.constant(1, self.n)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, MultiPoly):
            return self.n == other.n and self._terms == other._terms
        try:
            return self == MultiPoly.constant(_as_fraction(other), self.n)
        except TypeError:
            return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.n, tuple(self._terms.items())))
        return self._hash

    # -- evaluation ---------------------------------------------------------
    def __call__(self, point):
        return poly_eval(self, point)

    def __repr__(self):
        return f"MultiPoly({self.n}, {self._terms!r})"

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for exps, c in self._terms.items():
            mono = "*".join(
                f"x{i + 1}" if e == 1 else f"x{i + 1}^{e}" for i, e in enumerate(exps) if e
            )
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")


def poly_mul(p: MultiPoly, q: MultiPoly) -> MultiPoly:
    if p.n != q.n:
        raise ValueError(f"variable-count mismatch: {p.n} vs {q.n}")
    return p * q


def poly_eval(p: MultiPoly, point):
    """Evaluate ``p`` at ``point``.

    Exact (Fraction) for int/Fraction coordinates. Floats or complex numbers
    give a Python complex/float; a numpy array of shape (K, n) gives an array
    of K values.
    """
    if isinstance(point, np.ndarray) and point.ndim == 2:
        if point.shape[1] != p.n:
            raise ValueError(f"point length {point.shape[1]} != n={p.n}")
        return _eval_batch(p, point)
    point = list(point)
    if len(point) != p.n:
        raise ValueError(f"point length {len(point)} != n={p.n}")
    exact = all(isinstance(x, Rational) and not isinstance(x, bool) for x in point)
    real = all(not isinstance(x, complex) and not np.iscomplexobj(x) for x in point)
    if exact:
        point = [Fraction(int(x.numerator), int(x.denominator)) for x in point]
        total = Fraction(0)
    else:
        point = [complex(x) for x in point]
        total = 0j
    for exps, c in p.items():
        term = c if exact else complex(c)
        for x, e in zip(point, exps):
            if e:
                term *= x**e
        total += term
    if not exact and real:
        return total.real
    return total


def _eval_batch(p: MultiPoly, pts: np.ndarray) -> np.ndarray:
    dtype = np.result_type(pts.dtype, np.float64)
    out = np.zeros(pts.shape[0], dtype=dtype)
    for exps, c in p.items():
        term = np.full(pts.shape[0], float(c), dtype=dtype)
        for k, e in enumerate(exps):
            if e:
                term = term * pts[:, k] ** e
        out += term
    return out


def homogeneity_degree(p: MultiPoly):
    """Common total degree of all terms, ``"inhomogeneous"`` or ``"zero"``."""
    if p.is_zero():
        return ZERO
    degs = {sum(e) for e in p._terms}
    if len(degs) == 1:
        return degs.pop()
    return INHOMOGENEOUS


def monomials_of_degree(n: int, d: int) -> list[tuple]:
    """All exponent vectors of length n and total degree d, grlex-ordered."""
    out = [e for e in product(range(d + 1), repeat=n) if sum(e) == d]
    return sorted(out, key=_grlex_key)


class PolyMatrix:
    """Dense matrix of :class:`MultiPoly` sharing one variable count."""

    __slots__ = ("rows", "cols", "n", "_entries")

    def __init__(self, entries: Sequence[Sequence[MultiPoly]], n: int | None = None):
        entries = [list(r) for r in entries]
        rows = len(entries)
        cols = len(entries[0]) if rows else 0
        if rows == 0 or cols == 0:
            raise ValueError("PolyMatrix needs at least one row and one column")
        if any(len(r) != cols for r in entries):
            raise ValueError("ragged rows")
        ns = {e.n for r in entries for e in r if isinstance(e, MultiPoly)}
        if n is None:
            if len(ns) != 1:
                raise ValueError(f"entries disagree on variable count: {sorted(ns)}")
            n = ns.pop()
        elif ns - {n}:
            raise ValueError(f"entries disagree on variable count: {sorted(ns | {n})}")
        self.rows, self.cols, self.n = rows, cols, n
        self._entries = tuple(
            tuple(e if isinstance(e, MultiPoly) else MultiPoly.constant(e, n) for e in r)
            for r in entries
        )

    @classmethod
    def identity(cls, size: int, n: int) -> "PolyMatrix":
        one, zero = MultiPoly.constant(1, n), MultiPoly.zero(n)
        return cls([[one if i == j else zero for j in range(size)] for i in range(size)], n)

    @classmethod
    def zeros(cls, rows: int, cols: int, n: int) -> "PolyMatrix":
        z = MultiPoly.zero(n)
        return cls([[z] * cols for _ in range(rows)], n)

    @classmethod
    def from_constants(cls, values, n: int) -> "PolyMatrix":
        return cls([[MultiPoly.constant(_as_fraction(v), n) for v in r] for r in values], n)

    @property
    def shape(self):
        return (self.rows, self.cols)

    def __getitem__(self, ij):
        i, j = ij
        return self._entries[i][j]

    def row(self, i: int) -> tuple:
        return self._entries[i]

    def tolist(self) -> list[list[MultiPoly]]:
        return [list(r) for r in self._entries]

    def entries(self) -> Iterable[MultiPoly]:
        for r in self._entries:
            yield from r

    def is_zero(self) -> bool:
        return all(e.is_zero() for e in self.entries())

    @property
    def T(self) -> "PolyMatrix":
        return mat_transpose(self)

    def __matmul__(self, other):
        return mat_mul(self, other)

    def __add__(self, other: "PolyMatrix"):
        if self.shape != other.shape:
            raise ValueError(f"dimension mismatch: {self.shape} vs {other.shape}")
        return PolyMatrix(
            [[a + b for a, b in zip(r, s)] for r, s in zip(self._entries, other._entries)],
            self.n,
        )

    def __neg__(self):
        return PolyMatrix([[-a for a in r] for r in self._entries], self.n)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "PolyMatrix":
        """Multiply every entry by a scalar or a polynomial."""
        return PolyMatrix([[a * c for a in r] for r in self._entries], self.n)

    def __eq__(self, other):
        return isinstance(other, PolyMatrix) and self.n == other.n and self._entries == other._entries

    def __hash__(self):
        return hash((self.n, self._entries))

    def __repr__(self):
        return f"PolyMatrix({self.rows}x{self.cols}, n={self.n})"

    def __str__(self):
        return "\n".join("[" + ", ".join(str(e) for e in r) + "]" for r in self._entries)

    def evaluate(self, point):
        """Entrywise :func:`poly_eval`; exact points give nested lists of Fractions."""
        vals = [[poly_eval(e, point) for e in r] for r in self._entries]
        if any(isinstance(v, (float, complex)) for r in vals for v in r):
            return np.array(vals, dtype=complex)
        return vals

    def evaluate_batch(self, pts: np.ndarray) -> np.ndarray:
        """Evaluate at K points (array (K, n)); returns array (K, rows, cols)."""
        pts = np.asarray(pts)
        dtype = np.result_type(pts.dtype, np.float64)
        out = np.zeros((pts.shape[0], self.rows, self.cols), dtype=dtype)
        for i, r in enumerate(self._entries):
            for j, e in enumerate(r):
                if not e.is_zero():
                    out[:, i, j] = _eval_batch(e, pts)
        return out


def mat_mul(X: PolyMatrix, Y: PolyMatrix) -> PolyMatrix:
    if X.cols != Y.rows:
        raise ValueError(f"dimension mismatch: {X.shape} @ {Y.shape}")
    if X.n != Y.n:
        raise ValueError(f"variable-count mismatch: {X.n} vs {Y.n}")
    zero = MultiPoly.zero(X.n)
    out = []
    for i in range(X.rows):
        row = []
        for j in range(Y.cols):
            acc = zero
            for k in range(X.cols):
                a, b = X[i, k], Y[k, j]
                if a and b:
                    acc = acc + a * b
            row.append(acc)
        out.append(row)
    return PolyMatrix(out, X.n)


def mat_transpose(X: PolyMatrix) -> PolyMatrix:
    return PolyMatrix([[X[i, j] for i in range(X.rows)] for j in range(X.cols)], X.n)


def trace(X: PolyMatrix) -> MultiPoly:
    if X.rows != X.cols:
        raise ValueError("trace of a non-square matrix")
    acc = MultiPoly.zero(X.n)
    for i in range(X.rows):
        acc = acc + X[i, i]
    return acc


# -- exact rank ----------------------------------------------------------------

def exact_rank(rows: Sequence[Sequence[Scalar]]) -> int:
    """Rank of a rational matrix by fraction-free (Bareiss) elimination."""
    mat = []
    for r in rows:
        r = [_as_fraction(x) for x in r]
        den = lcm(*(x.denominator for x in r)) if r else 1
        mat.append([x.numerator * (den // x.denominator) for x in r])
    if not mat or not mat[0]:
        return 0
    m, ncols = len(mat), len(mat[0])
    rank, prev = 0, 1
    for col in range(ncols):
        piv = next((i for i in range(rank, m) if mat[i][col] != 0), None)
        if piv is None:
            continue
        mat[rank], mat[piv] = mat[piv], mat[rank]
        p = mat[rank][col]
        for i in range(rank + 1, m):
            a = mat[i][col]
            for j in range(col, ncols):
                # Bareiss step; the division is exact
                mat[i][j] = (p * mat[i][j] - a * mat[rank][j]) // prev
        prev = p
        rank += 1
        if rank == m:
            break
    return rank


def rank_at_point(X: PolyMatrix, point: Sequence[Scalar]) -> int:
    if len(point) != X.n:
        raise ValueError(f"point length {len(point)} != n={X.n}")
    if not all(isinstance(x, Rational) for x in point):
        raise TypeError("rank_at_point needs an exact rational point")
    return exact_rank(X.evaluate(point))


# -- JSON interchange ------------------------------------------------------------

def poly_to_json(p: MultiPoly) -> list[dict]:
    return [{"c": f"{c.numerator}/{c.denominator}", "e": list(e)} for e, c in p.items()]


def poly_from_json(obj, n: int) -> MultiPoly:
    if not isinstance(obj, list):
        raise ValueError("polynomial must be a list of {c, e} terms")
    terms: dict = {}
    for t in obj:
        if not isinstance(t, dict) or "c" not in t or "e" not in t:
            raise ValueError(f"malformed term {t!r}")
        e = tuple(t["e"])
        if len(e) != n or not all(isinstance(x, int) and x >= 0 for x in e):
            raise ValueError(f"bad exponent vector {t['e']!r} for n={n}")
        terms[e] = terms.get(e, 0) + _as_fraction(str(t["c"]))
    return MultiPoly(n, terms)


def matrix_to_json(X: PolyMatrix) -> dict:
    return {
        "rows": X.rows,
        "cols": X.cols,
        "n": X.n,
        "entries": [[poly_to_json(e) for e in r] for r in X.tolist()],
    }


def matrix_from_json(obj: dict) -> PolyMatrix:
    for key in ("rows", "cols", "n", "entries"):
        if key not in obj:
            raise ValueError(f"missing key {key!r}")
    rows, cols, n = obj["rows"], obj["cols"], obj["n"]
    ent = obj["entries"]
    if len(ent) != rows or any(len(r) != cols for r in ent):
        raise ValueError(f"entries do not match declared shape {rows}x{cols}")
    return PolyMatrix([[poly_from_json(p, n) for p in r] for r in ent], n)
