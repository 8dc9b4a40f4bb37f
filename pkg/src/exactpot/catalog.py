"""Named operators with known answers."""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .algebra import MultiPoly, PolyMatrix, matrix_from_json, matrix_to_json, rank_at_point
from .construction import DiffOperator, potential
from .verification import verify_annihilation


class CatalogError(LookupError):
    pass


@dataclass(frozen=True)
class CatalogEntry:
    id: str
    operator: DiffOperator
    expected_generic_rank: int
    expected_B_degree: Optional[int]     # None: B is the zero matrix
    known_B_up_to_image: Optional[PolyMatrix]
    constant_rank_expected: bool
    notes: str = ""


def _vars(n):
    return [MultiPoly.variable(i, n) for i in range(n)]


def _gradient_projector_complement(n):
    # xi xi^T - |xi|^2 I
    x = _vars(n)
    sq = sum(xi * xi for xi in x[1:]) + x[0] * x[0]
    return PolyMatrix([[x[i] * x[j] - (sq if i == j else 0) for j in range(n)]
                       for i in range(n)], n)


def _build() -> dict:
    entries = {}

    def add(id, symbol, r, deg, known, cr, notes=""):
        op = DiffOperator.from_symbol(symbol, name=id)
        entries[id] = CatalogEntry(id, op, r, deg, known, cr, notes)

    x1, x2, x3 = _vars(3)
    z = MultiPoly.zero(3)
    add("div3", PolyMatrix([[x1, x2, x3]]), 1, 2, _gradient_projector_complement(3), True,
        "divergence in R^3; B projects onto the orthogonal complement of xi")
    add("curl3", PolyMatrix([[z, -x3, x2], [x3, z, -x1], [-x2, x1, z]]), 2, 4,
        PolyMatrix([[a * b for b in (x1, x2, x3)] for a in (x1, x2, x3)]), True,
        "curl in R^3; B = |xi|^2 xi xi^T, i.e. gradient after Laplacian")
    add("grad_scalar", PolyMatrix([[x1], [x2], [x3]]), 1, None,
        PolyMatrix.zeros(1, 1, 3), True, "gradient of a scalar; injective, so B = 0")
    add("zero", PolyMatrix([[z, z, z]]), 0, 0, PolyMatrix.identity(3, 3), True,
        "A = 0; everything is in the kernel")

    y1, y2 = _vars(2)
    add("div2", PolyMatrix([[y1, y2]]), 1, 2, _gradient_projector_complement(2), True,
        "divergence in R^2")
    add("wave2", PolyMatrix([[y1 * y1 - y2 * y2]]), 1, None, PolyMatrix.zeros(1, 1, 2), False,
        "1D wave operator; rank drops on the light cone |xi_1| = |xi_2|")
    add("mixed", PolyMatrix([[y1, y2], [y1 * y1, y1 * y2]]), 1, 4,
        _gradient_projector_complement(2).scale(y1 * y1 + y1 * y1 + y2 * y2), True,
        "rows of degree 1 and 2 sharing the kernel xi^perp")
    return entries


_ENTRIES = _build()
_VERIFIED: set = set()


def list_ids() -> list[str]:
    return list(_ENTRIES)


def verify_entry(entry: CatalogEntry, points: int = 50, seed: int = 0) -> None:
    """Check stored expectations against a fresh construction; raises CatalogError."""
    res = potential(entry.operator)
    A = entry.operator
    if res.rank != entry.expected_generic_rank:
        raise CatalogError(f"{entry.id}: generic rank {res.rank} != {entry.expected_generic_rank}")
    if res.degree != entry.expected_B_degree:
        raise CatalogError(f"{entry.id}: B degree {res.degree} != {entry.expected_B_degree}")
    if not verify_annihilation(A, res.B):
        raise CatalogError(f"{entry.id}: A B is not zero")
    known = entry.known_B_up_to_image
    if known is None:
        return
    rng = np.random.default_rng(seed)
    joint = PolyMatrix([list(res.B.row(i)) + list(known.row(i)) for i in range(A.N)], A.n)
    checked = 0
    while checked < points:
        pt = [int(v) for v in rng.integers(-10, 11, size=A.n)]
        if res.a_r(pt) == 0:
            continue
        rb = rank_at_point(res.B, pt)
        if rank_at_point(known, pt) != rb or rank_at_point(joint, pt) != rb:
            raise CatalogError(f"{entry.id}: image of B disagrees with stored potential at {pt}")
        checked += 1


def get(id: str, verify: bool = True) -> CatalogEntry:
    try:
        entry = _ENTRIES[id]
    except KeyError:
        raise CatalogError(f"unknown operator id {id!r}; known: {', '.join(_ENTRIES)}") from None
    if verify and id not in _VERIFIED:
        verify_entry(entry)
        _VERIFIED.add(id)
    return entry


# -- operator file format ----------------------------------------------------------

def operator_to_json(op: DiffOperator) -> dict:
    return {
        "id": op.name,
        "symbol": matrix_to_json(op.symbol),
        "row_degrees": list(op.row_degrees),
    }


def operator_from_json(obj: dict) -> DiffOperator:
    """Accepts either {"id", "symbol", "row_degrees"} or a bare matrix object."""
    if "symbol" in obj:
        sym = matrix_from_json(obj["symbol"])
        return DiffOperator.from_symbol(sym, name=obj.get("id", ""),
                                         row_degrees=obj.get("row_degrees"))
    return DiffOperator.from_symbol(matrix_from_json(obj), name=obj.get("id", ""))


def export(id: str) -> str:
    return json.dumps(operator_to_json(get(id).operator), indent=2)
