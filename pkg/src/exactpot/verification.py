"""Exact pointwise checks of A B = 0 and ker A = im B, and constant-rank scans."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .algebra import PolyMatrix, rank_at_point
from .construction import DiffOperator, PotentialResult, potential

SAMPLE_BOUND = 10


@dataclass
class ExactnessReport:
    operator: str
    samples_tested: int
    failures: list = field(default_factory=list)
    rank_histogram: dict = field(default_factory=dict)
    constant_rank_verdict: str = "unknown"
    exactness_verdict: str = "exact"
    skipped: int = 0
    drop_witnesses: list = field(default_factory=list)
    note: str = ""

    @property
    def exact(self) -> bool:
        return self.exactness_verdict == "exact"

    def to_json(self) -> dict:
        return {
            "operator": self.operator,
            "samples": self.samples_tested,
            "failures": self.failures,
            "verdict": self.exactness_verdict,
            "constant_rank": self.constant_rank_verdict,
            "rank_histogram": {str(k): v for k, v in sorted(self.rank_histogram.items())},
            "skipped": self.skipped,
            "drop_witnesses": self.drop_witnesses,
            "note": self.note,
        }


def verify_annihilation(A: DiffOperator | PolyMatrix, B: PolyMatrix) -> bool:
    sym = A.symbol if isinstance(A, DiffOperator) else A
    if sym.cols != B.rows:
        raise ValueError(f"dimension mismatch: A is {sym.shape}, B is {B.shape}")
    return (sym @ B).is_zero()


def _fmt_point(pt) -> list[str]:
    return [str(Fraction(x)) for x in pt]


def verify_exactness(A: DiffOperator, B: PotentialResult | PolyMatrix,
                     points: Sequence[Sequence], operator_id: str | None = None
                     ) -> ExactnessReport:
    """Compare rank A(xi) + rank B(xi) with N at each rational point.

    Points where this sum falls short are recorded as failures together with
    whether c_r vanishes there; only failures off the zero set of c_r make
    the verdict "inexact". The origin is skipped.
    """
    res = B if isinstance(B, PotentialResult) else potential(A)
    Bmat = B.B if isinstance(B, PotentialResult) else B
    report = ExactnessReport(operator_id or A.name or "operator", 0)
    hist: Counter = Counter()
    for pt in points:
        pt = [Fraction(int(x)) if isinstance(x, (int, np.integer)) else Fraction(x) for x in pt]
        if not any(pt):
            report.skipped += 1
            continue
        report.samples_tested += 1
        ra = rank_at_point(A.symbol, pt)
        hist[ra] += 1
        if ra < res.rank:
            report.drop_witnesses.append(_fmt_point(pt))
        rb = rank_at_point(Bmat, pt)
        if ra + rb != A.N:
            cr_zero = res.a_r(pt) == 0
            report.failures.append({"point": _fmt_point(pt), "rank_A": ra, "rank_B": rb,
                                    "c_r_vanishes": cr_zero})
            if not cr_zero:
                report.exactness_verdict = "inexact"
    report.rank_histogram = dict(hist)
    if report.drop_witnesses:
        report.constant_rank_verdict = "no"
    return report


def sample_points(n: int, samples: int, seed: int, bound: int = SAMPLE_BOUND) -> list[tuple]:
    """All +-unit vectors, then nonzero integer vectors uniform in [-bound, bound]^n,
    ``samples`` points in total."""
    pts = []
    for i in range(n):
        for s in (1, -1):
            e = [0] * n
            e[i] = s
            pts.append(tuple(e))
    pts = pts[:samples]
    rng = np.random.default_rng(seed)
    while len(pts) < samples:
        v = rng.integers(-bound, bound + 1, size=n)
        if v.any():
            pts.append(tuple(int(x) for x in v))
    return pts


def constant_rank_scan(A: DiffOperator, samples: int = 1000, seed: int = 0,
                       result: PotentialResult | None = None,
                       operator_id: str | None = None) -> ExactnessReport:
    if samples < 1:
        raise ValueError("samples must be >= 1")
    res = result or potential(A)
    report = verify_exactness(A, res, sample_points(A.n, samples, seed), operator_id)
    if report.drop_witnesses:
        report.constant_rank_verdict = "no"
        report.note = (f"rank drops below the generic rank {res.rank} at "
                       f"{len(report.drop_witnesses)} sampled nonzero points")
    else:
        report.constant_rank_verdict = "yes"
        report.note = (f"no rank drop found among {report.samples_tested} samples; "
                       "sampling cannot prove constant rank")
    return report
