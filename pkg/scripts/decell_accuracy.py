"""Accuracy of the polynomial pseudoinverse and kernel projector against SVD
and eigendecomposition, as a function of the condition number.

    python3 scripts/decell_accuracy.py --trials 200 --seed 0
"""
import argparse
import warnings
from dataclasses import dataclass

import numpy as np

from exactpot.spectral import penrose_residuals, projector_numeric, pseudoinverse_numeric


@dataclass
class Config:
    trials: int = 200
    seed: int = 0
    max_rank: int = 8
    conds: tuple = (4.0, 10.0, 30.0, 100.0, 1e3)


def haar(rng, k):
    q, r = np.linalg.qr(rng.standard_normal((k, k)))
    return q * np.sign(np.diag(r))


def run(cfg: Config):
    warnings.simplefilter("ignore")
    rng = np.random.default_rng(cfg.seed)
    rows = []
    for cond in cfg.conds:
        err = pen = idem = 0.0
        for _ in range(cfg.trials):
            r = int(rng.integers(1, cfg.max_rank + 1))
            m, N = r + int(rng.integers(0, 3)), r + int(rng.integers(0, 3))
            # log-uniform singular values spanning exactly [1, cond]
            s = np.exp(rng.uniform(0, np.log(cond), r))
            s[0], s[-1] = 1.0, cond
            P = haar(rng, m)[:, :r] @ np.diag(s) @ haar(rng, N)[:r, :] / cond
            X = pseudoinverse_numeric(P)
            ref = np.linalg.pinv(P)
            err = max(err, np.linalg.norm(X - ref, 2) / np.linalg.norm(ref, 2))
            pen = max(pen, *penrose_residuals(P, X))
            Q = projector_numeric(P.T @ P)
            idem = max(idem, np.abs(Q @ Q - Q).max())
        rows.append((cond, err, pen, idem))
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=Config.trials)
    ap.add_argument("--seed", type=int, default=Config.seed)
    args = ap.parse_args()
    cfg = Config(trials=args.trials, seed=args.seed)
    print(f"{'cond':>8} {'rel err':>10} {'Penrose':>10} {'Q idem':>10}")
    for cond, err, pen, idem in run(cfg):
        print(f"{cond:8.0e} {err:10.2e} {pen:10.2e} {idem:10.2e}")


if __name__ == "__main__":
    main()
