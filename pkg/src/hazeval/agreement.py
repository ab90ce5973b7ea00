"""Agreement statistics: percent agreement, Fleiss' kappa, Spearman correlation.

All three are deterministic functions of their label/score inputs and involve
no model calls. Spearman uses average ranks for ties and a two-sided
t-distribution p-value; the same implementation backs the proxy-sensitivity
correlation analysis elsewhere in the package.
"""

from __future__ import annotations

import numpy as np
from scipy import stats as _scipy_stats


def percent_agreement(labels_a: list, labels_b: list) -> float:
    """Fraction of positions where both raters chose the same label."""
    if len(labels_a) != len(labels_b):
        raise ValueError(f"length mismatch: {len(labels_a)} vs {len(labels_b)}")
    if not labels_a:
        raise ValueError("empty label sequences")
    matches = sum(1 for a, b in zip(labels_a, labels_b) if a == b)
    return matches / len(labels_a)


def fleiss_kappa(matrix: list[list[int]] | np.ndarray) -> float | None:
    """Fleiss' kappa over an items x categories count matrix.

    kappa = (P_bar - Pe_bar) / (1 - Pe_bar), with per-item observed agreement
    and category-marginal chance agreement. Returns None when chance agreement
    is exactly 1 (a single category used throughout), where kappa is undefined.
    """
    m = np.asarray(matrix, dtype=float)
    if m.ndim != 2 or m.shape[0] < 2 or m.shape[1] < 1:
        raise ValueError("need a 2-D matrix with at least 2 items")
    row_sums = m.sum(axis=1)
    n = row_sums[0]
    if n < 2:
        raise ValueError("need at least 2 raters")
    if not np.all(row_sums == n):
        raise ValueError("unequal row sums: every item needs the same rater count")

    n_items = m.shape[0]
    p_i = ((m * m).sum(axis=1) - n) / (n * (n - 1))
    p_bar = p_i.mean()
    p_j = m.sum(axis=0) / (n_items * n)
    pe_bar = float((p_j * p_j).sum())
    if pe_bar >= 1.0 - 1e-15:
        return None
    return float((p_bar - pe_bar) / (1.0 - pe_bar))


def _average_ranks(values: np.ndarray) -> np.ndarray:
    """1-based ranks with ties sharing the average of their positions."""
    order = np.argsort(values, kind="stable")
    ranks = np.empty(len(values), dtype=float)
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and values[order[j + 1]] == values[order[i]]:
            j += 1
        avg = (i + j) / 2.0 + 1.0
        for k in range(i, j + 1):
            ranks[order[k]] = avg
        i = j + 1
    return ranks


def spearman(x: list[float], y: list[float]) -> tuple[float | None, float | None]:
    """Spearman rank correlation with average ranks for ties.

    The p-value is the two-sided t-distribution approximation with n-2 degrees
    of freedom. Constant input makes rho undefined; both values come back None.
    """
    if len(x) != len(y):
        raise ValueError(f"length mismatch: {len(x)} vs {len(y)}")
    n = len(x)
    if n < 3:
        raise ValueError("need at least 3 paired observations")
    xv = np.asarray(x, dtype=float)
    yv = np.asarray(y, dtype=float)
    if np.all(xv == xv[0]) or np.all(yv == yv[0]):
        return None, None

    rx = _average_ranks(xv)
    ry = _average_ranks(yv)
    rx_c = rx - rx.mean()
    ry_c = ry - ry.mean()
    rho = float((rx_c @ ry_c) / np.sqrt((rx_c @ rx_c) * (ry_c @ ry_c)))
    rho = max(-1.0, min(1.0, rho))

    if abs(rho) >= 1.0:
        return rho, 0.0
    t = rho * np.sqrt((n - 2) / (1.0 - rho * rho))
    p = float(2.0 * _scipy_stats.t.sf(abs(t), df=n - 2))
    return rho, p
