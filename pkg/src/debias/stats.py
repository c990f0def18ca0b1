"""Empirical stream analysis: block-frequency (Borel) counts, empirical block
distributions, and bound-family parameter sweeps."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .bits import BitString, QaryString
from .bounds import alpha_max, linear_bound, tv_bound_exact, tv_bound_naive
from .errors import ValidationError
from .exactdist import DistributionTable, format_bits

MODES = ("non-overlapping", "overlapping")


@dataclass
class BorelReport:
    """Occurrence counts of every m-bit block with their binomial-model
    deviations; sums to floor(n/m) windows (non-overlapping) or n-m+1
    (overlapping)."""

    m: int
    mode: str
    total: int
    counts: np.ndarray

    @property
    def expected(self) -> float:
        """Expected count of each block under uniformity."""
        return self.total * 0.5 ** self.m

    @property
    def sigma(self) -> float:
        """Binomial-model standard deviation of a single block count."""
        q = 0.5 ** self.m
        return math.sqrt(self.total * q * (1.0 - q))

    @property
    def deviations(self) -> np.ndarray:
        """(count - expected) / sigma for every block."""
        return (self.counts - self.expected) / self.sigma

    @property
    def max_abs_deviation(self) -> float:
        return float(np.abs(self.deviations).max())

    def rows(self):
        devs = self.deviations
        for i, c in enumerate(self.counts):
            yield format_bits(i, self.m), int(c), self.expected, float(devs[i])

    def format_table(self) -> str:
        lines = [f"block counts, m={self.m}, mode={self.mode}, windows={self.total}",
                 f"{'block':>8} {'count':>12} {'expected':>14} {'dev(sigma)':>11}"]
        for block, count, expected, dev in self.rows():
            lines.append(f"{block:>8} {count:>12} {expected:>14.2f} {dev:>+11.3f}")
        return "\n".join(lines)

    def to_csv(self, file) -> None:
        if not hasattr(file, "write"):
            with open(file, "w", newline="") as f:
                self.to_csv(f)
            return
        w = csv.writer(file)
        w.writerow(["m", "mode", "block", "count", "expected", "deviation_sigma"])
        for block, count, expected, dev in self.rows():
            w.writerow([self.m, self.mode, block, count, repr(expected), repr(dev)])


def _window_values(arr: np.ndarray, m: int, mode: str) -> np.ndarray:
    if mode == "non-overlapping":
        k = len(arr) // m
        blocks = arr[: k * m].reshape(k, m).astype(np.int64)
        weights = 1 << np.arange(m - 1, -1, -1, dtype=np.int64)
        return blocks @ weights
    if mode == "overlapping":
        k = len(arr) - m + 1
        vals = arr[:k].astype(np.int64)
        for j in range(1, m):
            vals = (vals << 1) | arr[j : j + k]
        return vals
    raise ValidationError(f"unknown mode {mode!r}; expected one of {MODES}")


def borel_counts(x: BitString, m: int, mode: str = "non-overlapping") -> BorelReport:
    """Count every m-bit block of x, disjointly or in a sliding window."""
    if m < 1:
        raise ValidationError(f"m must be >= 1, got {m}")
    if len(x) < m:
        raise ValidationError(f"input has {len(x)} bits, need at least {m}")
    vals = _window_values(x.to_array(), m, mode)
    counts = np.bincount(vals, minlength=1 << m)
    return BorelReport(m=m, mode=mode, total=len(vals), counts=counts)


def empirical_block_dist(x: BitString, m: int) -> DistributionTable:
    """Relative frequency of each disjoint m-bit block, as a distribution."""
    report = borel_counts(x, m, "non-overlapping")
    return DistributionTable(m, report.counts / report.total)


def symbol_block_counts(x: QaryString, m: int) -> np.ndarray:
    """Counts of each disjoint m-symbol block of a Q-ary string, indexed by
    the block's base-Q value."""
    if m < 1:
        raise ValidationError(f"m must be >= 1, got {m}")
    if len(x) < m:
        raise ValidationError(f"input has {len(x)} symbols, need at least {m}")
    k = len(x) // m
    blocks = x.symbols[: k * m].reshape(k, m)
    weights = x.q ** np.arange(m - 1, -1, -1, dtype=np.int64)
    return np.bincount(blocks @ weights, minlength=x.q ** m)


@dataclass(frozen=True)
class SweepRow:
    """One (m, alpha) grid point with the three bound values."""

    m: int
    alpha: float
    tv_exact: float
    tv_linear: float
    tv_naive: float


def sweep(ms, alphas) -> list[SweepRow]:
    """Evaluate the bound family on an m x alpha grid (the linear column is
    NaN for m < 3, where that bound is undefined)."""
    rows = []
    for m in ms:
        for alpha in (float(a) for a in alphas):
            rows.append(SweepRow(
                m=int(m),
                alpha=alpha,
                tv_exact=float(tv_bound_exact(m, alpha)),
                tv_linear=float(linear_bound(m, alpha)) if m >= 3 else math.nan,
                tv_naive=float(tv_bound_naive(m, alpha)),
            ))
    return rows


def sweep_drift(ms, drift_grid) -> list[SweepRow]:
    """Like :func:`sweep` but over (p0, beta, delta) triples, each mapped to
    its worst-case asymmetry first."""
    alphas = [alpha_max(p0, beta, delta) for (p0, beta, delta) in drift_grid]
    return sweep(ms, alphas)


def write_sweep_csv(rows, file) -> None:
    """CSV rows ``m,alpha,tv_exact,tv_linear,tv_naive``."""
    if not hasattr(file, "write"):
        with open(file, "w", newline="") as f:
            write_sweep_csv(rows, f)
        return
    w = csv.writer(file)
    w.writerow(["m", "alpha", "tv_exact", "tv_linear", "tv_naive"])
    for r in rows:
        w.writerow([r.m, repr(r.alpha), repr(r.tv_exact), repr(r.tv_linear),
                    repr(r.tv_naive)])
