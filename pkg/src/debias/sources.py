"""Seeded, reproducible bit-source models.

Every source is a frozen dataclass; :func:`sample` is a pure function of
(spec, n, seed).  Randomness comes from numpy's default generator (PCG64),
seeded per call, so golden outputs in the test suite are stable.

For a drifting source, bit i is 0 with probability ``p0 - eps_i`` where the
per-bit offsets eps_i are capped in amplitude (|eps_i| <= beta) and in step
size (|eps_{i+1} - eps_i| <= delta).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Optional, Union

import numpy as np

from .bits import BitString, QaryString
from .errors import ValidationError

PAIR_KEYS = ("00", "01", "10", "11")

TRAJECTORIES = ("walk", "sine", "fixed", "adversarial")


@dataclass(frozen=True)
class DriftParams:
    """Base zero-probability p0 with drift amplitude bound beta and speed bound delta."""

    p0: float
    beta: float
    delta: float

    def __post_init__(self):
        if not 0.0 < self.p0 < 1.0:
            raise ValidationError(f"p0 must lie in (0,1), got {self.p0}")
        if self.beta < 0.0:
            raise ValidationError(f"beta must be >= 0, got {self.beta}")
        if self.beta >= min(self.p0, self.p1):
            raise ValidationError(
                f"beta must be < min(p0, p1) = {min(self.p0, self.p1)}, got {self.beta}")
        if not 0.0 <= self.delta <= self.beta:
            raise ValidationError(
                f"delta must lie in [0, beta] = [0, {self.beta}], got {self.delta}")

    @property
    def p1(self) -> float:
        return 1.0 - self.p0


class DriftTrace:
    """Realized per-bit offsets eps_1..eps_n of a drifting source."""

    __slots__ = ("epsilons",)

    def __init__(self, epsilons):
        arr = np.asarray(epsilons, dtype=np.float64).reshape(-1).copy()
        arr.flags.writeable = False
        self.epsilons = arr

    @property
    def gammas(self) -> np.ndarray:
        """Successive differences eps_{i+1} - eps_i."""
        return np.diff(self.epsilons)

    def __len__(self) -> int:
        return len(self.epsilons)

    def __getitem__(self, i):
        if isinstance(i, slice):
            return DriftTrace(self.epsilons[i])
        return float(self.epsilons[i])

    def __eq__(self, other):
        if not isinstance(other, DriftTrace):
            return NotImplemented
        return np.array_equal(self.epsilons, other.epsilons)

    def __repr__(self) -> str:
        return f"DriftTrace({self.epsilons.tolist()!r})"

    def save(self, path) -> None:
        """Write one decimal offset per line."""
        with open(path, "w") as f:
            for e in self.epsilons:
                f.write(f"{float(e)!r}\n")

    @classmethod
    def load(cls, path) -> "DriftTrace":
        with open(path) as f:
            values = []
            for lineno, line in enumerate(f, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    values.append(float(line))
                except ValueError:
                    raise ValidationError(
                        f"{path}: line {lineno}: not a decimal offset: {line!r}") from None
        return cls(values)


@dataclass(frozen=True)
class TraceViolation:
    """First point where a trace breaks an amplitude or speed bound (1-based index)."""

    kind: str  # "amplitude" or "speed"
    index: int
    value: float
    bound: float

    def __str__(self) -> str:
        name = "|eps|" if self.kind == "amplitude" else "|gamma|"
        return (f"{self.kind} bound violated at index {self.index}: "
                f"{name} = {self.value:.6g} > {self.bound:.6g}")


_BOUND_SLACK = 1e-12  # absorbs representation error in traces sitting on a bound


def validate_trace(trace: DriftTrace, params: DriftParams) -> Optional[TraceViolation]:
    """None if the trace obeys both drift bounds (to within floating-point
    slack), else the first violation."""
    eps = trace.epsilons
    over = np.abs(eps) > params.beta + _BOUND_SLACK
    if over.any():
        i = int(np.argmax(over))
        return TraceViolation("amplitude", i + 1, abs(float(eps[i])), params.beta)
    gam = np.diff(eps)
    over = np.abs(gam) > params.delta + _BOUND_SLACK
    if over.any():
        i = int(np.argmax(over))
        return TraceViolation("speed", i + 1, abs(float(gam[i])), params.delta)
    return None


def adversarial_trace(params: DriftParams, n: int) -> DriftTrace:
    """Worst-case trace: odd positions sit at the amplitude cap, each followed
    by a maximal step back, on the side determined by the sign of p0 - p1."""
    if n < 0:
        raise ValidationError(f"n must be >= 0, got {n}")
    idx = np.arange(1, n + 1)
    if params.p0 > params.p1:
        hi, lo = -params.beta, -params.beta + params.delta
    else:
        hi, lo = params.beta, params.beta - params.delta
    return DriftTrace(np.where(idx % 2 == 1, hi, lo))


@dataclass(frozen=True)
class ConstantSource:
    """i.i.d. bits, each 0 with probability p0."""

    p0: float

    def __post_init__(self):
        if not 0.0 < self.p0 < 1.0:
            raise ValidationError(f"p0 must lie in (0,1), got {self.p0}")


@dataclass(frozen=True)
class DriftingSource:
    """Independent bits whose zero-probability drifts as p0 - eps_i.

    Trajectories:
      walk        eps_1 = 0, then a uniform step in [-delta, delta] clamped
                  to [-beta, beta] (clamping never increases a step)
      sine        eps_i = beta * sin(2 pi i / period); requires
                  beta * 2 pi / period <= delta
      fixed       a user-supplied trace, validated against the bounds
      adversarial the worst-case corner trace
    """

    params: DriftParams
    trajectory: str = "walk"
    period: float | None = None
    trace: DriftTrace | None = None

    def __post_init__(self):
        if self.trajectory not in TRAJECTORIES:
            raise ValidationError(
                f"unknown trajectory {self.trajectory!r}; expected one of {TRAJECTORIES}")
        if self.trajectory == "sine":
            if self.period is None or self.period <= 0:
                raise ValidationError("sine trajectory needs a positive period")
            step = self.params.beta * 2.0 * math.pi / self.period
            if step > self.params.delta:
                raise ValidationError(
                    f"sine step bound beta*2*pi/period = {step:.6g} exceeds delta = "
                    f"{self.params.delta:.6g}")
        if self.trajectory == "fixed":
            if self.trace is None:
                raise ValidationError("fixed trajectory needs a trace")
            bad = validate_trace(self.trace, self.params)
            if bad is not None:
                raise ValidationError(f"fixed trace invalid: {bad}")

    def realized_trace(self, n: int, seed: int | None = None) -> DriftTrace:
        """The eps-sequence this source uses for an n-bit run.

        Deterministic for sine/fixed/adversarial; the walk needs a seed.
        """
        if self.trajectory == "fixed":
            if len(self.trace) < n:
                raise ValidationError(
                    f"fixed trace has {len(self.trace)} entries, need {n}")
            return self.trace[:n]
        if self.trajectory == "adversarial":
            return adversarial_trace(self.params, n)
        if self.trajectory == "sine":
            i = np.arange(1, n + 1, dtype=np.float64)
            return DriftTrace(self.params.beta * np.sin(2.0 * math.pi * i / self.period))
        if seed is None:
            raise ValidationError("walk trajectory needs a seed to realize a trace")
        rng = np.random.default_rng(seed)
        return self._walk(n, rng)

    def _walk(self, n: int, rng) -> DriftTrace:
        beta, delta = self.params.beta, self.params.delta
        eps = np.empty(n, dtype=np.float64)
        if n == 0:
            return DriftTrace(eps)
        steps = rng.uniform(-delta, delta, size=max(n - 1, 0))
        e = 0.0
        eps[0] = e
        for i in range(n - 1):
            e = min(beta, max(-beta, e + steps[i]))
            eps[i + 1] = e
        return DriftTrace(eps)


@dataclass(frozen=True)
class MarkovSource:
    """Bits whose zero-probability, given the previous k bits, stays within
    kappa of the base marginal p0.  The first k bits use the base marginal.

    ``table`` maps each k-bit history string to the probability of emitting 0.
    """

    k: int
    kappa: float
    p0: float
    table: Mapping[str, float]

    def __post_init__(self):
        object.__setattr__(self, "table", dict(self.table))
        if self.k < 0:
            raise ValidationError(f"memory length k must be >= 0, got {self.k}")
        if self.kappa < 0.0:
            raise ValidationError(f"kappa must be >= 0, got {self.kappa}")
        if not 0.0 < self.p0 < 1.0:
            raise ValidationError(f"p0 must lie in (0,1), got {self.p0}")
        want = 1 << self.k
        if len(self.table) != want:
            raise ValidationError(
                f"table must cover all {want} histories of length {self.k}, "
                f"got {len(self.table)} entries")
        for h, p in self.table.items():
            if len(h) != self.k or any(c not in "01" for c in h):
                raise ValidationError(f"bad history key {h!r}")
            if not 0.0 <= p <= 1.0:
                raise ValidationError(f"P(0|{h}) = {p} outside [0,1]")
            if abs(p - self.p0) > self.kappa + 1e-15:
                raise ValidationError(
                    f"P(0|{h}) = {p} deviates from p0 = {self.p0} by more than kappa = "
                    f"{self.kappa}")

    def cond_zero_probs(self) -> np.ndarray:
        """P(bit = 0 | history) indexed by the history's MSB-first integer value."""
        out = np.empty(1 << self.k, dtype=np.float64)
        for h, p in self.table.items():
            out[int(h, 2) if self.k else 0] = p
        return out


@dataclass(frozen=True)
class PairwiseSource:
    """Bits emitted as independent pairs; pair slot i draws from the i-th pair
    distribution (the list is cycled when the run is longer).

    Equality of the 01 and 10 weights is *not* required; whether a given list
    normalizes to uniform is for the exact-distribution machinery to decide.
    """

    pair_dists: tuple

    def __init__(self, pair_dists):
        dists = tuple(dict(d) for d in pair_dists)
        if not dists:
            raise ValidationError("need at least one pair distribution")
        for i, d in enumerate(dists):
            if set(d) != set(PAIR_KEYS):
                raise ValidationError(
                    f"pair distribution {i} must have exactly the keys {PAIR_KEYS}")
            if any(v < 0.0 for v in d.values()):
                raise ValidationError(f"pair distribution {i} has a negative weight")
            total = math.fsum(d.values())
            if abs(total - 1.0) > 1e-12:
                raise ValidationError(
                    f"pair distribution {i} sums to {total!r}, expected 1")
        object.__setattr__(self, "pair_dists", dists)

    def pair_matrix(self, pairs: int) -> np.ndarray:
        """(pairs, 4) matrix of pair probabilities in 00,01,10,11 order, cycled."""
        base = np.array([[d[k] for k in PAIR_KEYS] for d in self.pair_dists])
        reps = -(-pairs // len(base))
        return np.tile(base, (reps, 1))[:pairs]


SourceSpec = Union[ConstantSource, DriftingSource, MarkovSource, PairwiseSource]


def _bits_from_zero_probs(q0: np.ndarray, rng) -> BitString:
    # one uniform draw per bit, compared against the zero-probability
    u = rng.random(len(q0))
    return BitString.from_array((u >= q0).astype(np.uint8))


def sample(spec: SourceSpec, n: int, seed: int) -> tuple[BitString, Optional[DriftTrace]]:
    """Draw n bits from the model.  Pure in (spec, n, seed).

    A drifting source also returns its realized trace; other sources return
    None in the second slot.
    """
    if n < 0:
        raise ValidationError(f"n must be >= 0, got {n}")
    rng = np.random.default_rng(seed)

    if isinstance(spec, ConstantSource):
        return _bits_from_zero_probs(np.full(n, spec.p0), rng), None

    if isinstance(spec, DriftingSource):
        if spec.trajectory == "walk":
            trace = spec._walk(n, rng)  # consumes rng before the bit draws
        else:
            trace = spec.realized_trace(n)
        return _bits_from_zero_probs(spec.params.p0 - trace.epsilons, rng), trace

    if isinstance(spec, MarkovSource):
        cond = spec.cond_zero_probs()
        u = rng.random(n)
        out = np.empty(n, dtype=np.uint8)
        mask = (1 << spec.k) - 1
        h = 0
        for i in range(n):
            p = spec.p0 if i < spec.k else cond[h]
            bit = 0 if u[i] < p else 1
            out[i] = bit
            h = ((h << 1) | bit) & mask
        return BitString.from_array(out), None

    if isinstance(spec, PairwiseSource):
        if n % 2:
            raise ValidationError("pairwise source emits whole pairs; n must be even")
        mat = spec.pair_matrix(n // 2)
        cum = np.cumsum(mat, axis=1)
        u = rng.random(n // 2)
        idx = (u[:, None] >= cum[:, :3]).sum(axis=1)  # pair value 0..3
        out = np.empty(n, dtype=np.uint8)
        out[0::2] = idx >> 1
        out[1::2] = idx & 1
        return BitString.from_array(out), None

    raise ValidationError(f"unknown source spec {spec!r}")


def sample_symbols(probs, n: int, seed: int) -> QaryString:
    """n i.i.d. symbols over an alphabet with the given probabilities."""
    p = np.asarray(probs, dtype=np.float64)
    if p.ndim != 1 or len(p) < 2:
        raise ValidationError("need at least two symbol probabilities")
    if (p < 0).any() or abs(p.sum() - 1.0) > 1e-12:
        raise ValidationError("symbol probabilities must be nonnegative and sum to 1")
    if n < 0:
        raise ValidationError(f"n must be >= 0, got {n}")
    rng = np.random.default_rng(seed)
    cum = np.cumsum(p)
    idx = np.searchsorted(cum, rng.random(n), side="right")
    return QaryString(np.minimum(idx, len(p) - 1), q=len(p))


def load_markov_table(path, k: int) -> dict:
    """Read a conditional table: one line per history, ``history p0``.

    For k = 0 the history field is the placeholder '-'.
    """
    table = {}
    with open(path) as f:
        for lineno, line in enumerate(f, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ValidationError(
                    f"{path}: line {lineno}: expected 'history p0', got {line!r}")
            hist = "" if parts[0] == "-" else parts[0]
            try:
                p = float(parts[1])
            except ValueError:
                raise ValidationError(
                    f"{path}: line {lineno}: not a probability: {parts[1]!r}") from None
            if len(hist) != k or any(c not in "01" for c in hist):
                raise ValidationError(
                    f"{path}: line {lineno}: history {parts[0]!r} is not a {k}-bit string")
            table[hist] = p
    return table


def save_markov_table(table: Mapping[str, float], path) -> None:
    with open(path, "w") as f:
        for h in sorted(table):
            f.write(f"{h or '-'} {float(table[h])!r}\n")


def load_pair_dists(path) -> list:
    """Read pair distributions: one line per pair slot, four weights in
    00 01 10 11 order."""
    dists = []
    with open(path) as f:
        for lineno, line in enumerate(f, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 4:
                raise ValidationError(
                    f"{path}: line {lineno}: expected four weights, got {len(parts)}")
            try:
                vals = [float(p) for p in parts]
            except ValueError:
                raise ValidationError(f"{path}: line {lineno}: bad weight") from None
            dists.append(dict(zip(PAIR_KEYS, vals)))
    return dists
