"""Worst-case asymmetry and total-variation bound family.

For a source whose bias drifts within amplitude beta at speed delta, the
normalized output is, at worst, an i.i.d. source with per-bit probabilities
(1 +/- alpha)/2, where alpha has the closed form computed by
:func:`alpha_max`.  The distance of that worst case from uniform over
m-bit blocks equals the total variation between two binomial distributions,
evaluated here through the regularized incomplete beta function, alongside a
crude exponential bound and a first-order linear bound, plus the inverse
(calibration) solvers for each.

The incomplete beta evaluator follows the classic continued-fraction scheme
(modified Lentz, symmetry switch at x > (a+1)/(a+b+2), 500-iteration cap,
1e-14 step tolerance).  Binomial log-pmfs use a saddle-point expansion
(Stirling-error series plus a stable deviance term) rather than raw lgamma
differences, which keeps results accurate to ~1e-13 even at n = 10**6; the
same expansion supplies the continued fraction's front factor for integer
parameters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product as _iproduct

import numpy as np

from .errors import ConvergenceError, ValidationError
from .sources import DriftParams

_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)

# exact Stirling-series remainders log n! - ((n+1/2)log n - n + log sqrt(2 pi))
# for n = 1..15; index 0 unused
_STIRLERR_SMALL = np.array(
    [0.0] + [math.lgamma(n + 1) - ((n + 0.5) * math.log(n) - n + _LOG_SQRT_2PI)
             for n in range(1, 16)])


def _stirlerr(n):
    """Stirling-series remainder of log n!, vectorized; n >= 1."""
    n = np.asarray(n, dtype=np.float64)
    out = np.empty_like(n)
    small = n < 16
    if small.any():
        out[small] = _STIRLERR_SMALL[n[small].astype(np.int64)]
    big = ~small
    if big.any():
        nb = n[big]
        nn = nb * nb
        out[big] = (1.0 / 12.0
                    - (1.0 / 360.0 - (1.0 / 1260.0 - 1.0 / (1680.0 * nn)) / nn) / nn) / nb
    return out


def _bd0(x, m):
    """Deviance term x*log(x/m) + m - x, computed stably near x = m."""
    x = np.asarray(x, dtype=np.float64)
    m = np.broadcast_to(np.asarray(m, dtype=np.float64), x.shape)
    out = np.empty_like(x)
    near = np.abs(x - m) < 0.1 * (x + m)
    far = ~near
    if far.any():
        out[far] = x[far] * np.log(x[far] / m[far]) + m[far] - x[far]
    if near.any():
        xn, mn = x[near], m[near]
        v = (xn - mn) / (xn + mn)
        s = (xn - mn) * v
        ej = 2.0 * xn * v
        v2 = v * v
        j = 1
        while True:
            ej = ej * v2
            s1 = s + ej / (2 * j + 1)
            if np.array_equal(s1, s):
                break
            s = s1
            j += 1
        out[near] = s
    return out


def _log_pmf_many(n: int, ks: np.ndarray, p: float) -> np.ndarray:
    """log binomial pmf at each k in ks, saddle-point accuracy for any n."""
    ks = np.asarray(ks, dtype=np.int64)
    out = np.empty(len(ks), dtype=np.float64)
    if p <= 0.0:
        out[:] = -math.inf
        out[ks == 0] = 0.0
        return out
    if p >= 1.0:
        out[:] = -math.inf
        out[ks == n] = 0.0
        return out
    out[ks == 0] = n * math.log1p(-p)
    out[ks == n] = n * math.log(p)
    mid = (ks > 0) & (ks < n)
    if mid.any():
        k = ks[mid].astype(np.float64)
        nk = n - k
        lc = (_stirlerr(n) - _stirlerr(k) - _stirlerr(nk)
              - _bd0(k, n * p) - _bd0(nk, n * (1.0 - p)))
        out[mid] = lc + 0.5 * np.log(n / (2.0 * math.pi * k * nk))
    return out


def _log_pmf(n: int, k: int, p: float) -> float:
    return float(_log_pmf_many(n, np.array([k]), p)[0])


@dataclass(frozen=True)
class BinomialSpec:
    """n trials with success probability p."""

    n: int
    p: float

    def __post_init__(self):
        if self.n < 0:
            raise ValidationError(f"trial count must be >= 0, got {self.n}")
        if not 0.0 <= self.p <= 1.0:
            raise ValidationError(f"p must lie in [0,1], got {self.p}")


def binom_pmf(spec: BinomialSpec, k: int) -> float:
    """P(X = k); computed in log space, stable up to n ~ 10**6."""
    if not 0 <= k <= spec.n:
        raise ValidationError(f"k = {k} out of range [0, {spec.n}]")
    return math.exp(_log_pmf(spec.n, k, spec.p))


def binom_cdf(spec: BinomialSpec, k: int) -> float:
    """P(X <= k) by direct pmf summation."""
    if not 0 <= k <= spec.n:
        raise ValidationError(f"k = {k} out of range [0, {spec.n}]")
    terms = np.exp(_log_pmf_many(spec.n, np.arange(k + 1), spec.p))
    return float(terms.sum())


def _betacf(a: float, b: float, x: float, cap: int = 500, tol: float = 1e-14) -> float:
    """Continued fraction for the incomplete beta ratio (modified Lentz)."""
    tiny = 1e-300
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < tiny:
        d = tiny
    d = 1.0 / d
    h = d
    for m in range(1, cap + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        step = d * c
        h *= step
        if abs(step - 1.0) < tol:
            return h
    raise ConvergenceError(
        f"incomplete beta continued fraction did not converge within {cap} "
        f"iterations (a={a}, b={b}, x={x})")


def _front_over_a(x: float, a: float, b: float) -> float:
    """x^a (1-x)^b / (a * B(a,b)), via the saddle-point pmf when a,b are integers."""
    if float(a).is_integer() and float(b).is_integer():
        # equals (1-x) * P(Bin(a+b-1, x) = a)
        return (1.0 - x) * math.exp(_log_pmf(int(a) + int(b) - 1, int(a), x))
    lnbt = (math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
            + a * math.log(x) + b * math.log1p(-x))
    return math.exp(lnbt) / a


def reg_inc_beta(x: float, a: float, b: float) -> float:
    """Regularized incomplete beta I_x(a, b) to ~1e-13 absolute accuracy."""
    if not 0.0 <= x <= 1.0:
        raise ValidationError(f"x must lie in [0,1], got {x}")
    if a <= 0.0 or b <= 0.0:
        raise ValidationError(f"shape parameters must be positive, got a={a}, b={b}")
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0
    if x < (a + 1.0) / (a + b + 2.0):
        return _front_over_a(x, a, b) * _betacf(a, b, x)
    return 1.0 - _front_over_a(1.0 - x, b, a) * _betacf(b, a, 1.0 - x)


def reg_inc_beta_via_binomial(x: float, a: int, b: int) -> float:
    """Integer-parameter cross-check: I_x(a,b) = P(Bin(a+b-1, x) >= a),
    summed tail-first with exact accumulation."""
    if not (float(a).is_integer() and float(b).is_integer()) or a < 1 or b < 1:
        raise ValidationError(f"need integer a, b >= 1, got a={a}, b={b}")
    if not 0.0 <= x <= 1.0:
        raise ValidationError(f"x must lie in [0,1], got {x}")
    a, b = int(a), int(b)
    n = a + b - 1
    if b <= a:  # upper tail is the shorter sum
        terms = np.exp(_log_pmf_many(n, np.arange(a, n + 1), x))
        return math.fsum(terms.tolist())
    terms = np.exp(_log_pmf_many(n, np.arange(0, a), x))
    return 1.0 - math.fsum(terms.tolist())


def crossing_index(n: int, p: float, x: float) -> int:
    """The count at which the pmfs of Bin(n,p) and Bin(n,p+x) cross; lies
    between ceil(n p) and ceil(n (p+x))."""
    if n < 1:
        raise ValidationError(f"n must be >= 1, got {n}")
    if not 0.0 < p < 1.0:
        raise ValidationError(f"p must lie in (0,1), got {p}")
    q = 1.0 - p
    if not 0.0 < x <= q:
        raise ValidationError(f"x must lie in (0, 1-p], got {x}")
    if x == q:
        return n
    num = -n * math.log1p(-x / q)
    den = math.log1p(x / p) - math.log1p(-x / q)
    return math.ceil(num / den)


def binom_tv(n: int, p: float, x: float) -> float:
    """Total variation between Bin(n, p) and Bin(n, p+x), via the incomplete
    beta difference at the crossing index."""
    if n < 1:
        raise ValidationError(f"n must be >= 1, got {n}")
    if not 0.0 <= p <= 1.0:
        raise ValidationError(f"p must lie in [0,1], got {p}")
    if not 0.0 <= x <= 1.0 - p:
        raise ValidationError(f"x must lie in [0, 1-p], got {x}")
    if x == 0.0:
        return 0.0
    if p == 0.0:
        return 1.0 - (1.0 - x) ** n  # point mass at 0 vs Bin(n, x)
    if p + x == 1.0:
        return 1.0 - p ** n          # mirrored point-mass case
    ell = crossing_index(n, p, x)
    return (reg_inc_beta(p + x, ell, n - ell + 1)
            - reg_inc_beta(p, ell, n - ell + 1))


def binom_tv_halfsum(n: int, p: float, x: float) -> float:
    """Direct half-sum oracle for :func:`binom_tv` (O(n) work)."""
    ks = np.arange(n + 1)
    d = np.exp(_log_pmf_many(n, ks, p)) - np.exp(_log_pmf_many(n, ks, p + x))
    return 0.5 * float(np.abs(d).sum())


def tv_bound_exact(m: int, alpha: float) -> float:
    """Worst-case distance from uniform over m-bit blocks at asymmetry alpha:
    the total variation between Bin(m, 1/2) and Bin(m, (1+alpha)/2)."""
    if m < 1:
        raise ValidationError(f"m must be >= 1, got {m}")
    if not 0.0 <= alpha < 1.0:
        raise ValidationError(f"alpha must lie in [0,1), got {alpha}")
    return binom_tv(m, 0.5, 0.5 * alpha)


def tv_bound_naive(m: int, alpha: float) -> float:
    """Crude exponential bound ((1+alpha)^m - 1) / 2; may exceed 1."""
    if m < 1:
        raise ValidationError(f"m must be >= 1, got {m}")
    if not 0.0 <= alpha < 1.0:
        raise ValidationError(f"alpha must lie in [0,1), got {alpha}")
    t = m * math.log1p(alpha)
    if t > 700.0:
        return math.inf
    return 0.5 * math.expm1(t)


def naive_alpha_for_rho(m: int, rho: float) -> float:
    """Inverse of the crude bound: (1+2 rho)^{1/m} - 1."""
    if m < 1:
        raise ValidationError(f"m must be >= 1, got {m}")
    if rho < 0.0:
        raise ValidationError(f"rho must be >= 0, got {rho}")
    return math.expm1(math.log1p(2.0 * rho) / m)


def _linear_slope(m: int) -> float:
    if m < 3:
        raise ValidationError(f"the linear bound needs m >= 3, got {m}")
    return math.sqrt((m + 1) / (2.0 * math.pi * (1.0 - 2.0 / m)))


def linear_bound(m: int, alpha: float) -> float:
    """First-order bound alpha * sqrt((m+1) / (2 pi (1 - 2/m))); m >= 3."""
    if alpha < 0.0:
        raise ValidationError(f"alpha must be >= 0, got {alpha}")
    return alpha * _linear_slope(m)


def linear_alpha_for_rho(m: int, rho: float) -> float:
    """Inverse of the linear bound: rho * sqrt(2 pi (1 - 2/m) / (m+1))."""
    if rho < 0.0:
        raise ValidationError(f"rho must be >= 0, got {rho}")
    return rho / _linear_slope(m)


def calibrate_alpha(m: int, rho: float, tol: float = 1e-10) -> float:
    """Largest alpha whose exact worst-case bound stays within rho, by
    bisection on the (monotone) exact bound."""
    if not 0.0 < rho < 1.0:
        raise ValidationError(f"rho must lie in (0,1), got {rho}")
    hi = 1.0 - 1e-9
    if tv_bound_exact(m, hi) <= rho:
        return hi
    lo = 0.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if tv_bound_exact(m, mid) <= rho:
            lo = mid
        else:
            hi = mid
    return lo


def calibrate_delta(p0: float, beta: float, alpha: float) -> float:
    """Drift speed delta at which the worst-case asymmetry reaches alpha,
    inverting the :func:`alpha_max` closed form for fixed p0 and beta."""
    if not 0.0 < p0 < 1.0:
        raise ValidationError(f"p0 must lie in (0,1), got {p0}")
    p1 = 1.0 - p0
    if not 0.0 <= beta < min(p0, p1):
        raise ValidationError(f"beta must lie in [0, min(p0,p1)), got {beta}")
    if alpha < 0.0:
        raise ValidationError(f"alpha must be >= 0, got {alpha}")
    gap = abs(p0 - p1)
    num = 2.0 * alpha * (p0 * p1 - beta * beta - gap * beta)
    den = 1.0 - 2.0 * alpha * (beta + 0.5 * gap)
    if den <= 0.0 or num < 0.0:
        raise ValidationError(
            f"no feasible drift speed for alpha = {alpha} at p0 = {p0}, beta = {beta}")
    delta = num / den
    check = p0 * p1 - beta * (beta - delta) - gap * (beta - 0.5 * delta)
    if check <= 0.0:
        raise ValidationError(
            f"calibration landed outside the valid region (denominator {2 * check!r})")
    return delta


def u_value(p0: float, eps: float, gamma: float) -> float:
    """Asymmetry |gamma| / (q(01) + q(10)) of one unequal pair whose first bit
    has offset eps and whose offset then steps by gamma."""
    p1 = 1.0 - p0
    factors = {
        "p0 - eps": p0 - eps,
        "p1 + eps + gamma": p1 + eps + gamma,
        "p1 + eps": p1 + eps,
        "p0 - eps - gamma": p0 - eps - gamma,
    }
    for name, v in factors.items():
        if not 0.0 < v < 1.0:
            raise ValidationError(f"factor {name} = {v!r} outside (0,1)")
    den = ((p0 - eps) * (p1 + eps + gamma) + (p1 + eps) * (p0 - eps - gamma))
    if den <= 0.0:
        raise ValidationError(f"unequal-pair mass {den!r} is not positive")
    return abs(gamma) / den


def alpha_max(p0: float, beta: float, delta: float) -> float:
    """Closed-form worst case of :func:`u_value` over all offsets within
    amplitude beta and steps within delta:
    delta / (2 [p0 p1 - beta (beta - delta) - |p0 - p1| (beta - delta/2)])."""
    params = DriftParams(p0, beta, delta)
    p1 = params.p1
    den = 2.0 * (p0 * p1 - beta * (beta - delta) - abs(p0 - p1) * (beta - 0.5 * delta))
    if den <= 0.0:
        raise ValidationError(f"denominator {den!r} is not positive")
    return delta / den


def u_max_oracle(p0: float, beta: float, delta: float, h: float):
    """Brute-force grid maximum of :func:`u_value` over the feasible region
    {|eps| <= beta, |gamma| <= delta, |eps+gamma| <= beta}.

    Returns (eps*, gamma*, value); value matches :func:`alpha_max` up to O(h).
    """
    DriftParams(p0, beta, delta)
    if h <= 0.0:
        raise ValidationError(f"grid resolution must be positive, got {h}")
    p1 = 1.0 - p0

    def grid(bound):
        if bound == 0.0:
            return np.zeros(1)
        steps = max(1, round(2.0 * bound / h))
        return np.linspace(-bound, bound, steps + 1)

    eps = grid(beta)[:, None]
    gam = grid(delta)[None, :]
    feasible = np.abs(eps + gam) <= beta + 1e-12
    den = (p0 - eps) * (p1 + eps + gam) + (p1 + eps) * (p0 - eps - gam)
    u = np.abs(gam) / den
    u[~feasible] = -1.0
    i, j = np.unravel_index(np.argmax(u), u.shape)
    return float(eps[i, 0]), float(gam[0, j]), float(u[i, j])


def product_deviation_sum(cs) -> float:
    """Sum over all sign patterns s of |prod_i (1 + s_i c_i) - 1|.

    Nondecreasing in each |c_i| and invariant under sign flips of any c_i;
    2^n times the L1 deviation of the +/-c product measure from uniform.
    (Not *strictly* increasing everywhere: with two coordinates and
    c_1 < c_2/(1+c_2) the sum is exactly 4*c_2, flat in c_1.)
    """
    cs = [float(c) for c in cs]
    n = len(cs)
    if n > 16:
        raise ValidationError(f"enumeration over sign patterns guarded at 16, got {n}")
    for c in cs:
        if not -1.0 < c < 1.0:
            raise ValidationError(f"coefficient {c} outside (-1,1)")
    terms = []
    for signs in _iproduct((1.0, -1.0), repeat=n):
        prod = 1.0
        for s, c in zip(signs, cs):
            prod *= 1.0 + s * c
        terms.append(abs(prod - 1.0))
    return math.fsum(terms)
