"""Closed-form predictions for power-law networks under random node failure.

A power-law network (PLN) has ``exp(alpha) * k**-beta`` nodes of degree ``k``
for ``k = 1 .. max_degree``.  When every node fails independently with
probability ``p``, the survivors are again approximately power-law
distributed, with parameters ``(alpha', beta')`` computed here.  The giant
component disappears once ``beta'`` reaches :data:`BETA_0`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, xlog1py, xlogy

#: Slope above which a PLN almost surely has no giant component.
BETA_0 = 3.47875

#: Distance from the pole of zeta that is still accepted.
ZETA_EPS = 1e-6

# Euler-Maclaurin: B_2j / (2j)! for j = 1..10, head of N - 1 direct terms.
_EM_TERMS = 20
_BERNOULLI = [
    1 / 6, -1 / 30, 1 / 42, -1 / 30, 5 / 66, -691 / 2730, 7 / 6,
    -3617 / 510, 43867 / 798, -174611 / 330,
]
_EM_COEFFS = [b / math.factorial(2 * (j + 1)) for j, b in enumerate(_BERNOULLI)]


class DomainError(ValueError):
    """An argument is outside the domain of the requested formula."""


class NoCriticalPoint(ArithmeticError):
    """``beta'`` turns down before reaching the threshold slope."""


@dataclass(frozen=True)
class PlnParams:
    """Scale ``alpha`` and slope ``beta`` of a power-law degree distribution."""

    alpha: float
    beta: float

    def __post_init__(self):
        if not self.beta > 1:
            raise DomainError(f"beta must exceed 1, got {self.beta}")
        if not self.alpha > 0:
            raise DomainError(f"alpha must be positive, got {self.alpha}")

    @classmethod
    def for_size(cls, beta: float, n: float) -> "PlnParams":
        return cls(alpha_for_size(beta, n), beta)

    @property
    def max_degree(self) -> int:
        # exp(beta * ln K / beta) may land a hair below K
        return max(1, int(math.floor(math.exp(self.alpha / self.beta) * (1 + 1e-12))))

    @property
    def expected_size(self) -> float:
        """Node count ``zeta(beta) * exp(alpha)`` of the untruncated law."""
        return zeta(self.beta) * math.exp(self.alpha)

    def degrees(self) -> np.ndarray:
        return np.arange(1, self.max_degree + 1, dtype=float)


@dataclass(frozen=True)
class SurvivorPrediction:
    p: float
    chi: float
    xi: float
    alpha_prime: float
    beta_prime: float
    expected_orphans: float
    expected_survivors: float
    has_giant: bool


def zeta(t: float) -> float:
    """Riemann zeta for real ``t > 1``.

    Sums the first terms directly and closes the tail with the integral plus
    Euler-Maclaurin corrections; accurate to a few ulps away from the pole.
    """
    t = float(t)
    if not t > 1 + ZETA_EPS:
        raise DomainError(f"zeta requires t > 1 + {ZETA_EPS}, got {t}")
    n = _EM_TERMS
    head = math.fsum(k ** -t for k in range(1, n))
    tail = n ** (1 - t) / (t - 1) + 0.5 * n ** -t
    # rising factorial t (t+1) ... (t+2j-2) times n^(-t-2j+1)
    rising = t
    power = n ** (-t - 1)
    corr = 0.0
    for j, c in enumerate(_EM_COEFFS):
        term = c * rising * power
        corr += term
        if abs(term) < 1e-18 * (head + tail):
            break
        rising *= (t + 2 * j + 1) * (t + 2 * j + 2)
        power /= n * n
    return head + tail + corr


def partial_zeta(t: float, terms: int) -> float:
    """``sum(k**-t for k in 1..terms)``."""
    k = np.arange(1, terms + 1, dtype=float)
    return math.fsum(k ** -t)


def zeta_inverse(y: float) -> float:
    """Return ``t > 1`` with ``zeta(t) == y``, by bisection."""
    y = float(y)
    if not y > 1:
        raise DomainError(f"zeta_inverse requires y > 1, got {y}")
    lo = 1 + ZETA_EPS * (1 + 1e-9)
    if zeta(lo) < y:
        raise DomainError(f"zeta_inverse: y={y} lies beyond zeta(1 + {ZETA_EPS})")
    hi = 2.0
    while zeta(hi) > y:
        lo, hi = hi, 2 * hi
        if hi > 2048:
            # zeta(t) - 1 ~ 2**-t underflows relative to 1 past here
            return hi
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if zeta(mid) > y:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _check_p(p: float) -> float:
    p = float(p)
    if not 0 <= p <= 1:
        raise DomainError(f"failure probability must lie in [0, 1], got {p}")
    return p


def chi(params: PlnParams, p: float) -> float:
    """Orphan series: ``sum p**k / k**beta`` over ``k = 1 .. max_degree``."""
    p = _check_p(p)
    k = params.degrees()
    return math.fsum(p ** k * k ** -params.beta)


def xi(params: PlnParams, p: float) -> float:
    """Degree-1 series: ``sum k (1-p) p**(k-1) / k**beta`` over ``k = 1 .. max_degree``."""
    p = _check_p(p)
    k = params.degrees()
    return math.fsum(k * (1 - p) * p ** (k - 1) * k ** -params.beta)


def surviving_degree_count(params: PlnParams, p: float, k: int) -> float:
    """Expected number of surviving nodes left with degree ``k``.

    Each original node of degree ``k0`` survives with probability ``1 - p``
    and keeps each neighbour independently with probability ``1 - p``.
    Degrees above ``max_degree`` have an empty sum and give 0.
    """
    p = _check_p(p)
    k = int(k)
    if k < 0:
        raise DomainError(f"degree must be non-negative, got {k}")
    if k > params.max_degree:
        return 0.0
    k0 = np.arange(max(k, 1), params.max_degree + 1, dtype=float)
    log_terms = (
        params.alpha
        - params.beta * np.log(k0)
        + gammaln(k0 + 1) - gammaln(k + 1) - gammaln(k0 - k + 1)
        + xlog1py(k, -p)
        + xlogy(k0 - k, p)
    )
    return (1 - p) * math.fsum(np.exp(log_terms))


def predict(params: PlnParams, p: float) -> SurvivorPrediction:
    """Post-failure parameters and expected populations for failure rate ``p``."""
    p = _check_p(p)
    if p >= 1:
        raise DomainError("p = 1 leaves xi = 0, so beta' is undefined; use p < 1")
    c = chi(params, p)
    x = xi(params, p)
    scale = math.exp(params.alpha)
    size = zeta(params.beta) * scale
    alpha_prime = params.alpha + math.log((1 - p) * x)
    orphans = (1 - p) * scale * c
    target = (zeta(params.beta) - c) / x
    if p == 0:
        # chi = 0 and xi = 1 exactly; skip the bisection round-off
        beta_prime = params.beta
        survivors = size
    elif target > 1:
        beta_prime = zeta_inverse(target)
        survivors = zeta(beta_prime) * math.exp(alpha_prime)
    else:
        beta_prime = math.inf
        survivors = (1 - p) * size - orphans
    return SurvivorPrediction(
        p=p,
        chi=c,
        xi=x,
        alpha_prime=alpha_prime,
        beta_prime=beta_prime,
        expected_orphans=orphans,
        expected_survivors=survivors,
        has_giant=beta_prime < BETA_0,
    )


def beta_prime(params: PlnParams, p: float) -> float:
    return predict(params, p).beta_prime


def critical_failure_rate(params: PlnParams, tol: float = 1e-6) -> float:
    """Failure probability at which ``beta'`` reaches :data:`BETA_0`.

    Only defined for ``2 < beta < BETA_0``.  ``beta'`` is scanned on 100
    points of ``[0, 0.99]`` (then log-spaced towards 1 for slopes near 2) and
    must be non-decreasing up to the first point at or above ``BETA_0``.  A
    decrease before that point raises :class:`NoCriticalPoint`: for slopes
    close to 2 in finite graphs ``beta'`` peaks below ``BETA_0``.
    """
    if not 2 < params.beta < BETA_0:
        raise DomainError(
            f"critical failure rate needs 2 < beta < {BETA_0}, got {params.beta}"
        )
    grid = list(np.linspace(0.0, 0.99, 100)) + list(1 - np.logspace(-2, -8, 61)[1:])
    prev_p, prev_b = None, None
    for q in grid:
        b = beta_prime(params, q)
        if prev_b is not None and b < prev_b:
            raise NoCriticalPoint(
                f"beta' peaks below {BETA_0} (decreasing from {prev_b:.6f} at p={prev_p:.6g}"
                f" to {b:.6f} at p={q:.6g}); no critical failure rate for beta={params.beta}"
            )
        if b >= BETA_0:
            lo, hi = prev_p, q
            break
        prev_p, prev_b = q, b
    else:
        raise NoCriticalPoint(f"beta' stays below {BETA_0} for p <= {grid[-1]:.8f}")
    while True:
        mid = 0.5 * (lo + hi)
        b = beta_prime(params, mid)
        if abs(b - BETA_0) < tol or hi - lo < 1e-15:
            return float(mid)
        if b < BETA_0:
            lo = mid
        else:
            hi = mid


def alpha_for_size(beta: float, n: float) -> float:
    """Scale parameter giving ``zeta(beta) * exp(alpha) == n``."""
    if not beta > 1 + ZETA_EPS:
        raise DomainError(f"alpha_for_size requires beta > 1 + {ZETA_EPS}, got {beta}")
    if not n >= 1:
        raise DomainError(f"target size must be at least 1, got {n}")
    return math.log(n) - math.log(zeta(beta))


def self_arc_probability(params: PlnParams) -> float:
    """Estimated chance that an edge of the highest-degree node is a self-loop."""
    if not params.beta > 2:
        raise DomainError(f"self-arc estimate needs beta > 2, got {params.beta}")
    b = params.beta
    return 2 / (zeta(b - 1) * math.exp((b - 1) / b * params.alpha))


def giant_fraction_beta2(alpha: float) -> float:
    """Giant-component share ``1 - 2 ln(alpha) / alpha`` of a beta = 2 PLN."""
    if not alpha > 0:
        raise DomainError(f"alpha must be positive, got {alpha}")
    frac = 1 - 2 * math.log(alpha) / alpha
    if not 0 <= frac <= 1:
        raise DomainError(f"alpha={alpha} puts the giant fraction at {frac}, outside [0, 1]")
    return frac
