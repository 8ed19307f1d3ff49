"""Integer arithmetic substrate.

Factorization of single integers, bulk sieves, the standard multiplicative
functions, and a generic engine for sums of nonnegative multiplicative
functions (partial sums of g(n)/n, truncated Euler products, fitted kappa).

Bulk tables are numpy arrays indexed by n, with index 0 unused.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from math import gcd, isqrt
from typing import Callable, NamedTuple, Optional

import numpy as np

from .errors import DomainError, ResourceError

log = logging.getLogger(__name__)

#: Largest table size the bulk sieves will allocate.
SIEVE_CAP = 10**8

#: Default prime bound for truncated Euler products.
EULER_PRIME_BOUND = 10**6

_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
_TRIAL_BOUND = 1 << 12


@dataclass(frozen=True)
class Factorization:
    """Prime-power decomposition ``n = prod p**e``, primes increasing."""

    n: int
    factors: tuple[tuple[int, int], ...]

    def __post_init__(self):
        prod = 1
        last = 1
        for p, e in self.factors:
            if p <= last or e < 1:
                raise DomainError(f"malformed factorization of {self.n}: {self.factors}")
            prod *= p**e
            last = p
        if prod != self.n:
            raise DomainError(f"factors {self.factors} do not multiply to {self.n}")

    def __iter__(self):
        return iter(self.factors)

    def __len__(self):
        return len(self.factors)

    @property
    def primes(self) -> list[int]:
        return [p for p, _ in self.factors]

    def ord(self, p: int) -> int:
        for q, e in self.factors:
            if q == p:
                return e
        return 0


# --- single-integer factorization -------------------------------------------

def is_prime(n: int) -> bool:
    """Strong-pseudoprime test against the first 13 prime bases.

    Deterministic for n < 3.3e24, which covers every 64-bit input.
    """
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _SMALL_PRIMES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _brent(n: int) -> int:
    """Return a nontrivial factor of the odd composite n (Pollard rho, Brent cycle)."""
    for c in range(1, 200):
        y, r, q, g = 2, 1, 1, 1
        m = 128
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = gcd(abs(x - ys), n)
        if g != n:
            return g
    raise ArithmeticError(f"Brent splitting failed for {n}")


def _split(n: int, out: dict[int, int]) -> None:
    if n == 1:
        return
    if is_prime(n):
        out[n] = out.get(n, 0) + 1
        return
    r = isqrt(n)
    if r * r == n:
        _split(r, out)
        _split(r, out)
        return
    d = _brent(n)
    _split(d, out)
    _split(n // d, out)


def factor(n: int) -> Factorization:
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise DomainError(f"factor() needs a positive integer, got {n!r}")
    n = int(n)
    found: dict[int, int] = {}
    m = n
    p = 2
    while p < _TRIAL_BOUND and p * p <= m:
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            found[p] = e
        p += 1 if p == 2 else 2
    if m > 1:
        if m < _TRIAL_BOUND * _TRIAL_BOUND:
            found[m] = found.get(m, 0) + 1
        else:
            _split(m, found)
    return Factorization(n, tuple(sorted(found.items())))


def multiplicative_values(n: int) -> tuple[int, int, int]:
    """(omega(n), mu(n), phi(n))."""
    fac = factor(n)
    omega = len(fac)
    mu = 0 if any(e > 1 for _, e in fac) else (-1) ** omega
    phi = 1
    for p, e in fac:
        phi *= (p - 1) * p ** (e - 1)
    return omega, mu, phi


def is_perfect_square(n: int) -> Optional[int]:
    if n < 0:
        return None
    r = isqrt(n)
    return r if r * r == n else None


# --- bulk sieves ------------------------------------------------------------

def _check_cap(limit: int, cap: Optional[int]) -> None:
    cap = SIEVE_CAP if cap is None else cap
    if limit > cap:
        raise ResourceError(f"sieve limit {limit} exceeds cap {cap}")


def sieve_spf(limit: int, cap: Optional[int] = None) -> np.ndarray:
    """Smallest-prime-factor table; ``spf[n]`` is valid for 2 <= n <= limit."""
    if limit < 2:
        raise DomainError("sieve_spf needs limit >= 2")
    _check_cap(limit, cap)
    dtype = np.int32 if limit < 2**31 else np.int64
    spf = np.zeros(limit + 1, dtype=dtype)
    for p in range(2, isqrt(limit) + 1):
        if spf[p] == 0:
            seg = spf[p * p :: p]
            seg[seg == 0] = p
    idx = np.flatnonzero(spf == 0)
    spf[idx] = idx
    spf[0] = spf[1] = 0
    return spf


@lru_cache(maxsize=8)
def primes_upto(limit: int) -> np.ndarray:
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    _check_cap(limit, None)
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    flags[4::2] = False
    for p in range(3, isqrt(limit) + 1, 2):
        if flags[p]:
            flags[p * p :: 2 * p] = False
    primes = np.flatnonzero(flags).astype(np.int64)
    primes.flags.writeable = False
    return primes


def multiplicative_table(limit: int, value: Callable[[int, int], float], dtype=np.float64) -> np.ndarray:
    """Tabulate the multiplicative function with ``g(p**e) = value(p, e)`` on 0..limit.

    ``table[0]`` is 0 and ``table[1]`` is 1.  Primes above sqrt(limit) occur
    to the first power only, so they are applied in a single vectorized pass.
    """
    _check_cap(limit, None)
    out = np.ones(limit + 1, dtype=dtype)
    out[0] = 0
    if limit < 2:
        return out
    primes = primes_upto(limit)
    root = isqrt(limit)
    rem = np.arange(limit + 1, dtype=np.int64)
    for p in primes[primes <= root].tolist():
        seg = np.full(limit // p, value(p, 1), dtype=dtype)
        step, e = p, 2
        while step * p <= limit:
            seg[step - 1 :: step] = value(p, e)
            step *= p
            e += 1
        out[p::p] *= seg
        q = p
        while q <= limit:
            rem[q::q] //= p
            q *= p
    large = primes[primes > root]
    if large.size:
        lookup = np.zeros(limit + 1, dtype=dtype)
        lookup[large] = [value(p, 1) for p in large.tolist()]
        mask = rem > 1
        out[mask] *= lookup[rem[mask]]
    return out


def omega_table(limit: int) -> np.ndarray:
    _check_cap(limit, None)
    omega = np.zeros(limit + 1, dtype=np.int16)
    for p in primes_upto(limit).tolist():
        omega[p::p] += 1
    return omega


def fsum(arr) -> float:
    """Compensated (exactly rounded) sum of a float array."""
    return math.fsum(np.asarray(arr, dtype=np.float64).tolist())


# --- multiplicative sums ----------------------------------------------------

@dataclass(frozen=True)
class MultiplicativeSpec:
    """A nonnegative multiplicative g with ``g(p**a) <= U`` and prime-sum slope kappa."""

    value_at_prime_power: Callable[[int, int], float]
    U: float
    kappa: float

    def __call__(self, p: int, e: int) -> float:
        v = self.value_at_prime_power(p, e)
        if v < 0 or v > self.U * (1 + 1e-12):
            raise DomainError(f"g({p}^{e}) = {v} outside [0, U={self.U}]")
        return v


class MultSum(NamedTuple):
    sum_gn_over_n: float
    euler_product_cg: float
    fitted_kappa: float


def euler_product(spec: MultiplicativeSpec, prime_bound: int = EULER_PRIME_BOUND) -> float:
    """Truncated c(g) = Gamma(kappa+1)^-1 prod_p (1-1/p)^kappa (1 + g(p)/p + g(p^2)/p^2 + ...)."""
    primes = primes_upto(prime_bound).tolist()
    logs = []
    checkpoint = None
    for p in primes:
        if checkpoint is None and p > prime_bound // 10:
            checkpoint = math.fsum(logs)
        local = 1.0
        pe, e = p, 1
        while True:
            term = spec(p, e) / pe
            local += term
            if spec.U / pe < 1e-18 * local:
                break
            pe *= p
            e += 1
        logs.append(spec.kappa * math.log1p(-1.0 / p) + math.log(local))
    total = math.fsum(logs)
    if checkpoint is not None:
        log.info("euler product truncated at %d; last-decade log change %.3e", prime_bound, total - checkpoint)
    return math.exp(total) / math.gamma(spec.kappa + 1)


def fitted_kappa(spec: MultiplicativeSpec, y: float, points: int = 50) -> float:
    """Least-squares slope of sum_{p<=w} g(p) log p / p against log w, for w in [sqrt(y), y]."""
    primes = primes_upto(int(y))
    if primes.size < 2:
        raise DomainError("fitted_kappa needs at least two primes below y")
    terms = np.array([spec(p, 1) for p in primes.tolist()]) * np.log(primes) / primes
    cumulative = np.cumsum(terms)
    w = np.geomspace(max(2.0, math.sqrt(y)), y, points)
    idx = np.searchsorted(primes, w, side="right") - 1
    slope, _ = np.polyfit(np.log(w), cumulative[idx], 1)
    return float(slope)


def mult_sum(spec: MultiplicativeSpec, y: float, prime_bound: int = EULER_PRIME_BOUND) -> MultSum:
    if y < 2:
        raise DomainError("mult_sum needs y >= 2")
    n = int(math.floor(y))
    _check_cap(n, None)
    table = multiplicative_table(n, spec)
    total = fsum(table[1:] / np.arange(1, n + 1))
    return MultSum(total, euler_product(spec, prime_bound), fitted_kappa(spec, y))


def _sqrt2_weight(h_ord: int = 0) -> Callable[[int, int], float]:
    return lambda p, e: math.sqrt(2.0 * p ** min(e, h_ord) / (p ** (2 * e - 1) * (p - 1)))


def lemma_sum_sqrt2(y: int) -> float:
    """sum_{n<=y} sqrt(2^omega(n) / (n phi(n)))."""
    if y < 1:
        raise DomainError("y must be >= 1")
    return fsum(multiplicative_table(int(y), _sqrt2_weight())[1:])


def gcd_h_product(h: int) -> float:
    """prod_{p | h} (1 + 7/sqrt(p))."""
    if h == 0:
        raise DomainError("h must be nonzero")
    return math.prod(1 + 7 / math.sqrt(p) for p in factor(abs(h)).primes)


def lemma_sum_gcd_h(y: int, h: int) -> tuple[float, float]:
    """(sum_{n<=y} sqrt(2^omega(n) (h,n) / (n phi(n))), (log y)^sqrt2 * prod_{p|h}(1 + 7/sqrt p))."""
    if h == 0:
        raise DomainError("h must be nonzero")
    if y < 2:
        raise DomainError("y must be >= 2")
    hf = factor(abs(h))

    def weight(p, e):
        return _sqrt2_weight(hf.ord(p))(p, e)

    total = fsum(multiplicative_table(int(y), weight)[1:])
    return total, math.log(y) ** math.sqrt(2) * gcd_h_product(h)


def lemma_sum_payoff(y: int) -> float:
    """sum_{m<=y} prod_{p|m} (1 + 7/sqrt(p))."""
    if y < 1:
        raise DomainError("y must be >= 1")
    return fsum(multiplicative_table(int(y), lambda p, e: 1 + 7 / math.sqrt(p))[1:])


def payoff_constant(prime_bound: int = EULER_PRIME_BOUND) -> float:
    """Upper bound for sum_d 7^omega(d) mu^2(d) / d^(3/2) = prod_p (1 + 7 p^(-3/2)).

    The tail over p > prime_bound is bounded by exp(7 * sum_{n > P} n^-1.5) <= exp(14 / sqrt(P)).
    """
    primes = primes_upto(prime_bound).astype(np.float64)
    logs = np.log1p(7.0 * primes**-1.5)
    return math.exp(fsum(logs) + 14.0 / math.sqrt(prime_bound))


def prime_inequality_margin(limit: int) -> float:
    """min over primes p <= limit of 7/sqrt(p) - sqrt(2/(p-1)) / (1 - p^-1/2)."""
    p = primes_upto(limit).astype(np.float64)
    lhs = np.sqrt(2.0 / (p - 1)) / (1 - p**-0.5)
    return float(np.min(7.0 / np.sqrt(p) - lhs))


def payoff_divisor_sum(m: int) -> float:
    """sum over squarefree d | m of 7^omega(d) / sqrt(d), by explicit divisor enumeration."""
    if m < 1:
        raise DomainError("m must be >= 1")
    ps = factor(m).primes
    terms = [7.0 ** len(sub) / math.sqrt(math.prod(sub))
             for k in range(len(ps) + 1) for sub in itertools.combinations(ps, k)]
    return math.fsum(terms)
