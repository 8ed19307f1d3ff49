"""Roots of reducible, nonsquare quadratics modulo m.

A quadratic ``c2 t^2 + c1 t + c0`` that splits over Z is stored in normal form
``W (a t + b)(c t + d)`` with both linear factors primitive.  Counting uses
the content reduction plus the five-case prime-power formula; enumeration
builds the roots constructively per prime power and glues them with CRT.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import gcd
from typing import Iterable, Optional

import numpy as np

from .arith import Factorization, factor, is_perfect_square, multiplicative_table, sieve_spf
from .errors import DegreeError, DomainError, IrreducibleError, ResourceError, SquarePolynomialError

#: Largest modulus rho_brute / roots_brute will scan.
BRUTE_CAP = 10**7
#: Largest modulus roots_mod will enumerate.
ENUM_CAP = 2**63 - 1


def _ord(n: int, p: int) -> int:
    if n == 0:
        raise DomainError("ord_p(0) is infinite")
    e = 0
    while n % p == 0:
        n //= p
        e += 1
    return e


@dataclass(frozen=True)
class ReducibleQuadratic:
    """``W (a t + b)(c t + d)`` with gcd(a,b) = gcd(c,d) = 1, a, c > 0 and (a,b) <= (c,d)."""

    W: int
    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        if self.W == 0 or self.a <= 0 or self.c <= 0:
            raise DomainError(f"not in normal form: {self}")
        if gcd(self.a, self.b) != 1 or gcd(self.c, self.d) != 1:
            raise DomainError(f"linear factors must be primitive: {self}")
        if (self.a, self.b) > (self.c, self.d):
            raise DomainError(f"factors not in canonical order: {self}")
        if self.delta == 0:
            raise SquarePolynomialError(f"{self} is a square")

    @property
    def delta(self) -> int:
        return abs(self.a * self.d - self.b * self.c)

    @property
    def sqrtD(self) -> int:
        return abs(self.W) * self.delta

    @property
    def D(self) -> int:
        return self.sqrtD**2

    @property
    def coeffs(self) -> tuple[int, int, int]:
        W, a, b, c, d = self.W, self.a, self.b, self.c, self.d
        return W * a * c, W * (a * d + b * c), W * b * d

    def __call__(self, t):
        c2, c1, c0 = self.coeffs
        return (c2 * t + c1) * t + c0

    def __str__(self):
        def lin(u, v):
            return f"({u}t{v:+d})" if u != 1 else f"(t{v:+d})"

        w = "" if self.W == 1 else ("-" if self.W == -1 else f"{self.W}")
        return f"{w}{lin(self.a, self.b)}{lin(self.c, self.d)}"

    @classmethod
    def from_factors(cls, a: int, b: int, c: int, d: int, W: int = 1) -> "ReducibleQuadratic":
        """Normalize ``W (a t + b)(c t + d)`` through :func:`decompose`."""
        c2, c1, c0 = W * a * c, W * (a * d + b * c), W * b * d
        return decompose(c2, c1, c0)


def _primitive_linear(u: int, v: int) -> tuple[int, int]:
    g = gcd(u, v)
    u, v = u // g, v // g
    return (u, v) if u > 0 else (-u, -v)


def decompose(c2: int, c1: int, c0: int) -> ReducibleQuadratic:
    if c2 == 0:
        raise DegreeError("leading coefficient is zero")
    disc = c1 * c1 - 4 * c2 * c0
    s = is_perfect_square(disc)
    if s is None:
        raise IrreducibleError(f"discriminant {disc} of ({c2}, {c1}, {c0}) is not a square")
    if s == 0:
        raise SquarePolynomialError(f"({c2}, {c1}, {c0}) is a constant times a square")
    content = gcd(gcd(c2, c1), c0)
    W = content if c2 > 0 else -content
    g2, g1, g0 = c2 // W, c1 // W, c0 // W
    s //= content
    # roots (-g1 -+ s) / (2 g2) give factors proportional to 2 g2 t + g1 +- s
    f1 = _primitive_linear(2 * g2, g1 - s)
    f2 = _primitive_linear(2 * g2, g1 + s)
    (a, b), (c, d) = sorted((f1, f2))
    if (a * c, a * d + b * c, b * d) != (g2, g1, g0):
        raise AssertionError(f"factorization of ({c2}, {c1}, {c0}) failed to reproduce it")
    return ReducibleQuadratic(W, a, b, c, d)


def parse_poly(text: str) -> ReducibleQuadratic:
    """Parse ``"c2,c1,c0"``."""
    try:
        c2, c1, c0 = (int(part) for part in text.split(","))
    except ValueError as exc:
        raise DomainError(f"polynomial must be three integers 'c2,c1,c0', got {text!r}") from exc
    return decompose(c2, c1, c0)


T2M1 = decompose(1, 0, -1)


# --- counting ---------------------------------------------------------------

def rho_primitive_pp(f: ReducibleQuadratic, p: int, beta: int) -> int:
    """Number of roots of (a t + b)(c t + d) modulo p**beta (beta >= 1)."""
    pa, pc = f.a % p == 0, f.c % p == 0
    if pa and pc:
        return 0
    if pa or pc:
        return 1
    if f.delta % p:
        return 2
    dl = _ord(f.delta, p)
    if beta <= 2 * dl:
        return p ** (beta // 2)
    return 2 * p**dl


def rho_pp(f: ReducibleQuadratic, p: int, alpha: int) -> int:
    gamma = _ord(f.W, p)
    if alpha <= gamma:
        return p**alpha
    return p**gamma * rho_primitive_pp(f, p, alpha - gamma)


def rho_fast(f: ReducibleQuadratic, m: int) -> int:
    if isinstance(m, Factorization):
        fac = m
    elif m < 1:
        raise DomainError("modulus must be positive")
    else:
        fac = factor(m)
    out = 1
    for p, e in fac:
        out *= rho_pp(f, p, e)
        if out == 0:
            break
    return out


def _scan(f: ReducibleQuadratic, m: int) -> np.ndarray:
    if m < 1:
        raise DomainError("modulus must be positive")
    if m > BRUTE_CAP:
        raise ResourceError(f"residue scan modulus {m} exceeds cap {BRUTE_CAP}")
    c2, c1, c0 = (c % m for c in f.coeffs)
    r = np.arange(1, m + 1, dtype=np.int64)
    val = (c2 * r % m + c1) % m * r % m
    val = (val + c0) % m
    return r[val == 0]


def rho_brute(f: ReducibleQuadratic, m: int) -> int:
    """Count roots in 1..m by scanning every residue."""
    return int(_scan(f, m).size)


def roots_brute(f: ReducibleQuadratic, m: int) -> list[int]:
    return _scan(f, m).tolist()


def rho_bound_check(f: ReducibleQuadratic, m: int) -> bool:
    fac = factor(m)
    return rho_fast(f, fac) <= f.sqrtD * 2 ** len(fac)


def rho_table(f: ReducibleQuadratic, limit: int) -> np.ndarray:
    """``rho_f(m)`` for 0 <= m <= limit (entry 0 unused)."""
    return _rho_table_cached(f, int(limit))


@lru_cache(maxsize=4)
def _rho_table_cached(f, limit):
    table = multiplicative_table(limit, lambda p, e: rho_pp(f, p, e), dtype=np.int64)
    table.flags.writeable = False
    return table


def root_count_prefix(f: ReducibleQuadratic, limit: int) -> np.ndarray:
    """``S_f(y) = sum_{m<=y} rho_f(m)`` for integer 0 <= y <= limit."""
    return _prefix_cached(f, int(limit))


@lru_cache(maxsize=4)
def _prefix_cached(f, limit):
    prefix = np.cumsum(rho_table(f, limit))
    prefix.flags.writeable = False
    return prefix


# --- enumeration ------------------------------------------------------------

@dataclass(frozen=True)
class RootSet:
    modulus: int
    roots: tuple[int, ...]

    def __len__(self):
        return len(self.roots)

    def __iter__(self):
        return iter(self.roots)


def _primitive_roots_pp(f: ReducibleQuadratic, p: int, beta: int) -> list[int]:
    q = p**beta
    pa, pc = f.a % p == 0, f.c % p == 0
    if pa and pc:
        return []
    if pa or pc or f.delta % p:
        out = set()
        if not pa:
            out.add(-f.b * pow(f.a, -1, q) % q)
        if not pc:
            out.add(-f.d * pow(f.c, -1, q) % q)
        return sorted(out)
    # translate r = s - b/a so that the congruence reads s (s + delta1) = 0
    dl = _ord(f.delta, p)
    shift = f.b * pow(f.a, -1, q) % q
    delta1 = (f.d * pow(f.c, -1, q) - shift) % q
    if beta <= 2 * dl:
        svals = range(0, q, p ** ((beta + 1) // 2))
    else:
        step = p ** (beta - dl)
        svals = [*range(0, q, step), *((j - delta1) % q for j in range(0, q, step))]
    return sorted((s - shift) % q for s in svals)


def roots_pp(f: ReducibleQuadratic, p: int, alpha: int) -> list[int]:
    """Roots of f modulo p**alpha as residues in [0, p**alpha)."""
    q = p**alpha
    gamma = _ord(f.W, p)
    if alpha <= gamma:
        return list(range(q))
    base = p ** (alpha - gamma)
    lifted = [r + j * base for r in _primitive_roots_pp(f, p, alpha - gamma) for j in range(p**gamma)]
    return sorted(lifted)


def crt_merge(r1: Iterable[int], m1: int, r2: Iterable[int], m2: int) -> list[int]:
    """All x mod m1*m2 with x = u (mod m1), x = v (mod m2), u in r1, v in r2; gcd(m1, m2) = 1."""
    inv = pow(m1, -1, m2)
    r2 = list(r2)
    return [u + m1 * ((v - u) * inv % m2) for u in r1 for v in r2]


def _to_block(residues: list[int], m: int) -> tuple[int, ...]:
    return tuple(sorted(r % m or m for r in residues))


def roots_mod(f: ReducibleQuadratic, m: int) -> RootSet:
    if m < 1:
        raise DomainError("modulus must be positive")
    if m > ENUM_CAP:
        raise ResourceError(f"enumeration modulus {m} exceeds 64-bit cap")
    residues, mod = [0], 1
    for p, e in factor(m):
        residues = crt_merge(residues, mod, roots_pp(f, p, e), p**e)
        mod *= p**e
        if not residues:
            break
    return RootSet(m, _to_block(residues, m))


def _unit_roots_pp(p: int, e: int) -> list[int]:
    q = p**e
    if p != 2:
        return [1, q - 1]
    if e == 1:
        return [1]
    if e == 2:
        return [1, 3]
    h = q >> 1
    return [1, h - 1, h + 1, q - 1]


def unit_square_roots(m: int) -> RootSet:
    """R(m) = {nu in [1, m] : nu^2 = 1 (mod m)}."""
    if m < 1:
        raise DomainError("modulus must be positive")
    residues, mod = [0], 1
    for p, e in factor(m):
        residues = crt_merge(residues, mod, _unit_roots_pp(p, e), p**e)
        mod *= p**e
    return RootSet(m, _to_block(residues, m))


def unit_rho(m: int) -> int:
    """|R(m)| from the closed form 2^omega(m) adjusted by the power of 2 dividing m."""
    fac = factor(m)
    w = len(fac)
    v2 = fac.ord(2)
    if v2 == 1:
        return 2 ** (w - 1)
    if v2 >= 3:
        return 2 ** (w + 1)
    return 2**w


class RootEnumerator:
    """Roots of f modulo every k up to a limit, reusing a sieve and per-prime-power root lists."""

    def __init__(self, f: ReducibleQuadratic, limit: int, spf: Optional[np.ndarray] = None):
        if limit > ENUM_CAP:
            raise ResourceError("enumeration limit exceeds 64-bit cap")
        self.f = f
        self.limit = int(limit)
        table = spf if spf is not None else sieve_spf(max(2, self.limit))
        self._spf = table.tolist()
        self._pp: dict[tuple[int, int], list[int]] = {}

    def residues(self, k: int) -> list[int]:
        """Roots modulo k as unsorted residues in [0, k)."""
        spf = self._spf
        residues, mod = [0], 1
        while k > 1:
            p = spf[k]
            q, e = 1, 0
            while k % p == 0:
                k //= p
                q *= p
                e += 1
            pr = self._pp.get((p, e))
            if pr is None:
                pr = self._pp[(p, e)] = roots_pp(self.f, p, e)
            if not pr:
                return []
            if mod == 1:
                residues = list(pr)
            else:
                inv = pow(mod, -1, q)
                residues = [u + mod * ((v - u) * inv % q) for u in residues for v in pr]
            mod *= q
        return residues

    def roots(self, k: int) -> RootSet:
        return RootSet(k, _to_block(self.residues(k), k))
