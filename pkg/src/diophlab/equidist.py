"""Exponential sums over normalized roots nu/k of a reducible quadratic congruence."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .arith import factor, multiplicative_values, sieve_spf
from .errors import DomainError, ResourceError
from .roots import T2M1, ReducibleQuadratic, RootEnumerator, root_count_prefix

R_CAP = 10**7
STAR_CAP = 2 * 10**6
BLOCK = 1 << 15


def _block_roots(enum: RootEnumerator, k0: int, k1: int) -> tuple[np.ndarray, np.ndarray]:
    nus: list[int] = []
    ks: list[int] = []
    for k in range(k0, k1):
        res = enum.residues(k)
        nus.extend(res)
        ks.extend([k] * len(res))
    return np.array(nus, dtype=np.int64), np.array(ks, dtype=np.int64)


def _phase_sums(nu: np.ndarray, k: np.ndarray, hs: Sequence[int]) -> list[complex]:
    out = []
    for h in hs:
        r = (h % k) * nu % k
        # symmetric reduction keeps conj(R(h)) and R(-h) in step
        r = np.where(2 * r > k, r - k, r)
        ang = 2 * np.pi * (r / k)
        # sin(pi) is 1.2e-16 in floating point; the half turn is its own conjugate
        sin = np.where(2 * r == k, 0.0, np.sin(ang))
        out.append(complex(math.fsum(np.cos(ang).tolist()), math.fsum(sin.tolist())))
    return out


def _work(args) -> list[complex]:
    f, hs, k0, k1 = args
    enum = RootEnumerator(f, k1 - 1, spf=sieve_spf(max(2, k1 - 1)))
    return _phase_sums(*_block_roots(enum, k0, k1), hs)


def _blocks(y: int) -> list[tuple[int, int]]:
    return [(k0, min(k0 + BLOCK, y + 1)) for k0 in range(1, y + 1, BLOCK)]


def r_f_sums(f: ReducibleQuadratic, hs: Sequence[int], y: int, workers: int = 1) -> dict[int, complex]:
    """R_f(h, y) for several h from a single root enumeration.

    The k-range is cut into fixed blocks, so the result does not depend on
    ``workers``; block partials are combined with compensated summation.
    """
    y = int(y)
    if y < 1:
        raise DomainError("y must be at least 1")
    if y > R_CAP:
        raise ResourceError(f"y = {y} exceeds the enumeration cap {R_CAP}")
    hs = [int(h) for h in hs]
    blocks = _blocks(y)
    if workers > 1 and len(blocks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_work, [(f, hs, k0, k1) for k0, k1 in blocks]))
    else:
        enum = RootEnumerator(f, y)
        parts = [_phase_sums(*_block_roots(enum, k0, k1), hs) for k0, k1 in blocks]
    out = {}
    for i, h in enumerate(hs):
        out[h] = complex(math.fsum(p[i].real for p in parts), math.fsum(p[i].imag for p in parts))
    return out


def r_f_sum(f: ReducibleQuadratic, h: int, y: int, workers: int = 1) -> complex:
    """R_f(h, y) = sum over k <= y and roots nu of f mod k of e(h nu / k)."""
    if h == 0:
        if y > R_CAP:
            raise ResourceError(f"y = {y} exceeds the enumeration cap {R_CAP}")
        return complex(root_count_total(f, y))
    return r_f_sums(f, [h], y, workers)[h]


def root_count_total(f: ReducibleQuadratic, y: int) -> int:
    """S_f(y) = sum_{k <= y} rho_f(k), exact."""
    y = int(y)
    if y < 1:
        raise DomainError("y must be at least 1")
    return int(root_count_prefix(f, y)[y])


def linear_roots(a: int, b: int, y: int) -> tuple[np.ndarray, np.ndarray]:
    """(nu, k) for the single root nu in (0, k] of a*nu + b = 0 mod k, over k <= y with gcd(k, a) = 1."""
    if a < 1:
        raise DomainError("a must be positive")
    if math.gcd(a, b) != 1:
        raise DomainError(f"gcd({a}, {b}) != 1")
    ks = [k for k in range(1, y + 1) if math.gcd(k, a) == 1]
    nus = [(-b * pow(a, -1, k)) % k or k for k in ks]
    return np.array(nus, dtype=np.int64), np.array(ks, dtype=np.int64)


def linear_main_term(a: int, h: int, y: float) -> float:
    """y (phi(a)/a) mu(a/(h,a)) / phi(a/(h,a))."""
    q = a // math.gcd(h, a)
    _, mu_q, phi_q = multiplicative_values(q)
    _, _, phi_a = multiplicative_values(a)
    return y * phi_a / a * mu_q / phi_q


def linear_exp_sum_check(a: int, b: int, h: int, y: int) -> tuple[complex, float, float]:
    """(exact sum, Ramanujan-sum main term, |exact - main term|) for the linear polynomial a t + b."""
    if h == 0:
        raise DomainError("h must be nonzero")
    if y < 2:
        raise DomainError("y must be at least 2")
    nu, k = linear_roots(a, b, int(y))
    exact = _phase_sums(nu, k, [h])[0]
    main = linear_main_term(a, h, y)
    return exact, main, abs(exact - main)


def normalized_roots(f: ReducibleQuadratic, y: int) -> np.ndarray:
    """Sorted multiset {nu/k : k <= y, f(nu) = 0 mod k, 0 < nu <= k}."""
    y = int(y)
    if y < 1:
        raise DomainError("y must be at least 1")
    if y > STAR_CAP:
        raise ResourceError(f"y = {y} exceeds the point-set cap {STAR_CAP}")
    enum = RootEnumerator(f, y)
    pts = []
    for k0, k1 in _blocks(y):
        nu, k = _block_roots(enum, k0, k1)
        nu = np.where(nu == 0, k, nu)
        pts.append(nu / k)
    return np.sort(np.concatenate(pts))


def star_discrepancy(points) -> float:
    """max_i max(i/N - x_i, x_i - (i-1)/N) for points in [0, 1]."""
    x = np.sort(np.asarray(points, dtype=np.float64))
    n = x.size
    if n == 0:
        raise DomainError("empty point set")
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - x), np.max(x - (i - 1) / n)))


def star_discrepancy_of_roots(f: ReducibleQuadratic, y: int) -> float:
    pts = normalized_roots(f, y)
    if pts.size == 0:
        raise DomainError("f has no roots modulo any k <= y")
    return star_discrepancy(pts)


def cancellation_bound_curve(y: float) -> Optional[float]:
    """y (log y)^(sqrt2 - 1) (log log y)^(5/2), defined for y > e."""
    if y <= math.e:
        return None
    ly = math.log(y)
    return y * ly ** (math.sqrt(2) - 1) * math.log(ly) ** 2.5


@dataclass
class WeylRow:
    h: int
    y: int
    R: complex
    trivial_count: int
    probe_residual: Optional[float] = None
    probe_ratio: Optional[float] = None

    @property
    def abs_R(self) -> float:
        return abs(self.R)

    @property
    def ratio(self) -> float:
        return self.abs_R / (self.y * math.log(self.y)) if self.y > 1 else math.nan

    def as_dict(self) -> dict:
        return {
            "h": self.h, "y": self.y, "re_R": self.R.real, "im_R": self.R.imag,
            "abs_R": self.abs_R, "trivial_count": self.trivial_count, "ratio": self.ratio,
            "probe_residual": self.probe_residual, "probe_ratio": self.probe_ratio,
            "bound_curve": cancellation_bound_curve(self.y),
        }


CSV_COLUMNS = ("h", "y", "re_R", "im_R", "abs_R", "trivial_count", "ratio", "probe_residual",
               "probe_ratio", "bound_curve")


@dataclass
class WeylReport:
    f: ReducibleQuadratic
    y_grid: list[int]
    rows: list[WeylRow] = field(default_factory=list)

    def __post_init__(self):
        for row in self.rows:
            if row.abs_R > row.trivial_count * (1 + 1e-12):
                raise AssertionError(f"|R| exceeds the number of terms at h={row.h}, y={row.y}")

    def column(self, h: int) -> list[WeylRow]:
        return [r for r in self.rows if r.h == h]


def cancellation_report(f: ReducibleQuadratic, y_grid: Sequence[int], h_max: int,
                        workers: int = 1) -> WeylReport:
    """R_f(h, y) for 1 <= h <= h_max over an ascending y grid.

    For t^2 - 1 the rows also carry R - 2y and its ratio to y^0.6.
    """
    if h_max < 1:
        raise DomainError("h_max must be at least 1")
    grid = [int(y) for y in y_grid]
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise DomainError("y grid must be strictly ascending")
    hs = list(range(1, h_max + 1))
    probe = f == T2M1
    rows = []
    for y in grid:
        sums = r_f_sums(f, hs, y, workers)
        count = root_count_total(f, y)
        for h in hs:
            row = WeylRow(h, y, sums[h], count)
            if probe:
                row.probe_residual = sums[h].real - 2 * y
                row.probe_ratio = row.probe_residual / y**0.6
            rows.append(row)
    rows.sort(key=lambda r: (r.h, r.y))
    return WeylReport(f, grid, rows)
