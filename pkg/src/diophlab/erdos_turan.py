"""Discrepancy of a sequence against moving target intervals modulo 1.

Implements Vaaler/Selberg one-sided trigonometric approximants, exact
counting of hits, and the moving-target Erdős–Turán bound

    |D_N| <= N/(H+1) + sum_{h<=H} (1 + pi h (V(alpha) + V(beta))) ((2-c)/(H+1) + c/h) M_N(h)

with c = 16/(7 pi), as a checked inequality.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .arith import fsum
from .errors import BoundViolation, DomainError

C = 16 / (7 * math.pi)
SLACK = 1e-9


def e(x):
    """exp(2 pi i x), with x reduced mod 1 before the trig call."""
    frac = np.mod(x, 1.0)
    return np.cos(2 * np.pi * frac) + 1j * np.sin(2 * np.pi * frac)


def nearest_int_dist(x):
    return np.abs(x - np.round(x))


_ZETA_EVEN = [math.pi**2 / 6, math.pi**4 / 90, math.pi**6 / 945, math.pi**8 / 9450,
              math.pi**10 / 93555] + [math.fsum(n ** (-2.0 * k) for n in range(1, 60)) for k in range(6, 30)]


def _ecot_minus(e: float) -> float:
    """e cot(pi e) - 1/pi = -(2/pi) sum_k zeta(2k) e^(2k), for 0 <= e <= 1/4."""
    e2 = e * e
    terms, p = [], 1.0
    for z in _ZETA_EVEN:
        p *= e2
        terms.append(z * p)
        if p < 1e-18:
            break
    return -2 / math.pi * math.fsum(terms)


def selberg_f(y: float) -> float:
    """f(y) = -(1-y) cot(pi y) - 1/pi on 0 < y < 1."""
    if not 0 < y < 1:
        raise DomainError(f"selberg_f needs 0 < y < 1, got {y}")
    e1 = 1.0 - y
    if e1 < 0.25:
        # cot(pi y) = -cot(pi e1); the two O(1) terms cancel, so use the series
        return _ecot_minus(e1)
    if y < 1e-6:
        regular = -math.pi * y / 3 - (math.pi * y) ** 3 / 45
        return -e1 * (1 / (math.pi * y) + regular) - 1 / math.pi
    cot = 1 / math.tan(math.pi * y) if y <= 0.5 else -1 / math.tan(math.pi * e1)
    return -e1 * cot - 1 / math.pi


def bh_hat(H: int, h: int) -> complex:
    """Fourier coefficient of B_H at frequency h."""
    if H < 1:
        raise DomainError("H must be positive")
    if h == 0:
        return complex(1 / (2 * (H + 1)))
    if abs(h) >= H + 1:
        return 0j
    t = abs(h) / (H + 1)
    sign = 1 if h > 0 else -1
    return complex(1 - t, -sign * selberg_f(t)) / (2 * (H + 1))


def _f_weights(H: int) -> np.ndarray:
    return np.array([selberg_f(h / (H + 1)) for h in range(1, H + 1)])


def bh_eval(H: int, x):
    """B_H(x) from its sine-series plus Fejér-kernel definition; vectorized in x."""
    if H < 1:
        raise DomainError("H must be positive")
    x = np.mod(np.asarray(x, dtype=np.float64), 1.0)
    h = np.arange(1, H + 1)
    ang = 2 * np.pi * np.multiply.outer(x, h)
    sine = np.sin(ang) @ _f_weights(H) / (H + 1)
    fejer = (1 + 2 * (np.cos(ang) @ (1 - h / (H + 1)))) / (2 * (H + 1))
    out = sine + fejer
    return float(out) if out.ndim == 0 else out


def _check_interval(alpha, beta):
    alpha = np.asarray(alpha, dtype=np.float64)
    beta = np.asarray(beta, dtype=np.float64)
    if np.any(beta < alpha) or np.any(beta > alpha + 1):
        raise DomainError("need alpha <= beta <= alpha + 1")
    return alpha, beta


def s_pm_eval(H: int, alpha: float, beta: float, y):
    """(S_H^-, S_H^+) at y: trigonometric minorant and majorant of chi(alpha, beta; .)."""
    alpha, beta = _check_interval(alpha, beta)
    length = beta - alpha
    s_plus = length + bh_eval(H, y - beta) + bh_eval(H, alpha - y)
    s_minus = length - bh_eval(H, beta - y) - bh_eval(H, y - alpha)
    return s_minus, s_plus


def chi(alpha, beta, y):
    """1 when some z in [alpha, beta] has z = y (mod 1), else 0."""
    alpha = np.asarray(alpha, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    shift = np.ceil(alpha - y)
    return ((y + shift) <= beta).astype(np.int64)


@dataclass(frozen=True)
class TargetSequence:
    u: np.ndarray
    alpha: np.ndarray
    beta: np.ndarray

    def __post_init__(self):
        arrays = [np.array(v, dtype=np.float64) for v in (self.u, self.alpha, self.beta)]
        for arr in arrays:
            arr.flags.writeable = False
        u, alpha, beta = arrays
        if u.ndim != 1 or u.size < 1 or alpha.shape != u.shape or beta.shape != u.shape:
            raise DomainError("u, alpha, beta must be equal-length nonempty sequences")
        _check_interval(alpha, beta)
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "beta", beta)

    @property
    def N(self) -> int:
        return int(self.u.size)

    def complement(self) -> "TargetSequence":
        """Same points against the complementary intervals [beta, alpha + 1]."""
        # beta <= alpha + 1 <= beta + 1 exactly; clip away rounding in alpha + 1
        upper = np.clip(self.alpha + 1, self.beta, self.beta + 1)
        return TargetSequence(self.u, self.beta, upper)

    def to_json(self) -> dict:
        return {"u": self.u.tolist(), "alpha": self.alpha.tolist(), "beta": self.beta.tolist()}

    @classmethod
    def from_json(cls, obj: dict) -> "TargetSequence":
        try:
            return cls(obj["u"], obj["alpha"], obj["beta"])
        except (KeyError, TypeError) as exc:
            raise DomainError(f"instance must have u, alpha, beta arrays: {exc}") from exc


def count_and_discrepancy(T: TargetSequence) -> tuple[int, float]:
    Z = int(chi(T.alpha, T.beta, T.u).sum())
    return Z, Z - fsum(T.beta - T.alpha)


def total_variation(s) -> float:
    s = np.asarray(s, dtype=np.float64)
    if s.size < 1:
        raise DomainError("empty sequence")
    return fsum(nearest_int_dist(np.diff(s)))


def prefix_exp_sums(u, h: int) -> np.ndarray:
    return np.cumsum(e(h * np.asarray(u, dtype=np.float64)))


def prefix_max_exp_sum(u, h: int) -> float:
    """M_N(h) = max over T of |sum_{n<=T} e(h u_n)|."""
    u = np.asarray(u, dtype=np.float64)
    if u.size < 1:
        raise DomainError("empty sequence")
    return float(np.max(np.abs(prefix_exp_sums(u, h))))


def bound_weight(H: int, h: int) -> float:
    return (2 - C) / (H + 1) + C / h


def bh_hat_bound(H: int, h: int) -> float:
    """(1/4)((2-c)/(H+1) + c/|h|), a strict upper bound for |bh_hat(H, h)|."""
    return bound_weight(H, abs(h)) / 4


def _monotone(s: np.ndarray) -> bool:
    d = np.diff(s)
    return bool(np.all(d >= 0) or np.all(d <= 0))


@dataclass
class DiscrepancyReport:
    N: int
    H: int
    Z_N: int
    D_N: float
    V_alpha: float
    V_beta: float
    M: dict[int, float]
    bound: float
    monotone_rhs: Optional[float] = None
    slack: float = field(default=SLACK, repr=False)

    def __post_init__(self):
        if not 0 <= self.Z_N <= self.N:
            raise DomainError("Z_N out of range")
        if abs(self.D_N) > self.bound + self.slack:
            raise BoundViolation(f"|D_N| = {abs(self.D_N)} exceeds bound {self.bound}")

    @property
    def holds(self) -> bool:
        return abs(self.D_N) <= self.bound + self.slack

    def row(self) -> dict:
        return {
            "N": self.N, "H": self.H, "Z_N": self.Z_N, "D_N": self.D_N,
            "V_alpha": self.V_alpha, "V_beta": self.V_beta, "bound": self.bound,
            "monotone_rhs": self.monotone_rhs, "holds": self.holds,
        }


def et_bound(T: TargetSequence, H: int) -> DiscrepancyReport:
    if H < 1:
        raise DomainError("H must be positive")
    Z, D = count_and_discrepancy(T)
    va, vb = total_variation(T.alpha), total_variation(T.beta)
    M = {h: prefix_max_exp_sum(T.u, h) for h in range(1, H + 1)}
    terms = [(1 + math.pi * h * (va + vb)) * bound_weight(H, h) * M[h] for h in M]
    bound = T.N / (H + 1) + math.fsum(terms)
    # the monotone-target form has an unknown implied constant, so it is only reported
    cor = None
    if _monotone(T.alpha) and _monotone(T.beta):
        spread = 1 + abs(T.alpha[-1] - T.alpha[0]) + abs(T.beta[-1] - T.beta[0])
        cor = T.N / H + spread * math.fsum(M.values())
    return DiscrepancyReport(T.N, H, Z, D, va, vb, M, bound, cor)


def partial_summation_sides(u, s, h: int) -> tuple[float, float]:
    """(|sum e(h u_n) e(-h s_n)|, (1 + 2 pi |h| V_N(s)) M_N(h))."""
    u = np.asarray(u, dtype=np.float64)
    s = np.asarray(s, dtype=np.float64)
    lhs = abs(np.sum(e(h * u) * e(-h * s)))
    return float(lhs), (1 + 2 * math.pi * abs(h) * total_variation(s)) * prefix_max_exp_sum(u, h)


def cotangent_inequality_sides(y):
    """(pi cot(pi y) + 1/(1-y), 1/y + 3(1-y)/2 - 1/(2-y)); the first is smaller on (0, 1)."""
    y = np.asarray(y, dtype=np.float64)
    lhs = np.pi / np.tan(np.pi * y) + 1 / (1 - y)
    rhs = 1 / y + 1.5 * (1 - y) - 1 / (2 - y)
    return lhs, rhs


def f_bound(y):
    """(c/2)(1/y - 1), which strictly exceeds |selberg_f(y)| on (0, 1)."""
    return C / 2 * (1 / np.asarray(y, dtype=np.float64) - 1)


def obliging_instance(N: int, kind: str = "linear", gamma: float = 0.5, complement: bool = False) -> TargetSequence:
    """Targets alpha_n = u_n - 2^-n, beta_n = u_n + 2^-n around u_n = n/(N+1) or n^gamma."""
    n = np.arange(1, N + 1, dtype=np.float64)
    if kind == "linear":
        u = n / (N + 1)
    elif kind == "power":
        u = n**gamma
    else:
        raise DomainError(f"unknown obliging kind {kind!r}")
    width = np.exp2(-n)
    alpha = u - width
    # at n = 1 the interval has length exactly 1; keep rounding from pushing beta past alpha + 1
    T = TargetSequence(u, alpha, np.minimum(u + width, alpha + 1))
    return T.complement() if complement else T


def random_instance(rng: np.random.Generator, N: int) -> TargetSequence:
    """A mix of smooth, jumpy and fixed targets to exercise both variation terms."""
    u = rng.uniform(-3, 3, N) if rng.random() < 0.5 else np.cumsum(rng.uniform(0, 0.3, N))
    style = rng.integers(3)
    if style == 0:
        alpha = np.full(N, rng.uniform(-1, 1))
    elif style == 1:
        alpha = np.cumsum(rng.normal(0, 0.02, N))
    else:
        alpha = rng.uniform(-2, 2, N)
    length = rng.uniform(0, 1, N) if rng.random() < 0.5 else np.full(N, rng.uniform(0, 1))
    return TargetSequence(u, alpha, alpha + length)
