"""Doubly regular Diophantine quadruples {a, b, a+b+2r, 4r(a+r)(b+r)} with ab + 1 = r^2.

Exact counting of Q(x), the number of such quadruples in [1, x], by two
independent parametrizations, and the pieces of its asymptotic evaluation:
the truncated weighted sum of rho(b) lambda(b, x), the main-term integral
against S(t), and the leading term C x^(1/3) log x.
"""

from __future__ import annotations

import itertools
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from typing import Callable, Iterator, Optional, Sequence

import numpy as np

from .arith import fsum, is_perfect_square
from .constant import chain_check, constant_C, u_integral  # noqa: F401  (re-exported)
from .errors import BoundViolation, DomainError, NotDiophantinePairError
from .roots import T2M1, RootEnumerator, rho_table, root_count_prefix
from .special import gamma_eval, hypergeom_2f1, integrate_tail  # noqa: F401
from .store import Store

log = logging.getLogger(__name__)

DUAL_CAP = 10**10
EXACT_S_LIMIT = 10**7
A_CHUNK = 4096
DUJELLA_LOW = 0.1608
DUJELLA_HIGH = 0.5354


def max_element(a: int, b: int, r: int) -> int:
    return 4 * r * (a + r) * (b + r)


@dataclass(frozen=True, order=True)
class DRQuadruple:
    a: int
    b: int
    r: int

    def __post_init__(self):
        if not 1 <= self.a < self.b:
            raise DomainError(f"need 1 <= a < b, got a={self.a}, b={self.b}")
        if self.a * self.b + 1 != self.r * self.r or self.r < 1:
            raise DomainError(f"{self.a}*{self.b} + 1 != {self.r}^2")

    @property
    def elements(self) -> tuple[int, int, int, int]:
        a, b, r = self.a, self.b, self.r
        return (a, b, a + b + 2 * r, max_element(a, b, r))

    @property
    def max(self) -> int:
        return max_element(self.a, self.b, self.r)


def is_diophantine_tuple(elems: Sequence[int]) -> bool:
    elems = [int(e) for e in elems]
    if any(e < 1 for e in elems):
        raise DomainError("elements must be positive")
    if len(set(elems)) != len(elems):
        raise DomainError("elements must be distinct")
    return all(is_perfect_square(u * v + 1) is not None for u, v in itertools.combinations(elems, 2))


def drq_from_pair(a: int, b: int) -> DRQuadruple:
    if not 1 <= a < b:
        raise DomainError("need 1 <= a < b")
    r = is_perfect_square(a * b + 1)
    if r is None:
        raise NotDiophantinePairError(f"{a}*{b} + 1 is not a perfect square")
    return DRQuadruple(a, b, r)


# --- enumeration ------------------------------------------------------------

def a_limit(x: int) -> int:
    """Smallest a with 16 a^3 >= x; every quadruple in [1, x] has a below it."""
    a = max(1, round((x / 16) ** (1 / 3)))
    while 16 * a**3 < x:
        a += 1
    while a > 1 and 16 * (a - 1) ** 3 >= x:
        a -= 1
    return a


def _unit_roots(enum: RootEnumerator, a: int) -> list[int]:
    return sorted(v or a for v in enum.residues(a))


def enumerate_drq_by_a(x: int, a_range: Optional[tuple[int, int]] = None) -> Iterator[DRQuadruple]:
    """Quadruples with max element <= x, as r = nu + a k for nu in R(a), k >= 1.

    Order is lexicographic in (a, nu, k).  ``a_range`` restricts a to [a0, a1).
    """
    x = int(x)
    top = a_limit(x)
    a0, a1 = a_range if a_range else (1, top)
    a1 = min(a1, top)
    if a1 <= a0:
        return
    enum = RootEnumerator(T2M1, max(2, a1))
    for a in range(a0, a1):
        for nu in _unit_roots(enum, a):
            k = 1
            while True:
                r = nu + a * k
                b = (r * r - 1) // a
                if max_element(a, b, r) > x:
                    break
                yield DRQuadruple(a, b, r)
                k += 1


def enumerate_drq_by_b(x: int) -> Iterator[DRQuadruple]:
    """Quadruples with max element <= x, as b ascending with r in R(b), r > 1, a = (r^2-1)/b.

    The max element exceeds 4 b^2, so b < sqrt(x/4) suffices.
    """
    x = int(x)
    top = math.isqrt(max(0, x // 4)) + 1
    enum = RootEnumerator(T2M1, max(2, top))
    for b in range(2, top + 1):
        if 4 * b * b >= x:
            break
        found = []
        for r in _unit_roots(enum, b):
            if r == 1:
                continue
            a = (r * r - 1) // b
            if a < b and max_element(a, b, r) <= x:
                found.append(DRQuadruple(a, b, r))
        yield from sorted(found)


def _count_for_root(a: int, nu: int, x: int) -> int:
    """#{k >= 1 : max element at r = nu + a k is <= x}."""
    def ok(k):
        r = nu + a * k
        return max_element(a, (r * r - 1) // a, r) <= x

    # 4 r^2 (a+r)^2 / a ~ max element; invert for a starting guess
    r_est = (-a + math.sqrt(a * a + 2 * math.sqrt(a * x))) / 2
    k = max(0, int((r_est - nu) / a))
    while k > 0 and not ok(k):
        k -= 1
    while ok(k + 1):
        k += 1
    return k


def count_a_range(x: int, a0: int, a1: int) -> int:
    x = int(x)
    a1 = min(a1, a_limit(x))
    if a1 <= a0:
        return 0
    enum = RootEnumerator(T2M1, max(2, a1))
    return sum(_count_for_root(a, nu, x) for a in range(a0, a1) for nu in _unit_roots(enum, a))


def _chunk_job(args) -> int:
    return count_a_range(*args)


def count_by_a(x: int, workers: int = 1, store: Optional[Store] = None, chunk: int = A_CHUNK) -> int:
    """Q(x) by the a-parametrization, in checkpointed a-range chunks."""
    x = int(x)
    top = a_limit(x)
    chunks = [(a0, min(a0 + chunk, top)) for a0 in range(1, top, chunk)]
    counts: dict[tuple[int, int], int] = {}
    todo = []
    for c in chunks:
        hit = store.get("q_chunk", {"x": x, "a0": c[0], "a1": c[1]}) if store else None
        if hit is not None:
            counts[c] = int(hit)
        else:
            todo.append(c)
    if workers > 1 and len(todo) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = pool.map(_chunk_job, [(x, a0, a1) for a0, a1 in todo])
            pairs = zip(todo, results)
            for c, n in pairs:
                counts[c] = n
                if store:
                    store.put("q_chunk", {"x": x, "a0": c[0], "a1": c[1]}, n)
    else:
        for c in todo:
            counts[c] = count_a_range(x, *c)
            if store:
                store.put("q_chunk", {"x": x, "a0": c[0], "a1": c[1]}, counts[c])
    return sum(counts.values())


def q_exact(x: int, workers: int = 1, store: Optional[Store] = None) -> int:
    """Q(x); cross-checked against the b-parametrization when x <= DUAL_CAP."""
    x = int(x)
    if x < 1:
        raise DomainError("x must be positive")
    n = count_by_a(x, workers, store)
    if x <= DUAL_CAP:
        m = sum(1 for _ in enumerate_drq_by_b(x))
        if m != n:
            raise BoundViolation(f"Q({x}): a-count {n} != b-count {m}")
    return n


def count_pairs(x: int) -> int:
    """#{a < b <= x : ab + 1 square} = S(x) - floor(x)."""
    x = int(x)
    if x < 1:
        raise DomainError("x must be positive")
    return int(root_count_prefix(T2M1, x)[x]) - x


# --- lambda and the weighted sum --------------------------------------------

def lambda_approx(b: int, x: float) -> float:
    """1 for b <= (x/16)^(1/3), else sqrt(x^(1/2) / (2 b^(3/2)) + 1/4) - 1/2."""
    if b < 1 or x < 3:
        raise DomainError("need b >= 1 and x >= 3")
    if 16 * b**3 <= x:
        return 1.0
    return math.sqrt(math.sqrt(x) / (2 * b**1.5) + 0.25) - 0.5


def _lambda_lhs(s: float, b: int) -> float:
    u = s * (1 + s)
    return u * u - u / (b * b)


def lambda_exact(b: int, x: float, tol: float = 1e-13) -> float:
    """sup of s in [0, 1] with s^2 (1+s)^2 - s(1+s)/b^2 <= x / (4 b^3), by bisection.

    With r = s b this is exactly 4 r (a+r) (b+r) <= x.  The feasible set is an
    interval [0, s*] because the left side is nonpositive for s(1+s) <= 1/b^2
    and increasing afterwards.
    """
    if b < 1 or x < 3:
        raise DomainError("need b >= 1 and x >= 3")
    rhs = x / (4 * b**3)
    if _lambda_lhs(1.0, b) <= rhs:
        return 1.0
    lo, hi = 0.0, 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if _lambda_lhs(mid, b) <= rhs:
            lo = mid
        else:
            hi = mid
    return lo


def psi(x: float) -> float:
    """(log x)^((2 - sqrt 2)/3) (log log x)^(-5/6)."""
    if x < 16:
        raise DomainError("psi needs x >= 16")
    lx = math.log(x)
    return lx ** ((2 - math.sqrt(2)) / 3) * math.log(lx) ** (-5 / 6)


def H_choice(x: float) -> int:
    """ceil((log x)^(1 - sqrt2/2) (log log x)^(-5/4))."""
    if x < 16:
        raise DomainError("H_choice needs x >= 16")
    lx = math.log(x)
    return math.ceil(lx ** (1 - math.sqrt(2) / 2) * math.log(lx) ** -1.25)


def truncation_B(x: float, psi_value: Optional[float] = None) -> int:
    p = psi(x) if psi_value is None else psi_value
    return math.floor(x ** (1 / 3) * p)


def weighted_sum(x: float, lam: str | Callable[[int, float], float] = "approx",
                 psi_value: Optional[float] = None) -> float:
    """sum_{b <= B} rho(b) lambda(b, x) with B = floor(x^(1/3) psi(x)).

    ``lam`` is "approx", "exact", "one" or a callable (b, x) -> weight.
    """
    if x < 16:
        raise DomainError("weighted_sum needs x >= 16")
    B = truncation_B(x, psi_value)
    if B < 1:
        return 0.0
    fn = {"approx": lambda_approx, "exact": lambda_exact, "one": lambda b, x: 1.0}.get(lam, lam)
    if not callable(fn):
        raise DomainError(f"unknown lambda choice {lam!r}")
    rho = rho_table(T2M1, B)
    return math.fsum(int(rho[b]) * fn(b, x) for b in range(1, B + 1))


# --- main-term integral -----------------------------------------------------

def main_term_integrand(t: float, x: float, S: Callable[[float], float]) -> float:
    c = 2 * math.sqrt(x)
    return (1 + c * t**-1.5) ** -0.5 * S(t) * t**-2.5


def S_asymptotic(t: float) -> float:
    return 6 / math.pi**2 * t * math.log(t)


def _step_weights(x: float, n: np.ndarray) -> np.ndarray:
    """int_n^{n+1} t^(-5/2) (1 + 2 sqrt(x) t^(-3/2))^(-1/2) dt, in cancellation-free form."""
    c = 2 * math.sqrt(x)
    n = n.astype(np.float64)
    hi = n**-1.5
    lo = (n + 1) ** -1.5
    diff = -hi * np.expm1(-1.5 * np.log1p(1 / n))
    return (4 / 3) * diff / (np.sqrt(1 + c * lo) + np.sqrt(1 + c * hi))


def _antiderivative(t: float, x: float) -> float:
    c = 2 * math.sqrt(x)
    return -(4 / (3 * c)) * math.sqrt(1 + c * t**-1.5)


def main_term_integral(x: float, exact_limit: int = EXACT_S_LIMIT, rel_tol: float = 1e-12,
                       pieces: int = 1) -> float:
    """(3 x^(1/2) / 4) int_{(x/16)^(1/3)}^inf (1 + 2 x^(1/2) / t^(3/2))^(-1/2) S(t) t^(-5/2) dt.

    S is the exact step function up to ``exact_limit``, integrated piece by
    piece in closed form; beyond it S(t) is replaced by (6/pi^2) t log t and
    the tail goes to adaptive quadrature (``rel_tol``, ``pieces`` initial cells).
    """
    if x < 16:
        raise DomainError("main_term_integral needs x >= 16")
    T0 = (x / 16) ** (1 / 3)
    L = int(exact_limit)
    total = []
    if T0 < L:
        prefix = root_count_prefix(T2M1, L)
        n0 = math.floor(T0)
        first_end = n0 + 1
        total.append(int(prefix[n0]) * (_antiderivative(first_end, x) - _antiderivative(T0, x)))
        n = np.arange(first_end, L, dtype=np.int64)
        if n.size:
            total.append(fsum(prefix[first_end:L].astype(np.float64) * _step_weights(x, n)))
        tail_start = float(L)
    else:
        tail_start = T0
    tail = integrate_tail(lambda t: main_term_integrand(t, x, S_asymptotic), tail_start,
                          rel_tol=rel_tol, pieces=pieces)
    total.append(tail)
    return 0.75 * math.sqrt(x) * math.fsum(total)


def leading_term(x: float) -> float:
    return constant_C() * x ** (1 / 3) * math.log(x)


# --- reports ----------------------------------------------------------------

@dataclass
class CountReport:
    x: int
    Q_exact: int
    weighted_sum: float
    main_term_integral: float
    leading_term: float
    dujella_low: float
    dujella_high: float
    psi: float
    B: int
    H: int

    @property
    def in_dujella_bracket(self) -> bool:
        return self.dujella_low <= self.Q_exact <= self.dujella_high

    @property
    def normalized(self) -> float:
        return self.Q_exact / (self.x ** (1 / 3) * math.log(self.x))

    def row(self) -> dict:
        out = asdict(self)
        out["C_term"] = out.pop("leading_term")
        out["main_term"] = out.pop("main_term_integral")
        out["in_dujella_bracket"] = self.in_dujella_bracket
        return {k: out[k] for k in REPORT_COLUMNS}


REPORT_COLUMNS = ("x", "Q_exact", "weighted_sum", "main_term", "C_term", "dujella_low",
                  "dujella_high", "psi", "B", "H", "in_dujella_bracket")


def count_report(x: int, workers: int = 1, store: Optional[Store] = None) -> CountReport:
    x = int(x)
    if x < 16:
        raise DomainError("reports need x >= 16")
    scale = x ** (1 / 3) * math.log(x)
    rep = CountReport(
        x=x, Q_exact=q_exact(x, workers, store), weighted_sum=weighted_sum(x),
        main_term_integral=main_term_integral(x), leading_term=leading_term(x),
        dujella_low=DUJELLA_LOW * scale, dujella_high=DUJELLA_HIGH * scale,
        psi=psi(x), B=truncation_B(x), H=H_choice(x),
    )
    if not rep.in_dujella_bracket:
        log.info("Q(%d) = %d lies outside the Dujella bracket [%.1f, %.1f]",
                 x, rep.Q_exact, rep.dujella_low, rep.dujella_high)
    return rep


def asymptotic_report(x_list: Sequence[int], workers: int = 1, store: Optional[Store] = None) -> list[CountReport]:
    return [count_report(x, workers, store) for x in x_list]


lambda_paper = lambda_approx
