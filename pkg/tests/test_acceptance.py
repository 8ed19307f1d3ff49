"""Acceptance criteria, one test each, printing a PASS/FAIL line per criterion.

Run alone with ``pytest tests/test_acceptance.py -v -s`` to see the lines inline;
they are also collected into the terminal summary.
"""

import math
import time

import numpy as np
import pytest
import sympy

from corpus import CORPUS
from diophlab.arith import (
    factor, lemma_sum_payoff, lemma_sum_sqrt2, payoff_constant, payoff_divisor_sum, prime_inequality_margin,
)
from diophlab.constant import PREFACTOR, chain_check, constant_C, u_integral
from diophlab.equidist import linear_exp_sum_check, r_f_sum, r_f_sums, root_count_total
from diophlab.erdos_turan import (
    C as ET_C, bh_hat, bh_hat_bound, chi, cotangent_inequality_sides, count_and_discrepancy, et_bound, f_bound,
    obliging_instance, random_instance, s_pm_eval, selberg_f,
)
from diophlab.quadruples import (
    count_by_a, count_pairs, enumerate_drq_by_a, enumerate_drq_by_b, lambda_exact, leading_term,
    main_term_integral, q_exact, weighted_sum,
)
from diophlab.roots import T2M1, rho_brute, rho_fast, root_count_prefix, roots_brute, roots_mod, unit_square_roots

RESULTS: list[str] = []


class Checks:
    def __init__(self, number, title, budget):
        self.number, self.title, self.budget = number, title, budget
        self.items: list[tuple[str, bool, str]] = []
        self.t0 = time.perf_counter()

    def check(self, name, ok, detail=""):
        self.items.append((name, bool(ok), detail))

    def finish(self, capsys):
        elapsed = time.perf_counter() - self.t0
        if self.budget is not None:
            self.check(f"runtime < {self.budget:g} s", elapsed < self.budget, f"{elapsed:.1f} s")
        failed = [i for i in self.items if not i[1]]
        status = "FAIL" if failed else "PASS"
        lines = [f"{status} criterion {self.number}: {self.title} ({elapsed:.1f} s)"]
        lines += [f"    {'ok  ' if ok else 'FAIL'} {name}{': ' + d if d else ''}" for name, ok, d in self.items]
        RESULTS.append("\n".join(lines))
        with capsys.disabled():
            print("\n" + "\n".join(lines))
        assert not failed, "; ".join(f"{n} ({d})" for n, _, d in failed)


def _case(f, p, beta):
    pa, pc = f.a % p == 0, f.c % p == 0
    if not (pa or pc) and f.delta % p:
        return "unit"
    if pa or pc:
        return "zero" if f.delta % p == 0 else "one"
    d, dl = f.delta, 0
    while d % p == 0:
        d //= p
        dl += 1
    return "low" if beta <= 2 * dl else "high"


def test_criterion_1_constant(capsys):
    c = Checks(1, "constant reproduction", 1.0)
    C = constant_C()
    c.check("C = 0.338285 within 5e-7", abs(C - 0.338285) < 5e-7, f"C = {C:.10f}")
    u = PREFACTOR * u_integral()
    c.check("(2^(2/3)/pi^2) u_integral = C within 1e-8", abs(u - C) < 1e-8, f"diff {abs(u - C):.2e}")
    res = chain_check()
    worst = max(res, key=res.get)
    c.check("chain residuals < 1e-8", res[worst] < 1e-8, f"worst {worst} = {res[worst]:.2e}")
    c.finish(capsys)


def test_criterion_2_rho_oracle(capsys):
    c = Checks(2, "rho oracle equivalence", 60.0)
    mismatches = 0
    seen, content = set(), False
    for f in CORPUS:
        for m in range(1, 5001):
            scanned = roots_brute(f, m)
            if rho_fast(f, m) != len(scanned) or list(roots_mod(f, m).roots) != scanned:
                mismatches += 1
            for p, e in factor(m):
                g, w = 0, abs(f.W)
                while w % p == 0:
                    w //= p
                    g += 1
                if e > g:
                    seen.add(_case(f, p, e - g))
                else:
                    content = True
    c.check("corpus size >= 20", len(CORPUS) >= 20, str(len(CORPUS)))
    c.check("all five prime-power cases covered", seen == {"unit", "zero", "one", "low", "high"}, str(sorted(seen)))
    c.check("nontrivial content covered", content)
    c.check("rho_fast = scan and roots_mod = scan for m <= 5000", mismatches == 0, f"{mismatches} mismatches")
    c.finish(capsys)


def test_criterion_3_erdos_turan(capsys):
    c = Checks(3, "moving-target Erdos-Turan inequality", 60.0)
    rng = np.random.default_rng(20240611)
    worst, bad = 0.0, 0
    for _ in range(200):
        T = random_instance(rng, int(rng.integers(1, 2001)))
        rep = et_bound(T, int(rng.integers(1, 51)))
        bad += not rep.holds
        worst = max(worst, abs(rep.D_N) / rep.bound)
    c.check("200 random instances", bad == 0, f"max |D_N|/bound = {worst:.3f}")
    N = 2000
    for kind, gamma in (("linear", 0.5), ("power", 0.5)):
        for comp in (False, True):
            T = obliging_instance(N, kind=kind, gamma=gamma, complement=comp)
            rep = et_bound(T, 50)
            label = f"obliging {kind}{' complement' if comp else ''}"
            c.check(f"{label}: |D_N| <= bound", rep.holds, f"D_N = {rep.D_N:.1f}, bound = {rep.bound:.1f}")
            if not comp:
                c.check(f"{label}: D_N >= N - 2", rep.D_N >= N - 2, f"D_N = {rep.D_N:.1f}")
    c.finish(capsys)


def test_criterion_4_selberg(capsys):
    c = Checks(4, "Selberg sandwich and coefficient bounds", 60.0)
    rng = np.random.default_rng(4)
    violations = 0
    for _ in range(1000):
        H = int(rng.integers(1, 31))
        a = rng.uniform(-2, 2)
        b = a + rng.uniform(0, 1)
        y = rng.uniform(-1, 2, 1000)
        lo, hi = s_pm_eval(H, a, b, y)
        x = chi(a, b, y)
        violations += int(np.sum(lo > x + 1e-9) + np.sum(x > hi + 1e-9))
    c.check("S- <= chi <= S+ on 10^3 x 10^3 samples", violations == 0, f"{violations} violations")
    worst = max(abs(bh_hat(H, h)) / bh_hat_bound(H, h) for H in range(1, 101) for h in range(1, H + 1))
    c.check("|B_H^(h)| < bound for 1 <= h <= H <= 100", worst < 1, f"max ratio {worst:.4f}")
    grid = np.linspace(0.001, 0.999, 10**4)
    lhs, rhs = cotangent_inequality_sides(grid)
    c.check("cotangent inequality on grid", np.all(lhs < rhs))
    fv = np.abs([selberg_f(t) for t in grid])
    c.check(f"|f| < (c/2)(1/y - 1) on grid, c = {ET_C:.4f}", np.all(fv < f_bound(grid)))
    c.finish(capsys)


def _subset_oracle(limit):
    sq = lambda n: math.isqrt(n) ** 2 == n
    nbr = {u: {v for v in range(u + 1, limit + 1) if sq(u * v + 1)} for u in range(1, limit + 1)}
    out = set()
    for a in range(1, limit + 1):
        cand = sorted(nbr[a])
        for i, b in enumerate(cand):
            for j in range(i + 1, len(cand)):
                cc = cand[j]
                if cc not in nbr[b]:
                    continue
                for d in cand[j + 1:]:
                    if d in nbr[b] and d in nbr[cc]:
                        r = math.isqrt(a * b + 1)
                        if cc == a + b + 2 * r and d == 4 * r * (a + r) * (b + r):
                            out.add((a, b, cc, d))
    return out


def test_criterion_5_quadruples(capsys):
    c = Checks(5, "quadruple counting exactness", 120.0)
    c.check("Q(119) = 0", q_exact(119) == 0)
    c.check("Q(120) = 1", q_exact(120) == 1)
    oracle = _subset_oracle(600)
    ours = {q.elements for q in enumerate_drq_by_a(600)}
    c.check("by-a = subset search, max <= 600", ours == oracle, f"{len(ours)} vs {len(oracle)}")
    for x in (10**4, 10**5, 10**6):
        a = sorted(enumerate_drq_by_a(x))
        b = sorted(enumerate_drq_by_b(x))
        c.check(f"by-a = by-b at x = {x:.0e}", a == b, f"{len(a)} quadruples")
    c.finish(capsys)


def _pair_oracle(X):
    """Pairs a < b <= X with ab + 1 = r^2, found from the divisors of r^2 - 1."""
    cnt = np.zeros(X + 1, dtype=np.int64)
    for r in range(2, X + 1):
        n = r * r - 1
        lo = -(-n // X)
        for a in sympy.divisors(n):
            if a >= r:
                break
            if a >= lo:
                cnt[n // a] += 1
    return np.cumsum(cnt)


def test_criterion_6_pairs(capsys):
    c = Checks(6, "pair-count asymptotics", 120.0)
    X = 10**5
    oracle = _pair_oracle(X)
    S = root_count_prefix(T2M1, X)
    xs = np.arange(X + 1)
    bad = int(np.sum(oracle[1:] != (S[1:] - xs[1:])))
    c.check("pairs = S(x) - x for all x <= 10^5", bad == 0, f"{bad} mismatches")
    sample = [1, 2, 3, 10, 120, 999, 31337, X]
    c.check("count_pairs agrees at sampled x", all(count_pairs(x) == oracle[x] for x in sample))
    ys = [10**4, 10**5, 10**6, 10**7]
    vals = [root_count_total(T2M1, y) / y for y in ys]
    slope = np.polyfit(np.log(ys), vals, 1)[0]
    target = 6 / math.pi**2
    c.check("slope of S(y)/y vs ln y within 3% of 6/pi^2", abs(slope / target - 1) < 0.03,
            f"slope {slope:.5f}, rel err {abs(slope / target - 1):.2e}")
    c.finish(capsys)


def _scan_sum(f, h, y):
    re, im = [], []
    for k in range(1, y + 1):
        nu = np.array(roots_brute(f, k), dtype=np.float64)
        re.extend(np.cos(2 * np.pi * h * nu / k).tolist())
        im.extend(np.sin(2 * np.pi * h * nu / k).tolist())
    return complex(math.fsum(re), math.fsum(im))


def test_criterion_7_cancellation(capsys):
    c = Checks(7, "equidistribution cancellation", 300.0)
    hs = range(1, 6)
    lo = r_f_sums(T2M1, hs, 10**4)
    hi = r_f_sums(T2M1, hs, 10**6)
    for h in hs:
        r4 = abs(lo[h]) / (1e4 * math.log(1e4))
        r6 = abs(hi[h]) / (1e6 * math.log(1e6))
        c.check(f"h={h}: ratio(10^6) < ratio(10^4)/2", r6 < r4 / 2, f"{r4:.4f} -> {r6:.4f} (x{r6 / r4:.3f})")
    for y in (1, 10, 1000, 10**5):
        c.check(f"R(0, {y}) = S_f({y})", r_f_sum(T2M1, 0, y) == root_count_total(T2M1, y))
    worst = 0.0
    for f in [T2M1] + CORPUS[::4]:
        for h in (1, 3):
            worst = max(worst, abs(r_f_sum(f, h, 2000) - _scan_sum(f, h, 2000)))
    c.check("matches residue scan at y = 2000 to 1e-9", worst < 1e-9, f"max diff {worst:.1e}")
    c.finish(capsys)


def test_criterion_8_linear(capsys):
    c = Checks(8, "linear Ramanujan-sum baseline", 60.0)
    y = 10**4
    fitted = 0.0
    for a in range(1, 21):
        for b in range(0, a + 2):
            if math.gcd(a, b) != 1:
                continue
            for h in range(1, 6):
                fitted = max(fitted, linear_exp_sum_check(a, b, h, y)[2] / (h * math.log(y)))
    c.check("fitted C <= 10", fitted <= 10, f"C = {fitted:.3f}")
    c.finish(capsys)


def test_criterion_9_main_term(capsys):
    c = Checks(9, "main-term consistency", None)
    bad = 0
    for x in (10**4, 10**6):
        for b in range(2, 201):
            lam = lambda_exact(b, x)
            for r in unit_square_roots(b).roots:
                if r in (1, b):
                    continue
                a = (r * r - 1) // b
                bad += (4 * r * (a + r) * (b + r) <= x) != (r / b <= lam)
    c.check("lambda_exact threshold = direct condition, b <= 200", bad == 0, f"{bad} mismatches")
    gaps = {x: abs(weighted_sum(x) - q_exact(x)) / q_exact(x) for x in (10**6, 10**10)}
    c.check("weighted-sum gap smaller at 10^10 than 10^6", gaps[10**10] < gaps[10**6],
            f"{gaps[10**6]:.3f} -> {gaps[10**10]:.3f}")
    ratios = {x: main_term_integral(x) / leading_term(x) for x in (10**8, 10**10, 10**12)}
    r = list(ratios.values())
    c.check("main term / C x^(1/3) ln x in [0.8, 1.2] at 10^12", 0.8 <= ratios[10**12] <= 1.2,
            f"{ratios[10**12]:.4f}")
    c.check("ratio moves toward 1 over 10^8, 10^10, 10^12", abs(r[0] - 1) > abs(r[1] - 1) > abs(r[2] - 1),
            ", ".join(f"{v:.4f}" for v in r))
    t0 = time.perf_counter()
    q12 = count_by_a(10**12)
    dt = time.perf_counter() - t0
    c.check("Q(10^12) by a in < 10 s", dt < 10, f"Q = {q12}, {dt:.2f} s")
    c.finish(capsys)


def test_criterion_10_lemma_sums(capsys):
    c = Checks(10, "multiplicative lemma sums", 120.0)
    margin = prime_inequality_margin(10**6)
    c.check("7/sqrt(p) inequality for p <= 10^6", margin > 0, f"min margin {margin:.4f}")
    grid = [10**3, 10**4, 10**5, 10**6]
    s2 = [lemma_sum_sqrt2(y) / math.log(y) ** math.sqrt(2) for y in grid]
    c.check("sqrt2 sum / (ln y)^sqrt2 monotone bounded", all(u > v for u, v in zip(s2, s2[1:])),
            ", ".join(f"{v:.4f}" for v in s2))
    K = payoff_constant()
    pay = [lemma_sum_payoff(y) / y for y in grid]
    c.check(f"payoff sum / y <= {K:.2f}", max(pay) <= K, ", ".join(f"{v:.2f}" for v in pay))
    worst = 0.0
    for m in range(1, 10**4 + 1):
        lhs = math.prod(1 + 7 / math.sqrt(p) for p in sympy.primefactors(m))
        worst = max(worst, abs(payoff_divisor_sum(m) / lhs - 1))
    c.check("divisor-sum identity for m <= 10^4", worst < 1e-12, f"max rel diff {worst:.1e}")
    c.finish(capsys)
