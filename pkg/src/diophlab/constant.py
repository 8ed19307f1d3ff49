"""The leading constant C = 2^(4/3) / (3 Gamma(2/3)^3) and the identities linking it to a u-integral."""

from __future__ import annotations

import math

from .special import gamma_eval, hypergeom_2f1, integrate

PREFACTOR = 2 ** (2 / 3) / math.pi**2


def u_integrand(u: float) -> float:
    return (1 + 8 * u) ** -0.5 * u ** (-2 / 3)


def u_integral(rel_tol: float = 1e-13) -> float:
    """int_0^1 (1+8u)^(-1/2) u^(-2/3) du, computed as 3 int_0^1 (1+8v^3)^(-1/2) dv."""
    return 3 * integrate(lambda v: (1 + 8 * v**3) ** -0.5, 0.0, 1.0, rel_tol=rel_tol)


def constant_C() -> float:
    return 2 ** (4 / 3) / (3 * gamma_eval(2 / 3) ** 3)


def hyp2f1_at_minus_one(a: float, b: float) -> float:
    """Closed form of 2F1(a, b; a-b+1; -1) through Gamma values."""
    return (2**-a * math.sqrt(math.pi) * gamma_eval(1 + a - b)
            / (gamma_eval(1 + a / 2 - b) * gamma_eval(0.5 + a / 2)))


def _rel(x: float, y: float) -> float:
    return abs(x - y) / max(abs(x), abs(y))


def chain_stages() -> dict[str, float]:
    """Each successive expression for C, evaluated independently."""
    g13, g23, g56 = gamma_eval(1 / 3), gamma_eval(2 / 3), gamma_eval(5 / 6)
    return {
        "u_integral": PREFACTOR * u_integral(),
        "euler_integral": 3 * PREFACTOR * hypergeom_2f1(0.5, 1 / 3, 4 / 3, -8.0),
        "quadratic_transformation": 3 * PREFACTOR * hypergeom_2f1(1.0, 2 / 3, 4 / 3, -1.0),
        "z_minus_one": 3 * PREFACTOR * hyp2f1_at_minus_one(1.0, 2 / 3),
        "gamma_ratio": g13 / (2 ** (1 / 3) * math.pi**1.5 * g56),
        "duplication": g13**2 / (2 ** (2 / 3) * math.pi**2 * g23),
        "reflection": constant_C(),
    }


def chain_check() -> dict[str, float]:
    """Relative residual of every step in the chain, plus the two Gamma identities at z = 1/3."""
    stages = list(chain_stages().items())
    out = {}
    for (_, prev), (name, cur) in zip(stages, stages[1:]):
        out[name] = _rel(prev, cur)
    g13, g23, g56 = gamma_eval(1 / 3), gamma_eval(2 / 3), gamma_eval(5 / 6)
    out["duplication_identity"] = _rel(g56, 2 ** (1 / 3) * math.sqrt(math.pi) * g23 / g13)
    out["reflection_identity"] = _rel(g13 * g23, 2 * math.pi / math.sqrt(3))
    return out
