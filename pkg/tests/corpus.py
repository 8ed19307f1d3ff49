"""Reducible quadratics exercising every prime-power case, content primes and both alpha vs 2 delta regimes."""

from diophlab.roots import ReducibleQuadratic

# (W, a, b, c, d) meaning W (a t + b)(c t + d)
FACTORS = [
    (1, 1, -1, 1, 1),       # t^2 - 1
    (3, 1, -1, 1, 1),       # content 3
    (1, 1, -1, 1, -4),      # delta 3
    (1, 3, 1, 3, 2),        # 3 | ac and 3 | delta: no roots mod 3
    (1, 1, 1, 2, 3),        # 2 | ac, 2 does not divide delta
    (1, 1, -2, 1, 2),       # delta 4
    (1, 1, -9, 1, 9),       # delta 18
    (1, 1, -1, 1, 63),      # delta 64: 2-adic alpha <= 2 delta up to 4096
    (1, 1, 0, 1, 8),        # t (t + 8)
    (-1, 1, -1, 1, 1),      # negative leading coefficient
    (12, 1, 1, 1, 7),       # content 12, delta 6
    (1, 5, 1, 1, -3),       # delta 16
    (1, 2, 1, 4, 3),        # both leading coefficients even, delta 2
    (1, 7, 2, 7, 9),        # 7 | ac and 7 | delta
    (4, 1, -1, 1, -9),      # content 4, delta 8
    (1, 1, 5, 1, 32),       # delta 27
    (30, 1, 0, 1, 30),      # content 30, delta 30
    (1, 11, -3, 1, 2),      # delta 25
    (-6, 2, 1, 3, -1),      # delta 5, content -6
    (1, 1, -2, 1, 486),     # delta 488
    (1, 1, 1, 1, 217),      # delta 216
]

CORPUS = [ReducibleQuadratic.from_factors(a, b, c, d, W) for W, a, b, c, d in FACTORS]
