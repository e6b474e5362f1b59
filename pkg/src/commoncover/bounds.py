"""Exact maximal-lcm values, certified upper bounds, and size-bound reports.

The exponential parts of the cover-size bounds are evaluated in high
precision and then inflated by a relative 1e-40 margin before conversion to
an exact rational, so a "satisfied" verdict can never be a false positive.
Integer parts (factorials, powers) are exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import mpmath


def _primes_upto(n: int) -> list:
    sieve = bytearray([1]) * (n + 1)
    out = []
    for p in range(2, n + 1):
        if sieve[p]:
            out.append(p)
            for q in range(p * p, n + 1, p):
                sieve[q] = 0
    return out


def landau_exact(n: int) -> int:
    """Largest order of a permutation of n points: max lcm over partitions,
    computed by dynamic programming over prime powers."""
    if n < 1:
        raise ValueError("n must be positive")
    best = [1] * (n + 1)
    for p in _primes_upto(n):
        for budget in range(n, 0, -1):
            q = p
            while q <= budget:
                cand = best[budget - q] * q
                if cand > best[budget]:
                    best[budget] = cand
                q *= p
    return best[n]


def _to_fraction(x) -> Fraction:
    sign, man, exp, _ = x._mpf_
    frac = Fraction(man) * (Fraction(2) ** exp)
    return -frac if sign else frac


_INFLATE = Fraction(10 ** 40 + 1, 10 ** 40)


def upper_exp_sqrt(n: int, coefficient: Fraction) -> Fraction:
    """Certified upper bound for exp(coefficient * sqrt(n * ln n))."""
    if n <= 1:
        return Fraction(1) * _INFLATE
    with mpmath.workdps(60):
        val = mpmath.exp(mpmath.mpf(coefficient.numerator) /
                         coefficient.denominator *
                         mpmath.sqrt(n * mpmath.log(n)))
        return _to_fraction(val) * _INFLATE


LANDAU_COEFFICIENT = Fraction(105313, 100000)


def landau(n: int, mode: str = "exact"):
    """Exact value, or the analytic upper bounds, of the maximal lcm of a
    partition of n."""
    if n < 1:
        raise ValueError("n must be positive")
    if mode == "exact":
        return landau_exact(n)
    if mode == "bound":
        return (upper_exp_sqrt(n, LANDAU_COEFFICIENT),
                upper_exp_sqrt(n, Fraction(2)))
    raise ValueError("mode must be 'exact' or 'bound'")


def ball_group_divisor(d: int, radius: int) -> int:
    """Order of the root-fixing automorphism group of the radius-R ball in
    the d-regular tree: d! * ((d-1)!)^(number of interior non-root vertices).

    Every group of root-fixing ball isomorphisms embeds in it, so sizes of
    vertex isotropy groups in a ball system divide this number.
    """
    if d < 1 or radius < 1:
        raise ValueError("degree and radius must be positive")
    interior = 0
    for i in range(radius - 1):
        interior += d * (d - 1) ** i
    return math.factorial(d) * math.factorial(max(d - 1, 0)) ** interior


def object_group_divisor(d: int, isotropy_lcm: int) -> int:
    """Vertex-group divisor for object systems: d! * (lcm of isotropy orders)^d."""
    return math.factorial(d) * isotropy_lcm ** d


@dataclass
class BoundReport:
    kind: str
    params: dict
    bound: Fraction
    actual: Optional[int] = None

    @property
    def bound_float(self) -> float:
        return float(self.bound)

    @property
    def satisfied(self) -> Optional[bool]:
        if self.actual is None:
            return None
        return Fraction(self.actual) <= self.bound


def bound_report(kind: str, actual: Optional[int] = None, **params) -> BoundReport:
    """Closed-form cover-size bounds.

    kinds and required parameters:
      general  -- edges (geometric edge count of the first graph),
                  v_prime (vertex count of the second)
      ball     -- d (max degree), radius, v (total vertex count of both)
      objects  -- d, isotropy_lcm, v
      regular  -- v1, v2, odd (bool)
    """
    need = {"general": ("edges", "v_prime"),
            "ball": ("d", "radius", "v"),
            "objects": ("d", "isotropy_lcm", "v"),
            "regular": ("v1", "v2", "odd")}
    if kind not in need:
        raise ValueError("unknown bound kind: %r" % (kind,))
    missing = [p for p in need[kind] if p not in params]
    if missing:
        raise ValueError("missing parameters: %s" % ", ".join(missing))
    if kind == "general":
        e, vp = params["edges"], params["v_prime"]
        bound = 2 * vp * upper_exp_sqrt(e, Fraction(2))
    elif kind == "ball":
        d, r, v = params["d"], params["radius"], params["v"]
        bound = (Fraction(math.factorial(d)) ** (2 * d ** r)) * v * v \
            * upper_exp_sqrt(v, Fraction(2))
    elif kind == "objects":
        d, il, v = params["d"], params["isotropy_lcm"], params["v"]
        bound = Fraction(math.factorial(d)) ** 2 * Fraction(il) ** (2 * d) \
            * v * v * upper_exp_sqrt(v, Fraction(2))
    else:
        bound = Fraction((2 if params["odd"] else 1) * params["v1"] * params["v2"])
    return BoundReport(kind, dict(params), bound, actual)


def check_ball_divisors(sys) -> list:
    """(object, group order, divisor, ok) for every vertex isotropy group of
    a ball local system."""
    d = max(max((sys.g1.degree(v) for v in sys.g1.vertices), default=1),
            max((sys.g2.degree(v) for v in sys.g2.vertices), default=1))
    divisor = ball_group_divisor(d, sys.radius)
    out = []
    for x in sys.union.vertices:
        count = len(sys.groupoid.hom(x, x))
        out.append((x, count, divisor, divisor % count == 0))
    return out


def check_object_divisors(sys) -> list:
    """(object, group order, divisor, ok) for object-system vertex groups."""
    d = max(max((sys.g1.degree(v) for v in sys.g1.vertices), default=1),
            max((sys.g2.degree(v) for v in sys.g2.vertices), default=1))
    iso = sys.isotropy_lcm()
    divisor = object_group_divisor(d, iso)
    out = []
    for x in sys.union.vertices:
        count = len(sys.groupoid.hom(x, x))
        out.append((x, count, divisor, divisor % count == 0))
    return out
