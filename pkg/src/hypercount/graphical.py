"""Sufficient conditions for a sequence to be k-graphical, plus the exact test.

All comparisons are exact.  The fractional power in the sparse condition is
cleared by raising both sides to the (k-1)-th power.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .core import ParameterError, as_tuple
from .exact import ExactCounter, default_counter


@dataclass(frozen=True)
class BefResult:
    graphical_sufficient: bool
    witness_p: int | None

    def to_json(self) -> dict:
        out = {"result": self.graphical_sufficient}
        if self.witness_p is not None:
            out["witness_p"] = self.witness_p
        return out


def _check_divisible(degs: tuple[int, ...], k: int) -> None:
    if k < 2:
        raise ParameterError("k must be at least 2")
    if sum(degs) % k:
        raise ParameterError(f"degree sum {sum(degs)} is not divisible by k={k}")


def _check_large_n(n: int, k: int) -> None:
    if not 20 * k < n:
        raise ParameterError(f"hypothesis 20k < n fails (k={k}, n={n})")


def bef_sufficient(d, k: int) -> BefResult:
    """Is there ``p`` in ``[k, n]`` with ``Delta <= C(p-1, k-1)`` and ``nd >= (Delta-1) p + 1``?

    Returns the smallest such ``p``.  The condition is evaluated exactly as
    stated; at small n it is not sound, e.g. ``(3, 3, 3, 1)`` with k=2 passes
    at p=4 but is not graphical.
    """
    degs = as_tuple(d)
    _check_divisible(degs, k)
    n, total, top = len(degs), sum(degs), max(degs)
    for p in range(k, n + 1):
        if top <= math.comb(p - 1, k - 1) and total >= (top - 1) * p + 1:
            return BefResult(True, p)
    return BefResult(False, None)


def nearly_regular_sufficient(d, k: int) -> bool:
    """``Delta <= (1 + 1/(3k)) d <= C(n-1, k-1) / 4`` and ``d >= 1``.  Requires ``20k < n``."""
    degs = as_tuple(d)
    _check_divisible(degs, k)
    n = len(degs)
    _check_large_n(n, k)
    mean = Fraction(sum(degs), n)
    scaled = (1 + Fraction(1, 3 * k)) * mean
    return mean >= 1 and max(degs) <= scaled <= Fraction(math.comb(n - 1, k - 1), 4)


def sparse_sufficient(d, k: int) -> bool:
    """``k Delta^{1 + 1/(k-1)} <= dn / 2``, tested as ``(2k)^{k-1} Delta^k <= (dn)^{k-1}``."""
    degs = as_tuple(d)
    _check_divisible(degs, k)
    n = len(degs)
    _check_large_n(n, k)
    top, total = max(degs), sum(degs)
    return (2 * k) ** (k - 1) * top ** k <= total ** (k - 1)


def is_graphical_exact(d, k: int, *, counter: ExactCounter | None = None) -> bool:
    """True iff some simple k-graph has degree sequence *d*."""
    return (counter or default_counter()).exists(d, k)
