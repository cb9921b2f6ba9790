"""Panel container and integer-part power arithmetic.

The estimators in this package index sub-panels by the integer part of
``N**a``.  Computing ``floor(N**a)`` naively in double precision can flip
the cutoff by one near exact powers (``N=100, a=0.5``), so the floor is
taken on a 50-digit evaluation of the power instead.

The composite forms follow the convention used throughout the estimators:
``[N^(k*a)]`` means ``[N^a]**k`` (an integer power of the integer part),
never ``floor(N**(k*a))``, and ``[N^(a-k)]`` means ``[N^a] / N**k``.
"""

from __future__ import annotations

from dataclasses import dataclass
from decimal import Decimal, localcontext
from fractions import Fraction
from typing import Optional, Sequence, Union

import numpy as np

from .errors import InvalidLagError

__all__ = [
    "Panel",
    "BracketPower",
    "bracket_pow",
    "bracket_pow_round",
    "bracket_pow_k",
    "bracket_shift",
    "v_nt",
]

_EXACT_ROOT_MAX_DEN = 64


def _integer_nth_root(x: int, n: int) -> int:
    """Largest integer r with r**n <= x, exact for any size of x."""
    if x < 0 or n < 1:
        raise ValueError("nth root needs x >= 0 and n >= 1")
    if n == 1 or x in (0, 1):
        return x
    r = 1 << ((x.bit_length() + n - 1) // n)  # upper seed
    while True:
        candidate = ((n - 1) * r + x // r ** (n - 1)) // n
        if candidate >= r:
            break
        r = candidate
    while r**n > x:
        r -= 1
    return r


def _decimal_power(base: int, exponent: float, digits: int) -> Decimal:
    with localcontext() as ctx:
        ctx.prec = digits
        return (Decimal(exponent) * Decimal(base).ln()).exp()


def _decimal_integral(base: int, exponent: float, rounding: str) -> int:
    """Round base**exponent to an integer, escalating precision when the
    value sits suspiciously close to the rounding boundary."""
    for digits in (50, 120):
        value = _decimal_power(base, exponent, digits)
        nearest = value.to_integral_value(rounding="ROUND_HALF_EVEN")
        if abs(value - nearest) > Decimal(10) ** (10 - digits):
            break
    return int(value.to_integral_value(rounding=rounding))


def bracket_pow(n: int, a: float) -> Union[int, Fraction]:
    """Integer part of ``n**a``, extended to negative exponents.

    For ``a >= 0`` returns ``floor(n**a)`` as an exact int.  For ``a < 0``
    returns the exact rational ``1 / floor(n**(-a))``.

    A float exponent is exactly ``num / 2**j``; when the reduced denominator
    is small the floor is taken by an exact integer root, otherwise the
    power is provably irrational for any representable base and a 50-digit
    evaluation decides the floor safely.
    """
    if n < 1:
        raise ValueError(f"base must be a positive integer, got {n}")
    a = float(a)
    if a < 0:
        return Fraction(1, bracket_pow(n, -a))
    if a == 0:
        return 1
    if a.is_integer():
        return n ** int(a)
    num, den = a.as_integer_ratio()
    if den <= _EXACT_ROOT_MAX_DEN:
        return _integer_nth_root(n**num, den)
    return _decimal_integral(n, a, "ROUND_FLOOR")


def bracket_pow_round(n: int, a: float) -> int:
    """Nearest integer to ``n**a`` (ties rounded up), for ``a >= 0``."""
    if n < 1:
        raise ValueError(f"base must be a positive integer, got {n}")
    a = float(a)
    if a < 0:
        raise ValueError("rounded bracket power needs a nonnegative exponent")
    if a == 0:
        return 1
    if a.is_integer():
        return n ** int(a)
    num, den = a.as_integer_ratio()
    if den <= _EXACT_ROOT_MAX_DEN:
        target = n**num
        r = _integer_nth_root(target, den)
        # exact comparison of n**a against r + 1/2
        return r + (1 if (2 * r + 1) ** den <= (2**den) * target else 0)
    return _decimal_integral(n, a, "ROUND_HALF_UP")


def bracket_pow_k(n: int, a: float, k: int) -> Union[int, Fraction]:
    """``[n^(k*a)]`` under the convention ``[n^a]**k``."""
    base = bracket_pow(n, a)
    if k >= 0:
        return base**k
    return Fraction(1, 1) / Fraction(base) ** (-k)


def bracket_shift(n: int, a: float, k: int) -> Fraction:
    """``[n^(a-k)]`` under the convention ``[n^a] / n**k``."""
    return Fraction(bracket_pow(n, a)) / Fraction(n) ** k


@dataclass(frozen=True)
class BracketPower:
    """A pending integer-part power ``[base_N ^ exponent_a]``."""

    base_n: int
    exponent_a: float

    def value(self) -> Union[int, Fraction]:
        return bracket_pow(self.base_n, self.exponent_a)

    def value_k(self, k: int) -> Union[int, Fraction]:
        return bracket_pow_k(self.base_n, self.exponent_a, k)

    def value_shift(self, k: int) -> Fraction:
        return bracket_shift(self.base_n, self.exponent_a, k)


def v_nt(cutoff_n: int, t: int, tau: int) -> int:
    """Effective sample size min(cutoff_n, T - tau)."""
    if cutoff_n < 1:
        raise ValueError(f"cutoff must be >= 1, got {cutoff_n}")
    if not 0 <= tau < t:
        raise InvalidLagError(f"lag {tau} out of range for T={t}")
    return min(cutoff_n, t - tau)


class Panel:
    """Dense N x T panel, sections (series) as rows, time as columns.

    The data array is copied and frozen on construction; a Panel can be
    shared freely between threads.  Partial cross-sectional averages follow
    the stored row order, so the caller decides which sections come first.
    """

    __slots__ = ("_data", "section_labels", "time_labels")

    def __init__(
        self,
        data,
        section_labels: Optional[Sequence] = None,
        time_labels: Optional[Sequence] = None,
    ):
        arr = np.array(data, dtype=float, copy=True)
        if arr.ndim != 2:
            raise ValueError(f"panel data must be 2-D, got shape {arr.shape}")
        n, t = arr.shape
        if n < 2 or t < 2:
            raise ValueError(f"panel needs N >= 2 and T >= 2, got {n} x {t}")
        if not np.all(np.isfinite(arr)):
            bad = np.argwhere(~np.isfinite(arr))[0]
            raise ValueError(
                f"panel entries must be finite; first bad entry at "
                f"section {bad[0] + 1}, time {bad[1] + 1}"
            )
        arr.setflags(write=False)
        object.__setattr__(self, "_data", arr)
        if section_labels is not None:
            section_labels = tuple(section_labels)
            if len(section_labels) != n:
                raise ValueError("section_labels length must equal N")
        if time_labels is not None:
            time_labels = tuple(time_labels)
            if len(time_labels) != t:
                raise ValueError("time_labels length must equal T")
        object.__setattr__(self, "section_labels", section_labels)
        object.__setattr__(self, "time_labels", time_labels)

    def __setattr__(self, name, value):
        raise AttributeError("Panel is immutable")

    @property
    def data(self) -> np.ndarray:
        return self._data

    @property
    def n_sections(self) -> int:
        return self._data.shape[0]

    @property
    def n_times(self) -> int:
        return self._data.shape[1]

    @property
    def shape(self) -> tuple:
        return self._data.shape

    def __repr__(self) -> str:
        return f"Panel(N={self.n_sections}, T={self.n_times})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, Panel):
            return NotImplemented
        return (
            self.shape == other.shape
            and bool(np.array_equal(self._data, other._data))
            and self.section_labels == other.section_labels
            and self.time_labels == other.time_labels
        )
