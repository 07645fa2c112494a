"""Scalar helpers: exact rationals, infinities and error-carrying values."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Real
from typing import Union

Scalar = Union[int, Fraction, float]
INF = math.inf


def parse_scalar(x) -> Scalar:
    """Accept ints, floats, Fractions and strings like ``"3/4"``, ``"0.25"``, ``"inf"``."""
    if isinstance(x, bool):
        raise ValueError("boolean is not a scalar")
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    if isinstance(x, float):
        return x
    if isinstance(x, str):
        s = x.strip().lower()
        if s in ("inf", "+inf", "infinity", "∞"):
            return INF
        if s in ("-inf", "-infinity"):
            return -INF
        try:
            return Fraction(s)
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not a scalar: {x!r}") from exc
    raise ValueError(f"not a scalar: {x!r}")


def is_exact(x) -> bool:
    return isinstance(x, (int, Fraction)) and not isinstance(x, bool)


def exactify(x):
    """Turn integral floats into Fractions; leave everything else alone."""
    if isinstance(x, float) and math.isfinite(x) and x == int(x):
        return Fraction(int(x))
    if isinstance(x, int) and not isinstance(x, bool):
        return Fraction(x)
    return x


def fl(x) -> float:
    return float(x)


def is_inf(x) -> bool:
    return isinstance(x, float) and math.isinf(x)


def mul0(a, b):
    """Product with the measure-theoretic convention 0·∞ = 0."""
    if a == 0 or b == 0:
        return Fraction(0) if is_exact(a) or is_exact(b) else 0.0
    return a * b


def to_json_scalar(x):
    """Render a scalar for JSON output (rationals as "p/q" strings)."""
    if x is None or isinstance(x, (bool, str)):
        return x
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    if isinstance(x, int):
        return str(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return float(x)


def is_integral(x) -> bool:
    if is_exact(x):
        return Fraction(x).denominator == 1
    return math.isfinite(x) and float(x).is_integer()


def power(u, a):
    """u**a keeping exact arithmetic for rational u and integer a."""
    if is_exact(u) and is_integral(a):
        n = int(a)
        if u == 0:
            if n > 0:
                return Fraction(0)
            if n == 0:
                return Fraction(1)
            return INF
        return Fraction(u) ** n
    uf = float(u)
    af = float(a)
    if uf == 0.0:
        return 0.0 if af > 0 else (1.0 if af == 0 else INF)
    if math.isinf(uf):
        return INF if af > 0 else (1.0 if af == 0 else 0.0)
    return uf ** af


@dataclass(frozen=True)
class Approx:
    """A value with an absolute error bound; exact when ``err == 0`` and the value is rational."""

    value: Scalar
    err: float = 0.0

    @staticmethod
    def of(x) -> "Approx":
        return x if isinstance(x, Approx) else Approx(x, 0.0)

    @property
    def exact(self) -> bool:
        return self.err == 0 and is_exact(self.value)

    def __add__(self, other):
        o = Approx.of(other)
        return Approx(self.value + o.value, self.err + o.err)

    __radd__ = __add__

    def __sub__(self, other):
        o = Approx.of(other)
        return Approx(self.value - o.value, self.err + o.err)

    def __rsub__(self, other):
        return Approx.of(other) - self

    def __neg__(self):
        return Approx(-self.value, self.err)

    def __mul__(self, other):
        o = Approx.of(other)
        v = mul0(self.value, o.value)
        e = 0.0
        if self.err:
            e += self.err * abs(float(o.value))
        if o.err:
            e += o.err * abs(float(self.value))
        e += self.err * o.err
        return Approx(v, e)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = Approx.of(other)
        if o.value == 0:
            raise ZeroDivisionError
        if is_inf(o.value):
            return Approx(0.0 if not is_inf(self.value) else math.nan, 0.0)
        v = self.value / o.value
        d = abs(float(o.value))
        e = self.err / d + abs(float(v)) * o.err / max(d - o.err, d * 1e-3)
        return Approx(v, e)

    def pow(self, p) -> "Approx":
        if p == 1:
            return self
        v = power(self.value, p)
        if self.err == 0 or is_inf(v):
            return Approx(v, 0.0)
        x = float(self.value)
        lo = max(x - self.err, 0.0) ** float(p)
        hi = (x + self.err) ** float(p)
        return Approx(v, max(abs(hi - float(v)), abs(float(v) - lo)))

    def __float__(self):
        return float(self.value)

    def __lt__(self, other):
        return self.value < Approx.of(other).value

    def __le__(self, other):
        return self.value <= Approx.of(other).value

    def __gt__(self, other):
        return self.value > Approx.of(other).value

    def __ge__(self, other):
        return self.value >= Approx.of(other).value


def amax(*xs) -> Approx:
    xs = [Approx.of(x) for x in xs]
    best = max(xs, key=lambda a: a.value)
    return Approx(best.value, max(a.err for a in xs))


ZERO = Approx(Fraction(0))
