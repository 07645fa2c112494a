"""Generating functions of spaces: quasi-concave φ and Orlicz functions F."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .errors import InvalidGenerator
from .expr import Expr, Term
from .gauge import Gauge
from .measurable import Domain, Piece, PiecewiseFn
from .scalars import INF, Approx, exactify, is_exact, is_inf

_REL = 1e-6


def _limit_close(a, b):
    if is_inf(a) or is_inf(b):
        return a == b
    return abs(float(a) - float(b)) <= _REL * max(1.0, abs(float(b)))


@dataclass(frozen=True)
class QuasiConcaveFn:
    """φ on (0, end) given by analytic pieces; φ(0) = 0 by convention.

    The pieces must cover (0, end) contiguously.  ``end`` is 1 for the unit
    interval and ∞ for the half-line and ℕ.
    """

    pieces: tuple
    end: object = INF
    phi0: object = None
    phiInf: object = None
    name: str = ""

    def __post_init__(self):
        ps = tuple(sorted(self.pieces, key=lambda p: float(p.lo)))
        object.__setattr__(self, "pieces", ps)
        if not ps or ps[0].lo != 0 or ps[-1].hi != self.end:
            raise InvalidGenerator("pieces must cover (0, end)")
        for a, b in zip(ps, ps[1:]):
            if a.hi != b.lo:
                raise InvalidGenerator("pieces must be contiguous")
        c0 = ps[0].expr.limit_at(Fraction(0))
        cinf = ps[-1].expr.limit_inf() if is_inf(self.end) else ps[-1].expr(self.end)
        if self.phi0 is not None and not _limit_close(self.phi0, c0):
            raise InvalidGenerator(f"phi0 = {self.phi0} contradicts the pieces ({c0})")
        if self.phiInf is not None and not _limit_close(self.phiInf, cinf):
            raise InvalidGenerator(f"phiInf = {self.phiInf} contradicts the pieces ({cinf})")
        object.__setattr__(self, "phi0", c0 if self.phi0 is None else self.phi0)
        object.__setattr__(self, "phiInf", cinf if self.phiInf is None else self.phiInf)
        self._check_quasi_concave()

    # -- named generators ---------------------------------------------
    @staticmethod
    def power(theta, end=INF) -> "QuasiConcaveFn":
        theta = exactify(theta)
        return QuasiConcaveFn((Piece(Fraction(0), end, Expr.pow(1, theta)),), end, name=f"t^{theta}")

    @staticmethod
    def saturating(end=INF) -> "QuasiConcaveFn":
        """t/(1+t)."""
        e = Expr.make([Term(1), Term(-1, -1, 1)])
        return QuasiConcaveFn((Piece(Fraction(0), end, e),), end, name="t/(1+t)")

    @staticmethod
    def min_linear(c=1, end=INF) -> "QuasiConcaveFn":
        """min(t, c)."""
        c = exactify(c)
        if not is_inf(end) and end <= c:
            return QuasiConcaveFn((Piece(Fraction(0), end, Expr.pow(1, 1)),), end, name="t")
        return QuasiConcaveFn((Piece(Fraction(0), c, Expr.pow(1, 1)), Piece(c, end, Expr.const(c))),
                              end, name=f"min(t,{c})")

    @staticmethod
    def constant(c=1, end=INF) -> "QuasiConcaveFn":
        return QuasiConcaveFn((Piece(Fraction(0), end, Expr.const(c)),), end, name=f"{c}")

    # -- evaluation -----------------------------------------------------
    def __call__(self, t):
        if t <= 0:
            return Fraction(0)
        if is_inf(t):
            return self.phiInf
        if t >= self.end:
            return self.phiInf
        for p in self.pieces:
            if p.lo < t <= p.hi or (t == p.lo and t > 0):
                return p.expr(t)
        return self.phiInf

    def limits(self):
        return self.phi0, self.phiInf

    def breakpoints(self):
        return [p.hi for p in self.pieces[:-1]]

    def derivative(self, domain=None) -> PiecewiseFn:
        dom = domain or (Domain.UNIT if self.end == 1 else Domain.HALFLINE)
        return PiecewiseFn(dom, [Piece(p.lo, p.hi, p.expr.derivative()) for p in self.pieces])

    @property
    def is_linear(self) -> bool:
        return self.power_exponent == 1

    @property
    def power_exponent(self):
        """θ when φ = c·t^θ on the whole range, else None."""
        if len(self.pieces) == 1:
            k, params = self.pieces[0].expr.kind()
            if k == "pow":
                return params[1]
        return None

    def _samples(self, n=400):
        top = float(self.end) if not is_inf(self.end) else 1e12
        ts = np.unique(np.concatenate([np.geomspace(1e-12 * (top if top < 1e12 else 1), top, n),
                                       [float(x) for x in self.breakpoints()]]))
        return ts[(ts > 0) & (ts <= top)]

    def _check_quasi_concave(self):
        ts = self._samples()
        vals = np.array([float(self(Fraction(t))) for t in ts])
        if np.any(vals <= 0) and not np.all(vals[vals <= 0] == 0):
            raise InvalidGenerator("φ must be non-negative")
        if np.any(vals < 0):
            raise InvalidGenerator("φ must be non-negative")
        if np.any(np.diff(vals) < -1e-12 * np.maximum(1, np.abs(vals[1:]))):
            raise InvalidGenerator("φ must be non-decreasing")
        ratio = vals / ts
        if np.any(np.diff(ratio) > 1e-9 * np.maximum(1, np.abs(ratio[:-1]))):
            raise InvalidGenerator("φ(t)/t must be non-increasing")

    def is_concave(self) -> bool:
        ts = [Fraction(t) for t in self._samples(300)]
        for a, b in zip(ts[:-2], ts[2:]):
            m = (a + b) / 2
            if float(self(m)) < (float(self(a)) + float(self(b))) / 2 - 1e-12 * max(1.0, float(self(b))):
                return False
        return True

    def quasi_concavity_spot_check(self, n=1000, seed=0) -> bool:
        """φ(t) ≤ max{1, t/s}·φ(s) on random pairs."""
        rng = random.Random(seed)
        top = 1.0 if self.end == 1 else 1e6
        for _ in range(n):
            s, t = rng.uniform(1e-6, top), rng.uniform(1e-6, top)
            if float(self(t)) > max(1.0, t / s) * float(self(s)) * (1 + 1e-12) + 1e-15:
                return False
        return True

    def to_literal(self):
        from .literals import pieces_to_literal, scalar_out

        return {"pieces": pieces_to_literal(self.pieces), "phi0": scalar_out(self.phi0),
                "phiInf": scalar_out(self.phiInf), "end": scalar_out(self.end)}


def eval_phi(phi: QuasiConcaveFn, t):
    return phi(t)


def phi_limits(phi: QuasiConcaveFn):
    return phi.limits()


def phi_derivative(phi: QuasiConcaveFn) -> PiecewiseFn:
    return phi.derivative()


@dataclass(frozen=True)
class OrliczFn:
    """Convex non-decreasing F with F(0) = 0, finite on [0, bF) and ∞ beyond bF."""

    pieces: tuple
    bF: object = INF
    valueAtbF: object = None
    name: str = ""

    def __post_init__(self):
        ps = tuple(sorted(self.pieces, key=lambda p: float(p.lo)))
        object.__setattr__(self, "pieces", ps)
        if ps:
            if ps[0].lo != 0 or ps[-1].hi != self.bF:
                raise InvalidGenerator("pieces must cover [0, bF)")
            for a, b in zip(ps, ps[1:]):
                if a.hi != b.lo:
                    raise InvalidGenerator("pieces must be contiguous")
            if ps[0].expr.limit_at(Fraction(0)) != 0:
                raise InvalidGenerator("F(0) must be 0")
        elif not is_inf(self.bF):
            pass
        else:
            raise InvalidGenerator("F ≡ 0 on [0, ∞) is not an Orlicz function")
        if self.valueAtbF is None and not is_inf(self.bF):
            v = ps[-1].expr.limit_at(self.bF) if ps else Fraction(0)
            object.__setattr__(self, "valueAtbF", v)
        self._check_convex()

    # -- named -----------------------------------------------------------
    @staticmethod
    def power(p) -> "OrliczFn":
        p = exactify(p)
        return OrliczFn((Piece(Fraction(0), INF, Expr.pow(1, p)),), INF, name=f"x^{p}")

    @staticmethod
    def F_inf() -> "OrliczFn":
        """0 on [0, 1], ∞ beyond."""
        return OrliczFn((Piece(Fraction(0), Fraction(1), Expr.const(0)),), Fraction(1), Fraction(0), name="F_inf")

    @staticmethod
    def F_p_inf(p) -> "OrliczFn":
        """x^p on [0, 1], ∞ beyond."""
        p = exactify(p)
        return OrliczFn((Piece(Fraction(0), Fraction(1), Expr.pow(1, p)),), Fraction(1), Fraction(1),
                        name=f"F_{p},inf")

    # -- evaluation ------------------------------------------------------
    def __call__(self, x):
        if x < 0:
            raise ValueError("F is defined on [0, ∞)")
        if is_inf(x):
            return INF
        if x > self.bF:
            return INF
        if x == self.bF:
            return self.valueAtbF
        for p in self.pieces:
            if p.lo <= x < p.hi:
                return p.expr(x)
        return INF

    @property
    def vanishes_only_at_zero(self) -> bool:
        return self.gauge().threshold == 0

    @property
    def power_exponent(self):
        """p when F(x) = x^p on [0, ∞), else None."""
        if is_inf(self.bF) and len(self.pieces) == 1:
            k, params = self.pieces[0].expr.kind()
            if k == "pow" and params[0] == 1:
                return params[1]
        return None

    def gauge(self) -> Gauge:
        ps = [p for p in self.pieces]
        while ps and ps[0].expr.is_zero:
            ps = ps[1:]
        return Gauge(tuple((p.lo, p.hi, p.expr) for p in ps), self.bF,
                     None if is_inf(self.bF) else self.valueAtbF)

    def inverse(self, y):
        """sup{x : F(x) ≤ y}."""
        return self.gauge().inverse(y)

    def _check_convex(self):
        top = float(self.bF) if not is_inf(self.bF) else 1e6
        xs = np.linspace(0, top, 401)[:-1]
        vals = np.array([float(self(exactify(x) if x == 0 else x)) for x in xs])
        if np.any(np.diff(vals) < -1e-12 * np.maximum(1, np.abs(vals[1:]))):
            raise InvalidGenerator("F must be non-decreasing")
        mids = (vals[:-2] + vals[2:]) / 2
        if np.any(vals[1:-1] > mids + 1e-9 * np.maximum(1, np.abs(mids))):
            raise InvalidGenerator("F must be convex")

    def convexity_spot_check(self, n=1000, seed=0) -> bool:
        rng = random.Random(seed)
        top = float(self.bF) if not is_inf(self.bF) else 100.0
        for _ in range(n):
            x, y = rng.uniform(0, top), rng.uniform(0, top)
            if float(self((x + y) / 2)) > (float(self(x)) + float(self(y))) / 2 * (1 + 1e-12) + 1e-15:
                return False
        return True

    def to_literal(self):
        from .literals import pieces_to_literal, scalar_out

        return {"pieces": pieces_to_literal(self.pieces), "bF": scalar_out(self.bF),
                "valueAtbF": scalar_out(self.valueAtbF) if self.valueAtbF is not None else None}


def eval_F(F: OrliczFn, x):
    return F(x)


def delta2_probe(F: OrliczFn, regime: str = "atInf", grid=None) -> Approx:
    """sup over the grid of F(2x)/F(x): a lower bound for the Δ₂ constant, nothing more."""
    if grid is None:
        grid = [2.0 ** k for k in range(0, 40)] if regime == "atInf" else [2.0 ** -k for k in range(1, 40)]
    best = 0.0
    for x in grid:
        fx = F(x)
        if fx == 0 or is_inf(fx):
            continue
        r = F(2 * x)
        ratio = INF if is_inf(r) else float(r) / float(fx)
        best = max(best, ratio)
    return Approx(best if not is_inf(best) else INF, 0.0)
