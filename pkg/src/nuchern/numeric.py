"""Floating-point evaluation of Grassmann elements, with nilpotent-aware exp/log."""
from __future__ import annotations

import cmath
import enum
import math
from fractions import Fraction
from typing import Mapping

from .errors import BranchCut, PoleAtPoint, UndefinedNu, ZeroBody
from .grassmann import GrassmannElement, merge_monomials
from .symbols import Kind, Registry, SymbolId

TWO_PI = 2 * math.pi


class Window(enum.Enum):
    """Argument window of a logarithm branch."""

    ZERO_TWO_PI = "0-2pi"  # positive reals removed
    MINUS_PI_PI = "-pi-pi"  # negative reals removed

    def arg(self, w: complex) -> float:
        if w == 0:
            raise ZeroBody("logarithm of zero")
        a = cmath.phase(w)
        if self is Window.ZERO_TWO_PI:
            if a == 0.0 and w.real > 0:
                raise BranchCut(f"{w!r} lies on the positive real axis")
            if a < 0:
                a += TWO_PI
        elif a == math.pi:
            raise BranchCut(f"{w!r} lies on the negative real axis")
        return a

    def log(self, w: complex) -> complex:
        return complex(math.log(abs(w)), self.arg(w))

    @classmethod
    def parse(cls, text) -> "Window":
        if isinstance(text, Window):
            return text
        for w in cls:
            if w.value == text:
                return w
        raise ValueError(f"unknown branch window {text!r}")


class NumericGrassmann:
    """Complex-coefficient Grassmann element; ``point`` records the even-symbol values used."""

    __slots__ = ("registry", "terms", "point")

    def __init__(self, registry: Registry, terms=None, point: Mapping[SymbolId, complex] | None = None):
        self.registry = registry
        self.terms: dict[tuple, complex] = {k: complex(v) for k, v in (terms or {}).items() if v != 0}
        self.point = dict(point or {})

    @classmethod
    def const(cls, registry, value, point=None):
        return cls(registry, {((), 0): value}, point)

    def zero_like(self):
        return NumericGrassmann(self.registry, {}, self.point)

    def one_like(self):
        return NumericGrassmann.const(self.registry, 1, self.point)

    def is_zero(self):
        return not self.terms

    def _new(self, terms):
        return NumericGrassmann(self.registry, terms, self.point)

    def _coerce(self, other):
        if isinstance(other, NumericGrassmann):
            return other
        if isinstance(other, (int, float, complex, Fraction)):
            return NumericGrassmann.const(self.registry, complex(other), self.point)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        t = dict(self.terms)
        for k, v in other.terms.items():
            t[k] = t.get(k, 0) + v
        return self._new(t)

    __radd__ = __add__

    def __neg__(self):
        return self._new({k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        t: dict = {}
        for (m1, a1), c1 in self.terms.items():
            for (m2, a2), c2 in other.terms.items():
                sign, m = merge_monomials(m1, m2)
                if sign:
                    k = (m, (a1 + a2) & 1)
                    t[k] = t.get(k, 0) + sign * c1 * c2
        return self._new(t)

    def __rmul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other * self

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def body_pair(self) -> tuple[complex, complex]:
        return self.terms.get(((), 0), 0j), self.terms.get(((), 1), 0j)

    def nilpotent(self):
        return self._new({k: v for k, v in self.terms.items() if k[0]})

    def is_nilpotent_zero(self):
        return not any(k[0] for k in self.terms)

    def parity(self):
        ps = {len(m) & 1 for (m, _) in self.terms}
        if len(ps) > 1:
            return None
        return ps.pop() if ps else 0

    def max_abs(self) -> float:
        return max((abs(v) for v in self.terms.values()), default=0.0)

    def distance(self, other) -> float:
        return (self - other).max_abs()

    def scalar(self) -> complex:
        if any(k != ((), 0) for k in self.terms):
            raise ValueError("numeric element is not a plain scalar")
        return self.terms.get(((), 0), 0j)

    def inverse(self):
        b0, b1 = self.body_pair()
        det = b0 * b0 - b1 * b1
        if det == 0:
            raise ZeroBody("body is not invertible")
        binv = self._new({((), 0): b0 / det, ((), 1): -b1 / det})
        n = self.nilpotent()
        if not n.terms:
            return binv
        step = -(n * binv)
        total = NumericGrassmann.const(self.registry, 1, self.point)
        power = total
        while True:
            power = power * step
            if not power.terms:
                break
            total = total + power
        return binv * total

    def times_nu0(self):
        return self._new({(m, 1 - a): c for (m, a), c in self.terms.items()})

    def __repr__(self):
        syms = self.registry.symbols
        parts = []
        for (m, a), c in sorted(self.terms.items(), key=lambda kv: (len(kv[0][0]), kv[0])):
            f = [f"({c:.6g})"] + (["nu0"] if a else []) + [syms[s].name for s in m]
            parts.append("*".join(f))
        return "NumericGrassmann(" + (" + ".join(parts) or "0") + ")"


# -- evaluation -------------------------------------------------------------------

def _point_by_var(reg: Registry, point: Mapping) -> dict[int, complex]:
    out = {}
    for s, v in point.items():
        if isinstance(s, str):
            s = reg.by_name(s)
        reg.check(s)
        if s.parity:
            raise ValueError(f"{s.name} is odd and cannot be given a numeric value")
        out[reg.var(s)] = complex(v)
    return out


def eval_numeric(x: GrassmannElement, point: Mapping) -> NumericGrassmann:
    reg = x.registry
    values = _point_by_var(reg, point)
    needed = {reg.var(s) for c in x.terms.values() for s in c.free_symbols()}
    missing = needed - values.keys()
    if missing:
        names = sorted(reg.symbol_of_var(i).name for i in missing)
        raise ValueError(f"no value given for {', '.join(names)}")
    terms = {}
    memo = {}
    for k, c in x.terms.items():
        if c not in memo:
            try:
                memo[c] = c.evaluate(values)
            except PoleAtPoint:
                raise PoleAtPoint(f"pole of {c} at the evaluation point") from None
        terms[k] = memo[c]
    pt = {(reg.by_name(s) if isinstance(s, str) else s): complex(v) for s, v in point.items()}
    return NumericGrassmann(reg, terms, pt)


# -- exp / log ----------------------------------------------------------------------

def _series(n: NumericGrassmann, coeff) -> NumericGrassmann:
    """sum_{k>=1} coeff(k) n^k for nilpotent n, terminating."""
    total = NumericGrassmann(n.registry, {}, n.point)
    power = NumericGrassmann.const(n.registry, 1, n.point)
    k = 0
    while True:
        k += 1
        power = power * n
        if not power.terms:
            return total
        total = total + power * coeff(k)


def _split_body(b0: complex, b1: complex):
    # b0 + b1 nu0 = u (1+nu0)/2 + v (1-nu0)/2
    return b0 + b1, b0 - b1


def _join_body(reg, u: complex, v: complex, point) -> NumericGrassmann:
    return NumericGrassmann(reg, {((), 0): (u + v) / 2, ((), 1): (u - v) / 2}, point)


def num_exp(x: NumericGrassmann) -> NumericGrassmann:
    reg = x.registry
    u, v = _split_body(*x.body_pair())
    eb = _join_body(reg, cmath.exp(u), cmath.exp(v), x.point)
    n = x.nilpotent()
    return eb * (1 + _series(n, lambda k: 1 / math.factorial(k)))


def num_log(x: NumericGrassmann, window: Window = Window.ZERO_TWO_PI) -> NumericGrassmann:
    reg = x.registry
    window = Window.parse(window)
    b0, b1 = x.body_pair()
    u, v = _split_body(b0, b1)
    if u == 0 or v == 0:
        raise ZeroBody("body has no logarithm")
    lb = _join_body(reg, window.log(u), window.log(v), x.point)
    binv = _join_body(reg, 1 / u, 1 / v, x.point)
    m = binv * x.nilpotent()
    return lb + _series(m, lambda k: (-1) ** (k + 1) / k)


def exp_log_numeric(tag: str, x: NumericGrassmann, branch: Window | str = Window.ZERO_TWO_PI):
    if tag == "exp":
        return num_exp(x)
    if tag == "log":
        return num_log(x, Window.parse(branch))
    raise ValueError(f"unknown tag {tag!r}")


def num_cos_sin(x: NumericGrassmann):
    ix = x * 1j
    a, b = num_exp(ix), num_exp(-ix)
    return (a + b) * 0.5, (a - b) * (-0.5j)


# -- nu on numeric elements -----------------------------------------------------------

def numeric_nu(x: NumericGrassmann) -> NumericGrassmann:
    """nu for numeric elements whose terms are number * (single odd generator).

    Values of partner symbols are read from ``x.point``; pure numbers map to
    multiples of nu(1).
    """
    reg = x.registry
    syms = reg.symbols
    out = {}
    nu1 = reg.nu_one
    for (m, a), c in x.terms.items():
        if len(m) > 1:
            raise UndefinedNu("nu of a product of two or more odd generators")
        if not m:
            if len(x.terms) == 1 or all(len(k[0]) == 0 for k in x.terms):
                key = ((nu1.serial,), a)
                out[key] = out.get(key, 0) + c
                continue
            raise UndefinedNu("mixed even/odd numeric element")
        g = syms[m[0]]
        if g.kind is Kind.NU_ONE:
            key = ((), a)
            out[key] = out.get(key, 0) + c
            continue
        p = reg.partner(g)
        if p not in x.point:
            raise UndefinedNu(f"no numeric value for {p.name}")
        key = ((), a)
        out[key] = out.get(key, 0) + c * x.point[p]
    return NumericGrassmann(reg, out, x.point)
