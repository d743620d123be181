"""Exact rational functions over the Gaussian rationals.

A value is stored as ``(re + i*im) / den`` with ``re``, ``im``, ``den``
polynomials over Q in the even symbols of a registry. Reduced form: the three
polynomials have trivial common gcd and ``den`` has leading coefficient 1.
That representation is unique, so ``==`` is structural.
"""
from __future__ import annotations

from fractions import Fraction
from numbers import Rational

import flint

from .errors import NonInvertibleBody, RegistryMismatch
from .symbols import Registry, SymbolId


def _fmpq(x) -> flint.fmpq:
    if isinstance(x, flint.fmpq):
        return x
    x = Fraction(x)
    return flint.fmpq(x.numerator, x.denominator)


def _fraction(q: flint.fmpq) -> Fraction:
    return Fraction(int(q.p), int(q.q))


class Coefficient:
    __slots__ = ("registry", "re", "im", "den", "_syms", "_hash")

    def __init__(self, registry: Registry, re, im=None, den=None, *, _reduced=False):
        self.registry = registry
        ctx = registry.ctx
        if re.context() is not ctx:
            re = re.project_to_context(ctx)
        if im is not None:
            if im.context() is not ctx:
                im = im.project_to_context(ctx)
            if im.is_zero():
                im = None
        if den is None:
            den = ctx.constant(1)
        elif den.context() is not ctx:
            den = den.project_to_context(ctx)
        if not _reduced:
            re, im, den = _reduce(ctx, re, im, den)
        self.re, self.im, self.den = re, im, den
        self._syms = self._hash = None

    # -- constructors ---------------------------------------------------
    @classmethod
    def const(cls, registry: Registry, value) -> "Coefficient":
        ctx = registry.ctx
        if isinstance(value, complex):
            re = Fraction(value.real).limit_denominator() if value.real else 0
            im = Fraction(value.imag).limit_denominator() if value.imag else 0
            if re != value.real or im != value.imag:
                raise ValueError(f"{value!r} is not an exact Gaussian rational")
            return cls(registry, ctx.constant(_fmpq(re)), ctx.constant(_fmpq(im)), _reduced=False)
        if isinstance(value, tuple):
            re, im = value
            return cls(registry, ctx.constant(_fmpq(re)), ctx.constant(_fmpq(im)))
        return cls(registry, ctx.constant(_fmpq(value)), None, None, _reduced=True)

    @classmethod
    def symbol(cls, registry: Registry, sym: SymbolId) -> "Coefficient":
        registry.check(sym)
        if sym.parity:
            raise ValueError(f"{sym.name} is odd; it is a Grassmann generator, not a coefficient")
        ctx = registry.ctx
        return cls(registry, ctx.gens()[registry.var(sym)], None, None, _reduced=True)

    # -- predicates -----------------------------------------------------
    def is_zero(self) -> bool:
        return self.re.is_zero() and self.im is None

    def is_one(self) -> bool:
        return self.im is None and self.den.is_one() and self.re.is_one()

    def is_constant(self) -> bool:
        return self.re.is_constant() and self.den.is_constant() and (
            self.im is None or self.im.is_constant())

    def is_real(self) -> bool:
        return self.im is None

    def is_polynomial(self) -> bool:
        return self.den.is_constant()

    def constant_value(self):
        """Return the value as ``Fraction`` or ``(Fraction, Fraction)`` if Gaussian."""
        if not self.is_constant():
            raise ValueError("coefficient is not constant")
        d = _fraction(self.den.leading_coefficient())
        re = _fraction(self.re.leading_coefficient()) / d if not self.re.is_zero() else Fraction(0)
        if self.im is None:
            return re
        return (re, _fraction(self.im.leading_coefficient()) / d)

    def free_symbols(self) -> set[SymbolId]:
        if self._syms is None:
            used = set()
            for p in (self.re, self.im, self.den):
                if p is None:
                    continue
                for i, deg in enumerate(p.degrees()):
                    if deg > 0:
                        used.add(self.registry.symbol_of_var(i))
            self._syms = frozenset(used)
        return set(self._syms)

    # -- arithmetic -----------------------------------------------------
    def _coerce(self, other) -> "Coefficient":
        if isinstance(other, Coefficient):
            if other.registry is not self.registry:
                raise RegistryMismatch("coefficients from different registries")
            return other
        if isinstance(other, (int, Rational, complex, tuple)):
            return Coefficient.const(self.registry, other)
        return NotImplemented

    def _lifted(self):
        ctx = self.registry.ctx
        if self.re.context() is ctx:
            return self.re, self.im, self.den
        return (self.re.project_to_context(ctx),
                None if self.im is None else self.im.project_to_context(ctx),
                self.den.project_to_context(ctx))

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        a, b, d = self._lifted()
        c, e, f = other._lifted()
        if d == f:
            re, im, den = a + c, _add(b, e), d
        else:
            re = a * f + c * d
            im = _add(_mul(b, f), _mul(e, d))
            den = d * f
        return Coefficient(self.registry, re, im, den)

    __radd__ = __add__

    def __neg__(self):
        return Coefficient(self.registry, -self.re, None if self.im is None else -self.im,
                           self.den, _reduced=True)

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
        a, b, d = self._lifted()
        c, e, f = other._lifted()
        if b is None and e is None:
            re, im = a * c, None
        else:
            re = a * c - _mul(b, e, zero=a.context())
            im = _add(_mul(a, e), _mul(b, c))
        return Coefficient(self.registry, re, im, d * f)

    __rmul__ = __mul__

    def inverse(self) -> "Coefficient":
        if self.is_zero():
            raise NonInvertibleBody("zero coefficient")
        a, b, d = self._lifted()
        if b is None:
            return Coefficient(self.registry, d, None, a)
        norm = a * a + b * b
        return Coefficient(self.registry, d * a, -(d * b), norm)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = Coefficient.const(self.registry, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def conjugate_i(self) -> "Coefficient":
        """Complex conjugation of the scalar constants (symbols untouched)."""
        if self.im is None:
            return self
        return Coefficient(self.registry, self.re, -self.im, self.den, _reduced=True)

    def derivative(self, sym: SymbolId) -> "Coefficient":
        i = self.registry.var(sym)
        a, b, d = self._lifted()
        if i >= a.context().nvars():
            return Coefficient.const(self.registry, 0)
        dd = d.derivative(i)
        if dd.is_zero():
            return Coefficient(self.registry, a.derivative(i),
                               None if b is None else b.derivative(i), d)
        re = a.derivative(i) * d - a * dd
        im = None if b is None else b.derivative(i) * d - b * dd
        return Coefficient(self.registry, re, im, d * d)

    # -- comparison -----------------------------------------------------
    def __eq__(self, other):
        if not isinstance(other, Coefficient):
            other = self._coerce(other)
            if other is NotImplemented:
                return False
        if other.registry is not self.registry:
            return False
        a, b, d = self._lifted()
        c, e, f = other._lifted()
        return a == c and d == f and ((b is None and e is None) or (
            b is not None and e is not None and b == e))

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((str(self.re), str(self.im), str(self.den)))
        return self._hash

    # -- numeric ----------------------------------------------------------
    def evaluate(self, values: dict[int, complex]) -> complex:
        """Numeric value; ``values`` maps variable positions to complex numbers."""
        num = _eval_poly(self.re, values)
        if self.im is not None:
            num += 1j * _eval_poly(self.im, values)
        den = _eval_poly(self.den, values)
        if den == 0:
            from .errors import PoleAtPoint
            raise PoleAtPoint("denominator vanishes at the evaluation point")
        return num / den

    def numerator_terms(self):
        """Yield ``(exponents, gaussian coefficient)`` of ``re + i*im``."""
        out: dict[tuple, list] = {}
        for exps, c in self.re.terms():
            out.setdefault(exps, [Fraction(0), Fraction(0)])[0] = _fraction(c)
        if self.im is not None:
            for exps, c in self.im.terms():
                out.setdefault(exps, [Fraction(0), Fraction(0)])[1] = _fraction(c)
        return out

    def denominator_terms(self):
        return {exps: _fraction(c) for exps, c in self.den.terms()}

    def z_coefficient(self, sym: SymbolId, k: int) -> "Coefficient":
        """Coefficient of ``sym**k`` when the denominator does not involve ``sym``."""
        i = self.registry.var(sym)
        a, b, d = self._lifted()
        if d.degrees()[i] > 0:
            raise ValueError(f"denominator depends on {sym.name}")
        ctx = a.context()

        def pick(p):
            if p is None:
                return None
            terms = {}
            for exps, c in p.terms():
                if exps[i] == k:
                    e = list(exps)
                    e[i] = 0
                    terms[tuple(e)] = c
            return ctx.from_dict(terms) if terms else ctx.constant(0)

        return Coefficient(self.registry, pick(a), pick(b), d)

    def degree_in(self, sym: SymbolId) -> int:
        i = self.registry.var(sym)
        return max(p.degrees()[i] if not p.is_zero() else 0
                   for p in (self.re, self.im, self.den) if p is not None)

    # -- display ----------------------------------------------------------
    def __repr__(self):
        return f"Coefficient({self})"

    def __str__(self):
        names = {f"v{i}": s.name for i, s in enumerate(self.registry.even_symbols)}

        def fmt(p):
            s = str(p)
            for v in sorted(names, key=lambda v: -len(v)):
                s = s.replace(v, names[v])
            return s

        num = fmt(self.re)
        if self.im is not None:
            num = f"({num}) + I*({fmt(self.im)})"
        if self.den.is_one():
            return num
        return f"({num})/({fmt(self.den)})"


def _add(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return a + b


def _mul(a, b, zero=None):
    if a is None or b is None:
        return None if zero is None else zero.constant(0)
    return a * b


def _reduce(ctx, re, im, den):
    if den.is_zero():
        raise NonInvertibleBody("zero denominator")
    if re.is_zero() and im is None:
        return re, None, ctx.constant(1)
    if not den.is_constant():
        g = den.gcd(re)
        if im is not None and not g.is_one():
            g = g.gcd(im)
        if not g.is_one():
            re = re / g
            den = den / g
            if im is not None:
                im = im / g
    lc = den.leading_coefficient()
    if lc != 1:
        inv = 1 / lc
        re = re * inv
        den = den * inv
        if im is not None:
            im = im * inv
    return re, im, den


def _eval_poly(p, values: dict[int, complex]) -> complex:
    total = 0j
    for exps, c in p.terms():
        term = complex(int(c.p) / int(c.q))
        for i, e in enumerate(exps):
            if e:
                term *= values[i] ** int(e)
        total += term
    return total
