"""Exact elements of the nu0-extended Grassmann algebra.

An element is a finite sum of terms ``c * nu0**a * g_1 ... g_k`` where ``c``
is a :class:`Coefficient` (rational function of the even symbols), ``a`` is 0
or 1 and ``g_1 < ... < g_k`` are distinct odd generators ordered by
registration serial.
"""
from __future__ import annotations

from bisect import bisect_right
from numbers import Rational
from typing import Mapping

from .coefficient import Coefficient
from .errors import NonInvertibleBody, ParityMismatch, RegistryMismatch, UndefinedNu
from .symbols import Kind, Registry, SymbolId

Key = tuple[tuple[int, ...], int]


def merge_monomials(m1: tuple[int, ...], m2: tuple[int, ...]):
    """Sign and sorted union of two odd monomials; sign 0 if they share a generator."""
    if not m1:
        return 1, m2
    if not m2:
        return 1, m1
    if m1[-1] < m2[0]:
        return 1, m1 + m2
    s1 = set(m1)
    inversions = 0
    for y in m2:
        if y in s1:
            return 0, ()
        inversions += len(m1) - bisect_right(m1, y)
    return (-1 if inversions & 1 else 1), tuple(sorted(m1 + m2))


class GrassmannElement:
    __slots__ = ("registry", "terms")

    def __init__(self, registry: Registry, terms: Mapping[Key, Coefficient] | None = None):
        self.registry = registry
        self.terms: dict[Key, Coefficient] = {}
        if terms:
            for k, c in terms.items():
                if not c.is_zero():
                    self.terms[k] = c

    # -- constructors ---------------------------------------------------
    @classmethod
    def zero(cls, registry: Registry) -> "GrassmannElement":
        return cls(registry)

    @classmethod
    def const(cls, registry: Registry, value) -> "GrassmannElement":
        return cls(registry, {((), 0): Coefficient.const(registry, value)})

    @classmethod
    def one(cls, registry: Registry) -> "GrassmannElement":
        return cls.const(registry, 1)

    @classmethod
    def nu0(cls, registry: Registry) -> "GrassmannElement":
        return cls(registry, {((), 1): Coefficient.const(registry, 1)})

    @classmethod
    def from_coefficient(cls, c: Coefficient, nu0: int = 0) -> "GrassmannElement":
        return cls(c.registry, {((), nu0): c})

    @classmethod
    def symbol(cls, registry: Registry, sym: SymbolId) -> "GrassmannElement":
        registry.check(sym)
        if sym.parity == 0:
            return cls(registry, {((), 0): Coefficient.symbol(registry, sym)})
        return cls(registry, {((sym.serial,), 0): Coefficient.const(registry, 1)})

    def zero_like(self) -> "GrassmannElement":
        return GrassmannElement(self.registry)

    def one_like(self) -> "GrassmannElement":
        return GrassmannElement.one(self.registry)

    def inverse(self) -> "GrassmannElement":
        return invert(self)

    # -- structure --------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def parity(self) -> int | None:
        """0 or 1 for homogeneous elements (zero counts as even), else None."""
        ps = {len(m) & 1 for (m, _) in self.terms}
        if len(ps) > 1:
            return None
        return ps.pop() if ps else 0

    def is_even(self) -> bool:
        return self.parity() == 0

    def component(self, parity: int) -> "GrassmannElement":
        return GrassmannElement(self.registry, {
            k: c for k, c in self.terms.items() if (len(k[0]) & 1) == parity})

    def body(self) -> "GrassmannElement":
        return GrassmannElement(self.registry, {k: c for k, c in self.terms.items() if not k[0]})

    def body_pair(self) -> tuple[Coefficient, Coefficient]:
        zero = Coefficient.const(self.registry, 0)
        return self.terms.get(((), 0), zero), self.terms.get(((), 1), zero)

    def nilpotent(self) -> "GrassmannElement":
        return GrassmannElement(self.registry, {k: c for k, c in self.terms.items() if k[0]})

    def is_scalar(self) -> bool:
        """True if the element is a plain coefficient (no odd part, no nu0)."""
        return all(k == ((), 0) for k in self.terms)

    def scalar(self) -> Coefficient:
        if not self.is_scalar():
            raise ValueError("element is not a plain coefficient")
        return self.terms.get(((), 0), Coefficient.const(self.registry, 0))

    def generators(self, serials: tuple[int, ...]) -> tuple[SymbolId, ...]:
        return tuple(self.registry.symbol(s) for s in serials)

    def free_symbols(self) -> set[SymbolId]:
        out: set[SymbolId] = set()
        syms = self.registry.symbols
        for (m, _), c in self.terms.items():
            out.update(syms[s] for s in m)
            out.update(c.free_symbols())
        return out

    def max_odd_degree(self) -> int:
        return max((len(m) for (m, _) in self.terms), default=0)

    # -- arithmetic -------------------------------------------------------
    def _coerce(self, other) -> "GrassmannElement":
        if isinstance(other, GrassmannElement):
            if other.registry is not self.registry:
                raise RegistryMismatch("operands come from different registries")
            return other
        if isinstance(other, Coefficient):
            if other.registry is not self.registry:
                raise RegistryMismatch("operands come from different registries")
            return GrassmannElement.from_coefficient(other)
        if isinstance(other, (int, Rational, complex, tuple)):
            return GrassmannElement.const(self.registry, other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        terms = dict(self.terms)
        for k, c in other.terms.items():
            if k in terms:
                s = terms[k] + c
                if s.is_zero():
                    del terms[k]
                else:
                    terms[k] = s
            else:
                terms[k] = c
        return GrassmannElement(self.registry, terms)

    __radd__ = __add__

    def __neg__(self):
        return GrassmannElement(self.registry, {k: -c for k, c in self.terms.items()})

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
        terms: dict[Key, Coefficient] = {}
        for (m1, a1), c1 in self.terms.items():
            for (m2, a2), c2 in other.terms.items():
                sign, m = merge_monomials(m1, m2)
                if not sign:
                    continue
                c = c1 * c2
                if sign < 0:
                    c = -c
                k = (m, (a1 + a2) & 1)
                if k in terms:
                    terms[k] = terms[k] + c
                else:
                    terms[k] = c
        return GrassmannElement(self.registry, terms)

    def __rmul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other * self

    def __pow__(self, n: int):
        if n < 0:
            return invert(self) ** (-n)
        result = GrassmannElement.one(self.registry)
        for _ in range(n):
            result = result * self
        return result

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * invert(other)

    def __rtruediv__(self, other):
        return invert(self) * other

    def scale(self, c) -> "GrassmannElement":
        if not isinstance(c, Coefficient):
            c = Coefficient.const(self.registry, c)
        if c.is_zero():
            return GrassmannElement.zero(self.registry)
        return GrassmannElement(self.registry, {k: v * c for k, v in self.terms.items()})

    def times_nu0(self) -> "GrassmannElement":
        return GrassmannElement(self.registry, {(m, 1 - a): c for (m, a), c in self.terms.items()})

    # -- comparison -------------------------------------------------------
    def __eq__(self, other):
        if not isinstance(other, GrassmannElement):
            try:
                other = self._coerce(other)
            except RegistryMismatch:
                return False
            if other is NotImplemented:
                return False
        if other.registry is not self.registry:
            return False
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __repr__(self):
        return f"GrassmannElement({self})"

    def __str__(self):
        if not self.terms:
            return "0"
        syms = self.registry.symbols
        parts = []
        for (m, a), c in sorted(self.terms.items(), key=lambda kv: (len(kv[0][0]), kv[0])):
            factors = [f"({c})"] if not c.is_one() or not (m or a) else []
            if a:
                factors.append("nu0")
            factors.extend(syms[s].name for s in m)
            parts.append("*".join(factors))
        return " + ".join(parts)


# -- operations ---------------------------------------------------------------

def arith(tag: str, x: GrassmannElement, y: GrassmannElement) -> GrassmannElement:
    if x.registry is not y.registry:
        raise RegistryMismatch("operands come from different registries")
    if tag == "add":
        return x + y
    if tag == "sub":
        return x - y
    if tag == "mul":
        return x * y
    raise ValueError(f"unknown arithmetic tag {tag!r}")


def body(x: GrassmannElement) -> GrassmannElement:
    return x.body()


def _invert_body(b0: Coefficient, b1: Coefficient) -> tuple[Coefficient, Coefficient]:
    # (b0 + b1 nu0)^-1 = (b0 - b1 nu0) / (b0^2 - b1^2)
    if b1.is_zero():
        if b0.is_zero():
            raise NonInvertibleBody("body is zero")
        return b0.inverse(), b1
    det = b0 * b0 - b1 * b1
    if det.is_zero():
        raise NonInvertibleBody("body is a zero divisor of C[nu0]")
    inv = det.inverse()
    return b0 * inv, -(b1 * inv)


def invert(x: GrassmannElement) -> GrassmannElement:
    """Two-sided inverse via the terminating geometric series on the nilpotent part."""
    reg = x.registry
    i0, i1 = _invert_body(*x.body_pair())
    binv = GrassmannElement(reg, {((), 0): i0, ((), 1): i1})
    n = x.nilpotent()
    if n.is_zero():
        return binv
    step = -(n * binv)
    total = GrassmannElement.one(reg)
    power = GrassmannElement.one(reg)
    while True:
        power = power * step
        if power.is_zero():
            break
        total = total + power
    return binv * total


# -- the odd involution ---------------------------------------------------------

_PAIRABLE_EVEN = (Kind.Z, Kind.NU_E)


def _unit(reg: Registry, chart: int | None) -> GrassmannElement:
    """nu(1), or the chart-local unit nu(1)^(chart) behind a chart label entry 1."""
    return GrassmannElement.symbol(reg, reg.get(Kind.NU_ONE, None, chart))


def _nu_of_generator(reg: Registry, sym: SymbolId | None) -> GrassmannElement:
    """nu applied to a single generator; ``None`` stands for the unit 1."""
    if sym is None:
        return GrassmannElement.symbol(reg, reg.nu_one)
    if sym.kind is Kind.NU_ONE:
        return GrassmannElement.one(reg)
    if sym.kind in (Kind.Z, Kind.E, Kind.NU_Z, Kind.NU_E):
        return GrassmannElement.symbol(reg, reg.partner(sym))
    raise UndefinedNu(f"nu is not defined on {sym.name}")


def _unit_chart(c: Coefficient) -> int | None:
    """Chart whose local unit nu(1)^(chart) stands behind a generator-free coefficient."""
    charts = {s.chart for s in c.free_symbols() if s.chart is not None}
    if len(charts) > 1:
        raise UndefinedNu("coefficient mixes symbols of several charts")
    return charts.pop() if charts else None


def _nu_once(x: GrassmannElement) -> GrassmannElement:
    reg = x.registry
    syms = reg.symbols
    ctx = reg.ctx
    out = GrassmannElement.zero(reg)
    for (m, a), c in x.terms.items():
        if len(m) >= 2:
            raise UndefinedNu("nu of a product of two or more odd generators")
        if len(m) == 1:
            term = _nu_of_generator(reg, syms[m[0]]).scale(c)
            out = out + (term.times_nu0() if a else term)
            continue
        # even term: find the generator inside the numerator, partner symbols first
        groups: dict[SymbolId | None, dict[tuple, list]] = {}
        for exps, (cre, cim) in c.numerator_terms().items():
            partners, coords = [], []
            for i, e in enumerate(exps):
                if not e:
                    continue
                s = reg.symbol_of_var(i)
                if s.kind is Kind.NU_E:
                    partners.append((s, e))
                elif s.kind is Kind.Z:
                    coords.append((s, e))
            if len(partners) > 1 or (partners and partners[0][1] != 1):
                raise UndefinedNu("coefficient does not factor through a single generator")
            if partners:
                gen = partners[0][0]
            elif not coords:
                gen = None
            elif len(coords) == 1 and coords[0][1] == 1:
                gen = coords[0][0]
            else:
                raise UndefinedNu("coefficient does not factor through a single generator")
            rest = list(exps)
            if gen is not None:
                rest[reg.var(gen)] -= 1
            groups.setdefault(gen, {})[tuple(rest)] = [cre, cim]
        for gen, poly in groups.items():
            from .coefficient import _fmpq
            re = ctx.from_dict({k: _fmpq(v[0]) for k, v in poly.items() if v[0]}) if any(
                v[0] for v in poly.values()) else ctx.constant(0)
            im = ctx.from_dict({k: _fmpq(v[1]) for k, v in poly.items() if v[1]}) if any(
                v[1] for v in poly.values()) else None
            scal = Coefficient(reg, re, im, c.den)
            if gen is None:
                term = _unit(reg, _unit_chart(c)).scale(scal)
            else:
                term = _nu_of_generator(reg, gen).scale(scal)
            out = out + (term.times_nu0() if a else term)
    return out


def nu_apply(x: GrassmannElement) -> GrassmannElement:
    """The odd involution, extended by even-linear factoring nu(c*g) = c*nu(g).

    ``nu0`` is treated as a scalar. For terms without odd generators the
    generator is read off the numerator: a single ``nu(e)`` factor if present,
    otherwise a single linear coordinate, otherwise the unit. Elements whose
    factoring is not reproduced by a second application are rejected, so
    ``nu_apply`` is an involution wherever it is defined.
    """
    y = _nu_once(x)
    try:
        back = _nu_once(y)
    except UndefinedNu:
        back = None
    if back != x:
        raise UndefinedNu("element does not factor unambiguously as coefficient * generator")
    return y


# -- substitution -----------------------------------------------------------------

def _as_element(reg: Registry, v) -> GrassmannElement:
    if isinstance(v, GrassmannElement):
        if v.registry is not reg:
            raise RegistryMismatch("substitution value from another registry")
        return v
    if isinstance(v, Coefficient):
        return GrassmannElement.from_coefficient(v)
    return GrassmannElement.const(reg, v)


def _eval_poly_coeff(reg, terms, images: dict[int, Coefficient], cache) -> Coefficient:
    total = Coefficient.const(reg, 0)
    for exps, (cre, cim) in terms.items():
        term = Coefficient.const(reg, (cre, cim) if cim else cre)
        for i, e in enumerate(exps):
            if e:
                key = (i, e)
                if key not in cache:
                    cache[key] = images[i] ** e
                term = term * cache[key]
        total = total + term
    return total


def _eval_poly_elem(reg, terms, images: dict[int, GrassmannElement], cache) -> GrassmannElement:
    total = GrassmannElement.zero(reg)
    for exps, (cre, cim) in terms.items():
        term = GrassmannElement.const(reg, (cre, cim) if cim else cre)
        for i, e in enumerate(exps):
            if e:
                key = (i, e)
                if key not in cache:
                    cache[key] = images[i] ** e
                term = term * cache[key]
        total = total + term
    return total


def substitute(x: GrassmannElement, sigma: Mapping[SymbolId, object]) -> GrassmannElement:
    """Ring-morphism extension of a parity-preserving symbol assignment.

    Even symbols mapped to elements with nilpotent parts are expanded exactly:
    polynomials by multiplication, denominators by :func:`invert`, which
    agrees with the finite Taylor rule.
    """
    reg = x.registry
    images: dict[SymbolId, GrassmannElement] = {}
    for s, v in sigma.items():
        reg.check(s)
        v = _as_element(reg, v)
        p = v.parity()
        if p is None or (p != s.parity and not v.is_zero()):
            raise ParityMismatch(f"{s.name} (parity {s.parity}) cannot map to an element of parity {p}")
        images[s] = v
    even_img: dict[int, GrassmannElement] = {}
    scalar_ok = True
    for s, v in images.items():
        if s.parity == 0:
            even_img[reg.var(s)] = v
            if not v.is_scalar():
                scalar_ok = False
    ctx = reg.ctx
    gens = ctx.gens()
    n_even = len(reg.even_symbols)
    for i in range(n_even):
        if i not in even_img:
            even_img[i] = GrassmannElement.from_coefficient(Coefficient(reg, gens[i], None, None, _reduced=True))
    syms = reg.symbols
    cache: dict = {}
    out = GrassmannElement.zero(reg)
    coeff_memo: dict[Coefficient, object] = {}
    for (m, a), c in x.terms.items():
        if c in coeff_memo:
            cimg = coeff_memo[c]
        else:
            num = c.numerator_terms()
            den = {k: (v, 0) for k, v in c.denominator_terms().items()}
            if scalar_ok:
                sc = {i: v.scalar() for i, v in even_img.items()}
                n = _eval_poly_coeff(reg, num, sc, cache)
                d = _eval_poly_coeff(reg, den, sc, cache)
                if d.is_zero():
                    raise NonInvertibleBody("denominator vanishes after substitution")
                cimg = GrassmannElement.from_coefficient(n / d)
            else:
                n = _eval_poly_elem(reg, num, even_img, cache)
                d = _eval_poly_elem(reg, den, even_img, cache)
                cimg = n * invert(d)
            coeff_memo[c] = cimg
        term = cimg
        if a:
            term = term.times_nu0()
        for s in m:
            sym = syms[s]
            term = term * images.get(sym, GrassmannElement.symbol(reg, sym))
        out = out + term
    return out
