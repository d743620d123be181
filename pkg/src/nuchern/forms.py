"""Bigraded differential forms over the Grassmann algebra.

A generator ``dw`` has form degree 1 and the parity of ``w``; bihomogeneous
elements commute as ``a^b = (-1)**(deg a * deg b + p(a) p(b)) b^a``. So even
differentials anticommute while odd ones commute and may repeat. A term is
stored coefficient-first: ``x * dw_1 ^ ... ^ dw_r`` with the ``w`` sorted by
registration serial.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .coefficient import Coefficient
from .errors import BadCount, NonInvertibleBody, RegistryMismatch
from .grassmann import GrassmannElement, invert, substitute
from .symbols import Kind, Registry, SymbolId

DMono = tuple[int, ...]


@dataclass(frozen=True)
class TruncationPolicy:
    max_degree: int = 6

    def __post_init__(self):
        if self.max_degree < 0:
            raise ValueError("max_degree must be non-negative")


DEFAULT_POLICY = TruncationPolicy()


def _dparity(reg: Registry, s: int) -> int:
    return reg.symbol(s).parity


def _merge_dmono(reg: Registry, m: DMono, n: DMono):
    """Sign and sorted merge of two differential monomials (sign 0 if it vanishes)."""
    if not m:
        return 1, n
    if not n:
        return 1, m
    sign = 1
    for b in n:
        pb = _dparity(reg, b)
        for a in m:
            if a == b and not pb:
                return 0, ()
            if a > b and not (pb and _dparity(reg, a)):
                sign = -sign
    return sign, tuple(sorted(m + n))


def _mono_parity(reg: Registry, m: DMono) -> int:
    return sum(_dparity(reg, s) for s in m) & 1


class Form:
    __slots__ = ("registry", "policy", "terms", "truncated")

    def __init__(self, registry: Registry, terms: Mapping[DMono, GrassmannElement] | None = None,
                 policy: TruncationPolicy = DEFAULT_POLICY, truncated: bool = False):
        self.registry = registry
        self.policy = policy
        self.truncated = truncated
        self.terms: dict[DMono, GrassmannElement] = {}
        for m, x in (terms or {}).items():
            if x.is_zero():
                continue
            if len(m) > policy.max_degree:
                self.truncated = True
                continue
            self.terms[m] = x

    # -- constructors ---------------------------------------------------
    @classmethod
    def zero(cls, registry, policy=DEFAULT_POLICY):
        return cls(registry, None, policy)

    @classmethod
    def from_element(cls, x: GrassmannElement, policy=DEFAULT_POLICY) -> "Form":
        return cls(x.registry, {(): x}, policy)

    @classmethod
    def dsym(cls, registry: Registry, sym: SymbolId, policy=DEFAULT_POLICY) -> "Form":
        registry.check(sym)
        if not sym.kind.has_differential:
            return cls.zero(registry, policy)
        return cls(registry, {(sym.serial,): GrassmannElement.one(registry)}, policy)

    def zero_like(self):
        return Form(self.registry, None, self.policy)

    def one_like(self):
        return Form.from_element(GrassmannElement.one(self.registry), self.policy)

    # -- structure ----------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def degrees(self) -> set[int]:
        return {len(m) for m in self.terms}

    def degree(self) -> int | None:
        d = self.degrees()
        if len(d) > 1:
            return None
        return d.pop() if d else 0

    def parity(self) -> int | None:
        """Total Z2 parity (coefficient plus differentials) if homogeneous."""
        ps = set()
        for m, x in self.terms.items():
            px = x.parity()
            if px is None:
                return None
            ps.add((px + _mono_parity(self.registry, m)) & 1)
        if len(ps) > 1:
            return None
        return ps.pop() if ps else 0

    def part(self, degree: int) -> "Form":
        return Form(self.registry, {m: x for m, x in self.terms.items() if len(m) == degree},
                    self.policy)

    def degree_zero(self) -> GrassmannElement:
        return self.terms.get((), GrassmannElement.zero(self.registry))

    def map_coefficients(self, f) -> "Form":
        return Form(self.registry, {m: f(x) for m, x in self.terms.items()}, self.policy,
                    self.truncated)

    def free_symbols(self) -> set[SymbolId]:
        out = set()
        for m, x in self.terms.items():
            out.update(self.registry.symbol(s) for s in m)
            out.update(x.free_symbols())
        return out

    # -- arithmetic -------------------------------------------------------
    def _coerce(self, other) -> "Form":
        if isinstance(other, Form):
            if other.registry is not self.registry:
                raise RegistryMismatch("forms from different registries")
            return other
        if isinstance(other, GrassmannElement):
            if other.registry is not self.registry:
                raise RegistryMismatch("forms from different registries")
            return Form.from_element(other, self.policy)
        if isinstance(other, (int, Coefficient)) or hasattr(other, "denominator"):
            return Form.from_element(GrassmannElement.const(self.registry, other)
                                     if not isinstance(other, Coefficient)
                                     else GrassmannElement.from_coefficient(other), self.policy)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        terms = dict(self.terms)
        for m, x in other.terms.items():
            terms[m] = terms[m] + x if m in terms else x
        return Form(self.registry, terms, self.policy, self.truncated or other.truncated)

    __radd__ = __add__

    def __neg__(self):
        return Form(self.registry, {m: -x for m, x in self.terms.items()}, self.policy,
                    self.truncated)

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
        return wedge(self, other)

    def __rmul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return wedge(other, self)

    def __pow__(self, n: int):
        out = self.one_like()
        for _ in range(n):
            out = wedge(out, self)
        return out

    def scale(self, c) -> "Form":
        """Multiply every coefficient on the left by an even element or scalar."""
        if isinstance(c, GrassmannElement):
            if c.parity() != 0:
                raise ValueError("scale() takes even elements; use wedge for odd ones")
            return Form(self.registry, {m: c * x for m, x in self.terms.items()}, self.policy,
                        self.truncated)
        return Form(self.registry, {m: x.scale(c) for m, x in self.terms.items()}, self.policy,
                    self.truncated)

    def inverse(self) -> "Form":
        """Inverse when the degree-0 part is invertible; the series stops at truncation."""
        c0 = self.degree_zero()
        try:
            c0inv = Form.from_element(invert(c0), self.policy)
        except NonInvertibleBody:
            raise NonInvertibleBody("degree-0 part of the form is not invertible") from None
        n = self - Form.from_element(c0, self.policy)
        step = -(n * c0inv)
        total = self.one_like()
        power = self.one_like()
        while True:
            power = power * step
            if power.is_zero():
                break
            total = total + power
        return c0inv * total

    # -- comparison -------------------------------------------------------
    def __eq__(self, other):
        if not isinstance(other, Form):
            try:
                other = self._coerce(other)
            except RegistryMismatch:
                return False
            if other is NotImplemented:
                return False
        return self.registry is other.registry and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __repr__(self):
        return f"Form({self})"

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for m in sorted(self.terms, key=lambda m: (len(m), m)):
            ds = "^".join("d" + self.registry.symbol(s).name for s in m)
            parts.append(f"[{self.terms[m]}]" + (f"*{ds}" if ds else ""))
        return " + ".join(parts)


def wedge(a: Form, b: Form) -> Form:
    if a.registry is not b.registry:
        raise RegistryMismatch("forms from different registries")
    reg = a.registry
    policy = a.policy if a.policy.max_degree <= b.policy.max_degree else b.policy
    terms: dict[DMono, GrassmannElement] = {}
    truncated = a.truncated or b.truncated
    parity_cache: dict[DMono, int] = {}
    for m, x in a.terms.items():
        pm = parity_cache.get(m)
        if pm is None:
            pm = parity_cache[m] = _mono_parity(reg, m)
        for n, y in b.terms.items():
            if len(m) + len(n) > policy.max_degree:
                truncated = True
                continue
            sign, mn = _merge_dmono(reg, m, n)
            if not sign:
                continue
            # move y left past the differentials of m
            if pm and y.parity() != 0:
                yo, ye = y.component(1), y.component(0)
                xy = x * ye - x * yo
            else:
                xy = x * y
            if sign < 0:
                xy = -xy
            terms[mn] = terms[mn] + xy if mn in terms else xy
    return Form(reg, terms, policy, truncated)


# -- exterior derivative --------------------------------------------------------

def _d_element(x: GrassmannElement, policy: TruncationPolicy) -> Form:
    reg = x.registry
    terms: dict[DMono, GrassmannElement] = {}

    def add(s: int, mono, nu0, c):
        key = (s,)
        e = GrassmannElement(reg, {(mono, nu0): c})
        terms[key] = terms[key] + e if key in terms else e

    for (mono, a), c in x.terms.items():
        for w in c.free_symbols():
            if not w.kind.has_differential:
                continue
            dc = c.derivative(w)
            if not dc.is_zero():
                add(w.serial, mono, a, dc)
        k = len(mono)
        for i, g in enumerate(mono):
            if not reg.symbol(g).kind.has_differential:
                continue
            rest = mono[:i] + mono[i + 1:]
            cc = c if (k - 1 - i) % 2 == 0 else -c
            add(g, rest, a, cc)
    return Form(reg, terms, policy)


def exterior_d(alpha, policy: TruncationPolicy | None = None) -> Form:
    """Even degree-1 derivation; accepts a Form or a GrassmannElement."""
    if isinstance(alpha, GrassmannElement):
        return _d_element(alpha, policy or DEFAULT_POLICY)
    out = alpha.zero_like()
    out.truncated = alpha.truncated
    for m, x in alpha.terms.items():
        dx = _d_element(x, alpha.policy)
        if dx.is_zero():
            continue
        out = out + wedge(dx, Form(alpha.registry, {m: GrassmannElement.one(alpha.registry)},
                                   alpha.policy))
    return out


def dlog(h: GrassmannElement, policy: TruncationPolicy = DEFAULT_POLICY) -> Form:
    if h.parity() != 0:
        raise ValueError("dlog needs an even element")
    return Form.from_element(invert(h), policy) * exterior_d(h, policy)


# -- pullback -------------------------------------------------------------------------

def pullback(alpha: Form, sigma: Mapping[SymbolId, GrassmannElement]) -> Form:
    """Substitute symbols and their differentials: w -> sigma(w), dw -> d(sigma(w))."""
    reg = alpha.registry
    dimg: dict[int, Form] = {}
    by_serial = {s.serial: v for s, v in sigma.items()}
    out = alpha.zero_like()
    out.truncated = alpha.truncated
    for m, x in alpha.terms.items():
        term = Form.from_element(substitute(x, sigma), alpha.policy)
        for s in m:
            if s not in dimg:
                if s in by_serial:
                    v = by_serial[s]
                    if not isinstance(v, GrassmannElement):
                        v = GrassmannElement.const(reg, v)
                    dimg[s] = exterior_d(v, alpha.policy)
                else:
                    dimg[s] = Form.dsym(reg, reg.symbol(s), alpha.policy)
            term = term * dimg[s]
        out = out + term
    return out


# -- partitions of unity --------------------------------------------------------------------

@dataclass(frozen=True)
class PartitionFamily:
    registry: Registry
    count: int
    symbols: tuple[SymbolId, ...]

    def rho(self, j: int) -> GrassmannElement:
        """rho_j for 1 <= j <= count; the last one is eliminated."""
        if not 1 <= j <= self.count:
            raise IndexError(j)
        if j < self.count:
            return GrassmannElement.symbol(self.registry, self.symbols[j - 1])
        out = GrassmannElement.one(self.registry)
        for s in self.symbols:
            out = out - GrassmannElement.symbol(self.registry, s)
        return out

    def drho(self, j: int, policy: TruncationPolicy = DEFAULT_POLICY) -> Form:
        return exterior_d(self.rho(j), policy)

    def total(self) -> GrassmannElement:
        out = GrassmannElement.zero(self.registry)
        for j in range(1, self.count + 1):
            out = out + self.rho(j)
        return out


def make_partition(registry: Registry, n: int) -> PartitionFamily:
    if n < 2:
        raise BadCount(f"a partition family needs at least 2 members, got {n}")
    syms = tuple(registry.get(Kind.RHO, j) for j in range(1, n))
    return PartitionFamily(registry, n, syms)
