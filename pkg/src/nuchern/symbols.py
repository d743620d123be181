"""Symbol registry for coordinates, their nu-partners and auxiliary scalars.

Even symbols (parity 0) become polynomial variables of the coefficient
field; odd symbols are Grassmann generators.
"""
from __future__ import annotations

import enum
import itertools
import threading
from dataclasses import dataclass, field

import flint

from .errors import DuplicateName, NuChernError


class Kind(enum.Enum):
    Z = "z"  # even coordinate
    E = "e"  # odd coordinate
    NU_E = "nu_e"  # even partner nu(e)
    NU_Z = "nu_z"  # odd partner nu(z)
    NU_ONE = "nu1"  # odd unit nu(1)
    RHO = "rho"  # partition-of-unity function
    CONST = "const"  # formal constant, zero differential

    @property
    def parity(self) -> int:
        return 1 if self in (Kind.E, Kind.NU_Z, Kind.NU_ONE) else 0

    @property
    def has_differential(self) -> bool:
        return self is not Kind.CONST


PARTNER_KIND = {Kind.Z: Kind.NU_Z, Kind.NU_Z: Kind.Z, Kind.E: Kind.NU_E, Kind.NU_E: Kind.E}

_registry_serial = itertools.count()


@dataclass(frozen=True)
class SymbolId:
    name: str
    kind: Kind
    index: int | None
    chart: int | None
    serial: int
    registry_key: int = field(repr=False)

    @property
    def parity(self) -> int:
        return self.kind.parity

    def __lt__(self, other: "SymbolId") -> bool:
        return self.serial < other.serial


def default_name(kind: Kind, index: int | None, chart: int | None) -> str:
    base = {
        Kind.Z: "z",
        Kind.E: "e",
        Kind.NU_E: "nu_e",
        Kind.NU_Z: "nu_z",
        Kind.NU_ONE: "nu1",
        Kind.RHO: "rho",
        Kind.CONST: "c",
    }[kind]
    name = base if index is None else f"{base}{index}"
    if chart is not None:
        name += f"^({chart})"
    return name


class Registry:
    """Append-only table of symbols.

    Lookups are lock-free; registration takes a lock. The polynomial context
    holding the even symbols grows by doubling, and coefficients built on an
    older context are lifted on demand.
    """

    def __init__(self, capacity: int = 16):
        self.key = next(_registry_serial)
        self._symbols: list[SymbolId] = []
        self._by_name: dict[str, SymbolId] = {}
        self._by_key: dict[tuple, SymbolId] = {}
        self._var_of: dict[SymbolId, int] = {}
        self._even: list[SymbolId] = []
        self._lock = threading.Lock()
        self._ctx = self._make_ctx(capacity)

    @staticmethod
    def _make_ctx(n: int):
        return flint.fmpq_mpoly_ctx.get(("v", n), "deglex")

    def __repr__(self):
        return f"Registry(key={self.key}, symbols={len(self._symbols)})"

    @property
    def ctx(self):
        return self._ctx

    @property
    def symbols(self) -> tuple[SymbolId, ...]:
        return tuple(self._symbols)

    @property
    def even_symbols(self) -> tuple[SymbolId, ...]:
        return tuple(self._even)

    def register(self, name: str, kind: Kind, index: int | None = None,
                 chart: int | None = None) -> SymbolId:
        kind = Kind(kind)
        with self._lock:
            if name in self._by_name:
                raise DuplicateName(name)
            key = (kind, index, chart)
            if index is not None and key in self._by_key:
                raise DuplicateName(f"{kind.value} index={index} chart={chart}")
            sym = SymbolId(name, kind, index, chart, len(self._symbols), self.key)
            self._symbols.append(sym)
            self._by_name[name] = sym
            if index is not None or kind is Kind.NU_ONE:
                self._by_key[key] = sym
            if kind.parity == 0:
                if len(self._even) >= self._ctx.nvars():
                    self._ctx = self._make_ctx(2 * self._ctx.nvars())
                self._var_of[sym] = len(self._even)
                self._even.append(sym)
            return sym

    def get(self, kind: Kind, index: int | None = None, chart: int | None = None,
            create: bool = True) -> SymbolId:
        kind = Kind(kind)
        sym = self._by_key.get((kind, index, chart))
        if sym is None:
            if not create:
                raise KeyError((kind, index, chart))
            try:
                sym = self.register(default_name(kind, index, chart), kind, index, chart)
            except DuplicateName:
                # lost a race with another registration of the same key
                sym = self._by_key[(kind, index, chart)]
        return sym

    def symbol(self, serial: int) -> SymbolId:
        return self._symbols[serial]

    def by_name(self, name: str) -> SymbolId:
        return self._by_name[name]

    @property
    def nu_one(self) -> SymbolId:
        return self.get(Kind.NU_ONE)

    def partner(self, sym: SymbolId) -> SymbolId:
        if sym.kind not in PARTNER_KIND:
            raise NuChernError(f"{sym.name} has no nu-partner symbol")
        if sym.index is None:
            raise NuChernError(f"{sym.name} is unindexed; partners are paired by index")
        return self.get(PARTNER_KIND[sym.kind], sym.index, sym.chart)

    def var(self, sym: SymbolId) -> int:
        return self._var_of[sym]

    def symbol_of_var(self, i: int) -> SymbolId:
        return self._even[i]

    def check(self, sym: SymbolId):
        if sym.registry_key != self.key:
            from .errors import RegistryMismatch
            raise RegistryMismatch(f"{sym.name} belongs to another registry")


def register_symbol(registry: Registry, name: str, kind: Kind, chart: int | None = None,
                    index: int | None = None) -> SymbolId:
    return registry.register(name, kind, index=index, chart=chart)
