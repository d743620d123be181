"""Labeled charts of nu-projective superspaces and their transition maps.

Chart ``i`` of ``nu-P^{m|n}`` is labeled by a ``1|0 x (m+1)|n`` row ``A_i``.
Entries are addressed 1-based across the whole row, even slots first.
"""
from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from itertools import product

from .coefficient import Coefficient
from .errors import BadDimensions, IndexOutOfRange, UndefinedNu, UnresolvableNu
from .grassmann import GrassmannElement, invert, nu_apply, substitute
from .numeric import eval_numeric
from .report import VerificationReport
from .symbols import Kind, Registry, SymbolId


class _OneNu:
    """The formal odd token in a nonstandard label; ``w . 1nu = nu(w)``."""

    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self):
        return "1nu"

    parity = 1


ONE_NU = _OneNu()


@dataclass(frozen=True)
class ChartLabel:
    index: int
    entries: tuple
    divider: int

    def __len__(self):
        return len(self.entries)

    def entry(self, j: int):
        if not 1 <= j <= len(self.entries):
            raise IndexOutOfRange(f"entry {j} of a row with {len(self.entries)} entries")
        return self.entries[j - 1]

    def coordinate_symbols(self) -> list[tuple[int, SymbolId]]:
        """(slot, symbol) pairs of the chart coordinates, i.e. entries other than slot i."""
        out = []
        for s, x in enumerate(self.entries, 1):
            if s == self.index:
                continue
            (sym,) = x.free_symbols()
            out.append((s, sym))
        return out


@dataclass
class ChartAtlas:
    registry: Registry
    m: int
    n: int
    labels: tuple[ChartLabel, ...]
    _transitions: dict = field(default_factory=dict, repr=False)

    @property
    def size(self) -> int:
        return self.m + self.n + 1

    def p(self, i: int) -> int:
        self._check(i)
        return 0 if i <= self.m + 1 else 1

    def is_standard(self, i: int) -> bool:
        return self.p(i) == 0

    def _check(self, i: int):
        if not 1 <= i <= self.size:
            raise IndexOutOfRange(f"chart {i} not in 1..{self.size}")

    def label(self, i: int) -> ChartLabel:
        self._check(i)
        return self.labels[i - 1]

    def z(self, k: int, chart: int) -> SymbolId:
        return self.registry.get(Kind.Z, k, chart)

    def e(self, l: int, chart: int) -> SymbolId:
        return self.registry.get(Kind.E, l, chart)

    def unit(self, i: int) -> SymbolId:
        """nu(1)^(i): the odd partner of the label entry that chart i normalises to 1."""
        return self.registry.get(Kind.NU_ONE, None, i)

    def chart_symbols(self, i: int) -> list[SymbolId]:
        """Every symbol attached to chart i: z, e, nu(e), nu(z), nu(1)^(i), then the global nu(1)."""
        self._check(i)
        reg = self.registry
        out = [self.z(k, i) for k in range(1, self.m + 1)]
        out += [self.e(l, i) for l in range(1, self.n + 1)]
        out += [reg.get(Kind.NU_E, l, i) for l in range(1, self.n + 1)]
        out += [reg.get(Kind.NU_Z, k, i) for k in range(1, self.m + 1)]
        out.append(self.unit(i))
        out.append(reg.nu_one)
        return out

    def even_chart_symbols(self, i: int) -> list[SymbolId]:
        return [s for s in self.chart_symbols(i) if s.parity == 0]

    def transition(self, i: int, j: int) -> "TransitionMap":
        key = (i, j)
        if key not in self._transitions:
            self._transitions[key] = _build_transition(self, i, j)
        return self._transitions[key]


@dataclass(frozen=True)
class TransitionMap:
    source: int
    target: int
    images: dict

    def __getitem__(self, sym: SymbolId) -> GrassmannElement:
        return self.images[sym]

    def apply(self, x: GrassmannElement) -> GrassmannElement:
        return substitute(x, self.images)

    def even_images(self) -> dict:
        return {s: v for s, v in self.images.items() if s.parity == 0}


def build_atlas(m: int, n: int, registry: Registry | None = None) -> ChartAtlas:
    if m < 1 or n < 1:
        raise BadDimensions(f"need m >= 1 and n >= 1, got m={m}, n={n}")
    reg = registry or Registry(capacity=max(16, 2 * (m + n) * (m + n + 1) + 8))
    G = GrassmannElement
    labels = []
    reg.nu_one
    for i in range(1, m + n + 2):
        zs = [reg.get(Kind.Z, k, i) for k in range(1, m + 1)]
        es = [reg.get(Kind.E, l, i) for l in range(1, n + 1)]
        for l in range(1, n + 1):
            reg.get(Kind.NU_E, l, i)
        for k in range(1, m + 1):
            reg.get(Kind.NU_Z, k, i)
        reg.get(Kind.NU_ONE, None, i)
        if i <= m + 1:
            even = [G.symbol(reg, s) for s in zs]
            even.insert(i - 1, G.one(reg))
            odd = [G.symbol(reg, s) for s in es]
        else:
            even = [G.symbol(reg, s) for s in zs] + [G.symbol(reg, reg.partner(es[0]))]
            odd = [G.symbol(reg, s) for s in es[1:]]
            odd.insert(i - (m + 1) - 1, ONE_NU)
        labels.append(ChartLabel(i, tuple(even + odd), m + 1))
    return ChartAtlas(reg, m, n, tuple(labels))


def entry_M(atlas: ChartAtlas, j: int, i: int):
    """M_j(A_i), the j-th entry of the label of chart i."""
    return atlas.label(i).entry(j)


def entry_M_prime(atlas: ChartAtlas, j: int, i: int) -> GrassmannElement:
    """M'_j(A_i) = nu^{p(j)}(M_j(A_i)); always even."""
    x = entry_M(atlas, j, i)
    if atlas.p(j) == 0:
        return x
    if x is ONE_NU:
        return GrassmannElement.one(atlas.registry)
    return nu_apply(x)


def _nu(x: GrassmannElement, what: str) -> GrassmannElement:
    try:
        return nu_apply(x)
    except UndefinedNu as exc:
        raise UnresolvableNu(f"{what}: {exc}") from None


def _build_transition(atlas: ChartAtlas, i: int, j: int) -> TransitionMap:
    reg = atlas.registry
    syms = atlas.chart_symbols(i)
    if i == j:
        return TransitionMap(i, j, {s: GrassmannElement.symbol(reg, s) for s in syms})
    Z = entry_M_prime(atlas, i, j)
    zinv = invert(Z)
    Aj = atlas.label(j)
    unit_j = GrassmannElement.symbol(reg, atlas.unit(j))
    images: dict[SymbolId, GrassmannElement] = {}
    for slot, sym in atlas.label(i).coordinate_symbols():
        a = Aj.entry(slot)
        # the token 1nu of chart j is its local odd unit, so w * 1nu = nu(w) = w nu(1)^(j)
        images[sym] = zinv * unit_j if a is ONE_NU else zinv * a
    images[atlas.unit(i)] = _nu(Z, f"normaliser of chart {i} in chart {j}") * zinv
    images[reg.nu_one] = GrassmannElement.symbol(reg, reg.nu_one)
    # partners by nu-equivariance
    for s in syms:
        if s in images:
            continue
        partner = reg.partner(s)
        if partner not in images:
            raise UnresolvableNu(f"{s.name} has no image and neither has its partner")
        images[s] = _nu(images[partner], f"image of {s.name}")
    return TransitionMap(i, j, images)


def transition(atlas: ChartAtlas, i: int, j: int) -> TransitionMap:
    """g*_{ij}: chart-i symbols written in chart-j symbols."""
    atlas._check(i)
    atlas._check(j)
    return atlas.transition(i, j)


def compose(first: TransitionMap, second: TransitionMap) -> dict:
    """second o first: images of first re-expressed through second."""
    if first.target != second.source:
        raise ValueError("transition maps do not chain")
    return {s: substitute(v, second.images) for s, v in first.images.items()}


def _mismatches(got: dict, want: dict) -> list[str]:
    return [f"{s.name}: {got[s]} != {want[s]}" for s in want if got.get(s) != want[s]]


def verify_gluing(atlas: ChartAtlas, triples: bool = True) -> VerificationReport:
    rep = VerificationReport("verify-gluing", {"m": atlas.m, "n": atlas.n})
    N = atlas.size
    reg = atlas.registry
    for i in range(1, N + 1):
        t0 = time.perf_counter()
        T = transition(atlas, i, i)
        ident = {s: GrassmannElement.symbol(reg, s) for s in atlas.chart_symbols(i)}
        bad = _mismatches(T.images, ident)
        rep.add(f"gluing.identity({i})", not bad, time.perf_counter() - t0, mismatches=bad)
    for i, j in product(range(1, N + 1), repeat=2):
        if i == j:
            continue
        t0 = time.perf_counter()
        ident = {s: GrassmannElement.symbol(reg, s) for s in atlas.chart_symbols(i)}
        bad = _mismatches(compose(transition(atlas, i, j), transition(atlas, j, i)), ident)
        rep.add(f"gluing.pair({i},{j})", not bad, time.perf_counter() - t0,
                symbols=len(ident), mismatches=bad)
    if triples:
        for i, j, k in product(range(1, N + 1), repeat=3):
            if len({i, j, k}) < 3:
                continue
            t0 = time.perf_counter()
            got = compose(transition(atlas, i, j), transition(atlas, j, k))
            bad = _mismatches(got, transition(atlas, i, k).images)
            rep.add(f"gluing.triple({i},{j},{k})", not bad, time.perf_counter() - t0,
                    symbols=len(got), mismatches=bad)
    return rep


# -- the canonical line bundle ---------------------------------------------------------

def line_cocycle(atlas: ChartAtlas, i: int, j: int) -> GrassmannElement:
    """h_ij = nu0^{p(i)+p(j)} (M'_i(A_j))^{-1}, in chart-j symbols."""
    h = invert(entry_M_prime(atlas, i, j))
    if (atlas.p(i) + atlas.p(j)) % 2:
        h = h.times_nu0()
    return h


def random_point(atlas: ChartAtlas, chart: int, rng: random.Random, scale: float = 1.0) -> dict:
    """Complex Gaussian values for the even symbols of one chart."""
    return {s: complex(rng.gauss(0, scale), rng.gauss(0, scale))
            for s in atlas.even_chart_symbols(chart)}


def map_point(atlas: ChartAtlas, point: dict, src: int, dst: int) -> dict:
    """Numeric coordinates in chart ``src`` of a point given in chart ``dst``."""
    T = transition(atlas, src, dst)
    return {s: eval_numeric(v, point).scalar() for s, v in T.even_images().items()}


def verify_line_cocycle(atlas: ChartAtlas, samples: int = 0, seed: int = 0) -> VerificationReport:
    """h_jk h_ik^{-1} h_ij = 1 exactly in chart k, plus an optional numeric cross-check."""
    rep = VerificationReport("verify-cocycle", {"m": atlas.m, "n": atlas.n, "samples": samples,
                                                "seed": seed})
    N = atlas.size
    reg = atlas.registry
    one = GrassmannElement.one(reg)
    rng = random.Random(seed)
    for i, j, k in product(range(1, N + 1), repeat=3):
        t0 = time.perf_counter()
        hij = transition(atlas, j, k).apply(line_cocycle(atlas, i, j))
        prod_ = line_cocycle(atlas, j, k) * invert(line_cocycle(atlas, i, k)) * hij
        details = {"product": str(prod_)}
        ok = prod_ == one
        if samples:
            worst = 0.0
            hjk, hik, hij0 = line_cocycle(atlas, j, k), line_cocycle(atlas, i, k), line_cocycle(atlas, i, j)
            to_j = transition(atlas, j, k).even_images()
            for _ in range(samples):
                pt = random_point(atlas, k, rng)
                ptj = {s: eval_numeric(v, pt).scalar() for s, v in to_j.items()}
                v = eval_numeric(hjk, pt) * eval_numeric(hik, pt).inverse() * eval_numeric(hij0, ptj)
                worst = max(worst, (v - 1).max_abs())
            details["numeric_residual"] = worst
            ok = ok and worst <= 1e-12
        rep.add(f"cocycle({i},{j},{k})", ok, time.perf_counter() - t0, **details)
    return rep


def classical_chart_change(atlas: ChartAtlas, i: int, j: int) -> dict:
    """CP^m chart change from chart j to chart i via homogeneous coordinates."""
    reg = atlas.registry
    m = atlas.m
    H = [Coefficient.symbol(reg, atlas.z(k, j)) for k in range(1, m + 1)]
    H.insert(j - 1, Coefficient.const(reg, 1))
    coords = [H[s] / H[i - 1] for s in range(m + 1) if s != i - 1]
    return {atlas.z(k, i): GrassmannElement.from_coefficient(c) for k, c in enumerate(coords, 1)}


def body_transition_check(atlas: ChartAtlas) -> VerificationReport:
    rep = VerificationReport("body-transition", {"m": atlas.m, "n": atlas.n})
    std = range(1, atlas.m + 2)
    for i, j in product(std, repeat=2):
        if i == j:
            continue
        t0 = time.perf_counter()
        T = transition(atlas, i, j)
        want = classical_chart_change(atlas, i, j)
        got = {s: T[s].body() for s in want}
        bad = _mismatches(got, want)
        rep.add(f"body({i},{j})", not bad, time.perf_counter() - t0, mismatches=bad)
    return rep


def _entry_text(x) -> str:
    if x is ONE_NU:
        return "1nu"
    if x == GrassmannElement.one(x.registry):
        return "1"
    syms = x.free_symbols()
    if len(syms) == 1:
        (s,) = syms
        if x == GrassmannElement.symbol(x.registry, s):
            return s.name
    return str(x)


def format_label(label: ChartLabel) -> str:
    parts = [_entry_text(x) for x in label.entries]
    return "(" + ", ".join(parts[: label.divider]) + " | " + ", ".join(parts[label.divider:]) + ")"
