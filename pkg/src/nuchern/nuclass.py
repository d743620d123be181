"""The exponential map E', its branch-resolved right inverse L, and the nu-class.

Numbers here follow the exponential sequence in the nu-module: a kernel element
``p + q nu(1) nu0`` with half-integer p, q, a log preimage ``f + nu0 g`` where only
the even image ``nu(g)`` matters, and the coboundary ``L(h_jk) - L(h_ik) + L(h_ij)``.
"""
from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

from .atlas import ChartAtlas, entry_M_prime, line_cocycle, map_point, random_point, transition
from .errors import BranchCut, PoleAtPoint, SnapError, ZeroBody
from .forms import (DEFAULT_POLICY, Form, PartitionFamily, TruncationPolicy, dlog, exterior_d,
                    pullback)
from .grassmann import GrassmannElement, invert
from .numeric import (NumericGrassmann, Window, eval_numeric, num_cos_sin, num_exp,
                      numeric_nu)
from .report import VerificationReport
from .symbols import Kind

TWO_PI = 2 * math.pi
SNAP_TOL = 1e-9
CONVENTIONS = ("signed", "literal")


# -- kernel and E' ----------------------------------------------------------------------

@dataclass(frozen=True)
class KernelElement:
    """p + q nu(1) nu0 with p, q half-integers."""

    p: Fraction
    q: Fraction

    def __post_init__(self):
        for v in (self.p, self.q):
            if (2 * Fraction(v)).denominator != 1:
                raise ValueError(f"{v} is not a half-integer")

    def as_tuple(self) -> tuple[Fraction, Fraction]:
        return (Fraction(self.p), Fraction(self.q))

    def __str__(self):
        return f"({self.p}, {self.q})"


def _root_of_unity(t: Fraction) -> complex:
    """exp(2 pi i t) exactly, for t a multiple of 1/4."""
    k = 4 * Fraction(t)
    if k.denominator != 1:
        raise ValueError(f"exp(2 pi i {t}) is not a Gaussian integer")
    return (1, 1j, -1, -1j)[int(k) % 4]


def e_prime_exact(p, q) -> tuple[complex, complex]:
    """E'(p + q nu(1) nu0) as an exact (nu0-free, nu0) pair of Gaussian integers.

    With nu(q nu(1)) = q the value is exp(2 pi i p)(cos 2 pi q + nu0 i sin 2 pi q).
    """
    p, q = Fraction(p), Fraction(q)
    ep, eq = _root_of_unity(p), _root_of_unity(q)
    return (ep * eq.real, ep * 1j * eq.imag)


def e_prime(f: NumericGrassmann, g: NumericGrassmann) -> NumericGrassmann:
    """exp(2 pi i f) (cos(2 pi nu g) + nu0 i sin(2 pi nu g))."""
    if f.parity() == 1:
        raise ValueError("f must be even")
    if g.terms and g.parity() == 0:
        raise ValueError("g must be odd")
    nug = numeric_nu(g) if g.terms else g
    c, s = num_cos_sin(nug * TWO_PI)
    return num_exp(f * (TWO_PI * 1j)) * (c + s.times_nu0() * 1j)


def kernel_numeric(reg, p, q) -> NumericGrassmann:
    f = NumericGrassmann.const(reg, float(p))
    g = NumericGrassmann(reg, {((reg.nu_one.serial,), 0): float(q)})
    return e_prime(f, g)


# -- branch assignments and L ---------------------------------------------------------------

@dataclass(frozen=True)
class BranchAssignment:
    """Argument window per chart; charts not listed use ``default``."""

    default: Window = Window.ZERO_TWO_PI
    regions: tuple = ()

    def window(self, chart: int) -> Window:
        for c, w in self.regions:
            if c == chart:
                return w
        return self.default

    def with_region(self, chart: int, window: Window) -> "BranchAssignment":
        regions = tuple((c, w) for c, w in self.regions if c != chart) + ((chart, window),)
        return BranchAssignment(self.default, tuple(sorted(regions, key=lambda r: r[0])))

    def label(self, charts) -> str:
        return ",".join(f"U{c}:{self.window(c).value}" for c in charts)


@dataclass(frozen=True)
class LogPreimage:
    """f + nu0 g with g = nu_g * nu(1); ``factor`` is the unit put in front of h before the log."""

    f: complex
    nu_g: Fraction
    factor: complex = 1
    window: Window = Window.ZERO_TWO_PI

    def numeric(self, reg, point=None) -> tuple[NumericGrassmann, NumericGrassmann]:
        f = NumericGrassmann.const(reg, self.f, point)
        g = NumericGrassmann(reg, {((reg.nu_one.serial,), 0): float(self.nu_g)}, point)
        return f, g


def orientation(atlas: ChartAtlas, i: int, j: int, convention: str = "signed") -> tuple[complex, Fraction]:
    """(factor, nu g) for L(h_ij).

    Same-type charts need no nu0 part. For mixed pairs the nu0 carried by h_ij is
    absorbed by sin(2 pi nu g) = +-1; ``signed`` flips the sign with the orientation,
    ``literal`` uses (-i, +1/4) for both orientations.
    """
    if convention not in CONVENTIONS:
        raise ValueError(f"unknown convention {convention!r}")
    pi_, pj = atlas.p(i), atlas.p(j)
    if pi_ == pj:
        return 1, Fraction(0)
    if pj == 1 or convention == "literal":
        return -1j, Fraction(1, 4)
    return 1j, Fraction(-1, 4)


def _stripped_value(atlas: ChartAtlas, i: int, j: int, point) -> complex:
    """Numeric value of h_ij with its nu0 factor removed."""
    h = eval_numeric(line_cocycle(atlas, i, j), point)
    b0, b1 = h.body_pair()
    return b1 if (atlas.p(i) + atlas.p(j)) % 2 else b0


def branch_log_L(atlas: ChartAtlas, i: int, j: int, point, branch: BranchAssignment | Window | None = None,
                 convention: str = "signed") -> LogPreimage:
    """L(h_ij) at a chart-j point, using the window assigned to chart j."""
    if branch is None:
        branch = BranchAssignment()
    elif isinstance(branch, Window):
        branch = BranchAssignment(branch)
    win = branch.window(j)
    if i == j:
        return LogPreimage(0j, Fraction(0), 1, win)
    factor, nu_g = orientation(atlas, i, j, convention)
    x = _stripped_value(atlas, i, j, point)
    if x == 0:
        raise ZeroBody(f"h_{i}{j} vanishes at the point")
    f = win.log(factor * x) / (TWO_PI * 1j)
    return LogPreimage(f, nu_g, factor, win)


def right_inverse_error(atlas: ChartAtlas, i: int, j: int, point, branch=None,
                        convention: str = "signed") -> float:
    L = branch_log_L(atlas, i, j, point, branch, convention)
    reg = atlas.registry
    f, g = L.numeric(reg, point)
    back = e_prime(f, g)
    h = eval_numeric(line_cocycle(atlas, i, j), point)
    return back.distance(h)


# -- the coboundary -----------------------------------------------------------------------

@dataclass(frozen=True)
class DeltaEta:
    value: KernelElement
    raw: complex
    residual: float


def snap_half(x: complex, tol: float = SNAP_TOL) -> tuple[Fraction, float]:
    """Nearest half-integer to a (nearly real) number, or SnapError."""
    r = Fraction(round(2 * x.real), 2)
    res = max(abs(x.real - float(r)), abs(x.imag))
    if res > tol:
        raise SnapError(f"{x!r} is {res:.3g} away from a half-integer")
    return r, res


def delta_eta(atlas: ChartAtlas, i: int, j: int, k: int, point, branch: BranchAssignment | None = None,
              convention: str = "signed") -> DeltaEta:
    """(delta eta)_ijk = L(h_jk) - L(h_ik) + L(h_ij), evaluated at a chart-k point."""
    branch = branch or BranchAssignment()
    pj = map_point(atlas, point, j, k) if j != k else point
    a = branch_log_L(atlas, j, k, point, branch, convention)
    b = branch_log_L(atlas, i, k, point, branch, convention)
    c = branch_log_L(atlas, i, j, pj, branch, convention)
    raw = a.f - b.f + c.f
    q = a.nu_g - b.nu_g + c.nu_g
    p, res = snap_half(raw)
    return DeltaEta(KernelElement(p, q), raw, res)


@dataclass
class Cell:
    triple: tuple[int, int, int]
    branch: BranchAssignment
    charts: tuple[int, ...]
    values: dict = field(default_factory=dict)
    residual: float = 0.0
    errors: list = field(default_factory=list)

    @property
    def constant(self) -> bool:
        return len(self.values) == 1 and not self.errors

    @property
    def value(self) -> tuple | None:
        return next(iter(self.values)) if self.constant else None


def region_assignments(charts, default: Window = Window.ZERO_TWO_PI):
    charts = sorted(set(charts))
    for combo in product(list(Window), repeat=len(charts)):
        yield BranchAssignment(default, tuple(zip(charts, combo)))


def sample_cell(atlas: ChartAtlas, triple, branch: BranchAssignment, samples: int, rng: random.Random,
                convention: str = "signed") -> Cell:
    i, j, k = triple
    charts = tuple(sorted({j, k}))
    cell = Cell(tuple(triple), branch, charts)
    for _ in range(samples):
        pt = random_point(atlas, k, rng)
        try:
            d = delta_eta(atlas, i, j, k, pt, branch, convention)
        except (SnapError, BranchCut, PoleAtPoint, ZeroBody) as exc:
            cell.errors.append(f"{type(exc).__name__}: {exc}")
            continue
        key = d.value.as_tuple()
        cell.values[key] = cell.values.get(key, 0) + 1
        cell.residual = max(cell.residual, d.residual)
    return cell


def cell_name(cell: Cell) -> str:
    i, j, k = cell.triple
    return f"delta_eta({i},{j},{k})[{cell.branch.label(cell.charts)}]"


def scan_delta_eta(atlas: ChartAtlas, samples: int = 100, seed: int = 42, convention: str = "signed",
                   triples=None, default: Window = Window.ZERO_TWO_PI) -> VerificationReport:
    """Every triple and every window combination over the charts whose logs are taken."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rep = VerificationReport("nu-class", {"m": atlas.m, "n": atlas.n, "samples": samples,
                                          "seed": seed, "convention": convention})
    N = atlas.size
    triples = list(triples) if triples is not None else list(product(range(1, N + 1), repeat=3))
    for t in triples:
        for branch in region_assignments({t[1], t[2]}, default):
            rng = random.Random(f"{seed}:{t}:{branch.label(sorted({t[1], t[2]}))}")
            t0 = time.perf_counter()
            cell = sample_cell(atlas, t, branch, samples, rng, convention)
            ok = cell.constant and cell.residual <= SNAP_TOL
            details = {"values": {f"({p}, {q})": n for (p, q), n in sorted(cell.values.items())},
                       "residual": cell.residual}
            if cell.constant:
                details["value"] = list(cell.value)
            if cell.errors:
                details["errors"] = cell.errors[:3]
            rep.add(cell_name(cell), ok, time.perf_counter() - t0, **details)
    return rep


def headline_check(atlas: ChartAtlas, samples: int = 100, seed: int = 42, convention: str = "signed",
                   triple=(2, 4, 1), expected=(Fraction(-1, 2), Fraction(0)),
                   default: Window = Window.ZERO_TWO_PI) -> VerificationReport:
    """The worked value on nu-P^{2|1}: delta eta at (2,4,1) with every chart in the default window."""
    rep = VerificationReport("example-p21", {"samples": samples, "seed": seed, "convention": convention})
    t0 = time.perf_counter()
    cell = sample_cell(atlas, triple, BranchAssignment(default), samples,
                       random.Random(f"{seed}:{tuple(triple)}:headline"), convention)
    seen = sorted(cell.values)
    ok = cell.constant and cell.value == tuple(expected) and cell.residual <= SNAP_TOL
    rep.add(f"delta_eta.headline{tuple(triple)}", ok, time.perf_counter() - t0,
            expected=list(expected), observed={f"({p}, {q})": cell.values[(p, q)] for p, q in seen},
            residual=cell.residual, constant=cell.constant)
    return rep


def kernel_checks(reg, bound: Fraction = Fraction(3, 2)) -> VerificationReport:
    """E'(p + q nu(1) nu0) in {+1, -1} for every half-integer p, q in [-bound, bound]."""
    rep = VerificationReport("kernel")
    halves = [Fraction(k, 2) for k in range(int(-2 * bound), int(2 * bound) + 1)]
    for p, q in product(halves, repeat=2):
        t0 = time.perf_counter()
        b0, b1 = e_prime_exact(p, q)
        exact_ok = b1 == 0 and b0 in (1, -1)
        num = kernel_numeric(reg, p, q)
        n0, n1 = num.body_pair()
        err = abs(n0 - b0) + abs(n1 - b1) + sum(abs(v) for (m, _), v in num.terms.items() if m)
        rep.add(f"kernel({p},{q})", exact_ok and err <= 1e-10, time.perf_counter() - t0,
                value=[b0, b1], numeric_error=err)
    return rep


def right_inverse_checks(atlas: ChartAtlas, draws: int = 1000, seed: int = 42, convention: str = "signed",
                         tol: float = 1e-10) -> VerificationReport:
    """E'(L(h_ij)) = h_ij at random (pair, point, window) draws."""
    rep = VerificationReport("right-inverse", {"draws": draws, "seed": seed})
    rng = random.Random(seed)
    N = atlas.size
    worst, n_done, failures = 0.0, 0, []
    t0 = time.perf_counter()
    pairs = [(i, j) for i in range(1, N + 1) for j in range(1, N + 1) if i != j]
    while n_done < draws:
        i, j = rng.choice(pairs)
        win = rng.choice(list(Window))
        pt = random_point(atlas, j, rng)
        try:
            e = right_inverse_error(atlas, i, j, pt, win, convention)
        except (BranchCut, ZeroBody, PoleAtPoint):
            continue
        n_done += 1
        if e > worst:
            worst = e
        if e > tol and len(failures) < 5:
            failures.append({"pair": [i, j], "window": win.value, "error": e})
    rep.add("right_inverse", worst <= tol, time.perf_counter() - t0, draws=n_done, max_error=worst,
            failures=failures)
    return rep


# -- the partition-of-unity connection -------------------------------------------------------

def kappa(reg) -> GrassmannElement:
    """Formal constant standing for 1/(2 pi i); d(kappa) = 0."""
    return GrassmannElement.symbol(reg, reg.get(Kind.CONST, 1))


def dL(atlas: ChartAtlas, i: int, j: int, convention: str = "signed",
       policy: TruncationPolicy = DEFAULT_POLICY) -> Form:
    """d(L(h_ij)) in chart-j symbols: kappa dlog(h_ij) + nu0 nu_g d(nu(1)).

    The constant unit in front of h and the nu0 factor drop out of dlog.
    """
    reg = atlas.registry
    if i == j:
        return Form.zero(reg, policy)
    x = invert(entry_M_prime(atlas, i, j))
    out = dlog(x, policy).scale(kappa(reg))
    _, nu_g = orientation(atlas, i, j, convention)
    if nu_g:
        dnu1 = Form.dsym(reg, reg.nu_one, policy)
        out = out + dnu1.scale(GrassmannElement.nu0(reg).scale(nu_g))
    return out


@dataclass
class ChernForms:
    atlas: ChartAtlas
    partition: PartitionFamily
    convention: str
    omega: dict
    curvature: dict
    dls: dict


def chern_connection_forms(atlas: ChartAtlas, partition: PartitionFamily, convention: str = "signed",
                           policy: TruncationPolicy = DEFAULT_POLICY) -> ChernForms:
    """omega_i = sum_j rho_j d(L(h_ij)) in chart i, and R_i = d(omega_i)."""
    N = atlas.size
    if partition.count != N:
        raise ValueError(f"partition has {partition.count} members for {N} charts")
    dls = {(i, j): dL(atlas, i, j, convention, policy) for i in range(1, N + 1) for j in range(1, N + 1)}
    omega, curv = {}, {}
    for i in range(1, N + 1):
        w = Form.zero(atlas.registry, policy)
        for j in range(1, N + 1):
            if i == j:
                continue
            piece = pullback(dls[(i, j)], transition(atlas, j, i).images)
            w = w + Form.from_element(partition.rho(j), policy) * piece
        omega[i] = w
        curv[i] = exterior_d(w)
    return ChernForms(atlas, partition, convention, omega, curv, dls)


def verify_global_2form(cf: ChernForms) -> VerificationReport:
    atlas = cf.atlas
    rep = VerificationReport("global-2form", {"m": atlas.m, "n": atlas.n, "convention": cf.convention})
    N = atlas.size
    for i in range(1, N + 1):
        t0 = time.perf_counter()
        dR = exterior_d(cf.curvature[i])
        rep.add(f"global.closed({i})", dR.is_zero(), time.perf_counter() - t0)
    for i, j in product(range(1, N + 1), repeat=2):
        if i == j:
            continue
        t0 = time.perf_counter()
        T = transition(atlas, j, i).images
        diff = cf.omega[i] - pullback(cf.omega[j], T) - pullback(cf.dls[(i, j)], T)
        rep.add(f"global.omega_difference({i},{j})", diff.is_zero(), time.perf_counter() - t0,
                residual=str(diff) if not diff.is_zero() else "0")
        t0 = time.perf_counter()
        dR = cf.curvature[i] - pullback(cf.curvature[j], T)
        rep.add(f"global.curvature_overlap({i},{j})", dR.is_zero(), time.perf_counter() - t0,
                residual=str(dR) if not dR.is_zero() else "0")
    return rep
