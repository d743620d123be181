"""Supermatrix connections, curvature and characteristic forms of a k|l cocycle.

The cocycle is generated from per-chart potentials, h^{ab} = s_a s_b^{-1}, over a
shared set of coordinates: every identity checked here (gauge law, Bianchi,
closedness of Str R^k, the Berezinian series and Newton's recursion) only uses the
cocycle property.
"""
from __future__ import annotations

import math
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import BadDimensions, DimensionMismatch, TruncationOverflow
from .forms import DEFAULT_POLICY, Form, PartitionFamily, TruncationPolicy, exterior_d
from .grassmann import GrassmannElement
from .numeric import NumericGrassmann
from .report import VerificationReport
from .supermatrix import SuperMatrix, berezinian, sm_inverse, sm_mul, supertrace
from .symbols import Kind, Registry

G = GrassmannElement


@dataclass
class SyntheticCocycle:
    registry: Registry
    k: int
    l: int
    potentials: list
    parities: tuple = ()
    nu0_weights: bool = False
    coordinates: tuple = ()
    _h: dict = field(default_factory=dict, repr=False)

    @property
    def charts(self) -> int:
        return len(self.potentials)

    @property
    def dims(self) -> tuple[int, int]:
        return (self.k, self.l)

    def h(self, a: int, b: int) -> SuperMatrix:
        """h^{ab} = nu0^{p(a)+p(b)} s_a s_b^{-1} (charts numbered from 1)."""
        key = (a, b)
        if key not in self._h:
            s_a, s_b = self.potentials[a - 1], self.potentials[b - 1]
            m = sm_mul(s_a, sm_inverse(s_b))
            if self.nu0_weights and (self.parities[a - 1] + self.parities[b - 1]) % 2:
                m = m.map(lambda x: x.times_nu0())
            self._h[key] = m
        return self._h[key]


def _shared_coordinates(reg: Registry):
    xs = [reg.get(Kind.Z, i) for i in (1, 2)]
    ths = [reg.get(Kind.E, i) for i in (1, 2)]
    return xs, ths


def _rand_int(rng: random.Random, lo=-3, hi=3, nonzero=False) -> int:
    while True:
        v = rng.randint(lo, hi)
        if v or not nonzero:
            return v


def _random_potential(reg: Registry, k: int, l: int, rng: random.Random) -> SuperMatrix:
    """Triangular even blocks with constant nonzero diagonal bodies, so inverses stay polynomial."""
    (x1, x2), (t1, t2) = _shared_coordinates(reg)
    X1, X2 = G.symbol(reg, x1), G.symbol(reg, x2)
    T1, T2 = G.symbol(reg, t1), G.symbol(reg, t2)
    one = G.one(reg)

    def c(v):
        return one.scale(v)

    def quad():
        return (c(_rand_int(rng)) + X1 * c(_rand_int(rng)) + X2 * c(_rand_int(rng))
                + X1 * X2 * c(_rand_int(rng)))

    def diag():
        return c(_rand_int(rng, 1, 3)) + T1 * T2 * (c(_rand_int(rng)) + X1 * c(_rand_int(rng)))

    def odd():
        return T1 * (c(_rand_int(rng)) + X1 * c(_rand_int(rng))) + T2 * X2 * c(_rand_int(rng))

    n = k + l
    rows = [[G.zero(reg) for _ in range(n)] for _ in range(n)]
    for a in range(n):
        for b in range(n):
            even_block = (a < k) == (b < k)
            if not even_block:
                rows[a][b] = odd()
            elif a == b:
                rows[a][b] = diag()
            elif a > b:
                rows[a][b] = quad()
    return SuperMatrix((k, l), (k, l), rows, 0, proto=one)


def synth_cocycle(k: int, l: int, charts: int, seed: int, registry: Registry | None = None,
                  nu0_weights: bool = False, parities=None) -> SyntheticCocycle:
    if k < 1 or l < 0 or charts < 2:
        raise BadDimensions(f"need k >= 1, l >= 0, charts >= 2; got k={k}, l={l}, charts={charts}")
    reg = registry or Registry()
    xs, ths = _shared_coordinates(reg)
    pots = [_random_potential(reg, k, l, random.Random(f"{seed}:{a}")) for a in range(charts)]
    if parities is None:
        parities = tuple(a % 2 for a in range(charts))
    return SyntheticCocycle(reg, k, l, pots, tuple(parities), nu0_weights, tuple(xs + ths))


def from_potentials(potentials, nu0_weights: bool = False, parities=None) -> SyntheticCocycle:
    s0 = potentials[0]
    reg = s0.proto.registry
    k, l = s0.row_dims
    parities = tuple(parities) if parities is not None else (0,) * len(potentials)
    return SyntheticCocycle(reg, k, l, list(potentials), parities, nu0_weights)


# -- form-valued matrices ------------------------------------------------------------

def lift(M: SuperMatrix, policy: TruncationPolicy = DEFAULT_POLICY) -> SuperMatrix:
    return M.map(lambda x: Form.from_element(x, policy))


def d_matrix(M: SuperMatrix) -> SuperMatrix:
    return M.map(exterior_d)


def _zero_forms(reg, dims, policy) -> SuperMatrix:
    return SuperMatrix.zero(dims, dims, Form.zero(reg, policy))


def _rho_form(partition: PartitionFamily | None, b: int, reg, policy) -> Form:
    if partition is None:
        return Form.from_element(G.one(reg), policy)
    return Form.from_element(partition.rho(b), policy)


def _check_partition(cocycle: SyntheticCocycle, partition):
    n = 1 if partition is None else partition.count
    if n != cocycle.charts:
        raise DimensionMismatch(f"partition has {n} members for {cocycle.charts} charts")


def matrix_connection(cocycle: SyntheticCocycle, partition: PartitionFamily | None,
                      policy: TruncationPolicy = DEFAULT_POLICY) -> dict:
    """omega^a = sum_b rho_b d(h^{ab}) h^{ba}."""
    _check_partition(cocycle, partition)
    reg = cocycle.registry
    out = {}
    for a in range(1, cocycle.charts + 1):
        w = _zero_forms(reg, cocycle.dims, policy)
        for b in range(1, cocycle.charts + 1):
            term = d_matrix(lift(cocycle.h(a, b), policy)) * lift(cocycle.h(b, a), policy)
            w = w + term.map(lambda x, r=_rho_form(partition, b, reg, policy): r * x)
        out[a] = w
    return out


def _overflow(M: SuperMatrix, what: str):
    if any(x.truncated for row in M.rows for x in row):
        raise TruncationOverflow(f"{what} exceeds the truncation degree")


def matrix_curvature(omega: SuperMatrix) -> SuperMatrix:
    """R = d(omega) - omega ^ omega."""
    R = d_matrix(omega) - omega * omega
    _overflow(R, "curvature")
    return R


def three_sum(cocycle: SyntheticCocycle, partition: PartitionFamily | None, a: int,
              policy: TruncationPolicy = DEFAULT_POLICY) -> SuperMatrix:
    """sum drho_b dh^{ab} h^{ba} - sum rho_b dh^{ab} dh^{ba} - (sum rho_b dh^{ab} h^{ba})^2."""
    reg = cocycle.registry
    N = cocycle.charts
    s1 = _zero_forms(reg, cocycle.dims, policy)
    s2 = _zero_forms(reg, cocycle.dims, policy)
    pieces = []
    for b in range(1, N + 1):
        dh = d_matrix(lift(cocycle.h(a, b), policy))
        hb = lift(cocycle.h(b, a), policy)
        rho = _rho_form(partition, b, reg, policy)
        drho = exterior_d(rho)
        s1 = s1 + (dh * hb).map(lambda x: drho * x)
        s2 = s2 + (dh * d_matrix(hb)).map(lambda x: rho * x)
        pieces.append((dh * hb).map(lambda x: rho * x))
    s3 = _zero_forms(reg, cocycle.dims, policy)
    for p in pieces:
        for q in pieces:
            s3 = s3 + p * q
    return s1 - s2 - s3


def commutator(X: SuperMatrix, Y: SuperMatrix) -> SuperMatrix:
    return X * Y - Y * X


def matrix_power(M: SuperMatrix, k: int) -> SuperMatrix:
    out = M
    for _ in range(k - 1):
        out = out * M
    return out


def str_powers(R: SuperMatrix, kmax: int) -> list[Form]:
    """[Str(R^1), ..., Str(R^kmax)]."""
    out, P = [], None
    for _ in range(kmax):
        P = R if P is None else P * R
        out.append(supertrace(P))
    return out


def _policy_of(M: SuperMatrix) -> TruncationPolicy:
    return M.proto.policy


def verify_bianchi(omega: SuperMatrix, R: SuperMatrix, kmax: int = 3, name: str = "",
                   powers: list | None = None) -> VerificationReport:
    rep = VerificationReport("bianchi")
    t0 = time.perf_counter()
    diff = d_matrix(R) - commutator(omega, R)
    rep.add(f"bianchi{name}", diff.is_zero(), time.perf_counter() - t0)
    if 2 * kmax > _policy_of(R).max_degree:
        raise TruncationOverflow(f"Str(R^{kmax}) needs degree {2 * kmax}")
    for k, s in enumerate(powers or str_powers(R, kmax), 1):
        t0 = time.perf_counter()
        rep.add(f"closed.str_power{name}(k={k})", exterior_d(s).is_zero(), time.perf_counter() - t0)
    return rep


# -- gauge behaviour ------------------------------------------------------------------

def gauge_checks(cocycle: SyntheticCocycle, omegas: dict, curvs: dict, kmax: int = 3,
                 powers: dict | None = None) -> VerificationReport:
    """Gauge laws for omega and R; Str(R^k) compared chart against chart."""
    rep = VerificationReport("gauge")
    policy = _policy_of(curvs[1])
    N = cocycle.charts
    powers = powers or {a: str_powers(R, kmax) for a, R in curvs.items()}
    for a2 in range(1, N + 1):
        for a in range(1, N + 1):
            if a == a2:
                continue
            h = lift(cocycle.h(a2, a), policy)
            hinv = lift(cocycle.h(a, a2), policy)
            t0 = time.perf_counter()
            want = d_matrix(h) * hinv + h * omegas[a] * hinv
            rep.add(f"gauge.connection({a2},{a})", omegas[a2] == want, time.perf_counter() - t0)
            t0 = time.perf_counter()
            conj = h * curvs[a] * hinv
            rep.add(f"gauge.curvature({a2},{a})", curvs[a2] == conj, time.perf_counter() - t0)
            t0 = time.perf_counter()
            ok = all(x == y for x, y in zip(powers[a2], powers[a]))
            rep.add(f"gauge.str_powers({a2},{a})", ok, time.perf_counter() - t0)
    return rep


# -- Berezinian series ------------------------------------------------------------------

def series_variable(reg: Registry):
    """The formal commuting variable z (a constant symbol: dz = 0)."""
    return reg.get(Kind.CONST, 2)


def z_coefficient(f: Form, z, k: int) -> Form:
    def pick(x: GrassmannElement) -> GrassmannElement:
        return GrassmannElement(x.registry, {key: c.z_coefficient(z, k) for key, c in x.terms.items()})
    return Form(f.registry, {m: pick(x) for m, x in f.terms.items()}, f.policy, f.truncated)


def _check_kmax(R: SuperMatrix, kmax: int):
    if 2 * kmax > _policy_of(R).max_degree:
        raise TruncationOverflow(f"c_{kmax} needs degree {2 * kmax} > truncation "
                                 f"{_policy_of(R).max_degree}")


def ber_series(R: SuperMatrix, kmax: int, z=None) -> list[Form]:
    """c_0..c_kmax with Ber(I + zR) = sum c_k z^k."""
    _check_kmax(R, kmax)
    reg = R.proto.registry
    z = z or series_variable(reg)
    zf = Form.from_element(G.symbol(reg, z), _policy_of(R))
    M = SuperMatrix.identity(R.row_dims, R.proto) + R.map(lambda x: zf * x)
    B = berezinian(M)
    return [z_coefficient(B, z, k) for k in range(kmax + 1)]


def exp_str_log(R: SuperMatrix, kmax: int, z=None, powers: list | None = None) -> list[Form]:
    """z-coefficients of exp(Str log(I + zR)) through z^kmax."""
    _check_kmax(R, kmax)
    reg = R.proto.registry
    z = z or series_variable(reg)
    policy = _policy_of(R)
    zg = G.symbol(reg, z)
    S = Form.zero(reg, policy)
    for n, s in enumerate(powers or str_powers(R, kmax), 1):
        S = S + s.scale(zg ** n if n > 1 else zg).scale(Fraction((-1) ** (n + 1), n))
    E = Form.from_element(G.one(reg), policy)
    P = E
    for m in range(1, kmax + 1):
        P = P * S
        E = E + P.scale(Fraction(1, math.factorial(m)))
    return [z_coefficient(E, z, k) for k in range(kmax + 1)]


def newton_check(R: SuperMatrix, kmax: int = 3, name: str = "", powers: list | None = None) -> VerificationReport:
    """(k+1) c_{k+1} = sum_{i=1}^{k+1} (-1)^{i-1} s_i c_{k+1-i}, c_0 = 1, d c_k = 0."""
    rep = VerificationReport("newton")
    t0 = time.perf_counter()
    c = ber_series(R, kmax)
    t_ber = time.perf_counter() - t0
    s = powers or str_powers(R, kmax)
    one = Form.from_element(G.one(R.proto.registry), _policy_of(R))
    rep.add(f"ber_series.c0{name}", c[0] == one, t_ber)
    rep.add(f"newton.c1_equals_s1{name}", c[1] == s[0])
    for k in range(kmax):
        t0 = time.perf_counter()
        rhs = Form.zero(R.proto.registry, _policy_of(R))
        for i in range(1, k + 2):
            term = s[i - 1] * c[k + 1 - i]
            rhs = rhs + (term if i % 2 else -term)
        rep.add(f"newton{name}(k+1={k + 1})", c[k + 1].scale(k + 1) == rhs, time.perf_counter() - t0)
    for k in range(1, kmax + 1):
        rep.add(f"closed.ber_coefficient{name}(k={k})", exterior_d(c[k]).is_zero())
    t0 = time.perf_counter()
    e = exp_str_log(R, kmax, powers=s)
    bad = [k for k in range(kmax + 1) if e[k] != c[k]]
    rep.add(f"ber_series.exp_str_log{name}", not bad, time.perf_counter() - t0, mismatched=bad)
    return rep


# -- numeric Berezinian ----------------------------------------------------------------------

def random_numeric_supermatrix(reg: Registry, k: int, l: int, rng: random.Random, odd_gens) -> SuperMatrix:
    """Even k|l matrix with complex bodies and random nilpotent parts in the given odd generators."""
    gens = [g.serial for g in odd_gens]

    def cx():
        return complex(rng.gauss(0, 1), rng.gauss(0, 1))

    def even():
        terms = {((), 0): cx()}
        for a in range(len(gens)):
            for b in range(a + 1, len(gens)):
                terms[((gens[a], gens[b]), 0)] = cx() * 0.5
        return NumericGrassmann(reg, terms)

    def odd():
        return NumericGrassmann(reg, {((g,), 0): cx() for g in gens})

    n = k + l
    rows = [[even() if (a < k) == (b < k) else odd() for b in range(n)] for a in range(n)]
    return SuperMatrix((k, l), (k, l), rows, 0, proto=NumericGrassmann.const(reg, 1))


def ber_multiplicativity(trials: int = 200, seed: int = 42, k: int = 2, l: int = 1,
                         tol: float = 1e-9) -> VerificationReport:
    rep = VerificationReport("ber-multiplicativity", {"trials": trials, "seed": seed})
    reg = Registry()
    gens = [reg.get(Kind.E, i, 0) for i in range(1, 5)]
    rng = random.Random(seed)
    worst = 0.0
    t0 = time.perf_counter()
    for _ in range(trials):
        X = random_numeric_supermatrix(reg, k, l, rng, gens)
        Y = random_numeric_supermatrix(reg, k, l, rng, gens)
        lhs = berezinian(sm_mul(X, Y))
        rhs = berezinian(X) * berezinian(Y)
        rel = lhs.distance(rhs) / max(rhs.max_abs(), 1e-300)
        worst = max(worst, rel)
    rep.add("ber_multiplicativity", worst <= tol, time.perf_counter() - t0, max_relative_error=worst,
            trials=trials)
    return rep


# -- the full suite ----------------------------------------------------------------------------

def curvature_suite(k: int = 2, l: int = 1, charts: int = 3, seed: int = 42, max_degree: int = 6,
                    kmax: int = 3, numeric_trials: int = 200, nu0_weights: bool = False) -> VerificationReport:
    from .forms import make_partition

    policy = TruncationPolicy(max_degree)
    rep = VerificationReport("curvature", {"k": k, "l": l, "charts": charts, "seed": seed,
                                           "max_degree": max_degree})
    coc = synth_cocycle(k, l, charts, seed, nu0_weights=nu0_weights)
    reg = coc.registry
    t0 = time.perf_counter()
    ok = True
    for a in range(1, charts + 1):
        for b in range(1, charts + 1):
            for c in range(1, charts + 1):
                prod = coc.h(a, b) * coc.h(b, c)
                ok &= prod == coc.h(a, c)
    rep.add("cocycle.products", ok, time.perf_counter() - t0)
    part = make_partition(reg, charts)
    t0 = time.perf_counter()
    omegas = matrix_connection(coc, part, policy)
    curvs = {a: matrix_curvature(w) for a, w in omegas.items()}
    powers = {a: str_powers(R, kmax) for a, R in curvs.items()}
    rep.add("connection.built", True, time.perf_counter() - t0)
    for a in range(1, charts + 1):
        t0 = time.perf_counter()
        rep.add(f"curvature.three_sum({a})", curvs[a] == three_sum(coc, part, a, policy),
                time.perf_counter() - t0)
        rep.extend(verify_bianchi(omegas[a], curvs[a], kmax, name=f"({a})", powers=powers[a]))
        rep.extend(newton_check(curvs[a], kmax, name=f"({a})", powers=powers[a]))
    rep.extend(gauge_checks(coc, omegas, curvs, kmax, powers))
    c1 = ber_series(curvs[1], kmax)
    for a in range(2, charts + 1):
        ca = ber_series(curvs[a], kmax)
        rep.add(f"gauge.ber_series(1,{a})", all(x == y for x, y in zip(c1, ca)))
    if numeric_trials:
        rep.extend(ber_multiplicativity(numeric_trials, seed, k, l))
    return rep
