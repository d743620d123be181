import cmath
import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import Pool
from nuchern.errors import (BranchCut, DuplicateName, NonInvertibleBody, ParityMismatch, PoleAtPoint,
                            RegistryMismatch, UndefinedNu)
from nuchern.grassmann import GrassmannElement as G
from nuchern.grassmann import arith, body, invert, nu_apply, substitute
from nuchern.numeric import NumericGrassmann, Window, eval_numeric, exp_log_numeric
from nuchern.symbols import Kind, Registry, register_symbol

seeds = st.integers(0, 2**32 - 1)
hundred = settings(max_examples=100, deadline=None)


def test_register_symbol_parity_and_uniqueness():
    reg = Registry()
    z = register_symbol(reg, "z1", Kind.Z, chart=1)
    e = register_symbol(reg, "e1", Kind.E, chart=1)
    assert (z.parity, e.parity) == (0, 1)
    assert reg.get(Kind.NU_E, 1).parity == 0
    assert reg.get(Kind.NU_Z, 1).parity == 1
    assert reg.nu_one.parity == 1
    with pytest.raises(DuplicateName):
        register_symbol(reg, "z1", Kind.Z, chart=1)


def test_arith_examples(pool):
    e1, e2 = pool.sym(pool.e[0]), pool.sym(pool.e[1])
    assert e1 * e2 == -(e2 * e1)
    assert (e1 * e1).is_zero()
    nu0 = G.nu0(pool.reg)
    assert nu0 * nu0 == G.one(pool.reg)
    s = arith("add", G.const(pool.reg, 2) + e1 * e2, G.const(pool.reg, 3) - e1 * e2)
    assert s == G.const(pool.reg, 5)


def test_registry_mismatch(pool):
    other = Pool()
    with pytest.raises(RegistryMismatch):
        pool.sym(pool.z[0]) + other.sym(other.z[0])


def test_body_examples(pool):
    z1, e1, e2 = pool.sym(pool.z[0]), pool.sym(pool.e[0]), pool.sym(pool.e[1])
    assert body(G.const(pool.reg, 2) + e1 * e2) == G.const(pool.reg, 2)
    assert body(e1).is_zero()
    nu0 = G.nu0(pool.reg)
    assert body(z1 + z1 * e1 * e2 + nu0.scale(3)) == z1 + nu0.scale(3)


def test_invert_examples(pool):
    z1, e1, e2 = pool.sym(pool.z[0]), pool.sym(pool.e[0]), pool.sym(pool.e[1])
    got = invert(G.const(pool.reg, 2) + e1 * e2)
    assert got == G.const(pool.reg, Fraction(1, 2)) - (e1 * e2).scale(Fraction(1, 4))
    assert invert(z1) * z1 == G.one(pool.reg)
    with pytest.raises(NonInvertibleBody):
        invert(e1)


def test_invert_with_nu0_body(pool):
    x = G.const(pool.reg, 3) + G.nu0(pool.reg) + pool.sym(pool.e[0]) * pool.sym(pool.e[1])
    assert x * invert(x) == G.one(pool.reg)
    with pytest.raises(NonInvertibleBody):
        invert(G.one(pool.reg) + G.nu0(pool.reg))


def test_nu_apply_examples(pool):
    reg = pool.reg
    e1, e2, z1 = pool.sym(pool.e[0]), pool.sym(pool.e[1]), pool.sym(pool.z[0])
    nue1 = G.symbol(reg, reg.partner(pool.e[0]))
    assert nu_apply(e1) == nue1
    assert nu_apply(nue1) == e1
    assert nu_apply(G.one(reg)) == G.symbol(reg, reg.nu_one)
    assert nu_apply(G.symbol(reg, reg.nu_one)) == G.one(reg)
    assert nu_apply(z1 * e1) == z1 * nue1
    with pytest.raises(UndefinedNu):
        nu_apply(e1 * e2)


def test_substitute_examples():
    reg = Registry()
    z1, w = reg.get(Kind.Z, 1), reg.get(Kind.Z, 2)
    e1, e2 = reg.get(Kind.E, 1), reg.get(Kind.E, 2)
    Z, W = G.symbol(reg, z1), G.symbol(reg, w)
    n = G.symbol(reg, e1) * G.symbol(reg, e2)
    assert substitute(Z * Z, {z1: W + n}) == W * W + (W * n).scale(2)
    quarter = G.const(reg, Fraction(1, 2)) - n.scale(Fraction(1, 4))
    assert substitute(invert(Z), {z1: G.const(reg, 2) + n}) == quarter
    with pytest.raises(ParityMismatch):
        substitute(Z, {z1: G.symbol(reg, e1)})
    assert substitute(Z * n, {}) == Z * n


def test_eval_numeric_examples(pool):
    reg = pool.reg
    z1 = pool.z[0]
    v = eval_numeric(invert(pool.sym(z1)), {z1: 2j})
    assert abs(v.scalar() - (-0.5j)) < 1e-15
    e = eval_numeric(pool.sym(pool.e[0]), {})
    assert e.terms == {((pool.e[0].serial,), 0): 1}
    with pytest.raises(PoleAtPoint):
        eval_numeric(invert(pool.sym(z1)), {z1: 0})
    assert reg is v.registry


def test_exp_log_examples():
    reg = Registry()
    x = NumericGrassmann.const(reg, 1j * math.pi)
    assert abs(exp_log_numeric("exp", x).scalar() + 1) < 1e-15
    lg = exp_log_numeric("log", NumericGrassmann.const(reg, -1), Window.ZERO_TWO_PI)
    assert abs(lg.scalar() - 1j * math.pi) < 1e-15
    with pytest.raises(BranchCut):
        exp_log_numeric("log", NumericGrassmann.const(reg, 2), Window.ZERO_TWO_PI)
    with pytest.raises(BranchCut):
        exp_log_numeric("log", NumericGrassmann.const(reg, -2), Window.MINUS_PI_PI)


def test_exp_log_round_trip_with_nilpotent_part(pool):
    rng = random.Random(5)
    for _ in range(50):
        x = eval_numeric(pool.invertible(rng) + pool.element(rng, 0).nilpotent(),
                         {s: complex(rng.gauss(0, 1), rng.gauss(0, 1)) for s in pool.z})
        for w in Window:
            try:
                back = exp_log_numeric("exp", exp_log_numeric("log", x, w))
            except BranchCut:
                continue
            assert back.distance(x) <= 1e-12 * max(1.0, x.max_abs())


def test_window_args():
    assert Window.ZERO_TWO_PI.arg(-1j) == pytest.approx(1.5 * math.pi)
    assert Window.MINUS_PI_PI.arg(-1j) == pytest.approx(-0.5 * math.pi)
    assert Window.parse("-pi-pi") is Window.MINUS_PI_PI
    assert Window.ZERO_TWO_PI.log(1j) == cmath.log(1j)


# -- randomized properties, 100 exact trials each ------------------------------------


@hundred
@given(seeds)
def test_supercommutativity(seed):
    rng = random.Random(seed)
    p = Pool()
    x, y = p.element(rng), p.element(rng)
    sign = -1 if x.parity() == y.parity() == 1 else 1
    assert x * y == (y * x).scale(sign)


@hundred
@given(seeds)
def test_associativity_distributivity(seed):
    rng = random.Random(seed)
    p = Pool()
    x, y, z = p.element(rng), p.element(rng), p.element(rng)
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z


@hundred
@given(seeds)
def test_nu0_central(seed):
    rng = random.Random(seed)
    p = Pool()
    x = p.element(rng)
    nu0 = G.nu0(p.reg)
    assert nu0 * x == x * nu0
    assert x.times_nu0().times_nu0() == x


@hundred
@given(seeds)
def test_invert_two_sided(seed):
    rng = random.Random(seed)
    p = Pool()
    x = p.invertible(rng)
    one = G.one(p.reg)
    assert x * invert(x) == one
    assert invert(x) * x == one


@hundred
@given(seeds)
def test_nu_squared_is_identity(seed):
    rng = random.Random(seed)
    p = Pool()
    x = G.zero(p.reg)
    for s in rng.sample(p.e, rng.randint(1, len(p.e))):
        x = x + p.coeff(rng) * p.sym(s)
    if rng.random() < 0.3:
        x = x.times_nu0()
    assert nu_apply(nu_apply(x)) == x


@hundred
@given(seeds)
def test_substitute_is_a_morphism(seed):
    rng = random.Random(seed)
    p = Pool()
    x, y = p.element(rng), p.element(rng)
    sigma = {p.z[0]: p.invertible(rng), p.z[1]: p.element(rng, 0, nu0=False),
             p.e[0]: p.element(rng, 1, nu0=False), p.e[1]: p.sym(p.e[2])}
    assert substitute(x * y, sigma) == substitute(x, sigma) * substitute(y, sigma)
    assert substitute(x + y, sigma) == substitute(x, sigma) + substitute(y, sigma)


@hundred
@given(seeds)
def test_eval_numeric_is_a_ring_morphism(seed):
    rng = random.Random(seed)
    p = Pool()
    x, y = p.element(rng), p.element(rng)
    pt = {s: complex(rng.gauss(0, 1), rng.gauss(0, 1)) for s in p.z}
    lhs = eval_numeric(x * y, pt)
    rhs = eval_numeric(x, pt) * eval_numeric(y, pt)
    assert lhs.distance(rhs) <= 1e-12 * max(1.0, rhs.max_abs())
