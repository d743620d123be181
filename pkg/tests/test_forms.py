import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import Pool
from nuchern.errors import BadCount, NonInvertibleBody
from nuchern.forms import Form, TruncationPolicy, dlog, exterior_d, make_partition, pullback, wedge
from nuchern.grassmann import GrassmannElement as G
from nuchern.symbols import Kind

seeds = st.integers(0, 2**32 - 1)


def d(p, s, policy=None):
    return Form.dsym(p.reg, s, policy or TruncationPolicy())


def random_form(p: Pool, rng, max_deg=3, policy=None, parity=None):
    """Sum of coefficient * d-monomials; bihomogeneous when ``parity`` and a single degree are fixed."""
    policy = policy or TruncationPolicy()
    out = Form.zero(p.reg, policy)
    gens = p.z + p.e
    for _ in range(rng.randint(1, 3)):
        deg = rng.randint(0, max_deg)
        mono = Form.from_element(p.element(rng, parity), policy)
        for _ in range(deg):
            mono = wedge(mono, d(p, rng.choice(gens), policy))
        out = out + mono
    return out


def test_wedge_sign_examples(pool):
    dz1, dz2 = d(pool, pool.z[0]), d(pool, pool.z[1])
    de1, de2 = d(pool, pool.e[0]), d(pool, pool.e[1])
    assert wedge(dz1, dz2) == -wedge(dz2, dz1)
    assert wedge(dz1, dz1).is_zero()
    assert not wedge(de1, de1).is_zero()
    assert wedge(de1, de2) == wedge(de2, de1)
    assert wedge(dz1, de1) == -wedge(de1, dz1)


def test_d_examples(pool):
    z1, z2 = pool.sym(pool.z[0]), pool.sym(pool.z[1])
    e1, e2 = pool.sym(pool.e[0]), pool.sym(pool.e[1])
    F = Form.from_element
    assert exterior_d(F(z1 * z2)) == F(z2) * d(pool, pool.z[0]) + F(z1) * d(pool, pool.z[1])
    assert exterior_d(F(e1 * e2)) == d(pool, pool.e[0]) * F(e2) + F(e1) * d(pool, pool.e[1])
    assert exterior_d(exterior_d(F(z1 * e1))).is_zero()


def test_d_of_rational_function(pool):
    z1 = pool.sym(pool.z[0])
    got = exterior_d(Form.from_element(z1.inverse()))
    assert got == Form.from_element(-(z1 * z1).inverse()) * d(pool, pool.z[0])


def test_dlog_examples(pool):
    z1 = pool.sym(pool.z[0])
    assert dlog(z1) == Form.from_element(z1.inverse()) * d(pool, pool.z[0])
    assert dlog(G.const(pool.reg, 5)).is_zero()
    with pytest.raises(NonInvertibleBody):
        dlog(pool.sym(pool.e[0]) * pool.sym(pool.e[1]))


def test_dlog_of_product(pool, rng):
    for _ in range(10):
        h, g = pool.invertible(rng), pool.invertible(rng)
        assert dlog(h * g) == dlog(h) + dlog(g)


def test_partition_family(pool):
    with pytest.raises(BadCount):
        make_partition(pool.reg, 1)
    two = make_partition(pool.reg, 2)
    assert two.rho(2) == G.one(pool.reg) - two.rho(1)
    assert two.drho(2) == -two.drho(1)
    for n in (2, 3, 5):
        fam = make_partition(pool.reg, n)
        assert fam.total() == G.one(pool.reg)
        total = Form.zero(pool.reg)
        for j in range(1, n + 1):
            total = total + fam.drho(j)
        assert total.is_zero()


def test_constants_have_no_differential(pool):
    c = G.symbol(pool.reg, pool.reg.get(Kind.CONST, 1))
    assert exterior_d(Form.from_element(c)).is_zero()


def test_truncation_is_flagged():
    p = Pool()
    pol = TruncationPolicy(2)
    de = d(p, p.e[0], pol)
    f = de * de * de
    assert f.is_zero() and f.truncated


def test_truncation_soundness():
    rng = random.Random(8)
    p = Pool()
    lo, hi = TruncationPolicy(3), TruncationPolicy(5)
    for _ in range(20):
        seed = rng.random()
        a, b = random_form(p, random.Random(seed), policy=lo), random_form(p, random.Random(seed), policy=hi)
        seed = rng.random()
        c, e = random_form(p, random.Random(seed), policy=lo), random_form(p, random.Random(seed), policy=hi)
        x, y = wedge(a, c), wedge(b, e)
        for k in range(4):
            assert x.part(k).terms == y.part(k).terms


def test_pullback_commutes_with_d(pool, rng):
    z1, z2 = pool.z
    for _ in range(10):
        f = Form.from_element(pool.element(rng))
        sigma = {z1: pool.invertible(rng), z2: pool.sym(z1) * pool.sym(z2)}
        assert pullback(exterior_d(f), sigma) == exterior_d(pullback(f, sigma))


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_d_squared_is_zero(seed):
    rng = random.Random(seed)
    p = Pool()
    f = random_form(p, rng)
    assert exterior_d(exterior_d(f)).is_zero()


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_leibniz(seed):
    rng = random.Random(seed)
    p = Pool()
    a = random_form(p, rng, max_deg=0) * wedge(*(d(p, rng.choice(p.z + p.e)) for _ in range(2)))
    if rng.random() < 0.5:
        a = random_form(p, rng, max_deg=0)
    b = random_form(p, rng)
    deg = a.degree()
    sign = -1 if deg % 2 else 1
    assert exterior_d(wedge(a, b)) == wedge(exterior_d(a), b) + wedge(a, exterior_d(b)).scale(sign)


@settings(max_examples=100, deadline=None)
@given(seeds)
def test_sign_rule_double_swap(seed):
    rng = random.Random(seed)
    p = Pool()
    gens = p.z + p.e

    def bihomogeneous():
        f = Form.from_element(p.sym(rng.choice(p.e)) if rng.random() < 0.5 else p.sym(rng.choice(p.z)))
        for _ in range(rng.randint(0, 2)):
            f = wedge(f, d(p, rng.choice(gens)))
        return f

    a, b = bihomogeneous(), bihomogeneous()
    if a.is_zero() or b.is_zero():
        return
    sign = (-1) ** (a.degree() * b.degree() + a.parity() * b.parity())
    assert wedge(a, b) == wedge(b, a).scale(sign)
