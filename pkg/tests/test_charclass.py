import pytest

from nuchern.charclass import (ber_series, from_potentials, gauge_checks, lift, matrix_connection,
                               matrix_curvature, newton_check, series_variable, str_powers, synth_cocycle,
                               three_sum, verify_bianchi, z_coefficient)
from nuchern.errors import BadDimensions, DimensionMismatch, TruncationOverflow
from nuchern.forms import Form, TruncationPolicy, make_partition, wedge
from nuchern.grassmann import GrassmannElement as G
from nuchern.supermatrix import SuperMatrix, sm_inverse, sm_mul
from nuchern.symbols import Kind, Registry


@pytest.fixture(scope="module")
def small():
    coc = synth_cocycle(1, 1, 2, seed=3)
    part = make_partition(coc.registry, 2)
    omegas = matrix_connection(coc, part)
    curvs = {a: matrix_curvature(w) for a, w in omegas.items()}
    return coc, part, omegas, curvs


def identity(coc):
    return SuperMatrix.identity(coc.dims, G.one(coc.registry))


def test_cocycle_identities():
    coc = synth_cocycle(2, 1, 3, seed=7)
    I = identity(coc)
    assert coc.h(1, 2) * coc.h(2, 3) * coc.h(3, 1) == I
    for a in range(1, 4):
        for b in range(1, 4):
            for c in range(1, 4):
                assert coc.h(a, b) * coc.h(b, c) == coc.h(a, c)


def test_synth_is_deterministic():
    a, b = synth_cocycle(2, 1, 3, seed=7), synth_cocycle(2, 1, 3, seed=7)
    from nuchern.sexpr import format_matrix
    assert [format_matrix(s) for s in a.potentials] == [format_matrix(s) for s in b.potentials]
    c = synth_cocycle(2, 1, 3, seed=8)
    assert [format_matrix(s) for s in a.potentials] != [format_matrix(s) for s in c.potentials]


def test_synth_bad_dimensions():
    with pytest.raises(BadDimensions):
        synth_cocycle(0, 1, 2, 1)
    with pytest.raises(BadDimensions):
        synth_cocycle(1, 1, 1, 1)


def test_scalar_case():
    coc = synth_cocycle(1, 0, 2, seed=4)
    s1, s2 = coc.potentials[0][0, 0], coc.potentials[1][0, 0]
    assert coc.h(1, 2)[0, 0] == s1 * s2.inverse()
    part = make_partition(coc.registry, 2)
    from nuchern.forms import dlog
    w = matrix_connection(coc, part)[1][0, 0]
    want = Form.from_element(part.rho(2)) * dlog(coc.h(1, 2)[0, 0])
    assert w == want


def test_one_chart_is_flat():
    coc = synth_cocycle(2, 1, 2, seed=5)
    one = from_potentials(coc.potentials[:1])
    w = matrix_connection(one, None)[1]
    assert w.is_zero()
    R = matrix_curvature(w)
    assert R.is_zero()
    assert verify_bianchi(w, R).passed
    c = ber_series(R, 3)
    assert c[0] == Form.from_element(G.one(coc.registry)) and all(x.is_zero() for x in c[1:])


def test_partition_count_mismatch():
    coc = synth_cocycle(1, 1, 3, seed=1)
    with pytest.raises(DimensionMismatch):
        matrix_connection(coc, make_partition(coc.registry, 2))


def test_three_sum_and_bianchi(small):
    coc, part, omegas, curvs = small
    for a in (1, 2):
        assert curvs[a] == three_sum(coc, part, a)
        assert verify_bianchi(omegas[a], curvs[a]).passed


def test_gauge(small):
    coc, _, omegas, curvs = small
    rep = gauge_checks(coc, omegas, curvs)
    assert rep.passed, rep.to_text()


def test_gauge_with_nu0_weights():
    coc = synth_cocycle(1, 1, 2, seed=3, nu0_weights=True)
    part = make_partition(coc.registry, 2)
    omegas = matrix_connection(coc, part)
    curvs = {a: matrix_curvature(w) for a, w in omegas.items()}
    assert gauge_checks(coc, omegas, curvs, kmax=2).passed


def test_newton_and_series(small):
    _, _, _, curvs = small
    R = curvs[1]
    rep = newton_check(R, 3)
    assert rep.passed, rep.to_text()
    c = ber_series(R, 3)
    s = str_powers(R, 3)
    assert c[2].scale(2) == wedge(s[0], c[1]) - s[1]


def test_series_of_diagonal_1_1():
    reg = Registry()
    x1, x2 = reg.get(Kind.Z, 1), reg.get(Kind.Z, 2)
    r = wedge(Form.dsym(reg, x1), Form.dsym(reg, x2))
    zero = Form.zero(reg)
    R = SuperMatrix((1, 1), (1, 1), [[r, zero], [zero, zero]], 0)
    c = ber_series(R, 2)
    assert c[0] == Form.from_element(G.one(reg))
    assert c[1] == r
    assert c[2].is_zero()


def test_series_of_zero():
    reg = Registry()
    R = SuperMatrix.zero((2, 1), (2, 1), Form.zero(reg))
    c = ber_series(R, 3)
    assert c[0] == Form.from_element(G.one(reg)) and all(x.is_zero() for x in c[1:])


def test_truncation_overflow(small):
    _, _, _, curvs = small
    with pytest.raises(TruncationOverflow):
        ber_series(curvs[1], 4)
    low = synth_cocycle(1, 1, 2, seed=3)
    omegas = matrix_connection(low, make_partition(low.registry, 2), TruncationPolicy(2))
    with pytest.raises(TruncationOverflow):
        verify_bianchi(omegas[1], matrix_curvature(omegas[1]), kmax=2)


def test_z_coefficient_extracts_powers():
    reg = Registry()
    z = series_variable(reg)
    Z = G.symbol(reg, z)
    x = G.symbol(reg, reg.get(Kind.Z, 1))
    f = Form.from_element(G.one(reg) + Z.scale(3) * x + Z * Z)
    assert z_coefficient(f, z, 1) == Form.from_element(x.scale(3))
    assert z_coefficient(f, z, 2) == Form.from_element(G.one(reg))


def test_lift_keeps_inverse(small):
    coc = small[0]
    h = coc.h(1, 2)
    assert sm_mul(lift(h), lift(sm_inverse(h))) == identity(coc).map(Form.from_element)
