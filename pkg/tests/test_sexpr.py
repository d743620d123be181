import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import Pool
from nuchern.atlas import build_atlas, line_cocycle
from nuchern.charclass import matrix_connection, matrix_curvature, synth_cocycle
from nuchern.errors import ParseError
from nuchern.forms import Form, exterior_d, make_partition
from nuchern.grassmann import GrassmannElement as G
from nuchern.sexpr import (format_element, format_form, format_label, format_matrix, parse_element,
                           parse_form, parse_label, parse_matrix, parse_value)
from nuchern.symbols import Kind, Registry


def test_documented_example():
    reg = Registry()
    x = parse_element("(+ (* 1/2 (e 1) (e 2)) (* nu0 (z 1)))", reg)
    e1, e2 = G.symbol(reg, reg.get(Kind.E, 1)), G.symbol(reg, reg.get(Kind.E, 2))
    z1 = G.symbol(reg, reg.get(Kind.Z, 1))
    assert x == (e1 * e2).scale(Fraction(1, 2)) + z1.times_nu0()
    assert parse_element(format_element(x), reg) == x


def test_gaussian_and_rational_coefficients():
    reg = Registry()
    x = parse_element("(+ (* (+ 1/3 (* 2 I)) (z 1 2)) (/ 1 (- (z 2 2) 3)))", reg)
    assert parse_element(format_element(x), reg) == x


def test_operators():
    reg = Registry()
    a = parse_element("(^ (inv (z 1)) 2)", reg)
    b = parse_element("(/ 1 (* (z 1) (z 1)))", reg)
    assert a == b
    assert parse_element("(- (z 1))", reg) == -parse_element("(z 1)", reg)


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_element_round_trip(seed):
    p = Pool()
    x = p.element(random.Random(seed))
    if random.Random(seed).random() < 0.5:
        x = x * p.invertible(random.Random(seed + 1)).inverse()
    assert parse_element(format_element(x), p.reg) == x


def test_partner_and_unit_symbols_round_trip():
    atlas = build_atlas(2, 1)
    reg = atlas.registry
    for i in range(1, 5):
        for s in atlas.chart_symbols(i):
            x = G.symbol(reg, s)
            assert parse_element(format_element(x), reg) == x
    h = line_cocycle(atlas, 4, 3)
    assert format_element(h) == "(* (/ 1 (nu-e 1 3)) nu0)"


def test_form_round_trip():
    reg = Registry()
    f = parse_form("(* (/ 1 (z 1 2)) (d (z 1 2)))", reg)
    assert parse_form(format_form(f), reg) == f
    g = exterior_d(Form.from_element(parse_element("(* (z 1) (e 1) (e 2))", reg)))
    assert parse_form(format_form(g), reg) == g
    with pytest.raises(ParseError):
        parse_element("(d (z 1))", reg)


def test_matrix_round_trip():
    coc = synth_cocycle(2, 1, 2, seed=3)
    h = coc.h(1, 2)
    assert parse_matrix(format_matrix(h), coc.registry) == h
    w = matrix_connection(coc, make_partition(coc.registry, 2))[1]
    R = matrix_curvature(w)
    back = parse_matrix(format_matrix(R), coc.registry)
    assert back == R


def test_documented_matrix():
    reg = Registry()
    M = parse_matrix("(supermatrix 0 ((z 1) 0 | (e 1)) | ((e 2) 0 | 1))", reg)
    assert M.row_dims == (1, 1) and M.col_dims == (2, 1)


def test_label_round_trip():
    atlas = build_atlas(2, 1)
    for i in range(1, 5):
        text = format_label(atlas.label(i))
        lab = parse_label(text, atlas.registry)
        assert format_label(lab) == text
    assert format_label(atlas.label(4)) == "(label 4 ((z 1 4) (z 2 4) (nu-e 1 4) | 1nu))"
    assert parse_value(format_label(atlas.label(1)), atlas.registry).index == 1


@pytest.mark.parametrize("bad", ["(+ 1", "(z)", "(supermatrix 0 (1 | 2) (1))", "(foo 1)", ")"])
def test_parse_errors(bad):
    with pytest.raises(ParseError):
        parse_value(bad, Registry())
