"""Acceptance criteria 1-9, one test each.

A pass/fail line per criterion is printed in the terminal summary (see conftest.py).
Run directly with ``python3 tests/test_acceptance.py``.
"""
import random
import time
from fractions import Fraction

import pytest

from conftest import Pool
from nuchern.atlas import body_transition_check, build_atlas, format_label, verify_gluing, verify_line_cocycle
from nuchern.charclass import curvature_suite
from nuchern.forms import Form, exterior_d, make_partition, wedge
from nuchern.grassmann import GrassmannElement as G
from nuchern.grassmann import invert, nu_apply, substitute
from nuchern.nuclass import (SNAP_TOL, BranchAssignment, chern_connection_forms, kernel_checks,
                             region_assignments, right_inverse_checks, sample_cell, verify_global_2form)
from nuchern.numeric import Window

GOLDEN = [
    "(1, z1^(1), z2^(1) | e1^(1))",
    "(z1^(2), 1, z2^(2) | e1^(2))",
    "(z1^(3), z2^(3), 1 | e1^(3))",
    "(z1^(4), z2^(4), nu_e1^(4) | 1nu)",
]
SEED = 42
TRIALS = 100


def failed(rep):
    return [c.name for c in rep.failures()]


def seen(cell):
    return ", ".join(f"({p}, {q}) x{n}" for (p, q), n in sorted(cell.values.items()))


def test_criterion_1_atlas_golden():
    t0 = time.perf_counter()
    atlas = build_atlas(2, 1)
    labels = [format_label(atlas.label(i)) for i in range(1, 5)]
    elapsed = time.perf_counter() - t0
    assert labels == GOLDEN
    assert elapsed < 1.0


def test_criterion_2_gluing_suite():
    t0 = time.perf_counter()
    bad = []
    for mn in [(2, 1), (3, 2)]:
        rep = verify_gluing(build_atlas(*mn))
        bad += [f"{mn}:{name}" for name in failed(rep)]
        n_triples = sum(c.name.startswith("gluing.triple") for c in rep.checks)
        size = mn[0] + mn[1] + 1
        assert n_triples == size * (size - 1) * (size - 2)
    elapsed = time.perf_counter() - t0
    assert not bad, bad
    assert elapsed < 30.0


def test_criterion_3_line_bundle_cocycle():
    worst = 0.0
    bad = []
    for mn in [(2, 1), (3, 2)]:
        atlas = build_atlas(*mn)
        rep = verify_line_cocycle(atlas, samples=100, seed=SEED)
        assert len(rep.checks) == atlas.size ** 3
        bad += [f"{mn}:{name}" for name in failed(rep)]
        worst = max([worst] + [c.details["numeric_residual"] for c in rep.checks])
    assert not bad, bad
    assert worst <= 1e-12


def test_criterion_4_headline_delta_eta():
    atlas = build_atlas(2, 1)
    triple = (2, 4, 1)
    want = (Fraction(-1, 2), Fraction(0))
    head = sample_cell(atlas, triple, BranchAssignment(Window.ZERO_TWO_PI), TRIALS,
                       random.Random(f"{SEED}:headline"))
    problems = []
    if not (head.constant and head.value == want):
        problems.append(f"default branches gave {seen(head)}; want (-1/2, 0)")
    if head.residual > SNAP_TOL:
        problems.append(f"default-branch snap residual {head.residual}")
    for branch in region_assignments({triple[1], triple[2]}):
        cell = sample_cell(atlas, triple, branch, TRIALS, random.Random(f"{SEED}:{branch}"))
        if not cell.constant or cell.residual > SNAP_TOL:
            problems.append(f"{branch.label(cell.charts)} not constant: {seen(cell)}, "
                            f"residual={cell.residual:.2g}, errors={len(cell.errors)}")
    assert not problems, "; ".join(problems)


def test_criterion_5_right_inverse():
    rep = right_inverse_checks(build_atlas(2, 1), draws=1000, seed=SEED, tol=1e-10)
    rec = rep.get("right_inverse")
    assert rec.details["draws"] >= 1000
    assert rec.details["max_error"] <= 1e-10


def test_criterion_6_kernel_law():
    rep = kernel_checks(build_atlas(2, 1).registry)
    assert len(rep.checks) == 49
    assert rep.passed, failed(rep)


def test_criterion_7_global_2form():
    atlas = build_atlas(2, 1)
    part = make_partition(atlas.registry, 4)
    assert part.count == 4
    rep = verify_global_2form(chern_connection_forms(atlas, part))
    names = {c.name for c in rep.checks}
    for i in range(1, 5):
        assert f"global.closed({i})" in names
        for j in range(1, 5):
            if i != j:
                assert f"global.omega_difference({i},{j})" in names
                assert f"global.curvature_overlap({i},{j})" in names
    assert rep.passed, failed(rep)


def test_criterion_8_curvature_suite():
    t0 = time.perf_counter()
    rep = curvature_suite(k=2, l=1, charts=3, seed=SEED, max_degree=6, kmax=3, numeric_trials=200)
    elapsed = time.perf_counter() - t0
    names = {c.name for c in rep.checks}
    for a in (1, 2, 3):
        assert f"curvature.three_sum({a})" in names
        assert f"bianchi({a})" in names
        assert {f"closed.str_power({a})(k={k})" for k in (1, 2, 3)} <= names
        assert {f"newton({a})(k+1={k})" for k in (1, 2, 3)} <= names
        assert f"ber_series.exp_str_log({a})" in names
    assert "gauge.curvature(2,1)" in names and "gauge.curvature(1,3)" in names
    mult = rep.get("ber_multiplicativity")
    assert mult.details["trials"] == 200
    assert mult.details["max_relative_error"] <= 1e-9
    assert rep.passed, failed(rep)
    assert elapsed < 60.0


def _property_trials(check):
    for t in range(TRIALS):
        check(random.Random(f"{SEED}:{check.__name__}:{t}"), Pool())


def _supercommutes(rng, p):
    x, y = p.element(rng), p.element(rng)
    assert x * y == (y * x).scale(-1 if x.parity() == y.parity() == 1 else 1)


def _nu_involution(rng, p):
    x = G.zero(p.reg)
    for s in rng.sample(p.e, rng.randint(1, len(p.e))):
        x = x + p.coeff(rng) * p.sym(s)
    assert nu_apply(nu_apply(x)) == x


def _d_squared(rng, p):
    f = Form.from_element(p.element(rng))
    for _ in range(rng.randint(0, 2)):
        f = wedge(f, Form.dsym(p.reg, rng.choice(p.z + p.e)))
    assert exterior_d(exterior_d(f)).is_zero()


def _invert(rng, p):
    x = p.invertible(rng)
    assert x * invert(x) == G.one(p.reg) == invert(x) * x


def _substitute_morphism(rng, p):
    x, y = p.element(rng), p.element(rng)
    sigma = {p.z[0]: p.invertible(rng), p.z[1]: p.element(rng, 0, nu0=False),
             p.e[0]: p.element(rng, 1, nu0=False)}
    assert substitute(x * y, sigma) == substitute(x, sigma) * substitute(y, sigma)


def test_criterion_9_classical_reduction_and_properties():
    rep = body_transition_check(build_atlas(2, 1))
    assert len(rep.checks) == 6
    assert rep.passed, failed(rep)
    for check in (_supercommutes, _nu_involution, _d_squared, _invert, _substitute_morphism):
        _property_trials(check)


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
