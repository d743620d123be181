import random
from fractions import Fraction

import pytest

from nuchern.grassmann import GrassmannElement as G
from nuchern.symbols import Kind, Registry


class Pool:
    """A registry with a few even and odd symbols and a seeded random element generator."""

    def __init__(self, n_even=2, n_odd=3):
        self.reg = Registry()
        self.z = [self.reg.get(Kind.Z, i) for i in range(1, n_even + 1)]
        self.e = [self.reg.get(Kind.E, i) for i in range(1, n_odd + 1)]

    def sym(self, s):
        return G.symbol(self.reg, s)

    def coeff(self, rng):
        c = G.const(self.reg, Fraction(rng.randint(-4, 4), rng.randint(1, 3)))
        for s in self.z:
            if rng.random() < 0.4:
                c = c + self.sym(s).scale(rng.randint(-2, 2))
        return c

    def element(self, rng, parity=None, nu0=True):
        """Random parity-homogeneous element (parity None picks one)."""
        parity = rng.randint(0, 1) if parity is None else parity
        out = G.zero(self.reg)
        for _ in range(rng.randint(1, 4)):
            k = rng.choice([d for d in range(len(self.e) + 1) if d % 2 == parity])
            mono = G.one(self.reg)
            for s in rng.sample(self.e, k):
                mono = mono * self.sym(s)
            term = self.coeff(rng) * mono
            if nu0 and rng.random() < 0.3:
                term = term.times_nu0()
            out = out + term
        return out

    def invertible(self, rng):
        body = G.const(self.reg, rng.randint(1, 5)) + self.sym(self.z[0]) * self.sym(self.z[0])
        return body + self.element(rng, 0, nu0=False).nilpotent()


@pytest.fixture
def pool():
    return Pool()


@pytest.fixture
def rng():
    return random.Random(1234)


# -- one summary line per acceptance criterion ----------------------------------------

_criteria: dict = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py::test_criterion_" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1][len("test_criterion_"):]
    if report.when == "call" or report.failed:
        msg = ""
        if report.failed and hasattr(report.longrepr, "reprcrash"):
            msg = report.longrepr.reprcrash.message.splitlines()[0]
        _criteria[name] = ("PASS" if report.passed else "FAIL", msg)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_criteria, key=lambda n: int(n.split("_")[0])):
        status, msg = _criteria[name]
        num, _, title = name.partition("_")
        line = f"criterion {num} ({title.replace('_', ' ')}): {status}"
        if msg:
            line += f"  [{msg[:200]}]"
        terminalreporter.write_line(line)
