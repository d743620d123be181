"""Command-line driver: ``nuchern <command> [flags]``."""
from __future__ import annotations

import argparse
import math
import os
import random
import sys
import time
from dataclasses import asdict, dataclass

from .atlas import (body_transition_check, build_atlas, entry_M_prime, format_label, line_cocycle,
                    random_point, verify_gluing, verify_line_cocycle)
from .charclass import curvature_suite
from .errors import BadConfig
from .forms import TruncationPolicy, make_partition
from .nuclass import (branch_log_L, chern_connection_forms, headline_check, kernel_checks,
                      right_inverse_checks, scan_delta_eta, verify_global_2form)
from .numeric import Window
from .report import VerificationReport
from .sexpr import format_atlas, format_element

COMMANDS = ("atlas", "verify-gluing", "verify-cocycle", "nu-class", "example-p21", "global-2form",
            "curvature", "all")

GOLDEN_P21 = (
    "(1, z1^(1), z2^(1) | e1^(1))",
    "(z1^(2), 1, z2^(2) | e1^(2))",
    "(z1^(3), z2^(3), 1 | e1^(3))",
    "(z1^(4), z2^(4), nu_e1^(4) | 1nu)",
)


@dataclass
class RunConfig:
    command: str = "all"
    m: int = 2
    n: int = 1
    k: int = 2
    l: int = 1
    charts: int = 3
    seed: int = 42
    samples: int = 100
    max_degree: int = 6
    branch: str = Window.ZERO_TWO_PI.value
    format: str = "text"
    out: str | None = None
    convention: str = "signed"

    def validate(self):
        if self.command not in COMMANDS:
            raise BadConfig(f"unknown command {self.command!r}; choose from {', '.join(COMMANDS)}")
        if self.m < 1 or self.n < 1:
            raise BadConfig("--m and --n must be >= 1")
        if self.k < 1 or self.l < 0 or self.charts < 2:
            raise BadConfig("need --k >= 1, --l >= 0, --charts >= 2")
        if self.samples < 1:
            raise BadConfig("--samples must be >= 1")
        if self.max_degree < 2:
            raise BadConfig("--max-degree must be >= 2")
        if self.format not in ("text", "json"):
            raise BadConfig("--format is text or json")
        try:
            Window.parse(self.branch)
        except ValueError as exc:
            raise BadConfig(str(exc)) from None
        return self

    def echo(self) -> dict:
        d = asdict(self)
        d.pop("out")
        d.pop("format")
        return d


# -- pipelines -------------------------------------------------------------------------

def run_atlas(cfg: RunConfig) -> VerificationReport:
    rep = VerificationReport("atlas")
    t0 = time.perf_counter()
    atlas = build_atlas(cfg.m, cfg.n)
    labels = [format_label(atlas.label(i)) for i in range(1, atlas.size + 1)]
    rep.add("atlas.labels", len(labels) == cfg.m + cfg.n + 1, time.perf_counter() - t0,
            labels=labels, dump=format_atlas(atlas))
    if (cfg.m, cfg.n) == (2, 1):
        rep.add("atlas.golden_p21", tuple(labels) == GOLDEN_P21, labels=labels)
    t0 = time.perf_counter()
    odd = [(j, i) for i in range(1, atlas.size + 1) for j in range(1, atlas.size + 1)
           if entry_M_prime(atlas, j, i).parity() != 0]
    rep.add("atlas.M_prime_even", not odd, time.perf_counter() - t0, odd_entries=odd)
    rep.extend(body_transition_check(atlas))
    return rep


def run_gluing(cfg: RunConfig) -> VerificationReport:
    return verify_gluing(build_atlas(cfg.m, cfg.n))


def run_cocycle(cfg: RunConfig) -> VerificationReport:
    return verify_line_cocycle(build_atlas(cfg.m, cfg.n), cfg.samples, cfg.seed)


def run_nu_class(cfg: RunConfig) -> VerificationReport:
    atlas = build_atlas(cfg.m, cfg.n)
    win = Window.parse(cfg.branch)
    rep = VerificationReport("nu-class")
    rep.extend(kernel_checks(atlas.registry))
    rep.extend(right_inverse_checks(atlas, max(1000, cfg.samples), cfg.seed, cfg.convention))
    rep.extend(scan_delta_eta(atlas, cfg.samples, cfg.seed, cfg.convention, default=win))
    if (cfg.m, cfg.n) == (2, 1):
        rep.extend(headline_check(atlas, cfg.samples, cfg.seed, cfg.convention, default=win))
    return rep


def run_example_p21(cfg: RunConfig) -> VerificationReport:
    """The worked nu-P^{2|1} example: labels, four cocycle values, L(h_21) and delta eta at (2,4,1)."""
    atlas = build_atlas(2, 1)
    rep = VerificationReport("example-p21")
    labels = tuple(format_label(atlas.label(i)) for i in range(1, 5))
    rep.add("p21.labels", labels == GOLDEN_P21, labels=list(labels))
    want = {(2, 1): "(/ 1 (z 1 1))", (3, 2): "(/ 1 (z 2 2))", (4, 3): "(* (/ 1 (nu-e 1 3)) nu0)",
            (1, 4): "(* (/ 1 (z 1 4)) nu0)"}
    for (i, j), text in want.items():
        got = format_element(line_cocycle(atlas, i, j))
        rep.add(f"p21.h({i},{j})", got == text, value=got, expected=text)
    rng = random.Random(cfg.seed)
    worst = 0.0
    z1 = atlas.z(1, 1)
    for _ in range(cfg.samples):
        pt = random_point(atlas, 1, rng)
        w = pt[z1]
        L = branch_log_L(atlas, 2, 1, pt)
        a = math.atan2(w.imag, w.real) % (2 * math.pi)
        closed = complex(-math.log(abs(w)), 2 * math.pi - a) / (2j * math.pi)
        worst = max(worst, abs(L.f - closed))
    rep.add("p21.L(h21)_closed_form", worst <= 1e-12, max_error=worst, samples=cfg.samples)
    rep.extend(headline_check(atlas, cfg.samples, cfg.seed, cfg.convention,
                              default=Window.parse(cfg.branch)))
    return rep


def run_global_2form(cfg: RunConfig) -> VerificationReport:
    atlas = build_atlas(cfg.m, cfg.n)
    part = make_partition(atlas.registry, atlas.size)
    cf = chern_connection_forms(atlas, part, cfg.convention, TruncationPolicy(cfg.max_degree))
    return verify_global_2form(cf)


def run_curvature(cfg: RunConfig) -> VerificationReport:
    return curvature_suite(cfg.k, cfg.l, cfg.charts, cfg.seed, cfg.max_degree)


PIPELINES = {
    "atlas": run_atlas,
    "verify-gluing": run_gluing,
    "verify-cocycle": run_cocycle,
    "nu-class": run_nu_class,
    "example-p21": run_example_p21,
    "global-2form": run_global_2form,
    "curvature": run_curvature,
}


def run(cfg: RunConfig) -> tuple[VerificationReport, int]:
    cfg.validate()
    if cfg.command == "all":
        rep = VerificationReport("all")
        for name, fn in PIPELINES.items():
            rep.extend(fn(cfg), prefix=f"{name}/")
    else:
        rep = PIPELINES[cfg.command](cfg)
    rep.command = cfg.command
    rep.config = cfg.echo()
    return rep, 0 if rep.passed else 1


# -- argument parsing ----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    d = RunConfig()
    p = argparse.ArgumentParser(prog="nuchern", description="Verify nu-projective atlases, "
                                "nu-classes and supermatrix characteristic forms.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--m", type=int, default=d.m)
    p.add_argument("--n", type=int, default=d.n)
    p.add_argument("--k", type=int, default=d.k)
    p.add_argument("--l", type=int, default=d.l)
    p.add_argument("--charts", type=int, default=d.charts)
    p.add_argument("--seed", type=int, default=d.seed, help="overridden by NUCHERN_SEED")
    p.add_argument("--samples", type=int, default=d.samples)
    p.add_argument("--max-degree", type=int, default=d.max_degree)
    p.add_argument("--branch", choices=[w.value for w in Window], default=d.branch)
    p.add_argument("--format", choices=("text", "json"), default=d.format)
    p.add_argument("--out", default=None, help="write the report here instead of stdout")
    p.add_argument("--convention", choices=("signed", "literal"), default=d.convention,
                   help="orientation rule for L on mixed chart pairs")
    p.add_argument("--verbose", action="store_true", help="list passing checks in text output")
    return p


def config_from_args(ns: argparse.Namespace, environ=None) -> RunConfig:
    environ = os.environ if environ is None else environ
    seed = ns.seed
    if environ.get("NUCHERN_SEED"):
        try:
            seed = int(environ["NUCHERN_SEED"])
        except ValueError:
            raise BadConfig(f"NUCHERN_SEED={environ['NUCHERN_SEED']!r} is not an integer") from None
    return RunConfig(ns.command, ns.m, ns.n, ns.k, ns.l, ns.charts, seed, ns.samples, ns.max_degree,
                     ns.branch, ns.format, ns.out, ns.convention)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = config_from_args(ns).validate()
    except BadConfig as exc:
        parser.print_usage(sys.stderr)
        print(f"nuchern: error: {exc}", file=sys.stderr)
        return 2
    rep, status = run(cfg)
    text = rep.to_json() if cfg.format == "json" else rep.to_text(verbose=ns.verbose)
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
