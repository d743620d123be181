"""Verification reports shared by every pipeline and the CLI."""
from __future__ import annotations

import json
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

PASS, FAIL, SKIP = "pass", "fail", "skip"


def to_jsonable(x: Any):
    """Fractions become "num/den" text, complex numbers [re, im] pairs."""
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    if isinstance(x, complex):
        return [x.real, x.imag]
    if isinstance(x, dict):
        return {str(k): to_jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [to_jsonable(v) for v in x]
    if isinstance(x, (str, int, float, bool)) or x is None:
        return x
    return str(x)


@dataclass
class CheckRecord:
    name: str
    status: str
    details: dict = field(default_factory=dict)
    timing: float = 0.0

    @property
    def passed(self) -> bool:
        return self.status == PASS


@dataclass
class VerificationReport:
    command: str = ""
    config: dict = field(default_factory=dict)
    checks: list[CheckRecord] = field(default_factory=list)

    def add(self, name: str, ok: bool | None, timing: float = 0.0, **details) -> CheckRecord:
        status = SKIP if ok is None else (PASS if ok else FAIL)
        rec = CheckRecord(name, status, details, timing)
        self.checks.append(rec)
        return rec

    @contextmanager
    def timed(self, name: str, **details):
        """Record a check whose body sets ``box['ok']`` (and optional details)."""
        box: dict = {"ok": None, "details": dict(details)}
        t0 = time.perf_counter()
        yield box
        self.add(name, box["ok"], time.perf_counter() - t0, **box["details"])

    def extend(self, other: "VerificationReport", prefix: str = ""):
        for c in other.checks:
            self.checks.append(CheckRecord(prefix + c.name, c.status, c.details, c.timing))

    @property
    def overall(self) -> str:
        return FAIL if any(c.status == FAIL for c in self.checks) else PASS

    @property
    def passed(self) -> bool:
        return self.overall == PASS

    def failures(self) -> list[CheckRecord]:
        return [c for c in self.checks if c.status == FAIL]

    def get(self, name: str) -> CheckRecord:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self, timing: bool = True) -> dict:
        checks = []
        for c in sorted(self.checks, key=lambda c: c.name):
            d = {"name": c.name, "status": c.status, "details": to_jsonable(c.details)}
            if timing:
                d["timing"] = round(c.timing, 6)
            checks.append(d)
        return {"command": self.command, "config": to_jsonable(self.config), "checks": checks,
                "overall": self.overall}

    def to_json(self, timing: bool = True) -> str:
        return json.dumps(self.to_dict(timing), indent=2, sort_keys=False)

    def to_text(self, verbose: bool = False) -> str:
        lines = [f"command: {self.command}"]
        if self.config:
            lines.append("config: " + ", ".join(f"{k}={v}" for k, v in self.config.items()))
        n_pass = sum(c.status == PASS for c in self.checks)
        n_fail = sum(c.status == FAIL for c in self.checks)
        for c in sorted(self.checks, key=lambda c: c.name):
            if c.status == PASS and not verbose:
                continue
            extra = ""
            if c.details:
                extra = "  " + "; ".join(f"{k}={_short(v)}" for k, v in c.details.items())
            lines.append(f"[{c.status.upper():4}] {c.name}{extra}")
        lines.append(f"{n_pass} passed, {n_fail} failed, "
                     f"{len(self.checks) - n_pass - n_fail} skipped -> {self.overall.upper()}")
        return "\n".join(lines)


def _short(v, limit: int = 160) -> str:
    s = json.dumps(to_jsonable(v)) if not isinstance(v, str) else v
    return s if len(s) <= limit else s[: limit - 3] + "..."
