"""Solver configuration, resource accounting and trace events."""

from __future__ import annotations

import json
import time
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, TextIO

from .errors import ResourceExceeded
from .formula import Formula, NameSupply, atoms
from .fragments import Fragment


class Strategy(Enum):
    EXHAUSTIVE = "exhaustive"
    BACKTRACKING = "backtracking"

    @classmethod
    def parse(cls, name) -> "Strategy":
        if isinstance(name, Strategy):
            return name
        return cls(name.lower())


@dataclass(frozen=True)
class Limits:
    max_disjuncts: int = 10**6
    max_coeff_bits: int = 10**6
    max_seconds: float = 300.0

    def __post_init__(self):
        if self.max_disjuncts < 1 or self.max_coeff_bits < 1 or self.max_seconds <= 0:
            raise ValueError("limits must be positive")


@dataclass
class SolveConfig:
    fragment: Fragment = Fragment.QF
    strategy: Strategy = Strategy.EXHAUSTIVE
    limits: Limits = field(default_factory=Limits)
    trace_sink: Callable[[dict], None] | None = None
    # assert the growth tables after every subroutine call
    check_tables: bool = False
    # metrics are expensive on big formulas; traces only carry them when asked
    trace_metrics: bool = True
    # enumerate presQE offsets only near atom thresholds (a subset of [-r, r] that still covers)
    presqe_window: bool = True


@dataclass
class TraceEvent:
    kind: str
    counts: dict = field(default_factory=dict)
    metrics_before: dict | None = None
    metrics_after: dict | None = None
    wall: float = 0.0

    def to_dict(self) -> dict:
        out = {"kind": self.kind, "counts": self.counts, "wall": round(self.wall, 6)}
        if self.metrics_before is not None:
            out["metrics_before"] = self.metrics_before
        if self.metrics_after is not None:
            out["metrics_after"] = self.metrics_after
        return out


def json_lines_sink(fh: TextIO) -> Callable[[dict], None]:
    def emit(event: dict) -> None:
        fh.write(json.dumps(event, sort_keys=True) + "\n")

    return emit


class Context:
    """Per-solve mutable bookkeeping: counters, limits, trace and table violations."""

    def __init__(self, cfg: SolveConfig | None = None, names: NameSupply | None = None):
        self.cfg = cfg or SolveConfig()
        self.limits = self.cfg.limits
        self.start = time.monotonic()
        self.counters: Counter[str] = Counter()
        self.events: list[TraceEvent] = []
        self.violations: list[str] = []
        self.names = names or NameSupply()
        self.produced = 0

    @property
    def fragment(self) -> Fragment:
        return self.cfg.fragment

    def elapsed(self) -> float:
        return time.monotonic() - self.start

    def tick(self) -> None:
        if self.elapsed() > self.limits.max_seconds:
            raise ResourceExceeded(
                f"time limit of {self.limits.max_seconds}s exceeded", "max_seconds", self.events
            )

    def charge(self, n: int = 1) -> None:
        self.produced += n
        if self.produced > self.limits.max_disjuncts:
            raise ResourceExceeded(
                f"more than {self.limits.max_disjuncts} disjuncts produced", "max_disjuncts", self.events
            )

    def check_size(self, n: int, what: str) -> None:
        if n > self.limits.max_disjuncts:
            raise ResourceExceeded(f"{what} would produce {n} disjuncts", "max_disjuncts", self.events)

    def check_coeffs(self, f: Formula) -> None:
        cap = self.limits.max_coeff_bits
        for a in atoms(f):
            t = a.term
            if abs(t.const).bit_length() > cap or any(abs(c).bit_length() > cap for c in t.coefficients()):
                raise ResourceExceeded(f"coefficient wider than {cap} bits", "max_coeff_bits", self.events)

    def emit(self, kind: str, counts: dict | None = None, before=None, after=None, wall: float = 0.0) -> None:
        ev = TraceEvent(kind, dict(counts or {}), before, after, wall)
        self.events.append(ev)
        if self.cfg.trace_sink is not None:
            self.cfg.trace_sink(ev.to_dict())

    def violation(self, msg: str) -> None:
        self.violations.append(msg)
