"""Parameter functions of a formula used by the growth tables."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from math import lcm

from .formula import FALSE, TRUE, And, Dvd, Formula, Lt, Not, Or, PowerPred, PrenexFormula, _Quant, to_prenex
from .term import Term

_BASE_TERMS = (Term.constant(0), Term.constant(2))


@dataclass(frozen=True)
class MetricsReport:
    linterms: frozenset[Term]
    homterms: frozenset[Term]
    maxvars: int
    norminf_linterms: int
    norminf_homterms: int
    normone_max: int
    fmod: int
    boolnum: int
    alt: int
    extra: dict = field(default_factory=dict, compare=False)

    @property
    def linterms_count(self) -> int:
        return len(self.linterms)

    @property
    def homterms_count(self) -> int:
        return len(self.homterms)

    def to_dict(self) -> dict:
        return {
            "linterms_count": self.linterms_count,
            "linterms": sorted(str(t) for t in self.linterms),
            "homterms_count": self.homterms_count,
            "homterms": sorted(str(t) for t in self.homterms),
            "maxvars": self.maxvars,
            "norminf_linterms": self.norminf_linterms,
            "norminf_homterms": self.norminf_homterms,
            "normone_max": self.normone_max,
            "fmod": self.fmod,
            "boolnum": self.boolnum,
            "alt": self.alt,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def boolnum(f: Formula) -> int:
    """Count of negations and binary conjunctions once Or is written as not-and-not."""
    memo: dict[int, int] = {}

    def go(g: Formula) -> int:
        hit = memo.get(id(g))
        if hit is not None:
            return hit
        if isinstance(g, Not):
            n = 1 + go(g.arg)
        elif isinstance(g, And):
            n = len(g.args) - 1 + sum(go(a) for a in g.args)
        elif isinstance(g, Or):
            # not(not a1 and ... and not ak)
            k = len(g.args)
            n = 1 + k + (k - 1) + sum(go(a) for a in g.args)
        elif isinstance(g, _Quant):
            n = go(g.body)
        else:
            n = 0
        memo[id(g)] = n
        return n

    return go(f)


def _terms(f: Formula):
    lin: set[Term] = set(_BASE_TERMS)
    others: list[Term] = []
    mods: set[int] = set()
    stack = [f]
    seen: set[int] = set()
    while stack:
        g = stack.pop()
        if id(g) in seen:
            continue
        seen.add(id(g))
        if isinstance(g, Lt):
            lin.add(g.term)
        elif isinstance(g, Dvd):
            others.append(g.term)
            mods.add(g.q)
        elif isinstance(g, PowerPred):
            others.append(g.term)
        elif isinstance(g, Not):
            stack.append(g.arg)
        elif isinstance(g, (And, Or)):
            stack.extend(g.args)
        elif isinstance(g, _Quant):
            stack.append(g.body)
    return lin, others, mods


def metrics(f: Formula | PrenexFormula) -> MetricsReport:
    if isinstance(f, PrenexFormula):
        alt = f.alt()
        f = f.to_formula()
    else:
        alt = to_prenex(f).alt() if f not in (TRUE, FALSE) else 0
    lin, others, mods = _terms(f)
    hom = frozenset(t.homogeneous() for t in lin)
    maxvars = max((t.num_vars() for t in list(lin) + others), default=0)
    return MetricsReport(
        linterms=frozenset(lin),
        homterms=hom,
        maxvars=maxvars,
        norminf_linterms=max(t.norm_inf() for t in lin),
        norminf_homterms=max(t.norm_inf() for t in hom),
        normone_max=max(t.norm_one() for t in lin),
        fmod=lcm(*mods) if mods else 1,
        boolnum=boolnum(f),
        alt=alt,
    )
