"""Growth tables for one call of each subroutine, checked against measured metrics.

Every checker takes the metrics of the input and of each output, and returns a
list of human-readable violations (empty when the table holds).  Lower bounds
that the tables put on input parameters (``h >= 2`` and so on) are applied by
taking the maximum of the measured value and the bound.
"""

from __future__ import annotations

from math import log2
from typing import Sequence

from .metrics import MetricsReport


def _check(out: list[str], label: str, name: str, value: int, bound: float) -> None:
    if value > bound:
        out.append(f"{label}: {name} = {value} exceeds {bound}")


def presburger_round(phi: MetricsReport, outs: Sequence[MetricsReport], k: int) -> list[str]:
    h = max(phi.homterms_count, 2)
    v = phi.maxvars
    a = max(phi.norminf_homterms, 2)
    c = phi.norminf_linterms
    m = phi.fmod
    b = phi.boolnum
    bad: list[str] = []
    for i, psi in enumerate(outs):
        lab = f"presQE output {i}"
        _check(bad, lab, "|homterms|", psi.homterms_count, h)
        _check(bad, lab, "maxvars", psi.maxvars, 2 * v)
        _check(bad, lab, "norminf(homterms)", psi.norminf_homterms, 2 * a * a)
        _check(bad, lab, "norminf(linterms)", psi.norminf_linterms, a ** (h + 2) * (c + m))
        _check(bad, lab, "fmod", psi.fmod, a * m)
        _check(bad, lab, "boolnum", psi.boolnum, b + 2 * v + 1)
    _check(bad, "presQE", "output count", k, h * c * m ** (2 * v + 1) * a ** (2 * v + h + 4))
    return bad


def sem_round(phi: MetricsReport, n: int, outs: Sequence[MetricsReport], k: int, added: int) -> list[str]:
    h = phi.homterms_count
    v = max(phi.maxvars, 2)
    c = max(phi.norminf_linterms, 2)
    m = phi.fmod
    b = phi.boolnum
    bad: list[str] = []
    for i, th in enumerate(outs):
        lab = f"semCover output {i}"
        _check(bad, lab, "|homterms|", th.homterms_count, h * (v + 10) + n)
        _check(bad, lab, "maxvars", th.maxvars, v)
        _check(bad, lab, "norminf(linterms)", th.norminf_linterms, 2**11 * v * v * c**4)
        _check(bad, lab, "fmod", th.fmod, m)
        _check(bad, lab, "boolnum", th.boolnum, b + h * (v + 11) + n)
    _check(bad, "semCover", "output count", k, (v + 1) ** (8 * h) * log2(c) ** h * n)
    _check(bad, "semCover", "universal quantifiers added", added, h)
    return bad


def linearise_round(ins: Sequence[MetricsReport], outs: Sequence[MetricsReport], n: int) -> list[str]:
    bad: list[str] = []
    r = max((m.maxvars for m in ins), default=0)
    for i, (th, th2) in enumerate(zip(ins, outs)):
        lab = f"linearise output {i}"
        c = max(th.norminf_linterms, 2)
        m = max(th.fmod, 2)
        # a divisibility-only input has a = b = 0, but its rewrite needs one inequality and one conjunction
        a = max(th.norminf_homterms, 1)
        b = max(th.boolnum, 1)
        _check(bad, lab, "|homterms|", th2.homterms_count, th.homterms_count + (6 * r + 2) * n)
        _check(bad, lab, "maxvars", th2.maxvars, th.maxvars)
        _check(bad, lab, "norminf(homterms)", th2.norminf_homterms, a)
        _check(bad, lab, "norminf(linterms)", th2.norminf_linterms, c)
        _check(bad, lab, "fmod", th2.fmod, m * m)
        _check(bad, lab, "boolnum", th2.boolnum, 22 * b)
    return bad


def octagon_step(before: MetricsReport, after: MetricsReport, label: str) -> list[str]:
    """Per-step invariants of a QF run on octagon input: heft 2, unit coefficients, fmod non-increasing."""
    bad: list[str] = []
    _check(bad, label, "maxvars", after.maxvars, 2)
    _check(bad, label, "norminf(homterms)", after.norminf_homterms, 1)
    _check(bad, label, "fmod", after.fmod, before.fmod)
    return bad


def octagon_result(phi: MetricsReport, psi: MetricsReport, ell: int, n: int) -> list[str]:
    c = max(phi.norminf_linterms, 2)
    m = max(phi.fmod, 2)
    bad: list[str] = []
    _check(bad, "octagon result", "maxvars", psi.maxvars, 2)
    _check(bad, "octagon result", "norminf(homterms)", psi.norminf_homterms, 1)
    _check(bad, "octagon result", "norminf(linterms)", psi.norminf_linterms, 4 ** (ell * n) * (c + 2 * m))
    _check(bad, "octagon result", "fmod", psi.fmod, phi.fmod)
    return bad
