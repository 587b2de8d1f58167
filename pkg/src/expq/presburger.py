"""Presburger-style elimination of a linearly occurring variable, and Simplify."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import lcm, prod
from typing import Iterator, Mapping, Sequence

from .config import Context, Strategy
from .errors import ContractError
from .formula import (
    FALSE,
    TRUE,
    Dvd,
    Formula,
    Lt,
    Or,
    _const,
    atoms,
    conj,
    dvd,
    expand_abs,
    occurs_in_power,
    replace_atoms,
    scaled_substitute,
    substitute,
)
from .fragments import div_is_simple
from .metrics import metrics
from .term import Term
from . import tables

Unit = tuple[str, str]  # ("pow" | "lin" | "abs", variable)


def _unit_term(u: Unit) -> Term:
    kind, x = u
    if kind == "pow":
        return Term.power(x)
    if kind == "lin":
        return Term.var(x)
    return Term.absolute(x)


def _units(t: Term) -> list[tuple[Unit, int]]:
    out = [(("pow", v), c) for v, c in t.pows]
    out += [(("lin", v), c) for v, c in t.lins]
    out += [(("abs", v), c) for v, c in t.abss]
    return out


def non_simple_divs(phi: Formula) -> list[Dvd]:
    seen: dict[Formula, None] = {}
    for a in atoms(phi):
        if isinstance(a, Dvd) and not div_is_simple(a):
            seen.setdefault(a, None)
    return list(seen)


def simplify_iter(phi: Formula, ctx: Context | None = None) -> Iterator[Formula]:
    """Lazily enumerate the residue-map cover of ``phi`` (members may be False)."""
    G = non_simple_divs(phi)
    if not G:
        yield phi
        return
    d = lcm(*(a.q for a in G))
    units = sorted({u for a in G for u, _ in _units(a.term)})
    if ctx is not None:
        ctx.counters["simplify"] += 1
        if ctx.cfg.strategy is Strategy.EXHAUSTIVE:
            ctx.check_size(d ** len(units), "simplify")
    for residues in itertools.product(range(d), repeat=len(units)):
        r = dict(zip(units, residues))
        guards = [dvd(d, _unit_term(u) - r[u]) for u in units]
        mapping = {a: _const((sum(c * r[u] for u, c in _units(a.term)) + a.term.const) % a.q == 0) for a in G}
        yield conj(*guards, replace_atoms(phi, mapping))


def simplify(phi: Formula, ctx: Context | None = None) -> list[Formula]:
    """Cover of ``phi`` whose members have only simple divisibilities."""
    return list(simplify_iter(phi, ctx))


# ---------------------------------------------------------------------------
# presQE
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SubstitutionCandidate:
    a: int
    t: Term


@dataclass(frozen=True)
class EliminationPlan:
    """What presQE will enumerate for ``x``: candidates, the interval radius, or residues.

    ``centers[i]`` lists, for candidate i, the offsets k at which some atom
    built on that candidate flips truth.  With ``window`` set, only the k
    within a(fmod+1)+1 of such an offset are enumerated: between two flips the
    truth of the formula in x is periodic with period fmod, so a witness, if
    any, lies that close to a flip.  Those k all lie inside [-r, r].
    """

    x: str
    phi: Formula
    candidates: tuple[SubstitutionCandidate, ...]
    g: int
    fmod: int
    linnorm: int
    centers: tuple[tuple[int, ...], ...] = ()

    def radius(self, a: int) -> int:
        return a * (2 * self.linnorm + self.g * self.fmod)

    def offsets(self, i: int, window: bool = True) -> list[int]:
        a = self.candidates[i].a
        r = self.radius(a)
        if not window:
            return list(range(-r, r + 1))
        half = a * (self.fmod + 1) + 1
        ks: set[int] = set()
        for c in self.centers[i]:
            ks.update(range(max(-r, c - half), min(r, c + half) + 1))
        return sorted(ks)

    def size(self, window: bool = False) -> int:
        if not self.candidates:
            return self.fmod
        if not window:
            return sum(2 * self.radius(c.a) + 1 for c in self.candidates)
        return sum(len(self.offsets(i)) for i in range(len(self.candidates)))


def plan_elimination(x: str, phi: Formula) -> EliminationPlan:
    """Collect T, g and the interval data for eliminating the linear variable ``x``.

    Only atoms mentioning ``x`` feed the interval radius: constants and moduli
    of atoms without ``x`` do not influence the witnesses for ``x``.
    """
    if occurs_in_power(phi, x):
        raise ContractError(f"presQE: {x} occurs inside a power")
    if any(a.term.abs_coeff(x) for a in atoms(phi)):
        phi = expand_abs(phi, x)
    cands: dict[SubstitutionCandidate, set[int]] = {}
    mods: list[int] = []
    linnorm = 2
    for a in atoms(phi):
        t = a.term
        c = t.lin_coeff(x)
        if not c:
            continue
        if isinstance(a, Lt):
            rest = t.without_lin(x).homogeneous()
            if c > 0:
                cands.setdefault(SubstitutionCandidate(c, -rest), set()).add(-t.const)
            else:
                cands.setdefault(SubstitutionCandidate(-c, rest), set()).add(t.const)
            linnorm = max(linnorm, t.norm_inf())
        elif isinstance(a, Dvd):
            mods.append(a.q)
        else:
            raise ContractError("presQE applied to a formula containing P(.)")
    ordered = tuple(sorted(cands, key=lambda s: (s.a, str(s.t))))
    centers = tuple(tuple(sorted(cands[s])) for s in ordered)
    g = prod(sorted({s.a for s in ordered})) if ordered else 1
    return EliminationPlan(x, phi, ordered, g, lcm(*mods) if mods else 1, linnorm, centers)


def pres_qe_iter(x: str, phi: Formula, ctx: Context | None = None, window: bool | None = None) -> Iterator[Formula]:
    """Members of the cover of ``exists x. phi`` in enumeration order (False ones included)."""
    if window is None:
        window = ctx.cfg.presqe_window if ctx is not None else True
    plan = plan_elimination(x, phi)
    phi = plan.phi
    xt = Term.var(x)
    if not plan.candidates:
        # x only constrained by divisibilities: its residue decides everything
        for k in range(plan.fmod):
            yield from simplify_iter(substitute(phi, xt, Term.constant(k)), ctx)
        return
    for i, cand in enumerate(plan.candidates):
        for k in plan.offsets(i, window):
            tk = cand.t + k
            gamma = conj(scaled_substitute(phi, xt, tk, cand.a), dvd(cand.a, tk))
            if gamma is FALSE:
                continue
            yield from simplify_iter(gamma, ctx)


def split_or(f: Formula) -> list[Formula]:
    return list(f.args) if isinstance(f, Or) else [f]


def pres_qe(x: str, xs: Sequence[str], phi: Formula, ctx: Context | None = None) -> list[tuple[tuple[str, ...], Formula]]:
    """Eliminate the linearly occurring ``x``; returns pairs (xs, psi) covering ``exists x. phi``.

    Members equal to False are dropped, a True member collapses the cover to
    {True}, and top-level disjunctions are split into separate pairs.
    """
    if x not in xs:
        raise ContractError(f"presQE: {x} is not among the block variables")
    ctx = ctx or Context()
    ctx.counters["presqe"] += 1
    plan = plan_elimination(x, phi)
    if ctx.cfg.strategy is Strategy.EXHAUSTIVE:
        ctx.check_size(plan.size(ctx.cfg.presqe_window), "presQE")
    instrument = ctx.cfg.check_tables
    before = metrics(plan.phi) if instrument else None
    members: dict[Formula, None] = {}
    raw = 0
    for psi in pres_qe_iter(x, phi, ctx):
        ctx.tick()
        raw += 1
        if psi is FALSE:
            continue
        if psi is TRUE:
            members = {TRUE: None}
            break
        if psi not in members:
            ctx.charge()
            members[psi] = None
    xs = tuple(xs)
    if instrument:
        outs = [metrics(m) for m in members]
        ctx.violations.extend(tables.presburger_round(before, outs, len(members)))
    ctx.emit("PresQECall", {"var": x, "candidates": len(plan.candidates), "members": len(members), "enumerated": raw})
    out: list[tuple[tuple[str, ...], Formula]] = []
    for m in members:
        ctx.check_coeffs(m)
        out.extend((xs, d) for d in split_or(m))
    return out


def candidate_witnesses(x: str, phi: Formula, env: Mapping[str, int], window: bool = True) -> list[int]:
    """Values of ``x`` that presQE implicitly tries under the assignment ``env``."""
    plan = plan_elimination(x, phi)
    if not plan.candidates:
        return list(range(plan.fmod))
    out: set[int] = set()
    for i, cand in enumerate(plan.candidates):
        base = cand.t.evaluate(env)
        for k in plan.offsets(i, window):
            if (base + k) % cand.a == 0:
                out.add((base + k) // cand.a)
    return sorted(out)
