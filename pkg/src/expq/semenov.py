"""Semenov cover (power-comparison-ification of one block) and Linearise."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from .config import Context
from .errors import ContractError
from .formula import (
    FALSE,
    FORALL,
    TRUE,
    Dvd,
    Formula,
    Lt,
    NameSupply,
    atoms,
    conj,
    disj,
    dvd,
    equal,
    geq,
    greater,
    leq,
    less,
    lt,
    map_atoms,
    neg,
    not_equal,
    replace_atoms,
    scaled_substitute,
    substitute,
)
from .fragments import Fragment, atom_in_pc
from .metrics import metrics
from .numtheory import Single, Unsat, ceil_log2_ratio, floor_log2_ratio, lam, log2_exact, solve_pow_congruence
from .presburger import split_or
from .term import ZERO, Term
from . import tables

Pair = tuple[tuple[str, ...], Formula]


@dataclass
class SemState:
    """The definitional prefix built during one block, and the sigma -> w map."""

    names: NameSupply
    pi_prime: list[tuple[str, str]] = field(default_factory=list)
    sigma_registry: dict[Term, str] = field(default_factory=dict)

    def w_for(self, sigma: Term) -> str:
        key, _ = sigma.sign_canonical()
        w = self.sigma_registry.get(key)
        if w is None:
            w = self.names.fresh("w")
            self.sigma_registry[key] = w
        return w

    def sigma_of(self, w: str) -> Term:
        for s, v in self.sigma_registry.items():
            if v == w:
                return s
        raise KeyError(w)

    def bind(self, w: str) -> bool:
        if any(v == w for _, v in self.pi_prime):
            return False
        self.pi_prime.append((FORALL, w))
        return True


@dataclass(frozen=True)
class LambdaTerm:
    """lambda(inner): the largest power of two not above |inner|.

    Inside a cover computation it stands for 2^|w| with w the variable
    registered for ``inner``; a literal inner value is folded at once.
    """

    inner: Term

    def as_term(self, state: SemState) -> Term:
        if self.inner.is_ground():
            return Term.constant(lam(self.inner.const))
        return Term.power(state.w_for(self.inner))


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------


def _pow(x: str, c: int = 1) -> Term:
    return Term.power(x, c)


@dataclass(frozen=True)
class _Group:
    eta: Term
    sigma: Term
    A: tuple[Formula, ...]
    g: int
    a: int
    V: tuple[str, ...]


def _groups(phi: Formula, x: str, xs: frozenset[str]) -> list[_Group]:
    grouped: dict[tuple[Term, Term], list[Formula]] = {}
    for al in atoms(phi):
        if not isinstance(al, Lt) or not al.term.pow_coeff(x) or atom_in_pc(al):
            continue
        t = al.term
        key = (t.project(xs), t.drop(xs))
        lst = grouped.setdefault(key, [])
        if al not in lst:
            lst.append(al)
    out = []
    for (eta, sigma), A in grouped.items():
        cmax = max(abs(al.term.const) for al in A)
        g = 7 + 2 * log2_exact(lam(eta.norm_one() + cmax))
        V = tuple(sorted(eta.variables() - {x}))
        out.append(_Group(eta, sigma, tuple(A), g, eta.pow_coeff(x), V))
    return out


def _sub_pow(al: Formula, x: str, t: Term, n: int = 1) -> Formula:
    return scaled_substitute(al, _pow(x), t, n)


def _cases(group: _Group, x: str, state: SemState, introduced: set[Term]) -> list[tuple[Formula, dict[Formula, Formula]]]:
    """The case guards of one (eta, sigma) group with the replacement for its atoms."""
    A, g, a, V = group.A, group.g, group.a, group.V
    X = _pow(x)
    big = 1 << g
    out: list[tuple[Formula, dict[Formula, Formula]]] = []
    for j in range(g + 1):
        pj = Term.constant(1 << j)
        out.append((equal(X, pj), {al: _sub_pow(al, x, pj) for al in A}))
    for j in range(g + 1):
        for v in V:
            pv = _pow(v, 1 << j)
            guard = conj(greater(X, Term.constant(big)), equal(X, pv))
            out.append((guard, {al: _sub_pow(al, x, pv) for al in A}))
    beta = conj(greater(X, Term.constant(big)), *(greater(X, _pow(u, big)) for u in V))
    la = lam(a)
    lx = X * la
    sigma = group.sigma
    if sigma.is_zero():
        ls = ZERO
    else:
        ls = LambdaTerm(sigma).as_term(state)
        introduced.add(sigma.sign_canonical()[0])
    true_map = {al: TRUE for al in A}
    false_map = {al: FALSE for al in A}
    out.append((conj(beta, less(lx, ls), less(sigma, ZERO)), true_map))
    out.append((conj(beta, less(lx, ls), geq(sigma, ZERO)), false_map))
    out.append((conj(beta, equal(lx, ls)), {al: _sub_pow(al, x, ls, la) for al in A}))
    out.append((conj(beta, equal(lx, ls * 2)), {al: _sub_pow(al, x, ls * 2, la) for al in A}))
    if a < 0:
        out.append((conj(beta, greater(lx, ls * 2)), true_map))
    else:
        out.append((conj(beta, greater(lx, ls * 2)), false_map))
    return [(gd, mp) for gd, mp in out if gd is not FALSE]


def _max_guard(x: str, xs: Sequence[str]) -> Formula:
    return conj(*(geq(_pow(x), _pow(y)) for y in xs if y != x))


def lambda_guard(sigma: Term, w: str) -> Formula:
    """2^|w| <= |sigma| < 2*2^|w|."""
    W = _pow(w)
    lower = disj(conj(geq(sigma, ZERO), leq(W, sigma)), conj(less(sigma, ZERO), leq(W, -sigma)))
    return conj(lower, less(sigma, W * 2), less(-sigma, W * 2))


def nice_var(theta: Formula, xs: Iterable[str]) -> str | None:
    """Some x in xs whose power occurs only in power comparisons of ``theta``."""
    ats = list(atoms(theta))
    for x in xs:
        if all(atom_in_pc(al) for al in ats if al.term.pow_coeff(x)):
            return x
    return None


# ---------------------------------------------------------------------------
# semCover
# ---------------------------------------------------------------------------


def _gamma_x_iter(phi: Formula, x: str, xs: Sequence[str], state: SemState, introduced: set[Term]) -> Iterator[Formula]:
    groups = _groups(phi, x, frozenset(xs))
    case_lists = [_cases(gr, x, state, introduced) for gr in groups]
    head = _max_guard(x, xs)

    def rec(i: int, gamma: Formula) -> Iterator[Formula]:
        if gamma is FALSE:
            return
        if i == len(case_lists):
            out = conj(head, gamma)
            if out is not FALSE:
                yield out
            return
        for guard, mapping in case_lists[i]:
            yield from rec(i + 1, conj(guard, replace_atoms(gamma, mapping)))

    yield from rec(0, phi)


def _sigmas_in(gamma: Formula, state: SemState, introduced: set[Term]) -> list[Term]:
    fv = gamma.free_vars()
    return [s for s in introduced if state.sigma_registry[s] in fv]


def _delambda(gammas: Sequence[Formula], sigmas: Sequence[Term], state: SemState, wrong_w: bool = True) -> list[Formula]:
    out: list[Formula] = []
    if wrong_w:
        out.extend(_wrong_w(sigmas, state))
    for size in range(len(sigmas) + 1):
        for chosen in itertools.combinations(sigmas, size):
            rest = [s for s in sigmas if s not in chosen]
            head = conj(
                *(lambda_guard(s, state.sigma_registry[s]) for s in chosen),
                *(equal(s, ZERO) for s in rest),
            )
            if head is FALSE:
                continue
            for gamma in gammas:
                body = gamma
                for s in rest:
                    body = substitute(body, _pow(state.sigma_registry[s]), ZERO)
                th = conj(head, body)
                if th is not FALSE:
                    out.append(th)
    return out


def _wrong_w(sigmas: Sequence[Term], state: SemState) -> list[Formula]:
    # w_sigma is not lambda(sigma): these members make the universal over w harmless
    out = []
    for s in sigmas:
        th = conj(not_equal(s, ZERO), neg(lambda_guard(s, state.sigma_registry[s])))
        if th is not FALSE:
            out.append(th)
    return out


def _order(seq: Iterable[Term]) -> list[Term]:
    return sorted(set(seq), key=str)


def sem_cover(xs: Sequence[str], phi: Formula, state: SemState, ctx: Context | None = None) -> list[Pair]:
    """Semenov cover of ``exists xs. phi``; may append universal w-variables to ``state.pi_prime``."""
    xs = tuple(xs)
    if not xs:
        raise ContractError("semCover needs a non-empty variable vector")
    ctx = ctx or Context()
    ctx.counters["semcover"] += 1
    before = metrics(phi) if ctx.cfg.check_tables else None
    n_before = len(state.pi_prime)
    introduced: set[Term] = set()
    gammas: dict[Formula, None] = {}
    for x in xs:
        for gm in _gamma_x_iter(phi, x, xs, state, introduced):
            ctx.tick()
            if gm not in gammas:
                ctx.charge()
                gammas[gm] = None
    sigmas = _order(s for gm in gammas for s in _sigmas_in(gm, state, introduced))
    ctx.check_size(len(gammas) * (1 << len(sigmas)), "semCover")
    for s in sigmas:
        state.bind(state.sigma_registry[s])
    thetas = list(dict.fromkeys(_delambda(list(gammas), sigmas, state)))
    _post(thetas, xs, state, ctx)
    if before is not None:
        outs = [metrics(t) for t in thetas]
        added = len(state.pi_prime) - n_before
        ctx.violations.extend(tables.sem_round(before, len(xs), outs, len(thetas), added))
    ctx.emit("SemCoverCall", {"vars": len(xs), "gammas": len(gammas), "sigmas": len(sigmas), "outputs": len(thetas)})
    return [(xs, d) for th in thetas for d in split_or(th)]


def sem_cover_iter(xs: Sequence[str], phi: Formula, state: SemState, ctx: Context | None = None) -> Iterator[Pair]:
    """Lazy variant for backtracking: one case path at a time, lambda removed per path."""
    xs = tuple(xs)
    ctx = ctx or Context()
    ctx.counters["semcover"] += 1
    introduced: set[Term] = set()
    wrong_done: set[Term] = set()
    for x in xs:
        for gm in _gamma_x_iter(phi, x, xs, state, introduced):
            ctx.tick()
            sigmas = _order(_sigmas_in(gm, state, introduced))
            for s in sigmas:
                state.bind(state.sigma_registry[s])
            fresh = [s for s in sigmas if s not in wrong_done]
            wrong_done.update(fresh)
            for th in _wrong_w(fresh, state) + _delambda([gm], sigmas, state, wrong_w=False):
                _post([th], xs, state, ctx)
                for d in split_or(th):
                    yield xs, d


def _post(thetas: Sequence[Formula], xs: Sequence[str], state: SemState, ctx: Context) -> None:
    bound = {v for _, v in state.pi_prime}
    regs = set(state.sigma_registry.values())
    for th in thetas:
        if nice_var(th, xs) is None:
            raise ContractError(f"semCover output without a power-comparison-only variable: {th!r}")
        stray = (th.free_vars() & regs) - bound
        if stray:
            raise ContractError(f"lambda placeholder left unbound: {sorted(stray)}")
    if any(kind != FORALL for kind, _ in state.pi_prime):
        raise ContractError("the definitional prefix must be universal")


# ---------------------------------------------------------------------------
# Linearise
# ---------------------------------------------------------------------------


def _pc_only_vars(theta: Formula, xs: Sequence[str]) -> list[str]:
    spoiled: set[str] = set()
    for al in set(atoms(theta)):
        if not atom_in_pc(al):
            spoiled.update(v for v, _ in al.term.pows)
    return [x for x in xs if x not in spoiled]


def congruence_rewrite(x: str, q: int, r: int) -> Formula:
    """q | 2^|x| - r as a constraint on |x|."""
    ax = Term.absolute(x)
    sol = solve_pow_congruence(q, r)
    if isinstance(sol, Unsat):
        return FALSE
    if isinstance(sol, Single):
        return equal(ax, Term.constant(sol.s))
    # exponents below s are excluded even when they fall on the progression
    return conj(geq(ax, Term.constant(sol.s)), dvd(sol.t, ax - sol.s))


def _linearise_atom(al: Formula, x: str) -> Formula:
    t = al.term
    a = t.pow_coeff(x)
    if not a:
        return al
    if isinstance(al, Dvd):
        return congruence_rewrite(x, al.q, (-t.const) % al.q)
    ax = Term.absolute(x)
    if len(t.pows) == 1:
        b = -t.const
        if a > 0 and b > 0:
            return less(ax, Term.constant(ceil_log2_ratio(b, a)))
        if a < 0 and b < 0:
            return greater(ax, Term.constant(floor_log2_ratio(-b, -a)))
        return lt(t)
    (y, cy), = [p for p in t.pows if p[0] != x]
    b = -cy
    ay = Term.absolute(y)
    if a > 0 and b > 0:
        return less(ax, ay + ceil_log2_ratio(b, a))
    if a < 0 and b < 0:
        return greater(ax, ay + floor_log2_ratio(-b, -a))
    return lt(t)


def linearise_formula(theta: Formula, xs: Sequence[str]) -> Formula:
    nice = set(_pc_only_vars(theta, xs))
    if not nice:
        return theta

    def fn(al: Formula) -> Formula:
        # a rewritten atom has no power left, so one variable per atom suffices
        for v, _ in al.term.pows:
            if v in nice:
                return _linearise_atom(al, v)
        return al

    return map_atoms(theta, fn)


def linearise(S: Sequence[Pair], fragment: Fragment | str, ctx: Context | None = None) -> list[Pair]:
    """Take logarithms of power comparisons (a no-op in Sem mode)."""
    if Fragment.parse(fragment) is Fragment.SEM:
        return list(S)
    ctx = ctx or Context()
    ctx.counters["linearise"] += 1
    out = [(xs, linearise_formula(th, xs)) for xs, th in S]
    if ctx.cfg.check_tables and out:
        n = max(len(xs) for xs, _ in S)
        ins = [metrics(th) for _, th in S]
        outs = [metrics(th) for _, th in out]
        ctx.violations.extend(tables.linearise_round(ins, outs, n))
    ctx.emit("LineariseCall", {"pairs": len(out)})
    result: list[Pair] = []
    for xs, th in out:
        result.extend((xs, d) for d in split_or(th))
    return result
