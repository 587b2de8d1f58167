"""The block-by-block worklist procedure, the P(.) pipeline and the existential search."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Sequence

from .config import Context, Limits, SolveConfig, Strategy, TraceEvent
from .errors import ContractError
from .formula import (
    EXISTS,
    FALSE,
    FORALL,
    TRUE,
    Formula,
    NameSupply,
    PowerPred,
    PrenexFormula,
    all_vars,
    atoms,
    And,
    conj_list,
    disj_list,
    exists,
    neg,
    nnf,
    occurs_in_power,
    to_prenex,
)
from .fragments import Fragment, absorbable, formula_in_oct, in_sem
from .metrics import metrics
from .oracle import eval_ground
from .parser import translate_pres_power
from .presburger import non_simple_divs, plan_elimination, pres_qe, pres_qe_iter, simplify, simplify_iter, split_or
from .semenov import SemState, linearise, linearise_formula, sem_cover, sem_cover_iter
from . import tables

__all__ = [
    "Limits",
    "SolveConfig",
    "Strategy",
    "TraceEvent",
    "MasterResult",
    "Decision",
    "master_procedure",
    "decide",
    "decide_pres_power",
    "decide_existential",
]

Pair = tuple[tuple[str, ...], Formula]


@dataclass
class MasterResult:
    """Outcome of one run: the eliminated formula plus the bookkeeping of the run."""

    prenex: PrenexFormula
    counters: dict = field(default_factory=dict)
    violations: list[str] = field(default_factory=list)
    outer_iterations: int = 0

    @property
    def formula(self) -> Formula:
        return self.prenex.to_formula()


@dataclass
class Decision:
    verdict: bool
    counters: dict = field(default_factory=dict)
    violations: list[str] = field(default_factory=list)
    stages: dict = field(default_factory=dict)


def _metrics_dict(f: Formula, ctx: Context) -> dict | None:
    if ctx.cfg.trace_sink is None or not ctx.cfg.trace_metrics:
        return None
    return metrics(f).to_dict()


def _choose_linear(xs: Sequence[str], phi: Formula) -> str | None:
    # cheapest elimination first; ties keep block order
    best, best_size = None, None
    for x in xs:
        if occurs_in_power(phi, x):
            continue
        size = plan_elimination(x, phi).size()
        if best_size is None or size < best_size:
            best, best_size = x, size
    return best


def _independent_groups(ys: Sequence[str], phi: Formula) -> list[tuple[tuple[str, ...], list[Formula]]] | None:
    """Split a conjunction into groups of conjuncts sharing no block variable.

    exists ys. (A and B) equals (exists ys_A. A) and (exists ys_B. B) when A and
    B have no block variable in common.  Returns None unless at least two
    groups exist.
    """
    if not isinstance(phi, And):
        return None
    yset = set(ys)
    parent = {y: y for y in ys}

    def find(y: str) -> str:
        while parent[y] != y:
            parent[y] = parent[parent[y]]
            y = parent[y]
        return y

    owned: list[tuple[Formula, list[str]]] = []
    for c in phi.args:
        vs = sorted(c.free_vars() & yset)
        owned.append((c, vs))
        for v in vs[1:]:
            parent[find(v)] = find(vs[0])
    roots = {find(y) for y in ys}
    if len(roots) < 2:
        return None
    out: dict[str, tuple[list[str], list[Formula]]] = {}
    for y in ys:
        out.setdefault(find(y), ([], []))[0].append(y)
    for c, vs in owned:
        if vs:
            out[find(vs[0])][1].append(c)
    return [(tuple(zs), cs) for zs, cs in out.values()]


def _check_precondition(phi: PrenexFormula, frag: Fragment) -> None:
    m = phi.matrix
    if any(isinstance(a, PowerPred) for a in atoms(m)):
        raise ContractError("P(.) must be translated before running the procedure")
    if frag is Fragment.QF:
        from .formula import has_quantifier

        if has_quantifier(m):
            raise ContractError("the matrix must be quantifier-free")
    else:
        if not in_sem(m):
            raise ContractError("the matrix is not in the Sem fragment")


class _Engine:
    def __init__(self, ctx: Context, oct_watch: bool = False, observer=None):
        self.ctx = ctx
        self.frag = ctx.fragment
        self.oct_watch = oct_watch
        # called as observer(xs, pending, done) at every inner-loop boundary
        self.observer = observer

    def _oct(self, before: Formula, outs: Sequence[Pair], label: str) -> None:
        if not self.oct_watch:
            return
        mb = metrics(before)
        for _, th in outs:
            self.ctx.violations.extend(tables.octagon_step(mb, metrics(th), label))

    def block(self, xs: tuple[str, ...], psi: Formula, state: SemState) -> list[Formula]:
        """Inner loop for one block: the set D covering exists xs. psi."""
        ctx = self.ctx
        Q: list[Pair] = []
        seen: set[Pair] = set()
        D: dict[Formula, None] = {}

        def push(items: Sequence[Pair]) -> None:
            # LIFO: the first produced item is popped first
            for it in reversed(items):
                if it[1] is FALSE or it in seen:
                    continue
                seen.add(it)
                Q.append(it)

        push([(xs, d) for d in split_or(psi)])
        while Q:
            ctx.tick()
            if self.observer is not None:
                self.observer(xs, list(Q), list(D))
            ys, phi = Q.pop()
            ctx.counters["pops"] += 1
            if ctx.cfg.trace_sink is not None:
                ctx.emit("Pop", {"vars": len(ys), "pending": len(Q)})
            if not ys:
                if phi is TRUE:
                    return [TRUE]
                D[phi] = None
                continue
            fv = phi.free_vars()
            if any(y not in fv for y in ys):
                push([(tuple(y for y in ys if y in fv), phi)])
                continue
            groups = _independent_groups(ys, phi)
            if groups is not None:
                ctx.counters["splits"] += 1
                parts = [c for c in phi.args if not (c.free_vars() & set(ys))]
                for zs, cs in groups:
                    parts.append(disj_list(self.block(zs, conj_list(cs), state)))
                push([((), conj_list(parts))])
                continue
            if self.frag is Fragment.SEM:
                x = next((y for y in ys if absorbable(phi, y)), None)
                if x is not None:
                    push([(tuple(y for y in ys if y != x), exists(x, phi))])
                    continue
            x = _choose_linear(ys, phi)
            if x is not None:
                outs = pres_qe(x, ys, phi, ctx)
                outs = [(tuple(y for y in zs if y != x), th) for zs, th in outs]
                self._oct(phi, outs, "presQE step")
                if any(th is TRUE for _, th in outs):
                    outs = [(outs[0][0], TRUE)]
                push(outs)
                continue
            outs = linearise(sem_cover(ys, phi, state, ctx), self.frag, ctx)
            self._oct(phi, outs, "semCover step")
            push(outs)
        return list(D)

    def run(self, phi: PrenexFormula) -> MasterResult:
        ctx = self.ctx
        ctx.names.reserve(all_vars(phi.to_formula()))
        _check_precondition(phi, self.frag)
        prefix = list(phi.prefix)
        matrix = phi.matrix
        if non_simple_divs(matrix):
            matrix = disj_list(simplify(matrix, ctx))
            ctx.emit("SimplifyCall", {"members": len(split_or(matrix))})
        alt = phi.alt()
        outer = 0
        pi_prime: list[tuple[str, str]] = []
        while prefix:
            outer += 1
            kind = prefix[-1][0]
            k = len(prefix)
            while k > 0 and prefix[k - 1][0] == kind:
                k -= 1
            xs = tuple(v for _, v in prefix[k:])
            rest = prefix[:k]
            psi = matrix if kind == EXISTS else nnf(neg(matrix))
            ctx.emit("BlockStart", {"kind": kind, "vars": len(xs)}, before=_metrics_dict(psi, ctx))
            t0 = time.monotonic()
            state = SemState(ctx.names)
            D = self.block(xs, psi, state)
            body = disj_list(D)
            ws = [w for _, w in state.pi_prime]
            if kind == EXISTS:
                new = [(FORALL, w) for w in ws]
                matrix = body
            else:
                new = [(EXISTS, w) for w in ws]
                matrix = nnf(neg(body))
            ctx.emit(
                "BlockEnd",
                {"kind": kind, "disjuncts": len(D), "definitional": len(ws)},
                after=_metrics_dict(matrix, ctx),
                wall=time.monotonic() - t0,
            )
            if not rest:
                pi_prime = new
                break
            prefix = rest + new
        if outer > max(alt, 1):
            ctx.violation(f"outer loop ran {outer} times for alternation {alt}")
        out = PrenexFormula(tuple(pi_prime), matrix)
        if not phi.free_vars() and pi_prime:
            raise ContractError("definitional quantifiers survived on a sentence")
        return MasterResult(out, dict(ctx.counters), list(ctx.violations), outer)


def master_procedure(
    phi: PrenexFormula | Formula,
    cfg: SolveConfig | None = None,
    ctx: Context | None = None,
    oct_watch: bool = False,
    observer=None,
) -> MasterResult:
    """Eliminate the quantifier prefix of ``phi`` block by block, innermost first.

    The result is equivalent to ``phi``; on a sentence it is a sentence of the
    configured fragment (quantifier-free in QF mode).
    """
    if ctx is None:
        ctx = Context(cfg)
    if not isinstance(phi, PrenexFormula):
        phi = to_prenex(phi, ctx.names)
    return _Engine(ctx, oct_watch, observer).run(phi)


def _ground_verdict(f: Formula) -> bool:
    return eval_ground(f)


def decide(phi: Formula | PrenexFormula, cfg: SolveConfig | None = None) -> Decision:
    """Truth of a \\presexp sentence (QF fragment)."""
    cfg = cfg or SolveConfig()
    ctx = Context(cfg)
    if not isinstance(phi, PrenexFormula):
        ctx.names.reserve(all_vars(phi))
        phi = to_prenex(phi, ctx.names)
    if phi.free_vars():
        raise ContractError(f"not a sentence: free {sorted(phi.free_vars())}")
    if cfg.strategy is Strategy.BACKTRACKING and all(k == EXISTS for k, _ in phi.prefix):
        v = decide_existential(phi, cfg, ctx)
        return Decision(v, dict(ctx.counters), list(ctx.violations))
    res = master_procedure(phi, ctx=ctx)
    return Decision(_ground_verdict(res.formula), dict(ctx.counters), list(ctx.violations))


def decide_pres_power(src: Formula, cfg: SolveConfig | None = None) -> Decision:
    """Truth of a sentence with P(.): Sem run, prenex, linearise, QF run on octagons, evaluate."""
    cfg = cfg or SolveConfig()
    names = NameSupply(all_vars(src))
    stage1 = translate_pres_power(src, names)
    if stage1.free_vars():
        raise ContractError(f"not a sentence: free {sorted(stage1.free_vars())}")
    sem_cfg = SolveConfig(Fragment.SEM, Strategy.EXHAUSTIVE, cfg.limits, cfg.trace_sink, cfg.check_tables, cfg.trace_metrics)
    ctx = Context(sem_cfg, names)
    r1 = master_procedure(stage1, ctx=ctx)
    ctx.tick()
    stage2 = to_prenex(r1.formula, names)
    ctx.tick()
    psi3 = linearise_formula(stage2.matrix, sorted(stage2.matrix.free_vars()))
    ctx.tick()
    stages = {"translated": stage1, "sem_result": r1.prenex, "prenex": stage2}
    if not formula_in_oct(psi3):
        raise ContractError("linearised matrix is not an octagon formula")
    stage3 = PrenexFormula(stage2.prefix, psi3)
    stages["octagon"] = stage3
    qf_cfg = SolveConfig(Fragment.QF, Strategy.EXHAUSTIVE, cfg.limits, cfg.trace_sink, cfg.check_tables, cfg.trace_metrics)
    ctx.cfg = qf_cfg
    r2 = master_procedure(stage3, ctx=ctx, oct_watch=cfg.check_tables)
    if cfg.check_tables:
        n = max(len(b) for _, b in stage3.blocks()) if stage3.prefix else 0
        ctx.violations.extend(tables.octagon_result(metrics(psi3), metrics(r2.formula), max(stage3.alt(), 1), n))
    stages["result"] = r2.prenex
    return Decision(_ground_verdict(r2.formula), dict(ctx.counters), list(ctx.violations), stages)


# ---------------------------------------------------------------------------
# existential backtracking
# ---------------------------------------------------------------------------


def decide_existential(phi: PrenexFormula, cfg: SolveConfig | None = None, ctx: Context | None = None) -> bool:
    """Depth-first search over the guess points of the procedure on an existential sentence.

    Every guess point enumerates a cover, so the sentence is true exactly when
    some path ends in a valid ground formula.
    """
    if ctx is None:
        ctx = Context(cfg or SolveConfig(strategy=Strategy.BACKTRACKING))
    if any(k != EXISTS for k, _ in phi.prefix):
        raise ContractError("decide_existential needs an existential prefix")
    if phi.free_vars():
        raise ContractError("decide_existential needs a sentence")
    ctx.names.reserve(all_vars(phi.to_formula()))
    state = SemState(ctx.names)
    failed: set[Pair] = set()

    def dfs(xs: tuple[str, ...], f: Formula) -> bool:
        ctx.tick()
        if f is FALSE or (xs, f) in failed:
            return False
        ctx.counters["nodes"] += 1
        ctx.charge()
        fv = f.free_vars()
        if not fv:
            ok = _ground_verdict(f)
        else:
            ys = tuple(y for y in xs if y in fv)
            x = _choose_linear(ys, f)
            if x is not None:
                rest = tuple(y for y in ys if y != x)
                ctx.counters["presqe"] += 1
                ok = any(dfs(rest, d) for m in pres_qe_iter(x, f, ctx) for d in split_or(m))
            else:
                ok = False
                for zs, th in sem_cover_iter(ys, f, state, ctx):
                    th = linearise_formula(th, zs)
                    if any(dfs(zs, d) for d in split_or(th)):
                        ok = True
                        break
        if not ok:
            failed.add((xs, f))
        return ok

    xs = tuple(phi.bound)
    for m in simplify_iter(phi.matrix, ctx):
        if any(dfs(xs, d) for d in split_or(m)):
            return True
    return False
