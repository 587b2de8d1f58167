"""Independent evaluation: ground and assignment-based truth, bounded search, sampling.

Nothing here reuses the normalizing machinery of the formula module; terms
are evaluated straight from their coefficient tables so that this module can
serve as a differential oracle for the solver.
"""

from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass, field
from typing import Iterator, Mapping

from .errors import ContractError
from .formula import (
    EXISTS,
    FALSE,
    TRUE,
    And,
    Dvd,
    Exists,
    Forall,
    Formula,
    Lt,
    Not,
    Or,
    PowerPred,
    PrenexFormula,
)
from .term import Term

Assignment = Mapping[str, int]


def _value(t: Term, env: Assignment) -> int:
    total = t.const
    try:
        for v, c in t.pows:
            total += c * 2 ** abs(env[v])
        for v, c in t.lins:
            total += c * env[v]
        for v, c in t.abss:
            total += c * abs(env[v])
    except KeyError as e:
        raise ContractError(f"no value for variable {e.args[0]}") from None
    return total


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and n & (n - 1) == 0


def evaluate(f: Formula, env: Assignment, bound: int | None = None) -> bool:
    """Truth of ``f`` under ``env``; quantifiers range over [-bound, bound] when a bound is given."""
    if f is TRUE:
        return True
    if f is FALSE:
        return False
    if isinstance(f, Lt):
        return _value(f.term, env) < 0
    if isinstance(f, Dvd):
        return _value(f.term, env) % f.q == 0
    if isinstance(f, PowerPred):
        return _is_power_of_two(_value(f.term, env))
    if isinstance(f, Not):
        return not evaluate(f.arg, env, bound)
    if isinstance(f, And):
        return all(evaluate(a, env, bound) for a in f.args)
    if isinstance(f, Or):
        return any(evaluate(a, env, bound) for a in f.args)
    if isinstance(f, (Exists, Forall)):
        if bound is None:
            raise ContractError("cannot evaluate a quantifier without a search bound")
        env = dict(env)
        rng = range(-bound, bound + 1)
        if isinstance(f, Exists):
            for v in rng:
                env[f.var] = v
                if evaluate(f.body, env, bound):
                    return True
            return False
        for v in rng:
            env[f.var] = v
            if not evaluate(f.body, env, bound):
                return False
        return True
    raise TypeError(f)


def eval_ground(f: Formula) -> bool:
    if f.free_vars():
        raise ContractError(f"formula is not ground: free {sorted(f.free_vars())}")
    return evaluate(f, {})


def eval_qf(f: Formula, env: Assignment) -> bool:
    missing = f.free_vars() - set(env)
    if missing:
        raise ContractError(f"assignment misses {sorted(missing)}")
    return evaluate(f, env)


def naive_eval(f: Formula, env: Assignment) -> bool:
    """Second evaluator: explicit post-order stack, no recursion, no short-circuit."""
    results: dict[int, bool] = {}
    stack: list[tuple[Formula, bool]] = [(f, False)]
    while stack:
        g, expanded = stack.pop()
        if id(g) in results:
            continue
        kids: tuple[Formula, ...] = ()
        if isinstance(g, Not):
            kids = (g.arg,)
        elif isinstance(g, (And, Or)):
            kids = g.args
        elif isinstance(g, (Exists, Forall)):
            raise ContractError("naive_eval handles quantifier-free formulas only")
        if kids and not expanded:
            stack.append((g, True))
            stack.extend((k, False) for k in kids)
            continue
        if g is TRUE:
            r = True
        elif g is FALSE:
            r = False
        elif isinstance(g, (Lt, Dvd, PowerPred)):
            total = g.term.const
            for v, c in g.term.pows:
                total += c * (1 << abs(env[v]))
            for v, c in g.term.lins:
                total += c * env[v]
            for v, c in g.term.abss:
                total += c * abs(env[v])
            if isinstance(g, Lt):
                r = total < 0
            elif isinstance(g, Dvd):
                r = total % g.q == 0
            else:
                r = _is_power_of_two(total)
        elif isinstance(g, Not):
            r = not results[id(g.arg)]
        elif isinstance(g, And):
            vals = [results[id(k)] for k in g.args]
            r = all(vals)
        else:
            vals = [results[id(k)] for k in g.args]
            r = any(vals)
        results[id(g)] = r
    return results[id(f)]


def _centered(bound: int) -> list[int]:
    out = [0]
    for i in range(1, bound + 1):
        out += [i, -i]
    return out


def bounded_witness_search(phi: PrenexFormula, bound: int, env: Assignment | None = None) -> dict[str, int] | None:
    """A witness with all values in [-bound, bound] for an existential prenex formula, if any."""
    if any(k != EXISTS for k, _ in phi.prefix):
        raise ContractError("bounded witness search needs an existential prefix")
    names = list(phi.bound)
    base = dict(env or {})
    vals = _centered(bound)
    for combo in itertools.product(vals, repeat=len(names)):
        a = dict(base)
        a.update(zip(names, combo))
        if evaluate(phi.matrix, a, bound):
            return dict(zip(names, combo))
    return None


@dataclass
class EquivalenceReport:
    samples_tried: int
    disagreements: list[dict] = field(default_factory=list)
    seed: int = 0

    @property
    def verdict(self) -> str:
        return "Agree" if not self.disagreements else "Disagree"

    def to_dict(self) -> dict:
        return {
            "samples_tried": self.samples_tried,
            "disagreements": self.disagreements,
            "verdict": self.verdict,
            "seed": self.seed,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _power_vars(f: Formula) -> set[str]:
    from .formula import atoms

    return {v for a in atoms(f) for v, _ in a.term.pows}


def sample_assignments(
    names: list[str],
    power_names: set[str],
    seed: int = 0,
    box: int = 8,
    n_random: int = 200,
    max_box: int = 5000,
) -> Iterator[dict[str, int]]:
    """Small-box points (all of them when few enough) followed by log-uniform random ones."""
    rng = random.Random(seed)
    k = len(names)
    side = 2 * box + 1
    if side**k <= max_box:
        for combo in itertools.product(range(-box, box + 1), repeat=k):
            yield dict(zip(names, combo))
    else:
        for _ in range(max_box):
            yield {v: rng.randint(-box, box) for v in names}
    for _ in range(n_random):
        a = {}
        for v in names:
            top = rng.randint(0, 64) if v in power_names else 2 ** rng.randint(0, 64)
            a[v] = rng.choice((-1, 1)) * rng.randint(0, top)
        yield a


def sample_equivalence(
    f1: Formula,
    f2: Formula,
    seed: int = 0,
    box: int = 8,
    n_random: int = 200,
    max_box: int = 5000,
    max_report: int = 5,
) -> EquivalenceReport:
    """Compare two quantifier-free formulas on sampled assignments."""
    names = sorted(f1.free_vars() | f2.free_vars())
    pw = _power_vars(f1) | _power_vars(f2)
    report = EquivalenceReport(0, seed=seed)
    for a in sample_assignments(names, pw, seed, box, n_random, max_box):
        report.samples_tried += 1
        if evaluate(f1, a) != evaluate(f2, a):
            if len(report.disagreements) < max_report:
                report.disagreements.append(dict(a))
    return report
