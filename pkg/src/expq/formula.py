"""Formula AST, normalization, substitution and prenex conversion.

Every node is immutable and hashable.  The lower-case constructors
(:func:`lt`, :func:`dvd`, :func:`conj`, ...) normalize as they build, so a
formula assembled through them is already in normal form; :func:`normalize`
simply rebuilds an arbitrary tree through the same constructors.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from math import gcd
from typing import Callable, Iterable, Iterator, Sequence

from .errors import ContractError
from .term import Term

EXISTS = "E"
FORALL = "A"


class Formula:
    __slots__ = ("_hash", "_fv")

    def free_vars(self) -> frozenset[str]:
        fv = self._fv
        if fv is None:
            fv = self._fv = self._compute_fv()
        return fv

    def _compute_fv(self) -> frozenset[str]:  # pragma: no cover - overridden
        raise NotImplementedError

    def __hash__(self):
        return self._hash

    def __repr__(self):
        from .parser import render

        return f"<{render(self)}>"


class _Const(Formula):
    __slots__ = ("value",)

    def __init__(self, value: bool):
        self.value = value
        self._hash = hash(("const", value))
        self._fv = frozenset()

    def __eq__(self, other):
        return self is other

    __hash__ = Formula.__hash__

    def __reduce__(self):
        return (_const, (self.value,))


TRUE = _Const(True)
FALSE = _Const(False)


def _const(value: bool) -> _Const:
    return TRUE if value else FALSE


class Lt(Formula):
    """``term < 0``."""

    __slots__ = ("term",)

    def __init__(self, term: Term):
        self.term = term
        self._hash = hash(("lt", term))
        self._fv = None

    def _compute_fv(self):
        return frozenset(self.term.variables())

    def __eq__(self, other):
        return self is other or (isinstance(other, Lt) and self._hash == other._hash and self.term == other.term)

    __hash__ = Formula.__hash__


class Dvd(Formula):
    """``q | term``."""

    __slots__ = ("q", "term")

    def __init__(self, q: int, term: Term):
        if q < 1:
            raise ContractError(f"divisibility modulus must be positive, got {q}")
        self.q = q
        self.term = term
        self._hash = hash(("dvd", q, term))
        self._fv = None

    def _compute_fv(self):
        return frozenset(self.term.variables())

    def __eq__(self, other):
        return self is other or (
            isinstance(other, Dvd) and self._hash == other._hash and self.q == other.q and self.term == other.term
        )

    __hash__ = Formula.__hash__


class Not(Formula):
    __slots__ = ("arg",)

    def __init__(self, arg: Formula):
        self.arg = arg
        self._hash = hash(("not", arg))
        self._fv = None

    def _compute_fv(self):
        return self.arg.free_vars()

    def __eq__(self, other):
        return self is other or (isinstance(other, Not) and self._hash == other._hash and self.arg == other.arg)

    __hash__ = Formula.__hash__


class _NAry(Formula):
    __slots__ = ("args",)
    tag = ""

    def __init__(self, args: Sequence[Formula]):
        self.args = tuple(args)
        self._hash = hash((self.tag, self.args))
        self._fv = None

    def _compute_fv(self):
        out: set[str] = set()
        for a in self.args:
            out |= a.free_vars()
        return frozenset(out)

    def __eq__(self, other):
        return self is other or (type(other) is type(self) and self._hash == other._hash and self.args == other.args)

    __hash__ = Formula.__hash__


class And(_NAry):
    __slots__ = ()
    tag = "and"


class Or(_NAry):
    __slots__ = ()
    tag = "or"


class _Quant(Formula):
    __slots__ = ("var", "body")
    tag = ""

    def __init__(self, var: str, body: Formula):
        self.var = var
        self.body = body
        self._hash = hash((self.tag, var, body))
        self._fv = None

    def _compute_fv(self):
        return self.body.free_vars() - {self.var}

    def __eq__(self, other):
        return self is other or (
            type(other) is type(self) and self._hash == other._hash and self.var == other.var and self.body == other.body
        )

    __hash__ = Formula.__hash__


class Exists(_Quant):
    __slots__ = ()
    tag = "exists"


class Forall(_Quant):
    __slots__ = ()
    tag = "forall"


class PowerPred(Formula):
    """``P(term)``: the term is a power of two.  Only exists before translation."""

    __slots__ = ("term",)

    def __init__(self, term: Term):
        self.term = term
        self._hash = hash(("pp", term))
        self._fv = None

    def _compute_fv(self):
        return frozenset(self.term.variables())

    def __eq__(self, other):
        return self is other or (isinstance(other, PowerPred) and self.term == other.term)

    __hash__ = Formula.__hash__


ATOMS = (Lt, Dvd, PowerPred)


def is_atom(f: Formula) -> bool:
    return isinstance(f, ATOMS)


# ---------------------------------------------------------------------------
# normalizing constructors
# ---------------------------------------------------------------------------


def cdiv(p: int, q: int) -> int:
    """Ceiling of p/q for any nonzero q."""
    return -((-p) // q)


def lt(t: Term) -> Formula:
    """Normalized ``t < 0``."""
    if t.is_ground():
        return _const(t.const < 0)
    pows, lins, abss, c = t.pows, t.lins, t.abss, t.const
    if not lins:
        # 2^|x| >= 1 and |x| >= 0: one-signed terms take their extreme value at 0
        coeffs = [a for _, a in pows] + [a for _, a in abss]
        extreme = c + sum(a for _, a in pows)
        if all(a > 0 for a in coeffs) and extreme >= 0:
            return FALSE
        if all(a < 0 for a in coeffs) and extreme < 0:
            return TRUE
    if not lins and not abss:
        return Lt(t)
    if not pows:
        if len(lins) == 1 and not abss:
            x, a = lins[0]
            if abs(a) >= 2:
                return Lt(_single_bound(a, c, Term.var(x)))
        elif len(abss) == 1 and not lins:
            x, a = abss[0]
            if abs(a) >= 2:
                return lt(_single_bound(a, c, Term.absolute(x)))
    return Lt(t)


def _single_bound(a: int, c: int, unit: Term) -> Term:
    # a*u < b with b = -c
    b = -c
    if a > 0:
        # u <= floor((b-1)/a)  <=>  u - floor((b-1)/a) - 1 < 0
        return unit - ((b - 1) // a) - 1
    # u >= ceil((b-1)/a)  <=>  -u + ceil((b-1)/a) - 1 < 0
    return -unit + cdiv(b - 1, a) - 1


def dvd(q: int, t: Term) -> Formula:
    """Normalized ``q | t`` with coefficients and constant in [0, q-1]."""
    if q < 1:
        raise ContractError(f"divisibility modulus must be positive, got {q}")
    if q == 1:
        return TRUE
    t = _mod_term(t, q)
    if t.is_ground():
        return _const(t.const == 0)
    g = q
    for c in t.coefficients():
        g = gcd(g, c)
    if g > 1:
        if t.const % g:
            return FALSE
        q //= g
        t = Term._raw(
            tuple((v, c // g) for v, c in t.pows),
            tuple((v, c // g) for v, c in t.lins),
            tuple((v, c // g) for v, c in t.abss),
            t.const // g,
        )
        if q == 1:
            return TRUE
        t = _mod_term(t, q)
        if t.is_ground():
            return _const(t.const == 0)
    coeffs = list(t.coefficients())
    if len(coeffs) == 1 and coeffs[0] != 1:
        # single unknown with unit coefficient mod q: scale by its inverse
        inv = pow(coeffs[0], -1, q)
        t = _mod_term(t * inv, q)
    return Dvd(q, t)


def _mod_term(t: Term, q: int) -> Term:
    return Term._raw(
        tuple((v, c % q) for v, c in t.pows if c % q),
        tuple((v, c % q) for v, c in t.lins if c % q),
        tuple((v, c % q) for v, c in t.abss if c % q),
        t.const % q,
    )


def neg(f: Formula) -> Formula:
    if f is TRUE:
        return FALSE
    if f is FALSE:
        return TRUE
    if isinstance(f, Not):
        return f.arg
    return Not(f)


def conj(*args: Formula) -> Formula:
    return conj_list(args)


def conj_list(args: Iterable[Formula]) -> Formula:
    seen: dict[Formula, None] = {}
    for a in args:
        if a is TRUE:
            continue
        if a is FALSE:
            return FALSE
        if isinstance(a, And):
            for b in a.args:
                seen.setdefault(b, None)
        else:
            seen.setdefault(a, None)
    if not seen:
        return TRUE
    items = list(seen)
    if len(items) == 1:
        return items[0]
    for a in items:
        if isinstance(a, Not) and a.arg in seen:
            return FALSE
    if _bounds_conflict(items):
        return FALSE
    items = _drop_weaker_bounds(items)
    if len(items) == 1:
        return items[0]
    return And(items)


def disj(*args: Formula) -> Formula:
    return disj_list(args)


def disj_list(args: Iterable[Formula]) -> Formula:
    seen: dict[Formula, None] = {}
    for a in args:
        if a is FALSE:
            continue
        if a is TRUE:
            return TRUE
        if isinstance(a, Or):
            for b in a.args:
                seen.setdefault(b, None)
        else:
            seen.setdefault(a, None)
    if not seen:
        return FALSE
    items = list(seen)
    if len(items) == 1:
        return items[0]
    for a in items:
        if isinstance(a, Not) and a.arg in seen:
            return TRUE
    return Or(items)


def implies(a: Formula, b: Formula) -> Formula:
    return disj(neg(a), b)


def exists(x: str, body: Formula) -> Formula:
    if x not in body.free_vars():
        return body
    return Exists(x, body)


def forall(x: str, body: Formula) -> Formula:
    if x not in body.free_vars():
        return body
    return Forall(x, body)


def quantify(kind: str, x: str, body: Formula) -> Formula:
    return exists(x, body) if kind == EXISTS else forall(x, body)


# comparison helpers --------------------------------------------------------


def _two_powers_only(t: Term) -> bool:
    return len(t.pows) == 2 and not t.lins and not t.abss


def less(t1: Term, t2: Term) -> Formula:
    return lt(t1 - t2)


def leq(t1: Term, t2: Term) -> Formula:
    d = t1 - t2
    if _two_powers_only(d):
        return _pow_leq(d)
    return lt(d - 1)


def _pow_leq(d: Term) -> Formula:
    # a*2^|X| - b*2^|Y| <= 0 kept in power-comparison shape
    (v1, c1), (v2, c2) = d.pows
    if (c1 > 0) == (c2 > 0):
        return lt(d - 1)  # sign-trivial, evaluated by lt
    if c1 < 0:
        (v1, c1), (v2, c2) = (v2, c2), (v1, c1)
    a, b = c1, -c2
    # a*2^X <= b*2^Y  iff  X <= Y + f  with f = floor(log2(b/a))
    f = b.bit_length() - a.bit_length() + 1
    while (a << max(f, 0)) > (b << max(-f, 0)):
        f -= 1
    while (a << max(f + 1, 0)) <= (b << max(-f - 1, 0)):
        f += 1
    # X < Y + f + 1
    k = f + 1
    if k >= 0:
        return lt(Term.power(v1) - Term.power(v2, 1 << k))
    return lt(Term.power(v1, 1 << -k) - Term.power(v2))


def greater(t1: Term, t2: Term) -> Formula:
    return lt(t2 - t1)


def geq(t1: Term, t2: Term) -> Formula:
    return leq(t2, t1)


def equal(t1: Term, t2: Term) -> Formula:
    return conj(leq(t1, t2), leq(t2, t1))


def not_equal(t1: Term, t2: Term) -> Formula:
    return disj(less(t1, t2), less(t2, t1))


# bounds propagation inside conjunctions ------------------------------------


def _unit_bound(f: Formula):
    """Interval constraint (key, lo, hi) implied by a one-unknown literal, else None."""
    positive = True
    if isinstance(f, Not):
        f = f.arg
        positive = False
    if not isinstance(f, Lt):
        return None
    t = f.term
    if len(t.pows) + len(t.lins) + len(t.abss) != 1:
        return None
    if t.pows:
        (x, a), kind = t.pows[0], "pow"
    elif t.lins:
        (x, a), kind = t.lins[0], "lin"
    else:
        (x, a), kind = t.abss[0], "abs"
    c = t.const
    if positive:
        # a*u <= -c-1
        if a > 0:
            return (kind, x), None, (-c - 1) // a
        return (kind, x), cdiv(-c - 1, a), None
    # a*u >= -c
    if a > 0:
        return (kind, x), cdiv(-c, a), None
    return (kind, x), None, (-c) // a


def _bounds_conflict(items: Sequence[Formula]) -> bool:
    bounds: dict = {}
    for f in items:
        b = _unit_bound(f)
        if b is None:
            continue
        key, lo, hi = b
        cur = bounds.get(key)
        if cur is None:
            cur = [1 if key[0] == "pow" else (0 if key[0] == "abs" else None), None]
            bounds[key] = cur
        if lo is not None and (cur[0] is None or lo > cur[0]):
            cur[0] = lo
        if hi is not None and (cur[1] is None or hi < cur[1]):
            cur[1] = hi
    for (kind, _), (lo, hi) in bounds.items():
        if lo is not None and hi is not None and lo > hi:
            return True
        if kind == "pow" and hi is not None:
            lo = max(lo, 1)
            p = 1 << max(lo - 1, 0).bit_length()
            if p > hi:
                return True
    return False


def _drop_weaker_bounds(items: list[Formula]) -> list[Formula]:
    # keep only the tightest positive lower and upper bound per unknown
    best: dict = {}
    for f in items:
        if not isinstance(f, Lt):
            continue
        b = _unit_bound(f)
        if b is None:
            continue
        key, lo, hi = b
        entry = best.setdefault(key, [None, None, None, None])
        if lo is not None and (entry[0] is None or lo > entry[0]):
            entry[0], entry[1] = lo, f
        if hi is not None and (entry[2] is None or hi < entry[2]):
            entry[2], entry[3] = hi, f
    keep = {e[1] for e in best.values()} | {e[3] for e in best.values()}
    return [f for f in items if not isinstance(f, Lt) or _unit_bound(f) is None or f in keep]


# ---------------------------------------------------------------------------
# traversal
# ---------------------------------------------------------------------------


def atoms(f: Formula) -> Iterator[Formula]:
    """All atom occurrences (with repetition across shared subtrees removed)."""
    seen: set[int] = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if id(g) in seen:
            continue
        seen.add(id(g))
        if isinstance(g, ATOMS):
            yield g
        elif isinstance(g, Not):
            stack.append(g.arg)
        elif isinstance(g, _NAry):
            stack.extend(reversed(g.args))
        elif isinstance(g, _Quant):
            stack.append(g.body)


def atoms_with_scope(f: Formula, bound: frozenset[str] = frozenset()) -> Iterator[tuple[Formula, frozenset[str]]]:
    """Atom occurrences together with the set of variables bound above them."""
    if isinstance(f, ATOMS):
        yield f, bound
    elif isinstance(f, Not):
        yield from atoms_with_scope(f.arg, bound)
    elif isinstance(f, _NAry):
        for a in f.args:
            yield from atoms_with_scope(a, bound)
    elif isinstance(f, _Quant):
        yield from atoms_with_scope(f.body, bound | {f.var})


def all_vars(f: Formula) -> set[str]:
    out: set[str] = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, ATOMS):
            out |= g.term.variables()
        elif isinstance(g, Not):
            stack.append(g.arg)
        elif isinstance(g, _NAry):
            stack.extend(g.args)
        elif isinstance(g, _Quant):
            out.add(g.var)
            stack.append(g.body)
    return out


def has_quantifier(f: Formula) -> bool:
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, _Quant):
            return True
        if isinstance(g, Not):
            stack.append(g.arg)
        elif isinstance(g, _NAry):
            stack.extend(g.args)
    return False


def map_atoms(f: Formula, fn: Callable[[Formula], Formula]) -> Formula:
    """Rebuild ``f`` through the normalizing constructors, rewriting each atom with ``fn``."""
    memo: dict[int, Formula] = {}

    def go(g: Formula) -> Formula:
        key = id(g)
        hit = memo.get(key)
        if hit is not None:
            return hit
        if isinstance(g, ATOMS):
            out = fn(g)
        elif isinstance(g, _Const):
            out = g
        elif isinstance(g, Not):
            out = neg(go(g.arg))
        elif isinstance(g, And):
            out = FALSE
            parts = []
            for a in g.args:
                r = go(a)
                if r is FALSE:
                    break
                parts.append(r)
            else:
                out = conj_list(parts)
        elif isinstance(g, Or):
            out = TRUE
            parts = []
            for a in g.args:
                r = go(a)
                if r is TRUE:
                    break
                parts.append(r)
            else:
                out = disj_list(parts)
        elif isinstance(g, Exists):
            out = exists(g.var, go(g.body))
        elif isinstance(g, Forall):
            out = forall(g.var, go(g.body))
        else:  # pragma: no cover
            raise TypeError(g)
        memo[key] = out
        return out

    return go(f)


def power_pred(t: Term) -> Formula:
    if t.is_ground():
        v = t.const
        return _const(v > 0 and v & (v - 1) == 0)
    return PowerPred(t)


def _renormalize_atom(a: Formula) -> Formula:
    return _rebuild(a, a.term)


def normalize(f: Formula) -> Formula:
    return map_atoms(f, _renormalize_atom)


def replace_atoms(f: Formula, mapping: dict[Formula, Formula]) -> Formula:
    if not mapping:
        return f
    return map_atoms(f, lambda a: mapping.get(a, a))


# ---------------------------------------------------------------------------
# substitution
# ---------------------------------------------------------------------------


def occurs_in_power(f: Formula, x: str) -> bool:
    return any(a.term.pow_coeff(x) for a in atoms(f))


def occurs_linearly(f: Formula, x: str) -> bool:
    return any(a.term.lin_coeff(x) or a.term.abs_coeff(x) for a in atoms(f))


def _rebuild(a: Formula, t: Term) -> Formula:
    if isinstance(a, Lt):
        return lt(t)
    if isinstance(a, Dvd):
        return dvd(a.q, t)
    return power_pred(t)


def substitute(f: Formula, target: Term, replacement: Term) -> Formula:
    """Replace every occurrence of ``target`` (a term ``x`` or ``2^|x|``) by ``replacement``.

    Substituting for a variable requires that it occurs only linearly.
    """
    kind, x = _target(target)
    if kind == "pow":
        def fn(a):
            return _rebuild(a, a.term.subst_pow(x, replacement)) if a.term.pow_coeff(x) else a
    else:
        if occurs_in_power(f, x):
            raise ContractError(f"cannot substitute for {x}: it occurs inside a power")

        def fn(a):
            t = a.term
            if not t.lin_coeff(x) and not t.abs_coeff(x):
                return a
            if t.abs_coeff(x):
                raise ContractError(f"cannot substitute for {x}: it occurs under |.|")
            return _rebuild(a, t.subst_lin(x, replacement))

    return map_atoms(f, fn)


def _target(target: Term) -> tuple[str, str]:
    if target.const == 0 and len(target.pows) == 1 and not target.lins and not target.abss and target.pows[0][1] == 1:
        return "pow", target.pows[0][0]
    if target.const == 0 and len(target.lins) == 1 and not target.pows and not target.abss and target.lins[0][1] == 1:
        return "lin", target.lins[0][0]
    raise ContractError(f"substitution target must be x or pow(x), got {target}")


def scaled_substitute(f: Formula, target: Term, replacement: Term, n: int) -> Formula:
    """``f[replacement / n  for target]``: atoms containing ``target`` are scaled by ``n``.

    ``a*target + t' < 0`` becomes ``a*replacement + n*t' < 0`` and
    ``q | a*target + t'`` becomes ``n*q | a*replacement + n*t'``.
    """
    if n < 1:
        raise ContractError(f"scaling factor must be positive, got {n}")
    kind, x = _target(target)

    if kind == "pow":
        def coeff(t):
            return t.pow_coeff(x)

        def rest(t):
            return t.without_pow(x)
    else:
        def coeff(t):
            return t.lin_coeff(x)

        def rest(t):
            return t.without_lin(x)

    def fn(a):
        t = a.term
        c = coeff(t)
        if not c:
            return a
        new = replacement * c + rest(t) * n
        if isinstance(a, Lt):
            return lt(new)
        if isinstance(a, Dvd):
            return dvd(a.q * n, new)
        if n != 1:
            raise ContractError("scaled substitution inside P(.) is undefined")
        return power_pred(new)

    return map_atoms(f, fn)


def expand_abs(f: Formula, x: str) -> Formula:
    """Replace atoms mentioning ``|x|`` by the two-case guard form on the sign of ``x``."""
    neg_x = Lt(Term.var(x))  # x < 0

    def fn(a):
        d = a.term.abs_coeff(x)
        if not d:
            return a
        base = a.term.without_abs(x)
        pos_case = _rebuild(a, base + Term.var(x, d))
        neg_case = _rebuild(a, base + Term.var(x, -d))
        return conj(disj(neg_x, pos_case), disj(neg(neg_x), neg_case))

    return map_atoms(f, fn)


def expand_all_abs(f: Formula) -> Formula:
    for x in sorted({v for a in atoms(f) for v, _ in a.term.abss}):
        f = expand_abs(f, x)
    return f


# ---------------------------------------------------------------------------
# fresh names
# ---------------------------------------------------------------------------


class NameSupply:
    """Fresh variable names that never collide with names already in use."""

    def __init__(self, taken: Iterable[str] = ()):
        self.taken = set(taken)
        self._counters: dict[str, Iterator[int]] = {}

    def reserve(self, names: Iterable[str]) -> None:
        self.taken.update(names)

    def fresh(self, prefix: str = "v") -> str:
        counter = self._counters.setdefault(prefix, itertools.count(1))
        while True:
            name = f"_{prefix}{next(counter)}"
            if name not in self.taken:
                self.taken.add(name)
                return name


# ---------------------------------------------------------------------------
# prenex form
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PrenexFormula:
    prefix: tuple[tuple[str, str], ...]
    matrix: Formula

    def __post_init__(self):
        names = [v for _, v in self.prefix]
        if len(set(names)) != len(names):
            raise ContractError("prefix variables must be pairwise distinct")

    @property
    def bound(self) -> tuple[str, ...]:
        return tuple(v for _, v in self.prefix)

    def to_formula(self) -> Formula:
        f = self.matrix
        for kind, v in reversed(self.prefix):
            f = Exists(v, f) if kind == EXISTS else Forall(v, f)
        return f

    def is_sentence(self) -> bool:
        return not (self.matrix.free_vars() - set(self.bound))

    def free_vars(self) -> frozenset[str]:
        return frozenset(self.matrix.free_vars() - set(self.bound))

    def blocks(self) -> list[tuple[str, tuple[str, ...]]]:
        out: list[tuple[str, list[str]]] = []
        for kind, v in self.prefix:
            if out and out[-1][0] == kind:
                out[-1][1].append(v)
            else:
                out.append((kind, [v]))
        return [(k, tuple(vs)) for k, vs in out]

    def alt(self) -> int:
        return len(self.blocks())


def rename_free(f: Formula, old: str, new: str) -> Formula:
    """Rename a variable in all its occurrences (all three term kinds)."""
    def ren(t: Term) -> Term:
        if old not in t.variables():
            return t
        return Term(
            [(new if v == old else v, c) for v, c in t.pows],
            [(new if v == old else v, c) for v, c in t.lins],
            [(new if v == old else v, c) for v, c in t.abss],
            t.const,
        )

    def go(g: Formula) -> Formula:
        if isinstance(g, Lt):
            return Lt(ren(g.term))
        if isinstance(g, Dvd):
            return Dvd(g.q, ren(g.term))
        if isinstance(g, PowerPred):
            return PowerPred(ren(g.term))
        if isinstance(g, _Const):
            return g
        if isinstance(g, Not):
            return Not(go(g.arg))
        if isinstance(g, _NAry):
            return type(g)([go(a) for a in g.args])
        if isinstance(g, _Quant):
            if g.var == old:
                return g
            return type(g)(g.var, go(g.body))
        raise TypeError(g)

    return go(f)


def _prefix_blocks(pre: list[tuple[str, str]]) -> list[tuple[str, list[str]]]:
    out: list[tuple[str, list[str]]] = []
    for k, v in pre:
        if out and out[-1][0] == k:
            out[-1][1].append(v)
        else:
            out.append((k, [v]))
    return out


def _merge_prefixes(results, dist: str, outer: str | None = None) -> tuple[list[tuple[str, str]], list[Formula]]:
    """Pull the prefixes of sibling subformulas in front of their connective.

    ``dist`` is the quantifier that distributes over the connective (exists
    over "or", forall over "and").  Blocks are aligned by alternation level;
    blocks of kind ``dist`` share variables position by position, the others
    are concatenated.  All bound names are pairwise distinct on entry, so the
    renaming cannot capture anything.  On a tie the block kind of the
    enclosing quantifier ``outer`` goes first, so it merges with that block.
    """
    other = EXISTS if dist == FORALL else FORALL
    blocks = [_prefix_blocks(pre) for pre, _ in results]

    def levels(first: str) -> int:
        return max((len(b) + (b[0][0] != first) for b in blocks if b), default=0)

    pref = outer or dist
    alt_pref = EXISTS if pref == FORALL else FORALL
    first = pref if levels(pref) <= levels(alt_pref) else alt_pref
    n = levels(first)
    aligned = []
    for b in blocks:
        b = list(b)
        if b and b[0][0] != first:
            b.insert(0, (first, []))
        aligned.append(b + [(None, [])] * (n - len(b)))
    prefix: list[tuple[str, str]] = []
    mats = [mat for _, mat in results]
    for lev in range(n):
        kind = first if lev % 2 == 0 else (other if first == dist else dist)
        if kind == dist:
            shared: list[str] = []
            for i, b in enumerate(aligned):
                for j, v in enumerate(b[lev][1]):
                    if j < len(shared):
                        mats[i] = rename_free(mats[i], v, shared[j])
                    else:
                        shared.append(v)
            prefix.extend((kind, v) for v in shared)
        else:
            for b in aligned:
                prefix.extend((kind, v) for v in b[lev][1])
    return prefix, mats


def to_prenex(f: Formula, names: NameSupply | None = None) -> PrenexFormula:
    """Standard left-to-right prenex transformation with alpha-renaming.

    Bound variables are renamed only where they clash with another bound
    variable or with a free variable, so an already-prenex formula with
    distinct bound names comes back unchanged.
    """
    if names is None:
        names = NameSupply(all_vars(f))
    free = set(f.free_vars())
    used: set[str] = set(free)

    def go(g: Formula, positive: bool, outer: str | None = None) -> tuple[list[tuple[str, str]], Formula]:
        if isinstance(g, (Lt, Dvd, PowerPred, _Const)):
            return [], g if positive else neg(g)
        if isinstance(g, Not):
            return go(g.arg, not positive, outer)
        if isinstance(g, _Quant):
            var = g.var
            body = g.body
            if var in used:
                new = names.fresh(re.sub(r"\d+$", "", var.lstrip("_")) or "v")
                body = rename_free(body, var, new)
                var = new
            used.add(var)
            kind = EXISTS if isinstance(g, Exists) else FORALL
            if not positive:
                kind = FORALL if kind == EXISTS else EXISTS
            pre, mat = go(body, positive, kind)
            return [(kind, var)] + pre, mat
        if isinstance(g, _NAry):
            is_and = isinstance(g, And) == positive
            results = [go(a, positive, outer) for a in g.args]
            prefix, parts = _merge_prefixes(results, FORALL if is_and else EXISTS, outer)
            return prefix, (And(parts) if is_and else Or(parts))
        raise TypeError(g)

    prefix, matrix = go(f, True)
    bound = {v for _, v in prefix}
    prefix = [(k, v) for k, v in prefix if v in matrix.free_vars() or v in bound]
    return PrenexFormula(tuple(prefix), matrix)


def nnf(f: Formula) -> Formula:
    """Push negations down to atoms, flipping quantifiers on the way."""

    def go(g: Formula, positive: bool) -> Formula:
        if isinstance(g, Not):
            return go(g.arg, not positive)
        if isinstance(g, And):
            parts = [go(a, positive) for a in g.args]
            return conj_list(parts) if positive else disj_list(parts)
        if isinstance(g, Or):
            parts = [go(a, positive) for a in g.args]
            return disj_list(parts) if positive else conj_list(parts)
        if isinstance(g, _Quant):
            body = go(g.body, positive)
            is_ex = isinstance(g, Exists) == positive
            return exists(g.var, body) if is_ex else forall(g.var, body)
        return g if positive else neg(g)

    return go(f, True)
