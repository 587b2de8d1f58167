"""Syntactic fragment membership: PC, Oct, Sem and QF."""

from __future__ import annotations

import itertools
from enum import Enum

from .formula import Dvd, Formula, Lt, PowerPred, atoms, atoms_with_scope, has_quantifier
from .term import Term


class Fragment(Enum):
    QF = "qf"
    SEM = "sem"

    @classmethod
    def parse(cls, name: str | "Fragment") -> "Fragment":
        if isinstance(name, Fragment):
            return name
        return cls(name.lower())


def atom_in_pc(a: Formula) -> bool:
    """Power comparison atoms: a*2^|x| < b*2^|y|, a*2^|x| < b, q | 2^|x| - r."""
    if isinstance(a, Lt):
        t = a.term
        if t.lins or t.abss:
            return False
        if len(t.pows) == 1:
            return True
        return len(t.pows) == 2 and t.const == 0
    if isinstance(a, Dvd):
        t = a.term
        return not t.lins and not t.abss and len(t.pows) == 1 and t.pows[0][1] == 1
    return False


def div_is_simple(a: Formula) -> bool:
    """``q | 2^|x| - r`` or ``q | x - r`` (``|x|`` counts as a linear unknown)."""
    if not isinstance(a, Dvd):
        return False
    coeffs = list(a.term.coefficients())
    return len(coeffs) == 1 and coeffs[0] == 1


def all_divs_simple(f: Formula) -> bool:
    return all(div_is_simple(a) for a in atoms(f) if isinstance(a, Dvd))


def _oct_atom(a: Formula) -> bool:
    t = a.term
    if t.pows:
        return False
    coeffs = list(t.coefficients())
    if isinstance(a, Dvd):
        # q | -x + r is q | x - r
        return len(coeffs) == 1 and abs(coeffs[0]) == 1
    return 1 <= len(coeffs) <= 2 and all(abs(c) == 1 for c in coeffs)


def _oct_atom_expanded(a: Formula) -> bool:
    # |x| stands for x or -x; the atom is octagonal if every sign choice is
    t = a.term
    if not t.abss:
        return _oct_atom(a)
    if t.pows:
        return False
    absvars = [v for v, _ in t.abss]
    for signs in itertools.product((1, -1), repeat=len(absvars)):
        u = t
        for v, sg in zip(absvars, signs):
            c = u.abs_coeff(v)
            u = u.without_abs(v) + Term.var(v, sg * c)
        if u.is_ground():
            continue
        if not _oct_atom(type(a)(u) if isinstance(a, Lt) else Dvd(a.q, u)):
            return False
    return True


def formula_in_oct(f: Formula, expand: bool = True) -> bool:
    """Integer octagon arithmetic.  ``|x|`` atoms are judged by their sign cases."""
    for a in set(atoms(f)):
        if isinstance(a, PowerPred):
            return False
        ok = _oct_atom_expanded(a) if expand else _oct_atom(a)
        if not ok:
            return False
    return True


def variable_partition_ok(f: Formula) -> bool:
    """Every variable occurs either always linearly or always in a power."""
    lin: set[str] = set()
    pw: set[str] = set()
    for a in atoms(f):
        if isinstance(a, PowerPred):
            lin |= a.term.variables()
            continue
        pw |= a.term.power_vars()
        lin |= a.term.linear_vars()
    return not (lin & pw)


def in_sem(f: Formula) -> bool:
    if not variable_partition_ok(f):
        return False
    for a, bound in atoms_with_scope(f):
        if isinstance(a, PowerPred):
            return False
        if isinstance(a, Dvd) and not div_is_simple(a):
            return False
        if bound and (a.term.variables() & bound) and not atom_in_pc(a):
            return False
    return True


def absorbable(phi: Formula, x: str) -> bool:
    """Would ``exists x. phi`` stay in Sem, given ``phi`` already is?"""
    for a in atoms(phi):
        t = a.term
        if x not in t.variables():
            continue
        if t.lin_coeff(x) or t.abs_coeff(x) or not atom_in_pc(a):
            return False
    return True


def fragment_check(f: Formula, frag: Fragment | str) -> bool:
    frag = Fragment.parse(frag)
    if frag is Fragment.QF:
        return not has_quantifier(f) and not any(isinstance(a, PowerPred) for a in atoms(f))
    return in_sem(f)
