import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from expq.errors import ContractError
from expq.formula import (
    EXISTS,
    FALSE,
    FORALL,
    TRUE,
    And,
    Dvd,
    Lt,
    Not,
    PrenexFormula,
    atoms,
    conj,
    dvd,
    exists,
    forall,
    lt,
    neg,
    normalize,
    scaled_substitute,
    substitute,
    to_prenex,
)
from expq.fragments import Fragment, atom_in_pc, div_is_simple, formula_in_oct, fragment_check
from expq.metrics import metrics
from expq.oracle import eval_qf, evaluate
from expq.parser import parse
from expq.term import Term

from randgen import rand_qf, rand_sentence

X, Y, Z, W = (Term.var(v) for v in "xyzw")
PX, PY = Term.power("x"), Term.power("y")


# normalize -------------------------------------------------------------------


def test_ground_comparison_folds():
    assert lt(Term.constant(3) - 5) is TRUE
    assert lt(Term.constant(5) - 3) is FALSE


def test_scaled_linear_bound():
    # 2x < 7  ->  x <= 3, i.e. x - 4 < 0
    assert lt(X * 2 - 7) == Lt(X - 4)


def test_negative_coefficient_bound():
    # -3x < 7  ->  x >= ceil(-6/3) = -2, i.e. -x - 3 < 0
    f = lt(X * -3 - 7)
    assert all(eval_qf(f, {"x": v}) == (-3 * v < 7) for v in range(-20, 20))
    assert f == Lt(-X - 3)


def test_sign_trivial_power_inequality():
    assert lt(PX * 2 + 1) is FALSE
    assert lt(-PX * 3) is TRUE


def test_div_trivialities():
    assert dvd(1, X + 5) is TRUE
    assert dvd(4, Term.constant(8)) is TRUE
    assert dvd(4, Term.constant(6)) is FALSE


def test_div_coefficients_reduced():
    a = dvd(5, X * 7 - 13)
    assert isinstance(a, Dvd)
    assert all(0 <= c < 5 for c in a.term.coefficients())
    assert 0 <= a.term.const < 5


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 2**32))
def test_normalize_idempotent(seed):
    rng = random.Random(seed)
    f = rand_qf(rng, 3, lin=("x", "y"), pw=("y", "z"), absv=("w",))
    once = normalize(f)
    assert normalize(once) == once


def test_normalize_idempotent_corpus():
    rng = random.Random(7)
    for _ in range(10_000):
        f = rand_qf(rng, 2, lin=("x", "y"), pw=("z",), absv=("x",))
        once = normalize(f)
        assert normalize(once) == once


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32))
def test_div_atoms_normalized(seed):
    rng = random.Random(seed)
    f = rand_qf(rng, 3, lin=("x", "y"), pw=("z",), moduli=(2, 3, 7, 12))
    for a in atoms(f):
        if isinstance(a, Dvd):
            assert all(0 <= c < a.q for c in a.term.coefficients())
            assert 0 <= a.term.const < a.q


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32))
def test_constructors_preserve_truth(seed):
    # the folding constructors must agree with evaluating the raw syntax
    rng = random.Random(seed)
    t = Term.constant(rng.randint(-30, 30)) + Term.var("x", rng.randint(-5, 5)) + Term.power("y", rng.randint(-5, 5))
    q = rng.randint(1, 9)
    for xv, yv in itertools.product(range(-6, 7), range(-6, 7)):
        env = {"x": xv, "y": yv}
        v = t.evaluate(env)
        assert eval_qf(lt(t), env) == (v < 0)
        assert eval_qf(dvd(q, t), env) == (v % q == 0)


# substitution ------------------------------------------------------------------


def test_substitute_power_keeps_linear():
    f = lt(PX + X)
    assert substitute(f, PX, Term.constant(5)) == lt(X + 5)


def test_substitute_variable():
    assert substitute(lt(X), X, Y + 1) == lt(Y + 1)


def test_substitute_power_by_multiple():
    f = lt(PX * 3 - PY * 5 - Z)
    assert substitute(f, PX, PY * 4) == lt(PY * 7 - Z)


def test_substitute_variable_in_power_rejected():
    with pytest.raises(ContractError):
        substitute(lt(PX + X), X, Y)


def test_scaled_substitute_plain():
    assert scaled_substitute(lt(X + Y), X, Z, 1) == lt(Z + Y)


def test_scaled_substitute_inequality():
    # 2x + 1 < 0 with x := w/3: 2w + 3 < 0
    assert scaled_substitute(Lt(X * 2 + 1), X, W, 3) == lt(W * 2 + 3)


def test_scaled_substitute_divisibility():
    assert scaled_substitute(dvd(5, X + 2), X, W, 2) == dvd(10, W + 4)


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 2**32), st.integers(1, 4))
def test_scaled_substitute_semantics(seed, n):
    # with w = n*x the scaled formula says the same thing about x
    rng = random.Random(seed)
    f = rand_qf(rng, 2, lin=("x", "y"), moduli=(2, 3, 5))
    g = scaled_substitute(f, X, W, n)
    for xv, yv in itertools.product(range(-7, 8), range(-7, 8)):
        assert eval_qf(f, {"x": xv, "y": yv}) == evaluate(g, {"w": n * xv, "y": yv, "x": xv})


# metrics ------------------------------------------------------------------------


def test_metrics_true_fmod():
    assert metrics(TRUE).fmod == 1


def test_metrics_linterms():
    m = metrics(lt(X + 3))
    assert m.linterms == frozenset({Term.constant(0), Term.constant(2), X + 3})
    assert X in m.homterms


def test_metrics_boolnum():
    a, b = lt(X), lt(Y - 1)
    assert metrics(Not(And((a, b)))).boolnum == 2


def test_metrics_example_maxvars():
    m = metrics(parse("3*pow(x) - 5*pow(y) - z < 0"))
    assert m.maxvars == 3
    assert m.norminf_homterms == 5


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32))
def test_homterm_norm_at_most_linterm_norm(seed):
    rng = random.Random(seed)
    f = rand_qf(rng, 3, lin=("x", "y"), pw=("z",))
    m = metrics(f)
    assert m.norminf_homterms <= m.norminf_linterms


# fragments ----------------------------------------------------------------------


def test_pc_atom():
    assert atom_in_pc(Lt(PX * 3 - PY * 5))


def test_oct_formula():
    assert formula_in_oct(conj(lt(X - Y - 3), dvd(4, X - 1)))
    assert not formula_in_oct(lt(X * 2 - Y))


def test_mixed_variable_not_sem():
    assert not fragment_check(exists("x", lt(PX + X)), Fragment.SEM)


def test_simple_divisibility():
    assert div_is_simple(dvd(3, PX - 1))
    assert div_is_simple(dvd(3, X - 2))
    assert not div_is_simple(dvd(3, PX + X))


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32))
def test_qf_check_iff_no_quantifier(seed):
    rng = random.Random(seed)
    f = rand_qf(rng, 2, lin=("x", "y"))
    assert fragment_check(f, Fragment.QF)
    g = exists("x", lt(X - Y))
    assert not fragment_check(conj(lt(Y), g), Fragment.QF)


# prenex -------------------------------------------------------------------------


def test_prenex_unchanged():
    f = exists("x", forall("y", lt(X - Y)))
    p = to_prenex(f)
    assert p.prefix == ((EXISTS, "x"), (FORALL, "y"))
    assert p.matrix == lt(X - Y)


def test_prenex_negated_exists():
    p = to_prenex(neg(exists("x", lt(X - Y))))
    assert [k for k, _ in p.prefix] == [FORALL]
    v = p.prefix[0][1]
    assert p.matrix == neg(lt(Term.var(v) - Y))


def test_prenex_renames_apart():
    f = conj(exists("x", lt(X - Y)), lt(X))
    p = to_prenex(f)
    (kind, v), = p.prefix
    assert kind == EXISTS and v != "x"
    assert "x" in p.matrix.free_vars()


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32))
def test_prenex_equivalent(seed):
    rng = random.Random(seed)
    inner = rand_sentence(rng, ("x", "y"), depth=1, const=3, coeff=2, div_p=0.2)
    f = conj(inner, disj_or_neg(rng, rand_sentence(rng, ("x", "z"), depth=1, const=3, coeff=2, div_p=0.2)))
    p = to_prenex(f)
    assert isinstance(p, PrenexFormula)
    assert evaluate(f, {}, bound=2) == evaluate(p.to_formula(), {}, bound=2)


def disj_or_neg(rng, f):
    return neg(f) if rng.random() < 0.5 else f


def test_oct_accepts_negated_divisibility_and_abs_cases():
    from expq.formula import Dvd

    assert formula_in_oct(Dvd(3, -X + 1))
    assert formula_in_oct(Dvd(2, Term.absolute("x") + 1))
    assert not formula_in_oct(Dvd(2, X * 2 + 1))
