from __future__ import annotations

import io
import random
from pathlib import Path

import pytest

from corpus import CORPUS, EQUAL_FIB
from eqlog import (
    EngineOptions,
    NoFiniteNormalForm,
    NormalForm,
    StepLimitReached,
    TablingEngine,
    normalize_tabled,
    parse_program,
    parse_term,
)
from eqlog.tabling import evaluate_op
from eqlog.terms import TRUE, App, IntLit, Symbol, make_program, subterms

GOLDEN = Path(__file__).parent / "golden"


def fresh(program, **kw):
    return TablingEngine(program, EngineOptions(**kw))


def test_intern_shares_subterms(p_fib):
    eng = fresh(p_fib)
    a = eng.intern(parse_term("fib(2) + fib(2)", p_fib))
    b = eng.intern(parse_term("fib(2)", p_fib))
    assert eng.render_table() == {0: "0:{2*}", 1: "1:{<fib 0>*}", 2: "2:{<+ 1 1>*}"}
    assert (a, b) == (2, 1)


def test_intern_folds_literal_arithmetic(p_fib):
    eng = fresh(p_fib)
    c = eng.intern(parse_term("2 + 3", p_fib))
    assert eng.format_class(c) == "2:{5*}"  # the folded <+ 0 1> is hidden
    assert eng.stats.builtin_evals == 1


def test_match_initial_fib(p_fib):
    eng = fresh(p_fib)
    root = eng.intern(parse_term("fib(2)", p_fib))
    assert eng.match(root, p_fib.rules[0]) == {"x": 0}
    assert eng.match(root, p_fib.rules[1]) is None


def test_apply_rule_one(p_fib):
    eng = fresh(p_fib)
    root = eng.intern(parse_term("fib(2)", p_fib))
    eng.apply(root, p_fib.rules[0], {"x": 0})
    assert eng.format_class(1) == "1:{<fib 0>, <f 3 0>*}"
    assert eng.format_class(3) == "3:{true*}"


def test_non_left_linear_match_uses_classes():
    p = parse_program(EQUAL_FIB)
    eng = fresh(p)
    c = eng.intern(parse_term("equal(fib(1), 1)", p))
    rule = p.rules[3]
    assert eng.match(c, rule) is None
    out = eng.normalize(parse_term("equal(fib(1), 1)", p))
    assert isinstance(out, NormalForm) and out.term == TRUE


def test_evaluate_op_typing():
    assert evaluate_op("+", IntLit(2), IntLit(3)) == IntLit(5)
    assert evaluate_op("==", TRUE, TRUE) == TRUE
    assert evaluate_op("==", IntLit(1), TRUE) is None
    assert evaluate_op("+", TRUE, IntLit(1)) is None
    assert evaluate_op("<", IntLit(1), IntLit(2)) == TRUE
    assert evaluate_op("*", IntLit(10**30), IntLit(10**30)) == IntLit(10**60)


def test_ill_typed_builtin_is_stuck():
    p = parse_program("vars x; g(x) -> x + 1;")
    out = normalize_tabled(p, parse_term("g(true)", p))
    assert isinstance(out, NormalForm)
    assert str(out.term) == "true + 1"


def test_golden_fib2_trace(p_fib):
    buf = io.StringIO()
    fresh(p_fib, trace=buf).normalize(parse_term("fib(2)", p_fib))
    assert buf.getvalue() == (GOLDEN / "fib2_trace.txt").read_text()


def test_incremental_reuse(p_fib):
    eng = fresh(p_fib)
    first = eng.normalize(parse_term("fib(2)", p_fib))
    again = eng.normalize(parse_term("fib(fib(2))", p_fib))
    assert first.term == again.term == IntLit(2)
    assert again.stats.total_rule_applications == 0


def test_loop_has_no_finite_normal_form(p_loop):
    out = normalize_tabled(p_loop, parse_term("a", p_loop))
    assert isinstance(out, NoFiniteNormalForm)
    assert out.stats.total_rule_applications == 1


def test_step_limit(p_fib):
    out = normalize_tabled(p_fib, parse_term("fib(10)", p_fib), EngineOptions(max_steps=5))
    assert isinstance(out, StepLimitReached)
    assert out.stats.total_rule_applications + out.stats.builtin_evals <= 5 + 10


def test_collapsing_rule_merges_into_argument(p_stream):
    out = normalize_tabled(p_stream, parse_term("from(1, 2)", p_stream))
    assert str(out.term) == "cons(1, cons(2, nil))"


def test_dont_reduce_skips_constructor_subtrees():
    p = parse_program("vars x; wrap(x) -> box(x); seed -> k;")
    on = normalize_tabled(p, parse_term("wrap(box(box(box(k))))", p))
    off = normalize_tabled(p, parse_term("wrap(box(box(box(k))))", p), EngineOptions(dont_reduce=False))
    assert on.term == off.term
    assert on.stats.match_attempts_skipped_dont_reduce > 0
    assert off.stats.match_attempts_skipped_dont_reduce == 0
    assert on.stats.match_attempts <= off.stats.match_attempts


def test_never_add_suppresses_entries():
    p = parse_program("vars x; len(nil) -> 0; len(cons(x, nil)) -> 1; tag(a) -> 1;")
    goal = parse_term("len(cons(a, nil))", p)
    on = fresh(p)
    out = on.normalize(goal)
    off = normalize_tabled(p, goal, EngineOptions(never_add=False))
    assert out.term == off.term == IntLit(1)
    assert out.stats.dependency_entries_suppressed_never_add > 0
    assert off.stats.dependency_entries_suppressed_never_add == 0
    assert on.audit() == []


def test_never_add_demoted_by_later_goal():
    p = parse_program("vars x; g(x) -> box(x);")
    eng = fresh(p)
    eng.normalize(parse_term("g(3)", p))
    assert any(s.never_add for eq in eng.classes.values() for s in eq.members)
    eng.normalize(parse_term("g(3 + 1)", p))
    assert not any(s.never_add for eq in eng.classes.values() for s in eq.members)
    assert eng.audit() == []


def test_dont_add_snapshot(p_fib):
    eng = fresh(p_fib)
    eng.normalize(parse_term("fib(2)", p_fib))
    snap = eng.classify_dont_add_snapshot()
    # class 3 also holds the hidden folded <> 0 2>, and operators are not
    # constructors for signature classes
    assert not snap[eng.find(3)]
    p = parse_program("vars x; wrap(x) -> box(x, x); seed -> k;")
    eng = fresh(p)
    out = eng.normalize(parse_term("wrap(box(k, k))", p))
    snap = eng.classify_dont_add_snapshot()
    inner = eng.find(eng.intern(parse_term("box(k, k)", p)))
    assert snap[inner] and snap[eng.find(eng.intern(parse_term("k", p)))]
    assert not snap[eng.find(eng.root)]  # holds the reduced <wrap ...>
    assert str(out.term) == "box(box(k, k), box(k, k))"


# -- congruence closure against a naive oracle -----------------------------

def naive_congruence(terms, pairs):
    """Smallest congruence on the subterms of ``terms`` containing ``pairs``."""
    universe = sorted({s for t in terms for s in subterms(t)}, key=repr)
    rep = {t: t for t in universe}

    def find(t):
        while rep[t] != t:
            t = rep[t]
        return t

    for a, b in pairs:
        rep[find(a)] = find(b)
    changed = True
    while changed:
        changed = False
        apps = [t for t in universe if isinstance(t, App) and t.args]
        for i, s in enumerate(apps):
            for t in apps[i + 1:]:
                if s.symbol == t.symbol and find(s) != find(t) and all(
                        find(x) == find(y) for x, y in zip(s.args, t.args)):
                    rep[find(s)] = find(t)
                    changed = True
    return {t: find(t) for t in universe}


def _random_ground(rng, depth):
    if depth == 0 or rng.random() < 0.3:
        return App(Symbol(rng.choice("abc"), 0))
    name = rng.choice("fg")
    arity = 1 if name == "f" else 2
    return App(Symbol(name, arity), tuple(_random_ground(rng, depth - 1) for _ in range(arity)))


@pytest.mark.parametrize("seed", range(40))
def test_merge_matches_naive_congruence(seed):
    rng = random.Random(seed)
    program = make_program([])
    terms = [_random_ground(rng, 4) for _ in range(8)]
    pairs = [(rng.choice(terms), rng.choice(terms)) for _ in range(3)]
    pairs = [(rng.choice(list(subterms(a))), rng.choice(list(subterms(b)))) for a, b in pairs]
    eng = fresh(program, never_add=False)
    for t in terms:
        eng.intern(t)
    for a, b in pairs:
        eng.merge(eng.intern(a), eng.intern(b))
    truth = naive_congruence(terms, pairs)
    universe = list(truth)
    for s in universe:
        for t in universe:
            same = eng.find(eng.intern(s)) == eng.find(eng.intern(t))
            assert same == (truth[s] == truth[t]), (s, t)
    assert eng.audit() == []


# -- corpus-wide invariants -------------------------------------------------

@pytest.mark.parametrize("case", CORPUS, ids=lambda c: c.name)
def test_audit_clean_after_every_step(case):
    problems = []

    def check(engine):
        problems.extend(engine.audit())

    eng = TablingEngine(case.program, EngineOptions(max_steps=2000, on_step=check))
    for goal in case.goal_terms():
        eng.normalize(goal)
    assert problems == []


@pytest.mark.parametrize("case", CORPUS, ids=lambda c: c.name)
def test_shared_engine_agrees_with_fresh_engines(case):
    shared = TablingEngine(case.program, EngineOptions(max_steps=2000))
    for goal in case.goal_terms():
        a = shared.normalize(goal)
        b = normalize_tabled(case.program, goal, EngineOptions(max_steps=2000))
        assert type(a) is type(b)
        if isinstance(a, NormalForm):
            assert a.term == b.term
