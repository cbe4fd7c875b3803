from __future__ import annotations

import random

import pytest

from eqlog import (
    analyze,
    build_needs_graph,
    never_add_sets,
    parse_program,
    parse_term,
    prop1_has_cycle,
    prop2_termination_condition,
    prop3_efficiency_condition,
    prop4_efficiency_condition_term,
    prunable_rules,
    prune_program,
    reachable_defined_symbols,
    to_dot,
)
from eqlog.analysis import OpCount, cycle_vertices, term_vertices
from eqlog.terms import (
    BOOL_TYPE, INT_TYPE, OP_SYMBOLS, App, IntLit, Symbol, Var, is_literal, make_program, subterms,
)
from generators import random_goal, random_program

FIB, F = Symbol("fib", 1), Symbol("f", 2)
A, FA = Symbol("a", 0), Symbol("f", 1)


# -- brute-force oracles --------------------------------------------------

def oracle_edges(program):
    edges = set()
    for r in program.rules:
        for t in subterms(r.rhs):
            if isinstance(t, App):
                edges.add((r.head, t.symbol))
            elif is_literal(t):
                edges.add((r.head, t))
    return edges


def oracle_closure(edges):
    """reach[v] = vertices reachable from v by one or more edges."""
    vertices = {v for e in edges for v in e}
    reach = {v: {b for a, b in edges if a == v} for v in vertices}
    changed = True
    while changed:
        changed = False
        for v in vertices:
            extra = set().union(*(reach[w] for w in reach[v])) - reach[v] if reach[v] else set()
            if extra:
                reach[v] |= extra
                changed = True
    return reach


def oracle_props(program, goal):
    edges = oracle_edges(program)
    reach = oracle_closure(edges)
    vertices = set(reach)
    on_cycle = {v for v in vertices if v in reach[v]}
    indeg = {v: sum(1 for a, b in edges if b == v) for v in vertices}
    outdeg = {v: sum(1 for a, b in edges if a == v) for v in vertices}
    sources = {v for v in term_vertices(goal) if v in vertices}
    reach0 = {s: reach[s] | {s} for s in sources}
    p1 = bool(on_cycle)
    p2 = any(on_cycle & r for r in reach0.values())
    p3 = any(indeg[v] >= 1 and outdeg[v] >= 1 for v in vertices)
    p4 = any(indeg[v] > 1 and outdeg[v] >= 1 and sum(v in r for r in reach0.values()) >= 2
             for v in vertices)
    starts = {v for v in term_vertices(goal) if isinstance(v, Symbol)}
    keep = set()
    for s in starts:
        keep |= ({s} | reach.get(s, set()))
    keep &= set(program.defined)
    return p1, p2, p3, p4, keep


# -- worked examples ------------------------------------------------------

def test_fib_edges(p_fib):
    g = build_needs_graph(p_fib)
    assert g.edges == {
        (FIB, F), (FIB, OP_SYMBOLS[">"]), (FIB, IntLit(1)),
        (F, FIB), (F, OP_SYMBOLS["-"]), (F, OP_SYMBOLS["+"]), (F, IntLit(1)), (F, IntLit(2)),
    }


def test_loop_edges(p_loop):
    g = build_needs_graph(p_loop)
    assert g.edges == {(A, FA), (A, A)}
    assert g.out_degree(FA) == 0


def test_all_collapsing_has_no_edges():
    p = parse_program("vars x y; fst(x, y) -> x; snd(x, y) -> y;")
    g = build_needs_graph(p)
    assert g.edges == frozenset() and g.vertices == frozenset()


def test_prop1_examples(p_fib, p_loop):
    assert prop1_has_cycle(build_needs_graph(p_fib))
    assert prop1_has_cycle(build_needs_graph(p_loop))
    assert not prop1_has_cycle(build_needs_graph(parse_program("vars x; g(x) -> h(x); h(x) -> 0;")))


def test_prop2_examples(p_fib):
    g = build_needs_graph(p_fib)
    assert prop2_termination_condition(g, parse_term("fib(2)", p_fib))
    assert not prop2_termination_condition(g, parse_term("true", p_fib))
    assert not prop2_termination_condition(g, parse_term("7", p_fib))


def test_prop3_examples(p_fib, p_loop):
    assert prop3_efficiency_condition(build_needs_graph(p_fib))
    assert prop3_efficiency_condition(build_needs_graph(p_loop))
    assert not prop3_efficiency_condition(build_needs_graph(parse_program("vars x; g(x) -> 0;")))


def test_prop4_examples(p_fib):
    g = build_needs_graph(p_fib)
    for text in ("fib(2)", "fib(3) + fib(4)"):
        goal = parse_term(text, p_fib)
        assert prop4_efficiency_condition_term(g, goal) == oracle_props(p_fib, goal)[3]
    assert not prop4_efficiency_condition_term(g, parse_term("fib(2)", p_fib))
    empty = build_needs_graph(parse_program(""))
    assert not prop4_efficiency_condition_term(empty, IntLit(1))


def test_prop4_shared_callee():
    p = parse_program("vars x; l(x) -> s(x); r(x) -> s(x); s(x) -> t(x); mk(x) -> pair(x, x);")
    g = build_needs_graph(p)
    assert prop4_efficiency_condition_term(g, parse_term("pair(l(1), r(2))", p))
    # one goal symbol reaching s twice is not enough
    assert not prop4_efficiency_condition_term(g, parse_term("l(l(1))", p))


def test_reachable_and_pruning(p_fib):
    ext = parse_program(
        "vars x; fib(x) -> f(x > 1, x); f(true, x) -> fib(x - 1) + fib(x - 2);"
        " f(false, x) -> 1; dead(x) -> dead(x);")
    goal = parse_term("fib(2)", ext)
    assert reachable_defined_symbols(build_needs_graph(ext), goal) == {FIB, F}
    assert prunable_rules(ext, goal) == {4}
    assert [r.id for r in prune_program(ext, goal).rules] == [1, 2, 3]
    assert prunable_rules(p_fib, parse_term("3", p_fib)) == {1, 2, 3}
    assert reachable_defined_symbols(build_needs_graph(p_fib), parse_term("fib(2)", p_fib)) == {FIB, F}


def test_collapsing_only_symbol_is_kept():
    p = parse_program("vars x; id(x) -> x;")
    assert prunable_rules(p, parse_term("id(1)", p)) == set()


def test_never_add_fib(p_fib):
    nas = never_add_sets(p_fib, parse_term("fib(2)", p_fib))
    assert nas.eligible
    assert INT_TYPE not in nas.predefined_types
    # ">" in a rhs produces bool, so bool is out too
    assert BOOL_TYPE not in nas.predefined_types


def test_never_add_stream(p_stream):
    nas = never_add_sets(p_stream, parse_term("from(1, 3)", p_stream))
    assert not nas.eligible and nas.collapsing_rules == (2, 3)


def test_never_add_constant_rhs():
    p = parse_program("vars x; g(x) -> c; h(x) -> k(d);")
    nas = never_add_sets(p, parse_term("g(1)", p))
    assert Symbol("c", 0) not in nas.user_constants
    assert Symbol("d", 0) in nas.user_constants
    assert Symbol("k", 1) not in nas.outermost_safe_constructors


def test_never_add_cons_nil():
    p = parse_program("vars x; g(x) -> cons(x, nil);")
    nas = never_add_sets(p, parse_term("g(1)", p))
    assert Symbol("nil", 0) in nas.user_constants
    assert Symbol("cons", 2) not in nas.outermost_safe_constructors
    assert INT_TYPE in nas.predefined_types


def test_never_add_goal_operator_excludes_type():
    p = parse_program("vars x; g(x) -> box(x);")
    assert INT_TYPE in never_add_sets(p, parse_term("g(1)", p)).predefined_types
    assert INT_TYPE not in never_add_sets(p, parse_term("g(1 + 1)", p)).predefined_types
    assert never_add_sets(p, None).predefined_types == frozenset()


def test_report_and_recommendations(p_fib, p_stream):
    r = analyze(p_fib, parse_term("fib(2)", p_fib))
    assert (r.prop1_cycle_exists, r.prop2_cycle_reachable_from_term, r.prop3_efficiency_node_exists) == (True, True, True)
    assert "termination" in r.recommendation
    s = analyze(p_stream)
    assert s.prop2_cycle_reachable_from_term is None and s.prop4_efficiency_node_doubly_reachable is None
    assert not s.never_add_eligible
    assert any("collapsing" in d for d in s.diagnostics)
    acyclic = analyze(parse_program("vars x; g(x) -> h(x);"))
    assert not acyclic.prop1_cycle_exists
    assert "cannot improve termination" in acyclic.recommendation


def test_dot_output(p_loop, p_fib):
    loop = to_dot(build_needs_graph(p_loop))
    assert loop.count("shape=") == 2
    assert '"a" -> "f";' in loop and '"a" -> "a";' in loop
    assert to_dot(build_needs_graph(parse_program(""))) == "digraph needs {}\n"
    assert '"fib" -> "f";' in to_dot(build_needs_graph(p_fib))


# -- against the oracles ----------------------------------------------------

def test_random_programs_match_oracles():
    rng = random.Random(7)
    for _ in range(300):
        p = random_program(rng, n_defined=rng.randint(1, 5), n_rules=rng.randint(1, 8))
        goal = random_goal(rng, p)
        g = build_needs_graph(p)
        assert g.edges == oracle_edges(p)
        assert set(g.vertices) == {v for e in g.edges for v in e}
        p1, p2, p3, p4, keep = oracle_props(p, goal)
        assert prop1_has_cycle(g) == p1
        assert prop2_termination_condition(g, goal) == p2
        assert prop3_efficiency_condition(g) == p3
        assert prop4_efficiency_condition_term(g, goal) == p4
        assert reachable_defined_symbols(g, goal) == keep
        reach = oracle_closure(oracle_edges(p))
        assert cycle_vertices(g) == {v for v in reach if v in reach[v]}


# -- linear cost ----------------------------------------------------------

def _chain(n):
    """d0 -> d1 -> ... -> d(n-1) -> d0, each rule also building a constructor."""
    syms = [Symbol(f"d{i}", 1) for i in range(n)]
    box = Symbol("box", 2)
    x = Var("x")
    rules = [(App(syms[i], (x,)), App(syms[(i + 1) % n], (App(box, (x, IntLit(i % 7))),)))
             for i in range(n)]
    return make_program(rules, {"x"}), App(syms[0], (IntLit(0),))


def _fan(n):
    """Many callers of one shared helper; the goal mentions two callers."""
    helper = Symbol("h", 1)
    callers = [Symbol(f"c{i}", 1) for i in range(n - 1)]
    x = Var("x")
    rules = [(App(c, (x,)), App(helper, (App(OP_SYMBOLS["+"], (x, IntLit(1))),))) for c in callers]
    rules.append((App(helper, (x,)), App(Symbol("done", 1), (x,))))
    goal = App(Symbol("pair", 2), (App(callers[0], (IntLit(1),)), App(callers[-1], (IntLit(2),))))
    return make_program(rules, {"x"}), goal


def _cost(program, goal):
    ops = OpCount()
    g = build_needs_graph(program, ops)
    prop1_has_cycle(g, ops)
    prop2_termination_condition(g, goal, ops)
    prop3_efficiency_condition(g, ops)
    prop4_efficiency_condition_term(g, goal, 1, ops)
    reachable_defined_symbols(g, goal, ops)
    size = sum(1 for r in program.rules for _ in subterms(r.rhs))
    return ops.n / size


@pytest.mark.parametrize("family", [_chain, _fan])
def test_operation_counts_scale_linearly(family):
    ratios = [_cost(*family(n)) for n in (10**2, 10**3, 10**4, 10**5)]
    assert max(ratios) / min(ratios) < 1.5, ratios
