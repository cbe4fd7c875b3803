"""Static analysis of programs: the needs graph and what it says about tabling.

A defined symbol ``f`` *needs* ``g`` when ``g`` (a function symbol or a
literal constant) occurs in the right-hand side of a rule for ``f``.  The
graph answers four necessary-condition questions: can tabling help
termination (a cycle, one reachable from the goal) and can it save work
(a vertex that is both entered and left, one shared by two goal symbols).
None of the checks is sufficient.

All searches are iterative and linear in the size of the graph.  Pass an
:class:`OpCount` to observe the work done.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Union

from eqlog.terms import (
    BOOL_TYPE,
    INT_TYPE,
    OP_SYMBOLS,
    App,
    BoolLit,
    IntLit,
    Program,
    Symbol,
    Term,
    is_literal,
    literal_type,
    subterms,
)

Vertex = Union[Symbol, IntLit, BoolLit]

# Operand types each operator accepts and the type it produces.
OPERAND_TYPES: dict[str, frozenset[Symbol]] = {
    "+": frozenset({INT_TYPE}),
    "-": frozenset({INT_TYPE}),
    "*": frozenset({INT_TYPE}),
    ">": frozenset({INT_TYPE}),
    "<": frozenset({INT_TYPE}),
    "==": frozenset({INT_TYPE, BOOL_TYPE}),
}
RESULT_TYPE: dict[str, Symbol] = {
    "+": INT_TYPE, "-": INT_TYPE, "*": INT_TYPE,
    ">": BOOL_TYPE, "<": BOOL_TYPE, "==": BOOL_TYPE,
}


@dataclass
class OpCount:
    n: int = 0


def _tick(ops: OpCount | None, k: int = 1) -> None:
    if ops is not None:
        ops.n += k


@dataclass(frozen=True)
class NeedsGraph:
    vertices: frozenset[Vertex]
    edges: frozenset[tuple[Symbol, Vertex]]
    defined: frozenset[Symbol]
    succ: dict[Vertex, tuple[Vertex, ...]] = field(compare=False, repr=False)
    pred: dict[Vertex, tuple[Vertex, ...]] = field(compare=False, repr=False)

    def out_degree(self, v: Vertex) -> int:
        return len(self.succ.get(v, ()))

    def in_degree(self, v: Vertex) -> int:
        return len(self.pred.get(v, ()))


def term_vertices(term: Term) -> set[Vertex]:
    """Symbols and literal constants occurring in ``term``."""
    out: set[Vertex] = set()
    for t in subterms(term):
        if isinstance(t, App):
            out.add(t.symbol)
        elif is_literal(t):
            out.add(t)
    return out


def build_needs_graph(program: Program, ops: OpCount | None = None) -> NeedsGraph:
    defined = program.defined
    succ: dict[Vertex, list[Vertex]] = {}
    seen: set[tuple[Symbol, Vertex]] = set()
    for rule in program.rules:
        f = rule.head
        for t in subterms(rule.rhs):
            _tick(ops)
            if isinstance(t, App):
                g: Vertex = t.symbol
            elif is_literal(t):
                g = t
            else:
                continue
            if (f, g) not in seen:
                seen.add((f, g))
                succ.setdefault(f, []).append(g)
    pred: dict[Vertex, list[Vertex]] = {}
    for f, targets in succ.items():
        for g in targets:
            pred.setdefault(g, []).append(f)
    # Only defined symbols with an edge and their neighbours get vertices;
    # a defined symbol whose rules all collapse has no vertex.
    vertices = frozenset(succ) | frozenset(pred)
    return NeedsGraph(
        vertices=vertices,
        edges=frozenset(seen),
        defined=defined,
        succ={v: tuple(ts) for v, ts in succ.items()},
        pred={v: tuple(ps) for v, ps in pred.items()},
    )


def prop1_has_cycle(graph: NeedsGraph, ops: OpCount | None = None) -> bool:
    """Three-colour iterative DFS; a grey successor is a back edge."""
    WHITE, GREY, BLACK = 0, 1, 2
    colour = {v: WHITE for v in graph.vertices}
    for root in sorted(graph.vertices, key=_vertex_key):
        if colour[root] != WHITE:
            continue
        colour[root] = GREY
        stack = [(root, iter(graph.succ.get(root, ())))]
        while stack:
            v, it = stack[-1]
            advanced = False
            for w in it:
                _tick(ops)
                if colour[w] == GREY:
                    return True
                if colour[w] == WHITE:
                    colour[w] = GREY
                    stack.append((w, iter(graph.succ.get(w, ()))))
                    advanced = True
                    break
            if not advanced:
                colour[v] = BLACK
                stack.pop()
    return False


def strongly_connected_components(graph: NeedsGraph, ops: OpCount | None = None) -> list[list[Vertex]]:
    """Tarjan's algorithm without recursion."""
    index: dict[Vertex, int] = {}
    low: dict[Vertex, int] = {}
    on_stack: set[Vertex] = set()
    comp_stack: list[Vertex] = []
    comps: list[list[Vertex]] = []
    counter = 0
    for root in sorted(graph.vertices, key=_vertex_key):
        if root in index:
            continue
        index[root] = low[root] = counter
        counter += 1
        comp_stack.append(root)
        on_stack.add(root)
        work = [(root, iter(graph.succ.get(root, ())))]
        while work:
            v, it = work[-1]
            pushed = False
            for w in it:
                _tick(ops)
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    comp_stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(graph.succ.get(w, ()))))
                    pushed = True
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            if pushed:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
            if low[v] == index[v]:
                comp = []
                while True:
                    w = comp_stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                comps.append(comp)
    return comps


def cycle_vertices(graph: NeedsGraph, ops: OpCount | None = None) -> set[Vertex]:
    marked: set[Vertex] = set()
    for comp in strongly_connected_components(graph, ops):
        if len(comp) > 1 or (comp[0], comp[0]) in graph.edges:
            marked.update(comp)
    return marked


def reachable(graph: NeedsGraph, sources: Iterable[Vertex], ops: OpCount | None = None) -> set[Vertex]:
    """Vertices reachable by paths of length zero or more."""
    seen = set(sources)
    queue = deque(seen)
    while queue:
        v = queue.popleft()
        for w in graph.succ.get(v, ()):
            _tick(ops)
            if w not in seen:
                seen.add(w)
                queue.append(w)
    return seen


def goal_vertices(graph: NeedsGraph, goal: Term) -> set[Vertex]:
    return {v for v in term_vertices(goal) if v in graph.vertices}


def prop2_termination_condition(graph: NeedsGraph, goal: Term, ops: OpCount | None = None) -> bool:
    marked = cycle_vertices(graph, ops)
    if not marked:
        return False
    return not marked.isdisjoint(reachable(graph, goal_vertices(graph, goal), ops))


def prop3_efficiency_condition(graph: NeedsGraph, ops: OpCount | None = None) -> bool:
    for v in graph.vertices:
        _tick(ops)
        if graph.in_degree(v) >= 1 and graph.out_degree(v) >= 1:
            return True
    return False


def _has_walk(graph: NeedsGraph, v: Vertex, length: int) -> bool:
    """Is there a directed walk of ``length`` edges starting at ``v``?"""
    frontier = {v}
    for _ in range(length):
        frontier = {w for u in frontier for w in graph.succ.get(u, ())}
        if not frontier:
            return False
    return True


def prop4_efficiency_condition_term(graph: NeedsGraph, goal: Term, chain_length: int = 1,
                                    ops: OpCount | None = None) -> bool:
    """A shared vertex (in-degree > 1, onward chain of ``chain_length``) reached from two goal symbols.

    Two occurrences of one symbol in the goal count once.
    """
    candidates = {
        v for v in graph.vertices
        if graph.in_degree(v) > 1 and _has_walk(graph, v, chain_length)
    }
    _tick(ops, len(graph.vertices))
    if not candidates:
        return False
    # Each vertex remembers at most two distinct goal origins, so it is
    # enqueued at most twice and the search stays linear.
    origins: dict[Vertex, set[Vertex]] = {}
    queue: deque[tuple[Vertex, Vertex]] = deque()
    for s in goal_vertices(graph, goal):
        origins.setdefault(s, set()).add(s)
        queue.append((s, s))
    while queue:
        v, origin = queue.popleft()
        if v in candidates and len(origins[v]) >= 2:
            return True
        for w in graph.succ.get(v, ()):
            _tick(ops)
            seen = origins.setdefault(w, set())
            if origin not in seen and len(seen) < 2:
                seen.add(origin)
                queue.append((w, origin))
    return False


def reachable_defined_symbols(graph: NeedsGraph, goal: Term, ops: OpCount | None = None) -> set[Symbol]:
    # Goal symbols without a vertex (e.g. defined only by collapsing rules)
    # still need their rules, so start from every goal symbol.
    starts = {v for v in term_vertices(goal) if isinstance(v, Symbol)}
    return {v for v in reachable(graph, starts, ops) if isinstance(v, Symbol) and v in graph.defined}


def prunable_rules(program: Program, goal: Term, graph: NeedsGraph | None = None) -> set[int]:
    graph = graph or build_needs_graph(program)
    keep = reachable_defined_symbols(graph, goal)
    return {r.id for r in program.rules if r.head not in keep}


def prune_program(program: Program, goal: Term, graph: NeedsGraph | None = None) -> Program:
    """Drop the rules for defined symbols the goal can never reach."""
    drop = prunable_rules(program, goal, graph)
    return program.with_rules(r for r in program.rules if r.id not in drop)


@dataclass(frozen=True)
class NeverAddSets:
    eligible: bool
    user_constants: frozenset[Symbol]
    outermost_safe_constructors: frozenset[Symbol]
    predefined_types: frozenset[Symbol]
    collapsing_rules: tuple[int, ...] = ()

    def intersect(self, other: NeverAddSets) -> NeverAddSets:
        return NeverAddSets(
            self.eligible and other.eligible,
            self.user_constants & other.user_constants,
            self.outermost_safe_constructors & other.outermost_safe_constructors,
            self.predefined_types & other.predefined_types,
            tuple(sorted(set(self.collapsing_rules) | set(other.collapsing_rules))),
        )


def _operator_types(terms: Iterable[Term]) -> set[Symbol]:
    """Literal types an operator in ``terms`` consumes or produces."""
    touched: set[Symbol] = set()
    for term in terms:
        for t in subterms(term):
            if isinstance(t, App) and t.symbol.name in OP_SYMBOLS:
                touched |= OPERAND_TYPES[t.symbol.name]
                touched.add(RESULT_TYPE[t.symbol.name])
    return touched


def never_add_sets(program: Program, goal: Term | None) -> NeverAddSets:
    """Static never-add sets; with ``goal=None`` no literal type qualifies."""
    collapsing = tuple(r.id for r in program.rules if r.collapsing)
    defined = program.defined
    constructors = {s for s in program.symbols if s not in defined}
    rhs_roots = {r.rhs.symbol for r in program.rules if isinstance(r.rhs, App)}
    user_constants = frozenset(s for s in constructors if s.arity == 0 and s not in rhs_roots)
    safe = frozenset(s for s in constructors if s.arity > 0 and s not in rhs_roots)

    # A literal type is excluded when an operator anywhere in a right-hand
    # side or in the goal takes it as an operand or yields it, or when one of
    # its literals is a whole right-hand side.
    excluded = _operator_types([r.rhs for r in program.rules] + ([goal] if goal is not None else []))
    if goal is None:
        excluded |= {INT_TYPE, BOOL_TYPE}
    excluded |= {literal_type(r.rhs) for r in program.rules if is_literal(r.rhs)}
    predefined = frozenset({INT_TYPE, BOOL_TYPE} - excluded)
    if collapsing:
        return NeverAddSets(False, frozenset(), frozenset(), frozenset(), collapsing)
    return NeverAddSets(True, user_constants, safe, predefined, ())


@dataclass(frozen=True)
class AnalysisReport:
    prop1_cycle_exists: bool
    prop2_cycle_reachable_from_term: bool | None
    prop3_efficiency_node_exists: bool
    prop4_efficiency_node_doubly_reachable: bool | None
    reachable_defined: frozenset[Symbol]
    prunable_rules: frozenset[int]
    never_add_user_constants: frozenset[Symbol]
    never_add_eligible: bool
    never_add_predefined_types: frozenset[Symbol]
    recommendation: str
    diagnostics: tuple[str, ...] = ()


def analyze(program: Program, goal: Term | None = None, chain_length: int = 1) -> AnalysisReport:
    graph = build_needs_graph(program)
    p1 = prop1_has_cycle(graph)
    p3 = prop3_efficiency_condition(graph)
    p2 = p4 = None
    diagnostics = []
    if goal is not None:
        p2 = prop2_termination_condition(graph, goal)
        p4 = prop4_efficiency_condition_term(graph, goal, chain_length)
        reach = frozenset(reachable_defined_symbols(graph, goal))
        prunable = frozenset(prunable_rules(program, goal, graph))
        nas = never_add_sets(program, goal)
    else:
        reach = frozenset(program.defined)
        prunable = frozenset()
        nas = never_add_sets(program, None)
    if not nas.eligible:
        diagnostics.append(
            "never-add optimisation disabled: collapsing rule(s) "
            + ", ".join(str(i) for i in nas.collapsing_rules)
            + " have a bare variable as right-hand side"
        )
    diagnostics.append(
        "in-degree thresholds differ: the program-only efficiency check asks for "
        "in-degree >= 1, the goal-aware check for in-degree > 1"
    )
    return AnalysisReport(
        prop1_cycle_exists=p1,
        prop2_cycle_reachable_from_term=p2,
        prop3_efficiency_node_exists=p3,
        prop4_efficiency_node_doubly_reachable=p4,
        reachable_defined=reach,
        prunable_rules=prunable,
        never_add_user_constants=nas.user_constants,
        never_add_eligible=nas.eligible,
        never_add_predefined_types=nas.predefined_types,
        recommendation=_recommend(p1, p2, p3, p4),
        diagnostics=tuple(diagnostics),
    )


def _recommend(p1: bool, p2: bool | None, p3: bool, p4: bool | None) -> str:
    termination = p1 if p2 is None else p2
    efficiency = p3 if p4 is None else p4
    parts = []
    if termination:
        parts.append("tabling may improve termination (a needs-graph cycle is reachable)")
    else:
        parts.append("tabling cannot improve termination (no reachable needs-graph cycle)")
    if efficiency:
        parts.append("tabling may save repeated reductions")
    else:
        parts.append("tabling cannot save reduction steps")
    if termination or efficiency:
        parts.append("consider the tabled engine")
    else:
        parts.append("prefer the untabled engine")
    return "; ".join(parts) + "."


def vertex_label(v: Vertex) -> str:
    if isinstance(v, Symbol):
        return v.name
    return str(v)


def _vertex_key(v: Vertex) -> tuple:
    if isinstance(v, Symbol):
        return (0, v.name, v.arity)
    if isinstance(v, BoolLit):
        return (1, str(v), 0)
    return (2, "", v.value)


def to_dot(graph: NeedsGraph) -> str:
    if not graph.vertices:
        return "digraph needs {}\n"
    cyc = cycle_vertices(graph)
    lines = ["digraph needs {"]
    for v in sorted(graph.vertices, key=_vertex_key):
        attrs = ["shape=box" if v in graph.defined else "shape=ellipse"]
        if v in cyc:
            attrs.append("color=red")
        lines.append(f'  "{_dot_escape(vertex_label(v))}" [{", ".join(attrs)}];')
    for f, g in sorted(graph.edges, key=lambda e: (_vertex_key(e[0]), _vertex_key(e[1]))):
        lines.append(f'  "{_dot_escape(vertex_label(f))}" -> "{_dot_escape(vertex_label(g))}";')
    lines.append("}")
    return "\n".join(lines) + "\n"


def _dot_escape(s: str) -> str:
    return s.replace("\\", "\\\\").replace('"', '\\"')
