"""
Reading the needs graph
=======================

The needs graph has an edge ``f -> g`` when ``g`` occurs in the
right-hand side of a rule for ``f``.  Four cheap checks on it say whether
tabling can pay off, and reachability tells which rules a goal can use.
"""

from eqlog import analyze, build_needs_graph, parse_program, parse_term, prune_program, to_dot

source = """
vars x;
fib(x) -> f(x > 1, x);
f(true, x) -> fib(x - 1) + fib(x - 2);
f(false, x) -> 1;
dead(x) -> dead(x + 1);
"""
program = parse_program(source)
graph = build_needs_graph(program)

##############################################################################
# Edges and DOT
# -------------
#
# Defined symbols are boxes; vertices on a cycle are red.  Paste the
# output into any GraphViz viewer.

print(to_dot(graph))

##############################################################################
# Verdicts
# --------
#
# The goal-free checks look for any cycle and any vertex with both in- and
# out-edges.  The goal-aware ones ask whether such structure is reachable
# from the goal's symbols.

goal = parse_term("fib(2)", program)
report = analyze(program, goal)
print("cycle:", report.prop1_cycle_exists)
print("cycle reachable from goal:", report.prop2_cycle_reachable_from_term)
print("pass-through vertex:", report.prop3_efficiency_node_exists)
print("shared vertex reached twice:", report.prop4_efficiency_node_doubly_reachable)
print(report.recommendation)

##############################################################################
# Pruning
# -------
#
# ``dead`` is never reachable from ``fib(2)``, so its rule can be dropped
# before the engine starts.

print(sorted(report.prunable_rules))
print([r.id for r in prune_program(program, goal).rules])
