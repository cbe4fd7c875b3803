"""
When tabling terminates and rewriting does not
==============================================

A rule that reproduces its own left-hand side inside the right-hand side
loops forever under plain rewriting.  The table notices the cycle.
"""

from eqlog import analyze, normalize_tabled, normalize_untabled, parse_program, parse_term

program = parse_program("a -> f(a);")
goal = parse_term("a", program)

##############################################################################
# The tabled engine applies the rule once.  Class 0 now holds both ``a``
# and ``<f 0>``, so the only representative left is ``f`` of itself, and
# no finite term can be extracted.

outcome = normalize_tabled(program, goal)
print(type(outcome).__name__, "witness class", outcome.witness)
print("rule applications:", outcome.stats.total_rule_applications)

##############################################################################
# The tree rewriter just keeps growing ``f(f(f(...)))`` until its step
# budget runs out.

for budget in (10, 100, 1000):
    r = normalize_untabled(program, goal, budget)
    print(budget, r.step_limit_reached, str(r.term)[:40])

##############################################################################
# The static analysis predicts this: a cycle in the needs graph is
# reachable from the goal, so tabling may help termination.

report = analyze(program, goal)
print(report.prop1_cycle_exists, report.prop2_cycle_reachable_from_term)
print(report.recommendation)

##############################################################################
# Without any cycle, tabling cannot change termination at all.

acyclic = parse_program("vars x; g(x) -> h(x); h(x) -> pair(x, x);")
print(analyze(acyclic).recommendation)
