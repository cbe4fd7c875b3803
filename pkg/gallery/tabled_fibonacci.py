"""
Tabling a Fibonacci program
===========================

Watch the congruence-closure table grow while ``fib(2)`` is normalised,
then reuse it for a bigger goal.
"""

import io

from eqlog import EngineOptions, TablingEngine, parse_program, parse_term

##############################################################################
# The program
# -----------
#
# Three rules over built-in integers.  ``vars`` names the variables, every
# other lower-case name is a function symbol or constant.

source = """
vars x;
fib(x) -> f(x > 1, x);
f(true, x) -> fib(x - 1) + fib(x - 2);
f(false, x) -> 1;
"""
program = parse_program(source)
for rule in program.rules:
    print(rule.id, rule)

##############################################################################
# Tracing the table
# -----------------
#
# Each class line lists its reduced signatures in creation order and the
# unreduced one, marked ``*``, last.  ``<fib 0>`` means ``fib`` applied to
# whatever class 0 holds.  Only classes that changed are printed after a
# step.

trace = io.StringIO()
engine = TablingEngine(program, EngineOptions(trace=trace))
result = engine.normalize(parse_term("fib(2)", program))
print(trace.getvalue())

##############################################################################
# Arithmetic on literals (``x > 1`` with ``x`` bound to 2, say) is folded
# as soon as it is built, so those signatures never get a class of their
# own.  The counters include them:

print(result.stats.as_dict())

##############################################################################
# Reuse
# -----
#
# ``fib(fib(2))`` is already in the table: ``fib(2)`` lives in the class
# of ``2``, so ``fib(fib(2))`` is the signature ``<fib 0>``.  No rule
# fires.

again = engine.normalize(parse_term("fib(fib(2))", program))
print(again.term, again.stats.total_rule_applications)

##############################################################################
# A larger goal in the same table only pays for the new arguments.

bigger = engine.normalize(parse_term("fib(12)", program))
print(bigger.term, dict(bigger.stats.rule_applications))
