"""
Skipping work inside constructor terms
======================================

Two switches trim the engine's work without changing any answer.
Don't-reduce stops the search at subterms built only from constructors.
Never-add keeps signatures that can never change off the dependency lists.
"""

from eqlog import EngineOptions, normalize_tabled, normalize_untabled, parse_program, parse_term

source = """
vars h t acc l;
rev(l) -> r(l, nil);
r(nil, acc) -> res(acc);
r(cons(h, t), acc) -> r(t, cons(h, acc));
"""
program = parse_program(source)
goal = parse_term("rev(cons(1, cons(2, cons(3, cons(4, nil)))))", program)

##############################################################################
# Compare the counters with each switch on and off.  The normal form is
# the same every time.

for dont_reduce in (True, False):
    for never_add in (True, False):
        out = normalize_tabled(program, goal, EngineOptions(dont_reduce=dont_reduce, never_add=never_add))
        s = out.stats
        print(f"dont_reduce={dont_reduce!s:5} never_add={never_add!s:5} "
              f"matches={s.match_attempts:3} skipped={s.match_attempts_skipped_dont_reduce:3} "
              f"deps={s.dependency_entries_added:3} suppressed={s.dependency_entries_suppressed_never_add:3} "
              f"-> {out.term}")

##############################################################################
# Never-add is switched off for any program with a collapsing rule (one
# whose right-hand side is a bare variable), because merging such a class
# can change what a "constant" class contains.

stream = parse_program("""
vars x y;
from(x, y) -> if(y > 0, cons(x, from(x + 1, y - 1)), nil);
if(true, x, y) -> x;
if(false, x, y) -> y;
""")
out = normalize_tabled(stream, parse_term("from(1, 3)", stream))
print(out.term, out.stats.dependency_entries_suppressed_never_add)

##############################################################################
# Tabled against untabled
# -----------------------
#
# The table reduces each distinct ``fib`` argument once.  The tree
# rewriter follows the whole recursion tree.

fib = parse_program("""
vars x;
fib(x) -> f(x > 1, x);
f(true, x) -> fib(x - 1) + fib(x - 2);
f(false, x) -> 1;
""")
print(" n  tabled  untabled")
for n in (5, 10, 15):
    g = parse_term(f"fib({n})", fib)
    tabled = normalize_tabled(fib, g).stats.total_rule_applications
    untabled = sum(normalize_untabled(fib, g, 10**6).rule_applications.values())
    print(f"{n:2} {tabled:7} {untabled:9}")
