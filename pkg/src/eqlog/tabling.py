"""Congruence-closure normalisation with a table of signatures.

Every ground term lives in a numbered equivalence class.  A class holds
*signatures* ``<f c1 ... cn>`` (a head applied to class numbers), and one of
them is the class's *unreduced* signature: the one its representative term
is built from and the only one rules are matched against.  Applying a rule
to the representative marks the matched signature reduced and puts the
right-hand side instance into the same class, either as a fresh unreduced
signature or by merging with the class that already holds it.  Because
results stay in the table, a rule instance fires at most once and later
goals reuse earlier work.

Two optional refinements do not change results, only cost:

* don't-reduce: a class whose representative is a constructor term cannot
  contain a redex, so the leftmost-outermost search does not descend into it;
* never-add: signatures that can provably never need renaming are kept off
  dependency lists (only for programs without collapsing rules).
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Optional, TextIO, Union

from eqlog.analysis import NeverAddSets, build_needs_graph, never_add_sets, reachable_defined_symbols
from eqlog.terms import (
    OP_SYMBOLS,
    App,
    BoolLit,
    EqlogError,
    IntLit,
    Program,
    Rule,
    Symbol,
    Term,
    Var,
    literal_type,
)

Head = Union[Symbol, IntLit, BoolLit]
Binding = dict[str, int]


class CycleError(EqlogError):
    """Extraction revisited a class on the current path: no finite normal form."""

    def __init__(self, cls: int):
        super().__init__(f"class {cls} is its own subterm")
        self.cls = cls


class NoUnreducedError(EqlogError):
    """A class has no unreduced signature, so no representative term."""

    def __init__(self, cls: int):
        super().__init__(f"class {cls} has no unreduced signature")
        self.cls = cls


def evaluate_op(op: str, a: Term, b: Term) -> Term | None:
    """Fold a built-in operator over two literals; None when ill-typed.

    Integers are Python ints, so there is no overflow.
    """
    if op == "==":
        if type(a) is type(b):
            return BoolLit(a.value == b.value)
        return None
    if not (isinstance(a, IntLit) and isinstance(b, IntLit)):
        return None
    x, y = a.value, b.value
    if op == "+":
        return IntLit(x + y)
    if op == "-":
        return IntLit(x - y)
    if op == "*":
        return IntLit(x * y)
    if op == ">":
        return BoolLit(x > y)
    if op == "<":
        return BoolLit(x < y)
    raise ValueError(f"unknown operator {op}")


@dataclass(eq=False)
class Signature:
    head: Head
    args: tuple[int, ...]
    sid: int
    owner: int
    reduced: bool = False
    never_add: bool = False
    # Built-in application evaluated as soon as it was built; hidden in traces.
    folded: bool = False
    dead: bool = False

    @property
    def key(self) -> tuple[Head, tuple[int, ...]]:
        return (self.head, self.args)


@dataclass(eq=False)
class EqClass:
    id: int
    members: list[Signature] = field(default_factory=list)
    unreduced: Optional[Signature] = None
    dependents: list[Signature] = field(default_factory=list)
    only_never_add: bool = True
    # Some never-add signature has this class as an argument.
    never_add_referenced: bool = False


@dataclass
class Stats:
    rule_applications: Counter = field(default_factory=Counter)
    builtin_evals: int = 0
    merges: int = 0
    signatures_created: int = 0
    match_attempts: int = 0
    match_attempts_skipped_dont_reduce: int = 0
    dependency_entries_added: int = 0
    dependency_entries_suppressed_never_add: int = 0

    @property
    def total_rule_applications(self) -> int:
        return sum(self.rule_applications.values())

    def copy(self) -> Stats:
        return Stats(Counter(self.rule_applications), self.builtin_evals, self.merges,
                     self.signatures_created, self.match_attempts,
                     self.match_attempts_skipped_dont_reduce,
                     self.dependency_entries_added, self.dependency_entries_suppressed_never_add)

    def since(self, earlier: Stats) -> Stats:
        """Counters accumulated after ``earlier`` was copied."""
        out = Stats(self.rule_applications - earlier.rule_applications)
        for name in ("builtin_evals", "merges", "signatures_created", "match_attempts",
                     "match_attempts_skipped_dont_reduce", "dependency_entries_added",
                     "dependency_entries_suppressed_never_add"):
            setattr(out, name, getattr(self, name) - getattr(earlier, name))
        return out

    def as_dict(self) -> dict:
        return {
            "rule_applications": {str(k): v for k, v in sorted(self.rule_applications.items())},
            "total_rule_applications": self.total_rule_applications,
            "builtin_evals": self.builtin_evals,
            "merges": self.merges,
            "signatures_created": self.signatures_created,
            "match_attempts": self.match_attempts,
            "match_attempts_skipped_dont_reduce": self.match_attempts_skipped_dont_reduce,
            "dependency_entries_added": self.dependency_entries_added,
            "dependency_entries_suppressed_never_add": self.dependency_entries_suppressed_never_add,
        }


@dataclass
class EngineOptions:
    dont_reduce: bool = True
    never_add: bool = True
    prune_rules: bool = True
    max_steps: int = 100_000
    trace: Optional[TextIO] = None
    # Called with the engine after every applied step (a quiescent point).
    on_step: Optional[Callable[["TablingEngine"], None]] = None


@dataclass(frozen=True)
class Outcome:
    stats: Stats


@dataclass(frozen=True)
class NormalForm(Outcome):
    term: Term


@dataclass(frozen=True)
class NoFiniteNormalForm(Outcome):
    witness: int


@dataclass(frozen=True)
class StepLimitReached(Outcome):
    partial: Optional[Term]


class TablingEngine:
    """Tabled normaliser for one program.

    The table persists across :meth:`normalize` calls, so a later goal reuses
    every reduction made for an earlier one.
    """

    def __init__(self, program: Program, options: EngineOptions | None = None):
        self.program = program
        self.options = options or EngineOptions()
        self.parent: list[int] = []
        self.classes: dict[int, EqClass] = {}
        self.index: dict[tuple[Head, tuple[int, ...]], Signature] = {}
        self.stats = Stats()
        self.root: int | None = None
        self._next_sid = 0
        self._epoch = 0
        self._dont_reduce_cache: dict[int, tuple[int, bool]] = {}
        self._dirty: set[int] = set()
        self._steps = 0
        self._graph = build_needs_graph(program)
        self._defined = program.defined
        self._goals: list[Term] = []
        self._never_add: NeverAddSets | None = None
        self._rules_by_head: dict[Symbol, list[Rule]] = {}
        self._set_rules(program.rules)

    # -- union-find ---------------------------------------------------

    def find(self, c: int) -> int:
        parent = self.parent
        while parent[c] != c:
            parent[c] = parent[parent[c]]
            c = parent[c]
        return c

    def cls(self, c: int) -> EqClass:
        return self.classes[self.find(c)]

    def _new_class(self) -> EqClass:
        cid = len(self.parent)
        self.parent.append(cid)
        eq = EqClass(cid)
        self.classes[cid] = eq
        return eq

    # -- goal-dependent configuration --------------------------------

    def _set_rules(self, rules) -> None:
        self._rules_by_head = {}
        for r in rules:
            self._rules_by_head.setdefault(r.head, []).append(r)

    def active_rules(self) -> list[Rule]:
        return sorted((r for rs in self._rules_by_head.values() for r in rs), key=lambda r: r.id)

    def _admit_goal(self, goal: Term) -> None:
        self._goals.append(goal)
        if self.options.prune_rules:
            keep: set[Symbol] = set()
            for g in self._goals:
                keep |= reachable_defined_symbols(self._graph, g)
            self._set_rules(r for r in self.program.rules if r.head in keep)
        if self.options.never_add:
            fresh = never_add_sets(self.program, goal)
            if self._never_add is None:
                self._never_add = fresh
            else:
                merged = self._never_add.intersect(fresh)
                if merged != self._never_add:
                    self._demote_never_add()
                self._never_add = merged

    def _demote_never_add(self) -> None:
        # A later goal shrank the never-add sets; put every suppressed entry back.
        for eq in self.classes.values():
            for s in eq.members:
                if s.never_add:
                    s.never_add = False
                    self._register_dependents(s)
            eq.only_never_add = False

    # -- signatures -----------------------------------------------------

    def is_never_add(self, head: Head, args: tuple[int, ...],
                     analysis: NeverAddSets | None = None) -> bool:
        analysis = analysis if analysis is not None else self._never_add
        if not self.options.never_add or analysis is None or not analysis.eligible:
            return False
        if isinstance(head, (IntLit, BoolLit)):
            return literal_type(head) in analysis.predefined_types
        if not args:
            return head in analysis.user_constants
        if head not in analysis.outermost_safe_constructors:
            return False
        return all(self.cls(a).only_never_add for a in args)

    def _register_dependents(self, sig: Signature) -> None:
        for a in set(sig.args):
            self.cls(a).dependents.append(sig)
            self.stats.dependency_entries_added += 1

    def _create(self, head: Head, args: tuple[int, ...], into: EqClass | None) -> Signature:
        """Make a signature and put it in ``into`` (or a fresh class)."""
        if into is None:
            into = self._new_class()
        sig = Signature(head, args, self._next_sid, into.id)
        self._next_sid += 1
        self.stats.signatures_created += 1
        sig.never_add = self.is_never_add(head, args)
        if sig.never_add:
            for a in set(args):
                self.cls(a).never_add_referenced = True
            self.stats.dependency_entries_suppressed_never_add += len(set(args))
        else:
            self._register_dependents(sig)
            into.only_never_add = False
        into.members.append(sig)
        self.index[sig.key] = sig
        self._epoch += 1
        return sig

    def owner(self, sig: Signature) -> EqClass:
        return self.cls(sig.owner)

    def _literal_of(self, c: int) -> Term | None:
        u = self.cls(c).unreduced
        if u is not None and isinstance(u.head, (IntLit, BoolLit)):
            return u.head
        return None

    def _fold(self, op: Symbol, args: tuple[int, ...]) -> Term | None:
        a, b = (self._literal_of(x) for x in args)
        if a is None or b is None:
            return None
        return evaluate_op(op.name, a, b)

    def _lookup_or_create(self, head: Head, args: tuple[int, ...]) -> int:
        """Class of ``<head args>``, creating it (as unreduced) if needed."""
        hit = self.index.get((head, args))
        if hit is not None:
            return self.find(hit.owner)
        if isinstance(head, Symbol) and head.name in OP_SYMBOLS:
            value = self._fold(head, args)
            if value is not None:
                self.stats.builtin_evals += 1
                target = self._lookup_or_create(value, ())
                sig = self._create(head, args, self.cls(target))
                sig.reduced = True
                sig.folded = True
                return self.find(target)
        eq = self._new_class()
        eq.unreduced = self._create(head, args, eq)
        return eq.id

    def intern(self, term: Term) -> int:
        """Class of a ground term, built bottom-up."""
        return self._build(term, {})

    def _build(self, term: Term, binding: Binding) -> int:
        # Post-order over the term with an explicit stack.
        results: list[int] = []
        stack: list[tuple[Term, bool]] = [(term, False)]
        while stack:
            t, expanded = stack.pop()
            if isinstance(t, Var):
                results.append(self.find(binding[t.name]))
            elif isinstance(t, (IntLit, BoolLit)):
                results.append(self._lookup_or_create(t, ()))
            elif isinstance(t, App):
                if not expanded and t.args:
                    stack.append((t, True))
                    stack.extend((a, False) for a in reversed(t.args))
                    continue
                n = len(t.args)
                args = tuple(self.find(c) for c in results[len(results) - n:]) if n else ()
                del results[len(results) - n:]
                results.append(self._lookup_or_create(t.symbol, args))
            else:
                raise TypeError(f"not a term: {t!r}")
        return results[0]

    # -- matching -------------------------------------------------------

    def match(self, c: int, rule: Rule) -> Binding | None:
        """Match ``rule.lhs`` against the representative of class ``c``."""
        binding: Binding = {}
        stack: list[tuple[Term, int]] = [(rule.lhs, self.find(c))]
        while stack:
            pattern, cid = stack.pop()
            cid = self.find(cid)
            if isinstance(pattern, Var):
                bound = binding.get(pattern.name)
                if bound is None:
                    binding[pattern.name] = cid
                elif self.find(bound) != cid:
                    return None
                continue
            u = self.classes[cid].unreduced
            if u is None:
                return None
            if isinstance(pattern, App):
                if u.head != pattern.symbol:
                    return None
                stack.extend(zip(pattern.args, u.args))
            elif u.head != pattern or u.args:
                return None
        return binding

    # -- rewriting ----------------------------------------------------

    def apply(self, c: int, rule: Rule, binding: Binding) -> None:
        eq = self.cls(c)
        matched = eq.unreduced
        assert matched is not None
        matched.reduced = True
        eq.unreduced = None
        self._dirty.add(eq.id)
        self.stats.rule_applications[rule.id] += 1
        self._epoch += 1
        self._place(eq.id, rule.rhs, binding)

    def _place(self, c: int, rhs: Term, binding: Binding) -> None:
        """Put an instance of ``rhs`` into class ``c``."""
        if isinstance(rhs, Var):
            self.merge(c, binding[rhs.name], prefer=binding[rhs.name])
            return
        if isinstance(rhs, App):
            args = tuple(self.find(self._build(a, binding)) for a in rhs.args)
            head: Head = rhs.symbol
        else:
            args, head = (), rhs
        self._settle(c, head, args)

    def _settle(self, c: int, head: Head, args: tuple[int, ...]) -> None:
        c = self.find(c)
        hit = self.index.get((head, args))
        if hit is not None:
            self.merge(c, hit.owner, prefer=hit.owner)
            return
        if isinstance(head, Symbol) and head.name in OP_SYMBOLS:
            value = self._fold(head, args)
            if value is not None:
                self.stats.builtin_evals += 1
                sig = self._create(head, args, self.classes[c])
                sig.reduced = True
                sig.folded = True
                self._settle(c, value, ())
                return
        eq = self.classes[c]
        sig = self._create(head, args, eq)
        if eq.unreduced is None:
            eq.unreduced = sig

    def evaluate_builtin(self, c: int) -> bool:
        """Evaluate the representative if it is a built-in over literals."""
        eq = self.cls(c)
        u = eq.unreduced
        if u is None or not isinstance(u.head, Symbol) or u.head.name not in OP_SYMBOLS:
            return False
        value = self._fold(u.head, u.args)
        if value is None:
            return False
        self.stats.builtin_evals += 1
        u.reduced = True
        eq.unreduced = None
        self._dirty.add(eq.id)
        self._epoch += 1
        self._settle(eq.id, value, ())
        return True

    # -- merging ------------------------------------------------------

    def merge(self, a: int, b: int, prefer: int | None = None) -> int:
        """Union two classes and restore congruence; returns the survivor."""
        pending = [(a, b, prefer)]
        while pending:
            x, y, pref = pending.pop()
            x, y = self.find(x), self.find(y)
            if x != y:
                win, lose = self._choose_survivor(x, y, None if pref is None else self.find(pref))
                self._union(win, lose, pending)
        return self.find(a)

    def _choose_survivor(self, x: int, y: int, pref: int | None) -> tuple[int, int]:
        cx, cy = self.classes[x], self.classes[y]
        # Never-add signatures are not on dependency lists, so a class they
        # point at must keep its number.
        if cx.never_add_referenced != cy.never_add_referenced:
            return (x, y) if cx.never_add_referenced else (y, x)
        if pref in (x, y):
            return (pref, y if pref == x else x)
        if len(cx.members) != len(cy.members):
            return (x, y) if len(cx.members) > len(cy.members) else (y, x)
        return (x, y) if x < y else (y, x)

    def _union(self, win: int, lose: int, pending: list) -> None:
        W, L = self.classes[win], self.classes[lose]
        self.parent[lose] = win
        del self.classes[lose]
        self.stats.merges += 1
        self._epoch += 1

        for s in L.members:
            s.owner = win
        W.members.extend(L.members)
        W.only_never_add = W.only_never_add and L.only_never_add
        W.never_add_referenced = W.never_add_referenced or L.never_add_referenced
        W.unreduced = self._pick_unreduced(W.unreduced, L.unreduced)
        self._dirty.discard(lose)
        self._dirty.add(win)

        if L.never_add_referenced:
            # Should not happen for eligible programs; fall back to a scan.
            movers = [s for eq in self.classes.values() for s in eq.members
                      if s.never_add and lose in s.args]
        else:
            movers = []
        for s in L.dependents + movers:
            if s.dead:
                continue
            new_args = tuple(self.find(x) for x in s.args)
            if new_args == s.args:
                continue
            if self.index.get(s.key) is s:
                del self.index[s.key]
            s.args = new_args
            other = self.index.get(s.key)
            if other is None or other is s:
                self.index[s.key] = s
                continue
            # Congruence: s and other now denote the same terms.
            home = self.find(s.owner)
            self._absorb(s, other)
            pending.append((home, other.owner, None))
        W.dependents.extend(d for d in L.dependents if not d.dead)

    def _absorb(self, s: Signature, other: Signature) -> None:
        """Drop ``s`` in favour of the identical signature ``other``."""
        s.dead = True
        home = self.cls(s.owner)
        home.members.remove(s)
        if s.reduced and not other.reduced:
            other.reduced = True
            other_home = self.cls(other.owner)
            if other_home.unreduced is other:
                other_home.unreduced = None
                self._dirty.add(other_home.id)
        if home.unreduced is s:
            home.unreduced = None
            self._dirty.add(home.id)

    def _pick_unreduced(self, mine: Signature | None, theirs: Signature | None) -> Signature | None:
        candidates = [s for s in (mine, theirs) if s is not None and not s.reduced and not s.dead]
        if not candidates:
            return None
        # A constructor or literal representative cannot be rewritten at the
        # root, so it is the better one to keep.
        for s in candidates:
            if self._is_constructor_head(s.head):
                return s
        return candidates[0]

    def _is_constructor_head(self, head: Head) -> bool:
        if isinstance(head, (IntLit, BoolLit)):
            return True
        return head not in self._defined and head.name not in OP_SYMBOLS

    def _repair_unreduced(self, eq: EqClass) -> None:
        if eq.unreduced is None or eq.unreduced.reduced or eq.unreduced.dead:
            eq.unreduced = None
            for s in eq.members:
                if not s.reduced and not s.dead:
                    eq.unreduced = s
                    break

    # -- don't-reduce / don't-add ---------------------------------------

    def is_dont_reduce(self, c: int) -> bool:
        c = self.find(c)
        cached = self._dont_reduce_cache.get(c)
        if cached is not None and cached[0] == self._epoch:
            return cached[1]
        result: dict[int, bool] = {}
        # Iterative post-order; a class met again on the active path is a cycle.
        active: set[int] = set()
        stack: list[tuple[int, bool]] = [(c, False)]
        while stack:
            cid, done = stack.pop()
            cid = self.find(cid)
            if cid in result:
                continue
            hit = self._dont_reduce_cache.get(cid)
            if hit is not None and hit[0] == self._epoch:
                result[cid] = hit[1]
                continue
            u = self.classes[cid].unreduced
            if u is None or not self._is_constructor_head(u.head):
                result[cid] = False
            elif done:
                active.discard(cid)
                result[cid] = all(result.get(self.find(a), False) for a in u.args)
            elif cid in active:
                result[cid] = False
            else:
                active.add(cid)
                stack.append((cid, True))
                stack.extend((a, False) for a in u.args if self.find(a) not in result)
        for cid, v in result.items():
            self._dont_reduce_cache[cid] = (self._epoch, v)
        return result[c]

    def classify_dont_add_snapshot(self) -> dict[int, bool]:
        """Least fixpoint: every member is a constructor over don't-add classes."""
        dont_add = {c: False for c in self.classes}
        changed = True
        while changed:
            changed = False
            for c, eq in self.classes.items():
                if dont_add[c]:
                    continue
                if all(self._is_constructor_head(s.head)
                       and all(dont_add[self.find(a)] for a in s.args)
                       for s in eq.members):
                    dont_add[c] = True
                    changed = True
        return dont_add

    # -- search -----------------------------------------------------------

    def step(self) -> bool:
        """Apply the leftmost-outermost rule or built-in step below the root."""
        assert self.root is not None
        visited: set[int] = set()
        stack = [self.find(self.root)]
        while stack:
            c = self.find(stack.pop())
            if c in visited:
                continue
            visited.add(c)
            eq = self.classes[c]
            u = eq.unreduced
            if u is None:
                continue
            if self.options.dont_reduce and self.is_dont_reduce(c):
                self.stats.match_attempts_skipped_dont_reduce += 1
                continue
            for rule in self._rules_by_head.get(u.head, ()) if isinstance(u.head, Symbol) else ():
                self.stats.match_attempts += 1
                binding = self.match(c, rule)
                if binding is not None:
                    self._record(lambda: self.apply(c, rule, binding),
                                 f"rule {rule.id} at class {c}")
                    return True
            if isinstance(u.head, Symbol) and u.head.name in OP_SYMBOLS and self._fold(u.head, u.args) is not None:
                self._record(lambda: self.evaluate_builtin(c), f"builtin {u.head.name} at class {c}")
                return True
            stack.extend(reversed(u.args))
        return False

    def _record(self, action: Callable[[], object], label: str) -> None:
        trace = self.options.trace
        before = self.render_table() if trace is not None else None
        merges_before = self.stats.merges
        live_before = set(self.classes)
        action()
        for cid in {self.find(c) for c in self._dirty}:
            self._repair_unreduced(self.classes[cid])
        self._dirty.clear()
        if trace is not None:
            after = self.render_table()
            gone = sorted(live_before - set(self.classes))
            note = ""
            if self.stats.merges > merges_before:
                note = " (" + ", ".join(f"merged {g} into {self.find(g)}" for g in gone) + ")"
            self._steps += 1
            trace.write(f"step {self._steps}: {label}{note}\n")
            for cid, line in after.items():
                if before.get(cid) != line:
                    trace.write(line + "\n")
        if self.options.on_step is not None:
            self.options.on_step(self)

    # -- extraction -------------------------------------------------------

    def extract_term(self, c: int) -> Term:
        """Representative term of class ``c``; raises CycleError on a loop."""
        built: dict[int, Term] = {}
        active: set[int] = set()
        stack: list[tuple[int, bool]] = [(self.find(c), False)]
        while stack:
            cid, done = stack.pop()
            cid = self.find(cid)
            if done:
                u = self.classes[cid].unreduced
                active.discard(cid)
                if isinstance(u.head, (IntLit, BoolLit)):
                    built[cid] = u.head
                else:
                    built[cid] = App(u.head, tuple(built[self.find(a)] for a in u.args))
                continue
            if cid in built:
                continue
            if cid in active:
                raise CycleError(cid)
            u = self.classes[cid].unreduced
            if u is None:
                raise NoUnreducedError(cid)
            active.add(cid)
            stack.append((cid, True))
            for a in reversed(u.args):
                a = self.find(a)
                if a in active:
                    raise CycleError(a)
                if a not in built:
                    stack.append((a, False))
        return built[self.find(c)]

    # -- driver -----------------------------------------------------------

    def normalize(self, goal: Term) -> Outcome:
        self._admit_goal(goal)
        start = self.stats.copy()
        self._steps = 0
        trace = self.options.trace
        before = self.render_table() if trace is not None else {}
        self.root = self.intern(goal)
        if trace is not None:
            lines = [line for cid, line in self.render_table().items() if before.get(cid) != line]
            if lines:
                trace.write("init\n" + "".join(line + "\n" for line in lines))
        steps = 0
        while True:
            if steps >= self.options.max_steps:
                try:
                    partial = self.extract_term(self.root)
                except (CycleError, NoUnreducedError):
                    partial = None
                outcome: Outcome = StepLimitReached(self.stats.since(start), partial)
                break
            if not self.step():
                try:
                    outcome = NormalForm(self.stats.since(start), self.extract_term(self.root))
                except CycleError as exc:
                    outcome = NoFiniteNormalForm(self.stats.since(start), exc.cls)
                except NoUnreducedError as exc:
                    outcome = NoFiniteNormalForm(self.stats.since(start), exc.cls)
                break
            steps += 1
        if trace is not None:
            trace.write(describe_outcome(outcome) + "\n")
        return outcome

    # -- presentation and audits -----------------------------------------

    def format_signature(self, s: Signature) -> str:
        if isinstance(s.head, (IntLit, BoolLit)):
            return str(s.head)
        if not s.args:
            return s.head.name
        return "<" + " ".join([s.head.name] + [str(self.find(a)) for a in s.args]) + ">"

    def format_class(self, c: int) -> str:
        """Paper-style class line: reduced members in creation order, ``*`` last."""
        eq = self.cls(c)
        shown = [s for s in eq.members if not s.folded and s is not eq.unreduced]
        shown.sort(key=lambda s: s.sid)
        parts = [self.format_signature(s) for s in shown]
        if eq.unreduced is not None:
            parts.append(self.format_signature(eq.unreduced) + "*")
        return f"{eq.id}:{{{', '.join(parts)}}}"

    def render_table(self) -> dict[int, str]:
        return {c: self.format_class(c) for c in sorted(self.classes)}

    def audit(self) -> list[str]:
        """Full-table invariant check; returns a list of violations."""
        problems = []
        seen_keys: dict[tuple, Signature] = {}
        for c, eq in self.classes.items():
            if self.find(c) != c:
                problems.append(f"class {c} is not canonical")
            if eq.unreduced is not None:
                if eq.unreduced.reduced:
                    problems.append(f"class {c}: unreduced signature is marked reduced")
                if eq.unreduced not in eq.members:
                    problems.append(f"class {c}: unreduced signature is not a member")
            for s in eq.members:
                if s.dead:
                    problems.append(f"class {c}: dead member")
                if self.find(s.owner) != c:
                    problems.append(f"class {c}: member owned by {s.owner}")
                key = (s.head, tuple(self.find(a) for a in s.args))
                if key != s.key:
                    problems.append(f"class {c}: stale arguments in {self.format_signature(s)}")
                if key in seen_keys:
                    problems.append(f"congruence: {self.format_signature(s)} appears twice")
                seen_keys[key] = s
                if self.index.get(s.key) is not s:
                    problems.append(f"index disagrees on {self.format_signature(s)}")
                if not s.never_add:
                    for a in set(s.args):
                        if s not in self.cls(a).dependents:
                            problems.append(f"{self.format_signature(s)} missing from dependents of {self.find(a)}")
        problems += self.audit_hierarchy()
        return problems

    def audit_hierarchy(self) -> list[str]:
        """never-add classes within don't-add classes within don't-reduce classes."""
        problems = []
        dont_add = self.classify_dont_add_snapshot()
        for c, eq in self.classes.items():
            if any(s.never_add for s in eq.members) and not dont_add[c]:
                problems.append(f"class {c} holds a never-add signature but is not don't-add")
            if dont_add[c] and not self.is_dont_reduce(c):
                problems.append(f"class {c} is don't-add but not don't-reduce")
        return problems


def describe_outcome(outcome: Outcome) -> str:
    from eqlog.parser import format_term

    if isinstance(outcome, NormalForm):
        return f"normal form: {format_term(outcome.term)}"
    if isinstance(outcome, NoFiniteNormalForm):
        return f"no finite normal form (class {outcome.witness})"
    partial = "" if outcome.partial is None else f" at {format_term(outcome.partial)}"
    return f"step limit reached{partial}"


def normalize_tabled(program: Program, goal: Term, options: EngineOptions | None = None) -> Outcome:
    return TablingEngine(program, options).normalize(goal)
