"""Untabled leftmost-outermost tree rewriting.

No sharing and no memory of past steps: each contraction rebuilds the spine
above the redex.  This is the baseline the tabled engine is compared with,
and an independent oracle for its normal forms.
"""

from __future__ import annotations

import operator
from collections import Counter
from dataclasses import dataclass, field
from typing import Optional

from eqlog.tabling import evaluate_op
from eqlog.terms import OP_SYMBOLS, App, BoolLit, IntLit, Program, Rule, Term, Var, depth

Position = tuple[int, ...]


@dataclass(frozen=True)
class RewriteOutcome:
    term: Term
    normal_form: bool
    steps_applied: int = 0
    builtin_evals: int = 0
    rule_applications: Counter = field(default_factory=Counter)

    @property
    def step_limit_reached(self) -> bool:
        return not self.normal_form


def match(pattern: Term, term: Term) -> Optional[dict[str, Term]]:
    """Syntactic matching; a repeated variable needs equal subterms."""
    binding: dict[str, Term] = {}
    stack = [(pattern, term)]
    while stack:
        p, t = stack.pop()
        if isinstance(p, Var):
            seen = binding.get(p.name)
            if seen is None:
                binding[p.name] = t
            elif seen != t:
                return None
        elif isinstance(p, App):
            if not isinstance(t, App) or t.symbol != p.symbol:
                return None
            stack.extend(zip(p.args, t.args))
        elif p != t:
            return None
    return binding


def substitute(term: Term, binding: dict[str, Term]) -> Term:
    if isinstance(term, Var):
        return binding[term.name]
    if isinstance(term, App):
        if not term.args:
            return term
        return App(term.symbol, tuple(substitute(a, binding) for a in term.args))
    return term


_LITERALS = (IntLit, BoolLit)

# Integer operators by name: (result constructor, function).
_INT_OPS = {
    "+": (IntLit, operator.add),
    "-": (IntLit, operator.sub),
    "*": (IntLit, operator.mul),
    ">": (BoolLit, operator.gt),
    "<": (BoolLit, operator.lt),
}


def _fold(name: str, a: Term, b: Term) -> Term | None:
    op = _INT_OPS.get(name)
    if op is not None:
        if type(a) is IntLit and type(b) is IntLit:
            return op[0](op[1](a.value, b.value))
        return None
    if isinstance(a, _LITERALS) and isinstance(b, _LITERALS):
        return evaluate_op(name, a, b)
    return None


def _rules_by_head(program: Program) -> dict:
    # Keyed by name: symbol names are unique within a program and str hashes are cached.
    table: dict = {}
    for r in program.rules:
        table.setdefault(r.head.name, []).append(r)
    return table


def _contract(node: App, table: dict) -> Optional[tuple[Term, object]]:
    return _contract_args(node.symbol, node.args, table)


def _contract_args(symbol, args, table: dict) -> Optional[tuple[Term, object]]:
    """Contract ``symbol(*args)`` at the root: (replacement, rule or operator)."""
    name = symbol.name
    rules = table.get(name)
    if rules is not None:
        for rule in rules:
            binding = _match_args(rule.lhs.args, args)
            if binding is not None:
                return substitute(rule.rhs, binding), rule
    elif name in OP_SYMBOLS:
        value = _fold(name, *args)
        if value is not None:
            return value, name
    return None


def _find_redex(term: Term, table: dict) -> Optional[tuple[Position, Term, object]]:
    # Preorder with explicit frames; a subtree searched without success is
    # tagged normal for this rule table and skipped next time.
    if not isinstance(term, App) or term.normal is table:
        return None
    frames: list[list] = [[term, -1]]
    while frames:
        frame = frames[-1]
        node, child = frame
        if child == -1:
            hit = _contract(node, table)
            if hit is not None:
                pos = tuple(f[1] for f in frames[:-1])
                return pos, hit[0], hit[1]
        child += 1
        while child < len(node.args):
            sub = node.args[child]
            if isinstance(sub, App) and sub.normal is not table:
                break
            child += 1
        if child < len(node.args):
            frame[1] = child
            frames.append([node.args[child], -1])
        else:
            node.normal = table
            frames.pop()
    return None


def _replace(term: Term, pos: Position, new: Term) -> Term:
    spine = [term]
    for i in pos:
        spine.append(spine[-1].args[i])
    out = new
    for i, parent in zip(reversed(pos), reversed(spine[:-1])):
        args = list(parent.args)
        args[i] = out
        out = App(parent.symbol, tuple(args))
    return out


def rewrite_step(program: Program, term: Term) -> Optional[tuple[Term, Position, int | str]]:
    """One leftmost-outermost step: (new term, position, rule id or operator)."""
    found = _find_redex(term, _rules_by_head(program))
    if found is None:
        return None
    pos, replacement, how = found
    label = how.id if isinstance(how, Rule) else how
    return _replace(term, pos, replacement), pos, label


def _recheck_window(program: Program) -> int | None:
    """How far above a contraction an ancestor's redex status can change.

    A linear pattern of depth d only inspects nodes fewer than d levels
    below its root; built-ins inspect their direct children.  A repeated
    variable compares whole subterms, so any change below can matter
    (None means unbounded).
    """
    if any(not r.left_linear for r in program.rules):
        return None
    return max([1] + [depth(r.lhs) - 1 for r in program.rules])


def normalize_untabled(program: Program, goal: Term, max_steps: int = 100_000) -> RewriteOutcome:
    """Iterate leftmost-outermost steps until a normal form or ``max_steps``.

    Equivalent to calling :func:`rewrite_step` repeatedly, but walks a zipper
    instead of searching from the root after every contraction.
    """
    table = _rules_by_head(program)
    window = _recheck_window(program)
    counts: Counter = Counter()
    builtins = 0
    steps = 0
    # frames: [symbol, args list, focused child index, changed flag, original node]
    frames: list[list] = []
    t = goal
    entering = True
    # Contraction of t already computed by the ancestor recheck.
    pending = None
    while True:
        if entering:
            if pending is not None:
                hit, pending = pending, None
            elif not isinstance(t, App) or t.normal is table:
                entering = False
                continue
            else:
                hit = _contract(t, table)
            if hit is not None:
                if steps == max_steps:
                    return RewriteOutcome(_zip_up(t, frames), False, steps, builtins, counts)
                steps += 1
                if isinstance(hit[1], Rule):
                    counts[hit[1].id] += 1
                else:
                    builtins += 1
                t = hit[0]
                if frames:
                    top = frames[-1]
                    top[1][top[2]] = t
                    top[3] = True
                    up, pending = _redex_ancestor(frames, table, window)
                    for _ in range(up):
                        t = _pop(t, frames)
                continue
            for i, sub in enumerate(t.args):
                if isinstance(sub, App) and sub.normal is not table:
                    frames.append([t.symbol, list(t.args), i, False, t])
                    t = sub
                    break
            else:
                t.normal = table
                entering = False
            continue
        # t is in normal form: move to the next unexplored sibling or up.
        if not frames:
            return RewriteOutcome(t, True, steps, builtins, counts)
        frame = frames[-1]
        if frame[1][frame[2]] is not t:
            frame[1][frame[2]] = t
            frame[3] = True
        for j in range(frame[2] + 1, len(frame[1])):
            sub = frame[1][j]
            if isinstance(sub, App) and sub.normal is not table:
                frame[2] = j
                t = sub
                entering = True
                break
        else:
            t = _pop(t, frames)
            t.normal = table


def _pop(t: Term, frames: list[list]) -> Term:
    symbol, args, i, changed, original = frames.pop()
    if args[i] is not t:
        args[i] = t
        changed = True
    if frames and changed:
        frames[-1][3] = True
    return App(symbol, tuple(args)) if changed else original


def _match_args(patterns, args) -> Optional[dict[str, Term]]:
    binding: dict[str, Term] = {}
    stack = list(zip(patterns, args))
    while stack:
        p, t = stack.pop()
        if isinstance(p, Var):
            seen = binding.get(p.name)
            if seen is None:
                binding[p.name] = t
            elif seen != t:
                return None
        elif isinstance(p, App):
            if not isinstance(t, App) or t.symbol != p.symbol:
                return None
            stack.extend(zip(p.args, t.args))
        elif p != t:
            return None
    return binding


def _redex_ancestor(frames: list[list], table: dict, window: int | None) -> tuple[int, object]:
    """Distance to the outermost ancestor (within the window) that is now a
    redex, with its contraction; (0, None) if there is none.

    The focused child has already been written into ``frames[-1]``.
    """
    reach = len(frames) if window is None else min(window, len(frames))
    top = frames[-1]
    if reach == 1:
        hit = _contract_args(top[0], top[1], table)
        return (0, None) if hit is None else (1, hit)
    chain = [(top[0], top[1])]
    cur = App(top[0], tuple(top[1]))
    for k in range(2, reach + 1):
        symbol, args, i, _, _ = frames[-k]
        args = list(args)
        args[i] = cur
        chain.append((symbol, args))
        if k < reach:
            cur = App(symbol, tuple(args))
    for k in range(reach, 0, -1):
        hit = _contract_args(*chain[k - 1], table)
        if hit is not None:
            return k, hit
    return 0, None


def _zip_up(t: Term, frames: list[list]) -> Term:
    frames = [list(f) for f in frames]
    while frames:
        t = _pop(t, frames)
    return t
