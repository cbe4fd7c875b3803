"""Terms, rules and programs.

Terms are immutable.  Applications cache their hash and carry a mutable
``normal`` hint: the tree rewriter stores the rule-set token under which
the subterm is known to be in normal form.  The hint never takes part in
equality.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, Union


class EqlogError(Exception):
    """Base class for user-facing errors."""


class ValidationError(EqlogError):
    pass


@dataclass(frozen=True)
class Symbol:
    name: str
    arity: int

    def __str__(self) -> str:
        return f"{self.name}/{self.arity}"


BUILTIN_OPS = ("+", "-", "*", ">", "<", "==")
OP_SYMBOLS = {name: Symbol(name, 2) for name in BUILTIN_OPS}

# Stand-ins for the two predefined literal types in symbol tables.
INT_TYPE = Symbol("int", 0)
BOOL_TYPE = Symbol("bool", 0)


class Term:
    __slots__ = ()


@dataclass(frozen=True, slots=True)
class Var(Term):
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True, slots=True)
class IntLit(Term):
    value: int

    def __str__(self) -> str:
        return str(self.value)


@dataclass(frozen=True, slots=True)
class BoolLit(Term):
    value: bool

    def __str__(self) -> str:
        return "true" if self.value else "false"


Literal = Union[IntLit, BoolLit]
TRUE = BoolLit(True)
FALSE = BoolLit(False)


class App(Term):
    __slots__ = ("symbol", "args", "_hash", "normal")

    def __init__(self, symbol: Symbol, args: tuple[Term, ...] = ()):
        if len(args) != symbol.arity:
            raise ValidationError(
                f"{symbol.name} expects {symbol.arity} arguments, got {len(args)}"
            )
        self.symbol = symbol
        self.args = tuple(args)
        self._hash: int | None = None
        self.normal: object = None

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        if not isinstance(other, App):
            return NotImplemented
        return self.symbol == other.symbol and self.args == other.args

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.symbol, self.args))
        return self._hash

    def __repr__(self) -> str:
        return f"App({self.symbol.name!r}, {list(self.args)!r})"

    def __str__(self) -> str:
        from eqlog.parser import format_term

        return format_term(self)


def lit(value: int | bool) -> Literal:
    if isinstance(value, bool):
        return BoolLit(value)
    return IntLit(value)


def is_literal(term: Term) -> bool:
    return isinstance(term, (IntLit, BoolLit))


def literal_type(term: Term) -> Symbol:
    if isinstance(term, BoolLit):
        return BOOL_TYPE
    if isinstance(term, IntLit):
        return INT_TYPE
    raise TypeError(f"not a literal: {term!r}")


def subterms(term: Term) -> Iterator[Term]:
    """Preorder walk, iterative so deep terms are fine."""
    stack = [term]
    while stack:
        t = stack.pop()
        yield t
        if isinstance(t, App):
            stack.extend(reversed(t.args))


def variables(term: Term) -> list[str]:
    """Variable occurrences in preorder, with repeats."""
    return [t.name for t in subterms(term) if isinstance(t, Var)]


def is_ground(term: Term) -> bool:
    return not any(isinstance(t, Var) for t in subterms(term))


def depth(term: Term) -> int:
    best = 0
    stack = [(term, 1)]
    while stack:
        t, d = stack.pop()
        best = max(best, d)
        if isinstance(t, App):
            stack.extend((a, d + 1) for a in t.args)
    return best


def size(term: Term) -> int:
    return sum(1 for _ in subterms(term))


@dataclass(frozen=True)
class Rule:
    id: int
    lhs: App
    rhs: Term
    left_linear: bool = field(init=False)
    collapsing: bool = field(init=False)

    def __post_init__(self) -> None:
        occurrences = variables(self.lhs)
        object.__setattr__(self, "left_linear", len(occurrences) == len(set(occurrences)))
        object.__setattr__(self, "collapsing", isinstance(self.rhs, Var))

    @property
    def head(self) -> Symbol:
        return self.lhs.symbol

    def __str__(self) -> str:
        from eqlog.parser import format_term

        return f"{format_term(self.lhs)} -> {format_term(self.rhs)}"


@dataclass(frozen=True)
class Program:
    symbols: frozenset[Symbol]
    variables: frozenset[str]
    rules: tuple[Rule, ...]

    def __post_init__(self) -> None:
        validate_program(self)

    @property
    def defined(self) -> frozenset[Symbol]:
        return frozenset(r.head for r in self.rules)

    def symbol(self, name: str) -> Symbol | None:
        for s in self.symbols:
            if s.name == name:
                return s
        return None

    def rules_for(self, symbol: Symbol) -> list[Rule]:
        return [r for r in self.rules if r.head == symbol]

    def with_rules(self, rules) -> Program:
        """Same symbol table and variables, different rule list (ids kept)."""
        return Program(self.symbols, self.variables, tuple(rules))


def symbols_of(term: Term) -> set[Symbol]:
    return {t.symbol for t in subterms(term) if isinstance(t, App)}


def validate_rule(rule: Rule, variables_: frozenset[str] | None = None) -> None:
    lhs = rule.lhs
    if not isinstance(lhs, App):
        raise ValidationError(f"rule {rule.id}: left-hand side root must be a function symbol")
    if lhs.symbol.name in OP_SYMBOLS:
        raise ValidationError(f"rule {rule.id}: built-in operator {lhs.symbol.name} cannot be redefined")
    for t in subterms(lhs):
        if isinstance(t, App) and t.symbol.name in OP_SYMBOLS:
            raise ValidationError(
                f"rule {rule.id}: built-in operator {t.symbol.name} in left-hand side"
            )
    missing = set(variables(rule.rhs)) - set(variables(lhs))
    if missing:
        raise ValidationError(
            f"rule {rule.id}: right-hand side variable(s) {', '.join(sorted(missing))} not in left-hand side"
        )
    if variables_ is not None:
        for side in (lhs, rule.rhs):
            for t in subterms(side):
                if isinstance(t, Var) and t.name not in variables_:
                    raise ValidationError(f"rule {rule.id}: undeclared variable {t.name}")


def validate_program(program: Program) -> None:
    names: dict[str, Symbol] = {}
    for s in program.symbols:
        if s.name in names and names[s.name] != s:
            raise ValidationError(f"symbol {s.name} used with arities {names[s.name].arity} and {s.arity}")
        names[s.name] = s
    clash = program.variables & set(names)
    if clash:
        raise ValidationError(f"variable(s) used as function symbols: {', '.join(sorted(clash))}")
    for rule in program.rules:
        validate_rule(rule, program.variables)
        for side in (rule.lhs, rule.rhs):
            for s in symbols_of(side):
                if s not in program.symbols and s.name not in OP_SYMBOLS:
                    raise ValidationError(f"rule {rule.id}: symbol {s} missing from symbol table")


def make_program(rules: list[tuple[Term, Term]], variables_: set[str] | None = None) -> Program:
    """Build a Program from (lhs, rhs) pairs, numbering rules from 1."""
    built = []
    symbols: set[Symbol] = set()
    found_vars: set[str] = set()
    for i, (lhs, rhs) in enumerate(rules, start=1):
        if not isinstance(lhs, App):
            raise ValidationError(f"rule {i}: left-hand side root must be a function symbol")
        built.append(Rule(i, lhs, rhs))
        for side in (lhs, rhs):
            symbols |= {s for s in symbols_of(side) if s.name not in OP_SYMBOLS}
            found_vars |= set(variables(side))
    return Program(frozenset(symbols), frozenset(variables_ if variables_ is not None else found_vars), tuple(built))


class Kind(str, Enum):
    DEFINED = "defined"
    CONSTRUCTOR = "constructor"
    BUILTIN_OP = "builtin-op"
    BUILTIN_CONST_TYPE = "builtin-const-type"


@dataclass(frozen=True)
class SymbolClass:
    """Classification of one symbol.

    ``analysis_constructor`` follows the needs-graph view, where built-in
    operators count as constructors.  ``signature_constructor`` follows the
    signature-class view, where they do not.
    """

    kind: Kind
    analysis_constructor: bool
    signature_constructor: bool


def program_literal_types(program: Program) -> set[Symbol]:
    found = set()
    for rule in program.rules:
        for side in (rule.lhs, rule.rhs):
            for t in subterms(side):
                if is_literal(t):
                    found.add(literal_type(t))
    return found


def classify_symbols(program: Program) -> dict[Symbol, SymbolClass]:
    defined = program.defined
    result: dict[Symbol, SymbolClass] = {}
    for s in program.symbols:
        if s in defined:
            result[s] = SymbolClass(Kind.DEFINED, False, False)
        else:
            result[s] = SymbolClass(Kind.CONSTRUCTOR, True, True)
    for rule in program.rules:
        for s in symbols_of(rule.rhs) | symbols_of(rule.lhs):
            if s.name in OP_SYMBOLS:
                result[s] = SymbolClass(Kind.BUILTIN_OP, True, False)
    for t in program_literal_types(program):
        result[t] = SymbolClass(Kind.BUILTIN_CONST_TYPE, True, True)
    return result
