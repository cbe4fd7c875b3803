"""Text syntax for programs and goal terms.

Programs are a sequence of ``vars`` declarations and rules::

    # fibonacci over built-in integers
    vars x;
    fib(x) -> f(x > 1, x);
    f(true, x) -> fib(x - 1) + fib(x - 2);
    f(false, x) -> 1;

User symbols are prefix; the six built-in operators are infix with ``*``
binding tighter than ``+``/``-``, which bind tighter than comparisons.
Integers are Python ints (unbounded); a ``-`` directly in front of a
number in operand position reads as a negative literal.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

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
    ValidationError,
    Var,
    is_ground,
)


class ParseError(EqlogError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{line}:{column}: {message}")
        self.line = line
        self.column = column


PRECEDENCE = {">": 1, "<": 1, "==": 1, "+": 2, "-": 2, "*": 3}
RESERVED = {"vars", "true", "false"}

_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>\#[^\n]*)
  | (?P<int>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<op>->|==|[+\-*<>(),;])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind not in ("ws", "comment"):
            tokens.append(Token(kind, m.group(), line, pos - line_start + 1))
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


class _Parser:
    def __init__(self, tokens: list[Token], variables: frozenset[str],
                 arities: dict[str, int], open_table: bool):
        self.tokens = tokens
        self.pos = 0
        self.variables = variables
        self.arities = arities
        # When False, every symbol must already be in `arities`.
        self.open_table = open_table

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def next(self) -> Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, text: str) -> Token:
        tok = self.next()
        if tok.text != text or tok.kind == "eof":
            found = "end of input" if tok.kind == "eof" else repr(tok.text)
            raise ParseError(f"expected {text!r}, found {found}", tok.line, tok.column)
        return tok

    def term(self, min_prec: int = 1) -> Term:
        left = self.primary()
        while True:
            tok = self.peek()
            prec = PRECEDENCE.get(tok.text) if tok.kind == "op" else None
            if prec is None or prec < min_prec:
                return left
            self.next()
            right = self.term(prec + 1)
            left = App(OP_SYMBOLS[tok.text], (left, right))

    def primary(self) -> Term:
        tok = self.next()
        if tok.kind == "int":
            return IntLit(int(tok.text))
        if tok.text == "-" and self.peek().kind == "int":
            return IntLit(-int(self.next().text))
        if tok.text == "(":
            inner = self.term()
            self.expect(")")
            return inner
        if tok.kind == "ident":
            if tok.text == "true":
                return BoolLit(True)
            if tok.text == "false":
                return BoolLit(False)
            if tok.text == "vars":
                raise ParseError("'vars' is reserved", tok.line, tok.column)
            args: list[Term] = []
            if self.peek().text == "(":
                if tok.text in self.variables:
                    raise ParseError(f"variable {tok.text} used as function symbol", tok.line, tok.column)
                self.next()
                args.append(self.term())
                while self.peek().text == ",":
                    self.next()
                    args.append(self.term())
                self.expect(")")
            elif tok.text in self.variables:
                return Var(tok.text)
            return App(self.symbol(tok, len(args)), tuple(args))
        found = "end of input" if tok.kind == "eof" else repr(tok.text)
        raise ParseError(f"expected a term, found {found}", tok.line, tok.column)

    def symbol(self, tok: Token, arity: int) -> Symbol:
        known = self.arities.get(tok.text)
        if known is None:
            if not self.open_table:
                raise ParseError(f"unknown symbol {tok.text}", tok.line, tok.column)
            self.arities[tok.text] = arity
        elif known != arity:
            raise ParseError(
                f"arity mismatch: {tok.text} has arity {known}, used with {arity}",
                tok.line, tok.column,
            )
        return Symbol(tok.text, arity)


def _split_statements(tokens: list[Token]) -> list[list[Token]]:
    statements, current = [], []
    for tok in tokens:
        if tok.kind == "eof":
            if current:
                raise ParseError("missing ';' at end of input", tok.line, tok.column)
            break
        current.append(tok)
        if tok.text == ";":
            statements.append(current)
            current = []
    return statements


def parse_program(text: str) -> Program:
    tokens = tokenize(text)
    statements = _split_statements(tokens)
    variables: set[str] = set()
    rule_statements = []
    for stmt in statements:
        head = stmt[0]
        if head.kind == "ident" and head.text == "vars":
            names = stmt[1:-1]
            if not names:
                raise ParseError("empty vars declaration", head.line, head.column)
            for tok in names:
                if tok.kind != "ident" or tok.text in RESERVED:
                    raise ParseError(f"bad variable name {tok.text!r}", tok.line, tok.column)
                variables.add(tok.text)
        else:
            rule_statements.append(stmt)

    arities: dict[str, int] = {}
    rules = []
    frozen_vars = frozenset(variables)
    for number, stmt in enumerate(rule_statements, start=1):
        eof = Token("eof", "", stmt[-1].line, stmt[-1].column)
        p = _Parser(stmt[:-1] + [eof], frozen_vars, arities, open_table=True)
        first = p.peek()
        lhs = p.term()
        p.expect("->")
        rhs = p.term()
        tail = p.peek()
        if tail.kind != "eof":
            raise ParseError(f"unexpected {tail.text!r} after rule", tail.line, tail.column)
        if isinstance(lhs, Var):
            raise ParseError("left-hand side root is a variable", first.line, first.column)
        if not isinstance(lhs, App):
            raise ParseError("left-hand side root is a literal", first.line, first.column)
        try:
            rules.append(Rule(number, lhs, rhs))
        except ValidationError as exc:
            raise ParseError(str(exc), first.line, first.column) from None

    clash = frozen_vars & set(arities)
    if clash:
        raise ValidationError(f"variable(s) used as function symbols: {', '.join(sorted(clash))}")
    symbols = frozenset(Symbol(n, a) for n, a in arities.items() if n not in OP_SYMBOLS)
    try:
        return Program(symbols, frozen_vars, tuple(rules))
    except ValidationError as exc:
        rule_no = _rule_number(str(exc))
        if rule_no is not None:
            first = rule_statements[rule_no - 1][0]
            raise ParseError(str(exc), first.line, first.column) from None
        raise


def _rule_number(message: str) -> int | None:
    m = re.match(r"rule (\d+):", message)
    return int(m.group(1)) if m else None


def parse_term(text: str, program: Program, ground: bool = True) -> Term:
    """Parse a term over ``program``'s symbols; goals (``ground=True``) may not contain variables."""
    arities = {s.name: s.arity for s in program.symbols}
    tokens = tokenize(text)
    p = _Parser(tokens, program.variables, arities, open_table=False)
    term = p.term()
    tail = p.peek()
    if tail.kind != "eof":
        raise ParseError(f"unexpected {tail.text!r} after term", tail.line, tail.column)
    if ground and not is_ground(term):
        raise ParseError("goal term must be ground (contains variables)", 1, 1)
    return term


def format_term(term: Term) -> str:
    # Iterative so that very deep terms print without hitting the recursion limit.
    out: list[str] = []
    stack: list[object] = [(term, 0)]
    while stack:
        item = stack.pop()
        if isinstance(item, str):
            out.append(item)
            continue
        t, min_prec = item
        if isinstance(t, App) and t.symbol.name in PRECEDENCE:
            prec = PRECEDENCE[t.symbol.name]
            wrap = prec < min_prec
            parts: list[object] = []
            if wrap:
                parts.append("(")
            parts += [(t.args[0], prec), f" {t.symbol.name} ", (t.args[1], prec + 1)]
            if wrap:
                parts.append(")")
            stack.extend(reversed(parts))
        elif isinstance(t, App):
            if not t.args:
                out.append(t.symbol.name)
                continue
            parts = [t.symbol.name + "("]
            for i, a in enumerate(t.args):
                if i:
                    parts.append(", ")
                parts.append((a, 0))
            parts.append(")")
            stack.extend(reversed(parts))
        elif isinstance(t, IntLit) and t.value < 0 and min_prec > 0:
            out.append(f"({t.value})")
        else:
            out.append(str(t))
    return "".join(out)


def format_program(program: Program) -> str:
    lines = []
    if program.variables:
        lines.append("vars " + " ".join(sorted(program.variables)) + ";")
    for rule in program.rules:
        lines.append(f"{format_term(rule.lhs)} -> {format_term(rule.rhs)};")
    return "\n".join(lines) + "\n"
