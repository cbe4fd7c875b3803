"""Seeded random programs for the analysis and engine properties."""

from __future__ import annotations

import random

from eqlog.terms import OP_SYMBOLS, App, BoolLit, IntLit, Program, Symbol, Term, Var, make_program

VARS = ("x", "y")


def random_term(rng: random.Random, symbols: list[Symbol], depth: int, env: tuple[str, ...]) -> Term:
    if depth == 0 or rng.random() < 0.3:
        roll = rng.random()
        if env and roll < 0.35:
            return Var(rng.choice(env))
        if roll < 0.55:
            return IntLit(rng.randint(0, 3))
        if roll < 0.65:
            return BoolLit(rng.random() < 0.5)
        consts = [s for s in symbols if s.arity == 0]
        if consts:
            return App(rng.choice(consts))
        return IntLit(0)
    if rng.random() < 0.15:
        op = OP_SYMBOLS[rng.choice(sorted(OP_SYMBOLS))]
        return App(op, (random_term(rng, symbols, depth - 1, env), random_term(rng, symbols, depth - 1, env)))
    s = rng.choice(symbols)
    return App(s, tuple(random_term(rng, symbols, depth - 1, env) for _ in range(s.arity)))


def random_program(rng: random.Random, n_defined: int = 4, n_constructors: int = 3,
                   n_rules: int = 6, rhs_depth: int = 3) -> Program:
    defined = [Symbol(f"d{i}", rng.randint(0, 2)) for i in range(n_defined)]
    constructors = [Symbol(f"c{i}", rng.randint(0, 2)) for i in range(n_constructors)]
    everything = defined + constructors
    rules = []
    for _ in range(n_rules):
        head = rng.choice(defined)
        env = VARS[:head.arity]
        lhs = App(head, tuple(Var(v) for v in env))
        rhs = random_term(rng, everything, rhs_depth, env)
        rules.append((lhs, rhs))
    return make_program(rules, set(VARS))


def random_goal(rng: random.Random, program: Program, depth: int = 2) -> Term:
    symbols = sorted(program.symbols, key=lambda s: s.name)
    if not symbols:
        return IntLit(1)
    return random_term(rng, symbols, depth, ())
