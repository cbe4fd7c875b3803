"""Equational logic programs, with and without tabling."""

from eqlog.analysis import (
    AnalysisReport,
    NeedsGraph,
    NeverAddSets,
    analyze,
    build_needs_graph,
    never_add_sets,
    prop1_has_cycle,
    prop2_termination_condition,
    prop3_efficiency_condition,
    prop4_efficiency_condition_term,
    prunable_rules,
    prune_program,
    reachable_defined_symbols,
    to_dot,
)
from eqlog.parser import ParseError, format_program, format_term, parse_program, parse_term
from eqlog.rewrite import RewriteOutcome, normalize_untabled, rewrite_step
from eqlog.tabling import (
    EngineOptions,
    NoFiniteNormalForm,
    NormalForm,
    Outcome,
    Stats,
    StepLimitReached,
    TablingEngine,
    normalize_tabled,
)
from eqlog.terms import (
    App,
    BoolLit,
    EqlogError,
    IntLit,
    Kind,
    Program,
    Rule,
    Symbol,
    Term,
    ValidationError,
    Var,
    classify_symbols,
    lit,
)

__version__ = "0.1.0"

__all__ = [
    "AnalysisReport", "App", "BoolLit", "EngineOptions", "EqlogError", "IntLit", "Kind",
    "NeedsGraph", "NeverAddSets", "NoFiniteNormalForm", "NormalForm", "Outcome", "ParseError",
    "Program", "RewriteOutcome", "Rule", "Stats", "StepLimitReached", "Symbol", "TablingEngine",
    "Term", "ValidationError", "Var", "analyze", "build_needs_graph", "classify_symbols",
    "format_program", "format_term", "lit", "never_add_sets", "normalize_tabled",
    "normalize_untabled", "parse_program", "parse_term", "prop1_has_cycle",
    "prop2_termination_condition", "prop3_efficiency_condition",
    "prop4_efficiency_condition_term", "prunable_rules", "prune_program",
    "reachable_defined_symbols", "rewrite_step", "to_dot",
]
