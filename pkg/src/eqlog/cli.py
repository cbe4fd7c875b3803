"""Command-line front end.

    eqlog analyze PROG [--term T] [--dot FILE] [--json]
    eqlog normalize PROG TERM [--mode tabled|untabled|both] [--max-steps N]
                   [--no-dont-reduce] [--no-never-add] [--no-prune]
                   [--trace] [--stats] [--json]

Exit codes for ``normalize``: 0 normal form, 1 usage or parse error,
2 no finite normal form (tabled), 3 step limit.  With ``--mode both`` the
exit code is the tabled engine's.
"""

from __future__ import annotations

import argparse
import io
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import TextIO

from eqlog.analysis import analyze, build_needs_graph, prune_program, to_dot, vertex_label
from eqlog.parser import format_term, parse_program, parse_term
from eqlog.rewrite import normalize_untabled
from eqlog.tabling import (
    EngineOptions,
    NoFiniteNormalForm,
    NormalForm,
    Outcome,
    StepLimitReached,
    TablingEngine,
)
from eqlog.terms import EqlogError

SCHEMA = "eqlog.report/1"
DEFAULT_MAX_STEPS = 100_000

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NO_NORMAL_FORM = 2
EXIT_STEP_LIMIT = 3


@dataclass
class RunConfig:
    program_path: Path
    command: str = "normalize"
    goal: str | None = None
    mode: str = "tabled"
    max_steps: int = DEFAULT_MAX_STEPS
    dont_reduce: bool = True
    never_add: bool = True
    prune_rules: bool = True
    emit: str = "text"
    trace: bool = False
    stats: bool = False
    dot_path: Path | None = None

    def __post_init__(self) -> None:
        if self.command not in ("analyze", "normalize"):
            raise ValueError(f"unknown command {self.command!r}")
        if self.dot_path is not None and self.command != "analyze":
            raise ValueError("dot_path is only valid for analyze")
        if self.mode not in ("tabled", "untabled", "both"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.mode == "both" and self.goal is None:
            raise ValueError("mode 'both' needs a goal term")


def _default_max_steps() -> int:
    raw = os.environ.get("EQLOG_MAX_STEPS")
    if raw is None:
        return DEFAULT_MAX_STEPS
    try:
        value = int(raw)
    except ValueError:
        raise EqlogError(f"EQLOG_MAX_STEPS must be an integer, got {raw!r}") from None
    if value < 0:
        raise EqlogError("EQLOG_MAX_STEPS must be non-negative")
    return value


def _load(path: Path):
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise EqlogError(f"cannot read {path}: {exc.strerror or exc}") from None
    return parse_program(text)


def _emit(report: dict, emit: str, out: TextIO) -> None:
    if emit == "json":
        out.write(json.dumps(report, indent=2, sort_keys=True) + "\n")
    else:
        out.write(_as_text(report))


def _as_text(report: dict, indent: str = "") -> str:
    lines = []
    for key, value in report.items():
        if isinstance(value, dict):
            lines.append(f"{indent}{key}:")
            lines.append(_as_text(value, indent + "  ").rstrip("\n"))
        elif isinstance(value, list) and any("," in str(v) for v in value):
            lines.append(f"{indent}{key}:")
            lines.extend(f"{indent}  - {v}" for v in value)
        elif isinstance(value, list):
            shown = ", ".join(str(v) for v in value) if value else "(none)"
            lines.append(f"{indent}{key}: {shown}")
        elif value is None:
            lines.append(f"{indent}{key}: n/a")
        elif isinstance(value, bool):
            lines.append(f"{indent}{key}: {'yes' if value else 'no'}")
        elif isinstance(value, str) and "\n" in value:
            lines.append(f"{indent}{key}:")
            lines.extend(indent + "  " + ln for ln in value.rstrip("\n").split("\n"))
        else:
            lines.append(f"{indent}{key}: {value}")
    return "\n".join(lines) + "\n"


def cmd_analyze(config: RunConfig, out: TextIO = sys.stdout, err: TextIO = sys.stderr) -> int:
    try:
        program = _load(config.program_path)
        goal = parse_term(config.goal, program) if config.goal is not None else None
    except EqlogError as exc:
        err.write(f"error: {exc}\n")
        return EXIT_ERROR
    rep = analyze(program, goal)
    graph = build_needs_graph(program)
    report = {
        "schema": SCHEMA,
        "command": "analyze",
        "program": str(config.program_path),
        "goal": format_term(goal) if goal is not None else None,
        "needs_graph": {
            "vertices": sorted(vertex_label(v) for v in graph.vertices),
            "edges": sorted(f"{vertex_label(a)} -> {vertex_label(b)}" for a, b in graph.edges),
        },
        "prop1_cycle_exists": rep.prop1_cycle_exists,
        "prop2_cycle_reachable_from_term": rep.prop2_cycle_reachable_from_term,
        "prop3_efficiency_node_exists": rep.prop3_efficiency_node_exists,
        "prop4_efficiency_node_doubly_reachable": rep.prop4_efficiency_node_doubly_reachable,
        "reachable_defined": sorted(s.name for s in rep.reachable_defined),
        "prunable_rules": sorted(rep.prunable_rules),
        "never_add_eligible": rep.never_add_eligible,
        "never_add_user_constants": sorted(s.name for s in rep.never_add_user_constants),
        "never_add_predefined_types": sorted(t.name for t in rep.never_add_predefined_types),
        "recommendation": rep.recommendation,
        "diagnostics": list(rep.diagnostics),
    }
    if config.dot_path is not None:
        try:
            config.dot_path.write_text(to_dot(graph), encoding="utf-8")
        except OSError as exc:
            err.write(f"error: cannot write {config.dot_path}: {exc.strerror or exc}\n")
            return EXIT_ERROR
    _emit(report, config.emit, out)
    return EXIT_OK


def _tabled_summary(outcome: Outcome) -> tuple[dict, int]:
    if isinstance(outcome, NormalForm):
        return {"outcome": "normal_form", "term": format_term(outcome.term)}, EXIT_OK
    if isinstance(outcome, NoFiniteNormalForm):
        return {"outcome": "no_finite_normal_form", "witness_class": outcome.witness}, EXIT_NO_NORMAL_FORM
    assert isinstance(outcome, StepLimitReached)
    partial = format_term(outcome.partial) if outcome.partial is not None else None
    return {"outcome": "step_limit", "partial": partial}, EXIT_STEP_LIMIT


def cmd_normalize(config: RunConfig, out: TextIO = sys.stdout, err: TextIO = sys.stderr) -> int:
    try:
        if config.goal is None:
            raise EqlogError("normalize needs a goal term")
        program = _load(config.program_path)
        goal = parse_term(config.goal, program)
    except EqlogError as exc:
        err.write(f"error: {exc}\n")
        return EXIT_ERROR

    # mode=both always carries stats so the two engines can be compared.
    want_stats = config.stats or config.mode == "both"
    results: dict[str, dict] = {}
    code = EXIT_OK
    trace_text = None
    if config.mode in ("tabled", "both"):
        buf = io.StringIO() if config.trace else None
        options = EngineOptions(
            dont_reduce=config.dont_reduce,
            never_add=config.never_add,
            prune_rules=config.prune_rules,
            max_steps=config.max_steps,
            trace=buf,
        )
        outcome = TablingEngine(program, options).normalize(goal)
        summary, code = _tabled_summary(outcome)
        if want_stats:
            summary["stats"] = outcome.stats.as_dict()
        results["tabled"] = summary
        if buf is not None:
            trace_text = buf.getvalue()
    if config.mode in ("untabled", "both"):
        target = prune_program(program, goal) if config.prune_rules else program
        r = normalize_untabled(target, goal, config.max_steps)
        if r.normal_form:
            summary = {"outcome": "normal_form", "term": format_term(r.term)}
            ucode = EXIT_OK
        else:
            summary = {"outcome": "step_limit", "partial": format_term(r.term)}
            ucode = EXIT_STEP_LIMIT
        if want_stats:
            summary["stats"] = {
                "rule_applications": {str(k): v for k, v in sorted(r.rule_applications.items())},
                "total_rule_applications": sum(r.rule_applications.values()),
                "builtin_evals": r.builtin_evals,
                "steps": r.steps_applied,
            }
        results["untabled"] = summary
        if config.mode == "untabled":
            code = ucode

    if config.emit == "json":
        report = {
            "schema": SCHEMA,
            "command": "normalize",
            "program": str(config.program_path),
            "goal": format_term(goal),
            "mode": config.mode,
            "max_steps": config.max_steps,
            "options": {
                "dont_reduce": config.dont_reduce,
                "never_add": config.never_add,
                "prune_rules": config.prune_rules,
            },
            "results": results,
            "exit_code": code,
        }
        if trace_text is not None:
            report["trace"] = trace_text
        _emit(report, "json", out)
    else:
        if trace_text is not None:
            out.write(trace_text)
        for engine, summary in results.items():
            out.write(f"{engine}: {_describe(summary)}\n")
        if want_stats:
            out.write(_stats_table(results))
    return code


def _describe(summary: dict) -> str:
    kind = summary["outcome"]
    if kind == "normal_form":
        return summary["term"]
    if kind == "no_finite_normal_form":
        return f"no finite normal form (class {summary['witness_class']})"
    partial = summary.get("partial")
    return "step limit reached" + (f" at {partial}" if partial is not None else "")


def _stats_table(results: dict) -> str:
    engines = [e for e in results if "stats" in results[e]]
    keys: list[str] = []
    for e in engines:
        for k, v in results[e]["stats"].items():
            if k != "rule_applications" and k not in keys:
                keys.append(k)
    rule_ids = sorted({int(r) for e in engines for r in results[e]["stats"]["rule_applications"]})
    rows = [(f"rule {r}", [results[e]["stats"]["rule_applications"].get(str(r), 0) for e in engines])
            for r in rule_ids]
    rows += [(k, [results[e]["stats"].get(k, "-") for e in engines]) for k in keys]
    width = max([len(name) for name, _ in rows] + [5])
    lines = ["stat".ljust(width) + "".join(f"  {e:>10}" for e in engines)]
    for name, values in rows:
        lines.append(name.ljust(width) + "".join(f"  {str(v):>10}" for v in values))
    return "\n".join(lines) + "\n"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="eqlog", description="Equational logic programs with and without tabling.")
    sub = parser.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="needs-graph analysis of a program")
    a.add_argument("program", type=Path)
    a.add_argument("--term", help="goal term for the goal-aware checks")
    a.add_argument("--dot", type=Path, help="write the needs graph as GraphViz DOT")
    a.add_argument("--json", action="store_true")

    n = sub.add_parser("normalize", help="compute the normal form of a term")
    n.add_argument("program", type=Path)
    n.add_argument("term")
    n.add_argument("--mode", choices=("tabled", "untabled", "both"), default="tabled")
    n.add_argument("--max-steps", type=int, default=None)
    n.add_argument("--no-dont-reduce", action="store_true")
    n.add_argument("--no-never-add", action="store_true")
    n.add_argument("--no-prune", action="store_true")
    n.add_argument("--trace", action="store_true")
    n.add_argument("--stats", action="store_true")
    n.add_argument("--json", action="store_true")
    return parser


def main(argv: list[str] | None = None, out: TextIO | None = None, err: TextIO | None = None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_ERROR if exc.code else EXIT_OK
    try:
        if args.command == "analyze":
            config = RunConfig(args.program, command="analyze", goal=args.term, dot_path=args.dot,
                               emit="json" if args.json else "text")
            return cmd_analyze(config, out, err)
        max_steps = args.max_steps if args.max_steps is not None else _default_max_steps()
        if max_steps < 0:
            raise EqlogError("--max-steps must be non-negative")
        config = RunConfig(
            args.program,
            goal=args.term,
            mode=args.mode,
            max_steps=max_steps,
            dont_reduce=not args.no_dont_reduce,
            never_add=not args.no_never_add,
            prune_rules=not args.no_prune,
            emit="json" if args.json else "text",
            trace=args.trace,
            stats=args.stats,
        )
        return cmd_normalize(config, out, err)
    except (EqlogError, ValueError) as exc:
        err.write(f"error: {exc}\n")
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
