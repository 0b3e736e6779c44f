"""Command-line front end.

Exit codes: 0 success (or a check that answered true), 1 a check that answered
false, 2 malformed input, 3 enumeration budget exceeded.  Output is sorted
canonically, so identical inputs produce byte-identical reports.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import bridges, query as query_mod, textio
from .aic import (
    AIC,
    check_properties,
    classify_r_updates,
    ground_rules,
    is_founded,
    is_grounded,
    is_justified,
    is_well_founded,
    r_updates,
    rules_constants,
)
from .conflicts import conflict_hypergraph, conflicts, max_conflict_size
from .errors import Budget, BudgetExceededError, InputError
from .model import (
    Database,
    Schema,
    UniversalConstraint,
    facts_universe,
    schema_from,
)
from .priorities import (
    PrioritizedDatabase,
    PriorityRelation,
    ScoreStructure,
    is_optimal_repair,
    lexicographic_repairs,
    optimal_repairs,
    score_structure_from_scores,
)
from .repairs import delta_repairs, is_delta_repair, subset_repairs, superset_repairs

EXIT_OK = 0
EXIT_FALSE = 1
EXIT_INPUT = 2
EXIT_BUDGET = 3


class Workspace:
    """Artifacts loaded from files, with a schema inferred across all of them
    unless one is declared explicitly."""

    def __init__(self, args: argparse.Namespace):
        self.args = args
        self.db: Database = frozenset()
        self.constraints: tuple[UniversalConstraint, ...] = ()
        self.priority = PriorityRelation()
        self.scores: dict = {}
        self.rules: tuple[AIC, ...] = ()
        self.budget = Budget(
            max_universe=args.max_universe, max_completions=args.max_completions
        )
        if getattr(args, "db", None):
            self.db = textio.parse_database(_read(args.db))
        if getattr(args, "constraints", None):
            self.constraints = textio.parse_constraints(_read(args.constraints))
        if getattr(args, "priority", None):
            self.priority, self.scores = textio.parse_priority(_read(args.priority))
        if getattr(args, "aics", None):
            self.rules = textio.parse_aics(_read(args.aics))
        declared: Optional[Schema] = None
        if getattr(args, "schema", None):
            declared = textio.parse_schema(_read(args.schema))
        extra = []
        for rule in self.rules:
            extra.extend(rule.schema_pairs())
        for lit in self.priority.literals():
            extra.append((lit.fact.predicate, len(lit.fact.args)))
        inferred = schema_from(self.db, self.constraints, extra)
        self.schema = inferred if declared is None else declared.merged_with(inferred)
        for fact in self.db:
            self.schema.check_fact(fact)

    def pdb(self) -> PrioritizedDatabase:
        pdb = PrioritizedDatabase(
            self.db, self.schema, self.constraints, self.priority, self.budget
        )
        report = pdb.validate()
        if not report.ok:
            if report.cycle:
                cycle = " > ".join(str(l) for l in report.cycle)
                raise InputError(f"priority relation has a cycle: {cycle}")
            edge = report.stray_edges[0]
            raise InputError(
                f"priority edge {edge[0]} > {edge[1]} joins literals that share no conflict"
            )
        return pdb

    def score_structure(self) -> Optional[ScoreStructure]:
        if not self.scores:
            return None
        structure, derived = score_structure_from_scores(
            self.scores, conflicts(self.db, self.schema, self.constraints)
        )
        for strong, weak in self.priority.edges:
            if not derived.outranks(strong, weak):
                raise InputError(
                    f"priority edge {strong} > {weak} conflicts with the scores"
                )
        self.priority = derived
        return structure


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


OPTIMALITY = {"s": "none", "p": "pareto", "g": "global", "c": "completion",
              "none": "none", "pareto": "pareto", "global": "global",
              "completion": "completion"}
SEMANTICS = {"brave": "brave", "cqa": "cqa", "int": "intersection"}


def cmd_conflicts(ws: Workspace, args) -> int:
    found = conflicts(ws.db, ws.schema, ws.constraints)
    ordered = sorted(found, key=lambda e: sorted(map(textio.format_literal, e)))
    for conflict in ordered:
        print(textio.format_literal_set(conflict))
    print(f"conflicts: {len(found)}")
    print(f"max conflict size: {max_conflict_size(found)}")
    if args.dot:
        Path(args.dot).write_text(hypergraph_dot(ws), encoding="utf-8")
    return EXIT_OK


def hypergraph_dot(ws: Workspace) -> str:
    graph = conflict_hypergraph(ws.db, ws.schema, ws.constraints)
    lines = ["graph conflicts {"]
    names = {}
    for i, vertex in enumerate(graph.vertices):
        names[vertex] = f"v{i}"
        lines.append(f'  v{i} [label="{vertex}"];')
    for j, edge in enumerate(graph.hyperedges):
        members = sorted(edge, key=lambda l: names[l])
        if len(members) == 2:
            lines.append(f"  {names[members[0]]} -- {names[members[1]]};")
        else:
            lines.append(f'  e{j} [shape=point, label=""];')
            for member in members:
                lines.append(f"  e{j} -- {names[member]};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def cmd_repairs(ws: Workspace, args) -> int:
    kinds = {
        "delta": delta_repairs,
        "subset": subset_repairs,
        "superset": superset_repairs,
    }
    result = kinds[args.kind](ws.db, ws.schema, ws.constraints, ws.budget)
    for repair in result:
        print(textio.format_fact_set(repair))
    print(f"{args.kind} repairs: {len(result)}")
    return EXIT_OK


def cmd_check_repair(ws: Workspace, args) -> int:
    candidate = textio.parse_database(_read(args.repair))
    from .model import universe_constants

    universe = facts_universe(
        ws.db, ws.schema, universe_constants(ws.db, ws.constraints)
    )
    if not candidate <= universe:
        raise InputError("candidate repair contains facts outside the fact universe")
    if args.opt == "none":
        verdict = is_delta_repair(candidate, ws.db, ws.schema, ws.constraints)
    else:
        verdict = is_optimal_repair(candidate, ws.pdb(), args.opt)
    print("yes" if verdict else "no")
    return EXIT_OK if verdict else EXIT_FALSE


def cmd_answer(ws: Workspace, args) -> int:
    q = textio.parse_query(_read(args.query))
    ws.score_structure()
    pdb = ws.pdb()
    result = query_mod.answers(pdb, q, SEMANTICS[args.sem], OPTIMALITY[args.opt])
    if q.is_boolean():
        print("yes" if result.holds() else "no")
        return EXIT_OK if result.holds() else EXIT_FALSE
    for answer in result.tuples:
        print("(" + ", ".join(answer) + ")")
    print(f"answers: {len(result.tuples)}")
    return EXIT_OK


def cmd_optimal(ws: Workspace, args) -> int:
    structure = ws.score_structure()
    pdb = ws.pdb()
    if args.opt == "lex":
        result = lexicographic_repairs(pdb, structure)
    else:
        result = optimal_repairs(pdb, OPTIMALITY[args.opt])
    for repair in result:
        print(textio.format_fact_set(repair))
    print(f"optimal repairs ({args.opt}): {len(result)}")
    return EXIT_OK


def cmd_aic(ws: Workspace, args) -> int:
    if not ws.rules:
        raise InputError("aic commands require --aics")
    if args.action == "classify":
        table = classify_r_updates(ws.db, ws.schema, ws.rules, ws.budget)
        for entry in table:
            flags = [
                name
                for name, on in (
                    ("founded", entry.founded),
                    ("wellfounded", entry.well_founded),
                    ("grounded", entry.grounded),
                    ("justified", entry.justified),
                )
                if on
            ]
            label = " ".join(flags) if flags else "-"
            print(f"{textio.format_update_set(entry.actions)}: {label}")
        print(f"r-updates: {len(table)}")
        return EXIT_OK
    if args.action == "check-update":
        actions = textio.parse_updates(_read(args.update))
        constants = rules_constants(ws.db, ws.rules)
        ground = ground_rules(ws.rules, constants)
        if actions not in r_updates(ws.db, ws.schema, ws.rules, ws.budget):
            print("not an r-update")
            return EXIT_FALSE
        universe = facts_universe(ws.db, ws.schema, constants)
        checks = {
            "founded": is_founded(actions, ws.db, ground),
            "wellfounded": is_well_founded(actions, ws.db, ground),
            "grounded": is_grounded(actions, ws.db, ground),
            "justified": is_justified(actions, ws.db, ground, universe),
        }
        for name in ("founded", "wellfounded", "grounded", "justified"):
            print(f"{name}: {'yes' if checks[name] else 'no'}")
        if args.kind:
            return EXIT_OK if checks[args.kind] else EXIT_FALSE
        return EXIT_OK
    if args.action == "props":
        report = check_properties(ws.rules, ws.db, ws.budget)
        print(f"monotone: {'yes' if report.monotone else 'no'}")
        print(f"closed under resolution: {'yes' if report.closed_under_resolution else 'no'}")
        print(
            "preserves actions under resolution: "
            + ("yes" if report.preserves_actions_resolution else "no")
        )
        print(
            "preserves actions under strengthening: "
            + ("yes" if report.preserves_actions_strengthening else "no")
        )
        for prop, note in report.counterexamples:
            print(f"  {prop}: {note}")
        return EXIT_OK
    raise InputError(f"unknown aic action: {args.action}")


def _write_or_print(path: Optional[str], text: str, label: str) -> None:
    if path:
        Path(path).write_text(text, encoding="utf-8")
    else:
        print(f"# {label}")
        sys.stdout.write(text)


def cmd_translate(ws: Workspace, args) -> int:
    if args.direction == "to-denial":
        image, report = bridges.check_denial_image(
            ws.db, ws.schema, ws.constraints, ws.budget
        )
        _write_or_print(args.out_db, textio.format_database(image.db), "database")
        _write_or_print(
            args.out_constraints,
            textio.format_constraints(image.constraints),
            "constraints",
        )
        print(f"conflicts preserved: {'yes' if report.conflicts_match else 'no'}")
        print(f"repairs preserved: {'yes' if report.repairs_match else 'no'}")
        return EXIT_OK if report.ok() else EXIT_FALSE
    if args.direction == "prio-to-aic":
        rules = bridges.ground_rules_as_aics(bridges.priority_to_rules(ws.pdb()))
        _write_or_print(args.out_aics, textio.format_aics(rules), "active rules")
        return EXIT_OK
    if args.direction == "aic-to-prio":
        if not ws.rules:
            raise InputError("aic-to-prio requires --aics")
        derived = bridges.rules_to_priority(ws.db, ws.schema, ws.rules, ws.budget)
        for warning in derived.property_warnings:
            print(f"warning: {warning}")
        if derived.cycle is not None:
            cycle = " > ".join(str(l) for l in derived.cycle)
            print(f"derived priority is cyclic: {cycle}")
            return EXIT_FALSE
        _write_or_print(
            args.out_constraints,
            textio.format_constraints(derived.constraints),
            "constraints",
        )
        _write_or_print(
            args.out_priority, textio.format_priority(derived.priority), "priority"
        )
        return EXIT_OK
    raise InputError(f"unknown translation: {args.direction}")


def cmd_verify(ws: Workspace, args) -> int:
    if args.check == "prop8":
        report = bridges.check_translation_equivalence(ws.pdb())
        print(f"pareto-optimal repairs: {len(report.pareto)}")
        print(f"founded repairs: {len(report.founded)}")
        print(f"grounded repairs: {len(report.grounded)}")
        print(f"justified repairs: {len(report.justified)}")
        print(f"well-founded repairs: {len(report.well_founded)}")
        print(f"equivalence holds: {'yes' if report.ok() else 'no'}")
        return EXIT_OK if report.ok() else EXIT_FALSE
    if args.check == "prop10":
        if not ws.rules:
            raise InputError("verify prop10 requires --aics")
        report = bridges.check_roundtrip(ws.db, ws.schema, ws.rules, ws.budget)
        for warning in report.warnings:
            print(f"warning: {warning}")
        if report.cycle is not None:
            cycle = " > ".join(str(l) for l in report.cycle)
            print(f"derived priority is cyclic: {cycle}")
            return EXIT_FALSE
        print(f"binary conflicts: {'yes' if report.binary_conflicts else 'no'}")
        print(f"pareto-optimal repairs: {len(report.pareto)}")
        print(f"founded repairs: {len(report.founded)}")
        if report.applicable and report.binary_conflicts:
            good = report.equal()
            print(f"classes coincide: {'yes' if good else 'no'}")
            return EXIT_OK if good else EXIT_FALSE
        good = report.founded_within_pareto()
        witnesses = report.strictness_witnesses()
        print(f"founded within pareto: {'yes' if good else 'no'}")
        for witness in witnesses:
            print(f"pareto-only repair: {textio.format_fact_set(witness)}")
        return EXIT_OK if good else EXIT_FALSE
    raise InputError(f"unknown verification: {args.check}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="prioritydb",
        description="Repairs and inconsistency-tolerant query answering for "
        "prioritized databases and active integrity constraints.",
    )
    parser.add_argument("--db", help="facts file")
    parser.add_argument("--constraints", help="constraints file")
    parser.add_argument("--priority", help="priority file")
    parser.add_argument("--aics", help="active rules file")
    parser.add_argument("--schema", help="schema declarations (P/2. lines)")
    parser.add_argument("--max-universe", type=int, default=22)
    parser.add_argument("--max-completions", type=int, default=10**6)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("conflicts", help="list the conflicts")
    p.add_argument("--dot", help="also write the conflict hypergraph as DOT")
    p.set_defaults(func=cmd_conflicts)

    p = sub.add_parser("repairs", help="enumerate repairs")
    p.add_argument("--kind", choices=["delta", "subset", "superset"], default="delta")
    p.set_defaults(func=cmd_repairs)

    p = sub.add_parser("optimal", help="enumerate optimal repairs")
    p.add_argument("--opt", choices=list(OPTIMALITY) + ["lex"], default="p")
    p.set_defaults(func=cmd_optimal)

    p = sub.add_parser("check-repair", help="check one candidate repair")
    p.add_argument("--repair", required=True, help="facts file with the candidate")
    p.add_argument(
        "--opt", choices=["none", "pareto", "global", "completion"], default="none"
    )
    p.set_defaults(func=cmd_check_repair)

    p = sub.add_parser("answer", help="answer a query under a tolerant semantics")
    p.add_argument("--query", required=True)
    p.add_argument("--sem", choices=["brave", "cqa", "int"], required=True)
    p.add_argument("--opt", choices=["s", "p", "g", "c"], required=True)
    p.set_defaults(func=cmd_answer)

    p = sub.add_parser("aic", help="active-rule commands")
    p.add_argument("action", choices=["classify", "check-update", "props"])
    p.add_argument("--update", help="update actions file (for check-update)")
    p.add_argument(
        "--kind",
        choices=["founded", "wellfounded", "grounded", "justified"],
        help="with check-update: exit 0 iff the update has this property",
    )
    p.set_defaults(func=cmd_aic)

    p = sub.add_parser("translate", help="translate between the frameworks")
    p.add_argument(
        "direction", choices=["to-denial", "prio-to-aic", "aic-to-prio"]
    )
    p.add_argument("--out-db")
    p.add_argument("--out-constraints")
    p.add_argument("--out-priority")
    p.add_argument("--out-aics")
    p.set_defaults(func=cmd_translate)

    p = sub.add_parser("verify", help="run a named cross-framework check")
    p.add_argument("check", choices=["prop8", "prop10"])
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        ws = Workspace(args)
        return args.func(ws, args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except BudgetExceededError as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET


if __name__ == "__main__":
    sys.exit(main())
