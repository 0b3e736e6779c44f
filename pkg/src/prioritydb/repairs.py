"""Repair enumeration: symmetric-difference, subset, and superset repairs."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Sequence

from .conflicts import Conflict, conflict_hypergraph, conflicts
from .errors import DEFAULT_BUDGET, Budget
from .model import (
    Database,
    Fact,
    Literal,
    Schema,
    UniversalConstraint,
    agreement,
    fact_key,
    ground_all,
    literal_key,
    literal_universe,
    restriction,
    universe_constants,
)


@dataclass(frozen=True)
class RepairSet:
    kind: str  # "delta" | "subset" | "superset"
    repairs: tuple[Database, ...]

    def __contains__(self, candidate: Database) -> bool:
        return candidate in self.repairs

    def __iter__(self):
        return iter(self.repairs)

    def __len__(self) -> int:
        return len(self.repairs)


def sorted_repair_set(kind: str, repairs) -> RepairSet:
    ordered = sorted(set(repairs), key=lambda r: (len(r), sorted(r, key=fact_key)))
    return RepairSet(kind, tuple(ordered))


def maximal_independent_sets(
    vertices: Sequence[Literal],
    hyperedges: Sequence[Conflict],
    budget: Budget = DEFAULT_BUDGET,
) -> Iterator[frozenset[Literal]]:
    """Backtracking enumeration over the canonical vertex order.

    A set is independent when it contains no hyperedge; maximality is checked
    against the full vertex set at each leaf.
    """
    budget.check_universe(len(vertices), "conflict literal set")
    order = sorted(vertices, key=literal_key)
    edges = [frozenset(e) for e in hyperedges]

    def completes_edge(chosen: set[Literal], vertex: Literal) -> bool:
        return any(vertex in e and e - {vertex} <= chosen for e in edges)

    def walk(index: int, chosen: set[Literal], excluded: set[Literal]):
        if index == len(order):
            if all(completes_edge(chosen, v) for v in excluded):
                yield frozenset(chosen)
            return
        vertex = order[index]
        if not completes_edge(chosen, vertex):
            chosen.add(vertex)
            yield from walk(index + 1, chosen, excluded)
            chosen.remove(vertex)
            excluded.add(vertex)
            yield from walk(index + 1, chosen, excluded)
            excluded.remove(vertex)
        else:
            excluded.add(vertex)
            yield from walk(index + 1, chosen, excluded)
            excluded.remove(vertex)

    yield from walk(0, set(), set())


@lru_cache(maxsize=None)
def delta_repairs(
    db: Database,
    schema: Schema,
    constraints: tuple[UniversalConstraint, ...],
    budget: Budget = DEFAULT_BUDGET,
) -> RepairSet:
    """Every maximal independent set of the conflict hypergraph, completed with
    the conflict-free literals and mapped back to a database."""
    constants = universe_constants(db, constraints)
    graph = conflict_hypergraph(db, schema, constraints)
    free = literal_universe(db, schema, constants) - set(graph.vertices)
    out = []
    for mis in maximal_independent_sets(graph.vertices, graph.hyperedges, budget):
        out.append(restriction(db, schema, frozenset(mis | free), constants))
    return sorted_repair_set("delta", out)


def _as_bitmask_problem(
    db: Database, schema: Schema, constraints: tuple[UniversalConstraint, ...]
):
    constants = universe_constants(db, constraints)
    from .model import facts_universe

    universe = sorted(facts_universe(db, schema, constants), key=fact_key)
    index = {fact: i for i, fact in enumerate(universe)}
    bodies = []
    for body in ground_all(constraints, constants):
        pos = 0
        neg = 0
        for lit in body:
            bit = 1 << index[lit.fact]
            if lit.positive:
                pos |= bit
            else:
                neg |= bit
        bodies.append((pos, neg))
    db_mask = 0
    for fact in db:
        db_mask |= 1 << index[fact]
    return universe, bodies, db_mask


def _consistent_mask(mask: int, bodies) -> bool:
    return not any((mask & pos) == pos and (mask & neg) == 0 for pos, neg in bodies)


def delta_repairs_bruteforce(
    db: Database,
    schema: Schema,
    constraints: tuple[UniversalConstraint, ...],
    budget: Budget = DEFAULT_BUDGET,
) -> RepairSet:
    """Definition-direct oracle: scan every subset of the fact universe, keep
    the consistent ones, retain those at minimal symmetric difference."""
    universe, bodies, db_mask = _as_bitmask_problem(db, schema, constraints)
    budget.check_universe(len(universe))
    minimal_diffs: list[int] = []
    winners: list[int] = []
    candidates = []
    for mask in range(1 << len(universe)):
        if _consistent_mask(mask, bodies):
            candidates.append((bin(mask ^ db_mask).count("1"), mask ^ db_mask, mask))
    candidates.sort()
    for _, diff, mask in candidates:
        if not any((kept & diff) == kept for kept in minimal_diffs):
            minimal_diffs.append(diff)
            winners.append(mask)
    out = []
    for mask in winners:
        out.append(frozenset(f for i, f in enumerate(universe) if mask & (1 << i)))
    return sorted_repair_set("delta", out)


def is_delta_repair(
    candidate: Database,
    db: Database,
    schema: Schema,
    constraints: Sequence[UniversalConstraint],
) -> bool:
    """A candidate repair is a symmetric-difference repair exactly when its
    agreement set is a maximal conflict-free subset of the literal universe."""
    constants = universe_constants(db, constraints)
    conflict_set = conflicts(db, schema, tuple(constraints))
    agree = agreement(db, schema, candidate, constants)
    if any(e <= agree for e in conflict_set):
        return False
    lits = literal_universe(db, schema, constants)
    for lit in lits - agree:
        if not any(lit in e and e - {lit} <= agree for e in conflict_set):
            return False
    return True


def subset_repairs(
    db: Database,
    schema: Schema,
    constraints: tuple[UniversalConstraint, ...],
    budget: Budget = DEFAULT_BUDGET,
) -> RepairSet:
    """Maximal consistent subsets of the database."""
    budget.check_universe(len(db), "database")
    constants = universe_constants(db, constraints)
    bodies = ground_all(constraints, constants)
    facts = sorted(db, key=fact_key)
    keepers: list[frozenset[Fact]] = []
    for mask in range(1 << len(facts)):
        subset = frozenset(f for i, f in enumerate(facts) if mask & (1 << i))
        if all(not _violated(subset, body) for body in bodies):
            keepers.append(subset)
    maximal = [s for s in keepers if not any(s < t for t in keepers)]
    return sorted_repair_set("subset", maximal)


def superset_repairs(
    db: Database,
    schema: Schema,
    constraints: tuple[UniversalConstraint, ...],
    budget: Budget = DEFAULT_BUDGET,
) -> RepairSet:
    """Minimal consistent supersets of the database inside the fact universe;
    may be empty."""
    constants = universe_constants(db, constraints)
    from .model import facts_universe

    pool = sorted(facts_universe(db, schema, constants) - db, key=fact_key)
    budget.check_universe(len(pool), "addition pool")
    bodies = ground_all(constraints, constants)
    keepers: list[frozenset[Fact]] = []
    for mask in range(1 << len(pool)):
        candidate = db | {f for i, f in enumerate(pool) if mask & (1 << i)}
        if all(not _violated(candidate, body) for body in bodies):
            keepers.append(frozenset(candidate))
    minimal = [s for s in keepers if not any(t < s for t in keepers)]
    return sorted_repair_set("superset", minimal)


def _violated(db: frozenset[Fact], body) -> bool:
    return all((lit.fact in db) == lit.positive for lit in body)
