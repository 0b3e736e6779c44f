"""Priority relations over conflict literals and the three optimal-repair notions.

A priority relation is an acyclic set of directed edges between literals that
share a conflict.  Improvements compare agreement sets: Pareto improvements
need one added literal outranking every sacrificed one, global improvements
need a witness per sacrificed literal, and completion-optimal repairs are
those optimal under some total extension of the priority.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterator, Optional, Sequence

from .conflicts import Conflict, conflicts
from .errors import DEFAULT_BUDGET, Budget, BudgetExceededError, InputError
from .model import (
    Database,
    Literal,
    Schema,
    UniversalConstraint,
    agreement,
    literal_key,
    literal_universe,
    restriction,
    universe_constants,
)
from .repairs import RepairSet, delta_repairs, is_delta_repair, sorted_repair_set

Edge = tuple[Literal, Literal]


@dataclass(frozen=True)
class PriorityRelation:
    """Directed edges (stronger, weaker) between co-conflicting literals.

    Dominance is edge membership; it is not transitively closed, since edges
    only relate literals that share a conflict.
    """

    edges: frozenset[Edge] = frozenset()

    @staticmethod
    def of(pairs) -> "PriorityRelation":
        return PriorityRelation(frozenset((a, b) for a, b in pairs))

    def outranks(self, strong: Literal, weak: Literal) -> bool:
        return (strong, weak) in self.edges

    def dominated_by(self, strong: Literal) -> frozenset[Literal]:
        return frozenset(b for a, b in self.edges if a == strong)

    def literals(self) -> frozenset[Literal]:
        return frozenset(l for e in self.edges for l in e)

    def find_cycle(self) -> Optional[tuple[Literal, ...]]:
        succ: dict[Literal, list[Literal]] = {}
        for a, b in self.edges:
            succ.setdefault(a, []).append(b)
        colors: dict[Literal, int] = {}
        stack: list[Literal] = []

        def visit(node: Literal) -> Optional[tuple[Literal, ...]]:
            colors[node] = 1
            stack.append(node)
            for nxt in sorted(succ.get(node, []), key=literal_key):
                if colors.get(nxt) == 1:
                    return tuple(stack[stack.index(nxt):]) + (nxt,)
                if colors.get(nxt, 0) == 0:
                    found = visit(nxt)
                    if found:
                        return found
            colors[node] = 2
            stack.pop()
            return None

        for node in sorted(succ, key=literal_key):
            if colors.get(node, 0) == 0:
                found = visit(node)
                if found:
                    return found
        return None

    def is_acyclic(self) -> bool:
        return self.find_cycle() is None


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    cycle: Optional[tuple[Literal, ...]] = None
    stray_edges: tuple[Edge, ...] = ()


def co_conflicting_pairs(conflict_set: frozenset[Conflict]) -> frozenset[frozenset[Literal]]:
    pairs: set[frozenset[Literal]] = set()
    for edge in conflict_set:
        members = sorted(edge, key=literal_key)
        for i, a in enumerate(members):
            for b in members[i + 1:]:
                pairs.add(frozenset((a, b)))
    return frozenset(pairs)


def validate_priority(
    priority: PriorityRelation, conflict_set: frozenset[Conflict]
) -> ValidationReport:
    """Diagnose acyclicity and the requirement that every edge joins literals
    sharing some conflict."""
    pairs = co_conflicting_pairs(conflict_set)
    stray = tuple(
        sorted(
            (e for e in priority.edges if frozenset(e) not in pairs),
            key=lambda e: (literal_key(e[0]), literal_key(e[1])),
        )
    )
    cycle = priority.find_cycle()
    return ValidationReport(ok=not stray and cycle is None, cycle=cycle, stray_edges=stray)


@dataclass(frozen=True)
class PrioritizedDatabase:
    db: Database
    schema: Schema
    constraints: tuple[UniversalConstraint, ...]
    priority: PriorityRelation = PriorityRelation()
    budget: Budget = DEFAULT_BUDGET

    def constants(self) -> frozenset[str]:
        return universe_constants(self.db, self.constraints)

    def conflicts(self) -> frozenset[Conflict]:
        return conflicts(self.db, self.schema, self.constraints)

    def literal_universe(self) -> frozenset[Literal]:
        return literal_universe(self.db, self.schema, self.constants())

    def delta_repairs(self) -> RepairSet:
        return delta_repairs(self.db, self.schema, self.constraints, self.budget)

    def agreement(self, candidate: Database) -> frozenset[Literal]:
        return agreement(self.db, self.schema, candidate, self.constants())

    def restriction(self, litset: frozenset[Literal]) -> Database:
        return restriction(self.db, self.schema, litset, self.constants())

    def validate(self) -> ValidationReport:
        return validate_priority(self.priority, self.conflicts())


def is_pareto_improvement(
    better: Database, repair: Database, pdb: PrioritizedDatabase
) -> bool:
    """True when ``better`` is consistent and one of its newly kept literals
    outranks every literal sacrificed from ``repair``'s agreement set."""
    from .model import satisfies

    if not satisfies(better, pdb.constraints, pdb.constants()):
        return False
    mine = pdb.agreement(better)
    theirs = pdb.agreement(repair)
    gained = mine - theirs
    lost = theirs - mine
    return any(
        all(pdb.priority.outranks(mu, lam) for lam in lost) for mu in gained
    )


def is_global_improvement(
    better: Database, repair: Database, pdb: PrioritizedDatabase
) -> bool:
    """True when ``better`` is consistent, differs in agreement, and every
    sacrificed literal is outranked by some newly kept one."""
    from .model import satisfies

    if not satisfies(better, pdb.constraints, pdb.constants()):
        return False
    mine = pdb.agreement(better)
    theirs = pdb.agreement(repair)
    if mine == theirs:
        return False
    gained = mine - theirs
    lost = theirs - mine
    return all(
        any(pdb.priority.outranks(mu, lam) for mu in gained) for lam in lost
    )


def _is_pareto_optimal(repair: Database, pdb: PrioritizedDatabase) -> bool:
    """A repair admits a Pareto improvement exactly when some excluded literal
    can be kept after dropping everything it outranks without completing a
    conflict; check that every excluded literal is blocked."""
    agree = pdb.agreement(repair)
    conflict_set = pdb.conflicts()
    for lam in pdb.literal_universe() - agree:
        candidate = (agree | {lam}) - pdb.priority.dominated_by(lam)
        if not any(e <= candidate for e in conflict_set):
            return False
    return True


def _is_globally_optimal(repair: Database, pdb: PrioritizedDatabase) -> bool:
    # Any global improvement extends to one whose agreement set is that of a
    # full repair, so scanning the other repairs is complete.
    agree = pdb.agreement(repair)
    for other in pdb.delta_repairs():
        if other == repair:
            continue
        mine = pdb.agreement(other)
        gained = mine - agree
        lost = agree - mine
        if all(any(pdb.priority.outranks(mu, lam) for mu in gained) for lam in lost):
            return False
    return True


def _completion_certificate(repair: Database, pdb: PrioritizedDatabase) -> bool:
    """Search for an order certificate: per excluded literal a witness conflict
    whose other members must precede it, such that these precedence demands
    together with the priority edges stay acyclic."""
    agree = pdb.agreement(repair)
    conflict_set = pdb.conflicts()
    excluded = sorted(pdb.literal_universe() - agree, key=literal_key)
    options: list[list[frozenset[Literal]]] = []
    for lam in excluded:
        witnesses = [
            e - {lam} for e in conflict_set if lam in e and e - {lam} <= agree
        ]
        if not witnesses:
            return False
        options.append(sorted(witnesses, key=lambda w: sorted(map(literal_key, w))))

    base_edges = set(pdb.priority.edges)

    def acyclic(edges: set[Edge]) -> bool:
        return PriorityRelation(frozenset(edges)).is_acyclic()

    def assign(index: int, edges: set[Edge]) -> bool:
        if index == len(excluded):
            return True
        lam = excluded[index]
        for witness in options[index]:
            added = {(mu, lam) for mu in witness}
            grown = edges | added
            if acyclic(grown):
                if assign(index + 1, grown):
                    return True
        return False

    return assign(0, base_edges)


def is_optimal_repair(
    repair: Database, pdb: PrioritizedDatabase, kind: str
) -> bool:
    """Membership check for one repair; kind is 'pareto', 'global', or
    'completion' ('none' checks plain repair membership)."""
    if not is_delta_repair(repair, pdb.db, pdb.schema, pdb.constraints):
        return False
    if kind in ("none", "delta"):
        return True
    if kind == "pareto":
        return _is_pareto_optimal(repair, pdb)
    if kind == "global":
        return _is_globally_optimal(repair, pdb)
    if kind == "completion":
        return _completion_certificate(repair, pdb)
    raise InputError(f"unknown optimality kind: {kind}")


def optimal_repairs(pdb: PrioritizedDatabase, kind: str) -> RepairSet:
    base = pdb.delta_repairs()
    if kind in ("none", "delta"):
        return base
    checks = {
        "pareto": _is_pareto_optimal,
        "global": _is_globally_optimal,
        "completion": _completion_certificate,
    }
    if kind not in checks:
        raise InputError(f"unknown optimality kind: {kind}")
    keep = [r for r in base if checks[kind](r, pdb)]
    return sorted_repair_set("delta", keep)


def greedy_optimal_repair(
    pdb: PrioritizedDatabase, tiebreak: Sequence[Literal] = ()
) -> Database:
    """Build a completion-optimal repair greedily: repeatedly take a literal
    that no unconsidered literal outranks directly and keep it unless it
    completes a conflict.  ``tiebreak`` literals are preferred, in order, over
    the canonical order."""
    lits = pdb.literal_universe()
    conflict_set = pdb.conflicts()
    rank = {lit: i for i, lit in enumerate(tiebreak)}

    def sort_key(lit: Literal):
        return (rank.get(lit, len(rank)), literal_key(lit))

    pending = set(lits)
    chosen: set[Literal] = set()
    while pending:
        candidates = [
            lit
            for lit in pending
            if not any(
                pdb.priority.outranks(other, lit)
                for other in pending
                if other != lit
            )
        ]
        if not candidates:
            raise InputError("priority relation is cyclic")
        lit = min(candidates, key=sort_key)
        pending.remove(lit)
        if not any(e <= chosen | {lit} for e in conflict_set):
            chosen.add(lit)
    return pdb.restriction(frozenset(chosen))


def completions(
    priority: PriorityRelation,
    conflict_set: frozenset[Conflict],
    budget: Budget = DEFAULT_BUDGET,
) -> Iterator[PriorityRelation]:
    """Every acyclic orientation of the co-conflicting pairs that extends the
    given priority."""
    undirected = []
    for pair in sorted(
        co_conflicting_pairs(conflict_set),
        key=lambda p: sorted(map(literal_key, p)),
    ):
        a, b = sorted(pair, key=literal_key)
        if (a, b) in priority.edges or (b, a) in priority.edges:
            continue
        undirected.append((a, b))
    if 2 ** len(undirected) > budget.max_completions:
        raise BudgetExceededError(
            f"{2 ** len(undirected)} orientations exceed the completion cap"
        )
    for choice in product((0, 1), repeat=len(undirected)):
        edges = set(priority.edges)
        for flip, (a, b) in zip(choice, undirected):
            edges.add((b, a) if flip else (a, b))
        candidate = PriorityRelation(frozenset(edges))
        if candidate.is_acyclic():
            yield candidate


def completion_optimal_repairs_bruteforce(pdb: PrioritizedDatabase) -> RepairSet:
    """Oracle path: a repair is completion-optimal exactly when it is the
    single optimum under some total extension, which the greedy construction
    produces."""
    out = set()
    for total in completions(pdb.priority, pdb.conflicts(), pdb.budget):
        extended = PrioritizedDatabase(
            pdb.db, pdb.schema, pdb.constraints, total, pdb.budget
        )
        out.add(greedy_optimal_repair(extended))
    return sorted_repair_set("delta", out)


@dataclass(frozen=True)
class ScoreStructure:
    """Reliability levels inducing the priority: a literal outranks a
    co-conflicting one exactly when its score is higher.  ``levels`` lists the
    literals by descending score."""

    score: tuple[tuple[Literal, int], ...]
    levels: tuple[tuple[Literal, ...], ...]

    def score_of(self, lit: Literal) -> int:
        for other, value in self.score:
            if other == lit:
                return value
        raise KeyError(lit)


def detect_score_structure(
    priority: PriorityRelation, conflict_set: frozenset[Conflict]
) -> Optional[ScoreStructure]:
    """Reconstruct reliability levels when they exist.

    Unordered co-conflicting pairs must share a level and ordered pairs must
    descend, so literals are merged along unordered pairs and the induced
    strict constraints must stay acyclic; levels then come from longest paths.
    """
    literals = sorted({l for e in conflict_set for l in e}, key=literal_key)
    parent: dict[Literal, Literal] = {l: l for l in literals}

    def find(x: Literal) -> Literal:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a: Literal, b: Literal) -> None:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[rb] = ra

    for pair in co_conflicting_pairs(conflict_set):
        a, b = sorted(pair, key=literal_key)
        if not priority.outranks(a, b) and not priority.outranks(b, a):
            union(a, b)
    strict: set[tuple[Literal, Literal]] = set()
    for a, b in priority.edges:
        if a not in parent or b not in parent:
            return None
        ra, rb = find(a), find(b)
        if ra == rb:
            return None
        strict.add((ra, rb))
    succ: dict[Literal, set[Literal]] = {}
    for a, b in strict:
        succ.setdefault(a, set()).add(b)
    roots = {find(l) for l in literals}
    depth: dict[Literal, int] = {}
    state: dict[Literal, int] = {}

    def longest(node: Literal) -> int:
        if state.get(node) == 1:
            return -1  # cycle
        if node in depth:
            return depth[node]
        state[node] = 1
        best = 0
        for nxt in succ.get(node, ()):  # score must strictly drop along edges
            below = longest(nxt)
            if below < 0:
                return -1
            best = max(best, below + 1)
        state[node] = 2
        depth[node] = best
        return best

    for root in roots:
        if longest(root) < 0:
            return None
    score = {lit: depth[find(lit)] for lit in literals}
    by_level: dict[int, list[Literal]] = {}
    for lit, value in score.items():
        by_level.setdefault(value, []).append(lit)
    levels = tuple(
        tuple(sorted(by_level[v], key=literal_key))
        for v in sorted(by_level, reverse=True)
    )
    return ScoreStructure(
        tuple(sorted(score.items(), key=lambda kv: literal_key(kv[0]))), levels
    )


def score_structure_from_scores(
    scores: dict[Literal, int], conflict_set: frozenset[Conflict]
) -> tuple[ScoreStructure, PriorityRelation]:
    """Build the levels and induced priority from explicit scores; literals
    without a score default to 0."""
    literals = sorted({l for e in conflict_set for l in e}, key=literal_key)
    table = {l: scores.get(l, 0) for l in literals}
    edges = set()
    for pair in co_conflicting_pairs(conflict_set):
        a, b = sorted(pair, key=literal_key)
        if table[a] > table[b]:
            edges.add((a, b))
        elif table[b] > table[a]:
            edges.add((b, a))
    by_level: dict[int, list[Literal]] = {}
    for lit, value in table.items():
        by_level.setdefault(value, []).append(lit)
    levels = tuple(
        tuple(sorted(by_level[v], key=literal_key))
        for v in sorted(by_level, reverse=True)
    )
    structure = ScoreStructure(
        tuple(sorted(table.items(), key=lambda kv: literal_key(kv[0]))), levels
    )
    return structure, PriorityRelation(frozenset(edges))


def lexicographic_repairs(
    pdb: PrioritizedDatabase, structure: Optional[ScoreStructure] = None
) -> RepairSet:
    """Level-lexicographic optima for score-structured priorities: no other
    repair agrees equally on all higher levels and strictly better on one."""
    if structure is None:
        structure = detect_score_structure(pdb.priority, pdb.conflicts())
    if structure is None:
        raise InputError("priority relation is not score-structured")
    base = pdb.delta_repairs()
    agreements = {r: pdb.agreement(r) for r in base}
    levels = [frozenset(level) for level in structure.levels]

    def beaten(r: Database) -> bool:
        mine = agreements[r]
        for other in base:
            if other == r:
                continue
            theirs = agreements[other]
            for level in levels:
                a, b = mine & level, theirs & level
                if a < b:
                    return True
                if a != b:
                    break
        return False

    return sorted_repair_set("delta", [r for r in base if not beaten(r)])
