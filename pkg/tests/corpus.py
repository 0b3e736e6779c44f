"""Seeded random instance generators for the oracle and property suites."""

from __future__ import annotations

import random
from dataclasses import dataclass

from prioritydb.aic import AIC, UpdateAtom
from prioritydb.conflicts import conflicts
from prioritydb.model import (
    BodyAtom,
    Fact,
    Literal,
    Schema,
    UniversalConstraint,
    literal_key,
)
from prioritydb.priorities import (
    PrioritizedDatabase,
    PriorityRelation,
    co_conflicting_pairs,
)
from prioritydb.query import ConjunctiveQuery

PREDICATE_POOL = [("P", 1), ("Q", 1), ("T", 1), ("U", 1), ("e", 0), ("E", 2)]
CONSTANTS = ["a", "b"]


def random_instance(rng: random.Random) -> PrioritizedDatabase:
    """A small database with 1-4 constraints and an empty priority."""
    while True:
        n_preds = rng.randint(2, 4)
        pairs = rng.sample(PREDICATE_POOL, n_preds)
        if ("E", 2) in pairs and len(pairs) > 3:
            pairs.remove(("E", 2))  # keep the fact universe small
        schema = Schema.of(pairs)
        constants = CONSTANTS[: rng.randint(1, 2)]
        universe = _universe(schema, constants)
        db = frozenset(f for f in universe if rng.random() < 0.65)
        constraints = tuple(
            _random_constraint(rng, pairs, constants)
            for _ in range(rng.randint(2, 4))
        )
        pdb = PrioritizedDatabase(db, schema, constraints)
        if len(universe) <= 12:
            return pdb


def _universe(schema: Schema, constants) -> list[Fact]:
    from itertools import product

    out = []
    for pred, arity in schema.predicates:
        if arity == 0:
            out.append(Fact(pred))
        else:
            for args in product(constants, repeat=arity):
                out.append(Fact(pred, args))
    return out


def _random_constraint(rng, pairs, constants) -> UniversalConstraint:
    variables = ["X", "Y"][: rng.randint(1, 2)]
    terms_pool = variables + constants

    def pick_terms(arity):
        return tuple(rng.choice(terms_pool) for _ in range(arity))

    positives = []
    if rng.random() < 0.55:
        # two-atom denial bodies create repair choices
        for _ in range(2):
            pred, arity = rng.choice(pairs)
            positives.append(BodyAtom(True, pred, pick_terms(arity)))
        bound = sorted({t for a in positives for t in a.terms if t.isupper()})
        inequalities = []
        if len(bound) >= 2 and rng.random() < 0.4:
            inequalities.append((bound[0], bound[1]))
        return UniversalConstraint.make(positives, inequalities)
    for _ in range(rng.randint(1, 2)):
        pred, arity = rng.choice(pairs)
        positives.append(BodyAtom(True, pred, pick_terms(arity)))
    bound = sorted({t for a in positives for t in a.terms if t.isupper()})
    negatives = []
    head = []
    if rng.random() < 0.6:
        pred, arity = rng.choice(pairs)
        terms = tuple(rng.choice(bound or constants) for _ in range(arity))
        if rng.random() < 0.5:
            negatives.append(BodyAtom(False, pred, terms))
        else:
            head.append((pred, terms))
    inequalities = []
    if len(bound) >= 2 and rng.random() < 0.4:
        inequalities.append((bound[0], bound[1]))
    return UniversalConstraint.make(positives + negatives, inequalities, head)


def with_random_priority(
    rng: random.Random, pdb: PrioritizedDatabase, total: bool = False
) -> PrioritizedDatabase:
    """Orient co-conflicting pairs by random literal ranks: every sampled edge
    points from a lower-ranked to a higher-ranked literal, so acyclicity holds
    by construction."""
    conflict_set = conflicts(pdb.db, pdb.schema, pdb.constraints)
    literals = sorted({l for e in conflict_set for l in e}, key=literal_key)
    ranks = {l: rng.random() for l in literals}
    edges = []
    for pair in sorted(
        co_conflicting_pairs(conflict_set), key=lambda p: sorted(map(literal_key, p))
    ):
        a, b = sorted(pair, key=literal_key)
        if total or rng.random() < 0.5:
            edges.append((a, b) if ranks[a] < ranks[b] else (b, a))
    return PrioritizedDatabase(
        pdb.db, pdb.schema, pdb.constraints, PriorityRelation.of(edges), pdb.budget
    )


def with_random_scores(
    rng: random.Random, pdb: PrioritizedDatabase
) -> tuple[PrioritizedDatabase, dict[Literal, int]]:
    conflict_set = conflicts(pdb.db, pdb.schema, pdb.constraints)
    literals = sorted({l for e in conflict_set for l in e}, key=literal_key)
    scores = {l: rng.randint(0, 2) for l in literals}
    from prioritydb.priorities import score_structure_from_scores

    _, priority = score_structure_from_scores(scores, conflict_set)
    return (
        PrioritizedDatabase(pdb.db, pdb.schema, pdb.constraints, priority, pdb.budget),
        scores,
    )


def random_query(rng: random.Random, pdb: PrioritizedDatabase) -> ConjunctiveQuery:
    atoms = []
    for _ in range(rng.randint(1, 2)):
        pred, arity = rng.choice(pdb.schema.predicates)
        terms = tuple(
            rng.choice(["X", "Y", "a", "b"]) for _ in range(arity)
        )
        atoms.append((pred, terms))
    body_vars = sorted({t for _, ts in atoms for t in ts if t.isupper()})
    head = tuple(v for v in body_vars if rng.random() < 0.4)
    return ConjunctiveQuery.make(head, atoms)


PROP_ATOMS = ["p", "q", "r", "s"]


@dataclass(frozen=True)
class RuleInstance:
    db: frozenset
    schema: Schema
    rules: tuple[AIC, ...]


def random_rule_instance(rng: random.Random, monotone: bool = False) -> RuleInstance:
    """Propositional active-rule instances; with ``monotone`` each atom keeps a
    fixed sign across every body."""
    atoms = rng.sample(PROP_ATOMS, rng.randint(2, 4))
    schema = Schema.of([(a, 0) for a in atoms])
    fixed_sign = {a: rng.random() < 0.7 for a in atoms}
    rules = []
    for _ in range(rng.randint(1, 4)):
        body_atoms = rng.sample(atoms, rng.randint(1, min(3, len(atoms))))
        body = []
        for name in body_atoms:
            sign = fixed_sign[name] if monotone else rng.random() < 0.7
            body.append((name, sign))
        k = rng.randint(1, min(2, len(body)))
        updates = [
            (name, not sign) for name, sign in rng.sample(body, k)
        ]
        rules.append(
            AIC.make(
                [BodyAtom(sign, name, ()) for name, sign in body],
                [UpdateAtom(add, name, ()) for name, add in updates],
            )
        )
    db = frozenset(Fact(a) for a in atoms if rng.random() < 0.5)
    return RuleInstance(db, schema, tuple(dict.fromkeys(rules)))


def random_binary_well_behaved(rng: random.Random) -> RuleInstance:
    """Monotone rules whose bodies are distinct violated fact pairs; such sets
    are closed under resolution and preserve actions under both rewrites."""
    atoms = rng.sample(PROP_ATOMS, rng.randint(3, 4))
    schema = Schema.of([(a, 0) for a in atoms])
    db = frozenset(Fact(a) for a in atoms)
    pairs = [
        (x, y) for i, x in enumerate(atoms) for y in atoms[i + 1:]
    ]
    chosen = rng.sample(pairs, rng.randint(2, min(4, len(pairs))))
    rules = []
    for x, y in chosen:
        updates = rng.choice([[(x, False)], [(y, False)], [(x, False), (y, False)]])
        rules.append(
            AIC.make(
                [BodyAtom(True, x, ()), BodyAtom(True, y, ())],
                [UpdateAtom(add, n, ()) for n, add in updates],
            )
        )
    return RuleInstance(db, schema, tuple(rules))
