"""Active integrity constraints: rules that pair a constraint body with the
update actions permitted to repair its violation.

An r-update is a consistent, subset-minimal action set whose application
satisfies every rule.  Four increasingly demanding support notions classify
r-updates: founded (each action is needed by some rule), well-founded (some
application order fires a violated rule at every step), grounded (every proper
subset leaves some rule violated that only the remaining actions can touch),
and justified (the action set plus the no-effect actions is a minimal closed
set).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import DEFAULT_BUDGET, Budget, InputError
from .model import (
    BodyAtom,
    Constant,
    Database,
    Fact,
    Literal,
    Schema,
    Term,
    UniversalConstraint,
    fact_key,
    facts_universe,
    ground_body,
)
from .repairs import RepairSet, delta_repairs, sorted_repair_set


@dataclass(frozen=True)
class UpdateAtom:
    """A possibly non-ground +P(..) or -P(..) update template."""

    add: bool
    predicate: str
    terms: tuple[Term, ...]

    def __str__(self) -> str:
        sign = "+" if self.add else "-"
        return f"{sign}{Fact(self.predicate, self.terms)}"


@dataclass(frozen=True, order=True)
class UpdateAction:
    """A ground update action: add or remove one fact."""

    add: bool
    fact: Fact

    def fixed_literal(self) -> Literal:
        """The literal this action makes true."""
        return Literal(self.fact, positive=self.add)

    def flipped_literal(self) -> Literal:
        """The literal this action makes false."""
        return Literal(self.fact, positive=not self.add)

    def __str__(self) -> str:
        return f"{'+' if self.add else '-'}{self.fact}"


def action_key(action: UpdateAction) -> tuple:
    return (fact_key(action.fact), not action.add)


def repair_action_for(literal: Literal) -> UpdateAction:
    """The action that falsifies a body literal: remove a present fact, add an
    absent one."""
    return UpdateAction(add=not literal.positive, fact=literal.fact)


@dataclass(frozen=True)
class AIC:
    """body -> { update atoms }; every update atom must repair a body literal."""

    body: tuple[BodyAtom, ...]
    inequalities: frozenset[tuple[Term, Term]]
    updates: tuple[UpdateAtom, ...]

    @staticmethod
    def make(
        body: Sequence[BodyAtom],
        updates: Sequence[UpdateAtom],
        inequalities: Iterable[tuple[Term, Term]] = (),
    ) -> "AIC":
        if not updates:
            raise InputError("active rule must offer at least one update action")
        constraint = UniversalConstraint.make(body, inequalities)
        body_index = {(atom.positive, atom.predicate, atom.terms) for atom in body}
        for update in updates:
            if (not update.add, update.predicate, update.terms) not in body_index:
                raise InputError(
                    f"update action {update} does not repair any body literal"
                )
        return AIC(constraint.body, constraint.inequalities, tuple(updates))

    def constraint(self) -> UniversalConstraint:
        return UniversalConstraint(self.body, self.inequalities)

    def constants(self) -> frozenset[Constant]:
        return self.constraint().constants()

    def schema_pairs(self) -> frozenset[tuple[str, int]]:
        return self.constraint().schema_pairs()

    def __str__(self) -> str:
        lhs = str(self.constraint()).removesuffix(" -> false")
        rhs = ", ".join(str(u) for u in self.updates)
        return f"{lhs} -> {{ {rhs} }}"


@dataclass(frozen=True)
class GroundAIC:
    lits: frozenset[Literal]
    updates: frozenset[UpdateAction]

    def violated_by(self, db: Database) -> bool:
        return all((l.fact in db) == l.positive for l in self.lits)

    def non_updatable(self) -> frozenset[Literal]:
        fixed = {u.flipped_literal() for u in self.updates}
        return frozenset(l for l in self.lits if l not in fixed)


def ground_rules(
    rules: Sequence[AIC], constants: Iterable[Constant]
) -> frozenset[GroundAIC]:
    """Ground instances over the constant pool, deduplicated; instances with a
    contradictory body are dropped since they can never fire."""
    out: set[GroundAIC] = set()
    for rule in rules:
        for literals, binding in ground_body(rule.body, rule.inequalities, constants):
            actions = frozenset(
                UpdateAction(
                    u.add,
                    Fact(u.predicate, tuple(binding.get(t, t) for t in u.terms)),
                )
                for u in rule.updates
            )
            out.add(GroundAIC(literals, actions))
    return frozenset(out)


def rules_constants(db: Database, rules: Sequence[AIC]) -> frozenset[Constant]:
    out = set()
    for fact in db:
        out |= set(fact.args)
    for rule in rules:
        out |= rule.constants()
    return frozenset(out)


def constraints_of(rules: Sequence[AIC]) -> tuple[UniversalConstraint, ...]:
    seen = []
    for rule in rules:
        constraint = rule.constraint()
        if constraint not in seen:
            seen.append(constraint)
    return tuple(seen)


def consistent_actions(actions: Iterable[UpdateAction]) -> bool:
    by_fact: dict[Fact, set[bool]] = {}
    for action in actions:
        by_fact.setdefault(action.fact, set()).add(action.add)
    return all(len(signs) == 1 for signs in by_fact.values())


def apply_actions(db: Database, actions: Iterable[UpdateAction]) -> Database:
    actions = list(actions)
    if not consistent_actions(actions):
        raise InputError("action set adds and removes the same fact")
    removed = {a.fact for a in actions if not a.add}
    added = {a.fact for a in actions if a.add}
    return frozenset((db - removed) | added)


def actions_between(db: Database, target: Database) -> frozenset[UpdateAction]:
    return frozenset(
        {UpdateAction(False, f) for f in db - target}
        | {UpdateAction(True, f) for f in target - db}
    )


def r_updates(
    db: Database,
    schema: Schema,
    rules: Sequence[AIC],
    budget: Budget = DEFAULT_BUDGET,
) -> frozenset[frozenset[UpdateAction]]:
    """Consistent minimal action sets restoring every rule; these are exactly
    the differences to the symmetric-difference repairs of the rules' bodies."""
    repairs = delta_repairs(db, schema, constraints_of(rules), budget)
    return frozenset(actions_between(db, repair) for repair in repairs)


def satisfies_rules(db: Database, ground: Iterable[GroundAIC]) -> bool:
    return not any(rule.violated_by(db) for rule in ground)


def is_founded(
    actions: frozenset[UpdateAction],
    db: Database,
    ground: frozenset[GroundAIC],
) -> bool:
    """Every action appears in some rule that the update would violate if just
    that action were dropped."""
    for action in actions:
        relaxed = apply_actions(db, actions - {action})
        if not any(
            action in rule.updates and rule.violated_by(relaxed) for rule in ground
        ):
            return False
    return True


def is_well_founded(
    actions: frozenset[UpdateAction],
    db: Database,
    ground: frozenset[GroundAIC],
) -> bool:
    """Some ordering applies each action while its rule is still violated.

    Whether an action can fire depends only on the set already applied, so the
    search memoizes on that set.
    """
    seen: set[frozenset[UpdateAction]] = set()

    def reachable(applied: frozenset[UpdateAction]) -> bool:
        if applied == actions:
            return True
        if applied in seen:
            return False
        seen.add(applied)
        state = apply_actions(db, applied)
        for action in sorted(actions - applied, key=action_key):
            if any(
                action in rule.updates and rule.violated_by(state) for rule in ground
            ):
                if reachable(applied | {action}):
                    return True
        return False

    return reachable(frozenset())


def normalize(rules: Sequence[AIC]) -> tuple[AIC, ...]:
    """Split each rule into one rule per update action."""
    out = []
    for rule in rules:
        for update in rule.updates:
            out.append(AIC(rule.body, rule.inequalities, (update,)))
    return tuple(dict.fromkeys(out))


def normalize_ground(ground: Iterable[GroundAIC]) -> frozenset[GroundAIC]:
    """Split each ground rule into one rule per update action."""
    return frozenset(
        GroundAIC(rule.lits, frozenset({action}))
        for rule in ground
        for action in rule.updates
    )


def anti_normalize_ground(ground: Iterable[GroundAIC]) -> frozenset[GroundAIC]:
    """Merge rules sharing a body, taking the union of their update actions."""
    merged: dict[frozenset[Literal], set[UpdateAction]] = {}
    for rule in ground:
        merged.setdefault(rule.lits, set()).update(rule.updates)
    return frozenset(
        GroundAIC(lits, frozenset(actions)) for lits, actions in merged.items()
    )


def minimal_bodies_ground(ground: Iterable[GroundAIC]) -> frozenset[GroundAIC]:
    """Anti-normalize, then keep the rules whose bodies are subset-minimal."""
    merged = anti_normalize_ground(ground)
    return frozenset(
        rule
        for rule in merged
        if not any(other.lits < rule.lits for other in merged)
    )


def restrict_rules_to_actions(
    ground: Iterable[GroundAIC], actions: frozenset[UpdateAction]
) -> frozenset[GroundAIC]:
    """Drop update actions outside the given set, and rules left with none."""
    out = set()
    for rule in ground:
        kept = rule.updates & actions
        if kept:
            out.add(GroundAIC(rule.lits, kept))
    return frozenset(out)


def is_grounded(
    actions: frozenset[UpdateAction],
    db: Database,
    ground: frozenset[GroundAIC],
) -> bool:
    """Definition-direct check over the normalized rules: every proper subset
    leaves some rule violated whose action lies in the remaining actions."""
    normalized = normalize_ground(ground)
    members = sorted(actions, key=action_key)
    DEFAULT_BUDGET.check_universe(len(members), "action set")
    for mask in range(1 << len(members)):
        subset = frozenset(m for i, m in enumerate(members) if mask & (1 << i))
        if subset == actions:
            continue
        state = apply_actions(db, subset)
        if not any(
            rule.violated_by(state) and rule.updates <= actions - subset
            for rule in normalized
        ):
            return False
    return True


def is_grounded_via_pruned_rules(
    actions: frozenset[UpdateAction],
    db: Database,
    ground: frozenset[GroundAIC],
) -> bool:
    """Oracle path: an r-update is grounded exactly when it stays minimal for
    the rule set pruned to its own actions."""
    pruned = restrict_rules_to_actions(ground, actions)
    if not satisfies_rules(apply_actions(db, actions), pruned):
        return False
    members = sorted(actions, key=action_key)
    for mask in range(1 << len(members)):
        subset = frozenset(m for i, m in enumerate(members) if mask & (1 << i))
        if subset == actions:
            continue
        if satisfies_rules(apply_actions(db, subset), pruned):
            return False
    return True


def no_effect_actions(
    db: Database, updated: Database, universe: frozenset[Fact]
) -> frozenset[UpdateAction]:
    """Actions that re-assert the status quo: keep facts surviving the update,
    keep out universe facts that were and remain absent."""
    return frozenset(
        {UpdateAction(True, f) for f in db & updated}
        | {UpdateAction(False, f) for f in universe - (db | updated)}
    )


def _closed_under(
    actions: frozenset[UpdateAction], ground: Iterable[GroundAIC]
) -> bool:
    """Closed action sets honor every rule whose non-updatable literals they
    assert: they must then contain one of the rule's update actions."""
    fixed = {a.fixed_literal() for a in actions}
    for rule in ground:
        if all(l in fixed for l in rule.non_updatable()):
            if not rule.updates & actions:
                return False
    return True


def is_justified(
    actions: frozenset[UpdateAction],
    db: Database,
    ground: frozenset[GroundAIC],
    universe: frozenset[Fact],
) -> bool:
    """The actions plus all no-effect actions form a minimal closed set
    containing the no-effect actions."""
    updated = apply_actions(db, actions)
    idle = no_effect_actions(db, updated, universe)
    if not _closed_under(idle | actions, ground):
        return False
    members = sorted(actions, key=action_key)
    DEFAULT_BUDGET.check_universe(len(members), "action set")
    for mask in range(1 << len(members)):
        subset = frozenset(m for i, m in enumerate(members) if mask & (1 << i))
        if subset == actions:
            continue
        if _closed_under(idle | subset, ground):
            return False
    return True


@dataclass(frozen=True)
class RUpdate:
    actions: frozenset[UpdateAction]
    founded: bool
    well_founded: bool
    grounded: bool
    justified: bool


def classify_r_updates(
    db: Database,
    schema: Schema,
    rules: Sequence[AIC],
    budget: Budget = DEFAULT_BUDGET,
) -> tuple[RUpdate, ...]:
    constants = rules_constants(db, rules)
    ground = ground_rules(rules, constants)
    universe = facts_universe(db, schema, constants)
    out = []
    for actions in r_updates(db, schema, rules, budget):
        out.append(
            RUpdate(
                actions,
                founded=is_founded(actions, db, ground),
                well_founded=is_well_founded(actions, db, ground),
                grounded=is_grounded(actions, db, ground),
                justified=is_justified(actions, db, ground, universe),
            )
        )
    return tuple(sorted(out, key=lambda u: sorted(map(action_key, u.actions))))


def repairs_of_kind(
    db: Database,
    schema: Schema,
    rules: Sequence[AIC],
    kind: str,
    budget: Budget = DEFAULT_BUDGET,
) -> RepairSet:
    """Databases reached by the r-updates with the given support property."""
    flags = {
        "all": lambda u: True,
        "founded": lambda u: u.founded,
        "wellfounded": lambda u: u.well_founded,
        "grounded": lambda u: u.grounded,
        "justified": lambda u: u.justified,
    }
    if kind not in flags:
        raise InputError(f"unknown r-update class: {kind}")
    chosen = [
        apply_actions(db, u.actions)
        for u in classify_r_updates(db, schema, rules, budget)
        if flags[kind](u)
    ]
    return sorted_repair_set("delta", chosen)


@dataclass(frozen=True)
class PropertyReport:
    monotone: bool
    closed_under_resolution: bool
    preserves_actions_resolution: bool
    preserves_actions_strengthening: bool
    counterexamples: tuple[tuple[str, str], ...] = ()


def check_properties(
    rules: Sequence[AIC],
    db: Database,
    budget: Budget = DEFAULT_BUDGET,
) -> PropertyReport:
    """Well-behavedness of the ground rule set for the given database.

    All checks run on the ground instances for this database only; they do not
    decide the corresponding property over every database.
    """
    constants = rules_constants(db, rules)
    ground = sorted(
        ground_rules(rules, constants),
        key=lambda r: sorted(map(str, r.lits)),
    )
    notes: list[tuple[str, str]] = []

    facts_by_sign: dict[Fact, set[bool]] = {}
    for rule in ground:
        for lit in rule.lits:
            facts_by_sign.setdefault(lit.fact, set()).add(lit.positive)
    monotone = all(len(signs) == 1 for signs in facts_by_sign.values())
    if not monotone:
        culprit = sorted(
            (f for f, signs in facts_by_sign.items() if len(signs) == 2), key=fact_key
        )[0]
        notes.append(("monotone", f"fact {culprit} occurs with both signs"))

    bodies = {rule.lits for rule in ground}
    closed = _consistent_rule_set(ground, budget)
    if not closed:
        notes.append(("closed_under_resolution", "rule set is unsatisfiable"))
    preserves_res = True
    if closed:
        for i, left in enumerate(ground):
            for right in ground[i + 1:]:
                clashes = [l for l in left.lits if l.negated() in right.lits]
                if len(clashes) != 1:
                    continue
                clash = clashes[0]
                resolvent = (left.lits - {clash}) | (right.lits - {clash.negated()})
                if len({l.fact for l in resolvent}) != len(resolvent):
                    continue
                if resolvent not in bodies:
                    closed = False
                    notes.append(
                        (
                            "closed_under_resolution",
                            f"missing resolvent of ({_fmt(left)}) and ({_fmt(right)})",
                        )
                    )
    for i, left in enumerate(ground):
        for right in ground[i + 1:]:
            for first, second in ((left, right), (right, left)):
                clashes = [l for l in first.lits if l.negated() in second.lits]
                if len(clashes) != 1:
                    continue
                clash = clashes[0]
                resolvent = (first.lits - {clash}) | (second.lits - {clash.negated()})
                for target in ground:
                    if target.lits != resolvent:
                        continue
                    barred = {
                        UpdateAction(True, clash.fact),
                        UpdateAction(False, clash.fact),
                    }
                    expected = (first.updates | second.updates) - barred
                    if not expected <= target.updates:
                        preserves_res = False
                        notes.append(
                            (
                                "preserves_actions_resolution",
                                f"resolvent ({_fmt(target)}) lacks actions of "
                                f"({_fmt(first)}) and ({_fmt(second)})",
                            )
                        )

    merged = anti_normalize_ground(ground)
    preserves_str = True
    for weak in merged:
        for strong in merged:
            if weak.lits < strong.lits and not strong.updates <= weak.updates:
                preserves_str = False
                notes.append(
                    (
                        "preserves_actions_strengthening",
                        f"({_fmt(strong)}) widens the actions of ({_fmt(weak)})",
                    )
                )
    return PropertyReport(
        monotone=monotone,
        closed_under_resolution=closed,
        preserves_actions_resolution=preserves_res,
        preserves_actions_strengthening=preserves_str,
        counterexamples=tuple(notes),
    )


def _fmt(rule: GroundAIC) -> str:
    lits = ", ".join(sorted(map(str, rule.lits)))
    acts = ", ".join(sorted(map(str, rule.updates)))
    return f"{lits} -> {{{acts}}}"


def _consistent_rule_set(ground: Sequence[GroundAIC], budget: Budget) -> bool:
    """Some database over the mentioned facts satisfies every rule."""
    mentioned = sorted({l.fact for rule in ground for l in rule.lits}, key=fact_key)
    budget.check_universe(len(mentioned), "mentioned fact set")
    for mask in range(1 << len(mentioned)):
        db = frozenset(f for i, f in enumerate(mentioned) if mask & (1 << i))
        if satisfies_rules(db, ground):
            return True
    return False
