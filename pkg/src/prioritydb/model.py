"""Ground and non-ground syntax: facts, literals, constraints, and their semantics.

A database is a frozenset of ground facts.  The literal universe of a database
pairs its facts with explicit negations of every absent fact that can be built
from the schema and the available constants.  Candidate repairs live inside
that fact universe; ``agreement`` and ``restriction`` convert between candidate
repairs and subsets of the literal universe and are mutually inverse.

Terms are plain strings.  An identifier starting with an upper-case letter or
an underscore is a variable; anything else is a constant.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import Iterable, Iterator, Optional, Sequence

from .errors import InputError

Term = str
Constant = str


def is_variable(term: Term) -> bool:
    return term[:1].isupper() or term[:1] == "_"


@dataclass(frozen=True, order=True)
class Fact:
    predicate: str
    args: tuple[Constant, ...] = ()

    def __str__(self) -> str:
        if not self.args:
            return self.predicate
        return f"{self.predicate}({', '.join(self.args)})"


@dataclass(frozen=True)
class Literal:
    fact: Fact
    positive: bool = True

    def negated(self) -> "Literal":
        return Literal(self.fact, not self.positive)

    def __str__(self) -> str:
        return str(self.fact) if self.positive else f"!{self.fact}"


def literal_key(lit: Literal) -> tuple:
    """Canonical total order on literals: positive literals first, then by fact."""
    return (not lit.positive, lit.fact.predicate, lit.fact.args)


def fact_key(fact: Fact) -> tuple:
    return (fact.predicate, fact.args)


Database = frozenset[Fact]
GroundConstraint = frozenset[Literal]


@dataclass(frozen=True)
class Schema:
    """Relation names with arities; names unique, arity 0 permitted."""

    predicates: tuple[tuple[str, int], ...]

    @staticmethod
    def of(pairs: Iterable[tuple[str, int]]) -> "Schema":
        seen: dict[str, int] = {}
        for name, arity in pairs:
            if arity < 0:
                raise InputError(f"negative arity for predicate {name}")
            if name in seen and seen[name] != arity:
                raise InputError(
                    f"predicate {name} declared with arities {seen[name]} and {arity}"
                )
            seen[name] = arity
        return Schema(tuple(sorted(seen.items())))

    def arity(self, name: str) -> int:
        for pred, arity in self.predicates:
            if pred == name:
                return arity
        raise InputError(f"predicate {name} is not declared in the schema")

    def has(self, name: str) -> bool:
        return any(pred == name for pred, _ in self.predicates)

    def names(self) -> tuple[str, ...]:
        return tuple(pred for pred, _ in self.predicates)

    def merged_with(self, other: "Schema") -> "Schema":
        return Schema.of(self.predicates + other.predicates)

    def check_fact(self, fact: Fact) -> None:
        if self.arity(fact.predicate) != len(fact.args):
            raise InputError(
                f"fact {fact} has {len(fact.args)} arguments, "
                f"predicate {fact.predicate} has arity {self.arity(fact.predicate)}"
            )


@dataclass(frozen=True)
class BodyAtom:
    """A possibly negated relational atom occurring in a constraint body."""

    positive: bool
    predicate: str
    terms: tuple[Term, ...]

    def substituted(self, binding: dict[Term, Constant]) -> "BodyAtom":
        return BodyAtom(
            self.positive,
            self.predicate,
            tuple(binding.get(t, t) for t in self.terms),
        )

    def variables(self) -> frozenset[Term]:
        return frozenset(t for t in self.terms if is_variable(t))

    def to_literal(self) -> Literal:
        return Literal(Fact(self.predicate, self.terms), self.positive)

    def __str__(self) -> str:
        atom = str(Fact(self.predicate, self.terms))
        return atom if self.positive else f"not {atom}"


@dataclass(frozen=True)
class UniversalConstraint:
    """A universally quantified rule normalized to the body-implies-false form.

    Head atoms supplied at construction are folded into the body as negated
    atoms, so one representation covers denial constraints and rules with
    disjunctive heads alike.  Safety: every variable must occur in a positive
    body atom.
    """

    body: tuple[BodyAtom, ...]
    inequalities: frozenset[tuple[Term, Term]] = frozenset()

    @staticmethod
    def make(
        body: Sequence[BodyAtom],
        inequalities: Iterable[tuple[Term, Term]] = (),
        head: Sequence[tuple[str, tuple[Term, ...]]] = (),
    ) -> "UniversalConstraint":
        atoms = list(body) + [BodyAtom(False, pred, terms) for pred, terms in head]
        if not atoms:
            raise InputError("constraint with empty body and empty head is unsatisfiable")
        ineqs = frozenset(tuple(sorted(pair)) for pair in inequalities)
        constraint = UniversalConstraint(tuple(atoms), ineqs)
        constraint._check_safety()
        return constraint

    def _check_safety(self) -> None:
        bound: set[Term] = set()
        for atom in self.body:
            if atom.positive:
                bound |= atom.variables()
        for atom in self.body:
            if not atom.positive:
                loose = atom.variables() - bound
                if loose:
                    raise InputError(
                        f"unsafe constraint: variable {sorted(loose)[0]} occurs only "
                        f"in negated atom {atom}"
                    )
        for left, right in self.inequalities:
            for term in (left, right):
                if is_variable(term) and term not in bound:
                    raise InputError(
                        f"unsafe constraint: variable {term} occurs only in an inequality"
                    )

    def is_denial(self) -> bool:
        return all(atom.positive for atom in self.body)

    def variables(self) -> frozenset[Term]:
        out: set[Term] = set()
        for atom in self.body:
            out |= atom.variables()
        return frozenset(out)

    def constants(self) -> frozenset[Constant]:
        out: set[Constant] = set()
        for atom in self.body:
            out |= {t for t in atom.terms if not is_variable(t)}
        for left, right in self.inequalities:
            out |= {t for t in (left, right) if not is_variable(t)}
        return frozenset(out)

    def schema_pairs(self) -> frozenset[tuple[str, int]]:
        return frozenset((a.predicate, len(a.terms)) for a in self.body)

    def __str__(self) -> str:
        parts = [str(atom) for atom in self.body]
        parts += [f"{l} != {r}" for l, r in sorted(self.inequalities)]
        return f"{', '.join(parts)} -> false"


def active_domain(db: Database) -> frozenset[Constant]:
    out: set[Constant] = set()
    for fact in db:
        out |= set(fact.args)
    return frozenset(out)


def constraint_constants(constraints: Iterable[UniversalConstraint]) -> frozenset[Constant]:
    out: set[Constant] = set()
    for constraint in constraints:
        out |= constraint.constants()
    return frozenset(out)


def universe_constants(
    db: Database, constraints: Iterable[UniversalConstraint] = ()
) -> frozenset[Constant]:
    """Constants available for grounding: the active domain plus any constants
    named by the constraints themselves."""
    return active_domain(db) | constraint_constants(constraints)


@lru_cache(maxsize=None)
def facts_universe(
    db: Database, schema: Schema, extra_constants: frozenset[Constant] = frozenset()
) -> frozenset[Fact]:
    """All facts over the schema built from the database constants.

    ``extra_constants`` widens the constant pool (used to admit constants that
    appear in constraints but not in the data).  An empty constant pool still
    yields every arity-0 fact.
    """
    for fact in db:
        schema.check_fact(fact)
    constants = sorted(active_domain(db) | extra_constants)
    out: set[Fact] = set()
    for pred, arity in schema.predicates:
        if arity == 0:
            out.add(Fact(pred))
        else:
            for args in product(constants, repeat=arity):
                out.add(Fact(pred, args))
    return frozenset(out)


def literal_universe(
    db: Database, schema: Schema, extra_constants: frozenset[Constant] = frozenset()
) -> frozenset[Literal]:
    """The database facts plus explicit negations of every absent fact."""
    universe = facts_universe(db, schema, extra_constants)
    return frozenset(
        Literal(fact, positive=fact in db) for fact in universe
    )


def agreement(
    db: Database,
    schema: Schema,
    repair: Database,
    extra_constants: frozenset[Constant] = frozenset(),
) -> frozenset[Literal]:
    """Literals of the database's literal universe on which a candidate repair
    agrees with the database: kept facts plus jointly absent facts."""
    universe = facts_universe(db, schema, extra_constants)
    stray = repair - universe
    if stray:
        raise InputError(f"candidate repair fact {sorted(stray, key=fact_key)[0]} "
                         f"is outside the fact universe")
    kept = repair & db
    jointly_absent = universe - (repair | db)
    return frozenset(
        {Literal(f, True) for f in kept} | {Literal(f, False) for f in jointly_absent}
    )


def restriction(
    db: Database,
    schema: Schema,
    litset: frozenset[Literal],
    extra_constants: frozenset[Constant] = frozenset(),
) -> Database:
    """The candidate repair induced by a set of kept literals: retained facts
    plus one added fact for every negative literal dropped from the universe."""
    lits = literal_universe(db, schema, extra_constants)
    stray = litset - lits
    if stray:
        raise InputError(
            f"literal {sorted(stray, key=literal_key)[0]} is outside the literal universe"
        )
    kept = {l.fact for l in litset if l.positive}
    added = {l.fact for l in lits - litset if not l.positive}
    return frozenset(kept | added)


def _substitutions(
    variables: Sequence[Term], constants: Sequence[Constant]
) -> Iterator[dict[Term, Constant]]:
    if not variables:
        yield {}
        return
    for values in product(constants, repeat=len(variables)):
        yield dict(zip(variables, values))


def ground_body(
    body: Sequence[BodyAtom],
    inequalities: frozenset[tuple[Term, Term]],
    constants: Iterable[Constant],
) -> Iterator[tuple[frozenset[Literal], dict[Term, Constant]]]:
    """Ground instances of a constraint body over the given constants.

    Instances with a false inequality are dropped, true inequalities are
    erased, and instances whose literal set is contradictory (both signs of a
    fact) are dropped because no database can satisfy them.
    """
    variables = sorted({v for atom in body for v in atom.variables()})
    pool = sorted(set(constants))
    for binding in _substitutions(variables, pool):
        if any(binding.get(l, l) == binding.get(r, r) for l, r in inequalities):
            continue
        literals = frozenset(atom.substituted(binding).to_literal() for atom in body)
        facts = {l.fact for l in literals}
        if len(facts) < len({(l.fact, l.positive) for l in literals}):
            continue  # contains both signs of one fact: vacuously satisfied
        yield literals, binding


@lru_cache(maxsize=None)
def ground(
    constraint: UniversalConstraint, constants: frozenset[Constant]
) -> frozenset[GroundConstraint]:
    """Deduplicated ground instances of one constraint."""
    return frozenset(
        literals for literals, _ in ground_body(
            constraint.body, constraint.inequalities, constants
        )
    )


@lru_cache(maxsize=None)
def ground_all(
    constraints: tuple[UniversalConstraint, ...], constants: frozenset[Constant]
) -> frozenset[GroundConstraint]:
    out: set[GroundConstraint] = set()
    for constraint in constraints:
        out |= ground(constraint, constants)
    return frozenset(out)


def violates_ground(db: Database, body: GroundConstraint) -> bool:
    return all(
        (lit.fact in db) == lit.positive for lit in body
    )


def satisfies(
    db: Database,
    constraints: Sequence[UniversalConstraint],
    constants: Optional[frozenset[Constant]] = None,
) -> bool:
    """True iff no ground instance of any constraint is fully matched by the
    database.  Grounding ranges over the database constants plus the constants
    of the constraints; passing a wider ``constants`` pool is sound for any
    database contained in the corresponding fact universe."""
    if constants is None:
        constants = universe_constants(db, constraints)
    for body in ground_all(tuple(constraints), constants):
        if violates_ground(db, body):
            return False
    return True


def schema_from(
    db: Database = frozenset(),
    constraints: Iterable[UniversalConstraint] = (),
    extra: Iterable[tuple[str, int]] = (),
) -> Schema:
    """Infer a schema from the predicates mentioned by the given artifacts."""
    pairs: list[tuple[str, int]] = list(extra)
    for fact in db:
        pairs.append((fact.predicate, len(fact.args)))
    for constraint in constraints:
        pairs.extend(constraint.schema_pairs())
    return Schema.of(pairs)
