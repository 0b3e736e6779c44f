"""Parsers and printers for the five text formats.

All formats share one token stream: identifiers, integers, punctuation, with
``#`` line comments and free whitespace.  An identifier starting with an
upper-case letter or underscore is a variable; everything else (including
integers) is a constant.  Parse errors carry line and column.

Formats:
  facts        P(c, ...).          0-ary facts are bare names: ``p.``
  constraints  lit, ..., X != Y, ... -> false.     or  ... -> P(..) | Q(..).
               body literals may be negated with ``not``
  priority     LIT > LIT.          LIT is P(c,...) or !P(c,...)
               score LIT = n.      scores induce the priority by level
  query        q(X, ...) :- P(t, ...), ... .       one query per file
  active rules lit, ... -> { +P(c...), -P(c...) }.
  updates      +P(c...).  or  -P(c...).            one action per line
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .aic import AIC, UpdateAction, UpdateAtom, action_key
from .errors import InputError, ParseError
from .model import (
    BodyAtom,
    Database,
    Fact,
    Literal,
    Schema,
    Term,
    UniversalConstraint,
    fact_key,
    is_variable,
    literal_key,
)
from .priorities import PriorityRelation
from .query import ConjunctiveQuery

_TOKEN = re.compile(
    r"""(?P<ws>\s+|\#[^\n]*)
      | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
      | (?P<number>[0-9]+)
      | (?P<arrow>->)
      | (?P<neck>:-)
      | (?P<neq>!=)
      | (?P<punct>[(),.{}|>!+\-=/])
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
    line, column = 1, 1
    pos = 0
    while pos < len(text):
        match = _TOKEN.match(text, pos)
        if not match:
            raise ParseError(f"unexpected character {text[pos]!r}", line, column)
        kind = match.lastgroup or ""
        value = match.group()
        if kind != "ws":
            tokens.append(Token(kind, value, line, column))
        newlines = value.count("\n")
        if newlines:
            line += newlines
            column = len(value) - value.rfind("\n")
        else:
            column += len(value)
        pos = match.end()
    tokens.append(Token("eof", "", line, column))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.index = 0

    def peek(self) -> Token:
        return self.tokens[self.index]

    def at_end(self) -> bool:
        return self.peek().kind == "eof"

    def take(self, text: Optional[str] = None, kind: Optional[str] = None) -> Token:
        token = self.peek()
        if text is not None and token.text != text:
            raise ParseError(f"expected {text!r}, found {token.text!r}", token.line, token.column)
        if kind is not None and token.kind != kind:
            raise ParseError(f"expected {kind}, found {token.text!r}", token.line, token.column)
        self.index += 1
        return token

    def try_take(self, text: str) -> bool:
        if self.peek().text == text:
            self.index += 1
            return True
        return False

    def term(self) -> Term:
        token = self.peek()
        if token.kind in ("name", "number"):
            self.index += 1
            return token.text
        raise ParseError(f"expected a term, found {token.text!r}", token.line, token.column)

    def atom(self) -> tuple[str, tuple[Term, ...]]:
        name = self.take(kind="name")
        terms: list[Term] = []
        if self.try_take("("):
            if not self.try_take(")"):
                terms.append(self.term())
                while self.try_take(","):
                    terms.append(self.term())
                self.take(")")
        return name.text, tuple(terms)

    def ground_atom(self) -> Fact:
        token = self.peek()
        name, terms = self.atom()
        loose = [t for t in terms if is_variable(t)]
        if loose:
            raise ParseError(
                f"variable {loose[0]} where a constant is required", token.line, token.column
            )
        return Fact(name, terms)


def parse_database(text: str) -> Database:
    parser = _Parser(text)
    facts = set()
    while not parser.at_end():
        facts.add(parser.ground_atom())
        parser.take(".")
    return frozenset(facts)


def _parse_body(parser: _Parser) -> tuple[list[BodyAtom], list[tuple[Term, Term]]]:
    atoms: list[BodyAtom] = []
    inequalities: list[tuple[Term, Term]] = []
    while True:
        if parser.peek().text == "not":
            parser.take("not")
            name, terms = parser.atom()
            atoms.append(BodyAtom(False, name, terms))
        else:
            start = parser.index
            left = parser.term()
            if parser.peek().kind == "neq":
                parser.take(kind="neq")
                right = parser.term()
                inequalities.append((left, right))
            else:
                parser.index = start
                name, terms = parser.atom()
                atoms.append(BodyAtom(True, name, terms))
        if not parser.try_take(","):
            break
    return atoms, inequalities


def parse_constraints(text: str) -> tuple[UniversalConstraint, ...]:
    parser = _Parser(text)
    out = []
    while not parser.at_end():
        atoms: list[BodyAtom] = []
        inequalities: list[tuple[Term, Term]] = []
        if parser.peek().kind != "arrow":
            atoms, inequalities = _parse_body(parser)
        token = parser.take(kind="arrow")
        head: list[tuple[str, tuple[Term, ...]]] = []
        if parser.peek().text == "false":
            parser.take("false")
        else:
            head.append(parser.atom())
            while parser.try_take("|"):
                head.append(parser.atom())
        parser.take(".")
        try:
            out.append(UniversalConstraint.make(atoms, inequalities, head))
        except InputError as exc:
            raise ParseError(str(exc), token.line, token.column) from exc
    return tuple(out)


def _parse_signed_literal(parser: _Parser) -> Literal:
    if parser.try_take("!"):
        return Literal(parser.ground_atom(), positive=False)
    return Literal(parser.ground_atom(), positive=True)


def parse_priority(
    text: str,
) -> tuple[PriorityRelation, dict[Literal, int]]:
    """Edges plus any explicit scores.  Scores, when present, switch the engine
    to score-structured mode; unscored conflict literals default to score 0."""
    parser = _Parser(text)
    edges = []
    scores: dict[Literal, int] = {}
    while not parser.at_end():
        if parser.peek().text == "score":
            parser.take("score")
            lit = _parse_signed_literal(parser)
            parser.take("=")
            value = parser.take(kind="number")
            scores[lit] = int(value.text)
        else:
            strong = _parse_signed_literal(parser)
            parser.take(">")
            weak = _parse_signed_literal(parser)
            edges.append((strong, weak))
        parser.take(".")
    return PriorityRelation.of(edges), scores


def parse_query(text: str) -> ConjunctiveQuery:
    parser = _Parser(text)
    token = parser.peek()
    head_name, head_terms = parser.atom()
    parser.take(kind="neck")
    atoms = [parser.atom()]
    while parser.try_take(","):
        atoms.append(parser.atom())
    parser.take(".")
    if not parser.at_end():
        extra = parser.peek()
        raise ParseError("expected a single query", extra.line, extra.column)
    try:
        return ConjunctiveQuery.make(head_terms, atoms)
    except InputError as exc:
        raise ParseError(str(exc), token.line, token.column) from exc


def parse_aics(text: str) -> tuple[AIC, ...]:
    parser = _Parser(text)
    out = []
    while not parser.at_end():
        token = parser.peek()
        atoms, inequalities = _parse_body(parser)
        parser.take(kind="arrow")
        parser.take("{")
        updates = [_parse_update_atom(parser)]
        while parser.try_take(","):
            updates.append(_parse_update_atom(parser))
        parser.take("}")
        parser.take(".")
        try:
            out.append(AIC.make(atoms, updates, inequalities))
        except InputError as exc:
            raise ParseError(str(exc), token.line, token.column) from exc
    return tuple(out)


def _parse_update_atom(parser: _Parser) -> UpdateAtom:
    token = parser.peek()
    if parser.try_take("+"):
        add = True
    elif parser.try_take("-"):
        add = False
    else:
        raise ParseError("expected + or -", token.line, token.column)
    name, terms = parser.atom()
    return UpdateAtom(add, name, terms)


def parse_updates(text: str) -> frozenset[UpdateAction]:
    parser = _Parser(text)
    actions = set()
    while not parser.at_end():
        atom = _parse_update_atom(parser)
        loose = [t for t in atom.terms if is_variable(t)]
        if loose:
            token = parser.peek()
            raise ParseError(
                f"variable {loose[0]} in a ground update", token.line, token.column
            )
        parser.take(".")
        actions.add(UpdateAction(atom.add, Fact(atom.predicate, atom.terms)))
    return frozenset(actions)


def parse_schema(text: str) -> Schema:
    """Declarations ``P/2.`` or ``P.`` (arity 0), one per statement."""
    parser = _Parser(text)
    pairs = []
    while not parser.at_end():
        name = parser.take(kind="name")
        arity = 0
        if parser.try_take("/"):
            arity = int(parser.take(kind="number").text)
        pairs.append((name.text, arity))
        parser.take(".")
    return Schema.of(pairs)


# Printers; parsing canonical output reproduces the parsed value.


def format_fact(fact: Fact) -> str:
    return str(fact)


def format_database(db: Database) -> str:
    return "".join(f"{format_fact(f)}.\n" for f in sorted(db, key=fact_key))


def format_literal(lit: Literal) -> str:
    return str(lit)


def format_literal_set(lits: Iterable[Literal]) -> str:
    inner = ", ".join(format_literal(l) for l in sorted(lits, key=literal_key))
    return "{" + inner + "}"


def format_fact_set(facts: Iterable[Fact]) -> str:
    inner = ", ".join(format_fact(f) for f in sorted(facts, key=fact_key))
    return "{" + inner + "}"


def format_constraint(constraint: UniversalConstraint) -> str:
    return f"{constraint}."


def format_constraints(constraints: Sequence[UniversalConstraint]) -> str:
    return "".join(format_constraint(c) + "\n" for c in constraints)


def format_priority(
    priority: PriorityRelation, scores: Optional[dict[Literal, int]] = None
) -> str:
    lines = [
        f"{a} > {b}."
        for a, b in sorted(
            priority.edges, key=lambda e: (literal_key(e[0]), literal_key(e[1]))
        )
    ]
    for lit, value in sorted((scores or {}).items(), key=lambda kv: literal_key(kv[0])):
        lines.append(f"score {lit} = {value}.")
    return "".join(line + "\n" for line in lines)


def format_aic(rule: AIC) -> str:
    return f"{rule}."


def format_aics(rules: Sequence[AIC]) -> str:
    return "".join(format_aic(r) + "\n" for r in rules)


def format_updates(actions: Iterable[UpdateAction]) -> str:
    return "".join(f"{a}.\n" for a in sorted(actions, key=action_key))


def format_update_set(actions: Iterable[UpdateAction]) -> str:
    inner = ", ".join(str(a) for a in sorted(actions, key=action_key))
    return "{" + inner + "}"


def format_query(query: ConjunctiveQuery) -> str:
    head = (
        f"q({', '.join(query.head_vars)})" if query.head_vars else "q"
    )
    body = ", ".join(str(Fact(pred, terms)) for pred, terms in query.atoms)
    return f"{head} :- {body}.\n"
