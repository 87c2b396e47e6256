"""Text formats: parsing and canonical printing.

Query / tuple / instance format
    Atoms ``PRED(t1,...,tk)`` separated by whitespace or ``.``.  Variables
    are ``?ident``, constants are bare identifiers or integer literals.
    ``%`` starts a line comment.  Identifiers may contain letters, digits,
    ``_`` and ``'`` (primes), and must not start with a digit or prime.

QBF format (QDIMACS subset)
    Header ``p cnf <nvars> <nclauses>``; at most one ``a ... 0`` line
    (universals) followed by at most one ``e ... 0`` line (existentials);
    then exactly-3-literal clauses, each terminated by ``0``.  ``c`` lines
    are comments.  Every variable occurring in a clause must be quantified.

Graph format
    One ``src dst`` pair per line.  Lines matching ``# nodes: id id ...``
    declare isolated nodes; other ``#`` lines are comments.

parse(print(x)) == x holds for all four canonical printers.
"""

from __future__ import annotations

import re

from .errors import ParseError
from .model import (
    Atom,
    Clause,
    Digraph,
    Fact,
    Instance,
    QbfFormula,
    Query,
    Term,
)

_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_']*")
_INT = re.compile(r"[0-9]+")


class _Lexer:
    """Tokenizer for the atom-based formats."""

    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.line = 1
        self.col = 1

    def error(self, message: str) -> ParseError:
        return ParseError(message, self.line, self.col)

    def _advance(self, n: int) -> None:
        for ch in self.text[self.pos : self.pos + n]:
            if ch == "\n":
                self.line += 1
                self.col = 1
            else:
                self.col += 1
        self.pos += n

    def _skip_space(self) -> None:
        while self.pos < len(self.text):
            ch = self.text[self.pos]
            if ch == "%":
                end = self.text.find("\n", self.pos)
                self._advance((end if end != -1 else len(self.text)) - self.pos)
            elif ch.isspace():
                self._advance(1)
            else:
                return

    def next(self):
        """Return (kind, value, line, col) or None at end of input.

        Kinds: 'var', 'const', 'lparen', 'rparen', 'comma', 'dot'.
        """
        self._skip_space()
        if self.pos >= len(self.text):
            return None
        line, col = self.line, self.col
        ch = self.text[self.pos]
        if ch == "?":
            m = _IDENT.match(self.text, self.pos + 1)
            if not m:
                raise ParseError("expected identifier after '?'", line, col)
            self._advance(1 + len(m.group()))
            return ("var", m.group(), line, col)
        if ch in "(),.":
            self._advance(1)
            kind = {"(": "lparen", ")": "rparen", ",": "comma", ".": "dot"}[ch]
            return (kind, ch, line, col)
        m = _IDENT.match(self.text, self.pos)
        if m:
            self._advance(len(m.group()))
            return ("const", m.group(), line, col)
        m = _INT.match(self.text, self.pos)
        if m:
            self._advance(len(m.group()))
            return ("const", m.group(), line, col)
        raise ParseError(f"unexpected character {ch!r}", line, col)


def _parse_atoms(text: str) -> list[tuple[Atom, int, int]]:
    """Parse a sequence of atoms; returns (atom, line, col) triples."""
    lex = _Lexer(text)
    atoms = []
    while True:
        tok = lex.next()
        if tok is None:
            return atoms
        kind, value, line, col = tok
        if kind == "dot":
            continue
        if kind != "const":
            raise ParseError("expected a predicate name", line, col)
        predicate = value
        tok = lex.next()
        if tok is None or tok[0] != "lparen":
            raise ParseError(f"expected '(' after predicate {predicate}", line, col)
        args: list[Term] = []
        while True:
            tok = lex.next()
            if tok is None:
                raise ParseError("unterminated atom", line, col)
            if tok[0] == "var":
                args.append(Term(tok[1], True))
            elif tok[0] == "const":
                args.append(Term(tok[1], False))
            else:
                raise ParseError("expected a term", tok[2], tok[3])
            tok = lex.next()
            if tok is None:
                raise ParseError("unterminated atom", line, col)
            if tok[0] == "rparen":
                break
            if tok[0] != "comma":
                raise ParseError("expected ',' or ')'", tok[2], tok[3])
        atoms.append((Atom(predicate, tuple(args)), line, col))


def parse_query(text: str) -> Query:
    located = _parse_atoms(text)
    if not located:
        raise ParseError("empty query", 1, 1)
    # Re-run the arity check here so the error carries a position.
    arities: dict[str, int] = {}
    for atom, line, col in located:
        known = arities.setdefault(atom.predicate, atom.arity)
        if known != atom.arity:
            raise ParseError(
                f"predicate {atom.predicate} used with arities {known} and {atom.arity}",
                line,
                col,
            )
    return Query(a for a, _, _ in located)


def parse_tuple(text: str) -> Fact:
    located = _parse_atoms(text)
    if not located:
        raise ParseError("expected a tuple", 1, 1)
    if len(located) > 1:
        raise ParseError("expected a single tuple", located[1][1], located[1][2])
    atom, line, col = located[0]
    if not atom.is_ground():
        raise ParseError("a tuple must be ground (no variables)", line, col)
    return Fact(atom.predicate, tuple(t.name for t in atom.args))


def parse_instance(text: str) -> Instance:
    located = _parse_atoms(text)
    facts = []
    for atom, line, col in located:
        if not atom.is_ground():
            raise ParseError("instance tuples must be ground", line, col)
        facts.append(Fact(atom.predicate, tuple(t.name for t in atom.args)))
    arities: dict[str, int] = {}
    for (atom, line, col), f in zip(located, facts):
        known = arities.setdefault(f.predicate, f.arity)
        if known != f.arity:
            raise ParseError(
                f"predicate {f.predicate} used with arities {known} and {f.arity}",
                line,
                col,
            )
    return Instance(facts)


def print_query(q: Query) -> str:
    return "\n".join(str(a) for a in q.atoms) + "\n"


def print_tuple(f: Fact) -> str:
    return str(f)


def print_instance(i: Instance) -> str:
    return "\n".join(str(f) for f in i.sorted_facts()) + ("\n" if len(i) else "")


def parse_qbf(text: str) -> QbfFormula:
    header = None
    universals: tuple[int, ...] | None = None
    existentials: tuple[int, ...] | None = None
    clauses: list[Clause] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        toks = line.split()
        if toks[0] == "p":
            if header is not None:
                raise ParseError("duplicate header line", lineno, 1)
            if len(toks) != 4 or toks[1] != "cnf":
                raise ParseError("header must be 'p cnf <nvars> <nclauses>'", lineno, 1)
            try:
                header = (int(toks[2]), int(toks[3]))
            except ValueError:
                raise ParseError("header counts must be integers", lineno, 1)
            continue
        if header is None:
            raise ParseError("missing 'p cnf' header", lineno, 1)
        if toks[0] in ("a", "e"):
            if clauses:
                raise ParseError("quantifier line after clauses", lineno, 1)
            if toks[-1] != "0":
                raise ParseError("quantifier line must end with 0", lineno, 1)
            try:
                ids = tuple(int(t) for t in toks[1:-1])
            except ValueError:
                raise ParseError("quantifier line must list integers", lineno, 1)
            if any(v <= 0 for v in ids):
                raise ParseError("variable ids must be positive", lineno, 1)
            if toks[0] == "a":
                if universals is not None:
                    raise ParseError("duplicate 'a' line", lineno, 1)
                if existentials is not None:
                    raise ParseError(
                        "prefix must be universals then existentials", lineno, 1
                    )
                universals = ids
            else:
                if existentials is not None:
                    raise ParseError("duplicate 'e' line", lineno, 1)
                existentials = ids
            continue
        try:
            lits = [int(t) for t in toks]
        except ValueError:
            raise ParseError(f"unexpected token {toks[0]!r}", lineno, 1)
        if lits[-1] != 0:
            raise ParseError("clause must be terminated by 0", lineno, 1)
        lits = lits[:-1]
        if len(lits) != 3:
            raise ParseError(
                f"clause must have exactly 3 literals, found {len(lits)}", lineno, 1
            )
        if any(l == 0 for l in lits):
            raise ParseError("literal 0 inside clause", lineno, 1)
        clauses.append(tuple((abs(l), l > 0) for l in lits))
    if header is None:
        raise ParseError("missing 'p cnf' header", 1, 1)
    universals = universals or ()
    existentials = existentials or ()
    nvars, nclauses = header
    if len(clauses) != nclauses:
        raise ParseError(
            f"header declares {nclauses} clauses, found {len(clauses)}", 1, 1
        )
    for v in list(universals) + list(existentials):
        if v > nvars:
            raise ParseError(f"variable {v} exceeds declared count {nvars}", 1, 1)
    scope = set(universals) | set(existentials)
    for cl in clauses:
        for v, _ in cl:
            if v not in scope:
                raise ParseError(f"unquantified variable {v}", 1, 1)
    return QbfFormula(universals, existentials, tuple(clauses))


def print_qbf(phi: QbfFormula) -> str:
    ids = list(phi.universals) + list(phi.existentials)
    nvars = max(ids) if ids else 0
    lines = [f"p cnf {nvars} {len(phi.clauses)}"]
    if phi.universals:
        lines.append("a " + " ".join(str(v) for v in phi.universals) + " 0")
    if phi.existentials:
        lines.append("e " + " ".join(str(v) for v in phi.existentials) + " 0")
    for cl in phi.clauses:
        lines.append(" ".join(str(v if pol else -v) for v, pol in cl) + " 0")
    return "\n".join(lines) + "\n"


_NODE = re.compile(r"(?:[A-Za-z_][A-Za-z0-9_']*|[0-9]+)\Z")
_NODES_HEADER = re.compile(r"#\s*nodes\s*:\s*(.*)\Z")


def parse_digraph(text: str) -> Digraph:
    edges: set[tuple[str, str]] = set()
    declared: set[str] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            m = _NODES_HEADER.match(line)
            if m:
                for tok in m.group(1).split():
                    if not _NODE.match(tok):
                        raise ParseError(f"bad node id {tok!r}", lineno, 1)
                    declared.add(tok)
            continue
        toks = line.split()
        if len(toks) != 2:
            raise ParseError(
                f"expected 'src dst' pair, found {len(toks)} token(s)", lineno, 1
            )
        for tok in toks:
            if not _NODE.match(tok):
                raise ParseError(f"bad node id {tok!r}", lineno, 1)
        edges.add((toks[0], toks[1]))
    nodes = frozenset(x for e in edges for x in e) | frozenset(declared)
    return Digraph(nodes, frozenset(edges))


def print_digraph(g: Digraph) -> str:
    touched = {x for e in g.edges for x in e}
    isolated = sorted(g.nodes - touched)
    lines = []
    if isolated:
        lines.append("# nodes: " + " ".join(isolated))
    for a, b in g.sorted_edges():
        lines.append(f"{a} {b}")
    return "\n".join(lines) + ("\n" if lines else "")
