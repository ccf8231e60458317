"""Reader and validator for the Prolog subset accepted by the analyser.

Source files hold clauses and two directives::

    :- main(Name/Arity).          % required, exactly once
    :- parametric(yes).           % or no; absent means no

Only the operators the analyser cares about are known to the reader;
control constructs (``;``, ``->``, ``\\+``, ``!``) are read so that
:func:`validate` can reject them with a precise message.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field

from .terms import (
    INFIX_OPS,
    NIL,
    PREFIX_OPS,
    Clause,
    Int,
    Struct,
    Term,
    Var,
    cons,
)


class ParseError(Exception):
    def __init__(self, message: str, line: int = 0, col: int = 0):
        self.message = message
        self.line = line
        self.col = col
        super().__init__(f"{line}:{col}: {message}" if line else message)


@dataclass(frozen=True)
class Directive:
    kind: str  # "main" | "parametric"
    value: object
    line: int = field(default=0, compare=False)


@dataclass
class SourceProgram:
    clauses: list[Clause]
    goal: tuple[str, int]
    parametric: bool = False
    directives: list[Directive] = field(default_factory=list)

    def predicates(self) -> dict[tuple[str, int], list[Clause]]:
        out: dict[tuple[str, int], list[Clause]] = {}
        for c in self.clauses:
            out.setdefault(c.head.indicator, []).append(c)
        return out

    def to_text(self) -> str:
        from .terms import clause_to_str

        name, arity = self.goal
        lines = [f":- main({_atom(name)}/{arity}).", f":- parametric({'yes' if self.parametric else 'no'})."]
        lines.extend(clause_to_str(c) for c in self.clauses)
        return "\n".join(lines) + "\n"


def _atom(name):
    from .terms import atom_to_str

    return atom_to_str(name)


# -- lexer -------------------------------------------------------------------

_SYMBOL_CHARS = "+-*/\\^<>=~:.?@#&$"


@dataclass(frozen=True)
class Token:
    kind: str  # var name qname int punct end eof
    text: str
    line: int
    col: int
    # True when no layout separates this token from the previous one
    glued: bool = False


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    i = 0
    line, line_start = 1, 0
    n = len(text)
    glued = False

    def pos():
        return line, i - line_start + 1

    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            line_start = i + 1
            i += 1
            glued = False
            continue
        if ch.isspace():
            i += 1
            glued = False
            continue
        if ch == "%":
            while i < n and text[i] != "\n":
                i += 1
            glued = False
            continue
        if text.startswith("/*", i):
            end = text.find("*/", i + 2)
            if end < 0:
                raise ParseError("unterminated block comment", *pos())
            line += text.count("\n", i, end)
            nl = text.rfind("\n", i, end)
            if nl >= 0:
                line_start = nl + 1
            i = end + 2
            glued = False
            continue
        ln, col = pos()
        if ch.isdigit():
            m = re.compile(r"\d+").match(text, i)
            tokens.append(Token("int", m.group(), ln, col, glued))
            i = m.end()
        elif ch.isalpha() or ch == "_":
            m = re.compile(r"[A-Za-z0-9_]+").match(text, i)
            kind = "var" if (ch.isupper() or ch == "_") else "name"
            tokens.append(Token(kind, m.group(), ln, col, glued))
            i = m.end()
        elif ch == "'":
            j = i + 1
            buf = []
            while True:
                if j >= n:
                    raise ParseError("unterminated quoted atom", ln, col)
                if text[j] == "'":
                    if j + 1 < n and text[j + 1] == "'":
                        buf.append("'")
                        j += 2
                        continue
                    break
                if text[j] == "\n":
                    raise ParseError("newline in quoted atom", ln, col)
                buf.append(text[j])
                j += 1
            tokens.append(Token("qname", "".join(buf), ln, col, glued))
            i = j + 1
        elif ch in "()[]{},|":
            tokens.append(Token("punct", ch, ln, col, glued))
            i += 1
        elif ch in "!;":
            tokens.append(Token("name", ch, ln, col, glued))
            i += 1
        elif ch in _SYMBOL_CHARS:
            j = i
            while j < n and text[j] in _SYMBOL_CHARS:
                j += 1
            sym = text[i:j]
            if sym == "." and (j >= n or text[j].isspace() or text[j] == "%"):
                tokens.append(Token("end", ".", ln, col, glued))
            else:
                tokens.append(Token("name", sym, ln, col, glued))
            i = j
        else:
            raise ParseError(f"unexpected character {ch!r}", ln, col)
        glued = True
    ln, col = pos()
    tokens.append(Token("eof", "", ln, col))
    return tokens


# -- parser ------------------------------------------------------------------


class _Reader:
    """Operator-precedence reader over the tokens of a single clause."""

    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0
        named = {t.text for t in tokens if t.kind == "var" and t.text != "_"}
        prefix = "_G"
        while any(v.startswith(prefix) for v in named):
            prefix += "_"
        self._anon_prefix = prefix
        self._anon = 0

    def peek(self, k: int = 0) -> Token:
        return self.tokens[min(self.pos + k, len(self.tokens) - 1)]

    def next(self) -> Token:
        tok = self.peek()
        self.pos += 1
        return tok

    def error(self, msg: str, tok: Token | None = None):
        tok = tok or self.peek()
        if tok.kind == "eof":
            msg += " at end of input"
        raise ParseError(msg, tok.line, tok.col)

    def expect(self, kind: str, text: str | None = None) -> Token:
        tok = self.peek()
        if tok.kind != kind or (text is not None and tok.text != text):
            want = text or kind
            self.error(f"expected {want!r}, found {tok.text or tok.kind!r}")
        return self.next()

    def _is_term_start(self, tok: Token) -> bool:
        if tok.kind in ("var", "int", "qname"):
            return True
        if tok.kind == "punct":
            return tok.text in "([{"
        if tok.kind == "name":
            return tok.text not in INFIX_OPS or tok.text in PREFIX_OPS
        return False

    def parse(self, max_prec: int) -> tuple[Term, int]:
        left, left_prec = self.primary(max_prec)
        return self.infix_loop(left, left_prec, max_prec)

    def infix_loop(self, left: Term, left_prec: int, max_prec: int) -> tuple[Term, int]:
        while True:
            tok = self.peek()
            if tok.kind == "name" or (tok.kind == "punct" and tok.text == ","):
                op = tok.text
            else:
                break
            if op not in INFIX_OPS:
                break
            prec, typ = INFIX_OPS[op]
            if prec > max_prec:
                break
            left_max = prec if typ == "yfx" else prec - 1
            right_max = prec if typ == "xfy" else prec - 1
            if left_prec > left_max:
                break
            self.next()
            right, _ = self.parse(right_max)
            left, left_prec = Struct(op, (left, right)), prec
        return left, left_prec

    def primary(self, max_prec: int) -> tuple[Term, int]:
        tok = self.next()
        if tok.kind == "int":
            return Int(int(tok.text)), 0
        if tok.kind == "var":
            if tok.text == "_":
                self._anon += 1
                return Var(f"{self._anon_prefix}{self._anon}"), 0
            return Var(tok.text), 0
        if tok.kind == "punct":
            if tok.text == "(":
                term, _ = self.parse(1200)
                self.expect("punct", ")")
                return term, 0
            if tok.text == "[":
                return self.list_tail(), 0
            self.error(f"unexpected {tok.text!r}", tok)
        if tok.kind in ("name", "qname"):
            name = tok.text
            nxt = self.peek()
            if nxt.kind == "punct" and nxt.text == "(" and nxt.glued:
                self.next()
                args = [self.parse(999)[0]]
                while self.peek().kind == "punct" and self.peek().text == ",":
                    self.next()
                    args.append(self.parse(999)[0])
                self.expect("punct", ")")
                return Struct(name, tuple(args)), 0
            if tok.kind == "name":
                if name == "-" and nxt.kind == "int" and nxt.glued:
                    self.next()
                    return Int(-int(nxt.text)), 0
                if name in PREFIX_OPS and self._is_term_start(nxt):
                    prec, typ = PREFIX_OPS[name]
                    if prec > max_prec:
                        prec = 999
                    arg_max = prec if typ == "fy" else prec - 1
                    arg, _ = self.parse(arg_max)
                    return Struct(name, (arg,)), prec
                if name in INFIX_OPS or name in PREFIX_OPS:
                    prec = max(INFIX_OPS.get(name, (0,))[0], PREFIX_OPS.get(name, (0,))[0])
                    return Struct(name), min(prec, max_prec)
            return Struct(name), 0
        self.error(f"unexpected {tok.text or tok.kind!r}", tok)

    def list_tail(self) -> Term:
        if self.peek().kind == "punct" and self.peek().text == "]":
            self.next()
            return NIL
        items = [self.parse(999)[0]]
        while self.peek().kind == "punct" and self.peek().text == ",":
            self.next()
            items.append(self.parse(999)[0])
        tail: Term = NIL
        if self.peek().kind == "punct" and self.peek().text == "|":
            self.next()
            tail = self.parse(999)[0]
        self.expect("punct", "]")
        for item in reversed(items):
            tail = cons(item, tail)
        return tail


def _split_clauses(tokens: list[Token]) -> list[list[Token]]:
    chunks, cur = [], []
    for tok in tokens:
        if tok.kind == "eof":
            if cur:
                chunks.append(cur + [tok])
            break
        cur.append(tok)
        if tok.kind == "end":
            chunks.append(cur)
            cur = []
    return chunks


def read_terms(text: str) -> list[tuple[Term, int]]:
    """Read every ``.``-terminated term; returns ``(term, line)`` pairs."""
    out = []
    for chunk in _split_clauses(tokenize(text)):
        reader = _Reader(chunk)
        term, _ = reader.parse(1200)
        tok = reader.peek()
        if tok.kind != "end":
            if tok.kind == "eof":
                reader.error("missing '.'")
            reader.error(f"operator expected, found {tok.text!r}")
        out.append((term, chunk[0].line))
    return out


def conjuncts(t: Term) -> list[Term]:
    out = []
    while isinstance(t, Struct) and t.functor == "," and t.arity == 2:
        out.extend(conjuncts(t.args[0]))
        t = t.args[1]
    out.append(t)
    return out


def _directive(term: Term, line: int) -> Directive:
    if isinstance(term, Struct) and term.functor == "main" and term.arity == 1:
        spec = term.args[0]
        if (
            isinstance(spec, Struct)
            and spec.functor == "/"
            and spec.arity == 2
            and isinstance(spec.args[0], Struct)
            and not spec.args[0].args
            and isinstance(spec.args[1], Int)
            and spec.args[1].value >= 0
        ):
            return Directive("main", (spec.args[0].functor, spec.args[1].value), line)
        raise ParseError("main directive must have the form main(Name/Arity)", line)
    if isinstance(term, Struct) and term.functor == "parametric" and term.arity == 1:
        flag = term.args[0]
        if flag in (Struct("yes"), Struct("no")):
            return Directive("parametric", flag.functor == "yes", line)
        raise ParseError("parametric directive takes yes or no", line)
    raise ParseError(f"unknown directive {term}", line)


def parse_program(text: str) -> SourceProgram:
    """Parse a source file into clauses plus the analysis configuration."""
    clauses: list[Clause] = []
    directives: list[Directive] = []
    for term, line in read_terms(text):
        if isinstance(term, Struct) and term.functor == ":-" and term.arity == 1:
            directives.append(_directive(term.args[0], line))
            continue
        if isinstance(term, Struct) and term.functor == ":-" and term.arity == 2:
            head, body = term.args
            goals = tuple(conjuncts(body))
        else:
            head, goals = term, ()
        if not isinstance(head, Struct):
            raise ParseError(f"clause head must be an atom or compound term, found {head}", line)
        if head.functor in (",", ":-"):
            raise ParseError("malformed clause head", line)
        clauses.append(Clause(head, goals, line))

    mains = [d for d in directives if d.kind == "main"]
    params = [d for d in directives if d.kind == "parametric"]
    if len(mains) > 1:
        raise ParseError("duplicate main directive", mains[1].line)
    if len(params) > 1:
        raise ParseError("duplicate parametric directive", params[1].line)
    if not mains:
        raise ParseError("missing main directive")
    return SourceProgram(
        clauses=clauses,
        goal=mains[0].value,
        parametric=bool(params and params[0].value),
        directives=directives,
    )


# -- validation --------------------------------------------------------------


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # "error" | "warning"
    kind: str  # "unsupported" | "undefined" | "arity" | "builtin"
    message: str
    line: int = 0

    def __str__(self):
        where = f"line {self.line}: " if self.line else ""
        return f"{self.severity}: {where}{self.message}"


_CONTROL = {
    (";", 2): "disjunction",
    ("->", 2): "if-then-else",
    ("\\+", 1): "negation",
    ("not", 1): "negation",
    ("!", 0): "cut",
    ("call", 1): "meta-call",
    ("findall", 3): "all-solutions",
    ("bagof", 3): "all-solutions",
    ("setof", 3): "all-solutions",
}
_DATABASE = {"assert", "asserta", "assertz", "retract", "retractall", "abolish"}


def validate(program: SourceProgram, builtins) -> list[Diagnostic]:
    """Check that ``program`` stays inside the supported subset.

    ``builtins`` is any container of ``(name, arity)`` pairs.
    """
    diags: list[Diagnostic] = []
    defined = program.predicates()
    for clause in program.clauses:
        if clause.head.indicator in builtins:
            name, arity = clause.head.indicator
            diags.append(Diagnostic("error", "builtin", f"redefinition of builtin {name}/{arity}", clause.line))
        for goal in clause.body:
            if isinstance(goal, Var):
                diags.append(Diagnostic("error", "unsupported", "unsupported construct: variable goal", clause.line))
                continue
            if isinstance(goal, Int):
                diags.append(Diagnostic("error", "unsupported", f"unsupported construct: integer goal {goal}", clause.line))
                continue
            ind = goal.indicator
            if ind in _CONTROL:
                diags.append(Diagnostic("error", "unsupported", f"unsupported construct: {_CONTROL[ind]}", clause.line))
            elif goal.functor in _DATABASE:
                diags.append(Diagnostic("error", "unsupported", "unsupported construct: assert", clause.line))
            elif ind not in defined and ind not in builtins:
                diags.append(Diagnostic("error", "undefined", f"undefined predicate {ind[0]}/{ind[1]}", clause.line))

    name, arity = program.goal
    if (name, arity) not in defined:
        others = sorted(a for (n, a) in defined if n == name)
        if others:
            diags.append(Diagnostic("error", "arity", f"goal arity mismatch: main({name}/{arity}) but {name} is defined with arity {', '.join(map(str, others))}"))
        elif (name, arity) in builtins:
            diags.append(Diagnostic("error", "builtin", f"goal {name}/{arity} is a builtin"))
        else:
            diags.append(Diagnostic("warning", "undefined", f"goal predicate {name}/{arity} has no clauses"))
    return diags


def has_errors(diags: list[Diagnostic]) -> bool:
    return any(d.severity == "error" for d in diags)
