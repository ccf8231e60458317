"""Syntax tree for the analysed logic programs."""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterator, Union


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Int:
    value: int

    def __str__(self):
        return str(self.value)


@dataclass(frozen=True)
class Struct:
    functor: str
    args: tuple["Term", ...] = ()

    @property
    def arity(self) -> int:
        return len(self.args)

    @property
    def indicator(self) -> tuple[str, int]:
        return (self.functor, len(self.args))

    def __str__(self):
        return term_to_str(self)


Term = Union[Var, Int, Struct]

NIL = Struct("[]")


def atom(name: str) -> Struct:
    return Struct(name)


def cons(head: Term, tail: Term) -> Struct:
    return Struct(".", (head, tail))


def make_list(items, tail: Term = NIL) -> Term:
    out = tail
    for item in reversed(list(items)):
        out = cons(item, out)
    return out


def term_vars(t: Term) -> Iterator[Var]:
    """Variables of ``t`` in left-to-right order of first occurrence (with repeats)."""
    stack = [t]
    while stack:
        t = stack.pop()
        if isinstance(t, Var):
            yield t
        elif isinstance(t, Struct):
            stack.extend(reversed(t.args))


def is_ground(t: Term) -> bool:
    return next(term_vars(t), None) is None


@dataclass(frozen=True)
class Clause:
    head: Struct
    body: tuple[Term, ...] = ()
    line: int = field(default=0, compare=False)

    def __str__(self):
        return clause_to_str(self)


# -- printing ----------------------------------------------------------------

INFIX_OPS = {
    ":-": (1200, "xfx"),
    ";": (1100, "xfy"),
    "->": (1050, "xfy"),
    ",": (1000, "xfy"),
    "=": (700, "xfx"),
    "\\=": (700, "xfx"),
    "==": (700, "xfx"),
    "\\==": (700, "xfx"),
    "=<": (700, "xfx"),
    "<": (700, "xfx"),
    ">": (700, "xfx"),
    ">=": (700, "xfx"),
    "=:=": (700, "xfx"),
    "=\\=": (700, "xfx"),
    "is": (700, "xfx"),
    "+": (500, "yfx"),
    "-": (500, "yfx"),
    "*": (400, "yfx"),
    "/": (400, "yfx"),
    "//": (400, "yfx"),
    "mod": (400, "yfx"),
}
PREFIX_OPS = {
    ":-": (1200, "fx"),
    "\\+": (900, "fy"),
    "-": (200, "fy"),
}

_PLAIN_ATOM = re.compile(r"[a-z][A-Za-z0-9_]*\Z")


def atom_to_str(name: str) -> str:
    if name == "[]":
        return name
    if _PLAIN_ATOM.match(name) and name not in INFIX_OPS:
        # quoted operator names are read as plain atoms
        return name
    if name == "!":
        return name
    return "'" + name.replace("'", "''") + "'"


def term_to_str(t: Term) -> str:
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Int):
        return str(t.value)
    if t.functor == "." and t.arity == 2:
        items = []
        while isinstance(t, Struct) and t.functor == "." and t.arity == 2:
            items.append(term_to_str(t.args[0]))
            t = t.args[1]
        body = ", ".join(items)
        if t == NIL:
            return f"[{body}]"
        return f"[{body}|{term_to_str(t)}]"
    if not t.args:
        return atom_to_str(t.functor)
    if t.arity == 2 and t.functor in INFIX_OPS:
        # fully parenthesised so that the reader never needs precedence to recover it
        return f"({term_to_str(t.args[0])} {t.functor} {term_to_str(t.args[1])})"
    args = ", ".join(term_to_str(a) for a in t.args)
    functor = "'[]'" if t.functor == "[]" else atom_to_str(t.functor)
    return f"{functor}({args})"


def clause_to_str(c: Clause) -> str:
    if not c.body:
        return term_to_str(c.head) + "."
    goals = ", ".join(term_to_str(g) for g in c.body)
    return f"{term_to_str(c.head)} :- {goals}."
