"""Text syntax for propositional formulas.

Grammar, loosest binding first::

    iff   := imp ('<->' imp)*
    imp   := or ('->' imp)?          # right associative
    or    := and ('|' and)*
    and   := unary ('&' unary)*
    unary := '~' unary | '0' | '1' | NAME | '(' iff ')'

Variables are plain identifiers (``x1``, ``b2``...).  Whitespace is
insignificant.
"""
from __future__ import annotations

import re

from .bdd import Manager, Ref

_TOKEN = re.compile(r"\s*(<->|->|[~&|()01]|[A-Za-z_][A-Za-z0-9_]*)")


class FormulaSyntaxError(ValueError):
    pass


def _tokenize(text: str) -> list[str]:
    tokens = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise FormulaSyntaxError(f"unexpected character at offset {pos}: {text[pos:pos + 10]!r}")
        tokens.append(m.group(1))
        pos = m.end()
    return tokens


def parse_formula(text: str, mgr: Manager) -> Ref:
    """Parse ``text`` into a node of ``mgr`` (unknown variables are declared)."""
    tokens = _tokenize(text)
    pos = 0

    def peek():
        return tokens[pos] if pos < len(tokens) else None

    def take(expected=None):
        nonlocal pos
        tok = peek()
        if tok is None:
            raise FormulaSyntaxError("unexpected end of formula")
        if expected is not None and tok != expected:
            raise FormulaSyntaxError(f"expected {expected!r}, found {tok!r}")
        pos += 1
        return tok

    def p_iff():
        left = p_imp()
        while peek() == "<->":
            take()
            left = left.iff(p_imp())
        return left

    def p_imp():
        left = p_or()
        if peek() == "->":
            take()
            return left.implies(p_imp())
        return left

    def p_or():
        left = p_and()
        while peek() == "|":
            take()
            left = left | p_and()
        return left

    def p_and():
        left = p_unary()
        while peek() == "&":
            take()
            left = left & p_unary()
        return left

    def p_unary():
        tok = take()
        if tok == "~":
            return ~p_unary()
        if tok == "0":
            return mgr.false
        if tok == "1":
            return mgr.true
        if tok == "(":
            inner = p_iff()
            take(")")
            return inner
        if tok in ("<->", "->", "|", "&", ")"):
            raise FormulaSyntaxError(f"unexpected {tok!r}")
        return mgr.var(tok)

    if not tokens:
        raise FormulaSyntaxError("empty formula")
    result = p_iff()
    if pos != len(tokens):
        raise FormulaSyntaxError(f"trailing input at token {tokens[pos]!r}")
    return result


def format_clause(clause) -> str:
    """Render one prime implicate as an implication where that reads better."""
    neg = sorted((n for n, pol in clause if not pol), key=_var_key)
    pos = sorted((n for n, pol in clause if pol), key=_var_key)
    if not neg and not pos:
        return "0"
    if not neg:
        return pos[0] if len(pos) == 1 else "(" + " | ".join(pos) + ")"
    lhs = " & ".join(neg)
    if not pos:
        return f"~{lhs}" if len(neg) == 1 else f"~({lhs})"
    return f"({lhs} -> {' | '.join(pos)})"


def format_formula(f: Ref) -> str:
    """Readable conjunctive form built from the prime implicates of ``f``."""
    if f.is_true:
        return "1"
    if f.is_false:
        return "0"
    parts = [format_clause(c) for c in f.mgr.prime_implicates(f)]
    if len(parts) == 1 and parts[0].startswith("("):
        return parts[0][1:-1]
    return " & ".join(parts)


def cnf_clauses(f: Ref) -> list[list[str]]:
    """Prime implicates as lists of signed literals (``"x1"``, ``"~b1"``)."""
    out = []
    for clause in f.mgr.prime_implicates(f):
        lits = sorted(clause, key=lambda lit: _var_key(lit[0]))
        out.append([name if pol else "~" + name for name, pol in lits])
    return out


def _var_key(name: str):
    m = re.fullmatch(r"([A-Za-z_]+)(\d+)", name)
    if m:
        return (m.group(1), int(m.group(2)))
    return (name, -1)
