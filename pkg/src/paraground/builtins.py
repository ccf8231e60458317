"""Success patterns of builtin predicates.

A table maps ``name/arity`` to a groundness formula over ``x1..xn`` that
holds whenever the builtin succeeds.  Files use one entry per line::

    # comment
    is/2: x1 & x2
    =/2: x1 <-> x2
"""
from __future__ import annotations

import re
from pathlib import Path

from .bdd import Manager

DEFAULT_TABLE = """\
true/0: 1
=/2: x1 <-> x2
==/2: x1 <-> x2
\\==/2: 1
\\=/2: 1
=</2: x1 & x2
</2: x1 & x2
>/2: x1 & x2
>=/2: x1 & x2
=:=/2: x1 & x2
=\\=/2: x1 & x2
is/2: x1 & x2
"""

_LINE = re.compile(r"^(.+)/(\d+)\s*:\s*(.+)$")


class BuiltinTableError(ValueError):
    pass


class BuiltinTable:
    """Ordered mapping ``(name, arity) -> pattern text``."""

    def __init__(self, entries: dict[tuple[str, int], str] | None = None):
        self.entries: dict[tuple[str, int], str] = dict(entries or {})

    @classmethod
    def default(cls) -> "BuiltinTable":
        return cls.parse(DEFAULT_TABLE)

    @classmethod
    def parse(cls, text: str) -> "BuiltinTable":
        entries = {}
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            m = _LINE.match(line)
            if not m:
                raise BuiltinTableError(f"line {lineno}: expected 'name/arity: pattern', got {raw!r}")
            name, arity, pattern = m.group(1).strip(), int(m.group(2)), m.group(3).strip()
            _check_pattern(pattern, arity, lineno)
            entries[(name, arity)] = pattern
        return cls(entries)

    @classmethod
    def load(cls, path: str | Path, base: "BuiltinTable | None" = None) -> "BuiltinTable":
        """Read a table file; its entries override those of ``base`` (defaults)."""
        table = cls.parse(Path(path).read_text(encoding="utf-8"))
        merged = dict((base or cls.default()).entries)
        merged.update(table.entries)
        return cls(merged)

    def __contains__(self, key) -> bool:
        return key in self.entries

    def __getitem__(self, key) -> str:
        return self.entries[key]

    def __iter__(self):
        return iter(self.entries)

    def __len__(self):
        return len(self.entries)

    def to_text(self) -> str:
        return "".join(f"{n}/{a}: {p}\n" for (n, a), p in self.entries.items())


def _check_pattern(pattern: str, arity: int, lineno: int) -> None:
    from .formula import FormulaSyntaxError, parse_formula

    mgr = Manager(f"x{i}" for i in range(1, arity + 1))
    try:
        f = parse_formula(pattern, mgr)
    except FormulaSyntaxError as exc:
        raise BuiltinTableError(f"line {lineno}: {exc}") from None
    allowed = {f"x{i}" for i in range(1, arity + 1)}
    extra = set(mgr.support(f)) - allowed
    if extra:
        raise BuiltinTableError(f"line {lineno}: pattern mentions {sorted(extra)} outside x1..x{arity}")
    if not mgr.is_positive(f):
        raise BuiltinTableError(f"line {lineno}: pattern {pattern!r} is not a positive formula")
