"""Reduced ordered binary decision diagrams.

A small, self-contained ROBDD package: one unique table, one operation
cache, no complemented edges and no garbage collection.  Nodes are plain
integers internally; the public surface hands out :class:`Ref` handles
that remember their manager so that mixing managers is caught early.

Node ``0`` is FALSE and node ``1`` is TRUE.  Every other node is a triple
``(level, low, high)`` where ``level`` is the position of the tested
variable in the ordering table.  Variables can be appended to the end of
the ordering at any time; existing nodes stay valid because relative order
never changes.
"""
from __future__ import annotations

from typing import Iterable, Iterator, Mapping

FALSE_ID = 0
TRUE_ID = 1
_LEAF_LEVEL = 1 << 30


class BddError(Exception):
    """Misuse of the BDD manager (foreign nodes, unknown variables...)."""


class Ref:
    """Handle to a node of a :class:`Manager`."""

    __slots__ = ("mgr", "id")

    def __init__(self, mgr: "Manager", node: int):
        self.mgr = mgr
        self.id = node

    def __eq__(self, other):
        if not isinstance(other, Ref):
            return NotImplemented
        return self.mgr is other.mgr and self.id == other.id

    def __hash__(self):
        return hash((id(self.mgr), self.id))

    def __repr__(self):
        if self.id == FALSE_ID:
            return "Ref(FALSE)"
        if self.id == TRUE_ID:
            return "Ref(TRUE)"
        return f"Ref({self.id}: {self.mgr.var_at(self.mgr._level[self.id])})"

    def __and__(self, other: "Ref") -> "Ref":
        return self.mgr.apply("and", self, other)

    def __or__(self, other: "Ref") -> "Ref":
        return self.mgr.apply("or", self, other)

    def __invert__(self) -> "Ref":
        return self.mgr.neg(self)

    def implies(self, other: "Ref") -> "Ref":
        return self.mgr.apply("implies", self, other)

    def iff(self, other: "Ref") -> "Ref":
        return self.mgr.apply("iff", self, other)

    @property
    def is_true(self) -> bool:
        return self.id == TRUE_ID

    @property
    def is_false(self) -> bool:
        return self.id == FALSE_ID


# terminal tables for the binary connectives: op(a, b) on constants
_OPS = {
    "and": lambda a, b: a & b,
    "or": lambda a, b: a | b,
    "iff": lambda a, b: 1 - (a ^ b),
    "implies": lambda a, b: (1 - a) | b,
    "xor": lambda a, b: a ^ b,
}
_COMMUTATIVE = {"and", "or", "iff", "xor"}


class Manager:
    """Unique table, operation caches and the variable ordering."""

    def __init__(self, variables: Iterable[str] = ()):
        self._level = [_LEAF_LEVEL, _LEAF_LEVEL]
        self._low = [FALSE_ID, TRUE_ID]
        self._high = [FALSE_ID, TRUE_ID]
        self._unique: dict[tuple[int, int, int], int] = {}
        self._cache: dict[tuple, int] = {}
        self._names: list[str] = []
        self._levels: dict[str, int] = {}
        for name in variables:
            self.declare(name)

    # -- variables -------------------------------------------------------

    def declare(self, name: str) -> int:
        """Append ``name`` to the ordering (no-op if known); return its level."""
        level = self._levels.get(name)
        if level is None:
            level = len(self._names)
            self._names.append(name)
            self._levels[name] = level
        return level

    def level_of(self, name: str) -> int:
        try:
            return self._levels[name]
        except KeyError:
            raise BddError(f"unknown variable {name!r}") from None

    def var_at(self, level: int) -> str:
        return self._names[level]

    @property
    def variables(self) -> list[str]:
        return list(self._names)

    def __contains__(self, name: str) -> bool:
        return name in self._levels

    def __len__(self) -> int:
        return len(self._level)

    # -- construction ----------------------------------------------------

    @property
    def true(self) -> Ref:
        return Ref(self, TRUE_ID)

    @property
    def false(self) -> Ref:
        return Ref(self, FALSE_ID)

    def var(self, name: str) -> Ref:
        """The function of a single variable, declaring it if necessary."""
        return Ref(self, self._mk(self.declare(name), FALSE_ID, TRUE_ID))

    mk_var = var

    def _mk(self, level: int, low: int, high: int) -> int:
        if low == high:
            return low
        key = (level, low, high)
        node = self._unique.get(key)
        if node is None:
            node = len(self._level)
            self._level.append(level)
            self._low.append(low)
            self._high.append(high)
            self._unique[key] = node
        return node

    def _own(self, ref: Ref) -> int:
        if not isinstance(ref, Ref):
            raise BddError(f"expected a BDD node, got {type(ref).__name__}")
        if ref.mgr is not self:
            raise BddError("node belongs to a different manager")
        return ref.id

    # -- boolean connectives -----------------------------------------------

    def apply(self, op: str, a: Ref, b: Ref) -> Ref:
        if op not in _OPS:
            raise BddError(f"unknown operator {op!r}")
        return Ref(self, self._apply(op, self._own(a), self._own(b)))

    def _apply(self, op: str, u: int, v: int) -> int:
        if u <= TRUE_ID and v <= TRUE_ID:
            return _OPS[op](u, v)
        # short cuts that avoid recursion entirely
        if op == "and":
            if u == FALSE_ID or v == FALSE_ID:
                return FALSE_ID
            if u == TRUE_ID or u == v:
                return v
            if v == TRUE_ID:
                return u
        elif op == "or":
            if u == TRUE_ID or v == TRUE_ID:
                return TRUE_ID
            if u == FALSE_ID or u == v:
                return v
            if v == FALSE_ID:
                return u
        elif op == "implies":
            if u == FALSE_ID or v == TRUE_ID or u == v:
                return TRUE_ID
            if u == TRUE_ID:
                return v
        elif op == "iff":
            if u == v:
                return TRUE_ID
            if u == TRUE_ID:
                return v
            if v == TRUE_ID:
                return u
        if op in _COMMUTATIVE and u > v:
            u, v = v, u
        key = (op, u, v)
        res = self._cache.get(key)
        if res is not None:
            return res
        lu, lv = self._level[u], self._level[v]
        level = min(lu, lv)
        u0, u1 = (self._low[u], self._high[u]) if lu == level else (u, u)
        v0, v1 = (self._low[v], self._high[v]) if lv == level else (v, v)
        res = self._mk(level, self._apply(op, u0, v0), self._apply(op, u1, v1))
        self._cache[key] = res
        return res

    def neg(self, a: Ref) -> Ref:
        return Ref(self, self._apply("xor", self._own(a), TRUE_ID))

    def ite(self, i: Ref, t: Ref, e: Ref) -> Ref:
        return Ref(self, self._ite(self._own(i), self._own(t), self._own(e)))

    def _ite(self, i: int, t: int, e: int) -> int:
        if i == TRUE_ID:
            return t
        if i == FALSE_ID:
            return e
        if t == e:
            return t
        if t == TRUE_ID and e == FALSE_ID:
            return i
        key = ("ite", i, t, e)
        res = self._cache.get(key)
        if res is not None:
            return res
        level = min(self._level[i], self._level[t], self._level[e])
        i0, i1 = self._cofactors(i, level)
        t0, t1 = self._cofactors(t, level)
        e0, e1 = self._cofactors(e, level)
        res = self._mk(level, self._ite(i0, t0, e0), self._ite(i1, t1, e1))
        self._cache[key] = res
        return res

    def _cofactors(self, u: int, level: int) -> tuple[int, int]:
        if self._level[u] == level:
            return self._low[u], self._high[u]
        return u, u

    def conj(self, refs: Iterable[Ref]) -> Ref:
        acc = TRUE_ID
        for r in refs:
            acc = self._apply("and", acc, self._own(r))
        return Ref(self, acc)

    def disj(self, refs: Iterable[Ref]) -> Ref:
        acc = FALSE_ID
        for r in refs:
            acc = self._apply("or", acc, self._own(r))
        return Ref(self, acc)

    # -- quantification, substitution, cofactors ----------------------------

    def exists(self, names: Iterable[str], a: Ref) -> Ref:
        """Existentially quantify the named variables out of ``a``."""
        levels = frozenset(self.level_of(n) for n in names)
        u = self._own(a)
        if not levels:
            return a
        return Ref(self, self._exists(levels, max(levels), u, {}))

    def _exists(self, levels: frozenset, top: int, u: int, memo: dict) -> int:
        lu = self._level[u]
        if lu > top:
            return u
        res = memo.get(u)
        if res is not None:
            return res
        low = self._exists(levels, top, self._low[u], memo)
        high = self._exists(levels, top, self._high[u], memo)
        if lu in levels:
            res = self._apply("or", low, high)
        else:
            res = self._mk(lu, low, high)
        memo[u] = res
        return res

    def rename(self, mapping: Mapping[str, str], a: Ref) -> Ref:
        """Simultaneously substitute variables for variables.

        Realised as functional composition (``ite`` on the target variable),
        which is correct for any ordering and any overlap between the source
        and target variables, including swaps and non-injective maps.
        """
        u = self._own(a)
        table = {}
        for src, dst in mapping.items():
            if src == dst:
                continue
            table[self.level_of(src)] = self._own(self.var(dst))
        if not table:
            return a
        return Ref(self, self._compose(table, max(table), u, {}))

    def _compose(self, table: dict, top: int, u: int, memo: dict) -> int:
        lu = self._level[u]
        if lu > top:
            return u
        res = memo.get(u)
        if res is not None:
            return res
        low = self._compose(table, top, self._low[u], memo)
        high = self._compose(table, top, self._high[u], memo)
        target = table.get(lu)
        if target is None:
            test = self._mk(lu, FALSE_ID, TRUE_ID)
        else:
            test = target
        res = self._ite(test, high, low)
        memo[u] = res
        return res

    def restrict(self, assignment: Mapping[str, bool | int], a: Ref) -> Ref:
        """Cofactor of ``a`` under a partial truth assignment."""
        u = self._own(a)
        values = {self.level_of(n): bool(v) for n, v in assignment.items()}
        if not values:
            return a
        return Ref(self, self._restrict(values, max(values), u, {}))

    def _restrict(self, values: dict, top: int, u: int, memo: dict) -> int:
        lu = self._level[u]
        if lu > top:
            return u
        res = memo.get(u)
        if res is not None:
            return res
        if lu in values:
            child = self._high[u] if values[lu] else self._low[u]
            res = self._restrict(values, top, child, memo)
        else:
            res = self._mk(
                lu,
                self._restrict(values, top, self._low[u], memo),
                self._restrict(values, top, self._high[u], memo),
            )
        memo[u] = res
        return res

    # -- queries -------------------------------------------------------------

    def entails(self, a: Ref, b: Ref) -> bool:
        return self._apply("implies", self._own(a), self._own(b)) == TRUE_ID

    def equiv(self, a: Ref, b: Ref) -> bool:
        return self._own(a) == self._own(b)

    def is_positive(self, a: Ref, scope: Iterable[str] | None = None) -> bool:
        """True when the all-ones assignment over ``scope`` satisfies ``a``.

        ``scope`` defaults to the support; variables outside it that occur in
        ``a`` are set to 1 as well, since positivity is about the all-true row.
        """
        names = set(self.support(a))
        if scope is not None:
            names |= set(scope)
        return self.restrict({n: 1 for n in names}, a).is_true

    def evaluate(self, a: Ref, assignment: Mapping[str, bool | int]) -> bool:
        u = self._own(a)
        while u > TRUE_ID:
            name = self._names[self._level[u]]
            if name not in assignment:
                raise BddError(f"assignment misses variable {name!r}")
            u = self._high[u] if assignment[name] else self._low[u]
        return u == TRUE_ID

    def support(self, a: Ref) -> list[str]:
        """Variables the function depends on, in ordering order."""
        seen = set()
        levels = set()
        stack = [self._own(a)]
        while stack:
            u = stack.pop()
            if u <= TRUE_ID or u in seen:
                continue
            seen.add(u)
            levels.add(self._level[u])
            stack.append(self._low[u])
            stack.append(self._high[u])
        return [self._names[lv] for lv in sorted(levels)]

    def node_count(self, a: Ref) -> int:
        """Number of internal nodes reachable from ``a``."""
        seen = set()
        stack = [self._own(a)]
        while stack:
            u = stack.pop()
            if u <= TRUE_ID or u in seen:
                continue
            seen.add(u)
            stack.append(self._low[u])
            stack.append(self._high[u])
        return len(seen)

    def check_canonical(self) -> None:
        """Assert the reduction and ordering invariants over the whole store."""
        seen = set()
        for node in range(2, len(self._level)):
            lv, lo, hi = self._level[node], self._low[node], self._high[node]
            assert lo != hi, f"node {node} is redundant"
            assert (lv, lo, hi) not in seen, f"node {node} is duplicated"
            seen.add((lv, lo, hi))
            assert self._level[lo] > lv and self._level[hi] > lv, f"node {node} breaks order"

    def transfer(self, a: Ref, other: "Manager") -> Ref:
        """Rebuild ``a`` inside ``other`` (matching variables by name)."""
        memo = {FALSE_ID: FALSE_ID, TRUE_ID: TRUE_ID}

        def walk(u: int) -> int:
            res = memo.get(u)
            if res is None:
                test = other._own(other.var(self._names[self._level[u]]))
                res = other._ite(test, walk(self._high[u]), walk(self._low[u]))
                memo[u] = res
            return res

        return Ref(other, walk(self._own(a)))

    # -- prime implicants / implicates -------------------------------------

    def prime_implicants(self, a: Ref) -> list[frozenset[tuple[str, bool]]]:
        """All prime implicants as sets of ``(variable, polarity)`` literals."""
        cubes = self._primes(self._own(a), {})
        return self._sorted_cubes(cubes)

    def prime_implicates(self, a: Ref) -> list[frozenset[tuple[str, bool]]]:
        """Prime implicates (clauses); their conjunction is equivalent to ``a``."""
        neg = self._apply("xor", self._own(a), TRUE_ID)
        cubes = self._primes(neg, {})
        clauses = [frozenset((lv, not pol) for lv, pol in cube) for cube in cubes]
        return self._sorted_cubes(clauses)

    def _sorted_cubes(self, cubes) -> list[frozenset[tuple[str, bool]]]:
        keyed = sorted(
            (tuple(sorted(c)) for c in cubes),
            key=lambda lits: (len(lits), list(lits)),
        )
        return [frozenset((self._names[lv], pol) for lv, pol in lits) for lits in keyed]

    def _cube_entails(self, cube: frozenset, u: int) -> bool:
        # walk the function under the cube's partial assignment
        values = dict(cube)
        if not values:
            return u == TRUE_ID
        return self._restrict(values, max(values), u, {}) == TRUE_ID

    def _primes(self, u: int, memo: dict) -> frozenset:
        if u == FALSE_ID:
            return frozenset()
        if u == TRUE_ID:
            return frozenset([frozenset()])
        res = memo.get(u)
        if res is not None:
            return res
        lv = self._level[u]
        f0, f1 = self._low[u], self._high[u]
        both = self._apply("and", f0, f1)
        out = set(self._primes(both, memo))
        for p in self._primes(f0, memo):
            if not self._cube_entails(p, f1):
                out.add(p | {(lv, False)})
        for p in self._primes(f1, memo):
            if not self._cube_entails(p, f0):
                out.add(p | {(lv, True)})
        res = frozenset(out)
        memo[u] = res
        return res

    def iter_models(self, a: Ref, names: list[str]) -> Iterator[dict[str, bool]]:
        """Enumerate satisfying assignments over exactly ``names``."""
        for bits in range(1 << len(names)):
            row = {n: bool(bits >> i & 1) for i, n in enumerate(names)}
            if self.evaluate(a, row):
                yield row
