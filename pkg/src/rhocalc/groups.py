"""Concrete groups: finite tables, cyclic, dihedral, free abelian and free groups.

Finite groups are stored as multiplication tables over element indices with
identity 0.  Infinite groups use integer vectors (free abelian) or reduced
words (free); they are explored through word-length balls of a given radius.
"""

from __future__ import annotations

import itertools
import json
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable, Sequence

from .errors import IncompatibleModels

Element = Hashable


@dataclass(frozen=True)
class ConjClass:
    """Conjugacy class of ``rep``; ``conjugators[m]`` satisfies c*rep*c^-1 = m."""

    group: "GroupModel"
    rep: Element
    members: tuple
    conjugators: dict = field(hash=False, compare=False)
    finite_order: bool
    radius: int | None = None

    def __contains__(self, g) -> bool:
        return g in self.conjugators

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)


@dataclass(frozen=True)
class Centralizer:
    """Centralizer of ``x``; ``elements`` is exact for finite groups, a ball otherwise."""

    group: "GroupModel"
    x: Element
    elements: tuple
    radius: int | None = None

    def contains(self, g) -> bool:
        G = self.group
        return G.mul(g, self.x) == G.mul(self.x, g)

    def __contains__(self, g) -> bool:
        return self.contains(g)

    @property
    def is_finite(self) -> bool:
        return self.group.is_finite


class GroupModel:
    """Common interface.  Subclasses implement the arithmetic primitives."""

    kind: str = "abstract"
    is_finite: bool = False

    identity: Element

    def mul(self, a, b):
        raise NotImplementedError

    def inv(self, a):
        raise NotImplementedError

    def length(self, g) -> int:
        raise NotImplementedError

    def sort_key(self, g):
        raise NotImplementedError

    def ball(self, R: int | None = None) -> list:
        raise NotImplementedError

    def format(self, g) -> str:
        raise NotImplementedError

    def parse(self, obj):
        raise NotImplementedError

    def to_json(self):
        raise NotImplementedError

    def contains(self, g) -> bool:
        """Whether ``g`` is a valid element of this model."""
        raise NotImplementedError

    # derived operations -------------------------------------------------

    def multiply(self, a, b):
        if not (self.contains(a) and self.contains(b)):
            raise IncompatibleModels(f"elements {a!r}, {b!r} do not belong to {self}")
        return self.mul(a, b)

    def multiply_flagged(self, a, b, R: int):
        """Product plus a flag telling whether it left ``ball(R)``."""
        p = self.multiply(a, b)
        return p, self.length(p) > R

    def prod(self, elts: Iterable):
        out = self.identity
        for g in elts:
            out = self.mul(out, g)
        return out

    def conj(self, c, x):
        """c x c^-1"""
        return self.mul(self.mul(c, x), self.inv(c))

    def commutes(self, a, b) -> bool:
        return self.mul(a, b) == self.mul(b, a)

    def order(self, g, limit: int = 10_000):
        """Order of ``g`` or None if infinite (or larger than ``limit``)."""
        p = g
        for n in range(1, limit + 1):
            if p == self.identity:
                return n
            p = self.mul(p, g)
        return None

    def has_finite_order(self, g) -> bool:
        return self.order(g) is not None

    def sorted(self, elts: Iterable) -> list:
        return sorted(elts, key=self.sort_key)

    def conjugacy_class(self, x, R: int = 0) -> ConjClass:
        if self.is_finite:
            conj = {}
            for c in self.ball():
                m = self.conj(c, x)
                if m not in conj:
                    conj[m] = c
            members = tuple(self.sorted(conj))
            return ConjClass(self, x, members, conj, True, None)
        return self._infinite_class(x, R)

    def _infinite_class(self, x, R: int) -> ConjClass:
        conj = {}
        for c in self.ball(R + self.length(x)):
            m = self.conj(c, x)
            if self.length(m) <= R and m not in conj:
                conj[m] = c
        members = tuple(self.sorted(conj))
        return ConjClass(self, x, members, conj, self.has_finite_order(x), R)

    def conjugacy_classes(self, R: int = 0) -> list:
        """All classes (finite groups) or classes meeting ``ball(R)``."""
        seen: set = set()
        out = []
        for g in self.ball(R):
            if g in seen:
                continue
            cl = self.conjugacy_class(g, R)
            seen.update(cl.members)
            out.append(cl)
        return out

    def centralizer(self, x, R: int = 0) -> Centralizer:
        elts = tuple(g for g in self.ball(R) if self.commutes(g, x))
        return Centralizer(self, x, elts, None if self.is_finite else R)

    @property
    def rational_cd(self) -> int:
        """Degree above which group homology of every centralizer vanishes rationally."""
        raise NotImplementedError

    def class_canonical(self, g):
        """A canonical representative of the conjugacy class of ``g``."""
        raise NotImplementedError

    def __repr__(self):
        return f"{type(self).__name__}({self.to_json()['params']})"


# ---------------------------------------------------------------------------
# finite groups


class FiniteGroup(GroupModel):
    """A finite group given by a multiplication table over 0..n-1 (0 = e)."""

    is_finite = True
    kind = "finite-table"

    def __init__(self, table: Sequence[Sequence[int]], labels: Sequence[str] | None = None,
                 generators: Sequence[int] | None = None):
        n = len(table)
        self.table = tuple(tuple(int(v) for v in row) for row in table)
        if any(len(r) != n for r in self.table):
            raise ValueError("multiplication table must be square")
        if self.table[0] != tuple(range(n)) or any(self.table[i][0] != i for i in range(n)):
            raise ValueError("row and column 0 must be the identity")
        self.n = n
        self.identity = 0
        self._inv = []
        for a in range(n):
            inv = [b for b in range(n) if self.table[a][b] == 0]
            if len(inv) != 1:
                raise ValueError(f"element {a} has no unique inverse")
            self._inv.append(inv[0])
        self.labels = tuple(labels) if labels is not None else tuple(str(i) for i in range(n))
        self._label_index = {s: i for i, s in enumerate(self.labels)}
        if generators is None:
            generators = range(1, n)
        gens = set(int(g) for g in generators)
        gens |= {self._inv[g] for g in gens}
        self.generators = tuple(sorted(gens))
        self._len = self._bfs_lengths()

    def _bfs_lengths(self):
        dist = [-1] * self.n
        dist[0] = 0
        q = deque([0])
        while q:
            a = q.popleft()
            for s in self.generators:
                b = self.table[a][s]
                if dist[b] < 0:
                    dist[b] = dist[a] + 1
                    q.append(b)
        if min(dist) < 0:
            raise ValueError("generators do not generate the group")
        return tuple(dist)

    rational_cd = 0

    def class_canonical(self, g):
        if not hasattr(self, "_canon"):
            canon = {}
            for cl in self.conjugacy_classes():
                rep = min(cl.members)
                for m in cl.members:
                    canon[m] = rep
            self._canon = canon
        return self._canon[g]

    def check_associative(self) -> bool:
        t = self.table
        r = range(self.n)
        return all(t[t[a][b]][c] == t[a][t[b][c]] for a in r for b in r for c in r)

    def mul(self, a, b):
        return self.table[a][b]

    def inv(self, a):
        return self._inv[a]

    def length(self, g) -> int:
        return self._len[g]

    def sort_key(self, g):
        return g

    def ball(self, R: int | None = None) -> list:
        return list(range(self.n))

    def elements(self) -> list:
        return list(range(self.n))

    def contains(self, g) -> bool:
        return isinstance(g, int) and 0 <= g < self.n

    def format(self, g) -> str:
        return self.labels[g]

    def parse(self, obj):
        if isinstance(obj, bool):
            raise ValueError(f"bad element {obj!r}")
        if isinstance(obj, int):
            if not self.contains(obj):
                raise ValueError(f"element index {obj} out of range")
            return obj
        if isinstance(obj, str):
            if obj in self._label_index:
                return self._label_index[obj]
            if obj.lstrip("-").isdigit():
                return self.parse(int(obj))
            if obj == "e":
                return 0
        raise ValueError(f"unknown element {obj!r}")

    def to_json(self):
        return {"kind": "finite-table",
                "params": {"table": [list(r) for r in self.table],
                           "labels": list(self.labels),
                           "generators": list(self.generators)}}


class CyclicGroup(FiniteGroup):
    kind = "cyclic"

    def __init__(self, m: int):
        if m < 1:
            raise ValueError("cyclic group order must be positive")
        self.m = m
        table = [[(a + b) % m for b in range(m)] for a in range(m)]
        super().__init__(table, [str(i) for i in range(m)], [1 % m] if m > 1 else [])

    def to_json(self):
        return {"kind": "cyclic", "params": {"m": self.m}}


class DihedralGroup(FiniteGroup):
    """Dihedral group of order 2m; index r + m*s stands for rot^r ref^s."""

    kind = "dihedral"

    def __init__(self, m: int):
        if m < 1:
            raise ValueError("dihedral parameter must be positive")
        self.m = m

        def enc(r, s):
            return (r % m) + m * s

        table = [[0] * (2 * m) for _ in range(2 * m)]
        for s1 in (0, 1):
            for r1 in range(m):
                for s2 in (0, 1):
                    for r2 in range(m):
                        r = r1 + (r2 if s1 == 0 else -r2)
                        table[enc(r1, s1)][enc(r2, s2)] = enc(r, (s1 + s2) % 2)
        labels = []
        for s in (0, 1):
            for r in range(m):
                part = ("r" if r == 1 else f"r{r}") if r else ""
                lab = part + ("s" if s else "")
                labels.append(lab or "e")
        gens = [enc(1, 0), enc(0, 1)] if m > 1 else [enc(0, 1)]
        super().__init__(table, labels, gens)

    def to_json(self):
        return {"kind": "dihedral", "params": {"m": self.m}}


def symmetric_group(n: int) -> FiniteGroup:
    """S_n as a finite table with cycle-notation labels; composition (ab)(i) = a(b(i))."""
    perms = sorted(itertools.permutations(range(n)),
                   key=lambda p: (sum(p[i] != i for i in range(n)), _cycle_label(p)))
    index = {p: i for i, p in enumerate(perms)}
    table = [[index[tuple(a[b[i]] for i in range(n))] for b in perms] for a in perms]
    labels = [_cycle_label(p) for p in perms]
    gens = [index[tuple(_transposition(n, i))] for i in range(n - 1)]
    return FiniteGroup(table, labels, gens)


def _transposition(n, i):
    p = list(range(n))
    p[i], p[i + 1] = p[i + 1], p[i]
    return p


def _cycle_label(p) -> str:
    seen = set()
    parts = []
    for i in range(len(p)):
        if i in seen or p[i] == i:
            continue
        cyc = [i]
        seen.add(i)
        j = p[i]
        while j != i:
            cyc.append(j)
            seen.add(j)
            j = p[j]
        parts.append("(" + "".join(str(k + 1) for k in cyc) + ")")
    return "".join(parts) or "e"


# ---------------------------------------------------------------------------
# infinite groups


class FreeAbelianGroup(GroupModel):
    """Z^n with the standard generators; elements are integer tuples."""

    kind = "free-abelian"

    def __init__(self, n: int):
        if n < 1:
            raise ValueError("rank must be positive")
        self.n = n
        self.identity = (0,) * n
        self._balls: dict = {}

    def mul(self, a, b):
        return tuple(x + y for x, y in zip(a, b))

    def inv(self, a):
        return tuple(-x for x in a)

    def length(self, g) -> int:
        return sum(abs(x) for x in g)

    def sort_key(self, g):
        return g

    def ball(self, R: int | None = None) -> list:
        if R is None:
            raise ValueError("infinite group needs a radius")
        if R not in self._balls:
            pts = [v for v in itertools.product(range(-R, R + 1), repeat=self.n)
                   if sum(abs(x) for x in v) <= R]
            self._balls[R] = sorted(pts)
        return list(self._balls[R])

    def conjugacy_class(self, x, R: int = 0) -> ConjClass:
        return ConjClass(self, x, (x,), {x: self.identity}, x == self.identity, R)

    @property
    def rational_cd(self) -> int:
        return self.n

    def class_canonical(self, g):
        return g

    def order(self, g, limit: int = 10_000):
        return 1 if g == self.identity else None

    def contains(self, g) -> bool:
        return isinstance(g, tuple) and len(g) == self.n and all(isinstance(x, int) for x in g)

    def format(self, g) -> str:
        if self.n == 1:
            return str(g[0])
        return "[" + ",".join(str(x) for x in g) + "]"

    def parse(self, obj):
        if isinstance(obj, str):
            obj = json.loads(obj) if obj.strip().startswith("[") else int(obj)
        if isinstance(obj, int) and not isinstance(obj, bool):
            if self.n != 1:
                raise ValueError("scalar element given for rank > 1")
            return (obj,)
        if isinstance(obj, (list, tuple)) and len(obj) == self.n:
            return tuple(int(x) for x in obj)
        raise ValueError(f"bad element {obj!r}")

    def to_json(self):
        return {"kind": "free-abelian", "params": {"n": self.n}}


class FreeGroup(GroupModel):
    """Free group on k letters; reduced words as tuples of nonzero ints (-i = inverse)."""

    kind = "free"

    def __init__(self, k: int):
        if k < 1 or k > 26:
            raise ValueError("free group rank must be in 1..26")
        self.k = k
        self.identity = ()
        self._balls: dict = {}

    @staticmethod
    def _letter_key(i: int) -> int:
        return 2 * (abs(i) - 1) + (0 if i > 0 else 1)

    def mul(self, a, b):
        out = list(a)
        for x in b:
            if out and out[-1] == -x:
                out.pop()
            else:
                out.append(x)
        return tuple(out)

    def inv(self, a):
        return tuple(-x for x in reversed(a))

    def length(self, g) -> int:
        return len(g)

    def sort_key(self, g):
        return (len(g), tuple(self._letter_key(x) for x in g))

    def ball(self, R: int | None = None) -> list:
        if R is None:
            raise ValueError("infinite group needs a radius")
        if R not in self._balls:
            letters = sorted([i for i in range(1, self.k + 1)] + [-i for i in range(1, self.k + 1)],
                             key=self._letter_key)
            layer = [()]
            out = [()]
            for _ in range(R):
                nxt = []
                for w in layer:
                    for x in letters:
                        if w and w[-1] == -x:
                            continue
                        nxt.append(w + (x,))
                out.extend(nxt)
                layer = nxt
            self._balls[R] = self.sorted(out)
        return list(self._balls[R])

    rational_cd = 1

    def class_canonical(self, g):
        _, w = self.cyclic_reduction(g)
        if not w:
            return ()
        return min((w[j:] + w[:j] for j in range(len(w))), key=self.sort_key)

    def cyclic_reduction(self, x):
        """Return (u, w) with x = u w u^-1 and w cyclically reduced."""
        u: list = []
        w = list(x)
        while len(w) >= 2 and w[0] == -w[-1]:
            u.append(w[0])
            w = w[1:-1]
        return tuple(u), tuple(w)

    def conjugacy_class(self, x, R: int = 0) -> ConjClass:
        u, w = self.cyclic_reduction(x)
        conj = {}
        if not w:
            conj[()] = ()
            return ConjClass(self, x, ((),), conj, True, R)
        uinv = self.inv(u)
        n = len(w)
        vmax = max(-1, (R - n) // 2)
        vs = self.ball(vmax) if vmax >= 0 else []
        for v in vs:
            for j in range(n):
                s, t = w[:j], w[j:]
                wr = t + s
                if v and (v[-1] == -wr[0] or v[-1] == wr[-1]):
                    continue
                m = v + wr + self.inv(v)
                if len(m) > R:
                    continue
                c = self.mul(self.mul(v, self.inv(s)), uinv)
                if m not in conj or self.sort_key(c) < self.sort_key(conj[m]):
                    conj[m] = c
        members = tuple(self.sorted(conj))
        return ConjClass(self, x, members, conj, False, R)

    def order(self, g, limit: int = 10_000):
        return 1 if g == () else None

    def contains(self, g) -> bool:
        if not isinstance(g, tuple):
            return False
        for i, x in enumerate(g):
            if not isinstance(x, int) or x == 0 or abs(x) > self.k:
                return False
            if i and g[i - 1] == -x:
                return False
        return True

    def format(self, g) -> str:
        if not g:
            return "e"
        return "".join(chr(ord("a") + abs(x) - 1) if x > 0 else chr(ord("A") + abs(x) - 1)
                       for x in g)

    def parse(self, obj):
        if isinstance(obj, str):
            if obj in ("e", ""):
                return ()
            word = []
            for ch in obj:
                if "a" <= ch <= "z":
                    word.append(ord(ch) - ord("a") + 1)
                elif "A" <= ch <= "Z":
                    word.append(-(ord(ch) - ord("A") + 1))
                else:
                    raise ValueError(f"bad letter {ch!r}")
            out = self.mul((), tuple(word))
        elif isinstance(obj, (list, tuple)):
            out = self.mul((), tuple(int(x) for x in obj))
        else:
            raise ValueError(f"bad element {obj!r}")
        if not self.contains(out):
            raise ValueError(f"letters out of range in {obj!r}")
        return out

    def to_json(self):
        return {"kind": "free", "params": {"k": self.k}}


# ---------------------------------------------------------------------------
# construction helpers


def group_from_json(spec: dict) -> GroupModel:
    kind = spec.get("kind")
    p = spec.get("params", {})
    if kind == "cyclic":
        return CyclicGroup(int(p["m"]))
    if kind == "dihedral":
        return DihedralGroup(int(p["m"]))
    if kind == "finite-table":
        if "table" not in p and "symmetric" in p:
            return symmetric_group(int(p["symmetric"]))
        return FiniteGroup(p["table"], p.get("labels"), p.get("generators"))
    if kind == "free-abelian":
        return FreeAbelianGroup(int(p["n"]))
    if kind == "free":
        return FreeGroup(int(p["k"]))
    raise ValueError(f"unknown group kind {kind!r}")


def load_group(path: str) -> GroupModel:
    with open(path) as fh:
        return group_from_json(json.load(fh))


@dataclass(frozen=True)
class GroupHom:
    """A homomorphism given by an element map; ``check`` verifies it on a finite set."""

    source: GroupModel
    target: GroupModel
    fn: Callable

    def __call__(self, g):
        return self.fn(g)

    def check(self, elements: Iterable | None = None) -> bool:
        elts = list(elements) if elements is not None else self.source.ball()
        S, T = self.source, self.target
        return all(self.fn(S.mul(a, b)) == T.mul(self.fn(a), self.fn(b)) for a in elts for b in elts)
