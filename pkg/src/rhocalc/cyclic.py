"""Hochschild and cyclic complexes of a group ring.

Chains are sparse maps from tuples ``(g0, ..., gn)`` to exact scalars.  The
normalized complexes drop tuples with ``e`` in a slot of index >= 1.  For
infinite groups every complex is truncated by total word length
``l(g0) + ... + l(gn) <= R``, which is closed under faces, so truncated
complexes are honest subcomplexes.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from .errors import (DegreeCapExceeded, EmptyClass, IndexOutOfRange,
                     MissingConjugator, NonComplex)
from .groups import Centralizer, ConjClass, CyclicGroup, FiniteGroup, FreeAbelianGroup, GroupModel
from .linalg import Echelon, add_into, apply_sparse, rank
from .scalars import simplify

Tuple = tuple


# ---------------------------------------------------------------------------
# cyclic set structure


def face(G: GroupModel, i: int, c: Tuple) -> Tuple:
    n = len(c) - 1
    if not 0 <= i <= n or n < 1:
        raise IndexOutOfRange(f"face index {i} out of range for degree {n}")
    if i < n:
        return c[:i] + (G.mul(c[i], c[i + 1]),) + c[i + 2:]
    return (G.mul(c[n], c[0]),) + c[1:n]


def cyclic_t(c: Tuple) -> Tuple:
    return (c[-1],) + c[:-1]


def is_degenerate(G: GroupModel, c: Tuple) -> bool:
    e = G.identity
    return any(g == e for g in c[1:])


def tuple_product(G: GroupModel, c: Tuple):
    p = G.identity
    for g in c:
        p = G.mul(p, g)
    return p


# ---------------------------------------------------------------------------
# chains


class CyclicChain:
    """Sparse chain of a fixed degree, optionally restricted to a conjugacy class."""

    __slots__ = ("group", "degree", "terms", "cls")

    def __init__(self, G: GroupModel, degree: int, terms: dict | None = None,
                 cls: ConjClass | None = None):
        self.group = G
        self.degree = degree
        self.terms = {k: v for k, v in (terms or {}).items() if v}
        self.cls = cls
        for k in self.terms:
            if len(k) != degree + 1:
                raise ValueError(f"tuple {k} does not have degree {degree}")

    @classmethod
    def basis(cls, G: GroupModel, c: Tuple, coef=1) -> "CyclicChain":
        return cls(G, len(c) - 1, {tuple(c): coef})

    def __add__(self, o: "CyclicChain") -> "CyclicChain":
        out = dict(self.terms)
        add_into(out, o.terms)
        return CyclicChain(self.group, self.degree, out, self.cls)

    def __sub__(self, o: "CyclicChain") -> "CyclicChain":
        out = dict(self.terms)
        add_into(out, o.terms, -1)
        return CyclicChain(self.group, self.degree, out, self.cls)

    def scale(self, c) -> "CyclicChain":
        return CyclicChain(self.group, self.degree, {k: v * c for k, v in self.terms.items()}, self.cls)

    def __eq__(self, o):
        if isinstance(o, CyclicChain):
            return self.terms == o.terms
        if o == 0:
            return not self.terms
        return NotImplemented

    def is_zero(self) -> bool:
        return not self.terms

    def normalized(self) -> "CyclicChain":
        G = self.group
        return CyclicChain(G, self.degree,
                           {k: v for k, v in self.terms.items() if not is_degenerate(G, k)}, self.cls)

    def check_class(self) -> bool:
        if self.cls is None:
            return True
        return all(tuple_product(self.group, k) in self.cls for k in self.terms)

    def __repr__(self):
        return f"CyclicChain(deg={self.degree}, {self.terms})"


def b_tuple(G: GroupModel, c: Tuple, normalized: bool = True) -> dict:
    n = len(c) - 1
    out: dict = {}
    if n == 0:
        return out
    for i in range(n + 1):
        f = face(G, i, c)
        if normalized and is_degenerate(G, f):
            continue
        add_into(out, {f: -1 if i % 2 else 1})
    return out


def B_tuple(G: GroupModel, c: Tuple) -> dict:
    """Normalized Connes operator B(g0..gn) = sum_i (-1)^{ni} (e, g_i..g_n, g_0..g_{i-1})."""
    n = len(c) - 1
    e = G.identity
    out: dict = {}
    for i in range(n + 1):
        t = (e,) + c[i:] + c[:i]
        if is_degenerate(G, t):
            continue
        add_into(out, {t: -1 if (n * i) % 2 else 1})
    return out


def hochschild_b(ch: CyclicChain, normalized: bool = True) -> CyclicChain:
    out: dict = {}
    for k, v in ch.terms.items():
        add_into(out, b_tuple(ch.group, k, normalized), v)
    return CyclicChain(ch.group, ch.degree - 1, out, ch.cls)


def connes_B(ch: CyclicChain) -> CyclicChain:
    out: dict = {}
    for k, v in ch.terms.items():
        if is_degenerate(ch.group, k):
            continue
        add_into(out, B_tuple(ch.group, k), v)
    return CyclicChain(ch.group, ch.degree + 1, out, ch.cls)


# ---------------------------------------------------------------------------
# bases


def _total_length(G: GroupModel, c) -> int:
    return sum(G.length(g) for g in c)


def class_basis(G: GroupModel, n: int, members: Iterable | None, R: int | None,
                normalized: bool = True, mode: str = "total") -> list:
    """Tuples of degree n with product in ``members`` (all if None).

    ``mode="total"`` bounds the total length by R (a subcomplex); ``"entries"``
    bounds each entry by R (used for listing, not closed under faces).
    """
    e = G.identity
    if G.is_finite:
        elts = G.ball()
        slots = [g for g in elts if g != e] if normalized else elts
        mem = None if members is None else set(members)
        out = []
        for rest in itertools.product(slots, repeat=n):
            p = G.prod(rest)
            pinv = G.inv(p)
            if mem is None:
                for g0 in elts:
                    out.append((g0,) + rest)
            else:
                for m in members:
                    out.append((G.mul(m, pinv),) + rest)
        return sorted(set(out), key=lambda c: tuple(G.sort_key(g) for g in c))
    if R is None:
        raise ValueError("infinite group needs a radius")
    ball = G.ball(R)
    slots = [g for g in ball if g != e] if normalized else ball
    mem = None if members is None else list(members)
    out = []

    def rec(prefix, used):
        if len(prefix) == n:
            p = G.prod(prefix)
            pinv = G.inv(p)
            cands = ball if mem is None else [G.mul(m, pinv) for m in mem]
            for g0 in cands:
                l0 = G.length(g0)
                if mode == "total" and used + l0 > R:
                    continue
                if mode == "entries" and l0 > R:
                    continue
                out.append((g0,) + prefix)
            return
        for g in slots:
            lg = G.length(g)
            if mode == "total" and used + lg > R:
                continue
            rec(prefix + (g,), used + lg)

    rec((), 0)
    return sorted(set(out), key=lambda c: tuple(G.sort_key(g) for g in c))


# ---------------------------------------------------------------------------
# complexes and homology


@dataclass
class ChainComplexSlice:
    """Degreewise bases and differentials d_n : C_n -> C_{n-1} for n in [0..D].

    ``diffs[n]`` is a list of sparse columns (dicts row-index -> value), one per
    basis element of C_n.  Columns may reference indices only inside C_{n-1}.
    """

    label: str
    bases: list
    diffs: list
    radius: int | None = None
    meta: dict = field(default_factory=dict)

    @property
    def top(self) -> int:
        return len(self.bases) - 1

    def dims(self) -> list:
        return [len(b) for b in self.bases]

    def check(self) -> bool:
        for n in range(2, len(self.bases)):
            for j, col in enumerate(self.diffs[n]):
                if apply_sparse(self.diffs[n - 1], col):
                    return False
        return True


@dataclass(frozen=True)
class HomologyReport:
    dims: tuple
    radius: int | None = None
    stabilized: bool | None = None
    radii: tuple = ()
    label: str = ""


def homology(slice_: ChainComplexSlice, degrees: Iterable[int] | None = None,
             check: bool = True) -> HomologyReport:
    """dim H_n = dim C_n - rank d_n - rank d_{n+1} for n below the top degree."""
    if check and not slice_.check():
        raise NonComplex(f"differentials of {slice_.label} do not compose to zero")
    rk = [rank(d) if n else 0 for n, d in enumerate(slice_.diffs)]
    ds = [len(slice_.bases[n]) - rk[n] - rk[n + 1] for n in range(slice_.top)]
    if degrees is not None:
        ds = [ds[n] for n in degrees]
    return HomologyReport(tuple(ds), slice_.radius, None, (), slice_.label)


def _assemble(bases: list, image: Callable, label: str, R, meta=None) -> ChainComplexSlice:
    index = [{c: i for i, c in enumerate(b)} for b in bases]
    diffs: list = [[{} for _ in bases[0]]]
    for n in range(1, len(bases)):
        cols = []
        for c in bases[n]:
            img = image(n, c)
            col = {}
            for t, v in img.items():
                i = index[n - 1].get(t)
                if i is None:
                    raise NonComplex(f"{label}: boundary of {c} leaves the basis at {t}")
                col[i] = v
            cols.append(col)
        diffs.append(cols)
    return ChainComplexSlice(label, bases, diffs, R, meta or {})


def hochschild_slice(G: GroupModel, D: int, x=None, R: int | None = None,
                     normalized: bool = True) -> ChainComplexSlice:
    """Hochschild complex in degrees 0..D+1 (D+1 is needed for H_D)."""
    members = None
    if x is not None:
        members = G.conjugacy_class(x, R if R is not None else 0).members
        if not G.is_finite:
            members = _members_within(G, x, R)
    bases = [class_basis(G, n, members, R, normalized) for n in range(D + 2)]
    if members is not None and not bases[0] and not G.is_finite:
        raise EmptyClass(f"class of {G.format(x)} misses the ball of radius {R}")
    return _assemble(bases, lambda n, c: b_tuple(G, c, normalized), "hochschild", R,
                     {"class": x})


def localize(G: GroupModel, x, n: int, R: int | None = None, mode: str = "entries",
             normalized: bool = True) -> list:
    """Basis tuples of Z_n(Γ, x) (listing helper)."""
    members = G.conjugacy_class(x, R if R is not None else 0).members
    if not G.is_finite:
        members = _members_within(G, x, R)
    out = class_basis(G, n, members, R, normalized, mode)
    if not out:
        raise EmptyClass(f"class of {G.format(x)} is empty at radius {R}")
    return out


def _members_within(G: GroupModel, x, R):
    return G.conjugacy_class(x, R).members


def cyclic_total_slice(G: GroupModel, D: int, x=None, R: int | None = None) -> ChainComplexSlice:
    """Total complex of the normalized (b, B) bicomplex, degrees 0..D+1.

    Tot_n = C_n + C_{n-2} + ...; basis entries are (column j, tuple) with
    the tuple of degree n - 2j.
    """
    members = None
    if x is not None:
        members = _members_within(G, x, R) if not G.is_finite else G.conjugacy_class(x).members
    chain_bases = [class_basis(G, n, members, R, True) for n in range(D + 2)]
    bases = []
    for n in range(D + 2):
        bs = []
        for j in range(n // 2 + 1):
            bs.extend((j, c) for c in chain_bases[n - 2 * j])
        bases.append(bs)

    def image(n, jc):
        j, c = jc
        out = {}
        for t, v in b_tuple(G, c).items():
            out[(j, t)] = v
        if j >= 1:
            for t, v in B_tuple(G, c).items():
                add_into(out, {(j - 1, t): v})
        return out

    return _assemble(bases, image, "cyclic-total", R, {"class": x})


# ---------------------------------------------------------------------------
# stabilization sweeps


def stabilized_homology(build: Callable[[int], ChainComplexSlice], R0: int, Rmax: int,
                        degrees: Sequence[int]) -> HomologyReport:
    """Recompute at R0, R0+1, ... until two consecutive radii agree."""
    prev = None
    radii = []
    for R in range(R0, Rmax + 1):
        rep = homology(build(R), degrees)
        radii.append(R)
        if prev is not None and prev.dims == rep.dims:
            return HomologyReport(rep.dims, R, True, tuple(radii), rep.label)
        prev = rep
    return HomologyReport(prev.dims if prev else (), Rmax, False, tuple(radii),
                          prev.label if prev else "")


# ---------------------------------------------------------------------------
# periodicity


def homology_classes(slice_: ChainComplexSlice, n: int):
    """Cycle representatives of H_n and a coordinate function on cycles."""
    ech = Echelon(track=True)
    if n + 1 <= slice_.top:
        for i, col in enumerate(slice_.diffs[n + 1]):
            ech.add(col, label=("b", i))
    cycles = _kernel(slice_, n)
    reps = []
    for j, z in enumerate(cycles):
        if ech.add(z, label=("z", j)) is None:
            reps.append((j, z))
    rep_ids = {j: k for k, (j, _) in enumerate(reps)}

    def coords(v: dict) -> list:
        sol = ech.solve(v)
        if sol is None:
            raise ValueError("vector is not a cycle in the span")
        out = [0] * len(reps)
        for lab, c in sol.items():
            if lab[0] == "z":
                out[rep_ids[lab[1]]] += c
        return [simplify(v) for v in out]

    return [z for _, z in reps], coords


def _kernel(slice_: ChainComplexSlice, n: int) -> list:
    from .linalg import kernel_basis
    if n == 0:
        return [{i: 1} for i in range(len(slice_.bases[0]))]
    return kernel_basis(slice_.diffs[n])


def periodicity_S(slice_: ChainComplexSlice, n: int) -> list:
    """Matrix of S : HC_n -> HC_{n-2} on the cyclic total complex (columns = sources)."""
    if slice_.label != "cyclic-total":
        raise ValueError("periodicity needs a cyclic-total slice")
    if n + 1 > slice_.top or n < 2:
        raise DegreeCapExceeded(f"S on HC_{n} needs degrees up to {n + 1}")
    reps, _ = homology_classes(slice_, n)
    _, coords_low = homology_classes(slice_, n - 2)
    idx_low = {c: i for i, c in enumerate(slice_.bases[n - 2])}
    src = slice_.bases[n]
    cols = []
    for z in reps:
        img = {}
        for i, v in z.items():
            j, c = src[i]
            if j >= 1:
                img[idx_low[(j - 1, c)]] = v
        cols.append(coords_low(img))
    return cols


def matrix_rank(cols: list) -> int:
    return rank([{i: v for i, v in enumerate(c) if v} for c in cols])


# ---------------------------------------------------------------------------
# centralizers: rho, homotopy, bar complexes


class ConjugatorCache:
    """Canonical minimal-length y with y m y^-1 = x for members m of the class of x."""

    def __init__(self, G: GroupModel, x, R: int | None = None):
        self.group = G
        self.x = x
        self.R = R
        self.cls = G.conjugacy_class(x, R if R is not None else 0)
        self._y: dict = {}

    def y(self, m):
        hit = self._y.get(m)
        if hit is not None:
            return hit
        G = self.group
        if m not in self.cls.conjugators:
            raise MissingConjugator(f"{G.format(m)} is not a recorded conjugate of {G.format(self.x)}")
        c = self.cls.conjugators[m]  # c x c^-1 = m
        y0 = G.inv(c)
        if G.is_finite:
            cands = G.ball()
        else:
            cands = G.ball(G.length(y0))
        best = None
        for y in cands:
            if G.conj(y, m) == self.x:
                if best is None or (G.length(y), G.sort_key(y)) < (G.length(best), G.sort_key(best)):
                    best = y
        if best is None:
            best = y0
        self._y[m] = best
        return best

    def rotations(self, c: Tuple) -> list:
        """G_i = g_{i+1}...g_n g_0...g_i for i = 0..n."""
        G = self.group
        n = len(c) - 1
        return [G.prod(c[i + 1:] + c[:i + 1]) for i in range(n + 1)]

    def ys(self, c: Tuple) -> list:
        return [self.y(Gi) for Gi in self.rotations(c)]


def rho_pullback(cache: ConjugatorCache, c: Tuple) -> Tuple:
    G = cache.group
    ys = cache.ys(c)
    n = len(c) - 1
    out = [G.mul(G.mul(ys[n], c[0]), G.inv(ys[0]))]
    for i in range(1, n + 1):
        out.append(G.mul(G.mul(ys[i - 1], c[i]), G.inv(ys[i])))
    return tuple(out)


def simplicial_homotopy_h(cache: ConjugatorCache, j: int, c: Tuple) -> Tuple:
    """h_j(g) = (g0 y0^-1, y0 g1 y1^-1, ..., y_{j-1} g_j y_j^-1, y_j, g_{j+1}, ..., g_n)."""
    G = cache.group
    n = len(c) - 1
    if not 0 <= j <= n:
        raise IndexOutOfRange(f"homotopy index {j} out of range for degree {n}")
    ys = cache.ys(c)
    out = [G.mul(c[0], G.inv(ys[0]))]
    for i in range(1, j + 1):
        out.append(G.mul(G.mul(ys[i - 1], c[i]), G.inv(ys[i])))
    out.append(ys[j])
    out.extend(c[j + 1:])
    return tuple(out)


def homotopy_H(cache: ConjugatorCache, c: Tuple) -> dict:
    """H = sum_j (-1)^(j+1) h_j on the unnormalized complex."""
    out: dict = {}
    for j in range(len(c)):
        add_into(out, {simplicial_homotopy_h(cache, j, c): -1 if j % 2 == 0 else 1})
    return out


def check_homotopy_identity(G: GroupModel, x, D: int, R: int | None = None):
    """Check bH + Hb = iota rho - id on every basis tuple of degrees 0..D.

    Returns (ok, counterexample tuple or None, number of tuples checked).
    """
    cache = ConjugatorCache(G, x, R)
    members = cache.cls.members
    checked = 0
    for n in range(D + 1):
        for c in class_basis(G, n, members, R, normalized=False):
            lhs: dict = {}
            for t, v in homotopy_H(cache, c).items():
                add_into(lhs, b_tuple(G, t, normalized=False), v)
            if n >= 1:
                for t, v in b_tuple(G, c, normalized=False).items():
                    add_into(lhs, homotopy_H(cache, t), v)
            rhs: dict = {}
            add_into(rhs, {rho_pullback(cache, c): 1})
            add_into(rhs, {c: -1})
            checked += 1
            if lhs != rhs:
                return False, c, checked
    return True, None, checked


def bar_slice(C: Centralizer, D: int, R: int | None = None) -> ChainComplexSlice:
    """Normalized bar complex of the centralizer, degrees 0..D+1 (total-length truncation)."""
    G = C.group
    e = G.identity
    if G.is_finite:
        elts = [g for g in C.elements if g != e]
    else:
        if R is None:
            raise ValueError("infinite centralizer needs a radius")
        elts = [g for g in G.ball(R) if g != e and C.contains(g)]
    bases = [[()]]
    for n in range(1, D + 2):
        bs = []
        for t in itertools.product(elts, repeat=n):
            if R is not None and not G.is_finite and _total_length(G, t) > R:
                continue
            bs.append(t)
        bases.append(bs)

    def image(n, c):
        out: dict = {}
        terms = [(c[1:], 1)]
        for i in range(n - 1):
            terms.append((c[:i] + (G.mul(c[i], c[i + 1]),) + c[i + 2:], -1 if (i + 1) % 2 else 1))
        terms.append((c[:-1], -1 if n % 2 else 1))
        for t, s in terms:
            if any(g == e for g in t):
                continue
            add_into(out, {t: s})
        return out

    return _assemble(bases, image, "bar", R, {"x": C.x})


def bar_cohomology(C: Centralizer, D: int, R: int | None = None,
                   Rmax: int | None = None) -> HomologyReport:
    """Dimensions of H^n(Γ_x; C) for n = 0..D.

    Over a field the dual complex has the same Betti numbers, so the truncated
    bar homology is computed.  Infinite centralizers are swept over radii.
    """
    if C.group.is_finite:
        return homology(bar_slice(C, D), range(D + 1))
    R0 = R if R is not None else 1
    return stabilized_homology(lambda r: bar_slice(C, D, r), R0, Rmax or R0 + 6, range(D + 1))


# ---------------------------------------------------------------------------
# Burghelea comparison


def quotient_by_cyclic(G: FiniteGroup, C: Centralizer, x) -> FiniteGroup:
    """Γ_x / <x> as a finite table."""
    H = list(C.elements)
    cyc = [G.identity]
    p = x
    while p != G.identity:
        cyc.append(p)
        p = G.mul(p, x)
    cosets: list = []
    rep_of: dict = {}
    for h in sorted(H):
        if h in rep_of:
            continue
        coset = sorted(G.mul(h, z) for z in cyc)
        idx = len(cosets)
        cosets.append(coset[0])
        for g in coset:
            rep_of[g] = idx
    table = [[rep_of[G.mul(a, b)] for b in cosets] for a in cosets]
    return FiniteGroup(table)


def _group_betti(G: GroupModel, D: int, R: int | None = None) -> list:
    C = G.centralizer(G.identity, R if R is not None else 0)
    if G.is_finite:
        return list(homology(bar_slice(C, D), range(D + 1)).dims)
    return list(bar_cohomology(C, D, R).dims)


@dataclass(frozen=True)
class BurgheleaReport:
    x: object
    direct: tuple
    formula: tuple
    match: bool
    finite_order: bool
    stabilized: bool | None
    radius: int | None


def centralizer_quotient_betti(G: GroupModel, x, D: int, R: int | None = None) -> list:
    """Betti numbers of Γ_x/<x> in degrees 0..D."""
    if G.is_finite:
        C = G.centralizer(x)
        Q = quotient_by_cyclic(G, C, x)
        return _group_betti(Q, D)
    if isinstance(G, FreeAbelianGroup):
        if G.n == 1 or x == G.identity:
            if x == G.identity:
                return _group_betti(G, D, R)
            return _group_betti(CyclicGroup(abs(x[0])), D)
        return _group_betti(FreeAbelianGroup(G.n - 1), D, R)
    if G.kind == "free":
        if x == G.identity:
            return _group_betti(G, D, R)
        return [1] + [0] * D
    raise NotImplementedError("no centralizer-quotient model for this group kind")


def burghelea_check(G: GroupModel, x, D: int, R: int | None = None,
                    Rmax: int | None = None) -> BurgheleaReport:
    """Localized HC by brute force next to the centralizer-quotient formula.

    ``x=None`` compares the whole algebra of a finite group, summing classes.
    """
    if x is None:
        if not G.is_finite:
            raise ValueError("whole-algebra comparison needs a finite group")
        parts = [burghelea_check(G, c.rep, D) for c in G.conjugacy_classes()]
        direct = tuple(sum(p.direct[n] for p in parts) for n in range(D + 1))
        formula = tuple(sum(p.formula[n] for p in parts) for n in range(D + 1))
        return BurgheleaReport(None, direct, formula, direct == formula, True, None, None)
    finite_order = G.has_finite_order(x)
    betti = centralizer_quotient_betti(G, x, D, R)
    if finite_order:
        formula = tuple(sum(betti[n - 2 * j] for j in range(n // 2 + 1)) for n in range(D + 1))
    else:
        formula = tuple(betti[:D + 1])
    if G.is_finite:
        direct = homology(cyclic_total_slice(G, D, x), range(D + 1))
        stab = None
    else:
        R0 = R if R is not None else 2
        direct = stabilized_homology(lambda r: cyclic_total_slice(G, D, x, r), R0,
                                     Rmax or 8, range(D + 1))
        stab = direct.stabilized
    return BurgheleaReport(x, direct.dims, formula, direct.dims == formula, finite_order,
                           stab, direct.radius)


# ---------------------------------------------------------------------------
# cochains of polynomial growth


def polynomial_growth_bound(f: Callable, G: GroupModel, n: int, N: int, C, R: int) -> bool:
    """Check |f(g0..gn)| <= C (1 + l(g0)...l(gn))^N on all tuples from ball(R)."""
    ball = G.ball(R)
    for c in itertools.product(ball, repeat=n + 1):
        prod_len = 1
        for g in c:
            prod_len *= G.length(g)
        if abs(f(*c)) > C * (1 + prod_len) ** N:
            return False
    return True


# ---------------------------------------------------------------------------
# whole-algebra dimensions


def _class_reps(G: GroupModel, R: int | None):
    if not G.is_finite:
        raise ValueError("whole-algebra homology is only finite for finite groups; localize at a class")
    return [c.rep for c in G.conjugacy_classes()]


def hochschild_dims(G: GroupModel, D: int) -> tuple:
    """dim HH_n(CΓ) for n = 0..D, summed over the class decomposition."""
    tot = [0] * (D + 1)
    for x in _class_reps(G, None):
        for n, h in enumerate(homology(hochschild_slice(G, D, x), range(D + 1)).dims):
            tot[n] += h
    return tuple(tot)


def cyclic_dims(G: GroupModel, D: int) -> tuple:
    """dim HC_n(CΓ) for n = 0..D, summed over the class decomposition."""
    tot = [0] * (D + 1)
    for x in _class_reps(G, None):
        for n, h in enumerate(homology(cyclic_total_slice(G, D, x), range(D + 1)).dims):
            tot[n] += h
    return tuple(tot)
