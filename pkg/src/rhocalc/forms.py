"""Noncommutative differential forms over a group ring.

A basis form ``g0 dg1 ... dgk`` is stored as the key ``(g0, (g1, ..., gk))``;
``e`` may only occur as ``g0``.  :class:`NCForm` is a sparse linear
combination of such keys with exact coefficients.
"""

from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass
from typing import Iterable

from .errors import TruncationOverflow
from .groups import GroupModel
from .linalg import Echelon, add_into
from .scalars import Scalar, parse_scalar, simplify, to_pair

Key = tuple  # (g0, (g1, ..., gk))


# ---------------------------------------------------------------------------
# basis-level operations


def key_product(G: GroupModel, key: Key) -> object:
    g0, gs = key
    p = g0
    for g in gs:
        p = G.mul(p, g)
    return p


def _times_element(G: GroupModel, key: Key, h) -> list:
    """Expand (g0 dg1 ... dgk) * h into basis terms as (sign, key) pairs."""
    g0, gs = key
    e = G.identity
    if h == e:
        return [(1, key)]
    k = len(gs)
    if k == 0:
        return [(1, (G.mul(g0, h), ()))]
    out = []
    seq = gs + (h,)
    for j in range(1, k + 1):
        merged = G.mul(seq[j - 1], seq[j])
        if merged == e:
            continue
        slots = seq[: j - 1] + (merged,) + seq[j + 1:]
        out.append((-1 if (k - j) % 2 else 1, (g0, slots)))
    out.append((-1 if k % 2 else 1, (G.mul(g0, gs[0]), gs[1:] + (h,))))
    return out


def basis_product(G: GroupModel, a: Key, b: Key) -> list:
    h0, hs = b
    return [(s, (k0, ks + hs)) for s, (k0, ks) in _times_element(G, a, h0)]


def _mul_terms(G: GroupModel, A: dict, B: dict) -> dict:
    out: dict = {}
    cache: dict = {}
    for ka, ca in A.items():
        for kb, cb in B.items():
            ck = (ka, kb[0])
            exp = cache.get(ck)
            if exp is None:
                exp = _times_element(G, ka, kb[0])
                cache[ck] = exp
            c = ca * cb
            hs = kb[1]
            for s, (k0, ks) in exp:
                key = (k0, ks + hs) if hs else (k0, ks)
                v = out.get(key, 0) + (c if s > 0 else -c)
                if v:
                    out[key] = v
                else:
                    del out[key]
    return out


# ---------------------------------------------------------------------------


class NCForm:
    """Element of the universal differential graded algebra over CΓ."""

    __slots__ = ("group", "terms")

    def __init__(self, group: GroupModel, terms: dict | None = None):
        self.group = group
        if terms:
            self.terms = {k: v for k, v in terms.items() if v}
        else:
            self.terms = {}

    # constructors
    @classmethod
    def zero(cls, G: GroupModel) -> "NCForm":
        return cls(G)

    @classmethod
    def one(cls, G: GroupModel) -> "NCForm":
        return cls(G, {(G.identity, ()): 1})

    @classmethod
    def basis(cls, G: GroupModel, g0, gs: Iterable = (), coef: Scalar = 1) -> "NCForm":
        gs = tuple(gs)
        if any(g == G.identity for g in gs) or not coef:
            return cls(G)
        return cls(G, {(g0, gs): simplify(coef)})

    @classmethod
    def element(cls, G: GroupModel, g, coef: Scalar = 1) -> "NCForm":
        return cls.basis(G, g, (), coef)

    @classmethod
    def from_group_ring(cls, G: GroupModel, coeffs: dict) -> "NCForm":
        return cls(G, {(g, ()): simplify(c) for g, c in coeffs.items()})

    # structure
    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def degrees(self) -> set:
        return {len(k[1]) for k in self.terms}

    @property
    def degree(self) -> int:
        ds = self.degrees()
        if not ds:
            return 0
        if len(ds) > 1:
            raise ValueError(f"inhomogeneous form with degrees {sorted(ds)}")
        return ds.pop()

    def homogeneous_part(self, n: int) -> "NCForm":
        return NCForm(self.group, {k: v for k, v in self.terms.items() if len(k[1]) == n})

    def coefficient(self, g0, gs=()) -> Scalar:
        return self.terms.get((g0, tuple(gs)), 0)

    def __eq__(self, other):
        if isinstance(other, NCForm):
            return self.terms == other.terms
        if other == 0:
            return not self.terms
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    # linear structure
    def __add__(self, other: "NCForm") -> "NCForm":
        out = dict(self.terms)
        add_into(out, other.terms)
        return NCForm(self.group, out)

    def __sub__(self, other: "NCForm") -> "NCForm":
        out = dict(self.terms)
        add_into(out, other.terms, -1)
        return NCForm(self.group, out)

    def __neg__(self) -> "NCForm":
        return NCForm(self.group, {k: -v for k, v in self.terms.items()})

    def scale(self, c: Scalar) -> "NCForm":
        if not c:
            return NCForm(self.group)
        return NCForm(self.group, {k: v * c for k, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, NCForm):
            return dga_product(self, other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    # algebra
    def d(self) -> "NCForm":
        return dga_differential(self)

    def total_products(self) -> set:
        return {key_product(self.group, k) for k in self.terms}

    def max_length(self) -> int:
        G = self.group
        m = 0
        for g0, gs in self.terms:
            m = max(m, G.length(g0), *(G.length(g) for g in gs))
        return m

    def map(self, hom) -> "NCForm":
        """Push forward along a group homomorphism (a DGA map)."""
        T = hom.target
        out: dict = {}
        for (g0, gs), c in self.terms.items():
            hs = tuple(hom(g) for g in gs)
            if any(h == T.identity for h in hs):
                continue
            k = (hom(g0), hs)
            add_into(out, {k: c})
        return NCForm(T, out)

    def to_json(self) -> list:
        G = self.group
        rows = []
        for (g0, gs), c in sorted(self.terms.items(), key=lambda kv: _key_sort(G, kv[0])):
            rows.append({"coef": to_pair(c), "g0": _elt_json(G, g0),
                         "dgs": [_elt_json(G, g) for g in gs]})
        return rows

    @classmethod
    def from_json(cls, G: GroupModel, rows: list) -> "NCForm":
        out: dict = {}
        for r in rows:
            c = parse_scalar(r.get("coef", "1"))
            g0 = G.parse(r.get("g0", "e")) if r.get("g0") is not None else G.identity
            gs = tuple(G.parse(x) for x in r.get("dgs", []))
            if any(g == G.identity for g in gs):
                continue
            add_into(out, {(g0, gs): c})
        return cls(G, out)

    def __repr__(self):
        G = self.group
        if not self.terms:
            return "0"
        parts = []
        for (g0, gs), c in sorted(self.terms.items(), key=lambda kv: _key_sort(G, kv[0])):
            body = G.format(g0) + "".join(" d" + G.format(g) for g in gs)
            parts.append(f"({c})*{body}")
        return " + ".join(parts)


def _key_sort(G: GroupModel, key: Key):
    return (len(key[1]), G.sort_key(key[0]), tuple(G.sort_key(g) for g in key[1]))


def _elt_json(G: GroupModel, g):
    if G.is_finite:
        return G.format(g)
    if G.kind == "free-abelian":
        return g[0] if len(g) == 1 else list(g)
    return G.format(g)


def dga_product(a: NCForm, b: NCForm) -> NCForm:
    if a.group is not b.group:
        from .errors import IncompatibleModels
        raise IncompatibleModels("forms over different group models")
    return NCForm(a.group, _mul_terms(a.group, a.terms, b.terms))


def dga_differential(w: NCForm) -> NCForm:
    G = w.group
    e = G.identity
    out = {}
    for (g0, gs), c in w.terms.items():
        if g0 == e:
            continue
        out[(e, (g0,) + gs)] = c
    return NCForm(G, out)


def graded_commutator(a: NCForm, b: NCForm) -> NCForm:
    """[a, b] = ab - (-1)^{|a||b|} ba for homogeneous a, b."""
    sign = -1 if (a.degree * b.degree) % 2 else 1
    return a * b - (b * a).scale(sign)


# ---------------------------------------------------------------------------
# localized / delocalized splitting


@dataclass(frozen=True)
class DelSplit:
    e_part: NCForm
    del_part: NCForm


def split_e_del(w: NCForm) -> DelSplit:
    G = w.group
    e_terms, d_terms = {}, {}
    for k, c in w.terms.items():
        (e_terms if key_product(G, k) == G.identity else d_terms)[k] = c
    return DelSplit(NCForm(G, e_terms), NCForm(G, d_terms))


def e_part(w: NCForm) -> NCForm:
    return split_e_del(w).e_part


def del_part(w: NCForm) -> NCForm:
    return split_e_del(w).del_part


def basis_change_pair(w_key: Key, G: GroupModel):
    """For a basis form w return (pi(w), pi(w)^-1 dw) with pi the total product."""
    lam = key_product(G, w_key)
    dw = dga_differential(NCForm(G, {w_key: 1}))
    return lam, NCForm.element(G, G.inv(lam)) * dw


# ---------------------------------------------------------------------------
# Hochschild boundary on forms (used for the commutator span)


def hochschild_b_key(G: GroupModel, key: Key) -> dict:
    """b(g0 dg1...dgn) via the identification of forms with normalized chains."""
    g0, gs = key
    e = G.identity
    n = len(gs)
    out: dict = {}
    if n == 0:
        return out
    seq = (g0,) + gs
    for i in range(n):
        merged = G.mul(seq[i], seq[i + 1])
        if i > 0 and merged == e:
            continue
        k = (merged, seq[2:]) if i == 0 else (g0, seq[1:i] + (merged,) + seq[i + 2:])
        add_into(out, {k: -1 if i % 2 else 1})
    k = (G.mul(seq[n], g0), seq[1:n])
    add_into(out, {k: -1 if n % 2 else 1})
    return out


def hochschild_b_form(w: NCForm) -> NCForm:
    out: dict = {}
    for k, c in w.terms.items():
        add_into(out, hochschild_b_key(w.group, k), c)
    return NCForm(w.group, out)


# ---------------------------------------------------------------------------
# abelianization


def class_tuples(G: GroupModel, n: int, members, R: int | None):
    """Normalized keys of degree n, entries in ball(R), total product in ``members``."""
    e = G.identity
    ball = G.ball(R)
    nonid = [g for g in ball if g != e]
    lim = None if G.is_finite else R
    mem = list(members)
    for gs in itertools.product(nonid, repeat=n):
        p = G.prod(gs)
        pinv = G.inv(p)
        for m in mem:
            g0 = G.mul(m, pinv)
            if lim is not None and G.length(g0) > lim:
                continue
            yield (g0, gs)


class CommutatorSpan:
    """Echelon basis of the graded commutators of degree n in one conjugacy class.

    The span is generated by b(beta) for beta of degree n+1 and d(b(gamma)) for
    gamma of degree n, with tuples drawn from ball(R); for finite groups this is
    the whole commutator subspace.
    """

    def __init__(self, G: GroupModel, n: int, cls_members: tuple, R: int | None):
        self.group = G
        self.degree = n
        self.R = R
        self.members = cls_members
        self.index: dict = {}
        self.keys: list = []
        self.echelon = Echelon()
        self._build()

    def _col(self, key) -> int:
        i = self.index.get(key)
        if i is None:
            i = len(self.keys)
            self.index[key] = i
            self.keys.append(key)
        return i

    def _vec(self, terms: dict) -> dict:
        return {self._col(k): c for k, c in terms.items()}

    def _build(self):
        G, n, R = self.group, self.degree, self.R
        e = G.identity
        # columns in a fixed order: all degree-n keys of the class
        for key in class_tuples(G, n, self.members, R):
            self._col(key)
        ech = self.echelon
        # rotation-type relations first (b of exact forms), then the rest
        higher = list(class_tuples(G, n + 1, self.members, R))
        higher.sort(key=lambda k: k[0] != e)
        for key in higher:
            t = hochschild_b_key(G, key)
            if t:
                ech.add(self._vec(t))
        if n >= 1:
            for key in class_tuples(G, n, self.members, R):
                bt = hochschild_b_key(G, key)
                dt = {}
                for (h0, hs), c in bt.items():
                    if h0 != e:
                        dt[(e, (h0,) + hs)] = dt.get((e, (h0,) + hs), 0) + c
                dt = {k: c for k, c in dt.items() if c}
                if dt:
                    ech.add(self._vec(dt))

    def reduce_terms(self, terms: dict) -> dict:
        idx = self.index
        vec = {}
        extra = {}
        for k, c in terms.items():
            i = idx.get(k)
            if i is None:
                extra[k] = c
            else:
                vec[i] = c
        r = self.echelon.reduce(vec)
        out = {self.keys[i]: c for i, c in r.items()}
        out.update(extra)
        return out


def kappa_key(G: GroupModel, key: Key) -> dict:
    """Karoubi operator on a basis form: (-1)^(n-1) dg_n * (g0 dg1 ... dg_{n-1})."""
    g0, gs = key
    n = len(gs)
    if n == 0:
        return {key: 1}
    e = G.identity
    s = -1 if (n - 1) % 2 else 1
    gn = gs[-1]
    out = {}
    m = G.mul(gn, g0)
    if m != e:
        out[(e, (m,) + gs[:-1])] = s
    if g0 != e:
        k = (gn, (g0,) + gs[:-1])
        out[k] = out.get(k, 0) - s
    return {k: c for k, c in out.items() if c}


def kappa_terms(G: GroupModel, terms: dict) -> dict:
    out: dict = {}
    for k, c in terms.items():
        add_into(out, kappa_key(G, k), c)
    return out


def trace_coordinates(G: GroupModel, terms: dict, n: int) -> dict:
    """N(b w) with N = 1 + kappa + ... + kappa^(n-1).

    For n above the rational homological dimension of the group this linear
    map has kernel exactly the graded commutators of degree n.
    """
    bw: dict = {}
    for k, c in terms.items():
        add_into(bw, hochschild_b_key(G, k), c)
    acc: dict = {}
    cur = bw
    for _ in range(n):
        add_into(acc, cur)
        cur = kappa_terms(G, cur)
    return acc


class Abelianizer:
    """Decides equality modulo graded commutators for one group model.

    Degree 0 reduces to conjugacy-class representatives.  Above the rational
    homological dimension the map :func:`trace_coordinates` is used; below it
    (infinite groups only) a truncated commutator span is built and cached per
    (degree, class, truncation).
    """

    def __init__(self, G: GroupModel):
        self.group = G
        self._spans: dict = {}
        self._lock = threading.Lock()
        self._class_of: dict = {}

    def class_members(self, g, R):
        key = (g, R)
        hit = self._class_of.get(key)
        if hit is None:
            cl = self.group.conjugacy_class(g, R if R is not None else 0)
            hit = cl.members
            for m in hit:
                self._class_of[(m, R)] = hit
        return hit

    def span(self, n: int, members: tuple, R) -> CommutatorSpan:
        key = (n, members, R)
        sp = self._spans.get(key)
        if sp is None:
            with self._lock:
                sp = self._spans.get(key)
                if sp is None:
                    sp = CommutatorSpan(self.group, n, members, R)
                    self._spans[key] = sp
        return sp

    def uses_span(self, n: int) -> bool:
        return 0 < n <= self.group.rational_cd

    def coordinates(self, w: NCForm, R: int | None = None) -> dict:
        """Canonical coordinates of ``w`` modulo graded commutators.

        Keys are tagged by (degree, method) so that different degrees never mix.
        """
        G = self.group
        by_deg: dict = {}
        for k, c in w.terms.items():
            by_deg.setdefault(len(k[1]), {})[k] = c
        out: dict = {}
        for n, terms in by_deg.items():
            if n == 0:
                for (g0, _), c in terms.items():
                    add_into(out, {(0, "class", G.class_canonical(g0)): c})
            elif not self.uses_span(n):
                for k, c in trace_coordinates(G, terms, n).items():
                    out[(n, "trace", k)] = c
            else:
                if R is None:
                    raise ValueError("this degree needs a truncation radius")
                for k in terms:
                    if G.length(k[0]) > R or any(G.length(g) > R for g in k[1]):
                        raise TruncationOverflow("form support leaves the truncation ball", k)
                groups: dict = {}
                for k, c in terms.items():
                    members = self.class_members(key_product(G, k), R)
                    groups.setdefault(members, {})[k] = c
                for members, part in groups.items():
                    red = self.span(n, members, R).reduce_terms(part)
                    for k, c in red.items():
                        out[(n, "span", k)] = c
        return out


_ABELIANIZERS: dict = {}
_AB_LOCK = threading.Lock()


def abelianizer_for(G: GroupModel) -> Abelianizer:
    with _AB_LOCK:
        ab = _ABELIANIZERS.get(id(G))
        if ab is None or ab.group is not G:
            ab = Abelianizer(G)
            _ABELIANIZERS[id(G)] = ab
        return ab


class AbelianizedForm:
    """Class of a form modulo graded commutators.

    ``coords`` is the canonical coordinate vector and decides equality;
    ``form`` is a representative.  Abelianizing a representative again gives
    the same coordinates, so reduction is idempotent.
    """

    __slots__ = ("form", "coords", "truncation")

    def __init__(self, form: NCForm, coords: dict, truncation: int | None):
        self.form = form
        self.coords = coords
        self.truncation = truncation

    @property
    def group(self):
        return self.form.group

    @property
    def degree(self) -> int:
        return self.form.degree

    def is_zero(self) -> bool:
        return not self.coords

    def __add__(self, other: "AbelianizedForm") -> "AbelianizedForm":
        return abelianize(self.form + other.form, self.truncation)

    def __sub__(self, other: "AbelianizedForm") -> "AbelianizedForm":
        return abelianize(self.form - other.form, self.truncation)

    def __neg__(self):
        return abelianize(-self.form, self.truncation)

    def scale(self, c) -> "AbelianizedForm":
        return abelianize(self.form.scale(c), self.truncation)

    def d(self) -> "AbelianizedForm":
        return abelianize(self.form.d(), self.truncation)

    def split(self) -> tuple:
        s = split_e_del(self.form)
        return abelianize(s.e_part, self.truncation), abelianize(s.del_part, self.truncation)

    def __eq__(self, other):
        if isinstance(other, AbelianizedForm):
            return self.coords == other.coords
        if other == 0:
            return not self.coords
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.coords.items()))

    def __repr__(self):
        return f"AbelianizedForm({self.form!r})"


def abelianize(w: NCForm, truncation: int | None = None) -> AbelianizedForm:
    G = w.group
    R = None if G.is_finite else truncation
    coords = abelianizer_for(G).coordinates(w, R)
    return AbelianizedForm(w, coords, R)


def is_commutator_sum(w: NCForm, truncation: int | None = None) -> bool:
    return abelianize(w, truncation).is_zero()
