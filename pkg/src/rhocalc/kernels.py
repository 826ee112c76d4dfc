"""Finite model of Γ-equivariant kernels on the covering F × Γ.

A point of the covering is a pair ``(f, mu)`` with ``f`` an index into the
fundamental domain and ``mu`` a group element; Γ acts on the right,
``(f, mu) * g = (f, mu g)``.  An equivariant kernel ``k`` is stored through
its Lott transform: the entry at ``(f1, f2)`` is the form whose component with
total product ``gamma`` is ``k((f1, gamma), (f2, e))``.  With form
coefficients this is an ``|F| x |F|`` matrix over the universal DGA, and
composition is matrix multiplication with the volume weights inserted,
``(K1 * K2)[f1, f3] = sum_f2 K1[f1, f2] w[f2] K2[f2, f3]``.

The Lott connection acts on sections as ``d + A`` where ``A`` is the diagonal
one-form ``A_f = sum_mu h(f, mu) mu d(mu^-1)``; its curvature
``dA + A^2`` expands to ``sum h(f, mu) h(f, nu) mu d(mu^-1 nu) d(nu^-1)``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .errors import IncompatibleModels, TruncationOverflow
from .forms import NCForm, abelianize, del_part, e_part, key_product
from .groups import GroupModel
from .scalars import Scalar, parse_scalar, simplify


@dataclass(frozen=True)
class CoveringModel:
    """Fundamental domain ``F = {0..n-1}`` with weights and a cutoff ``h``.

    ``cutoff[f]`` maps group elements ``mu`` to ``h(f, mu)``; for every ``f``
    the values sum to one, which is the partition-of-unity identity at every
    point of the orbit ``(f, *)``.
    """

    group: GroupModel
    F_size: int
    weights: tuple = ()
    radius: int | None = None
    cutoff: tuple = ()

    def __post_init__(self):
        G = self.group
        if self.F_size < 1:
            raise ValueError("fundamental domain must be nonempty")
        if not G.is_finite and self.radius is None:
            raise ValueError("infinite group needs a working radius")
        w = self.weights or tuple(Fraction(1) for _ in range(self.F_size))
        w = tuple(Fraction(x) for x in w)
        if len(w) != self.F_size or any(x <= 0 for x in w):
            raise ValueError("weights must be positive, one per point of F")
        object.__setattr__(self, "weights", w)
        h = self.cutoff or tuple({G.identity: Fraction(1)} for _ in range(self.F_size))
        h = tuple({g: simplify(parse_scalar(v)) for g, v in hf.items() if v} for hf in h)
        if len(h) != self.F_size:
            raise ValueError("one cutoff row per point of F")
        for f, hf in enumerate(h):
            if sum(hf.values()) != 1:
                raise ValueError(f"cutoff at F-point {f} does not sum to 1")
            for g in hf:
                self.check_element(g)
        object.__setattr__(self, "cutoff", h)

    # -- helpers ---------------------------------------------------------
    def check_element(self, g) -> None:
        if self.radius is not None and not self.group.is_finite and self.group.length(g) > self.radius:
            raise TruncationOverflow(f"element {self.group.format(g)} leaves the working ball", g)

    def check_form(self, w: NCForm) -> None:
        if self.radius is None or self.group.is_finite:
            return
        for g0, gs in w.terms:
            self.check_element(g0)
            for g in gs:
                self.check_element(g)

    def h(self, f: int, mu) -> Scalar:
        return self.cutoff[f].get(mu, 0)

    def elements(self) -> list:
        G = self.group
        return G.ball() if G.is_finite else G.ball(self.radius)

    def points(self) -> list:
        return [(f, mu) for f in range(self.F_size) for mu in self.elements()]

    def with_cutoff(self, cutoff: Sequence[dict]) -> "CoveringModel":
        return CoveringModel(self.group, self.F_size, self.weights, self.radius, tuple(cutoff))

    def two_translate_cutoff(self, rng: random.Random, max_len: int = 1) -> "CoveringModel":
        """A random rational cutoff supported on ``e`` and one other translate per F-point."""
        G = self.group
        pool = [g for g in self.elements() if g != G.identity and G.length(g) <= max_len]
        rows = []
        for _ in range(self.F_size):
            g = rng.choice(pool)
            a = Fraction(rng.randint(1, 5), rng.randint(2, 6))
            rows.append({G.identity: 1 - a, g: a})
        return self.with_cutoff(rows)

    def relabel(self, shifts: Sequence) -> "CoveringModel":
        """Fundamental domain ``{(f, shifts[f])}``; the cutoff is transported along."""
        G = self.group
        rows = []
        for f, s in enumerate(shifts):
            si = G.inv(s)
            rows.append({G.mul(si, mu): v for mu, v in self.cutoff[f].items()})
        return self.with_cutoff(rows)

    # -- canonical kernels -------------------------------------------------
    def identity(self) -> "EqKernel":
        G = self.group
        return EqKernel(self, {(f, f): NCForm.element(G, G.identity, 1 / w)
                               for f, w in enumerate(self.weights)}, 0)

    def connection_form(self) -> "EqKernel":
        """Kernel of the multiplication operator ``A`` with ``nabla = d + A``."""
        G = self.group
        ents = {}
        for f, hf in enumerate(self.cutoff):
            a = NCForm.zero(G)
            for mu, c in hf.items():
                a = a + NCForm.basis(G, mu, (G.inv(mu),), c)
            if a:
                ents[(f, f)] = a.scale(1 / self.weights[f])
        return EqKernel(self, ents, 1)

    def curvature(self) -> "EqKernel":
        return curvature(self)

    def to_json(self) -> dict:
        G = self.group
        return {"F_size": self.F_size, "weights": [str(w) for w in self.weights],
                "radius": self.radius,
                "cutoff": [{G.format(g): str(v) for g, v in hf.items()} for hf in self.cutoff]}

    @classmethod
    def from_json(cls, G: GroupModel, spec: dict) -> "CoveringModel":
        n = int(spec["F_size"])
        w = tuple(Fraction(str(x)) for x in spec.get("weights", [1] * n))
        cut = spec.get("cutoff")
        rows = tuple({G.parse(k): parse_scalar(v) for k, v in r.items()} for r in cut) if cut else ()
        return cls(G, n, w, spec.get("radius"), rows)


class EqKernel:
    """An equivariant kernel with coefficients in forms of one degree.

    ``entries[(f1, f2)]`` is an :class:`NCForm`; ``grading`` optionally assigns
    a parity to each F-point for supertraces.
    """

    __slots__ = ("model", "entries", "degree", "grading")

    def __init__(self, model: CoveringModel, entries: dict | None = None, degree: int = 0,
                 grading: tuple | None = None):
        self.model = model
        self.entries = {k: v for k, v in (entries or {}).items() if v}
        self.degree = degree
        self.grading = grading
        for w in self.entries.values():
            if w.degree != degree:
                raise ValueError(f"entry of degree {w.degree} in a degree-{degree} kernel")
            model.check_form(w)

    # constructors -----------------------------------------------------------
    @classmethod
    def zero(cls, model: CoveringModel, degree: int = 0, grading=None) -> "EqKernel":
        return cls(model, {}, degree, grading)

    @classmethod
    def from_group_ring(cls, model: CoveringModel, rows: Sequence[Sequence], grading=None) -> "EqKernel":
        """Degree-0 kernel from a matrix of ``{g: coef}`` dicts or scalars."""
        G = model.group
        ents = {}
        for i, row in enumerate(rows):
            for j, a in enumerate(row):
                if isinstance(a, NCForm):
                    w = a
                elif isinstance(a, dict):
                    w = NCForm.from_group_ring(G, a)
                else:
                    w = NCForm.element(G, G.identity, a)
                if w:
                    ents[(i, j)] = w
        return cls(model, ents, 0, grading)

    @classmethod
    def translation(cls, model: CoveringModel, g, coef: Scalar = 1) -> "EqKernel":
        """The kernel ``(f, f) -> g / w_f``, i.e. right translation of sections by ``g``."""
        G = model.group
        return cls(model, {(f, f): NCForm.element(G, g, coef / w) for f, w in enumerate(model.weights)}, 0)

    @classmethod
    def diagonal(cls, model: CoveringModel, values: Sequence[Scalar], grading=None) -> "EqKernel":
        """Multiplication operator by a function on F, constant along fibres."""
        G = model.group
        return cls(model, {(f, f): NCForm.element(G, G.identity, simplify(v / w))
                           for f, (v, w) in enumerate(zip(values, model.weights))}, 0, grading)

    # structure ----------------------------------------------------------------
    @property
    def group(self) -> GroupModel:
        return self.model.group

    def _same(self, other: "EqKernel") -> None:
        if other.model != self.model:
            raise IncompatibleModels("kernels on different covering models")

    def _grading(self, other: "EqKernel"):
        return self.grading if self.grading is not None else other.grading

    def is_zero(self) -> bool:
        return not self.entries

    def __eq__(self, other):
        if isinstance(other, EqKernel):
            return self.model == other.model and self.entries == other.entries and \
                (self.degree == other.degree or not self.entries)
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.entries.items()))

    def entry(self, f1: int, f2: int) -> NCForm:
        return self.entries.get((f1, f2), NCForm.zero(self.group))

    def slot(self, gamma) -> dict:
        """The ``gamma``-component: ``(f1, f2) -> form`` with total product ``gamma``."""
        G = self.group
        out = {}
        for k, w in self.entries.items():
            part = NCForm(G, {t: c for t, c in w.terms.items() if key_product(G, t) == gamma})
            if part:
                out[k] = part
        return out

    def support(self) -> set:
        """Group elements ``gamma`` with a nonzero slot."""
        G = self.group
        return {key_product(G, t) for w in self.entries.values() for t in w.terms}

    def map_entries(self, fn, degree: int | None = None) -> "EqKernel":
        ents = {k: fn(w) for k, w in self.entries.items()}
        return EqKernel(self.model, ents, self.degree if degree is None else degree, self.grading)

    def e_part(self) -> "EqKernel":
        return self.map_entries(e_part)

    def del_part(self) -> "EqKernel":
        return self.map_entries(del_part)

    # linear structure -------------------------------------------------------
    def __add__(self, other: "EqKernel") -> "EqKernel":
        self._same(other)
        if self.entries and other.entries and self.degree != other.degree:
            raise ValueError("sum of kernels of different degrees")
        deg = self.degree if self.entries else other.degree
        ents = dict(self.entries)
        for k, w in other.entries.items():
            ents[k] = ents[k] + w if k in ents else w
        return EqKernel(self.model, ents, deg, self._grading(other))

    def __neg__(self) -> "EqKernel":
        return self.map_entries(lambda w: -w)

    def __sub__(self, other: "EqKernel") -> "EqKernel":
        return self + (-other)

    def scale(self, c: Scalar) -> "EqKernel":
        return self.map_entries(lambda w: w.scale(c))

    def __mul__(self, other):
        if isinstance(other, EqKernel):
            return convolve(self, other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def d(self) -> "EqKernel":
        """Entrywise universal differential (the flat part of the connection)."""
        return self.map_entries(lambda w: w.d(), self.degree + 1)

    def conjugate_by_elements(self, shifts: Sequence) -> "EqKernel":
        """``T'[f1, f2] = s_f1^-1 T[f1, f2] s_f2``: the same operator in relabelled coordinates."""
        G = self.group
        model = self.model.relabel(shifts)
        ents = {}
        for (a, b), w in self.entries.items():
            left = NCForm.element(G, G.inv(shifts[a]))
            right = NCForm.element(G, shifts[b])
            ents[(a, b)] = left * w * right
        return EqKernel(model, ents, self.degree, self.grading)

    def to_json(self) -> dict:
        rows = []
        for (a, b) in sorted(self.entries):
            w = self.entries[(a, b)]
            rows.append({"f1": a, "f2": b, "form": w.to_json()})
        out = {"degree": self.degree, "entries": rows}
        if self.grading is not None:
            out["grading"] = list(self.grading)
        return out

    @classmethod
    def from_json(cls, model: CoveringModel, spec: dict) -> "EqKernel":
        """Entries ``{"gamma", "f1", "f2", "form"}``; the stored form is ``gamma * form``."""
        G = model.group
        ents: dict = {}
        deg = spec.get("degree")
        for r in spec.get("entries", []):
            w = NCForm.from_json(G, r.get("form", [{"coef": "1"}]))
            if "gamma" in r:
                w = NCForm.element(G, G.parse(r["gamma"])) * w
            k = (int(r["f1"]), int(r["f2"]))
            ents[k] = ents[k] + w if k in ents else w
        if deg is None:
            degs = {w.degree for w in ents.values() if w}
            deg = degs.pop() if degs else 0
        grading = tuple(spec["grading"]) if spec.get("grading") is not None else None
        return cls(model, ents, deg, grading)

    def __repr__(self):
        return f"EqKernel(deg={self.degree}, {self.entries!r})"


def convolve(k1: EqKernel, k2: EqKernel) -> EqKernel:
    """Twisted convolution; the integral over ``F`` is the weighted sum."""
    k1._same(k2)
    model = k1.model
    rows: dict = {}
    for (a, b), w in k1.entries.items():
        rows.setdefault(b, []).append((a, w))
    ents: dict = {}
    for (b, c), v in k2.entries.items():
        for a, w in rows.get(b, ()):
            term = (w * v).scale(model.weights[b])
            key = (a, c)
            ents[key] = ents[key] + term if key in ents else term
    return EqKernel(model, ents, k1.degree + k2.degree, k1._grading(k2))


def graded_commutator(a: EqKernel, b: EqKernel) -> EqKernel:
    s = -1 if (a.degree * b.degree) % 2 else 1
    return a * b - (b * a).scale(s)


def lott_connection(T: EqKernel) -> EqKernel:
    """``[nabla, T] = dT + A T - (-1)^deg T A``."""
    A = T.model.connection_form()
    s = -1 if T.degree % 2 else 1
    return T.d() + A * T - (T * A).scale(s)


def curvature(model: CoveringModel) -> EqKernel:
    """``Theta = sum h(f, mu) h(f, nu) mu d(mu^-1 nu) d(nu^-1)``, diagonal in F."""
    G = model.group
    e = G.identity
    ents = {}
    for f, hf in enumerate(model.cutoff):
        terms: dict = {}
        for mu, a in hf.items():
            for nu, b in hf.items():
                g1, g2 = G.mul(G.inv(mu), nu), G.inv(nu)
                if g1 == e or g2 == e:
                    continue
                k = (mu, (g1, g2))
                terms[k] = terms.get(k, 0) + a * b
        w = NCForm(G, terms)
        if w:
            ents[(f, f)] = w.scale(1 / model.weights[f])
    return EqKernel(model, ents, 2)


def _trace(T: EqKernel, graded: bool) -> NCForm:
    G = T.group
    out = NCForm.zero(G)
    for f, w in enumerate(T.model.weights):
        v = T.entries.get((f, f))
        if v is None:
            continue
        s = w
        if graded:
            if T.grading is None:
                raise ValueError("supertrace of an ungraded kernel")
            s = -w if T.grading[f] % 2 else w
        out = out + v.scale(s)
    return out


def tr_lott(T: EqKernel) -> NCForm:
    return _trace(T, False)


def tr_del(T: EqKernel) -> NCForm:
    return del_part(_trace(T, False))


def str_lott(T: EqKernel) -> NCForm:
    return _trace(T, True)


def str_del(T: EqKernel) -> NCForm:
    return del_part(_trace(T, True))


# ---------------------------------------------------------------------------
# the X-extended algebra


@dataclass(frozen=True)
class XForm:
    """``T11 + T12 X + X T21 + X T22 X`` of total degree ``degree``."""

    model: CoveringModel
    degree: int
    T11: EqKernel
    T12: EqKernel
    T21: EqKernel
    T22: EqKernel

    @classmethod
    def of(cls, T: EqKernel) -> "XForm":
        m, n = T.model, T.degree
        return cls(m, n, T, EqKernel.zero(m, n - 1), EqKernel.zero(m, n - 1), EqKernel.zero(m, n - 2))

    @classmethod
    def build(cls, model: CoveringModel, degree: int, T11=None, T12=None, T21=None, T22=None) -> "XForm":
        z = EqKernel.zero
        return cls(model, degree,
                   T11 if T11 is not None else z(model, degree),
                   T12 if T12 is not None else z(model, degree - 1),
                   T21 if T21 is not None else z(model, degree - 1),
                   T22 if T22 is not None else z(model, degree - 2))

    def parts(self) -> tuple:
        return self.T11, self.T12, self.T21, self.T22

    def __add__(self, o: "XForm") -> "XForm":
        return XForm(self.model, self.degree, *(a + b for a, b in zip(self.parts(), o.parts())))

    def __sub__(self, o: "XForm") -> "XForm":
        return XForm(self.model, self.degree, *(a - b for a, b in zip(self.parts(), o.parts())))

    def scale(self, c: Scalar) -> "XForm":
        return XForm(self.model, self.degree, *(a.scale(c) for a in self.parts()))

    def is_zero(self) -> bool:
        return all(p.is_zero() for p in self.parts())

    def __eq__(self, o):
        if not isinstance(o, XForm):
            return NotImplemented
        return all(a == b for a, b in zip(self.parts(), o.parts()))

    def __hash__(self):
        return hash(tuple(hash(p) for p in self.parts()))

    def __mul__(self, o: "XForm") -> "XForm":
        """Uses ``X^2 = Theta`` and ``T1 X T2 = 0``."""
        Th = curvature(self.model)
        a11, a12, a21, a22 = self.parts()
        b11, b12, b21, b22 = o.parts()
        return XForm(self.model, self.degree + o.degree,
                     a11 * b11 + a12 * Th * b21,
                     a11 * b12 + a12 * Th * b22,
                     a21 * b11 + a22 * Th * b21,
                     a21 * b12 + a22 * Th * b22)

    def d(self) -> "XForm":
        """``dX = 0`` and ``dT = [nabla, T] + X T + (-1)^deg T X``, extended by Leibniz."""
        Th = curvature(self.model)
        n = self.degree
        sn = -1 if n % 2 else 1
        T11, T12, T21, T22 = self.parts()
        nab = lott_connection
        return XForm(self.model, n + 1,
                     nab(T11) - (T12 * Th).scale(sn) - Th * T21,
                     T11.scale(sn) + nab(T12) - Th * T22,
                     T11 - nab(T21) - (T22 * Th).scale(sn),
                     T12 + T21.scale(sn) - nab(T22))


def x_extended_trace(W: XForm, graded: bool = False) -> NCForm:
    """``TR^del(T11) - (-1)^deg(T22) TR^del(T22 Theta)``."""
    Th = curvature(W.model)
    tr = str_del if graded else tr_del
    s = -1 if (W.degree - 2) % 2 else 1
    return tr(W.T11) - tr(W.T22 * Th).scale(s)


# ---------------------------------------------------------------------------
# random instances


def random_form(G: GroupModel, rng: random.Random, degree: int, pool: Sequence,
                terms: int = 2, coef: int = 3) -> NCForm:
    e = G.identity
    nz = [g for g in pool if g != e]
    out: dict = {}
    for _ in range(terms):
        g0 = rng.choice(pool)
        gs = tuple(rng.choice(nz) for _ in range(degree))
        c = rng.randint(-coef, coef)
        if c:
            out[(g0, gs)] = out.get((g0, gs), 0) + c
    return NCForm(G, out)


def random_kernel(model: CoveringModel, rng: random.Random, degree: int = 0,
                  density: float = 0.6, terms: int = 2, max_len: int = 1,
                  grading=None) -> EqKernel:
    """Random kernel whose forms only involve elements of length <= ``max_len``."""
    G = model.group
    pool = [g for g in model.elements() if G.length(g) <= max_len]
    ents = {}
    for a in range(model.F_size):
        for b in range(model.F_size):
            if rng.random() < density:
                w = random_form(G, rng, degree, pool, terms)
                if w:
                    ents[(a, b)] = w
    return EqKernel(model, ents, degree, grading)


def random_xform(model: CoveringModel, rng: random.Random, degree: int, **kw) -> XForm:
    parts = []
    for shift in (0, 1, 1, 2):
        dd = degree - shift
        parts.append(random_kernel(model, rng, dd, **kw) if dd >= 0 else EqKernel.zero(model, dd))
    return XForm(model, degree, *parts)


def trace_equal(a: NCForm, b: NCForm, truncation: int | None = None) -> bool:
    """Equality in the abelianization (modulo graded commutators)."""
    return abelianize(a - b, truncation).is_zero()


@dataclass
class IdentityReport:
    name: str
    checked: int = 0
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def kernel_identities(model: CoveringModel, rng: random.Random, trials: int = 50,
                      max_degree: int = 2, max_len: int = 1) -> list:
    """Run the five kernel identities on ``trials`` random kernels.

    Returns one :class:`IdentityReport` per identity.  Degrees are chosen so
    that every product stays inside the working ball.
    """
    R = model.radius
    names = ["trace property", "d TR^del = TR^del [nabla, .]", "Bianchi [nabla, Theta] = 0",
             "nabla^2 T = Theta T - T Theta", "cutoff independence of TR^del"]
    reps = [IdentityReport(n) for n in names]
    alt = model.two_translate_cutoff(rng, max_len=1)
    Th = curvature(model)
    bianchi = lott_connection(Th)
    reps[2].checked += 1
    if not bianchi.is_zero():
        reps[2].failures.append(("Theta", bianchi))
    for t in range(trials):
        da, db = rng.randint(0, max_degree), rng.randint(0, max_degree)
        A = random_kernel(model, rng, da, max_len=max_len)
        B = random_kernel(model, rng, db, max_len=max_len)
        reps[0].checked += 1
        if not abelianize(tr_del(graded_commutator(A, B)), R).is_zero():
            reps[0].failures.append((t, A, B))
        reps[1].checked += 1
        if not trace_equal(tr_del(A).d(), tr_del(lott_connection(A)), R):
            reps[1].failures.append((t, A))
        reps[3].checked += 1
        if lott_connection(lott_connection(A)) != Th * A - A * Th:
            reps[3].failures.append((t, A))
        reps[4].checked += 1
        A_alt = EqKernel(alt, A.entries, A.degree)
        if not trace_equal(tr_del(lott_connection(A)), tr_del(lott_connection(A_alt)), R):
            reps[4].failures.append((t, A, "cutoff"))
        shifts = [rng.choice([g for g in model.elements() if model.group.length(g) <= 1])
                  for _ in range(model.F_size)]
        if model.group.is_finite or max_len + 2 <= (R or 0):
            A_rel = A.conjugate_by_elements(shifts)
            if not trace_equal(tr_del(A_rel), tr_del(A), R):
                reps[4].failures.append((t, A, "relabel", shifts))
    return reps
