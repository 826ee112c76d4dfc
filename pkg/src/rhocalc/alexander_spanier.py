"""Γ-invariant Alexander-Spanier cochains on the discrete covering ``F x Γ``.

Points are pairs ``(f, mu)`` and Γ acts on the right.  An invariant cochain
is determined by its values on anchored tuples, those whose first point has
``mu = e``; every evaluation translates its argument to the anchor first, so
invariance holds by construction.
"""

from __future__ import annotations

import itertools
import math
import random
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .errors import DegreeMismatch, IdentityFailure
from .kernels import CoveringModel, EqKernel, convolve
from .scalars import Scalar, imag_part, parse_scalar, real_part, render, simplify

Point = tuple  # (f, mu)


class NeighborhoodRelation:
    """A symmetric, reflexive, Γ-invariant relation on covering points.

    It is described by a predicate on ``(f1, f2, mu1 mu2^-1)``, which is what
    makes it invariant.  The default relates points over the same ``f`` whose
    displacement has word length at most one.
    """

    def __init__(self, model: CoveringModel, pred: Callable | None = None, name: str = "default"):
        self.model = model
        self.name = name
        G = model.group
        if pred is None:
            pred = lambda f1, f2, g: f1 == f2 and G.length(g) <= 1
        self._pred = pred

    @classmethod
    def everything(cls, model: CoveringModel) -> "NeighborhoodRelation":
        return cls(model, lambda f1, f2, g: True, "all")

    @classmethod
    def diagonal(cls, model: CoveringModel) -> "NeighborhoodRelation":
        e = model.group.identity
        return cls(model, lambda f1, f2, g: f1 == f2 and g == e, "diagonal")

    def related(self, x: Point, y: Point) -> bool:
        G = self.model.group
        return bool(self._pred(x[0], y[0], G.mul(x[1], G.inv(y[1]))))

    def all_related(self, t: Sequence[Point]) -> bool:
        return all(self.related(a, b) for a, b in itertools.combinations(t, 2))

    def check(self) -> bool:
        """Reflexivity and symmetry on the model's points."""
        pts = self.model.points()
        for x in pts:
            if not self.related(x, x):
                return False
            for y in pts:
                if self.related(x, y) != self.related(y, x):
                    return False
        return True


def anchor(G, t: Sequence[Point]) -> tuple:
    """Translate ``t`` so that its first point lies over ``e``."""
    s = G.inv(t[0][1])
    return tuple((f, G.mul(mu, s)) for f, mu in t)


def anchored_tuples(model: CoveringModel, n: int) -> list:
    """All anchored ``n``-tuples of points (finite models only)."""
    if not model.group.is_finite:
        raise ValueError("exhaustive enumeration needs a finite group")
    e = model.group.identity
    pts = model.points()
    out = []
    for f0 in range(model.F_size):
        for rest in itertools.product(pts, repeat=n - 1):
            out.append(((f0, e),) + rest)
    return out


class ASCochain:
    """A degree-``q`` invariant cochain given by an evaluator on anchored tuples."""

    def __init__(self, model: CoveringModel, degree: int, evaluator: Callable[[tuple], Scalar],
                 antisymmetric: bool = False, relation: NeighborhoodRelation | None = None,
                 name: str = "phi"):
        if degree < 0:
            raise DegreeMismatch("cochain degree must be nonnegative")
        self.model = model
        self.degree = degree
        self._ev = evaluator
        self.antisymmetric = antisymmetric
        self.relation = relation
        self.name = name
        self._memo: dict = {}

    def __call__(self, t: Sequence[Point]) -> Scalar:
        if len(t) != self.degree + 1:
            raise DegreeMismatch(f"{self.name} takes {self.degree + 1} points, got {len(t)}")
        a = anchor(self.model.group, t)
        v = self._memo.get(a)
        if v is None:
            v = simplify(self._ev(a))
            self._memo[a] = v
        return v

    @property
    def locally_zero(self) -> bool:
        return self.relation is not None

    # constructors
    @classmethod
    def zero(cls, model: CoveringModel, degree: int) -> "ASCochain":
        return cls(model, degree, lambda t: 0, True, NeighborhoodRelation.everything(model), "0")

    @classmethod
    def constant(cls, model: CoveringModel, degree: int, c: Scalar) -> "ASCochain":
        return cls(model, degree, lambda t: c, name=f"const {render(c)}")

    @classmethod
    def from_table(cls, model: CoveringModel, degree: int, table: dict, **kw) -> "ASCochain":
        """Dense or sparse table keyed by anchored tuples; missing entries are zero."""
        G = model.group
        tab = {anchor(G, k): v for k, v in table.items()}
        return cls(model, degree, lambda t: tab.get(t, 0), **kw)

    @classmethod
    def pullback_from_base(cls, model: CoveringModel, degree: int, psi: Callable) -> "ASCochain":
        """``phi(x) = psi(mu_0, ..., mu_q)``: a cochain that only sees group labels.

        ``psi`` should be invariant under right translation; it is evaluated on
        labels anchored at ``e``.
        """
        return cls(model, degree, lambda t: psi(tuple(mu for _, mu in t)), name="pullback")

    @classmethod
    def coboundary_of(cls, fn: Callable[[Point], Scalar], model: CoveringModel) -> "ASCochain":
        """``phi(x0, x1) = fn(x1) - fn(x0)`` for an invariant function ``fn``."""
        return cls(model, 1, lambda t: fn(t[1]) - fn(t[0]), name="exact")

    # linear structure
    def __add__(self, o: "ASCochain") -> "ASCochain":
        self._same(o)
        rel = self.relation if self.relation is o.relation else None
        return ASCochain(self.model, self.degree, lambda t: self(t) + o(t),
                         self.antisymmetric and o.antisymmetric, rel, f"({self.name}+{o.name})")

    def __sub__(self, o: "ASCochain") -> "ASCochain":
        return self + o.scale(-1)

    def scale(self, c: Scalar) -> "ASCochain":
        return ASCochain(self.model, self.degree, lambda t: c * self(t),
                         self.antisymmetric, self.relation, f"{render(c)}*{self.name}")

    def _same(self, o: "ASCochain") -> None:
        if o.model is not self.model or o.degree != self.degree:
            raise DegreeMismatch("cochains live on different models or degrees")

    # checks
    def table(self) -> dict:
        return {t: self(t) for t in anchored_tuples(self.model, self.degree + 1)}

    def equals(self, o: "ASCochain") -> bool:
        self._same(o)
        return all(self(t) == o(t) for t in anchored_tuples(self.model, self.degree + 1))

    def is_zero(self) -> bool:
        return all(not self(t) for t in anchored_tuples(self.model, self.degree + 1))

    def check_antisymmetric(self, samples: Iterable | None = None) -> bool:
        tuples = samples if samples is not None else anchored_tuples(self.model, self.degree + 1)
        for t in tuples:
            v = self(t)
            for perm in itertools.permutations(range(self.degree + 1)):
                if self(tuple(t[i] for i in perm)) != _perm_sign(perm) * v:
                    return False
        return True

    def check_locally_zero(self, relation: NeighborhoodRelation | None = None) -> bool:
        rel = relation or self.relation
        if rel is None:
            return False
        return all(not self(t) for t in anchored_tuples(self.model, self.degree + 1)
                   if rel.all_related(t))


def _perm_sign(perm: Sequence[int]) -> int:
    s = 1
    p = list(perm)
    for i in range(len(p)):
        while p[i] != i:
            j = p[i]
            p[i], p[j] = p[j], p[i]
            s = -s
    return s


def as_delta(phi: ASCochain) -> ASCochain:
    q = phi.degree

    def ev(t):
        return sum((-1) ** i * phi(t[:i] + t[i + 1:]) for i in range(q + 2))

    return ASCochain(phi.model, q + 1, ev, phi.antisymmetric, phi.relation, f"d{phi.name}")


def retraction(model: CoveringModel, z: int = 0) -> Callable[[Point], Point]:
    """``r(f, mu) = (z, mu)``: collapse every fibre onto the orbit of ``(z, e)``."""
    if not 0 <= z < model.F_size:
        raise ValueError(f"basepoint {z} is not a point of F")
    return lambda x: (z, x[1])


def pullback_r(phi: ASCochain, z: int = 0) -> ASCochain:
    r = retraction(phi.model, z)
    return ASCochain(phi.model, phi.degree, lambda t: phi(tuple(r(x) for x in t)),
                     phi.antisymmetric, None, f"r*{phi.name}")


def homotopy_K(phi: ASCochain, z: int = 0) -> ASCochain:
    """``K(phi)(x_0..x_{k-1}) = sum_j (-1)^(j+1) phi(r x_0, .., r x_j, x_j, .., x_{k-1})``.

    Together with :func:`as_delta` this satisfies ``dK + Kd = r* - id``.
    """
    k = phi.degree
    r = retraction(phi.model, z)
    if k == 0:
        return ASCochain.zero(phi.model, 0)

    def ev(t):
        rt = tuple(r(x) for x in t)
        return sum((-1) ** (j + 1) * phi(rt[:j + 1] + t[j:]) for j in range(k))

    return ASCochain(phi.model, k - 1, ev, name=f"K{phi.name}")


def antisymmetrize(phi: ASCochain) -> ASCochain:
    q = phi.degree
    perms = [(p, _perm_sign(p)) for p in itertools.permutations(range(q + 1))]
    norm = Fraction(1, math.factorial(q + 1))

    def ev(t):
        return norm * sum(s * phi(tuple(t[i] for i in p)) for p, s in perms)

    return ASCochain(phi.model, q, ev, True, phi.relation, f"alt {phi.name}")


def random_cochain(model: CoveringModel, degree: int, rng: random.Random, density: float = 0.5,
                   relation: NeighborhoodRelation | None = None, antisymmetric: bool = False) -> ASCochain:
    """Random rational table on anchored tuples; zero near the diagonal when ``relation`` is given."""
    tab = {}
    for t in anchored_tuples(model, degree + 1):
        if relation is not None and relation.all_related(t):
            continue
        if rng.random() < density:
            tab[t] = Fraction(rng.randint(-4, 4), rng.randint(1, 3))
    phi = ASCochain.from_table(model, degree, tab, relation=relation, name="rand")
    return antisymmetrize(phi) if antisymmetric else phi


# ---------------------------------------------------------------------------
# matrices on full finite complexes
# ---------------------------------------------------------------------------

def _compose(A: dict, B: dict) -> dict:
    out = {}
    for r, row in A.items():
        acc: dict = {}
        for c, a in row.items():
            for c2, b in B.get(c, {}).items():
                acc[c2] = acc.get(c2, 0) + a * b
        out[r] = {c: v for c, v in acc.items() if v}
    return out


def _combine(*terms) -> dict:
    out: dict = {}
    for sign, M in terms:
        for r, row in M.items():
            acc = out.setdefault(r, {})
            for c, v in row.items():
                acc[c] = acc.get(c, 0) + sign * v
    return {r: {c: v for c, v in row.items() if v} for r, row in out.items()}


def delta_matrix(model: CoveringModel, q: int) -> dict:
    """Rows: anchored ``(q+2)``-tuples; columns: anchored ``(q+1)``-tuples."""
    G = model.group
    M = {}
    for t in anchored_tuples(model, q + 2):
        row: dict = {}
        for i in range(q + 2):
            c = anchor(G, t[:i] + t[i + 1:])
            row[c] = row.get(c, 0) + (-1) ** i
        M[t] = row
    return M


def homotopy_matrix(model: CoveringModel, k: int, z: int = 0) -> dict:
    """Matrix of ``K`` from degree ``k`` to degree ``k - 1``."""
    G = model.group
    r = retraction(model, z)
    M = {}
    if k == 0:
        return M
    for t in anchored_tuples(model, k):
        rt = tuple(r(x) for x in t)
        row: dict = {}
        for j in range(k):
            c = anchor(G, rt[:j + 1] + t[j:])
            row[c] = row.get(c, 0) + (-1) ** (j + 1)
        M[t] = row
    return M


def pullback_matrix(model: CoveringModel, q: int, z: int = 0) -> dict:
    G = model.group
    r = retraction(model, z)
    M = {}
    for t in anchored_tuples(model, q + 1):
        c = anchor(G, tuple(r(x) for x in t))
        M[t] = {c: 1}
    return M


def identity_matrix(model: CoveringModel, q: int) -> dict:
    return {t: {t: 1} for t in anchored_tuples(model, q + 1)}


def check_as_homotopy(model: CoveringModel, D: int, z: int = 0) -> dict:
    """Verify ``dK + Kd = r* - id`` and ``dd = 0`` as matrices in degrees ``0..D``.

    Returns ``{degree: None}`` on success or a failing row (an anchored tuple).
    """
    report = {}
    for q in range(D + 1):
        dq = delta_matrix(model, q)
        Kq1 = homotopy_matrix(model, q + 1, z)
        lhs = _compose(Kq1, dq)
        if q > 0:
            lhs = _combine((1, lhs), (1, _compose(delta_matrix(model, q - 1), homotopy_matrix(model, q, z))))
        rhs = _combine((1, pullback_matrix(model, q, z)), (-1, identity_matrix(model, q)))
        diff = _combine((1, lhs), (-1, rhs))
        bad = next((r for r, row in diff.items() if row), None)
        if bad is None and q + 1 <= D:
            dd = _compose(delta_matrix(model, q + 1), dq)
            bad = next((r for r, row in dd.items() if row), None)
        report[q] = bad
    return report


def check_homotopy_on(phi: ASCochain, z: int = 0) -> tuple | None:
    """First anchored tuple where ``(dK + Kd) phi != r* phi - phi``, else None."""
    lhs = as_delta(homotopy_K(phi, z)) if phi.degree > 0 else None
    kd = homotopy_K(as_delta(phi), z)
    rphi = pullback_r(phi, z)
    for t in anchored_tuples(phi.model, phi.degree + 1):
        v = kd(t) + (lhs(t) if lhs is not None else 0)
        if v != rphi(t) - phi(t):
            return t
    return None


# ---------------------------------------------------------------------------
# the cyclic cocycle of a locally zero cochain
# ---------------------------------------------------------------------------

def tau_chi(chi: ASCochain, kernels: Sequence[EqKernel]) -> Scalar:
    """``sum_F w Tr(sum A_0(x_0, x_1) ... A_k(x_k, x_0) chi(x_0, ..., x_k))``.

    ``x_0`` runs over the fundamental domain ``(f, e)`` and ``x_1..x_k`` over
    the covering; only the support of the kernels is visited.
    """
    k = chi.degree
    if len(kernels) != k + 1:
        raise DegreeMismatch(f"a degree-{k} cochain pairs with {k + 1} kernels, got {len(kernels)}")
    model = chi.model
    G = model.group
    for A in kernels:
        if A.degree != 0:
            raise DegreeMismatch("tau_chi takes kernels of form degree 0")
        if A.model.group is not G or A.model.F_size != model.F_size:
            raise DegreeMismatch("kernels and cochain live on different models")
    rows = []
    for A in kernels:
        by_row: dict = {}
        for (a, b), w in A.entries.items():
            by_row.setdefault(a, []).append((b, [(g0, c) for (g0, _), c in w.terms.items()]))
        rows.append(by_row)
    w = model.weights
    e = G.identity
    total = 0

    def walk(i, f0, pts, coef):
        nonlocal total
        f, mu = pts[-1]
        for b, lst in rows[i].get(f, ()):
            if i == k:
                if b != f0:
                    continue
                for gam, c in lst:
                    if gam == mu:
                        total += coef * c * chi(pts)
                continue
            for gam, c in lst:
                nu = G.mul(G.inv(gam), mu)
                model.check_element(nu)
                walk(i + 1, f0, pts + ((b, nu),), coef * c * w[b])

    for f0 in range(model.F_size):
        walk(0, f0, ((f0, e),), w[f0])
    return simplify(total)


def b_cochain(tau: Callable[[Sequence[EqKernel]], Scalar], kernels: Sequence[EqKernel]) -> Scalar:
    """Hochschild coboundary of a multilinear functional on kernels."""
    n = len(kernels) - 1
    s = 0
    for i in range(n):
        args = list(kernels[:i]) + [convolve(kernels[i], kernels[i + 1])] + list(kernels[i + 2:])
        s += (-1) ** i * tau(args)
    s += (-1) ** n * tau([convolve(kernels[n], kernels[0])] + list(kernels[1:n]))
    return simplify(s)


def kernel_l1(A: EqKernel) -> Fraction:
    """Sum of ``|re| + |im|`` over all kernel coefficients, an upper bound for the 1-norm."""
    s = Fraction(0)
    for w in A.entries.values():
        for c in w.terms.values():
            s += abs(real_part(c)) + abs(imag_part(c))
    return s


def chi_sup(chi: ASCochain) -> Fraction:
    return max((abs(real_part(v)) + abs(imag_part(v)) for v in chi.table().values()), default=Fraction(0))


def norm_bound_holds(chi: ASCochain, kernels: Sequence[EqKernel]) -> bool:
    """``|tau_chi(A)| <= |F|^k max(w)^(k+1) prod ||A_i||_1 max|chi|``, compared exactly in squares."""
    k = chi.degree
    model = chi.model
    C = Fraction(model.F_size) ** k * max(model.weights) ** (k + 1)
    bound = C * chi_sup(chi)
    for A in kernels:
        bound *= kernel_l1(A)
    v = tau_chi(chi, kernels)
    return real_part(v) ** 2 + imag_part(v) ** 2 <= bound * bound


def random_local_kernel(model: CoveringModel, rng: random.Random) -> EqKernel:
    """A kernel supported on the diagonal ``x = y``."""
    G = model.group
    rows = [[{G.identity: Fraction(rng.randint(-3, 3), rng.randint(1, 3))} if i == j else 0
             for j in range(model.F_size)] for i in range(model.F_size)]
    return EqKernel.from_group_ring(model, rows)


def random_chi(model: CoveringModel, degree: int, rng: random.Random, density: float = 0.4,
               relation: NeighborhoodRelation | None = None) -> ASCochain:
    """Random antisymmetric cochain vanishing near the diagonal."""
    rel = relation or NeighborhoodRelation(model)
    return random_cochain(model, degree, rng, density, rel, antisymmetric=True)


def cochain_from_json(model: CoveringModel, spec: dict) -> ASCochain:
    """Parse a cochain literal.

    ``{"degree": q, "table": [{"points": [[f, g], ...], "value": v}, ...]}``,
    ``{"builtin": "coboundary-of", "function": [{"f": f, "value": v}, ...]}`` or
    ``{"builtin": "pullback-from-base", "degree": q, "table": [{"labels": [g, ...], "value": v}]}``.
    """
    G = model.group
    kind = spec.get("builtin")
    if kind == "coboundary-of":
        vals = {int(r["f"]): parse_scalar(r["value"]) for r in spec["function"]}
        return ASCochain.coboundary_of(lambda x: vals.get(x[0], 0), model)
    if kind == "pullback-from-base":
        q = int(spec["degree"])
        tab = {}
        for r in spec["table"]:
            labels = tuple(G.parse(s) for s in r["labels"])
            s0 = G.inv(labels[0])
            tab[tuple(G.mul(m, s0) for m in labels)] = parse_scalar(r["value"])
        return ASCochain.pullback_from_base(model, q, lambda mus: tab.get(mus, 0))
    if kind is not None:
        raise ValueError(f"unknown cochain builtin {kind!r}")
    q = int(spec["degree"])
    tab = {}
    for r in spec.get("table", []):
        t = tuple((int(f), G.parse(g)) for f, g in r["points"])
        if len(t) != q + 1:
            raise DegreeMismatch(f"table row with {len(t)} points in a degree-{q} cochain")
        tab[t] = parse_scalar(r["value"])
    rel = NeighborhoodRelation(model) if spec.get("locally_zero") else None
    phi = ASCochain.from_table(model, q, tab, relation=rel, name=spec.get("name", "phi"))
    if rel is not None and not phi.check_locally_zero():
        raise IdentityFailure("cochain flagged locally zero does not vanish near the diagonal")
    return antisymmetrize(phi) if spec.get("antisymmetrize") else phi
