"""Higher rho numbers: delocalized Chern characters of projection kernels
paired with cyclic cocycles supported on one conjugacy class.

Two independent routes are provided.  :func:`pair` evaluates the explicit
multi-sum in the kernel values and the cutoff; :func:`pair_duality` evaluates
the cocycle on the chain image of :func:`ch_del_projection`, computed in the
X-extended algebra.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .cyclic import ConjugatorCache, rho_pullback
from .errors import (ClassMismatch, CocycleCheckFailure, DegreeMismatch,
                     IncompatibleModels, NonInvolution, UncertifiedInput)
from .forms import NCForm
from .groups import GroupModel
from .kernels import (CoveringModel, EqKernel, XForm, lott_connection, str_del,
                      x_extended_trace)
from .scalars import GaussianRational, Scalar, simplify

Tuple = tuple


# ---------------------------------------------------------------------------
# cocycles


class DelCocycle:
    """A cyclic cocycle of degree ``m`` supported on tuples with product in ``<x>``."""

    def __init__(self, group: GroupModel, degree: int, x, evaluator: Callable[[Tuple], Scalar],
                 R: int | None = None, name: str = "tau"):
        if x == group.identity:
            raise ClassMismatch("delocalized cocycles need x != e")
        self.group = group
        self.degree = degree
        self.x = x
        self.R = R
        self.name = name
        self._eval = evaluator
        self.members = frozenset(group.conjugacy_class(x, R if R is not None else 0).members)
        self._memo: dict = {}

    def in_class(self, g) -> bool:
        if self.group.is_finite or self.group.kind == "free-abelian":
            return g in self.members
        return self.group.class_canonical(g) == self.group.class_canonical(self.x)

    def __call__(self, t: Tuple) -> Scalar:
        if len(t) != self.degree + 1:
            raise DegreeMismatch(f"{self.name} has degree {self.degree}, got a {len(t) - 1}-tuple")
        hit = self._memo.get(t)
        if hit is None:
            hit = simplify(self._eval(t)) if self.in_class(self.group.prod(t)) else 0
            self._memo[t] = hit
        return hit

    def __add__(self, other: "DelCocycle") -> "DelCocycle":
        return DelCocycle(self.group, self.degree, self.x, lambda t: self(t) + other(t), self.R,
                          f"{self.name}+{other.name}")

    def scale(self, c: Scalar) -> "DelCocycle":
        return DelCocycle(self.group, self.degree, self.x, lambda t: c * self(t), self.R, self.name)

    def _tuples(self, n: int, pool: Sequence | None) -> Iterable:
        G = self.group
        if pool is None:
            pool = G.ball() if G.is_finite else G.ball(self.R or 1)
        return itertools.product(pool, repeat=n)

    def cyclic_defects(self, pool: Sequence | None = None) -> list:
        m = self.degree
        sgn = -1 if m % 2 else 1
        return [t for t in self._tuples(m + 1, pool) if self(t[-1:] + t[:-1]) != sgn * self(t)]

    def coboundary_defects(self, pool: Sequence | None = None) -> list:
        return [t for t in self._tuples(self.degree + 2, pool) if hochschild_coboundary(self, t)]

    def certificate(self, pool: Sequence | None = None) -> dict:
        """Exhaustive cyclicity and closedness check over ``pool`` (default: the ball)."""
        cyc = self.cyclic_defects(pool)
        clo = self.coboundary_defects(pool)
        return {"cyclic": not cyc, "closed": not clo,
                "counterexample": (cyc or clo or [None])[0]}

    def require_cocycle(self, pool: Sequence | None = None) -> "DelCocycle":
        cert = self.certificate(pool)
        if not (cert["cyclic"] and cert["closed"]):
            raise CocycleCheckFailure(f"{self.name} fails the cocycle check at {cert['counterexample']}")
        return self


def hochschild_coboundary(tau: Callable, t: Tuple, group: GroupModel | None = None) -> Scalar:
    """``(b tau)(a0, ..., a_{n+1})`` on group elements."""
    G = group or tau.group
    n = len(t) - 1
    s = 0
    for i in range(n):
        s += (-1) ** i * tau(t[:i] + (G.mul(t[i], t[i + 1]),) + t[i + 2:])
    s += (-1) ** n * tau((G.mul(t[n], t[0]),) + t[1:n])
    return simplify(s)


def delocalized_trace(G: GroupModel, x, R: int | None = None) -> DelCocycle:
    """Indicator of the conjugacy class of ``x`` (degree 0)."""
    return DelCocycle(G, 0, x, lambda t: 1, R, f"tr<{G.format(x)}>")


def product_cocycle(G: GroupModel, x, degree: int, R: int | None = None) -> DelCocycle:
    """``tau(g0, ..., g_2k) = 1`` iff the product lies in ``<x>``; the periodicity image of the trace."""
    if degree % 2:
        raise DegreeMismatch("the product cocycle exists in even degrees only")
    return DelCocycle(G, degree, x, lambda t: 1, R, f"S^{degree // 2} tr<{G.format(x)}>")


def cyclic_cochain(G: GroupModel, degree: int, x, values: dict, R: int | None = None) -> DelCocycle:
    """Cyclically antisymmetrized cochain from sparse ``values`` (not a cocycle in general)."""
    m = degree
    sgn = -1 if m % 2 else 1

    def ev(t):
        s = 0
        u = t
        for j in range(m + 1):
            s += (sgn ** j) * values.get(u, 0)
            u = u[1:] + u[:1]
        return s

    c = DelCocycle.__new__(DelCocycle)
    c.group, c.degree, c.x, c.R, c.name, c._eval, c._memo = G, degree, x, R, "sigma", ev, {}
    c.members = frozenset(G.conjugacy_class(x, R if R is not None else 0).members)
    return c


def add_coboundary(tau: DelCocycle, sigma: DelCocycle) -> DelCocycle:
    """``tau + b sigma``; ``sigma`` must have degree one less and the same class."""
    if sigma.degree != tau.degree - 1:
        raise DegreeMismatch("sigma must have degree deg(tau) - 1")
    G = tau.group
    return DelCocycle(G, tau.degree, tau.x,
                      lambda t: tau(t) + hochschild_coboundary(sigma, t, G), tau.R, f"{tau.name}+b sigma")


def random_cyclic_cochain(G: GroupModel, degree: int, x, rng: random.Random,
                          terms: int = 4, R: int | None = None) -> DelCocycle:
    """Random normalized cyclic cochain supported on ``<x>``."""
    pool = [g for g in (G.ball() if G.is_finite else G.ball(R or 1)) if g != G.identity]
    cls = set(G.conjugacy_class(x, R if R is not None else 0).members)
    vals: dict = {}
    tries = 0
    while len(vals) < terms and tries < 10_000:
        tries += 1
        t = tuple(rng.choice(pool) for _ in range(degree + 1))
        if G.prod(t) in cls:
            vals[t] = Fraction(rng.randint(-3, 3), rng.randint(1, 3))
    return cyclic_cochain(G, degree, x, vals, R)


def build_tau_from_cocycle(c: Callable[[Tuple], Scalar], x, degree: int, G: GroupModel,
                           R: int | None = None) -> DelCocycle:
    """``tau = rho^*(c)`` for a bar cocycle ``c`` on the centralizer of ``x``.

    ``tau(g0, ..., gm) = c(rho(g)_1, ..., rho(g)_m)`` on tuples with product in
    ``<x>`` and zero elsewhere.  The bar cocycle condition, cyclicity and
    closedness are verified on the (finite or truncated) ball.
    """
    cent = [g for g in (G.ball() if G.is_finite else G.ball(R or 1)) if G.commutes(g, x)]
    for t in itertools.product(cent, repeat=degree + 1):
        s = c(t[1:])
        for i in range(degree):
            s += (-1) ** (i + 1) * c(t[:i] + (G.mul(t[i], t[i + 1]),) + t[i + 2:])
        s += (-1) ** (degree + 1) * c(t[:-1])
        if simplify(s) != 0:
            raise CocycleCheckFailure(f"bar cocycle condition fails at {t}")
    cache = ConjugatorCache(G, x, R)

    def ev(t):
        return c(rho_pullback(cache, t)[1:])

    tau = DelCocycle(G, degree, x, ev, R, f"rho*c<{G.format(x)}>")
    return tau.require_cocycle()


# ---------------------------------------------------------------------------
# projection kernels


@dataclass(frozen=True)
class ProjectionKernel:
    """Degree-0 kernel with ``P * P = P`` exactly."""

    P: EqKernel

    def __post_init__(self):
        if self.P.degree != 0:
            raise UncertifiedInput("projection kernels have form degree 0")
        if self.P * self.P != self.P:
            raise UncertifiedInput("kernel is not idempotent")

    @property
    def model(self) -> CoveringModel:
        return self.P.model

    @classmethod
    def from_spectral(cls, pieces: Sequence[tuple]) -> "ProjectionKernel":
        """Positive spectral projection of ``sum lambda_j E_j`` for orthogonal idempotents ``E_j``."""
        pieces = list(pieces)
        model = pieces[0][1].model
        P = EqKernel.zero(model)
        for lam, E in pieces:
            if lam > 0:
                P = P + E
        return cls(P)

    def conjugate(self, V: EqKernel, V_inv: EqKernel) -> "ProjectionKernel":
        I = self.model.identity()
        if V * V_inv != I or V_inv * V != I:
            raise UncertifiedInput("conjugating kernels are not mutually inverse")
        return ProjectionKernel(V * self.P * V_inv)


def cyclic_idempotents(G: GroupModel, g) -> list:
    """Orthogonal idempotents of ``C<g>`` summing to 1, with Gaussian-rational coefficients."""
    n = G.order(g)
    e = G.identity
    pw = [e]
    for _ in range(1, n or 1):
        pw.append(G.mul(pw[-1], g))
    if n == 1:
        return [{e: 1}]
    if n in (2, 4):
        roots = [1, -1] if n == 2 else [1, GaussianRational(0, 1), -1, GaussianRational(0, -1)]
        out = []
        for j in range(n):
            out.append({pw[k]: simplify(roots[(j * k) % n] * Fraction(1, n)) for k in range(n)})
        return out
    avg = {h: Fraction(1, n) for h in pw}
    rest = {h: -Fraction(1, n) for h in pw}
    rest[e] += 1
    return [avg, rest]


def group_ring_kernel(model: CoveringModel, diag: Sequence[dict]) -> EqKernel:
    """Diagonal kernel acting by left multiplication with ``diag[f]`` on each fibre."""
    G = model.group
    ents = {}
    for f, a in enumerate(diag):
        w = NCForm.from_group_ring(G, {h: simplify(c / model.weights[f]) for h, c in a.items()})
        if w:
            ents[(f, f)] = w
    return EqKernel(model, ents, 0)


def elementary_kernel(model: CoveringModel, i: int, j: int, a: dict) -> tuple:
    """``(I + N, I - N)`` with ``N`` supported at ``(i, j)``, ``i != j``."""
    if i == j:
        raise ValueError("elementary kernels need i != j")
    G = model.group
    N = EqKernel(model, {(i, j): NCForm.from_group_ring(G, a)}, 0)
    I = model.identity()
    return I + N, I - N


def random_projection(model: CoveringModel, rng: random.Random, conjugations: int = 1,
                      max_len: int = 1) -> ProjectionKernel:
    """Spectral projection of a random diagonal self-adjoint kernel, then conjugated."""
    G = model.group
    pool = [g for g in model.elements() if G.length(g) <= max_len]
    diag = []
    for _ in range(model.F_size):
        g = rng.choice(pool)
        ids = cyclic_idempotents(G, g)
        chosen = [E for E in ids if rng.random() < 0.5]
        acc: dict = {}
        for E in chosen:
            for h, c in E.items():
                acc[h] = simplify(acc.get(h, 0) + c)
        diag.append({h: c for h, c in acc.items() if c})
    P = ProjectionKernel(group_ring_kernel(model, diag))
    if model.F_size > 1:
        for _ in range(conjugations):
            i, j = rng.sample(range(model.F_size), 2)
            a = {rng.choice(pool): Fraction(rng.randint(-2, 2), rng.randint(1, 2))}
            V, Vi = elementary_kernel(model, i, j, a)
            P = P.conjugate(V, Vi)
    return P


# ---------------------------------------------------------------------------
# Chern character and the two pairing routes


def ch_del_projection(P: ProjectionKernel, k: int) -> NCForm:
    """``(1/k!) TR^del((P dP dP)^k)`` in the X-extended algebra; a form of degree ``2k``."""
    if k < 0:
        raise DegreeMismatch("k must be nonnegative")
    Px = XForm.of(P.P)
    dP = Px.d()
    curv = Px * dP * dP
    W = Px
    for _ in range(k):
        W = W * curv
    return x_extended_trace(W).scale(Fraction(1, math.factorial(k)))


def pair_duality(tau: DelCocycle, form: NCForm) -> Scalar:
    """Evaluate ``tau`` on the chain image ``g0 dg1 ... dgm -> (g0, ..., gm)``."""
    s = 0
    for (g0, gs), c in form.terms.items():
        if len(gs) != tau.degree:
            raise DegreeMismatch(f"form of degree {len(gs)} paired with a degree-{tau.degree} cocycle")
        s += c * tau((g0,) + gs)
    return simplify(s)


def _kernel_slots(K: EqKernel) -> dict:
    """``(f1, f2) -> [(gamma, K_gamma(f1, f2))]`` for a degree-0 kernel."""
    out: dict = {}
    for (a, b), w in K.entries.items():
        out[(a, b)] = [(g0, c) for (g0, gs), c in w.terms.items()]
    return out


def _direct_contributions(tau: DelCocycle, P: ProjectionKernel, k: int) -> dict:
    """Map each cocycle argument ``(g_0, ..., g_2k)`` to its summed weight in :func:`pair`.

    The sum over points ``x_i = (f_i, mu_i)`` and group elements ``g_i`` is
    reindexed by ``gamma_i = mu_i g_i mu_{i+1}^-1`` (the slot of ``P`` that is
    hit), so only the support of ``P`` and of the cutoff is visited.
    """
    if tau.degree != 2 * k:
        raise DegreeMismatch(f"cocycle degree {tau.degree} does not match 2k = {2 * k}")
    model = P.model
    G = model.group
    if tau.group is not G:
        raise IncompatibleModels("cocycle and kernel live over different groups")
    if tau.in_class(G.identity):
        raise ClassMismatch("the cocycle class must be delocalized")
    slots = _kernel_slots(P.P)
    by_row: dict = {}
    for (a, b), lst in slots.items():
        by_row.setdefault(a, []).append((b, lst))
    w = model.weights
    n = 2 * k + 1
    e = G.identity
    out: dict = {}
    # walk states (f0, f_i, mu_i, t_0..t_{i-1}); paths that agree on the
    # partial tuple are merged, which keeps the state count small
    states: dict = {(f0, f0, e, ()): w[f0] for f0 in range(model.F_size)}
    for i in range(n):
        last = i == n - 1
        nxt: dict = {}
        for (f0, f, mu, pre), coef in states.items():
            mi = G.inv(mu)
            for b, lst in by_row.get(f, ()):
                if last and b != f0:
                    continue
                for gam, c in lst:
                    head = G.mul(mi, gam)
                    if last:
                        t = pre + (head,)
                        if tau.in_class(G.prod(t)):
                            out[t] = out.get(t, 0) + coef * c
                        continue
                    for nu, hv in model.cutoff[b].items():
                        key = (f0, b, nu, pre + (G.mul(head, nu),))
                        nxt[key] = nxt.get(key, 0) + coef * c * hv * w[b]
        states = nxt
    return out


def pair(tau: DelCocycle, P: ProjectionKernel, k: int) -> Scalar:
    """The explicit delocalized formula with integrals as weighted F-sums."""
    total = 0
    for t, c in _direct_contributions(tau, P, k).items():
        if c:
            total += c * tau(t)
    return simplify(total * Fraction(1, math.factorial(k)))


def eta_sum(tau: DelCocycle, P: ProjectionKernel) -> Scalar:
    """``sum_{gamma in <x>} sum_F w Tr(P(x gamma, x)) tau(gamma)``: the degree-0 anchor."""
    if tau.degree != 0:
        raise DegreeMismatch("the eta sum needs a degree-0 cocycle")
    s = 0
    for f, w in enumerate(P.model.weights):
        ent = P.P.entries.get((f, f))
        if ent is None:
            continue
        for (g0, _), c in ent.terms.items():
            s += w * c * tau((g0,))
    return simplify(s)


def eta_terms(tau: DelCocycle, P: ProjectionKernel) -> dict:
    """Per-gamma contributions of :func:`eta_sum`."""
    out: dict = {}
    for f, w in enumerate(P.model.weights):
        ent = P.P.entries.get((f, f))
        if ent is None:
            continue
        for (g0, _), c in ent.terms.items():
            v = w * c * tau((g0,))
            if v:
                out[g0] = simplify(out.get(g0, 0) + v)
    return {g: v for g, v in out.items() if v}


def direct_terms(tau: DelCocycle, P: ProjectionKernel) -> dict:
    """Per-gamma contributions of :func:`pair` at ``k = 0``, taken from the walk."""
    out: dict = {}
    for (g0,), c in _direct_contributions(tau, P, 0).items():
        v = c * tau((g0,))
        if v:
            out[g0] = simplify(out.get(g0, 0) + v)
    return {g: v for g, v in out.items() if v}


# ---------------------------------------------------------------------------
# the graded degree-one formula


def _check_graded_involution(S: EqKernel) -> None:
    if S.grading is None:
        raise NonInvolution("a grading is required")
    if S.degree != 0 or S * S != S.model.identity():
        raise NonInvolution("S * S is not the identity kernel")
    for (a, b) in S.entries:
        if S.grading[a] % 2 == S.grading[b] % 2:
            raise NonInvolution("S is not odd for the grading")


def pair_graded_degree1(S: EqKernel, tau: DelCocycle) -> Scalar:
    """``1/2 sum STr(chi(x0) S(x0 g0, x1) h(x1) S(x1 g1, x0)) tau(g0, g1)``."""
    _check_graded_involution(S)
    if tau.degree != 1:
        raise DegreeMismatch("the graded formula pairs with degree-1 cocycles")
    model = S.model
    G = model.group
    w = model.weights
    slots = _kernel_slots(S)
    total = 0
    for (f0, f1), lst01 in slots.items():
        back = slots.get((f1, f0))
        if not back:
            continue
        sgn = -1 if S.grading[f0] % 2 else 1
        for mu, hv in model.cutoff[f1].items():
            mi = G.inv(mu)
            for a, ca in lst01:
                for b, cb in back:
                    val = tau((G.mul(a, mu), G.mul(mi, b)))
                    if val:
                        total += sgn * w[f0] * w[f1] * ca * hv * cb * val
    return simplify(total * Fraction(1, 2))


def ch_del_graded_degree1(S: EqKernel) -> NCForm:
    """``1/2 STR^del(S [nabla, S])``."""
    _check_graded_involution(S)
    return str_del(S * lott_connection(S)).scale(Fraction(1, 2))


def random_unit(G: GroupModel, rng: random.Random, pool: Sequence, factors: int = 2) -> tuple:
    """An invertible group-ring element and its inverse, as ``{g: coef}`` dicts.

    Each factor is ``1 + c E`` for an idempotent ``E`` of a cyclic subgroup,
    whose inverse is ``1 - c/(1+c) E``.
    """
    e = G.identity

    def mul(a, b):
        out: dict = {}
        for g, x in a.items():
            for h, y in b.items():
                k = G.mul(g, h)
                out[k] = simplify(out.get(k, 0) + x * y)
        return {k: v for k, v in out.items() if v}

    U, Ui = {e: 1}, {e: 1}
    for _ in range(factors):
        E = rng.choice(cyclic_idempotents(G, rng.choice(pool)))
        c = Fraction(rng.choice([1, 2, 3, -3]), rng.choice([1, 2]))
        f = {e: 1}
        fi = {e: 1}
        for g, v in E.items():
            f[g] = simplify(f.get(g, 0) + c * v)
            fi[g] = simplify(fi.get(g, 0) - c / (1 + c) * v)
        U, Ui = mul(U, f), mul(fi, Ui)
    return U, Ui


def random_graded_involution(model: CoveringModel, rng: random.Random, max_len: int = 1) -> EqKernel:
    """Odd involution built from pairs of opposite-parity points; F must have even size.

    On the pair ``(2i, 2i+1)`` the kernel is ``[[0, U], [U^-1, 0]]`` for a
    random unit ``U`` of the group ring, with the volume weights divided out.
    """
    G = model.group
    n = model.F_size
    if n % 2:
        raise ValueError("graded involutions need an even number of F-points")
    grading = tuple(i % 2 for i in range(n))
    pool = [g for g in model.elements() if G.length(g) <= max_len]
    ents = {}
    w = model.weights
    for i in range(0, n, 2):
        U, Ui = random_unit(G, rng, pool)
        ents[(i, i + 1)] = NCForm.from_group_ring(G, {g: simplify(c / w[i + 1]) for g, c in U.items()})
        ents[(i + 1, i)] = NCForm.from_group_ring(G, {g: simplify(c / w[i]) for g, c in Ui.items()})
    S = EqKernel(model, ents, 0, grading)
    same = [(i, j) for i in range(n) for j in range(n) if i != j and i % 2 == j % 2]
    if same:
        i, j = rng.choice(same)
        V, Vi = elementary_kernel(model, i, j, {rng.choice(pool): rng.randint(-2, 2) or 1})
        S = V * S * Vi
    return EqKernel(model, S.entries, 0, grading)


def _orbit_rep(t: Tuple, sgn: int, key=repr) -> tuple | None:
    """Canonical rotation of ``t`` and the sign with ``tau(t) = sign * tau(rep)``.

    Returns None when the orbit forces the value to vanish (odd symmetry).
    """
    n = len(t)
    best = None
    for j in range(n):
        r = t[j:] + t[:j]
        kr = tuple(key(g) for g in r)
        if best is None or kr < best[0]:
            best = (kr, r)
    rep = best[1]
    if sgn > 0:
        return rep, 1
    signs = set()
    for j in range(n):
        if t[j:] + t[:j] == rep:
            signs.add(sgn ** ((n - j) % n))
    if len(signs) > 1:
        return None
    return rep, signs.pop()


def normalized_cyclic_cocycles(G: GroupModel, x, degree: int, R: int | None = None) -> list:
    """Basis of normalized cyclic cocycles of ``degree`` supported on ``<x>``.

    Normalized means vanishing whenever some entry is ``e``.  The space is the
    kernel of ``b`` on cyclic orbit variables, solved exactly.
    """
    from .linalg import nullspace

    e = G.identity
    pool = [g for g in (G.ball() if G.is_finite else G.ball(R or 1)) if g != e]
    cls = set(G.conjugacy_class(x, R if R is not None else 0).members)
    m = degree
    sgn = -1 if m % 2 else 1
    key = G.sort_key
    memo: dict = {}

    def orbit(u):
        hit = memo.get(u, 0)
        if hit == 0:
            hit = _orbit_rep(u, sgn, key)
            memo[u] = hit
        return hit

    var: dict = {}
    for t in itertools.product(pool, repeat=m + 1):
        if G.prod(t) not in cls:
            continue
        o = orbit(t)
        if o is not None and o[0] not in var:
            var[o[0]] = len(var)
    cols: list = [dict() for _ in var]
    for t in itertools.product(pool, repeat=m + 2):
        if G.prod(t) not in cls:
            continue
        n = m + 1
        faces = [((-1) ** i, t[:i] + (G.mul(t[i], t[i + 1]),) + t[i + 2:]) for i in range(n)]
        faces.append(((-1) ** n, (G.mul(t[n], t[0]),) + t[1:n]))
        for s, u in faces:
            if e in u:
                continue
            o = orbit(u)
            if o is None:
                continue
            j = var[o[0]]
            v = cols[j].get(t, 0) + s * o[1]
            if v:
                cols[j][t] = v
            else:
                cols[j].pop(t, None)
    reps = list(var)
    out = []
    rows: dict = {}
    for j, col in enumerate(cols):
        for t, c in col.items():
            rows.setdefault(t, {})[j] = c
    for vec in nullspace(rows.values(), len(cols)):
        vals = {reps[j]: c for j, c in vec.items()}

        def ev(t, vals=vals):
            if e in t:
                return 0
            o = orbit(t)
            if o is None:
                return 0
            return o[1] * vals.get(o[0], 0)

        out.append(DelCocycle(G, degree, x, ev, R, f"z{len(out)}<{G.format(x)}>"))
    return out
