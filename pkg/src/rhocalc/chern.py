"""Chern characters of idempotents and invertibles over matrix algebras on CΓ.

Matrices carry entries that are polynomials in one or two path parameters
(t, s) with noncommutative forms as coefficients, so paths, their
derivatives and their integrals over [0, 1] stay exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .errors import (EndpointMismatch, IncompatibleModels, NonPolynomialPath,
                     UncertifiedInput)
from .forms import AbelianizedForm, NCForm, _mul_terms, abelianize, abelianizer_for
from .groups import GroupModel
from .linalg import Echelon, add_into
from .scalars import Scalar, simplify, to_complex

Mono = tuple  # (power of t, power of s)


# ---------------------------------------------------------------------------
# polynomials in (t, s) with form coefficients


class PolyForm:
    """Sum over monomials t^a s^b of noncommutative forms."""

    __slots__ = ("group", "coeffs")

    def __init__(self, group: GroupModel, coeffs: dict | None = None):
        self.group = group
        self.coeffs = {m: dict(f) for m, f in (coeffs or {}).items() if f}

    @classmethod
    def const(cls, w: NCForm) -> "PolyForm":
        return cls(w.group, {(0, 0): w.terms})

    @classmethod
    def scalar(cls, G: GroupModel, c: Scalar = 1, mono: Mono = (0, 0)) -> "PolyForm":
        return cls(G, {mono: {(G.identity, ()): c}} if c else {})

    @classmethod
    def element(cls, G: GroupModel, g, c: Scalar = 1, mono: Mono = (0, 0)) -> "PolyForm":
        return cls(G, {mono: {(g, ()): c}} if c else {})

    @classmethod
    def zero(cls, G: GroupModel) -> "PolyForm":
        return cls(G, {})

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, o):
        if isinstance(o, PolyForm):
            return self.coeffs == o.coeffs
        if o == 0:
            return not self.coeffs
        return NotImplemented

    def __add__(self, o: "PolyForm") -> "PolyForm":
        out = {m: dict(f) for m, f in self.coeffs.items()}
        for m, f in o.coeffs.items():
            add_into(out.setdefault(m, {}), f)
        return PolyForm(self.group, out)

    def __sub__(self, o: "PolyForm") -> "PolyForm":
        return self + o.scale(-1)

    def __neg__(self) -> "PolyForm":
        return self.scale(-1)

    def scale(self, c: Scalar) -> "PolyForm":
        if not c:
            return PolyForm(self.group)
        return PolyForm(self.group, {m: {k: v * c for k, v in f.items()} for m, f in self.coeffs.items()})

    def __mul__(self, o):
        if not isinstance(o, PolyForm):
            return self.scale(o)
        G = self.group
        out: dict = {}
        for (a1, b1), f1 in self.coeffs.items():
            for (a2, b2), f2 in o.coeffs.items():
                add_into(out.setdefault((a1 + a2, b1 + b2), {}), _mul_terms(G, f1, f2))
        return PolyForm(G, out)

    __rmul__ = scale

    def d(self) -> "PolyForm":
        return PolyForm(self.group, {m: NCForm(self.group, f).d().terms for m, f in self.coeffs.items()})

    def partial(self, var: str = "t") -> "PolyForm":
        i = 0 if var == "t" else 1
        out: dict = {}
        for m, f in self.coeffs.items():
            if m[i] == 0:
                continue
            nm = (m[0] - 1, m[1]) if i == 0 else (m[0], m[1] - 1)
            add_into(out.setdefault(nm, {}), f, m[i])
        return PolyForm(self.group, out)

    def integrate(self, var: str = "t") -> "PolyForm":
        """Integral over [0, 1] in one variable."""
        i = 0 if var == "t" else 1
        out: dict = {}
        for m, f in self.coeffs.items():
            nm = (0, m[1]) if i == 0 else (m[0], 0)
            add_into(out.setdefault(nm, {}), f, Fraction(1, m[i] + 1))
        return PolyForm(self.group, out)

    def at(self, t: Scalar | None = None, s: Scalar | None = None) -> "PolyForm":
        out: dict = {}
        for (a, b), f in self.coeffs.items():
            c = 1
            na, nb = a, b
            if t is not None:
                c = c * Fraction(t) ** a
                na = 0
            if s is not None:
                c = c * Fraction(s) ** b
                nb = 0
            if c:
                add_into(out.setdefault((na, nb), {}), f, c)
        return PolyForm(self.group, out)

    def form(self) -> NCForm:
        """The coefficient of t^0 s^0 when the polynomial is constant."""
        if any(m != (0, 0) for m in self.coeffs):
            raise NonPolynomialPath("polynomial still depends on a parameter")
        return NCForm(self.group, self.coeffs.get((0, 0), {}))

    def monomials(self) -> list:
        return sorted(self.coeffs)

    def coefficient(self, mono: Mono) -> NCForm:
        return NCForm(self.group, self.coeffs.get(mono, {}))

    def map_forms(self, fn: Callable[[NCForm], NCForm]) -> "PolyForm":
        out = {}
        G = None
        for m, f in self.coeffs.items():
            w = fn(NCForm(self.group, f))
            G = w.group
            out[m] = w.terms
        return PolyForm(G or self.group, out)

    def __repr__(self):
        return f"PolyForm({self.coeffs})"


def abelianize_poly(P: PolyForm, truncation: int | None = None) -> dict:
    """Coefficientwise canonical coordinates modulo graded commutators."""
    ab = abelianizer_for(P.group)
    R = None if P.group.is_finite else truncation
    out = {}
    for m, f in P.coeffs.items():
        c = ab.coordinates(NCForm(P.group, f), R)
        if c:
            out[m] = c
    return out


# ---------------------------------------------------------------------------
# matrices


class FormMatrix:
    """Square matrix with PolyForm entries."""

    __slots__ = ("group", "rows")

    def __init__(self, group: GroupModel, rows: list):
        self.group = group
        self.rows = [list(r) for r in rows]
        n = len(self.rows)
        if any(len(r) != n for r in self.rows):
            raise ValueError("matrix must be square")

    @property
    def n(self) -> int:
        return len(self.rows)

    @classmethod
    def zero(cls, G: GroupModel, n: int) -> "FormMatrix":
        return cls(G, [[PolyForm(G) for _ in range(n)] for _ in range(n)])

    @classmethod
    def identity(cls, G: GroupModel, n: int) -> "FormMatrix":
        return cls(G, [[PolyForm.scalar(G, 1 if i == j else 0) for j in range(n)] for i in range(n)])

    def _zip(self, o: "FormMatrix", fn) -> "FormMatrix":
        if o.n != self.n:
            raise IncompatibleModels("matrix sizes differ")
        return FormMatrix(self.group, [[fn(a, b) for a, b in zip(r1, r2)]
                                       for r1, r2 in zip(self.rows, o.rows)])

    def __add__(self, o):
        return self._zip(o, lambda a, b: a + b)

    def __sub__(self, o):
        return self._zip(o, lambda a, b: a - b)

    def scale(self, c) -> "FormMatrix":
        return FormMatrix(self.group, [[a.scale(c) for a in r] for r in self.rows])

    def __neg__(self):
        return self.scale(-1)

    def __mul__(self, o):
        if not isinstance(o, FormMatrix):
            return self.scale(o)
        n = self.n
        if o.n != n:
            raise IncompatibleModels("matrix sizes differ")
        G = self.group
        out = []
        for i in range(n):
            row = []
            for j in range(n):
                acc = PolyForm(G)
                for k in range(n):
                    a, b = self.rows[i][k], o.rows[k][j]
                    if a and b:
                        acc = acc + a * b
                row.append(acc)
            out.append(row)
        return FormMatrix(G, out)

    def apply(self, fn) -> "FormMatrix":
        return FormMatrix(self.group, [[fn(a) for a in r] for r in self.rows])

    def d(self) -> "FormMatrix":
        return self.apply(lambda a: a.d())

    def partial(self, var: str = "t") -> "FormMatrix":
        return self.apply(lambda a: a.partial(var))

    def at(self, t=None, s=None) -> "FormMatrix":
        return self.apply(lambda a: a.at(t, s))

    def trace(self) -> PolyForm:
        acc = PolyForm(self.group)
        for i in range(self.n):
            acc = acc + self.rows[i][i]
        return acc

    def __eq__(self, o):
        return isinstance(o, FormMatrix) and self.rows == o.rows

    def is_constant(self) -> bool:
        return all(m == (0, 0) for r in self.rows for a in r for m in a.coeffs)

    def block_sum(self, o: "FormMatrix") -> "FormMatrix":
        G = self.group
        n, m = self.n, o.n
        rows = [r + [PolyForm(G) for _ in range(m)] for r in self.rows]
        rows += [[PolyForm(G) for _ in range(n)] + r for r in o.rows]
        return FormMatrix(G, rows)

    def power(self, k: int) -> "FormMatrix":
        out = FormMatrix.identity(self.group, self.n)
        for _ in range(k):
            out = out * self
        return out

    def __repr__(self):
        return f"FormMatrix({self.rows})"


def _as_entry(G: GroupModel, x) -> PolyForm:
    if isinstance(x, PolyForm):
        return x
    if isinstance(x, NCForm):
        return PolyForm.const(x)
    if isinstance(x, dict):  # group-ring element {g: coef}
        return PolyForm(G, {(0, 0): {(g, ()): c for g, c in x.items() if c}})
    return PolyForm.scalar(G, x)


def form_matrix(G: GroupModel, rows: Sequence[Sequence]) -> FormMatrix:
    return FormMatrix(G, [[_as_entry(G, x) for x in r] for r in rows])


class GRingMatrix:
    """Constant matrix over CΓ with an optional certification witness."""

    def __init__(self, G: GroupModel, rows: Sequence[Sequence], inverse: Sequence[Sequence] | None = None):
        self.group = G
        self.M = form_matrix(G, rows)
        if not self.M.is_constant() or any(
                k[1] for a in (x for r in self.M.rows for x in r) for f in a.coeffs.values() for k in f):
            raise ValueError("entries must be elements of the group ring")
        self.inverse = None if inverse is None else form_matrix(G, inverse)

    @property
    def n(self) -> int:
        return self.M.n

    def is_idempotent(self) -> bool:
        return self.M * self.M == self.M

    def is_invertible(self) -> bool:
        if self.inverse is None:
            return False
        one = FormMatrix.identity(self.group, self.n)
        return self.M * self.inverse == one and self.inverse * self.M == one

    def require_idempotent(self) -> "GRingMatrix":
        if not self.is_idempotent():
            raise UncertifiedInput("p^2 - p is not zero")
        return self

    def require_invertible(self) -> "GRingMatrix":
        if not self.is_invertible():
            raise UncertifiedInput("no exact inverse witness")
        return self

    def block_sum(self, o: "GRingMatrix") -> "GRingMatrix":
        out = GRingMatrix.__new__(GRingMatrix)
        out.group = self.group
        out.M = self.M.block_sum(o.M)
        out.inverse = None
        if self.inverse is not None and o.inverse is not None:
            out.inverse = self.inverse.block_sum(o.inverse)
        return out

    def map(self, hom) -> "GRingMatrix":
        out = GRingMatrix.__new__(GRingMatrix)
        out.group = hom.target
        out.M = _map_matrix(self.M, hom)
        out.inverse = None if self.inverse is None else _map_matrix(self.inverse, hom)
        return out

    def conjugate(self, z: "GRingMatrix") -> "GRingMatrix":
        z.require_invertible()
        out = GRingMatrix.__new__(GRingMatrix)
        out.group = self.group
        out.M = z.M * self.M * z.inverse
        out.inverse = None
        return out


def _map_matrix(M: FormMatrix, hom) -> FormMatrix:
    return FormMatrix(hom.target, [[a.map_forms(lambda w: w.map(hom)) for a in r] for r in M.rows])


class MatrixPath:
    """Matrix over CΓ polynomial in t (and optionally s)."""

    def __init__(self, G: GroupModel, M: FormMatrix):
        self.group = G
        self.M = M
        for r in M.rows:
            for a in r:
                for f in a.coeffs.values():
                    if any(k[1] for k in f):
                        raise ValueError("path entries must be group-ring valued")

    @classmethod
    def constant(cls, p: GRingMatrix) -> "MatrixPath":
        return cls(p.group, p.M)

    @classmethod
    def from_rows(cls, G: GroupModel, rows) -> "MatrixPath":
        return cls(G, form_matrix(G, rows))

    @property
    def n(self) -> int:
        return self.M.n

    def at(self, t=None, s=None) -> FormMatrix:
        return self.M.at(t, s)

    def endpoint(self, t) -> GRingMatrix:
        out = GRingMatrix.__new__(GRingMatrix)
        out.group = self.group
        out.M = self.M.at(t)
        out.inverse = None
        return out

    def is_idempotent_path(self) -> bool:
        return self.M * self.M == self.M

    def require_idempotent(self) -> "MatrixPath":
        if not self.is_idempotent_path():
            raise UncertifiedInput("p_t^2 - p_t is not zero as a polynomial")
        return self

    def conjugate_by(self, V: FormMatrix, Vinv: FormMatrix) -> "MatrixPath":
        return MatrixPath(self.group, V * self.M * Vinv)

    def map(self, hom) -> "MatrixPath":
        return MatrixPath(hom.target, _map_matrix(self.M, hom))


# ---------------------------------------------------------------------------
# Chern characters


@dataclass
class CurvatureData:
    p: FormMatrix
    dp: FormMatrix
    theta: FormMatrix


def curvature(p: FormMatrix) -> CurvatureData:
    dp = p.d()
    return CurvatureData(p, dp, p * dp * dp)


def _theta_power(cd: CurvatureData, k: int) -> FormMatrix:
    """p Θ^k computed as p (dp dp)^k.

    p dp = dp (1 - p) gives p dp dp = dp dp p, so the two agree exactly; the
    right-hand side never multiplies a form on the right by a ring element.
    """
    dp2 = cd.dp * cd.dp
    out = cd.p
    for _ in range(k):
        out = out * dp2
    return out


def ch_even_poly(p: FormMatrix, k: int) -> PolyForm:
    """(1/k!) Tr(Θ^k) with Θ = p dp dp; Θ^0 is p itself."""
    return _theta_power(curvature(p), k).trace().scale(Fraction(1, math.factorial(k)))


def ch_even_form(p: GRingMatrix, k: int) -> NCForm:
    p.require_idempotent()
    return ch_even_poly(p.M, k).form()


def ch_even(p: GRingMatrix, k: int, truncation: int | None = None) -> AbelianizedForm:
    return abelianize(ch_even_form(p, k), truncation)


def odd_direct_form(u: GRingMatrix, k: int) -> NCForm:
    """Tr(u^{-1} du (du^{-1} du)^k), without the constant."""
    u.require_invertible()
    du = u.M.d()
    dv = u.inverse.d()
    out = u.inverse * du
    for _ in range(k):
        out = out * dv * du
    return out.trace().form()


def xi(p: FormMatrix, var: str = "t") -> FormMatrix:
    """Ξ = p dp ṗ - p ṗ dp, the dt-coefficient of the curvature with dt placed last.

    Moving dt past the one-form dp costs a sign, hence the minus.
    """
    dp = p.d()
    pt = p.partial(var)
    return p * dp * pt - p * pt * dp


def transgression(path: MatrixPath, k: int, var: str = "t") -> PolyForm:
    """Transgression form of Ch_{2k} along the path.

    Normalized as Tr(Θ_t^{k-1} Ξ_t)/(k-1)!, the coefficient of dt in the Chern
    character of the path viewed as one idempotent, so that
    d/dt Ch_{2k}(p_t) = -d(result) modulo graded commutators.
    """
    if k < 1:
        raise ValueError("transgression needs k >= 1")
    path.require_idempotent()
    cd = curvature(path.M)
    # Θ^{k-1} p = p Θ^{k-1}, so the leading p of Ξ is absorbed
    pt = path.M.partial(var)
    body = _theta_power(cd, k - 1)
    out = body * cd.dp * pt - body * pt * cd.dp
    return out.trace().scale(Fraction(1, math.factorial(k - 1)))


def lmp_integrand(path: MatrixPath, k: int, var: str = "t") -> PolyForm:
    """(2p-1) ṗ dp (dp dp)^{k-1} traced and normalized like :func:`transgression`."""
    p = path.M
    G = path.group
    n = p.n
    two_p_minus_1 = p.scale(2) - FormMatrix.identity(G, n)
    dp = p.d()
    out = two_p_minus_1 * p.partial(var) * dp
    for _ in range(k - 1):
        out = out * dp * dp
    return out.trace().scale(Fraction(1, math.factorial(k - 1)))


def transgression_defect(path: MatrixPath, k: int, truncation: int | None = None) -> dict:
    """Coordinates of d/dt Ch_{2k}(p_t) + d(transgression) modulo commutators (zero when the identity holds)."""
    lhs = ch_even_poly(path.require_idempotent().M, k).partial("t")
    rhs = transgression(path, k).d()
    return abelianize_poly(lhs + rhs, truncation)


def transgression_identity(path: MatrixPath, k: int, truncation: int | None = None) -> bool:
    return not transgression_defect(path, k, truncation)


def integrated_transgression(path: MatrixPath, k: int) -> NCForm:
    return transgression(path, k).integrate("t").form()


# ---------------------------------------------------------------------------
# polynomial paths


def _elem(G: GroupModel, n: int, i: int, j: int, x: PolyForm) -> FormMatrix:
    M = FormMatrix.identity(G, n)
    M.rows[i][j] = M.rows[i][j] + x
    return M


def _tvar(G: GroupModel, entry: PolyForm, sign: int = 1) -> PolyForm:
    return entry * PolyForm.scalar(G, sign, (1, 0))


def whitehead_path(u: GRingMatrix) -> tuple:
    """Polynomial invertible path V_t from 1 to diag(u, u^{-1}) and its inverse.

    Uses elementary factors E12(tu) E21(-t u^-1) E12(tu) E12(-t) E21(t) E12(-t),
    each with an elementary inverse, so V_t^{-1} is polynomial as well.
    """
    u.require_invertible()
    G = u.group
    n = u.n
    m = 2 * n

    def block(X: FormMatrix, i0: int, j0: int, sign: int) -> FormMatrix:
        M = FormMatrix.identity(G, m)
        for a in range(n):
            for b in range(n):
                x = X.rows[a][b]
                if x:
                    M.rows[i0 + a][j0 + b] = M.rows[i0 + a][j0 + b] + _tvar(G, x, sign)
        return M

    U, Ui, One = u.M, u.inverse, FormMatrix.identity(G, n)
    factors = [(U, 0, n, 1), (Ui, n, 0, -1), (U, 0, n, 1), (One, 0, n, -1), (One, n, 0, 1), (One, 0, n, -1)]
    V = FormMatrix.identity(G, m)
    Vinv = FormMatrix.identity(G, m)
    for X, i0, j0, sg in factors:
        V = V * block(X, i0, j0, sg)
        Vinv = block(X, i0, j0, -sg) * Vinv
    return V, Vinv


def suspension_loop(u: GRingMatrix) -> MatrixPath:
    """Idempotent loop V_t e V_t^{-1} at e = diag(1_n, 0_n) attached to u."""
    V, Vinv = whitehead_path(u)
    G = u.group
    n = u.n
    e = FormMatrix(G, [[PolyForm.scalar(G, 1 if (i == j and i < n) else 0) for j in range(2 * n)]
                       for i in range(2 * n)])
    return MatrixPath(G, V * e * Vinv)


def ch_odd_suspension_form(u: GRingMatrix, k: int) -> NCForm:
    """Ch_{2k+1}(u) as the integrated transgression of the suspension loop."""
    return integrated_transgression(suspension_loop(u), k + 1)


def rotation_path(G: GroupModel, u: GRingMatrix) -> MatrixPath:
    """Polynomial idempotent path from diag(1, 0) to diag(0, 1) twisted by u.

    p_t = v w^T with v = ((1-t), t u) and w = ((1-t)(1+2t), t(3-2t) u^{-1}); the
    Hermite weights make w^T v = 1 for every t.
    """
    u.require_invertible()
    if u.n != 1:
        raise ValueError("rotation path is built for 1x1 invertibles")
    uu = u.M.rows[0][0]
    ui = u.inverse.rows[0][0]
    T = lambda c, a: PolyForm.scalar(G, c, (a, 0))
    one_minus_t = T(1, 0) + T(-1, 1)
    v1, v2 = one_minus_t, T(1, 1) * uu
    w1 = one_minus_t * (T(1, 0) + T(2, 1))
    w2 = T(3, 1) + T(-2, 2)
    w2 = w2 * ui
    return MatrixPath(G, FormMatrix(G, [[v1 * w1, v1 * w2], [v2 * w1, v2 * w2]]))


# ---------------------------------------------------------------------------
# exactness and calibration


def exact_span(G: GroupModel, degree: int, R: int | None, truncation: int | None = None,
               extra: Iterable[NCForm] = ()) -> Echelon:
    """Echelon of abelianized d(β) for basis β of the given degree inside ball(R)."""
    ech = Echelon(track=True)
    ab = abelianizer_for(G)
    Rt = None if G.is_finite else truncation
    ball = G.ball(R) if not G.is_finite else G.ball()
    nz = [g for g in ball if g != G.identity]
    import itertools
    for g0 in ball:
        for gs in itertools.product(nz, repeat=degree):
            w = NCForm.basis(G, g0, gs).d()
            c = ab.coordinates(w, Rt)
            if c:
                ech.add(c, label=("beta", (g0, gs)))
    for i, w in enumerate(extra):
        ech.add(ab.coordinates(w, Rt), label=("extra", i))
    return ech


def is_d_exact(w: NCForm, R: int | None = None, truncation: int | None = None) -> bool:
    """Whether w is d(β) modulo commutators for β supported in ball(R)."""
    G = w.group
    n = w.degree
    if n == 0:
        return w.is_zero() or not abelianize(w, truncation).coords
    ech = exact_span(G, n - 1, R, truncation)
    c = abelianizer_for(G).coordinates(w, None if G.is_finite else truncation)
    return ech.contains(c)


def calibrate_ck(u: GRingMatrix, k: int, R: int, truncation: int | None = None) -> Scalar:
    """Measure c_k with Ch_{2k+1}(u) = c_k Tr(u^{-1}du (du^{-1}du)^k) in homology.

    Solves suspension_form = c * direct_form + d(β) modulo commutators.
    """
    G = u.group
    S = ch_odd_suspension_form(u, k)
    D = odd_direct_form(u, k)
    ech = exact_span(G, 2 * k, R, truncation)
    Rt = None if G.is_finite else truncation
    ab = abelianizer_for(G)
    if ech.add(ab.coordinates(D, Rt), label="direct") is not None:
        raise ValueError("direct form is exact; c_k cannot be measured on this input")
    sol = ech.solve(ab.coordinates(S, Rt))
    if sol is None:
        raise ValueError("suspension form is not a multiple of the direct form up to exact forms")
    return simplify(sol.get("direct", 0))


# constants measured by calibrate_ck; the calibration tests re-derive them
C_K = {0: Fraction(-1), 1: Fraction(-1, 6)}


def ch_odd_form(u: GRingMatrix, k: int) -> NCForm:
    if k not in C_K:
        raise ValueError(f"c_{k} has not been calibrated")
    return odd_direct_form(u, k).scale(C_K[k])


def ch_odd(u: GRingMatrix, k: int, truncation: int | None = None) -> AbelianizedForm:
    return abelianize(ch_odd_form(u, k), truncation)


# ---------------------------------------------------------------------------
# relative Chern characters


@dataclass
class RelativeChern:
    first: AbelianizedForm
    second: AbelianizedForm
    first_form: NCForm
    second_form: NCForm
    degree: int

    def is_cycle(self, phi=None) -> bool:
        """Closedness for d^Φ(α, β) = (dα, -Φ(α) + dβ)."""
        a, b = self.first_form, self.second_form
        phi_a = a if phi is None else a.map(phi)
        if not self.first.d().is_zero():
            return False
        return (abelianize(b.d() - phi_a, self.second.truncation)).is_zero()


def relative_ch(p0: GRingMatrix, p1: GRingMatrix, q: MatrixPath, k: int, phi=None,
                truncation: int | None = None) -> RelativeChern:
    """(Ch_{2k}(p0) - Ch_{2k}(p1), ∫ transgression of q_t dt)."""
    if k < 1:
        raise ValueError("relative Chern character needs k >= 1")
    img0 = p0.M if phi is None else _map_matrix(p0.M, phi)
    img1 = p1.M if phi is None else _map_matrix(p1.M, phi)
    if q.at(0) != img0 or q.at(1) != img1:
        raise EndpointMismatch("path endpoints are not the images of p0 and p1")
    a = ch_even_form(p0, k) - ch_even_form(p1, k)
    b = integrated_transgression(q, k)
    return RelativeChern(abelianize(a, truncation), abelianize(b, truncation), a, b, 2 * k - 1)


# ---------------------------------------------------------------------------
# Bott double transgression (numerical)


def _gauss_legendre(n: int):
    import numpy as np
    x, w = np.polynomial.legendre.leggauss(n)
    return [(float((xi + 1) / 2), float(wi / 2)) for xi, wi in zip(x, w)]


class BottProjector:
    """2x2 projection (1 + x.σ)/2 over the square, constant near its boundary.

    x is a point of the sphere, the north pole outside the disk of radius
    ``rho`` around the centre and winding once over the sphere inside it.  The
    polar angle is π·ψ(r) with a polynomial step ψ flat to third order at
    both ends.
    """

    def __init__(self, rho: float = 0.4):
        self.rho = rho

    @staticmethod
    def psi(r: float) -> float:
        if r >= 1:
            return 1.0
        return r ** 4 * (35 - 84 * r + 70 * r ** 2 - 20 * r ** 3)

    @staticmethod
    def dpsi(r: float) -> float:
        if r >= 1:
            return 0.0
        return 140 * r ** 3 * (1 - r) ** 3

    def polar(self, r: float, a: float):
        """β, ∂_r β, ∂_a β at polar coordinates (r, a) around the centre."""
        th = math.pi * self.psi(r)
        dth = math.pi * self.dpsi(r)
        st, ct = math.sin(th), math.cos(th)
        x = (st * math.cos(a), st * math.sin(a), ct)
        dxr = (ct * math.cos(a) * dth, ct * math.sin(a) * dth, -st * dth)
        dxa = (-st * math.sin(a), st * math.cos(a), 0.0)
        return _pauli_proj(x, 1.0), _pauli_proj(dxr, 0.0), _pauli_proj(dxa, 0.0)

    def at(self, t: float, s: float):
        c = 0.5
        dx, dy = t - c, s - c
        r = math.hypot(dx, dy) / self.rho
        a = math.atan2(dy, dx)
        return self.polar(r, a)[0]


def _pauli_proj(x, one: float):
    """(one·1 + x.σ)/2 as a 2x2 complex matrix."""
    return [[(one + x[2]) / 2, (x[0] - 1j * x[1]) / 2],
            [(x[0] + 1j * x[1]) / 2, (one - x[2]) / 2]]


def _mm(A, B):
    n = len(A)
    return [[sum(A[i][k] * B[k][j] for k in range(n)) for j in range(n)] for i in range(n)]


def bott_integral(beta: BottProjector | None = None, nr: int = 48, na: int = 32) -> complex:
    """∬ Tr(β dβ dβ) over the square, computed in polar coordinates.

    The map (r, a) -> (t, s) is orientation preserving, and β is constant
    outside the disk, so the integral equals ∫∫ Tr(β[∂_r β, ∂_a β]) dr da.
    """
    beta = beta or BottProjector()
    total = 0j
    for r, wr in _gauss_legendre(nr):
        for j in range(na):
            a = 2 * math.pi * j / na
            B, Br, Ba = beta.polar(r, a)
            C = _mm(B, [[x - y for x, y in zip(r1, r2)] for r1, r2 in zip(_mm(Br, Ba), _mm(Ba, Br))])
            total += (C[0][0] + C[1][1]) * wr * (2 * math.pi / na)
    return total


# Mixed forms: Ω(CΓ) ⊗ Λ(dr, da) with complex float coefficients.  Keys are
# (form key, lam) with lam one of (), (0,), (1,), (0, 1).


def _lam_mul(l1: tuple, l2: tuple):
    if set(l1) & set(l2):
        return None, 0
    seq = l1 + l2
    sign = 1
    if seq == (1, 0):
        seq, sign = (0, 1), -1
    return seq, sign


def _mixed_mul(G: GroupModel, A: dict, B: dict) -> dict:
    from .forms import basis_product
    out: dict = {}
    for (ka, la), ca in A.items():
        for (kb, lb), cb in B.items():
            lam, sg = _lam_mul(la, lb)
            if lam is None:
                continue
            # moving la past the form kb costs (-1)^{|la| |kb|}
            if len(la) % 2 and len(kb[1]) % 2:
                sg = -sg
            for s, k in basis_product(G, ka, kb):
                key = (k, lam)
                out[key] = out.get(key, 0) + sg * s * ca * cb
    return {k: v for k, v in out.items() if v != 0}


def _mixed_mat_mul(G, A, B):
    n = len(A)
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            acc: dict = {}
            for k in range(n):
                for key, v in _mixed_mul(G, A[i][k], B[k][j]).items():
                    acc[key] = acc.get(key, 0) + v
            row.append(acc)
        out.append(row)
    return out


def double_transgression_density(p: GRingMatrix, k: int, B, Br, Ba) -> dict:
    """dr∧da coefficient of (1/k!) Tr(Θ̃^k) for q = p ⊗ β at one point.

    Θ̃ = q Dq Dq with D = d + dr ∂_r + da ∂_a on Ω(CΓ) ⊗ Λ(dr, da).
    """
    G = p.group
    n = p.n
    m = 2 * n
    P = p.M
    dP = P.d()

    def entry(M, i, j):
        return M.rows[i][j].form().terms

    q = [[{} for _ in range(m)] for _ in range(m)]
    Dq = [[{} for _ in range(m)] for _ in range(m)]
    for i in range(n):
        for j in range(n):
            pij = entry(P, i, j)
            dpij = entry(dP, i, j)
            for a in range(2):
                for b in range(2):
                    I_, J_ = 2 * i + a, 2 * j + b
                    cell, dcell = {}, {}
                    for key, c in pij.items():
                        cc = complex(to_complex(c))
                        if B[a][b] != 0:
                            cell[(key, ())] = cc * B[a][b]
                        if Br[a][b] != 0:
                            dcell[(key, (0,))] = dcell.get((key, (0,)), 0) + cc * Br[a][b]
                        if Ba[a][b] != 0:
                            dcell[(key, (1,))] = dcell.get((key, (1,)), 0) + cc * Ba[a][b]
                    for key, c in dpij.items():
                        if B[a][b] != 0:
                            dcell[(key, ())] = dcell.get((key, ()), 0) + complex(to_complex(c)) * B[a][b]
                    q[I_][J_] = cell
                    Dq[I_][J_] = dcell
    theta = _mixed_mat_mul(G, _mixed_mat_mul(G, q, Dq), Dq)
    acc = q if k == 0 else theta
    for _ in range(k - 1):
        acc = _mixed_mat_mul(G, acc, theta)
    out: dict = {}
    for i in range(m):
        for (key, lam), v in acc[i][i].items():
            if lam == (0, 1):
                out[key] = out.get(key, 0) + v / math.factorial(k)
    return out


@dataclass
class BottReport:
    k: int
    lhs: dict
    rhs: dict
    max_error: float
    tolerance: float
    provenance: str

    @property
    def ok(self) -> bool:
        return self.max_error <= self.tolerance


def bott_double_transgression(p: GRingMatrix, k: int, beta: BottProjector | None = None,
                              nr: int = 48, na: int = 32, tol: float = 1e-9) -> BottReport:
    """Compare (2πi)^{-1} ∬ double transgression of p ⊗ β with Ch_{2k-2}(p).

    Both sides are compared coefficientwise as forms of degree 2k - 2.
    """
    p.require_idempotent()
    if k < 1:
        raise ValueError("k must be at least 1")
    beta = beta or BottProjector()
    lhs: dict = {}
    for r, wr in _gauss_legendre(nr):
        for j in range(na):
            a = 2 * math.pi * j / na
            B, Br, Ba = beta.polar(r, a)
            dens = double_transgression_density(p, k, B, Br, Ba)
            for key, v in dens.items():
                lhs[key] = lhs.get(key, 0) + v * wr * (2 * math.pi / na)
    lhs = {key: v / (2j * math.pi) for key, v in lhs.items()}
    rhs = {key: complex(to_complex(c)) for key, c in ch_even_form(p, k - 1).terms.items()}
    keys = set(lhs) | set(rhs)
    err = max((abs(lhs.get(key, 0) - rhs.get(key, 0)) for key in keys), default=0.0)
    return BottReport(k, lhs, rhs, err, tol, f"quadrature(tol={tol:g})")


# ---------------------------------------------------------------------------
# seeded random inputs


def _subgroup_average(G: GroupModel, g) -> dict:
    orbit = [G.identity]
    h = g
    while h != G.identity:
        orbit.append(h)
        h = G.mul(h, g)
    return {x: Fraction(1, len(orbit)) for x in orbit}


def _random_ring_element(G: GroupModel, rng, terms: int = 2) -> dict:
    pool = G.ball() if G.is_finite else G.ball(1)
    out: dict = {}
    for _ in range(terms):
        g = rng.choice(pool)
        out[g] = out.get(g, 0) + rng.choice([-2, -1, 1, 2])
    return {g: c for g, c in out.items() if c}


def _elementary_pair(G: GroupModel, n: int, rng, t_power: int = 0, pairs=None, terms: int = 2) -> tuple:
    i, j = rng.choice(pairs) if pairs else rng.sample(range(n), 2)
    a = PolyForm(G, {(t_power, 0): {(g, ()): c for g, c in _random_ring_element(G, rng, terms).items()}})
    return _elem(G, n, i, j, a), _elem(G, n, i, j, -a)


def _diagonal_idempotent(G: GroupModel, n: int, rng) -> FormMatrix:
    """Diagonal idempotent built from subgroup averages; its first two entries always differ."""
    nontrivial = [g for g in G.ball() if g != G.identity] if G.is_finite else []
    rows = [[PolyForm(G) for _ in range(n)] for _ in range(n)]
    for i in range(n):
        r = rng.random()
        if nontrivial and (i == 0 or (i > 1 and r < 0.4)):
            rows[i][i] = _as_entry(G, _subgroup_average(G, rng.choice(nontrivial)))
        elif (i == 1 and r < 0.85) or (i > 1 and r < 0.7):
            rows[i][i] = PolyForm.scalar(G, 1)
    return FormMatrix(G, rows)


def _mixing_pairs(M: FormMatrix) -> list:
    n = M.n
    return [(i, j) for i in range(n) for j in range(n) if i != j and M.rows[i][i] != M.rows[j][j]]


def random_idempotent(G: GroupModel, n: int, rng, conjugations: int = 2) -> GRingMatrix:
    """``V e V^-1`` for a diagonal idempotent ``e`` and elementary factors ``V``.

    Factors alternate between the two orientations of a mixing pair; a
    triangular conjugate alone would leave the Chern forms unchanged.

    The result is certified: its square is checked exactly.
    """
    if not G.is_finite:
        raise ValueError("random idempotents are drawn over finite groups")
    M = _diagonal_idempotent(G, n, rng)
    pairs = _mixing_pairs(M)
    if n > 1:
        i, j = rng.choice(pairs)
        for c in range(conjugations):
            V, Vi = _elementary_pair(G, n, rng, pairs=[(i, j) if c % 2 == 0 else (j, i)])
            M = V * M * Vi
    out = GRingMatrix.__new__(GRingMatrix)
    out.group = G
    out.M = M
    out.inverse = None
    return out.require_idempotent()


def random_idempotent_path(G: GroupModel, n: int, rng) -> MatrixPath:
    """``V_t e V_t^-1`` with ``V_t = E_ij(t a)``: a polynomial idempotent path of size ``n >= 2``."""
    if n < 2:
        raise ValueError("polynomial paths by elementary conjugation need n >= 2")
    e = _diagonal_idempotent(G, n, rng)
    i, j = rng.choice(_mixing_pairs(e))
    U, Ui = _elementary_pair(G, n, rng, pairs=[(j, i)])
    V, Vi = _elementary_pair(G, n, rng, t_power=1, pairs=[(i, j)], terms=1)
    return MatrixPath(G, V * U * e * Ui * Vi).require_idempotent()
