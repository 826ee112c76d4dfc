import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from rhocalc.errors import IncompatibleModels, TruncationOverflow
from rhocalc.forms import NCForm, abelianize, e_part
from rhocalc.groups import CyclicGroup, FreeAbelianGroup, symmetric_group
from rhocalc.kernels import (CoveringModel, EqKernel, XForm, curvature, graded_commutator,
                             kernel_identities, lott_connection, random_kernel, random_xform,
                             str_del, tr_del, tr_lott, trace_equal, x_extended_trace)

Z2, Z4 = CyclicGroup(2), CyclicGroup(4)
S3 = symmetric_group(3)
Z = FreeAbelianGroup(1)
seeds = st.integers(0, 10**6)


def smooth(G, n=2, seed=0, **kw):
    return CoveringModel(G, n, **kw).two_translate_cutoff(random.Random(seed))


def test_model_validation():
    with pytest.raises(ValueError):
        CoveringModel(Z4, 2, cutoff=({0: Fraction(1, 2)}, {0: 1}))
    with pytest.raises(ValueError):
        CoveringModel(Z4, 2, weights=(1, 0))
    with pytest.raises(ValueError):
        CoveringModel(Z, 2)
    m = smooth(Z4, 3, 1)
    for f in range(3):
        assert sum(m.cutoff[f].values()) == 1


def test_unit_and_translations():
    m = CoveringModel(S3, 3, weights=(1, Fraction(1, 2), 3))
    K = random_kernel(m, random.Random(1), 1)
    one = m.identity()
    assert one * K == K and K * one == K
    a, b = S3.parse("(12)"), S3.parse("(123)")
    assert EqKernel.translation(m, a) * EqKernel.translation(m, b) == EqKernel.translation(m, S3.mul(a, b))


@given(seeds)
def test_associativity(seed):
    rng = random.Random(seed)
    m = smooth(Z2, 2, seed)
    A, B, C = (random_kernel(m, rng, rng.randint(0, 1)) for _ in range(3))
    assert (A * B) * C == A * (B * C)


def test_incompatible_models():
    A = CoveringModel(Z4, 2).identity()
    B = CoveringModel(Z4, 3).identity()
    with pytest.raises(IncompatibleModels):
        A * B


def test_truncation_overflow():
    m = CoveringModel(Z, 1, radius=2)
    with pytest.raises(TruncationOverflow):
        EqKernel.translation(m, (3,))


def test_lott_on_multiplication_operators():
    m = smooth(S3, 3, 4)
    D = EqKernel.diagonal(m, [1, Fraction(2, 3), -5])
    assert lott_connection(D).is_zero()


def test_lott_on_translation():
    m = smooth(Z4, 2, 2)
    T = EqKernel.translation(m, 1)
    nab = lott_connection(T)
    assert not nab.is_zero()
    assert nab.degree == 1
    assert not tr_del(nab).is_zero()
    # the indicator cutoff has no connection form, leaving only dT
    flat = EqKernel.translation(CoveringModel(Z4, 2), 1)
    assert lott_connection(flat) == flat.d()


@given(seeds)
def test_leibniz(seed):
    rng = random.Random(seed)
    m = smooth(Z4, 2, seed)
    A, B = random_kernel(m, rng, rng.randint(0, 1)), random_kernel(m, rng, rng.randint(0, 1))
    s = -1 if A.degree % 2 else 1
    assert lott_connection(A * B) == lott_connection(A) * B + (A * lott_connection(B)).scale(s)


def test_curvature_examples():
    assert curvature(CoveringModel(CyclicGroup(1), 2)).is_zero()
    assert curvature(CoveringModel(Z2, 2)).is_zero()
    a = Fraction(1, 3)
    m = CoveringModel(Z2, 1, weights=(2,), cutoff=({0: 1 - a, 1: a},))
    Th = curvature(m)
    # only mu = e, nu = g survives: h(e) h(g) dg dg / w
    assert Th.entries == {(0, 0): NCForm.basis(Z2, 0, (1, 1), a * (1 - a) / 2)}
    assert lott_connection(Th).is_zero()
    assert lott_connection(curvature(smooth(S3, 3, 5))).is_zero()


@pytest.mark.parametrize("G", [Z4, S3])
def test_nabla_squared(G):
    rng = random.Random(3)
    m = smooth(G, 2, 3)
    Th = curvature(m)
    assert not Th.is_zero()
    for _ in range(5):
        T = random_kernel(m, rng, rng.randint(0, 1))
        assert lott_connection(lott_connection(T)) == Th * T - T * Th


def test_trace_examples():
    m = CoveringModel(S3, 3)
    assert tr_lott(m.identity()) == NCForm.element(S3, S3.identity, 3)
    g = S3.parse("(13)")
    assert tr_lott(EqKernel.translation(m, g)) == NCForm.element(S3, g, 3)
    assert tr_del(EqKernel.translation(m, g)) == NCForm.element(S3, g, 3)
    assert tr_del(EqKernel.diagonal(m, [1, 2, 3])).is_zero()


@given(seeds)
def test_trace_property(seed):
    rng = random.Random(seed)
    m = smooth(S3, 2, seed)
    A, B = random_kernel(m, rng, rng.randint(0, 2)), random_kernel(m, rng, rng.randint(0, 1))
    c = graded_commutator(A, B)
    assert abelianize(tr_lott(c)).is_zero()
    assert abelianize(tr_del(c)).is_zero()


@given(seeds)
def test_trace_split(seed):
    rng = random.Random(seed)
    T = random_kernel(smooth(S3, 3, seed), rng, rng.randint(0, 2))
    assert tr_lott(T) == e_part(tr_lott(T)) + tr_del(T)


@given(seeds)
def test_d_trace_commutes_with_connection(seed):
    rng = random.Random(seed)
    m = smooth(Z4, 2, seed)
    T = random_kernel(m, rng, rng.randint(0, 2))
    assert trace_equal(tr_del(T).d(), tr_del(lott_connection(T)))


@given(seeds)
def test_fundamental_domain_independence(seed):
    rng = random.Random(seed)
    m = smooth(S3, 2, seed)
    T = random_kernel(m, rng, rng.randint(0, 1))
    shifts = [rng.choice(S3.ball()) for _ in range(2)]
    assert trace_equal(tr_del(T.conjugate_by_elements(shifts)), tr_del(T))
    alt = m.two_translate_cutoff(rng)
    T_alt = EqKernel(alt, T.entries, T.degree)
    assert trace_equal(tr_del(lott_connection(T)), tr_del(lott_connection(T_alt)))


def test_x_trace_examples():
    m = smooth(Z4, 2, 7)
    rng = random.Random(7)
    T = random_kernel(m, rng, 1)
    assert x_extended_trace(XForm.build(m, 2, T12=T)).is_zero()
    assert x_extended_trace(XForm.build(m, 2, T21=T)).is_zero()
    triv = CoveringModel(CyclicGroup(1), 2)
    assert x_extended_trace(XForm.build(triv, 2, T22=triv.identity())).is_zero()


@given(seeds, st.integers(0, 2))
def test_x_differential_squares_to_zero(seed, deg):
    rng = random.Random(seed)
    m = smooth(Z4, 2, seed)
    W = random_xform(m, rng, deg)
    assert W.d().d().is_zero()


@given(seeds, st.integers(0, 2))
def test_x_trace_chain_map(seed, deg):
    rng = random.Random(seed)
    m = smooth(S3, 2, seed)
    W = random_xform(m, rng, deg)
    assert trace_equal(x_extended_trace(W.d()), x_extended_trace(W).d())


@given(seeds)
def test_x_leibniz(seed):
    rng = random.Random(seed)
    m = smooth(Z4, 2, seed)
    A, B = random_xform(m, rng, rng.randint(0, 1)), random_xform(m, rng, rng.randint(0, 1))
    s = -1 if A.degree % 2 else 1
    assert (A * B).d() == A.d() * B + (A * B.d()).scale(s)


def test_multiplication_operators_trace_to_zero():
    rng = random.Random(2)
    m = smooth(S3, 3, 2)
    for _ in range(5):
        D1 = XForm.of(EqKernel.diagonal(m, [rng.randint(-3, 3) for _ in range(3)]))
        D2 = XForm.of(EqKernel.diagonal(m, [rng.randint(-3, 3) for _ in range(3)]))
        for W in (D1, D1 * D2.d(), D1.d() * D2.d(), D1 * D2.d() * D2.d()):
            assert abelianize(x_extended_trace(W)).is_zero()


def test_supertrace():
    m = CoveringModel(Z4, 2)
    T = EqKernel.translation(m, 1)
    graded = EqKernel(m, T.entries, 0, (0, 1))
    assert str_del(graded).is_zero()
    graded = EqKernel(m, {(0, 0): NCForm.element(Z4, 2)}, 0, (0, 1))
    assert str_del(graded) == NCForm.element(Z4, 2)
    with pytest.raises(ValueError):
        str_del(T)


@pytest.mark.parametrize("model", [CoveringModel(Z4, 3), CoveringModel(Z, 2, radius=6)])
def test_kernel_identities(model):
    reps = kernel_identities(model, random.Random(0), trials=10)
    assert len(reps) == 5
    for r in reps:
        assert r.ok, (r.name, r.failures[:1])
        assert r.checked > 0


def test_json_roundtrip():
    m = smooth(S3, 2, 3)
    assert CoveringModel.from_json(S3, m.to_json()) == m
    K = random_kernel(m, random.Random(4), 2)
    assert EqKernel.from_json(m, K.to_json()) == K
    lit = {"entries": [{"gamma": "(12)", "f1": 0, "f2": 1, "form": [{"coef": "1/2"}]}]}
    K = EqKernel.from_json(m, lit)
    assert K.entry(0, 1) == NCForm.element(S3, S3.parse("(12)"), Fraction(1, 2))
