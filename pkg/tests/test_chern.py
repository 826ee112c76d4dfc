import cmath
import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from rhocalc.chern import (C_K, FormMatrix, GRingMatrix, MatrixPath, PolyForm, abelianize_poly,
                           bott_double_transgression, bott_integral, calibrate_ck, ch_even,
                           ch_even_form, ch_odd, ch_odd_form, integrated_transgression, is_d_exact,
                           lmp_integrand, random_idempotent, random_idempotent_path, relative_ch,
                           rotation_path, suspension_loop, transgression, transgression_defect, transgression_identity)
from rhocalc.errors import EndpointMismatch, UncertifiedInput
from rhocalc.forms import NCForm, abelianize
from rhocalc.groups import CyclicGroup, FreeAbelianGroup, GroupHom, symmetric_group

Z2, Z4 = CyclicGroup(2), CyclicGroup(4)
S3 = symmetric_group(3)
Z = FreeAbelianGroup(1)
HALF = Fraction(1, 2)

G1, GI = (1,), (-1,)
U_G = GRingMatrix(Z, [[{G1: 1}]], inverse=[[{GI: 1}]])
U_BLOCK = GRingMatrix(Z, [[{G1: 1}, 0], [0, 1]], inverse=[[{GI: 1}, 0], [0, 1]])
P_HALF = GRingMatrix(Z2, [[{0: HALF, 1: HALF}]])


def _sign_hom():
    odd = set(S3.conjugacy_class(S3.parse("(12)")).members)
    return GroupHom(S3, Z2, lambda g: 1 if g in odd else 0)


def test_certification():
    with pytest.raises(UncertifiedInput):
        ch_even_form(GRingMatrix(Z2, [[{1: 1}]]), 1)
    with pytest.raises(UncertifiedInput):
        ch_odd_form(GRingMatrix(Z, [[{G1: 1}]]), 0)
    with pytest.raises(UncertifiedInput):
        ch_odd_form(GRingMatrix(Z, [[{G1: 1}]], inverse=[[{G1: 1}]]), 0)


def test_ch_even_examples():
    one = GRingMatrix(Z2, [[1]])
    for k in (1, 2):
        assert ch_even_form(one, k).is_zero()
    assert ch_even_form(one, 0) == NCForm.one(Z2)
    w = ch_even_form(P_HALF, 1)
    dg = NCForm.basis(Z2, 0, (1,))
    ref = (NCForm.one(Z2) + NCForm.element(Z2, 1)) * dg * dg * Fraction(1, 8)
    assert w == ref
    assert not ch_even(P_HALF, 1).is_zero()


def test_additivity_and_unit_summand():
    rng = random.Random(3)
    p, q = random_idempotent(S3, 2, rng), random_idempotent(S3, 1, rng)
    for k in (0, 1, 2):
        assert ch_even_form(p.block_sum(q), k) == ch_even_form(p, k) + ch_even_form(q, k)
    scalar = GRingMatrix(S3, [[1, 0], [0, 0]])
    for k in (1, 2):
        assert ch_even_form(p.block_sum(scalar), k) == ch_even_form(p, k)


@pytest.mark.parametrize("G,n", [(Z2, 2), (Z2, 3), (S3, 2), (S3, 3)])
def test_ch_even_closed(G, n):
    rng = random.Random(11 + n)
    for _ in range(3):
        p = random_idempotent(G, n, rng)
        for k in (1, 2):
            assert ch_even(p, k).d().is_zero()


def test_ch_odd_examples():
    one = GRingMatrix(Z, [[1]], inverse=[[1]])
    assert ch_odd_form(one, 0).is_zero() and ch_odd_form(one, 1).is_zero()
    assert ch_odd_form(U_G, 0) == NCForm.basis(Z, GI, (G1,), C_K[0])
    w = ch_odd_form(U_G, 1)
    assert w == NCForm.basis(Z, GI, (G1, GI, G1), C_K[1])
    a = ch_odd(U_G, 1, 4)
    assert not a.is_zero()
    assert a.d().is_zero()


def test_ch_odd_closed_block():
    for k in (0, 1):
        assert ch_odd(U_BLOCK, k, 4).d().is_zero()


def test_transgression_constant_path():
    p = random_idempotent(S3, 2, random.Random(5))
    path = MatrixPath.constant(p)
    assert transgression(path, 1).is_zero() and transgression(path, 2).is_zero()


def test_transgression_identity_s3():
    rng = random.Random(2024)
    nontrivial = 0
    for _ in range(4):
        path = random_idempotent_path(S3, 2, rng)
        for k in (1, 2):
            assert not transgression_defect(path, k)
            nontrivial += bool(abelianize_poly(transgression(path, k)))
    assert nontrivial > 0


def test_transgression_matches_lmp_integrand():
    rng = random.Random(2024)
    for _ in range(4):
        path = random_idempotent_path(S3, 2, rng)
        for k in (1, 2):
            assert not abelianize_poly(transgression(path, k) + lmp_integrand(path, k))


def test_integrated_transgression_equals_endpoint_difference():
    rng = random.Random(9)
    for _ in range(3):
        path = random_idempotent_path(S3, 2, rng)
        for k in (1, 2):
            lhs = ch_even_form(path.endpoint(1), k) - ch_even_form(path.endpoint(0), k)
            rhs = integrated_transgression(path, k).d()
            assert abelianize(lhs + rhs).is_zero()


def test_z2_transgressions_vanish():
    # C[Z/2] is commutative and splits as C + C, so its paths carry no odd classes
    rng = random.Random(4)
    for _ in range(3):
        path = random_idempotent_path(Z2, 2, rng)
        assert transgression_identity(path, 1)
        assert not abelianize_poly(transgression(path, 1))


def test_non_idempotent_path_rejected():
    T = PolyForm.scalar(Z2, 1, (1, 0))
    path = MatrixPath(Z2, FormMatrix(Z2, [[T]]))
    with pytest.raises(UncertifiedInput):
        transgression(path, 1)


def test_relative_trivial():
    p = random_idempotent(S3, 2, random.Random(1))
    rc = relative_ch(p, p, MatrixPath.constant(p), 1)
    assert rc.first.is_zero() and rc.second.is_zero()
    q = random_idempotent(S3, 2, random.Random(2))
    with pytest.raises(EndpointMismatch):
        relative_ch(p, q, MatrixPath.constant(p), 1)


def test_relative_loop_is_exact():
    # the suspension loop of a group commutator returns to its base point
    g, h = S3.parse("(12)"), S3.parse("(13)")
    c = S3.prod([g, h, S3.inv(g), S3.inv(h)])
    u = GRingMatrix(S3, [[{c: 1}]], inverse=[[{S3.inv(c): 1}]])
    base = GRingMatrix(S3, [[1, 0], [0, 0]])
    rc = relative_ch(base, base, suspension_loop(u), 1)
    assert rc.first.is_zero()
    assert not rc.second_form.is_zero()
    assert is_d_exact(rc.second_form)


def test_suspension_loop_of_generator_is_not_exact():
    base = GRingMatrix(Z, [[1, 0], [0, 0]])
    rc = relative_ch(base, base, suspension_loop(U_G), 1, truncation=6)
    assert not rc.second.is_zero()
    assert not is_d_exact(rc.second_form, R=4, truncation=6)


def test_relative_rotation_nonzero():
    e0 = GRingMatrix(Z, [[1, 0], [0, 0]])
    e1 = GRingMatrix(Z, [[0, 0], [0, 1]])
    path = rotation_path(Z, U_G)
    assert path.is_idempotent_path()
    rc = relative_ch(e0, e1, path, 1, truncation=4)
    assert rc.second.degree == 1
    assert not rc.second.is_zero()
    assert rc.second_form == NCForm.basis(Z, GI, (G1,), -HALF) + NCForm.basis(Z, G1, (GI,), HALF)
    assert rc.is_cycle()


def test_similarity_invariance():
    rng = random.Random(8)
    g, h = S3.parse("(12)"), S3.parse("(123)")
    z = GRingMatrix(S3, [[1, {g: 1}], [0, 1]], inverse=[[1, {g: -1}], [0, 1]])
    w = GRingMatrix(S3, [[1, 0], [{h: 2}, 1]], inverse=[[1, 0], [{h: -2}, 1]])
    zw = GRingMatrix(S3, (z.M * w.M).rows, inverse=(w.inverse * z.inverse).rows)
    for _ in range(2):
        p = random_idempotent(S3, 2, rng)
        q = p.conjugate(zw).require_idempotent()
        assert ch_even_form(p, 1) != ch_even_form(q, 1)
        assert is_d_exact(ch_even_form(q, 1) - ch_even_form(p, 1))


def test_functoriality():
    hom = _sign_hom()
    assert hom.check()
    rng = random.Random(6)
    for _ in range(3):
        p = random_idempotent(S3, 2, rng)
        for k in (0, 1, 2):
            assert ch_even_form(p.map(hom), k) == ch_even_form(p, k).map(hom)
    path = random_idempotent_path(S3, 2, rng)
    assert transgression(path.map(hom), 1) == transgression(path, 1).map_forms(lambda w: w.map(hom))


def test_bott_scalar():
    val = bott_integral() / (2j * math.pi)
    assert abs(val - 1) < 1e-9


def test_bott_examples():
    rep = bott_double_transgression(P_HALF, 1)
    assert rep.ok and rep.max_error < 1e-9
    rep = bott_double_transgression(GRingMatrix(Z2, [[1]]), 2)
    assert rep.max_error < 1e-9 and not rep.rhs
    assert all(abs(v) < 1e-9 for v in rep.lhs.values())


def test_calibration_constants():
    assert calibrate_ck(U_G, 0, 4, 4) == C_K[0] == -1
    assert calibrate_ck(U_BLOCK, 0, 4, 4) == C_K[0]


def test_calibration_c1():
    assert calibrate_ck(U_G, 1, 3) == C_K[1] == Fraction(-1, 6)
    assert calibrate_ck(U_BLOCK, 1, 3) == C_K[1]


@settings(max_examples=15)
@given(st.integers(0, 10**6), st.sampled_from([Z2, Z4, S3]), st.integers(1, 3))
def test_random_idempotents_closed(seed, G, n):
    p = random_idempotent(G, n, random.Random(seed))
    assert p.is_idempotent()
    assert ch_even(p, 1).d().is_zero()
