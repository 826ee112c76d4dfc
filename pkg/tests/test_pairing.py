import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from rhocalc.errors import (ClassMismatch, CocycleCheckFailure, DegreeMismatch, NonInvolution,
                            UncertifiedInput)
from rhocalc.forms import NCForm, key_product
from rhocalc.groups import CyclicGroup, symmetric_group
from rhocalc.kernels import CoveringModel, EqKernel
from rhocalc.pairing import (DelCocycle, ProjectionKernel, add_coboundary, build_tau_from_cocycle,
                             ch_del_graded_degree1, ch_del_projection, cyclic_idempotents,
                             delocalized_trace, direct_terms, elementary_kernel, eta_sum, eta_terms,
                             group_ring_kernel, normalized_cyclic_cocycles, pair, pair_duality,
                             pair_graded_degree1, product_cocycle, random_cyclic_cochain,
                             random_graded_involution, random_projection)
from rhocalc.scalars import GaussianRational

Z2, Z4 = CyclicGroup(2), CyclicGroup(4)
S3 = symmetric_group(3)
HALF = Fraction(1, 2)


def model(G, seed, n=2):
    return CoveringModel(G, n, (1, HALF, 3)[:n]).two_translate_cutoff(random.Random(seed))


def half_projection():
    m = CoveringModel(Z2, 1)
    return ProjectionKernel(EqKernel.from_group_ring(m, [[{0: HALF, 1: HALF}]]))


def test_ch_del_examples():
    P = half_projection()
    assert ch_del_projection(P, 0) == NCForm.element(Z2, 1, HALF)
    assert pair(delocalized_trace(Z2, 1), P, 0) == HALF
    local = ProjectionKernel(EqKernel.diagonal(model(S3, 2, 3), [1, 0, 1]))
    for k in (0, 1, 2):
        assert ch_del_projection(local, k).is_zero()


def test_ch_del_is_delocalized_and_closed():
    rng = random.Random(4)
    for G in (Z4, S3):
        P = random_projection(model(G, 4), rng, conjugations=2)
        for k in (0, 1):
            w = ch_del_projection(P, k)
            assert w.degree in (2 * k, 0) and all(key_product(G, t) != G.identity for t in w.terms)
        from rhocalc.kernels import trace_equal
        assert trace_equal(ch_del_projection(P, 1).d(), NCForm.zero(G))


def test_projection_certification():
    m = CoveringModel(Z2, 1)
    with pytest.raises(UncertifiedInput):
        ProjectionKernel(EqKernel.from_group_ring(m, [[{0: 1, 1: 1}]]))
    P = half_projection()
    V, Vi = EqKernel.translation(m, 1), EqKernel.translation(m, 0)
    with pytest.raises(UncertifiedInput):
        P.conjugate(V, Vi)


def test_cyclic_idempotents():
    for G, g in ((Z4, 1), (Z4, 2), (S3, S3.parse("(123)")), (S3, S3.parse("(12)"))):
        ids = cyclic_idempotents(G, g)
        m = CoveringModel(G, 1)
        kers = [group_ring_kernel(m, [E]) for E in ids]
        total = kers[0]
        for K in kers[1:]:
            total = total + K
        assert total == m.identity()
        for i, A in enumerate(kers):
            for j, B in enumerate(kers):
                assert A * B == (A if i == j else EqKernel.zero(m))
    assert any(isinstance(c, GaussianRational) for E in cyclic_idempotents(Z4, 1) for c in E.values())


CASES = [(Z4, 1), (Z4, 2), (Z4, 3), (S3, "(12)"), (S3, "(123)")]


@pytest.mark.parametrize("G,x", CASES)
def test_pair_matches_duality_on_cocycles(G, x):
    x = G.parse(x) if isinstance(x, str) else x
    nonzero = 0
    for k in (0, 1):
        m = model(G, k)
        zs = normalized_cyclic_cocycles(G, x, 2 * k)
        assert zs
        for s in range(2):
            P = random_projection(m, random.Random(s), conjugations=2)
            ch = ch_del_projection(P, k)
            for z in zs:
                a = pair(z, P, k)
                assert a == pair_duality(z, ch)
                nonzero += a != 0
    if x != S3.parse("(123)") or G is not S3:
        assert nonzero


def test_pair_matches_duality_degree_four():
    x = S3.parse("(12)")
    P = random_projection(model(S3, 2), random.Random(0), conjugations=2)
    ch = ch_del_projection(P, 2)
    vals = [(pair(z, P, 2), pair_duality(z, ch)) for z in normalized_cyclic_cocycles(S3, x, 4)[:20]]
    assert all(a == b for a, b in vals)


def test_frozen_pairings():
    # values agreed on by both routes, frozen as regression anchors
    x = S3.parse("(12)")
    P = random_projection(model(S3, 1), random.Random(0), conjugations=2)
    vals = {pair(z, P, 1) for z in normalized_cyclic_cocycles(S3, x, 2)}
    assert vals == {0, Fraction(-1, 4)}
    P = random_projection(model(Z4, 1), random.Random(0), conjugations=2)
    assert [pair(z, P, 1) for z in normalized_cyclic_cocycles(Z4, 1, 2)] == [Fraction(-3, 32), Fraction(-1, 16)]
    assert ch_del_projection(P, 0) == NCForm(Z4, {(g, ()): Fraction(-1, 4) for g in (1, 2, 3)})


@settings(max_examples=20)
@given(st.integers(0, 10**6), st.sampled_from([(Z4, 1), (Z4, 2), (S3, "(12)"), (S3, "(123)")]),
       st.integers(0, 1))
def test_pair_matches_duality_on_cochains(seed, case, k):
    G, x = case
    x = G.parse(x) if isinstance(x, str) else x
    rng = random.Random(seed)
    P = random_projection(model(G, seed), rng, conjugations=2)
    tau = random_cyclic_cochain(G, 2 * k, x, rng, terms=5)
    assert pair(tau, P, k) == pair_duality(tau, ch_del_projection(P, k))


@pytest.mark.parametrize("G,x", [(Z4, 1), (Z4, 2), (S3, "(12)"), (S3, "(123)")])
def test_eta_term_by_term(G, x):
    x = G.parse(x) if isinstance(x, str) else x
    for s in range(3):
        P = random_projection(model(G, s), random.Random(s), conjugations=2)
        tau = delocalized_trace(G, x)
        assert direct_terms(tau, P) == eta_terms(tau, P)
        assert pair(tau, P, 0) == eta_sum(tau, P) == sum(eta_terms(tau, P).values())


def test_local_projection_pairs_to_zero():
    m = model(S3, 3, 3)
    local = ProjectionKernel(EqKernel.diagonal(m, [1, 0, 1]))
    x = S3.parse("(12)")
    for k in (0, 1):
        for z in normalized_cyclic_cocycles(S3, x, 2 * k):
            assert pair(z, local, k) == 0
    assert pair(product_cocycle(S3, x, 0), local, 0) == 0


@pytest.mark.parametrize("G,x", [(Z4, 1), (S3, "(12)")])
def test_cohomologous_invariance(G, x):
    x = G.parse(x) if isinstance(x, str) else x
    rng = random.Random(3)
    P = random_projection(model(G, 3), rng, conjugations=2)
    for z in normalized_cyclic_cocycles(G, x, 2):
        sigma = random_cyclic_cochain(G, 1, x, rng, terms=4)
        shifted = add_coboundary(z, sigma)
        assert shifted.certificate()["closed"]
        assert pair(shifted, P, 1) == pair(z, P, 1)


@pytest.mark.parametrize("G,x", [(Z4, 1), (S3, "(12)")])
def test_homotopy_invariance(G, x):
    x = G.parse(x) if isinstance(x, str) else x
    rng = random.Random(5)
    m = model(G, 5)
    P = random_projection(m, rng, conjugations=1)
    g = [h for h in G.ball() if h != G.identity][0]
    # P_t = V_t P V_t^-1 with V_t = 1 + t N is a polynomial path of projections
    V, Vi = elementary_kernel(m, 0, 1, {g: HALF})
    P1 = P.conjugate(V, Vi)
    assert P1.P != P.P
    for k in (0, 1):
        for z in normalized_cyclic_cocycles(G, x, 2 * k):
            assert pair(z, P1, k) == pair(z, P, k)


def test_build_tau_examples():
    tau = build_tau_from_cocycle(lambda t: 1, 2, 0, Z4)
    assert all(tau((g,)) == (1 if g == 2 else 0) for g in Z4.ball())
    x = S3.parse("(12)")
    tau = build_tau_from_cocycle(lambda t: 1, x, 0, S3)
    assert all(tau((g,)) == (1 if g in S3.conjugacy_class(x).members else 0) for g in S3.ball())
    # abelian groups: every y_i is e, so tau is the cocycle read off slots 1..m
    tau = build_tau_from_cocycle(lambda t: 0, 1, 1, Z4)
    assert all(tau((a, b)) == 0 for a in Z4.ball() for b in Z4.ball())
    # the only 1-cocycle on the order-3 centralizer is zero; a non-cocycle is refused
    y = S3.parse("(123)")
    assert build_tau_from_cocycle(lambda t: 0, y, 1, S3).certificate()["closed"]
    with pytest.raises(CocycleCheckFailure):
        build_tau_from_cocycle(lambda t: 1, y, 1, S3)


def test_cocycle_certificate():
    x = S3.parse("(12)")
    for z in normalized_cyclic_cocycles(S3, x, 2):
        cert = z.certificate()
        assert cert["cyclic"] and cert["closed"]
    bad = random_cyclic_cochain(S3, 2, x, random.Random(0), terms=3)
    assert bad.certificate()["cyclic"] and not bad.certificate()["closed"]
    with pytest.raises(CocycleCheckFailure):
        bad.require_cocycle()


def test_errors():
    with pytest.raises(ClassMismatch):
        delocalized_trace(Z4, 0)
    P = half_projection()
    with pytest.raises(DegreeMismatch):
        pair(delocalized_trace(Z2, 1), P, 1)
    with pytest.raises(DegreeMismatch):
        product_cocycle(Z2, 1, 1)
    with pytest.raises(DegreeMismatch):
        pair_duality(delocalized_trace(Z2, 1), NCForm.basis(Z2, 0, (1,)))


def test_graded_examples():
    m = CoveringModel(S3, 2)
    swap = EqKernel(m, {(0, 1): NCForm.element(S3, S3.identity), (1, 0): NCForm.element(S3, S3.identity)},
                    0, (0, 1))
    x = S3.parse("(12)")
    tau = random_cyclic_cochain(S3, 1, x, random.Random(0), terms=6)
    assert pair_graded_degree1(swap, tau) == 0
    rng = random.Random(1)
    mm = model(S3, 1, 2)
    S = random_graded_involution(mm, rng)
    zero = DelCocycle(S3, 1, x, lambda t: 0)
    assert pair_graded_degree1(S, zero) == 0
    with pytest.raises(NonInvolution):
        pair_graded_degree1(EqKernel(m, swap.entries, 0, (0, 0)), tau)
    with pytest.raises(NonInvolution):
        pair_graded_degree1(EqKernel(m, {(0, 1): NCForm.element(S3, S3.identity, 2),
                                         (1, 0): NCForm.element(S3, S3.identity)}, 0, (0, 1)), tau)
    with pytest.raises(DegreeMismatch):
        pair_graded_degree1(S, delocalized_trace(S3, x))


def _graded_instance(seed):
    rng = random.Random(seed)
    m = CoveringModel(S3, 4, (1, 2, 1, HALF)).two_translate_cutoff(rng)
    S = random_graded_involution(m, rng)
    tau = random_cyclic_cochain(S3, 1, S3.parse("(12)"), rng, terms=6)
    return S, tau


@pytest.mark.parametrize("seed,value", [(2, Fraction(-79, 480)), (5, Fraction(133, 288)),
                                        (7, Fraction(-13, 24)), (9, Fraction(-9, 512))])
def test_graded_degree1_routes_agree(seed, value):
    S, tau = _graded_instance(seed)
    assert pair_graded_degree1(S, tau) == value
    assert pair_duality(tau, ch_del_graded_degree1(S)) == value


def test_graded_cocycles_pair_to_zero():
    # HC^1 vanishes at every class of a finite group, so degree-1 cocycles pair to zero
    for x in ("(12)", "(123)"):
        zs = normalized_cyclic_cocycles(S3, S3.parse(x), 1)
        assert zs
        for seed in range(3):
            rng = random.Random(seed)
            m = CoveringModel(S3, 4, (1, 2, 1, HALF)).two_translate_cutoff(rng)
            S = random_graded_involution(m, rng)
            ch = ch_del_graded_degree1(S)
            for z in zs:
                assert pair_graded_degree1(S, z) == 0 == pair_duality(z, ch)
