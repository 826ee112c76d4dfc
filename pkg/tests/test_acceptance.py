"""Acceptance run: one test per criterion, each with its own time limit.

Every criterion appends a PASS or FAIL line to ``RESULTS``; the lines are
printed live with ``-s`` and repeated in the terminal summary.
"""

import math
import random
import time
from fractions import Fraction

from rhocalc.alexander_spanier import (as_delta, b_cochain, check_as_homotopy, norm_bound_holds,
                                       random_chi, random_local_kernel, tau_chi)
from rhocalc.chern import (C_K, GRingMatrix, abelianize_poly, bott_double_transgression, bott_integral,
                           calibrate_ck, ch_even_form, random_idempotent, random_idempotent_path,
                           transgression, transgression_defect)
from rhocalc.cyclic import (check_homotopy_identity, cyclic_dims, cyclic_total_slice, hochschild_dims,
                            stabilized_homology)
from rhocalc.forms import abelianize
from rhocalc.groups import CyclicGroup, FreeAbelianGroup, symmetric_group
from rhocalc.kernels import CoveringModel, kernel_identities, random_kernel
from rhocalc.pairing import (ch_del_projection, delocalized_trace, direct_terms, eta_sum, eta_terms,
                             normalized_cyclic_cocycles, pair, pair_duality, random_projection)

Z2, Z3, Z4 = CyclicGroup(2), CyclicGroup(3), CyclicGroup(4)
S3 = symmetric_group(3)
Z = FreeAbelianGroup(1)
HALF = Fraction(1, 2)

RESULTS = []


def criterion(n, title, limit, body):
    start = time.perf_counter()
    try:
        detail = body()
        elapsed = time.perf_counter() - start
        ok = elapsed <= limit
        note = detail or ""
        if not ok:
            note = f"too slow ({elapsed:.1f}s > {limit}s)"
    except AssertionError as exc:
        elapsed, ok, note = time.perf_counter() - start, False, str(exc).splitlines()[0] if str(exc) else ""
    line = f"criterion {n:>2} {'PASS' if ok else 'FAIL'} {elapsed:6.1f}s  {title}" + (f"  [{note}]" if note else "")
    RESULTS.append(line)
    print("\n" + line)
    assert ok, line


def test_c01_hochschild_dimensions():
    def body():
        for G, want in ((Z2, (2, 0, 0, 0, 0)), (S3, (3, 0, 0, 0, 0))):
            t = time.perf_counter()
            assert hochschild_dims(G, 4) == want
            assert time.perf_counter() - t <= 10
    criterion(1, "HH_0..4 of C[Z/2] and C[S3]", 20, body)


def test_c02_cyclic_dimensions():
    def body():
        assert cyclic_dims(Z2, 4) == (2, 0, 2, 0, 2)
        assert cyclic_dims(Z3, 4) == (3, 0, 3, 0, 3)
    criterion(2, "HC_0..4 of C[Z/2] and C[Z/3]", 30, body)


def test_c03_infinite_order_class():
    def body():
        rep = stabilized_homology(lambda R: cyclic_total_slice(Z, 2, (2,), R), 2, 8, range(3))
        assert rep.stabilized and rep.radius <= 8
        assert rep.dims == (1, 0, 0)
        return f"stable at R={rep.radius}"
    criterion(3, "HC_0..2 of C[Z] at <2> stabilizes", 60, body)


def test_c04_homotopy_identities():
    def body():
        for G, D in ((Z4, 3), (S3, 2)):
            bad = check_as_homotopy(CoveringModel(G, 2), D)
            assert all(v is None for v in bad.values()), (G, bad)
        checked = 0
        for G, x, D in ((Z4, 1, 3), (Z4, 2, 3), (Z4, 3, 3), (S3, S3.parse("(12)"), 2)):
            ok, bad, n = check_homotopy_identity(G, x, D)
            assert ok, bad
            checked += n
        return f"{checked} chain basis elements"
    criterion(4, "dK + Kd = r* - id and dH + Hd = i rho - id", 30, body)


def test_c05_chern_calculus():
    def body():
        rng = random.Random(5)
        count = 0
        for G in (Z2, S3):
            for i in range(20):
                p = random_idempotent(G, 1 + i % 3, rng)
                for k in range(3):
                    assert abelianize(ch_even_form(p, k).d()).is_zero(), (G, i, k)
                count += 1
        nontrivial = 0
        for i in range(10):
            path = random_idempotent_path(S3, 2, rng)
            for k in (1, 2):
                assert not transgression_defect(path, k), (i, k)
                nontrivial += bool(abelianize_poly(transgression(path, k)))
        assert nontrivial
        return f"{count} idempotents, 10 paths, {nontrivial} nonzero transgressions"
    criterion(5, "d Ch = 0 and the transgression identity", 60, body)


def test_c06_bott_anchor():
    def body():
        val = bott_integral() / (2j * math.pi)
        assert abs(val - 1) < 1e-9, val
        rep = bott_double_transgression(GRingMatrix(Z2, [[{0: HALF, 1: HALF}]]), 1)
        assert rep.ok and rep.max_error < 1e-9, rep.max_error
        return f"error {rep.max_error:.1e}"
    criterion(6, "Bott integral and the double transgression for (1+g)/2", 30, body)


def test_c07_kernel_identities():
    def body():
        rng = random.Random(7)
        for base in (CoveringModel(Z4, 3, (1, HALF, 3)), CoveringModel(Z, 2, (1, 2), radius=6)):
            model = base.two_translate_cutoff(rng)
            reps = kernel_identities(model, rng, trials=50, max_degree=2)
            for r in reps:
                assert r.ok, (r.name, r.failures[:1])
                assert r.checked >= 1
            assert min(r.checked for r in reps if not r.name.startswith("Bianchi")) >= 50
    criterion(7, "five kernel identities on Z/4 and truncated Z", 60, body)


def test_c08_tau_chi():
    def body():
        rng = random.Random(8)
        model = CoveringModel(S3, 2, (1, HALF)).two_translate_cutoff(rng)
        nonzero = 0
        for t in range(50):
            k = 1 + t % 2
            chi = random_chi(model, k, rng, density=0.5)
            As = [random_kernel(model, rng) for _ in range(k + 1)]
            Bs = [random_kernel(model, rng) for _ in range(k + 2)]
            v = tau_chi(chi, As)
            nonzero += v != 0
            assert tau_chi(as_delta(chi), Bs) == -b_cochain(lambda a: tau_chi(chi, a), Bs), t
            assert tau_chi(chi, As[-1:] + As[:-1]) == (-1) ** k * v, t
            assert tau_chi(chi, [random_local_kernel(model, rng) for _ in range(k + 1)]) == 0, t
            assert norm_bound_holds(chi, As), t
        assert nonzero
        return f"50 instances, {nonzero} nonzero"
    criterion(8, "tau_chi coboundary sign, cyclic sign, local vanishing", 30, body)


def _model(G, seed):
    return CoveringModel(G, 2, (1, HALF)).two_translate_cutoff(random.Random(seed))


def test_c09_rho_pairing():
    def body():
        count = nonzero = 0
        for G, xs in ((Z4, (1, 2, 3)), (S3, (S3.parse("(12)"), S3.parse("(123)")))):
            for x in xs:
                for k in range(3):
                    P = random_projection(_model(G, k), random.Random(k), conjugations=2)
                    ch = ch_del_projection(P, k)
                    for z in normalized_cyclic_cocycles(G, x, 2 * k):
                        a = pair(z, P, k)
                        assert a == pair_duality(z, ch), (G, x, k)
                        count += 1
                        nonzero += a != 0
        for G, x in ((Z4, 1), (S3, S3.parse("(12)"))):
            P = random_projection(_model(G, 0), random.Random(0), conjugations=2)
            tau = delocalized_trace(G, x)
            terms = eta_terms(tau, P)
            assert terms and direct_terms(tau, P) == terms
            assert pair(tau, P, 0) == eta_sum(tau, P) == sum(terms.values())
        assert nonzero
        return f"{count} pairings, {nonzero} nonzero"
    criterion(9, "direct pairing equals the duality route, k <= 2", 60, body)


def test_c10_calibration():
    def body():
        g, gi = (1,), (-1,)
        u = GRingMatrix(Z, [[{g: 1}]], inverse=[[{gi: 1}]])
        block = GRingMatrix(Z, [[{g: 1}, 0], [0, 1]], inverse=[[{gi: 1}, 0], [0, 1]])
        c0 = (calibrate_ck(u, 0, 4, 4), calibrate_ck(block, 0, 4, 4))
        c1 = (calibrate_ck(u, 1, 3), calibrate_ck(block, 1, 3))
        assert c0 == (C_K[0], C_K[0]) and c1 == (C_K[1], C_K[1]), (c0, c1)
        return f"c0 = {c0[0]}, c1 = {c1[0]}"
    criterion(10, "c_0 and c_1 agree on u = g and the 2x2 block", 30, body)
