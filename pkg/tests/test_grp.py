"""Matrix-group closure, Sylow classification, p-prime core, A = A1 x A2."""

from itertools import product

import pytest

from pfusion.exactalg import (
    AbSubgroup,
    FinAbelianPGroup,
    PHom,
    subgroup_presentation,
)
from pfusion.grp import (
    CapExceeded,
    FinGroup,
    HypothesisFailed,
    NotOrderPSylow,
    classify_gp,
    commutator_with,
    fixed_subgroup,
    p_prime_core,
    restrict_to_subgroup,
    split_propA7,
    sylow_data,
)


V2 = FinAbelianPGroup.from_exponents(3, [1, 1])
V3 = FinAbelianPGroup.from_exponents(3, [1, 1, 1])


def gl2_3():
    return FinGroup(V2, [PHom(V2, V2, [[1, 1], [0, 1]]),
                         PHom(V2, V2, [[0, 1], [-1, 0]]),
                         PHom(V2, V2, [[1, 0], [0, 2]])])


def sl2_3():
    return FinGroup(V2, [PHom(V2, V2, [[1, 1], [0, 1]]),
                         PHom(V2, V2, [[0, 1], [-1, 0]])])


def sigma3():
    return FinGroup(V2, [PHom(V2, V2, [[0, -1], [1, -1]]),
                         PHom(V2, V2, [[0, 1], [1, 0]])])


def signed_perm_wreath3():
    """C_2 wr S_3 as signed 3x3 permutation matrices over F_3."""
    cyc = PHom(V3, V3, [[0, 0, 1], [1, 0, 0], [0, 1, 0]])
    swap = PHom(V3, V3, [[0, 1, 0], [1, 0, 0], [0, 0, 1]])
    sign = PHom(V3, V3, [[-1, 0, 0], [0, 1, 0], [0, 0, 1]])
    return FinGroup(V3, [cyc, swap, sign])


# ------------------------------------------------------------ closure

def test_trivial_group():
    G = FinGroup(V2, [PHom.identity(V2)])
    assert G.order == 1


def test_order_three_closure():
    A = FinAbelianPGroup.from_exponents(3, [2, 2])
    u = PHom(A, A, [[0, -1], [1, -1]])
    assert FinGroup(A, [u]).order == 3


def test_gl2_order_against_brute_force():
    G = gl2_3()
    brute = sum(1 for m in product(range(3), repeat=4)
                if (m[0] * m[3] - m[1] * m[2]) % 3 != 0)
    assert brute == 48
    assert G.order == 48


def test_sl2_order():
    assert sl2_3().order == 24


def test_wreath_order():
    assert signed_perm_wreath3().order == 48


def test_cap_exceeded():
    G = FinGroup(V2, [PHom(V2, V2, [[1, 1], [0, 1]]),
                      PHom(V2, V2, [[0, 1], [-1, 0]])], cap=10)
    with pytest.raises(CapExceeded):
        G.elements()


def test_rejects_singular_generator():
    with pytest.raises(ValueError):
        FinGroup(V2, [PHom(V2, V2, [[1, 0], [0, 0]])])


# --------------------------------------------------------- classify

def test_classify_central_u():
    # <mult by 4, mult by -1> = C_6 inside Aut(C_9): order-3 part is normal
    C9 = FinAbelianPGroup.from_exponents(3, [2])
    G = FinGroup(C9, [PHom(C9, C9, [[4]]), PHom(C9, C9, [[-1]])])
    assert G.order == 6
    assert classify_gp(G).verdict == "not_Gp"


def test_classify_sigma3_normal_sylow():
    # the Sylow 3-subgroup of Sigma_3 is unique, hence normal, so the
    # non-normality clause fails even though |N/C| = 2
    res = classify_gp(sigma3())
    assert res.verdict == "not_Gp"
    assert res.sylow is not None and res.sylow.out == 2


def test_classify_gl2():
    res = classify_gp(gl2_3())
    assert res.verdict == "Gp_hat"
    assert res.sylow.out == 2


def test_classify_sl2():
    # normalizer of U in SL_2(3) centralizes it (N = C = C_6)
    res = classify_gp(sl2_3())
    assert res.verdict == "Gp"
    assert res.sylow.out == 1


def test_classify_wreath():
    assert classify_gp(signed_perm_wreath3()).verdict == "Gp_hat"


def test_classify_no_p_part():
    G = FinGroup(V2, [PHom(V2, V2, [[0, 1], [1, 0]])])
    assert G.order == 2
    assert classify_gp(G).verdict == "not_Gp"


def test_classify_rejects_large_sylow():
    # Heisenberg group of upper unitriangular 3x3 matrices has order 27
    G = FinGroup(V3, [PHom(V3, V3, [[1, 1, 0], [0, 1, 0], [0, 0, 1]]),
                      PHom(V3, V3, [[1, 0, 0], [0, 1, 1], [0, 0, 1]])])
    assert G.order == 27
    with pytest.raises(NotOrderPSylow):
        classify_gp(G)


def test_sylow_lagrange_and_out_divides():
    for G in (gl2_3(), sl2_3(), sigma3(), signed_perm_wreath3()):
        res = classify_gp(G)
        if res.sylow is None:
            continue
        p = G.p
        assert len(res.sylow.subgroup) == p
        assert G.order % p == 0
        assert (p - 1) % res.sylow.out == 0
        assert len(res.sylow.normalizer) % len(res.sylow.centralizer) == 0


# ----------------------------------------------------- p-prime core

def test_core_of_sigma3():
    G = sigma3()
    u = next(g for g in G.elements() if G.element_order(g) == 3)
    assert p_prime_core(G, u).order == 3


def test_core_of_gl2_is_determinant_one():
    G = gl2_3()
    u = classify_gp(G).sylow.u
    core = p_prime_core(G, u)
    assert core.order == 24
    for g in core.elements():
        det = (g.matrix[0][0] * g.matrix[1][1]
               - g.matrix[0][1] * g.matrix[1][0])
        assert det % 3 == 1


def test_core_idempotent():
    G = gl2_3()
    core = p_prime_core(G, classify_gp(G).sylow.u)
    again = p_prime_core(core, classify_gp(core).sylow.u)
    assert again.same_group(core)


def test_core_of_order_p_group():
    u = PHom(V2, V2, [[0, -1], [1, -1]])
    G = FinGroup(V2, [u])
    assert p_prime_core(G, u).order == 3


def test_out_monotone_from_core_to_group():
    # adding the torus to SL_2(3) moves the verdict from Gp to Gp_hat
    G = gl2_3()
    core = p_prime_core(G, classify_gp(G).sylow.u)
    assert classify_gp(core).verdict == "Gp"
    assert classify_gp(core).sylow.out <= classify_gp(G).sylow.out
    assert classify_gp(G).verdict == "Gp_hat"


# ------------------------------------------------- fixed/commutator

def test_fixed_and_commutator_of_cycle():
    u = PHom(V3, V3, [[0, 0, 1], [1, 0, 0], [0, 1, 0]])
    fx = fixed_subgroup([u], V3)
    cm = commutator_with([u], V3)
    assert fx.order == 3          # the diagonal line
    assert cm.order == 9          # the zero-sum plane
    assert fx.contains_subgroup(fx.intersect(cm))
    assert fx.intersect(cm).order == 3  # diagonal lies in zero-sum when 3 | n


# -------------------------------------------------------- splitting

def test_split_sl2_on_its_natural_module():
    a1, a2, verdict = split_propA7(sl2_3())
    assert verdict == "pass"
    assert a1.order == 1
    assert a2.invariant_factors() == (3, 3)


def test_split_product_action():
    # SL_2(3) x C_2 on C_9 x C_3^2, the C_2 inverting the cyclic factor
    B = FinAbelianPGroup(3, [9, 3, 3])
    s = PHom(B, B, [[1, 0, 0], [0, 0, -1], [0, 1, -1]])
    w = PHom(B, B, [[1, 0, 0], [0, 0, 1], [0, -1, 0]])
    inv = PHom(B, B, [[-1, 0, 0], [0, 1, 0], [0, 0, 1]])
    G = FinGroup(B, [s, w, inv])
    assert G.order == 48
    a1, a2, verdict = split_propA7(G)
    assert verdict == "pass"
    assert a1.invariant_factors() == (9,)
    assert a2.invariant_factors() == (3, 3)


def test_split_rejects_normal_u():
    C9 = FinAbelianPGroup.from_exponents(3, [2])
    G = FinGroup(C9, [PHom(C9, C9, [[4]]), PHom(C9, C9, [[-1]])])
    with pytest.raises(HypothesisFailed) as e:
        split_propA7(G)
    assert e.value.clause == "i"


def test_split_rejects_big_twist():
    # in C_2 wr S_3 the 3-cycle moves a rank-2 subspace: |[x, A]| = 9
    with pytest.raises(HypothesisFailed) as e:
        split_propA7(signed_perm_wreath3())
    assert e.value.clause == "ii"


# ------------------------------------------------------ restriction

def test_restrict_group_action():
    B = FinAbelianPGroup(3, [9, 3, 3])
    s = PHom(B, B, [[1, 0, 0], [0, 0, -1], [0, 1, -1]])
    w = PHom(B, B, [[1, 0, 0], [0, 0, 1], [0, -1, 0]])
    G = FinGroup(B, [s, w])
    sub = AbSubgroup(B, [(0, 1, 0), (0, 0, 1)])
    R = restrict_to_subgroup(G, sub)
    assert R.carrier.orders == (3, 3)
    assert R.order == 24


def test_restrict_rejects_non_invariant():
    G = sl2_3()
    line = AbSubgroup(V2, [(1, 0)])
    with pytest.raises(ValueError):
        restrict_to_subgroup(G, line)


def test_subgroup_presentation_cyclic():
    A = FinAbelianPGroup(3, [9, 3])
    pres = subgroup_presentation(AbSubgroup(A, [(3, 1)]))
    assert pres.group.orders == (3,)
    for v in [(0, 0), (3, 1), (6, 2)]:
        assert pres.element(pres.coords(v)) == v
    assert pres.coords((1, 0)) is None


def test_subgroup_presentation_full():
    A = FinAbelianPGroup(3, [9, 3])
    pres = subgroup_presentation(A.full_subgroup())
    assert pres.group.orders == (9, 3)
    for v in [(1, 0), (4, 2), (8, 1)]:
        assert pres.element(pres.coords(v)) == v
