"""Tests for finite module quotients, shape sorting, and transfer."""

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pfusion.exactalg import (
    AbSubgroup,
    FinAbelianPGroup,
    GroupRingElt,
    PHom,
)
from pfusion.grp import FinGroup, HypothesisFailed, classify_gp
from pfusion.modrep import (
    FpGModule,
    LatticeModP_N,
    find_equivariant_iso,
    is_minimally_active,
    lift_lattice,
)
from pfusion.zpmods import (
    BadParameters,
    DeltaPair,
    FinZpGModule,
    IndexNotP,
    Inconsistent,
    NoLift,
    NotInAutVee,
    NotInvariant,
    build_quotient,
    check_lemma37,
    check_sigma_congruence,
    check_star_fin,
    check_star_inf,
    classify_table43,
    cyclotomic_model,
    delta_full,
    delta_half,
    delta_i,
    example_410c,
    mu,
    mu_image,
    name_delta_subgroup,
    present_quotient,
    psi,
    teichmuller,
    torus_tower_iso,
    transfer_iso_prop39,
    truncation_tower,
)


def mk_group(p, mats):
    sp = FinAbelianPGroup(p, [p] * len(mats[0]))
    return FinGroup(sp, [PHom(sp, sp, m) for m in mats])


def gl2_3():
    return mk_group(3, [[[1, 1], [0, 1]], [[0, 1], [-1, 0]],
                        [[1, 0], [0, 2]]])


def perm_mat(pi):
    n = len(pi)
    m = [[0] * n for _ in range(n)]
    for j, i in enumerate(pi):
        m[i][j] = 1
    return m


def perm9_module():
    """(C_9)^3 with the cyclic shift, a swap, and the sign flip."""
    sp = FinAbelianPGroup(3, [9, 9, 9])
    cyc = perm_mat([1, 2, 0])
    swap = perm_mat([1, 0, 2])
    neg = [[-1, 0, 0], [0, -1, 0], [0, 0, -1]]
    acts = [PHom(sp, sp, m) for m in (cyc, swap, neg)]
    return FinZpGModule.natural(sp, acts)


def sym4_sumzero():
    """Sum-zero representation of the symmetric group on four points, p=3."""
    four = [[0, 0, -1], [1, 0, -1], [0, 1, -1]]
    two = [[-1, 1, 0], [0, 1, 0], [0, 0, 1]]
    return mk_group(3, [four, two])


def lin_mul(f, g, p):
    out = [0] * (len(f) + len(g) - 1)
    for i, x in enumerate(f):
        for j, y in enumerate(g):
            out[i + j] = (out[i + j] + x * y) % p
    return out


def sym_cube(g, p):
    """Third symmetric power of a 2x2 matrix."""
    (a, b), (c, d) = g
    cols = []
    for i in range(4):
        poly = [1]
        for _ in range(3 - i):
            poly = lin_mul(poly, [a, c], p)
        for _ in range(i):
            poly = lin_mul(poly, [b, d], p)
        cols.append(poly + [0] * (4 - len(poly)))
    return [[cols[j][i] for j in range(4)] for i in range(4)]


def sl2_5_cube():
    return mk_group(5, [sym_cube([[1, 1], [0, 1]], 5),
                        sym_cube([[0, 4], [1, 0]], 5)])


# ---------------------------------------------------------------------------
# weight pair sets


def test_delta_pair_normalization_and_products():
    a = DeltaPair(3, -1, 5)
    assert (a.r, a.s) == (2, 2)
    b = DeltaPair(3, 2, 1)
    assert a.mul(b) == DeltaPair(3, 1, 2)
    with pytest.raises(BadParameters):
        DeltaPair(3, 3, 1)


def test_delta_subgroup_names():
    assert name_delta_subgroup(delta_full(5)) == "Delta"
    assert name_delta_subgroup(delta_i(5, 0)) == "Delta_0"
    assert name_delta_subgroup(delta_i(5, 4)) == "Delta_0"
    assert name_delta_subgroup(delta_i(5, 3)) == "Delta_-1"
    assert name_delta_subgroup(delta_i(5, 2)) == "Delta_2"
    assert name_delta_subgroup(delta_half(5, 3)) == "Delta_-1/2"
    assert name_delta_subgroup(frozenset({DeltaPair.identity(7)})) == "trivial"
    odd = frozenset({DeltaPair(5, 2, 2)})
    assert name_delta_subgroup(odd) is None


def test_delta_membership():
    assert DeltaPair(5, 2, 3).in_delta_i(3)
    assert not DeltaPair(5, 2, 3).in_delta_i(1)
    assert DeltaPair(5, 4, 3).in_delta_half(3)
    with pytest.raises(BadParameters):
        delta_half(5, 2)


@given(st.sampled_from([3, 5, 7]), st.integers(-3, 8))
def test_delta_i_is_closed(p, i):
    pairs = delta_i(p, i)
    assert len(pairs) == p - 1
    for a in pairs:
        for b in pairs:
            assert a.mul(b) in pairs


# ---------------------------------------------------------------------------
# module basics


def test_module_validates_translation_order():
    sp = FinAbelianPGroup(3, [9, 9])
    zeta = PHom(sp, sp, [[0, -1], [1, -1]])
    mod = FinZpGModule.natural(sp, [zeta])
    assert mod.p == 3 and mod.u == zeta
    with pytest.raises(ValueError):
        FinZpGModule(mod.group, sp, [zeta], PHom.identity(sp))


def test_omega_layers_of_mixed_orders():
    m = example_410c(3, 3, 1)
    assert m.A.orders == (27, 9)
    om1 = m.omega_module(1)
    assert om1.A.orders == (3, 3)
    om2 = m.omega_module(2)
    assert om2.A.orders == (9, 9)
    # the layer keeps the translation action conjugate to the quotient one
    assert is_minimally_active(m.omega1_fpmodule(), m.u).ok
    assert is_minimally_active(m.mod_p_quotient(), m.u).ok
    assert m.faithful_on_omega1()


def test_fixed_commutator_and_socle():
    b = perm9_module()
    assert b.fixed().invariant_factors() == (9,)
    assert b.t_subgroup().order * 3 == b.A.order
    z0 = b.z0()
    assert z0.order == 3
    assert z0.contains([3, 3, 3])


# ---------------------------------------------------------------------------
# quotient constructions


def test_present_quotient_rejects_unstable_relations():
    swap = [[0, 1], [1, 0]]
    with pytest.raises(NotInvariant):
        present_quotient(3, 2, [[9, 0], [0, 3]], [swap])


def test_present_quotient_rejects_infinite_quotients():
    with pytest.raises(BadParameters):
        present_quotient(3, 2, [[9, 0]], [[[1, 0], [0, 1]]])


def test_teichmuller_values():
    assert teichmuller(3, 3) == 26
    assert teichmuller(5, 2) == 7
    for p, k in [(3, 2), (5, 3), (7, 2)]:
        w = teichmuller(p, k)
        assert pow(w, p - 1, p ** k) == 1
        assert pow(w, p, p ** k) == w


def test_build_quotient_full_lattice_gives_homocyclic_layer():
    lift = lift_lattice(FpGModule.natural(gl2_3()), 3)
    q = build_quotient(lift.lattice, [[1, 0], [0, 1]], 2, u=lift.u)
    assert q.A.orders == (9, 9)


def test_build_quotient_frattini_sublattice_at_level_one_is_trivial():
    lift = lift_lattice(FpGModule.natural(gl2_3()), 3)
    q = build_quotient(lift.lattice, [[3, 0], [0, 3]], 1, u=lift.u)
    assert q.A.order == 1


def test_build_quotient_line_sublattice():
    # the invariant line (1, 2) of the two-dimensional reflection lattice
    mats = [[[0, -1], [1, -1]], [[-1, 1], [0, 1]], [[-1, 0], [0, -1]]]
    group = mk_group(3, mats)
    sp = FinAbelianPGroup(3, [27, 27])
    acts = [PHom(sp, sp, m) for m in mats]
    lat = LatticeModP_N(group, sp, acts)
    q = build_quotient(lat, [[1, 2]], 2)
    assert q.A.order == 27
    assert tuple(sorted(q.A.orders, reverse=True)) == (9, 3)


def test_build_quotient_rejects_unstable_sublattice():
    group = mk_group(3, [[[0, -1], [1, -1]]])
    sp = FinAbelianPGroup(3, [27, 27])
    acts = [PHom(sp, sp, [[0, -1], [1, -1]])]
    lat = LatticeModP_N(group, sp, acts)
    with pytest.raises(NotInvariant):
        build_quotient(lat, [[1, 1]], 2)
    with pytest.raises(BadParameters):
        build_quotient(lat, [[1, 2]], 3)


def test_example_410c_values():
    m = example_410c(3, 3, 1)
    assert m.A.orders == (27, 9)
    assert m.fixed().order == 3
    m5 = example_410c(5, 2, 2)
    assert m5.A.orders == (25, 5, 5, 5)
    with pytest.raises(BadParameters):
        example_410c(3, 2, 1)
    with pytest.raises(BadParameters):
        example_410c(3, 1, 2)
    with pytest.raises(BadParameters):
        example_410c(5, 3, 10)


def test_cyclotomic_model_abelian_types():
    assert cyclotomic_model(3, 3).A.orders == (9, 3)
    assert cyclotomic_model(3, 4).A.orders == (9, 9)
    assert cyclotomic_model(5, 5).A.orders == (25, 5, 5, 5)
    assert cyclotomic_model(5, 4).A.orders == (5, 5, 5, 5)


def test_cyclotomic_model_flip_inverts_rotation():
    cm = cyclotomic_model(5, 5)
    rot, flip = cm.group.generators[0], cm.group.generators[1]
    assert flip * rot * flip.inverse() == rot.inverse()


# ---------------------------------------------------------------------------
# the coordinate map


def test_psi_cyclotomic_sigma_in_kernel():
    cm = cyclotomic_model(3, 4)
    d = psi(cm)
    assert not any(d.sigma_image)
    assert d.kernel_contains(GroupRingElt.sigma(3))
    assert d.kernel == ((1, 1, 1), (0, 9, 0), (0, 0, 9))


def test_psi_permutation_generator_and_kernel():
    b = perm9_module()
    d = psi(b)
    assert d.a == (1, 0, 0)
    assert d.sigma_image == (1, 1, 1)
    assert d.kernel == ((9, 0, 0), (0, 9, 0), (0, 0, 9))


def test_psi_glued_kernel():
    d = psi(example_410c(3, 3, 1))
    assert d.kernel == ((1, 1, 19), (0, 9, 18), (0, 0, 27))
    # the printed basis is the ideal generated by 27 and 9 - sigma
    glue = GroupRingElt.const(3, 9) - GroupRingElt.sigma(3)
    assert d.kernel_contains(glue)
    assert d.kernel_contains(GroupRingElt.const(3, 27))


def test_psi_rejects_wide_fixed_part():
    sp = FinAbelianPGroup(3, [9, 9, 9, 9])
    z = [[0, -1], [1, -1]]
    block = [[z[i % 2][j % 2] if i // 2 == j // 2 else 0 for j in range(4)]
             for i in range(4)]
    mod = FinZpGModule.natural(sp, [PHom(sp, sp, block)])
    with pytest.raises(IndexNotP):
        psi(mod)


# ---------------------------------------------------------------------------
# shape sorting


def test_classify_shape_a_homocyclic():
    tag = classify_table43(cyclotomic_model(3, 4))
    assert tag.table43 == "a"
    assert tag.table41 is None
    assert tag.table41_options == ("i", "iii''", "iv'")
    assert (tag.m, tag.k, tag.rk, tag.ell) == (4, 2, 2, None)


def test_classify_shape_a_non_homocyclic():
    tag = classify_table43(cyclotomic_model(3, 3))
    assert tag.table43 == "a"
    assert tag.table41_options == ("ii", "iii'", "iii''", "iv''")
    assert tag.m == 3
    tag5 = classify_table43(cyclotomic_model(5, 5))
    assert (tag5.table43, tag5.m, tag5.k) == ("a", 5, 2)


def test_classify_shape_b():
    tag = classify_table43(perm9_module())
    assert (tag.table43, tag.table41) == ("b", "iv''")
    assert (tag.m, tag.k, tag.rk) == (5, 2, 3)


def test_classify_shape_c():
    tag = classify_table43(example_410c(3, 3, 1))
    assert (tag.table43, tag.table41) == ("c", "iii''")
    assert (tag.m, tag.k, tag.ell) == (5, 3, 1)
    tag2 = classify_table43(example_410c(3, 3, 2))
    assert tag2.ell == 2
    tag5 = classify_table43(example_410c(5, 2, 2))
    assert (tag5.table43, tag5.m, tag5.ell) == ("c", 5, 2)


def test_classify_rejects_elementary_and_stray_inputs():
    with pytest.raises(BadParameters):
        classify_table43(cyclotomic_model(5, 4))


# ---------------------------------------------------------------------------
# weight pairs of automorphisms


def test_mu_inner_and_scalar():
    cm = cyclotomic_model(3, 4)
    assert mu(cm.u, cm) == DeltaPair(3, 1, 1)
    scal = cm.group.generators[2]
    assert mu(scal, cm) == DeltaPair(3, 1, 2)


def test_mu_flip_depends_on_depth():
    assert mu(cyclotomic_model(3, 3).group.generators[1],
              cyclotomic_model(3, 3)) == DeltaPair(3, 2, 1)
    assert mu(cyclotomic_model(3, 4).group.generators[1],
              cyclotomic_model(3, 4)) == DeltaPair(3, 2, 2)


def test_mu_rejects_non_normalizing_elements():
    s4 = sym4_sumzero()
    V = FpGModule.natural(s4)
    mod = FinZpGModule(s4, V.space, V.gen_actions,
                       classify_gp(s4).sylow.u, validate=False)
    hits = 0
    for g in s4.elements():
        try:
            mu(g, mod)
            hits += 1
        except NotInAutVee:
            pass
    # exactly the normalizer of the translation subgroup gets a weight
    assert hits == 6


def test_mu_image_gl23_is_everything():
    g = gl2_3()
    img = mu_image(g, FpGModule.natural(g))
    assert img == delta_full(3)
    assert name_delta_subgroup(img) == "Delta"


def test_mu_image_symmetric_cube():
    g = sl2_5_cube()
    assert len(g.elements()) == 120
    img = mu_image(g, FpGModule.natural(g))
    assert img == delta_half(5, 3)
    assert name_delta_subgroup(img) == "Delta_-1/2"


def test_mu_image_translation_only_group_is_trivial():
    sp = FinAbelianPGroup(3, [9, 9])
    zeta = PHom(sp, sp, [[0, -1], [1, -1]])
    mod = FinZpGModule.natural(sp, [zeta])
    assert mu_image(mod.group, mod) == frozenset({DeltaPair.identity(3)})


def test_mu_is_multiplicative_and_injective_off_p():
    g = gl2_3()
    V = FpGModule.natural(g)
    mod = FinZpGModule(g, V.space, V.gen_actions,
                       classify_gp(g).sylow.u, validate=False)
    vee = []
    for x in g.elements():
        try:
            vee.append((x, mu(x, mod)))
        except NotInAutVee:
            pass
    assert len(vee) == 12
    for a, ma in vee[::3]:
        for b, mb in vee[::4]:
            assert mu(a.compose(b), mod) == ma.mul(mb)
    # elements of order prime to p in distinct translation cosets separate
    ident = PHom.identity(g.carrier)
    u = mod.u
    cosets = (ident, u, u.compose(u))
    offp = [(x, m) for x, m in vee if x.pow(8) == ident]
    assert len(offp) == 8
    for (x, mx), (y, my) in itertools.combinations(offp, 2):
        if any(x == y.compose(t) for t in cosets):
            assert mx == my
        else:
            assert mx != my


# ---------------------------------------------------------------------------
# the four-condition battery


def test_lemma37_good_module():
    rep = check_lemma37(cyclotomic_model(3, 4))
    assert rep.as_tuple() == (True, True, True, True)
    assert check_lemma37(perm9_module()).as_tuple() == (True,) * 4
    assert check_lemma37(example_410c(3, 3, 1)).as_tuple() == (True,) * 4


def test_lemma37_trivial_action_fails_all():
    group = mk_group(3, [[[1, 1], [0, 1]]])
    a = FinAbelianPGroup(3, [3])
    mod = FinZpGModule(group, a, [PHom.identity(a)], group.generators[0])
    rep = check_lemma37(mod)
    assert rep.socle_commutator_order_p is False
    assert rep.as_tuple() == (False, False, False, False)


def test_lemma37_doubled_rotation_fails_all():
    sp = FinAbelianPGroup(3, [9, 9, 9, 9])
    z = [[0, -1], [1, -1]]
    block = [[z[i % 2][j % 2] if i // 2 == j // 2 else 0 for j in range(4)]
             for i in range(4)]
    mod = FinZpGModule.natural(sp, [PHom(sp, sp, block)])
    assert check_lemma37(mod).as_tuple() == (False, False, False, False)


def test_lemma37_on_tower_levels():
    lift = lift_lattice(FpGModule.natural(gl2_3()), 3)
    for level in truncation_tower(lift.lattice, 3, u=lift.u):
        assert check_lemma37(level).as_tuple() == (True,) * 4


# ---------------------------------------------------------------------------
# transfer


def brute_force_iso_exists(m1, m2):
    """Exhaustive search for an equivariant bijection between small carriers."""
    rows = m2.A.rank
    cols = m1.A.rank
    ranges = [range(m2.A.orders[i]) for i in range(rows) for _ in range(cols)]
    gens1 = [m1.rho(g) for g in m1.group.generators]
    gens2 = [m2.rho(g) for g in m2.group.generators]
    for flat in itertools.product(*ranges):
        mat = [list(flat[i * cols:(i + 1) * cols]) for i in range(rows)]
        try:
            f = PHom(m1.A, m2.A, mat)
        except ValueError:
            continue
        if not all(f.compose(a) == b.compose(f)
                   for a, b in zip(gens1, gens2)):
            continue
        if len({f.apply(v) for v in m1.A.elements()}) == m2.A.order:
            return True
    return False


def test_transfer_identity_on_permutation_module():
    b = perm9_module()
    ident = [[1 if i == j else 0 for j in range(3)] for i in range(3)]
    out = transfer_iso_prop39(b, b, ident)
    assert [[e % 3 for e in row] for row in out.matrix] == ident
    assert out.is_invertible()


def test_transfer_scalar_reduction_on_permutation_module():
    b = perm9_module()
    two = [[2 if i == j else 0 for j in range(3)] for i in range(3)]
    out = transfer_iso_prop39(b, b, two)
    assert [[e % 3 for e in row] for row in out.matrix] == two
    assert out.is_invertible()


def test_transfer_between_glued_modules_same_class():
    m1 = example_410c(3, 3, 1)
    m2 = example_410c(3, 3, 4)
    q1, q2 = m1.mod_p_quotient(), m2.mod_p_quotient()
    f = find_equivariant_iso(q1.space, q1.gen_actions,
                             q2.space, q2.gen_actions)
    assert f is not None
    out = transfer_iso_prop39(m1, m2, f)
    for g1, g2 in zip(m1.group.generators, m2.group.generators):
        assert out.compose(m1.rho(g1)) == m2.rho(g2).compose(out)
    assert brute_force_iso_exists(m1, m2)


def test_transfer_between_glued_modules_different_class():
    m1 = example_410c(3, 3, 1)
    m3 = example_410c(3, 3, 2)
    q1, q3 = m1.mod_p_quotient(), m3.mod_p_quotient()
    f = find_equivariant_iso(q1.space, q1.gen_actions,
                             q3.space, q3.gen_actions)
    assert f is not None
    with pytest.raises(NoLift):
        transfer_iso_prop39(m1, m3, f)
    assert not brute_force_iso_exists(m1, m3)


def test_transfer_detects_type_mismatch():
    sp1 = FinAbelianPGroup(3, [9, 9])
    zeta = PHom(sp1, sp1, [[0, -1], [1, -1]])
    m1 = FinZpGModule.natural(sp1, [zeta])
    sp2 = FinAbelianPGroup(3, [27, 3])
    shear = PHom(sp2, sp2, [[1, 0], [1, 1]])
    m2 = FinZpGModule.natural(sp2, [shear])
    q1, q2 = m1.mod_p_quotient(), m2.mod_p_quotient()
    f = find_equivariant_iso(q1.space, q1.gen_actions,
                             q2.space, q2.gen_actions)
    assert f is not None
    with pytest.raises(NoLift):
        transfer_iso_prop39(m1, m2, f)


def test_transfer_needs_matching_translations():
    b = perm9_module()
    bad = [[0, 1, 0], [1, 0, 0], [0, 0, 1]]
    with pytest.raises(HypothesisFailed):
        transfer_iso_prop39(b, b, bad)


# ---------------------------------------------------------------------------
# towers


def signed_perm_lattice(N, conj=None):
    group = mk_group(3, [perm_mat([1, 2, 0]), perm_mat([1, 0, 2]),
                         [[-1, 0, 0], [0, -1, 0], [0, 0, -1]]])
    sp = FinAbelianPGroup(3, [3 ** N] * 3)
    mats = [perm_mat([1, 2, 0]), perm_mat([1, 0, 2]),
            [[-1, 0, 0], [0, -1, 0], [0, 0, -1]]]
    if conj is not None:
        from pfusion.exactalg import mat_inv_unimodular, mat_mul
        ci = mat_inv_unimodular(conj)
        mats = [mat_mul(mat_mul(conj, m), ci) for m in mats]
    acts = [PHom(sp, sp, m) for m in mats]
    return LatticeModP_N(group, sp, acts)


def test_tower_iso_same_lattice():
    lat = signed_perm_lattice(3)
    tow = truncation_tower(lat, 3)
    isos = torus_tower_iso(tow, tow, 3)
    assert len(isos) == 3
    for k, f in enumerate(isos, start=1):
        assert f.source.orders == (3 ** k,) * 3
        assert f.is_invertible()
    for k in range(1, 3):
        lower = [[e % 3 ** k for e in row] for row in isos[k].matrix]
        assert lower == [list(r) for r in isos[k - 1].matrix]


def test_tower_iso_conjugated_basis():
    lat1 = signed_perm_lattice(3)
    lat2 = signed_perm_lattice(3, conj=[[1, 0, 1], [0, 1, 0], [0, 0, 1]])
    isos = torus_tower_iso(truncation_tower(lat1, 3),
                           truncation_tower(lat2, 3), 3)
    assert len(isos) == 3
    for k, f in enumerate(isos, start=1):
        m1 = truncation_tower(lat1, 3)[k - 1]
        m2 = truncation_tower(lat2, 3)[k - 1]
        for g1, g2 in zip(m1.group.generators, m2.group.generators):
            assert f.compose(m1.rho(g1)) == m2.rho(g2).compose(f)


def test_tower_iso_gl23_conjugated():
    lift = lift_lattice(FpGModule.natural(gl2_3()), 3)
    lat1 = lift.lattice
    from pfusion.exactalg import mat_inv_unimodular, mat_mul
    T = [[1, 1], [0, 1]]
    Ti = mat_inv_unimodular(T)
    acts2 = [PHom(lat1.space, lat1.space,
                  mat_mul(mat_mul(T, a.matrix), Ti))
             for a in lat1.gen_actions]
    lat2 = LatticeModP_N(lat1.group, lat1.space, acts2)
    isos = torus_tower_iso(truncation_tower(lat1, 3, u=lift.u),
                           truncation_tower(lat2, 3, u=lift.u), 3)
    assert len(isos) == 3


def test_tower_iso_fails_on_mismatched_bottoms():
    lat1 = signed_perm_lattice(2)
    lift = lift_lattice(FpGModule.natural(gl2_3()), 2)
    with pytest.raises((HypothesisFailed, NoLift)):
        torus_tower_iso(truncation_tower(lat1, 2),
                        truncation_tower(lift.lattice, 2, u=lift.u), 2)


def test_omega_of_truncation_matches_build_quotient():
    lift = lift_lattice(FpGModule.natural(gl2_3()), 4)
    lat = lift.lattice
    deep = truncation_tower(lat, 4, u=lift.u)[3]
    for n in (1, 2, 3):
        bq = build_quotient(lat, [[1, 0], [0, 1]], n, u=lift.u)
        om = deep.omega_module(n)
        assert sorted(bq.A.orders) == sorted(om.A.orders)
        f = find_equivariant_iso(bq.A, bq.gen_actions, om.A, om.gen_actions)
        assert f is not None


# ---------------------------------------------------------------------------
# realization rows


def test_star_fin_gl23_rows():
    g = gl2_3()
    V = FpGModule.natural(g)
    verdict = check_star_fin(g, V, V.space.full_subgroup(), 2)
    assert verdict.gp_class == "Gp_hat"
    assert verdict.admissible()
    assert verdict.labels() == {("i", "a"), ("iv'", "a"), ("iii''", "a")}
    row = next(r for r in verdict.rows if r.table41 == "iv'")
    assert (row.r, row.m) == (2, 4)
    assert row.mu_subgroup == "Delta_0"
    assert row.extra_index_classes


def test_star_fin_line_kills_bottom_index_rows():
    scal = [[2 if i == j else 0 for j in range(5)] for i in range(5)]
    g = mk_group(5, [perm_mat([1, 2, 3, 4, 0]), perm_mat([1, 0, 2, 3, 4]),
                     scal])
    V = FpGModule.natural(g)
    verdict = check_star_fin(g, V, V.space.full_subgroup(), 2)
    assert verdict.gp_class == "Gp_hat"
    assert not verdict.admissible()
    reasons = dict(verdict.rejections)
    assert "one-dimensional submodule present" in reasons["(iv'',b)"]


def test_star_fin_gate_on_group_class():
    s3 = mk_group(3, [[[0, -1], [1, -1]], [[-1, 1], [0, 1]]])
    V = FpGModule.natural(s3)
    verdict = check_star_fin(s3, V, V.space.full_subgroup(), 2)
    assert verdict.gp_class == "not_Gp"
    assert verdict.rows == ()


def test_star_fin_rejects_bad_submodule():
    g = gl2_3()
    V = FpGModule.natural(g)
    line = AbSubgroup(V.space, [[1, 0]])
    with pytest.raises(BadParameters):
        check_star_fin(g, V, line, 2)


def test_star_inf_sumzero_four_points():
    s4 = sym4_sumzero()
    W = FpGModule.natural(s4)
    r0 = check_star_inf(s4, W, 0)
    assert r0.passed and r0.branch == "dim >= p"
    assert r0.essential_classes == "B-classes"
    r1 = check_star_inf(s4, W, -1)
    assert not r1.passed


def test_star_inf_exactness_of_the_weight_image():
    neg = [[-1, 0, 0], [0, -1, 0], [0, 0, -1]]
    big = mk_group(3, [[[0, 0, -1], [1, 0, -1], [0, 1, -1]],
                       [[-1, 1, 0], [0, 1, 0], [0, 0, 1]], neg])
    r = check_star_inf(big, FpGModule.natural(big), 0)
    assert not r.passed
    assert r.mu_ok is False


def test_star_inf_small_dimension_branch():
    g = gl2_3()
    V = FpGModule.natural(g)
    assert check_star_inf(g, V, 0).passed
    r = check_star_inf(g, V, -1)
    assert r.passed and r.branch == "dim p-1"
    assert r.essential_classes == "H-classes"
    with pytest.raises(BadParameters):
        check_star_inf(g, V, 2)


# ---------------------------------------------------------------------------
# congruences


@given(st.sampled_from([3, 5, 7]), st.integers(1, 3))
@settings(deadline=None, max_examples=20)
def test_sigma_congruence(p, k):
    assert check_sigma_congruence(p, k)


def test_sigma_squares_to_p_sigma():
    for p in (3, 5):
        s = GroupRingElt.sigma(p)
        assert (s * s).coeffs == (s * p).coeffs


def test_kernel_ideals_under_shift():
    for mod in (cyclotomic_model(3, 4), perm9_module(),
                example_410c(3, 3, 2)):
        d = psi(mod)
        u = GroupRingElt.u(mod.p)
        for col in d.kernel:
            xi = GroupRingElt(mod.p, list(col))
            assert d.kernel_contains(xi * u)
            assert d.kernel_contains(xi * (u * u))


def test_annihilator_applies_to_zero():
    for mod in (cyclotomic_model(3, 3), example_410c(3, 3, 1)):
        d = psi(mod)
        for col in d.kernel:
            assert not any(d.apply(GroupRingElt(mod.p, list(col))))
