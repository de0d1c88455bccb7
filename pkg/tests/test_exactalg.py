"""Exact linear algebra layer: normal forms, homs, group-ring arithmetic."""

import pytest
from hypothesis import given, settings, strategies as st

from pfusion.exactalg import (
    AbSubgroup,
    FinAbelianPGroup,
    GroupRingElt,
    PHom,
    hnf_cols,
    hom_image,
    hom_kernel,
    integer_kernel,
    jordan_type_order_p,
    kernel_integer_mod,
    mat_det,
    mat_mul,
    ring_reduce,
    snf,
    solve_integer_mod,
)


# ---------------------------------------------------------------- snf

def test_snf_identity():
    assert snf([[1, 0], [0, 1]], 3).d == (1, 1)


def test_snf_already_diagonal():
    assert snf([[3, 0], [0, 9]], 3).d == (3, 9)


def test_snf_hand_reduced_case():
    # row-reduce by hand: subtract row 1 from nothing, clear the 1-pivot,
    # leaving diag(1,3,3)
    res = snf([[1, 1, 1], [0, 3, 0], [0, 0, 3]], 3)
    assert res.d == (1, 3, 3)
    assert res.profile == (0, 1, 1)


def _check_snf_contract(mat, p):
    res = snf(mat, p)
    rows, cols = len(mat), len(mat[0])
    prod = mat_mul(mat_mul(res.left, [list(r) for r in mat]), res.right)
    for i in range(rows):
        for j in range(cols):
            want = res.d[i] if i == j and i < len(res.d) else 0
            assert prod[i][j] == want
    # transforms must be invertible over the p-local integers
    assert mat_det(res.left) % p != 0
    assert mat_det(res.right) % p != 0
    # divisibility chain on the p-parts; zero factors (None) come last
    for a, b in zip(res.profile, res.profile[1:]):
        if a is None:
            assert b is None
        elif b is not None:
            assert a <= b
    return res


@settings(max_examples=60, deadline=None)
@given(st.lists(st.lists(st.integers(-9, 9), min_size=3, max_size=3),
                min_size=2, max_size=4),
       st.sampled_from([2, 3, 5]))
def test_snf_transform_contract(mat, p):
    _check_snf_contract(mat, p)


def _brute_cokernel_p_type(mat, p):
    """p-part of Z^2 / columns(mat) by raw enumeration, for 2x2 mat."""
    d = mat_det(mat)
    assert d != 0
    adj = [[mat[1][1], -mat[0][1]], [-mat[1][0], mat[0][0]]]
    L = abs(d)

    def in_lattice(v):
        return all(sum(adj[i][j] * v[j] for j in range(2)) % d == 0
                   for i in range(2))

    seen = set()
    reps = []
    for a in range(L):
        for b in range(L):
            if (a, b) in seen:
                continue
            # mark the whole class of (a, b)
            cls = [(x, y) for x in range(L) for y in range(L)
                   if in_lattice((x - a, y - b))]
            seen.update(cls)
            reps.append((a, b))
    # p^j-torsion counts pin down the invariant factors of the p-part
    torsion = []
    j = 0
    while True:
        cnt = sum(1 for r in reps
                  if in_lattice((p ** j * r[0], p ** j * r[1])))
        torsion.append(cnt)
        if cnt == len([r for r in reps
                       if in_lattice((p ** (j + 1) * r[0],
                                      p ** (j + 1) * r[1]))]):
            pass
        j += 1
        vp = 0
        dd = abs(d)
        while dd % p == 0:
            dd //= p
            vp += 1
        if j > vp + 1:
            break
    return len(reps), torsion


@settings(max_examples=25, deadline=None)
@given(st.lists(st.integers(-6, 6), min_size=4, max_size=4),
       st.sampled_from([2, 3]))
def test_snf_cokernel_roundtrip(entries, p):
    mat = [entries[:2], entries[2:]]
    d = mat_det(mat)
    if d == 0 or abs(d) > 60:
        return
    nclasses, torsion = _brute_cokernel_p_type(mat, p)
    assert nclasses == abs(d)
    res = snf(mat, p)
    ks = sorted(res.profile)
    for j, cnt in enumerate(torsion):
        expect = p ** sum(min(j, k) for k in ks)
        assert cnt == expect


def test_snf_matches_sympy_on_battery():
    sympy = pytest.importorskip("sympy")
    from sympy.matrices.normalforms import smith_normal_form
    battery = [
        [[2, 4, 4], [-6, 6, 12], [10, 4, 16]],
        [[1, 2], [3, 4]],
        [[6, 0], [0, 10]],
        [[3, 3, 3], [3, 3, 3], [3, 3, 3]],
    ]
    for mat in battery:
        for p in (2, 3, 5):
            res = snf(mat, p)
            sd = smith_normal_form(sympy.Matrix(mat))
            n = min(len(mat), len(mat[0]))
            ref = [int(sd[i, i]) for i in range(n)]

            def vp(x):
                if x == 0:
                    return None
                v = 0
                while x % p == 0:
                    x //= p
                    v += 1
                return v

            assert [vp(x) for x in ref] == list(res.profile)


# ---------------------------------------------------------------- hnf

def test_hnf_zero_pivot_column_survives():
    # combining (2,0) and (3,1) makes a row-0 entry vanish while the
    # column stays nonzero; it must drop to the next row, not divide by 0.
    # The lattice is {(x, y) : x + y even}, index 2.
    basis = hnf_cols([[2, 3], [0, 1]])
    assert basis == ((1, 1), (0, 2))


def test_hnf_canonical_under_generator_order():
    a = hnf_cols([[4, 6, 0], [2, 2, 2], [0, 0, 0]])
    b = hnf_cols([[6, 0, 4], [2, 2, 2], [0, 0, 0]])
    assert a == b == ((2, 0, 0), (0, 2, 0))


@settings(max_examples=50, deadline=None)
@given(st.lists(st.lists(st.integers(-8, 8), min_size=3, max_size=3),
                min_size=1, max_size=4),
       st.randoms(use_true_random=False))
def test_hnf_invariant_under_column_ops(cols, rng):
    mat = [[c[i] for c in cols] for i in range(3)]
    ref = hnf_cols(mat)
    # shuffle generators and throw in a sum of two of them
    cols2 = list(cols)
    rng.shuffle(cols2)
    if len(cols2) >= 2:
        cols2.append([x + y for x, y in zip(cols2[0], cols2[1])])
    mat2 = [[c[i] for c in cols2] for i in range(3)]
    assert hnf_cols(mat2) == ref


# ------------------------------------------------- integer solves

def test_solve_integer_mod_simple():
    # 3x = 6 in Z/9: x = 2 works
    x = solve_integer_mod([[3]], [6], [9])
    assert x is not None and (3 * x[0] - 6) % 9 == 0


def test_solve_integer_mod_no_solution():
    assert solve_integer_mod([[3]], [1], [9]) is None


def test_kernel_integer_mod_multiplication_by_p():
    gens = kernel_integer_mod([[3]], [9])
    grp = FinAbelianPGroup(3, [9])
    sub = AbSubgroup(grp, [grp.reduce(g) for g in gens])
    assert sub.order == 3


def test_integer_kernel_rank():
    ker = integer_kernel([[1, 2, 3]], 2)
    assert len(ker) == 2
    for v in ker:
        assert v[0] + 2 * v[1] + 3 * v[2] == 0


# ---------------------------------------------- groups and subgroups

def test_group_basic_invariants():
    A = FinAbelianPGroup.from_exponents(3, [2, 1])
    assert A.orders == (9, 3)
    assert A.rank == 2 and A.exponent == 9 and A.order == 27
    assert A.elt_order((3, 1)) == 3
    assert A.elt_order((1, 0)) == 9


def test_omega_agemo_duality_homocyclic():
    # on C_27^2: agemo^n = omega_{3-n} images coincide with p^n-th powers
    A = FinAbelianPGroup.from_exponents(3, [3, 3])
    for n in range(4):
        om = A.omega(n)
        ag = A.agemo(3 - n)
        assert om.order == ag.order == 3 ** (2 * n)


def test_subgroup_canonical_equality():
    A = FinAbelianPGroup.from_exponents(3, [2, 2])
    s1 = AbSubgroup(A, [(3, 0), (0, 3)])
    s2 = AbSubgroup(A, [(3, 3), (0, 3), (6, 6)])
    assert s1 == s2
    assert s1.order == 9
    assert s1.invariant_factors() == (3, 3)


def test_subgroup_intersect_and_join():
    A = FinAbelianPGroup.from_exponents(3, [2, 2])
    h1 = AbSubgroup(A, [(1, 0)])
    h2 = AbSubgroup(A, [(0, 1)])
    assert h1.intersect(h2).order == 1
    assert h1.add(h2).order == 81
    d = AbSubgroup(A, [(1, 1)])
    assert h1.intersect(d).order == 1
    assert h1.add(d) == AbSubgroup(A, [(1, 0), (0, 1)])


def test_subgroup_membership():
    A = FinAbelianPGroup.from_exponents(3, [2, 2])
    s = AbSubgroup(A, [(3, 0), (0, 1)])
    assert s.contains((6, 5))
    assert not s.contains((1, 0))
    assert s.contains_subgroup(AbSubgroup(A, [(3, 2)]))


# ---------------------------------------------------------- homs

def test_hom_rejects_ill_defined():
    src = FinAbelianPGroup.from_exponents(3, [1])
    tgt = FinAbelianPGroup.from_exponents(3, [2])
    # C_3 -> C_9 sending generator to an order-9 element is not a hom
    with pytest.raises(ValueError):
        PHom(src, tgt, [[1]])
    PHom(src, tgt, [[3]])  # order-3 image is fine


def test_kernel_image_zero_map():
    A = FinAbelianPGroup.from_exponents(3, [2, 2])
    z = PHom.zero(A, A)
    assert hom_kernel(z).order == 81
    assert hom_image(z).order == 1


def test_kernel_image_mult_by_p():
    C9 = FinAbelianPGroup.from_exponents(3, [2])
    f = PHom(C9, C9, [[3]])
    assert hom_kernel(f).invariant_factors() == (3,)
    assert hom_image(f).invariant_factors() == (3,)


def test_kernel_image_twist_minus_one():
    # u = companion matrix of x^2 + x + 1 acting on C_9 x C_9
    A = FinAbelianPGroup.from_exponents(3, [2, 2])
    u = PHom(A, A, [[0, -1], [1, -1]])
    um1 = u.add(PHom(A, A, [[-1, 0], [0, -1]]))
    assert hom_kernel(um1).order == 3
    assert hom_image(um1).order == 27


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(0, 26), min_size=4, max_size=4),
       st.sampled_from([[2, 2], [2, 1], [3, 1]]))
def test_order_splits_over_kernel_and_image(entries, exps):
    A = FinAbelianPGroup.from_exponents(3, exps)
    mat = [entries[:2], entries[2:]]
    try:
        f = PHom(A, A, mat)
    except ValueError:
        return
    assert A.order == hom_kernel(f).order * hom_image(f).order


def test_inverse_on_mixed_orders():
    A = FinAbelianPGroup.from_exponents(3, [2, 1])
    f = PHom(A, A, [[1, 0], [1, 1]])
    g = f.inverse()
    assert g.compose(f) == PHom.identity(A)
    assert f.compose(g) == PHom.identity(A)


def test_hom_application():
    A = FinAbelianPGroup.from_exponents(3, [2, 2])
    u = PHom(A, A, [[0, -1], [1, -1]])
    assert u.apply((1, 0)) == (0, 1)
    assert u.apply((0, 1)) == (8, 8)


# ------------------------------------------------------ jordan type

def test_jordan_identity():
    V = FinAbelianPGroup.from_exponents(3, [1, 1])
    assert jordan_type_order_p(PHom.identity(V)) == (1, 1)


def test_jordan_single_block_dim2():
    V = FinAbelianPGroup.from_exponents(3, [1, 1])
    assert jordan_type_order_p(PHom(V, V, [[0, -1], [1, -1]])) == (2,)


def test_jordan_regular_block():
    V = FinAbelianPGroup.from_exponents(3, [1, 1, 1])
    perm = PHom(V, V, [[0, 0, 1], [1, 0, 0], [0, 1, 0]])
    assert jordan_type_order_p(perm) == (3,)


def test_jordan_rejects_wrong_order():
    V = FinAbelianPGroup.from_exponents(3, [1, 1])
    with pytest.raises(ValueError):
        jordan_type_order_p(PHom(V, V, [[1, 1], [0, 1]]).add(
            PHom.identity(V)))  # u^3 != 1 for this one
    W = FinAbelianPGroup.from_exponents(3, [2])
    with pytest.raises(ValueError):
        jordan_type_order_p(PHom.identity(W))  # carrier not elementary


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(0, 2), min_size=9, max_size=9))
def test_jordan_conjugation_invariant(entries):
    V = FinAbelianPGroup.from_exponents(3, [1, 1, 1])
    g = PHom(V, V, [entries[:3], entries[3:6], entries[6:]])
    if not g.is_invertible():
        return
    perm = PHom(V, V, [[0, 0, 1], [1, 0, 0], [0, 1, 0]])
    conj = g.compose(perm).compose(g.inverse())
    assert jordan_type_order_p(conj) == (3,)


# ------------------------------------------------------- group ring

def test_sigma_kills_twist():
    for p in (3, 5, 7):
        u = GroupRingElt.u(p)
        one = GroupRingElt.one(p)
        assert ((u - one) * GroupRingElt.sigma(p)).is_zero()


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(-10, 10), min_size=3, max_size=3),
       st.lists(st.integers(-10, 10), min_size=3, max_size=3))
def test_ring_commutative(a, b):
    x = GroupRingElt(3, a)
    y = GroupRingElt(3, b)
    assert (x * y).coeffs == (y * x).coeffs


def test_reduce_sigma_mod_sigma():
    sig = GroupRingElt.sigma(3)
    assert ring_reduce(sig, [sig], 81).is_zero()


def test_reduce_square_of_twist():
    # (u-1)^2 - (sigma - 3) = -3(u-1) for p = 3
    u, one = GroupRingElt.u(3), GroupRingElt.one(3)
    sig = GroupRingElt.sigma(3)
    xi = (u - one) ** 2 - (sig - GroupRingElt.const(3, 3))
    assert ring_reduce(xi, [GroupRingElt.const(3, 3) * (u - one)], 81).is_zero()
    assert not ring_reduce(xi, [GroupRingElt.const(3, 9) * (u - one)],
                           81).is_zero()


def test_reduce_fourth_power_of_twist():
    u, one = GroupRingElt.u(3), GroupRingElt.one(3)
    sig = GroupRingElt.sigma(3)
    xi = (u - one) ** 4 + (GroupRingElt.const(3, 3) * sig
                           - GroupRingElt.const(3, 9))
    assert ring_reduce(xi, [GroupRingElt.const(3, 9) * (u - one)],
                       3 ** 5).is_zero()


def _in_scaled_augmentation(xi, p, k):
    """Membership in p^k(u-1)ZU: every coefficient divisible by p^k and the
    coefficient sum zero. (u-1) generates the augmentation ideal of ZU."""
    return (all(c % p ** k == 0 for c in xi.coeffs)
            and sum(xi.coeffs) == 0)


@pytest.mark.parametrize("p", [3, 5, 7])
@pytest.mark.parametrize("k", [1, 2, 3])
def test_twist_power_congruence(p, k):
    # (u-1)^{k(p-1)} = (-1)^{k-1} (p^{k-1} sigma - p^k)  up to p^k(u-1)ZU
    u, one = GroupRingElt.u(p), GroupRingElt.one(p)
    sig = GroupRingElt.sigma(p)
    lhs = (u - one) ** (k * (p - 1))
    sign = (-1) ** (k - 1)
    rhs = GroupRingElt.const(p, sign) * (
        GroupRingElt.const(p, p ** (k - 1)) * sig
        - GroupRingElt.const(p, p ** k))
    assert _in_scaled_augmentation(lhs - rhs, p, k)
    red = ring_reduce(lhs - rhs,
                      [GroupRingElt.const(p, p ** k) * (u - one)],
                      p ** (k + 3))
    assert red.is_zero()


@pytest.mark.parametrize("p", [3, 5, 7])
def test_twist_pth_power_divisible(p):
    u, one = GroupRingElt.u(p), GroupRingElt.one(p)
    xi = (u - one) ** p
    assert all(c % p == 0 for c in xi.coeffs)


def test_ring_reduce_decides_ideal_membership():
    # two elements reduce equally iff their difference is in the lattice
    p = 3
    u, one = GroupRingElt.u(p), GroupRingElt.one(p)
    gen = GroupRingElt.const(p, 3) * (u - one)
    a = u ** 2 + GroupRingElt.const(p, 5) * u
    b = a + gen * u
    c = a + u
    ra = ring_reduce(a, [gen], 81)
    assert ra.coeffs == ring_reduce(b, [gen], 81).coeffs
    assert ra.coeffs != ring_reduce(c, [gen], 81).coeffs
