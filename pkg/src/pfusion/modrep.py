"""F_p-representations of finite groups and p-adic lattice lifting.

The mod-p layer analyzes a module V for a group G acting through matrices:
fixed points and commutator of the order-p subgroup, Jordan type of the
generator (one nontrivial block = "minimally active"), indecomposability via
an exhaustive idempotent search in End(V), and the full submodule lattice by
cyclic spinning.

The integral layer builds lattices over Z/p^N whose reduction is a prescribed
module: induce a U-lattice to the whole group, split off the wanted summand
with an idempotent of the group-ring endomorphism algebra, and lift that
idempotent p-adically.  The induced module is kept in structured form (coset
permutations plus a small twist matrix), so the construction scales to coset
counts in the thousands; dense matrices only appear for the final small
lattice.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Sequence

import numpy as np

from .exactalg import (
    AbSubgroup,
    FinAbelianPGroup,
    PHom,
    hom_image,
    hom_kernel,
    inv_mod,
    jordan_type_order_p,
    kernel_integer_mod,
    solve_integer_mod,
)
from .grp import FinGroup, _twist_hom


class EndAlgebraTooLarge(Exception):
    """Endomorphism algebra too big for the exhaustive idempotent scan."""


class DimensionTooLarge(Exception):
    """Module dimension exceeds the cyclic-spinning bound."""


class LiftDiverged(Exception):
    """Idempotent lifting failed to stabilize (signals a bug upstream)."""


# ---------------------------------------------------------------------------
# modules over F_p


class FpGModule:
    """An F_p-space with a G-action given on the group's generators."""

    def __init__(self, group: FinGroup, space: FinAbelianPGroup,
                 gen_actions: Sequence[PHom], validate: bool = True):
        if any(o != space.p for o in space.orders):
            raise ValueError("carrier must be elementary abelian")
        if len(gen_actions) != len(group.generators):
            raise ValueError("one action matrix per group generator")
        for a in gen_actions:
            if a.source != space or a.target != space:
                raise ValueError("action matrix on the wrong space")
            if not a.is_invertible():
                raise ValueError("action matrix not invertible")
        self.group = group
        self.space = space
        self.gen_actions = tuple(gen_actions)
        self._natural = (space == group.carrier and
                         all(a == g for a, g in
                             zip(gen_actions, group.generators)))
        self._rho: dict[PHom, PHom] | None = None
        if validate and not self._natural:
            self._build_rho()

    @classmethod
    def natural(cls, group: FinGroup) -> "FpGModule":
        """The group acting on its own carrier (must be elementary)."""
        return cls(group, group.carrier, group.generators)

    @property
    def dim(self) -> int:
        return self.space.rank

    @property
    def p(self) -> int:
        return self.space.p

    def _build_rho(self):
        """Closure over (group elt, action) pairs.

        The generator-word map extends to a homomorphism iff the closure has
        exactly |G| pairs (one action per element).
        """
        ident = (PHom.identity(self.group.carrier),
                 PHom.identity(self.space))
        seen = {ident[0]: ident[1]}
        frontier = [ident]
        pairs = list(zip(self.group.generators, self.gen_actions))
        while frontier:
            nxt = []
            for g, a in frontier:
                for g2, a2 in pairs:
                    h = g.compose(g2)
                    b = a.compose(a2)
                    if h not in seen:
                        seen[h] = b
                        nxt.append((h, b))
                    elif seen[h] != b:
                        raise ValueError(
                            "action does not respect the group relations")
            frontier = nxt
        self._rho = seen

    def rho(self, g: PHom) -> PHom:
        """Action of an arbitrary group element."""
        if self._natural:
            return g
        if self._rho is None:
            self._build_rho()
        try:
            return self._rho[g]
        except KeyError:
            raise ValueError("element not in the group") from None

    def is_faithful(self) -> bool:
        if self._natural:
            return True
        if self._rho is None:
            self._build_rho()
        return len(set(self._rho.values())) == len(self._rho)

    def matrices(self) -> list[list[list[int]]]:
        return [[list(r) for r in a.matrix] for a in self.gen_actions]


def fixed_and_commutator(V: FpGModule, u: PHom) -> tuple[AbSubgroup, AbSubgroup]:
    """(C_V(u), [u, V]) = (kernel, image) of the twist v -> u(v) - v."""
    t = _twist_hom(V.rho(u))
    return hom_kernel(t), hom_image(t)


@dataclass(frozen=True)
class MinActive:
    ok: bool
    jordan: tuple[int, ...]

    def __bool__(self):
        return self.ok


def is_minimally_active(V: FpGModule, u: PHom) -> MinActive:
    """Exactly one Jordan block of the u-action moves anything."""
    jt = jordan_type_order_p(V.rho(u))
    return MinActive(sum(1 for b in jt if b >= 2) == 1, jt)


# ---------------------------------------------------------------------------
# intertwiners

def intertwiner_gens(src_space: FinAbelianPGroup,
                     src_acts: Sequence[PHom],
                     dst_space: FinAbelianPGroup,
                     dst_acts: Sequence[PHom]) -> list[list[list[int]]]:
    """Generators of the group of equivariant homs src -> dst.

    Solves X A_i = B_i X together with the well-definedness conditions as one
    integer system with per-row moduli.  Returns dst.rank x src.rank integer
    matrices; every equivariant hom is an integer combination of them modulo
    the ambient orders.
    """
    rs, rd = src_space.rank, dst_space.rank
    nvars = rd * rs

    def vid(i, j):
        return i * rs + j

    rows = []
    moduli = []
    for A, B in zip(src_acts, dst_acts):
        # (X A - B X)[i][j] = sum_t X[i][t] A[t][j] - sum_t B[i][t] X[t][j]
        for i in range(rd):
            for j in range(rs):
                row = [0] * nvars
                for t in range(rs):
                    row[vid(i, t)] += A.matrix[t][j]
                for t in range(rd):
                    row[vid(t, j)] -= B.matrix[i][t]
                rows.append(row)
                moduli.append(dst_space.orders[i])
    # well-definedness: order_src[j] * X[i][j] = 0 mod order_dst[i]
    for i in range(rd):
        for j in range(rs):
            row = [0] * nvars
            row[vid(i, j)] = src_space.orders[j]
            rows.append(row)
            moduli.append(dst_space.orders[i])
    sols = kernel_integer_mod(rows, moduli)
    out = []
    for s in sols:
        mat = [[s[vid(i, j)] % dst_space.orders[i] for j in range(rs)]
               for i in range(rd)]
        if any(any(r) for r in mat):
            out.append(mat)
    return out


def hom_space_elements(src_space: FinAbelianPGroup,
                       src_acts: Sequence[PHom],
                       dst_space: FinAbelianPGroup,
                       dst_acts: Sequence[PHom],
                       cap: int = 10 ** 6) -> list[PHom]:
    """All equivariant homs src -> dst, as PHoms (capped enumeration)."""
    gens = intertwiner_gens(src_space, src_acts, dst_space, dst_acts)
    rs, rd = src_space.rank, dst_space.rank
    flat = FinAbelianPGroup(dst_space.p,
                            [o for o in dst_space.orders for _ in range(rs)])
    sub = AbSubgroup(flat, [[m[i][j] for i in range(rd) for j in range(rs)]
                            for m in gens])
    if sub.order > cap:
        raise EndAlgebraTooLarge(f"hom group of order {sub.order}")
    out = []
    for v in sub.elements():
        mat = [[v[i * rs + j] for j in range(rs)] for i in range(rd)]
        out.append(PHom(src_space, dst_space, mat))
    return out


def find_equivariant_iso(src_space: FinAbelianPGroup,
                         src_acts: Sequence[PHom],
                         dst_space: FinAbelianPGroup,
                         dst_acts: Sequence[PHom],
                         cap: int = 10 ** 6) -> PHom | None:
    """An equivariant isomorphism, or None; complete within the cap."""
    if src_space.orders != dst_space.orders:
        return None
    gens = intertwiner_gens(src_space, src_acts, dst_space, dst_acts)
    if len(gens) == 1:
        # scalar multiples of one hom: invertible iff the generator is
        f = PHom(src_space, dst_space, gens[0])
        return f if f.is_invertible() else None
    for f in hom_space_elements(src_space, src_acts, dst_space, dst_acts,
                                cap=cap):
        if f.is_invertible():
            return f
    return None


def module_isomorphic(V: FpGModule, W: FpGModule,
                      cap: int = 10 ** 6) -> PHom | None:
    """An F_pG-isomorphism V -> W, or None.  Groups must share generators."""
    if len(V.gen_actions) != len(W.gen_actions):
        raise ValueError("modules must be over the same generator list")
    return find_equivariant_iso(V.space, V.gen_actions,
                                W.space, W.gen_actions, cap=cap)


def is_indecomposable(V: FpGModule, cap: int = 10 ** 7) -> bool:
    """True iff End_{F_pG}(V) has no idempotent besides 0 and 1."""
    p = V.p
    basis = intertwiner_gens(V.space, V.gen_actions, V.space, V.gen_actions)
    e = len(basis)
    if p ** e > cap:
        raise EndAlgebraTooLarge(f"p^{e} endomorphisms exceed cap {cap}")
    n = V.dim
    ident = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    zero = [[0] * n for _ in range(n)]
    for coeffs in product(range(p), repeat=e):
        m = [[sum(c * b[i][j] for c, b in zip(coeffs, basis)) % p
              for j in range(n)] for i in range(n)]
        if m == zero or m == ident:
            continue
        sq = [[sum(m[i][t] * m[t][j] for t in range(n)) % p
               for j in range(n)] for i in range(n)]
        if sq == m:
            return False
    return True


# ---------------------------------------------------------------------------
# submodule lattice

def _rref(rows: list[list[int]], p: int) -> tuple[tuple[int, ...], ...]:
    """Reduced row echelon form over F_p, zero rows dropped (canonical)."""
    mat = [list(r) for r in rows]
    out = []
    ncols = len(mat[0]) if mat else 0
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(mat)) if mat[i][c] % p != 0),
                   None)
        if piv is None:
            continue
        mat[r], mat[piv] = mat[piv], mat[r]
        inv = pow(mat[r][c], p - 2, p)
        mat[r] = [(x * inv) % p for x in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][c] % p:
                f = mat[i][c]
                mat[i] = [(x - f * y) % p for x, y in zip(mat[i], mat[r])]
        r += 1
        if r == len(mat):
            break
    for row in mat[:r]:
        out.append(tuple(x % p for x in row))
    return tuple(out)


def _in_span(v, basis, p):
    x = list(v)
    for row in basis:
        lead = next(i for i, t in enumerate(row) if t)
        if x[lead] % p:
            f = x[lead]
            x = [(a - f * b) % p for a, b in zip(x, row)]
    return not any(t % p for t in x)


def _spin(seed, mats, p) -> tuple[tuple[int, ...], ...]:
    basis = _rref([list(seed)], p)
    work = [list(r) for r in basis]
    while work:
        v = work.pop()
        for m in mats:
            w = [sum(m[i][j] * v[j] for j in range(len(v))) % p
                 for i in range(len(m))]
            if any(w) and not _in_span(w, basis, p):
                basis = _rref([list(r) for r in basis] + [w], p)
                work.append(w)
    return basis


def submodule_lattice(V: FpGModule, max_dim: int = 12) -> list[AbSubgroup]:
    """All G-submodules of V, smallest first.

    Every submodule is a sum of cyclic ones, so spinning each seed vector and
    closing the resulting set under sums is complete.
    """
    if V.dim > max_dim:
        raise DimensionTooLarge(f"dim {V.dim} > {max_dim}")
    p = V.p
    mats = [a.matrix for a in V.gen_actions]
    spans: set[tuple] = {()}
    for seed in product(range(p), repeat=V.dim):
        if not any(seed):
            continue
        # scalar multiples spin to the same cyclic module
        if seed[next(i for i, t in enumerate(seed) if t)] != 1:
            continue
        spans.add(_spin(seed, mats, p))
    # close under sums
    changed = True
    while changed:
        changed = False
        items = sorted(spans)
        for i in range(len(items)):
            for j in range(i + 1, len(items)):
                a, b = items[i], items[j]
                if not a or not b:
                    continue
                s = _rref([list(r) for r in a + b], p)
                if s not in spans:
                    spans.add(s)
                    changed = True
    out = [AbSubgroup(V.space, [list(r) for r in sp]) for sp in spans]
    out.sort(key=lambda s: (s.order, s.basis))
    return out


def subspace_module(V: FpGModule, sub: AbSubgroup,
                    validate: bool = False) -> FpGModule:
    """The induced module structure on an invariant subspace."""
    basis = [list(g) for g in sub.gens()]
    space = FinAbelianPGroup(V.p, [V.p] * len(basis))
    gens = []
    for a in V.gen_actions:
        cols = []
        for b in basis:
            img = a.apply(b)
            coords = _coords_in_basis(img, basis, V.p)
            if coords is None:
                raise ValueError("subspace is not invariant")
            cols.append(coords)
        mat = [[cols[j][i] for j in range(len(basis))]
               for i in range(len(basis))]
        gens.append(PHom(space, space, mat))
    return FpGModule(V.group, space, gens, validate=validate)


def quotient_module(V: FpGModule, sub: AbSubgroup,
                    validate: bool = False) -> tuple[FpGModule, PHom]:
    """(V/sub with its induced action, the projection map)."""
    p = V.p
    subspan = _rref([list(g) for g in sub.gens()], p) if sub.order > 1 else ()
    leads = {next(i for i, t in enumerate(row) if t) for row in subspan}
    free = [i for i in range(V.dim) if i not in leads]
    space = FinAbelianPGroup(p, [p] * len(free))

    def project(v):
        x = list(v)
        for row in subspan:
            lead = next(i for i, t in enumerate(row) if t)
            if x[lead] % p:
                f = x[lead]
                x = [(a - f * b) % p for a, b in zip(x, row)]
        return tuple(x[i] % p for i in free)

    gens = []
    for a in V.gen_actions:
        cols = []
        for i in free:
            e = [0] * V.dim
            e[i] = 1
            cols.append(project(a.apply(e)))
        mat = [[cols[j][i] for j in range(len(free))]
               for i in range(len(free))]
        gens.append(PHom(space, space, mat))
    proj = PHom(V.space, space,
                [[project(tuple(1 if t == j else 0 for t in range(V.dim)))[i]
                  for j in range(V.dim)] for i in range(len(free))])
    return FpGModule(V.group, space, gens, validate=validate), proj


def _coords_in_basis(v, basis, p):
    """Coordinates of v in an independent F_p list, or None."""
    if not basis:
        return None if any(v) else []
    n = len(v)
    aug = [[basis[j][i] for j in range(len(basis))] for i in range(n)]
    sol = solve_integer_mod(aug, list(v), [p] * n)
    if sol is None:
        return None
    return [x % p for x in sol]


# ---------------------------------------------------------------------------
# lattices over Z/p^N


class LatticeModP_N:
    """Free Z/p^N-module with a G-action given on the group's generators."""

    def __init__(self, group: FinGroup, space: FinAbelianPGroup,
                 gen_actions: Sequence[PHom], validate: bool = True):
        if len(set(space.orders)) > 1:
            raise ValueError("carrier must be homocyclic")
        if len(gen_actions) != len(group.generators):
            raise ValueError("one action matrix per group generator")
        for a in gen_actions:
            if a.source != space or a.target != space:
                raise ValueError("action matrix on the wrong space")
            if not a.is_invertible():
                raise ValueError("action matrix not invertible")
        self.group = group
        self.space = space
        self.gen_actions = tuple(gen_actions)
        self.p = space.p
        self.modulus = space.orders[0] if space.rank else space.p
        self.N = 0
        m = self.modulus
        while m > 1:
            m //= self.p
            self.N += 1
        if validate:
            self._check_relations()

    @property
    def rank(self) -> int:
        return self.space.rank

    def _check_relations(self):
        # same pair-closure idea as FpGModule, over Z/p^N matrices
        ident = (PHom.identity(self.group.carrier), PHom.identity(self.space))
        seen = {ident[0]: ident[1]}
        frontier = [ident]
        pairs = list(zip(self.group.generators, self.gen_actions))
        while frontier:
            nxt = []
            for g, a in frontier:
                for g2, a2 in pairs:
                    h = g.compose(g2)
                    b = a.compose(a2)
                    if h not in seen:
                        seen[h] = b
                        nxt.append((h, b))
                    elif seen[h] != b:
                        raise ValueError(
                            "action does not respect the group relations")
            frontier = nxt

    def reduction(self) -> FpGModule:
        p = self.p
        sp = FinAbelianPGroup(p, [p] * self.rank)
        gens = [PHom(sp, sp, [[x % p for x in row] for row in a.matrix])
                for a in self.gen_actions]
        return FpGModule(self.group, sp, gens, validate=False)


class ULattice:
    """A free Z/p^N-lattice for the order-p subgroup: rank and u-matrix."""

    def __init__(self, p: int, N: int, Z: Sequence[Sequence[int]]):
        self.p = p
        self.N = N
        self.modulus = p ** N
        self.rank = len(Z)
        mod = self.modulus
        self.Z = [[x % mod for x in row] for row in Z]
        zp = self.Z
        acc = [[1 if i == j else 0 for j in range(self.rank)]
               for i in range(self.rank)]
        for _ in range(p):
            acc = [[sum(acc[i][t] * zp[t][j] for t in range(self.rank)) % mod
                    for j in range(self.rank)] for i in range(self.rank)]
        if acc != [[1 if i == j else 0 for j in range(self.rank)]
                   for i in range(self.rank)]:
            raise ValueError("u-matrix must have order dividing p")

    @classmethod
    def zeta(cls, p: int, N: int) -> "ULattice":
        """Rank p-1, u acting as a primitive p-th root of unity."""
        n = p - 1
        Z = [[0] * n for _ in range(n)]
        for i in range(1, n):
            Z[i][i - 1] = 1
        for i in range(n):
            Z[i][n - 1] = -1
        return cls(p, N, Z)

    @classmethod
    def regular(cls, p: int, N: int) -> "ULattice":
        """Rank p, u permuting the basis cyclically."""
        Z = [[0] * p for _ in range(p)]
        for i in range(p):
            Z[(i + 1) % p][i] = 1
        return cls(p, N, Z)

    @classmethod
    def trivial(cls, p: int, N: int) -> "ULattice":
        return cls(p, N, [[1]])

    @classmethod
    def min_active(cls, p: int, N: int, d: int) -> "ULattice":
        """Rank d >= p: one regular block plus fixed coordinates."""
        if d < p:
            raise ValueError("rank must be at least p")
        Z = [[0] * d for _ in range(d)]
        for i in range(p):
            Z[(i + 1) % p][i] = 1
        for i in range(p, d):
            Z[i][i] = 1
        return cls(p, N, Z)


class InducedLattice:
    """Ind_U^G of a U-lattice, stored by cosets instead of dense matrices.

    Elements are vectors of shape (k, r): one rank-r block per left coset
    of U.  A group element permutes cosets and twists each block by a power
    of the u-matrix; both are precomputed from the coset table.
    """

    def __init__(self, group: FinGroup, u: PHom, M: ULattice):
        self.group = group
        self.u = u
        self.M = M
        self.p = M.p
        self.N = M.N
        self.modulus = M.modulus
        self.r = M.rank
        elems = group.elements()
        self.n_elems = len(elems)
        if self.n_elems % self.p != 0 or (self.n_elems // self.p) % self.p == 0:
            raise ValueError("order-p subgroup must be a Sylow subgroup")
        idx = {g: i for i, g in enumerate(elems)}
        self._elems = elems
        self._idx = idx
        # BFS words over the generators; gen_left[i][x] = index of g_i * x
        ngens = len(group.generators)
        gen_left = [np.zeros(self.n_elems, dtype=np.int64)
                    for _ in range(ngens)]
        for i, g in enumerate(group.generators):
            arr = gen_left[i]
            for x, e in enumerate(elems):
                arr[x] = idx[g.compose(e)]
        self.gen_left = gen_left
        ident = PHom.identity(group.carrier)
        words: dict[int, tuple[int, ...]] = {idx[ident]: ()}
        frontier = [idx[ident]]
        while frontier:
            nxt = []
            for x in frontier:
                for i in range(ngens):
                    y = int(gen_left[i][x])
                    if y not in words:
                        # g_i * elems[x]: left factor prepends to the word
                        words[y] = (i,) + words[x]
                        nxt.append(y)
            frontier = nxt
        if len(words) != self.n_elems:
            raise ValueError("generators do not generate the group")
        self.words = words
        # u powers as element indices
        upow = [ident]
        for _ in range(self.p - 1):
            upow.append(upow[-1].compose(u))
        self.upow_idx = [idx[g] for g in upow]
        self.u_idx = self.upow_idx[1]
        # left cosets gU; the identity represents coset 0, so a vector
        # supported on slot 0 is 1 (x) m
        coset_of = np.full(self.n_elems, -1, dtype=np.int64)
        twist_of = np.zeros(self.n_elems, dtype=np.int64)
        rep = []
        for x in [idx[ident]] + list(range(self.n_elems)):
            if coset_of[x] >= 0:
                continue
            c = len(rep)
            rep.append(x)
            e = elems[x]
            for j in range(self.p):
                y = idx[e.compose(upow[j])]
                coset_of[y] = c
                twist_of[y] = j
        self.k = len(rep)
        self.rep = np.array(rep, dtype=np.int64)
        self.coset_of = coset_of
        self.twist_of = twist_of
        # u-matrix powers, transposed for row-vector application
        mod = self.modulus
        Z = np.array(M.Z, dtype=np.int64) % mod
        self.Zpow = [np.eye(self.r, dtype=np.int64)]
        for _ in range(self.p - 1):
            self.Zpow.append((self.Zpow[-1] @ Z) % mod)
        self.ZpowT = [np.ascontiguousarray(z.T) for z in self.Zpow]
        self.Z = Z
        self.Zinv = np.array(inv_mod(M.Z, mod), dtype=np.int64)
        self._act_cache: dict[int, tuple[np.ndarray, np.ndarray]] = {}

    @property
    def rank(self) -> int:
        return self.k * self.r

    def elem_index(self, g: PHom) -> int:
        try:
            return self._idx[g]
        except KeyError:
            raise ValueError("element not in the group") from None

    def left_mult_indices(self, x: int, targets: np.ndarray) -> np.ndarray:
        """Indices of elems[x] * elems[t] for each t, via the word of x."""
        out = targets
        for i in reversed(self.words[x]):
            out = self.gen_left[i][out]
        return out

    def act_tables(self, x: int) -> tuple[np.ndarray, np.ndarray]:
        """(perm, tw): elems[x] sends coset c to perm[c] with twist tw[c]."""
        cached = self._act_cache.get(x)
        if cached is not None:
            return cached
        y = self.left_mult_indices(x, self.rep)
        perm = self.coset_of[y]
        tw = self.twist_of[y]
        self._act_cache[x] = (perm, tw)
        return perm, tw

    def apply_elem(self, x: int, w: np.ndarray) -> np.ndarray:
        """Action of elems[x] on a (k, r) vector or a (k, r, m) stack."""
        perm, tw = self.act_tables(x)
        out = np.empty_like(w)
        for t in range(self.p):
            sel = np.nonzero(tw == t)[0]
            if not sel.size:
                continue
            if w.ndim == 2:
                out[perm[sel]] = (w[sel] @ self.ZpowT[t]) % self.modulus
            else:
                out[perm[sel]] = np.einsum(
                    'rs,csm->crm', self.Zpow[t], w[sel]) % self.modulus
        return out

    def u_orbit_structure(self) -> tuple[int, int]:
        """(number of u-fixed cosets, number of free u-orbits on cosets)."""
        perm, _ = self.act_tables(self.u_idx)
        fixed = int(np.sum(perm == np.arange(self.k)))
        return fixed, (self.k - fixed) // self.p

    def u_orbits(self) -> list[list[int]]:
        perm, _ = self.act_tables(self.u_idx)
        seen = np.zeros(self.k, dtype=bool)
        orbits = []
        for c in range(self.k):
            if seen[c]:
                continue
            orb = [c]
            seen[c] = True
            nxt = int(perm[c])
            while nxt != c:
                orb.append(nxt)
                seen[nxt] = True
                nxt = int(perm[nxt])
            orbits.append(orb)
        return orbits

    def to_dense(self, cap: int = 4096) -> LatticeModP_N:
        """The same module as an explicit LatticeModP_N (small ranks only)."""
        n = self.rank
        if n > cap:
            raise ValueError(f"rank {n} exceeds dense cap {cap}")
        mod = self.modulus
        space = FinAbelianPGroup(self.p, [mod] * n)
        gens = []
        for g in self.group.generators:
            x = self.elem_index(g)
            perm, tw = self.act_tables(x)
            mat = [[0] * n for _ in range(n)]
            for c in range(self.k):
                blk = self.Zpow[int(tw[c])]
                pc = int(perm[c])
                for i in range(self.r):
                    for j in range(self.r):
                        mat[pc * self.r + i][c * self.r + j] = int(blk[i][j])
            gens.append(PHom(space, space, mat))
        return LatticeModP_N(self.group, space, gens, validate=False)


def induce_from_U(group: FinGroup, u: PHom, M: ULattice) -> InducedLattice:
    """Ind_U^G(M) for U = <u> of order p, in structured coset form."""
    return InducedLattice(group, u, M)


# ---------------------------------------------------------------------------
# Jordan chains and the identification of V|_U with the model lattice


def _mat_rank_p(rows, p):
    return len(_rref(rows, p))


def _jordan_chains(nmat, p, dim) -> list[list[list[int]]]:
    """Chain bases for a nilpotent matrix over F_p.

    Returns chains [v, n v, ..., n^{s-1} v], longest first.  Candidates are
    drawn from kernel bases and small combinations; correctness is enforced
    by the final independence check.
    """
    def apply(m, v):
        return [sum(m[i][j] * v[j] for j in range(dim)) % p
                for i in range(dim)]

    powers = [[[1 if i == j else 0 for j in range(dim)] for i in range(dim)]]
    while True:
        nxt = [[sum(powers[-1][i][t] * nmat[t][j] for t in range(dim)) % p
                for j in range(dim)] for i in range(dim)]
        powers.append(nxt)
        if not any(any(r) for r in nxt):
            break
    smax = len(powers) - 1
    ranks = [_mat_rank_p(m, p) for m in powers]
    # blocks of size exactly s: r_{s-1} - 2 r_s + r_{s+1}
    counts = {}
    for s in range(1, smax + 1):
        rs1 = ranks[s - 1]
        rs = ranks[s] if s < len(ranks) else 0
        rs2 = ranks[s + 1] if s + 1 < len(ranks) else 0
        counts[s] = rs1 - 2 * rs + rs2

    def kernel_basis(m):
        from .exactalg import kernel_mod_p
        return kernel_mod_p(m, p)

    chains = []
    chosen: list[list[int]] = []

    def independent_with(extra):
        return _mat_rank_p(chosen + extra, p) == len(chosen) + len(extra)

    for s in range(smax, 0, -1):
        needed = counts[s]
        if needed <= 0:
            continue
        cands = kernel_basis(powers[s])
        # include sums of pairs as a fallback candidate pool
        pool = list(cands)
        for i in range(len(cands)):
            for j in range(i + 1, len(cands)):
                pool.append([(a + b) % p for a, b in zip(cands[i], cands[j])])
        got = 0
        for v in pool:
            if got == needed:
                break
            chain = [v]
            for _ in range(s - 1):
                chain.append(apply(nmat, chain[-1]))
            if any(not any(x) for x in chain):
                continue
            if apply(nmat, chain[-1]) != [0] * dim:
                continue
            if independent_with(chain):
                chains.append(chain)
                chosen.extend(chain)
                got += 1
        if got < needed:
            # exhaustive fallback over the kernel of n^s
            for coeffs in product(range(p), repeat=len(cands)):
                if got == needed:
                    break
                if not any(coeffs):
                    continue
                v = [sum(c * cands[t][i] for t, c in enumerate(coeffs)) % p
                     for i in range(dim)]
                chain = [v]
                for _ in range(s - 1):
                    chain.append(apply(nmat, chain[-1]))
                if any(not any(x) for x in chain):
                    continue
                if apply(nmat, chain[-1]) != [0] * dim:
                    continue
                if independent_with(chain):
                    chains.append(chain)
                    chosen.extend(chain)
                    got += 1
        if got < needed:
            raise RuntimeError("jordan chain search failed")
    return chains


def conjugating_matrix_mod_p(uA, uB, p: int):
    """T with uA T = T uB mod p, both of order p with equal Jordan type."""
    dim = len(uA)

    def minus_ident(m):
        return [[(x - (1 if i == j else 0)) % p for j, x in enumerate(row)]
                for i, row in enumerate(m)]

    ca = _jordan_chains(minus_ident(uA), p, dim)
    cb = _jordan_chains(minus_ident(uB), p, dim)
    if sorted(len(c) for c in ca) != sorted(len(c) for c in cb):
        raise ValueError("operators have different Jordan types")
    ca.sort(key=len, reverse=True)
    cb.sort(key=len, reverse=True)
    cols_a = [v for ch in ca for v in ch]
    cols_b = [v for ch in cb for v in ch]
    A = [[cols_a[j][i] for j in range(dim)] for i in range(dim)]
    B = [[cols_b[j][i] for j in range(dim)] for i in range(dim)]
    Binv = inv_mod(B, p)
    T = [[sum(A[i][t] * Binv[t][j] for t in range(dim)) % p
          for j in range(dim)] for i in range(dim)]
    # verify
    lhs = [[sum(uA[i][t] * T[t][j] for t in range(dim)) % p
            for j in range(dim)] for i in range(dim)]
    rhs = [[sum(T[i][t] * uB[t][j] for t in range(dim)) % p
            for j in range(dim)] for i in range(dim)]
    if lhs != rhs:
        raise RuntimeError("conjugation identity failed")
    return T


# ---------------------------------------------------------------------------
# idempotent lifting


@dataclass
class LiftResult:
    """Outcome of a lattice lift.

    lattice reduces mod p to the input module, and iso is that reduction
    isomorphism (the identity on coordinates by construction).  slotmap is
    the final idempotent in slot form; basis the chosen lattice basis inside
    the induced module, flattened to (k*r, dim).
    """
    lattice: LatticeModP_N
    iso: PHom
    induced: InducedLattice
    slotmap: np.ndarray
    basis: np.ndarray
    T: list
    u: PHom
    rows: list


def _slot_apply(ind: InducedLattice, slotmap: np.ndarray,
                w: np.ndarray) -> np.ndarray:
    """Apply the endomorphism with slot data `slotmap` to w.

    The endomorphism sends 1 (x) m to the vector with value slotmap[c] @ m
    at slot c; on a general vector it is sum_c g_c . (that map)(w[c]).
    """
    mod = ind.modulus
    out = np.zeros_like(w)
    for c in range(ind.k):
        wc = w[c]
        if not wc.any():
            continue
        if w.ndim == 2:
            pv = np.einsum('crs,s->cr', slotmap, wc) % mod
        else:
            pv = np.einsum('crs,sm->crm', slotmap, wc) % mod
        out += ind.apply_elem(int(ind.rep[c]), pv)
    return out % mod


def _initial_slotmap(V: FpGModule, ind: InducedLattice, T) -> np.ndarray:
    """Slot data of the averaged splitting idempotent, mod p.

    Slot c carries (1/k) T^{-1} rho(g_c)^{-1} T; composing the counit
    "g (x) m -> rho(g) T m" after it gives the identity on V, so this is a
    projector of the induced module onto a copy of V.
    """
    p = V.p
    d = V.dim
    kinv = pow(ind.k % p, -1, p)
    Tinv = inv_mod(T, p)
    out = np.zeros((ind.k, d, d), dtype=np.int64)
    for c in range(ind.k):
        g = ind._elems[int(ind.rep[c])]
        rinv = V.rho(g).inverse().matrix
        m = [[kinv * sum(Tinv[i][a] * sum(rinv[a][b] * T[b][j]
                                          for b in range(d))
                         for a in range(d)) % p
              for j in range(d)] for i in range(d)]
        out[c] = np.array(m, dtype=np.int64)
    return out


def _equivariant_slot_lift(ind: InducedLattice,
                           slotbar: np.ndarray) -> np.ndarray:
    """Lift mod-p slot data to Z/p^N compatibly with the u-action.

    Free u-orbits propagate the representative slot around the orbit; a
    u-fixed slot needs slot Z = Z^t slot, solved as a linear correction
    divisible by p.
    """
    p, N, mod = ind.p, ind.N, ind.modulus
    r = ind.r
    psi = np.zeros((ind.k, r, r), dtype=np.int64)
    if N == 1:
        return slotbar % mod
    permU, twU = ind.act_tables(ind.u_idx)
    for orbit in ind.u_orbits():
        c0 = orbit[0]
        if len(orbit) == p:
            psi[c0] = slotbar[c0] % mod
            for c in orbit[:-1]:
                nxt = (ind.Zpow[int(twU[c])] @ psi[c] @ ind.Zinv) % mod
                psi[int(permU[c])] = nxt
        else:
            t = int(twU[c0])
            base = slotbar[c0] % mod
            Zt = ind.Zpow[t]
            D = (Zt @ base - base @ ind.Z) % mod
            if np.any(D % p):
                raise RuntimeError("slot data is not u-equivariant mod p")
            mod1 = mod // p
            Dd = ((D // p) % mod1).astype(np.int64)
            # variables X[i][j]; equation X Z - Z^t X = Dd entrywise
            nv = r * r
            rows = []
            rhs = []
            for i in range(r):
                for j in range(r):
                    row = [0] * nv
                    for s in range(r):
                        row[i * r + s] += int(ind.Z[s][j])
                        row[s * r + j] -= int(Zt[i][s])
                    rows.append(row)
                    rhs.append(int(Dd[i][j]))
            sol = solve_integer_mod(rows, rhs, [mod1] * len(rows))
            if sol is None:
                raise RuntimeError("u-fixed slot lift has no solution")
            X = np.array([[sol[i * r + j] % mod1 for j in range(r)]
                          for i in range(r)], dtype=np.int64)
            psi[c0] = (base + p * X) % mod
    # verify equivariance everywhere
    for c in range(ind.k):
        lhs = (psi[int(permU[c])] @ ind.Z) % mod
        rhs2 = (ind.Zpow[int(twU[c])] @ psi[c]) % mod
        if not np.array_equal(lhs, rhs2):
            raise RuntimeError("equivariant lift failed")
    return psi


def _power_to_idempotent(ind: InducedLattice, psi: np.ndarray,
                         max_iter: int | None = None) -> np.ndarray:
    """Iterate e -> e^p until stable, then return e^{p-1} (a true idempotent)."""
    p = ind.p
    if max_iter is None:
        max_iter = ind.N + 3
    cur = psi
    for _ in range(max_iter):
        nxt = cur
        for _ in range(p - 1):
            nxt = _slot_apply(ind, cur, nxt)
        if np.array_equal(nxt, cur):
            f = cur
            for _ in range(p - 2):
                f = _slot_apply(ind, cur, f)
            chk = _slot_apply(ind, f, f)
            if not np.array_equal(chk, f):
                raise LiftDiverged("stabilized map is not idempotent")
            return f
        cur = nxt
    raise LiftDiverged(f"no stable idempotent after {max_iter} iterations")


def _pick_order_p(group: FinGroup, p: int) -> PHom:
    els = group.elements_of_order(p)
    if not els:
        raise ValueError(f"group has no element of order {p}")
    return els[0]


def _lattice_from_idempotent(V: FpGModule, ind: InducedLattice, T,
                             f: np.ndarray, u: PHom):
    """Extract a basis of the image of f and the action in that basis."""
    p, mod = ind.p, ind.modulus
    d = V.dim
    kinv = pow(ind.k % p, -1, p)
    Tinv = inv_mod(T, p)
    # averaged section applied to the standard basis of V, lifted entrywise
    bbar = np.zeros((ind.k, d, d), dtype=np.int64)
    for c in range(ind.k):
        g = ind._elems[int(ind.rep[c])]
        rinv = V.rho(g).inverse().matrix
        m = [[kinv * sum(Tinv[i][a] * rinv[a][j] for a in range(d)) % p
              for j in range(d)] for i in range(d)]
        bbar[c] = np.array(m, dtype=np.int64)
    B = _slot_apply(ind, f, bbar)
    flat = B.reshape(ind.k * ind.r, d)
    if not np.array_equal(_slot_apply(ind, f, B), B):
        raise RuntimeError("basis does not lie in the idempotent image")
    # pick d rows invertible mod p
    rows: list[int] = []
    picked: list[list[int]] = []
    for i in range(flat.shape[0]):
        cand = picked + [[int(x) % p for x in flat[i]]]
        if _mat_rank_p(cand, p) == len(cand):
            rows.append(i)
            picked = cand
            if len(rows) == d:
                break
    if len(rows) < d:
        raise RuntimeError("idempotent image has rank below the module dim")
    sub = [[int(x) for x in flat[i]] for i in rows]
    subinv = np.array(inv_mod(sub, mod), dtype=np.int64)
    space = FinAbelianPGroup(p, [mod] * d)
    gen_mats = []
    for g in V.group.generators:
        CG = ind.apply_elem(ind.elem_index(g), B)
        cflat = CG.reshape(ind.k * ind.r, d)
        X = (subinv @ cflat[rows]) % mod
        if not np.array_equal((flat @ X) % mod, cflat):
            raise RuntimeError("image of the basis is not in its own span")
        red = [[int(x) % p for x in row] for row in X]
        if red != [[x % p for x in row] for row in V.rho(g).matrix]:
            raise RuntimeError("reduction does not match the input module")
        gen_mats.append(PHom(space, space,
                             [[int(x) for x in row] for row in X]))
    lat = LatticeModP_N(V.group, space, gen_mats, validate=False)
    ident = [[1 if i == j else 0 for j in range(d)] for i in range(d)]
    iso = PHom(lat.reduction().space, V.space, ident)
    return lat, iso, B.copy(), rows


def lift_lattice(V: FpGModule, N: int, u: PHom | None = None) -> LiftResult:
    """A Z/p^N-lattice reducing to V, built inside an induced module.

    Requires V faithful, minimally active and indecomposable of dimension at
    least p-1, with the order-p subgroup a Sylow subgroup.  The model
    U-lattice is chosen by dimension; the projector onto the wanted summand
    is lifted p-adically by powering.
    """
    p, d = V.p, V.dim
    if d < p - 1:
        raise ValueError("dimension below p-1")
    if u is None:
        u = _pick_order_p(V.group, p)
    ma = is_minimally_active(V, u)
    if not ma.ok:
        raise ValueError("module is not minimally active")
    if not V.is_faithful():
        raise ValueError("module is not faithful")
    if not is_indecomposable(V):
        raise ValueError("module is decomposable")
    if d == p - 1:
        M = ULattice.zeta(p, N)
    elif d == p:
        M = ULattice.regular(p, N)
    else:
        M = ULattice.min_active(p, N, d)
    ind = induce_from_U(V.group, u, M)
    T = conjugating_matrix_mod_p(
        V.rho(u).matrix,
        [[x % p for x in row] for row in M.Z], p)
    psibar = _initial_slotmap(V, ind, T)
    psi = _equivariant_slot_lift(ind, psibar)
    f = _power_to_idempotent(ind, psi)
    if np.any((f - psibar) % p):
        raise RuntimeError("final idempotent moved mod p")
    lat, iso, B, rows = _lattice_from_idempotent(V, ind, T, f, u)
    return LiftResult(lat, iso, ind, f, B, T, u, rows)


@dataclass
class WithLineResult:
    """Lattice lift of a dimension-p module carrying an invariant line.

    line is the rank-1 sublattice of the lattice carrier whose reduction is
    the prescribed line of the module.
    """
    lattice: LatticeModP_N
    iso: PHom
    line: AbSubgroup
    line_generator: tuple
    induced: InducedLattice
    slotmap: np.ndarray


def _sigma_defects(ind: InducedLattice, psi: np.ndarray,
                   Q: np.ndarray) -> np.ndarray:
    """Per-slot value of (map to the root lattice) o psi o (line inclusion).

    Slot c carries Q @ psi[c] @ ones; the endomorphism preserves the induced
    line exactly when every slot vanishes.
    """
    mod = ind.modulus
    sigma = np.ones(ind.r, dtype=np.int64)
    return np.einsum('qr,crs,s->cq', Q, psi, sigma) % mod


def lift_lattice_with_line(V: FpGModule, V1: AbSubgroup, N: int,
                           u: PHom | None = None) -> WithLineResult:
    """Lift a dimension-p module together with an invariant line.

    The model U-lattice is the free rank-p one; the lift is corrected so the
    idempotent preserves the induced copy of the fixed line, which pins a
    rank-1 sublattice reducing onto V1.
    """
    p, d = V.p, V.dim
    if d != p:
        raise ValueError("dimension must equal p")
    if V1.order != p:
        raise ValueError("line must have order p")
    gen1 = list(V1.gens()[0])
    for a in V.gen_actions:
        img = a.apply(gen1)
        if AbSubgroup(V.space, [list(img)]) != V1:
            raise ValueError("line is not invariant")
    if u is None:
        u = _pick_order_p(V.group, p)
    ma = is_minimally_active(V, u)
    if not ma.ok:
        raise ValueError("module is not minimally active")
    if not V.is_faithful():
        raise ValueError("module is not faithful")
    if not is_indecomposable(V):
        raise ValueError("module is decomposable")
    M = ULattice.regular(p, N)
    ind = induce_from_U(V.group, u, M)
    mod = ind.modulus
    T = conjugating_matrix_mod_p(
        V.rho(u).matrix,
        [[x % p for x in row] for row in M.Z], p)
    psibar = _initial_slotmap(V, ind, T)
    psi = _equivariant_slot_lift(ind, psibar)
    # coordinates of zeta^i on the root-of-unity basis, one column per u^i
    Q = np.zeros((p - 1, p), dtype=np.int64)
    for i in range(p - 1):
        Q[i][i] = 1
        Q[i][p - 1] = -1 % mod
    defects = _sigma_defects(ind, psi, Q)
    if np.any(defects % p):
        raise RuntimeError("line is not preserved mod p")
    if N > 1:
        mod1 = mod // p
        permU, twU = ind.act_tables(ind.u_idx)
        for orbit in ind.u_orbits():
            if len(orbit) == 1:
                # a twisted slot sends the fixed vector to a Z^t-fixed one,
                # which is again a multiple of it; nothing to correct
                if np.any(defects[orbit[0]]):
                    raise RuntimeError("u-fixed slot breaks the line")
                continue
            rows = []
            rhs = []
            a = 0
            for c in orbit:
                QZ = (Q @ ind.Zpow[a]) % mod1
                for q in range(p - 1):
                    rows.append([int(x) for x in QZ[q]])
                    rhs.append(int((-(defects[c][q] // p)) % mod1))
                a = (a + int(twU[c])) % p
            sol = solve_integer_mod(rows, rhs, [mod1] * len(rows))
            if sol is None:
                raise RuntimeError("line correction has no solution")
            y = np.array([s % mod1 for s in sol], dtype=np.int64)
            X = np.zeros((p, p), dtype=np.int64)
            X[:, 0] = y
            a = 0
            for j, c in enumerate(orbit):
                delta = (ind.Zpow[a] @ X @
                         np.linalg.matrix_power(ind.Zinv, j) % mod)
                psi[c] = (psi[c] + p * (delta % mod)) % mod
                a = (a + int(twU[c])) % p
        # re-verify equivariance and the constraint
        for c in range(ind.k):
            lhs = (psi[int(permU[c])] @ ind.Z) % mod
            rhs2 = (ind.Zpow[int(twU[c])] @ psi[c]) % mod
            if not np.array_equal(lhs, rhs2):
                raise RuntimeError("correction broke equivariance")
        if np.any(_sigma_defects(ind, psi, Q)):
            raise RuntimeError("line correction failed")
    f = _power_to_idempotent(ind, psi)
    if np.any((f - psibar) % p):
        raise RuntimeError("final idempotent moved mod p")
    if np.any(_sigma_defects(ind, f, Q)):
        raise RuntimeError("powering broke the line constraint")
    lat, iso, B, rows = _lattice_from_idempotent(V, ind, T, f, u)
    # image of the induced line generator, in lattice coordinates
    w0 = np.zeros((ind.k, ind.r), dtype=np.int64)
    w0[0] = np.ones(ind.r, dtype=np.int64)
    lam = _slot_apply(ind, f, w0).reshape(ind.k * ind.r)
    flat = B.reshape(ind.k * ind.r, d)
    sub = [[int(x) for x in flat[i]] for i in rows]
    subinv = np.array(inv_mod(sub, mod), dtype=np.int64)
    x = (subinv @ lam[rows]) % mod
    if not np.array_equal((flat @ x) % mod, lam):
        raise RuntimeError("line generator escaped the lattice")
    if not np.any(x % p):
        raise RuntimeError("line generator is divisible by p")
    xm = [int(t) % p for t in x]
    if AbSubgroup(V.space, [xm]) != V1:
        raise RuntimeError("line reduction does not match the input line")
    line = AbSubgroup(lat.space, [[int(t) for t in x]])
    return WithLineResult(lat, iso, line, tuple(int(t) for t in x), ind, f)
