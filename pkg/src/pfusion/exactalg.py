"""Exact linear algebra over F_p, Z/p^k and the p-local integers.

Everything here is integer arithmetic: matrices are tuples/lists of Python ints,
reductions happen modulo explicit p-powers, and no floating point is involved.
The module provides

* Smith normal form with unimodular transform tracking,
* column-style Hermite normal form (canonical lattice bases),
* finite abelian p-groups in invariant-factor form with their homomorphisms,
* kernels/images of such homomorphisms,
* Jordan types of order-p operators on F_p-spaces,
* group-ring arithmetic for a cyclic group of prime order p, with canonical
  residues modulo an ideal lattice.

Subgroups of abelian p-groups are kept in a canonical form (HNF of the
generator-plus-relation lattice) so equality is just tuple comparison.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterator, Sequence


# ---------------------------------------------------------------------------
# plain integer matrix helpers


def mat_identity(n: int) -> list[list[int]]:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def mat_mul(a: Sequence[Sequence[int]], b: Sequence[Sequence[int]], mod: int | None = None):
    n, k, m = len(a), len(b), len(b[0]) if b else 0
    out = [[0] * m for _ in range(n)]
    for i in range(n):
        ai = a[i]
        oi = out[i]
        for t in range(k):
            c = ai[t]
            if c == 0:
                continue
            bt = b[t]
            for j in range(m):
                oi[j] += c * bt[j]
        if mod is not None:
            for j in range(m):
                oi[j] %= mod
    return out


def mat_vec(a: Sequence[Sequence[int]], v: Sequence[int], mod: int | None = None) -> list[int]:
    out = [sum(c * x for c, x in zip(row, v)) for row in a]
    if mod is not None:
        out = [x % mod for x in out]
    return out


def mat_pow(a, e: int, mod: int | None = None):
    n = len(a)
    result = mat_identity(n)
    base = [list(r) for r in a]
    while e > 0:
        if e & 1:
            result = mat_mul(result, base, mod)
        base = mat_mul(base, base, mod)
        e >>= 1
    return result


def mat_eq_mod(a, b, mod: int) -> bool:
    return all((x - y) % mod == 0 for ra, rb in zip(a, b) for x, y in zip(ra, rb))


def mat_det(a) -> int:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    n = len(a)
    if n == 0:
        return 1
    m = [list(r) for r in a]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            m[i][k] = 0
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def mat_inv_unimodular(a) -> list[list[int]]:
    """Integer inverse of a matrix with determinant +-1."""
    n = len(a)
    work = [[Fraction(a[i][j]) for j in range(n)]
            + [Fraction(1 if j == i else 0) for j in range(n)]
            for i in range(n)]
    for k in range(n):
        piv = next((i for i in range(k, n) if work[i][k] != 0), None)
        if piv is None:
            raise ValueError("matrix is singular")
        work[k], work[piv] = work[piv], work[k]
        inv = 1 / work[k][k]
        work[k] = [x * inv for x in work[k]]
        for i in range(n):
            if i != k and work[i][k] != 0:
                f = work[i][k]
                work[i] = [x - f * y for x, y in zip(work[i], work[k])]
    out = []
    for i in range(n):
        row = []
        for j in range(n, 2 * n):
            x = work[i][j]
            if x.denominator != 1:
                raise ValueError("matrix is not unimodular")
            row.append(int(x))
        out.append(row)
    return out


def inv_mod(a, mod: int):
    """Inverse of a matrix over Z/mod, for mod a prime power p^N.

    Gauss-Jordan with pivots that are units mod p; raises ValueError if the
    matrix is not invertible mod p.
    """
    n = len(a)
    p = _prime_of(mod)
    work = [[x % mod for x in row] + [1 if i == j else 0 for j in range(n)]
            for i, row in enumerate(a)]
    for col in range(n):
        piv = next((r for r in range(col, n) if work[r][col] % p != 0), None)
        if piv is None:
            raise ValueError("matrix not invertible mod p")
        work[col], work[piv] = work[piv], work[col]
        inv = pow(work[col][col], -1, mod)
        work[col] = [(x * inv) % mod for x in work[col]]
        for r in range(n):
            if r != col and work[r][col]:
                c = work[r][col]
                work[r] = [(x - c * y) % mod for x, y in zip(work[r], work[col])]
    return [row[n:] for row in work]


def _prime_of(mod: int) -> int:
    # smallest prime factor; mod is always a small prime power here
    d = 2
    m = mod
    while d * d <= m:
        if m % d == 0:
            return d
        d += 1
    return m


def rank_mod_p(a, p: int) -> int:
    """Rank of a matrix over F_p."""
    if not a or not a[0]:
        return 0
    m = [[x % p for x in row] for row in a]
    rows, cols = len(m), len(m[0])
    rank = 0
    for col in range(cols):
        piv = next((r for r in range(rank, rows) if m[r][col] % p != 0), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        inv = pow(m[rank][col], -1, p)
        m[rank] = [(x * inv) % p for x in m[rank]]
        for r in range(rows):
            if r != rank and m[r][col]:
                c = m[r][col]
                m[r] = [(x - c * y) % p for x, y in zip(m[r], m[rank])]
        rank += 1
        if rank == rows:
            break
    return rank


def kernel_mod_p(a, p: int) -> list[list[int]]:
    """Basis vectors of the right kernel of a over F_p."""
    if not a:
        return []
    rows, cols = len(a), len(a[0])
    m = [[x % p for x in row] for row in a]
    pivots: list[int] = []
    rank = 0
    for col in range(cols):
        piv = next((r for r in range(rank, rows) if m[r][col] % p != 0), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        inv = pow(m[rank][col], -1, p)
        m[rank] = [(x * inv) % p for x in m[rank]]
        for r in range(rows):
            if r != rank and m[r][col]:
                c = m[r][col]
                m[r] = [(x - c * y) % p for x, y in zip(m[r], m[rank])]
        pivots.append(col)
        rank += 1
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for fc in free:
        v = [0] * cols
        v[fc] = 1
        for r, pc in enumerate(pivots):
            v[pc] = (-m[r][fc]) % p
        basis.append(v)
    return basis


# ---------------------------------------------------------------------------
# Smith and Hermite normal forms over Z


@dataclass(frozen=True)
class SnfResult:
    """L * M * R = D with L, R unimodular over Z and D diagonal.

    `d` holds the diagonal (invariant factors, nonnegative, each dividing the
    next); `profile` holds their p-valuations, None for a zero factor.
    """

    d: tuple[int, ...]
    left: tuple[tuple[int, ...], ...]
    right: tuple[tuple[int, ...], ...]
    profile: tuple[int | None, ...]


def snf(mat: Sequence[Sequence[int]], p: int) -> SnfResult:
    rows = len(mat)
    cols = len(mat[0]) if rows else 0
    m = [list(r) for r in mat]
    left = mat_identity(rows)
    right = mat_identity(cols)

    def swap_rows(i, j):
        m[i], m[j] = m[j], m[i]
        left[i], left[j] = left[j], left[i]

    def swap_cols(i, j):
        for row in m:
            row[i], row[j] = row[j], row[i]
        for row in right:
            row[i], row[j] = row[j], row[i]

    def add_row(src, dst, c):
        m[dst] = [x + c * y for x, y in zip(m[dst], m[src])]
        left[dst] = [x + c * y for x, y in zip(left[dst], left[src])]

    def add_col(src, dst, c):
        for row in m:
            row[dst] += c * row[src]
        for row in right:
            row[dst] += c * row[src]

    def negate_row(i):
        m[i] = [-x for x in m[i]]
        left[i] = [-x for x in left[i]]

    n = min(rows, cols)
    s = 0
    while s < n:
        # locate a nonzero pivot of least absolute value in the trailing block
        best = None
        for i in range(s, rows):
            for j in range(s, cols):
                if m[i][j] != 0 and (best is None or abs(m[i][j]) < abs(m[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        swap_rows(s, best[0])
        swap_cols(s, best[1])
        if m[s][s] < 0:
            negate_row(s)
        dirty = False
        for i in range(s + 1, rows):
            if m[i][s] % m[s][s] != 0:
                dirty = True
            add_row(s, i, -(m[i][s] // m[s][s]))
        for j in range(s + 1, cols):
            if m[s][j] % m[s][s] != 0:
                dirty = True
            add_col(s, j, -(m[s][j] // m[s][s]))
        if dirty or any(m[i][s] for i in range(s + 1, rows)) \
                or any(m[s][j] for j in range(s + 1, cols)):
            continue
        # pivot must divide the rest of the block for the invariant chain
        offender = None
        for i in range(s + 1, rows):
            for j in range(s + 1, cols):
                if m[i][j] % m[s][s] != 0:
                    offender = i
                    break
            if offender is not None:
                break
        if offender is not None:
            add_row(offender, s, 1)
            continue
        s += 1

    d = tuple(m[i][i] for i in range(n))
    profile = []
    for x in d:
        if x == 0:
            # zero factor: infinite valuation
            profile.append(None)
            continue
        v = 0
        while x % p == 0:
            x //= p
            v += 1
        profile.append(v)
    return SnfResult(
        d=d,
        left=tuple(tuple(r) for r in left),
        right=tuple(tuple(r) for r in right),
        profile=tuple(profile),
    )


def hnf_cols(mat: Sequence[Sequence[int]]) -> tuple[tuple[int, ...], ...]:
    """Canonical basis of the column lattice of `mat`, as a tuple of columns.

    Column-style Hermite form: pivot rows strictly increase, pivots positive,
    entries left of a pivot reduced into [0, pivot). Two generating sets span
    the same lattice iff their forms are equal.
    """
    rows = len(mat)
    work = [list(c) for c in zip(*mat)] if rows else []
    work = [c for c in work if any(c)]
    basis: list[list[int]] = []
    for r in range(rows):
        # combine all columns with nonzero entry in row r via gcd steps; a
        # column whose row-r entry cancels drops back into the waiting pool
        active = [c for c in work if c[r] != 0]
        work = [c for c in work if c[r] == 0]
        while len(active) > 1:
            active.sort(key=lambda c: abs(c[r]))
            a = active[0]
            survivors = [a]
            for b in active[1:]:
                q = b[r] // a[r]
                nb = [x - q * y for x, y in zip(b, a)]
                if nb[r] != 0:
                    survivors.append(nb)
                elif any(nb):
                    work.append(nb)
            active = survivors
        if not active:
            continue
        piv = active[0]
        if piv[r] < 0:
            piv = [-x for x in piv]
        basis.append(piv)
    # clear entries above each pivot: reduce basis columns against later pivots
    pivot_rows = []
    for c in basis:
        pivot_rows.append(next(i for i, x in enumerate(c) if x != 0))
    for i in range(len(basis)):
        for j in range(i + 1, len(basis)):
            pr = pivot_rows[j]
            q = basis[i][pr] // basis[j][pr]
            if q:
                basis[i] = [x - q * y for x, y in zip(basis[i], basis[j])]
    return tuple(tuple(c) for c in basis)


def integer_kernel(mat: Sequence[Sequence[int]], p: int = 2) -> list[list[int]]:
    """Basis of {x in Z^cols : mat @ x = 0}, read off the SNF right transform."""
    rows = len(mat)
    cols = len(mat[0]) if rows else 0
    if cols == 0:
        return []
    if rows == 0:
        return [[1 if i == j else 0 for i in range(cols)] for j in range(cols)]
    res = snf(mat, p)
    rank = sum(1 for x in res.d if x != 0)
    # columns of R beyond the rank span the kernel
    return [[res.right[i][j] for i in range(cols)] for j in range(rank, cols)]


def solve_integer_mod(mat, b: Sequence[int], moduli: Sequence[int]) -> list[int] | None:
    """One x with mat @ x = b componentwise mod moduli, or None.

    Solved exactly: stack the moduli as extra columns and solve the integer
    system [mat | diag(moduli)] z = b via SNF.
    """
    rows = len(mat)
    cols = len(mat[0]) if rows else 0
    aug = [list(mat[i]) + [moduli[i] if j == i else 0 for j in range(rows)]
           for i in range(rows)]
    res = snf(aug, 2)
    lb = mat_vec(res.left, list(b))
    y = [0] * (cols + rows)
    for i in range(rows):
        di = res.d[i] if i < len(res.d) else 0
        if di == 0:
            if lb[i] != 0:
                return None
        else:
            if lb[i] % di != 0:
                return None
            y[i] = lb[i] // di
    z = mat_vec(res.right, y)
    return z[:cols]


def kernel_integer_mod(mat, moduli: Sequence[int]) -> list[list[int]]:
    """Generators of {x in Z^cols : mat @ x = 0 componentwise mod moduli}."""
    rows = len(mat)
    cols = len(mat[0]) if rows else 0
    if rows == 0:
        return [[1 if i == j else 0 for i in range(cols)] for j in range(cols)]
    aug = [list(mat[i]) + [moduli[i] if j == i else 0 for j in range(rows)]
           for i in range(rows)]
    ker = integer_kernel(aug)
    return [k[:cols] for k in ker]


# ---------------------------------------------------------------------------
# finite abelian p-groups


class FinAbelianPGroup:
    """Finite abelian p-group in invariant-factor form.

    Elements are length-`rank` tuples with coordinate i reduced modulo
    orders[i]; orders is a non-increasing list of powers of p.
    """

    __slots__ = ("p", "orders", "ks", "_hash")

    def __init__(self, p: int, orders: Sequence[int]):
        if p < 2:
            raise ValueError("p must be a prime")
        ks = []
        for o in orders:
            k = 0
            x = o
            while x % p == 0:
                x //= p
                k += 1
            if x != 1 or k == 0:
                raise ValueError(f"order {o} is not a positive power of {p}")
            ks.append(k)
        if any(orders[i] < orders[i + 1] for i in range(len(orders) - 1)):
            raise ValueError("orders must be non-increasing")
        self.p = p
        self.orders = tuple(orders)
        self.ks = tuple(ks)
        self._hash = hash((p, self.orders))

    @classmethod
    def from_exponents(cls, p: int, ks: Sequence[int]) -> "FinAbelianPGroup":
        return cls(p, [p ** k for k in ks])

    @property
    def rank(self) -> int:
        return len(self.orders)

    @property
    def exponent(self) -> int:
        return self.orders[0] if self.orders else 1

    @property
    def order(self) -> int:
        n = 1
        for o in self.orders:
            n *= o
        return n

    def zero(self) -> tuple[int, ...]:
        return (0,) * self.rank

    def reduce(self, v: Sequence[int]) -> tuple[int, ...]:
        return tuple(x % o for x, o in zip(v, self.orders))

    def add(self, a, b) -> tuple[int, ...]:
        return tuple((x + y) % o for x, y, o in zip(a, b, self.orders))

    def neg(self, a) -> tuple[int, ...]:
        return tuple((-x) % o for x, o in zip(a, self.orders))

    def sub(self, a, b) -> tuple[int, ...]:
        return tuple((x - y) % o for x, y, o in zip(a, b, self.orders))

    def smul(self, c: int, a) -> tuple[int, ...]:
        return tuple((c * x) % o for x, o in zip(a, self.orders))

    def elt_order(self, a) -> int:
        n = 1
        for x, o in zip(a, self.orders):
            if x == 0:
                continue
            n = max(n, o // math.gcd(x, o))
        return n

    def elements(self) -> Iterator[tuple[int, ...]]:
        if self.order > 10 ** 7:
            raise ValueError("group too large to enumerate")
        yield from product(*(range(o) for o in self.orders))

    def omega(self, n: int) -> "AbSubgroup":
        """Subgroup of elements of order dividing p^n."""
        gens = []
        for i, k in enumerate(self.ks):
            e = [0] * self.rank
            e[i] = self.p ** max(0, k - n)
            gens.append(tuple(e))
        return AbSubgroup(self, gens)

    def agemo(self, n: int) -> "AbSubgroup":
        """Subgroup of p^n-th powers."""
        q = self.p ** n
        gens = []
        for i in range(self.rank):
            e = [0] * self.rank
            e[i] = q
            gens.append(tuple(e))
        return AbSubgroup(self, gens)

    def full_subgroup(self) -> "AbSubgroup":
        return self.omega(self.ks[0] if self.ks else 0)

    def __eq__(self, other) -> bool:
        return isinstance(other, FinAbelianPGroup) and self.p == other.p \
            and self.orders == other.orders

    def __hash__(self):
        return self._hash

    def __repr__(self):
        parts = " x ".join(f"C{o}" for o in self.orders) or "1"
        return f"FinAbelianPGroup({parts})"


class AbSubgroup:
    """Subgroup of a FinAbelianPGroup in canonical (HNF) form.

    The subgroup is the image in the ambient group of the integer lattice
    spanned by the given generators together with the ambient relation lattice
    diag(orders); the stored basis is the column HNF of that lattice, so two
    handles are equal iff the subgroups are.
    """

    __slots__ = ("ambient", "basis", "_hash")

    def __init__(self, ambient: FinAbelianPGroup, generators: Sequence[Sequence[int]]):
        r = ambient.rank
        cols: list[list[int]] = [list(g) for g in generators]
        for i, o in enumerate(ambient.orders):
            e = [0] * r
            e[i] = o
            cols.append(e)
        mat = [[c[i] for c in cols] for i in range(r)]
        self.ambient = ambient
        self.basis = hnf_cols(mat)
        self._hash = hash((ambient, self.basis))

    @property
    def order(self) -> int:
        det = 1
        pivots = {}
        for c in self.basis:
            i = next(j for j, x in enumerate(c) if x != 0)
            pivots[i] = c[i]
        for i in range(self.ambient.rank):
            det *= pivots.get(i, 1)
        return self.ambient.order // det

    def gens(self) -> list[tuple[int, ...]]:
        out = [self.ambient.reduce(c) for c in self.basis]
        return [g for g in out if any(g)]

    def contains(self, v: Sequence[int]) -> bool:
        """Membership via triangular reduction against the HNF basis."""
        x = list(v)
        for c in self.basis:
            i = next(j for j, y in enumerate(c) if y != 0)
            if x[i] % c[i] == 0:
                q = x[i] // c[i]
                x = [a - q * b for a, b in zip(x, c)]
        return not any(x)

    def contains_subgroup(self, other: "AbSubgroup") -> bool:
        return all(self.contains(g) for g in other.gens())

    def add(self, other: "AbSubgroup") -> "AbSubgroup":
        return AbSubgroup(self.ambient, list(self.gens()) + list(other.gens()))

    def intersect(self, other: "AbSubgroup") -> "AbSubgroup":
        # x = B1 a = B2 b: solve [B1 | -B2] kernel, take the B1-part images
        b1 = [list(c) for c in self.basis]
        b2 = [list(c) for c in other.basis]
        r = self.ambient.rank
        mat = [[b1[j][i] for j in range(len(b1))] + [-b2[j][i] for j in range(len(b2))]
               for i in range(r)]
        gens = []
        for k in integer_kernel(mat):
            coeffs = k[:len(b1)]
            vec = [sum(c * b1[j][i] for j, c in enumerate(coeffs)) for i in range(r)]
            gens.append(self.ambient.reduce(vec))
        return AbSubgroup(self.ambient, gens)

    def elements(self) -> list[tuple[int, ...]]:
        if self.order > 10 ** 6:
            raise ValueError("subgroup too large to enumerate")
        seen = {self.ambient.zero()}
        frontier = [self.ambient.zero()]
        gs = self.gens()
        while frontier:
            nxt = []
            for x in frontier:
                for g in gs:
                    y = self.ambient.add(x, g)
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
            frontier = nxt
        return sorted(seen)

    def invariant_factors(self) -> tuple[int, ...]:
        """Isomorphism type of the subgroup, non-increasing p-power list."""
        gens = self.gens()
        if not gens:
            return ()
        return _image_type(self.ambient, gens)

    def __eq__(self, other):
        return isinstance(other, AbSubgroup) and self.ambient == other.ambient \
            and self.basis == other.basis

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"AbSubgroup(order={self.order}, basis={self.basis})"


def _image_type(ambient: FinAbelianPGroup, gens: list[tuple[int, ...]]) -> tuple[int, ...]:
    """Invariant factors of the subgroup generated by `gens`."""
    if not gens:
        return ()
    s = len(gens)
    r = ambient.rank
    # subgroup = Z^s / {x : sum x_i gens_i = 0 in A}; relation lattice first
    mat = [[gens[j][i] for j in range(s)] for i in range(r)]
    rel = kernel_integer_mod(mat, ambient.orders)
    relmat = [[k[i] for k in rel] for i in range(s)] if rel else [[0] * 1 for _ in range(s)]
    res = snf(relmat, ambient.p)
    d = list(res.d) + [0] * (s - len(res.d))
    factors = []
    for i in range(s):
        di = abs(d[i]) if i < len(d) else 0
        if di == 1:
            continue
        if di == 0:
            raise AssertionError("subgroup of a finite group cannot be infinite")
        factors.append(di)
    return tuple(sorted(factors, reverse=True))


@dataclass(frozen=True)
class SubgroupBasis:
    """Independent generators of a subgroup, orders matching `group.orders`.

    `gens[i]` has order `group.orders[i]` in the ambient group and the
    subgroup is the internal direct sum of the cyclic pieces, so coordinates
    with respect to `gens` are well defined modulo the orders.
    """

    group: FinAbelianPGroup
    gens: tuple[tuple[int, ...], ...]
    ambient: FinAbelianPGroup

    def coords(self, v: Sequence[int]) -> tuple[int, ...] | None:
        """Coordinates of an ambient element, or None if outside."""
        if not self.gens:
            return () if not any(self.ambient.reduce(v)) else None
        s = len(self.gens)
        mat = [[self.gens[j][i] for j in range(s)]
               for i in range(self.ambient.rank)]
        y = solve_integer_mod(mat, list(self.ambient.reduce(v)),
                              list(self.ambient.orders))
        if y is None:
            return None
        return self.group.reduce(y)

    def element(self, coords: Sequence[int]) -> tuple[int, ...]:
        v = [0] * self.ambient.rank
        for c, g in zip(coords, self.gens):
            for i in range(self.ambient.rank):
                v[i] += c * g[i]
        return self.ambient.reduce(v)


def subgroup_presentation(sub: AbSubgroup) -> SubgroupBasis:
    """Adapted independent generators of a canonical subgroup.

    Diagonalizes the relation lattice among the subgroup's HNF generators, so
    the returned generators have the subgroup's invariant factors as orders.
    """
    A = sub.ambient
    gs = sub.gens()
    if not gs:
        return SubgroupBasis(FinAbelianPGroup(A.p, []), (), A)
    s = len(gs)
    mat = [[gs[j][i] for j in range(s)] for i in range(A.rank)]
    rel = kernel_integer_mod(mat, list(A.orders))
    relmat = [[k[i] for k in rel] for i in range(s)]
    res = snf(relmat, A.p)
    linv = mat_inv_unimodular([list(r) for r in res.left])
    picked = []
    for i in range(s):
        d = abs(res.d[i]) if i < len(res.d) else 0
        if d == 0:
            raise AssertionError("finite subgroup has full relation rank")
        if d == 1:
            continue
        vec = [0] * A.rank
        for j in range(s):
            c = linv[j][i]
            if c:
                for t in range(A.rank):
                    vec[t] += c * gs[j][t]
        picked.append((d, A.reduce(vec)))
    picked.sort(key=lambda t: -t[0])
    grp = FinAbelianPGroup(A.p, [d for d, _ in picked])
    return SubgroupBasis(grp, tuple(v for _, v in picked), A)


# ---------------------------------------------------------------------------
# homomorphisms


class PHom:
    """Homomorphism between finite abelian p-groups, as an integer matrix.

    The matrix has shape target.rank x source.rank and acts on column vectors.
    Well-definedness (each source relation lands in the target relation
    lattice) is checked at construction; the stored matrix is reduced
    entrywise modulo the target row orders, which makes equality of
    homomorphisms plain matrix equality.
    """

    __slots__ = ("source", "target", "matrix", "_hash")

    def __init__(self, source: FinAbelianPGroup, target: FinAbelianPGroup,
                 matrix: Sequence[Sequence[int]]):
        if len(matrix) != target.rank or (matrix and len(matrix[0]) != source.rank):
            raise ValueError("matrix shape does not match source/target ranks")
        p = source.p
        red = []
        for j, row in enumerate(matrix):
            oj = target.orders[j]
            red.append(tuple(x % oj for x in row))
        for i, oi in enumerate(source.orders):
            for j, oj in enumerate(target.orders):
                if (oi * red[j][i]) % oj != 0:
                    raise ValueError(
                        f"not well defined: order-{oi} generator {i} maps to an "
                        f"element with nontrivial p^k-part in coordinate {j}")
        self.source = source
        self.target = target
        self.matrix = tuple(red)
        self._hash = hash((source, target, self.matrix))

    @classmethod
    def identity(cls, group: FinAbelianPGroup) -> "PHom":
        return cls(group, group, mat_identity(group.rank))

    @classmethod
    def zero(cls, source: FinAbelianPGroup, target: FinAbelianPGroup) -> "PHom":
        return cls(source, target, [[0] * source.rank for _ in range(target.rank)])

    def apply(self, v: Sequence[int]) -> tuple[int, ...]:
        return self.target.reduce(mat_vec(self.matrix, v))

    def compose(self, inner: "PHom") -> "PHom":
        """self o inner."""
        if inner.target != self.source:
            raise ValueError("composition mismatch")
        return PHom(inner.source, self.target, mat_mul(self.matrix, inner.matrix))

    def __mul__(self, inner: "PHom") -> "PHom":
        return self.compose(inner)

    def pow(self, e: int) -> "PHom":
        if self.source != self.target:
            raise ValueError("powers need an endomorphism")
        if e < 0:
            return self.inverse().pow(-e)
        return PHom(self.source, self.target, mat_pow(self.matrix, e))

    def add(self, other: "PHom") -> "PHom":
        if (self.source, self.target) != (other.source, other.target):
            raise ValueError("sum mismatch")
        return PHom(self.source, self.target,
                    [[x + y for x, y in zip(r1, r2)]
                     for r1, r2 in zip(self.matrix, other.matrix)])

    def is_invertible(self) -> bool:
        if self.source != self.target:
            return False
        return rank_mod_p(self.matrix, self.source.p) == self.source.rank

    def inverse(self) -> "PHom":
        """Inverse of an automorphism, exact over the ambient orders."""
        if not self.is_invertible():
            raise ValueError("not invertible")
        n = self.source.rank
        ex = self.source.exponent
        inv = inv_mod(self.matrix, ex)
        cand = PHom(self.source, self.source, inv)
        if cand.compose(self).matrix != PHom.identity(self.source).matrix:
            # mixed orders: correct column by column via a linear solve
            cols = []
            for i in range(n):
                e = [0] * n
                e[i] = 1
                x = solve_integer_mod(self.matrix, e, self.source.orders)
                if x is None:
                    raise ValueError("not invertible over the stated orders")
                cols.append(x)
            cand = PHom(self.source, self.source,
                        [[cols[j][i] for j in range(n)] for i in range(n)])
        return cand

    def __eq__(self, other):
        return isinstance(other, PHom) and self.source == other.source \
            and self.target == other.target and self.matrix == other.matrix

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"PHom({self.matrix})"


def hom_kernel(f: PHom) -> AbSubgroup:
    """Kernel of f as a canonical subgroup of the source."""
    gens = kernel_integer_mod(f.matrix, f.target.orders)
    return AbSubgroup(f.source, [f.source.reduce(g) for g in gens])


def hom_image(f: PHom) -> AbSubgroup:
    """Image of f as a canonical subgroup of the target."""
    cols = [tuple(f.matrix[j][i] for j in range(f.target.rank))
            for i in range(f.source.rank)]
    return AbSubgroup(f.target, cols)


def jordan_type_order_p(u: PHom) -> tuple[int, ...]:
    """Multiset of Jordan block sizes of an order-dividing-p operator.

    The carrier must be elementary abelian (all orders p) and u^p must be the
    identity; block sizes are read off the ranks of (u - 1)^j.
    """
    g = u.source
    p = g.p
    if u.target != g or any(o != p for o in g.orders):
        raise ValueError("carrier must be elementary abelian of exponent p")
    n = g.rank
    upow = mat_pow(u.matrix, p, p)
    if not mat_eq_mod(upow, mat_identity(n), p):
        raise ValueError("operator does not have order dividing p")
    um1 = [[(x - (1 if i == j else 0)) % p for j, x in enumerate(row)]
           for i, row in enumerate(u.matrix)]
    ranks = [n]
    power = mat_identity(n)
    for _ in range(1, p + 1):
        power = mat_mul(power, um1, p)
        ranks.append(rank_mod_p(power, p))
    # number of blocks of size >= j equals rank((u-1)^{j-1}) - rank((u-1)^j)
    blocks = []
    for j in range(1, p + 1):
        count = (ranks[j - 1] - ranks[j]) - (ranks[j] - ranks[j + 1] if j < p else 0)
        blocks.extend([j] * count)
    return tuple(sorted(blocks, reverse=True))


# ---------------------------------------------------------------------------
# group ring of a cyclic group of order p


class GroupRingElt:
    """Element of ZU for U cyclic of prime order p, as length-p coefficients.

    coeffs[i] is the coefficient of u^i. Multiplication is cyclic convolution;
    the ring is commutative.
    """

    __slots__ = ("p", "coeffs")

    def __init__(self, p: int, coeffs: Sequence[int], mod: int | None = None):
        if len(coeffs) != p:
            raise ValueError("need exactly p coefficients")
        if mod is not None:
            coeffs = [c % mod for c in coeffs]
        self.p = p
        self.coeffs = tuple(int(c) for c in coeffs)

    @classmethod
    def one(cls, p: int) -> "GroupRingElt":
        return cls(p, [1] + [0] * (p - 1))

    @classmethod
    def u(cls, p: int, i: int = 1) -> "GroupRingElt":
        c = [0] * p
        c[i % p] = 1
        return cls(p, c)

    @classmethod
    def sigma(cls, p: int) -> "GroupRingElt":
        return cls(p, [1] * p)

    @classmethod
    def const(cls, p: int, n: int) -> "GroupRingElt":
        return cls(p, [n] + [0] * (p - 1))

    def __add__(self, other):
        other = self._coerce(other)
        return GroupRingElt(self.p, [a + b for a, b in zip(self.coeffs, other.coeffs)])

    def __sub__(self, other):
        other = self._coerce(other)
        return GroupRingElt(self.p, [a - b for a, b in zip(self.coeffs, other.coeffs)])

    def __neg__(self):
        return GroupRingElt(self.p, [-a for a in self.coeffs])

    def __mul__(self, other):
        if isinstance(other, int):
            return GroupRingElt(self.p, [other * a for a in self.coeffs])
        out = [0] * self.p
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                if b:
                    out[(i + j) % self.p] += a * b
        return GroupRingElt(self.p, out)

    __rmul__ = __mul__

    def _coerce(self, other):
        if isinstance(other, int):
            return GroupRingElt.const(self.p, other)
        return other

    def __pow__(self, e: int):
        result = GroupRingElt.one(self.p)
        base = self
        while e > 0:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def coeff_sum(self) -> int:
        return sum(self.coeffs)

    def reduce_mod(self, mod: int) -> "GroupRingElt":
        return GroupRingElt(self.p, self.coeffs, mod=mod)

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __eq__(self, other):
        return isinstance(other, GroupRingElt) and self.p == other.p \
            and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.p, self.coeffs))

    def __repr__(self):
        terms = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if i == 0:
                terms.append(str(c))
            else:
                terms.append(f"{c}*u^{i}" if c != 1 else f"u^{i}")
        return " + ".join(terms) or "0"


def ring_reduce(xi: GroupRingElt, ideal_gens: Sequence[GroupRingElt],
                modulus: int) -> GroupRingElt:
    """Canonical residue of xi modulo the ideal generated by `ideal_gens`
    together with `modulus` (a power of p).

    The ideal's coefficient lattice is spanned by all cyclic shifts u^i * g of
    the generators plus modulus * e_i; the residue is the triangular reduction
    of xi against the HNF basis of that lattice. Two elements reduce equally
    iff they differ by an ideal element.
    """
    p = xi.p
    cols: list[list[int]] = []
    for g in ideal_gens:
        for i in range(p):
            cols.append(list((GroupRingElt.u(p, i) * g).coeffs))
    for i in range(p):
        e = [0] * p
        e[i] = modulus
        cols.append(e)
    mat = [[c[i] for c in cols] for i in range(p)]
    basis = hnf_cols(mat)
    x = [c % modulus for c in xi.coeffs]
    for c in basis:
        i = next(j for j, y in enumerate(c) if y != 0)
        q = x[i] // c[i]
        if q:
            x = [a - q * b for a, b in zip(x, c)]
    return GroupRingElt(p, x)
