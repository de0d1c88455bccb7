"""Finite groups of automorphisms of an abelian p-group.

A group is always given by generating automorphisms of a fixed carrier; the
element list is the closure under composition, computed lazily and cached.
On top of that sit the Sylow-p classification (order-p Sylow subgroup, normal
or not, and how much of Aut(U) the normalizer realizes) and the smallest
normal subgroup of index prime to p.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .exactalg import (
    AbSubgroup,
    FinAbelianPGroup,
    PHom,
    hom_image,
    hom_kernel,
    subgroup_presentation,
)


class CapExceeded(Exception):
    """Closure enumeration grew past the configured cap."""


class NotOrderPSylow(Exception):
    """The Sylow p-subgroup has order > p, outside this layer's scope."""


class HypothesisFailed(Exception):
    """A checked hypothesis of a structure result does not hold."""

    def __init__(self, clause: str, detail: str = ""):
        self.clause = clause
        super().__init__(f"hypothesis {clause} failed" +
                         (f": {detail}" if detail else ""))


class FinGroup:
    """Group of automorphisms of `carrier`, closed over `generators`."""

    def __init__(self, carrier: FinAbelianPGroup,
                 generators: Iterable[PHom], cap: int = 10 ** 6):
        self.carrier = carrier
        gens = []
        for g in generators:
            if g.source != carrier or g.target != carrier:
                raise ValueError("generator acts on the wrong carrier")
            if not g.is_invertible():
                raise ValueError("generator is not invertible")
            gens.append(g)
        self.generators = tuple(gens)
        self.cap = cap
        self._elements: tuple[PHom, ...] | None = None

    @property
    def p(self) -> int:
        return self.carrier.p

    def elements(self) -> tuple[PHom, ...]:
        """Complete duplicate-free element list (closure of the generators)."""
        if self._elements is None:
            ident = PHom.identity(self.carrier)
            known = {ident}
            frontier = [ident]
            while frontier:
                nxt = []
                for h in frontier:
                    for g in self.generators:
                        hg = h.compose(g)
                        if hg not in known:
                            known.add(hg)
                            nxt.append(hg)
                            if len(known) > self.cap:
                                raise CapExceeded(
                                    f"group closure exceeds {self.cap}")
                frontier = nxt
            self._elements = tuple(sorted(known, key=lambda e: e.matrix))
        return self._elements

    @property
    def order(self) -> int:
        return len(self.elements())

    def __contains__(self, g: PHom) -> bool:
        return g in set(self.elements())

    def __iter__(self):
        return iter(self.elements())

    def subgroup(self, generators: Iterable[PHom]) -> "FinGroup":
        return FinGroup(self.carrier, generators, cap=self.cap)

    def element_order(self, g: PHom) -> int:
        ident = PHom.identity(self.carrier)
        h = g
        n = 1
        while h != ident:
            h = h.compose(g)
            n += 1
            if n > self.cap:
                raise CapExceeded("element order exceeds cap")
        return n

    def elements_of_order(self, n: int) -> list[PHom]:
        return [g for g in self.elements() if self.element_order(g) == n]

    def is_normal(self, sub: "FinGroup") -> bool:
        subset = set(sub.elements())
        return all(g.compose(s).compose(g.inverse()) in subset
                   for g in self.elements() for s in sub.generators)

    def same_group(self, other: "FinGroup") -> bool:
        return (self.carrier == other.carrier
                and set(self.elements()) == set(other.elements()))


def enumerate_group(G: FinGroup) -> tuple[PHom, ...]:
    return G.elements()


@dataclass(frozen=True)
class SylowData:
    """An order-p cyclic subgroup with its normalizer and centralizer."""

    u: PHom
    subgroup: tuple[PHom, ...]
    normalizer: tuple[PHom, ...]
    centralizer: tuple[PHom, ...]

    @property
    def out(self) -> int:
        """|N(U)/C(U)|, the amount of Aut(U) the ambient group realizes."""
        return len(self.normalizer) // len(self.centralizer)


def sylow_data(G: FinGroup, u: PHom) -> SylowData:
    p = G.p
    if G.element_order(u) != p:
        raise ValueError("generator must have order p")
    U = [PHom.identity(G.carrier)]
    for _ in range(p - 1):
        U.append(U[-1].compose(u))
    uset = set(U)
    norm, cent = [], []
    for g in G.elements():
        c = g.compose(u).compose(g.inverse())
        if c in uset:
            norm.append(g)
            if c == u:
                cent.append(g)
    return SylowData(u=u, subgroup=tuple(U),
                     normalizer=tuple(norm), centralizer=tuple(cent))


@dataclass(frozen=True)
class GpClass:
    verdict: str  # "not_Gp" | "Gp" | "Gp_hat"
    sylow: SylowData | None


def classify_gp(G: FinGroup) -> GpClass:
    """Where G sits relative to the order-p-Sylow, non-normal-U classes.

    "Gp": p divides |G| exactly once and the order-p subgroup U is not
    normal.  "Gp_hat": additionally the normalizer of U induces the full
    automorphism group of U, |N(U)/C(U)| = p - 1.
    """
    p = G.p
    n = G.order
    if n % (p * p) == 0:
        raise NotOrderPSylow(f"|G| = {n} divisible by {p}^2")
    if n % p != 0:
        return GpClass("not_Gp", None)
    u = next(g for g in G.elements() if G.element_order(g) == p)
    data = sylow_data(G, u)
    if len(data.normalizer) == n:
        return GpClass("not_Gp", data)
    verdict = "Gp_hat" if data.out == p - 1 else "Gp"
    return GpClass(verdict, data)


def p_prime_core(G: FinGroup, u) -> FinGroup:
    """Smallest normal subgroup of index prime to p containing u.

    With u of Sylow order p this is the normal closure of <u>; in general it
    is the subgroup generated by all elements of p-power order, which every
    normal subgroup of p-prime index must contain.
    """
    if isinstance(u, SylowData):
        u = u.u
    gens = [g.compose(u).compose(g.inverse()) for g in G.elements()]
    core = G.subgroup(gens)
    if G.order % core.order != 0:
        raise RuntimeError("closure order does not divide group order")
    index = G.order // core.order
    if index % G.p == 0:
        # u was not of Sylow order; fall back to all p-elements
        p = G.p
        pel = [g for g in G.elements()
               if _is_p_power(G.element_order(g), p)]
        core = G.subgroup(pel)
    return core


def _is_p_power(n: int, p: int) -> bool:
    while n % p == 0:
        n //= p
    return n == 1


def _twist_hom(g: PHom) -> PHom:
    """(g - 1) as a hom on the carrier of g."""
    A = g.source
    mat = [[g.matrix[i][j] - (1 if i == j else 0)
            for j in range(A.rank)] for i in range(A.rank)]
    return PHom(A, A, mat)


def commutator_with(G_elems: Sequence[PHom],
                    A: FinAbelianPGroup) -> AbSubgroup:
    """[G, A]: subgroup of A generated by (g - 1)a over the given g."""
    gens: list = []
    for g in G_elems:
        gens.extend(hom_image(_twist_hom(g)).gens())
    return AbSubgroup(A, gens)


def fixed_subgroup(G_elems: Sequence[PHom],
                   A: FinAbelianPGroup) -> AbSubgroup:
    """C_A(G): intersection of the kernels of (g - 1)."""
    fixed = A.full_subgroup()
    for g in G_elems:
        fixed = fixed.intersect(hom_kernel(_twist_hom(g)))
    return fixed


def split_propA7(G: FinGroup) -> tuple[AbSubgroup, AbSubgroup, str]:
    """Split A = C_A(H) x [H, A] for H the p-prime core of G.

    Checked hypotheses: (i) the Sylow p-subgroup of G has order p and is not
    normal; (ii) every order-p element x has |[x, A]| = p.  The verified
    conclusions: the two factors intersect trivially and span A, the second
    factor is elementary abelian of rank 2, and H acts on it as the full
    determinant-one group SL_2(p).
    """
    A = G.carrier
    p = G.p
    n = G.order
    if n % p != 0 or n % (p * p) == 0:
        raise HypothesisFailed("i", f"|G| = {n} has no Sylow of order {p}")
    cls = classify_gp(G)
    if cls.verdict == "not_Gp":
        raise HypothesisFailed("i", "order-p subgroup is normal")
    for x in G.elements_of_order(p):
        if hom_image(_twist_hom(x)).order != p:
            raise HypothesisFailed("ii", "|[x, A]| != p for an order-p x")
    H = p_prime_core(G, cls.sylow.u)
    a1 = fixed_subgroup(H.elements(), A)
    a2 = commutator_with(H.elements(), A)
    if a1.intersect(a2).order != 1 or a1.order * a2.order != A.order:
        raise RuntimeError("carrier does not split as fixed x commutator")
    if a2.invariant_factors() != (p, p):
        raise RuntimeError("commutator factor is not elementary of rank 2")
    # restriction of H to the rank-2 factor must be all of SL_2(p)
    restr = restrict_to_subgroup(H, a2)
    want = p * (p * p - 1)
    if restr.order != want:
        raise RuntimeError(
            f"induced group on the rank-2 factor has order {restr.order}, "
            f"wanted {want}")
    return a1, a2, "pass"


def restrict_to_subgroup(G: FinGroup, sub: AbSubgroup) -> FinGroup:
    """Action of G on an invariant subgroup, in an adapted basis."""
    pres = subgroup_presentation(sub)
    n = len(pres.gens)
    gens = []
    for g in G.generators:
        cols = []
        for b in pres.gens:
            coords = pres.coords(g.apply(b))
            if coords is None:
                raise ValueError("subgroup is not invariant under the group")
            cols.append(coords)
        mat = [[cols[j][i] for j in range(n)] for i in range(n)]
        gens.append(PHom(pres.group, pres.group, mat))
    return FinGroup(pres.group, gens, cap=G.cap)
