"""Fusion over split extensions of a finite abelian p-group by a cyclic p.

The group S is A x| <x> with A abelian and x of order p acting through a
fixed automorphism.  Morphism data for a fusion system on S is held per
conjugacy class: a representative subgroup, its automizer, and one
transporter iso to every class member.  Closure is computed by a worklist
that restricts known morphisms to smaller subgroups until nothing new
appears; ambient-group conjugation and the special SL2-style automizers
on chosen rank-two sections are the only seeds.

Everything here enumerates honestly and is sized for |S| in the hundreds;
`cap` arguments guard the subgroup-lattice walks.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .exactalg import (
    AbSubgroup,
    FinAbelianPGroup,
    PHom,
    hom_image,
    hom_kernel,
    integer_kernel,
)
from .grp import (
    CapExceeded,
    FinGroup,
    HypothesisFailed,
    classify_gp,
    commutator_with,
    p_prime_core,
)
from .zpmods import (
    BadParameters,
    DeltaPair,
    FinZpGModule,
    Inconsistent,
    IndexNotP,
    _closure_holds,
    _first_outside,
    _vee_elements,
    delta_full,
    delta_i,
    mu,
    mu_image,
    name_delta_subgroup,
)


class OrderNotP(Exception):
    """The twisting automorphism does not have order exactly p."""


class MuHypothesisFailed(Exception):
    """The weight-pair image misses the subgroup the construction needs."""


# ---------------------------------------------------------------------------
# element maps, the common currency of everything below


def _elt_key(g):
    return (g[1], g[0])


def _map_freeze(f: dict) -> tuple:
    return tuple(sorted(f.items(), key=lambda kv: _elt_key(kv[0])))


def _map_comp(f: dict, g: dict) -> dict:
    # apply g first
    return {k: f[v] for k, v in g.items()}


def _map_inv(f: dict) -> dict:
    return {v: k for k, v in f.items()}


def _map_restrict(f: dict, elems) -> dict:
    return {k: f[k] for k in elems}


def _map_order(f: dict) -> int:
    cur = f
    n = 1
    while any(k != v for k, v in cur.items()):
        cur = _map_comp(f, cur)
        n += 1
        if n > len(f) ** 2 + 1:
            raise Inconsistent("map order runaway")
    return n


def _maps_closure(base: set, new=None) -> set:
    """Closure under composition.  With `new` given, `base` is assumed
    closed already and only products involving the new maps are chased."""
    out = set(base)
    frontier = list(base) if new is None else [t for t in new if t not in out]
    out.update(frontier)
    while frontier:
        nxt = []
        for ftup in frontier:
            f = dict(ftup)
            for gtup in list(out):
                g = dict(gtup)
                for prod in (_map_comp(f, g), _map_comp(g, f)):
                    t = _map_freeze(prod)
                    if t not in out:
                        out.add(t)
                        nxt.append(t)
        frontier = nxt
    return out


def _assert_group(maps: set, what: str):
    """Prove a set of maps is composition-closed by regenerating it."""
    gens: list = []
    cl = None
    for t in sorted(maps):
        if cl is None:
            cl = _maps_closure({t})
            gens.append(t)
        elif t not in cl:
            gens.append(t)
            cl = _maps_closure(cl, {t})
    if cl is None or cl != set(maps):
        raise Inconsistent(f"{what} is not composition-closed")


# ---------------------------------------------------------------------------
# the ambient p-group


def _preimage(f: PHom, W: AbSubgroup) -> AbSubgroup:
    """Subgroup {a : f(a) in W} for an endomorphism of W's ambient group."""
    A = f.source
    r = A.rank
    cols = [list(g) for g in W.gens()]
    for i in range(r):
        e = [0] * r
        e[i] = A.orders[i]
        cols.append(e)
    big = [list(f.matrix[i]) + [-c[i] for c in cols] for i in range(r)]
    gens = [list(v[:r]) for v in integer_kernel(big)]
    return AbSubgroup(A, gens)


@dataclass(frozen=True)
class CenterData:
    """Centre-related subgroups of S, all recorded inside A.

    `upper` is the chain of twist preimages starting at the centre Z and
    ending at A; the second entry is the slice Z2.
    """

    Z: AbSubgroup
    Sprime: AbSubgroup
    Z0: AbSubgroup
    A0: AbSubgroup
    Z2: AbSubgroup
    upper: tuple


class SubgroupHandle:
    """Canonical identifier for a subgroup of S.

    Equality and hashing go through the element set, so two handles agree
    exactly when the subgroups do.  `base` is the A-part as a subgroup of
    A; handles not inside A also record the least element outside A.
    """

    __slots__ = ("S", "elems", "order", "in_A", "base", "xgen", "key",
                 "_hash")

    def __init__(self, S: "SemidirectGroup", elems: frozenset):
        self.S = S
        self.elems = elems
        self.order = len(elems)
        apart = [g[0] for g in elems if g[1] == 0]
        self.in_A = len(apart) == len(elems)
        self.base = AbSubgroup(S.A, [list(a) for a in apart])
        outside = sorted((g for g in elems if g[1] != 0), key=_elt_key)
        self.xgen = outside[0] if outside else None
        self.key = (self.order, tuple(sorted(elems, key=_elt_key)))
        self._hash = hash(self.key)

    def __eq__(self, other):
        return isinstance(other, SubgroupHandle) and self.key == other.key

    def __hash__(self):
        return self._hash

    def __lt__(self, other):
        return self.key < other.key

    def __contains__(self, g):
        return g in self.elems

    def __iter__(self):
        return iter(sorted(self.elems, key=_elt_key))

    def __le__(self, other):
        return self.elems <= other.elems

    def __repr__(self):
        tag = "in A" if self.in_A else "mixed"
        return (f"SubgroupHandle(order={self.order}, {tag}, "
                f"base={self.base.invariant_factors()})")


class SemidirectGroup:
    """A x| <x> with x of order p acting on A by the automorphism u.

    Elements are pairs (a, i) with a a reduced coordinate tuple of A and
    i the x exponent; (a, i)(b, j) = (a + u^i b, i + j).
    """

    def __init__(self, A: FinAbelianPGroup, u: PHom):
        if u.source != A or u.target != A:
            raise OrderNotP("twist must be an endomorphism of A")
        if not u.is_invertible():
            raise OrderNotP("twist is not invertible")
        ident = PHom.identity(A)
        if u == ident:
            raise OrderNotP("twist is the identity")
        if u.pow(A.p) != ident:
            raise OrderNotP(f"twist order does not divide {A.p}")
        self.A = A
        self.p = A.p
        self.u = u
        pw = [ident]
        for _ in range(A.p - 1):
            pw.append(pw[-1].compose(u))
        self.upow = tuple(pw)
        self.identity = (A.zero(), 0)
        self._elements = None
        self._handles: dict = {}
        self._gamma_cache: dict = {}
        self.center = _center_data(self)

    @property
    def order(self) -> int:
        return self.p * self.A.order

    def x(self):
        return (self.A.zero(), 1)

    def embed(self, a):
        return (self.A.reduce(a), 0)

    def mul(self, g, h):
        a, i = g
        b, j = h
        return (self.A.add(a, self.upow[i].apply(b)), (i + j) % self.p)

    def inv(self, g):
        a, i = g
        j = (-i) % self.p
        return (self.A.neg(self.upow[j].apply(a)), j)

    def conj(self, s, g):
        return self.mul(self.mul(s, g), self.inv(s))

    def comm(self, g, h):
        return self.mul(self.mul(g, h), self.mul(self.inv(g), self.inv(h)))

    def pow(self, g, n: int):
        out = self.identity
        h = g if n >= 0 else self.inv(g)
        for _ in range(abs(n)):
            out = self.mul(out, h)
        return out

    def elt_order(self, g) -> int:
        n = 1
        h = g
        while h != self.identity:
            h = self.mul(h, g)
            n += 1
        return n

    def elements(self):
        if self._elements is None:
            out = [(a, i) for i in range(self.p) for a in self.A.elements()]
            out.sort(key=_elt_key)
            self._elements = tuple(out)
        return self._elements

    def closure(self, gens) -> frozenset:
        known = {self.identity}
        frontier = [self.identity]
        gl = list(gens) + [self.inv(g) for g in gens]
        while frontier:
            nxt = []
            for h in frontier:
                for g in gl:
                    hg = self.mul(h, g)
                    if hg not in known:
                        known.add(hg)
                        nxt.append(hg)
            frontier = nxt
        return frozenset(known)

    def handle(self, elems) -> SubgroupHandle:
        elems = frozenset(elems)
        h = self._handles.get(elems)
        if h is None:
            h = SubgroupHandle(self, elems)
            self._handles[elems] = h
        return h

    def subgroup_handle(self, gens) -> SubgroupHandle:
        return self.handle(self.closure(gens))

    def normalizer(self, P: SubgroupHandle) -> frozenset:
        out = set()
        for s in self.elements():
            if all(self.conj(s, g) in P.elems for g in P.elems):
                out.add(s)
        return frozenset(out)

    def centralizer(self, P: SubgroupHandle) -> frozenset:
        out = set()
        for s in self.elements():
            if all(self.conj(s, g) == g for g in P.elems):
                out.add(s)
        return frozenset(out)


def _center_data(S: SemidirectGroup) -> CenterData:
    A = S.A
    n = A.rank
    twist = PHom(A, A, [[S.u.matrix[i][j] - (1 if i == j else 0)
                         for j in range(n)] for i in range(n)])
    Z = hom_kernel(twist)
    Sp = hom_image(twist)
    Z0 = Z.intersect(Sp)
    A0 = Z.add(Sp)
    # the index of Z*[u,A] in A always equals |Z0|
    if A.order != A0.order * Z0.order:
        raise Inconsistent("index of Z*[u,A] does not match the socle size")
    chain = [Z]
    while chain[-1].order < A.order:
        nxt = _preimage(twist, chain[-1])
        if nxt.order == chain[-1].order:
            raise Inconsistent("twist preimage chain stalled below A")
        if Z0.order == A.p and nxt.order != chain[-1].order * A.p:
            raise Inconsistent("twist preimage chain does not grow by p")
        chain.append(nxt)
    Z2 = chain[1] if len(chain) > 1 else chain[0]
    return CenterData(Z=Z, Sprime=Sp, Z0=Z0, A0=A0, Z2=Z2,
                      upper=tuple(chain))


def build_S(A: FinAbelianPGroup, u: PHom) -> SemidirectGroup:
    """The split extension of A by an order-p automorphism, with centre
    data computed up front."""
    return SemidirectGroup(A, u)


# ---------------------------------------------------------------------------
# the two families of rank-two-over-centre sections


@dataclass
class HBData:
    """The p + p section families Z<x a^i> and Z2<x a^i>.

    `H[i]` and `B[i]` are representative handles; `H_classes[i]` is the
    full S-class of `H[i]` as a frozenset of handles, likewise `B_classes`.
    """

    S: SemidirectGroup
    a: tuple
    H: tuple
    B: tuple
    H_classes: tuple
    B_classes: tuple

    def label_of(self, P: SubgroupHandle):
        for i, cls in enumerate(self.H_classes):
            if P in cls:
                return ("H", i)
        for i, cls in enumerate(self.B_classes):
            if P in cls:
                return ("B", i)
        return None

    def rep(self, label) -> SubgroupHandle:
        fam, i = label
        if fam == "H":
            return self.H[i]
        if fam == "B":
            return self.B[i]
        raise BadParameters(f"unknown family {fam!r}")


def _orbit_of_handle(S: SemidirectGroup, P: SubgroupHandle) -> frozenset:
    gens = [S.x()] + [S.embed(g) for g in S.A.full_subgroup().gens()]
    seen = {P}
    frontier = [P]
    while frontier:
        nxt = []
        for Q in frontier:
            for s in gens:
                img = S.handle(frozenset(S.conj(s, g) for g in Q.elems))
                if img not in seen:
                    seen.add(img)
                    nxt.append(img)
        frontier = nxt
    return frozenset(seen)


def classes_HB(S: SemidirectGroup, a=None) -> HBData:
    """Representatives and S-classes of the two section families.

    Requires the subgroup Z*[u,A] to have index exactly p in A and the
    slice Z2 to sit properly below A; either failure raises IndexNotP.
    `a` may pin the coset generator, otherwise the first element outside
    Z*[u,A] in scan order is used.
    """
    p = S.p
    A = S.A
    cd = S.center
    if A.order != cd.A0.order * p:
        raise IndexNotP(
            f"index of Z*[u,A] is {A.order // cd.A0.order}, not {p}")
    if cd.Z2.order == A.order:
        raise IndexNotP("slice Z2 fills A; no proper B sections")
    if a is None:
        a = _first_outside(A, cd.A0)
    a = A.reduce(a)
    if cd.A0.contains(list(a)):
        raise BadParameters("coset generator lies in Z*[u,A]")
    x = S.x()
    zgens = [S.embed(g) for g in cd.Z.gens()]
    z2gens = [S.embed(g) for g in cd.Z2.gens()]
    H, B = [], []
    for i in range(p):
        xi = S.mul(x, S.embed(A.smul(i, a)))
        h = S.subgroup_handle(zgens + [xi])
        b = S.subgroup_handle(z2gens + [xi])
        if h.order != cd.Z.order * p or b.order != cd.Z2.order * p:
            raise Inconsistent("section has the wrong order")
        H.append(h)
        B.append(b)
    H_classes = tuple(_orbit_of_handle(S, h) for h in H)
    B_classes = tuple(_orbit_of_handle(S, b) for b in B)
    # the p classes partition everything of their shape
    all_H = set()
    all_B = set()
    for y in S.elements():
        if y[1] == 0:
            continue
        all_H.add(S.subgroup_handle(zgens + [y]))
        all_B.add(S.subgroup_handle(z2gens + [y]))
    for classes, pool, tag in ((H_classes, all_H, "H"),
                               (B_classes, all_B, "B")):
        total = set()
        for i, cls in enumerate(classes):
            if total & cls:
                raise Inconsistent(f"{tag}-classes overlap at index {i}")
            total |= cls
        if total != pool:
            raise Inconsistent(f"{tag}-classes do not cover the family")
    # twisting the generator by Z*[u,A] stays inside the base class
    for g in cd.A0.elements():
        y = S.mul(S.embed(g), x)
        if S.subgroup_handle(zgens + [y]) not in H_classes[0]:
            raise Inconsistent("A0-twist leaves the base H-class")
        if S.subgroup_handle(z2gens + [y]) not in B_classes[0]:
            raise Inconsistent("A0-twist leaves the base B-class")
    return HBData(S=S, a=a, H=tuple(H), B=tuple(B),
                  H_classes=H_classes, B_classes=B_classes)


# ---------------------------------------------------------------------------
# conjugation maps coming from the ambient group A x| G


def _normalizer_pairs(S: SemidirectGroup, G: FinGroup):
    """Elements g of G with g u g^-1 a power of u, paired with that power."""
    out = []
    for g in G.elements():
        c = g.compose(S.u).compose(g.inverse())
        for r in range(1, S.p):
            if c == S.upow[r]:
                out.append((g, r))
                break
    return out


def _gamma_map(S: SemidirectGroup, g: PHom, r: int, b) -> dict:
    """Conjugation of S by the ambient element (b, g), as an element map."""
    out = {}
    for a, i in S.elements():
        ir = (i * r) % S.p
        img = S.A.add(S.A.sub(b, S.upow[ir].apply(b)), g.apply(a))
        out[(a, i)] = (S.A.reduce(img), ir)
    return out


def gamma_autos(S: SemidirectGroup, G: FinGroup,
                vee: bool = False) -> list:
    """Automorphisms of S induced by the ambient group A x| G, as maps.

    With `vee` set, keep only the maps whose A-part moves the centre
    along the socle line only.
    """
    key = (id(G), vee)
    hit = S._gamma_cache.get(key)
    if hit is not None and hit[0] is G:
        return hit[1]
    cd = S.center
    pairs = _normalizer_pairs(S, G)
    if vee:
        pairs = [(g, r) for g, r in pairs
                 if all(cd.Z0.contains(list(S.A.sub(g.apply(z), z)))
                        for z in cd.Z.gens())]
    seen = {}
    for g, r in pairs:
        for b in S.A.elements():
            f = _gamma_map(S, g, r, b)
            seen[_map_freeze(f)] = f
    out = list(seen.values())
    S._gamma_cache[key] = (G, out)
    return out


def _weights(S: SemidirectGroup, fmap: dict) -> DeltaPair:
    """Weight pair of an automorphism of S: x exponent and socle scale."""
    cd = S.center
    p = S.p
    r = fmap[S.x()][1]
    z = next(g for g in cd.Z0.elements() if any(g))
    az = fmap[(S.A.reduce(z), 0)][0]
    s = next(t for t in range(1, p) if tuple(az) == S.A.smul(t, z))
    return DeltaPair(p, r, s)


# ---------------------------------------------------------------------------
# the special automizer on a section


@dataclass
class ThetaData:
    """The SL2-style automizer on one chosen section representative."""

    Q: SubgroupHandle
    family: str                      # "H" or "B"
    Ztilde: SubgroupHandle
    Qtilde: SubgroupHandle
    maps: frozenset                  # frozen element maps on Q, a full group
    inn_order: int
    aut_gamma: frozenset             # ambient-induced automorphisms of Q
    k0_orders: tuple


def _complements(K: list, index: int, p: int, limit: int = 2) -> list:
    """Subgroups of p-prime order `index` inside the group of maps K.

    The p-part of K is normal of complementary order here, so any such
    subgroup is a complement to it.  Deterministic backtracking over the
    p-prime elements in sorted order; stops after `limit` distinct finds.
    """
    elems = sorted(K)
    orders = {t: _map_order(dict(t)) for t in elems}
    ident = next(t for t in elems if orders[t] == 1)
    if index == 1:
        return [frozenset({ident})]
    ppr = [t for t in elems if orders[t] % p != 0 and orders[t] > 1]
    found: list = []

    def extend(current: frozenset, start: int):
        if len(found) >= limit:
            return
        if len(current) == index:
            if current not in found:
                found.append(current)
            return
        for idx in range(start, len(ppr)):
            t = ppr[idx]
            if t in current:
                continue
            sub = frozenset(_maps_closure(set(current), {t}))
            if len(sub) > index or index % len(sub):
                continue
            # p-prime generators can still close over p-order elements
            if any(orders[s] % p == 0 for s in sub):
                continue
            extend(sub, idx + 1)
            if len(found) >= limit:
                return

    extend(frozenset({ident}), 0)
    return found


def theta(S: SemidirectGroup, G: FinGroup, Q: SubgroupHandle,
          hb: HBData | None = None) -> ThetaData:
    """Automizer with SL2(p) outer part on a section representative.

    Splits Q through the fixed and moved parts of a p-prime complement in
    the diagonal-strand slice of the Q-normalizing centre-respecting
    ambient automorphisms, then collects every automorphism of Q fixing
    the still part pointwise and acting on the moved part with
    determinant one: literally on an abelian moved part, through the
    commutator pairing on an extraspecial one.  Raises MuHypothesisFailed
    when the weight-pair image of G, or of the stabilizer slice, misses
    the diagonal strand this construction keys on.
    """
    p = S.p
    A = S.A
    cd = S.center
    if hb is None:
        hb = classes_HB(S)
    label = hb.label_of(Q)
    if label is None:
        raise BadParameters("subgroup is not in either section family")
    family = label[0]
    t = p - 2 if family == "H" else 0
    if S.u not in set(G.elements()):
        raise BadParameters("translation automorphism is not in G")
    amod = FinZpGModule(G, A, G.generators, S.u, validate=False)
    img = mu_image(G, amod)
    if not delta_i(p, t) <= img:
        raise MuHypothesisFailed(
            f"weight image {name_delta_subgroup(img) or len(img)} misses "
            f"the {'inverse' if family == 'H' else 'constant'} diagonal")

    strand = delta_i(p, t)
    K = sorted({_map_freeze(f) for f in gamma_autos(S, G, vee=True)
                if all(f[g] in Q.elems for g in Q.elems)
                and _weights(S, f) in strand})
    NSQ = S.normalizer(Q)
    full = S.elements()
    spart = {_map_freeze({g: S.conj(s, g) for g in full}) for s in NSQ}
    if not spart <= set(K):
        raise Inconsistent("inner normalizer maps escape the vee normalizer")
    if len(K) % len(spart):
        raise Inconsistent("normalizer does not factor over its inner part")
    index = len(K) // len(spart)
    if index == 1:
        raise MuHypothesisFailed(
            "stabilizer of the section carries no diagonal-strand part")
    if index % p == 0:
        raise Inconsistent("no p-prime complement index available")
    comps = _complements(K, index, p)
    if not comps:
        raise Inconsistent("no p-prime complement found")

    def still_moved(comp):
        dicts = [dict(f) for f in comp]
        still = frozenset(q for q in Q.elems
                          if all(fd[q] == q for fd in dicts))
        moved = set()
        for fd in dicts:
            for q in Q.elems:
                moved.add(S.mul(fd[q], S.inv(q)))
        return S.handle(still), S.subgroup_handle(moved)

    Zt, Qt = still_moved(comps[0])
    for other in comps[1:]:
        if still_moved(other) != (Zt, Qt):
            raise Inconsistent("split depends on the complement choice")
    if still_moved(K) != (Zt, Qt):
        raise Inconsistent("split depends on more than the complement")

    zelems = frozenset(S.embed(z) for z in cd.Z.elements())
    z0elems = frozenset(S.embed(z) for z in cd.Z0.elements())
    qt_apart = frozenset(g for g in Qt.elems if g[1] == 0)
    if {S.mul(a, b) for a in Zt.elems for b in Qt.elems} != Q.elems:
        raise Inconsistent("parts do not rebuild the section")
    if any(S.elt_order(g) > p for g in Qt.elems):
        raise Inconsistent("moved part has exponent above p")
    if family == "H":
        if Zt.elems & Qt.elems != {S.identity}:
            raise Inconsistent("still and moved parts overlap")
        if Qt.order != p * p:
            raise Inconsistent("moved part is not of order p^2")
        if qt_apart != z0elems:
            raise Inconsistent("moved part meets A off the socle line")
        if not Zt.elems <= zelems or \
                {S.mul(a, b) for a in Zt.elems for b in z0elems} != zelems:
            raise Inconsistent("still part does not complement the socle")
    else:
        if Zt.elems != zelems:
            raise Inconsistent("still part is not the centre")
        if Qt.order != p ** 3:
            raise Inconsistent("moved part is not of order p^3")
        derived = S.subgroup_handle(
            {S.comm(g, h) for g in Qt.elems for h in Qt.elems})
        if derived.elems != z0elems:
            raise Inconsistent("moved part has the wrong derived line")
        if Zt.elems & Qt.elems != z0elems:
            raise Inconsistent("parts meet off the socle line")
        slice_cap = frozenset(
            S.embed(v) for v in cd.Z2.intersect(cd.Sprime).elements())
        if qt_apart != slice_cap:
            raise Inconsistent("moved part has the wrong A-part")

    # coordinates z * y1^c1 * y2^c2 over a fixed basis of the moved part
    if family == "H":
        y2 = next(g for g in sorted(z0elems, key=_elt_key)
                  if g != S.identity)
        y1 = next(g for g in Qt if g not in S.closure([y2]))
        qt_index = {}
        for c1 in range(p):
            for c2 in range(p):
                qt_index[S.mul(S.pow(y1, c1), S.pow(y2, c2))] = (c1, c2)
        zcomm = S.identity
    else:
        y1 = next(g for g in Qt if g[1] != 0)
        y2 = next(g for g in sorted(qt_apart, key=_elt_key)
                  if g not in z0elems)
        zcomm = S.comm(y1, y2)
        if zcomm not in z0elems or zcomm == S.identity:
            raise Inconsistent("chosen generators have a degenerate pairing")
        qt_index = None
    coords = {}
    for zt in Zt.elems:
        for c1 in range(p):
            for c2 in range(p):
                w = S.mul(zt, S.mul(S.pow(y1, c1), S.pow(y2, c2)))
                coords[w] = (zt, c1, c2)
    if len(coords) != Q.order:
        raise Inconsistent("coordinates do not separate the section")

    # Candidate images of (y1, y2).  With the moved part nonabelian of
    # exponent p, its defining relations are the p-th powers and the
    # commutator pairing, so preserving the pairing already makes the
    # coordinate map a homomorphism and a surjection.  The abelian case
    # keeps the explicit multiplicativity check.
    theta_maps = set()
    qt_sorted = sorted(Qt.elems, key=_elt_key)
    for w1 in qt_sorted:
        for w2 in qt_sorted:
            if family == "B":
                if S.comm(w1, w2) != zcomm:
                    continue
            else:
                m11, m21 = qt_index[w1]
                m12, m22 = qt_index[w2]
                if (m11 * m22 - m21 * m12) % p != 1:
                    continue
            f = {}
            for w, (zt, c1, c2) in coords.items():
                f[w] = S.mul(zt, S.mul(S.pow(w1, c1), S.pow(w2, c2)))
            if len(set(f.values())) != Q.order:
                continue
            if family == "H":
                ok = all(f[S.mul(g, h)] == S.mul(f[g], f[h])
                         for g in Q.elems for h in Q.elems)
                if not ok:
                    continue
            theta_maps.add(_map_freeze(f))
    _assert_group(theta_maps, "section automizer")

    inn = {_map_freeze({g: S.conj(q, g) for g in Q.elems}) for q in Q.elems}
    if not inn <= theta_maps:
        raise Inconsistent("section automizer misses inner maps")
    sl_order = p * (p - 1) * (p + 1)
    if len(theta_maps) != len(inn) * sl_order:
        raise Inconsistent(
            f"automizer outer order is {len(theta_maps) // len(inn)}, "
            f"wanted {sl_order}")

    # ambient-induced automorphisms of Q, no vee restriction this time
    amb = set()
    for f in gamma_autos(S, G, vee=False):
        if all(f[g] in Q.elems for g in Q.elems):
            amb.add(_map_freeze(_map_restrict(f, Q.elems)))
    aut_gamma = frozenset(amb)
    if not inn <= aut_gamma:
        raise Inconsistent("ambient automorphisms miss inner maps")
    # the ambient maps normalize the automizer ...
    for atup in aut_gamma:
        a = dict(atup)
        ainv = _map_inv(a)
        for th in theta_maps:
            if _map_freeze(_map_comp(a, _map_comp(dict(th), ainv))) \
                    not in theta_maps:
                raise Inconsistent(
                    "ambient maps do not normalize the automizer")
    # ... so the joint closure is the plain product set
    aut_S_Q = {_map_freeze({g: S.conj(s, g) for g in Q.elems}) for s in NSQ}
    if not aut_S_Q <= theta_maps:
        raise Inconsistent("S-conjugations escape the automizer")
    joint = {_map_freeze(_map_comp(dict(th), dict(a)))
             for th in theta_maps for a in aut_gamma}
    for group in (theta_maps, joint):
        n = len(group)
        while n % p == 0:
            n //= p
        if len(group) // n != len(aut_S_Q):
            raise Inconsistent("S-part is not Sylow in the automizer")
    # automizer elements normalizing the S-part come from the ambient group
    for th in theta_maps:
        td = dict(th)
        tinv = _map_inv(td)
        if all(_map_freeze(_map_comp(td, _map_comp(dict(s), tinv)))
               in aut_S_Q for s in aut_S_Q):
            if th not in aut_gamma:
                raise Inconsistent(
                    "automizer normalizer of the S-part is not ambient")

    k0_orders = tuple(sorted(_map_order(dict(t)) for t in comps[0]))
    return ThetaData(Q=Q, family=family, Ztilde=Zt, Qtilde=Qt,
                     maps=frozenset(theta_maps), inn_order=len(inn),
                     aut_gamma=aut_gamma, k0_orders=k0_orders)


# ---------------------------------------------------------------------------
# subgroup lattice


def _a_subgroups(A: FinAbelianPGroup) -> list:
    seen = {AbSubgroup(A, [])}
    frontier = list(seen)
    elems = list(A.elements())
    while frontier:
        nxt = []
        for T in frontier:
            for v in elems:
                if T.contains(list(v)):
                    continue
                T2 = AbSubgroup(A, [list(g) for g in T.gens()] + [list(v)])
                if T2 not in seen:
                    seen.add(T2)
                    nxt.append(T2)
        frontier = nxt
    return sorted(seen, key=lambda t: (t.order, t.gens()))


def _subgroup_lattice(S: SemidirectGroup, cap: int) -> list:
    """Every subgroup of S: the A-subgroups, plus each twist-invariant one
    extended by the cyclic sweep of an element outside A with p-th power
    inside."""
    if S.order > cap:
        raise CapExceeded(f"|S| = {S.order} exceeds the lattice cap {cap}")
    lattice = set()
    asubs = _a_subgroups(S.A)
    for T in asubs:
        lattice.add(S.handle(frozenset(S.embed(v) for v in T.elements())))
    for T in asubs:
        if not all(T.contains(list(S.u.apply(g))) for g in T.gens()):
            continue
        base = frozenset(S.embed(v) for v in T.elements())
        for y in S.elements():
            if y[1] == 0 or S.pow(y, S.p) not in base:
                continue
            elems = set(base)
            for k in range(1, S.p):
                yk = S.pow(y, k)
                elems.update(S.mul(b, yk) for b in base)
            lattice.add(S.handle(frozenset(elems)))
    return sorted(lattice)


# ---------------------------------------------------------------------------
# the closure engine


class _Engine:
    """Union-find over subgroup handles with automizers and transporters."""

    def __init__(self, S: SemidirectGroup, lattice):
        self.S = S
        self.lattice = list(lattice)
        self.parent = {h: h for h in self.lattice}
        self.members = {h: {h: {g: g for g in h.elems}} for h in self.lattice}
        self.aut = {h: {_map_freeze({g: g for g in h.elems})}
                    for h in self.lattice}
        self.sub_of = {R: [B for B in self.lattice
                           if 1 < B.order < R.order and B.elems < R.elems]
                       for R in self.lattice}
        self.seen = set()
        self.dirty = set()

    def find(self, h):
        while self.parent[h] is not h:
            self.parent[h] = self.parent[self.parent[h]]
            h = self.parent[h]
        return h

    def register(self, P: SubgroupHandle, f: dict) -> bool:
        key = (P, _map_freeze(f))
        if key in self.seen:
            return False
        self.seen.add(key)
        Q = self.S.handle(frozenset(f.values()))
        rp, rq = self.find(P), self.find(Q)
        if rp is rq:
            tp = self.members[rp][P]
            tq_inv = _map_inv(self.members[rp][Q])
            alpha = _map_freeze(_map_comp(tq_inv, _map_comp(f, tp)))
            if alpha in self.aut[rp]:
                return False
            self.aut[rp] = _maps_closure(self.aut[rp], {alpha})
            self.dirty.add(rp)
            return True
        # merge the smaller class into the larger
        if len(self.members[rp]) < len(self.members[rq]):
            keep, lose = rq, rp
            bridge = _map_comp(_map_inv(self.members[rp][P]),
                               _map_comp(_map_inv(f), self.members[rq][Q]))
        else:
            keep, lose = rp, rq
            bridge = _map_comp(_map_inv(self.members[rq][Q]),
                               _map_comp(f, self.members[rp][P]))
        binv = _map_inv(bridge)
        for M, tmap in self.members[lose].items():
            self.members[keep][M] = _map_comp(tmap, bridge)
        new_auts = {_map_freeze(_map_comp(binv, _map_comp(dict(a), bridge)))
                    for a in self.aut[lose]}
        self.parent[lose] = keep
        fresh = new_auts - self.aut[keep]
        if fresh:
            self.aut[keep] = _maps_closure(self.aut[keep], fresh)
        del self.members[lose], self.aut[lose]
        self.dirty.discard(lose)
        self.dirty.add(keep)
        return True

    def seed(self, P: SubgroupHandle, maps, closed: bool):
        if self.find(P) is not P or set(self.members[P]) != {P}:
            raise Inconsistent("seeds must come before any closure work")
        frozen = {m if isinstance(m, tuple) else _map_freeze(m)
                  for m in maps}
        for m in frozen:
            self.seen.add((P, m))
        self.aut[P] = self.aut[P] | frozen
        if not closed:
            self.aut[P] = _maps_closure(self.aut[P])
        self.dirty.add(P)

    def close(self):
        while self.dirty:
            root = self.dirty.pop()
            auts = list(self.aut[root])
            membs = list(self.members[root].items())
            for B in self.sub_of[root]:
                for a in auts:
                    self.register(B, _map_restrict(dict(a), B.elems))
            for M, tmap in membs:
                if M is root:
                    continue
                for B in self.sub_of[root]:
                    self.register(B, _map_restrict(tmap, B.elems))
            # another class's sweep may have fed this one meanwhile
            if root in self.aut and set(self.aut[root]) != set(auts):
                self.dirty.add(root)


class FusionSystem:
    """Conjugacy classes, automizers and transporters for all subgroups
    of S, with accessors reconstructing every morphism set."""

    def __init__(self, S: SemidirectGroup, G: FinGroup, E0, engine: _Engine,
                 hb, thetas: dict):
        self.S = S
        self.G = G
        self.E0 = tuple(E0)
        self.lattice = tuple(engine.lattice)
        self.hb = hb
        self.thetas = thetas
        self.S_handle = S.handle(frozenset(S.elements()))
        self.A_handle = S.handle(
            frozenset(S.embed(a) for a in S.A.elements()))
        self._root = {h: engine.find(h) for h in self.lattice}
        self._members = {r: dict(ms) for r, ms in engine.members.items()}
        self._aut = {r: frozenset(a) for r, a in engine.aut.items()}
        self._el_orbits = None
        self._essentials = None
        for rep in self._aut:
            aset = self._aut[rep]
            for s in S.normalizer(rep):
                if _map_freeze({g: S.conj(s, g) for g in rep.elems}) \
                        not in aset:
                    raise Inconsistent("automizer misses an S-conjugation")

    # -- class structure ---------------------------------------------------

    def rep(self, P: SubgroupHandle) -> SubgroupHandle:
        return self._root[P]

    def members(self, P: SubgroupHandle):
        return tuple(sorted(self._members[self._root[P]]))

    def transporter(self, P: SubgroupHandle) -> dict:
        """Iso from the class representative onto P."""
        return dict(self._members[self._root[P]][P])

    def aut(self, P: SubgroupHandle):
        """Automorphisms of P itself, translated from the representative."""
        r = self._root[P]
        tmap = self._members[r][P]
        tinv = _map_inv(tmap)
        return tuple(_map_comp(tmap, _map_comp(dict(a), tinv))
                     for a in self._aut[r])

    def are_conjugate(self, P, Q) -> bool:
        return self._root[P] is self._root[Q]

    def isos(self, P, Q):
        if not self.are_conjugate(P, Q):
            return ()
        r = self._root[P]
        tp_inv = _map_inv(self._members[r][P])
        tq = self._members[r][Q]
        return tuple(_map_comp(tq, _map_comp(dict(a), tp_inv))
                     for a in self._aut[r])

    def hom(self, P, Q):
        """Every morphism P -> Q, as element maps landing inside Q."""
        out = []
        for M in self.members(P):
            if M.elems <= Q.elems:
                out.extend(self.isos(P, M))
        return tuple(out)

    def classes(self):
        return tuple((r, self.members(r)) for r in sorted(self._members))

    # -- element fusion ----------------------------------------------------

    def element_orbits(self) -> dict:
        if self._el_orbits is None:
            parent = {g: g for g in self.S.elements()}

            def find(g):
                while parent[g] != g:
                    parent[g] = parent[parent[g]]
                    g = parent[g]
                return g

            for r, ms in self._members.items():
                for a in self._aut[r]:
                    for g, h in a:
                        rg, rh = find(g), find(h)
                        if rg != rh:
                            parent[rg] = rh
                for tmap in ms.values():
                    for g, h in tmap.items():
                        rg, rh = find(g), find(h)
                        if rg != rh:
                            parent[rg] = rh
            orbits = {}
            for g in self.S.elements():
                orbits.setdefault(find(g), set()).add(g)
            self._el_orbits = {g: frozenset(orbits[find(g)])
                               for g in self.S.elements()}
        return self._el_orbits


def generate_fusion(S: SemidirectGroup, G: FinGroup, E0=(),
                    cap: int = 243) -> FusionSystem:
    """Smallest fusion data containing ambient conjugation and the chosen
    section automizers.

    `E0` lists labels ("H", i) or ("B", i) against the classes_HB layout;
    empty E0 gives plain ambient fusion.  The subgroup walk refuses
    groups larger than `cap`.
    """
    if S.u not in set(G.elements()):
        raise BadParameters("translation automorphism is not in G")
    E0 = tuple(sorted(set(tuple(lab) for lab in E0)))
    for lab in E0:
        if len(lab) != 2 or lab[0] not in ("H", "B") \
                or not 0 <= lab[1] < S.p:
            raise BadParameters(f"bad section label {lab!r}")
    hb = None
    try:
        hb = classes_HB(S)
    except IndexNotP:
        if E0:
            raise
    lattice = _subgroup_lattice(S, cap)
    engine = _Engine(S, lattice)
    handle_S = S.handle(frozenset(S.elements()))
    handle_A = S.handle(frozenset(S.embed(a) for a in S.A.elements()))
    engine.seed(handle_S, gamma_autos(S, G, vee=False), closed=True)
    engine.seed(handle_A,
                [{S.embed(a): S.embed(g.apply(a)) for a in S.A.elements()}
                 for g in G.elements()],
                closed=True)
    thetas = {}
    for lab in E0:
        td = theta(S, G, hb.rep(lab), hb)
        thetas[lab] = td
        engine.seed(td.Q, td.maps, closed=True)
    engine.close()
    return FusionSystem(S, G, E0, engine, hb, thetas)


# ---------------------------------------------------------------------------
# saturation


@dataclass
class SaturationReport:
    ok: bool
    witness: str | None
    checked_classes: int


def _aut_S_maps(S: SemidirectGroup, P: SubgroupHandle) -> set:
    return {_map_freeze({g: S.conj(s, g) for g in P.elems})
            for s in S.normalizer(P)}


def _small_gens(S: SemidirectGroup, P: SubgroupHandle) -> tuple:
    gens: list = []
    cur = {S.identity}
    for g in sorted(P.elems, key=_elt_key):
        if g not in cur:
            gens.append(g)
            cur = S.closure(gens)
            if len(cur) == P.order:
                break
    return tuple(gens)


def is_saturated(F: FusionSystem, cap: int = 243) -> SaturationReport:
    """Check the two saturation axioms class by class.

    Maximally normalized members must be maximally centralized with a
    Sylow automizer; every maximally centralized member must accept the
    extension of each incoming iso to its transport subgroup.  The
    morphism search is definitive because the engine data is closed.
    """
    S = F.S
    if S.order > cap:
        raise CapExceeded(
            f"|S| = {S.order} exceeds the saturation cap {cap}")
    p = S.p
    norms = {P: S.normalizer(P) for P in F.lattice}
    cents = {P: S.centralizer(P) for P in F.lattice}
    ext_index: dict = {}

    def extends(NQ, Q, phi_t):
        key = (NQ, Q)
        idx = ext_index.get(key)
        if idx is None:
            idx = {_map_freeze(_map_restrict(f, Q.elems))
                   for f in F.hom(NQ, F.S_handle)}
            ext_index[key] = idx
        return phi_t in idx

    checked = 0
    for rep, members in F.classes():
        checked += 1
        best_n = max(len(norms[M]) for M in members)
        best_c = max(len(cents[M]) for M in members)
        for M in members:
            if len(norms[M]) != best_n:
                continue
            if len(cents[M]) != best_c:
                return SaturationReport(
                    False, f"max-normalized member {M!r} is not "
                    f"max-centralized", checked)
            auts = {_map_freeze(a) for a in F.aut(M)}
            asm = _aut_S_maps(S, M)
            if not asm <= auts:
                return SaturationReport(
                    False, f"automizer of {M!r} misses S-conjugations",
                    checked)
            n = len(auts)
            while n % p == 0:
                n //= p
            if len(auts) // n != len(asm):
                return SaturationReport(
                    False, f"S-part of the automizer of {M!r} is not Sylow",
                    checked)
        for P in members:
            if len(cents[P]) != best_c:
                continue
            gens_P = _small_gens(S, P)
            asm_keys = {tuple(dict(t)[x] for x in gens_P)
                        for t in _aut_S_maps(S, P)}
            for Q in members:
                cg = {g: {q: S.conj(g, q) for q in Q.elems}
                      for g in norms[Q]}
                for phi in F.isos(Q, P):
                    phinv = _map_inv(phi)
                    pre = tuple(phinv[v] for v in gens_P)
                    Nphi = {g for g, cgm in cg.items()
                            if tuple(phi[cgm[q]] for q in pre) in asm_keys}
                    NQ = S.handle(frozenset(Nphi))
                    if NQ not in F._root:
                        raise Inconsistent(
                            "transport set of an iso is not a subgroup")
                    if not extends(NQ, Q, _map_freeze(phi)):
                        return SaturationReport(
                            False, f"an iso {Q!r} -> {P!r} has no extension "
                            f"to its transport subgroup", checked)
    return SaturationReport(True, None, checked)


# ---------------------------------------------------------------------------
# essential subgroups


class _CosetGroup:
    """Quotient of a finite group of maps by a normal subgroup, with an
    integer multiplication table for fast subgroup walks."""

    def __init__(self, elems: set, normal: set):
        cosets = []
        of = {}
        left = set(elems)
        while left:
            rep = min(left)
            cs = frozenset(_map_freeze(_map_comp(dict(rep), dict(n)))
                           for n in normal)
            idx = len(cosets)
            cosets.append(rep)
            for t in cs:
                of[t] = idx
            left -= cs
        self.order = len(cosets)
        self.table = [[of[_map_freeze(_map_comp(dict(cosets[i]),
                                                dict(cosets[j])))]
                       for j in range(self.order)]
                      for i in range(self.order)]
        ident_map = _map_freeze({k: k for k in dict(cosets[0])})
        self.identity = of[ident_map]
        self.invs = [next(j for j in range(self.order)
                          if self.table[i][j] == self.identity)
                     for i in range(self.order)]
        self.orders = []
        for i in range(self.order):
            n = 1
            cur = i
            while cur != self.identity:
                cur = self.table[cur][i]
                n += 1
            self.orders.append(n)

    def closure(self, gens) -> frozenset:
        out = {self.identity} | set(gens)
        frontier = list(out)
        while frontier:
            nxt = []
            for a in frontier:
                for b in list(out):
                    for c in (self.table[a][b], self.table[b][a]):
                        if c not in out:
                            out.add(c)
                            nxt.append(c)
            frontier = nxt
        return frozenset(out)

    def subgroups(self) -> set:
        subs = {frozenset({self.identity})}
        frontier = list(subs)
        while frontier:
            nxt = []
            for T in frontier:
                for g in range(self.order):
                    if g in T:
                        continue
                    T2 = self.closure(T | {g})
                    if T2 not in subs:
                        subs.add(T2)
                        nxt.append(T2)
            frontier = nxt
        return subs

    def conj_subgroup(self, T, g) -> frozenset:
        gi = self.invs[g]
        return frozenset(self.table[self.table[g][t]][gi] for t in T)


def _has_strongly_p_embedded(q: _CosetGroup, p: int) -> bool:
    if all(n % p for n in q.orders):
        return False
    for H in q.subgroups():
        if len(H) == q.order or all(q.orders[c] % p for c in H):
            continue
        ok = True
        for g in range(q.order):
            if g in H:
                continue
            meet = H & q.conj_subgroup(H, g)
            if any(q.orders[c] % p == 0 for c in meet):
                ok = False
                break
        if ok:
            return True
    return False


@dataclass
class EssentialReport:
    subgroups: tuple
    labels: tuple


def essentials(F: FusionSystem) -> EssentialReport:
    """Fully normalized members of classes whose outer automizer has a
    strongly p-embedded subgroup, among the self-centralizing classes."""
    if F._essentials is not None:
        return F._essentials
    S = F.S
    p = S.p
    out = []
    for rep, members in F.classes():
        if rep.order in (1, S.order):
            continue
        if not all(S.centralizer(M) <= M.elems for M in members):
            continue
        auts = {_map_freeze(a) for a in F.aut(rep)}
        inn = {_map_freeze({g: S.conj(q, g) for g in rep.elems})
               for q in rep.elems}
        q = _CosetGroup(auts, inn)
        if q.order % p or not _has_strongly_p_embedded(q, p):
            continue
        best_n = max(len(S.normalizer(M)) for M in members)
        out.extend(M for M in members
                   if len(S.normalizer(M)) == best_n)
    out.sort()
    labels = []
    for M in out:
        if M == F.A_handle:
            labels.append(("A", 0))
        else:
            labels.append(F.hb.label_of(M) if F.hb is not None else None)
    F._essentials = EssentialReport(subgroups=tuple(out),
                                    labels=tuple(labels))
    return F._essentials


# ---------------------------------------------------------------------------
# normal core and strongly closed subgroups


def _subgroups_inside(A: FinAbelianPGroup, W: AbSubgroup) -> list:
    seen = {AbSubgroup(A, [])}
    frontier = list(seen)
    elems = W.elements()
    while frontier:
        nxt = []
        for T in frontier:
            for v in elems:
                if T.contains(list(v)):
                    continue
                T2 = AbSubgroup(A, [list(g) for g in T.gens()] + [list(v)])
                if T2 not in seen:
                    seen.add(T2)
                    nxt.append(T2)
        frontier = nxt
    return sorted(seen, key=lambda t: (t.order, t.gens()))


def op_F(F: FusionSystem) -> SubgroupHandle:
    """Largest subgroup normal in the whole system.

    Computed as the largest subgroup lying in S and every essential
    subgroup and invariant under all of their automizers.  When section
    automizers were configured the result is cross-checked against the
    direct centre criterion.
    """
    S = F.S
    ess = essentials(F).subgroups
    T = set(S.elements())
    for P in ess:
        T &= P.elems
    anchors = [(P, F.aut(P)) for P in list(ess) + [F.S_handle]]
    changed = True
    while changed:
        changed = False
        for _, auts in anchors:
            for a in auts:
                T2 = {g for g in T if a[g] in T}
                if len(T2) != len(T):
                    T = T2
                    changed = True
    if len(S.closure(list(T))) != len(T):
        raise Inconsistent("normal core candidate is not a subgroup")
    result = S.handle(frozenset(T))
    if F.E0:
        cd = S.center
        invariant = [B for B in _subgroups_inside(S.A, cd.Z)
                     if B.order > 1 and
                     all(B.contains(list(g.apply(v)))
                         for g in F.G.generators for v in B.gens())]
        has_H = any(lab and lab[0] == "H" for lab in essentials(F).labels)
        crit = (not invariant) or (
            has_H and all(B == cd.Z0 for B in invariant))
        if (result.order == 1) != crit:
            raise Inconsistent(
                "normal core disagrees with the centre criterion")
    return result


def strongly_closed_scan(F: FusionSystem) -> tuple:
    """All subgroups containing the full fusion orbit of each element.

    Such a subgroup is necessarily normal in S, so only those are walked.
    """
    S = F.S
    orbits = F.element_orbits()
    gens = [S.x()] + [S.embed(g) for g in S.A.full_subgroup().gens()]
    out = []
    for T in F.lattice:
        if not all(S.conj(s, g) in T.elems for s in gens for g in T.elems):
            continue
        if all(orbits[g] <= T.elems for g in T.elems):
            out.append(T)
    return tuple(sorted(out))


# ---------------------------------------------------------------------------
# the classification conditions


@dataclass
class Thm45Report:
    ok: bool
    socle_line: bool
    invariant_only_socle: bool
    commutator_full: bool
    rows: tuple
    m: int
    mu_name: str | None
    sigma_in_frattini: bool
    z0_invariant: bool
    details: dict = field(default_factory=dict)


def check_thm45_conditions(G: FinGroup, A: FinAbelianPGroup, E0,
                           u: PHom | None = None) -> Thm45Report:
    """Test the classification conditions for an action and a section
    selection, and match the admissible table rows.

    The acting group must have a non-normal order-p Sylow subgroup whose
    normalizer realizes all its automorphisms, else HypothesisFailed.
    Labels in E0 follow the classes_HB convention.
    """
    if A != G.carrier:
        raise BadParameters("G must act on A as its carrier")
    verdict = classify_gp(G)
    if verdict.verdict != "Gp_hat":
        raise HypothesisFailed("class", f"acting group is {verdict.verdict}")
    p = A.p
    if u is None:
        u = verdict.sylow.u
    elif u not in set(G.elements()):
        raise BadParameters("given translation automorphism is not in G")
    amod = FinZpGModule(G, A, G.generators, u, validate=False)
    S = build_S(A, u)
    cd = S.center
    details = {}

    cond_a = cd.Z0.order == p and A.order == cd.A0.order * p
    details["socle"] = (f"|Z0| = {cd.Z0.order}, "
                        f"index of A0 = {A.order // cd.A0.order}")

    invars = [B for B in _subgroups_inside(A, cd.Z)
              if B.order > 1 and
              all(B.contains(list(g.apply(v)))
                  for g in G.generators for v in B.gens())]
    cond_b = all(B == cd.Z0 for B in invars)
    details["invariant"] = \
        f"{len(invars)} nontrivial invariant subgroups inside the centre"

    comm = commutator_with(list(G.elements()), A)
    cond_c = comm.order == A.order
    details["commutator"] = f"|[G, A]| = {comm.order} of {A.order}"

    img = mu_image(G, amod)
    mu_name = name_delta_subgroup(img)
    vee = _vee_elements(G, amod)
    core = list(p_prime_core(G, u).elements())
    m = _vp_int(A.order // cd.Z.order, p) + 1
    nmat = [[sum(S.upow[j].matrix[i][k] for j in range(p))
             for k in range(A.rank)] for i in range(A.rank)]
    sigA = hom_image(PHom(A, A, nmat))
    frZ = AbSubgroup(A, [list(A.smul(p, z)) for z in cd.Z.gens()])
    sigma_ok = frZ.contains_subgroup(sigA)
    z0_inv = all(cd.Z0.contains(list(g.apply(v)))
                 for g in G.generators for v in cd.Z0.gens())
    details["sigma"] = f"|sigma A| = {sigA.order}, |pZ| = {frZ.order}"

    E = set(tuple(lab) for lab in E0)
    for lab in E:
        if len(lab) != 2 or lab[0] not in ("H", "B") or not 0 <= lab[1] < p:
            raise BadParameters(f"bad section label {lab!r}")
    all_H = bool(E) and all(lab[0] == "H" for lab in E)
    all_B = bool(E) and all(lab[0] == "B" for lab in E)
    hb_split = {("H", 0)} | {("B", i) for i in range(1, p)}
    bh_split = {("B", 0)} | {("H", i) for i in range(1, p)}

    rows = []
    if img == delta_full(p) and _closure_holds(G, core, vee):
        if m % (p - 1) == 0 and sigma_ok and E == hb_split:
            rows.append("i")
        if m % (p - 1) == (p - 2) % (p - 1) and sigma_ok and E == bh_split:
            rows.append("ii")
    if delta_i(p, p - 2) <= img:
        X = [g for g in vee if mu(g, amod).in_delta_i(p - 2)]
        if _closure_holds(G, core, X):
            if all_H and m % (p - 1) == (p - 2) % (p - 1) and sigma_ok:
                rows.append("iii'")
            if E == {("H", 0)}:
                rows.append("iii''")
    if delta_i(p, 0) <= img:
        X = [g for g in vee if mu(g, amod).in_delta_i(0)]
        if _closure_holds(G, core, X):
            if all_B and m % (p - 1) == 0 and sigma_ok:
                rows.append("iv'")
            if E == {("B", 0)} and not z0_inv:
                rows.append("iv''")
    ok = bool(cond_a and cond_b and cond_c and rows)
    return Thm45Report(ok=ok, socle_line=cond_a, invariant_only_socle=cond_b,
                       commutator_full=cond_c, rows=tuple(rows), m=m,
                       mu_name=mu_name, sigma_in_frattini=sigma_ok,
                       z0_invariant=z0_inv, details=details)


def _vp_int(n: int, p: int) -> int:
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


# ---------------------------------------------------------------------------
# a concrete split lift of the full rank-two linear group


def linear_lift(p: int, k: int) -> FinGroup:
    """Subgroup of GL2 over Z/p^k reducing isomorphically onto GL2(p).

    Standard generators are lifted level by level; at each level every
    generator is corrected by p^j X with X over the residue field, and
    the first triple whose closure has the right order wins.  Raises
    Inconsistent when no correction works at some level.
    """
    if k < 1:
        raise BadParameters("depth must be at least 1")
    target = (p * p - 1) * (p * p - p)
    root = _primitive_root(p)
    mats = [[[1, 1], [0, 1]], [[0, p - 1], [1, 0]], [[1, 0], [0, root]]]
    orders = [p, 4, p - 1]
    for level in range(1, k):
        q = p ** (level + 1)
        cands = []
        for gi, g in enumerate(mats):
            good = []
            for xs in itertools.product(range(p), repeat=4):
                cand = tuple(
                    tuple((g[i][j] + p ** level * xs[2 * i + j]) % q
                          for j in range(2)) for i in range(2))
                if _mat_order_mod(cand, q) != orders[gi]:
                    continue
                if gi == 0 and (_fixed_count(cand, q) != p
                                or not _power_sum_zero(cand, p, q)):
                    # translation lifts with a vanishing power sum keep the
                    # image of 1 + u + ... + u^(p-1) trivial, which the
                    # admissible-row sigma condition needs
                    continue
                good.append(cand)
            cands.append(good)
        Aq = FinAbelianPGroup(p, [q] * 2)
        found = None
        for c0, c1, c2 in itertools.product(*cands):
            try:
                cand = FinGroup(Aq, [PHom(Aq, Aq, [list(r) for r in c])
                                     for c in (c0, c1, c2)],
                                cap=2 * target)
                norder = cand.order
            except CapExceeded:
                continue
            if norder == target:
                found = (c0, c1, c2)
                break
        if found is None:
            raise Inconsistent(f"no split lift found at level {level + 1}")
        mats = [[list(r) for r in c] for c in found]
    A = FinAbelianPGroup(p, [p ** k] * 2)
    out = FinGroup(A, [PHom(A, A, m) for m in mats])
    if out.order != target:
        raise Inconsistent("lifted generators close over the wrong order")
    return out


def _primitive_root(p: int) -> int:
    for g in range(2, p):
        x = 1
        seen = set()
        for _ in range(p - 1):
            x = x * g % p
            seen.add(x)
        if len(seen) == p - 1:
            return g
    raise BadParameters("no primitive root")


def _mat_order_mod(m, q: int) -> int:
    ident = ((1, 0), (0, 1))
    cur = tuple(tuple(r) for r in m)
    n = 1
    while cur != ident:
        cur = tuple(tuple(sum(cur[i][t] * m[t][j] for t in range(2)) % q
                          for j in range(2)) for i in range(2))
        n += 1
        if n > 4 * q * q:
            return n
    return n


def _power_sum_zero(m, p: int, q: int) -> bool:
    """1 + m + ... + m^(p-1) is the zero matrix mod q."""
    tot = [[1, 0], [0, 1]]
    cur = [[1, 0], [0, 1]]
    for _ in range(p - 1):
        cur = [[sum(cur[i][t] * m[t][j] for t in range(2)) % q
                for j in range(2)] for i in range(2)]
        tot = [[(tot[i][j] + cur[i][j]) % q for j in range(2)]
               for i in range(2)]
    return all(tot[i][j] == 0 for i in range(2) for j in range(2))


def _fixed_count(m, q: int) -> int:
    count = 0
    for a in range(q):
        for b in range(q):
            if ((m[0][0] - 1) * a + m[0][1] * b) % q == 0 and \
                    (m[1][0] * a + (m[1][1] - 1) * b) % q == 0:
                count += 1
    return count
