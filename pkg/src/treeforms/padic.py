"""Exact p-adic realization of the tree: lattice classes and the
projective linear action.

Vertices of the tree are homothety classes of rank-2 Z_p-lattices; the
canonical representative of a class is the column-reduced matrix
[[p^n, u], [0, 1]] with u taken modulo p^n Z_p.  Group elements are 2x2
rational matrices modulo nonzero scalars, acting by left multiplication
followed by column reduction.  Everything is exact: rationals carry
their p-adic valuations, no truncated expansions anywhere.

Only F = Q_p for a prime p is modeled (residue cardinality q = p);
general local fields would need ring extensions and are out of scope.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .tree import BallAutomorphism, TreeBall, TreeParams, build_ball


def valuation(x, p: int):
    """v_p(x) for a rational x; None plays the role of +infinity at 0."""
    x = Fraction(x)
    if x == 0:
        return None
    v = 0
    n = x.numerator
    while n % p == 0:
        n //= p
        v += 1
    d = x.denominator
    while d % p == 0:
        d //= p
        v -= 1
    return v


def _vge(v, bound: int) -> bool:
    """valuation >= bound, with None as +infinity."""
    return v is None or v >= bound


@dataclass(frozen=True)
class GroupElement:
    """2x2 rational matrix of nonzero determinant, modulo scalars."""

    a: Fraction
    b: Fraction
    c: Fraction
    d: Fraction

    @classmethod
    def of(cls, a, b, c, d) -> "GroupElement":
        g = cls(Fraction(a), Fraction(b), Fraction(c), Fraction(d))
        if g.det == 0:
            raise ValueError("matrix is singular")
        return g

    @property
    def det(self) -> Fraction:
        return self.a * self.d - self.b * self.c

    @property
    def entries(self) -> tuple[Fraction, Fraction, Fraction, Fraction]:
        return (self.a, self.b, self.c, self.d)

    def mul(self, other: "GroupElement") -> "GroupElement":
        return GroupElement(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def inverse(self) -> "GroupElement":
        # Projectively the adjugate is the inverse.
        return GroupElement(self.d, -self.b, -self.c, self.a)

    def scaled_unit_min_valuation(self, p: int) -> "GroupElement":
        """Scalar-normalize so the minimum entry valuation is 0."""
        m = min(v for v in (valuation(x, p) for x in self.entries) if v is not None)
        if m == 0:
            return self
        c = Fraction(p) ** (-m)
        return GroupElement(self.a * c, self.b * c, self.c * c, self.d * c)

    def proportional_to(self, other: "GroupElement") -> bool:
        return (self.a * other.b == self.b * other.a
                and self.a * other.c == self.c * other.a
                and self.a * other.d == self.d * other.a
                and self.b * other.c == self.c * other.b
                and self.b * other.d == self.d * other.b
                and self.c * other.d == self.d * other.c)

    def to_json_dict(self) -> list[list[str]]:
        def fmt(x: Fraction) -> str:
            return f"{x.numerator}/{x.denominator}"
        return [[fmt(self.a), fmt(self.b)], [fmt(self.c), fmt(self.d)]]


IDENTITY = GroupElement(Fraction(1), Fraction(0), Fraction(0), Fraction(1))


def residue_mod(u, n: int, p: int) -> Fraction:
    """Canonical representative of u modulo p^n Z_p.

    The result is p^v * r with v = v_p(u) and r the unit part reduced
    modulo p^(n-v), an integer in [1, p^(n-v)); zero when v >= n.  For
    negative v the representative is an honest non-integral rational.
    """
    u = Fraction(u)
    v = valuation(u, p)
    if v is None or v >= n:
        return Fraction(0)
    unit = u / Fraction(p) ** v
    modulus = p ** (n - v)
    r = (unit.numerator * pow(unit.denominator, -1, modulus)) % modulus
    return Fraction(p) ** v * r


@dataclass(frozen=True)
class LatticeClassVertex:
    """Homothety class of lattices: column-reduced form [[p^n, u], [0, 1]]."""

    n: int
    u: Fraction

    def matrix(self, p: int) -> GroupElement:
        return GroupElement(Fraction(p) ** self.n, self.u, Fraction(0), Fraction(1))


ROOT = LatticeClassVertex(0, Fraction(0))


def canonicalize(g: GroupElement, p: int) -> LatticeClassVertex:
    """Column-reduce over Z_p modulo scalars to the unique (n, u mod p^n).

    Right multiplication by GL(2, Z_p) realizes the column operations:
    swap, and adding a Z_p-multiple of one column to the other.
    """
    if g.det == 0:
        raise ValueError("matrix is singular")
    a, b, c, d = g.entries
    vc, vd = valuation(c, p), valuation(d, p)
    if d == 0 or (c != 0 and vc < vd):
        a, b = b, a
        c, d = d, c
    # Now v(c) >= v(d), d != 0: clear the lower-left entry.
    if c != 0:
        a = a - (c / d) * b
        c = Fraction(0)
    # Scale the class so the lower-right entry is 1.
    alpha = a / d
    u0 = b / d
    n = valuation(alpha, p)
    return LatticeClassVertex(n, residue_mod(u0, n, p))


def act(g: GroupElement, v: LatticeClassVertex, p: int) -> LatticeClassVertex:
    """Left action on lattice classes: canonicalize(g . matrix(v))."""
    return canonicalize(g.mul(v.matrix(p)), p)


def tree_distance(v: LatticeClassVertex, w: LatticeClassVertex, p: int) -> int:
    """|e1 - e2| for the elementary-divisor valuations of the relative
    position matrix(v)^-1 matrix(w)."""
    m = v.matrix(p).inverse().mul(w.matrix(p))
    vmin = min(x for x in (valuation(e, p) for e in m.entries) if x is not None)
    vdet = valuation(m.det, p)
    # Divisors are p^vmin and p^(vdet - vmin).
    return abs(vdet - 2 * vmin)


def lattice_neighbors(v: LatticeClassVertex, p: int) -> list[LatticeClassVertex]:
    """The p+1 classes at distance 1: p sublattices of index p and one
    superlattice."""
    pn = Fraction(p) ** v.n
    down = [LatticeClassVertex(v.n + 1, residue_mod(v.u + t * pn, v.n + 1, p))
            for t in range(p)]
    up = LatticeClassVertex(v.n - 1, residue_mod(v.u, v.n - 1, p))
    return down + [up]


class BallEmbedding:
    """Distance-preserving bijection between an abstract ball and the set
    of lattice classes at distance <= R from the standard class."""

    def __init__(self, p: int, radius: int):
        self.p = p
        self.ball: TreeBall = build_ball(TreeParams(q=p, radius=radius))
        to_lattice: list[LatticeClassVertex | None] = [None] * self.ball.num_vertices
        to_lattice[0] = ROOT
        seen = {ROOT}
        for v in range(self.ball.num_vertices):
            lv = to_lattice[v]
            depth = self.ball.depths[v]
            if depth == radius:
                continue
            children = [w for w in self.ball.adjacency[v] if self.ball.depths[w] == depth + 1]
            fresh = sorted((x for x in lattice_neighbors(lv, p) if x not in seen),
                           key=lambda x: (x.n, x.u))
            if len(children) != len(fresh):
                raise RuntimeError("lattice neighbor enumeration does not match the ball")
            for w, lw in zip(children, fresh):
                to_lattice[w] = lw
                seen.add(lw)
        self.to_lattice: list[LatticeClassVertex] = to_lattice
        self.from_lattice = {lv: v for v, lv in enumerate(to_lattice)}

    def automorphism_from(self, g: GroupElement) -> BallAutomorphism:
        """The ball permutation induced by a group element that maps the
        ball onto itself (e.g. any element fixing the root class)."""
        perm = []
        for lv in self.to_lattice:
            image = act(g, lv, self.p)
            if image not in self.from_lattice:
                raise ValueError("group element does not preserve the ball window")
            perm.append(self.from_lattice[image])
        return BallAutomorphism(self.ball, perm)


def embed_ball(p: int, radius: int) -> BallEmbedding:
    return BallEmbedding(p, radius)


def in_gamma0(g: GroupElement, n: int, p: int) -> bool:
    """Membership in the congruence subgroup with lower-left entries in
    p^n (diagonal entries units, upper-right integral), up to scalars;
    n = 0 means the maximal compact subgroup, image of GL(2, Z_p)."""
    if n < 0:
        raise ValueError("congruence level must be >= 0")
    va, vb, vc, vd = (valuation(x, p) for x in g.entries)
    if n == 0:
        m = min(v for v in (va, vb, vc, vd) if v is not None)
        return valuation(g.det, p) == 2 * m
    if va is None or vd is None or va != vd:
        return False
    m = va
    return _vge(vb, m) and _vge(vc, m + n)


def standard_path(emb: BallEmbedding, n: int) -> tuple[int, ...]:
    """The (n+1)-path from the root along the diagonal-torus apartment
    whose pointwise stabilizer is the level-(n+1) congruence subgroup.

    Returns ball vertex ids for the lattice classes diag(1, p^j),
    j = 0..n+1; usable as the distinguished edge of the level-n path
    graph over the embedded ball.
    """
    if emb.ball.params.radius < n + 1:
        raise ValueError(f"ball radius {emb.ball.params.radius} too small for level {n}")
    path = []
    for j in range(n + 2):
        lv = LatticeClassVertex(-j, Fraction(0))
        path.append(emb.from_lattice[lv])
    return tuple(path)


def fixes_path_pointwise(g: GroupElement, emb: BallEmbedding, path: tuple[int, ...]) -> bool:
    for v in path:
        lv = emb.to_lattice[v]
        if act(g, lv, emb.p) != lv:
            return False
    return True


def sample_gamma0(p: int, n: int, modulus_exp: int, count: int, seed: int) -> list[GroupElement]:
    """Seeded sample of congruence-subgroup elements with entries reduced
    modulo p^modulus_exp; lower-left valuations are >= n by construction.

    At level 0 the subgroup is the full maximal compact, so the sample is
    any integral matrix with unit determinant.
    """
    if n >= modulus_exp:
        raise ValueError("modulus exponent must exceed the congruence level")
    rng = random.Random(seed)
    pm = p ** modulus_exp
    out = []
    while len(out) < count:
        a = rng.randrange(pm)
        d = rng.randrange(pm)
        b = rng.randrange(pm)
        if n == 0:
            c = rng.randrange(pm)
            if (a * d - b * c) % p == 0:
                continue
        else:
            if a % p == 0 or d % p == 0:
                continue
            c = (p ** n) * rng.randrange(p ** (modulus_exp - n))
        if a * d - b * c == 0:
            continue
        out.append(GroupElement.of(a, b, c, d))
    return out


def sample_with_exact_lower_valuation(p: int, n: int, modulus_exp: int,
                                      count: int, seed: int) -> list[GroupElement]:
    """Elements of the level-n subgroup whose lower-left valuation is
    exactly n (so they sit outside level n+1)."""
    rng = random.Random(seed)
    pm = p ** modulus_exp
    out = []
    while len(out) < count:
        a = rng.randrange(1, pm)
        d = rng.randrange(1, pm)
        if a % p == 0 or d % p == 0:
            continue
        b = rng.randrange(pm)
        unit = rng.randrange(1, p ** (modulus_exp - n))
        if unit % p == 0:
            continue
        c = (p ** n) * unit
        if a * d - b * c == 0:
            continue
        out.append(GroupElement.of(a, b, c, d))
    return out


def enumerate_unit_lifts(p: int, modulus_exp: int) -> list[GroupElement]:
    """Integer lifts of GL(2, Z/p^m): one representative per residue class
    with unit determinant.  All lie in GL(2, Z_p), so each fixes the root
    class and induces an automorphism of any embedded ball."""
    pm = p ** modulus_exp
    out = []
    for a in range(pm):
        for b in range(pm):
            for c in range(pm):
                for d in range(pm):
                    if (a * d - b * c) % p != 0:
                        out.append(GroupElement.of(a, b, c, d))
    return out


@dataclass(frozen=True)
class TransitivityResult:
    covered: bool
    conclusive: bool
    orbit_size: int
    target_size: int
    stabilizer_size: int


def stabilizer_transitivity_check(emb: BallEmbedding, pg, s: int, side: str,
                                  modulus_exp: int) -> TransitivityResult:
    """Does the pointwise path stabilizer act transitively on the edge
    extensions of a path-graph vertex?

    Enumerates unit lifts modulo p^modulus_exp, keeps those fixing the
    k-path s pointwise, and checks whether the orbit of one extension
    covers the whole side.  Coverage is a positive certificate; a miss
    only means the sampling window was too small, reported as
    inconclusive rather than false.
    """
    if side not in ("+", "-"):
        raise ValueError("side must be '+' or '-'")
    pg.check_vertex(s)
    path = pg.verts[s]
    targets = pg.edges_into[s] if side == "+" else pg.edges_out_of[s]
    if len(targets) <= 1:
        return TransitivityResult(True, True, len(targets), len(targets), 0)

    stabilizer = [g for g in enumerate_unit_lifts(emb.p, modulus_exp)
                  if fixes_path_pointwise(g, emb, path)]
    edge_index = {e: i for i, e in enumerate(pg.edges)}
    base = targets[0]
    orbit = set()
    for g in stabilizer:
        perm = emb.automorphism_from(g)
        image_seq = tuple(perm(v) for v in pg.edges[base])
        image = edge_index.get(image_seq)
        if image is not None:
            orbit.add(image)
    covered = set(targets) <= orbit
    return TransitivityResult(covered, covered, len(orbit), len(targets), len(stabilizer))

