"""Finite balls in the (q+1)-homogeneous tree.

A ball of radius R around a root vertex is the full truncation of the
infinite (q+1)-regular tree: the root has q+1 children, every other
internal vertex has q children, and every vertex at depth R is a leaf
of the truncation (not a leaf of the infinite tree).

Vertices are numbered breadth-first, with siblings ordered by branch
label, so construction is reproducible byte-for-byte.  Addresses are
tuples of branch labels from the root: the first step is in 0..q, all
later steps in 0..q-1.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass


@dataclass(frozen=True)
class TreeParams:
    """Residue cardinality q (branching degree q+1) and truncation radius."""

    q: int
    radius: int

    def __post_init__(self) -> None:
        if self.q < 2:
            raise ValueError(f"q must be >= 2, got {self.q}")
        if self.radius < 1:
            raise ValueError(f"radius must be >= 1, got {self.radius}")


@dataclass(frozen=True)
class TreeVertex:
    id: int
    address: tuple[int, ...]

    @property
    def depth(self) -> int:
        return len(self.address)


@dataclass(frozen=True)
class GeodesicSegment:
    """Injective path of vertex ids; consecutive entries are adjacent."""

    vertices: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.vertices)

    @property
    def length(self) -> int:
        """Number of edges."""
        return len(self.vertices) - 1

    def reversed(self) -> "GeodesicSegment":
        return GeodesicSegment(tuple(reversed(self.vertices)))


class TreeBall:
    """Radius-R truncation of the (q+1)-homogeneous tree.

    Immutable after construction; all queries are pure functions.
    """

    def __init__(self, params: TreeParams):
        self.params = params
        q, radius = params.q, params.radius

        vertices: list[TreeVertex] = [TreeVertex(0, ())]
        parent: list[int] = [-1]
        by_address: dict[tuple[int, ...], int] = {(): 0}
        frontier = [0]
        for depth in range(radius):
            nxt: list[int] = []
            labels = range(q + 1) if depth == 0 else range(q)
            for v in frontier:
                addr = vertices[v].address
                for lab in labels:
                    vid = len(vertices)
                    child = TreeVertex(vid, addr + (lab,))
                    vertices.append(child)
                    parent.append(v)
                    by_address[child.address] = vid
                    nxt.append(vid)
            frontier = nxt

        self.vertices = vertices
        self.parent = parent
        self._by_address = by_address
        self.depths = [v.depth for v in vertices]
        self.edges = [(parent[v], v) if parent[v] < v else (v, parent[v])
                      for v in range(1, len(vertices))]
        self.edges.sort()
        self.leaves = [v for v in range(len(vertices)) if self.depths[v] == radius]

        adj: list[list[int]] = [[] for _ in vertices]
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        self.adjacency = [sorted(ns) for ns in adj]

        expected = 1 + (q + 1) * (q ** radius - 1) // (q - 1)
        assert len(vertices) == expected
        assert len(self.edges) == len(vertices) - 1

    # -- basic queries -------------------------------------------------

    @property
    def num_vertices(self) -> int:
        return len(self.vertices)

    def is_leaf(self, v: int) -> bool:
        return self.depths[v] == self.params.radius

    def check_vertex(self, v: int) -> None:
        if not (0 <= v < len(self.vertices)):
            raise ValueError(f"unknown vertex id {v}")

    def vertex_by_address(self, address: tuple[int, ...]) -> int:
        return self._by_address[address]

    def meet(self, u: int, v: int) -> int:
        """Deepest common ancestor (the median of u, v and the root)."""
        a, b = self.vertices[u].address, self.vertices[v].address
        k = 0
        while k < len(a) and k < len(b) and a[k] == b[k]:
            k += 1
        return self._by_address[a[:k]]

    def distance(self, u: int, v: int) -> int:
        m = self.meet(u, v)
        return self.depths[u] + self.depths[v] - 2 * self.depths[m]

    def to_json_dict(self) -> dict:
        return {
            "q": self.params.q,
            "radius": self.params.radius,
            "vertices": [{"id": v.id, "address": list(v.address)} for v in self.vertices],
            "edges": [[u, v] for u, v in self.edges],
            "leaves": list(self.leaves),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True) + "\n"

    def to_dot(self) -> str:
        lines = ["graph ball {"]
        for u, v in self.edges:
            lines.append(f"  {u} -- {v};")
        lines.append("}")
        return "\n".join(lines) + "\n"


def build_ball(params: TreeParams) -> TreeBall:
    """Build the radius-R ball; deterministic breadth-first numbering."""
    return TreeBall(params)


def geodesic_between(ball: TreeBall, u: int, v: int) -> GeodesicSegment:
    """The unique injective path from u to v."""
    ball.check_vertex(u)
    ball.check_vertex(v)
    m = ball.meet(u, v)
    up = []
    w = u
    while w != m:
        up.append(w)
        w = ball.parent[w]
    down = []
    w = v
    while w != m:
        down.append(w)
        w = ball.parent[w]
    return GeodesicSegment(tuple(up) + (m,) + tuple(reversed(down)))


def enumerate_oriented_diameters(ball: TreeBall) -> list[GeodesicSegment]:
    """All oriented leaf-to-leaf geodesics, ordered by (from, to) leaf ids.

    These are the visible windows of the oriented apartments of the
    infinite tree; every ordered pair of distinct leaves contributes one.
    """
    out = []
    for u in ball.leaves:
        for v in ball.leaves:
            if u != v:
                out.append(geodesic_between(ball, u, v))
    return out


def convex_hull(ball: TreeBall, vertex_ids) -> set[int]:
    """Minimal subtree containing the given vertices (union of pairwise geodesics)."""
    vs = sorted(set(vertex_ids))
    if not vs:
        raise ValueError("convex hull of an empty set")
    hull: set[int] = {vs[0]}
    for i, u in enumerate(vs):
        for v in vs[i + 1:]:
            hull.update(geodesic_between(ball, u, v).vertices)
    return hull


class BallAutomorphism:
    """Graph automorphism of a ball, stored as a vertex permutation."""

    def __init__(self, ball: TreeBall, perm):
        perm = tuple(perm)
        if sorted(perm) != list(range(ball.num_vertices)):
            raise ValueError("not a permutation of the vertex ids")
        edge_set = set(ball.edges)
        for u, v in ball.edges:
            iu, iv = perm[u], perm[v]
            if (min(iu, iv), max(iu, iv)) not in edge_set:
                raise ValueError("permutation does not preserve the edge set")
        self.ball = ball
        self.perm = perm

    def __call__(self, v: int) -> int:
        return self.perm[v]

    def inverse(self) -> "BallAutomorphism":
        inv = [0] * len(self.perm)
        for i, j in enumerate(self.perm):
            inv[j] = i
        return BallAutomorphism(self.ball, inv)

    def compose(self, other: "BallAutomorphism") -> "BallAutomorphism":
        """self after other: (self.compose(other))(v) = self(other(v))."""
        return BallAutomorphism(self.ball, tuple(self.perm[other.perm[v]] for v in range(len(self.perm))))

    @classmethod
    def identity(cls, ball: TreeBall) -> "BallAutomorphism":
        return cls(ball, range(ball.num_vertices))


def random_automorphism(ball: TreeBall, seed: int) -> BallAutomorphism:
    """Seeded automorphism built by recursively shuffling child subtrees.

    Every output preserves the edge set and the leaf set by construction.
    """
    rng = random.Random(seed)
    q, radius = ball.params.q, ball.params.radius
    perm = [0] * ball.num_vertices
    # BFS pairs (original vertex, image vertex); children permuted per vertex.
    stack = [(0, 0)]
    while stack:
        orig, image = stack.pop()
        perm[orig] = image
        depth = ball.depths[orig]
        if depth == radius:
            continue
        labels = list(range(q + 1) if depth == 0 else range(q))
        shuffled = labels[:]
        rng.shuffle(shuffled)
        oaddr = ball.vertices[orig].address
        iaddr = ball.vertices[image].address
        for lab, ilab in zip(labels, shuffled):
            child = ball.vertex_by_address(oaddr + (lab,))
            ichild = ball.vertex_by_address(iaddr + (ilab,))
            stack.append((child, ichild))
    return BallAutomorphism(ball, perm)
