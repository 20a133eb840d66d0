"""The directed graph of k-paths over a tree ball.

A k-path is an injective sequence of k+1 ball vertices with consecutive
entries adjacent; in a tree this is the same as an oriented geodesic of
length k.  The level-k graph has k-paths as vertices and (k+1)-paths as
edges; the head of an edge drops its first tree vertex, the tail drops
its last.  At level 0 this is the ball with every edge doubled into two
directed edges.

Near the truncation boundary paths have fewer continuations than in the
infinite tree, so connectivity of a level graph is measured (see
``components``), never assumed.
"""

from __future__ import annotations

import json

from .tree import BallAutomorphism, GeodesicSegment, TreeBall


class PathGraph:
    """Level-k path graph over a ball.  Immutable after construction.

    Vertices and edges are ordered lexicographically by their tree-vertex
    id sequences, so ids are deterministic for a given ball and level.
    """

    def __init__(self, ball: TreeBall, k: int):
        if k < 0:
            raise ValueError(f"level k must be >= 0, got {k}")
        self.ball = ball
        self.k = k
        self.verts = _enumerate_paths(ball, k + 1)
        self.edges = _enumerate_paths(ball, k + 2)
        self.vert_index = {p: i for i, p in enumerate(self.verts)}
        self.head = [self.vert_index[e[1:]] for e in self.edges]
        self.tail = [self.vert_index[e[:-1]] for e in self.edges]
        # A_s^+ = edges with head s, A_s^- = edges with tail s.
        into: list[list[int]] = [[] for _ in self.verts]
        outof: list[list[int]] = [[] for _ in self.verts]
        for a, (h, t) in enumerate(zip(self.head, self.tail)):
            into[h].append(a)
            outof[t].append(a)
        self.edges_into = into
        self.edges_out_of = outof

    @property
    def num_vertices(self) -> int:
        return len(self.verts)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def check_vertex(self, s: int) -> None:
        if not (0 <= s < len(self.verts)):
            raise ValueError(f"unknown path-graph vertex id {s}")

    def check_edge(self, a: int) -> None:
        if not (0 <= a < len(self.edges)):
            raise ValueError(f"unknown path-graph edge id {a}")

    def to_json_dict(self) -> dict:
        return {
            "k": self.k,
            "vertices": [list(p) for p in self.verts],
            "edges": [
                {"seq": list(e), "head": self.head[a], "tail": self.tail[a]}
                for a, e in enumerate(self.edges)
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True) + "\n"

    def to_dot(self) -> str:
        lines = [f"digraph level{self.k} {{"]
        for a in range(len(self.edges)):
            lines.append(f"  {self.tail[a]} -> {self.head[a]};")
        lines.append("}")
        return "\n".join(lines) + "\n"


def _enumerate_paths(ball: TreeBall, nverts: int) -> list[tuple[int, ...]]:
    """All injective paths with `nverts` vertices, lexicographically ordered.

    In a tree a walk is injective iff it never immediately backtracks, so
    the enumeration extends each path by neighbors of its endpoint other
    than the previous vertex.
    """
    if nverts == 1:
        return [(v,) for v in range(ball.num_vertices)]
    paths: list[tuple[int, ...]] = []
    for start in range(ball.num_vertices):
        stack = [(start, w) for w in reversed(ball.adjacency[start])]
        while stack:
            path = stack.pop()
            if len(path) == nverts:
                paths.append(path)
                continue
            prev, last = path[-2], path[-1]
            for w in reversed(ball.adjacency[last]):
                if w != prev:
                    stack.append(path + (w,))
    return paths


def build_path_graph(ball: TreeBall, k: int) -> PathGraph:
    return PathGraph(ball, k)


def incidence(pg: PathGraph, a: int, s: int) -> int:
    """[a:s] = +1 if s is the head of a, -1 if the tail, 0 otherwise."""
    pg.check_edge(a)
    pg.check_vertex(s)
    if pg.head[a] == s:
        return 1
    if pg.tail[a] == s:
        return -1
    return 0


def edges_with_head(pg: PathGraph, s: int) -> list[int]:
    """A_s^+: edges a with a's head equal to s."""
    pg.check_vertex(s)
    return list(pg.edges_into[s])


def edges_with_tail(pg: PathGraph, s: int) -> list[int]:
    """A_s^-: edges a with a's tail equal to s."""
    pg.check_vertex(s)
    return list(pg.edges_out_of[s])


def apply_automorphism(pg: PathGraph, g: BallAutomorphism) -> tuple[list[int], list[int]]:
    """Entrywise action on paths: returns (vertex map, edge map).

    Raises if g is not an automorphism of the underlying ball (enforced by
    BallAutomorphism) or maps some path outside the graph, which cannot
    happen for a genuine automorphism.
    """
    if g.ball is not pg.ball:
        raise ValueError("automorphism belongs to a different ball")
    edge_index = {e: i for i, e in enumerate(pg.edges)}
    vmap = [pg.vert_index[tuple(g.perm[v] for v in p)] for p in pg.verts]
    emap = [edge_index[tuple(g.perm[v] for v in e)] for e in pg.edges]
    return vmap, emap


class UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, x: int, y: int) -> None:
        rx, ry = self.find(x), self.find(y)
        if rx != ry:
            self.parent[max(rx, ry)] = min(rx, ry)


def components(pg: PathGraph) -> list[list[int]]:
    """Connected components of the underlying undirected graph."""
    uf = UnionFind(pg.num_vertices)
    for h, t in zip(pg.head, pg.tail):
        uf.union(h, t)
    groups: dict[int, list[int]] = {}
    for s in range(pg.num_vertices):
        groups.setdefault(uf.find(s), []).append(s)
    return [groups[r] for r in sorted(groups)]


def num_components(pg: PathGraph) -> int:
    return len(components(pg))


def monotone_path_check(pg: PathGraph, walk: list[int]) -> GeodesicSegment:
    """Certify a constant-sign edge walk and return its supporting geodesic.

    A walk a_0, ..., a_{l-1} is monotone when consecutive edges chain
    head-to-tail (all incidence signs +1) or tail-to-head (all -1); the
    underlying tree windows then slide along a single geodesic, which is
    returned.  At level 0 an edge followed by its reversal also has
    constant sign but folds back on itself; that degenerate case is
    rejected along with genuine sign changes.
    """
    if not walk:
        raise ValueError("empty walk")
    for a in walk:
        pg.check_edge(a)
    if len(walk) == 1:
        return GeodesicSegment(pg.edges[walk[0]])

    first, second = pg.edges[walk[0]], pg.edges[walk[1]]
    if second[:-1] == first[1:]:
        forward = True
    elif second[1:] == first[:-1]:
        forward = False
    else:
        raise ValueError("incidence signs are not constant along the walk")

    for prev, cur in zip(walk, walk[1:]):
        e_prev, e_cur = pg.edges[prev], pg.edges[cur]
        if forward and e_cur[:-1] != e_prev[1:]:
            raise ValueError("incidence signs are not constant along the walk")
        if not forward and e_cur[1:] != e_prev[:-1]:
            raise ValueError("incidence signs are not constant along the walk")
    if forward:
        # Each edge extends the previous window by one vertex at the end.
        seq = list(pg.edges[walk[0]]) + [pg.edges[a][-1] for a in walk[1:]]
    else:
        # Windows slide toward the start; read them from the last edge back.
        seq = list(pg.edges[walk[-1]]) + [pg.edges[a][-1] for a in reversed(walk[:-1])]
    if len(set(seq)) != len(seq):
        raise ValueError("walk folds back on itself (level-0 reversal)")
    return GeodesicSegment(tuple(seq))
