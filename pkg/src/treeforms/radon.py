"""Geodesic Radon transform on 1-cochains of a path graph.

An oriented apartment of the ball is an oriented leaf-to-leaf geodesic;
its induced edges at level k are the length-(k+2) windows of the
geodesic read in orientation order.  The transform sums a 1-cochain
over the induced edges of each apartment.

Truncation note: on the infinite tree the transform kills exactly the
coboundaries.  At finite level that statement survives on cochains kept
away from the truncation boundary, which is what the interior margin
controls: an edge is interior when every vertex of its convex hull is
at tree distance >= margin from every leaf, and a vertex of the path
graph is interior when its hull keeps distance >= margin + 1.  With
this pairing d maps interior 0-cochains into interior-supported
1-cochains killed by the transform, and the exactness check measures
whether the converse inclusion holds.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from fractions import Fraction

from . import _linalg
from .cochains import Cochain, coboundary
from .tower import PathGraph, UnionFind
from .tree import GeodesicSegment, convex_hull

ZERO = Fraction(0)
ONE = Fraction(1)


class MarginError(ValueError):
    """The truncation margin is too small (or too large) for the request."""


class PathDependenceError(ValueError):
    """Primitive construction met a loop with nonzero integral."""

    def __init__(self, message: str, loop: "WalkWithSigns"):
        super().__init__(message)
        self.loop = loop


@dataclass(frozen=True)
class OrientedApartment:
    """Oriented leaf-to-leaf geodesic with its induced level-k edges."""

    id: int
    base: tuple[int, ...]
    edges: tuple[int, ...]

    @property
    def leaf_from(self) -> int:
        return self.base[0]

    @property
    def leaf_to(self) -> int:
        return self.base[-1]


class ApartmentFamily:
    """All oriented apartments of a path graph, with an edge index."""

    def __init__(self, pg: PathGraph, apartments: list[OrientedApartment]):
        self.pg = pg
        self.apartments = apartments
        through: dict[int, list[int]] = {}
        for ap in apartments:
            for a in ap.edges:
                through.setdefault(a, []).append(ap.id)
        self._through = through

    def __len__(self) -> int:
        return len(self.apartments)

    def __iter__(self):
        return iter(self.apartments)

    def through(self, a: int) -> list[int]:
        """Ids of the apartments whose induced edge list contains a."""
        self.pg.check_edge(a)
        return list(self._through.get(a, []))

    def to_manifest_json(self) -> str:
        payload = [
            {
                "id": ap.id,
                "leaf_from": ap.leaf_from,
                "leaf_to": ap.leaf_to,
                "induced_edges": list(ap.edges),
            }
            for ap in self.apartments
        ]
        return json.dumps(payload, sort_keys=True) + "\n"


def induced_apartments(pg: PathGraph, diameters: list[GeodesicSegment]) -> ApartmentFamily:
    """One apartment per diameter that is long enough to carry a window."""
    k = pg.k
    edge_index = {e: i for i, e in enumerate(pg.edges)}
    apartments = []
    for seg in diameters:
        seq = seg.vertices
        nwin = len(seq) - (k + 2) + 1
        if nwin <= 0:
            continue
        windows = tuple(edge_index[seq[i:i + k + 2]] for i in range(nwin))
        apartments.append(OrientedApartment(len(apartments), seq, windows))
    return ApartmentFamily(pg, apartments)


def apartments_through(aps: ApartmentFamily, a: int) -> list[OrientedApartment]:
    return [aps.apartments[i] for i in aps.through(a)]


def radon_transform(pg: PathGraph, aps: ApartmentFamily, omega: Cochain) -> dict[int, Fraction]:
    """Value at each apartment = exact sum of the cochain over its edges."""
    if omega.level != 1:
        raise ValueError("the transform applies to 1-cochains")
    out: dict[int, Fraction] = {}
    for a, x in omega.data.items():
        for i in aps.through(a):
            out[i] = out.get(i, ZERO) + x
    return {i: v for i, v in out.items() if v}


def radon_image_csv(image: dict[int, Fraction]) -> str:
    lines = ["apartment_id,numerator,denominator"]
    for i in sorted(image):
        v = image[i]
        lines.append(f"{i},{v.numerator},{v.denominator}")
    return "\n".join(lines) + "\n"


# -- interior (truncation margin) --------------------------------------


def _hull_margin(pg: PathGraph, seq: tuple[int, ...]) -> int:
    """Tree distance from the hull of a path to the leaf set.

    The hull of a path is its own vertex set; in a full truncation the
    distance from a vertex to the nearest leaf is radius - depth.
    """
    radius = pg.ball.params.radius
    return radius - max(pg.ball.depths[v] for v in seq)


def interior_edges(pg: PathGraph, margin: int) -> list[int]:
    if margin < 0:
        raise ValueError("margin must be >= 0")
    return [a for a, e in enumerate(pg.edges) if _hull_margin(pg, e) >= margin]


def interior_vertices(pg: PathGraph, margin: int) -> list[int]:
    """Vertices one step deeper than interior edges, so that coboundaries
    of interior 0-cochains stay supported on interior edges."""
    if margin < 0:
        raise ValueError("margin must be >= 0")
    return [s for s, p in enumerate(pg.verts) if _hull_margin(pg, p) >= margin + 1]


def _kernel_rows(pg: PathGraph, aps: ApartmentFamily, interior: list[int]):
    """Deduplicated constraint rows of the transform on interior columns."""
    col = {a: j for j, a in enumerate(interior)}
    seen = set()
    rows = []
    for ap in aps:
        row = {}
        for a in ap.edges:
            j = col.get(a)
            if j is not None:
                row[j] = row.get(j, ZERO) + ONE
        row = {j: v for j, v in row.items() if v}
        if row:
            key = tuple(sorted((j, v) for j, v in row.items()))
            if key not in seen:
                seen.add(key)
                rows.append(row)
    return rows


def radon_kernel_interior(pg: PathGraph, aps: ApartmentFamily, margin: int) -> list[Cochain]:
    """Exact basis of the interior-supported kernel of the transform."""
    interior = interior_edges(pg, margin)
    if not interior:
        raise MarginError(f"no interior edges at margin {margin}")
    rows = _kernel_rows(pg, aps, interior)
    basis = _linalg.nullspace(rows, len(interior))
    return [Cochain(1, {interior[j]: v for j, v in vec.items()}) for vec in basis]


@dataclass(frozen=True)
class ExactnessReport:
    q: int
    radius: int
    k: int
    margin: int
    kernel_dim: int
    image_dim: int
    equal: bool
    interior_edge_count: int
    interior_vertex_count: int

    def to_json(self) -> str:
        payload = {
            "q": self.q,
            "R": self.radius,
            "k": self.k,
            "margin": self.margin,
            "kernel_dim": self.kernel_dim,
            "image_dim": self.image_dim,
            "equal": self.equal,
        }
        return json.dumps(payload, sort_keys=True) + "\n"


def exactness_check(pg: PathGraph, aps: ApartmentFamily, margin: int) -> ExactnessReport:
    """Compare ker(transform) on interior cochains with d of interior
    0-cochains, as subspaces, by exact rank of the stacked system.

    An empty interior makes both spaces trivial and the report says so
    (kernel_dim = image_dim = 0, equal); it is not an error, since the
    margin rule is probed across whole parameter grids.
    """
    interior = interior_edges(pg, margin)
    int_verts = interior_vertices(pg, margin)
    interior_set = set(interior)

    if not interior:
        return ExactnessReport(pg.ball.params.q, pg.ball.params.radius, pg.k,
                               margin, 0, 0, True, 0, len(int_verts))

    rows = _kernel_rows(pg, aps, interior)
    kernel_dim = len(interior) - _linalg.rank_of_rows(rows)

    image_vectors = []
    contained = True
    for s in int_verts:
        df = coboundary(pg, Cochain.indicator(0, s))
        if any(a not in interior_set for a in df.support):
            contained = False
            break
        image_vectors.append(df.data)
    if not contained:
        return ExactnessReport(pg.ball.params.q, pg.ball.params.radius, pg.k,
                               margin, kernel_dim, -1, False,
                               len(interior), len(int_verts))

    image_dim = _linalg.rank_of_rows(image_vectors)
    equal = kernel_dim == image_dim
    if equal and kernel_dim:
        # Containment of the image in the kernel, verified by stacking.
        kernel_basis = _linalg.nullspace(rows, len(interior))
        col = {a: j for j, a in enumerate(interior)}
        reindexed = [{col[a]: v for a, v in vec.items()} for vec in image_vectors]
        stacked = _linalg.rank_of_rows(kernel_basis + reindexed)
        equal = stacked == kernel_dim
    return ExactnessReport(pg.ball.params.q, pg.ball.params.radius, pg.k,
                           margin, kernel_dim, image_dim, equal,
                           len(interior), len(int_verts))


def minimal_exact_margin(pg: PathGraph, aps: ApartmentFamily, upto: int) -> int | None:
    """Smallest margin in 0..upto at which the exactness check passes."""
    for m in range(upto + 1):
        if exactness_check(pg, aps, m).equal:
            return m
    return None


# -- path integrals ----------------------------------------------------


@dataclass(frozen=True)
class WalkWithSigns:
    """Edge walk with its vertex itinerary and incidence signs.

    sign +1 at step u means the edge is traversed tail-to-head
    (tail = x_u, head = x_{u+1}); -1 means head-to-tail.
    """

    edges: tuple[int, ...]
    vertices: tuple[int, ...]
    signs: tuple[int, ...]

    @classmethod
    def from_itinerary(cls, pg: PathGraph, edges, vertices) -> "WalkWithSigns":
        edges = tuple(edges)
        vertices = tuple(vertices)
        if len(vertices) != len(edges) + 1:
            raise ValueError("itinerary must have one more vertex than edges")
        signs = []
        for u, a in enumerate(edges):
            pg.check_edge(a)
            h, t = pg.head[a], pg.tail[a]
            if (t, h) == (vertices[u], vertices[u + 1]):
                signs.append(1)
            elif (h, t) == (vertices[u], vertices[u + 1]):
                signs.append(-1)
            else:
                raise ValueError(f"edge {a} does not join step {u} of the walk")
        return cls(edges, vertices, tuple(signs))

    def is_loop(self) -> bool:
        return len(self.vertices) > 1 and self.vertices[0] == self.vertices[-1]


def path_integral(omega: Cochain, walk: WalkWithSigns) -> Fraction:
    """Signed sum of the cochain along the walk."""
    if omega.level != 1:
        raise ValueError("path integrals apply to 1-cochains")
    total = ZERO
    for a, sign in zip(walk.edges, walk.signs):
        v = omega.data.get(a)
        if v:
            total += v if sign > 0 else -v
    return total


def fundamental_loops(pg: PathGraph, edge_ids: list[int]) -> list[WalkWithSigns]:
    """Cycle-basis loops of the subgraph spanned by the given edges.

    One loop per non-forest edge: the edge followed by the forest path
    back from its head to its tail.
    """
    verts = sorted({pg.head[a] for a in edge_ids} | {pg.tail[a] for a in edge_ids})
    up: dict[int, tuple[int, int]] = {}
    seen = set()
    adj: dict[int, list[tuple[int, int]]] = {v: [] for v in verts}
    for a in sorted(edge_ids):
        adj[pg.tail[a]].append((a, pg.head[a]))
        adj[pg.head[a]].append((a, pg.tail[a]))
    in_forest = set()
    for root in verts:
        if root in seen:
            continue
        seen.add(root)
        queue = [root]
        qi = 0
        while qi < len(queue):
            s = queue[qi]
            qi += 1
            for a, t in adj[s]:
                if t not in seen:
                    seen.add(t)
                    in_forest.add(a)
                    up[t] = (s, a)
                    queue.append(t)

    def climb(s: int) -> list[tuple[int, int, int]]:
        steps = []
        while s in up:
            parent, a = up[s]
            steps.append((a, s, parent))
            s = parent
        return steps

    loops = []
    for a in sorted(edge_ids):
        if a in in_forest:
            continue
        t, h = pg.tail[a], pg.head[a]
        up_h, up_t = climb(h), climb(t)
        while up_h and up_t and up_h[-1][0] == up_t[-1][0]:
            up_h.pop()
            up_t.pop()
        edges = [a] + [e for e, _, _ in up_h] + [e for e, _, _ in reversed(up_t)]
        vertices = [t, h] + [to for _, _, to in up_h] + [frm for _, frm, _ in reversed(up_t)]
        loops.append(WalkWithSigns.from_itinerary(pg, edges, vertices))
    return loops


def random_loops(pg: PathGraph, edge_ids: list[int], count: int, seed: int,
                 max_steps: int = 60) -> list[WalkWithSigns]:
    """Seeded closed walks inside the subgraph spanned by the given edges."""
    rng = random.Random(seed)
    adj: dict[int, list[tuple[int, int]]] = {}
    for a in sorted(edge_ids):
        adj.setdefault(pg.tail[a], []).append((a, pg.head[a]))
        adj.setdefault(pg.head[a], []).append((a, pg.tail[a]))
    starts = sorted(adj)
    loops: list[WalkWithSigns] = []
    attempts = 0
    while len(loops) < count and attempts < count * 50:
        attempts += 1
        start = rng.choice(starts)
        vertices = [start]
        edges: list[int] = []
        for _ in range(max_steps):
            options = adj[vertices[-1]]
            a, nxt = options[rng.randrange(len(options))]
            edges.append(a)
            vertices.append(nxt)
            if nxt == start:
                break
        if len(vertices) > 1 and vertices[-1] == start:
            loops.append(WalkWithSigns.from_itinerary(pg, edges, vertices))
    return loops


# -- primitives ---------------------------------------------------------


def enlarged_support(pg: PathGraph, omega: Cochain) -> set[int]:
    """Path-graph vertices whose hull meets the support region of omega.

    The support region is the ball X(t, delta) around the center t of the
    convex hull of the supports of omega's edges, with delta its radius.
    """
    if omega.is_zero():
        return set()
    ball = pg.ball
    tree_vertices = set()
    for a in omega.support:
        tree_vertices.update(pg.edges[a])
    hull = convex_hull(ball, tree_vertices)
    hull_list = sorted(hull)
    # Tree center of the hull: minimize eccentricity within the hull.
    best_t, best_ecc = None, None
    for t in hull_list:
        ecc = max(ball.distance(t, v) for v in hull_list)
        if best_ecc is None or ecc < best_ecc:
            best_t, best_ecc = t, ecc
    region = {v for v in range(ball.num_vertices) if ball.distance(best_t, v) <= best_ecc}
    out = set()
    for s, p in enumerate(pg.verts):
        if any(v in region for v in p):
            out.add(s)
    return out


def primitive(pg: PathGraph, aps: ApartmentFamily, omega: Cochain, base: int) -> Cochain:
    """Integrate a transform-kernel cochain to f with df = omega.

    f is built along a breadth-first spanning forest from the base (and
    from canonical bases in other components meeting the support); every
    non-forest edge is then verified, so a cochain outside the kernel is
    reported through the offending loop rather than silently integrated.
    The result vanishes outside the enlarged support region.
    """
    if omega.level != 1:
        raise ValueError("primitive applies to 1-cochains")
    pg.check_vertex(base)
    enlarged = enlarged_support(pg, omega)
    if base in enlarged:
        raise MarginError("base vertex lies inside the enlarged support region")

    uf = UnionFind(pg.num_vertices)
    for h, t in zip(pg.head, pg.tail):
        uf.union(h, t)
    comp_of = [uf.find(s) for s in range(pg.num_vertices)]

    roots = {comp_of[base]: base}
    for a in omega.support:
        comp = comp_of[pg.tail[a]]
        if comp in roots:
            continue
        candidates = [s for s in range(pg.num_vertices)
                      if comp_of[s] == comp and s not in enlarged]
        if not candidates:
            raise MarginError(
                "a component of the support has no vertex outside the enlarged region")
        roots[comp] = min(candidates)

    values: dict[int, Fraction] = {}
    up: dict[int, tuple[int, int]] = {}  # integration forest: vertex -> (parent, edge)
    visited_comps = set()
    for comp, root in sorted(roots.items()):
        visited_comps.add(comp)
        values[root] = ZERO
        queue = [root]
        qi = 0
        while qi < len(queue):
            s = queue[qi]
            qi += 1
            for a in pg.edges_out_of[s]:
                t = pg.head[a]
                if t not in values:
                    values[t] = values[s] + omega.data.get(a, ZERO)
                    up[t] = (s, a)
                    queue.append(t)
            for a in pg.edges_into[s]:
                t = pg.tail[a]
                if t not in values:
                    values[t] = values[s] - omega.data.get(a, ZERO)
                    up[t] = (s, a)
                    queue.append(t)

    # Verify df = omega on every edge of the integrated components; a
    # mismatch exhibits a loop with nonzero integral (the edge plus the
    # integration-forest path back, along which df = omega by construction).
    for a in range(pg.num_edges):
        h, t = pg.head[a], pg.tail[a]
        if comp_of[t] not in visited_comps:
            if omega.data.get(a):
                raise MarginError("support meets a component with no base vertex")
            continue
        got = values[h] - values[t]
        want = omega.data.get(a, ZERO)
        if got != want:
            loop = _forest_loop(pg, up, a)
            raise PathDependenceError(
                f"edge {a}: df = {got} but cochain value is {want}; "
                "the cochain is not in the transform kernel", loop)

    f = Cochain(0, values)
    for s in f.support:
        if s not in enlarged:
            raise MarginError(
                f"primitive does not vanish at vertex {s} outside the enlarged region; "
                "margin too small for this support")
    return f


def _forest_loop(pg: PathGraph, up: dict[int, tuple[int, int]], a: int) -> WalkWithSigns:
    """Edge a plus the integration-forest path from its head back to its tail."""
    t, h = pg.tail[a], pg.head[a]

    def climb(s: int) -> list[tuple[int, int, int]]:
        steps = []
        while s in up:
            parent, e = up[s]
            steps.append((e, s, parent))
            s = parent
        return steps

    up_h, up_t = climb(h), climb(t)
    while up_h and up_t and up_h[-1][0] == up_t[-1][0]:
        up_h.pop()
        up_t.pop()
    edges = [a] + [e for e, _, _ in up_h] + [e for e, _, _ in reversed(up_t)]
    vertices = [t, h] + [to for _, _, to in up_h] + [frm for _, frm, _ in reversed(up_t)]
    return WalkWithSigns.from_itinerary(pg, edges, vertices)


# -- span of characteristic functions -----------------------------------


def span_check(pgs: list[PathGraph], diameters: list[GeodesicSegment]) -> bool:
    """Do the apartment-set characteristic functions of all edges up to the
    given levels span all functions on the oriented-diameter set?"""
    ndiam = len(diameters)
    key_to_index = {seg.vertices: i for i, seg in enumerate(diameters)}
    elim = _linalg.Eliminator()
    rank = 0
    for pg in pgs:
        aps = induced_apartments(pg, diameters)
        diam_ids = [key_to_index[ap.base] for ap in aps]
        rows_by_edge: dict[int, dict[int, Fraction]] = {}
        for ap, di in zip(aps, diam_ids):
            for a in ap.edges:
                rows_by_edge.setdefault(a, {})[di] = ONE
        for a in sorted(rows_by_edge):
            if elim.insert(rows_by_edge[a]):
                rank += 1
                if rank == ndiam:
                    return True
    return rank == ndiam
