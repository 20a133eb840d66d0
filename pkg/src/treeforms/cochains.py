"""Cochains with exact rational coefficients on a path graph.

All operators here (coboundary, its adjoint, the pairing) have integer
matrices, so exact rationals carry the full content of the complex-
coefficient theory at finite level; there is no floating-point mode.
On a finite graph every cochain has finite support and every form is
smooth, so the smooth/arbitrary-support distinction collapses.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

from . import _linalg
from .tower import PathGraph, num_components

ZERO = Fraction(0)
ONE = Fraction(1)


@dataclass(frozen=True)
class Cochain:
    """Finitely supported map from vertex (level 0) or edge (level 1) ids.

    Zero values are never stored; two cochains compare equal iff their
    levels and supports agree.
    """

    level: int
    data: dict[int, Fraction] = field(default_factory=dict)

    def __post_init__(self):
        if self.level not in (0, 1):
            raise ValueError(f"cochain level must be 0 or 1, got {self.level}")
        cleaned = {i: Fraction(x) for i, x in self.data.items() if x}
        object.__setattr__(self, "data", cleaned)

    @classmethod
    def zero(cls, level: int) -> "Cochain":
        return cls(level, {})

    @classmethod
    def indicator(cls, level: int, idx: int) -> "Cochain":
        return cls(level, {idx: ONE})

    def __call__(self, idx: int) -> Fraction:
        return self.data.get(idx, ZERO)

    def __add__(self, other: "Cochain") -> "Cochain":
        if self.level != other.level:
            raise ValueError("cochain level mismatch")
        out = dict(self.data)
        for i, x in other.data.items():
            out[i] = out.get(i, ZERO) + x
        return Cochain(self.level, out)

    def __sub__(self, other: "Cochain") -> "Cochain":
        return self + other.scale(-ONE)

    def scale(self, c) -> "Cochain":
        c = Fraction(c)
        return Cochain(self.level, {i: c * x for i, x in self.data.items()})

    def __eq__(self, other) -> bool:
        return (isinstance(other, Cochain) and self.level == other.level
                and self.data == other.data)

    def __hash__(self):
        return hash((self.level, frozenset(self.data.items())))

    @property
    def support(self):
        return self.data.keys()

    def is_zero(self) -> bool:
        return not self.data

    def permuted(self, perm: list[int]) -> "Cochain":
        """Push forward along an id permutation: (g.f)(perm[i]) = f(i)."""
        return Cochain(self.level, {perm[i]: x for i, x in self.data.items()})


def _check_support(pg: PathGraph, c: Cochain) -> None:
    n = pg.num_vertices if c.level == 0 else pg.num_edges
    for i in c.support:
        if not (0 <= i < n):
            raise ValueError(f"cochain support {i} outside the path graph")


def coboundary(pg: PathGraph, f: Cochain) -> Cochain:
    """df(a) = f(head a) - f(tail a)."""
    if f.level != 0:
        raise ValueError("coboundary applies to 0-cochains")
    _check_support(pg, f)
    out: dict[int, Fraction] = {}
    for s, x in f.data.items():
        for a in pg.edges_into[s]:
            out[a] = out.get(a, ZERO) + x
        for a in pg.edges_out_of[s]:
            out[a] = out.get(a, ZERO) - x
    return Cochain(1, out)


def adjoint(pg: PathGraph, omega: Cochain) -> Cochain:
    """d*w(s) = sum over edges a incident to s of [a:s] w(a)."""
    if omega.level != 1:
        raise ValueError("adjoint applies to 1-cochains")
    _check_support(pg, omega)
    out: dict[int, Fraction] = {}
    for a, x in omega.data.items():
        h, t = pg.head[a], pg.tail[a]
        out[h] = out.get(h, ZERO) + x
        out[t] = out.get(t, ZERO) - x
    return Cochain(0, out)


def pairing(x: Cochain, y: Cochain) -> Fraction:
    """<x, y> = sum over the common support of x(i) y(i)."""
    if x.level != y.level:
        raise ValueError("pairing requires cochains of the same level")
    small, large = (x.data, y.data) if len(x.data) <= len(y.data) else (y.data, x.data)
    return sum((v * large[i] for i, v in small.items() if i in large), ZERO)


def l2_norm_squared(omega: Cochain) -> Fraction:
    return pairing(omega, omega)


def harmonic_space(pg: PathGraph) -> list[Cochain]:
    """Basis of ker d*, the space of harmonic forms.

    A 1-cochain is harmonic iff it is a circulation: at every vertex the
    signed sum of incident edge values vanishes.  The basis consists of
    the fundamental circulations of a breadth-first spanning forest: one
    unit cycle per non-forest edge.  Its size |E| - |V| + #components is
    cross-checked against the rank oracle in the test suite.
    """
    nv, ne = pg.num_vertices, pg.num_edges
    forest_up: list[tuple[int, int] | None] = [None] * nv  # vertex -> (parent vertex, edge)
    in_forest = [False] * ne
    seen = [False] * nv
    for root in range(nv):
        if seen[root]:
            continue
        seen[root] = True
        queue = [root]
        qi = 0
        while qi < len(queue):
            s = queue[qi]
            qi += 1
            for a in pg.edges_out_of[s]:
                t = pg.head[a]
                if not seen[t]:
                    seen[t] = True
                    in_forest[a] = True
                    forest_up[t] = (s, a)
                    queue.append(t)
            for a in pg.edges_into[s]:
                t = pg.tail[a]
                if not seen[t]:
                    seen[t] = True
                    in_forest[a] = True
                    forest_up[t] = (s, a)
                    queue.append(t)

    def path_to_root(s: int) -> list[tuple[int, int, int]]:
        """(edge, from, to) steps walking up the forest from s."""
        steps = []
        while forest_up[s] is not None:
            parent, a = forest_up[s]
            steps.append((a, s, parent))
            s = parent
        return steps

    basis = []
    for a in range(ne):
        if in_forest[a]:
            continue
        t, h = pg.tail[a], pg.head[a]
        # Unit flow around the cycle: along a from tail to head, then back
        # through the forest from head to tail.
        vec = {a: ONE}
        up_h = path_to_root(h)
        up_t = path_to_root(t)
        # Trim the common tail of both root paths (the part above the meet).
        while up_h and up_t and up_h[-1][0] == up_t[-1][0]:
            up_h.pop()
            up_t.pop()
        for e, frm, to in up_h:  # traversed from h upward: direction frm -> to
            delta = ONE if pg.tail[e] == frm else -ONE
            vec[e] = vec.get(e, ZERO) + delta
        for e, frm, to in up_t:  # traversed downward on the t side: reverse
            delta = ONE if pg.tail[e] == to else -ONE
            vec[e] = vec.get(e, ZERO) + delta
        basis.append(Cochain(1, vec))
    return basis


def incidence_rows(pg: PathGraph):
    """Rows of the coboundary matrix d: one sparse row per edge."""
    for a in range(pg.num_edges):
        h, t = pg.head[a], pg.tail[a]
        if h == t:  # cannot happen: edge paths are injective
            yield {}
        else:
            yield {h: ONE, t: -ONE}


def coboundary_rank(pg: PathGraph) -> int:
    """rank(d), computed by exact sparse elimination."""
    return _linalg.rank_of_rows(incidence_rows(pg))


def h1c_dimension(pg: PathGraph) -> int:
    """dim of compactly supported H^1 = dim C^1 - rank(d)."""
    return pg.num_edges - coboundary_rank(pg)


def intersect_harmonic_exact(pg: PathGraph) -> int:
    """dim(ker d* intersect im d), by exact rank of the stacked system.

    dim(A + B) is the rank of the stacked bases; the intersection follows
    from dim A + dim B - dim(A + B).  Positivity of the rational pairing
    forces 0; the computation verifies it rather than assuming it.
    """
    cycles = [c.data for c in harmonic_space(pg)]
    dim_a = len(cycles)
    elim = _linalg.Eliminator()
    dim_b = 0
    for s in range(pg.num_vertices):
        row: dict[int, Fraction] = {}
        for a in pg.edges_into[s]:
            row[a] = row.get(a, ZERO) + ONE
        for a in pg.edges_out_of[s]:
            row[a] = row.get(a, ZERO) - ONE
        if elim.insert({k: v for k, v in row.items() if v}):
            dim_b += 1
    for c in cycles:
        elim.insert(c)
    dim_sum = elim.rank
    return dim_a + dim_b - dim_sum


def act_on_cochain(pg: PathGraph, maps: tuple[list[int], list[int]], c: Cochain) -> Cochain:
    """Push a cochain forward along an automorphism's (vertex, edge) maps."""
    vmap, emap = maps
    return c.permuted(vmap if c.level == 0 else emap)


# -- export formats ---------------------------------------------------


def cochain_to_csv(c: Cochain) -> str:
    kind = "V" if c.level == 0 else "E"
    lines = ["kind,id,numerator,denominator"]
    for i in sorted(c.support):
        x = c.data[i]
        lines.append(f"{kind},{i},{x.numerator},{x.denominator}")
    return "\n".join(lines) + "\n"


def basis_manifest(pg: PathGraph, basis: list[Cochain], files: list[str]) -> str:
    payload = {
        "dimension": len(basis),
        "edges": pg.num_edges,
        "vertices": pg.num_vertices,
        "components": num_components(pg),
        "vectors": files,
    }
    return json.dumps(payload, sort_keys=True) + "\n"
