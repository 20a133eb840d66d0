"""Named verification suites.

Each suite builds its own objects from the run parameters, performs the
exact checks, and returns (passed, report) with a JSON-ready report; the
command line wraps these.  On failure the report carries a minimal
counterexample.

Truncation note for the transform-kills-coboundaries suite: on a finite
ball the apartment sum of df telescopes to f(last window) - f(first
window), so it vanishes exactly for f supported on vertices whose hull
avoids the leaves, and equals the telescoped difference otherwise.  The
suite verifies both statements; the unrestricted infinite-tree phrasing
is recovered in the leaf-avoiding scope.
"""

from __future__ import annotations

import random
from fractions import Fraction

from . import _linalg
from .cochains import (Cochain, adjoint, coboundary, h1c_dimension,
                       harmonic_space, incidence_rows, pairing)
from .padic import (embed_ball, fixes_path_pointwise, sample_gamma0,
                    sample_with_exact_lower_valuation, standard_path,
                    stabilizer_transitivity_check, tree_distance)
from .radon import (exactness_check, fundamental_loops, induced_apartments,
                    interior_edges, interior_vertices, minimal_exact_margin,
                    path_integral, primitive, radon_kernel_interior,
                    radon_transform, random_loops, span_check)
from .tower import (apply_automorphism, build_path_graph, num_components)
from .tree import (TreeParams, build_ball, enumerate_oriented_diameters,
                   random_automorphism)

ZERO = Fraction(0)


def _random_sparse(rng: random.Random, level: int, ids, size: int) -> Cochain:
    ids = list(ids)
    data = {}
    for _ in range(min(size, len(ids))):
        data[rng.choice(ids)] = Fraction(rng.randrange(-9, 10), rng.randrange(1, 8))
    return Cochain(level, data)


def check_euler(q: int, radius: int, k: int) -> tuple[bool, dict]:
    ball = build_ball(TreeParams(q, radius))
    pg = build_path_graph(ball, k)
    basis = harmonic_space(pg)
    ncomp = num_components(pg)
    euler = pg.num_edges - pg.num_vertices + ncomp
    h1 = h1c_dimension(pg)
    not_harmonic = sum(1 for w in basis if not adjoint(pg, w).is_zero())
    passed = len(basis) == euler == h1 and not_harmonic == 0
    return passed, {
        "suite": "euler", "q": q, "R": radius, "k": k,
        "vertices": pg.num_vertices, "edges": pg.num_edges, "components": ncomp,
        "harmonic_dim": len(basis), "euler_dim": euler, "h1c_dim": h1,
        "non_harmonic_basis_elements": not_harmonic, "passed": passed,
    }


def check_adjoint(q: int, radius: int, k: int, seed: int, samples: int = 100) -> tuple[bool, dict]:
    ball = build_ball(TreeParams(q, radius))
    pg = build_path_graph(ball, k)
    rng = random.Random(seed)
    counterexample = None
    for _ in range(samples):
        f = _random_sparse(rng, 0, range(pg.num_vertices), 4)
        w = _random_sparse(rng, 1, range(pg.num_edges), 4) if pg.num_edges else Cochain.zero(1)
        if pairing(w, coboundary(pg, f)) != pairing(adjoint(pg, w), f):
            counterexample = {"f": {i: str(x) for i, x in f.data.items()},
                              "omega": {i: str(x) for i, x in w.data.items()}}
            break
    passed = counterexample is None
    return passed, {"suite": "adjoint", "q": q, "R": radius, "k": k,
                    "samples": samples, "counterexample": counterexample,
                    "passed": passed}


def check_radon_d(q: int, radius: int, k: int, seed: int, samples: int = 100) -> tuple[bool, dict]:
    """Transform of a coboundary: exhaustively zero on leaf-avoiding vertex
    indicators, and equal to the telescoped end-window difference on all
    other indicators; zero on random leaf-avoiding 0-cochains."""
    ball = build_ball(TreeParams(q, radius))
    pg = build_path_graph(ball, k)
    aps = induced_apartments(pg, enumerate_oriented_diameters(ball))
    inner = set(interior_vertices(pg, 0))

    failures = []
    ends_at: dict[int, list[int]] = {}
    starts_at: dict[int, list[int]] = {}
    for ap in aps:
        ends_at.setdefault(pg.vert_index[pg.edges[ap.edges[-1]][1:]], []).append(ap.id)
        starts_at.setdefault(pg.vert_index[pg.edges[ap.edges[0]][:-1]], []).append(ap.id)
    one = Fraction(1)
    for s in range(pg.num_vertices):
        image = radon_transform(pg, aps, coboundary(pg, Cochain.indicator(0, s)))
        predicted: dict[int, Fraction] = {}
        for i in ends_at.get(s, ()):
            predicted[i] = predicted.get(i, ZERO) + one
        for i in starts_at.get(s, ()):
            predicted[i] = predicted.get(i, ZERO) - one
        predicted = {i: v for i, v in predicted.items() if v}
        if s in inner and predicted:
            failures.append({"vertex": s, "kind": "interior vertex is an apartment end"})
        if image != predicted:
            failures.append({"vertex": s, "kind": "telescoping mismatch"})

    rng = random.Random(seed)
    inner_ids = sorted(inner)
    random_failures = 0
    for _ in range(samples if inner_ids else 0):
        f = _random_sparse(rng, 0, inner_ids, 5)
        if radon_transform(pg, aps, coboundary(pg, f)):
            random_failures += 1
    passed = not failures and random_failures == 0
    return passed, {"suite": "radon-d", "q": q, "R": radius, "k": k,
                    "exhaustive_failures": failures[:5],
                    "random_failures": random_failures,
                    "interior_vertices": len(inner_ids),
                    "samples": samples, "passed": passed}


def check_exactness(q: int, radius: int, k: int, margin: int, scan: bool = False) -> tuple[bool, dict]:
    ball = build_ball(TreeParams(q, radius))
    pg = build_path_graph(ball, k)
    aps = induced_apartments(pg, enumerate_oriented_diameters(ball))
    rep = exactness_check(pg, aps, margin)
    out = {"suite": "exactness", "q": q, "R": radius, "k": k, "margin": margin,
           "kernel_dim": rep.kernel_dim, "image_dim": rep.image_dim,
           "interior_edges": rep.interior_edge_count,
           "interior_vertices": rep.interior_vertex_count,
           "equal": rep.equal, "passed": rep.equal}
    if scan:
        out["minimal_passing_margin"] = minimal_exact_margin(pg, aps, margin)
    return rep.equal, out


def check_loops(q: int, radius: int, k: int, margin: int, seed: int,
                samples: int = 200) -> tuple[bool, dict]:
    ball = build_ball(TreeParams(q, radius))
    pg = build_path_graph(ball, k)
    aps = induced_apartments(pg, enumerate_oriented_diameters(ball))
    inner = interior_edges(pg, margin)
    if not inner:
        return True, {"suite": "loops", "q": q, "R": radius, "k": k, "margin": margin,
                      "kernel_dim": 0, "loops": 0, "interior_edges": 0, "passed": True}
    basis = radon_kernel_interior(pg, aps, margin)
    loops = fundamental_loops(pg, inner) + random_loops(pg, inner, samples, seed)
    bad = None
    for w in basis:
        for i, loop in enumerate(loops):
            if path_integral(w, loop) != 0:
                bad = {"loop_index": i, "edges": list(loop.edges)}
                break
        if bad:
            break
    passed = bad is None
    return passed, {"suite": "loops", "q": q, "R": radius, "k": k, "margin": margin,
                    "kernel_dim": len(basis), "loops": len(loops),
                    "counterexample": bad, "passed": passed}


def _solve_df_equals(pg, omega: Cochain):
    rows = list(incidence_rows(pg))
    rhs = [omega.data.get(a, ZERO) for a in range(pg.num_edges)]
    return _linalg.solve(rows, rhs, pg.num_vertices)


def check_primitive(q: int, radius: int, k: int, margin: int) -> tuple[bool, dict]:
    """Primitive reconstruction for every kernel-basis element, compared
    against an exact linear solve of df = omega up to one constant per
    component."""
    from .tower import UnionFind

    ball = build_ball(TreeParams(q, radius))
    pg = build_path_graph(ball, k)
    aps = induced_apartments(pg, enumerate_oriented_diameters(ball))
    inner = interior_edges(pg, margin)
    if not inner:
        return True, {"suite": "primitive", "q": q, "R": radius, "k": k,
                      "margin": margin, "kernel_dim": 0, "passed": True}
    basis = radon_kernel_interior(pg, aps, margin)

    uf = UnionFind(pg.num_vertices)
    for h, t in zip(pg.head, pg.tail):
        uf.union(h, t)
    comp_of = [uf.find(s) for s in range(pg.num_vertices)]

    from .radon import enlarged_support
    failures = []
    for idx, w in enumerate(basis):
        enlarged = enlarged_support(pg, w)
        outside = [s for s in range(pg.num_vertices) if s not in enlarged]
        if not outside:
            failures.append({"basis": idx, "reason": "no base vertex available"})
            continue
        f = primitive(pg, aps, w, min(outside))
        for a in range(pg.num_edges):
            if f(pg.head[a]) - f(pg.tail[a]) != w(a):
                failures.append({"basis": idx, "reason": f"df mismatch at edge {a}"})
                break
        else:
            sol = _solve_df_equals(pg, w)
            if sol is None:
                failures.append({"basis": idx, "reason": "oracle solve inconsistent"})
                continue
            per_comp: dict[int, Fraction] = {}
            ok = True
            for s in range(pg.num_vertices):
                delta = f(s) - sol.get(s, ZERO)
                comp = comp_of[s]
                if comp not in per_comp:
                    per_comp[comp] = delta
                elif per_comp[comp] != delta:
                    failures.append({"basis": idx,
                                     "reason": f"oracle differs non-constantly at {s}"})
                    ok = False
                    break
            if not ok:
                continue
    passed = not failures
    return passed, {"suite": "primitive", "q": q, "R": radius, "k": k, "margin": margin,
                    "kernel_dim": len(basis), "failures": failures[:5], "passed": passed}


def check_equivariance(q: int, radius: int, k: int, seed: int,
                       automorphisms: int = 20) -> tuple[bool, dict]:
    """d, d*, and the transform commute with seeded ball automorphisms;
    head/tail maps (hence all incidence numbers) are preserved."""
    ball = build_ball(TreeParams(q, radius))
    pg = build_path_graph(ball, k)
    aps = induced_apartments(pg, enumerate_oriented_diameters(ball))
    base_of = {ap.base: ap.id for ap in aps}
    rng = random.Random(seed)
    failures = []
    for i in range(automorphisms):
        g = random_automorphism(ball, seed + 7 * i)
        vmap, emap = apply_automorphism(pg, g)
        for a in range(pg.num_edges):
            if pg.head[emap[a]] != vmap[pg.head[a]] or pg.tail[emap[a]] != vmap[pg.tail[a]]:
                failures.append({"auto": i, "kind": "incidence", "edge": a})
                break
        ap_perm = {}
        ok = True
        for ap in aps:
            image = tuple(g.perm[v] for v in ap.base)
            j = base_of.get(image)
            if j is None:
                failures.append({"auto": i, "kind": "apartment image missing"})
                ok = False
                break
            ap_perm[ap.id] = j
        if not ok:
            continue
        for _ in range(3):
            f = _random_sparse(rng, 0, range(pg.num_vertices), 4)
            w = (_random_sparse(rng, 1, range(pg.num_edges), 4)
                 if pg.num_edges else Cochain.zero(1))
            if coboundary(pg, f.permuted(vmap)) != coboundary(pg, f).permuted(emap):
                failures.append({"auto": i, "kind": "coboundary"})
            if adjoint(pg, w.permuted(emap)) != adjoint(pg, w).permuted(vmap):
                failures.append({"auto": i, "kind": "adjoint"})
            before = radon_transform(pg, aps, w)
            after = radon_transform(pg, aps, w.permuted(emap))
            if {ap_perm[i_]: v for i_, v in before.items()} != after:
                failures.append({"auto": i, "kind": "radon"})
    passed = not failures
    return passed, {"suite": "equivariance", "q": q, "R": radius, "k": k,
                    "automorphisms": automorphisms, "failures": failures[:5],
                    "passed": passed}


def check_padic(p: int, radius: int) -> tuple[bool, dict]:
    emb = embed_ball(p, radius)
    n = emb.ball.num_vertices
    mismatches = 0
    for u in range(n):
        for v in range(n):
            if emb.ball.distance(u, v) != tree_distance(emb.to_lattice[u], emb.to_lattice[v], p):
                mismatches += 1
    passed = mismatches == 0
    return passed, {"suite": "padic", "p": p, "R": radius, "vertices": n,
                    "distance_mismatches": mismatches, "passed": passed}


def check_stabilizer(p: int, n: int, samples: int, seed: int,
                     modulus_exp: int = 6) -> tuple[bool, dict]:
    """Sampled congruence-subgroup elements of level n+1 fix the standard
    (n+1)-path pointwise; elements with lower-left valuation exactly n
    move it."""
    emb = embed_ball(p, n + 1)
    path = standard_path(emb, n)
    fixers = sample_gamma0(p, n + 1, modulus_exp, samples, seed)
    moved = [g for g in fixers if not fixes_path_pointwise(g, emb, path)]
    movers = sample_with_exact_lower_valuation(p, n, modulus_exp, max(20, samples // 10), seed + 1)
    somebody_moved = any(not fixes_path_pointwise(g, emb, path) for g in movers)
    passed = not moved and somebody_moved
    return passed, {"suite": "stabilizer", "p": p, "n": n, "samples": samples,
                    "modulus_exp": modulus_exp,
                    "fixers_that_moved": len(moved),
                    "boundary_mover_found": somebody_moved, "passed": passed}


def check_transitivity(p: int, seed: int = 0) -> tuple[bool, dict]:
    """Stabilizer orbit coverage on the root 0-path and the standard
    interior 1-path (positive certificates via unit-lift enumeration)."""
    emb2 = embed_ball(p, 2)
    pg0 = build_path_graph(emb2.ball, 0)
    root0 = pg0.vert_index[(0,)]
    r_plus = stabilizer_transitivity_check(emb2, pg0, root0, "+", 2)
    r_minus = stabilizer_transitivity_check(emb2, pg0, root0, "-", 2)

    emb3 = embed_ball(p, 3)
    pg1 = build_path_graph(emb3.ball, 1)
    s1 = pg1.vert_index[standard_path(emb3, 0)]
    t_plus = stabilizer_transitivity_check(emb3, pg1, s1, "+", 3)
    t_minus = stabilizer_transitivity_check(emb3, pg1, s1, "-", 3)

    results = [r_plus, r_minus, t_plus, t_minus]
    passed = all(r.covered for r in results)
    conclusive = all(r.conclusive for r in results)
    return passed, {"suite": "transitivity", "p": p,
                    "root_0path": {"plus": r_plus.covered, "minus": r_minus.covered},
                    "standard_1path": {"plus": t_plus.covered, "minus": t_minus.covered},
                    "conclusive": conclusive, "passed": passed}


def check_span(q: int, radius: int) -> tuple[bool, dict]:
    ball = build_ball(TreeParams(q, radius))
    diams = enumerate_oriented_diameters(ball)
    kmax = 2 * radius - 1
    pgs = [build_path_graph(ball, k) for k in range(kmax + 1)]
    full = span_check(pgs, diams)
    only0 = span_check(pgs[:1], diams)
    passed = full and not only0
    return passed, {"suite": "span", "q": q, "R": radius, "K": kmax,
                    "spans_at_K": full, "spans_at_0": only0,
                    "diameters": len(diams), "passed": passed}
