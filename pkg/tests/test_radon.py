"""Radon transform: apartments, kernel, exactness, loop integrals, primitives."""

import json
import random
from fractions import Fraction

import pytest

from treeforms import _linalg
from treeforms.cochains import Cochain, coboundary
from treeforms.radon import (MarginError, PathDependenceError,
                             WalkWithSigns, apartments_through, enlarged_support,
                             exactness_check, fundamental_loops,
                             induced_apartments, interior_edges,
                             interior_vertices, minimal_exact_margin,
                             path_integral, primitive, radon_image_csv,
                             radon_kernel_interior, radon_transform,
                             random_loops, span_check)
from treeforms.tower import build_path_graph
from treeforms.tree import enumerate_oriented_diameters

from conftest import apartments, ball, tower

ZERO = Fraction(0)
ONE = Fraction(1)


class TestInducedApartments:
    def test_ball21_k0_windows(self):
        aps = apartments(2, 1, 0)
        assert len(aps) == 6
        for ap in aps:
            assert len(ap.edges) == 2

    def test_full_length_window_single(self):
        # k = diameter length - 1: one window per (long enough) diameter.
        # ball(2,2) has 24 length-4 diameters and 6 length-2 ones between
        # sibling leaves; the short ones carry no level-3 window.
        aps = apartments(2, 2, 3)
        assert len(aps) == 24
        for ap in aps:
            assert len(ap.edges) == 1
        short = apartments(2, 2, 1)
        assert sum(1 for ap in short if len(ap.edges) == 1) == 6

    def test_k_too_large_empty(self):
        b = ball(2, 1)
        pg = build_path_graph(b, 2)  # no 3-paths in radius-1 ball
        aps = induced_apartments(pg, enumerate_oriented_diameters(b))
        assert len(aps) == 0

    def test_windows_are_contiguous_oriented(self):
        pg = tower(2, 2, 1)
        for ap in apartments(2, 2, 1):
            for a in ap.edges:
                e = pg.edges[a]
                n = len(e)
                base = ap.base
                assert any(base[i:i + n] == e for i in range(len(base) - n + 1))
            # consecutive windows chain head-to-tail: constant +1 incidence
            for a, b_ in zip(ap.edges, ap.edges[1:]):
                assert pg.edges[b_][:-1] == pg.edges[a][1:]

    def test_reversed_diameter_reverses_edges(self):
        pg = tower(2, 2, 1)
        aps = apartments(2, 2, 1)
        by_base = {ap.base: ap for ap in aps}
        for ap in aps:
            rev = by_base[tuple(reversed(ap.base))]
            rev_seqs = [tuple(reversed(pg.edges[a])) for a in rev.edges]
            assert rev_seqs == [pg.edges[a] for a in reversed(ap.edges)]


class TestApartmentsThrough:
    def test_ball21_root_edge(self):
        pg = tower(2, 1, 0)
        aps = apartments(2, 1, 0)
        a = pg.edges.index((0, 1))
        through = apartments_through(aps, a)
        assert len(through) == 2
        # the two apartments end at leaf 1 coming from the other two leaves
        assert {ap.base for ap in through} == {(2, 0, 1), (3, 0, 1)}

    def test_full_window_selects_single_apartment(self):
        pg = tower(2, 2, 3)
        aps = apartments(2, 2, 3)
        for ap in aps:
            assert aps.through(ap.edges[0]) == [ap.id]

    def test_membership_by_construction(self):
        aps = apartments(2, 2, 1)
        for ap in aps:
            for a in ap.edges:
                assert ap.id in aps.through(a)

    def test_unknown_edge(self):
        aps = apartments(2, 1, 0)
        with pytest.raises(ValueError):
            aps.through(999)


class TestRadonTransform:
    def test_zero(self):
        pg = tower(2, 1, 0)
        assert radon_transform(pg, apartments(2, 1, 0), Cochain.zero(1)) == {}

    def test_indicator_gives_characteristic_function(self):
        pg = tower(2, 2, 1)
        aps = apartments(2, 2, 1)
        for a in range(0, pg.num_edges, 3):
            image = radon_transform(pg, aps, Cochain.indicator(1, a))
            assert image == {i: ONE for i in aps.through(a)}

    def test_kills_interior_coboundaries(self):
        pg = tower(2, 2, 1)
        aps = apartments(2, 2, 1)
        rng = random.Random(4)
        inner = interior_vertices(pg, 0)
        for _ in range(50):
            f = Cochain(0, {rng.choice(inner): Fraction(rng.randrange(-5, 6), rng.randrange(1, 4))
                            for _ in range(3)})
            assert radon_transform(pg, aps, coboundary(pg, f)) == {}

    def test_boundary_coboundary_telescopes(self):
        """On a truncation the image of d(leaf indicator) is the telescoped
        end-window difference, not zero."""
        pg = tower(2, 1, 0)
        aps = apartments(2, 1, 0)
        leaf_path = pg.vert_index[(1,)]
        image = radon_transform(pg, aps, coboundary(pg, Cochain.indicator(0, leaf_path)))
        expected = {}
        for ap in aps:
            v = (1 if ap.base[-1] == 1 else 0) - (1 if ap.base[0] == 1 else 0)
            if v:
                expected[ap.id] = Fraction(v)
        assert image == expected

    def test_csv_format(self):
        csv = radon_image_csv({3: Fraction(1, 2), 1: Fraction(-2)})
        assert csv.splitlines() == ["apartment_id,numerator,denominator",
                                    "1,-2,1", "3,1,2"]


class TestInterior:
    def test_interior_edges_small_margin(self):
        pg = tower(2, 4, 0)
        # margin 2: doubled edges of the radius-2 subball
        assert len(interior_edges(pg, 2)) == 18
        assert len(interior_vertices(pg, 2)) == 4

    def test_empty_interior(self):
        pg = tower(2, 3, 2)
        assert interior_edges(pg, 4) == []

    def test_coboundary_of_interior_vertex_stays_interior(self):
        pg = tower(2, 4, 1)
        inner_edges = set(interior_edges(pg, 2))
        for s in interior_vertices(pg, 2):
            df = coboundary(pg, Cochain.indicator(0, s))
            assert set(df.support) <= inner_edges


class TestRadonKernel:
    def test_empty_interior_rejected(self):
        pg = tower(2, 3, 2)
        aps = apartments(2, 3, 2)
        with pytest.raises(MarginError):
            radon_kernel_interior(pg, aps, 4)

    @pytest.mark.parametrize("q,radius,k,margin,dim", [
        (2, 1, 0, 0, 1),   # star ball: kernel is spanned by d(root indicator)
        (2, 4, 0, 2, 4),
        (3, 3, 0, 2, 1),
        (2, 4, 1, 3, 0),
    ])
    def test_kernel_dimensions(self, q, radius, k, margin, dim):
        pg = tower(q, radius, k)
        aps = apartments(q, radius, k)
        assert len(radon_kernel_interior(pg, aps, margin)) == dim

    def test_kernel_elements_killed_and_interior(self):
        pg = tower(2, 4, 0)
        aps = apartments(2, 4, 0)
        inner = set(interior_edges(pg, 2))
        for w in radon_kernel_interior(pg, aps, 2):
            assert radon_transform(pg, aps, w) == {}
            assert set(w.support) <= inner

    def test_kernel_against_dense_nullspace_oracle(self):
        """Dense oracle: full apartment-by-interior-edge matrix RREF."""
        from test_linalg import dense_rref_rank
        pg = tower(2, 4, 0)
        aps = apartments(2, 4, 0)
        inner = interior_edges(pg, 2)
        col = {a: j for j, a in enumerate(inner)}
        matrix = []
        for ap in aps:
            row = [ZERO] * len(inner)
            touched = False
            for a in ap.edges:
                if a in col:
                    row[col[a]] += ONE
                    touched = True
            if touched:
                matrix.append(row)
        rank = dense_rref_rank(matrix)
        assert len(radon_kernel_interior(pg, aps, 2)) == len(inner) - rank


class TestExactness:
    GRID = [(2, 3, 0), (2, 3, 1), (2, 3, 2),
            (2, 4, 0), (2, 4, 1), (2, 4, 2),
            (3, 3, 0), (3, 3, 1), (3, 3, 2)]

    @pytest.mark.parametrize("q,radius,k", GRID)
    def test_grid_equal_at_default_margin(self, q, radius, k):
        pg = tower(q, radius, k)
        aps = apartments(q, radius, k)
        rep = exactness_check(pg, aps, k + 2)
        assert rep.equal
        assert rep.kernel_dim == rep.image_dim

    def test_acyclic_interior_trivially_equal(self):
        pg = tower(2, 3, 2)
        aps = apartments(2, 3, 2)
        rep = exactness_check(pg, aps, 4)
        assert rep.equal and rep.kernel_dim == 0 and rep.image_dim == 0

    def test_nonvacuous_cells(self):
        expected = {(2, 4, 0): 4, (2, 3, 0): 1, (3, 3, 0): 1}
        for (q, radius, k), dim in expected.items():
            rep = exactness_check(tower(q, radius, k), apartments(q, radius, k), k + 2)
            assert rep.equal and rep.kernel_dim == dim

    def test_subspaces_not_just_dimensions(self):
        """Kernel basis and coboundary image span the same space exactly."""
        pg = tower(2, 4, 0)
        aps = apartments(2, 4, 0)
        kernel = [w.data for w in radon_kernel_interior(pg, aps, 2)]
        image = [coboundary(pg, Cochain.indicator(0, s)).data
                 for s in interior_vertices(pg, 2)]
        assert _linalg.spans_same_space(kernel, image)

    def test_larger_ball_nonvacuous_level1(self):
        """At radius 5 the level-1 check has genuine content (dim 6)."""
        pg = tower(2, 5, 1)
        aps = apartments(2, 5, 1)
        rep = exactness_check(pg, aps, 3)
        assert rep.equal and rep.kernel_dim == 6

    def test_minimal_margin_scan(self):
        pg = tower(2, 4, 0)
        aps = apartments(2, 4, 0)
        assert minimal_exact_margin(pg, aps, 2) == 0

    def test_report_json_fields(self):
        rep = exactness_check(tower(2, 3, 0), apartments(2, 3, 0), 2)
        payload = json.loads(rep.to_json())
        assert set(payload) == {"q", "R", "k", "margin", "kernel_dim", "image_dim", "equal"}


class TestWalksAndIntegrals:
    def test_sign_convention(self):
        pg = tower(2, 2, 1)
        a = 0
        t, h = pg.tail[a], pg.head[a]
        walk = WalkWithSigns.from_itinerary(pg, [a], [t, h])
        assert walk.signs == (1,)
        walk_rev = WalkWithSigns.from_itinerary(pg, [a], [h, t])
        assert walk_rev.signs == (-1,)
        assert path_integral(Cochain.indicator(1, a), walk) == 1
        assert path_integral(Cochain.indicator(1, a), walk_rev) == -1

    def test_malformed_walk(self):
        pg = tower(2, 2, 1)
        with pytest.raises(ValueError):
            WalkWithSigns.from_itinerary(pg, [0], [0, 17])

    def test_coboundary_loop_integral_vanishes(self):
        pg = tower(2, 2, 0)
        inner = interior_edges(pg, 0)
        loops = fundamental_loops(pg, inner) + random_loops(pg, inner, 30, seed=9)
        rng = random.Random(2)
        for _ in range(20):
            f = Cochain(0, {rng.randrange(pg.num_vertices): Fraction(rng.randrange(-5, 6))
                            for _ in range(4)})
            df = coboundary(pg, f)
            for loop in loops:
                assert loop.is_loop()
                assert path_integral(df, loop) == 0

    def test_kernel_loop_integrals_vanish(self):
        pg = tower(2, 4, 0)
        aps = apartments(2, 4, 0)
        inner = interior_edges(pg, 2)
        basis = radon_kernel_interior(pg, aps, 2)
        loops = fundamental_loops(pg, inner) + random_loops(pg, inner, 200, seed=3)
        assert loops
        for w in basis:
            for loop in loops:
                assert path_integral(w, loop) == 0

    def test_fundamental_loops_cover_cycle_space(self):
        pg = tower(2, 2, 0)
        inner = list(range(pg.num_edges))
        loops = fundamental_loops(pg, inner)
        # cycle count = E - V + C for the whole doubled tree
        from treeforms.tower import num_components
        assert len(loops) == pg.num_edges - pg.num_vertices + num_components(pg)


class TestPrimitive:
    def test_zero_cochain(self):
        pg = tower(2, 2, 0)
        aps = apartments(2, 2, 0)
        f = primitive(pg, aps, Cochain.zero(1), base=0)
        assert f.is_zero()

    def test_coboundary_of_interior_indicator_recovered(self):
        pg = tower(2, 4, 0)
        aps = apartments(2, 4, 0)
        s = pg.vert_index[(0,)]  # the root, deep interior
        omega = coboundary(pg, Cochain.indicator(0, s))
        base = pg.num_vertices - 1  # a leaf path, far from the support
        f = primitive(pg, aps, omega, base)
        assert f == Cochain.indicator(0, s)

    def test_kernel_basis_primitives_match_solve_oracle(self):
        pg = tower(2, 4, 0)
        aps = apartments(2, 4, 0)
        from treeforms.cochains import incidence_rows
        from treeforms.tower import components
        comps = components(pg)
        comp_of = {}
        for ci, comp in enumerate(comps):
            for s in comp:
                comp_of[s] = ci
        for w in radon_kernel_interior(pg, aps, 2):
            enlarged = enlarged_support(pg, w)
            base = max(s for s in range(pg.num_vertices) if s not in enlarged)
            f = primitive(pg, aps, w, base)
            # df = omega on every edge
            for a in range(pg.num_edges):
                assert f(pg.head[a]) - f(pg.tail[a]) == w(a)
            # support inside the enlarged region
            assert set(f.support) <= enlarged
            # matches an exact linear solve up to one constant per component
            sol = _linalg.solve(list(incidence_rows(pg)),
                                [w(a) for a in range(pg.num_edges)], pg.num_vertices)
            assert sol is not None
            deltas = {}
            for s in range(pg.num_vertices):
                deltas.setdefault(comp_of[s], set()).add(f(s) - sol.get(s, ZERO))
            assert all(len(vals) == 1 for vals in deltas.values())

    def test_base_inside_enlarged_region_rejected(self):
        pg = tower(2, 4, 0)
        aps = apartments(2, 4, 0)
        w = radon_kernel_interior(pg, aps, 2)[0]
        inside = min(enlarged_support(pg, w))
        with pytest.raises(MarginError):
            primitive(pg, aps, w, inside)

    def test_non_kernel_cochain_reports_loop(self):
        pg = tower(2, 3, 0)
        aps = apartments(2, 3, 0)
        bad = Cochain.indicator(1, 0)  # a single directed edge is not closed
        with pytest.raises(PathDependenceError) as err:
            primitive(pg, aps, bad, base=pg.num_vertices - 1)
        loop = err.value.loop
        assert loop.is_loop()
        assert path_integral(bad, loop) != 0


class TestSpan:
    def test_true_at_full_depth_false_at_zero(self):
        b = ball(2, 2)
        diams = enumerate_oriented_diameters(b)
        pgs = [tower(2, 2, k) for k in range(4)]
        assert span_check(pgs, diams) is True
        assert span_check(pgs[:1], diams) is False

    def test_top_level_alone_misses_short_diameters(self):
        """Level 3 separates only the 24 long diameters; the 6 sibling-leaf
        diameters need their level-1 full windows."""
        b = ball(2, 2)
        diams = enumerate_oriented_diameters(b)
        assert span_check([tower(2, 2, 3)], diams) is False
        assert span_check([tower(2, 2, 1), tower(2, 2, 3)], diams) is True

    def test_single_diameter_family(self):
        """One diameter, its full-length window level: a 1x1 identity."""
        from treeforms.tree import geodesic_between
        b = ball(2, 2)
        diam = geodesic_between(b, 4, 6)  # length 4
        assert span_check([tower(2, 2, 3)], [diam]) is True

    def test_manifest_counts(self):
        aps = apartments(2, 2, 1)
        payload = json.loads(aps.to_manifest_json())
        assert len(payload) == 30
        assert all(set(entry) == {"id", "leaf_from", "leaf_to", "induced_edges"}
                   for entry in payload)
