from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from combdyn.complex import (
    build_complex,
    closure,
    co,
    co_iterative,
    grid_co,
    interval,
    is_closed,
    is_open,
    is_orderly_convex,
    orderly_convexity_witness,
    order_components,
    read_mesh,
    upper_set,
    write_mesh,
)
from combdyn.mesh import grid_mesh
from oracles import co_oracle, solid_is_convex
from toys import interval_complex, named, pqrs_complex


def random_planar_complex(rng):
    """A convex planar complex with at most 12 simplices and exact coordinates."""
    kind = rng.integers(4)
    if kind == 0:
        k = int(rng.integers(1, 7))
        xs = np.cumsum(rng.integers(1, 4, size=k))
        return build_complex([(Fraction(int(x)),) for x in xs], [(i, i + 1) for i in range(k - 1)] or [(0,)])
    if kind == 1:
        k = int(rng.integers(2, 6))
        d = rng.integers(-3, 4, size=2)
        while not d.any():
            d = rng.integers(-3, 4, size=2)
        ts = np.cumsum(rng.integers(1, 3, size=k))
        pts = [(int(t * d[0]), int(t * d[1])) for t in ts]
        return build_complex(pts, [(i, i + 1) for i in range(k - 1)])
    while True:
        n = 3 if kind == 2 else 4
        pts = [tuple(int(c) for c in rng.integers(0, 7, size=2)) for _ in range(n)]
        if len(set(pts)) < n:
            continue
        if n == 3:
            a, b, c = pts
            if (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]) != 0:
                return build_complex(pts, [(0, 1, 2)])
            continue
        # keep quadrilaterals in strictly convex position, ordered around the hull
        cx = sum(p[0] for p in pts) / 4
        cy = sum(p[1] for p in pts) / 4
        pts.sort(key=lambda p: np.arctan2(p[1] - cy, p[0] - cx))
        turns = [
            (pts[(i + 1) % 4][0] - pts[i][0]) * (pts[(i + 2) % 4][1] - pts[i][1])
            - (pts[(i + 1) % 4][1] - pts[i][1]) * (pts[(i + 2) % 4][0] - pts[i][0])
            for i in range(4)
        ]
        if all(t > 0 for t in turns):
            tris = [(0, 1, 2), (0, 2, 3)] if rng.integers(2) else [(0, 1, 3), (1, 2, 3)]
            return build_complex(pts, tris)


def test_build_interval_complex():
    K, ids = interval_complex()
    assert len(K) == 5
    assert [K.simplices[i] for i in range(5)] == [(0,), (1,), (2,), (0, 1), (1, 2)]
    assert sorted(K.toplexes) == [ids["AB"], ids["BC"]]


def test_build_point_and_pqrs():
    assert len(build_complex(1, [(0,)])) == 1
    K, _ = pqrs_complex()
    # four vertices, five edges, two triangles
    assert len(K) == 11
    assert [int((K.dims == k).sum()) for k in range(3)] == [4, 5, 2]


def test_ids_extend_face_order():
    K, _ = pqrs_complex()
    for s in range(len(K)):
        assert all(f <= s for f in K.all_faces[s])
        assert all(K.is_face(f, s) for f in K.facets[s])
        for f in K.facets[s]:
            assert s in K.cofacets[f]


@pytest.mark.parametrize(
    "vertices, toplexes",
    [(3, [(0, 1), (1, 0)]), (3, [(0, 3)]), ([(0, 0), (1,)], [(0, 1)])],
)
def test_build_errors(vertices, toplexes):
    with pytest.raises(ValueError):
        build_complex(vertices, toplexes)


def test_closure_and_stars():
    K, ids = interval_complex()
    assert closure(K, [ids["AB"]]) == named(ids, "A", "B", "AB")
    assert closure(K, []) == frozenset()
    assert upper_set(K, ids["B"]) == named(ids, "B", "AB", "BC")
    assert is_open(K, [ids["AB"]])
    assert not is_open(K, [ids["B"]])
    P, pid = pqrs_complex()
    assert closure(P, [pid["PQR"]]) == named(pid, "P", "Q", "R", "PQ", "PR", "QR", "PQR")


def test_interval():
    K, ids = pqrs_complex()
    assert interval(K, ids["Q"], ids["QRS"]) == named(ids, "Q", "QR", "QS", "QRS")
    assert interval(K, ids["Q"], ids["Q"]) == named(ids, "Q")
    I, iid = interval_complex()
    assert interval(I, iid["AB"], iid["B"]) == frozenset()


def test_order_components():
    K, ids = interval_complex()
    assert len(order_components(K, named(ids, "A", "BC"))) == 2
    assert order_components(K, named(ids, "AB", "B", "BC")) == [named(ids, "AB", "B", "BC")]
    assert order_components(K, []) == []


def test_orderly_convexity():
    K, ids = pqrs_complex()
    assert is_orderly_convex(K, named(ids, "S", "RS", "QS", "QRS"))
    assert not is_orderly_convex(K, named(ids, "P", "PQR"))
    w = orderly_convexity_witness(K, named(ids, "P", "PQR"))
    assert w[0] == ids["P"] and w[2] == ids["PQR"] and w[1] in (ids["PQ"], ids["PR"])
    assert all(is_orderly_convex(K, [s]) for s in range(len(K)))


def test_co_examples():
    K, ids = interval_complex()
    assert co(K, named(ids, "AB", "BC")) == named(ids, "AB", "B", "BC")
    assert co(K, named(ids, "AB")) == named(ids, "AB")
    path = build_complex([(Fraction(i),) for i in range(5)], [(i, i + 1) for i in range(4)])
    a, b = path.id_of((0, 1)), path.id_of((3, 4))
    assert co(path, [a, b]) == frozenset(range(len(path))) - {path.id_of((0,)), path.id_of((4,))}


def test_co_errors():
    K, ids = interval_complex()
    with pytest.raises(ValueError):
        co(K, [])
    with pytest.raises(ValueError):
        co(build_complex(3, [(0, 1, 2)]), [0])


def test_co_matches_exhaustive_oracle():
    rng = np.random.default_rng(7)
    checked = 0
    while checked < 200:
        K = random_planar_complex(rng)
        A = [s for s in range(len(K)) if rng.random() < 0.3] or [int(rng.integers(len(K)))]
        assert co(K, A) == co_oracle(K, A, full=len(K) - len(A) <= 8), (K.simplices, A)
        checked += 1


def test_oracle_convexity_agrees_on_results():
    rng = np.random.default_rng(11)
    for _ in range(50):
        K = random_planar_complex(rng)
        A = [int(rng.integers(len(K)))]
        assert solid_is_convex(K, co(K, A))


def test_grid_fast_path_matches_iteration():
    K = grid_mesh((-1, 1, -1, 1), 3)
    rng = np.random.default_rng(3)
    tops = list(K.toplexes)
    for _ in range(60):
        A = [int(t) for t in rng.choice(tops, size=int(rng.integers(1, 5)), replace=False)]
        assert grid_co(K, A) == co_iterative(K, A)


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_closure_operators(data):
    K = grid_mesh((0, 1, 0, 1), 2)
    ids = st.sets(st.integers(0, len(K) - 1), min_size=1, max_size=5)
    A = data.draw(ids)
    B = A | data.draw(ids)
    for op in (lambda X: closure(K, X), lambda X: co(K, X)):
        oa, ob = op(A), op(B)
        assert A <= oa and oa <= ob and op(oa) == oa
    assert is_closed(K, closure(K, A))
    comp = frozenset(range(len(K))) - frozenset(A)
    assert is_open(K, A) == is_closed(K, comp)


def test_mesh_roundtrip(tmp_path):
    K = grid_mesh((-1, 1, -1, 1), 3, 2)
    path = tmp_path / "mesh.txt"
    write_mesh(K, path)
    L = read_mesh(path)
    assert L.simplices == K.simplices
    assert (L.grid.nx, L.grid.ny) == (K.grid.nx, K.grid.ny)
    assert np.array_equal(L.float_coords, K.float_coords)


def test_read_mesh_missing_vertex(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("v 0 0\nv 1 0\nt 0 1 2\n")
    with pytest.raises(ValueError):
        read_mesh(path)
