from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from combdyn.complex import build_complex, closure
from combdyn.dynamics import maximal_invariant_set
from combdyn.mesh import grid_mesh
from combdyn.mvf import (
    CvcmfTrace,
    InvalidFieldError,
    MultivectorField,
    cvcmf,
    generated_system,
    intersect,
    is_trivial_morse,
    pullback,
    read_cloud,
    simplex_angle,
    singleton_field,
    validate_mvf,
    write_cloud,
    _toplex_frames,
)
from combdyn.systems import sample_lv_vectors
from toys import interval_complex, named, pqrs_complex, pqrs_field


def kite():
    """Triangles PQR and QRS sharing the vertical edge QR, with wide angles at P and S."""
    h = Fraction(1, 2)
    K = build_complex([(-h, 0), (0, -1), (0, 1), (h, 0)], [(0, 1, 2), (1, 2, 3)])
    ids = {"".join("PQRS"[v] for v in K.simplices[s]): s for s in range(len(K))}
    return K, ids


def parts_by_name(V, ids):
    name = {v: k for k, v in ids.items()}
    return sorted(sorted(name[s] for s in p) for p in V.parts)


def field(K, ids, groups):
    return validate_mvf(K, [[ids[n] for n in g.split()] for g in groups])


def test_pqrs_field_is_valid():
    K, ids, V = pqrs_field()
    assert len(V) == 5
    assert V.part(ids["PR"]) == named(ids, "P", "PR")


def test_singleton_partition_is_valid():
    K, _ = pqrs_complex()
    V = validate_mvf(K, [[s] for s in range(len(K))])
    assert V.parts == singleton_field(K).parts


def test_invalid_fields_report_witness():
    K, ids = pqrs_complex()
    rest = [[s] for s in range(len(K)) if s not in (ids["P"], ids["PQR"])]
    with pytest.raises(InvalidFieldError) as err:
        validate_mvf(K, [[ids["P"], ids["PQR"]]] + rest)
    w = err.value.witness
    assert (w[0], w[2]) == (ids["P"], ids["PQR"]) and w[1] in (ids["PQ"], ids["PR"])
    with pytest.raises(InvalidFieldError) as err:
        validate_mvf(K, [[s] for s in range(len(K))] + [[ids["Q"]]])
    assert err.value.witness == ids["Q"]
    with pytest.raises(InvalidFieldError) as err:
        validate_mvf(K, [[s] for s in range(len(K)) if s != ids["S"]])
    assert err.value.witness == ids["S"]
    with pytest.raises(InvalidFieldError):
        validate_mvf(K, [[s] for s in range(len(K))] + [[]])


def test_generated_system_of_pqrs():
    K, ids, V = pqrs_field()
    F = generated_system(V)
    assert F(ids["PQR"]) == closure(K, [ids["PQR"]])
    assert F(ids["P"]) == named(ids, "P", "PR")
    assert F(ids["PQ"]) == named(ids, "P", "Q", "PQ")
    assert F(ids["S"]) == named(ids, "S", "RS", "QS", "QRS")
    assert F(ids["QRS"]) == named(ids, "Q", "R", "S", "QR", "RS", "QS", "QRS")
    assert all(s in F(s) for s in range(len(K)))
    assert maximal_invariant_set(F) == frozenset(range(len(K)))


def test_singleton_field_generates_closures():
    K, _ = pqrs_complex()
    F = generated_system(singleton_field(K))
    assert all(F(s) == closure(K, [s]) for s in range(len(K)))


def test_intersections():
    K, ids, V = pqrs_field()
    assert intersect(V, V).parts == V.parts
    assert intersect(V, singleton_field(K)).parts == singleton_field(K).parts
    W = field(K, ids, ["P PQ", "Q", "R PR", "QR QRS", "PQR", "S QS", "RS"])
    X = intersect(V, W)
    oracle = {p & q for p in V.parts for q in W.parts} - {frozenset()}
    assert set(X.parts) == oracle
    assert X.inscribed_in(V) and X.inscribed_in(W)
    FX, FV, FW = generated_system(X), generated_system(V), generated_system(W)
    for s in range(len(K)):
        assert FX(s) <= FV(s) and FX(s) <= FW(s)


def test_pullback():
    K, ids, V = pqrs_field()
    assert pullback(K, list(range(len(K))), V).parts == V.parts
    # fold C onto A: A, B, C, AB, BC -> A, B, A, AB, AB
    I, iid = interval_complex()
    f = [0] * len(I)
    for src, dst in {"A": "A", "B": "B", "C": "A", "AB": "AB", "BC": "AB"}.items():
        f[iid[src]] = iid[dst]
    target = field(I, iid, ["A AB", "B", "C", "BC"])
    P = pullback(I, f, target)
    oracle = {frozenset(s for s in range(len(I)) if f[s] in p) for p in target.parts} - {frozenset()}
    assert set(P.parts) == oracle
    assert set(P.parts) == {named(iid, "A", "C", "AB", "BC"), named(iid, "B")}
    Y = intersect(field(I, iid, ["A", "B AB", "C BC"]), P)
    assert Y.inscribed_in(P)


def test_pullback_needs_order_preserving_map():
    I, iid = interval_complex()
    V = singleton_field(I)
    f = list(range(len(I)))
    f[iid["A"]] = iid["C"]
    with pytest.raises(ValueError):
        pullback(I, f, V)


def test_finer_fields_generate_smaller_systems():
    K, ids, V = pqrs_field()
    S = singleton_field(K)
    assert S.inscribed_in(V) and not V.inscribed_in(S)
    FS, FV = generated_system(S), generated_system(V)
    assert all(FS(s) <= FV(s) for s in range(len(K)))


def test_cvcmf_groups_shared_edge_with_endpoints():
    K, ids = kite()
    # P and S point across at QR, Q and R point along it at each other
    vectors = np.array([[1.0, 0.0], [0.0, 1.0], [0.0, -1.0], [-1.0, 0.0]])
    trace = CvcmfTrace()
    V = cvcmf(K, vectors, 45.0, trace)
    assert parts_by_name(V, ids) == [["P", "PQ", "PQR", "PR"], ["Q", "QR", "R"], ["QRS", "QS", "RS", "S"]]
    assert trace.conflict_updates == 0


def test_cvcmf_conflict_removal():
    K, ids = kite()
    # Q tilts into QRS: steps (b) and (c) send Q and QR to QRS but R to QR,
    # and removing the two conflicts pulls all three back to QR
    vectors = np.array([[1.0, 0.0], [0.1, 1.0], [0.0, -1.0], [-1.0, 0.0]])
    trace = CvcmfTrace()
    V = cvcmf(K, vectors, 0.0, trace)
    assert parts_by_name(V, ids) == [["P", "PQ", "PQR", "PR"], ["Q", "QR", "R"], ["QRS", "QS", "RS", "S"]]
    assert trace.conflict_updates == 2


def test_cvcmf_zero_angle_keeps_only_exact_alignments():
    K, ids = kite()
    # P tilts so that PR is 46.7 degrees off and PQ 80 degrees off
    vectors = np.array([[1.0, 0.3], [0.0, 1.0], [0.0, -1.0], [-1.0, 0.0]])
    trace = CvcmfTrace()
    V = cvcmf(K, vectors, 50.0, trace)
    assert parts_by_name(V, ids) == [["P", "PR"], ["PQ", "PQR"], ["Q", "QR", "R"], ["QRS", "QS", "RS", "S"]]
    assert trace.conflict_updates == 1
    V0 = cvcmf(K, vectors, 0.0)
    assert parts_by_name(V0, ids) == [["P", "PQ", "PQR", "PR"], ["Q", "QR", "R"], ["QRS", "QS", "RS", "S"]]


def test_edge_angle_is_measured_along_the_edge():
    K, ids = kite()
    frames = _toplex_frames(K)
    toward = simplex_angle(K, frames, ids["QR"], ids["Q"], np.array([0.0, 1.0]))
    away = simplex_angle(K, frames, ids["QR"], ids["Q"], np.array([0.0, -1.0]))
    assert toward == 0.0 and away == 180.0
    assert simplex_angle(K, frames, ids["PQR"], ids["P"], np.array([1.0, 0.0])) == 0.0
    assert simplex_angle(K, frames, ids["PQR"], ids["P"], np.array([-1.0, 0.0])) == float("inf")
    assert simplex_angle(K, frames, ids["PQ"], ids["P"], np.zeros(2)) == 0.0


def test_cvcmf_vector_count_mismatch():
    K, _ = kite()
    with pytest.raises(ValueError):
        cvcmf(K, np.zeros((3, 2)), 10.0)


@settings(max_examples=40, deadline=None)
@given(
    st.lists(st.tuples(st.floats(-1, 1), st.floats(-1, 1)), min_size=16, max_size=16),
    st.sampled_from([0.0, 7.0, 21.0, 45.0, 90.0]),
)
def test_cvcmf_always_returns_a_field(vecs, alpha):
    K = grid_mesh((0, 1, 0, 1), 3)
    vectors = np.array(vecs)
    trace = CvcmfTrace()
    V = cvcmf(K, vectors, alpha, trace)
    assert sorted(s for p in V.parts for s in p) == list(range(len(K)))
    assert trace.conflict_updates <= len(K) ** 2
    assert maximal_invariant_set(generated_system(V)) == frozenset(range(len(K)))


def test_cvcmf_on_predator_prey_grid():
    K = grid_mesh((0.05, 3.5, 0.05, 2.0), 12, 8)
    vectors = sample_lv_vectors(K)
    fields = [cvcmf(K, vectors, a) for a in (0.0, 14.0, 35.0)]
    assert all(isinstance(V, MultivectorField) for V in fields)


def test_trivial_morse_examples():
    K, ids, V = pqrs_field()
    assert not is_trivial_morse(V, named(ids, "PQR"))
    assert is_trivial_morse(V, named(ids, "P", "PR"))
    assert not is_trivial_morse(V, named(ids, "P"))
    whole = singleton_field(K)
    assert not is_trivial_morse(whole, range(len(K)))
    path = build_complex([(0,), (1,), (2,)], [(0, 1), (1, 2)])
    W = singleton_field(path)
    q, pq = path.id_of((1,)), path.id_of((0, 1))
    assert is_trivial_morse(W, [q, pq])


def test_cloud_roundtrip(tmp_path):
    K = grid_mesh((0.05, 3.5, 0.05, 2.0), 4, 3)
    vectors = sample_lv_vectors(K)
    path = tmp_path / "cloud.csv"
    write_cloud(path, K, vectors)
    assert path.read_text().splitlines()[0] == "px,py,vx,vy"
    pts, vec = read_cloud(path)
    assert np.array_equal(pts, K.float_coords) and np.array_equal(vec, vectors)


def test_field_dump_roundtrip(tmp_path):
    K, _, V = pqrs_field()
    V.dump(tmp_path / "v.txt")
    assert MultivectorField.load(K, tmp_path / "v.txt").parts == V.parts
