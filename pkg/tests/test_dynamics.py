import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from combdyn.dynamics import (
    CombinatorialDynamicalSystem,
    connections,
    is_invariant,
    is_isolated_invariant,
    is_isolating_neighborhood,
    maximal_invariant_set,
    minimal_morse_decomposition,
)
from combdyn.mvf import generated_system
from oracles import morse_oracle, reach_closure
from toys import interval_complex, named, pqrs_field

# successor lists of the two threshold systems on the interval complex
F03 = {"A": "AB B BC", "B": "AB B BC", "C": "BC", "AB": "AB B BC", "BC": "BC"}
F04 = {"A": "AB", "B": "AB B BC", "C": "BC", "AB": "AB", "BC": "BC"}


def toy_system(table):
    K, ids = interval_complex()
    succ = {ids[k]: [ids[x] for x in v.split()] for k, v in table.items()}
    return CombinatorialDynamicalSystem.from_successors(K, succ), ids


def random_digraph(rng, n_max=12):
    n = int(rng.integers(1, n_max + 1))
    p = rng.uniform(0.02, 0.35)
    edges = [(a, b) for a in range(n) for b in range(n) if rng.random() < p]
    return n, edges


def test_morse_sets_of_threshold_systems():
    F, ids = toy_system(F03)
    M = minimal_morse_decomposition(F)
    assert M.sets == [named(ids, "B", "AB"), named(ids, "BC")]
    assert M.order_pairs() == [(0, 1)]
    F, ids = toy_system(F04)
    M = minimal_morse_decomposition(F)
    assert M.sets == [named(ids, "B"), named(ids, "AB"), named(ids, "BC")]
    assert sorted(M.order_pairs()) == [(0, 1), (0, 2)]


def test_pqrs_morse_decomposition():
    K, ids, V = pqrs_field()
    M = minimal_morse_decomposition(generated_system(V))
    m1 = named(ids, "P", "Q", "R", "PQ", "PR", "QR")
    m2 = named(ids, "S", "RS", "QS", "QRS")
    m3 = named(ids, "PQR")
    assert set(M.sets) == {m1, m2, m3}
    i1, i2, i3 = (M.sets.index(m) for m in (m1, m2, m3))
    assert M.greater(i3, i1) and M.greater(i2, i1)
    assert not M.greater(i1, i2) and not M.greater(i2, i3) and not M.greater(i3, i2)


def test_invariance():
    F, ids = toy_system(F03)
    assert is_invariant(F, named(ids, "AB", "B", "BC"))
    assert is_invariant(F, [])
    F4, ids = toy_system(F04)
    assert not is_invariant(F4, named(ids, "A"))


def test_maximal_invariant_set():
    F, ids = toy_system(F04)
    S = maximal_invariant_set(F)
    assert ids["A"] not in S and ids["C"] not in S
    K, _, V = pqrs_field()
    assert maximal_invariant_set(generated_system(V)) == frozenset(range(len(K)))
    assert maximal_invariant_set(CombinatorialDynamicalSystem.from_digraph(4, [])) == frozenset()


def test_isolation():
    F, ids = toy_system(F03)
    everything = frozenset(ids.values())
    assert is_isolating_neighborhood(F, everything, named(ids, "BC"))
    assert not is_isolating_neighborhood(F, named(ids, "A", "B", "AB"), named(ids, "AB"))
    assert not is_isolating_neighborhood(F, named(ids, "AB", "B"), named(ids, "AB"))
    assert not is_isolated_invariant(F, named(ids, "AB"))
    _, pid, V = pqrs_field()
    G = generated_system(V)
    assert is_isolated_invariant(G, named(pid, "PQR"))
    # a vertex is closed and carries a loop, so {v} isolates itself
    singles = [s for s in range(len(V.complex)) if is_isolated_invariant(G, [s])]
    assert singles == sorted(named(pid, "P", "Q", "R", "S", "PQR"))
    assert is_isolating_neighborhood(G, named(pid, "P"), named(pid, "P"))


def test_triangle_boundary_edges_are_not_isolated():
    # Q is paired with PQ, so (PQ, Q, PQ) is a walk in cl PQR leaving the edge set
    _, pid, V = pqrs_field()
    G = generated_system(V)
    edges = named(pid, "PQ", "PR", "QR")
    assert pid["Q"] in G(pid["PQ"]) and pid["PQ"] in G(pid["Q"])
    assert is_invariant(G, edges)
    assert not is_isolated_invariant(G, edges)


def test_connections():
    F, ids = toy_system(F03)
    assert connections(F, named(ids, "AB", "B"), named(ids, "BC"))
    assert not connections(F, named(ids, "BC"), named(ids, "AB", "B"))
    assert connections(F, named(ids, "BC"), named(ids, "BC"))


def test_walks_respect_the_order():
    for table in (F03, F04):
        F, _ = toy_system(table)
        M = minimal_morse_decomposition(F)
        for i, a in enumerate(M.sets):
            for j, b in enumerate(M.sets):
                if i != j and connections(F, a, b):
                    assert M.greater(i, j)


def test_dump_roundtrip(tmp_path):
    F, _ = toy_system(F03)
    F.dump(tmp_path / "g.txt")
    G = CombinatorialDynamicalSystem.load(F.complex, tmp_path / "g.txt")
    assert G.edges() == F.edges()


def test_matches_brute_force_oracle():
    rng = np.random.default_rng(2024)
    for _ in range(500):
        n, edges = random_digraph(rng)
        F = CombinatorialDynamicalSystem.from_digraph(n, edges)
        M = minimal_morse_decomposition(F)
        sets, greater = morse_oracle(n, edges)
        assert M.sets == sets
        assert set(M.order_pairs()) == greater


@settings(max_examples=150, deadline=None)
@given(st.integers(1, 10).flatmap(lambda n: st.tuples(st.just(n), st.sets(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1))))))
def test_decomposition_invariants(graph):
    n, edges = graph
    F = CombinatorialDynamicalSystem.from_digraph(n, sorted(edges))
    M = minimal_morse_decomposition(F)
    seen = set()
    for m in M.sets:
        assert not seen & m
        seen |= m
        assert is_invariant(F, m)
        assert is_isolated_invariant(F, m)
    # every Morse set lies in the maximal invariant set
    assert M.union <= maximal_invariant_set(F)
    R = reach_closure(n, edges)
    S = {v for v in range(n) if any(R[u, u] and R[u, v] for u in range(n)) and any(R[u, u] and R[v, u] for u in range(n))}
    S |= {v for v in range(n) if R[v, v]}
    assert maximal_invariant_set(F) == frozenset(S)
    # strict partial order
    pairs = set(M.order_pairs())
    assert all((j, i) not in pairs for i, j in pairs)
    assert all((i, k) in pairs for i, j in pairs for j2, k in pairs if j == j2)


def test_union_can_be_smaller_than_invariant_set():
    # a -> a, a -> b, b -> c, c -> c: b lies on a full solution but in no cycle
    F = CombinatorialDynamicalSystem.from_digraph(3, [(0, 0), (0, 1), (1, 2), (2, 2)])
    assert minimal_morse_decomposition(F).union == frozenset({0, 2})
    assert maximal_invariant_set(F) == frozenset({0, 1, 2})


def test_out_of_range_successor():
    K, _ = interval_complex()
    with pytest.raises(ValueError):
        CombinatorialDynamicalSystem.from_successors(K, {0: [9]})
