import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from combdyn.persistence import Barcode, PersistenceModule, concat, filtration_persistence, zigzag_decompose
from oracles import interval_sum, zigzag_oracle


def random_module(rng, max_total=6):
    n = int(rng.integers(1, 6))
    while True:
        dims = [int(x) for x in rng.integers(0, 3, size=n)]
        if sum(dims) <= max_total:
            break
    forward = [bool(x) for x in rng.integers(0, 2, size=n - 1)]
    maps = []
    for i in range(n - 1):
        src, dst = (i, i + 1) if forward[i] else (i + 1, i)
        maps.append(rng.integers(0, 2, size=(dims[dst], dims[src])).astype(np.uint8))
    return dims, maps, forward


def bars(barcode):
    return sorted((b, d) for _, b, d in barcode.intervals)


def test_filtration_examples():
    one = np.ones((1, 1), dtype=np.uint8)
    zero = np.zeros((1, 1), dtype=np.uint8)
    assert bars(filtration_persistence(PersistenceModule.from_forward([1, 1, 1], [one, one]))) == [(1, 3)]
    assert bars(filtration_persistence(PersistenceModule.from_forward([1, 1], [zero]))) == [(1, 1), (2, 2)]


def test_zigzag_examples():
    one = np.ones((1, 1), dtype=np.uint8)
    zero = np.zeros((1, 1), dtype=np.uint8)
    M = PersistenceModule([1, 1, 1], [one, zero], [True, False])
    assert bars(zigzag_decompose(M)) == [(1, 2), (3, 3)]
    eye = np.eye(2, dtype=np.uint8)
    M = PersistenceModule([2, 2, 2, 2], [eye, eye, eye], [False, True, False])
    assert bars(zigzag_decompose(M, degree=1)) == [(1, 4), (1, 4)]
    assert zigzag_decompose(M, degree=1).of_dim(1) == [(1, 4), (1, 4)]


def test_merge_at_a_cospan():
    # two classes born apart meet in the middle: V <- W -> V with W = F2 mapping to both
    a = np.array([[1]], dtype=np.uint8)
    M = PersistenceModule([1, 1, 1], [a, a], [False, True])
    assert bars(zigzag_decompose(M)) == [(1, 3)]
    M = PersistenceModule([1, 0, 1], [np.zeros((1, 0)), np.zeros((0, 1))], [False, True])
    assert bars(zigzag_decompose(M)) == [(1, 1), (3, 3)]


def test_shape_errors():
    with pytest.raises(ValueError):
        PersistenceModule([1, 1], [], [])
    with pytest.raises(ValueError):
        PersistenceModule([1, 2], [np.ones((1, 1))], [True])
    M = PersistenceModule([1, 1], [np.ones((1, 1))], [False])
    with pytest.raises(ValueError):
        filtration_persistence(M)


def test_zigzag_matches_exhaustive_oracle():
    rng = np.random.default_rng(2718)
    cases = 0
    while cases < 1000:
        dims, maps, forward = random_module(rng)
        got = zigzag_decompose(PersistenceModule(dims, maps, forward))
        assert bars(got) == zigzag_oracle(dims, maps, forward), (dims, maps, forward)
        got.check_pointwise({0: dims})
        cases += 1


def test_interval_sums_decompose_to_themselves():
    rng = np.random.default_rng(5)
    for _ in range(200):
        n = int(rng.integers(1, 6))
        forward = [bool(x) for x in rng.integers(0, 2, size=n - 1)]
        ivs = []
        for _ in range(int(rng.integers(0, 4))):
            b = int(rng.integers(1, n + 1))
            ivs.append((b, int(rng.integers(b, n + 1))))
        dims, maps = interval_sum(n, ivs, forward)
        assert bars(zigzag_decompose(PersistenceModule(dims, maps, forward))) == sorted(ivs)


def test_forward_modules_agree():
    rng = np.random.default_rng(77)
    for _ in range(300):
        n = int(rng.integers(1, 7))
        dims = [int(x) for x in rng.integers(0, 4, size=n)]
        maps = [rng.integers(0, 2, size=(dims[i + 1], dims[i])).astype(np.uint8) for i in range(n - 1)]
        M = PersistenceModule.from_forward(dims, maps)
        assert filtration_persistence(M).intervals == zigzag_decompose(M).intervals
        filtration_persistence(M).check_pointwise({0: dims})


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_pointwise_dimension(seed):
    dims, maps, forward = random_module(np.random.default_rng(seed), max_total=12)
    bc = zigzag_decompose(PersistenceModule(dims, maps, forward), degree=1)
    assert [bc.pointwise(1, t) for t in range(1, len(dims) + 1)] == dims


def test_pointwise_check_raises():
    bc = Barcode(3, [(0, 1, 2)])
    with pytest.raises(AssertionError):
        bc.check_pointwise({0: [1, 1, 1]})


def test_csv_roundtrip_with_inf(tmp_path):
    bc = Barcode(5, [(1, 2, 5), (0, 1, 3), (0, 4, 5)])
    path = tmp_path / "bars.csv"
    bc.write_csv(path)
    assert path.read_text().splitlines() == ["dim,birth,death", "0,1,3", "0,4,inf", "1,2,inf"]
    assert Barcode.read_csv(path, 5).intervals == bc.intervals


def test_concat():
    a = Barcode(3, [(0, 1, 3)])
    b = Barcode(3, [(1, 2, 2)])
    assert concat([a, b]).intervals == [(0, 1, 3), (1, 2, 2)]
    with pytest.raises(ValueError):
        a.merged(Barcode(4, []))
    with pytest.raises(ValueError):
        concat([])
