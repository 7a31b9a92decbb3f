"""Small hand-checkable complexes, systems and fields shared by the tests."""

from fractions import Fraction

from combdyn.complex import build_complex
from combdyn.mvf import validate_mvf
from combdyn.sampled_map import FrequencyTable


def interval_complex():
    """Vertices A, B, C at 0, 1/2, 1 with toplexes AB and BC."""
    K = build_complex([(Fraction(0),), (Fraction(1, 2),), (Fraction(1),)], [(0, 1), (1, 2)])
    names = {"A": (0,), "B": (1,), "C": (2,), "AB": (0, 1), "BC": (1, 2)}
    return K, {k: K.id_of(v) for k, v in names.items()}


def interval_table(K, ids):
    """Counts with relative frequencies 11/12, 4/12, 3/12 and 12/12."""
    AB, BC = ids["AB"], ids["BC"]
    return FrequencyTable.from_counts(K, {(AB, AB): 11, (AB, BC): 4, (BC, AB): 3, (BC, BC): 12})


def pqrs_complex():
    """Triangles PQR and QRS glued along QR, realized on the unit square."""
    K = build_complex([(0, 0), (1, 0), (0, 1), (1, 1)], [(0, 1, 2), (1, 2, 3)])
    letters = "PQRS"
    ids = {}
    for s in range(len(K)):
        ids["".join(letters[v] for v in K.simplices[s])] = s
    return K, ids


def pqrs_field():
    K, ids = pqrs_complex()
    parts = [["P", "PR"], ["R", "QR"], ["Q", "PQ"], ["PQR"], ["S", "RS", "QS", "QRS"]]
    V = validate_mvf(K, [[ids[n] for n in p] for p in parts])
    return K, ids, V


def named(ids, *names):
    return frozenset(ids[n] for n in names)
