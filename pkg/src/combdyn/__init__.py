"""Combinatorial dynamics on simplicial complexes and persistence of Morse decompositions."""

from .complex import SimplicialComplex, build_complex, closure, co, read_mesh, upper_set, write_mesh
from .dynamics import CombinatorialDynamicalSystem, MorseDecomposition, minimal_morse_decomposition
from .mesh import grid_mesh
from .mvf import MultivectorField, cvcmf, generated_system, validate_mvf
from .persistence import Barcode, PersistenceModule, zigzag_decompose
from .sampled_map import FrequencyTable, build_f_mu, count_frequencies

__all__ = [
    "Barcode",
    "CombinatorialDynamicalSystem",
    "FrequencyTable",
    "MorseDecomposition",
    "MultivectorField",
    "PersistenceModule",
    "SimplicialComplex",
    "build_complex",
    "build_f_mu",
    "closure",
    "co",
    "count_frequencies",
    "cvcmf",
    "generated_system",
    "grid_mesh",
    "minimal_morse_decomposition",
    "read_mesh",
    "upper_set",
    "validate_mvf",
    "write_mesh",
    "zigzag_decompose",
]
