"""Polygonality of words in free groups via Whitehead-graph cycle decompositions."""

from .freegroup import (
    Alphabet,
    Automorphism,
    Word,
    WordError,
    apply_automorphism,
    are_independent,
    cyclic_equal,
    cyclic_reduce,
    parse_word,
    primitive_root,
)
from .graphprops import (
    cut_vertices,
    edge_connectivity,
    is_connected,
    is_k_valent,
    is_planar,
    isomorphic_to,
    manning_obstruction,
)
from .polygon import (
    PolygonalityCertificate,
    SearchBounds,
    enumerate_polynomials,
    enumerate_transition_systems,
    search,
    search_certificate,
    search_surface,
    trace_cycles,
)
from .reduce import enumerate_whitehead_moves, is_diskbusting, minimize
from .surface import (
    CycleDecomposition,
    PolygonSpec,
    SurfaceReport,
    build_surface,
    doubled_euler,
    oracle_enumerate,
    verify_side_pairing,
)
from .whitehead import Polynomial, WhiteheadGraph, incidences_at, sigma, whitehead_graph

__version__ = "0.1.0"
