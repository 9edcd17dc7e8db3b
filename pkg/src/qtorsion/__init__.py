"""Exact combinatorics of simple polytopes, characteristic maps and torsion certificates."""

from .errors import *  # noqa: F401,F403
from .polytope import (
    CombinatorialPolytope,
    Face,
    SubComplex,
    ValidationReport,
    all_faces,
    check,
    cube,
    face_counts,
    face_from_facets,
    face_of_vertices,
    face_polytope,
    find_isomorphism,
    interval,
    is_isomorphic,
    polygon,
    prism,
    product_with_simplex,
    simplex,
    validate,
)
from .charmap import (
    CharMap,
    InducedCharMap,
    compute_dF,
    induce_on_face,
    singularity_group,
    singularity_order,
    singularity_order_in_face,
    validate_rchar,
)

from .constructions import (
    BlowdownResult,
    BlowupResult,
    ProductStructure,
    WedgeParams,
    blowdown,
    blowup,
    detect_product_structure,
    fiber_determinants,
    k_wedge,
    k_wedge_char,
    restrict_char,
    wedge_as_blowdown,
    wedge_char_on_product,
)
from .retraction import (
    InducedRetractionReport,
    RetractionSequence,
    RetractionStep,
    enumerate_retractions,
    face_induced_retraction,
    find_p_clean_retraction,
    find_retraction,
    free_vertices,
    induced_retraction_2wedge,
    induced_retraction_blowdown,
    next_complex,
    retraction_from_order,
    singularity_trace,
    verify_retraction,
)
from .torsion import (
    RationalCombination,
    TorsionCertificate,
    all_prime_scan,
    blowdown_torsion_check,
    check_A2,
    check_plain,
    kwedge_torsion_check,
    plain_prime_scan,
    verify_certificate,
)
from .simplicial import (
    SimplicialComplex,
    VertexCharMap,
    complex_isomorphism,
    dual_of_polytope,
    simplicial_k_wedge,
    wedge_vertex_vectors,
)

__version__ = "0.1.0"
