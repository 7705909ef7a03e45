"""Combinatorics of tree singularities: posets, links, charts, sheaves, quivers."""

from .errors import ArborealError
from .trees import (
    Correspondence,
    RootedTree,
    Tree,
    compose_correspondences,
    distance,
    free_trees,
    identity_correspondence,
    make_correspondence,
    path_tree,
    quotient_tree,
    rooted_leq,
    rooted_trees,
    star_tree,
    validate_tree,
)
from .poset import (
    ArborealPoset,
    an_poset_isomorphism,
    enumerate_poset,
    poset_leq,
    rank,
    upset_isomorphism,
)
from .complexes import (
    ChainComplex,
    SimplicialComplex,
    betti,
    check_cell_regularity,
    check_intersection_property,
    export_complex,
    f_vector,
    order_complex,
)
from .hypersurface import (
    Codirection,
    LPoint,
    SignVector,
    classify,
    coray_fiber,
    dilate,
    front_stratum,
    in_hypersurface,
    sample,
    stratum_of,
    transport,
)
from .sheaves import (
    ExitFunctor,
    FunctorComplex,
    FunctorMap,
    codirection_test,
    compose_maps,
    cone,
    constant_functor,
    generator_P,
    hom_generator,
    k0_decompose,
    rhom,
    sections_over,
    simple_complex,
    triangle_map_u,
)
from .quiver import (
    PerfectComplex,
    Representation,
    TreeQuiver,
    functor_istar,
    functor_qshriek,
    hom_dims,
    hom_ext,
    local_model_compare,
    one_term,
    projective,
    restriction,
    simple,
    std_resolution,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
