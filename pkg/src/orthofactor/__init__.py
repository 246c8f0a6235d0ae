"""Exact-arithmetic toolkit for orthogonal groups over commutative rings with
2 invertible: generator families, self-verifying factorization certificates,
relative-level bookkeeping and brute-force closure oracles."""

from .errors import OrthoError
from .rings import Ring, RingElement, SquareMatrix, poly_eval, matrix_poly_eval
from .spaces import (
    AmbientSpace,
    QuadraticSpace,
    check_transvection_data,
    complete_hyperbolic_pair,
    is_orthogonal,
    standard_gram,
    witt_frame,
)
from .generators import (
    AltBlockToken,
    ConjToken,
    DserToken,
    EichlerToken,
    EvenElementaryToken,
    GLBlockToken,
    OddElementaryToken,
    TransvectionToken,
    Word,
    block_embed,
    dser_matrix,
    e_transvection_matrix,
    fasel_commutator_identity,
    fasel_matrix,
    oe_matrix,
    sigma_matrix,
    word_eval,
)
from .factor import (
    FactorizationCertificate,
    conjugate_word,
    elementarize_alt_block,
    elementarize_gl_block,
    factor_e1_to_oe,
    factor_e2_to_oe,
    factor_oe_to_transvections,
    factor_sigma_axis,
    factor_sigma_full,
    homotopy_lift,
    odd_correspondence,
    split_dser,
)
from .relgroup import (
    ClosureSet,
    IdealSpec,
    LevelledWord,
    check_relative_shape,
    closure_enumerate,
    crt_localize,
    crt_reconstruct,
    equality_report,
    token_level,
    word_level,
)

__version__ = "0.1.0"
