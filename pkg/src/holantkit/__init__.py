"""holantkit: Holant partition functions on domain size 3.

Brute-force grid evaluation, tractability certificates for symmetric
ternary signatures, holographic transformations, the Boolean-domain
dichotomy, polynomial-time evaluators, and the chain-interpolation
reduction.
"""

from .sigcore import (
    B,
    G,
    R,
    EvalConfig,
    SignatureError,
    SymmetricSignature,
    Tensor,
    connect_unary,
    decomposability_rank_test,
    is_degenerate,
    matrix_form,
    restrict,
    symmetrize,
    tensor_power,
    tensor_product,
    to_tensor,
)
from .holo import (
    BETA0,
    BETA0_BAR,
    Transform,
    apply_transform,
    covariant_binary,
    inner,
    is_isotropic,
    iso_plus_perp,
    normalize_isotropic,
    normalize_nonisotropic,
    pair_isotropic,
    stabilizer_of_beta0,
)
from .grideval import (
    GridTooLargeError,
    SignatureGrid,
    bipartite_grid,
    gadget_signature,
    holant,
    regression_fixture_suite,
)
from .boolean import BooleanClass, classify_boolean_symmetric, fibonacci_witness
from .classify import Certificate, classify, decompose_rank3, detect_form3, find_rank2_unary
from .fasteval import TractableInstance, fast_holant
from .interp import OccurrenceInstance, build_chain_instance, interpolate

__version__ = "0.1.0"
