"""twistlab: finite-dimensional experiments on quasilinear maps,
twisted sums, their inverses and their duals."""

from .catalog import (
    CATALOG,
    RochbergVector,
    WeightVector,
    build_map,
    default_weights,
    kothe_differential,
    kothe_map,
    kp,
    kp_12,
    kp_21,
    kp12_map,
    kp21_map,
    kp_map,
    kp_rochberg_norm,
    orlicz_domain_fn,
    orlicz_range_fn,
    rochberg_differential,
    rochberg_inclusion,
    rochberg_map,
    rochberg_norm,
    rochberg_projection,
    symmetric_kothe_map,
    translation,
    translation_map,
    u_n,
)
from .duality import (
    DualPairSpec,
    block_pairing,
    duality_defect,
    duality_defect_on,
    dual_space,
    kp_order2_defect_on,
    kp_order2_duality_defect,
    perp_domain_check,
    zn_selfduality_check,
)
from .errors import (
    BracketError,
    DimensionMismatchError,
    InversionRefusedError,
    TwistlabError,
    UnknownMapError,
    UnsupportedMapError,
    WitnessDivergence,
)
from .quasilinear import (
    EstimateReport,
    QMap,
    bounded_equivalence_constant,
    boundedness_sweep,
    check_U_isomorphism,
    inverse_of_inverse_defect,
    make_inverse,
    one_quasilinearity_constant,
    quasilinearity_constant,
)
from .report import (
    ExperimentConfig,
    ReportBundle,
    Tolerances,
    config_from_ini,
    run_suite,
    serialize,
)
from .samplers import Sampler
from .spaces import (
    OrliczFn,
    RangeBound,
    SpaceSpec,
    TwistedVector,
    domain_norm,
    lp_norm,
    luxemburg_norm,
    orlicz_eval,
    range_norm_upper,
    twisted_norm,
    vec,
    weighted_l2_norm,
)
from .witnesses import WitnessFn, diagonal_witness, kp_preimage, kp_witness, zero_witness

__version__ = "0.1.0"
