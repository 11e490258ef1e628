"""Tent-sum functions into l_p (0 < p < 1) and their Riemann averages.

The package builds continuous, Riemann-integrable f: [0, 1] -> l_p from
two scalar sequences (A_q, beta_q), evaluates Ave[f](s, t) exactly, and
decides whether Ave[f] is bounded, separately continuous or jointly
continuous.
"""

from .average import (
    AverageSample,
    TaggedPartition,
    UndefinedExtensionError,
    ave,
    block_weight,
    grid_scan,
    half_block_sample,
    integral,
    lipschitz_quotient,
    primitive,
    riemann_sum,
    window_max,
)
from .block_index import BlockCoordinates, coordinate, decode, encode
from .construction import (
    ARule,
    BetaRule,
    ConfigError,
    ConstructionSpec,
    TentInterval,
    Variant,
    Verdict,
    coefficient_A,
    coefficient_beta,
    f_eval,
    lam,
    locate,
    node,
    partial_sum,
    tail_ratio,
    x_vector,
)
from .diagnostics import (
    Label,
    boundedness_report,
    build_report,
    classify,
    joint_continuity_report,
    separate_continuity_report,
    verify_proof_inequalities,
)
from .lp_space import SparseVector, linear_combine, quasi_norm
from .moduli import WitnessFamily, concavity_modulus, extremal_witness, modulus_sup_oracle

__all__ = [
    "AverageSample",
    "TaggedPartition",
    "UndefinedExtensionError",
    "ave",
    "block_weight",
    "grid_scan",
    "half_block_sample",
    "integral",
    "lipschitz_quotient",
    "primitive",
    "riemann_sum",
    "window_max",
    "BlockCoordinates",
    "coordinate",
    "decode",
    "encode",
    "ARule",
    "BetaRule",
    "ConfigError",
    "ConstructionSpec",
    "TentInterval",
    "Variant",
    "Verdict",
    "coefficient_A",
    "coefficient_beta",
    "f_eval",
    "lam",
    "locate",
    "node",
    "partial_sum",
    "tail_ratio",
    "x_vector",
    "Label",
    "boundedness_report",
    "build_report",
    "classify",
    "joint_continuity_report",
    "separate_continuity_report",
    "verify_proof_inequalities",
    "SparseVector",
    "linear_combine",
    "quasi_norm",
    "WitnessFamily",
    "concavity_modulus",
    "extremal_witness",
    "modulus_sup_oracle",
]

__version__ = "0.1.0"
